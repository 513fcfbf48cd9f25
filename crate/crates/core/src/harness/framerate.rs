use std::sync::Arc;

use serde::Serialize;

use crate::behaviors::RotatorBehavior;
use crate::math::{Orientation, Rotator, Vec3};
use crate::scene::{Actor, ActorKind, AxisSample, Scene, Scripting};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FramerateRow {
    pub rate_hz: f64,
    pub frames: u64,
    pub frame_dt: f64,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDiff {
    pub rate_a: f64,
    pub rate_b: f64,
    /// Geodesic angle between the final orientations, degrees.
    pub angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FramerateReport {
    pub duration: f64,
    pub euler_rates: Rotator,
    pub rows: Vec<FramerateRow>,
    pub pairs: Vec<PairDiff>,
}

impl FramerateReport {
    pub fn row(&self, rate_hz: f64) -> Option<&FramerateRow> {
        self.rows.iter().find(|r| r.rate_hz == rate_hz)
    }

    pub fn diff(&self, rate_a: f64, rate_b: f64) -> Option<f64> {
        self.pairs
            .iter()
            .find(|p| (p.rate_a, p.rate_b) == (rate_a, rate_b) || (p.rate_a, p.rate_b) == (rate_b, rate_a))
            .map(|p| p.angle_deg)
    }
}

/// Spins one native-rotator cube for `duration` seconds at each frame rate
/// (no physics) and reports the final orientations.
///
/// Frame count is `round(duration * rate)` with `frame_dt = duration / frames`.
pub fn framerate_experiment(rates: &[f64], duration: f64, euler_rates: Rotator) -> Result<FramerateReport, String> {
    if rates.len() < 2 {
        return Err("need at least two rates".into());
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(format!("duration must be positive, got {duration}"));
    }
    if let Some(r) = rates.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(format!("rate must be positive, got {r}"));
    }
    let rows: Vec<FramerateRow> = rates
        .iter()
        .map(|&rate_hz| {
            let frames = ((duration * rate_hz).round() as u64).max(1);
            let frame_dt = duration / frames as f64;
            FramerateRow {
                rate_hz,
                frames,
                frame_dt,
                orientation: spin(euler_rates, frames, frame_dt),
            }
        })
        .collect();
    let mut pairs = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            pairs.push(PairDiff {
                rate_a: a.rate_hz,
                rate_b: b.rate_hz,
                angle_deg: a.orientation.angle_to_deg(b.orientation),
            });
        }
    }
    Ok(FramerateReport {
        duration,
        euler_rates,
        rows,
        pairs,
    })
}

fn spin(euler_rates: Rotator, frames: u64, frame_dt: f64) -> Orientation {
    let mut scene = Scene::new(frame_dt);
    let mut cube = Actor::new("cube", ActorKind::Cube, Vec3::ZERO);
    cube.scripting = Some(Scripting::Behaviors(vec![Arc::new(RotatorBehavior { euler_rates })]));
    let id = scene.spawn(cube);
    for _ in 0..frames {
        scene.dispatch_frame_events(frame_dt, AxisSample::default());
        scene.take_journal();
    }
    scene.get(id).expect("cube stays in the scene").transform.orientation
}
