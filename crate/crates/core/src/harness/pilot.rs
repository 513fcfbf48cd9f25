use std::path::Path;

use super::{InputTrace, RunError, Simulation};
use crate::math::Vec3;
use crate::scene::{ActorId, AxisSample, DriveMode, SceneFile, ScriptMode, PICK_UP_TAG};

const KP: f64 = 9.0;
const KD: f64 = 6.0;

/// Drives the ball through every pickup with a PD controller and records the
/// axes it used. Steers at the nearest remaining pickup until it is gone.
/// Stops on a win or after `max_steps`.
pub fn autopilot_trace(file: &SceneFile, base_dir: &Path, max_steps: u64) -> Result<InputTrace, RunError> {
    let c = &file.config;
    // planar acceleration produced by a unit axis value
    let gain = match c.drive_mode {
        DriveMode::Force => c.speed / c.ball_mass,
        DriveMode::TorqueRolling => {
            let inertia = c.rolling_inertia_factor * c.ball_mass * c.ball_radius * c.ball_radius;
            c.ball_radius * c.roll_torque / inertia
        }
    };
    let mut sim = Simulation::new(file, base_dir, ScriptMode::Script)?;
    let mut trace = InputTrace::new();
    let mut target: Option<ActorId> = None;
    for k in 0..max_steps {
        let scene = sim.scene();
        let Some((pos, vel)) = scene
            .actors()
            .iter()
            .find_map(|a| a.body.as_ref().map(|b| (a.transform.position, b.velocity)))
        else {
            break;
        };
        if target.is_none_or(|t| !scene.get(t).is_some_and(|a| a.active)) {
            target = scene
                .active_with_tag(PICK_UP_TAG)
                .min_by(|a, b| {
                    let da = planar(a.transform.position - pos).length();
                    let db = planar(b.transform.position - pos).length();
                    da.total_cmp(&db)
                })
                .map(|a| a.id);
        }
        let Some(goal) = target.and_then(|t| scene.get(t)).map(|a| a.transform.position) else {
            break;
        };
        let accel = planar(goal - pos) * KP - planar(vel) * KD;
        let axes = AxisSample::new(accel.x / gain, accel.z / gain);
        trace.set(k, axes);
        sim.tick(axes)?;
        if sim.won() {
            break;
        }
    }
    Ok(trace)
}

fn planar(v: Vec3) -> Vec3 {
    Vec3::new(v.x, 0.0, v.z)
}
