use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::{run, InputTrace, RunError, RunOptions, StepRecord, Trajectory};
use crate::scene::{SceneFile, SceneFileError, ScriptMode};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub step: u64,
    pub field: String,
    pub a_value: Value,
    pub b_value: Value,
    /// Infinite when the values are not numerically comparable.
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub tolerance: f64,
    pub steps_compared: u64,
    pub first_divergence: Option<Divergence>,
    pub max_abs_diff: f64,
    pub removal_steps_a: BTreeMap<u32, u64>,
    pub removal_steps_b: BTreeMap<u32, u64>,
}

/// Componentwise comparison of two trajectories. Headers are not compared.
pub fn compare(a: &Trajectory, b: &Trajectory, tolerance: f64) -> EquivalenceReport {
    let mut max_abs_diff: f64 = 0.0;
    let mut first: Option<Divergence> = None;
    let note = |d: Divergence, first: &mut Option<Divergence>| {
        if first.is_none() {
            *first = Some(d);
        }
    };
    for (ra, rb) in a.records.iter().zip(&b.records) {
        let (fa, fb) = (numeric_fields(ra), numeric_fields(rb));
        if fa.len() != fb.len() || fa.iter().zip(&fb).any(|(x, y)| x.0 != y.0) {
            let structural = structural_mismatch(ra, rb);
            max_abs_diff = f64::INFINITY;
            note(structural, &mut first);
            continue;
        }
        for ((name, x), (_, y)) in fa.iter().zip(&fb) {
            let d = (x - y).abs();
            max_abs_diff = max_abs_diff.max(d);
            if d > tolerance {
                note(
                    Divergence {
                        step: ra.step,
                        field: name.clone(),
                        a_value: json!(x),
                        b_value: json!(y),
                        abs_diff: d,
                    },
                    &mut first,
                );
            }
        }
        if ra.active_cubes != rb.active_cubes || ra.events != rb.events || ra.won != rb.won {
            max_abs_diff = f64::INFINITY;
            note(structural_mismatch(ra, rb), &mut first);
        }
    }
    if a.records.len() != b.records.len() {
        let n = a.records.len().min(b.records.len());
        max_abs_diff = f64::INFINITY;
        note(
            Divergence {
                step: n as u64 + 1,
                field: "length".into(),
                a_value: json!(a.records.len()),
                b_value: json!(b.records.len()),
                abs_diff: f64::INFINITY,
            },
            &mut first,
        );
    }
    let removal_steps_a = a.removal_steps();
    let removal_steps_b = b.removal_steps();
    let equivalent = max_abs_diff <= tolerance && removal_steps_a == removal_steps_b && first.is_none();
    EquivalenceReport {
        equivalent,
        tolerance,
        steps_compared: a.records.len().min(b.records.len()) as u64,
        first_divergence: first,
        max_abs_diff,
        removal_steps_a,
        removal_steps_b,
    }
}

fn numeric_fields(r: &StepRecord) -> Vec<(String, f64)> {
    let mut out = vec![("t".to_string(), r.t)];
    if let Some(b) = &r.ball {
        let vecs = [
            ("ball.position", b.position),
            ("ball.velocity", b.velocity),
            ("ball.angular_velocity", b.angular_velocity),
        ];
        for (name, v) in vecs {
            for (c, x) in ["x", "y", "z"].iter().zip(v.to_array()) {
                out.push((format!("{name}.{c}"), x));
            }
        }
        for (c, x) in ["w", "x", "y", "z"].iter().zip(b.orientation.to_array()) {
            out.push((format!("ball.orientation.{c}"), x));
        }
    }
    for cube in &r.cubes {
        for (c, x) in ["w", "x", "y", "z"].iter().zip(cube.q.to_array()) {
            out.push((format!("cube[{}].q.{c}", cube.id), x));
        }
    }
    out
}

fn structural_mismatch(a: &StepRecord, b: &StepRecord) -> Divergence {
    let pick = |field: &str, x: Value, y: Value| Divergence {
        step: a.step,
        field: field.into(),
        a_value: x,
        b_value: y,
        abs_diff: f64::INFINITY,
    };
    if a.active_cubes != b.active_cubes {
        pick("active_cubes", json!(a.active_cubes), json!(b.active_cubes))
    } else if a.events != b.events {
        pick("events", json!(a.events), json!(b.events))
    } else if a.won != b.won {
        pick("won", json!(a.won), json!(b.won))
    } else if a.ball.is_some() != b.ball.is_some() {
        pick("ball", json!(a.ball.is_some()), json!(b.ball.is_some()))
    } else {
        let ids = |r: &StepRecord| r.cubes.iter().map(|c| c.id).collect::<Vec<_>>();
        pick("cubes", json!(ids(a)), json!(ids(b)))
    }
}

/// Runs the scene in graph mode and in script mode, concurrently, and
/// compares the two trajectories (graph is `a`, script is `b`).
pub fn check_equivalence(
    file: &SceneFile,
    base_dir: &Path,
    trace: &InputTrace,
    opts: &RunOptions,
    tolerance: f64,
) -> Result<EquivalenceReport, RunError> {
    if !file.is_paired() {
        return Err(RunError::Validation(SceneFileError::BadActor {
            actor: "*".into(),
            message: "equivalence needs a paired scene (graph and behavior for every scripted actor)".into(),
        }));
    }
    let (a, b) = std::thread::scope(|s| {
        let ga = s.spawn(|| run(file, base_dir, ScriptMode::Graph, trace, opts));
        let gb = s.spawn(|| run(file, base_dir, ScriptMode::Script, trace, opts));
        (
            ga.join().expect("graph run panicked"),
            gb.join().expect("script run panicked"),
        )
    });
    Ok(compare(&a?, &b?, tolerance))
}
