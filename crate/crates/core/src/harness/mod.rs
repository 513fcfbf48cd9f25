//! Deterministic replay, trajectory capture and the equivalence check
//! between the graph and native scripting paths.

mod compare;
mod framerate;
mod pilot;
mod trace;
mod trajectory;

use std::path::Path;

use thiserror::Error;

pub use compare::{check_equivalence, compare, Divergence, EquivalenceReport, DEFAULT_TOLERANCE};
pub use framerate::{framerate_experiment, FramerateReport, FramerateRow, PairDiff};
pub use pilot::autopilot_trace;
pub use trace::{InputTrace, TraceError, TraceRecord};
pub use trajectory::{BallState, CubeState, StepRecord, TrajEvent, Trajectory, TrajectoryHeader, TRAJECTORY_FORMAT};

use crate::graph::RuntimeFault;
use crate::physics::{self, PhysicsConfig, PhysicsError};
use crate::scene::{ActorId, ActorKind, AxisSample, JournalEntry, Scene, SceneFile, SceneFileError, ScriptMode, PICK_UP_TAG};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Validation(#[from] SceneFileError),
    #[error("step {step}: actor {actor}: {fault}")]
    Fault { step: u64, actor: ActorId, fault: RuntimeFault },
    #[error("step {step}: {source}")]
    Physics {
        step: u64,
        #[source]
        source: PhysicsError,
    },
    #[error("invalid run options: {0}")]
    Options(String),
}

impl RunError {
    /// True for errors detected before the first step.
    pub fn is_validation(&self) -> bool {
        matches!(self, RunError::Validation(_) | RunError::Options(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub steps: u64,
    /// Overrides the scene's `fixed_dt`.
    pub fixed_dt: Option<f64>,
    /// Stop after the step on which the last pickup goes away.
    pub stop_on_win: bool,
}

impl RunOptions {
    pub fn steps(steps: u64) -> Self {
        Self {
            steps,
            fixed_dt: None,
            stop_on_win: true,
        }
    }
}

/// A scene plus the per-step loop: sample input, frame events, physics step,
/// overlap dispatch, deferred removals, record.
#[derive(Debug, Clone)]
pub struct Simulation {
    scene: Scene,
    physics: PhysicsConfig,
    had_pickups: bool,
    won: bool,
}

impl Simulation {
    pub fn new(file: &SceneFile, base_dir: &Path, mode: ScriptMode) -> Result<Self, RunError> {
        let scene = file.instantiate(base_dir, mode)?;
        Ok(Self::from_scene(scene, file.config.physics()))
    }

    /// Wraps an already built scene and runs start hooks.
    pub fn from_scene(mut scene: Scene, physics: PhysicsConfig) -> Self {
        scene.fixed_dt = physics.fixed_dt;
        scene.dispatch_start();
        scene.take_journal();
        let had_pickups = scene.remaining_pickups() > 0;
        Self {
            scene,
            physics,
            had_pickups,
            won: false,
        }
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn step_index(&self) -> u64 {
        self.scene.step_index
    }

    pub fn fixed_dt(&self) -> f64 {
        self.physics.fixed_dt
    }

    pub fn won(&self) -> bool {
        self.won
    }

    /// Advances one frame, locked to one physics step.
    pub fn tick(&mut self, axes: AxisSample) -> Result<StepRecord, RunError> {
        let dt = self.physics.fixed_dt;
        let step = self.scene.step_index;
        self.scene.dispatch_frame_events(dt, axes);
        let overlaps = physics::step(&mut self.scene, &self.physics).map_err(|source| RunError::Physics { step, source })?;
        self.scene.dispatch_overlaps(&overlaps);
        self.scene.flush_removals();
        let journal = self.scene.take_journal();
        let mut events = Vec::new();
        for entry in journal {
            match entry {
                JournalEntry::Fault { actor, fault } => return Err(RunError::Fault { step, actor, fault }),
                JournalEntry::Overlap { owner, other } => events.push(TrajEvent::Overlap {
                    actor: owner.0,
                    other: other.0,
                }),
                JournalEntry::Removed { actor } => events.push(TrajEvent::Removed { actor: actor.0 }),
                _ => {}
            }
        }
        self.won = self.had_pickups && self.scene.remaining_pickups() == 0;
        Ok(self.record(events))
    }

    fn record(&self, events: Vec<TrajEvent>) -> StepRecord {
        let s = &self.scene;
        let ball = s
            .actors()
            .iter()
            .find(|a| a.kind == ActorKind::Ball)
            .and_then(|a| {
                a.body.as_ref().map(|b| BallState {
                    position: a.transform.position,
                    orientation: a.transform.orientation,
                    velocity: b.velocity,
                    angular_velocity: b.angular_velocity,
                })
            });
        let cubes = s
            .actors()
            .iter()
            .filter(|a| a.active && a.kind == ActorKind::Cube)
            .map(|a| CubeState {
                id: a.id.0,
                q: a.transform.orientation,
            })
            .collect();
        let active_cubes = s.active_with_tag(PICK_UP_TAG).map(|a| a.id.0).collect();
        StepRecord {
            step: s.step_index,
            t: s.step_index as f64 * self.physics.fixed_dt,
            ball,
            cubes,
            active_cubes,
            events,
            won: self.won,
        }
    }
}

/// Replays `trace` through `file` in one scripting mode.
pub fn run(
    file: &SceneFile,
    base_dir: &Path,
    mode: ScriptMode,
    trace: &InputTrace,
    opts: &RunOptions,
) -> Result<Trajectory, RunError> {
    if opts.steps == 0 {
        return Err(RunError::Options("steps must be positive".into()));
    }
    let mut file = file.clone();
    if let Some(dt) = opts.fixed_dt {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(RunError::Options(format!("fixed dt must be positive, got {dt}")));
        }
        file.config.fixed_dt = dt;
    }
    let scene_hash = file.content_hash(base_dir)?;
    let mut sim = Simulation::new(&file, base_dir, mode)?;
    let header = TrajectoryHeader {
        format: TRAJECTORY_FORMAT.into(),
        fixed_dt: file.config.fixed_dt,
        scene_hash,
        mode,
    };
    let mut records = Vec::with_capacity(opts.steps as usize);
    for k in 0..opts.steps {
        let r = sim.tick(trace.at(k))?;
        let won = r.won;
        records.push(r);
        if won && opts.stop_on_win {
            break;
        }
    }
    Ok(Trajectory { header, records })
}
