//! Actors, lifecycle, and deterministic event dispatch.
//!
//! Actors are iterated in spawn order everywhere. Deactivation and destruction
//! requested from scripts are queued and applied by [`Scene::flush_removals`]
//! at the end of a step.

mod file;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use file::{
    build_standard_scene, load_graph, ActorEntry, ActorKind, PairedScript, SceneConfig, SceneFile, SceneFileError,
    ScriptEntry, ScriptMode, StringOrList, SCENE_FORMAT,
};

use crate::behaviors::{ActorHandle, Behavior};
use crate::graph::{CompiledGraph, EffectLog, EffectRecord, RuntimeFault, Trigger};
use crate::math::{compose, Orientation, Rotator, Vec3};

pub const PICK_UP_TAG: &str = "Pick Up";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActorId(pub u32);

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Per-frame input axes, each in [-1, 1]. `h` is Left/Right, `v` is Down/Up.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisSample {
    pub h: f64,
    pub v: f64,
}

impl AxisSample {
    pub fn new(h: f64, v: f64) -> Self {
        Self {
            h: clamp_axis(h),
            v: clamp_axis(v),
        }
    }
}

fn clamp_axis(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(-1.0, 1.0)
    }
}

pub const AXIS_MOVE_RIGHT: &str = "MoveRight";
pub const AXIS_MOVE_FORWARD: &str = "MoveForward";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveMode {
    /// Input becomes a force on the body.
    Force,
    /// Input becomes a torque; linear velocity follows from rolling without slipping.
    TorqueRolling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidBody {
    pub mass: f64,
    pub velocity: Vec3,
    pub angular_velocity: Vec3,
    pub accumulated_force: Vec3,
    pub accumulated_torque: Vec3,
    pub drive_mode: DriveMode,
}

impl RigidBody {
    pub fn new(mass: f64, drive_mode: DriveMode) -> Self {
        Self {
            mass,
            velocity: Vec3::ZERO,
            angular_velocity: Vec3::ZERO,
            accumulated_force: Vec3::ZERO,
            accumulated_torque: Vec3::ZERO,
            drive_mode,
        }
    }

    pub fn add_force(&mut self, f: Vec3) {
        self.accumulated_force += f;
    }

    pub fn add_torque(&mut self, t: Vec3) {
        self.accumulated_torque += t;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggerVolume {
    pub half_extents: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidVolume {
    pub half_extents: Vec3,
    pub restitution: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Transform {
    pub position: Vec3,
    pub orientation: Orientation,
}

/// The scripting path attached to an actor. The two paths are exclusive.
#[derive(Debug, Clone)]
pub enum Scripting {
    Behaviors(Vec<Arc<dyn Behavior>>),
    Graphs(Vec<Arc<CompiledGraph>>),
}

#[derive(Debug, Clone)]
pub struct Actor {
    pub id: ActorId,
    pub name: String,
    pub kind: ActorKind,
    pub tag: Option<String>,
    pub active: bool,
    pub transform: Transform,
    pub body: Option<RigidBody>,
    pub trigger: Option<TriggerVolume>,
    pub solid: Option<SolidVolume>,
    pub scripting: Option<Scripting>,
}

impl Actor {
    pub fn new(name: impl Into<String>, kind: ActorKind, position: Vec3) -> Self {
        Self {
            id: ActorId(u32::MAX),
            name: name.into(),
            kind,
            tag: None,
            active: true,
            transform: Transform {
                position,
                orientation: Orientation::IDENTITY,
            },
            body: None,
            trigger: None,
            solid: None,
            scripting: None,
        }
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tag.as_deref() == Some(tag)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SceneError {
    #[error("unknown actor {0}")]
    UnknownActor(ActorId),
    #[error("invalid scene config: {0}")]
    InvalidConfig(String),
}

/// The target of a handle call has left the scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActorGone;

/// The narrow mutation surface shared by graphs and native behaviors.
pub trait World {
    fn rotate_world(&mut self, actor: ActorId, delta: Rotator) -> Result<(), ActorGone>;
    fn add_force(&mut self, actor: ActorId, force: Vec3) -> Result<(), ActorGone>;
    fn add_torque(&mut self, actor: ActorId, torque: Vec3) -> Result<(), ActorGone>;
    /// Queued; takes effect at step end.
    fn set_active(&mut self, actor: ActorId, active: bool) -> Result<(), ActorGone>;
    /// Queued; takes effect at step end.
    fn destroy(&mut self, actor: ActorId) -> Result<(), ActorGone>;
    fn tag_of(&self, actor: ActorId) -> Option<&str>;
    fn compare_tag(&self, actor: ActorId, tag: &str) -> bool {
        self.tag_of(actor) == Some(tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    InputAxisMoveRight,
    InputAxisMoveForward,
    Tick,
    FixedTick,
    BeginOverlap,
    Start,
}

/// One entry in the scene's journal of what happened, in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
pub enum JournalEntry {
    Dispatch { actor: ActorId, event: EventKind },
    Effect { actor: ActorId, record: EffectRecord },
    Fault { actor: ActorId, fault: RuntimeFault },
    Overlap { owner: ActorId, other: ActorId },
    Contact { body: ActorId, solid: ActorId },
    Removed { actor: ActorId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pending {
    SetActive(ActorId, bool),
    Destroy(ActorId),
}

#[derive(Debug, Clone)]
pub struct Scene {
    actors: Vec<Actor>,
    next_id: u32,
    pub fixed_dt: f64,
    pub elapsed: f64,
    pub step_index: u64,
    axes: AxisSample,
    pending: Vec<Pending>,
    pub(crate) prev_overlaps: BTreeSet<(ActorId, ActorId)>,
    journal: Vec<JournalEntry>,
}

impl Scene {
    pub fn new(fixed_dt: f64) -> Self {
        Self {
            actors: Vec::new(),
            next_id: 0,
            fixed_dt,
            elapsed: 0.0,
            step_index: 0,
            axes: AxisSample::default(),
            pending: Vec::new(),
            prev_overlaps: BTreeSet::new(),
            journal: Vec::new(),
        }
    }

    /// Adds an actor at the end of spawn order and assigns it a fresh id.
    pub fn spawn(&mut self, mut actor: Actor) -> ActorId {
        let id = ActorId(self.next_id);
        self.next_id += 1;
        actor.id = id;
        self.actors.push(actor);
        id
    }

    pub fn actors(&self) -> &[Actor] {
        &self.actors
    }

    pub fn actors_mut(&mut self) -> &mut [Actor] {
        &mut self.actors
    }

    pub fn get(&self, id: ActorId) -> Option<&Actor> {
        self.position_of(id).map(|i| &self.actors[i])
    }

    pub fn get_mut(&mut self, id: ActorId) -> Option<&mut Actor> {
        self.position_of(id).map(|i| &mut self.actors[i])
    }

    fn position_of(&self, id: ActorId) -> Option<usize> {
        // ids are assigned increasing in spawn order and removal keeps order
        self.actors.binary_search_by_key(&id, |a| a.id).ok()
    }

    pub fn find_by_name(&self, name: &str) -> Option<&Actor> {
        self.actors.iter().find(|a| a.name == name)
    }

    pub fn axes(&self) -> AxisSample {
        self.axes
    }

    pub fn set_axes(&mut self, axes: AxisSample) {
        self.axes = axes;
    }

    pub fn active_with_tag(&self, tag: &str) -> impl Iterator<Item = &Actor> + '_ {
        let tag = tag.to_string();
        self.actors.iter().filter(move |a| a.active && a.has_tag(&tag))
    }

    /// Active "Pick Up" actors remaining.
    pub fn remaining_pickups(&self) -> usize {
        self.active_with_tag(PICK_UP_TAG).count()
    }

    /// Immediately deactivates an actor. Idempotent.
    pub fn deactivate(&mut self, id: ActorId) -> Result<(), SceneError> {
        let actor = self.get_mut(id).ok_or(SceneError::UnknownActor(id))?;
        if actor.active {
            actor.active = false;
            self.journal.push(JournalEntry::Removed { actor: id });
        }
        Ok(())
    }

    /// Schedules removal at the end of the current step.
    pub fn destroy(&mut self, id: ActorId) -> Result<(), SceneError> {
        if self.get(id).is_none() {
            return Err(SceneError::UnknownActor(id));
        }
        self.pending.push(Pending::Destroy(id));
        Ok(())
    }

    /// Applies queued deactivations and destructions in request order.
    pub fn flush_removals(&mut self) {
        for p in std::mem::take(&mut self.pending) {
            match p {
                Pending::SetActive(id, active) => {
                    if let Some(a) = self.get_mut(id) {
                        let was = a.active;
                        a.active = active;
                        if was && !active {
                            self.journal.push(JournalEntry::Removed { actor: id });
                        }
                    }
                }
                Pending::Destroy(id) => {
                    if let Some(i) = self.position_of(id) {
                        let a = self.actors.remove(i);
                        if a.active {
                            self.journal.push(JournalEntry::Removed { actor: id });
                        }
                        self.prev_overlaps.retain(|&(x, y)| x != id && y != id);
                    }
                }
            }
        }
    }

    pub fn has_pending_removals(&self) -> bool {
        !self.pending.is_empty()
    }

    pub fn journal(&self) -> &[JournalEntry] {
        &self.journal
    }

    pub fn take_journal(&mut self) -> Vec<JournalEntry> {
        std::mem::take(&mut self.journal)
    }

    pub(crate) fn record(&mut self, entry: JournalEntry) {
        self.journal.push(entry);
    }

    /// Calls `on_start` on every active behavior, in spawn order.
    pub fn dispatch_start(&mut self) {
        for i in 0..self.actors.len() {
            let Some((id, Scripting::Behaviors(list))) = self.scripting_of(i) else {
                continue;
            };
            self.journal.push(JournalEntry::Dispatch {
                actor: id,
                event: EventKind::Start,
            });
            for b in list {
                b.on_start(&mut ActorHandle::new(self, id));
            }
        }
    }

    /// Per-frame events: for each active actor in spawn order, MoveRight then
    /// MoveForward input axes, then Tick.
    pub fn dispatch_frame_events(&mut self, frame_dt: f64, axes: AxisSample) {
        debug_assert!(frame_dt > 0.0);
        self.axes = axes;
        for i in 0..self.actors.len() {
            let Some((id, scripting)) = self.scripting_of(i) else {
                continue;
            };
            match scripting {
                Scripting::Graphs(graphs) => {
                    let axis_events = [
                        (AXIS_MOVE_RIGHT, axes.h, EventKind::InputAxisMoveRight),
                        (AXIS_MOVE_FORWARD, axes.v, EventKind::InputAxisMoveForward),
                    ];
                    for (axis, value, kind) in axis_events {
                        self.fire_graphs(id, &graphs, &Trigger::InputAxis { axis, value }, kind);
                    }
                    self.fire_graphs(id, &graphs, &Trigger::Tick { delta_seconds: frame_dt }, EventKind::Tick);
                }
                Scripting::Behaviors(list) => {
                    self.journal.push(JournalEntry::Dispatch {
                        actor: id,
                        event: EventKind::Tick,
                    });
                    for b in list {
                        b.on_update(&mut ActorHandle::new(self, id), frame_dt);
                    }
                }
            }
        }
    }

    /// Per-physics-step events, before integration.
    pub fn dispatch_fixed_tick(&mut self, dt: f64) {
        let axes = self.axes;
        for i in 0..self.actors.len() {
            let Some((id, scripting)) = self.scripting_of(i) else {
                continue;
            };
            match scripting {
                Scripting::Graphs(graphs) => {
                    self.fire_graphs(id, &graphs, &Trigger::FixedTick { delta_seconds: dt }, EventKind::FixedTick);
                }
                Scripting::Behaviors(list) => {
                    self.journal.push(JournalEntry::Dispatch {
                        actor: id,
                        event: EventKind::FixedTick,
                    });
                    for b in list {
                        b.on_fixed_update(&mut ActorHandle::new(self, id), dt, axes);
                    }
                }
            }
        }
    }

    /// Delivers begin-overlap to both participants: the trigger owner first,
    /// then the other actor. Inactive actors are skipped.
    pub fn dispatch_overlaps(&mut self, events: &[crate::physics::OverlapEvent]) {
        for ev in events {
            for (me, other) in [(ev.trigger_owner, ev.other), (ev.other, ev.trigger_owner)] {
                let Some(i) = self.position_of(me) else { continue };
                let Some((id, scripting)) = self.scripting_of(i) else {
                    continue;
                };
                match scripting {
                    Scripting::Graphs(graphs) => {
                        self.fire_graphs(id, &graphs, &Trigger::BeginOverlap { other }, EventKind::BeginOverlap);
                    }
                    Scripting::Behaviors(list) => {
                        self.journal.push(JournalEntry::Dispatch {
                            actor: id,
                            event: EventKind::BeginOverlap,
                        });
                        for b in list {
                            b.on_trigger_enter(&mut ActorHandle::new(self, id), other);
                        }
                    }
                }
            }
        }
    }

    /// Scripting of the actor at position `i`, if it is active and scripted.
    fn scripting_of(&self, i: usize) -> Option<(ActorId, Scripting)> {
        let a = &self.actors[i];
        if !a.active {
            return None;
        }
        a.scripting.clone().map(|s| (a.id, s))
    }

    fn fire_graphs(&mut self, id: ActorId, graphs: &[Arc<CompiledGraph>], trigger: &Trigger<'_>, kind: EventKind) {
        if !graphs.iter().any(|g| g.handles(trigger)) {
            return;
        }
        self.journal.push(JournalEntry::Dispatch { actor: id, event: kind });
        for g in graphs {
            let logs = g.fire(
                trigger,
                &mut crate::graph::FiringContext {
                    owner: id,
                    world: self,
                },
            );
            for log in logs {
                self.absorb(id, log);
            }
        }
    }

    fn absorb(&mut self, actor: ActorId, log: EffectLog) {
        for record in log.records {
            self.journal.push(JournalEntry::Effect { actor, record });
        }
        if let Some(fault) = log.fault {
            self.journal.push(JournalEntry::Fault { actor, fault });
        }
    }

    /// Faults recorded in the journal since it was last taken.
    pub fn faults(&self) -> impl Iterator<Item = (&ActorId, &RuntimeFault)> {
        self.journal.iter().filter_map(|e| match e {
            JournalEntry::Fault { actor, fault } => Some((actor, fault)),
            _ => None,
        })
    }
}

impl World for Scene {
    fn rotate_world(&mut self, actor: ActorId, delta: Rotator) -> Result<(), ActorGone> {
        let a = self.get_mut(actor).ok_or(ActorGone)?;
        a.transform.orientation = compose(delta.to_orientation(), a.transform.orientation);
        Ok(())
    }

    fn add_force(&mut self, actor: ActorId, force: Vec3) -> Result<(), ActorGone> {
        let a = self.get_mut(actor).ok_or(ActorGone)?;
        if let Some(body) = &mut a.body {
            body.add_force(force);
        }
        Ok(())
    }

    fn add_torque(&mut self, actor: ActorId, torque: Vec3) -> Result<(), ActorGone> {
        let a = self.get_mut(actor).ok_or(ActorGone)?;
        if let Some(body) = &mut a.body {
            body.add_torque(torque);
        }
        Ok(())
    }

    fn set_active(&mut self, actor: ActorId, active: bool) -> Result<(), ActorGone> {
        self.get(actor).ok_or(ActorGone)?;
        self.pending.push(Pending::SetActive(actor, active));
        Ok(())
    }

    fn destroy(&mut self, actor: ActorId) -> Result<(), ActorGone> {
        self.get(actor).ok_or(ActorGone)?;
        self.pending.push(Pending::Destroy(actor));
        Ok(())
    }

    fn tag_of(&self, actor: ActorId) -> Option<&str> {
        self.get(actor).and_then(|a| a.tag.as_deref())
    }
}

#[cfg(test)]
mod tests;
