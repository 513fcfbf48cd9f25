//! Native callback scripting: hooks invoked by the scene, and the three
//! compiled-in behaviors that scene files can name.

use std::fmt;
use std::sync::Arc;

use crate::math::{Rotator, Vec3};
use crate::scene::{ActorGone, ActorId, AxisSample, DriveMode, SceneConfig, World, PICK_UP_TAG};

/// Mutation surface handed to behavior hooks. Bound to the owning actor;
/// other actors are addressed by id.
pub struct ActorHandle<'w> {
    world: &'w mut dyn World,
    me: ActorId,
}

impl<'w> ActorHandle<'w> {
    pub fn new(world: &'w mut dyn World, me: ActorId) -> Self {
        Self { world, me }
    }

    pub fn me(&self) -> ActorId {
        self.me
    }

    pub fn rotate_world(&mut self, delta: Rotator) {
        // the owner is present for the whole dispatch
        let _ = self.world.rotate_world(self.me, delta);
    }

    pub fn add_force(&mut self, force: Vec3) {
        let _ = self.world.add_force(self.me, force);
    }

    pub fn add_torque(&mut self, torque: Vec3) {
        let _ = self.world.add_torque(self.me, torque);
    }

    pub fn set_active(&mut self, target: ActorId, active: bool) -> Result<(), ActorGone> {
        self.world.set_active(target, active)
    }

    pub fn destroy(&mut self, target: ActorId) -> Result<(), ActorGone> {
        self.world.destroy(target)
    }

    pub fn tag_of(&self, target: ActorId) -> Option<&str> {
        self.world.tag_of(target)
    }

    pub fn compare_tag(&self, target: ActorId, tag: &str) -> bool {
        self.world.compare_tag(target, tag)
    }
}

/// Callback hooks. Every hook defaults to doing nothing. Implementations must
/// be pure functions of their arguments and the handle state.
pub trait Behavior: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn on_start(&self, _handle: &mut ActorHandle<'_>) {}

    /// Once per rendered frame.
    fn on_update(&self, _handle: &mut ActorHandle<'_>, _dt: f64) {}

    /// Once per physics step, before integration. Physics belongs here.
    fn on_fixed_update(&self, _handle: &mut ActorHandle<'_>, _dt: f64, _axes: AxisSample) {}

    fn on_trigger_enter(&self, _handle: &mut ActorHandle<'_>, _other: ActorId) {}
}

/// Spins its actor at constant Euler rates (deg/s), scaled by frame time.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatorBehavior {
    pub euler_rates: Rotator,
}

impl Default for RotatorBehavior {
    fn default() -> Self {
        Self {
            euler_rates: Rotator::new(15.0, 30.0, 45.0),
        }
    }
}

impl Behavior for RotatorBehavior {
    fn name(&self) -> &'static str {
        "rotator"
    }

    fn on_update(&self, handle: &mut ActorHandle<'_>, dt: f64) {
        handle.rotate_world(self.euler_rates.scale(dt));
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlayerDrive {
    Force { speed: f64 },
    TorqueRolling { roll_torque: f64 },
}

/// Turns the input axes into a force or torque on its actor's body.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerControllerBehavior {
    pub drive: PlayerDrive,
}

impl PlayerControllerBehavior {
    /// Force mode: `(h, 0, v) * speed`.
    pub fn force(axes: AxisSample, speed: f64) -> Vec3 {
        Vec3::new(axes.h, 0.0, axes.v) * speed
    }

    /// Rolling mode. With floor normal +Y, rolling velocity is
    /// `r * (w x n) = r * (-w.z, 0, w.x)`, so forward (+Z) needs +X torque and
    /// right (+X) needs -Z torque.
    pub fn torque(axes: AxisSample, roll_torque: f64) -> Vec3 {
        Vec3::new(axes.v * roll_torque, 0.0, axes.h * -roll_torque)
    }
}

impl Behavior for PlayerControllerBehavior {
    fn name(&self) -> &'static str {
        "player_controller"
    }

    fn on_fixed_update(&self, handle: &mut ActorHandle<'_>, _dt: f64, axes: AxisSample) {
        match self.drive {
            PlayerDrive::Force { speed } => handle.add_force(Self::force(axes, speed)),
            PlayerDrive::TorqueRolling { roll_torque } => handle.add_torque(Self::torque(axes, roll_torque)),
        }
    }
}

/// Ball-side trigger handler: deactivates "Pick Up" actors it touches.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PickupOnBall;

impl Behavior for PickupOnBall {
    fn name(&self) -> &'static str {
        "pickup_on_ball"
    }

    fn on_trigger_enter(&self, handle: &mut ActorHandle<'_>, other: ActorId) {
        if handle.compare_tag(other, PICK_UP_TAG) {
            let _ = handle.set_active(other, false);
        }
    }
}

pub const BEHAVIOR_NAMES: [&str; 3] = ["rotator", "player_controller", "pickup_on_ball"];

/// Instantiates a named behavior with its tunables taken from `config`.
pub fn by_name(name: &str, config: &SceneConfig) -> Option<Arc<dyn Behavior>> {
    match name {
        "rotator" => Some(Arc::new(RotatorBehavior {
            euler_rates: config.rotator_rates,
        })),
        "player_controller" => Some(Arc::new(PlayerControllerBehavior {
            drive: match config.drive_mode {
                DriveMode::Force => PlayerDrive::Force { speed: config.speed },
                DriveMode::TorqueRolling => PlayerDrive::TorqueRolling {
                    roll_torque: config.roll_torque,
                },
            },
        })),
        "pickup_on_ball" => Some(Arc::new(PickupOnBall)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Orientation;
    use std::collections::HashMap;

    /// Records every handle call instead of touching a scene.
    #[derive(Default)]
    struct Recorder {
        calls: Vec<String>,
        tags: HashMap<ActorId, String>,
        inactive: Vec<ActorId>,
    }

    impl World for Recorder {
        fn rotate_world(&mut self, a: ActorId, d: Rotator) -> Result<(), ActorGone> {
            self.calls.push(format!("rotate {a} {d:?}"));
            Ok(())
        }
        fn add_force(&mut self, a: ActorId, f: Vec3) -> Result<(), ActorGone> {
            self.calls.push(format!("force {a} {f:?}"));
            Ok(())
        }
        fn add_torque(&mut self, a: ActorId, t: Vec3) -> Result<(), ActorGone> {
            self.calls.push(format!("torque {a} {t:?}"));
            Ok(())
        }
        fn set_active(&mut self, a: ActorId, on: bool) -> Result<(), ActorGone> {
            self.calls.push(format!("set_active {a} {on}"));
            if !on && !self.inactive.contains(&a) {
                self.inactive.push(a);
            }
            Ok(())
        }
        fn destroy(&mut self, a: ActorId) -> Result<(), ActorGone> {
            self.calls.push(format!("destroy {a}"));
            Ok(())
        }
        fn tag_of(&self, a: ActorId) -> Option<&str> {
            self.tags.get(&a).map(String::as_str)
        }
    }

    #[test]
    fn rotator_delta_is_rates_times_dt() {
        let mut w = Recorder::default();
        RotatorBehavior::default().on_update(&mut ActorHandle::new(&mut w, ActorId(1)), 0.02);
        let expected = Rotator::new(15.0 * 0.02, 30.0 * 0.02, 45.0 * 0.02);
        assert_eq!(w.calls, vec![format!("rotate #1 {expected:?}")]);
        assert!((expected.roll - 0.3).abs() < 1e-15);
        assert!((expected.pitch - 0.6).abs() < 1e-15);
        assert!((expected.yaw - 0.9).abs() < 1e-15);
    }

    #[test]
    fn rotator_with_zero_rates_leaves_orientation() {
        let z = RotatorBehavior { euler_rates: Rotator::ZERO };
        let mut w = Recorder::default();
        z.on_update(&mut ActorHandle::new(&mut w, ActorId(1)), 0.02);
        assert_eq!(Rotator::ZERO.scale(0.02).to_orientation(), Orientation::IDENTITY);
    }

    #[test]
    fn rotator_never_touches_physics() {
        let mut w = Recorder::default();
        let r = RotatorBehavior::default();
        let mut h = ActorHandle::new(&mut w, ActorId(1));
        r.on_update(&mut h, 0.02);
        r.on_fixed_update(&mut h, 0.02, AxisSample::new(1.0, 1.0));
        r.on_trigger_enter(&mut h, ActorId(2));
        assert!(w.calls.iter().all(|c| c.starts_with("rotate")));
    }

    #[test]
    fn player_force_mode() {
        let mut w = Recorder::default();
        let p = PlayerControllerBehavior {
            drive: PlayerDrive::Force { speed: 10.0 },
        };
        p.on_fixed_update(&mut ActorHandle::new(&mut w, ActorId(0)), 0.02, AxisSample::new(1.0, 0.0));
        assert_eq!(w.calls, vec![format!("force #0 {:?}", Vec3::new(10.0, 0.0, 0.0))]);
    }

    #[test]
    fn player_idle_input_is_zero() {
        assert_eq!(PlayerControllerBehavior::force(AxisSample::default(), 10.0), Vec3::ZERO);
        let t = PlayerControllerBehavior::torque(AxisSample::default(), 50.0);
        assert_eq!(t.length(), 0.0);
    }

    #[test]
    fn player_applies_physics_only_in_fixed_update() {
        for drive in [PlayerDrive::Force { speed: 10.0 }, PlayerDrive::TorqueRolling { roll_torque: 50.0 }] {
            let mut w = Recorder::default();
            let p = PlayerControllerBehavior { drive };
            let mut h = ActorHandle::new(&mut w, ActorId(0));
            p.on_start(&mut h);
            p.on_update(&mut h, 0.02);
            p.on_trigger_enter(&mut h, ActorId(3));
            assert!(w.calls.is_empty(), "{:?}", w.calls);
        }
    }

    #[test]
    fn pickup_filters_by_tag_and_is_idempotent() {
        let mut w = Recorder::default();
        w.tags.insert(ActorId(3), PICK_UP_TAG.into());
        let mut h = ActorHandle::new(&mut w, ActorId(0));
        PickupOnBall.on_trigger_enter(&mut h, ActorId(3));
        PickupOnBall.on_trigger_enter(&mut h, ActorId(3));
        // rail, untagged
        PickupOnBall.on_trigger_enter(&mut h, ActorId(14));
        assert_eq!(w.calls, vec!["set_active #3 false", "set_active #3 false"]);
        assert_eq!(w.inactive, vec![ActorId(3)]);
    }

    #[test]
    fn by_name_covers_registry() {
        let cfg = SceneConfig::default();
        for n in BEHAVIOR_NAMES {
            assert_eq!(by_name(n, &cfg).unwrap().name(), n);
        }
        assert!(by_name("jump", &cfg).is_none());
    }
}
