//! Fixed-timestep integration, rail contacts, and trigger overlap edges.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::math::{closest_point_on_aabb, compose, sphere_aabb_overlap, Orientation, Vec3};
use crate::scene::{ActorId, DriveMode, JournalEntry, Scene};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsConfig {
    pub fixed_dt: f64,
    pub ball_radius: f64,
    /// `I = factor * m * r^2`; 2/5 for a solid sphere.
    pub rolling_inertia_factor: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            fixed_dt: 0.02,
            ball_radius: 0.5,
            rolling_inertia_factor: 0.4,
        }
    }
}

/// A trigger volume started overlapping a body this step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OverlapEvent {
    pub trigger_owner: ActorId,
    pub other: ActorId,
    pub step_index: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("numerical divergence: actor {actor} has a non-finite {field} at step {step}")]
    NumericalDivergence { actor: ActorId, field: &'static str, step: u64 },
}

const FLOOR_NORMAL: Vec3 = Vec3::UP;

/// Rolling-without-slipping velocity for spin `w`.
pub fn rolling_velocity(w: Vec3, radius: f64) -> Vec3 {
    w.cross(FLOOR_NORMAL) * radius
}

/// Inverse of [`rolling_velocity`]; keeps the spin component about the normal.
fn spin_for_velocity(v: Vec3, radius: f64, spin_y: f64) -> Vec3 {
    Vec3::new(v.z / radius, spin_y, -v.x / radius)
}

/// Advances the scene by one fixed step and returns begin-overlap events,
/// sorted by `(trigger_owner, other)`.
///
/// Fixed-tick handlers run first. Queued removals are NOT applied here: the
/// caller dispatches the returned events and then calls
/// [`Scene::flush_removals`].
pub fn step(scene: &mut Scene, cfg: &PhysicsConfig) -> Result<Vec<OverlapEvent>, PhysicsError> {
    let dt = cfg.fixed_dt;
    scene.dispatch_fixed_tick(dt);
    let step = scene.step_index;

    let r = cfg.ball_radius;
    let before: Vec<(ActorId, Vec3)> = scene
        .actors()
        .iter()
        .filter(|a| a.active && a.body.is_some())
        .map(|a| (a.id, a.transform.position))
        .collect();
    for a in scene.actors_mut().iter_mut().filter(|a| a.active) {
        let Some(body) = a.body.as_mut() else { continue };
        let inertia = cfg.rolling_inertia_factor * body.mass * r * r;
        body.velocity += (body.accumulated_force / body.mass) * dt;
        body.angular_velocity += (body.accumulated_torque / inertia) * dt;
        if body.drive_mode == DriveMode::TorqueRolling {
            body.velocity = rolling_velocity(body.angular_velocity, r);
        }
        body.velocity.y = 0.0;
        let t = &mut a.transform;
        t.position += body.velocity * dt;
        t.position.y = r;
        t.orientation = compose(
            Orientation::from_rotation_vector(body.angular_velocity * dt),
            t.orientation,
        );
        let checks = [
            ("position", t.position.is_finite()),
            ("velocity", body.velocity.is_finite()),
            ("angular_velocity", body.angular_velocity.is_finite()),
            ("orientation", t.orientation.is_finite()),
        ];
        if let Some((field, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(PhysicsError::NumericalDivergence { actor: a.id, field, step });
        }
    }

    resolve_contacts(scene, r, &before);

    let current: BTreeSet<(ActorId, ActorId)> = detect_overlaps(scene, cfg).into_iter().collect();
    let events: Vec<OverlapEvent> = current
        .difference(&scene.prev_overlaps)
        .map(|&(trigger_owner, other)| OverlapEvent {
            trigger_owner,
            other,
            step_index: step,
        })
        .collect();
    for ev in &events {
        scene.record(JournalEntry::Overlap {
            owner: ev.trigger_owner,
            other: ev.other,
        });
    }
    scene.prev_overlaps = current;

    for a in scene.actors_mut() {
        if let Some(body) = a.body.as_mut() {
            body.accumulated_force = Vec3::ZERO;
            body.accumulated_torque = Vec3::ZERO;
        }
    }
    scene.step_index += 1;
    scene.elapsed = scene.step_index as f64 * dt;
    Ok(events)
}

/// Pushes bodies out of solid volumes and reflects the approaching normal
/// velocity component with the solid's restitution. A body whose center
/// ended up inside a solid, or on the far side of its mid-plane, is pushed
/// back out through the face it came from.
fn resolve_contacts(scene: &mut Scene, r: f64, before: &[(ActorId, Vec3)]) {
    let solids: Vec<_> = scene
        .actors()
        .iter()
        .filter(|a| a.active)
        .filter_map(|a| a.solid.map(|s| (a.id, a.transform.position, s)))
        .collect();
    if solids.is_empty() {
        return;
    }
    let mut contacts = Vec::new();
    for a in scene.actors_mut().iter_mut().filter(|a| a.active) {
        let Some(body) = a.body.as_mut() else { continue };
        let prev = before
            .iter()
            .find(|(id, _)| *id == a.id)
            .map_or(a.transform.position, |&(_, p)| p);
        for &(solid_id, bc, solid) in &solids {
            let c = a.transform.position;
            let he = solid.half_extents;
            let p = closest_point_on_aabb(c, bc, he);
            let d = c - p;
            let dist = d.length();
            if dist >= r {
                continue;
            }
            let (cv, pv, prv, bcv, hev) = (c.to_array(), p.to_array(), prev.to_array(), bc.to_array(), he.to_array());
            let clamped: Vec<usize> = (0..3).filter(|&i| cv[i] != pv[i]).collect();
            let same_side = clamped
                .iter()
                .all(|&i| (cv[i] - bcv[i]).signum() == (prv[i] - bcv[i]).signum());
            let (normal, new_pos) = if dist > 0.0 && same_side {
                if let [i] = clamped[..] {
                    // face contact: sit exactly on the face offset
                    let mut q = cv;
                    let mut n = [0.0; 3];
                    n[i] = d.to_array()[i].signum();
                    q[i] = pv[i] + r * n[i];
                    (Vec3::new(n[0], n[1], n[2]), Vec3::new(q[0], q[1], q[2]))
                } else {
                    let n = d * (1.0 / dist);
                    (n, p + n * r)
                }
            } else {
                // leave through the face the body was outside of last step
                let outside = |i: usize| (prv[i] - bcv[i]).abs() - hev[i];
                let i = (0..3).max_by(|&x, &y| outside(x).total_cmp(&outside(y))).unwrap_or(0);
                let sign = if prv[i] >= bcv[i] { 1.0 } else { -1.0 };
                let mut q = cv;
                let mut n = [0.0; 3];
                n[i] = sign;
                q[i] = bcv[i] + sign * (hev[i] + r);
                (Vec3::new(n[0], n[1], n[2]), Vec3::new(q[0], q[1], q[2]))
            };
            a.transform.position = new_pos;
            a.transform.position.y = r;
            let vn = body.velocity.dot(normal);
            if vn < 0.0 {
                if normal.x != 0.0 && normal.y == 0.0 && normal.z == 0.0 {
                    // exact reflection on axis normals keeps |v| bit-stable
                    body.velocity.x = -solid.restitution * body.velocity.x;
                } else if normal.z != 0.0 && normal.x == 0.0 && normal.y == 0.0 {
                    body.velocity.z = -solid.restitution * body.velocity.z;
                } else {
                    body.velocity = body.velocity - normal * ((1.0 + solid.restitution) * vn);
                }
                body.velocity.y = 0.0;
                if body.drive_mode == DriveMode::TorqueRolling {
                    body.angular_velocity = spin_for_velocity(body.velocity, r, body.angular_velocity.y);
                }
                contacts.push((a.id, solid_id));
            }
        }
    }
    for (body, solid) in contacts {
        scene.record(JournalEntry::Contact { body, solid });
    }
}

/// All `(trigger owner, body)` pairs currently overlapping, active actors
/// only, sorted. Pure.
pub fn detect_overlaps(scene: &Scene, cfg: &PhysicsConfig) -> Vec<(ActorId, ActorId)> {
    let bodies: Vec<_> = scene
        .actors()
        .iter()
        .filter(|a| a.active && a.body.is_some())
        .map(|a| (a.id, a.transform.position))
        .collect();
    let mut out = Vec::new();
    for t in scene.actors().iter().filter(|a| a.active) {
        let Some(trigger) = t.trigger else { continue };
        for &(bid, c) in &bodies {
            if bid != t.id && sphere_aabb_overlap(c, cfg.ball_radius, t.transform.position, trigger.half_extents) {
                out.push((t.id, bid));
            }
        }
    }
    out.sort();
    out
}
