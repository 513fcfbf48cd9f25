//! Vectors, Euler rotators and unit-quaternion orientations.
//!
//! Convention: right-handed, y-up world. A [`Rotator`] is applied as an
//! intrinsic sequence roll about X, then pitch about Z, then yaw about Y.
//! Angles are degrees at every public boundary and radians internally.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const UP: Vec3 = Vec3::new(0.0, 1.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn length(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Componentwise clamp into `[lo, hi]`.
    pub fn clamp(self, lo: Vec3, hi: Vec3) -> Vec3 {
        Vec3::new(
            self.x.clamp(lo.x, hi.x),
            self.y.clamp(lo.y, hi.y),
            self.z.clamp(lo.z, hi.z),
        )
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        self.scale(s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Euler triple in degrees. Never normalized: a per-frame delta may exceed a turn.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rotator {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl Rotator {
    pub const ZERO: Rotator = Rotator::new(0.0, 0.0, 0.0);

    pub const fn new(roll: f64, pitch: f64, yaw: f64) -> Self {
        Self { roll, pitch, yaw }
    }

    pub fn scale(self, s: f64) -> Rotator {
        Rotator::new(self.roll * s, self.pitch * s, self.yaw * s)
    }

    pub fn is_finite(self) -> bool {
        self.roll.is_finite() && self.pitch.is_finite() && self.yaw.is_finite()
    }

    pub fn to_orientation(self) -> Orientation {
        rotator_to_orientation(self)
    }
}

/// Unit quaternion `(w, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orientation {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for Orientation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Rotation by `degrees` about the unit `axis`.
    pub fn from_axis_angle_deg(axis: Vec3, degrees: f64) -> Orientation {
        let half = degrees.to_radians() * 0.5;
        let (s, c) = half.sin_cos();
        Orientation {
            w: c,
            x: axis.x * s,
            y: axis.y * s,
            z: axis.z * s,
        }
    }

    /// Rotation whose axis is `rv / |rv|` and whose angle is `|rv|` radians.
    /// A zero vector gives the identity.
    pub fn from_rotation_vector(rv: Vec3) -> Orientation {
        let angle = rv.length();
        if angle == 0.0 {
            return Orientation::IDENTITY;
        }
        let half = angle * 0.5;
        let (s, c) = half.sin_cos();
        let k = s / angle;
        Orientation {
            w: c,
            x: rv.x * k,
            y: rv.y * k,
            z: rv.z * k,
        }
        .normalized()
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Orientation {
        let n = self.norm();
        Orientation {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    /// Raw Hamilton product, no renormalization.
    fn product(a: Orientation, b: Orientation) -> Orientation {
        Orientation {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
    }

    pub fn conjugate(self) -> Orientation {
        Orientation {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Rotates a vector by this orientation.
    pub fn rotate(self, v: Vec3) -> Vec3 {
        let p = Orientation {
            w: 0.0,
            x: v.x,
            y: v.y,
            z: v.z,
        };
        let r = Self::product(Self::product(self, p), self.conjugate());
        Vec3::new(r.x, r.y, r.z)
    }

    /// Shortest angle in degrees between two orientations (sign of `q` ignored).
    pub fn angle_to_deg(self, other: Orientation) -> f64 {
        if self == other {
            return 0.0;
        }
        let d = (self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z).abs();
        // acos loses precision near 1; use the atan2 form on the relative rotation.
        let rel = Self::product(self.conjugate(), other);
        let v = (rel.x * rel.x + rel.y * rel.y + rel.z * rel.z).sqrt();
        2.0 * v.atan2(d).to_degrees()
    }

    /// Heading about the world up axis, degrees in (-360, 360].
    ///
    /// Exact for yaw-only orientations; for general orientations this is the
    /// swing-twist twist angle about +Y.
    pub fn yaw_deg(self) -> f64 {
        2.0 * self.y.atan2(self.w).to_degrees()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Orientation of the intrinsic rotation roll(X) → pitch(Z) → yaw(Y).
pub fn rotator_to_orientation(r: Rotator) -> Orientation {
    let qx = Orientation::from_axis_angle_deg(Vec3::new(1.0, 0.0, 0.0), r.roll);
    let qz = Orientation::from_axis_angle_deg(Vec3::new(0.0, 0.0, 1.0), r.pitch);
    let qy = Orientation::from_axis_angle_deg(Vec3::new(0.0, 1.0, 0.0), r.yaw);
    // Intrinsic sequences compose on the right.
    Orientation::product(Orientation::product(qx, qz), qy).normalized()
}

/// `a ∘ b`: apply `b` first, then `a`, both in the world frame. Applying a
/// world delta to the current orientation is `compose(delta, current)`.
pub fn compose(a: Orientation, b: Orientation) -> Orientation {
    Orientation::product(a, b).normalized()
}

/// True iff the sphere touches or intersects the axis-aligned box.
pub fn sphere_aabb_overlap(center: Vec3, radius: f64, box_center: Vec3, half_extents: Vec3) -> bool {
    let closest = closest_point_on_aabb(center, box_center, half_extents);
    let d = center - closest;
    d.dot(d) <= radius * radius
}

pub fn closest_point_on_aabb(p: Vec3, box_center: Vec3, half_extents: Vec3) -> Vec3 {
    p.clamp(box_center - half_extents, box_center + half_extents)
}
