//! Planar vectors and angles.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A point or direction in the plane, meters in world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Real> Vec2<S> {
    #[inline]
    pub const fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    /// Unit vector at `angle` radians from +x.
    #[inline]
    pub fn from_angle(angle: S) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    #[inline]
    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y
    }

    /// z component of the 3D cross product; positive when `o` is counter-clockwise of `self`.
    #[inline]
    pub fn cross(self, o: Self) -> S {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> S {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    #[inline]
    pub fn distance(self, o: Self) -> S {
        (self - o).norm()
    }

    /// Unit vector in the same direction, `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > S::zero() && n.is_finite() {
            Some(Self::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    /// Rotates counter-clockwise by `angle`.
    pub fn rotated(self, angle: S) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Self, t: S) -> Self {
        self + (o - self) * t
    }

    pub fn cast<T: Real>(self) -> Vec2<T> {
        Vec2::new(T::lit(self.x.as_f64()), T::lit(self.y.as_f64()))
    }
}

impl<S: Real> Add for Vec2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Real> AddAssign for Vec2<S> {
    fn add_assign(&mut self, o: Self) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl<S: Real> Sub for Vec2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Real> Mul<S> for Vec2<S> {
    type Output = Self;
    fn mul(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<S: Real> Neg for Vec2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Unsigned angle in `[0, π]` between two non-zero vectors.
///
/// Uses `atan2(|a×b|, a·b)`, which stays accurate near 0 and π where `acos` does not.
pub fn angle_between<S: Real>(a: Vec2<S>, b: Vec2<S>) -> Option<S> {
    if a.norm_sq() == S::zero() || b.norm_sq() == S::zero() {
        return None;
    }
    Some(a.cross(b).abs().atan2(a.dot(b)))
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle<S: Real>(a: S) -> S {
    let two_pi = S::PI() + S::PI();
    let mut r = a % two_pi;
    if r > S::PI() {
        r -= two_pi;
    } else if r <= -S::PI() {
        r += two_pi;
    }
    r
}

/// Planar pose: position plus heading (radians, counter-clockwise from +x).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2<S> {
    pub position: Vec2<S>,
    pub heading: S,
}

impl<S: Real> Pose2<S> {
    pub fn new(x: S, y: S, heading: S) -> Self {
        Self { position: Vec2::new(x, y), heading }
    }

    #[inline]
    pub fn forward(&self) -> Vec2<S> {
        Vec2::from_angle(self.heading)
    }

    #[inline]
    pub fn left(&self) -> Vec2<S> {
        self.forward().perp()
    }

    /// Maps a robot-frame offset (forward, left) into the world frame.
    pub fn to_world(&self, forward: S, left: S) -> Vec2<S> {
        self.position + self.forward() * forward + self.left() * left
    }

    /// Expresses a world point as (forward, left) offsets in the robot frame.
    pub fn to_local(&self, p: Vec2<S>) -> (S, S) {
        let d = p - self.position;
        (d.dot(self.forward()), d.dot(self.left()))
    }
}

/// Total length of an open polyline.
pub fn path_length<S: Real>(points: &[Vec2<S>]) -> S {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn angle_between_extremes() {
        let x = Vec2::new(1.0, 0.0);
        assert_relative_eq!(angle_between(x, x).unwrap(), 0.0);
        assert_relative_eq!(angle_between(x, -x).unwrap(), std::f64::consts::PI);
        assert_relative_eq!(angle_between(x, x.perp()).unwrap(), std::f64::consts::FRAC_PI_2);
        assert!(angle_between(x, Vec2::zero()).is_none());
    }

    #[test]
    fn pose_round_trip_local() {
        let p = Pose2::new(1.0_f32, -2.0, 0.7);
        let w = p.to_world(3.0, -1.5);
        let (f, l) = p.to_local(w);
        assert!((f - 3.0).abs() < 1e-5 && (l + 1.5).abs() < 1e-5);
    }

    #[test]
    fn wrap() {
        assert_relative_eq!(wrap_angle(3.0 * std::f64::consts::PI), std::f64::consts::PI);
        assert_relative_eq!(wrap_angle(-0.5_f64), -0.5);
    }
}
