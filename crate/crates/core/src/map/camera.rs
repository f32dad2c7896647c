//! Pinhole back-projection into the world frame.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::Pose2;
use crate::scalar::Real;
use crate::world::SensorConfig;

/// Rigid transform `p_w = R · p_c + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rigid3<S> {
    /// Row-major rotation.
    pub rotation: [[S; 3]; 3],
    pub translation: [S; 3],
}

impl<S: Real> Rigid3<S> {
    pub fn identity() -> Self {
        let (o, z) = (S::one(), S::zero());
        Self { rotation: [[o, z, z], [z, o, z], [z, z, o]], translation: [z, z, z] }
    }

    pub fn translation(t: [S; 3]) -> Self {
        Self { translation: t, ..Self::identity() }
    }

    pub fn apply(&self, p: [S; 3]) -> [S; 3] {
        let r = &self.rotation;
        let mut out = self.translation;
        for (i, o) in out.iter_mut().enumerate() {
            *o += r[i][0] * p[0] + r[i][1] * p[1] + r[i][2] * p[2];
        }
        out
    }

    /// Orthonormal rotation with determinant +1, within `tol`.
    pub fn is_valid(&self, tol: S) -> bool {
        let r = &self.rotation;
        for i in 0..3 {
            for j in 0..3 {
                let dot = (0..3).map(|k| r[i][k] * r[j][k]).fold(S::zero(), |a, b| a + b);
                let expect = if i == j { S::one() } else { S::zero() };
                if (dot - expect).abs() > tol {
                    return false;
                }
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        (det - S::one()).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel<S> {
    pub fx: S,
    pub fy: S,
    pub cx: S,
    pub cy: S,
    /// Camera-to-world transform. Camera axes: x right, y down, z along the optical axis.
    pub camera_to_world: Rigid3<S>,
}

impl<S: Real> CameraModel<S> {
    pub fn new(fx: S, fy: S, cx: S, cy: S, camera_to_world: Rigid3<S>) -> Result<Self, Error> {
        if !(fx > S::zero() && fy > S::zero()) {
            return Err(Error::InvalidInput("focal lengths must be positive".into()));
        }
        if !camera_to_world.is_valid(S::lit(1e-6)) {
            return Err(Error::InvalidInput("camera-to-world rotation is not proper orthonormal".into()));
        }
        Ok(Self { fx, fy, cx, cy, camera_to_world })
    }

    /// Forward-looking camera of a planar robot, one pixel row spanning the sensor's field of view.
    pub fn scanline(pose: &Pose2<S>, sensor: &SensorConfig) -> Self {
        let half = S::lit(((sensor.rays.max(2) - 1) as f64) / 2.0);
        let fx = half / (S::lit(sensor.fov) / S::lit(2.0)).tan();
        let (s, c) = pose.heading.sin_cos();
        let z = S::zero();
        // columns: camera x (right), y (down), z (forward) expressed in world axes
        let rotation = [[s, z, c], [-c, z, s], [z, -S::one(), z]];
        let translation = [pose.position.x, pose.position.y, z];
        Self { fx, fy: fx, cx: half, cy: z, camera_to_world: Rigid3 { rotation, translation } }
    }

    /// Pixel column of a ray at `offset` radians left of the optical axis.
    pub fn column_for_offset(&self, offset: S) -> S {
        self.cx - self.fx * offset.tan()
    }

    /// World position of pixel `(u, v)` observed at depth `z` along the optical axis.
    pub fn backproject(&self, u: S, v: S, z: S) -> Result<[S; 3], Error> {
        if !(z > S::zero()) {
            return Err(Error::InvalidInput(format!("depth must be positive, got {z}")));
        }
        let pc = [(u - self.cx) / self.fx * z, (v - self.cy) / self.fy * z, z];
        // homogeneous coordinate stays 1 under a rigid transform, so Π is the identity here
        Ok(self.camera_to_world.apply(pc))
    }
}

/// Free-function form of [`CameraModel::backproject`].
pub fn backproject<S: Real>(u: S, v: S, z: S, cam: &CameraModel<S>) -> Result<[S; 3], Error> {
    cam.backproject(u, v, z)
}
