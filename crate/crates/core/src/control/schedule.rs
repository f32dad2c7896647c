//! Horizon schedule: growing integration intervals and shrinking collision-check density.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Real;

/// Dynamics model used for one rollout step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fidelity {
    Full,
    Kinematic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct DdpSchedule<S> {
    /// Total rollout horizon `T`, seconds.
    pub horizon: S,
    /// Number of rollout steps.
    pub steps: usize,
    /// Decrement exponent `p`.
    pub exponent: S,
    /// Boundary points checked at the first step.
    pub boundary_points: usize,
}

impl<S: Real> Default for DdpSchedule<S> {
    fn default() -> Self {
        Self::with_scale(S::lit(3.0))
    }
}

impl<S: Real> DdpSchedule<S> {
    /// Default schedule with `T = steps · 0.1 s · scale`.
    pub fn with_scale(scale: S) -> Self {
        let steps = 10;
        Self { horizon: S::lit(steps as f64 * 0.1) * scale, steps, exponent: S::lit(2.0), boundary_points: 16 }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.steps == 0 || self.boundary_points == 0 {
            return Err(Error::Config("schedule needs at least one step and one boundary point".into()));
        }
        if !(self.horizon > S::zero() && self.exponent > S::zero()) {
            return Err(Error::Config("schedule horizon and exponent must be positive".into()));
        }
        Ok(())
    }

    fn frac(&self, t: usize) -> S {
        (S::lit(t as f64) / S::lit(self.steps as f64)).powf(self.exponent)
    }

    fn check(&self, t: usize) -> Result<(), Error> {
        if t < self.steps {
            Ok(())
        } else {
            Err(Error::OutOfRange { index: t, len: self.steps })
        }
    }

    /// `Δ_t = T [((t+1)/𝒯)^p − (t/𝒯)^p]`.
    pub fn interval(&self, t: usize) -> Result<S, Error> {
        self.check(t)?;
        Ok(self.horizon * (self.frac(t + 1) - self.frac(t)))
    }

    /// `N_t = ⌈n (1 − (t/𝒯)^p)⌉`, never below 1.
    pub fn boundary_points_at(&self, t: usize) -> Result<usize, Error> {
        self.check(t)?;
        let raw = S::lit(self.boundary_points as f64) * (S::one() - self.frac(t));
        // absorb rounding so exact integers are not bumped up
        let n = (raw - S::lit(1e-9)).ceil().to_usize().unwrap_or(0);
        Ok(n.clamp(1, self.boundary_points))
    }

    pub fn intervals(&self) -> Vec<S> {
        (0..self.steps).map(|t| self.horizon * (self.frac(t + 1) - self.frac(t))).collect()
    }

    /// Full dynamics while the step is at most twice the first step.
    pub fn fidelity(&self, t: usize) -> Fidelity {
        let d0 = self.horizon * self.frac(1);
        let dt = self.horizon * (self.frac(t + 1) - self.frac(t));
        if dt <= d0 + d0 { Fidelity::Full } else { Fidelity::Kinematic }
    }
}
