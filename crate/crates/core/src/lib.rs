//! Hierarchical reef exploration stack.
//!
//! A simulated underwater robot surveys oyster clusters: a scanline camera feeds a persistent
//! occupancy grid, target regions are reduced to a tracked centroid chain, a high-level planner
//! (rule-based, scripted, or a remote vision-language model) proposes waypoints that a geometric
//! verifier accepts or rejects with feedback, and a sampling-based controller with
//! horizon-dependent dynamics fidelity drives the robot there. [`mission`] ties it together and
//! computes the evaluation metrics.
//!
//! The geometric and control kernels are generic over [`Real`] (`f32`/`f64`); the aliases below
//! fix the `f64` instantiation used by the simulator.

// `!(x > 0)` is used on purpose so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod control;
pub mod error;
pub mod geometry;
pub mod map;
pub mod mission;
pub mod planner;
pub mod raster;
pub mod scalar;
pub mod verifier;
pub mod world;

pub use error::{Error, Result};
pub use scalar::Real;

/// World point, meters.
pub type Point = geometry::Vec2<f64>;
pub type Pose = geometry::Pose2<f64>;
pub type State = control::RobotState<f64>;
pub type Control = control::Control<f64>;
pub type Schedule = control::DdpSchedule<f64>;
pub type DynamicsParams = control::DynamicsParams<f64>;
pub type Camera = map::CameraModel<f64>;
pub type Tracker = chain::CentroidTracker<f64>;
pub type VerifierConfig = verifier::VerifierConfig<f64>;
