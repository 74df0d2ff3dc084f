//! Numerical geometry on global charts of R^2 and R^3 carrying metrics of
//! bounded nonpositive curvature: geodesic integration and boundary-value
//! solves, Busemann functions and horoballs, metric projections onto closed
//! sets, weak-convexity certification, the projection retraction homotopy,
//! and the horoball-intersection disconnection scene.

pub mod convexity;
pub mod counterexample;
pub mod error;
pub mod geodesy;
pub mod horo;
pub mod manifold;
pub mod retract;
pub mod sets;

pub use error::{Error, Result};
pub use manifold::{ConformalField, MetricModel, Point, TangentPlane, TangentVector};
