//! Numerical laboratory for the coupled logistic map
//!
//! `F(x, y) = ((1-e) f(x) + e f(y), (1-e) f(y) + e f(x))`, `f(t) = mu t (1 - t)`.
//!
//! Forward and backward iteration, invariant curves bounding the immediate basin of
//! infinity, escape-time rasters with component labeling, attractor detection,
//! and periodic-orbit continuation with Hopf bracketing.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod bifurcation;
pub mod curve;
pub mod error;
pub mod export;
pub mod geometry;
pub mod map;
pub mod orbit;
pub mod params;
pub mod preimage;
pub mod raster;

pub use error::{Error, Result};
pub use geometry::{ConeRegion, PlaneGeometry, PlanePoint, Polyline, Rect};
pub use map::{
    cone_membership, fixed_points, jacobian, logistic, map_eval, preimages, Classification,
    FixedPointInfo, FixedPointLabel, Mat2,
};
pub use params::{loci, Loci, ParamPoint, Strength};
