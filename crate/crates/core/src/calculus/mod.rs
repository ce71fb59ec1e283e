//! Jets, pointwise geometry and finite-difference operators.

pub mod chart;
pub mod fd;
pub mod geometry;
pub mod jet;

pub use chart::{jet_eval, ChartMap, ClosedForm, Frame};
pub use fd::{
    aggregate_order, dbar, divergence, divergence_coords, gauss_curvature,
    gauss_curvature_richardson, gradient_norm2, laplace_beltrami, normal_connection_norm2,
    richardson, Richardson, Surface, DEFAULT_STEP,
};
pub use geometry::LocalGeometry;
pub use jet::{Jet2, Real};
