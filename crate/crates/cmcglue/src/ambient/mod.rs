//! Axially symmetric ambient metrics g = dt² + A(t)(dx² + dy²).

mod chart;
mod curvature;
mod profile;

pub use chart::{exp_map, log_map, ChartPoint, CHART_RADIUS};
pub use curvature::{curvature_frame_data, scalar_curvature, scalar_curvature_gradient, scalar_curvature_hessian, CurvatureData};
pub use profile::{Extremum, MetricProfile, Parity, ProfileReport, Regime, WarpDerivs};
