//! Surfaces of revolution about the axis geodesic: sampled meridians,
//! fundamental forms in the flat and ambient metrics, graph formulas and
//! normal deformations.

mod curve;
mod deform;
mod expansion;
mod forms;

pub use curve::{Closure, CurvePoint, ProfileCurve, Region, Side};
pub use deform::{linearized_operator, normal_graph};
pub use expansion::{ambient_mean_curvature_expansion, expansion_at_chart_point, ChartCurvePoint};
pub use forms::{ambient_forms_at, ambient_forms_exact, euclidean_forms, euclidean_forms_at, graph_forms, FundamentalForms, MetricFlag};
