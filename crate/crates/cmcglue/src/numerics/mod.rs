//! Small numerical kernels shared by the geometry modules.

pub mod fit;
pub mod ode;
pub mod quad;
pub mod spline;
