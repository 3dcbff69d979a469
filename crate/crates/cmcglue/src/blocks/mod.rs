//! Analytic building blocks: Green-perturbed spheres, catenoidal necks,
//! Delaunay unduloids and the Jacobi fields used by the projections.

mod catenoid;
mod delaunay;
mod green;
mod jacobi;

pub use catenoid::{catenoid_graph, NeckBlock};
pub use delaunay::{delaunay_solve, DelaunayEnd, DelaunayPoint};
pub use green::{solve_green, SphereGreen, LOG_COEFF};
pub use jacobi::{jacobi_neck, jacobi_sphere, J_NORM};
