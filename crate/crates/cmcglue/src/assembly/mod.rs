//! Matched asymptotics and gluing of spheres, necks and Delaunay ends.

mod config;
mod cutoff;
pub(crate) mod pieces;
mod surface;

pub use config::{invert_lambda, lambda_map, DelaunayData, GluedConfiguration, Kind, SphereBlock, REGIME_CONSTANT};
pub use cutoff::{cutoff, cutoff_with_derivatives, derivative_bounds};
pub use pieces::{Piece, PieceKind};
pub use pieces::{sphere_graph_in_neck, NeckGraph, SphereRef};
pub use surface::{assemble, mirror_point, mirror_region, scaled_weight, AssembledSurface, SamplingOptions};
