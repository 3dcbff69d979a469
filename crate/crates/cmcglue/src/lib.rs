//! Construction, balancing and verification of approximate constant mean
//! curvature surfaces in axially symmetric warped products.

pub mod ambient;
pub mod assembly;
pub mod balance;
pub mod blocks;
pub mod error;
pub mod expr;
pub mod io;
pub mod norms;
pub mod numerics;
pub mod revgeom;

pub use error::{Error, Result};
