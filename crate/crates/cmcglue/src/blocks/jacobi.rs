use crate::error::{Error, Result};

/// j = √(3/4π), so that J = j cos θ has unit L² norm on the unit sphere.
pub const J_NORM: f64 = 0.488_602_511_902_919_9;

/// Normalized translation Jacobi field J(θ) = j cos θ of the unit sphere.
pub fn jacobi_sphere(theta: f64) -> f64 {
    J_NORM * theta.cos()
}

/// Axial translation Jacobi field of the catenoid of scale ε, in terms of the
/// signed radius x (sign marks the end): sign(x)·√(x² − ε²)/|x|.
///
/// This is ⟨N, ∂_t⟩ up to sign; it is bounded, odd across the neck and tends
/// to ±1 on the ends.
pub fn jacobi_neck(eps: f64, x: f64) -> Result<f64> {
    if x.abs() < eps {
        return Err(Error::Domain(format!("|x| = {} is inside the neck radius {eps}", x.abs())));
    }
    Ok(x.signum() * (x * x - eps * eps).sqrt() / x.abs())
}
