use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Catenoidal neck joining two consecutive spheres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeckBlock {
    pub index: i32,
    pub eps: f64,
    /// Translation d, fixed by matching to the neighbouring spheres.
    pub d: f64,
    /// Extra vertical displacement δ, |δ| < ε^{1/2}.
    pub delta: f64,
    /// Arclength of the neck center p♭.
    pub center: f64,
}

impl NeckBlock {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidInput(format!("neck scale {} not in (0, 1)", self.eps)));
        }
        if self.delta.abs() >= self.eps.sqrt() {
            return Err(Error::InvalidInput(format!("displacement {} exceeds eps^(1/2)", self.delta)));
        }
        Ok(())
    }
}

/// F^±(ε, d; x) = ±ε arccosh(x/ε) + εd, the scaled catenoid as a graph over
/// the plane; returns (F, F', F'').
pub fn catenoid_graph(eps: f64, d: f64, sign: f64, x: f64) -> Result<(f64, f64, f64)> {
    if x < eps {
        return Err(Error::Domain(format!("catenoid graph needs x >= eps, got x = {x}, eps = {eps}")));
    }
    let q = (x * x - eps * eps).sqrt();
    let f = sign * eps * (x / eps).acosh() + eps * d;
    let f1 = sign * eps / q;
    let f2 = -sign * eps * x / q.powi(3);
    Ok((f, f1, f2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn waist_and_difference() {
        assert_eq!(catenoid_graph(0.01, 0.0, 1.0, 0.01).unwrap().0, 0.0);
        let (p, m) = (catenoid_graph(0.01, 0.3, 1.0, 0.05).unwrap().0, catenoid_graph(0.01, 0.3, -1.0, 0.05).unwrap().0);
        assert!((p - m - 0.02 * 5f64.acosh()).abs() < 1e-15);
        assert!(catenoid_graph(0.01, 0.0, 1.0, 0.009).is_err());
    }

    #[test]
    fn logarithmic_asymptotics() {
        let eps: f64 = 1e-3;
        for &x in &[eps.powf(0.75), 2.0 * eps, 10.0 * eps] {
            let f = catenoid_graph(eps, 0.0, 1.0, x).unwrap().0;
            let approx = eps * (LN_2 - eps.ln()) + eps * x.ln();
            assert!((f - approx).abs() <= 2.0 * eps.powi(3) / (x * x), "x = {x}");
        }
    }
}
