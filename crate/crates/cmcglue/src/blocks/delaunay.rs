use crate::error::{Error, Result};
use crate::numerics::quad::{adaptive, gk15};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Unit-scale Delaunay unduloid (H = 2) with neck radius ε.
///
/// The meridian is parametrized by ψ through ρ = ε + (1 − 2ε)(1 − cos ψ)/2,
/// which turns the first integral ρ/√(1+ρ'²) − ρ² = ε − ε² into the smooth
/// quadrature dx/dψ = (ρ² + κ)/√(ρ + ρ² + κ), κ = ε − ε². Necks sit at
/// ψ ∈ 2πℤ and bulges (ρ = 1 − ε) at ψ ∈ π + 2πℤ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaunayEnd {
    pub eps: f64,
    pub period: f64,
    /// Nodes (ψ, x(ψ)) on [0, π] for fast evaluation of x(ψ).
    table: Vec<(f64, f64)>,
}

/// Position and ψ-derivatives of the unduloid meridian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaunayPoint {
    pub x: f64,
    pub rho: f64,
    pub dx: f64,
    pub drho: f64,
    pub d2x: f64,
    pub d2rho: f64,
}

/// Smallest and largest neck radius handled by the unduloid branch.
pub const EPS_MIN: f64 = 1e-14;
pub const EPS_MAX: f64 = 0.499;

fn integrand(eps: f64, psi: f64) -> (f64, f64) {
    let kappa = eps - eps * eps;
    let rho = eps + (1.0 - 2.0 * eps) * 0.5 * (1.0 - psi.cos());
    let n = rho * rho + kappa;
    let m = rho + rho * rho + kappa;
    let g = n / m.sqrt();
    let g_rho = 2.0 * rho / m.sqrt() - n * (1.0 + 2.0 * rho) / (2.0 * m.powf(1.5));
    (g, g_rho)
}

fn half_period(eps: f64) -> Result<f64> {
    adaptive(|p| integrand(eps, p).0, 0.0, PI, 1e-15, 1e-15)
}

/// Unduloid with prescribed period T ∈ (2, T_max], by bisection on ε.
pub fn delaunay_solve(period: f64) -> Result<DelaunayEnd> {
    let t_max = 2.0 * half_period(EPS_MAX)?;
    if !(period > 2.0) || period > t_max {
        return Err(Error::NoSolution(format!("period {period} outside the unduloid range (2, {t_max:.6}]")));
    }
    let (mut lo, mut hi) = (EPS_MIN.ln(), EPS_MAX.ln());
    if 2.0 * half_period(EPS_MIN)? >= period {
        return Err(Error::NoSolution(format!("period {period} needs a neck below {EPS_MIN:e}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 2.0 * half_period(mid.exp())? < period {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    DelaunayEnd::from_neck((0.5 * (lo + hi)).exp())
}

impl DelaunayEnd {
    pub fn from_neck(eps: f64) -> Result<Self> {
        if !(EPS_MIN..=EPS_MAX).contains(&eps) {
            return Err(Error::NoSolution(format!("neck radius {eps} outside [{EPS_MIN}, {EPS_MAX}]")));
        }
        let psi_min = 1e-3 * eps.sqrt();
        let m = 160;
        let mut nodes = vec![0.0];
        nodes.extend((0..=m).map(|i| psi_min * (PI / psi_min).powf(i as f64 / m as f64)));
        *nodes.last_mut().unwrap() = PI;
        let mut table = vec![(0.0, 0.0)];
        let mut f = |p: f64| integrand(eps, p).0;
        for w in nodes.windows(2) {
            let x = table.last().unwrap().1 + adaptive(&mut f, w[0], w[1], 1e-17, 1e-15)?;
            table.push((w[1], x));
        }
        let period = 2.0 * table.last().unwrap().1;
        Ok(Self { eps, period, table })
    }

    pub fn kappa(&self) -> f64 {
        self.eps - self.eps * self.eps
    }

    fn x_half(&self, psi: f64) -> f64 {
        let j = self.table.partition_point(|n| n.0 <= psi).clamp(1, self.table.len() - 1) - 1;
        let (p0, x0) = self.table[j];
        if psi == p0 {
            return x0;
        }
        let mut f = |p: f64| integrand(self.eps, p).0;
        x0 + gk15(&mut f, p0, psi).0
    }

    /// x(ψ) for any real ψ, using x(−ψ) = −x(ψ) and x(ψ + 2π) = x(ψ) + T.
    pub fn x_of_psi(&self, psi: f64) -> f64 {
        let n = (psi / (2.0 * PI)).round();
        let phi = psi - 2.0 * PI * n;
        n * self.period + phi.signum() * self.x_half(phi.abs())
    }

    pub fn point(&self, psi: f64) -> DelaunayPoint {
        let half = 0.5 * (1.0 - 2.0 * self.eps);
        let (g, g_rho) = integrand(self.eps, psi);
        let drho = half * psi.sin();
        DelaunayPoint {
            x: self.x_of_psi(psi),
            rho: self.eps + half * (1.0 - psi.cos()),
            dx: g,
            drho,
            d2x: g_rho * drho,
            d2rho: half * psi.cos(),
        }
    }

    /// Height above the neck of the branch ψ ∈ [0, π] as a graph over the
    /// radius s ∈ (ε, 1 − ε): returns (X, dX/ds, d²X/ds²).
    pub fn graph_over_radius(&self, s: f64) -> Result<(f64, f64, f64)> {
        let half = 0.5 * (1.0 - 2.0 * self.eps);
        let q = (s - self.eps) / (2.0 * half);
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("radius {s} outside the open range ({}, {})", self.eps, 1.0 - self.eps)));
        }
        let psi = 2.0 * q.sqrt().asin();
        let (g, g_rho) = integrand(self.eps, psi);
        let (rp, rpp) = (half * psi.sin(), half * psi.cos());
        Ok((self.x_half(psi), g / rp, (g_rho * rp * rp - g * rpp) / rp.powi(3)))
    }

    /// ψ where the branch ψ ∈ [0, π] reaches radius s.
    pub fn psi_of_radius(&self, s: f64) -> f64 {
        let q = ((s - self.eps) / (1.0 - 2.0 * self.eps)).clamp(0.0, 1.0);
        2.0 * q.sqrt().asin()
    }

    /// ρ/√(1 + ρ_x²) − ρ², conserved along the orbit.
    pub fn first_integral(&self, psi: f64) -> f64 {
        let p = self.point(psi);
        let slope = p.drho / p.dx;
        p.rho / (1.0 + slope * slope).sqrt() - p.rho * p.rho
    }

    /// Samples (x, ρ) over one period starting at a neck.
    pub fn period_samples(&self, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|i| {
                let p = self.point(2.0 * PI * i as f64 / n as f64);
                (p.x, p.rho)
            })
            .collect()
    }
}
