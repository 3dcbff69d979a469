use super::profile::MetricProfile;
use crate::error::{Error, Result};
use crate::numerics::ode::rk4;

/// Image of a normal-coordinate point in (t, ρ) coordinates, with first and
/// second derivatives with respect to the chart coordinates (u, w).
///
/// `jac[i][a]` is ∂(t, ρ)_i / ∂(u, w)_a and `hess[i][a][b]` the second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub t: f64,
    pub rho: f64,
    pub jac: [[f64; 2]; 2],
    pub hess: [[[f64; 2]; 2]; 2],
}

impl ChartPoint {
    /// Pushes a chart curve (value, first, second derivative) to (t, ρ) derivatives.
    pub fn push(&self, d1: [f64; 2], d2: [f64; 2]) -> ([f64; 2], [f64; 2]) {
        let mut v = [0.0; 2];
        let mut a = [0.0; 2];
        for i in 0..2 {
            v[i] = self.jac[i][0] * d1[0] + self.jac[i][1] * d1[1];
            a[i] = self.jac[i][0] * d2[0] + self.jac[i][1] * d2[1];
            for p in 0..2 {
                for q in 0..2 {
                    a[i] += self.hess[i][p][q] * d1[p] * d1[q];
                }
            }
        }
        (v, a)
    }
}

/// Largest normal-coordinate radius accepted by the chart maps.
pub const CHART_RADIUS: f64 = 0.5;

/// exp at γ(center) of u e_0 + w e_1 in the (t, x)-plane, with exact
/// first and second variations from the linearized geodesic flow.
pub fn exp_map(p: &MetricProfile, center: f64, u: f64, w: f64) -> Result<ChartPoint> {
    let len = u.hypot(w);
    if len > CHART_RADIUS {
        return Err(Error::Range(format!("normal-coordinate radius {len} exceeds {CHART_RADIUS}")));
    }
    let a0 = p.derivs(center)?.0[0];
    if p.is_flat() {
        return Ok(ChartPoint { t: center + u, rho: w, jac: [[1.0, 0.0], [0.0, 1.0]], hess: [[[0.0; 2]; 2]; 2] });
    }
    // State: y = (t, x, ṫ, ẋ), then ∂y/∂u, ∂y/∂w, then ∂²y/∂u², ∂²y/∂u∂w, ∂²y/∂w².
    let mut y0 = [0.0; 24];
    y0[0] = center;
    y0[2] = u;
    y0[3] = w / a0.sqrt();
    y0[4 + 2] = 1.0;
    y0[8 + 3] = 1.0 / a0.sqrt();
    let steps = 8 + (400.0 * len).ceil() as usize;
    let y = rk4(
        |_, y: &[f64; 24]| {
            let d = p.derivs_unchecked(y[0]).0;
            let (a, a1, a2, a3) = (d[0], d[1], d[2], d[3]);
            let b = a1 / a;
            let b1 = a2 / a - a1 * a1 / (a * a);
            let b2 = a3 / a - 3.0 * a1 * a2 / (a * a) + 2.0 * a1.powi(3) / a.powi(3);
            let (pp, q) = (y[2], y[3]);
            let jac = [
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.5 * a2 * q * q, 0.0, 0.0, a1 * q],
                [-b1 * pp * q, 0.0, -b * q, -b * pp],
            ];
            // Non-zero second derivatives of the two nonlinear rows.
            let hess2 = |v: &[f64], z: &[f64]| 0.5 * a3 * q * q * v[0] * z[0] + a2 * q * (v[0] * z[3] + v[3] * z[0]) + a1 * v[3] * z[3];
            let hess3 = |v: &[f64], z: &[f64]| {
                -b2 * pp * q * v[0] * z[0] - b1 * q * (v[0] * z[2] + v[2] * z[0]) - b1 * pp * (v[0] * z[3] + v[3] * z[0])
                    - b * (v[2] * z[3] + v[3] * z[2])
            };
            let mut out = [0.0; 24];
            out[0] = pp;
            out[1] = q;
            out[2] = 0.5 * a1 * q * q;
            out[3] = -b * pp * q;
            let apply = |v: &[f64]| -> [f64; 4] {
                std::array::from_fn(|i| (0..4).map(|j| jac[i][j] * v[j]).sum())
            };
            for k in 0..2 {
                let o = apply(&y[4 + 4 * k..8 + 4 * k]);
                out[4 + 4 * k..8 + 4 * k].copy_from_slice(&o);
            }
            let pairs = [(0, 0), (0, 1), (1, 1)];
            for (m, (i, j)) in pairs.iter().enumerate() {
                let base = 12 + 4 * m;
                let mut o = apply(&y[base..base + 4]);
                let (vi, vj) = (&y[4 + 4 * i..8 + 4 * i], &y[4 + 4 * j..8 + 4 * j]);
                o[2] += hess2(vi, vj);
                o[3] += hess3(vi, vj);
                out[base..base + 4].copy_from_slice(&o);
            }
            out
        },
        0.0,
        1.0,
        y0,
        steps,
    );
    Ok(ChartPoint {
        t: y[0],
        rho: y[1],
        jac: [[y[4], y[8]], [y[5], y[9]]],
        hess: [[[y[12], y[16]], [y[16], y[20]]], [[y[13], y[17]], [y[17], y[21]]]],
    })
}

/// Inverse of `exp_map` by Newton iteration; returns (u, w).
pub fn log_map(p: &MetricProfile, center: f64, t: f64, rho: f64) -> Result<(f64, f64)> {
    let a0 = p.derivs(center)?.0[0];
    let mut v = [t - center, a0.sqrt() * rho];
    if p.is_flat() {
        return Ok((v[0], v[1]));
    }
    for _ in 0..40 {
        let e = exp_map(p, center, v[0], v[1])?;
        let r = [e.t - t, e.rho - rho];
        let det = e.jac[0][0] * e.jac[1][1] - e.jac[0][1] * e.jac[1][0];
        let du = (e.jac[1][1] * r[0] - e.jac[0][1] * r[1]) / det;
        let dw = (-e.jac[1][0] * r[0] + e.jac[0][0] * r[1]) / det;
        v[0] -= du;
        v[1] -= dw;
        if du.abs().max(dw.abs()) <= 1e-16 * (1.0 + v[0].abs().max(v[1].abs())) {
            return Ok((v[0], v[1]));
        }
    }
    let e = exp_map(p, center, v[0], v[1])?;
    if (e.t - t).abs().max((e.rho - rho).abs()) < 1e-14 {
        Ok((v[0], v[1]))
    } else {
        Err(Error::NonConvergence(format!("log map at ({t}, {rho}) from {center}")))
    }
}
