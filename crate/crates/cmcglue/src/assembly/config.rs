use crate::blocks::{delaunay_solve, solve_green, DelaunayEnd, NeckBlock, SphereGreen, LOG_COEFF};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Chain symmetric under t ↦ −t: spheres −K..K.
    Finite,
    /// Spheres 0..K followed by a Delaunay end.
    OneEnded,
}

/// Neck scales must satisfy r³/C ≤ ε ≤ C r² with this C.
pub const REGIME_CONSTANT: f64 = 100.0;

/// Perturbed sphere k with its Green data and near-pole constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereBlock {
    pub index: i32,
    pub center: f64,
    pub radius: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub green: SphereGreen,
    /// c⁺ / C⁺ and c⁻ / C⁻ (NaN on a capped side).
    pub c_plus_ratio: f64,
    pub c_minus_ratio: f64,
    pub big_c: f64,
    /// Cap radii r ε^{3/4} toward the lower and upper neighbour (0 when capped).
    pub cap_lower: f64,
    pub cap_upper: f64,
}

/// Delaunay end attached to the last sphere of a one-ended chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaunayData {
    pub eps: f64,
    pub period: f64,
    pub sigma: f64,
    pub delta: f64,
    /// Arclength of the first Delaunay neck chart center p♭_K.
    pub center: f64,
    /// Scaled neck position in that chart, displacement included.
    pub neck_offset: f64,
    /// Number of periods kept before truncation.
    pub periods: usize,
}

impl DelaunayData {
    pub fn unduloid(&self) -> Result<DelaunayEnd> {
        DelaunayEnd::from_neck(self.eps)
    }
}

/// All parameters of a glued chain, independent and derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedConfiguration {
    pub kind: Kind,
    pub r: f64,
    /// Spheres are indexed 0..=k (and mirrored to −k..=k for the finite kind).
    pub k: usize,
    /// Center of sphere 0.
    pub origin: f64,
    pub sigma: Vec<f64>,
    pub delta: Vec<f64>,
    pub eps: Vec<f64>,
    pub spheres: Vec<SphereBlock>,
    pub necks: Vec<NeckBlock>,
    pub delaunay: Option<DelaunayData>,
    /// Chart radii R = 2r and R′ = 1/2.
    pub chart_r: f64,
    pub chart_r_prime: f64,
    /// Whether r³ < ε < r² and |δ| < ε^{1/2} hold strictly.
    pub strict_regime: bool,
}

/// σ = Λ(ε) = rε(2(log 2 − log ε) − m), m = c⁺/C⁺ + c⁻/C⁻.
pub fn lambda_map(r: f64, eps: f64, m: f64) -> Result<f64> {
    let eps_max = lambda_eps_max(m);
    if !(eps > 0.0 && eps < eps_max) {
        return Err(Error::Range(format!("eps = {eps} outside the monotone range (0, {eps_max:.3e})")));
    }
    Ok(r * eps * (2.0 * (LN_2 - eps.ln()) - m))
}

fn lambda_eps_max(m: f64) -> f64 {
    // dΛ/dε = r(2(log 2 − log ε) − m − 2) vanishes here.
    2.0 * (-1.0 - 0.5 * m).exp()
}

/// Inverse of `lambda_map` on its monotone branch, to relative 1e−12 or better.
pub fn invert_lambda(r: f64, sigma: f64, m: f64) -> Result<f64> {
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let eps_max = lambda_eps_max(m);
    let top = r * eps_max * (2.0 * (LN_2 - eps_max.ln()) - m);
    if !(sigma > 0.0 && sigma < top) {
        return Err(Error::NoSolution(format!("separation {sigma} outside the image (0, {top:.3e}) of the matching map")));
    }
    let f = |le: f64| {
        let e = le.exp();
        r * e * (2.0 * (LN_2 - le) - m) - sigma
    };
    let (mut lo, mut hi) = (-700.0, eps_max.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let mut e = (0.5 * (lo + hi)).exp();
    for _ in 0..3 {
        let g = r * e * (2.0 * (LN_2 - e.ln()) - m) - sigma;
        let dg = r * (2.0 * (LN_2 - e.ln()) - m - 2.0);
        e -= g / dg;
    }
    Ok(e)
}

impl GluedConfiguration {
    /// Configuration from neck scales ε (length K for finite, K+1 for
    /// one-ended with the Delaunay neck last) and displacements δ.
    pub fn from_eps(kind: Kind, r: f64, k: usize, origin: f64, eps: Vec<f64>, delta: Vec<f64>, periods: usize) -> Result<Self> {
        let n_necks = match kind {
            Kind::Finite => k,
            Kind::OneEnded => k + 1,
        };
        if eps.len() != n_necks || delta.len() != n_necks {
            return Err(Error::InvalidConfig(format!("expected {n_necks} neck scales and displacements, got {} and {}", eps.len(), delta.len())));
        }
        if !(r > 0.0 && r < 0.25) {
            return Err(Error::InvalidConfig(format!("sphere radius {r} outside (0, 0.25)")));
        }
        let mut strict = true;
        for (j, (&e, &d)) in eps.iter().zip(&delta).enumerate() {
            if !(e >= r.powi(3) / REGIME_CONSTANT && e <= REGIME_CONSTANT * r * r) {
                return Err(Error::InvalidConfig(format!("neck {j}: eps = {e:e} outside [r^3/{REGIME_CONSTANT}, {REGIME_CONSTANT} r^2]")));
            }
            if d.abs() >= e.sqrt() {
                return Err(Error::InvalidConfig(format!("neck {j}: |delta| = {} not below eps^(1/2)", d.abs())));
            }
            strict &= e > r.powi(3) && e < r * r;
        }
        let strength = |j: usize| 2.0 * PI * eps[j];
        let mut spheres = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let (em, ep) = match kind {
                Kind::Finite => {
                    let em = if i == 0 { if k > 0 { strength(0) } else { 0.0 } } else { strength(i - 1) };
                    (em, if i < k { strength(i) } else { 0.0 })
                }
                Kind::OneEnded => (if i == 0 { 0.0 } else { strength(i - 1) }, strength(i)),
            };
            let green = solve_green(ep, em)?;
            let (cp, big_c, cm, _) = green.expansion_constants();
            spheres.push(SphereBlock {
                index: i as i32,
                center: 0.0,
                radius: r,
                eps_plus: ep,
                eps_minus: em,
                green,
                c_plus_ratio: cp / big_c,
                c_minus_ratio: cm / big_c,
                big_c,
                cap_lower: if em > 0.0 { r * (em / (2.0 * PI)).powf(0.75) } else { 0.0 },
                cap_upper: if ep > 0.0 { r * (ep / (2.0 * PI)).powf(0.75) } else { 0.0 },
            });
        }
        let mut sigma = Vec::with_capacity(n_necks);
        for j in 0..k {
            let m = spheres[j].c_plus_ratio + spheres[j + 1].c_minus_ratio;
            sigma.push(lambda_map(r, eps[j], m)?);
        }
        let mut delaunay = None;
        if kind == Kind::OneEnded {
            let end = DelaunayEnd::from_neck(eps[k])?;
            delaunay = Some((end.period, r * (end.period - 2.0)));
            sigma.push(r * (end.period - 2.0));
        }
        let origin = if kind == Kind::Finite { 0.0 } else { origin };
        let mut t = origin;
        for (i, s) in spheres.iter_mut().enumerate() {
            s.center = t;
            if i < sigma.len() {
                t += 2.0 * r + sigma[i];
            }
        }
        let necks: Vec<NeckBlock> = (0..k)
            .map(|j| NeckBlock {
                index: j as i32,
                eps: eps[j],
                d: 0.5 * (spheres[j + 1].c_minus_ratio - spheres[j].c_plus_ratio),
                delta: delta[j],
                center: spheres[j].center + r + 0.5 * sigma[j],
            })
            .collect();
        for n in &necks {
            n.validate()?;
        }
        let delaunay = delaunay.map(|(period, sig)| {
            let e = eps[k];
            let last = &spheres[k];
            DelaunayData {
                eps: e,
                period,
                sigma: sig,
                delta: delta[k],
                center: last.center + r + 0.5 * sig,
                neck_offset: -sig / (2.0 * r) - e * last.c_plus_ratio + e * (LN_2 - e.ln()) + e * delta[k],
                periods,
            }
        });
        Ok(Self {
            kind,
            r,
            k,
            origin,
            sigma,
            delta,
            eps,
            spheres,
            necks,
            delaunay,
            chart_r: 2.0 * r,
            chart_r_prime: 0.5,
            strict_regime: strict,
        })
    }

    /// Configuration from separations σ, inverting the matching map with a
    /// fixed-point iteration on the ratio-dependent constants.
    pub fn from_sigma(kind: Kind, r: f64, k: usize, origin: f64, sigma: Vec<f64>, delta: Vec<f64>, periods: usize) -> Result<Self> {
        let n = match kind {
            Kind::Finite => k,
            Kind::OneEnded => k + 1,
        };
        if sigma.len() != n {
            return Err(Error::InvalidConfig(format!("expected {n} separations, got {}", sigma.len())));
        }
        let mut eps = vec![0.0; n];
        if kind == Kind::OneEnded {
            eps[k] = delaunay_solve(2.0 + sigma[k] / r)?.eps;
        }
        // Start from the symmetric constants m = 2(1 − log 2).
        for j in 0..k {
            eps[j] = invert_lambda(r, sigma[j], 2.0 * (1.0 - LN_2))?;
        }
        for _ in 0..100 {
            let strengths = |i: usize| -> (f64, f64) {
                match kind {
                    Kind::Finite => (if i < k { eps[i] } else { 0.0 }, if i == 0 { eps[0] } else { eps[i - 1] }),
                    Kind::OneEnded => (eps[i], if i == 0 { 0.0 } else { eps[i - 1] }),
                }
            };
            let mut change: f64 = 0.0;
            let mut next = eps.clone();
            for j in 0..k {
                let (p, m0) = strengths(j);
                let (p1, m1) = strengths(j + 1);
                let cp = solve_green(2.0 * PI * p, 2.0 * PI * m0)?.expansion_constants().0 / LOG_COEFF;
                let cm = solve_green(2.0 * PI * p1, 2.0 * PI * m1)?.expansion_constants().2 / LOG_COEFF;
                next[j] = invert_lambda(r, sigma[j], cp + cm)?;
                change = change.max(((next[j] - eps[j]) / next[j]).abs());
            }
            eps = next;
            if change < 1e-14 {
                return Self::from_eps(kind, r, k, origin, eps, delta, periods);
            }
        }
        Err(Error::NonConvergence("matching fixed point for the neck scales".into()))
    }

    /// Sphere center t_k for any signed index (mirrored for the finite kind).
    pub fn sphere_center(&self, k: i32) -> f64 {
        let c = self.spheres[k.unsigned_abs() as usize].center;
        if k < 0 {
            -c
        } else {
            c
        }
    }

    /// Neck scale for any signed neck index (neck j joins spheres j and j+1).
    pub fn neck_eps(&self, j: i32) -> f64 {
        let idx = if j < 0 { (-j - 1) as usize } else { j as usize };
        if self.kind == Kind::OneEnded && idx == self.k {
            return self.eps[idx];
        }
        self.necks[idx].eps
    }
}
