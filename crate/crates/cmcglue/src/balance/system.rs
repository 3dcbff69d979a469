use super::calibrate::BalanceConstants;
use super::flux::flux;
use super::projection::{projections, Projection, ProjectionOptions};
use crate::ambient::{scalar_curvature_gradient, MetricProfile};
use crate::assembly::{assemble, GluedConfiguration, Kind, SamplingOptions, REGIME_CONSTANT};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Solver settings for the leading-order balancing system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceOptions {
    /// Center of sphere 0 for the one-ended kind (the finite kind is centered at 0).
    pub origin: f64,
    /// Delaunay periods kept by the one-ended assembly.
    pub periods: usize,
    /// Carry the displacements δ as unknowns with their own rows.
    pub solve_delta: bool,
    pub max_iter: usize,
    /// Convergence when ‖residual‖∞ ≤ tol_factor · r³.
    pub tol_factor: f64,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        Self { origin: 0.5, periods: 2, solve_delta: true, max_iter: 50, tol_factor: 1e-12 }
    }
}

/// Number of neck scales and of free displacements.
pub fn unknown_counts(kind: Kind, k: usize) -> (usize, usize) {
    match kind {
        // The outermost displacement is fixed: it only translates the cap.
        Kind::Finite => (k, k.saturating_sub(1)),
        Kind::OneEnded => (k + 1, k),
    }
}

/// Leading-order rows. ε-rows come first: for the finite kind row k − 1
/// (k = 1..K) is q(ε_k) − q(ε_{k−1}) − C₂r³Ṡ(p_k) with ε_K = 0; for the
/// one-ended kind row 0 is q(ε_0) − C₂r³Ṡ(p_0) and row k is
/// q(ε_k) − q(ε_{k−1}) − C₂r³Ṡ(p_k). Then one row C₀δ_j r ε_j^{3/2} per free δ.
pub fn leading_residual(c: &BalanceConstants, kind: Kind, r: f64, eps: &[f64], delta: &[f64], sdot: &[f64]) -> Result<Vec<f64>> {
    let k = sdot.len().checked_sub(1).ok_or_else(|| Error::InvalidInput("no spheres".into()))?;
    let (ne, nd) = unknown_counts(kind, k);
    if eps.len() != ne || delta.len() != nd {
        return Err(Error::InvalidInput(format!("expected {ne} scales and {nd} displacements, got {} and {}", eps.len(), delta.len())));
    }
    let fric = |i: usize| c.c2 * r.powi(3) * sdot[i];
    let mut out = Vec::with_capacity(ne + nd);
    match kind {
        Kind::Finite => {
            for i in 1..=k {
                let above = if i < k { c.q(eps[i]) } else { 0.0 };
                out.push(above - c.q(eps[i - 1]) - fric(i));
            }
        }
        Kind::OneEnded => {
            out.push(c.q(eps[0]) - fric(0));
            for i in 1..=k {
                out.push(c.q(eps[i]) - c.q(eps[i - 1]) - fric(i));
            }
        }
    }
    out.extend(delta.iter().zip(eps).map(|(d, e)| c.c0 * d * r * e.powf(1.5)));
    Ok(out)
}

/// Sphere centers t_k (k = 0..K) of the chain with neck scales ε.
pub fn sphere_positions(kind: Kind, r: f64, k: usize, origin: f64, eps: &[f64]) -> Result<Vec<f64>> {
    let c = GluedConfiguration::from_eps(kind, r, k, origin, eps.to_vec(), vec![0.0; eps.len()], 0)?;
    Ok(c.spheres.iter().map(|s| s.center).collect())
}

fn sdot_at(profile: &MetricProfile, t: &[f64]) -> Result<Vec<f64>> {
    t.iter().map(|&t| scalar_curvature_gradient(profile, t)).collect()
}

/// Initial neck scales from the telescoped rows with positions at σ = 0.
pub fn initial_guess(profile: &MetricProfile, c: &BalanceConstants, kind: Kind, r: f64, k: usize, origin: f64) -> Result<Vec<f64>> {
    let origin = if kind == Kind::Finite { 0.0 } else { origin };
    let p0: Vec<f64> = (0..=k).map(|i| origin + 2.0 * r * i as f64).collect();
    let s = sdot_at(profile, &p0)?;
    let r3 = c.c2 * r.powi(3);
    let targets: Vec<f64> = match kind {
        Kind::Finite => (1..=k).map(|i| -r3 * s[i..].iter().sum::<f64>()).collect(),
        Kind::OneEnded => (0..=k).map(|i| r3 * s[..=i].iter().sum::<f64>()).collect(),
    };
    targets
        .iter()
        .enumerate()
        .map(|(j, &q)| match c.q_inverse(q) {
            Some(e) if e > 0.0 => Ok(e),
            _ if q == 0.0 => Err(Error::Infeasible(format!("neck {j}: the scalar curvature has no gradient along the chain, so the balanced neck scale is zero"))),
            _ => Err(Error::Infeasible(format!("neck {j}: telescoped balance needs q(eps) = {q:e}, which no positive eps attains"))),
        })
        .collect()
}

/// One Newton iteration record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub residual: f64,
    pub step: f64,
    pub damping: f64,
}

/// Bounds check of a solved chain against the gluing regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    pub min_eps_over_r3: f64,
    pub max_eps_over_r2: f64,
    pub max_delta_over_sqrt_eps: f64,
    /// r³/C ≤ ε ≤ Cr² and |δ| < ε^{1/2} with C = REGIME_CONSTANT.
    pub within: bool,
    /// r³ < ε < r².
    pub strict: bool,
}

/// Direction in which the neck scales vary along the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    Mixed,
}

impl Monotonicity {
    fn of(v: &[f64]) -> Self {
        let up = v.windows(2).all(|w| w[1] > w[0]);
        let down = v.windows(2).all(|w| w[1] < w[0]);
        match (up, down) {
            _ if v.windows(2).all(|w| w[1] == w[0]) => Self::Constant,
            (true, _) => Self::Increasing,
            (_, true) => Self::Decreasing,
            _ => Self::Mixed,
        }
    }
}

/// Solved parameters of a balanced chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancedSolution {
    pub kind: Kind,
    pub r: f64,
    pub k: usize,
    pub origin: f64,
    pub eps: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Displacements of all necks (fixed ones are zero).
    pub delta: Vec<f64>,
    pub positions: Vec<f64>,
    pub sdot: Vec<f64>,
    pub residual: Vec<f64>,
    pub monotonicity: Monotonicity,
    pub regime: RegimeCheck,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
}

impl BalancedSolution {
    /// Configuration realizing the solution.
    pub fn configuration(&self, periods: usize) -> Result<GluedConfiguration> {
        GluedConfiguration::from_eps(self.kind, self.r, self.k, self.origin, self.eps.clone(), self.delta.clone(), periods)
    }
}

struct Evaluation {
    residual: Vec<f64>,
    positions: Vec<f64>,
    sdot: Vec<f64>,
    sigma: Vec<f64>,
}

fn evaluate(profile: &MetricProfile, c: &BalanceConstants, kind: Kind, r: f64, k: usize, origin: f64, x: &[f64], ne: usize) -> Result<Evaluation> {
    let (eps, delta) = x.split_at(ne);
    if let Some(e) = eps.iter().find(|e| **e <= 0.0) {
        return Err(Error::Infeasible(format!("neck scale {e:e} is not positive")));
    }
    let cfg = GluedConfiguration::from_eps(kind, r, k, origin, eps.to_vec(), vec![0.0; ne], 0)?;
    let positions: Vec<f64> = cfg.spheres.iter().map(|s| s.center).collect();
    let sdot = sdot_at(profile, &positions)?;
    Ok(Evaluation { residual: leading_residual(c, kind, r, eps, delta, &sdot)?, positions, sdot, sigma: cfg.sigma })
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Central-difference Jacobian of the leading residual.
fn jacobian(profile: &MetricProfile, c: &BalanceConstants, kind: Kind, r: f64, k: usize, origin: f64, x: &[f64], ne: usize) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    for i in 0..n {
        let h = if i < ne { 1e-6 * x[i] } else { 1e-6 * x[i - ne].sqrt() };
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let fp = evaluate(profile, c, kind, r, k, origin, &xp, ne)?.residual;
        let fm = evaluate(profile, c, kind, r, k, origin, &xm, ne)?.residual;
        for row in 0..n {
            jac[(row, i)] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Triangularity of the neck-scale block: the diagonal (unknown ε_j in the
/// row that introduces it) and the largest entry on the wrong side of it,
/// relative to the smallest diagonal entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangularDiagnostic {
    pub diagonal: Vec<f64>,
    pub off_triangle_ratio: f64,
}

fn triangular_diagnostic(jac: &DMatrix<f64>, ne: usize, kind: Kind) -> TriangularDiagnostic {
    // Finite rows are upper triangular as ordered; one-ended rows read
    // upper triangular when both rows and unknowns are taken from the end.
    let at = |i: usize, j: usize| match kind {
        Kind::Finite => jac[(i, j)],
        Kind::OneEnded => jac[(ne - 1 - i, ne - 1 - j)],
    };
    let diagonal: Vec<f64> = (0..ne).map(|i| at(i, i)).collect();
    let dmin = diagonal.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    let lower = (0..ne).flat_map(|i| (0..i).map(move |j| (i, j))).fold(0.0f64, |m, (i, j)| m.max(at(i, j).abs()));
    TriangularDiagnostic { diagonal, off_triangle_ratio: lower / dmin }
}

/// Damped Newton solve of the leading-order system from the telescoped guess.
pub fn solve_balance(profile: &MetricProfile, c: &BalanceConstants, kind: Kind, r: f64, k: usize, opts: &BalanceOptions) -> Result<(BalancedSolution, TriangularDiagnostic)> {
    if k == 0 {
        return Err(Error::InvalidInput("at least one neck is required".into()));
    }
    let origin = if kind == Kind::Finite { 0.0 } else { opts.origin };
    let (ne, nd) = unknown_counts(kind, k);
    let nd = if opts.solve_delta { nd } else { 0 };
    let mut x = initial_guess(profile, c, kind, r, k, origin)?;
    x.resize(ne + nd, 0.0);
    let tol = opts.tol_factor * r.powi(3);
    let admissible = |e: Error| match e {
        Error::InvalidConfig(m) => Error::Infeasible(m),
        other => other,
    };
    let mut ev = evaluate(profile, c, kind, r, k, origin, &x, ne).map_err(admissible)?;
    let mut trace = vec![IterationRecord { iteration: 0, residual: inf_norm(&ev.residual), step: 0.0, damping: 1.0 }];
    let mut iterations = 0;
    while inf_norm(&ev.residual) > tol {
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence(format!("balance residual {:e} after {iterations} iterations", inf_norm(&ev.residual))));
        }
        iterations += 1;
        let jac = jacobian(profile, c, kind, r, k, origin, &x, ne)?;
        let step = jac
            .lu()
            .solve(&DVector::from_column_slice(&ev.residual))
            .ok_or_else(|| Error::NonConvergence("singular balance Jacobian".into()))?;
        let f0 = inf_norm(&ev.residual);
        let mut lambda = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - lambda * s).collect();
            if let Ok(e) = evaluate(profile, c, kind, r, k, origin, &trial, ne) {
                if inf_norm(&e.residual) < f0 {
                    break Some((trial, e));
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                break None;
            }
        };
        let Some((trial, e)) = accepted else {
            if x[..ne].iter().any(|e| *e <= r.powi(3) / REGIME_CONSTANT * 1.0001) {
                return Err(Error::Infeasible("Newton iterates leave the admissible neck scales".into()));
            }
            return Err(Error::NonConvergence(format!("no descent step at residual {f0:e}")));
        };
        trace.push(IterationRecord { iteration: iterations, residual: inf_norm(&e.residual), step: inf_norm(step.as_slice()) * lambda, damping: lambda });
        x = trial;
        ev = e;
    }
    let jac = jacobian(profile, c, kind, r, k, origin, &x, ne)?;
    let diag = triangular_diagnostic(&jac, ne, kind);
    let eps = x[..ne].to_vec();
    let mut delta = vec![0.0; ne];
    delta[..nd].copy_from_slice(&x[ne..]);
    let r3 = r.powi(3);
    let max_d = delta.iter().zip(&eps).fold(0.0f64, |m, (d, e)| m.max(d.abs() / e.sqrt()));
    let lo = eps.iter().fold(f64::INFINITY, |m, e| m.min(e / r3));
    let hi = eps.iter().fold(0.0f64, |m, e| m.max(e / (r * r)));
    let regime = RegimeCheck {
        min_eps_over_r3: lo,
        max_eps_over_r2: hi,
        max_delta_over_sqrt_eps: max_d,
        within: lo >= 1.0 / REGIME_CONSTANT && hi <= REGIME_CONSTANT && max_d < 1.0,
        strict: lo > 1.0 && hi < 1.0,
    };
    let sol = BalancedSolution {
        kind,
        r,
        k,
        origin,
        monotonicity: Monotonicity::of(&eps),
        eps,
        sigma: ev.sigma,
        delta,
        positions: ev.positions,
        sdot: ev.sdot,
        residual: ev.residual,
        regime,
        iterations,
        trace,
    };
    Ok((sol, diag))
}

/// Solution together with the measured geometry of its assembled surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub constants: BalanceConstants,
    pub solution: BalancedSolution,
    pub jacobian: TriangularDiagnostic,
    /// Flux of H − 2/r through the waist of each catenoidal neck.
    pub neck_fluxes: Vec<f64>,
    pub projections: Vec<Projection>,
    /// max_k |sphere projection| / (r · max_j |q(ε_j)|): the part of the
    /// projections not removed by the leading-order system.
    pub empirical_error: f64,
}

/// Solves, assembles the balanced surface and measures its projections.
pub fn balance_report(profile: &MetricProfile, c: &BalanceConstants, kind: Kind, r: f64, k: usize, opts: &BalanceOptions, proj: &ProjectionOptions) -> Result<BalanceReport> {
    let (solution, jacobian) = solve_balance(profile, c, kind, r, k, opts)?;
    let cfg = solution.configuration(opts.periods)?;
    let surf = assemble(profile, &cfg, &SamplingOptions::default())?;
    let neck_fluxes = cfg.necks.iter().map(|n| flux(&surf.curve, n.center, profile, 2.0 / r)).collect::<Result<_>>()?;
    let projections = projections(&surf, profile, proj)?;
    let scale = r * solution.eps.iter().fold(0.0f64, |m, e| m.max(c.q(*e).abs()));
    let empirical_error = projections.iter().fold(0.0f64, |m, p| m.max(p.sphere.abs())) / scale;
    Ok(BalanceReport { constants: *c, solution, jacobian, neck_fluxes, projections, empirical_error })
}
