use super::profile::{MetricProfile, WarpDerivs};
use crate::error::Result;

pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];

/// Curvature of g at γ(t) in the frame e0 = ∂t, e_i = ∂_i / √A.
///
/// Convention: R_{abab} is the sectional curvature of span(e_a, e_b), so the
/// Ricci tensor Ric_{bd} = Σ_a R_{abad} is positive on round spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    pub t: f64,
    pub scalar: f64,
    pub scalar_dot: f64,
    pub riemann: Tensor4,
    /// `d_riemann[e]` is ∇_{e_e} R.
    pub d_riemann: [Tensor4; 3],
    pub ricci: [[f64; 3]; 3],
    /// `d_ricci[e]` is ∇_{e_e} Ric.
    pub d_ricci: [[[f64; 3]; 3]; 3],
}

struct Sectional {
    k_ax: f64,
    k_tr: f64,
    dk_ax: f64,
    dk_tr: f64,
    lambda: f64,
}

fn sectional(d: &WarpDerivs) -> Sectional {
    let [a, a1, a2, a3, _] = d.0;
    Sectional {
        k_ax: -a2 / (2.0 * a) + a1 * a1 / (4.0 * a * a),
        k_tr: -a1 * a1 / (4.0 * a * a),
        dk_ax: -a3 / (2.0 * a) + a1 * a2 / (a * a) - a1.powi(3) / (2.0 * a.powi(3)),
        dk_tr: -a1 * a2 / (2.0 * a * a) + a1.powi(3) / (2.0 * a.powi(3)),
        lambda: a1 / (2.0 * a),
    }
}

/// S(t) = (−2AÄ + Ȧ²/2) / A².
pub fn scalar_curvature(p: &MetricProfile, t: f64) -> Result<f64> {
    let [a, a1, a2, _, _] = p.derivs(t)?.0;
    Ok((-2.0 * a * a2 + 0.5 * a1 * a1) / (a * a))
}

pub fn scalar_curvature_gradient(p: &MetricProfile, t: f64) -> Result<f64> {
    let [a, a1, a2, a3, _] = p.derivs(t)?.0;
    Ok(-2.0 * a3 / a + 3.0 * a1 * a2 / (a * a) - a1.powi(3) / a.powi(3))
}

pub fn scalar_curvature_hessian(p: &MetricProfile, t: f64) -> Result<f64> {
    let [a, a1, a2, a3, a4] = p.derivs(t)?.0;
    Ok(-2.0 * a4 / a + 5.0 * a1 * a3 / (a * a) + 3.0 * a2 * a2 / (a * a) - 9.0 * a1 * a1 * a2 / a.powi(3)
        + 3.0 * a1.powi(4) / a.powi(4))
}

fn diagonal_tensor(k: &[[f64; 3]; 3]) -> Tensor4 {
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                r[a][b][a][b] = k[a][b];
                r[a][b][b][a] = -k[a][b];
            }
        }
    }
    r
}

pub fn curvature_frame_data(p: &MetricProfile, t: f64) -> Result<CurvatureData> {
    let d = p.derivs(t)?;
    let s = sectional(&d);
    let k = [[0.0, s.k_ax, s.k_ax], [s.k_ax, 0.0, s.k_tr], [s.k_ax, s.k_tr, 0.0]];
    let dk = [[0.0, s.dk_ax, s.dk_ax], [s.dk_ax, 0.0, s.dk_tr], [s.dk_ax, s.dk_tr, 0.0]];
    let riemann = diagonal_tensor(&k);
    let mut d_riemann = [diagonal_tensor(&dk), [[[[0.0; 3]; 3]; 3]; 3], [[[[0.0; 3]; 3]; 3]; 3]];
    // Components depend on t only, so transverse derivatives come purely from
    // the connection: ∇_{e_i} e_0 = λ e_i and ∇_{e_i} e_j = −λ δ_ij e_0.
    for i in 1..3 {
        let mut w = [[0.0; 3]; 3];
        w[0][i] = s.lambda;
        w[i][0] = -s.lambda;
        let out = &mut d_riemann[i];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for e in 0..3 {
                        let mut v = 0.0;
                        for m in 0..3 {
                            v -= w[a][m] * riemann[m][b][c][e]
                                + w[b][m] * riemann[a][m][c][e]
                                + w[c][m] * riemann[a][b][m][e]
                                + w[e][m] * riemann[a][b][c][m];
                        }
                        out[a][b][c][e] = v;
                    }
                }
            }
        }
    }
    let contract = |r: &Tensor4| {
        let mut ric = [[0.0; 3]; 3];
        for b in 0..3 {
            for e in 0..3 {
                ric[b][e] = (0..3).map(|a| r[a][b][a][e]).sum();
            }
        }
        ric
    };
    let ricci = contract(&riemann);
    let d_ricci = [contract(&d_riemann[0]), contract(&d_riemann[1]), contract(&d_riemann[2])];
    Ok(CurvatureData {
        t,
        scalar: scalar_curvature(p, t)?,
        scalar_dot: scalar_curvature_gradient(p, t)?,
        riemann,
        d_riemann,
        ricci,
        d_ricci,
    })
}

impl CurvatureData {
    /// R(x, y, z, w) for frame-component vectors.
    pub fn rm(&self, x: &[f64; 3], y: &[f64; 3], z: &[f64; 3], w: &[f64; 3]) -> f64 {
        contract4(&self.riemann, x, y, z, w)
    }

    /// (∇_v R)(x, y, z, w).
    pub fn d_rm(&self, v: &[f64; 3], x: &[f64; 3], y: &[f64; 3], z: &[f64; 3], w: &[f64; 3]) -> f64 {
        (0..3).map(|e| v[e] * contract4(&self.d_riemann[e], x, y, z, w)).sum()
    }

    pub fn ric(&self, x: &[f64; 3], y: &[f64; 3]) -> f64 {
        contract2(&self.ricci, x, y)
    }

    pub fn d_ric(&self, v: &[f64; 3], x: &[f64; 3], y: &[f64; 3]) -> f64 {
        (0..3).map(|e| v[e] * contract2(&self.d_ricci[e], x, y)).sum()
    }
}

fn contract2(m: &[[f64; 3]; 3], x: &[f64; 3], y: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            s += m[a][b] * x[a] * y[b];
        }
    }
    s
}

fn contract4(r: &Tensor4, x: &[f64; 3], y: &[f64; 3], z: &[f64; 3], w: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            for c in 0..3 {
                for d in 0..3 {
                    s += r[a][b][c][d] * x[a] * y[b] * z[c] * w[d];
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_has_no_curvature() {
        let c = curvature_frame_data(&MetricProfile::flat(), 0.3).unwrap();
        assert_eq!(c.scalar, 0.0);
        assert!(c.riemann.iter().flatten().flatten().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn ricci_trace_is_scalar_curvature() {
        let p = MetricProfile::one_ended_exp();
        for &t in &[0.2, 1.0, 3.0] {
            let c = curvature_frame_data(&p, t).unwrap();
            let tr = c.ricci[0][0] + c.ricci[1][1] + c.ricci[2][2];
            assert!((tr - c.scalar).abs() < 1e-12);
            let dtr = c.d_ricci[0][0][0] + c.d_ricci[0][1][1] + c.d_ricci[0][2][2];
            assert!((dtr - c.scalar_dot).abs() < 1e-12);
        }
    }

    #[test]
    fn bump_scalar_curvature_closed_forms() {
        let beta: f64 = 0.8;
        let p = MetricProfile::even_bump(beta).unwrap();
        assert!((scalar_curvature(&p, 0.0).unwrap() - 4.0 * beta / (1.0 + beta)).abs() < 1e-14);
        let sdd = -12.0 * beta * (2.0 + beta) / (1.0 + beta).powi(2);
        assert!((scalar_curvature_hessian(&p, 0.0).unwrap() - sdd).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_centered_differences() {
        let p = MetricProfile::one_ended_exp();
        let h = 1e-4;
        for &t in &[0.5, 1.0, 2.5] {
            let fd = (scalar_curvature(&p, t + h).unwrap() - scalar_curvature(&p, t - h).unwrap()) / (2.0 * h);
            let g = scalar_curvature_gradient(&p, t).unwrap();
            assert!((fd - g).abs() < 1e-6 * g.abs());
            let fd2 = (scalar_curvature_gradient(&p, t + h).unwrap() - scalar_curvature_gradient(&p, t - h).unwrap()) / (2.0 * h);
            assert!((fd2 - scalar_curvature_hessian(&p, t).unwrap()).abs() < 1e-6 * fd2.abs());
        }
    }

    #[test]
    fn riemann_symmetries_hold() {
        let c = curvature_frame_data(&MetricProfile::even_bump(1.0).unwrap(), 0.4).unwrap();
        for r in std::iter::once(&c.riemann).chain(c.d_riemann.iter()) {
            for a in 0..3 {
                for b in 0..3 {
                    for x in 0..3 {
                        for d in 0..3 {
                            assert!((r[a][b][x][d] + r[b][a][x][d]).abs() < 1e-14);
                            assert!((r[a][b][x][d] - r[x][d][a][b]).abs() < 1e-14);
                            let bianchi = r[a][b][x][d] + r[a][x][d][b] + r[a][d][b][x];
                            assert!(bianchi.abs() < 1e-14);
                        }
                    }
                }
            }
        }
    }
}
