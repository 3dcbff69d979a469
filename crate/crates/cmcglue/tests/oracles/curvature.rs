//! Curvature oracle: metric sampled on a coordinate grid, then Christoffel
//! symbols, Riemann tensor and its covariant derivative by nested
//! fourth-order central differences. Uses only A(t) values.

use cmcglue::ambient::{curvature_frame_data, scalar_curvature, MetricProfile};

pub type T4 = [[[[f64; 3]; 3]; 3]; 3];
const H: f64 = 5e-3;

fn metric(p: &MetricProfile, x: [f64; 3]) -> [[f64; 3]; 3] {
    let a = p.a(x[0]);
    [[1.0, 0.0, 0.0], [0.0, a, 0.0], [0.0, 0.0, a]]
}

fn d4<F: Fn([f64; 3]) -> f64>(f: &F, x: [f64; 3], k: usize) -> f64 {
    let at = |s: f64| {
        let mut y = x;
        y[k] += s;
        f(y)
    };
    (at(-2.0 * H) - 8.0 * at(-H) + 8.0 * at(H) - at(2.0 * H)) / (12.0 * H)
}

fn inv3(g: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let m = nalgebra::Matrix3::from_fn(|i, j| g[i][j]).try_inverse().unwrap();
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Γ^a_{bc}
pub fn christoffel(p: &MetricProfile, x: [f64; 3]) -> [[[f64; 3]; 3]; 3] {
    let gi = inv3(&metric(p, x));
    let dg: [[[f64; 3]; 3]; 3] =
        std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| d4(&|y| metric(p, y)[i][j], x, k))));
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| (0..3).map(|d| 0.5 * gi[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c])).sum())
        })
    })
}

/// R_{abcd} = g(∂_a, R(∂_c, ∂_d)∂_b), sectional curvature R_{abab}.
pub fn riemann(p: &MetricProfile, x: [f64; 3]) -> T4 {
    let gam = christoffel(p, x);
    let dgam: [[[[f64; 3]; 3]; 3]; 3] = std::array::from_fn(|k| {
        std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| d4(&|y| christoffel(p, y)[a][b][c], x, k))))
    });
    let g = metric(p, x);
    let mut up = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let mut v = dgam[c][a][d][b] - dgam[d][a][c][b];
                    for e in 0..3 {
                        v += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
                    }
                    up[a][b][c][d] = v;
                }
            }
        }
    }
    std::array::from_fn(|a| {
        std::array::from_fn(|b| std::array::from_fn(|c| std::array::from_fn(|d| (0..3).map(|m| g[a][m] * up[m][b][c][d]).sum())))
    })
}

pub fn covariant_riemann(p: &MetricProfile, x: [f64; 3]) -> [T4; 3] {
    let r = riemann(p, x);
    let gam = christoffel(p, x);
    let mut out = [[[[[0.0; 3]; 3]; 3]; 3]; 3];
    for e in 0..3 {
        let shifted: Vec<T4> = [-2.0, -1.0, 1.0, 2.0]
            .iter()
            .map(|s| {
                let mut y = x;
                y[e] += s * H;
                riemann(p, y)
            })
            .collect();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let mut v = (shifted[0][a][b][c][d] - 8.0 * shifted[1][a][b][c][d] + 8.0 * shifted[2][a][b][c][d]
                            - shifted[3][a][b][c][d])
                            / (12.0 * H);
                        for m in 0..3 {
                            v -= gam[m][e][a] * r[m][b][c][d]
                                + gam[m][e][b] * r[a][m][c][d]
                                + gam[m][e][c] * r[a][b][m][d]
                                + gam[m][e][d] * r[a][b][c][m];
                        }
                        out[e][a][b][c][d] = v;
                    }
                }
            }
        }
    }
    out
}

pub fn to_frame(r: &T4, s: [f64; 3]) -> T4 {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| std::array::from_fn(|c| std::array::from_fn(|d| r[a][b][c][d] * s[a] * s[b] * s[c] * s[d])))
    })
}

pub fn max_abs(r: &T4) -> f64 {
    r.iter().flatten().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Largest componentwise difference, relative to the oracle's largest entry
/// (floored at 1e−3 so that flat tensors compare absolutely).
fn relative_gap(a: &T4, b: &T4) -> f64 {
    let scale = max_abs(b).max(1e-3);
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    worst = worst.max((a[i][j][k][l] - b[i][j][k][l]).abs() / scale);
                }
            }
        }
    }
    worst
}

/// Orthonormal-frame scalar curvature R_{abab} summed over a, b.
pub fn oracle_scalar(p: &MetricProfile, t: f64) -> f64 {
    let s = 1.0 / p.a(t).sqrt();
    let r = to_frame(&riemann(p, [t, 0.0, 0.0]), [1.0, s, s]);
    (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| r[a][b][a][b]).sum()
}

/// Worst relative disagreements with the library over a uniform grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct GridErrors {
    pub riemann: f64,
    pub scalar: f64,
    pub d_riemann: f64,
    /// Where the largest of the three occurred.
    pub worst_t: f64,
}

impl GridErrors {
    pub fn max(&self) -> f64 {
        self.riemann.max(self.scalar).max(self.d_riemann)
    }
}

pub fn grid_errors(p: &MetricProfile, lo: f64, hi: f64, n: usize) -> GridErrors {
    let mut out = GridErrors::default();
    for i in 0..n {
        let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let before = out.max();
        let x = [t, 0.0, 0.0];
        let s = 1.0 / p.a(t).sqrt();
        let scale = [1.0, s, s];
        let oracle_r = to_frame(&riemann(p, x), scale);
        let d = curvature_frame_data(p, t).unwrap();
        out.riemann = out.riemann.max(relative_gap(&d.riemann, &oracle_r));
        let oracle_s: f64 = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| oracle_r[a][b][a][b]).sum();
        let s_impl = scalar_curvature(p, t).unwrap();
        out.scalar = out.scalar.max((s_impl - oracle_s).abs() / oracle_s.abs().max(1e-3));
        let dr = covariant_riemann(p, x);
        for (e, dre) in dr.iter().enumerate() {
            let framed = to_frame(dre, scale);
            let oracle_dr: T4 = std::array::from_fn(|a| {
                std::array::from_fn(|b| std::array::from_fn(|c| std::array::from_fn(|f| framed[a][b][c][f] * scale[e])))
            });
            out.d_riemann = out.d_riemann.max(relative_gap(&d.d_riemann[e], &oracle_dr));
        }
        if out.max() > before {
            out.worst_t = t;
        }
    }
    out
}
