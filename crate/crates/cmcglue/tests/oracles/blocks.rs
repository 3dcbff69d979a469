//! Legendre series for the sphere Green function and arclength shooting for
//! Delaunay unduloids.

use cmcglue::blocks::SphereGreen;
use std::f64::consts::{LN_2, PI};

/// Legendre coefficient of G predicted by the spectral solution of (Δ + 2)G = RHS.
pub fn spectral_coefficient(l: usize, ep: f64, em: f64) -> f64 {
    if l == 1 {
        return 0.0;
    }
    let lf = l as f64;
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    (2.0 * lf + 1.0) / (4.0 * PI) * (ep + sign * em) / (2.0 - lf * (lf + 1.0))
}

/// (2l+1)/2 ∫ G P_l dx by tanh-sinh quadrature, all l ≤ lmax at once.
pub fn projected_coefficients(g: &SphereGreen, lmax: usize) -> Vec<f64> {
    let h = 1.0 / 512.0;
    let mut c = vec![0.0; lmax + 1];
    let kmax = (4.5 / h) as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let x = u.tanh();
        let w = h * 0.5 * PI * t.cosh() / u.cosh().powi(2);
        if x.abs() >= 1.0 || w < 1e-300 {
            continue;
        }
        let gx = g.eval_x(x).0;
        let (mut p0, mut p1) = (1.0, x);
        c[0] += w * gx * p0;
        if lmax >= 1 {
            c[1] += w * gx * p1;
        }
        for l in 2..=lmax {
            let p2 = ((2 * l - 1) as f64 * x * p1 - (l - 1) as f64 * p0) / l as f64;
            p0 = p1;
            p1 = p2;
            c[l] += w * gx * p1;
        }
    }
    c.iter().enumerate().map(|(l, v)| v * (2 * l + 1) as f64 / 2.0).collect()
}

/// Worst coefficient gap over l ≤ lmax.
pub fn spectral_gap(g: &SphereGreen, lmax: usize) -> f64 {
    projected_coefficients(g, lmax)
        .iter()
        .enumerate()
        .map(|(l, cl)| (cl - spectral_coefficient(l, g.eps_plus, g.eps_minus)).abs())
        .fold(0.0, f64::max)
}

/// c⁺ for (ε⁺, ε⁻) = (1, 0) from the series: subtract the Legendre series of
/// log(1 − x)/4π, sum the fast-decaying remainder at x = 1 with a tail estimate.
pub fn spectral_c_plus() -> f64 {
    let log_coeff = |l: usize| -> f64 {
        if l == 0 {
            LN_2 - 1.0
        } else {
            let lf = l as f64;
            -(2.0 * lf + 1.0) / (lf * (lf + 1.0))
        }
    };
    let lmax = 200;
    let mut r1 = 0.0;
    for l in 0..=lmax {
        r1 += spectral_coefficient(l, 1.0, 0.0) - log_coeff(l) / (4.0 * PI);
    }
    // Terms behave like −(2l+1)/(2π l²(l+1)²) ≈ −1/(π l³); integrate the tail.
    let lf = lmax as f64 + 0.5;
    r1 += -1.0 / (2.0 * PI * lf * lf);
    r1 - LN_2 / (4.0 * PI)
}

/// Arclength shooting for H = 2: (x, ρ, α)' = (cos α, sin α, cos α/ρ − 2) from
/// a neck; returns the period and the worst drift of the first integral.
pub fn shoot(eps: f64) -> (f64, f64) {
    let f = |y: [f64; 3]| [y[2].cos(), y[2].sin(), y[2].cos() / y[1] - 2.0];
    let first_integral = |y: [f64; 3]| y[1] * y[2].cos() - y[1] * y[1];
    let mut y = [0.0, eps, 0.0];
    let k0 = first_integral(y);
    let h = 2e-5;
    let mut drift: f64 = 0.0;
    let mut crossings = 0;
    loop {
        let add = |a: [f64; 3], k: [f64; 3], s: f64| [a[0] + s * k[0], a[1] + s * k[1], a[2] + s * k[2]];
        // Steps shrink near the neck where the curvature is 1/ε.
        let step = h * (y[1] / 0.05).min(1.0).max(eps * 10.0);
        let k1 = f(y);
        let k2 = f(add(y, k1, 0.5 * step));
        let k3 = f(add(y, k2, 0.5 * step));
        let k4 = f(add(y, k3, step));
        let next: [f64; 3] = std::array::from_fn(|i| y[i] + step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        drift = drift.max((first_integral(next) - k0).abs());
        if y[2].sin() * next[2].sin() < 0.0 || (next[2].sin() == 0.0 && y[2].sin() != 0.0) {
            crossings += 1;
            if crossings == 2 {
                // Linear interpolation of x at sin α = 0.
                let s = y[2].sin() / (y[2].sin() - next[2].sin());
                return (y[0] + s * (next[0] - y[0]), drift);
            }
        }
        y = next;
    }
}
