//! Smooth monotone cutoff χ: 1 on [0, 1/2], 0 on [1, ∞), built from e^{−1/x}.

/// χ(x) together with χ'(x) and χ''(x).
pub fn cutoff_with_derivatives(x: f64) -> (f64, f64, f64) {
    if x <= 0.5 {
        return (1.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let (a, b) = (1.0 - x, x - 0.5);
    // χ = 1 / (1 + e^q) with q = 1/a − 1/b.
    let q = 1.0 / a - 1.0 / b;
    let q1 = 1.0 / (a * a) + 1.0 / (b * b);
    let q2 = 2.0 / a.powi(3) - 2.0 / b.powi(3);
    let chi = if q > 0.0 { (-q).exp() / (1.0 + (-q).exp()) } else { 1.0 / (1.0 + q.exp()) };
    let c1 = -chi * (1.0 - chi) * q1;
    let c2 = -c1 * (1.0 - 2.0 * chi) * q1 - chi * (1.0 - chi) * q2;
    (chi, c1, c2)
}

/// χ(‖x‖ / ε^{3/4}).
pub fn cutoff(x: f64, eps: f64) -> f64 {
    cutoff_with_derivatives(x / eps.powf(0.75)).0
}

/// Bounds on |χ'| and |χ''| over [1/2, 1], sampled on a fine grid.
pub fn derivative_bounds() -> (f64, f64) {
    (0..=20000).fold((0.0f64, 0.0f64), |(m1, m2), i| {
        let (_, d1, d2) = cutoff_with_derivatives(0.5 + 0.5 * i as f64 / 20000.0);
        (m1.max(d1.abs()), m2.max(d2.abs()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_values_and_monotonicity() {
        assert_eq!(cutoff_with_derivatives(0.3).0, 1.0);
        assert_eq!(cutoff_with_derivatives(1.1).0, 0.0);
        let mut last = 1.0;
        for i in 0..1000 {
            let v = cutoff_with_derivatives(0.4 + 0.7 * i as f64 / 999.0).0;
            assert!(v <= last && (0.0..=1.0).contains(&v));
            last = v;
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-6;
        for &x in &[0.55, 0.7, 0.93] {
            let (_, d1, d2) = cutoff_with_derivatives(x);
            let fd1 = (cutoff_with_derivatives(x + h).0 - cutoff_with_derivatives(x - h).0) / (2.0 * h);
            let fd2 = (cutoff_with_derivatives(x + h).1 - cutoff_with_derivatives(x - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-6 && (d2 - fd2).abs() < 1e-4 * (1.0 + d2.abs()));
        }
        let (b1, b2) = derivative_bounds();
        assert!(b1 > 2.0 && b2.is_finite());
    }
}
