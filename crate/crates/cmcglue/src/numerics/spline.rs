//! Cubic not-a-knot splines and quintic Hermite interpolation.

use crate::error::{Error, Result};

/// Interpolating cubic spline with not-a-knot end conditions.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() || n < 2 {
            return Err(Error::InvalidInput("spline needs at least two matching samples".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("spline abscissae must be strictly increasing".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let m = match n {
            2 => vec![d[0], d[0]],
            3 => {
                // Single parabola through the three points.
                let c = (d[1] - d[0]) / (h[0] + h[1]);
                vec![d[0] - c * h[0], d[0] + c * h[0], d[1] + c * h[1]]
            }
            _ => {
                let (mut a, mut b, mut c, mut r) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
                b[0] = h[1];
                c[0] = h[0] + h[1];
                r[0] = ((h[0] + 2.0 * c[0]) * h[1] * d[0] + h[0] * h[0] * d[1]) / c[0];
                for i in 1..n - 1 {
                    a[i] = h[i];
                    b[i] = 2.0 * (h[i - 1] + h[i]);
                    c[i] = h[i - 1];
                    r[i] = 3.0 * (h[i] * d[i - 1] + h[i - 1] * d[i]);
                }
                let (hl, hp) = (h[n - 2], h[n - 3]);
                a[n - 1] = hl + hp;
                b[n - 1] = hp;
                r[n - 1] = (hl * hl * d[n - 3] + (2.0 * a[n - 1] + hl) * hp * d[n - 2]) / a[n - 1];
                solve_tridiagonal(&a, &b, &c, &r)
            }
        };
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m })
    }

    /// Value, first and second derivative at the i-th knot.
    pub fn knot_derivatives(&self, i: usize) -> (f64, f64, f64) {
        let n = self.x.len();
        let (j, right) = if i + 1 < n { (i, false) } else { (i - 1, true) };
        let h = self.x[j + 1] - self.x[j];
        let d = (self.y[j + 1] - self.y[j]) / h;
        let s = if right {
            (-6.0 * d + 2.0 * self.m[j] + 4.0 * self.m[j + 1]) / h
        } else {
            (6.0 * d - 4.0 * self.m[j] - 2.0 * self.m[j + 1]) / h
        };
        (self.y[i], self.m[i], s)
    }

    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let j = locate(&self.x, x);
        let h = self.x[j + 1] - self.x[j];
        let t = (x - self.x[j]) / h;
        let (y0, y1, m0, m1) = (self.y[j], self.y[j + 1], self.m[j] * h, self.m[j + 1] * h);
        let h00 = 2.0 * t.powi(3) - 3.0 * t * t + 1.0;
        let h10 = t.powi(3) - 2.0 * t * t + t;
        let h01 = -2.0 * t.powi(3) + 3.0 * t * t;
        let h11 = t.powi(3) - t * t;
        let v = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let dv = (6.0 * t * t - 6.0 * t) * y0 + (3.0 * t * t - 4.0 * t + 1.0) * m0
            + (-6.0 * t * t + 6.0 * t) * y1
            + (3.0 * t * t - 2.0 * t) * m1;
        let ddv = (12.0 * t - 6.0) * y0 + (6.0 * t - 4.0) * m0 + (-12.0 * t + 6.0) * y1 + (6.0 * t - 2.0) * m1;
        (v, dv / h, ddv / (h * h))
    }
}

// Row 0 holds (m0, m1) and the last row (m_{n-2}, m_{n-1}), so the
// not-a-knot system stays tridiagonal and Thomas elimination applies.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], r: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = sup[0] / diag[0];
    dp[0] = r[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - sub[i] * cp[i - 1];
        cp[i] = if i + 1 < n { sup[i] / den } else { 0.0 };
        dp[i] = (r[i] - sub[i] * dp[i - 1]) / den;
    }
    let mut m = vec![0.0; n];
    m[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = dp[i] - cp[i] * m[i + 1];
    }
    m
}

/// Index j with x[j] <= v < x[j+1], clamped to the table.
pub fn locate(x: &[f64], v: f64) -> usize {
    let n = x.len();
    if v <= x[0] {
        return 0;
    }
    if v >= x[n - 1] {
        return n - 2;
    }
    match x.binary_search_by(|p| p.total_cmp(&v)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i - 1,
    }
}

/// Quintic Hermite interpolant on [x0, x1] from values, slopes and curvatures.
pub fn quintic_hermite(x0: f64, x1: f64, a: (f64, f64, f64), b: (f64, f64, f64), x: f64) -> (f64, f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let dy = b.0 - a.0;
    let (d0, d1, s0, s1) = (h * a.1, h * b.1, h * h * a.2, h * h * b.2);
    let c = [
        a.0,
        d0,
        0.5 * s0,
        10.0 * dy - 6.0 * d0 - 4.0 * d1 - 1.5 * s0 + 0.5 * s1,
        -15.0 * dy + 8.0 * d0 + 7.0 * d1 + 1.5 * s0 - s1,
        6.0 * dy - 3.0 * d0 - 3.0 * d1 - 0.5 * s0 + 0.5 * s1,
    ];
    let v = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
    let dv = c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
    let ddv = 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
    (v, dv / h, ddv / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn not_a_knot_reproduces_cubics() {
        let x: Vec<f64> = (0..9).map(|i| (i as f64 * 0.37).powf(1.3)).collect();
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.3 * x.powi(3);
        let y: Vec<f64> = x.iter().map(|&v| f(v)).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for i in 0..x.len() {
            let (_, d, dd) = s.knot_derivatives(i);
            let xi = x[i];
            assert!((d - (-2.0 + xi - 0.9 * xi * xi)).abs() < 1e-11, "slope at {i}");
            assert!((dd - (1.0 - 1.8 * xi)).abs() < 1e-10, "curvature at {i}");
        }
        let (v, _, _) = s.eval(1.234);
        assert!((v - f(1.234)).abs() < 1e-12);
    }

    #[test]
    fn quintic_hermite_reproduces_quintics() {
        let f = |x: f64| (x.powi(5) - x * x + 3.0, 5.0 * x.powi(4) - 2.0 * x, 20.0 * x.powi(3) - 2.0);
        let (v, d, dd) = quintic_hermite(0.3, 1.1, f(0.3), f(1.1), 0.71);
        let e = f(0.71);
        assert!((v - e.0).abs() < 1e-13 && (d - e.1).abs() < 1e-12 && (dd - e.2).abs() < 1e-11);
    }
}
