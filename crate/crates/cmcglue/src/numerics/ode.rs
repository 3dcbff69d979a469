//! Fixed-step classical Runge–Kutta.

/// Integrates y' = f(x, y) from x0 to x1 in `steps` RK4 steps.
pub fn rk4<const N: usize, F>(mut f: F, x0: f64, x1: f64, y0: [f64; N], steps: usize) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let h = (x1 - x0) / steps as f64;
    let mut y = y0;
    let mut x = x0;
    let add = |y: &[f64; N], k: &[f64; N], s: f64| {
        let mut o = *y;
        for i in 0..N {
            o[i] += s * k[i];
        }
        o
    };
    for _ in 0..steps {
        let k1 = f(x, &y);
        let k2 = f(x + 0.5 * h, &add(&y, &k1, 0.5 * h));
        let k3 = f(x + 0.5 * h, &add(&y, &k2, 0.5 * h));
        let k4 = f(x + h, &add(&y, &k3, h));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        x += h;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_quarter_period() {
        let y = rk4(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, std::f64::consts::FRAC_PI_2, [1.0, 0.0], 200);
        assert!(y[0].abs() < 1e-9 && (y[1] + 1.0).abs() < 1e-9);
    }
}
