use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// Coefficient of log|x| in the two-dimensional Green function of Δ.
pub const LOG_COEFF: f64 = 1.0 / (2.0 * PI);

/// Axisymmetric solution of (Δ_{S²} + 2)G = ε⁺δ₊ + ε⁻δ₋ + A J on the unit
/// sphere, normalized by ⟨G, J⟩ = 0. δ₊ sits at x = cos θ = 1 (the +t pole).
///
/// In closed form, with x = cos θ,
/// G = a x + (ε⁺+ε⁻)/4π + (ε⁺ x log(1−x) − ε⁻ x log(1+x))/4π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereGreen {
    pub eps_plus: f64,
    pub eps_minus: f64,
    /// Coefficient of P₁(x) = x.
    pub a: f64,
    /// Solvability multiplier of J.
    pub big_a: f64,
}

pub fn solve_green(eps_plus: f64, eps_minus: f64) -> Result<SphereGreen> {
    if !(eps_plus >= 0.0 && eps_minus >= 0.0) || !eps_plus.is_finite() || !eps_minus.is_finite() {
        return Err(Error::InvalidInput(format!("source strengths must be finite and non-negative: ({eps_plus}, {eps_minus})")));
    }
    let l2 = 2.0 / 3.0 * LN_2 - 8.0 / 9.0;
    Ok(SphereGreen {
        eps_plus,
        eps_minus,
        a: -3.0 / (8.0 * PI) * (eps_plus - eps_minus) * l2,
        big_a: super::J_NORM * (eps_minus - eps_plus),
    })
}

impl SphereGreen {
    /// G, dG/dx, d²G/dx² at x = cos θ ∈ (−1, 1).
    pub fn eval_x(&self, x: f64) -> (f64, f64, f64) {
        let (p, m) = (self.eps_plus, self.eps_minus);
        let k = 1.0 / (4.0 * PI);
        let (mut g, mut g1, mut g2) = (self.a * x + (p + m) * k, self.a, 0.0);
        // A side with zero strength contributes nothing, even at its own pole.
        if p != 0.0 {
            let (lp, q) = ((1.0 - x).ln(), 1.0 - x);
            g += k * p * x * lp;
            g1 += k * p * (lp - x / q);
            g2 += k * p * (-1.0 / q - 1.0 / (q * q));
        }
        if m != 0.0 {
            let (lm, q) = ((1.0 + x).ln(), 1.0 + x);
            g -= k * m * x * lm;
            g1 -= k * m * (lm + x / q);
            g2 -= k * m * (1.0 / q + 1.0 / (q * q));
        }
        (g, g1, g2)
    }

    /// G and its first two θ-derivatives.
    pub fn eval_theta(&self, theta: f64) -> (f64, f64, f64) {
        let (x, dx, ddx) = (theta.cos(), -theta.sin(), -theta.cos());
        let (g, g1, g2) = self.eval_x(x);
        (g, g1 * dx, g2 * dx * dx + g1 * ddx)
    }

    /// Representation G = a P₁ + b Q₁ + A j u_p, with u_p = −(x/6) log(1 − x²).
    pub fn legendre_coefficients(&self) -> (f64, f64, f64) {
        (self.a, -(self.eps_plus + self.eps_minus) / (4.0 * PI), self.big_a * super::J_NORM)
    }

    /// Near-pole constants (c⁺, C⁺, c⁻, C⁻) in G = ε^±(c^± + C^± log‖x‖) + O(‖x‖²),
    /// with ‖x‖ = sin θ; read off from the exact logarithmic form, undefined
    /// (NaN) on a side with zero strength.
    pub fn expansion_constants(&self) -> (f64, f64, f64, f64) {
        let base = (self.eps_plus + self.eps_minus) * (1.0 - LN_2) / (4.0 * PI);
        let cp = if self.eps_plus > 0.0 { (self.a + base) / self.eps_plus } else { f64::NAN };
        let cm = if self.eps_minus > 0.0 { (-self.a + base) / self.eps_minus } else { f64::NAN };
        (cp, LOG_COEFF, cm, LOG_COEFF)
    }

    /// Residual of the solvability condition ε⁺J(+) + ε⁻J(−) + A⟨J, J⟩.
    pub fn solvability_residual(&self) -> f64 {
        super::J_NORM * (self.eps_plus - self.eps_minus) + self.big_a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sources_give_zero() {
        let g = solve_green(0.0, 0.0).unwrap();
        assert_eq!(g.eval_x(0.3).0, 0.0);
        assert_eq!(g.big_a, 0.0);
    }

    #[test]
    fn symmetric_sources_have_no_multiplier() {
        let g = solve_green(0.01, 0.01).unwrap();
        assert!(g.big_a.abs() < 1e-12 && g.solvability_residual().abs() < 1e-12);
        let (cp, cpp, cm, cmm) = g.expansion_constants();
        assert!((cp - cm).abs() < 1e-14 && cpp == cmm);
    }

    #[test]
    fn ode_residual_vanishes_away_from_poles() {
        let g = solve_green(0.7, 0.2).unwrap();
        for &x in &[-0.9, -0.3, 0.0, 0.5, 0.95] {
            let (v, d1, d2) = g.eval_x(x);
            let lhs = (1.0 - x * x) * d2 - 2.0 * x * d1 + 2.0 * v;
            assert!((lhs - g.big_a * crate::blocks::J_NORM * x).abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_and_linearity() {
        let (g, h) = (solve_green(0.3, 0.1).unwrap(), solve_green(0.1, 0.3).unwrap());
        for &th in &[0.2, 1.0, 2.2] {
            assert!((g.eval_theta(th).0 - h.eval_theta(PI - th).0).abs() < 1e-10);
        }
        let s = solve_green(0.4, 0.4).unwrap();
        assert!((g.eval_x(0.37).0 + h.eval_x(0.37).0 - s.eval_x(0.37).0).abs() < 1e-10);
    }

    #[test]
    fn log_constant_is_strength_independent() {
        for &e in &[1e-3, 1e-4] {
            let g = solve_green(e, 0.5 * e).unwrap();
            let (cp, big_c, _, _) = g.expansion_constants();
            let s: f64 = 1e-5;
            let th = s.asin();
            assert!((g.eval_theta(th).0 - e * (cp + big_c * s.ln())).abs() < 10.0 * e * s * s.ln().abs());
        }
    }

    #[test]
    fn negative_strength_rejected() {
        assert!(solve_green(-1.0, 0.0).is_err());
    }
}
