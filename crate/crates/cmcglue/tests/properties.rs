//! Structural invariants over random inputs.

use cmcglue::assembly::{cutoff_with_derivatives, invert_lambda, lambda_map};
use cmcglue::balance::BalanceConstants;
use cmcglue::blocks::{solve_green, DelaunayEnd, J_NORM};
use cmcglue::norms::weighted_sup;
use proptest::prelude::*;
use std::f64::consts::{LN_2, PI};

fn constants(c1: f64, c1_prime: f64) -> BalanceConstants {
    BalanceConstants { c0: 1.0, c1, c1_prime, c2: 0.2, c1_exponent: 1.0, c1_fit_residual: 0.0, c2_spread: 0.0, c0_spread: 0.0 }
}

proptest! {
    #[test]
    fn green_is_linear_in_the_sources(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, d in 0.0f64..1.0, x in -0.99f64..0.99) {
        let (g, h, s) = (solve_green(a, b).unwrap(), solve_green(c, d).unwrap(), solve_green(a + c, b + d).unwrap());
        let (gv, hv, sv) = (g.eval_x(x), h.eval_x(x), s.eval_x(x));
        prop_assert!((gv.0 + hv.0 - sv.0).abs() <= 1e-12 * (1.0 + sv.0.abs()));
        prop_assert!((gv.1 + hv.1 - sv.1).abs() <= 1e-10 * (1.0 + sv.1.abs()));
        prop_assert!((g.big_a + h.big_a - s.big_a).abs() <= 1e-14);
    }

    #[test]
    fn swapping_sources_reflects_the_green_function(a in 0.0f64..1.0, b in 0.0f64..1.0, x in -0.99f64..0.99) {
        let (g, h) = (solve_green(a, b).unwrap(), solve_green(b, a).unwrap());
        prop_assert!((g.eval_x(x).0 - h.eval_x(-x).0).abs() <= 1e-12);
        prop_assert!((g.eval_x(x).1 + h.eval_x(-x).1).abs() <= 1e-10 * (1.0 + g.eval_x(x).1.abs()));
        prop_assert!(g.solvability_residual().abs() <= 1e-15);
        prop_assert!((g.big_a - J_NORM * (b - a)).abs() <= 1e-15);
    }

    #[test]
    fn lambda_round_trips(r in 1e-3f64..0.1, le in -18.0f64..-3.0, m in -2.0f64..2.0) {
        let eps = le.exp();
        let back = invert_lambda(r, lambda_map(r, eps, m).unwrap(), m).unwrap();
        prop_assert!((back / eps - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn lambda_is_increasing(r in 1e-3f64..0.1, le in -18.0f64..-3.0) {
        let m = 2.0 * (1.0 - LN_2);
        let (e1, e2) = (le.exp(), (le + 0.01).exp());
        prop_assert!(lambda_map(r, e2, m).unwrap() > lambda_map(r, e1, m).unwrap());
    }

    #[test]
    fn cutoff_is_monotone_between_zero_and_one(x in 0.0f64..1.5, h in 1e-6f64..0.1) {
        let (a, b) = (cutoff_with_derivatives(x), cutoff_with_derivatives(x + h));
        prop_assert!((0.0..=1.0).contains(&a.0));
        prop_assert!(b.0 <= a.0);
        prop_assert!(a.1 <= 0.0);
    }

    #[test]
    fn q_inverse_inverts_q(c1 in -7.0f64..-0.5, c1_prime in -3.0f64..3.0, le in -16.0f64..-5.0) {
        let c = constants(c1, c1_prime);
        let eps = le.exp();
        let back = c.q_inverse(c.q(eps)).unwrap();
        prop_assert!((back / eps - 1.0).abs() <= 1e-10);
        prop_assert!(c.q_inverse(-c.q(eps)).is_none());
    }

    #[test]
    fn weighted_sup_bounds_each_sample(field in prop::collection::vec(-1.0f64..1.0, 1..20), scale in 0.1f64..10.0, nu in 0.0f64..3.0) {
        let zeta: Vec<f64> = (0..field.len()).map(|i| 0.01 + 0.05 * i as f64).collect();
        let w = weighted_sup(&field, &zeta, nu, None).unwrap();
        for (f, z) in field.iter().zip(&zeta) {
            prop_assert!(w >= z.powf(-nu) * f.abs());
        }
        let scaled: Vec<f64> = field.iter().map(|f| -scale * f).collect();
        prop_assert!((weighted_sup(&scaled, &zeta, nu, None).unwrap() - scale * w).abs() <= 1e-12 * (1.0 + scale * w));
        // With ζ ≤ 1 a larger exponent can only increase the norm.
        prop_assert!(weighted_sup(&field, &zeta, nu + 0.5, None).unwrap() >= w);
    }

    #[test]
    fn delaunay_orbits_conserve_and_repeat(eps in 1e-3f64..0.45, psi in -10.0f64..10.0) {
        let d = DelaunayEnd::from_neck(eps).unwrap();
        prop_assert!((d.first_integral(psi) - d.kappa()).abs() <= 1e-8);
        prop_assert!((d.x_of_psi(psi + 2.0 * PI) - d.x_of_psi(psi) - d.period).abs() <= 1e-10);
        prop_assert!((d.x_of_psi(-psi) + d.x_of_psi(psi)).abs() <= 1e-10);
        let rho = d.point(psi).rho;
        prop_assert!(rho >= eps - 1e-15 && rho <= 1.0 - eps + 1e-15);
    }
}
