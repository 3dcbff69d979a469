//! The analytic blocks against the Legendre series and shooting oracles.

mod oracles;

use cmcglue::blocks::{delaunay_solve, solve_green, DelaunayEnd};
use oracles::blocks::{projected_coefficients, shoot, spectral_c_plus, spectral_coefficient};
use std::f64::consts::PI;

#[test]
fn green_matches_spectral_series() {
    for &(ep, em) in &[(1.0, 0.0), (0.0, 1.0), (0.6, 0.25)] {
        let g = solve_green(ep, em).unwrap();
        let c = projected_coefficients(&g, 200);
        for (l, cl) in c.iter().enumerate() {
            let want = spectral_coefficient(l, ep, em);
            assert!((cl - want).abs() <= 1e-6, "l = {l}: {cl} vs {want} for ({ep}, {em})");
        }
    }
}

#[test]
fn expansion_constant_matches_spectral_oracle() {
    let g = solve_green(1.0, 0.0).unwrap();
    let (cp, big_c, _, _) = g.expansion_constants();
    let oracle = spectral_c_plus();
    assert!((cp - oracle).abs() <= 1e-6, "{cp} vs {oracle}");
    assert!((big_c - 1.0 / (2.0 * PI)).abs() < 1e-15);
    // The mirrored block gives the same constant on the other pole.
    let (_, _, cm, _) = solve_green(0.0, 1.0).unwrap().expansion_constants();
    assert!((cm - oracle).abs() <= 1e-6);
}

#[test]
fn delaunay_period_matches_shooting() {
    for &eps in &[0.05, 0.2] {
        let d = DelaunayEnd::from_neck(eps).unwrap();
        let (period, drift) = shoot(eps);
        assert!((d.period - period).abs() < 1e-6, "eps {eps}: {} vs shooting {period}", d.period);
        assert!(drift < 1e-8, "first integral drift {drift}");
        assert!((d.kappa() - (eps - eps * eps)).abs() < 1e-16);
    }
}

#[test]
fn delaunay_branch_bounds() {
    assert!(delaunay_solve(1.99).is_err());
    let d = delaunay_solve(2.0 + 1e-3).unwrap();
    assert!(d.eps > 0.0 && d.eps < 1e-3);
    // Unit sphere limit: the first integral vanishes.
    let s = DelaunayEnd::from_neck(1e-14).unwrap();
    assert!(s.first_integral(1.0).abs() < 1e-12);
}
