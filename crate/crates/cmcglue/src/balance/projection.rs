use crate::ambient::{log_map, MetricProfile};
use crate::assembly::{cutoff_with_derivatives, AssembledSurface, Kind, PieceKind};
use crate::blocks::J_NORM;
use crate::error::{Error, Result};
use crate::numerics::quad::{graded_breakpoints, panels};
use crate::revgeom::{ambient_forms_at, CurvePoint, Region, Side};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

/// Cutoff radii τ_i = (2 + i) r ε^{3/4} · scale.
pub fn tau(i: usize, r: f64, eps: f64, scale: f64) -> f64 {
    (2.0 + i as f64) * r * eps.powf(0.75) * scale
}

/// Cutoff scaling and quadrature refinement for the projections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProjectionOptions {
    /// Multiplies all cutoff radii τ_i.
    pub tau_scale: f64,
    /// Panel refinement factor (1 = default resolution).
    pub refine: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self { tau_scale: 1.0, refine: 1 }
    }
}

/// Projections of H − 2/r onto the approximate kernel for one sphere and the
/// neck above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub index: i32,
    /// ∫(H − 2/r) χ_ext J dVol over sphere `index`.
    pub sphere: f64,
    /// ∫(H − 2/r) χ_neck I dVol over neck `index` (None for the Delaunay neck or a cap).
    pub neck: Option<f64>,
}

fn area_element(profile: &MetricProfile, p: &CurvePoint) -> Result<f64> {
    let a = profile.derivs(p.t)?.0[0];
    Ok(2.0 * PI * a.sqrt() * p.rho * (p.dt * p.dt + a * p.drho * p.drho).sqrt())
}

/// Integrates f(point, λ)·(H − 2/r) dVol over λ ∈ [a, b] of a piece with
/// fixed graded Gauss–Legendre panels. Adaptive schemes stall on the
/// rounding noise that the cutoff's second derivative amplifies inside the
/// transition annuli; a fixed rule averages it out and is deterministic.
fn integrate<F>(surface: &AssembledSurface, profile: &MetricProfile, piece: usize, mirrored: bool, (a, b): (f64, f64), (ha, hb): (f64, f64), n: usize, refine: usize, f: F) -> Result<f64>
where
    F: Fn(&CurvePoint, f64) -> Result<f64>,
{
    if b <= a {
        return Ok(0.0);
    }
    let h0 = 2.0 / surface.config.r;
    let err = RefCell::new(None);
    let g = |lam: f64| -> f64 {
        let run = || -> Result<f64> {
            let p = surface.exact_point(profile, piece, mirrored, lam)?;
            let w = f(&p, lam)?;
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * (ambient_forms_at(profile, &p)?.mean - h0) * area_element(profile, &p)?)
        };
        run().unwrap_or_else(|e| {
            err.borrow_mut().get_or_insert(e);
            0.0
        })
    };
    let k = refine.max(1) as f64;
    let breaks = graded_breakpoints(a, b, ha / k, hb / k, n * refine.max(1));
    let v = panels(g, &breaks, 16);
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Neck chart center and scale for signed neck index j.
fn neck_data(surface: &AssembledSurface, j: i32) -> Option<(f64, f64)> {
    let c = &surface.config;
    if j < 0 {
        return (c.kind == Kind::Finite && (-j - 1) < c.k as i32).then(|| (-c.necks[(-j - 1) as usize].center, c.necks[(-j - 1) as usize].eps));
    }
    let j = j as usize;
    if j < c.k {
        Some((c.necks[j].center, c.necks[j].eps))
    } else {
        c.delaunay.as_ref().filter(|_| j == c.k).map(|d| (d.center, d.eps))
    }
}

/// Scaled radial coordinate s of a point in the chart at `center`.
fn chart_radius(profile: &MetricProfile, center: f64, r: f64, p: &CurvePoint) -> Result<f64> {
    Ok(log_map(profile, center, p.t, p.rho)?.1 / r)
}

fn piece_index(surface: &AssembledSurface, region: Region) -> Result<usize> {
    surface.pieces.iter().position(|p| p.region == region).ok_or_else(|| Error::InvalidInput(format!("no piece for {region}")))
}

/// Sphere component for sphere k ≥ 0 (the half t ≥ 0 of a finite chain is
/// stored; sphere 0 of a finite chain also integrates its mirror half).
pub fn sphere_projection(surface: &AssembledSurface, profile: &MetricProfile, k: usize, opts: &ProjectionOptions) -> Result<f64> {
    let tau_scale = opts.tau_scale;
    let r = surface.config.r;
    let idx = piece_index(surface, Region::Sphere(k as i32))?;
    let piece = &surface.pieces[idx];
    let lower = neck_data(surface, k as i32 - 1);
    let upper = neck_data(surface, k as i32);
    let weight = |mirrored: bool| {
        move |p: &CurvePoint, phi: f64| -> Result<f64> {
            // Chart J = j cos θ with θ from +∂_t; the mirror image flips it,
            // and sees the mirror image of the nearest neck.
            let j = if mirrored { J_NORM * phi.cos() } else { -J_NORM * phi.cos() };
            let near = if phi < 0.5 * PI { lower } else { upper };
            let mut chi = 1.0;
            if let Some((c, e)) = near {
                let s = chart_radius(profile, if mirrored { -c } else { c }, r, p)?;
                chi = 1.0 - cutoff_with_derivatives(r * s / tau(4, r, e, tau_scale)).0;
            }
            Ok(chi * j)
        }
    };
    // Grade toward junctions at the scale of the cap radius.
    let ha = if lower.is_some() && piece.lo > 0.0 && piece.lo < 0.5 * PI { 0.25 * piece.lo } else { 0.0 };
    let hb = if upper.is_some() && piece.hi < PI { 0.25 * (PI - piece.hi) } else { 0.0 };
    let span = (piece.lo, piece.hi);
    let mut total = integrate(surface, profile, idx, false, span, (ha, hb), 32, opts.refine, weight(false))?;
    if surface.config.kind == Kind::Finite && k == 0 {
        total += integrate(surface, profile, idx, true, span, (ha, hb), 32, opts.refine, weight(true))?;
    }
    Ok(total)
}

/// Neck component for catenoidal neck j (0 ≤ j < K).
pub fn neck_projection(surface: &AssembledSurface, profile: &MetricProfile, j: usize, opts: &ProjectionOptions) -> Result<f64> {
    let (tau_scale, refine) = (opts.tau_scale, opts.refine);
    let c = &surface.config;
    if j >= c.k {
        return Err(Error::InvalidInput(format!("neck {j} is not a catenoidal neck")));
    }
    let (r, nb) = (c.r, c.necks[j]);
    let (center, eps) = (nb.center, nb.eps);
    let t1 = tau(1, r, eps, tau_scale);
    let chi = |s: f64| cutoff_with_derivatives(r * s / t1).0;
    let ij = |sign: f64, s: f64| if s <= eps { 0.0 } else { sign * (s * s - eps * eps).sqrt() / s };
    let mut total = 0.0;
    for side in [Side::Lower, Side::Upper] {
        let idx = piece_index(surface, Region::Transition(j as i32, side))?;
        let p = &surface.pieces[idx];
        let sign = if side == Side::Upper { 1.0 } else { -1.0 };
        total += integrate(surface, profile, idx, false, (p.lo, p.hi), (0.0, 0.0), 32, refine, |_, lam| Ok(chi(lam.abs()) * ij(sign, lam.abs())))?;
    }
    let idx = piece_index(surface, Region::Neck(j as i32))?;
    let p = &surface.pieces[idx];
    let PieceKind::NeckCore { zc, .. } = p.kind else { unreachable!() };
    // I is odd about the undisplaced neck; the displacement εδ moves the
    // surface but not the kernel function.
    let zc0 = zc - eps * c.delta[j];
    total += integrate(surface, profile, idx, false, (p.lo, p.hi), (0.0, 0.0), 64, refine, |_, z| {
        let s = eps * ((z - zc) / eps).cosh();
        Ok(chi(s) * ((z - zc0) / eps).tanh())
    })?;
    // Polar caps of the two adjacent spheres out to where the cutoff vanishes.
    let reach = (1.2 * t1 / r).min(0.9).asin();
    for (k, sign) in [(j, -1.0), (j + 1, 1.0)] {
        let idx = piece_index(surface, Region::Sphere(k as i32))?;
        let p = &surface.pieces[idx];
        let (a, b, grade) = if sign > 0.0 { (p.lo, reach.max(p.lo), (0.25 * p.lo, 0.0)) } else { ((PI - reach).min(p.hi), p.hi, (0.0, 0.25 * (PI - p.hi))) };
        total += integrate(surface, profile, idx, false, (a, b), grade, 32, refine, |q, _| {
            let s = chart_radius(profile, center, r, q)?;
            Ok(chi(s) * ij(sign, s))
        })?;
    }
    Ok(total)
}

/// Projections for every sphere k ≥ 0 and the neck above it.
pub fn projections(surface: &AssembledSurface, profile: &MetricProfile, opts: &ProjectionOptions) -> Result<Vec<Projection>> {
    (0..=surface.config.k)
        .map(|k| {
            Ok(Projection {
                index: k as i32,
                sphere: sphere_projection(surface, profile, k, opts)?,
                neck: if k < surface.config.k { Some(neck_projection(surface, profile, k, opts)?) } else { None },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, GluedConfiguration, SamplingOptions};

    fn chain(p: &MetricProfile, r: f64) -> AssembledSurface {
        let e = r.powi(3);
        let c = GluedConfiguration::from_eps(Kind::Finite, r, 2, 0.0, vec![e, 1.5 * e], vec![0.0; 2], 0).unwrap();
        assemble(p, &c, &SamplingOptions::default()).unwrap()
    }

    #[test]
    fn central_sphere_projection_vanishes_by_symmetry() {
        let p = MetricProfile::even_bump(-0.5).unwrap();
        let s = chain(&p, 0.04);
        assert_eq!(sphere_projection(&s, &p, 0, &ProjectionOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn projections_converge_under_refinement() {
        let p = MetricProfile::even_bump(-0.5).unwrap();
        let s = chain(&p, 0.04);
        let a = projections(&s, &p, &ProjectionOptions::default()).unwrap();
        let b = projections(&s, &p, &ProjectionOptions { refine: 2, ..Default::default() }).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.sphere - y.sphere).abs() <= 1e-9 * x.sphere.abs().max(1e-12));
            if let (Some(u), Some(v)) = (x.neck, y.neck) {
                assert!((u - v).abs() <= 1e-6 * 0.04 * 0.04f64.powi(3).powf(1.5));
            }
        }
    }

    #[test]
    fn sphere_projection_is_insensitive_to_cutoff_radius() {
        // Beyond the cap the surface is CMC to leading order, so moving τ₄
        // changes the sphere component only at higher order.
        let p = MetricProfile::flat();
        let s = chain(&p, 0.02);
        let a = sphere_projection(&s, &p, 1, &ProjectionOptions::default()).unwrap();
        let b = sphere_projection(&s, &p, 1, &ProjectionOptions { tau_scale: 1.25, ..Default::default() }).unwrap();
        assert!(((a - b) / a).abs() < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn flat_symmetric_neck_has_no_neck_component() {
        let p = MetricProfile::flat();
        let r: f64 = 0.02;
        let e = r.powi(3);
        let c = GluedConfiguration::from_eps(Kind::Finite, r, 1, 0.0, vec![e], vec![0.0], 0).unwrap();
        let s = assemble(&p, &c, &SamplingOptions::default()).unwrap();
        let v = neck_projection(&s, &p, 0, &ProjectionOptions::default()).unwrap();
        assert!(v.abs() < 1e-3 * r * e.powf(1.5), "{v}");
    }
}
