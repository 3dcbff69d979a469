use super::config::{GluedConfiguration, Kind};
use super::cutoff::cutoff_with_derivatives;
use super::pieces::{sphere_graph_in_neck, NeckGraph, Piece, PieceKind, SphereRef};
use crate::ambient::{log_map, MetricProfile, CHART_RADIUS};
use crate::error::{Error, Result};
use crate::revgeom::{Closure, CurvePoint, ProfileCurve, Region, Side};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Sample counts per block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingOptions {
    /// Uniform samples over a full sphere, before pole clustering.
    pub sphere: usize,
    pub neck_core: usize,
    /// Per transition piece (two per neck).
    pub transition: usize,
    pub delaunay_half_period: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self { sphere: 240, neck_core: 120, transition: 60, delaunay_half_period: 200 }
    }
}

/// Sampled glued surface together with the analytic pieces it came from.
#[derive(Debug, Clone)]
pub struct AssembledSurface {
    pub config: GluedConfiguration,
    /// Pieces left to right; for the finite kind only the half t ≥ 0.
    pub pieces: Vec<Piece>,
    pub curve: ProfileCurve,
    /// Per sample: piece index, whether it is the mirror image, and λ.
    pub sample_source: Vec<(usize, bool, f64)>,
    /// Per sample: scaled norm ‖x‖ in the nearest neck chart (∞ if none in reach).
    pub chart_norm: Vec<f64>,
}

pub fn mirror_region(r: Region) -> Region {
    match r {
        Region::Sphere(k) => Region::Sphere(-k),
        Region::Neck(j) => Region::Neck(-j - 1),
        Region::Transition(j, Side::Lower) => Region::Transition(-j - 1, Side::Upper),
        Region::Transition(j, Side::Upper) => Region::Transition(-j - 1, Side::Lower),
        Region::Delaunay => Region::Delaunay,
    }
}

/// Image of a point under t ↦ −t with the parameter reversed.
pub fn mirror_point(p: &CurvePoint) -> CurvePoint {
    CurvePoint { s: -p.s, t: -p.t, rho: p.rho, dt: p.dt, drho: -p.drho, d2t: -p.d2t, d2rho: p.d2rho, region: mirror_region(p.region) }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// n+1 points on [0, len], geometrically refined toward 0 down to scale `h`.
fn clustered(len: f64, h: f64, n: usize) -> Vec<f64> {
    let beta = (1.0 + len / h).ln();
    (0..=n).map(|i| len * ((beta * i as f64 / n as f64).exp() - 1.0) / (beta.exp() - 1.0)).collect()
}

fn merge(mut v: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    v.retain(|x| *x >= lo && *x <= hi);
    v.push(lo);
    v.push(hi);
    v.sort_by(f64::total_cmp);
    let tol = 1e-13 * (hi - lo);
    v.dedup_by(|a, b| (*a - *b).abs() <= tol);
    v
}

/// Builds the piece list and samples the approximate surface.
pub fn assemble(profile: &MetricProfile, config: &GluedConfiguration, opts: &SamplingOptions) -> Result<AssembledSurface> {
    let r = config.r;
    let k = config.k;
    let one_ended = config.kind == Kind::OneEnded;
    let sref = |i: usize| SphereRef { center: config.spheres[i].center, green: config.spheres[i].green };
    let upper_neck = |i: usize| -> Option<(f64, f64)> {
        if i < k {
            Some((config.necks[i].center, config.necks[i].eps))
        } else {
            config.delaunay.as_ref().map(|d| (d.center, d.eps))
        }
    };
    let mut pieces: Vec<(Piece, Vec<f64>)> = Vec::new();
    for i in 0..=k {
        let s = sref(i);
        let (lo, lower_pole) = if i > 0 {
            let n = &config.necks[i - 1];
            (sphere_graph_in_neck(profile, r, n.center, &s, Side::Upper, n.eps.powf(0.75))?.3, true)
        } else if one_ended {
            (0.0, false)
        } else {
            (0.5 * PI, false)
        };
        let (hi, upper_pole) = match upper_neck(i) {
            Some((c, e)) => (sphere_graph_in_neck(profile, r, c, &s, Side::Lower, e.powf(0.75))?.3, true),
            None => (PI, false),
        };
        if !(hi > lo) {
            return Err(Error::InvalidConfig(format!("sphere {i} has no free part between its junctions")));
        }
        let n = ((opts.sphere as f64 * (hi - lo) / PI).round() as usize).max(24);
        let mut lam = linspace(lo, hi, n);
        let m = opts.sphere / 4;
        if lower_pole {
            lam.extend(clustered(0.5 - lo, lo, m).into_iter().map(|d| lo + d));
        }
        if upper_pole {
            lam.extend(clustered(0.5 - (PI - hi), PI - hi, m).into_iter().map(|d| hi - d));
        }
        let piece = Piece { kind: PieceKind::Sphere { sphere: s }, lo, hi, region: Region::Sphere(i as i32), r };
        pieces.push((piece, merge(lam, lo, hi)));
        if i < k {
            let nb = &config.necks[i];
            let (e, e34) = (nb.eps, nb.eps.powf(0.75));
            let shift = e * (nb.d + nb.delta);
            let h = e * (0.5 * e34 / e).acosh();
            let j = i as i32;
            let neck = NeckGraph::Catenoid { eps: e, shift };
            let tr = |side: Side, sphere: SphereRef, lo: f64, hi: f64| Piece {
                kind: PieceKind::Transition { center: nb.center, eps: e, side, neck: neck.clone(), sphere },
                lo,
                hi,
                region: Region::Transition(j, side),
                r,
            };
            pieces.push((tr(Side::Lower, s, -e34, -0.5 * e34), linspace(-e34, -0.5 * e34, opts.transition)));
            let core = Piece { kind: PieceKind::NeckCore { center: nb.center, eps: e, zc: shift }, lo: shift - h, hi: shift + h, region: Region::Neck(j), r };
            pieces.push((core, linspace(shift - h, shift + h, opts.neck_core)));
            pieces.push((tr(Side::Upper, sref(i + 1), 0.5 * e34, e34), linspace(0.5 * e34, e34, opts.transition)));
        }
    }
    if let Some(dd) = &config.delaunay {
        let end = Arc::new(dd.unduloid()?);
        let e34 = dd.eps.powf(0.75);
        let psi_end = 2.0 * PI * dd.periods as f64 + PI;
        let reach = r * (dd.neck_offset.abs() + end.x_of_psi(psi_end)).hypot(1.0);
        if reach >= CHART_RADIUS {
            return Err(Error::InvalidConfig(format!("{} Delaunay periods leave the neck chart (reach {reach:.3})", dd.periods)));
        }
        let tr = Piece {
            kind: PieceKind::Transition {
                center: dd.center,
                eps: dd.eps,
                side: Side::Lower,
                neck: NeckGraph::Delaunay { offset: dd.neck_offset, end: end.clone() },
                sphere: sref(k),
            },
            lo: -e34,
            hi: -0.5 * e34,
            region: Region::Transition(k as i32, Side::Lower),
            r,
        };
        pieces.push((tr, linspace(-e34, -0.5 * e34, opts.transition)));
        let h = dd.eps.sqrt();
        let psi_a = end.psi_of_radius(0.5 * e34);
        let dpiece = |lo: f64, hi: f64| Piece { kind: PieceKind::Delaunay { center: dd.center, offset: dd.neck_offset, end: end.clone() }, lo, hi, region: Region::Delaunay, r };
        pieces.push((dpiece(-psi_a, 0.0), clustered(psi_a, h, opts.neck_core).into_iter().rev().map(|d| -d).collect()));
        let mut a = 0.0;
        while a < psi_end - 1e-12 {
            let b = a + PI;
            let c = clustered(PI, h, opts.delaunay_half_period);
            let lam: Vec<f64> = if (a / PI).round() as i64 % 2 == 0 { c.iter().map(|d| a + d).collect() } else { c.iter().rev().map(|d| b - d).collect() };
            pieces.push((dpiece(a, b), lam));
            a = b;
        }
    }

    // Sample, skipping the first point of every piece after the first.
    let mut samples = Vec::new();
    let mut source = Vec::new();
    let mut norms = Vec::new();
    for (idx, (piece, lams)) in pieces.iter().enumerate() {
        let len = piece.hi - piece.lo;
        for (n, &lam) in lams.iter().enumerate() {
            if idx > 0 && n == 0 {
                continue;
            }
            let mut p = piece.eval(profile, lam)?;
            p.s = idx as f64 + (lam - piece.lo) / len;
            p.dt *= len;
            p.drho *= len;
            p.d2t *= len * len;
            p.d2rho *= len * len;
            let norm = match piece.chart_norm(profile, lam)? {
                Some(v) => v,
                None => sphere_chart_norm(profile, config, piece.region, &p),
            };
            samples.push(p);
            source.push((idx, false, lam));
            norms.push(norm);
        }
    }
    let closure;
    if one_ended {
        closure = Closure { reflection_symmetric: false, capped_left: true, capped_right: false, semi_infinite: true };
    } else {
        closure = Closure { reflection_symmetric: true, capped_left: true, capped_right: true, semi_infinite: false };
        // Exact symmetry at the center sample.
        let c = &mut samples[0];
        c.t = 0.0;
        c.drho = 0.0;
        c.d2t = 0.0;
        let mut left: Vec<CurvePoint> = samples[1..].iter().rev().map(mirror_point).collect();
        let mut lsrc: Vec<(usize, bool, f64)> = source[1..].iter().rev().map(|&(i, _, l)| (i, true, l)).collect();
        let mut lnorm: Vec<f64> = norms[1..].iter().rev().copied().collect();
        left.append(&mut samples);
        lsrc.append(&mut source);
        lnorm.append(&mut norms);
        samples = left;
        source = lsrc;
        norms = lnorm;
    }
    let curve = ProfileCurve::new(samples, closure)?;
    Ok(AssembledSurface { config: config.clone(), pieces: pieces.into_iter().map(|(p, _)| p).collect(), curve, sample_source: source, chart_norm: norms })
}

/// Scaled chart norm of a sphere sample in the nearest adjacent neck chart.
fn sphere_chart_norm(profile: &MetricProfile, config: &GluedConfiguration, region: Region, p: &CurvePoint) -> f64 {
    let Region::Sphere(i) = region else { return f64::INFINITY };
    let mut centers = Vec::new();
    let i = i as usize;
    if i > 0 {
        centers.push(config.necks[i - 1].center);
    } else if config.kind == Kind::Finite && config.k > 0 {
        centers.push(-config.necks[0].center);
    }
    if i < config.k {
        centers.push(config.necks[i].center);
    } else if let Some(d) = &config.delaunay {
        centers.push(d.center);
    }
    centers
        .into_iter()
        .filter_map(|c| log_map(profile, c, p.t, p.rho).ok())
        .map(|(u, w)| u.hypot(w) / config.r)
        .fold(f64::INFINITY, f64::min)
}

/// ζ/r as a function of the scaled chart norm: ‖x‖ near the necks, 1 away.
pub fn scaled_weight(norm: f64, r_prime: f64) -> f64 {
    if !norm.is_finite() {
        return 1.0;
    }
    let (c, _, _) = cutoff_with_derivatives(norm / r_prime);
    norm.powf(c)
}

impl AssembledSurface {
    /// Exact point from the pieces for the sample source (piece, mirrored, λ);
    /// derivatives are with respect to λ.
    pub fn exact_point(&self, profile: &MetricProfile, piece: usize, mirrored: bool, lam: f64) -> Result<CurvePoint> {
        // The mirror is parametrized by −λ so that it keeps the orientation
        // (and hence the normal) of the full curve.
        let p = self.pieces[piece].eval(profile, lam)?;
        Ok(if mirrored { CurvePoint { s: p.s, ..mirror_point(&p) } } else { p })
    }

    /// Weight ζ at sample i.
    pub fn weight(&self, i: usize) -> f64 {
        self.config.r * scaled_weight(self.chart_norm[i], self.config.chart_r_prime)
    }

    /// Piece index ranges (piece, mirrored) in left-to-right order.
    pub fn piece_order(&self) -> Vec<(usize, bool)> {
        let n = self.pieces.len();
        match self.config.kind {
            Kind::OneEnded => (0..n).map(|i| (i, false)).collect(),
            Kind::Finite => (0..n).rev().map(|i| (i, true)).chain((0..n).map(|i| (i, false))).collect(),
        }
    }
}
