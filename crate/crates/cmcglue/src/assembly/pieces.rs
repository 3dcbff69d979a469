use super::cutoff::cutoff_with_derivatives;
use crate::ambient::{exp_map, MetricProfile};
use crate::blocks::{catenoid_graph, DelaunayEnd, SphereGreen};
use crate::error::{Error, Result};
use crate::revgeom::{ChartCurvePoint, CurvePoint, Region, Side};
use std::f64::consts::PI;
use std::sync::Arc;

/// Graph X0(s) of a neck block in its own chart, before cutoff.
#[derive(Debug, Clone)]
pub enum NeckGraph {
    /// ±ε arccosh(s/ε) + ε(d + δ), sign by side.
    Catenoid { eps: f64, shift: f64 },
    /// offset − X(s), the lower branch of the unduloid.
    Delaunay { offset: f64, end: Arc<DelaunayEnd> },
}

impl NeckGraph {
    fn eval(&self, side: Side, s: f64) -> Result<(f64, f64, f64)> {
        match self {
            NeckGraph::Catenoid { eps, shift } => {
                let sign = if side == Side::Upper { 1.0 } else { -1.0 };
                catenoid_graph(*eps, *shift / eps, sign, s)
            }
            NeckGraph::Delaunay { offset, end } => {
                let (x, x1, x2) = end.graph_over_radius(s)?;
                Ok((offset - x, -x1, -x2))
            }
        }
    }
}

/// A perturbed sphere seen from a neck chart.
#[derive(Debug, Clone, Copy)]
pub struct SphereRef {
    pub center: f64,
    pub green: SphereGreen,
}

#[derive(Debug, Clone)]
pub enum PieceKind {
    /// Perturbed sphere R = r(1 − G) in the normal chart at its center; λ = φ,
    /// the angle from the −t axis.
    Sphere { sphere: SphereRef },
    /// Catenoid core in the neck chart; λ = z, the scaled axial coordinate.
    NeckCore { center: f64, eps: f64, zc: f64 },
    /// χ-interpolation of neck and sphere graphs over s ∈ [ε^{3/4}/2, ε^{3/4}];
    /// λ = s on the upper side, −s on the lower side.
    Transition { center: f64, eps: f64, side: Side, neck: NeckGraph, sphere: SphereRef },
    /// Unduloid end in the chart at its first neck; λ = ψ.
    Delaunay { center: f64, offset: f64, end: Arc<DelaunayEnd> },
}

/// One analytic block of the generating curve, parametrized by λ ∈ [lo, hi].
#[derive(Debug, Clone)]
pub struct Piece {
    pub kind: PieceKind,
    pub lo: f64,
    pub hi: f64,
    pub region: Region,
    pub r: f64,
}

pub(crate) type Chart2 = ([f64; 2], [f64; 2], [f64; 2]);

pub(crate) fn sphere_chart(r: f64, g: &SphereGreen, phi: f64) -> Chart2 {
    // Exact poles, so caps meet the axis at ρ = 0.
    let (c, s) = if phi == PI { (-1.0, 0.0) } else { (phi.cos(), phi.sin()) };
    let (_, gx, gxx) = g.eval_x(-c);
    let big_r = r * (1.0 - g.eval_x(-c).0);
    let r1 = -r * gx * s;
    let r2 = -r * (gxx * s * s + gx * c);
    (
        [-big_r * c, big_r * s],
        [-r1 * c + big_r * s, r1 * s + big_r * c],
        [-r2 * c + 2.0 * r1 * s + big_r * c, r2 * s + 2.0 * r1 * c - big_r * s],
    )
}

fn push_chart(profile: &MetricProfile, center: f64, q: Chart2, region: Region, lam: f64) -> Result<CurvePoint> {
    let (p, d1, d2) = q;
    let e = exp_map(profile, center, p[0], p[1].max(0.0))?;
    let (v, a) = e.push(d1, d2);
    Ok(CurvePoint { s: lam, t: e.t, rho: e.rho.max(0.0), dt: v[0], drho: v[1], d2t: a[0], d2rho: a[1], region })
}

fn sphere_point(profile: &MetricProfile, r: f64, sph: &SphereRef, phi: f64, region: Region) -> Result<CurvePoint> {
    push_chart(profile, sph.center, sphere_chart(r, &sph.green, phi), region, phi)
}

/// Sphere as a graph X0(s) over the neck chart at `neck_center`, with the
/// sphere angle φ where the chart radius equals s. `side` is the side of the
/// neck the sphere lies on.
pub fn sphere_graph_in_neck(profile: &MetricProfile, r: f64, neck_center: f64, sph: &SphereRef, side: Side, s: f64) -> Result<(f64, f64, f64, f64)> {
    let guess = s.clamp(0.0, 1.0).asin();
    let mut phi = if side == Side::Upper { guess } else { PI - guess };
    for _ in 0..40 {
        let p = sphere_point(profile, r, sph, phi, Region::Delaunay)?;
        let q = ChartCurvePoint::from_curve_point(profile, neck_center, &p)?;
        let step = (q.w - r * s) / q.dw;
        phi -= step;
        if step.abs() < 1e-14 {
            let p = sphere_point(profile, r, sph, phi, Region::Delaunay)?;
            let q = ChartCurvePoint::from_curve_point(profile, neck_center, &p)?;
            let x1 = q.du / q.dw;
            let x2 = r * (q.d2u * q.dw - q.du * q.d2w) / q.dw.powi(3);
            return Ok((q.u / r, x1, x2, phi));
        }
    }
    Err(Error::NonConvergence(format!("sphere at {} does not cross neck-chart radius {s}", sph.center)))
}

impl Piece {
    /// Exact point with derivatives in λ; `s` carries λ.
    pub fn eval(&self, profile: &MetricProfile, lam: f64) -> Result<CurvePoint> {
        let r = self.r;
        match &self.kind {
            PieceKind::Sphere { sphere } => sphere_point(profile, r, sphere, lam, self.region),
            PieceKind::NeckCore { center, eps, zc } => {
                let a = (lam - zc) / eps;
                let q = ([r * lam, r * eps * a.cosh()], [r, r * a.sinh()], [0.0, r * a.cosh() / eps]);
                push_chart(profile, *center, q, self.region, lam)
            }
            PieceKind::Transition { .. } => {
                let (x, x1, x2, sgn) = self.transition_graph(profile, lam)?;
                let center = match &self.kind {
                    PieceKind::Transition { center, .. } => *center,
                    _ => unreachable!(),
                };
                let q = ([r * x, r * lam.abs()], [r * x1 * sgn, r * sgn], [r * x2, 0.0]);
                push_chart(profile, center, q, self.region, lam)
            }
            PieceKind::Delaunay { center, offset, end } => {
                let p = end.point(lam);
                let q = ([r * (offset + p.x), r * p.rho], [r * p.dx, r * p.drho], [r * p.d2x, r * p.d2rho]);
                push_chart(profile, *center, q, self.region, lam)
            }
        }
    }

    /// (X0, dX0/ds, d²X0/ds², ds/dλ) for a transition piece.
    fn transition_graph(&self, profile: &MetricProfile, lam: f64) -> Result<(f64, f64, f64, f64)> {
        let PieceKind::Transition { center, eps, side, neck, sphere } = &self.kind else {
            return Err(Error::InvalidInput("not a transition piece".into()));
        };
        let s = lam.abs();
        let sgn = if *side == Side::Upper { 1.0 } else { -1.0 };
        let e34 = eps.powf(0.75);
        let (c, c1, c2) = cutoff_with_derivatives(s / e34);
        let (c1, c2) = (c1 / e34, c2 / (e34 * e34));
        let n = if c > 0.0 { neck.eval(*side, s)? } else { (0.0, 0.0, 0.0) };
        let g = if c < 1.0 {
            let (x, x1, x2, _) = sphere_graph_in_neck(profile, self.r, *center, sphere, *side, s)?;
            (x, x1, x2)
        } else {
            (0.0, 0.0, 0.0)
        };
        let x = c * n.0 + (1.0 - c) * g.0;
        let x1 = c1 * (n.0 - g.0) + c * n.1 + (1.0 - c) * g.1;
        let x2 = c2 * (n.0 - g.0) + 2.0 * c1 * (n.1 - g.1) + c * n.2 + (1.0 - c) * g.2;
        Ok((x, x1, x2, sgn))
    }

    /// Scaled neck-chart norm ‖x‖ of the point at λ, when the piece lives in a
    /// neck chart.
    pub fn chart_norm(&self, profile: &MetricProfile, lam: f64) -> Result<Option<f64>> {
        Ok(match &self.kind {
            PieceKind::Sphere { .. } => None,
            PieceKind::NeckCore { eps, zc, .. } => Some(lam.hypot(eps * ((lam - zc) / eps).cosh())),
            PieceKind::Transition { .. } => Some(self.transition_graph(profile, lam)?.0.hypot(lam)),
            PieceKind::Delaunay { end, .. } => {
                let p = end.point(lam);
                let n = (lam / (2.0 * PI)).round();
                Some((p.x - n * end.period).hypot(p.rho))
            }
        })
    }
}
