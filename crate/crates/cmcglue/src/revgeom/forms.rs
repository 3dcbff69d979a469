use super::curve::{CurvePoint, ProfileCurve};
use crate::ambient::MetricProfile;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricFlag {
    Euclidean,
    Ambient,
}

/// Fundamental forms of a surface of revolution at one meridian point.
///
/// `h` and `b` are diagonal in the (meridian, rotation) coordinates (s, θ);
/// `normal` holds the (t, ρ) components of the outward unit normal, and the
/// principal curvatures are positive on round spheres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub metric: MetricFlag,
    pub h: [[f64; 2]; 2],
    pub b: [[f64; 2]; 2],
    pub principal: [f64; 2],
    pub mean: f64,
    pub normal: [f64; 2],
    pub norm_b: f64,
}

fn assemble(metric: MetricFlag, speed2: f64, circ2: f64, k1: f64, k2: f64, normal: [f64; 2]) -> FundamentalForms {
    FundamentalForms {
        metric,
        h: [[speed2, 0.0], [0.0, circ2]],
        b: [[k1 * speed2, 0.0], [0.0, k2 * circ2]],
        principal: [k1, k2],
        mean: k1 + k2,
        normal,
        norm_b: (k1 * k1 + k2 * k2).sqrt(),
    }
}

/// Flat-space forms at an explicit curve point.
pub fn euclidean_forms_at(p: &CurvePoint) -> Result<FundamentalForms> {
    forms_with(p, 1.0, 0.0, MetricFlag::Euclidean)
}

/// Forms with respect to g = dt² + A(t)δ at an explicit curve point.
pub fn ambient_forms_at(profile: &MetricProfile, p: &CurvePoint) -> Result<FundamentalForms> {
    let d = profile.derivs(p.t)?.0;
    forms_with(p, d[0], d[1], MetricFlag::Ambient)
}

fn forms_with(p: &CurvePoint, a: f64, a1: f64, flag: MetricFlag) -> Result<FundamentalForms> {
    let (t1, r1, t2, r2) = (p.dt, p.drho, p.d2t, p.d2rho);
    let speed2 = t1 * t1 + a * r1 * r1;
    let speed = speed2.sqrt();
    // Covariant acceleration of the meridian in the (t, ρ)-plane of ĝ = dt² + A dρ².
    let acc = [t2 - 0.5 * a1 * r1 * r1, r2 + a1 / a * t1 * r1];
    let n = [-a * r1 / (a.sqrt() * speed), t1 / (a.sqrt() * speed)];
    let k1 = -(acc[0] * n[0] + a * acc[1] * n[1]) / speed2;
    if p.rho <= 0.0 {
        // Axis point: finite only when the meridian meets the axis at a right angle.
        if t1.abs() > 1e-9 * speed {
            return Err(Error::SingularPoint(format!("meridian meets the axis obliquely at s = {}", p.s)));
        }
        return Ok(assemble(flag, speed2, 0.0, k1, k1, n));
    }
    let k2 = n[0] * a1 / (2.0 * a) + n[1] / p.rho;
    Ok(assemble(flag, speed2, a * p.rho * p.rho, k1, k2, n))
}

pub fn euclidean_forms(curve: &ProfileCurve, s: f64) -> Result<FundamentalForms> {
    euclidean_forms_at(&curve.eval(s)?)
}

pub fn ambient_forms_exact(profile: &MetricProfile, curve: &ProfileCurve, s: f64) -> Result<FundamentalForms> {
    ambient_forms_at(profile, &curve.eval(s)?)
}

/// Forms of the graph x⁰ = F(|x|) over the plane, from (F, F', F'') at radius x.
///
/// The normal is (−1, ∇F)/D, so a cap F = c − x²/(2r) has mean curvature +2/r.
pub fn graph_forms(f: (f64, f64, f64), x: f64) -> Result<FundamentalForms> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("graph radius must be positive, got {x}")));
    }
    let (_, f1, f2) = f;
    let d = (1.0 + f1 * f1).sqrt();
    let k1 = -f2 / d.powi(3);
    let k2 = -f1 / (x * d);
    Ok(assemble(MetricFlag::Euclidean, d * d, x * x, k1, k2, [-1.0 / d, f1 / d]))
}
