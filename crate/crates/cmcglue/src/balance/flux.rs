use crate::ambient::MetricProfile;
use crate::error::{Error, Result};
use crate::revgeom::{CurvePoint, ProfileCurve};
use std::f64::consts::PI;

/// Flux of ∂_t through the latitude circle at p: the conormal term
/// 2π√A ρ ⟨ν, ∂_t⟩ minus h_ref times the g-area πAρ² of the spanning disk.
/// ν is the unit meridian tangent, oriented toward increasing parameter.
pub fn flux_at_point(profile: &MetricProfile, p: &CurvePoint, h_ref: f64) -> Result<f64> {
    let a = profile.derivs(p.t)?.0[0];
    let speed = (p.dt * p.dt + a * p.drho * p.drho).sqrt();
    Ok(2.0 * PI * a.sqrt() * p.rho * p.dt / speed - h_ref * PI * a * p.rho * p.rho)
}

/// Flux through the cut t = t_cut, which must meet the curve in exactly one
/// transversal point.
pub fn flux(curve: &ProfileCurve, t_cut: f64, profile: &MetricProfile, h_ref: f64) -> Result<f64> {
    let s = &curve.samples;
    let mut bracket = None;
    let mut count = 0;
    for i in 0..s.len() - 1 {
        let (a, b) = (s[i].t - t_cut, s[i + 1].t - t_cut);
        if a == 0.0 || a * b < 0.0 {
            count += 1;
            bracket = Some(i);
        }
    }
    if s[s.len() - 1].t == t_cut {
        count += 1;
        bracket = Some(s.len() - 2);
    }
    let Some(i) = bracket.filter(|_| count == 1) else {
        return Err(Error::InvalidCut(format!("t = {t_cut} meets the curve {count} times")));
    };
    let (mut lo, mut hi) = (s[i].s, s[i + 1].s);
    let up = s[i + 1].t > s[i].t;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = curve.eval(mid)?.t < t_cut;
        if below == up {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = curve.eval(0.5 * (lo + hi))?;
    let a = profile.derivs(p.t)?.0[0];
    if p.dt.abs() <= 1e-8 * (p.dt * p.dt + a * p.drho * p.drho).sqrt() {
        return Err(Error::InvalidCut(format!("t = {t_cut} is tangent to the curve")));
    }
    flux_at_point(profile, &p, h_ref)
}
