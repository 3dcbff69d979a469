//! Weighted sup norms of the mean-curvature deviation on assembled surfaces.

use crate::ambient::MetricProfile;
use crate::assembly::{AssembledSurface, Kind};
use crate::error::{Error, Result};
use crate::revgeom::{ambient_forms_at, Region};
use serde::{Deserialize, Serialize};

/// Axial weight on the Delaunay end: T^{−ν̄} or e^{−ν̄T}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxialWeight {
    #[default]
    Polynomial,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub nu: f64,
    pub nu_bar: Option<f64>,
    pub alpha: f64,
    #[serde(default)]
    pub axial: AxialWeight,
}

impl NormParams {
    pub fn new(nu: f64) -> Self {
        Self { nu, nu_bar: None, alpha: 0.5, axial: AxialWeight::Polynomial }
    }

    pub fn validate(&self, kind: Kind) -> Result<()> {
        if !(self.nu > 1.0 && self.nu < 2.0) {
            return Err(Error::Range(format!("nu = {} outside (1, 2)", self.nu)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Range(format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        if kind == Kind::OneEnded {
            match self.nu_bar {
                Some(v) if v > -1.0 && v < 0.0 => {}
                other => return Err(Error::Range(format!("one-ended surfaces need nu_bar in (-1, 0), got {other:?}"))),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RegionSups {
    pub sphere: f64,
    pub transition: f64,
    pub neck: f64,
    pub delaunay: f64,
}

impl RegionSups {
    pub fn max(&self) -> f64 {
        self.sphere.max(self.transition).max(self.neck).max(self.delaunay)
    }

    fn slot(&mut self, r: Region) -> &mut f64 {
        match r {
            Region::Sphere(_) => &mut self.sphere,
            Region::Transition(..) => &mut self.transition,
            Region::Neck(_) => &mut self.neck,
            Region::Delaunay => &mut self.delaunay,
        }
    }
}

/// The four terms r^{3−ν}, r^{5−ν}ε^{1/2−3ν/4}, r^{1−ν}ε^{3/2−3ν/4} and
/// |δ|r^{1−ν}ε^{1−3ν/4} bounding the weighted deviation.
pub fn predicted_terms(r: f64, eps: f64, delta: f64, nu: f64) -> [f64; 4] {
    let q = 0.75 * nu;
    [
        r.powf(3.0 - nu),
        r.powf(5.0 - nu) * eps.powf(0.5 - q),
        r.powf(1.0 - nu) * eps.powf(1.5 - q),
        delta.abs() * r.powf(1.0 - nu) * eps.powf(1.0 - q),
    ]
}

pub const TERM_NAMES: [&str; 4] = ["sphere", "neck-sphere", "transition", "displacement"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormReport {
    pub nu: f64,
    pub nu_bar: Option<f64>,
    pub axial: AxialWeight,
    /// Sup of ζ^{2−ν}|H − 2/r| per region class.
    pub regions: RegionSups,
    pub global: f64,
    /// Sampled Hölder coefficient estimate, for information only.
    pub holder: f64,
    pub predicted: [f64; 4],
    pub dominant_term: String,
    pub dominant_value: f64,
    /// global / dominant_value, the empirical constant of the bound.
    pub ratio: f64,
    /// Per-region sups over the halves t < 0 and t > 0 (finite kind).
    pub halves: Option<(RegionSups, RegionSups)>,
}

/// max over samples of ζ^{−ν}|f|, times the axial factor where given.
pub fn weighted_sup(field: &[f64], zeta: &[f64], nu: f64, axial: Option<&[f64]>) -> Result<f64> {
    if field.is_empty() || field.len() != zeta.len() || axial.is_some_and(|a| a.len() != field.len()) {
        return Err(Error::InvalidInput("weighted_sup needs non-empty fields of equal length".into()));
    }
    Ok((0..field.len()).map(|i| zeta[i].powf(-nu) * field[i].abs() * axial.map_or(1.0, |a| a[i])).fold(0.0, f64::max))
}

/// ζ at every sample.
pub fn weights(surface: &AssembledSurface) -> Vec<f64> {
    (0..surface.curve.samples.len()).map(|i| surface.weight(i)).collect()
}

/// H − 2/r at every sample, from the exact ambient forms.
pub fn deviation_field(surface: &AssembledSurface, profile: &MetricProfile) -> Result<Vec<f64>> {
    let h0 = 2.0 / surface.config.r;
    surface.curve.samples.iter().map(|p| Ok(ambient_forms_at(profile, p)?.mean - h0)).collect()
}

/// Axial factor per sample: 1 on the compact part, T^{−ν̄} (or e^{−ν̄(T−1)})
/// on the end, with T ≥ 1 the axial distance into the end in periods plus one.
pub fn axial_factors(surface: &AssembledSurface, nu_bar: f64, mode: AxialWeight) -> Vec<f64> {
    let Some(d) = &surface.config.delaunay else {
        return vec![1.0; surface.curve.samples.len()];
    };
    let start = d.center;
    let len = surface.config.r * d.period;
    surface
        .curve
        .samples
        .iter()
        .map(|p| {
            if p.region != Region::Delaunay {
                return 1.0;
            }
            let t = 1.0 + ((p.t - start) / len).max(0.0);
            match mode {
                AxialWeight::Polynomial => t.powf(-nu_bar),
                AxialWeight::Exponential => (-nu_bar * (t - 1.0)).exp(),
            }
        })
        .collect()
}

pub fn deviation_report(surface: &AssembledSurface, profile: &MetricProfile, params: &NormParams) -> Result<WeightedNormReport> {
    params.validate(surface.config.kind)?;
    let field = deviation_field(surface, profile)?;
    deviation_report_from_field(surface, profile, params, &field)
}

/// Report for a precomputed deviation field (one value per sample).
pub fn deviation_report_from_field(surface: &AssembledSurface, profile: &MetricProfile, params: &NormParams, field: &[f64]) -> Result<WeightedNormReport> {
    let zeta = weights(surface);
    let axial = params.nu_bar.map(|nb| axial_factors(surface, nb, params.axial));
    let e = 2.0 - params.nu;
    let samples = &surface.curve.samples;
    let mut regions = RegionSups::default();
    let (mut left, mut right) = (RegionSups::default(), RegionSups::default());
    for (i, p) in samples.iter().enumerate() {
        let v = zeta[i].powf(e) * field[i].abs() * axial.as_ref().map_or(1.0, |a| a[i]);
        if !v.is_finite() {
            return Err(Error::Range(format!("non-finite weighted deviation at sample {i}")));
        }
        let slot = regions.slot(p.region);
        *slot = slot.max(v);
        let half = if p.s < 0.0 { &mut left } else { &mut right };
        let slot = half.slot(p.region);
        *slot = slot.max(v);
    }
    let global = weighted_sup(field, &zeta, params.nu - 2.0, axial.as_deref())?;
    let c = &surface.config;
    let eps = c.eps.iter().copied().fold(0.0, f64::max);
    let delta = c.delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let predicted = predicted_terms(c.r, eps, delta, params.nu);
    let dom = (0..4).fold(0, |b, i| if predicted[i] > predicted[b] { i } else { b });
    let holder = holder_estimate(surface, profile, field, &zeta, params)?;
    Ok(WeightedNormReport {
        nu: params.nu,
        nu_bar: params.nu_bar,
        axial: params.axial,
        regions,
        global,
        holder,
        predicted,
        dominant_term: TERM_NAMES[dom].into(),
        dominant_value: predicted[dom],
        ratio: global / predicted[dom],
        halves: (c.kind == Kind::Finite).then_some((left, right)),
    })
}

/// Pairs at dyadic index separations within one region:
/// ζ^{2−ν+α}|f_i − f_j| / d_ij^α, with d the local Euclidean chart distance.
fn holder_estimate(surface: &AssembledSurface, profile: &MetricProfile, field: &[f64], zeta: &[f64], params: &NormParams) -> Result<f64> {
    let s = &surface.curve.samples;
    let mut best: f64 = 0.0;
    for i in 0..s.len() {
        for m in [1usize, 2, 4, 8, 16, 32] {
            let j = i + m;
            if j >= s.len() || s[j].region != s[i].region {
                break;
            }
            let a = profile.a(0.5 * (s[i].t + s[j].t)).sqrt();
            let d = (s[j].t - s[i].t).hypot(a * (s[j].rho - s[i].rho));
            if d <= 0.0 {
                continue;
            }
            let z = zeta[i].min(zeta[j]);
            best = best.max(z.powf(2.0 - params.nu + params.alpha) * (field[i] - field[j]).abs() / d.powf(params.alpha));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, GluedConfiguration, SamplingOptions};

    fn surface(p: &MetricProfile, r: f64, eps: Vec<f64>, delta: Vec<f64>) -> AssembledSurface {
        let c = GluedConfiguration::from_eps(Kind::Finite, r, eps.len(), 0.0, eps, delta, 2).unwrap();
        assemble(p, &c, &SamplingOptions::default()).unwrap()
    }

    #[test]
    fn trivial_fields() {
        let z = [0.3, 1.0, 0.01];
        assert_eq!(weighted_sup(&[2.0; 3], &z, 0.0, None).unwrap(), 2.0);
        let f: Vec<f64> = z.iter().map(|v| v.powf(1.5)).collect();
        assert!((weighted_sup(&f, &z, 1.5, None).unwrap() - 1.0).abs() < 1e-15);
        assert!(weighted_sup(&[], &[], 1.5, None).is_err());
    }

    #[test]
    fn single_round_sphere_has_no_deviation() {
        let p = MetricProfile::flat();
        let s = surface(&p, 0.02, vec![], vec![]);
        let rep = deviation_report(&s, &p, &NormParams::new(1.5)).unwrap();
        assert!(rep.global < 1e-8, "{}", rep.global);
    }

    #[test]
    fn weights_follow_the_neck_scale() {
        let p = MetricProfile::flat();
        let r = 0.02;
        let s = surface(&p, r, vec![1e-5], vec![0.0]);
        let z = weights(&s);
        assert!(z.iter().all(|&v| v > 0.0 && v <= r * (1.0 + 1e-15)));
        let waist = s.curve.samples.iter().enumerate().filter(|(_, q)| q.region == Region::Neck(0)).map(|(i, _)| z[i]).fold(f64::INFINITY, f64::min);
        assert!((waist / (r * 1e-5) - 1.0).abs() < 0.5);
        let top = s.curve.samples.iter().position(|q| q.s == 0.0).unwrap();
        assert_eq!(z[top], r);
    }

    #[test]
    fn report_is_consistent_and_symmetric() {
        let p = MetricProfile::even_bump(-0.5).unwrap();
        let s = surface(&p, 0.02, vec![2e-5, 1e-5], vec![0.0; 2]);
        let rep = deviation_report(&s, &p, &NormParams::new(1.5)).unwrap();
        assert_eq!(rep.global, rep.regions.max());
        assert!(rep.holder.is_finite() && rep.holder >= 0.0);
        let (l, r) = rep.halves.unwrap();
        for (a, b) in [(l.sphere, r.sphere), (l.transition, r.transition), (l.neck, r.neck)] {
            assert!((a - b).abs() <= 1e-10 * a.max(b).max(1e-300), "{a} {b}");
        }
        assert!(deviation_report(&s, &p, &NormParams::new(2.5)).is_err());
    }

    #[test]
    fn neck_fields_grow_with_nu() {
        let p = MetricProfile::flat();
        let s = surface(&p, 0.02, vec![1e-5], vec![0.0]);
        let z = weights(&s);
        let f: Vec<f64> = s.curve.samples.iter().map(|q| if q.region == Region::Neck(0) { 1.0 } else { 0.0 }).collect();
        let v: Vec<f64> = [1.2, 1.5, 1.8].iter().map(|&nu| weighted_sup(&f, &z, nu, None).unwrap()).collect();
        assert!(v[0] <= v[1] && v[1] <= v[2]);
    }

    #[test]
    fn displacement_only_changes_the_cutoff_annulus() {
        let p = MetricProfile::flat();
        let (r, e) = (0.02, 1e-5);
        let base = deviation_field(&surface(&p, r, vec![e], vec![0.0]), &p).unwrap();
        let d1 = 0.2 * e.sqrt();
        let s1 = surface(&p, r, vec![e], vec![d1]);
        let f1 = deviation_field(&s1, &p).unwrap();
        let f2 = deviation_field(&surface(&p, r, vec![e], vec![2.0 * d1]), &p).unwrap();
        let z = weights(&s1);
        let mut sup = [0.0f64; 2];
        for i in 0..base.len() {
            let (a, b) = ((f1[i] - base[i]).abs(), (f2[i] - base[i]).abs());
            match s1.curve.samples[i].region {
                Region::Transition(..) => {
                    sup[0] = sup[0].max(z[i].powf(0.5) * a);
                    sup[1] = sup[1].max(z[i].powf(0.5) * b);
                }
                reg => assert!(a < 1e-6 * (2.0 / r) && b < 1e-6 * (2.0 / r), "{reg} {a} {b} {}", z[i]),
            }
        }
        assert!((sup[1] / sup[0] - 2.0).abs() < 0.4, "{sup:?}");
    }
}
