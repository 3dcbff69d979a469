use super::curve::{CurvePoint, ProfileCurve};
use super::forms::euclidean_forms_at;
use crate::ambient::{curvature_frame_data, exp_map, log_map, CurvatureData, MetricProfile, CHART_RADIUS};
use crate::error::{Error, Result};

/// Meridian point in normal coordinates (u, w) about an axis point, with
/// parameter derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartCurvePoint {
    pub u: f64,
    pub w: f64,
    pub du: f64,
    pub dw: f64,
    pub d2u: f64,
    pub d2w: f64,
}

impl ChartCurvePoint {
    /// Pulls a (t, ρ) curve point back to the normal chart at γ(center).
    pub fn from_curve_point(profile: &MetricProfile, center: f64, p: &CurvePoint) -> Result<Self> {
        let (u, w) = log_map(profile, center, p.t, p.rho)?;
        let e = exp_map(profile, center, u, w)?;
        let j = e.jac;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let solve = |b: [f64; 2]| [(j[1][1] * b[0] - j[0][1] * b[1]) / det, (-j[1][0] * b[0] + j[0][0] * b[1]) / det];
        let v1 = solve([p.dt, p.drho]);
        let mut rhs = [p.d2t, p.d2rho];
        for (i, r) in rhs.iter_mut().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    *r -= e.hess[i][a][b] * v1[a] * v1[b];
                }
            }
        }
        let v2 = solve(rhs);
        Ok(Self { u, w, du: v1[0], dw: v1[1], d2u: v2[0], d2w: v2[1] })
    }
}

/// Mean curvature predicted by the normal-coordinate expansion with the
/// largest ambient curvature terms, evaluated at a chart point.
///
/// The curvature tensor entering the expansion is the negative of the one in
/// `CurvatureData` (whose sectional curvature is R_{abab}), and N̊ is the
/// inward flat normal.
pub fn expansion_at_chart_point(cd: &CurvatureData, q: &ChartCurvePoint) -> Result<f64> {
    let y = [q.u, q.w, 0.0];
    if q.u.hypot(q.w) > CHART_RADIUS {
        return Err(Error::Range(format!("|Y| = {} exceeds {CHART_RADIUS}", q.u.hypot(q.w))));
    }
    let flat = CurvePoint { s: 0.0, t: q.u, rho: q.w.max(0.0), dt: q.du, drho: q.dw, d2t: q.d2u, d2rho: q.d2w, region: super::Region::Delaunay };
    let f = euclidean_forms_at(&flat)?;
    let n = [-f.normal[0], -f.normal[1], 0.0];
    let sp = q.du.hypot(q.dw);
    let e = [[q.du / sp, q.dw / sp, 0.0], [0.0, 0.0, 1.0]];
    let rm = |a: &[f64; 3], b: &[f64; 3], c: &[f64; 3], d: &[f64; 3]| -cd.rm(a, b, c, d);
    let drm = |v: &[f64; 3], a: &[f64; 3], b: &[f64; 3], c: &[f64; 3], d: &[f64; 3]| -cd.d_rm(v, a, b, c, d);
    let ric = |a: &[f64; 3], b: &[f64; 3]| -cd.ric(a, b);
    let dric = |v: &[f64; 3], a: &[f64; 3], b: &[f64; 3]| -cd.d_ric(v, a, b);
    let mut bterm = 0.0;
    for i in 0..2 {
        bterm += f.principal[i] * (rm(&e[i], &y, &e[i], &y) / 3.0 + drm(&y, &e[i], &y, &e[i], &y) / 6.0);
    }
    Ok((1.0 + rm(&n, &y, &n, &y) / 6.0 + drm(&y, &n, &y, &n, &y) / 12.0) * f.mean - bterm - 2.0 / 3.0 * ric(&y, &n)
        - 0.5 * dric(&y, &y, &n)
        + dric(&n, &y, &y) / 12.0
        - drm(&n, &n, &y, &n, &y) / 6.0)
}

/// Expansion value at parameter s of a (t, ρ) curve, about γ(center).
pub fn ambient_mean_curvature_expansion(profile: &MetricProfile, curve: &ProfileCurve, s: f64, center: f64) -> Result<f64> {
    let p = curve.eval(s)?;
    let q = ChartCurvePoint::from_curve_point(profile, center, &p)?;
    expansion_at_chart_point(&curvature_frame_data(profile, center)?, &q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::exp_map;
    use crate::revgeom::forms::ambient_forms_at;
    use crate::revgeom::Region;

    fn geodesic_sphere_point(p: &MetricProfile, c: f64, r: f64, phi: f64) -> CurvePoint {
        let (u, w) = (-r * phi.cos(), r * phi.sin());
        let d1 = [r * phi.sin(), r * phi.cos()];
        let d2 = [r * phi.cos(), -r * phi.sin()];
        let e = exp_map(p, c, u, w).unwrap();
        let (v, a) = e.push(d1, d2);
        CurvePoint { s: phi, t: e.t, rho: e.rho, dt: v[0], drho: v[1], d2t: a[0], d2rho: a[1], region: Region::Sphere(0) }
    }

    #[test]
    fn flat_expansion_is_flat_mean_curvature() {
        let p = MetricProfile::flat();
        let cd = curvature_frame_data(&p, 0.0).unwrap();
        let q = ChartCurvePoint { u: 0.0, w: 0.2, du: 1.0, dw: 0.0, d2u: 0.0, d2w: 0.0 };
        assert!((expansion_at_chart_point(&cd, &q).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn expansion_tracks_exact_curvature_at_third_order() {
        let p = MetricProfile::one_ended_exp();
        let cd = curvature_frame_data(&p, 1.0).unwrap();
        let rs = [0.1, 0.03, 0.01, 0.003, 0.001];
        let errs: Vec<f64> = rs
            .iter()
            .map(|&r| {
                (1..12)
                    .map(|i| {
                        let phi = std::f64::consts::PI * i as f64 / 12.0;
                        let pt = geodesic_sphere_point(&p, 1.0, r, phi);
                        let exact = ambient_forms_at(&p, &pt).unwrap().mean;
                        let q = ChartCurvePoint::from_curve_point(&p, 1.0, &pt).unwrap();
                        (expansion_at_chart_point(&cd, &q).unwrap() - exact).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        let slope = crate::numerics::fit::loglog_slope(&rs, &errs);
        assert!(slope >= 2.7, "slope {slope}, errors {errs:?}");
    }
}
