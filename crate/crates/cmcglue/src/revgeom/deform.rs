use super::curve::{CurvePoint, ProfileCurve};
use super::forms::euclidean_forms_at;
use crate::error::{Error, Result};
use crate::numerics::spline::CubicSpline;

/// Displaces every sample by f along the outward flat unit normal, with f
/// given as (f, f_s, f_ss) along the meridian parameter.
///
/// Requires |f|·|B̊| + |∇̊f| ≤ 0.1 at every sample. For outward displacement
/// the mean curvature changes as H̊ − L̊(f) + O(f²). Third derivatives of the
/// input meridian come from splines of its stored second derivatives.
pub fn normal_graph(curve: &ProfileCurve, f: impl Fn(f64) -> (f64, f64, f64)) -> Result<ProfileCurve> {
    let s: Vec<f64> = curve.samples.iter().map(|p| p.s).collect();
    let third_t = CubicSpline::new(&s, &curve.samples.iter().map(|p| p.d2t).collect::<Vec<_>>())?;
    let third_r = CubicSpline::new(&s, &curve.samples.iter().map(|p| p.d2rho).collect::<Vec<_>>())?;
    let mut out = Vec::with_capacity(s.len());
    for (i, p) in curve.samples.iter().enumerate() {
        let (f0, f1, f2) = f(p.s);
        let forms = euclidean_forms_at(p)?;
        let v = [p.dt, p.drho];
        let a = [p.d2t, p.d2rho];
        let j = [third_t.knot_derivatives(i).1, third_r.knot_derivatives(i).1];
        let sp = v[0].hypot(v[1]);
        let size = f0.abs() * forms.norm_b + f1.abs() / sp;
        if size > 0.1 {
            return Err(Error::PerturbationTooLarge(format!("|f||B| + |grad f| = {size:.3e} at s = {}", p.s)));
        }
        // n = m / |V| with m = (−ρ', t'); differentiate twice.
        let m = [-v[1], v[0]];
        let m1 = [-a[1], a[0]];
        let m2 = [-j[1], j[0]];
        let q = v[0] * v[0] + v[1] * v[1];
        let q1 = 2.0 * (v[0] * a[0] + v[1] * a[1]);
        let q2 = 2.0 * (a[0] * a[0] + a[1] * a[1] + v[0] * j[0] + v[1] * j[1]);
        let g = q.powf(-0.5);
        let g1 = -0.5 * q.powf(-1.5) * q1;
        let g2 = 0.75 * q.powf(-2.5) * q1 * q1 - 0.5 * q.powf(-1.5) * q2;
        let n: [f64; 2] = std::array::from_fn(|k| m[k] * g);
        let n1: [f64; 2] = std::array::from_fn(|k| m1[k] * g + m[k] * g1);
        let n2: [f64; 2] = std::array::from_fn(|k| m2[k] * g + 2.0 * m1[k] * g1 + m[k] * g2);
        out.push(CurvePoint {
            s: p.s,
            t: p.t + f0 * n[0],
            rho: (p.rho + f0 * n[1]).max(0.0),
            dt: v[0] + f1 * n[0] + f0 * n1[0],
            drho: v[1] + f1 * n[1] + f0 * n1[1],
            d2t: a[0] + f2 * n[0] + 2.0 * f1 * n1[0] + f0 * n2[0],
            d2rho: a[1] + f2 * n[1] + 2.0 * f1 * n1[1] + f0 * n2[1],
            region: p.region,
        });
    }
    ProfileCurve::new(out, curve.closure)
}

/// L̊f = Δ̊f + |B̊|² f on the flat surface of revolution, for axisymmetric f
/// given as (f, f_s, f_ss) along the meridian parameter.
pub fn linearized_operator(curve: &ProfileCurve, f: impl Fn(f64) -> (f64, f64, f64), s: f64) -> Result<f64> {
    let p = curve.eval(s)?;
    linearized_operator_at(&p, f(s))
}

pub(crate) fn linearized_operator_at(p: &CurvePoint, f: (f64, f64, f64)) -> Result<f64> {
    if p.rho <= 0.0 {
        return Err(Error::SingularPoint(format!("Laplacian evaluated on the axis at s = {}", p.s)));
    }
    let forms = euclidean_forms_at(p)?;
    let speed = p.dt.hypot(p.drho);
    let dspeed = (p.dt * p.d2t + p.drho * p.d2rho) / speed;
    // Δ̊f = (ρ |V|)⁻¹ d/ds (ρ f_s / |V|)
    let lap = ((p.drho * f.1 + p.rho * f.2) / speed - p.rho * f.1 * dspeed / (speed * speed)) / (p.rho * speed);
    Ok(lap + forms.norm_b * forms.norm_b * f.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revgeom::forms::euclidean_forms;
    use crate::revgeom::{Closure, Region};

    fn sphere(r: f64, n: usize) -> ProfileCurve {
        let pts = (0..n)
            .map(|i| {
                let phi = std::f64::consts::PI * i as f64 / (n - 1) as f64;
                let (c, s) = (phi.cos(), phi.sin());
                CurvePoint { s: phi, t: -r * c, rho: (r * s).max(0.0), dt: r * s, drho: r * c, d2t: r * c, d2rho: -r * s, region: Region::Sphere(0) }
            })
            .collect();
        ProfileCurve::new(pts, Closure { capped_left: true, capped_right: true, ..Default::default() }).unwrap()
    }

    #[test]
    fn sphere_jacobi_fields() {
        let c = sphere(1.0, 101);
        for &i in &[7, 30, 81] {
            let s = std::f64::consts::PI * i as f64 / 100.0;
            // f = cos θ measured from +t is −cos φ.
            let l = linearized_operator(&c, |x| (-x.cos(), x.sin(), x.cos()), s).unwrap();
            assert!(l.abs() < 1e-10, "{l}");
            assert!((linearized_operator(&c, |_| (1.0, 0.0, 0.0), s).unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_displacement_grows_the_sphere() {
        let r = 0.5;
        let c = sphere(r, 801);
        assert_eq!(normal_graph(&c, |_| (0.0, 0.0, 0.0)).unwrap().samples.iter().map(|p| (p.t, p.rho)).collect::<Vec<_>>(),
            c.samples.iter().map(|p| (p.t, p.rho)).collect::<Vec<_>>());
        let g = normal_graph(&c, |_| (0.01, 0.0, 0.0)).unwrap();
        let h = euclidean_forms(&g, 1.3).unwrap().mean;
        assert!((h - 2.0 / 0.51).abs() < 1e-8, "{h}");
    }

    #[test]
    fn deformation_remainder_is_quadratic() {
        let r = 1.0;
        let c = sphere(r, 2001);
        let mut ratios = Vec::new();
        for &eps in &[1e-2, 1e-3, 1e-4] {
            let g = normal_graph(&c, |_| (eps, 0.0, 0.0)).unwrap();
            let s = 1.0;
            let lin = euclidean_forms(&c, s).unwrap().mean - linearized_operator(&c, |_| (eps, 0.0, 0.0), s).unwrap();
            ratios.push((euclidean_forms(&g, s).unwrap().mean - lin).abs() / (eps * eps));
        }
        assert!(ratios.iter().all(|q| (q - 2.0).abs() < 0.05), "{ratios:?}");
    }

    #[test]
    fn large_perturbations_are_rejected() {
        assert!(matches!(normal_graph(&sphere(1.0, 50), |_| (0.2, 0.0, 0.0)), Err(Error::PerturbationTooLarge(_))));
    }
}
