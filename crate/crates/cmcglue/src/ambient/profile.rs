use crate::error::{Error, Result};
use crate::expr::Expr;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    FiniteLength,
    OneEnded,
}

/// A(t) and its first four derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpDerivs(pub [f64; 5]);

#[derive(Clone)]
enum Warp {
    Flat,
    OneEndedExp,
    EvenBump(f64),
    Expression(Arc<[Expr; 5]>),
    Sampled(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Warping factor A(t) together with its domain, parity and regime.
#[derive(Clone)]
pub struct MetricProfile {
    name: String,
    warp: Warp,
    pub lo: f64,
    pub hi: f64,
    pub parity: Parity,
    pub regime: Regime,
}

impl std::fmt::Debug for MetricProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricProfile")
            .field("name", &self.name)
            .field("domain", &(self.lo, self.hi))
            .field("parity", &self.parity)
            .field("regime", &self.regime)
            .finish()
    }
}

impl MetricProfile {
    pub fn flat() -> Self {
        Self { name: "flat".into(), warp: Warp::Flat, lo: -10.0, hi: 10.0, parity: Parity::Even, regime: Regime::FiniteLength }
    }

    /// A = 1 + e^{-t} on the ray [0, ∞).
    pub fn one_ended_exp() -> Self {
        Self {
            name: "one-ended-exp".into(),
            warp: Warp::OneEndedExp,
            lo: 0.0,
            hi: f64::INFINITY,
            parity: Parity::None,
            regime: Regime::OneEnded,
        }
    }

    /// A = 1 + β e^{-t²}; requires β > -1 so that A stays positive.
    pub fn even_bump(beta: f64) -> Result<Self> {
        if !(beta > -1.0) || !beta.is_finite() {
            return Err(Error::InvalidConfig(format!("even-bump needs beta > -1, got {beta}")));
        }
        Ok(Self {
            name: format!("even-bump(beta={beta})"),
            warp: Warp::EvenBump(beta),
            lo: -5.0,
            hi: 5.0,
            parity: Parity::Even,
            regime: Regime::FiniteLength,
        })
    }

    /// Closed-form A(t) with symbolic derivatives.
    pub fn expression(src: &str, lo: f64, hi: f64, parity: Parity, regime: Regime) -> Result<Self> {
        let e0 = Expr::parse(src)?;
        let e1 = e0.derivative();
        let e2 = e1.derivative();
        let e3 = e2.derivative();
        let e4 = e3.derivative();
        let p = Self { name: src.to_string(), warp: Warp::Expression(Arc::new([e0, e1, e2, e3, e4])), lo, hi, parity, regime };
        p.check_domain_shape()?;
        Ok(p)
    }

    /// Black-box A(t); derivatives come from sixth-order central differences.
    pub fn sampled<F>(name: &str, f: F, lo: f64, hi: f64, parity: Parity, regime: Regime) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let p = Self { name: name.into(), warp: Warp::Sampled(Arc::new(f)), lo, hi, parity, regime };
        p.check_domain_shape()?;
        Ok(p)
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        self.lo = lo;
        self.hi = hi;
        self.check_domain_shape()?;
        Ok(self)
    }

    fn check_domain_shape(&self) -> Result<()> {
        if !(self.lo < self.hi) || self.lo.is_nan() {
            return Err(Error::InvalidConfig(format!("empty domain [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.warp, Warp::Flat)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo - 1e-12 && t <= self.hi + 1e-12
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) && t.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("t = {t} outside [{}, {}] for {}", self.lo, self.hi, self.name)))
        }
    }

    /// A(t) without domain checks.
    pub fn a(&self, t: f64) -> f64 {
        match &self.warp {
            Warp::Flat => 1.0,
            Warp::OneEndedExp => 1.0 + (-t).exp(),
            Warp::EvenBump(b) => 1.0 + b * (-t * t).exp(),
            Warp::Expression(e) => e[0].eval(t),
            Warp::Sampled(f) => f(t),
        }
    }

    /// A and its first four derivatives at t (domain checked).
    pub fn derivs(&self, t: f64) -> Result<WarpDerivs> {
        self.check(t)?;
        let d = self.derivs_unchecked(t);
        if !(d.0[0] > 0.0) {
            return Err(Error::Domain(format!("A({t}) = {} is not positive", d.0[0])));
        }
        Ok(d)
    }

    pub(crate) fn derivs_unchecked(&self, t: f64) -> WarpDerivs {
        match &self.warp {
            Warp::Flat => WarpDerivs([1.0, 0.0, 0.0, 0.0, 0.0]),
            Warp::OneEndedExp => {
                let e = (-t).exp();
                WarpDerivs([1.0 + e, -e, e, -e, e])
            }
            Warp::EvenBump(b) => {
                let g = b * (-t * t).exp();
                let t2 = t * t;
                WarpDerivs([
                    1.0 + g,
                    -2.0 * t * g,
                    (4.0 * t2 - 2.0) * g,
                    (12.0 * t - 8.0 * t2 * t) * g,
                    (16.0 * t2 * t2 - 48.0 * t2 + 12.0) * g,
                ])
            }
            Warp::Expression(e) => WarpDerivs([e[0].eval(t), e[1].eval(t), e[2].eval(t), e[3].eval(t), e[4].eval(t)]),
            Warp::Sampled(f) => WarpDerivs(central_differences(f.as_ref(), t)),
        }
    }

    /// Checks positivity, parity and the regime hypotheses on a sample grid.
    pub fn validate(&self) -> Result<ProfileReport> {
        let hi = if self.hi.is_finite() { self.hi } else { self.lo + 12.0 };
        let n = 241;
        let grid: Vec<f64> = (0..n).map(|i| self.lo + (hi - self.lo) * i as f64 / (n - 1) as f64).collect();
        for &t in &grid {
            let a = self.a(t);
            if !(a > 0.0) {
                return Err(Error::InvalidConfig(format!("A({t}) = {a} is not positive")));
            }
        }
        if self.parity == Parity::Even {
            for &t in &grid {
                let (p, m) = (self.a(t), self.a(-t));
                if (p - m).abs() > 1e-12 * (1.0 + p.abs()) {
                    return Err(Error::InvalidConfig(format!("profile declared even but A({t}) != A(-t)")));
                }
            }
        }
        let mut report = ProfileReport { name: self.name.clone(), extremum: None, decay_rate: None, curvature_sign: 0 };
        match self.regime {
            Regime::FiniteLength => {
                if !self.contains(0.0) {
                    return Err(Error::InvalidConfig("finite-length regime needs t = 0 in the domain".into()));
                }
                let sd = super::scalar_curvature_gradient(self, 0.0)?;
                let sdd = super::scalar_curvature_hessian(self, 0.0)?;
                if !self.is_flat() {
                    if sd.abs() > 1e-8 * (1.0 + sdd.abs()) {
                        return Err(Error::InvalidConfig(format!("S has no critical point at t = 0 (dS = {sd:e})")));
                    }
                    if sdd.abs() < 1e-8 {
                        return Err(Error::InvalidConfig("critical point of S at t = 0 is degenerate".into()));
                    }
                    report.extremum = Some(if sdd < 0.0 { Extremum::Maximum } else { Extremum::Minimum });
                }
            }
            Regime::OneEnded => {
                let ts: Vec<f64> = grid.iter().copied().filter(|&t| t > self.lo + 1e-9).collect();
                let s: Vec<f64> = ts.iter().map(|&t| super::scalar_curvature(self, t)).collect::<Result<_>>()?;
                let sign = s[0].signum();
                if sign == 0.0 || s.iter().any(|v| v.signum() != sign) {
                    return Err(Error::InvalidConfig("S must keep a strict sign along the ray".into()));
                }
                if s.windows(2).any(|w| w[1].abs() > w[0].abs()) {
                    return Err(Error::InvalidConfig("|S| must decrease monotonically along the ray".into()));
                }
                let logs: Vec<f64> = s.iter().map(|v| v.abs().ln()).collect();
                let (_, alpha) = crate::numerics::fit::linear_fit(&ts, &logs);
                if !(alpha < 0.0) {
                    return Err(Error::InvalidConfig(format!("S does not decay exponentially (fitted rate {alpha})")));
                }
                report.decay_rate = Some(alpha);
                report.curvature_sign = sign as i8;
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extremum {
    Maximum,
    Minimum,
}

/// Outcome of `MetricProfile::validate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub name: String,
    /// Type of the critical point of S at t = 0 (finite-length regime).
    pub extremum: Option<Extremum>,
    /// Fitted α in |S| ≈ C e^{αt} (one-ended regime).
    pub decay_rate: Option<f64>,
    /// Sign of S along the ray (one-ended regime), 0 otherwise.
    pub curvature_sign: i8,
}

// Sixth-order central stencils; the step grows with the order to keep
// roundoff below truncation error.
fn central_differences(f: &(dyn Fn(f64) -> f64 + Send + Sync), t: f64) -> [f64; 5] {
    let scale = t.abs().max(1.0);
    let sample = |h: f64| -> [f64; 9] { std::array::from_fn(|i| f(t + (i as f64 - 4.0) * h)) };
    let h1 = 1e-4 * scale;
    let v = sample(h1);
    let d1 = (-v[1] + 9.0 * v[2] - 45.0 * v[3] + 45.0 * v[5] - 9.0 * v[6] + v[7]) / (60.0 * h1);
    let h2 = 1e-3 * scale;
    let v = sample(h2);
    let d2 = (2.0 * v[1] - 27.0 * v[2] + 270.0 * v[3] - 490.0 * v[4] + 270.0 * v[5] - 27.0 * v[6] + 2.0 * v[7]) / (180.0 * h2 * h2);
    let h3 = 1e-2 * scale;
    let v = sample(h3);
    let d3 = (-7.0 * v[0] + 72.0 * v[1] - 338.0 * v[2] + 488.0 * v[3] - 488.0 * v[5] + 338.0 * v[6] - 72.0 * v[7] + 7.0 * v[8])
        / (240.0 * h3.powi(3));
    let h4 = 2e-2 * scale;
    let v = sample(h4);
    let d4 = (7.0 * v[0] - 96.0 * v[1] + 676.0 * v[2] - 1952.0 * v[3] + 2730.0 * v[4] - 1952.0 * v[5] + 676.0 * v[6] - 96.0 * v[7]
        + 7.0 * v[8])
        / (240.0 * h4.powi(4));
    [f(t), d1, d2, d3, d4]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_differences_match_analytic_bump() {
        let sampled =
            MetricProfile::sampled("bump", |t| 1.0 + 0.7 * (-t * t).exp(), -5.0, 5.0, Parity::Even, Regime::FiniteLength).unwrap();
        let exact = MetricProfile::even_bump(0.7).unwrap();
        for &t in &[0.0, 0.3, -1.1, 2.4] {
            let (a, b) = (sampled.derivs(t).unwrap().0, exact.derivs(t).unwrap().0);
            for k in 0..5 {
                assert!((a[k] - b[k]).abs() < 1e-7 * (1.0 + b[k].abs()), "order {k} at t = {t}: {} vs {}", a[k], b[k]);
            }
        }
    }

    #[test]
    fn expression_profile_matches_builtin() {
        let e = MetricProfile::expression("1 + exp(-t)", 0.0, f64::INFINITY, Parity::None, Regime::OneEnded).unwrap();
        let b = MetricProfile::one_ended_exp();
        assert_eq!(e.derivs(1.3).unwrap().0.map(|v| (v * 1e12).round()), b.derivs(1.3).unwrap().0.map(|v| (v * 1e12).round()));
    }

    #[test]
    fn domain_and_positivity_are_enforced() {
        assert!(MetricProfile::one_ended_exp().derivs(-0.5).is_err());
        assert!(MetricProfile::even_bump(-1.5).is_err());
        let bad = MetricProfile::expression("t", -1.0, 1.0, Parity::None, Regime::FiniteLength).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn even_bump_extremum_is_classified() {
        assert_eq!(MetricProfile::even_bump(1.0).unwrap().validate().unwrap().extremum, Some(Extremum::Maximum));
        assert_eq!(MetricProfile::even_bump(-0.5).unwrap().validate().unwrap().extremum, Some(Extremum::Minimum));
    }

    #[test]
    fn one_ended_profiles_report_sign_and_decay() {
        let r = MetricProfile::one_ended_exp().validate().unwrap();
        assert_eq!(r.curvature_sign, -1);
        assert!(r.decay_rate.unwrap() < 0.0);
        let p = MetricProfile::expression("1 - 0.5*exp(-t)", 0.0, f64::INFINITY, Parity::None, Regime::OneEnded).unwrap();
        assert_eq!(p.validate().unwrap().curvature_sign, 1);
    }
}
