use crate::error::{Error, Result};
use crate::numerics::spline::{quintic_hermite, CubicSpline};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Toward the lower-index sphere.
    Lower,
    /// Toward the higher-index sphere.
    Upper,
}

/// Building block a sample belongs to. Indices are signed so mirrored
/// finite chains keep their natural labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Sphere(i32),
    Transition(i32, Side),
    Neck(i32),
    Delaunay,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Sphere(k) => write!(f, "sphere:{k}"),
            Region::Transition(k, Side::Lower) => write!(f, "transition:{k}-"),
            Region::Transition(k, Side::Upper) => write!(f, "transition:{k}+"),
            Region::Neck(k) => write!(f, "neck:{k}"),
            Region::Delaunay => write!(f, "delaunay"),
        }
    }
}

impl FromStr for Region {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad region tag {s:?}"));
        if s == "delaunay" {
            return Ok(Region::Delaunay);
        }
        let (kind, idx) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "sphere" => idx.parse().map(Region::Sphere).map_err(|_| bad()),
            "neck" => idx.parse().map(Region::Neck).map_err(|_| bad()),
            "transition" => {
                let side = match idx.chars().last() {
                    Some('-') => Side::Lower,
                    Some('+') => Side::Upper,
                    _ => return Err(bad()),
                };
                idx[..idx.len() - 1].parse().map(|k| Region::Transition(k, side)).map_err(|_| bad())
            }
            _ => Err(bad()),
        }
    }
}

/// One meridian sample with exact parameter derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub s: f64,
    pub t: f64,
    pub rho: f64,
    pub dt: f64,
    pub drho: f64,
    pub d2t: f64,
    pub d2rho: f64,
    pub region: Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Closure {
    pub reflection_symmetric: bool,
    pub capped_left: bool,
    pub capped_right: bool,
    pub semi_infinite: bool,
}

/// Sampled meridian (t(s), ρ(s)) of an axially symmetric surface, traversed
/// from left to right over the upper half-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub samples: Vec<CurvePoint>,
    pub closure: Closure,
}

impl ProfileCurve {
    /// Builds a curve from samples carrying their own derivatives.
    pub fn new(samples: Vec<CurvePoint>, closure: Closure) -> Result<Self> {
        let c = Self { samples, closure };
        c.validate()?;
        Ok(c)
    }

    /// Builds a curve from positions only; derivatives come from cubic
    /// not-a-knot splines of t(s) and ρ(s).
    pub fn from_positions(s: &[f64], t: &[f64], rho: &[f64], regions: &[Region], closure: Closure) -> Result<Self> {
        let st = CubicSpline::new(s, t)?;
        let sr = CubicSpline::new(s, rho)?;
        let samples = (0..s.len())
            .map(|i| {
                let (_, dt, d2t) = st.knot_derivatives(i);
                let (_, dr, d2r) = sr.knot_derivatives(i);
                CurvePoint { s: s[i], t: t[i], rho: rho[i], dt, drho: dr, d2t, d2rho: d2r, region: regions[i] }
            })
            .collect();
        Self::new(samples, closure)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.samples.len();
        if n < 2 {
            return Err(Error::InvalidInput("curve needs at least two samples".into()));
        }
        for (i, p) in self.samples.iter().enumerate() {
            if p.rho < -1e-14 {
                return Err(Error::InvalidInput(format!("negative radius at sample {i}")));
            }
            if p.dt * p.dt + p.drho * p.drho <= 0.0 {
                return Err(Error::InvalidInput(format!("degenerate tangent at sample {i}")));
            }
            if i > 0 && !(p.s > self.samples[i - 1].s) {
                return Err(Error::InvalidInput(format!("parameter not increasing at sample {i}")));
            }
        }
        // Region tags must form contiguous runs.
        let mut seen: Vec<Region> = Vec::new();
        for w in self.samples.windows(2) {
            if w[0].region != w[1].region {
                seen.push(w[0].region);
                if seen.contains(&w[1].region) {
                    return Err(Error::InvalidInput(format!("region {} is not contiguous", w[1].region)));
                }
            }
        }
        Ok(())
    }

    pub fn param_range(&self) -> (f64, f64) {
        (self.samples[0].s, self.samples[self.samples.len() - 1].s)
    }

    /// Point at parameter s, by quintic Hermite interpolation between samples.
    pub fn eval(&self, s: f64) -> Result<CurvePoint> {
        let (a, b) = self.param_range();
        if s < a - 1e-12 * (1.0 + a.abs()) || s > b + 1e-12 * (1.0 + b.abs()) {
            return Err(Error::Range(format!("parameter {s} outside [{a}, {b}]")));
        }
        let n = self.samples.len();
        let j = self.samples.partition_point(|p| p.s <= s).clamp(1, n - 1) - 1;
        let (p, q) = (&self.samples[j], &self.samples[j + 1]);
        if s == p.s {
            return Ok(*p);
        }
        if s == q.s {
            return Ok(*q);
        }
        let (t, dt, d2t) = quintic_hermite(p.s, q.s, (p.t, p.dt, p.d2t), (q.t, q.dt, q.d2t), s);
        let (r, dr, d2r) = quintic_hermite(p.s, q.s, (p.rho, p.drho, p.d2rho), (q.rho, q.drho, q.d2rho), s);
        Ok(CurvePoint { s, t, rho: r.max(0.0), dt, drho: dr, d2t, d2rho: d2r, region: p.region })
    }

    /// Indices of the samples with the given region tag.
    pub fn region_indices(&self, region: Region) -> Vec<usize> {
        (0..self.samples.len()).filter(|&i| self.samples[i].region == region).collect()
    }
}
