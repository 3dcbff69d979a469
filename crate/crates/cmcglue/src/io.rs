//! CSV and OBJ serialization of meridian curves and result tables.

use crate::error::{Error, Result};
use crate::revgeom::{Closure, CurvePoint, ProfileCurve, Region};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Serialize, Deserialize)]
struct Row {
    s: f64,
    t: f64,
    rho: f64,
    dt: f64,
    drho: f64,
    d2t: f64,
    d2rho: f64,
    region: String,
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Writes the curve as CSV; the closure flags travel in a leading comment line.
/// Values use shortest round-trip formatting, so reloading is exact.
pub fn curve_to_csv(curve: &ProfileCurve) -> Result<String> {
    let closure = serde_json::to_string(&curve.closure).map_err(csv_err)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in &curve.samples {
        w.serialize(Row { s: p.s, t: p.t, rho: p.rho, dt: p.dt, drho: p.drho, d2t: p.d2t, d2rho: p.d2rho, region: p.region.to_string() }).map_err(csv_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)?;
    Ok(format!("# closure: {closure}\n{body}"))
}

pub fn curve_from_csv(text: &str) -> Result<ProfileCurve> {
    let closure: Closure = match text.lines().next().and_then(|l| l.strip_prefix("# closure: ")) {
        Some(j) => serde_json::from_str(j).map_err(csv_err)?,
        None => Closure::default(),
    };
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let samples = r
        .deserialize::<Row>()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            Ok(CurvePoint { s: row.s, t: row.t, rho: row.rho, dt: row.dt, drho: row.drho, d2t: row.d2t, d2rho: row.d2rho, region: row.region.parse::<Region>()? })
        })
        .collect::<Result<Vec<_>>>()?;
    ProfileCurve::new(samples, closure)
}

/// Generic table with a header row.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
}

/// Surface of revolution about the t-axis as an OBJ mesh with `angular`
/// vertices per sample (x = t, y = ρ cos θ, z = ρ sin θ). Rings on the axis
/// keep their coincident vertices so the count is samples × angular; the
/// faces touching them are triangle fans around the ring's first vertex.
pub fn curve_to_obj(curve: &ProfileCurve, angular: usize) -> Result<String> {
    if angular < 3 {
        return Err(Error::InvalidInput(format!("angular resolution {angular} below 3")));
    }
    let n = curve.samples.len();
    let mut out = String::new();
    let _ = writeln!(out, "# surface of revolution: {n} samples x {angular} angles");
    for p in &curve.samples {
        for a in 0..angular {
            let th = 2.0 * PI * a as f64 / angular as f64;
            let _ = writeln!(out, "v {} {} {}", p.t, p.rho * th.cos(), p.rho * th.sin());
        }
    }
    let on_axis = |i: usize| curve.samples[i].rho.abs() < 1e-14;
    let idx = |i: usize, a: usize| i * angular + a % angular + 1;
    for i in 0..n - 1 {
        for a in 0..angular {
            match (on_axis(i), on_axis(i + 1)) {
                (true, true) => {}
                (true, false) => {
                    let _ = writeln!(out, "f {} {} {}", idx(i, 0), idx(i + 1, a), idx(i + 1, a + 1));
                }
                (false, true) => {
                    let _ = writeln!(out, "f {} {} {}", idx(i, a), idx(i + 1, 0), idx(i, a + 1));
                }
                (false, false) => {
                    let _ = writeln!(out, "f {} {} {} {}", idx(i, a), idx(i + 1, a), idx(i + 1, a + 1), idx(i, a + 1));
                }
            }
        }
    }
    Ok(out)
}
