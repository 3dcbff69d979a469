use crate::config::{EpsRule, RunConfig};
use cmcglue::ambient::{scalar_curvature, scalar_curvature_gradient, scalar_curvature_hessian, MetricProfile, Regime};
use cmcglue::assembly::{assemble, AssembledSurface, GluedConfiguration, SamplingOptions};
use cmcglue::balance::{balance_report, calibrate_constants, projections, BalanceConstants, BalanceReport, Projection, ProjectionOptions};
use cmcglue::error::{Error, Result};
use cmcglue::io::{curve_to_csv, curve_to_obj, table_csv};
use cmcglue::norms::{deviation_report, WeightedNormReport};
use cmcglue::numerics::fit::loglog_slope;
use serde::Serialize;
use serde_json::json;
use std::path::Path;

fn write(out: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join(name), text)?;
    Ok(())
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    write(out, name, &text)
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn constants(cfg: &RunConfig) -> Result<BalanceConstants> {
    let pts: Vec<(f64, f64)> = cfg.calibration.c0_points.iter().map(|p| (p[0], p[1])).collect();
    calibrate_constants(&cfg.calibration.flux_grid, &pts)
}

/// S, Ṡ, S̈ on a grid, plus the regime checks of the profile.
pub fn curvature(cfg: &RunConfig, out: &Path) -> Result<()> {
    let p = cfg.profile.build()?;
    let (lo, hi) = match cfg.profile.regime {
        _ if cfg.profile.name.as_deref() == Some("one-ended-exp") => (0.0, 10.0),
        Regime::OneEnded => (cfg.profile.domain.map_or(0.0, |d| d[0]), 10.0),
        Regime::FiniteLength => (-2.0, 2.0),
    };
    let (lo, hi) = (cfg.curvature.lo.unwrap_or(lo), cfg.curvature.hi.unwrap_or(hi));
    let n = cfg.curvature.n;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        rows.push(vec![num(t), num(p.a(t)), num(scalar_curvature(&p, t)?), num(scalar_curvature_gradient(&p, t)?), num(scalar_curvature_hessian(&p, t)?)]);
    }
    write(out, "curvature.csv", &table_csv(&["t", "A", "S", "dS", "d2S"], &rows)?)?;
    let check = match p.validate() {
        Ok(r) => json!({ "passed": true, "report": r }),
        Err(e) => json!({ "passed": false, "message": e.to_string() }),
    };
    write_json(out, "curvature.json", &json!({ "profile": p.name(), "grid": { "lo": lo, "hi": hi, "n": n }, "regime_check": check }))
}

/// Calibrates, solves the leading-order balance and measures the result.
pub fn balance(cfg: &RunConfig, out: &Path) -> Result<BalanceReport> {
    let p = cfg.profile.build()?;
    let c = constants(cfg)?;
    let g = &cfg.geometry;
    match balance_report(&p, &c, g.kind, g.r, g.k, &cfg.balance_options(), &cfg.projection_options()) {
        Ok(rep) => {
            let s = &rep.solution;
            let rows: Vec<Vec<String>> = (0..s.positions.len().max(s.eps.len()))
                .map(|k| {
                    let cell = |v: Option<&f64>| v.map_or(String::new(), |x| num(*x));
                    vec![k.to_string(), cell(s.eps.get(k)), cell(s.sigma.get(k)), cell(s.delta.get(k)), cell(s.sdot.get(k)), cell(s.residual.get(k))]
                })
                .collect();
            write(out, "balance.csv", &table_csv(&["k", "eps", "sigma", "delta", "dS", "residual"], &rows)?)?;
            write_json(out, "balance.json", &json!({ "status": "solved", "config": cfg, "report": rep }))?;
            Ok(rep)
        }
        Err(e) => {
            write_json(out, "balance.json", &json!({ "status": "failed", "config": cfg, "constants": c, "error": e.to_string() }))?;
            Err(e)
        }
    }
}

/// Configuration from explicit scales, or from the balance solver.
fn configuration(cfg: &RunConfig, out: &Path) -> Result<GluedConfiguration> {
    let g = &cfg.geometry;
    match &g.eps {
        Some(eps) => {
            let delta = g.delta.clone().unwrap_or_else(|| vec![0.0; eps.len()]);
            GluedConfiguration::from_eps(g.kind, g.r, g.k, g.origin, eps.clone(), delta, g.periods)
        }
        None => balance(cfg, out)?.solution.configuration(g.periods),
    }
}

fn surface(cfg: &RunConfig, out: &Path) -> Result<(MetricProfile, AssembledSurface)> {
    let p = cfg.profile.build()?;
    let c = configuration(cfg, out)?;
    let s = assemble(&p, &c, &SamplingOptions::default())?;
    Ok((p, s))
}

pub fn assemble_cmd(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (_, s) = surface(cfg, out)?;
    write_json(out, "configuration.json", &json!({ "config": cfg, "configuration": s.config }))?;
    write(out, "curve.csv", &curve_to_csv(&s.curve)?)
}

#[derive(Serialize)]
struct TauSensitivity {
    tau_scale: f64,
    projections: Vec<Projection>,
    max_relative_change_sphere: f64,
}

/// Weighted deviation norms and projections of the assembled surface, with
/// the projections repeated at doubled cutoff radii.
pub fn verify(cfg: &RunConfig, out: &Path) -> Result<WeightedNormReport> {
    let (p, s) = surface(cfg, out)?;
    let norm = deviation_report(&s, &p, &cfg.norms)?;
    let opts = cfg.projection_options();
    let base = projections(&s, &p, &opts)?;
    let doubled = ProjectionOptions { tau_scale: 2.0 * opts.tau_scale, ..opts };
    let alt = projections(&s, &p, &doubled)?;
    let change = base.iter().zip(&alt).filter(|(a, _)| a.sphere != 0.0).map(|(a, b)| ((b.sphere - a.sphere) / a.sphere).abs()).fold(0.0, f64::max);
    let tau = TauSensitivity { tau_scale: doubled.tau_scale, projections: alt, max_relative_change_sphere: change };
    let r = &norm.regions;
    let rows = vec![
        vec!["sphere".into(), num(r.sphere)],
        vec!["transition".into(), num(r.transition)],
        vec!["neck".into(), num(r.neck)],
        vec!["delaunay".into(), num(r.delaunay)],
        vec!["global".into(), num(norm.global)],
    ];
    write(out, "verify.csv", &table_csv(&["region", "weighted_sup"], &rows)?)?;
    write_json(out, "verify.json", &json!({ "config": cfg, "norms": norm, "projections": base, "tau_sensitivity": tau }))?;
    Ok(norm)
}

/// Weighted deviation over the r grid with log-log slopes of the measured
/// norm and of the dominant predicted term.
pub fn sweep(cfg: &RunConfig, out: &Path) -> Result<(f64, f64)> {
    let sw = &cfg.sweep;
    if sw.r_grid.is_empty() {
        return Err(Error::InvalidConfig("sweep needs a non-empty r grid".into()));
    }
    let mut points = Vec::new();
    for &r in &sw.r_grid {
        let mut c = cfg.clone();
        c.geometry.r = r;
        c.geometry.k = sw.k;
        let n = match c.geometry.kind {
            cmcglue::assembly::Kind::Finite => sw.k,
            cmcglue::assembly::Kind::OneEnded => sw.k + 1,
        };
        c.geometry.eps = match sw.eps_rule {
            EpsRule::Cube => Some(vec![sw.eps_factor * r.powi(3); n]),
            EpsRule::Solved => None,
        };
        c.geometry.delta = None;
        let (p, s) = surface(&c, &out.join(format!("r{r:e}")))?;
        let rep = deviation_report(&s, &p, &cfg.norms)?;
        let eps = s.config.eps.iter().fold(0.0f64, |m, e| m.max(*e));
        points.push((r, eps, rep));
    }
    let rs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let measured: Vec<f64> = points.iter().map(|p| p.2.global).collect();
    let predicted: Vec<f64> = points.iter().map(|p| p.2.dominant_value).collect();
    let fit = |v: &[f64]| if rs.len() > 1 && v.iter().all(|x| *x > 0.0) { loglog_slope(&rs, v) } else { f64::NAN };
    let (ms, ps) = (fit(&measured), fit(&predicted));
    let rows: Vec<Vec<String>> = points.iter().map(|(r, e, rep)| vec![num(*r), num(*e), num(rep.global), rep.dominant_term.clone(), num(rep.dominant_value), num(ms), num(ps)]).collect();
    write(out, "sweep.csv", &table_csv(&["r", "eps", "measured", "dominant_term", "predicted", "measured_slope", "predicted_slope"], &rows)?)?;
    let pts: Vec<_> = points.iter().map(|(r, e, rep)| json!({ "r": r, "eps": e, "report": rep })).collect();
    write_json(out, "sweep.json", &json!({ "config": cfg, "points": pts, "measured_slope": ms, "predicted_slope": ps }))?;
    Ok((ms, ps))
}

pub fn export(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (_, s) = surface(cfg, out)?;
    write(out, "curve.csv", &curve_to_csv(&s.curve)?)?;
    write(out, "surface.obj", &curve_to_obj(&s.curve, cfg.export.angular_res)?)
}
