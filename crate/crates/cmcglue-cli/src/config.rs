use cmcglue::ambient::{MetricProfile, Parity, Regime};
use cmcglue::assembly::Kind;
use cmcglue::balance::{BalanceOptions, ProjectionOptions, FLUX_GRID};
use cmcglue::error::{Error, Result};
use cmcglue::norms::NormParams;
use serde::{Deserialize, Serialize};

/// Ambient warping profile: a built-in name or an expression in t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    /// "flat", "one-ended-exp" or "even-bump".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// β of the even bump.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(default = "default_parity")]
    pub parity: Parity,
    #[serde(default = "default_regime")]
    pub regime: Regime,
    /// Domain [lo, hi] of an expression profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
}

fn default_parity() -> Parity {
    Parity::Even
}

fn default_regime() -> Regime {
    Regime::FiniteLength
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self { name: Some("even-bump".into()), beta: Some(-0.5), expression: None, parity: Parity::Even, regime: Regime::FiniteLength, domain: None }
    }
}

impl ProfileSpec {
    pub fn build(&self) -> Result<MetricProfile> {
        match (&self.name, &self.expression) {
            (Some(_), Some(_)) => Err(Error::InvalidConfig("profile takes either a name or an expression, not both".into())),
            (None, None) => Err(Error::InvalidConfig("profile needs a name or an expression".into())),
            (Some(n), None) => match n.as_str() {
                "flat" => Ok(MetricProfile::flat()),
                "one-ended-exp" => Ok(MetricProfile::one_ended_exp()),
                "even-bump" => MetricProfile::even_bump(self.beta.unwrap_or(1.0)),
                other => Err(Error::InvalidConfig(format!("unknown profile {other:?}"))),
            },
            (None, Some(e)) => {
                let [lo, hi] = self.domain.unwrap_or(match self.regime {
                    Regime::FiniteLength => [-5.0, 5.0],
                    Regime::OneEnded => [0.0, 20.0],
                });
                MetricProfile::expression(e, lo, hi, self.parity, self.regime)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySpec {
    pub kind: Kind,
    pub r: f64,
    pub k: usize,
    /// Center of sphere 0 for the one-ended kind.
    pub origin: f64,
    /// Delaunay periods kept by the one-ended assembly.
    pub periods: usize,
    /// Explicit neck scales; when absent they are solved for.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self { kind: Kind::Finite, r: 0.01, k: 10, origin: 0.5, periods: 2, eps: None, delta: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub max_iter: usize,
    pub tol_factor: f64,
    pub solve_delta: bool,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = BalanceOptions::default();
        Self { max_iter: d.max_iter, tol_factor: d.tol_factor, solve_delta: d.solve_delta }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSpec {
    pub flux_grid: Vec<f64>,
    /// (r, ε) points of the paired-δ neck runs.
    pub c0_points: Vec<[f64; 2]>,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        Self { flux_grid: FLUX_GRID.to_vec(), c0_points: vec![[0.02, 8e-6], [0.01, 1e-6]] }
    }
}

/// How the neck scales of each sweep point are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsRule {
    /// ε = factor · r³ for every neck.
    Cube,
    /// Balanced scales from the solver.
    Solved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub r_grid: Vec<f64>,
    pub eps_rule: EpsRule,
    pub eps_factor: f64,
    /// Sphere count K of the swept chains.
    pub k: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { r_grid: vec![0.04, 0.02, 0.01], eps_rule: EpsRule::Cube, eps_factor: 1.0, k: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { lo: None, hi: None, n: 101 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportSpec {
    pub angular_res: usize,
}

impl Default for ExportSpec {
    fn default() -> Self {
        Self { angular_res: 64 }
    }
}

/// Everything a command needs; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileSpec,
    pub geometry: GeometrySpec,
    pub solver: SolverSpec,
    pub norms: NormParams,
    pub projection: ProjectionOptions,
    pub calibration: CalibrationSpec,
    pub sweep: SweepSpec,
    pub curvature: GridSpec,
    pub export: ExportSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::default(),
            geometry: GeometrySpec::default(),
            solver: SolverSpec::default(),
            norms: NormParams { nu_bar: Some(-0.1), ..NormParams::new(1.5) },
            projection: ProjectionOptions::default(),
            calibration: CalibrationSpec::default(),
            sweep: SweepSpec::default(),
            curvature: GridSpec::default(),
            export: ExportSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidConfig(m));
        self.norms.validate(self.geometry.kind).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let g = &self.geometry;
        if !(g.r > 0.0 && g.r < 0.25) {
            return invalid(format!("r = {} outside (0, 0.25)", g.r));
        }
        if g.k == 0 {
            return invalid("K must be at least 1".into());
        }
        let grid = &self.sweep.r_grid;
        if grid.iter().any(|r| !(*r > 0.0)) || grid.windows(2).any(|w| w[1] >= w[0]) {
            return invalid("sweep r grid must be positive and strictly decreasing".into());
        }
        if self.export.angular_res < 3 {
            return invalid("angular resolution must be at least 3".into());
        }
        if self.curvature.n < 2 {
            return invalid("curvature grid needs at least two points".into());
        }
        if self.projection.refine == 0 || !(self.projection.tau_scale > 0.0) {
            return invalid("projection refine must be positive and tau_scale > 0".into());
        }
        Ok(())
    }

    pub fn balance_options(&self) -> BalanceOptions {
        BalanceOptions { origin: self.geometry.origin, periods: self.geometry.periods, solve_delta: self.solver.solve_delta, max_iter: self.solver.max_iter, tol_factor: self.solver.tol_factor }
    }

    pub fn projection_options(&self) -> ProjectionOptions {
        self.projection
    }
}
