//! Scenario files: which models, test functions and directions to verify.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gaussproc::{catalog, CmTerm, ProcessSpec};
use crate::heatkernel::TestFunction;
use crate::itoverify::{Mutations, Observable};
use crate::regulated::Side;
use crate::stieltjes::{LsOptions, YsOptions};

pub const SCHEMA_VERSION: u32 = 1;

/// Growth exponent used for `exp` when the scenario does not give one.
pub const DEFAULT_EXP_GROWTH: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    pub models: Vec<ModelEntry>,
    pub functions: Vec<FunctionEntry>,
    #[serde(default)]
    pub h: HBattery,
    /// Number of grid intervals used by the `auto` battery.
    #[serde(default = "default_h_grid")]
    pub h_grid: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub integration: Integration,
    #[serde(default)]
    pub mutations: Mutations,
    #[serde(default)]
    pub mc: Option<McControls>,
    #[serde(default)]
    pub output: Output,
}

fn default_horizon() -> f64 {
    1.0
}

fn default_h_grid() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub id: String,
    #[serde(default)]
    pub params: Value,
}

/// A registry id (`x`, `x2`, `x3`, `sin`, `exp`) or an object with
/// parameters, e.g. `{"id": "poly", "coeffs": [1, 0, 2]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionEntry {
    Id(String),
    Spec(FunctionSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub id: String,
    /// Growth exponent `a`.
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default)]
    pub amp: Option<f64>,
    #[serde(default)]
    pub freq: Option<f64>,
    #[serde(default)]
    pub phase: Option<f64>,
    #[serde(default)]
    pub rate: Option<f64>,
}

impl FunctionEntry {
    pub fn build(&self) -> Result<TestFunction> {
        let spec = match self {
            FunctionEntry::Id(id) => FunctionSpec {
                id: id.clone(),
                a: None,
                coeffs: None,
                amp: None,
                freq: None,
                phase: None,
                rate: None,
            },
            FunctionEntry::Spec(s) => s.clone(),
        };
        let f = match spec.id.as_str() {
            "x" => TestFunction::monomial(1),
            "x2" | "x^2" => TestFunction::monomial(2),
            "x3" | "x^3" => TestFunction::monomial(3),
            "poly" => {
                let coeffs = spec
                    .coeffs
                    .clone()
                    .ok_or_else(|| Error::Config("`poly` needs `coeffs`".into()))?;
                TestFunction::polynomial(coeffs)?
            }
            "sin" => TestFunction::sine(
                spec.amp.unwrap_or(1.0),
                spec.freq.unwrap_or(1.0),
                spec.phase.unwrap_or(0.0),
            )?,
            "exp" => TestFunction::exponential(
                spec.amp.unwrap_or(1.0),
                spec.rate.unwrap_or(1.0),
                spec.a.unwrap_or(DEFAULT_EXP_GROWTH),
            )?,
            other => return Err(Error::UnknownFunction(other.to_string())),
        };
        match spec.a {
            Some(a) if spec.id != "exp" => f.with_growth_rate(a),
            _ => Ok(f),
        }
    }
}

/// `"auto"` or an explicit list of first-chaos elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HBattery {
    Keyword(HKeyword),
    Explicit(Vec<Vec<CmTerm>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HKeyword {
    Auto,
}

impl Default for HBattery {
    fn default() -> Self {
        HBattery::Keyword(HKeyword::Auto)
    }
}

/// Directions built from a uniform grid `t_k = kT/n`, its midpoints and the
/// one-sided values at every recorded discontinuity.
pub fn auto_battery(spec: &ProcessSpec, n: usize) -> Vec<Vec<CmTerm>> {
    let t_max = spec.horizon();
    let n = n.max(1);
    let grid: Vec<f64> = (1..=n).map(|k| t_max * k as f64 / n as f64).collect();
    let mut out = vec![
        vec![CmTerm::new(1.0, t_max)],
        vec![CmTerm::new(1.0, grid[0])],
        grid.iter()
            .enumerate()
            .map(|(k, &t)| CmTerm::new(if k % 2 == 0 { 1.0 } else { -1.0 } / (k + 1) as f64, t))
            .collect(),
        (0..n)
            .map(|k| CmTerm::new(1.0 / n as f64, t_max * (k as f64 + 0.5) / n as f64))
            .collect(),
    ];
    for r in spec.discontinuities() {
        let mut h = vec![CmTerm::sided(1.0, r.s, Side::Left), CmTerm::new(0.5, r.s)];
        if r.s < t_max {
            h.push(CmTerm::sided(0.25, r.s, Side::Right));
        }
        out.push(h);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub polynomial: f64,
    pub transcendental: f64,
    pub z_max: f64,
    /// Bound on the relative L² residual of the pathwise martingale check.
    pub martingale_l2: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            polynomial: 1e-8,
            transcendental: 1e-6,
            z_max: 4.0,
            martingale_l2: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    /// General S-transform residual for every case.
    pub stransform: bool,
    /// Reduced residual for martingale and stochastically RCLL models.
    pub rcll: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            stransform: true,
            rcll: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Integration {
    pub ys: YsOptions,
    pub ls: LsOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McControls {
    pub n_paths: usize,
    pub seeds: Vec<u64>,
    /// Grid intervals for path simulation.
    pub grid_intervals: usize,
    /// Pathwise martingale check for every martingale model and function.
    pub martingale: bool,
    /// Path quadratic variation for every Brownian-driven model.
    pub path_qv: bool,
    /// Hermite inner products between consecutive battery elements.
    pub hermite: bool,
    /// S-transform observables paired with every battery element, using
    /// the first function.
    pub observables: Vec<Observable>,
}

impl Default for McControls {
    fn default() -> Self {
        Self {
            n_paths: 10_000,
            seeds: vec![1],
            grid_intervals: 1024,
            martingale: false,
            path_qv: false,
            hermite: false,
            observables: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: Option<PathBuf>,
    pub report: String,
    pub terms: String,
    pub timings: String,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            dir: None,
            report: "report.json".into(),
            terms: "terms.csv".into(),
            timings: "timings.csv".into(),
        }
    }
}

/// Parses a scenario; schema violations carry the JSON path of the
/// offending field.
pub fn parse_scenario(bytes: &[u8]) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Config(format!("{path}: {}", e.into_inner()))
    })?;
    if scenario.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "schema_version: expected {SCHEMA_VERSION}, got {}",
            scenario.schema_version
        )));
    }
    if scenario.models.is_empty() || scenario.functions.is_empty() {
        return Err(Error::Config("models and functions must be non-empty".into()));
    }
    Ok(scenario)
}

/// A scenario with every model, function and direction instantiated and
/// validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub models: Vec<ProcessSpec>,
    pub functions: Vec<TestFunction>,
    /// Battery per model.
    pub batteries: Vec<Vec<Vec<CmTerm>>>,
}

fn at(path: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Config(msg) => Error::Config(format!("{path}: {msg}")),
        Error::GrowthViolation { a, bound } => Error::Config(format!(
            "{path}: growth constraint violated, a = {a} must be < 1/(4*lambda) = {bound}"
        )),
        other => Error::Config(format!("{path}: {other}")),
    }
}

impl Scenario {
    pub fn resolve(&self) -> Result<Resolved> {
        let models = self
            .models
            .iter()
            .enumerate()
            .map(|(i, m)| catalog(&m.id, &m.params, self.horizon).map_err(at(format!("models[{i}]"))))
            .collect::<Result<Vec<_>>>()?;
        let functions = self
            .functions
            .iter()
            .enumerate()
            .map(|(j, f)| f.build().map_err(at(format!("functions[{j}]"))))
            .collect::<Result<Vec<_>>>()?;
        for (i, m) in models.iter().enumerate() {
            for (j, f) in functions.iter().enumerate() {
                for k in 0..=2 {
                    f.derivative(k)
                        .check_growth(m.lambda())
                        .map_err(at(format!("models[{i}] x functions[{j}]")))?;
                }
            }
        }
        let batteries = models
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let battery = match &self.h {
                    HBattery::Keyword(HKeyword::Auto) => auto_battery(m, self.h_grid),
                    HBattery::Explicit(list) => list.clone(),
                };
                for (k, h) in battery.iter().enumerate() {
                    m.cm_element(h.clone()).map_err(at(format!("h[{k}] for models[{i}]")))?;
                }
                Ok(battery)
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(mc) = &self.mc {
            if mc.n_paths < 2 {
                return Err(Error::Config("mc.n_paths: at least two paths are needed".into()));
            }
            if mc.grid_intervals == 0 {
                return Err(Error::Config("mc.grid_intervals: must be positive".into()));
            }
        }
        Ok(Resolved {
            models,
            functions,
            batteries,
        })
    }
}
