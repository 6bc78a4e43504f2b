//! Closed-form catalog of centered Gaussian processes with stochastic
//! discontinuities.
//!
//! Every model provides its covariance for one-sided versions of the
//! process (`X_{t-}`, `X_t`, `X_{t+}`), the variance function as a
//! [`RegulatedFunction`], and analytically derived [`DiscontinuityRecord`]s.

mod cm;
mod planar;
mod simulate;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regulated::{Jump, RegulatedFunction, Side, Smooth};

pub use cm::{cm_element, CameronMartinElement, CmTerm};
pub use planar::{planar_qv_sum, planar_variation_sum};
pub use simulate::{path_qv_mc, simulate_paths, simulate_points, PathSample};
pub(crate) use simulate::{path_rng, PathSampler, PointSampler};

/// One-sided moments of the process at a stochastic discontinuity `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscontinuityRecord {
    pub s: f64,
    /// `E[(Δ⁻X_s)²]`
    pub e_dminus_sq: f64,
    /// `E[(Δ⁺X_s)²]`
    pub e_dplus_sq: f64,
    /// `V(s-)`
    pub v_left: f64,
    /// `V(s)`
    pub v_at: f64,
    /// `V(s+)`
    pub v_right: f64,
    /// `E[X_{s-}²]`
    pub v_minus: f64,
    /// `E[X_{s+}²]`
    pub v_plus: f64,
    /// `E[X_{s-}·Δ⁻X_s]`
    pub e_xleft_dminus: f64,
    /// `E[X_s·Δ⁺X_s]`
    pub e_x_dplus: f64,
}

impl DiscontinuityRecord {
    /// `E[X_s·Δ⁻X_s]`
    pub fn e_x_dminus(&self) -> f64 {
        self.e_xleft_dminus + self.e_dminus_sq
    }

    /// `2E[X_sΔ⁺X_s] + E[(Δ⁺X_s)²] + V(s+) - V⁺(s) - (V(s+) - V(s))`
    pub fn right_identity_defect(&self) -> f64 {
        2.0 * self.e_x_dplus + self.e_dplus_sq + (self.v_right - self.v_plus)
            - (self.v_right - self.v_at)
    }

    /// `2E[X_sΔ⁻X_s] - E[(Δ⁻X_s)²] - (V(s-) - V⁻(s)) - (V(s) - V(s-))`
    pub fn left_identity_defect(&self) -> f64 {
        2.0 * self.e_x_dminus() - self.e_dminus_sq - (self.v_left - self.v_minus)
            - (self.v_at - self.v_left)
    }

    /// Contribution of this record to the summability condition on the
    /// discontinuity set.
    pub fn summability_contribution(&self) -> f64 {
        self.e_dplus_sq + (self.v_right - self.v_plus) + self.e_dminus_sq
            + (self.v_left - self.v_minus)
    }

    fn continuous_from_right(s: f64, v_left: f64, v_at: f64, v_minus: f64, e_dm: f64, e_xl: f64) -> Self {
        Self {
            s,
            e_dminus_sq: e_dm,
            e_dplus_sq: 0.0,
            v_left,
            v_at,
            v_right: v_at,
            v_minus,
            v_plus: v_at,
            e_xleft_dminus: e_xl,
            e_x_dplus: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Martingale,
    Rcll,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpSpec {
    pub time: f64,
    pub variance: f64,
}

fn default_depth() -> usize {
    20
}

/// Catalog models and their parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum Model {
    Brownian,
    Fbm {
        hurst: f64,
    },
    JumpBm {
        jumps: Vec<JumpSpec>,
    },
    CoupledJumpBm {
        c: f64,
        s0: f64,
    },
    Evanescent {
        s0: f64,
        #[serde(default = "default_depth")]
        depth: usize,
    },
}

impl Model {
    pub fn id(&self) -> &'static str {
        match self {
            Model::Brownian => "brownian",
            Model::Fbm { .. } => "fbm",
            Model::JumpBm { .. } => "jump_bm",
            Model::CoupledJumpBm { .. } => "coupled_jump_bm",
            Model::Evanescent { .. } => "evanescent",
        }
    }
}

/// Static description of a catalog entry.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub params: &'static str,
    pub exercises: &'static str,
}

pub const CATALOG: [CatalogEntry; 5] = [
    CatalogEntry {
        id: "brownian",
        params: "{}",
        exercises: "continuous Gaussian martingale; the classical Ito formula",
    },
    CatalogEntry {
        id: "fbm",
        params: "{\"hurst\": H in (0, 1)}",
        exercises: "stochastically continuous, non-semimartingale for H != 1/2; Wick-Ito formula with dV = d(t^{2H})",
    },
    CatalogEntry {
        id: "jump_bm",
        params: "{\"jumps\": [{\"time\": s in (0, T], \"variance\": sigma^2 > 0}, ...]}",
        exercises: "martingale equivalence and the stochastically RCLL formula, martingale case",
    },
    CatalogEntry {
        id: "coupled_jump_bm",
        params: "{\"c\": c != 0, \"s0\": s in (0, T]}",
        exercises: "stochastically RCLL non-martingale with E[X_{s-} dX_s] = c*s0 != 0",
    },
    CatalogEntry {
        id: "evanescent",
        params: "{\"s0\": s in (0, T], \"depth\": J in [2, 50] (default 20)}",
        exercises: "general formula with V^-(s0) < V(s0-): weak left limit 0, variance 1",
    },
];

/// A catalog process on `[0, T]`.
#[derive(Debug, Clone)]
pub struct ProcessSpec {
    model: Model,
    horizon: f64,
    variance: RegulatedFunction,
    discontinuities: Vec<DiscontinuityRecord>,
    lambda: f64,
    kind: ProcessKind,
}

/// `true` when the jump at `s` is already contained in `X_{t,side}`.
#[inline]
fn reached(s: f64, t: f64, side: Side) -> bool {
    match side {
        Side::Left => s < t,
        Side::At | Side::Right => s <= t,
    }
}

#[inline]
fn fbm_cov(h2: f64, t: f64, s: f64) -> f64 {
    if t == 0.0 || s == 0.0 {
        return 0.0;
    }
    0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2))
}

/// Index `j` of the dyadic interval `[a_j, a_{j+1})` of `[0, s0)` containing
/// `t`, where `a_j = s0·(1 - 2^{-j})`.
fn dyadic_index(s0: f64, t: f64) -> usize {
    let frac = 1.0 - t / s0;
    let mut j = if frac > 0.0 { (-frac.log2()).floor().max(0.0) as usize } else { 1100 };
    j = j.min(1100);
    while j > 0 && t < dyadic_point(s0, j) {
        j -= 1;
    }
    while t >= dyadic_point(s0, j + 1) && j < 1100 {
        j += 1;
    }
    j
}

#[inline]
fn dyadic_point(s0: f64, j: usize) -> f64 {
    s0 * (1.0 - 0.5f64.powi(j as i32))
}

/// Coordinates of `X_t` in the orthonormal sequence `ξ_0, ξ_1, …`.
fn evanescent_coords(s0: f64, t: f64) -> Option<[(usize, f64); 2]> {
    if t >= s0 {
        return None;
    }
    let j = dyadic_index(s0, t);
    let a = dyadic_point(s0, j);
    let len = s0 * 0.5f64.powi(j as i32 + 1);
    let theta = FRAC_PI_2 * ((t - a) / len).clamp(0.0, 1.0);
    Some([(j, theta.cos()), (j + 1, theta.sin())])
}

fn evanescent_cov(s0: f64, t: f64, s: f64) -> f64 {
    match (evanescent_coords(s0, t), evanescent_coords(s0, s)) {
        (Some(x), Some(y)) => {
            let mut acc = 0.0;
            for (i, a) in x {
                for (k, b) in y {
                    if i == k {
                        acc += a * b;
                    }
                }
            }
            acc
        }
        _ => 0.0,
    }
}

impl ProcessSpec {
    pub fn new(model: Model, horizon: f64) -> Result<Self> {
        let id = model.id();
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::param(id, format!("horizon must be positive, got {horizon}")));
        }
        let t_max = horizon;
        let in_range = |s: f64| s > 0.0 && s <= t_max;
        let (model, variance, records, lambda, kind) = match model {
            Model::Brownian => (
                model,
                RegulatedFunction::identity(horizon)?,
                Vec::new(),
                horizon,
                ProcessKind::Martingale,
            ),
            Model::Fbm { hurst } => {
                if !(hurst > 0.0 && hurst < 1.0) {
                    return Err(Error::param(id, format!("hurst must lie in (0, 1), got {hurst}")));
                }
                let h2 = 2.0 * hurst;
                let v = RegulatedFunction::continuous(
                    horizon,
                    Smooth::with_derivative(move |t: f64| t.powf(h2), move |t: f64| h2 * t.powf(h2 - 1.0)),
                )?;
                let kind = if hurst == 0.5 {
                    ProcessKind::Martingale
                } else {
                    ProcessKind::Rcll
                };
                (model, v, Vec::new(), horizon.powf(h2), kind)
            }
            Model::JumpBm { mut jumps } => {
                jumps.sort_by(|a, b| a.time.total_cmp(&b.time));
                for j in &jumps {
                    if !in_range(j.time) {
                        return Err(Error::param(id, format!("jump time {} outside (0, {horizon}]", j.time)));
                    }
                    if !(j.variance > 0.0 && j.variance.is_finite()) {
                        return Err(Error::param(id, format!("jump variance {} must be positive", j.variance)));
                    }
                }
                if jumps.windows(2).any(|w| w[0].time == w[1].time) {
                    return Err(Error::param(id, "duplicate jump time"));
                }
                let v = RegulatedFunction::new(
                    horizon,
                    Smooth::affine(1.0, 0.0),
                    jumps.iter().map(|j| Jump::left(j.time, j.variance)).collect(),
                )?;
                let mut acc = 0.0;
                let records = jumps
                    .iter()
                    .map(|j| {
                        let v_left = j.time + acc;
                        acc += j.variance;
                        DiscontinuityRecord::continuous_from_right(
                            j.time,
                            v_left,
                            v_left + j.variance,
                            v_left,
                            j.variance,
                            0.0,
                        )
                    })
                    .collect();
                let lambda = horizon + jumps.iter().map(|j| j.variance).sum::<f64>();
                (Model::JumpBm { jumps }, v, records, lambda, ProcessKind::Martingale)
            }
            Model::CoupledJumpBm { c, s0 } => {
                if !(c.is_finite() && c != 0.0) {
                    return Err(Error::param(id, format!("c must be finite and non-zero, got {c}")));
                }
                if !in_range(s0) {
                    return Err(Error::param(id, format!("s0 = {s0} outside (0, {horizon}]")));
                }
                let dv = s0 * (2.0 * c + c * c);
                let v = RegulatedFunction::new(horizon, Smooth::affine(1.0, 0.0), vec![Jump::left(s0, dv)])?
                    .with_breakpoints([s0]);
                let record = DiscontinuityRecord::continuous_from_right(
                    s0,
                    s0,
                    s0 * (1.0 + c) * (1.0 + c),
                    s0,
                    c * c * s0,
                    c * s0,
                );
                let lambda = s0.max(horizon + dv);
                (model, v, vec![record], lambda, ProcessKind::Rcll)
            }
            Model::Evanescent { s0, depth } => {
                if !in_range(s0) {
                    return Err(Error::param(id, format!("s0 = {s0} outside (0, {horizon}]")));
                }
                if !(2..=50).contains(&depth) {
                    return Err(Error::param(id, format!("depth must lie in [2, 50], got {depth}")));
                }
                let v = RegulatedFunction::new(horizon, Smooth::constant(1.0), vec![Jump::left(s0, -1.0)])?;
                let record = DiscontinuityRecord {
                    s: s0,
                    e_dminus_sq: 0.0,
                    e_dplus_sq: 0.0,
                    v_left: 1.0,
                    v_at: 0.0,
                    v_right: 0.0,
                    v_minus: 0.0,
                    v_plus: 0.0,
                    e_xleft_dminus: 0.0,
                    e_x_dplus: 0.0,
                };
                (model, v, vec![record], 1.0, ProcessKind::General)
            }
        };
        Ok(Self {
            model,
            horizon,
            variance,
            discontinuities: records,
            lambda,
            kind,
        })
    }

    pub fn brownian(horizon: f64) -> Result<Self> {
        Self::new(Model::Brownian, horizon)
    }

    pub fn fbm(hurst: f64, horizon: f64) -> Result<Self> {
        Self::new(Model::Fbm { hurst }, horizon)
    }

    /// Brownian motion plus independent `N(0, σ²)` jumps at the given
    /// `(time, σ²)` pairs.
    pub fn jump_bm(jumps: &[(f64, f64)], horizon: f64) -> Result<Self> {
        Self::new(
            Model::JumpBm {
                jumps: jumps
                    .iter()
                    .map(|&(time, variance)| JumpSpec { time, variance })
                    .collect(),
            },
            horizon,
        )
    }

    pub fn coupled_jump_bm(c: f64, s0: f64, horizon: f64) -> Result<Self> {
        Self::new(Model::CoupledJumpBm { c, s0 }, horizon)
    }

    pub fn evanescent(s0: f64, horizon: f64) -> Result<Self> {
        Self::new(Model::Evanescent { s0, depth: default_depth() }, horizon)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn variance(&self) -> &RegulatedFunction {
        &self.variance
    }

    pub fn discontinuities(&self) -> &[DiscontinuityRecord] {
        &self.discontinuities
    }

    /// `sup_{[0,T]} V`
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    /// Same process with the discontinuity records listed in a different
    /// order. `order` must be a permutation of the record indices.
    pub fn with_record_order(&self, order: &[usize]) -> Result<Self> {
        let n = self.discontinuities.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::Precondition("record order must be a permutation".into()));
        }
        let mut out = self.clone();
        out.discontinuities = order.iter().map(|&i| self.discontinuities[i]).collect();
        Ok(out)
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if (0.0..=self.horizon).contains(&t) {
            Ok(())
        } else {
            Err(Error::domain("t", t, 0.0, self.horizon))
        }
    }

    /// `true` if `t` is one of the recorded stochastic discontinuities.
    pub fn is_discontinuity(&self, t: f64) -> bool {
        self.discontinuities.iter().any(|r| r.s == t)
    }

    /// `E[X_{t,ts} X_{s,ss}]` for one-sided versions of the process. No
    /// domain check.
    pub fn cov(&self, t: f64, ts: Side, s: f64, ss: Side) -> f64 {
        // conventions X_{0-} = X_0 and X_{T+} = X_T
        let ts = self.normalize_side(t, ts);
        let ss = self.normalize_side(s, ss);
        match &self.model {
            Model::Brownian => t.min(s),
            Model::Fbm { hurst } => fbm_cov(2.0 * hurst, t, s),
            Model::JumpBm { jumps } => {
                let mut r = t.min(s);
                for j in jumps {
                    if reached(j.time, t, ts) && reached(j.time, s, ss) {
                        r += j.variance;
                    }
                }
                r
            }
            Model::CoupledJumpBm { c, s0 } => {
                let it = if reached(*s0, t, ts) { 1.0 } else { 0.0 };
                let is = if reached(*s0, s, ss) { 1.0 } else { 0.0 };
                t.min(s) + c * it * s0.min(s) + c * is * t.min(*s0) + c * c * s0 * it * is
            }
            Model::Evanescent { s0, .. } => {
                // the weak left limit at s0 is 0, like everything after s0;
                // below s0 the process is continuous
                evanescent_cov(*s0, t, s)
            }
        }
    }

    /// `R(t, s) = E[X_t X_s]`
    pub fn covariance(&self, t: f64, s: f64) -> Result<f64> {
        self.check_time(t)?;
        self.check_time(s)?;
        Ok(self.cov(t, Side::At, s, Side::At))
    }

    fn normalize_side(&self, t: f64, side: Side) -> Side {
        match side {
            Side::Left if t == 0.0 => Side::At,
            Side::Right if t == self.horizon => Side::At,
            other => other,
        }
    }

    /// `t ↦ E[X_t X_{ti,side}]` as a regulated function; its one-sided
    /// limits are the covariances with `X_{t-}` and `X_{t+}`.
    pub fn section(&self, ti: f64, side: Side) -> Result<RegulatedFunction> {
        self.check_time(ti)?;
        let horizon = self.horizon;
        let side = self.normalize_side(ti, side);
        let f = match &self.model {
            Model::Brownian => RegulatedFunction::continuous(horizon, Smooth::new(move |t: f64| t.min(ti)))?
                .with_breakpoints([ti]),
            Model::Fbm { hurst } => {
                let h2 = 2.0 * hurst;
                RegulatedFunction::continuous(horizon, Smooth::new(move |t: f64| fbm_cov(h2, t, ti)))?
                    .with_breakpoints([ti])
            }
            Model::JumpBm { jumps } => RegulatedFunction::new(
                horizon,
                Smooth::new(move |t: f64| t.min(ti)),
                jumps
                    .iter()
                    .filter(|j| reached(j.time, ti, side))
                    .map(|j| Jump::left(j.time, j.variance))
                    .collect(),
            )?
            .with_breakpoints([ti]),
            &Model::CoupledJumpBm { c, s0 } => {
                let ind = if reached(s0, ti, side) { 1.0 } else { 0.0 };
                let dminus = c * s0.min(ti) + c * c * s0 * ind;
                RegulatedFunction::new(
                    horizon,
                    Smooth::new(move |t: f64| t.min(ti) + c * ind * t.min(s0)),
                    vec![Jump::left(s0, dminus)],
                )?
                .with_breakpoints([ti, s0])
            }
            &Model::Evanescent { s0, depth } => {
                if ti >= s0 {
                    return RegulatedFunction::zero(horizon);
                }
                let j = dyadic_index(s0, ti);
                if j + 2 > depth {
                    return Err(Error::Precondition(format!(
                        "time {ti} lies beyond the resolved depth {depth} of the evanescent model"
                    )));
                }
                let lo = j.saturating_sub(1);
                let breaks: Vec<f64> = (lo..=j + 2).map(|k| dyadic_point(s0, k)).chain([ti, s0]).collect();
                RegulatedFunction::continuous(
                    horizon,
                    Smooth::new(move |t: f64| evanescent_cov(s0, t, ti)),
                )?
                .with_breakpoints(breaks)
            }
        };
        Ok(f)
    }

    /// Discontinuity record recomputed from the sided covariance; used to
    /// cross-check the closed-form records.
    pub fn record_from_covariance(&self, s: f64) -> DiscontinuityRecord {
        let c = |a: Side, b: Side| self.cov(s, a, s, b);
        let (ll, la) = (c(Side::Left, Side::Left), c(Side::Left, Side::At));
        let (aa, ar, rr) = (c(Side::At, Side::At), c(Side::At, Side::Right), c(Side::Right, Side::Right));
        DiscontinuityRecord {
            s,
            e_dminus_sq: aa - 2.0 * la + ll,
            e_dplus_sq: rr - 2.0 * ar + aa,
            v_left: self.variance.left(s),
            v_at: self.variance.value(s),
            v_right: self.variance.right(s),
            v_minus: ll,
            v_plus: rr,
            e_xleft_dminus: la - ll,
            e_x_dplus: ar - aa,
        }
    }
}

/// Builds a catalog process from a model id and a JSON parameter object.
pub fn catalog(id: &str, params: &serde_json::Value, horizon: f64) -> Result<ProcessSpec> {
    if !CATALOG.iter().any(|e| e.id == id) {
        return Err(Error::UnknownModel(id.to_string()));
    }
    let mut obj = match params {
        serde_json::Value::Null => serde_json::Map::new(),
        serde_json::Value::Object(m) => m.clone(),
        _ => return Err(Error::param(id, "parameters must be a JSON object")),
    };
    obj.insert("id".into(), serde_json::Value::String(id.to_string()));
    let model: Model = serde_json::from_value(serde_json::Value::Object(obj))
        .map_err(|e| Error::param(id, e.to_string()))?;
    ProcessSpec::new(model, horizon)
}
