//! Regulated functions on `[0, T]`.
//!
//! A [`RegulatedFunction`] is stored as a continuous base plus a finite,
//! time-ordered list of jumps. Every jump carries its own left jump
//! `Δ⁻u(s) = u(s) - u(s-)` and right jump `Δ⁺u(s) = u(s+) - u(s)`, so the
//! one-sided limits are exact and the jump functional `σ₂` is a finite sum.
//!
//! Conventions: `u(0-) = u(0)` and `u(T+) = u(T)`, hence a jump at `0` has no
//! left part and a jump at `T` has no right part.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Continuous part of a regulated function, optionally with its derivative.
///
/// The derivative is only needed when the function is used as a
/// Lebesgue-Stieltjes integrator.
#[derive(Clone)]
pub struct Smooth {
    value: ScalarFn,
    derivative: Option<ScalarFn>,
}

impl Smooth {
    pub fn new(value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            derivative: None,
        }
    }

    pub fn with_derivative(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Some(Arc::new(derivative)),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::with_derivative(move |_| c, |_| 0.0)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `t ↦ slope·t + intercept`.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::with_derivative(move |t| slope * t + intercept, move |_| slope)
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn derivative(&self) -> Option<&ScalarFn> {
        self.derivative.as_ref()
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// Linear combination `Σ cᵢ·fᵢ`. The derivative is kept only when every
    /// term has one.
    pub fn combine(terms: &[(f64, Smooth)]) -> Self {
        let values: Vec<(f64, ScalarFn)> =
            terms.iter().map(|(c, s)| (*c, s.value.clone())).collect();
        let derivs: Option<Vec<(f64, ScalarFn)>> = terms
            .iter()
            .map(|(c, s)| s.derivative.clone().map(|d| (*c, d)))
            .collect();
        let value: ScalarFn = Arc::new(move |t| values.iter().map(|(c, f)| c * f(t)).sum());
        let derivative = derivs.map(|ds| -> ScalarFn {
            Arc::new(move |t| ds.iter().map(|(c, f)| c * f(t)).sum())
        });
        Self { value, derivative }
    }
}

impl fmt::Debug for Smooth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Smooth")
            .field("has_derivative", &self.has_derivative())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub time: f64,
    /// `u(s) - u(s-)`
    pub minus: f64,
    /// `u(s+) - u(s)`
    pub plus: f64,
}

impl Jump {
    pub fn left(time: f64, minus: f64) -> Self {
        Self {
            time,
            minus,
            plus: 0.0,
        }
    }

    pub fn new(time: f64, minus: f64, plus: f64) -> Self {
        Self { time, minus, plus }
    }
}

/// Which one-sided version of a point is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    At,
    Right,
}

#[derive(Clone)]
pub struct RegulatedFunction {
    horizon: f64,
    base: Smooth,
    jumps: Vec<Jump>,
    /// prefix[k] = Σ_{j<k} (minus_j + plus_j)
    prefix: Vec<f64>,
    /// Points where the base is not smooth (kinks, derivative singularities).
    breakpoints: Vec<f64>,
}

impl fmt::Debug for RegulatedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegulatedFunction")
            .field("horizon", &self.horizon)
            .field("jumps", &self.jumps)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl RegulatedFunction {
    pub fn new(horizon: f64, base: Smooth, mut jumps: Vec<Jump>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidFunction(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        for pair in jumps.windows(2) {
            if pair[1].time <= pair[0].time {
                return Err(Error::InvalidFunction(format!(
                    "jump times must be strictly increasing ({} then {})",
                    pair[0].time, pair[1].time
                )));
            }
        }
        for j in &jumps {
            if !(0.0..=horizon).contains(&j.time) {
                return Err(Error::InvalidFunction(format!(
                    "jump time {} outside [0, {horizon}]",
                    j.time
                )));
            }
            if !(j.minus.is_finite() && j.plus.is_finite()) {
                return Err(Error::InvalidFunction(format!(
                    "non-finite jump at {}",
                    j.time
                )));
            }
            if j.time == 0.0 && j.minus != 0.0 {
                return Err(Error::InvalidFunction(
                    "a left jump at 0 contradicts u(0-) = u(0)".into(),
                ));
            }
            if j.time == horizon && j.plus != 0.0 {
                return Err(Error::InvalidFunction(
                    "a right jump at T contradicts u(T+) = u(T)".into(),
                ));
            }
        }
        jumps.retain(|j| j.minus != 0.0 || j.plus != 0.0);
        let mut prefix = Vec::with_capacity(jumps.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for j in &jumps {
            acc += j.minus + j.plus;
            prefix.push(acc);
        }
        Ok(Self {
            horizon,
            base,
            jumps,
            prefix,
            breakpoints: Vec::new(),
        })
    }

    pub fn continuous(horizon: f64, base: Smooth) -> Result<Self> {
        Self::new(horizon, base, Vec::new())
    }

    pub fn zero(horizon: f64) -> Result<Self> {
        Self::continuous(horizon, Smooth::zero())
    }

    /// `t ↦ t` on `[0, T]`.
    pub fn identity(horizon: f64) -> Result<Self> {
        Self::continuous(horizon, Smooth::affine(1.0, 0.0))
    }

    /// Pure jump function with a single jump at `s`.
    pub fn step(horizon: f64, s: f64, minus: f64, plus: f64) -> Result<Self> {
        Self::new(horizon, Smooth::zero(), vec![Jump::new(s, minus, plus)])
    }

    /// Declares points at which the base is not smooth; integration engines
    /// keep them as partition points.
    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(
            points
                .into_iter()
                .filter(|p| (0.0..=self.horizon).contains(p)),
        );
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
        self
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn base(&self) -> &Smooth {
        &self.base
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn jump_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.jumps.iter().map(|j| j.time)
    }

    /// Jump times and breakpoints, sorted and deduplicated.
    pub fn pins(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.jump_times().chain(self.breakpoints.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn jump_at(&self, t: f64) -> Option<&Jump> {
        let idx = self.jumps.partition_point(|j| j.time < t);
        self.jumps.get(idx).filter(|j| j.time == t)
    }

    /// `u(t-)`; no domain check.
    #[inline]
    pub fn left(&self, t: f64) -> f64 {
        let idx = self.jumps.partition_point(|j| j.time < t);
        self.base.value(t) + self.prefix[idx]
    }

    /// `u(t)`; no domain check.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        let idx = self.jumps.partition_point(|j| j.time < t);
        let mut v = self.base.value(t) + self.prefix[idx];
        if let Some(j) = self.jumps.get(idx).filter(|j| j.time == t) {
            v += j.minus;
        }
        v
    }

    /// `u(t+)`; no domain check.
    #[inline]
    pub fn right(&self, t: f64) -> f64 {
        let idx = self.jumps.partition_point(|j| j.time < t);
        let mut v = self.base.value(t) + self.prefix[idx];
        if let Some(j) = self.jumps.get(idx).filter(|j| j.time == t) {
            v += j.minus;
            v += j.plus;
        }
        v
    }

    #[inline]
    pub fn at_side(&self, t: f64, side: Side) -> f64 {
        match side {
            Side::Left => self.left(t),
            Side::At => self.value(t),
            Side::Right => self.right(t),
        }
    }

    pub fn delta_minus(&self, t: f64) -> f64 {
        self.jump_at(t).map_or(0.0, |j| j.minus)
    }

    pub fn delta_plus(&self, t: f64) -> f64 {
        self.jump_at(t).map_or(0.0, |j| j.plus)
    }

    /// Returns `(u(t-), u(t), u(t+))`.
    pub fn one_sided_limits(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.check_domain(t)?;
        Ok((self.left(t), self.value(t), self.right(t)))
    }

    pub(crate) fn check_domain(&self, t: f64) -> Result<()> {
        if (0.0..=self.horizon).contains(&t) {
            Ok(())
        } else {
            Err(Error::domain("t", t, 0.0, self.horizon))
        }
    }

    /// `Σ cᵢ·uᵢ`. All inputs must share the horizon; coinciding jump times
    /// are merged.
    pub fn linear_combination(horizon: f64, terms: &[(f64, &RegulatedFunction)]) -> Result<Self> {
        if let Some((_, bad)) = terms.iter().find(|(_, u)| u.horizon != horizon) {
            return Err(Error::InvalidFunction(format!(
                "horizon mismatch: {} vs {horizon}",
                bad.horizon
            )));
        }
        let base = Smooth::combine(
            &terms
                .iter()
                .map(|(c, u)| (*c, u.base.clone()))
                .collect::<Vec<_>>(),
        );
        let mut jumps: Vec<Jump> = Vec::new();
        for (c, u) in terms {
            for j in &u.jumps {
                jumps.push(Jump::new(j.time, c * j.minus, c * j.plus));
            }
        }
        jumps.sort_by(|a, b| a.time.total_cmp(&b.time));
        let mut merged: Vec<Jump> = Vec::with_capacity(jumps.len());
        for j in jumps {
            match merged.last_mut() {
                Some(last) if last.time == j.time => {
                    last.minus += j.minus;
                    last.plus += j.plus;
                }
                _ => merged.push(j),
            }
        }
        let breakpoints: Vec<f64> = terms
            .iter()
            .flat_map(|(_, u)| u.breakpoints.iter().copied())
            .collect();
        Ok(Self::new(horizon, base, merged)?.with_breakpoints(breakpoints))
    }

    /// The continuous part `u - Σ jumps` as a regulated function without jumps.
    pub fn continuous_part(&self) -> Self {
        Self {
            horizon: self.horizon,
            base: self.base.clone(),
            jumps: Vec::new(),
            prefix: vec![0.0],
            breakpoints: self.breakpoints.clone(),
        }
    }
}

/// A partition `0 = t₀ < t₁ < … < tₙ = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    points: Vec<f64>,
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPartition("need at least two points".into()));
        }
        if points[0] != 0.0 {
            return Err(Error::InvalidPartition(format!(
                "first point must be 0, got {}",
                points[0]
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPartition("non-finite point".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition(format!(
                "points must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { points })
    }

    pub fn uniform(horizon: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("need at least one interval".into()));
        }
        let mut points: Vec<f64> = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
        points[n] = horizon;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().expect("non-empty")
    }

    pub fn len_intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// Adds points (inside `[0, T]`) and returns the resulting refinement.
    pub fn with_points(&self, extra: impl IntoIterator<Item = f64>) -> Self {
        let t = self.horizon();
        let mut points = self.points.clone();
        points.extend(extra.into_iter().filter(|p| *p > 0.0 && *p < t));
        points.sort_by(f64::total_cmp);
        points.dedup();
        Self { points }
    }

    pub fn is_refinement_of(&self, coarser: &Partition) -> bool {
        self.horizon() == coarser.horizon()
            && coarser
                .points
                .iter()
                .all(|p| self.points.binary_search_by(|q| q.total_cmp(p)).is_ok())
    }

    fn check_horizon(&self, horizon: f64) -> Result<()> {
        if self.horizon() == horizon {
            Ok(())
        } else {
            Err(Error::InvalidPartition(format!(
                "partition ends at {} but the function lives on [0, {horizon}]",
                self.horizon()
            )))
        }
    }
}

/// `Σ |u(tⱼ) - u(tⱼ₋₁)|^p` over the partition.
pub fn p_variation(u: &RegulatedFunction, p: f64, pi: &Partition) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain {
            what: "p",
            value: p,
            domain: "[1, ∞)".into(),
        });
    }
    pi.check_horizon(u.horizon())?;
    let vals: Vec<f64> = pi.points().iter().map(|&t| u.value(t)).collect();
    Ok(vals.windows(2).map(|w| (w[1] - w[0]).abs().powf(p)).sum())
}

/// `σ₂(u) = Σ |Δ⁻u(s)|² + Σ |Δ⁺u(s)|²`.
pub fn sigma2(u: &RegulatedFunction) -> f64 {
    u.jumps().iter().map(|j| j.minus * j.minus + j.plus * j.plus).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct W2StarOutcome {
    /// Quadratic sum over the final partition.
    pub estimate: f64,
    pub sigma2: f64,
    pub converged: bool,
    pub rounds: usize,
    pub final_points: usize,
}

/// Drives the quadratic sum `Σ|u(sᵢ) - u(sᵢ₋₁)|²` towards `σ₂(u)` by
/// refinement.
///
/// Jump times are inserted into the initial partition. Each round bisects the
/// intervals whose excess `|Δu|² - |Δ⁺u(sᵢ₋₁)|² - |Δ⁻u(sᵢ)|²` is at least half
/// of the largest excess; `max_refine` bounds the number of rounds.
pub fn w2star_criterion(
    u: &RegulatedFunction,
    initial: &Partition,
    tol: f64,
    max_refine: usize,
) -> Result<W2StarOutcome> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            what: "tol",
            value: tol,
            domain: "(0, ∞)".into(),
        });
    }
    initial.check_horizon(u.horizon())?;
    let s2 = sigma2(u);
    let mut points = initial.with_points(u.jump_times()).points;

    let excess = |a: f64, b: f64| -> f64 {
        let d = u.value(b) - u.value(a);
        let dp = u.delta_plus(a);
        let dm = u.delta_minus(b);
        d * d - dp * dp - dm * dm
    };
    let quad_sum = |pts: &[f64]| -> f64 {
        pts.windows(2)
            .map(|w| {
                let d = u.value(w[1]) - u.value(w[0]);
                d * d
            })
            .sum()
    };

    let mut rounds = 0;
    loop {
        let estimate = quad_sum(&points);
        let converged = (estimate - s2).abs() < tol;
        if converged || rounds >= max_refine {
            return Ok(W2StarOutcome {
                estimate,
                sigma2: s2,
                converged,
                rounds,
                final_points: points.len(),
            });
        }
        let ex: Vec<f64> = points.windows(2).map(|w| excess(w[0], w[1]).abs()).collect();
        let max = ex.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            // only possible if the sum already equals σ₂ up to rounding
            return Ok(W2StarOutcome {
                estimate,
                sigma2: s2,
                converged: (estimate - s2).abs() < tol,
                rounds,
                final_points: points.len(),
            });
        }
        let mut next = Vec::with_capacity(points.len() * 2);
        for (i, w) in points.windows(2).enumerate() {
            next.push(w[0]);
            if ex[i] >= 0.5 * max {
                let mid = 0.5 * (w[0] + w[1]);
                if mid > w[0] && mid < w[1] {
                    next.push(mid);
                }
            }
        }
        next.push(*points.last().unwrap());
        points = next;
        rounds += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ramp_with_step() -> RegulatedFunction {
        RegulatedFunction::new(1.0, Smooth::affine(1.0, 0.0), vec![Jump::left(0.5, 1.0)]).unwrap()
    }

    #[test]
    fn limits_at_a_left_jump() {
        let u = RegulatedFunction::new(1.0, Smooth::affine(1.0, 0.0), vec![Jump::left(0.5, 0.5)])
            .unwrap();
        assert_eq!(u.one_sided_limits(0.5).unwrap(), (0.5, 1.0, 1.0));
    }

    #[test]
    fn limits_of_continuous_function() {
        let u = RegulatedFunction::identity(1.0).unwrap();
        assert_eq!(u.one_sided_limits(0.3).unwrap(), (0.3, 0.3, 0.3));
    }

    #[test]
    fn limits_before_a_step() {
        let u = RegulatedFunction::step(1.0, 0.5, 1.0, 0.0).unwrap();
        assert_eq!(u.one_sided_limits(0.25).unwrap(), (0.0, 0.0, 0.0));
        assert_eq!(u.one_sided_limits(0.75).unwrap(), (1.0, 1.0, 1.0));
    }

    #[test]
    fn two_sided_jump_consistency() {
        let u = RegulatedFunction::new(
            2.0,
            Smooth::new(|t: f64| t.sin()),
            vec![Jump::new(0.4, 0.3, -0.2), Jump::new(1.1, -1.0, 0.7)],
        )
        .unwrap();
        for s in [0.4, 1.1] {
            let (l, v, r) = u.one_sided_limits(s).unwrap();
            assert_eq!(l + u.delta_minus(s), v);
            assert_eq!(v + u.delta_plus(s), r);
        }
        // the right jump at 0.4 persists to later times
        assert_abs_diff_eq!(u.value(0.8), 0.8f64.sin() + 0.1, epsilon = 1e-15);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let u = RegulatedFunction::identity(1.0).unwrap();
        assert!(matches!(u.one_sided_limits(1.5), Err(Error::Domain { .. })));
        assert!(matches!(u.one_sided_limits(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn endpoint_conventions_are_enforced() {
        assert!(RegulatedFunction::step(1.0, 0.0, 1.0, 0.0).is_err());
        assert!(RegulatedFunction::step(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(RegulatedFunction::step(1.0, 0.0, 0.0, 1.0).is_ok());
        assert!(RegulatedFunction::new(
            1.0,
            Smooth::zero(),
            vec![Jump::left(0.6, 1.0), Jump::left(0.3, 1.0)]
        )
        .is_err());
    }

    #[test]
    fn p_variation_examples() {
        let id = RegulatedFunction::identity(1.0).unwrap();
        let pi = Partition::new(vec![0.0, 0.13, 0.5, 0.91, 1.0]).unwrap();
        assert_abs_diff_eq!(p_variation(&id, 1.0, &pi).unwrap(), 1.0, epsilon = 1e-15);

        let half = Partition::new(vec![0.0, 0.5, 1.0]).unwrap();
        let heaviside = RegulatedFunction::step(1.0, 0.5, 1.0, 0.0).unwrap();
        assert_eq!(p_variation(&heaviside, 2.0, &half).unwrap(), 1.0);

        // |1.5 - 0| + |2 - 1.5|
        assert_eq!(p_variation(&ramp_with_step(), 1.0, &half).unwrap(), 2.0);
        assert!(p_variation(&id, 0.5, &half).is_err());
    }

    #[test]
    fn sigma2_examples() {
        assert_eq!(sigma2(&RegulatedFunction::step(1.0, 0.5, 0.5, 0.0).unwrap()), 0.25);
        assert_eq!(sigma2(&RegulatedFunction::identity(1.0).unwrap()), 0.0);
        let u = RegulatedFunction::new(
            1.0,
            Smooth::zero(),
            vec![Jump::left(0.2, 0.3), Jump::new(0.7, 0.0, 0.4)],
        )
        .unwrap();
        assert_abs_diff_eq!(sigma2(&u), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn w2star_on_identity_converges_like_one_over_n() {
        let id = RegulatedFunction::identity(1.0).unwrap();
        let init = Partition::uniform(1.0, 1).unwrap();
        let out = w2star_criterion(&id, &init, 1e-3, 20).unwrap();
        assert!(out.converged);
        assert!(out.estimate <= 1e-3);
        // uniform dyadic refinement: estimate = 1/n exactly
        assert_eq!(out.estimate, 1.0 / (out.final_points - 1) as f64);
    }

    #[test]
    fn w2star_on_pure_jump_function_is_exact() {
        let u = RegulatedFunction::new(
            1.0,
            Smooth::zero(),
            vec![Jump::new(0.25, 0.5, -0.3), Jump::new(0.6, 1.0, 0.2)],
        )
        .unwrap();
        let out = w2star_criterion(&u, &Partition::uniform(1.0, 1).unwrap(), 1e-12, 10).unwrap();
        assert!(out.converged);
        assert_abs_diff_eq!(out.estimate, sigma2(&u), epsilon = 1e-14);
    }

    #[test]
    fn w2star_reports_non_convergence_without_error() {
        let id = RegulatedFunction::identity(1.0).unwrap();
        let out = w2star_criterion(&id, &Partition::uniform(1.0, 1).unwrap(), 1e-6, 3).unwrap();
        assert!(!out.converged);
        assert_eq!(out.rounds, 3);
    }

    #[test]
    fn linear_combination_merges_jumps() {
        let a = RegulatedFunction::step(1.0, 0.5, 1.0, 0.0).unwrap();
        let b = ramp_with_step();
        let c = RegulatedFunction::linear_combination(1.0, &[(2.0, &a), (-1.0, &b)]).unwrap();
        assert_eq!(c.jumps(), &[Jump::left(0.5, 1.0)]);
        for t in [0.0, 0.2, 0.5, 0.77, 1.0] {
            assert_abs_diff_eq!(c.value(t), 2.0 * a.value(t) - b.value(t), epsilon = 1e-15);
        }
    }

    #[test]
    fn partition_validation_and_refinement() {
        assert!(Partition::new(vec![0.0]).is_err());
        assert!(Partition::new(vec![0.1, 1.0]).is_err());
        assert!(Partition::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        let coarse = Partition::uniform(1.0, 2).unwrap();
        let fine = coarse.with_points([0.25, 0.8]);
        assert!(fine.is_refinement_of(&coarse));
        assert!(!coarse.is_refinement_of(&fine));
    }
}
