//! Stieltjes-type integration against regulated integrators.
//!
//! * [`hk_riemann_sum`]: plain Riemann-Stieltjes sums over tagged partitions.
//! * [`young_stieltjes_sum`]: Young-Stieltjes sums, which split every cell
//!   into its two endpoint jumps and the open interior.
//! * [`integrate_ys`]: the refinement-mode Young-Stieltjes integral. Jump
//!   points are pinned, so the endpoint terms stay fixed while the interior
//!   sums are refined and extrapolated.
//! * [`integrate_ls`]: Lebesgue-Stieltjes integral for integrators whose
//!   continuous part has a derivative; atoms get mass `r(s+) - r(s-)`.
//! * [`chain_rule`]: all terms of the jump chain rule for `G(u₁, u₂)`.

use crate::error::{Error, Result};
use crate::quadrature::{de_point, tanh_sinh, Richardson};
use crate::regulated::RegulatedFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub start: f64,
    pub end: f64,
    pub tag: f64,
}

fn check_cells(cells: &[Cell], closed_tags: bool) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::InvalidPartition("no cells".into()));
    }
    if cells[0].start != 0.0 {
        return Err(Error::InvalidPartition("first cell must start at 0".into()));
    }
    for w in cells.windows(2) {
        if w[0].end != w[1].start {
            return Err(Error::InvalidPartition(format!(
                "cells are not contiguous at {} / {}",
                w[0].end, w[1].start
            )));
        }
    }
    for c in cells {
        if !(c.start < c.end) {
            return Err(Error::InvalidPartition(format!(
                "empty cell [{}, {}]",
                c.start, c.end
            )));
        }
        let ok = if closed_tags {
            c.start <= c.tag && c.tag <= c.end
        } else {
            c.start < c.tag && c.tag < c.end
        };
        if !ok {
            return Err(Error::InvalidPartition(format!(
                "tag {} not admissible for cell [{}, {}]",
                c.tag, c.start, c.end
            )));
        }
    }
    Ok(())
}

/// Tagged partition with tags in the closed cells.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPartition {
    cells: Vec<Cell>,
}

impl TaggedPartition {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        check_cells(&cells, true)?;
        Ok(Self { cells })
    }

    /// Uniform partition of `[0, T]` into `n` cells with left-endpoint tags.
    pub fn uniform_left(horizon: f64, n: usize) -> Result<Self> {
        let pts: Vec<f64> = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
        Self::new(
            pts.windows(2)
                .map(|w| Cell {
                    start: w[0],
                    end: w[1],
                    tag: w[0],
                })
                .collect(),
        )
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn horizon(&self) -> f64 {
        self.cells.last().unwrap().end
    }
}

/// Young-tagged partition: tags strictly inside the cells.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungTaggedPartition {
    cells: Vec<Cell>,
}

impl YoungTaggedPartition {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        check_cells(&cells, false)?;
        Ok(Self { cells })
    }

    /// Midpoint tags on the given partition points.
    pub fn midpoints(points: &[f64]) -> Result<Self> {
        Self::new(
            points
                .windows(2)
                .map(|w| Cell {
                    start: w[0],
                    end: w[1],
                    tag: 0.5 * (w[0] + w[1]),
                })
                .collect(),
        )
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn horizon(&self) -> f64 {
        self.cells.last().unwrap().end
    }

    pub fn points(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.cells.iter().map(|c| c.start).collect();
        p.push(self.horizon());
        p
    }
}

fn check_horizon(r: &RegulatedFunction, horizon: f64) -> Result<()> {
    if r.horizon() == horizon {
        Ok(())
    } else {
        Err(Error::InvalidPartition(format!(
            "partition covers [0, {horizon}] but the integrator lives on [0, {}]",
            r.horizon()
        )))
    }
}

/// `Σ u(yᵢ)(r(sᵢ) - r(sᵢ₋₁))`.
pub fn hk_riemann_sum<U: Fn(f64) -> f64>(
    u: U,
    r: &RegulatedFunction,
    tau: &TaggedPartition,
) -> Result<f64> {
    check_horizon(r, tau.horizon())?;
    Ok(tau
        .cells()
        .iter()
        .map(|c| u(c.tag) * (r.value(c.end) - r.value(c.start)))
        .sum())
}

/// `Σ u(sᵢ₋₁)Δ⁺r(sᵢ₋₁) + u(yᵢ)(r(sᵢ-) - r(sᵢ₋₁+)) + u(sᵢ)Δ⁻r(sᵢ)`.
pub fn young_stieltjes_sum<U: Fn(f64) -> f64>(
    u: U,
    r: &RegulatedFunction,
    tau: &YoungTaggedPartition,
) -> Result<f64> {
    check_horizon(r, tau.horizon())?;
    Ok(tau
        .cells()
        .iter()
        .map(|c| {
            let mut s = u(c.tag) * (r.left(c.end) - r.right(c.start));
            let dp = r.delta_plus(c.start);
            if dp != 0.0 {
                s += u(c.start) * dp;
            }
            let dm = r.delta_minus(c.end);
            if dm != 0.0 {
                s += u(c.end) * dm;
            }
            s
        })
        .sum())
}

/// How the cells between two pinned points are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grading {
    /// Equal cells, midpoint tags; refinement is plain bisection.
    Uniform,
    /// Cells equally spaced in the tanh-sinh parameter, which clusters
    /// points at the pinned ends. Tags are the images of parameter
    /// midpoints. Refinement halves the parameter step, so every level is a
    /// refinement of the previous one.
    DoubleExponential,
}

/// Half-width of the tanh-sinh parameter window used for graded partitions.
const DE_WINDOW: f64 = 3.5;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct YsOptions {
    pub tol: f64,
    /// Number of global refinements after the initial level.
    pub max_refine: usize,
    pub grading: Grading,
    /// Cells per pinned piece on the initial level.
    pub initial_cells: usize,
}

impl Default for YsOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_refine: 12,
            grading: Grading::DoubleExponential,
            initial_cells: 16,
        }
    }
}

impl YsOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YsOutcome {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
    /// Endpoint terms `u(s)Δ⁻r(s) + u(s)Δ⁺r(s)` at the pinned points.
    pub jump_part: f64,
    /// Extrapolated interior contribution.
    pub continuous_part: f64,
    /// Raw (non-extrapolated) Young-Stieltjes sum on the finest level.
    pub last_sum: f64,
    pub levels: usize,
}

fn pinned_points(r: &RegulatedFunction, extra: &[f64]) -> Vec<f64> {
    let t = r.horizon();
    let mut pts: Vec<f64> = vec![0.0, t];
    pts.extend(r.pins());
    pts.extend(extra.iter().copied());
    pts.retain(|p| (0.0..=t).contains(p));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Young-tagged cells of one piece `[a, b]` with `n` nominal cells.
///
/// Graded cells whose mapped tag rounds onto an endpoint are tagged at the
/// midpoint instead; cells that collapse in floating point are dropped.
fn piece_cells(a: f64, b: f64, n: usize, grading: Grading, out: &mut Vec<Cell>) {
    let map = |tau: f64| -> f64 {
        match grading {
            Grading::Uniform => a + (b - a) * tau,
            Grading::DoubleExponential => de_point(a, b, DE_WINDOW * (2.0 * tau - 1.0)),
        }
    };
    let mut start = a;
    for i in 0..n {
        let end = if i + 1 == n { b } else { map((i + 1) as f64 / n as f64) };
        if !(start < end) {
            continue;
        }
        let mut tag = map((i as f64 + 0.5) / n as f64);
        if !(start < tag && tag < end) {
            tag = 0.5 * (start + end);
        }
        if start < tag && tag < end {
            out.push(Cell { start, end, tag });
            start = end;
        }
        // otherwise the cell is two adjacent floats wide; it is absorbed by
        // the next one
    }
    if let Some(last) = out.last_mut() {
        last.end = b;
    }
}

fn level_cells(pinned: &[f64], cells_per_piece: usize, grading: Grading) -> Vec<Cell> {
    let mut cells = Vec::with_capacity(cells_per_piece * pinned.len());
    for w in pinned.windows(2) {
        piece_cells(w[0], w[1], cells_per_piece, grading, &mut cells);
    }
    cells
}

/// Materializes the Young-tagged partition that [`integrate_ys`] uses on
/// refinement level `level`.
pub fn ys_partition(
    r: &RegulatedFunction,
    pins: &[f64],
    level: usize,
    opts: &YsOptions,
) -> Result<YoungTaggedPartition> {
    let pinned = pinned_points(r, pins);
    YoungTaggedPartition::new(level_cells(&pinned, opts.initial_cells << level, opts.grading))
}

/// Young-Stieltjes integral `∫₀ᵀ u dr` in refinement mode.
///
/// The jump times and breakpoints of `r`, plus `pins` (discontinuities of
/// `u`), are kept as partition points on every level. Levels are global
/// refinements; the interior sums are extrapolated with a Richardson table.
/// Convergence requires both the difference of successive extrapolated
/// values and the Richardson column difference to be below `tol`.
pub fn integrate_ys<U: Fn(f64) -> f64>(
    u: U,
    r: &RegulatedFunction,
    pins: &[f64],
    opts: &YsOptions,
) -> Result<YsOutcome> {
    if !(opts.tol > 0.0) || opts.initial_cells == 0 {
        return Err(Error::Precondition(
            "tolerance must be positive and initial_cells >= 1".into(),
        ));
    }
    let pinned = pinned_points(r, pins);
    let base = r.base();

    // endpoint terms; the conventions Δ⁻r(0) = Δ⁺r(T) = 0 are built into r
    let jump_part: f64 = pinned
        .iter()
        .map(|&s| {
            let d = r.delta_minus(s) + r.delta_plus(s);
            if d != 0.0 {
                u(s) * d
            } else {
                0.0
            }
        })
        .sum();

    // interior: r(sᵢ-) - r(sᵢ₋₁+) only sees the base inside a piece
    let interior_sum = |cells_per_piece: usize| -> f64 {
        let cells = level_cells(&pinned, cells_per_piece, opts.grading);
        let mut total = 0.0;
        let mut prev_end = f64::NAN;
        let mut prev_val = 0.0;
        for c in &cells {
            let a = if c.start == prev_end { prev_val } else { base.value(c.start) };
            let b = base.value(c.end);
            total += u(c.tag) * (b - a);
            prev_end = c.end;
            prev_val = b;
        }
        total
    };

    let mut table = Richardson::new();
    let mut converged = false;
    let mut error = f64::INFINITY;
    for level in 0..=opts.max_refine {
        table.push(interior_sum(opts.initial_cells << level));
        if level >= 2 {
            error = table.successive_difference().max(table.column_difference());
            if error < opts.tol {
                converged = true;
                break;
            }
        }
    }
    let continuous_part = table.best();
    Ok(YsOutcome {
        value: jump_part + continuous_part,
        error_estimate: error,
        converged,
        jump_part,
        continuous_part,
        last_sum: jump_part + table.raw(),
        levels: table.levels(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LsOptions {
    pub tol: f64,
    pub max_levels: usize,
}

impl Default for LsOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_levels: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsOutcome {
    pub value: f64,
    /// `∫ u(s) r'_c(s) ds` over the continuous part.
    pub continuous_part: f64,
    /// `Σ u(s)(r(s+) - r(s-))`.
    pub atoms: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// Lebesgue-Stieltjes integral of `u` against the signed measure of `r`.
///
/// The continuous part needs the derivative of `r`'s base; without it the
/// integrator is rejected. `pins` lists discontinuities of `u`.
pub fn integrate_ls<U: Fn(f64) -> f64>(
    u: U,
    r: &RegulatedFunction,
    pins: &[f64],
    opts: &LsOptions,
) -> Result<LsOutcome> {
    let deriv = r.base().derivative().ok_or_else(|| {
        Error::UnsupportedIntegrator(
            "the continuous part carries no derivative, so no density is available".into(),
        )
    })?;
    let pinned = pinned_points(r, pins);
    let mut continuous_part = 0.0;
    let mut error_estimate = 0.0;
    let mut converged = true;
    for w in pinned.windows(2) {
        let q = tanh_sinh(|s| u(s) * deriv(s), w[0], w[1], opts.tol, opts.max_levels);
        continuous_part += q.value;
        error_estimate += q.error_estimate;
        converged &= q.converged;
    }
    let atoms: f64 = r
        .jumps()
        .iter()
        .map(|j| u(j.time) * (j.minus + j.plus))
        .sum();
    Ok(LsOutcome {
        value: continuous_part + atoms,
        continuous_part,
        atoms,
        error_estimate,
        converged,
    })
}

/// A C¹ function of two variables with its partial derivatives.
pub trait ScalarField2: Sync {
    fn value(&self, x1: f64, x2: f64) -> f64;
    fn d1(&self, x1: f64, x2: f64) -> f64;
    fn d2(&self, x1: f64, x2: f64) -> f64;
}

/// [`ScalarField2`] from three closures.
pub struct FnField<G, G1, G2> {
    pub g: G,
    pub d1: G1,
    pub d2: G2,
}

impl<G, G1, G2> ScalarField2 for FnField<G, G1, G2>
where
    G: Fn(f64, f64) -> f64 + Sync,
    G1: Fn(f64, f64) -> f64 + Sync,
    G2: Fn(f64, f64) -> f64 + Sync,
{
    fn value(&self, x1: f64, x2: f64) -> f64 {
        (self.g)(x1, x2)
    }
    fn d1(&self, x1: f64, x2: f64) -> f64 {
        (self.d1)(x1, x2)
    }
    fn d2(&self, x1: f64, x2: f64) -> f64 {
        (self.d2)(x1, x2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ChainRuleTerms {
    /// `G(u(T)) - G(u(0))`
    pub lhs: f64,
    pub int_u1: f64,
    pub int_u2: f64,
    pub left_jump_sum: f64,
    pub right_jump_sum: f64,
    pub residual: f64,
}

/// Evaluates every term of the jump chain rule for `G(u₁(t), u₂(t))`: a
/// Young-Stieltjes integral against `u₁`, a Lebesgue-Stieltjes integral
/// against the bounded-variation `u₂`, and the two jump sums over the union
/// of jump times.
///
/// The regularity of `G` required for the identity is not checked; the
/// residual is reported as is.
pub fn chain_rule<G: ScalarField2 + ?Sized>(
    g: &G,
    u1: &RegulatedFunction,
    u2: &RegulatedFunction,
    ys: &YsOptions,
    ls: &LsOptions,
) -> Result<ChainRuleTerms> {
    let t = u1.horizon();
    if u2.horizon() != t {
        return Err(Error::InvalidFunction("u1 and u2 must share the horizon".into()));
    }
    let pins: Vec<f64> = {
        let mut p = u1.pins();
        p.extend(u2.pins());
        p.sort_by(f64::total_cmp);
        p.dedup();
        p
    };
    let at = |s: f64| (u1.value(s), u2.value(s));

    let i1 = integrate_ys(|s| { let (a, b) = at(s); g.d1(a, b) }, u1, &pins, ys)?;
    if !i1.converged {
        return Err(Error::NotConverged {
            what: "Young-Stieltjes integral against u1",
            estimate: i1.value,
            error: i1.error_estimate,
        });
    }
    let i2 = integrate_ls(|s| { let (a, b) = at(s); g.d2(a, b) }, u2, &pins, ls)?;
    if !i2.converged {
        return Err(Error::NotConverged {
            what: "Lebesgue-Stieltjes integral against u2",
            estimate: i2.value,
            error: i2.error_estimate,
        });
    }

    let mut jump_times: Vec<f64> = u1.jump_times().chain(u2.jump_times()).collect();
    jump_times.sort_by(f64::total_cmp);
    jump_times.dedup();

    let mut left = 0.0;
    let mut right = 0.0;
    for &s in &jump_times {
        let (x1, x2) = at(s);
        let (d1, d2) = (g.d1(x1, x2), g.d2(x1, x2));
        let (m1, m2) = (u1.delta_minus(s), u2.delta_minus(s));
        if m1 != 0.0 || m2 != 0.0 {
            left += g.value(x1, x2) - g.value(u1.left(s), u2.left(s)) - d1 * m1 - d2 * m2;
        }
        let (p1, p2) = (u1.delta_plus(s), u2.delta_plus(s));
        if p1 != 0.0 || p2 != 0.0 {
            right += g.value(u1.right(s), u2.right(s)) - g.value(x1, x2) - d1 * p1 - d2 * p2;
        }
    }

    let (xt, x0) = (at(t), at(0.0));
    let lhs = g.value(xt.0, xt.1) - g.value(x0.0, x0.1);
    let residual = lhs - (i1.value + i2.value + left + right);
    Ok(ChainRuleTerms {
        lhs,
        int_u1: i1.value,
        int_u2: i2.value,
        left_jump_sum: left,
        right_jump_sum: right,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regulated::{Jump, Smooth};
    use approx::assert_abs_diff_eq;

    fn heaviside() -> RegulatedFunction {
        RegulatedFunction::step(1.0, 0.5, 1.0, 0.0).unwrap()
    }

    fn ramp_plus_step(height: f64) -> RegulatedFunction {
        RegulatedFunction::new(1.0, Smooth::affine(1.0, 0.0), vec![Jump::left(0.5, height)])
            .unwrap()
    }

    #[test]
    fn riemann_sum_examples() {
        let id = RegulatedFunction::identity(1.0).unwrap();
        let tau = TaggedPartition::uniform_left(1.0, 7).unwrap();
        assert_abs_diff_eq!(hk_riemann_sum(|_| 1.0, &id, &tau).unwrap(), 1.0, epsilon = 1e-15);
        let two = TaggedPartition::uniform_left(1.0, 2).unwrap();
        assert_eq!(hk_riemann_sum(|t| t, &id, &two).unwrap(), 0.25);
        assert_eq!(hk_riemann_sum(|_| 1.0, &heaviside(), &tau).unwrap(), 1.0);
    }

    #[test]
    fn young_sum_examples() {
        let tau = YoungTaggedPartition::midpoints(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(young_stieltjes_sum(|t| t, &heaviside(), &tau).unwrap(), 0.5);

        let id = RegulatedFunction::identity(1.0).unwrap();
        assert_eq!(young_stieltjes_sum(|t| t, &id, &tau).unwrap(), 0.5);

        let r = RegulatedFunction::new(
            1.0,
            Smooth::new(|t: f64| (3.0 * t).sin()),
            vec![Jump::new(0.0, 0.0, 0.4), Jump::new(0.3, -0.2, 0.5), Jump::left(1.0, 2.0)],
        )
        .unwrap();
        let tau = YoungTaggedPartition::midpoints(&[0.0, 0.3, 0.42, 0.9, 1.0]).unwrap();
        assert_abs_diff_eq!(
            young_stieltjes_sum(|_| 1.0, &r, &tau).unwrap(),
            r.value(1.0) - r.value(0.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn young_partition_rejects_boundary_tags() {
        let bad = Cell {
            start: 0.0,
            end: 1.0,
            tag: 0.0,
        };
        assert!(YoungTaggedPartition::new(vec![bad]).is_err());
        assert!(TaggedPartition::new(vec![bad]).is_ok());
    }

    #[test]
    fn integrate_ys_examples() {
        let id = RegulatedFunction::identity(1.0).unwrap();
        let opts = YsOptions::with_tol(1e-8);
        let out = integrate_ys(|t| t, &id, &[], &opts).unwrap();
        assert!(out.converged);
        assert_abs_diff_eq!(out.value, 0.5, epsilon = 1e-12);

        let out = integrate_ys(|t| t, &heaviside(), &[], &opts).unwrap();
        assert_abs_diff_eq!(out.value, 0.5, epsilon = 1e-15);

        let out = integrate_ys(|t| t, &ramp_plus_step(1.0), &[], &opts).unwrap();
        assert_abs_diff_eq!(out.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn graded_and_uniform_agree() {
        let r = RegulatedFunction::continuous(1.0, Smooth::new(|t: f64| t.powf(0.6))).unwrap();
        let u = |t: f64| (2.0 * t).cos();
        let de = integrate_ys(u, &r, &[], &YsOptions::with_tol(1e-12)).unwrap();
        // oracle: ∫₀¹ cos(2t)·0.6 t^{-0.4} dt via tanh-sinh on the density
        let q = tanh_sinh(|t: f64| (2.0 * t).cos() * 0.6 * t.powf(-0.4), 0.0, 1.0, 1e-14, 14);
        assert!(de.converged, "{de:?}");
        assert_abs_diff_eq!(de.value, q.value, epsilon = 1e-10);

        let smooth = RegulatedFunction::continuous(1.0, Smooth::new(|t: f64| t.exp())).unwrap();
        let uni = integrate_ys(
            u,
            &smooth,
            &[],
            &YsOptions {
                grading: Grading::Uniform,
                ..YsOptions::with_tol(1e-12)
            },
        )
        .unwrap();
        let de = integrate_ys(u, &smooth, &[], &YsOptions::with_tol(1e-12)).unwrap();
        assert!(uni.converged && de.converged);
        assert_abs_diff_eq!(uni.value, de.value, epsilon = 1e-11);
    }

    #[test]
    fn raw_level_sum_is_a_young_stieltjes_sum() {
        let r = RegulatedFunction::new(
            1.0,
            Smooth::new(|t: f64| t * t),
            vec![Jump::new(0.25, 0.5, -0.25), Jump::left(0.75, 1.0)],
        )
        .unwrap();
        let u = |t: f64| 1.0 + t.sin();
        let opts = YsOptions {
            max_refine: 2,
            tol: 1e-300,
            ..YsOptions::default()
        };
        let out = integrate_ys(u, &r, &[], &opts).unwrap();
        let tau = ys_partition(&r, &[], 2, &opts).unwrap();
        let direct = young_stieltjes_sum(u, &r, &tau).unwrap();
        assert_abs_diff_eq!(out.last_sum, direct, epsilon = 1e-13);
        let coarser = ys_partition(&r, &[], 1, &opts).unwrap();
        let fine_pts = tau.points();
        assert!(coarser
            .points()
            .iter()
            .all(|p| fine_pts.iter().any(|q| q == p)));
    }

    #[test]
    fn integrate_ls_examples() {
        let opts = LsOptions::default();
        let v = RegulatedFunction::identity(1.0).unwrap();
        assert_abs_diff_eq!(integrate_ls(|_| 1.0, &v, &[], &opts).unwrap().value, 1.0, epsilon = 1e-14);
        let v = ramp_plus_step(0.25);
        assert_abs_diff_eq!(integrate_ls(|_| 1.0, &v, &[], &opts).unwrap().value, 1.25, epsilon = 1e-14);
        assert_abs_diff_eq!(integrate_ls(|t| t, &v, &[], &opts).unwrap().value, 0.625, epsilon = 1e-14);
    }

    #[test]
    fn integrate_ls_needs_a_density() {
        let r = RegulatedFunction::continuous(1.0, Smooth::new(|t| t)).unwrap();
        assert!(matches!(
            integrate_ls(|_| 1.0, &r, &[], &LsOptions::default()),
            Err(Error::UnsupportedIntegrator(_))
        ));
    }

    #[test]
    fn product_rule() {
        let g = FnField {
            g: |a: f64, b: f64| a * b,
            d1: |_a: f64, b: f64| b,
            d2: |a: f64, _b: f64| a,
        };
        let id = RegulatedFunction::identity(1.0).unwrap();
        let terms = chain_rule(&g, &id, &id, &YsOptions::default(), &LsOptions::default()).unwrap();
        assert_abs_diff_eq!(terms.lhs, 1.0);
        assert_abs_diff_eq!(terms.int_u1, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(terms.int_u2, 0.5, epsilon = 1e-12);
        assert_eq!(terms.left_jump_sum, 0.0);
        assert_eq!(terms.right_jump_sum, 0.0);
        assert!(terms.residual.abs() < 1e-12);
    }

    #[test]
    fn square_of_jumping_ramp() {
        let g = FnField {
            g: |a: f64, _b: f64| a * a,
            d1: |a: f64, _b: f64| 2.0 * a,
            d2: |_a: f64, _b: f64| 0.0,
        };
        let u1 = ramp_plus_step(1.0);
        let u2 = RegulatedFunction::zero(1.0).unwrap();
        let terms = chain_rule(&g, &u1, &u2, &YsOptions::default(), &LsOptions::default()).unwrap();
        assert_eq!(terms.lhs, 4.0);
        // 2.25 - 0.25 - 3·1
        assert_abs_diff_eq!(terms.left_jump_sum, -1.0, epsilon = 1e-15);
        // ∫₀^½ 2t dt + ∫_½^1 2(t+1) dt + 2·1.5·1
        assert_abs_diff_eq!(terms.int_u1, 5.0, epsilon = 1e-12);
        assert!(terms.residual.abs() < 1e-12);
    }

    #[test]
    fn sine_chain_rule() {
        let g = FnField {
            g: |a: f64, _b: f64| a.sin(),
            d1: |a: f64, _b: f64| a.cos(),
            d2: |_a: f64, _b: f64| 0.0,
        };
        let id = RegulatedFunction::identity(1.0).unwrap();
        let zero = RegulatedFunction::zero(1.0).unwrap();
        let terms = chain_rule(&g, &id, &zero, &YsOptions::with_tol(1e-10), &LsOptions::default())
            .unwrap();
        assert!(terms.residual.abs() < 1e-8);
    }
}
