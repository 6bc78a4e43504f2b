use serde::{Deserialize, Serialize};

use super::{ItoCase, Observable};
use crate::error::{Error, Result};
use crate::gaussproc::{path_rng, CameronMartinElement, CmTerm, PathSampler, PointSampler, ProcessKind, ProcessSpec};
use crate::regulated::{Partition, Side};
use crate::stats::McReport;
use rayon::prelude::*;

fn check_paths(n_paths: usize) -> Result<()> {
    if n_paths < 2 {
        return Err(Error::Precondition(format!(
            "Monte Carlo estimates need at least two paths, got {n_paths}"
        )));
    }
    Ok(())
}

/// Distinct sided points shared by several linear functionals.
pub(super) struct PointTable {
    points: Vec<(f64, Side)>,
}

impl PointTable {
    pub(super) fn new() -> Self {
        Self { points: Vec::new() }
    }

    pub(super) fn index(&mut self, t: f64, side: Side) -> usize {
        if let Some(i) = self.points.iter().position(|&(u, s)| u == t && s == side) {
            return i;
        }
        self.points.push((t, side));
        self.points.len() - 1
    }

    pub(super) fn terms(&mut self, terms: &[CmTerm]) -> Vec<(f64, usize)> {
        terms.iter().map(|t| (t.coeff, self.index(t.time, t.side))).collect()
    }
}

pub(super) fn linear(terms: &[(f64, usize)], x: &[f64]) -> f64 {
    terms.iter().map(|&(a, i)| a * x[i]).sum()
}

/// Draws `n_paths` joint samples of the table points and maps each one.
pub(super) fn map_points<R: Send>(
    spec: &ProcessSpec,
    table: &PointTable,
    n_paths: usize,
    seed: u64,
    f: impl Fn(&[f64]) -> R + Sync,
) -> Result<Vec<R>> {
    let sampler = PointSampler::new(spec, &table.points)?;
    let n = table.points.len();
    Ok((0..n_paths)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |x, path| {
                sampler.draw(&mut path_rng(seed, path), x);
                f(x)
            },
        )
        .collect())
}

/// Pathwise check of the reduced Itô formula for Gaussian martingales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleItoReport {
    /// `sqrt(mean residual²) / sqrt(mean lhs²)`
    pub relative_l2: f64,
    pub rms_residual: f64,
    pub rms_lhs: f64,
    /// Mean residual against the reference 0.
    pub mean_residual: McReport,
    pub grid_intervals: usize,
}

/// Simulates the martingale on `grid` (with the jump times added) and
/// evaluates, per path,
/// `F(X_T) - F(X_0) - Σ F'(X_{tᵢ₋₁})(ΔXᵢ - Jᵢ) - ½ Σ F''(X_{tᵢ₋₁}) ΔV^c_i`
/// `- Σ_s [F(X_s) - F(X_{s-}) + F''(X_{s-}) E[X_{s-}Δ⁻X_s]]`,
/// where `Jᵢ` is the exactly drawn jump inside the i-th interval. The
/// residual vanishes as the grid is refined.
pub fn martingale_ito_mc(case: &ItoCase, grid: &Partition, n_paths: usize, seed: u64) -> Result<MartingaleItoReport> {
    check_paths(n_paths)?;
    let spec = case.spec();
    if spec.kind() != ProcessKind::Martingale {
        return Err(Error::Precondition(format!(
            "the pathwise check needs a Gaussian martingale, `{}` is not one",
            spec.model().id()
        )));
    }
    let grid = grid.with_points(spec.discontinuities().iter().map(|r| r.s));
    let sampler = PathSampler::new(spec, &grid)?;
    let times = sampler.times().to_vec();
    let landing: Vec<usize> = spec
        .discontinuities()
        .iter()
        .map(|r| times.partition_point(|&t| t < r.s))
        .collect();
    let e_xleft: Vec<f64> = spec.discontinuities().iter().map(|r| r.e_xleft_dminus).collect();
    let vc = spec.variance().continuous_part();
    let dvc: Vec<f64> = times.windows(2).map(|w| vc.value(w[1]) - vc.value(w[0])).collect();
    let (f, f1, f2) = (case.derivative(0), case.derivative(1), case.derivative(2));

    let pairs = sampler.map_paths(n_paths, seed, |x, xi| {
        let m = x.len();
        let lhs = f.f(x[m - 1]) - f.f(x[0]);
        let mut rhs = 0.0;
        for i in 1..m {
            let mut jump = 0.0;
            for (k, &at) in landing.iter().enumerate() {
                if at == i {
                    jump += xi[k];
                }
            }
            rhs += f1.f(x[i - 1]) * (x[i] - x[i - 1] - jump) + 0.5 * f2.f(x[i - 1]) * dvc[i - 1];
        }
        for (k, &at) in landing.iter().enumerate() {
            let (after, before) = (x[at], x[at] - xi[k]);
            rhs += f1.f(before) * xi[k];
            rhs += f.f(after) - f.f(before) - f1.f(before) * xi[k] + f2.f(before) * e_xleft[k];
        }
        (lhs, lhs - rhs)
    });
    let n = n_paths as f64;
    let rms_lhs = (pairs.iter().map(|p| p.0 * p.0).sum::<f64>() / n).sqrt();
    let rms_residual = (pairs.iter().map(|p| p.1 * p.1).sum::<f64>() / n).sqrt();
    let residuals: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(MartingaleItoReport {
        relative_l2: rms_residual / rms_lhs,
        rms_residual,
        rms_lhs,
        mean_residual: McReport::from_samples(&residuals, 0.0, seed),
        grid_intervals: grid.len_intervals(),
    })
}

/// Monte Carlo estimate of `(Sξ)(h) = E[exp⋄(h)·ξ]` with
/// `exp⋄(h) = exp(h - ½E[h²])` and the exact `E[h²]`. The reference is the
/// closed form from [`super::s_transform`].
pub fn mc_s_transform(case: &ItoCase, obs: &Observable, n_paths: usize, seed: u64) -> Result<McReport> {
    check_paths(n_paths)?;
    let spec = case.spec();
    let reference = super::s_transform(case, obs)?;
    let mut table = PointTable::new();
    let h = table.terms(case.h().terms());
    let h_half = 0.5 * case.h().norm_sq();
    let samples = match obs {
        Observable::Value { t, side } => {
            let i = table.index(*t, *side);
            map_points(spec, &table, n_paths, seed, |x| (linear(&h, x) - h_half).exp() * x[i])?
        }
        Observable::Function { derivative, t, side } => {
            let i = table.index(*t, *side);
            let g = case.derivative(*derivative);
            map_points(spec, &table, n_paths, seed, |x| (linear(&h, x) - h_half).exp() * g.f(x[i]))?
        }
        Observable::WickExp { g } => {
            let g_half = 0.5 * spec.pairing(g, g);
            let g = table.terms(g);
            map_points(spec, &table, n_paths, seed, |x| {
                (linear(&h, x) - h_half).exp() * (linear(&g, x) - g_half).exp()
            })?
        }
        Observable::JumpPairing { record, a } => {
            let r = spec.discontinuities()[*record];
            let (l, s) = (table.index(r.s, Side::Left), table.index(r.s, Side::At));
            let half = 0.5 * a * a * r.e_dminus_sq;
            map_points(spec, &table, n_paths, seed, |x| {
                let d = x[s] - x[l];
                ((a * d - half).exp() - 1.0) * d
            })?
        }
    };
    Ok(McReport::from_samples(&samples, reference, seed))
}

/// Monte Carlo estimate of `E[P₂(g)P₂(h)]` with `P₂(x) = x² - E[x²]`; the
/// reference is `2E[gh]²`.
pub fn hermite_p2_identity_mc(
    spec: &ProcessSpec,
    g: &CameronMartinElement,
    h: &CameronMartinElement,
    n_paths: usize,
    seed: u64,
) -> Result<McReport> {
    check_paths(n_paths)?;
    let mut table = PointTable::new();
    let gi = table.terms(g.terms());
    let hi = table.terms(h.terms());
    let (g2, h2) = (g.norm_sq(), h.norm_sq());
    let samples = map_points(spec, &table, n_paths, seed, |x| {
        let (a, b) = (linear(&gi, x), linear(&hi, x));
        (a * a - g2) * (b * b - h2)
    })?;
    let gh = spec.pairing(g.terms(), h.terms());
    Ok(McReport::from_samples(&samples, 2.0 * gh * gh, seed))
}
