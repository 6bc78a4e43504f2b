//! Exact Gaussian path simulation.
//!
//! Each path owns a ChaCha8 stream selected by its index, so results do not
//! depend on how rayon schedules the work.

use nalgebra::{Cholesky, DMatrix};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{Model, ProcessSpec};
use crate::error::{Error, Result};
use crate::regulated::{Partition, Side};
use crate::stats::McReport;

/// Simulated values on a grid plus the exact left jumps `Δ⁻X_s` at the
/// recorded discontinuities.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub times: Vec<f64>,
    /// `n_paths × times.len()`
    pub values: Array2<f64>,
    pub jump_times: Vec<f64>,
    /// `n_paths × jump_times.len()`
    pub jumps: Array2<f64>,
}

pub(crate) fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Lower Cholesky factor of the covariance of the given sided points, with
/// escalating diagonal jitter `1e-12·λ … 1e-8·λ`.
fn factor(spec: &ProcessSpec, points: &[(f64, Side)]) -> Result<DMatrix<f64>> {
    let n = points.len();
    let gram = DMatrix::from_fn(n, n, |i, j| {
        spec.cov(points[i].0, points[i].1, points[j].0, points[j].1)
    });
    let lambda = spec.lambda().max(f64::MIN_POSITIVE);
    let mut jitter = 1e-12 * lambda;
    loop {
        let mut m = gram.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        if let Some(ch) = Cholesky::new(m) {
            return Ok(ch.l());
        }
        if jitter >= 1e-8 * lambda {
            return Err(Error::Factorization { jitter });
        }
        jitter *= 10.0;
    }
}

/// Draws joint values at a fixed list of sided points.
///
/// Points that are almost surely equal to an earlier point are copied from
/// it, points with zero variance are exact zeros, and the rest go through a
/// Cholesky factor.
#[derive(Debug, Clone)]
pub(crate) struct PointSampler {
    n_points: usize,
    /// `(target, source)`: copy of an earlier point
    aliases: Vec<(usize, usize)>,
    active: Vec<usize>,
    chol: DMatrix<f64>,
}

impl PointSampler {
    pub(crate) fn new(spec: &ProcessSpec, points: &[(f64, Side)]) -> Result<Self> {
        for (t, _) in points {
            spec.check_time(*t)?;
        }
        let c = |a: (f64, Side), b: (f64, Side)| spec.cov(a.0, a.1, b.0, b.1);
        let tol = 1e-14 * spec.lambda().max(f64::MIN_POSITIVE);
        let mut aliases = Vec::new();
        let mut active: Vec<usize> = Vec::new();
        'points: for (i, &p) in points.iter().enumerate() {
            let var = c(p, p);
            if var <= 0.0 {
                continue;
            }
            for &k in &active {
                let q = points[k];
                if var + c(q, q) - 2.0 * c(p, q) <= tol {
                    aliases.push((i, k));
                    continue 'points;
                }
            }
            active.push(i);
        }
        let active_points: Vec<(f64, Side)> = active.iter().map(|&i| points[i]).collect();
        let chol = factor(spec, &active_points)?;
        Ok(Self {
            n_points: points.len(),
            aliases,
            active,
            chol,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.n_points
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let k = self.active.len();
        let z: Vec<f64> = (0..k).map(|_| normal(rng)).collect();
        out.fill(0.0);
        for (a, &i) in self.active.iter().enumerate() {
            let row = self.chol.row(a);
            out[i] = (0..=a).map(|b| row[b] * z[b]).sum();
        }
        for &(i, k) in &self.aliases {
            out[i] = out[k];
        }
    }
}

/// Joint draws of `X_{t,side}` at arbitrary sided points.
pub fn simulate_points(spec: &ProcessSpec, points: &[(f64, Side)], n_paths: usize, seed: u64) -> Result<Array2<f64>> {
    let sampler = PointSampler::new(spec, points)?;
    let n = points.len();
    let mut flat = vec![0.0; n_paths * n];
    if n > 0 {
        flat.par_chunks_mut(n).enumerate().for_each(|(path, row)| {
            sampler.draw(&mut path_rng(seed, path), row);
        });
    }
    Ok(Array2::from_shape_vec((n_paths, n), flat).expect("shape matches"))
}

enum Strategy {
    /// Brownian increments plus independent jumps landing in `landing[k]`.
    Independent { jumps: Vec<(f64, f64)>, landing: Vec<usize> },
    /// Grid points followed by `(s, Left), (s, At)` for every record.
    Joint(PointSampler),
}

/// Per-path generator of grid values and left jumps.
pub(crate) struct PathSampler {
    times: Vec<f64>,
    jump_times: Vec<f64>,
    strategy: Strategy,
}

impl PathSampler {
    /// Brownian motion and jump models with independent jumps are simulated
    /// through independent increments; every other model goes through a joint
    /// Cholesky factorization that also includes `X_{s-}` at each recorded
    /// discontinuity.
    pub(crate) fn new(spec: &ProcessSpec, grid: &Partition) -> Result<Self> {
        if grid.horizon() != spec.horizon() {
            return Err(Error::InvalidPartition(format!(
                "grid ends at {} but the process lives on [0, {}]",
                grid.horizon(),
                spec.horizon()
            )));
        }
        let times = grid.points().to_vec();
        let jump_times: Vec<f64> = spec.discontinuities().iter().map(|r| r.s).collect();
        let independent: Option<Vec<(f64, f64)>> = match spec.model() {
            Model::Brownian => Some(Vec::new()),
            // records may be permuted, so follow their order
            Model::JumpBm { jumps } => Some(
                jump_times
                    .iter()
                    .map(|&s| {
                        let j = jumps.iter().find(|j| j.time == s).expect("record for every jump");
                        (j.time, j.variance)
                    })
                    .collect(),
            ),
            _ => None,
        };
        let strategy = match independent {
            Some(jumps) => {
                // jump k lands in the first grid interval (t_{i-1}, t_i] with s_k <= t_i
                let landing = jumps.iter().map(|(s, _)| times.partition_point(|&t| t < *s)).collect();
                Strategy::Independent { jumps, landing }
            }
            None => {
                let mut points: Vec<(f64, Side)> = times.iter().map(|&t| (t, Side::At)).collect();
                for &s in &jump_times {
                    points.push((s, Side::Left));
                    points.push((s, Side::At));
                }
                Strategy::Joint(PointSampler::new(spec, &points)?)
            }
        };
        Ok(Self {
            times,
            jump_times,
            strategy,
        })
    }

    pub(crate) fn times(&self) -> &[f64] {
        &self.times
    }

    /// Fills `values` (one per grid time) and `jumps` (one per record).
    pub(crate) fn draw(&self, seed: u64, path: usize, values: &mut [f64], jumps: &mut [f64]) {
        let mut rng = path_rng(seed, path);
        match &self.strategy {
            Strategy::Independent { jumps: spec_jumps, landing } => {
                for (k, (_, v)) in spec_jumps.iter().enumerate() {
                    jumps[k] = v.sqrt() * normal(&mut rng);
                }
                let mut x = 0.0;
                values[0] = 0.0;
                for i in 1..self.times.len() {
                    x += (self.times[i] - self.times[i - 1]).sqrt() * normal(&mut rng);
                    for (k, &at) in landing.iter().enumerate() {
                        if at == i {
                            x += jumps[k];
                        }
                    }
                    values[i] = x;
                }
            }
            Strategy::Joint(sampler) => {
                let m = self.times.len();
                let mut all = vec![0.0; sampler.len()];
                sampler.draw(&mut rng, &mut all);
                values.copy_from_slice(&all[..m]);
                for k in 0..self.jump_times.len() {
                    jumps[k] = all[m + 2 * k + 1] - all[m + 2 * k];
                }
            }
        }
    }

    /// Applies `f(values, jumps)` to every path in parallel and returns the
    /// results in path order.
    pub(crate) fn map_paths<R, F>(&self, n_paths: usize, seed: u64, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&[f64], &[f64]) -> R + Sync,
    {
        let (m, q) = (self.times.len(), self.jump_times.len());
        (0..n_paths)
            .into_par_iter()
            .map_init(
                || (vec![0.0; m], vec![0.0; q]),
                |(values, jumps), path| {
                    self.draw(seed, path, values, jumps);
                    f(values, jumps)
                },
            )
            .collect()
    }
}

/// Draws `n_paths` paths on the grid together with the exact left jumps at
/// the recorded discontinuities.
pub fn simulate_paths(spec: &ProcessSpec, grid: &Partition, n_paths: usize, seed: u64) -> Result<PathSample> {
    let sampler = PathSampler::new(spec, grid)?;
    let (m, q) = (sampler.times.len(), sampler.jump_times.len());
    let mut values = Array2::zeros((n_paths, m));
    let mut jumps = Array2::zeros((n_paths, q));
    let rows = sampler.map_paths(n_paths, seed, |v, j| (v.to_vec(), j.to_vec()));
    for (p, (v, j)) in rows.into_iter().enumerate() {
        values.row_mut(p).assign(&ndarray::ArrayView1::from(&v));
        jumps.row_mut(p).assign(&ndarray::ArrayView1::from(&j));
    }
    Ok(PathSample {
        times: sampler.times,
        values,
        jump_times: sampler.jump_times,
        jumps,
    })
}

/// Monte Carlo mean of `Σ (X_{tᵢ} - X_{tᵢ₋₁})²` against
/// `V^c(T) - V^c(0) + Σ_s (E[(Δ⁻X_s)²] + E[(Δ⁺X_s)²])`.
///
impl ProcessSpec {
    /// Continuous part is a Brownian motion, so pathwise quadratic variation
    /// is `V^c` plus the squared jumps.
    pub fn is_brownian_driven(&self) -> bool {
        match self.model() {
            Model::Brownian | Model::JumpBm { .. } | Model::CoupledJumpBm { .. } => true,
            Model::Fbm { hurst } => *hurst == 0.5,
            Model::Evanescent { .. } => false,
        }
    }
}

/// Recorded discontinuity times are added to the grid. Only models whose
/// continuous part is a Brownian motion qualify; rough or smooth fractional
/// paths have infinite or zero quadratic variation.
pub fn path_qv_mc(spec: &ProcessSpec, grid: &Partition, n_paths: usize, seed: u64) -> Result<McReport> {
    if !spec.is_brownian_driven() {
        return Err(Error::Precondition(format!(
            "pathwise quadratic variation matches V^c plus jumps only for Brownian-driven models, not `{}`",
            spec.model().id()
        )));
    }
    let grid = grid.with_points(spec.discontinuities().iter().map(|r| r.s));
    let sampler = PathSampler::new(spec, &grid)?;
    let qv = sampler.map_paths(n_paths, seed, |v, _| v.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>());
    let vc = spec.variance().continuous_part();
    let reference = vc.value(spec.horizon()) - vc.value(0.0)
        + spec
            .discontinuities()
            .iter()
            .map(|r| r.e_dminus_sq + r.e_dplus_sq)
            .sum::<f64>();
    Ok(McReport::from_samples(&qv, reference, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_cov(values: &Array2<f64>, i: usize, j: usize) -> (f64, f64) {
        let n = values.nrows() as f64;
        let prod: Vec<f64> = values.rows().into_iter().map(|r| r[i] * r[j]).collect();
        let mean = prod.iter().sum::<f64>() / n;
        let var = prod.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn empty_request_gives_empty_matrix() {
        let b = ProcessSpec::brownian(1.0).unwrap();
        let s = simulate_paths(&b, &Partition::uniform(1.0, 4).unwrap(), 0, 1).unwrap();
        assert_eq!(s.values.dim(), (0, 5));
        let f = ProcessSpec::fbm(0.3, 1.0).unwrap();
        let s = simulate_paths(&f, &Partition::uniform(1.0, 4).unwrap(), 0, 1).unwrap();
        assert_eq!(s.values.nrows(), 0);
    }

    #[test]
    fn brownian_sample_covariance() {
        let b = ProcessSpec::brownian(1.0).unwrap();
        let grid = Partition::new(vec![0.0, 0.5, 1.0]).unwrap();
        let s = simulate_paths(&b, &grid, 100_000, 42).unwrap();
        let expected = [[0.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                let (m, se) = sample_cov(&s.values, i, j);
                if expected[i][j] == 0.0 {
                    assert_eq!(m, 0.0);
                } else {
                    assert!((m - expected[i][j]).abs() <= 4.0 * se, "({i},{j}) {m} ± {se}");
                }
            }
        }
    }

    #[test]
    fn cholesky_path_matches_covariance() {
        let f = ProcessSpec::fbm(0.3, 1.0).unwrap();
        let grid = Partition::uniform(1.0, 4).unwrap();
        let s = simulate_paths(&f, &grid, 50_000, 3).unwrap();
        for i in 1..5 {
            for j in i..5 {
                let (m, se) = sample_cov(&s.values, i, j);
                let r = f.covariance(grid.points()[i], grid.points()[j]).unwrap();
                assert!((m - r).abs() <= 4.0 * se);
            }
        }
    }

    #[test]
    fn jump_variance_matches_record() {
        let j = ProcessSpec::jump_bm(&[(0.5, 0.25)], 1.0).unwrap();
        let s = simulate_paths(&j, &Partition::uniform(1.0, 8).unwrap(), 50_000, 9).unwrap();
        let sq: Vec<f64> = s.jumps.column(0).iter().map(|x| x * x).collect();
        let r = McReport::from_samples(&sq, 0.25, 9);
        assert!(r.passes(4.0), "{r:?}");

        let c = ProcessSpec::coupled_jump_bm(1.0, 0.5, 1.0).unwrap();
        let s = simulate_paths(&c, &Partition::uniform(1.0, 4).unwrap(), 50_000, 9).unwrap();
        let sq: Vec<f64> = s.jumps.column(0).iter().map(|x| x * x).collect();
        assert!(McReport::from_samples(&sq, 0.5, 9).passes(4.0));
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let f = ProcessSpec::coupled_jump_bm(0.5, 0.3, 1.0).unwrap();
        let grid = Partition::uniform(1.0, 6).unwrap();
        let a = simulate_paths(&f, &grid, 64, 11).unwrap();
        let b = simulate_paths(&f, &grid, 64, 11).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.jumps, b.jumps);
    }

    #[test]
    fn quadratic_variation_reference() {
        let j = ProcessSpec::jump_bm(&[(0.5, 0.25)], 1.0).unwrap();
        let r = path_qv_mc(&j, &Partition::uniform(1.0, 256).unwrap(), 10_000, 5).unwrap();
        assert_eq!(r.reference, 1.25);
        assert!(r.passes(4.0), "{r:?}");

        let b = ProcessSpec::brownian(1.0).unwrap();
        let one = path_qv_mc(&b, &Partition::uniform(1.0, 1).unwrap(), 1, 2).unwrap();
        let direct = simulate_paths(&b, &Partition::uniform(1.0, 1).unwrap(), 1, 2).unwrap();
        assert_eq!(one.estimate, direct.values[(0, 1)].powi(2));
    }
}
