use serde::{Deserialize, Serialize};

use super::mc::{linear, map_points, PointTable};
use super::ItoCase;
use crate::error::{Error, Result};
use crate::gaussproc::{CameronMartinElement, CmTerm, ProcessSpec};
use crate::regulated::{Partition, Side};
use crate::stats::McReport;

/// `scale·exp⋄(f)` for a first-chaos element `f = Σ aᵢ X_{tᵢ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WickCoeff {
    pub scale: f64,
    #[serde(default)]
    pub f: Vec<CmTerm>,
}

impl WickCoeff {
    pub fn zero() -> Self {
        Self { scale: 0.0, f: Vec::new() }
    }

    pub fn one() -> Self {
        Self { scale: 1.0, f: Vec::new() }
    }

    pub fn exp(f: Vec<CmTerm>) -> Self {
        Self { scale: 1.0, f }
    }

    /// `(S scale·exp⋄(f))(h) = scale·e^{E[fh]}`
    pub fn s_transform(&self, spec: &ProcessSpec, h: &[CmTerm]) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        self.scale * spec.pairing(&self.f, h).exp()
    }
}

/// Step integrand `F₀1_{0} + Σ (Gᵢ1_{(tᵢ₋₁,tᵢ)} + Fᵢ1_{tᵢ})` with
/// Wick-exponential coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleIntegrand {
    partition: Partition,
    open: Vec<WickCoeff>,
    atoms: Vec<WickCoeff>,
}

impl SimpleIntegrand {
    /// `open` holds `G₁…Gₙ`, `atoms` holds `F₀…Fₙ`.
    pub fn new(partition: Partition, open: Vec<WickCoeff>, atoms: Vec<WickCoeff>) -> Result<Self> {
        let n = partition.len_intervals();
        if open.len() != n || atoms.len() != n + 1 {
            return Err(Error::Precondition(format!(
                "{n} intervals need {n} open coefficients and {} atoms, got {} and {}",
                n + 1,
                open.len(),
                atoms.len()
            )));
        }
        Ok(Self { partition, open, atoms })
    }

    /// Coefficients on the open intervals only.
    pub fn open_only(partition: Partition, open: Vec<WickCoeff>) -> Result<Self> {
        let atoms = vec![WickCoeff::zero(); partition.len_intervals() + 1];
        Self::new(partition, open, atoms)
    }

    /// The same coefficient on every interval and every partition point.
    pub fn constant(partition: Partition, c: WickCoeff) -> Self {
        let n = partition.len_intervals();
        Self {
            open: vec![c.clone(); n],
            atoms: vec![c; n + 1],
            partition,
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Coefficient and integrator increment of every summand, in the order
    /// `F₀, G₁, F₁, …, Gₙ, Fₙ`.
    fn summands(&self) -> Vec<(&WickCoeff, [CmTerm; 2])> {
        let p = self.partition.points();
        let mut out = vec![(
            &self.atoms[0],
            [CmTerm::sided(1.0, 0.0, Side::Right), CmTerm::sided(-1.0, 0.0, Side::At)],
        )];
        for i in 1..p.len() {
            out.push((
                &self.open[i - 1],
                [CmTerm::sided(1.0, p[i], Side::Left), CmTerm::sided(-1.0, p[i - 1], Side::Right)],
            ));
            out.push((
                &self.atoms[i],
                [CmTerm::sided(1.0, p[i], Side::Right), CmTerm::sided(-1.0, p[i], Side::Left)],
            ));
        }
        out
    }

    /// `Σ (SGᵢ)(h)(h̄(tᵢ-) - h̄(tᵢ₋₁+)) + Σ (SFᵢ)(h)Δh̄(tᵢ) + (SF₀)(h)Δ⁺h̄(0)`.
    pub fn s_transform(&self, spec: &ProcessSpec, h: &CameronMartinElement) -> f64 {
        let hbar = h.hbar();
        self.summands()
            .into_iter()
            .map(|(c, inc)| {
                if c.scale == 0.0 {
                    return 0.0;
                }
                let dh: f64 = inc.iter().map(|t| t.coeff * hbar.at_side(t.time, t.side)).sum();
                c.s_transform(spec, h.terms()) * dh
            })
            .sum()
    }

    /// Joint draws of the Wick-Stieltjes sum and of `extra`, using
    /// `exp⋄(f)⋄Δ = exp⋄(f)·(Δ - E[Δf])`.
    fn sample_with(&self, spec: &ProcessSpec, extra: &[CmTerm], n_paths: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
        if self.partition.horizon() != spec.horizon() {
            return Err(Error::InvalidPartition(format!(
                "partition ends at {} but the process lives on [0, {}]",
                self.partition.horizon(),
                spec.horizon()
            )));
        }
        let mut table = PointTable::new();
        let extra_idx = table.terms(extra);
        struct Piece {
            scale: f64,
            f: Vec<(f64, usize)>,
            f_half: f64,
            inc: Vec<(f64, usize)>,
            inc_f: f64,
        }
        let pieces: Vec<Piece> = self
            .summands()
            .into_iter()
            .filter(|(c, _)| c.scale != 0.0)
            .map(|(c, inc)| Piece {
                scale: c.scale,
                f: table.terms(&c.f),
                f_half: 0.5 * spec.pairing(&c.f, &c.f),
                inc: table.terms(&inc),
                inc_f: spec.pairing(&inc, &c.f),
            })
            .collect();
        map_points(spec, &table, n_paths, seed, |x| {
            let integral = pieces
                .iter()
                .map(|p| p.scale * (linear(&p.f, x) - p.f_half).exp() * (linear(&p.inc, x) - p.inc_f))
                .sum();
            (integral, linear(&extra_idx, x))
        })
    }

    /// Pathwise draws of the Wick-Skorokhod integral.
    pub fn sample(&self, spec: &ProcessSpec, n_paths: usize, seed: u64) -> Result<Vec<f64>> {
        Ok(self.sample_with(spec, &[], n_paths, seed)?.into_iter().map(|p| p.0).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkorokhodReport {
    /// Deterministic `(S ∫Z d⋄X)(h)`.
    pub s_transform: f64,
    /// Monte Carlo `E[exp⋄(h)·∫Z d⋄X]` against `s_transform`.
    pub pairing: McReport,
}

/// Wick-Skorokhod integral of a simple integrand, paired with the direction
/// `h` of the case both deterministically and by simulation.
pub fn simple_skorokhod(case: &ItoCase, z: &SimpleIntegrand, n_paths: usize, seed: u64) -> Result<SkorokhodReport> {
    if n_paths < 2 {
        return Err(Error::Precondition(format!(
            "Monte Carlo estimates need at least two paths, got {n_paths}"
        )));
    }
    let spec = case.spec();
    let h = case.h();
    let s_transform = z.s_transform(spec, h);
    let h_half = 0.5 * h.norm_sq();
    let samples: Vec<f64> = z
        .sample_with(spec, h.terms(), n_paths, seed)?
        .into_iter()
        .map(|(i, hv)| (hv - h_half).exp() * i)
        .collect();
    Ok(SkorokhodReport {
        s_transform,
        pairing: McReport::from_samples(&samples, s_transform, seed),
    })
}
