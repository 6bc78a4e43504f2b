//! Verification engines for the Gaussian Itô formula.
//!
//! The deterministic engines evaluate every term of the formula at the
//! S-transform level, where each term has a closed form in `ψ_F`, `V` and
//! `h̄`. The Monte Carlo engines check the pathwise and pairing statements
//! that do not reduce to deterministic numerics.

mod mc;
mod residual;
mod skorokhod;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gaussproc::{CameronMartinElement, CmTerm, ProcessSpec};
use crate::heatkernel::TestFunction;
use crate::regulated::Side;
use crate::stieltjes::{LsOptions, YsOptions};

pub use crate::stats::McReport;
pub use mc::{hermite_p2_identity_mc, martingale_ito_mc, mc_s_transform, MartingaleItoReport};
pub use residual::{ito_rcll_residual, ito_stransform_residual, ItoBreakdown, JumpContribution, RcllBreakdown, Term};
pub use skorokhod::{simple_skorokhod, SimpleIntegrand, SkorokhodReport, WickCoeff};

/// Terms removed from the right-hand side to check that the engines are
/// sensitive to each of them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Mutations {
    pub drop_dv_integral: bool,
    pub drop_jump_sum: bool,
    pub drop_left_jumps: bool,
    pub drop_right_jumps: bool,
    pub drop_xleft_correction: bool,
}

impl Mutations {
    pub fn any(&self) -> bool {
        self.drop_dv_integral
            || self.drop_jump_sum
            || self.drop_left_jumps
            || self.drop_right_jumps
            || self.drop_xleft_correction
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ItoControls {
    pub ys: YsOptions,
    pub ls: LsOptions,
    pub mutations: Mutations,
}

/// A process, a test function `F` and a first-chaos direction `h`.
#[derive(Debug, Clone)]
pub struct ItoCase {
    spec: ProcessSpec,
    f: [TestFunction; 3],
    h: CameronMartinElement,
    controls: ItoControls,
}

impl ItoCase {
    /// Checks the growth constraint `a < 1/(4λ)` for `F`, `F'`, `F''` and
    /// materializes `h = Σ aᵢ X_{tᵢ}`.
    pub fn new(spec: ProcessSpec, f: TestFunction, h: Vec<CmTerm>) -> Result<Self> {
        let fs = [f.clone(), f.derivative(1), f.derivative(2)];
        for g in &fs {
            g.check_growth(spec.lambda())?;
        }
        let h = spec.cm_element(h)?;
        Ok(Self {
            spec,
            f: fs,
            h,
            controls: ItoControls::default(),
        })
    }

    pub fn with_controls(mut self, controls: ItoControls) -> Self {
        self.controls = controls;
        self
    }

    pub fn with_mutations(mut self, mutations: Mutations) -> Self {
        self.controls.mutations = mutations;
        self
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn function(&self) -> &TestFunction {
        &self.f[0]
    }

    /// `F^{(k)}` for `k ≤ 2`.
    pub fn derivative(&self, k: usize) -> &TestFunction {
        &self.f[k]
    }

    pub fn h(&self) -> &CameronMartinElement {
        &self.h
    }

    pub fn controls(&self) -> &ItoControls {
        &self.controls
    }

    /// `ψ_{F^{(k)}}(t, x)`
    pub(crate) fn psi(&self, k: usize, t: f64, x: f64) -> f64 {
        self.f[k].psi_unchecked(t, x)
    }
}

/// Random variables with a closed-form S-transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    /// `X_{t,side}`
    Value {
        t: f64,
        #[serde(default = "at")]
        side: Side,
    },
    /// `F^{(k)}(X_{t,side})` with `k = derivative ≤ 2`.
    Function {
        #[serde(default)]
        derivative: usize,
        t: f64,
        #[serde(default = "at")]
        side: Side,
    },
    /// `exp⋄(g)`
    WickExp { g: Vec<CmTerm> },
    /// `(exp⋄(aΔ) - 1)·Δ` for the left jump `Δ = Δ⁻X_s` of record `record`.
    /// Its expectation is `S(Δ)(aΔ) = a·E[Δ²]`; the direction `h` of the
    /// case is not used.
    JumpPairing { record: usize, a: f64 },
}

fn at() -> Side {
    Side::At
}

/// Closed-form S-transform `(Sξ)(h)` of an observable.
pub fn s_transform(case: &ItoCase, obs: &Observable) -> Result<f64> {
    let spec = case.spec();
    let hbar = case.h().hbar();
    match obs {
        Observable::Value { t, side } => {
            spec.check_time(*t)?;
            Ok(hbar.at_side(*t, *side))
        }
        Observable::Function { derivative, t, side } => {
            spec.check_time(*t)?;
            if *derivative > 2 {
                return Err(crate::error::Error::Precondition(format!(
                    "only F, F' and F'' are supported, got derivative {derivative}"
                )));
            }
            let var = spec.cov(*t, *side, *t, *side);
            Ok(case.psi(*derivative, var, hbar.at_side(*t, *side)))
        }
        Observable::WickExp { g } => {
            for term in g {
                spec.check_time(term.time)?;
            }
            Ok(spec.pairing(g, case.h().terms()).exp())
        }
        Observable::JumpPairing { record, a } => {
            let r = spec.discontinuities().get(*record).ok_or_else(|| {
                crate::error::Error::Precondition(format!("no discontinuity record with index {record}"))
            })?;
            Ok(a * r.e_dminus_sq)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_transform_examples() {
        let b = ProcessSpec::brownian(1.0).unwrap();
        let case = ItoCase::new(b, TestFunction::monomial(2), vec![CmTerm::new(1.0, 1.0)]).unwrap();
        let v = s_transform(&case, &Observable::Value { t: 0.5, side: Side::At }).unwrap();
        assert_eq!(v, 0.5);
        let w = s_transform(&case, &Observable::WickExp { g: vec![CmTerm::new(1.0, 1.0)] }).unwrap();
        assert_eq!(w, std::f64::consts::E);
        let f = s_transform(&case, &Observable::Function { derivative: 0, t: 1.0, side: Side::At }).unwrap();
        assert!((f - 2.0).abs() < 1e-13);
        assert!(s_transform(&case, &Observable::Value { t: 1.5, side: Side::At }).is_err());
    }

    #[test]
    fn growth_is_checked_against_lambda() {
        let j = ProcessSpec::jump_bm(&[(0.5, 4.0)], 1.0).unwrap();
        let f = TestFunction::exponential(1.0, 1.0, 0.06).unwrap();
        assert!(ItoCase::new(j, f, vec![]).is_err());
    }

    #[test]
    fn observables_parse() {
        let o: Observable = serde_json::from_str(r#"{"kind": "function", "derivative": 1, "t": 0.5, "side": "left"}"#).unwrap();
        assert_eq!(o, Observable::Function { derivative: 1, t: 0.5, side: Side::Left });
    }
}
