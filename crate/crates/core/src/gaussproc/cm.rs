use serde::{Deserialize, Serialize};

use super::ProcessSpec;
use crate::error::Result;
use crate::regulated::{RegulatedFunction, Side};

/// One summand `a·X_{t,side}` of a first-chaos element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmTerm {
    pub coeff: f64,
    pub time: f64,
    #[serde(default = "default_side")]
    pub side: Side,
}

fn default_side() -> Side {
    Side::At
}

impl CmTerm {
    pub fn new(coeff: f64, time: f64) -> Self {
        Self {
            coeff,
            time,
            side: Side::At,
        }
    }

    pub fn sided(coeff: f64, time: f64, side: Side) -> Self {
        Self { coeff, time, side }
    }
}

/// `h = Σ aᵢ X_{tᵢ}` together with `h̄(t) = E[X_t h]` and `E[h²]`.
#[derive(Debug, Clone)]
pub struct CameronMartinElement {
    terms: Vec<CmTerm>,
    hbar: RegulatedFunction,
    norm_sq: f64,
}

impl CameronMartinElement {
    pub fn terms(&self) -> &[CmTerm] {
        &self.terms
    }

    /// `h̄`
    pub fn hbar(&self) -> &RegulatedFunction {
        &self.hbar
    }

    /// `E[h²]`
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// `h(ω)` from sampled values of the terms, in term order.
    pub fn eval_sample(&self, values: &[f64]) -> f64 {
        self.terms.iter().zip(values).map(|(t, v)| t.coeff * v).sum()
    }
}

impl ProcessSpec {
    /// `E[g h]` for two first-chaos elements given by their terms.
    pub fn pairing(&self, g: &[CmTerm], h: &[CmTerm]) -> f64 {
        let mut acc = 0.0;
        for a in g {
            for b in h {
                acc += a.coeff * b.coeff * self.cov(a.time, a.side, b.time, b.side);
            }
        }
        acc
    }

    /// Materializes `h̄` and `E[h²]` for `h = Σ aᵢ X_{tᵢ}`.
    pub fn cm_element(&self, terms: Vec<CmTerm>) -> Result<CameronMartinElement> {
        for t in &terms {
            self.check_time(t.time)?;
        }
        let sections = terms
            .iter()
            .map(|t| self.section(t.time, t.side))
            .collect::<Result<Vec<_>>>()?;
        let weighted: Vec<(f64, &RegulatedFunction)> =
            terms.iter().zip(&sections).map(|(t, s)| (t.coeff, s)).collect();
        let hbar = RegulatedFunction::linear_combination(self.horizon(), &weighted)?;
        let norm_sq = self.pairing(&terms, &terms).max(0.0);
        Ok(CameronMartinElement {
            terms,
            hbar,
            norm_sq,
        })
    }
}

/// Free-function form of [`ProcessSpec::cm_element`].
pub fn cm_element(spec: &ProcessSpec, terms: Vec<CmTerm>) -> Result<CameronMartinElement> {
    spec.cm_element(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn examples() {
        let b = ProcessSpec::brownian(1.0).unwrap();
        let h = b.cm_element(vec![CmTerm::new(1.0, 1.0)]).unwrap();
        assert_eq!(h.norm_sq(), 1.0);
        assert_eq!(h.hbar().value(0.3), 0.3);

        let j = ProcessSpec::jump_bm(&[(0.5, 0.25)], 1.0).unwrap();
        let h = j.cm_element(vec![CmTerm::new(1.0, 1.0)]).unwrap();
        assert_eq!(h.norm_sq(), 1.25);
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let expected = t + if t >= 0.5 { 0.25 } else { 0.0 };
            assert_abs_diff_eq!(h.hbar().value(t), expected, epsilon = 1e-15);
        }
        assert_eq!(h.hbar().left(0.5), 0.5);

        let e = j.cm_element(Vec::new()).unwrap();
        assert_eq!(e.norm_sq(), 0.0);
        assert_eq!(e.hbar().value(0.7), 0.0);
    }

    #[test]
    fn out_of_range_time_is_rejected() {
        let b = ProcessSpec::brownian(1.0).unwrap();
        assert!(b.cm_element(vec![CmTerm::new(1.0, 1.5)]).is_err());
    }
}
