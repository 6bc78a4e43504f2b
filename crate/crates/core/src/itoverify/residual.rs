use serde::Serialize;

use super::ItoCase;
use crate::error::{Error, Result};
use crate::gaussproc::ProcessKind;
use crate::regulated::RegulatedFunction;
use crate::stieltjes::{integrate_ls, integrate_ys};

/// One row of a term breakdown. `residual_contribution` is the signed
/// amount the term adds to `lhs - rhs`, so the contributions sum to the
/// residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
    pub residual_contribution: f64,
}

fn term_rows(lhs: f64, rhs: &[(&'static str, f64, bool)]) -> Vec<Term> {
    let mut rows = vec![Term {
        name: "lhs",
        value: lhs,
        residual_contribution: lhs,
    }];
    for &(name, value, active) in rhs {
        rows.push(Term {
            name,
            value,
            residual_contribution: if active { 0.0 - value } else { 0.0 },
        });
    }
    rows
}

/// Jump terms at one discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpContribution {
    pub s: f64,
    pub left: f64,
    pub right: f64,
}

/// Every term of the S-transformed Itô formula at `h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItoBreakdown {
    /// `ψ_F(V(T), h̄(T)) - ψ_F(V(0), h̄(0))`
    pub lhs: f64,
    /// `∫ ψ_{F'}(V(s), h̄(s)) dh̄(s)`
    pub ys_integral: f64,
    /// `½ ∫ ψ_{F''}(V(s), h̄(s)) dV(s)`
    pub dv_integral: f64,
    pub left_jump_sum: f64,
    pub right_jump_sum: f64,
    /// Sum of `ψ_{F''}·E[X_{s-}Δ⁻X_s]` over the left jump terms; part of
    /// `left_jump_sum`.
    pub xleft_correction: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Residual of the same identity with the jump terms written directly in
    /// `ψ_F`, `h̄` and `V`, without the discontinuity records.
    pub chain_rule_residual: f64,
    pub ys_error_estimate: f64,
    pub converged: bool,
    pub jumps: Vec<JumpContribution>,
}

impl ItoBreakdown {
    pub fn terms(&self, case: &ItoCase) -> Vec<Term> {
        let m = case.controls().mutations;
        term_rows(
            self.lhs,
            &[
                ("ys_integral", self.ys_integral, true),
                ("dv_integral", self.dv_integral, !m.drop_dv_integral),
                ("left_jump_sum", self.left_jump_sum, !(m.drop_jump_sum || m.drop_left_jumps)),
                ("right_jump_sum", self.right_jump_sum, !(m.drop_jump_sum || m.drop_right_jumps)),
            ],
        )
    }
}

/// Terms of the reduced formula for stochastically RCLL processes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RcllBreakdown {
    pub lhs: f64,
    /// `∫ ψ_{F'}(V(s-), h̄(s-)) dh̄(s)`
    pub ys_integral: f64,
    /// `½ ∫ ψ_{F''}(V(s-), h̄(s-)) dV^c(s)`
    pub dvc_integral: f64,
    /// `Σ S(F(X_s) - F(X_{s-}) - F'(X_{s-})Δ⁻X_s)(h)`
    pub jump_sum: f64,
    /// `Σ ψ_{F''}(V(s-), h̄(s-))·E[X_{s-}Δ⁻X_s]`
    pub xleft_correction: f64,
    pub rhs: f64,
    pub residual: f64,
    pub ys_error_estimate: f64,
    pub converged: bool,
}

impl RcllBreakdown {
    pub fn terms(&self, case: &ItoCase) -> Vec<Term> {
        let m = case.controls().mutations;
        let jumps_on = !(m.drop_jump_sum || m.drop_left_jumps);
        term_rows(
            self.lhs,
            &[
                ("ys_integral", self.ys_integral, true),
                ("dvc_integral", self.dvc_integral, !m.drop_dv_integral),
                ("jump_sum", self.jump_sum, jumps_on),
                ("xleft_correction", self.xleft_correction, jumps_on && !m.drop_xleft_correction),
            ],
        )
    }
}

fn shared_pins(v: &RegulatedFunction, hbar: &RegulatedFunction) -> Vec<f64> {
    let mut p = v.pins();
    p.extend(hbar.pins());
    p.sort_by(f64::total_cmp);
    p.dedup();
    p
}

fn lhs(case: &ItoCase) -> f64 {
    let (v, hbar) = (case.spec().variance(), case.h().hbar());
    let t = case.spec().horizon();
    case.psi(0, v.value(t), hbar.value(t)) - case.psi(0, v.value(0.0), hbar.value(0.0))
}

/// Deterministic residual of the S-transformed Itô formula in its general
/// form, with one-sided jump terms on both sides of every recorded
/// discontinuity.
///
/// The jump terms are the S-transforms of the random jump terms, evaluated
/// with the discontinuity records. Non-convergence of either integral is
/// reported through `converged`, not as an error.
pub fn ito_stransform_residual(case: &ItoCase) -> Result<ItoBreakdown> {
    let spec = case.spec();
    let (v, hbar) = (spec.variance(), case.h().hbar());
    let horizon = spec.horizon();
    let opts = case.controls();
    let m = opts.mutations;
    let pins = shared_pins(v, hbar);

    let ys = integrate_ys(|s| case.psi(1, v.value(s), hbar.value(s)), hbar, &pins, &opts.ys)?;
    let ls = integrate_ls(|s| case.psi(2, v.value(s), hbar.value(s)), v, &pins, &opts.ls)?;
    let dv_integral = 0.5 * ls.value;

    let mut jumps = Vec::with_capacity(spec.discontinuities().len());
    let (mut left_sum, mut right_sum, mut xleft_sum) = (0.0, 0.0, 0.0);
    let (mut chain_left, mut chain_right) = (0.0, 0.0);
    for r in spec.discontinuities() {
        let s = r.s;
        let (h_l, h_s, h_r) = hbar.one_sided_limits(s)?;
        let (f_s, f1_s, f2_s) = (
            case.psi(0, r.v_at, h_s),
            case.psi(1, r.v_at, h_s),
            case.psi(2, r.v_at, h_s),
        );
        let mut left = 0.0;
        if s > 0.0 {
            let xleft = f2_s * r.e_xleft_dminus;
            xleft_sum += xleft;
            let wick_term = f2_s * r.e_dminus_sq + f1_s * (h_s - h_l)
                + if m.drop_xleft_correction { 0.0 } else { xleft };
            left = f_s - case.psi(0, r.v_left, h_l) - wick_term
                + 0.5 * f2_s * (r.e_dminus_sq + r.v_left - r.v_minus);
            chain_left += f_s - case.psi(0, v.left(s), h_l) - f1_s * (h_s - h_l) - 0.5 * f2_s * v.delta_minus(s);
        }
        let mut right = 0.0;
        if s < horizon {
            let wick_term = f2_s * r.e_x_dplus + f1_s * (h_r - h_s);
            right = case.psi(0, r.v_right, h_r) - f_s - wick_term
                - 0.5 * f2_s * (r.e_dplus_sq + r.v_right - r.v_plus);
            chain_right += case.psi(0, v.right(s), h_r) - f_s - f1_s * (h_r - h_s) - 0.5 * f2_s * v.delta_plus(s);
        }
        left_sum += left;
        right_sum += right;
        jumps.push(JumpContribution { s, left, right });
    }

    let lhs = lhs(case);
    let mut rhs = ys.value;
    if !m.drop_dv_integral {
        rhs += dv_integral;
    }
    if !(m.drop_jump_sum || m.drop_left_jumps) {
        rhs += left_sum;
    }
    if !(m.drop_jump_sum || m.drop_right_jumps) {
        rhs += right_sum;
    }
    let chain_rule_residual = lhs - (ys.value + dv_integral + chain_left + chain_right);
    Ok(ItoBreakdown {
        lhs,
        ys_integral: ys.value,
        dv_integral,
        left_jump_sum: left_sum,
        right_jump_sum: right_sum,
        xleft_correction: xleft_sum,
        rhs,
        residual: lhs - rhs,
        chain_rule_residual,
        ys_error_estimate: ys.error_estimate,
        converged: ys.converged && ls.converged,
        jumps,
    })
}

/// Deterministic residual of the reduced formula for stochastically RCLL
/// processes: left-limit integrands, the continuous part `V^c`, and a
/// single left jump sum with the `F''(X_{s-})E[X_{s-}Δ⁻X_s]` correction.
pub fn ito_rcll_residual(case: &ItoCase) -> Result<RcllBreakdown> {
    let spec = case.spec();
    if spec.kind() == ProcessKind::General {
        return Err(Error::Precondition(format!(
            "the reduced formula needs a martingale or stochastically RCLL model, `{}` is neither",
            spec.model().id()
        )));
    }
    let (v, hbar) = (spec.variance(), case.h().hbar());
    let opts = case.controls();
    let m = opts.mutations;
    let pins = shared_pins(v, hbar);
    let vc = v.continuous_part();

    let ys = integrate_ys(|s| case.psi(1, v.left(s), hbar.left(s)), hbar, &pins, &opts.ys)?;
    let ls = integrate_ls(|s| case.psi(2, v.left(s), hbar.left(s)), &vc, &pins, &opts.ls)?;
    let dvc_integral = 0.5 * ls.value;

    let (mut jump_sum, mut xleft_sum) = (0.0, 0.0);
    for r in spec.discontinuities() {
        let s = r.s;
        if s == 0.0 {
            continue;
        }
        let (h_l, h_s, _) = hbar.one_sided_limits(s)?;
        let xleft = case.psi(2, r.v_minus, h_l) * r.e_xleft_dminus;
        // S(F'(X_{s-})Δ⁻X_s)(h) = ψ_{F''}·E[X_{s-}Δ⁻X_s] + ψ_{F'}·Δ⁻h̄(s)
        let wick_term = xleft + case.psi(1, r.v_minus, h_l) * (h_s - h_l);
        jump_sum += case.psi(0, r.v_at, h_s) - case.psi(0, r.v_minus, h_l) - wick_term;
        xleft_sum += xleft;
    }

    let lhs = lhs(case);
    let mut rhs = ys.value;
    if !m.drop_dv_integral {
        rhs += dvc_integral;
    }
    if !(m.drop_jump_sum || m.drop_left_jumps) {
        rhs += jump_sum;
        if !m.drop_xleft_correction {
            rhs += xleft_sum;
        }
    }
    Ok(RcllBreakdown {
        lhs,
        ys_integral: ys.value,
        dvc_integral,
        jump_sum,
        xleft_correction: xleft_sum,
        rhs,
        residual: lhs - rhs,
        ys_error_estimate: ys.error_estimate,
        converged: ys.converged && ls.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussproc::{CmTerm, ProcessSpec};
    use crate::heatkernel::TestFunction;
    use crate::itoverify::Mutations;

    fn x2_case(spec: ProcessSpec, h: Vec<CmTerm>) -> ItoCase {
        ItoCase::new(spec, TestFunction::monomial(2), h).unwrap()
    }

    #[test]
    fn brownian_square() {
        let case = x2_case(ProcessSpec::brownian(1.0).unwrap(), vec![CmTerm::new(1.0, 1.0)]);
        let b = ito_stransform_residual(&case).unwrap();
        assert!((b.lhs - 2.0).abs() < 1e-13);
        assert!((b.ys_integral - 1.0).abs() < 1e-10);
        assert!((b.dv_integral - 1.0).abs() < 1e-12);
        assert_eq!((b.left_jump_sum, b.right_jump_sum), (0.0, 0.0));
        assert!(b.residual.abs() < 1e-10 && b.converged);
        let r = ito_rcll_residual(&case).unwrap();
        assert!(r.residual.abs() < 1e-10);
    }

    #[test]
    fn single_jump_by_hand() {
        let case = x2_case(ProcessSpec::jump_bm(&[(0.5, 0.25)], 1.0).unwrap(), vec![CmTerm::new(1.0, 1.0)]);
        let b = ito_stransform_residual(&case).unwrap();
        assert!((b.lhs - 2.8125).abs() < 1e-13);
        assert!((b.ys_integral - 1.625).abs() < 1e-9);
        assert!((b.dv_integral - 1.25).abs() < 1e-12);
        assert!((b.left_jump_sum + 0.0625).abs() < 1e-13);
        assert!(b.residual.abs() < 1e-8);
        assert!(b.chain_rule_residual.abs() < 1e-8);
        let r = ito_rcll_residual(&case).unwrap();
        assert!((r.ys_integral - 1.5).abs() < 1e-9);
        assert!((r.jump_sum - 0.3125).abs() < 1e-13);
        assert!((r.residual - b.residual).abs() < 1e-10);
    }

    #[test]
    fn evanescent_left_jump_vanishes_for_square() {
        let spec = ProcessSpec::evanescent(0.5, 1.0).unwrap();
        let case = x2_case(spec, vec![CmTerm::new(1.0, 0.3), CmTerm::new(-0.5, 0.1)]);
        let b = ito_stransform_residual(&case).unwrap();
        assert!(b.left_jump_sum.abs() < 1e-14);
        assert!(b.residual.abs() < 1e-8, "{b:?}");
        assert!((b.dv_integral + 1.0).abs() < 1e-12);
        assert!(ito_rcll_residual(&case).is_err());
    }

    #[test]
    fn coupled_correction_is_one() {
        let spec = ProcessSpec::coupled_jump_bm(1.0, 0.5, 1.0).unwrap();
        let case = x2_case(spec, vec![CmTerm::new(1.0, 1.0)]);
        let clean = ito_rcll_residual(&case).unwrap();
        assert!(clean.residual.abs() < 1e-8);
        let mutated = ito_rcll_residual(&case.clone().with_mutations(Mutations {
            drop_xleft_correction: true,
            ..Default::default()
        }))
        .unwrap();
        assert!((mutated.residual - clean.residual - 1.0).abs() < 1e-8);
        let general = ito_stransform_residual(&case).unwrap();
        assert!((general.residual - clean.residual).abs() < 1e-10);
    }

    #[test]
    fn contributions_sum_to_residual() {
        let spec = ProcessSpec::jump_bm(&[(0.5, 0.25)], 1.0).unwrap();
        let case = x2_case(spec, vec![CmTerm::new(1.0, 1.0)]).with_mutations(Mutations {
            drop_jump_sum: true,
            ..Default::default()
        });
        let b = ito_stransform_residual(&case).unwrap();
        let total: f64 = b.terms(&case).iter().map(|t| t.residual_contribution).sum();
        assert!((total - b.residual).abs() < 1e-13);
        assert!((b.residual + 0.0625).abs() < 1e-8);
    }
}
