use gauss_ito::gaussproc::{planar_qv_sum, planar_variation_sum, CmTerm, ProcessSpec};
use gauss_ito::heatkernel::{psi, TestFunction};
use gauss_ito::itoverify::{ito_stransform_residual, s_transform, ItoCase, Mutations, Observable};
use gauss_ito::regulated::{p_variation, sigma2, Jump, Partition, RegulatedFunction, Side, Smooth};
use gauss_ito::stieltjes::{integrate_ls, integrate_ys, LsOptions, YsOptions};
use proptest::prelude::*;

fn regulated() -> impl Strategy<Value = RegulatedFunction> {
    let jump = (1usize..16, -1.0..1.0f64, -1.0..1.0f64);
    (-2.0..2.0f64, 0.5..4.0f64, proptest::collection::vec(jump, 0..4)).prop_map(|(a, w, jumps)| {
        let mut jumps: Vec<Jump> = jumps
            .into_iter()
            .map(|(k, m, p)| Jump::new(k as f64 / 16.0, m, p))
            .collect();
        jumps.sort_by(|x, y| x.time.total_cmp(&y.time));
        jumps.dedup_by(|x, y| x.time == y.time);
        let base = Smooth::with_derivative(move |t: f64| a * t + (w * t).sin(), move |t: f64| a + w * (w * t).cos());
        RegulatedFunction::new(1.0, base, jumps).unwrap()
    })
}

fn model() -> impl Strategy<Value = ProcessSpec> {
    prop_oneof![
        Just(ProcessSpec::brownian(1.0).unwrap()),
        // below H = 0.2 the Young-Stieltjes refinement stops short of its tolerance
        (0.2..0.9f64).prop_map(|h| ProcessSpec::fbm(h, 1.0).unwrap()),
        (0.1..0.9f64, 0.05..0.5f64).prop_map(|(s, v)| ProcessSpec::jump_bm(&[(s, v)], 1.0).unwrap()),
        (-1.5..1.5f64, 0.1..0.9f64).prop_map(|(c, s)| ProcessSpec::coupled_jump_bm(c, s, 1.0).unwrap()),
        (0.1..0.9f64).prop_map(|s| ProcessSpec::evanescent(s, 1.0).unwrap()),
    ]
}

fn cm_terms(spec: &ProcessSpec, raw: &[(f64, usize, u8)]) -> Vec<CmTerm> {
    let mut times: Vec<f64> = (0..=8).map(|k| k as f64 / 8.0).collect();
    times.extend(spec.discontinuities().iter().map(|r| r.s));
    raw.iter()
        .map(|&(c, i, side)| {
            let side = [Side::Left, Side::At, Side::Right][side as usize % 3];
            CmTerm::sided(c, times[i % times.len()], side)
        })
        .collect()
}

fn ys(u: impl Fn(f64) -> f64, r: &RegulatedFunction) -> f64 {
    let out = integrate_ys(u, r, &[], &YsOptions::default()).unwrap();
    assert!(out.converged);
    out.value
}

fn ls(u: impl Fn(f64) -> f64, r: &RegulatedFunction) -> f64 {
    let out = integrate_ls(u, r, &[], &LsOptions::default()).unwrap();
    assert!(out.converged);
    out.value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn one_sided_limits_match_deltas(u in regulated()) {
        for j in u.jumps() {
            let (l, v, r) = u.one_sided_limits(j.time).unwrap();
            prop_assert_eq!(l + u.delta_minus(j.time), v);
            prop_assert_eq!(v + u.delta_plus(j.time), r);
        }
        prop_assert_eq!(u.left(0.0), u.value(0.0));
        prop_assert_eq!(u.right(1.0), u.value(1.0));
    }

    #[test]
    fn sigma2_is_the_sum_of_squared_jumps(u in regulated()) {
        let s = sigma2(&u);
        prop_assert!(s >= 0.0);
        prop_assert_eq!(s == 0.0, u.jumps().iter().all(|j| j.minus == 0.0 && j.plus == 0.0));
    }

    #[test]
    fn total_variation_grows_under_refinement(u in regulated(), n in 1usize..20, k in 2usize..4) {
        let coarse = Partition::uniform(1.0, n).unwrap();
        let fine = Partition::uniform(1.0, n * k).unwrap();
        prop_assert!(fine.is_refinement_of(&coarse));
        let (a, b) = (p_variation(&u, 1.0, &coarse).unwrap(), p_variation(&u, 1.0, &fine).unwrap());
        prop_assert!(a <= b + 1e-12);
    }

    #[test]
    fn young_stieltjes_is_linear(r in regulated(), alpha in -2.0..2.0f64, beta in -2.0..2.0f64, w in 0.5..3.0f64) {
        let u = |t: f64| (w * t).cos();
        let v = |t: f64| t * t - 0.3;
        let both = ys(|t| alpha * u(t) + beta * v(t), &r);
        let split = alpha * ys(u, &r) + beta * ys(v, &r);
        prop_assert!((both - split).abs() < 1e-9, "{} vs {}", both, split);
    }

    #[test]
    fn lebesgue_stieltjes_is_linear(r in regulated(), alpha in -2.0..2.0f64, beta in -2.0..2.0f64) {
        let u = |t: f64| (2.0 * t).exp();
        let v = |t: f64| 1.0 - t;
        let both = ls(|t| alpha * u(t) + beta * v(t), &r);
        let split = alpha * ls(u, &r) + beta * ls(v, &r);
        prop_assert!((both - split).abs() < 1e-9, "{} vs {}", both, split);
    }

    #[test]
    fn integrating_one_telescopes(r in regulated()) {
        let v = ys(|_| 1.0, &r);
        prop_assert!((v - (r.value(1.0) - r.value(0.0))).abs() < 1e-12);
    }

    #[test]
    fn young_and_lebesgue_agree_for_continuous_integrands(r in regulated(), w in 0.5..3.0f64) {
        let u = |t: f64| (w * t).sin() + t;
        prop_assert!((ys(u, &r) - ls(u, &r)).abs() < 1e-9);
    }

    #[test]
    fn heat_smoothing_is_linear(
        a in proptest::collection::vec(-2.0..2.0f64, 1..5),
        b in proptest::collection::vec(-2.0..2.0f64, 1..5),
        t in 0.01..2.0f64,
        x in -2.0..2.0f64,
    ) {
        let n = a.len().max(b.len());
        let sum: Vec<f64> = (0..n).map(|i| a.get(i).unwrap_or(&0.0) + b.get(i).unwrap_or(&0.0)).collect();
        let pa = psi(&TestFunction::polynomial(a).unwrap(), t, x).unwrap();
        let pb = psi(&TestFunction::polynomial(b).unwrap(), t, x).unwrap();
        let ps = psi(&TestFunction::polynomial(sum).unwrap(), t, x).unwrap();
        prop_assert!((ps - pa - pb).abs() < 1e-10 * (1.0 + pa.abs() + pb.abs()));
    }

    #[test]
    fn records_satisfy_variance_identities(spec in model()) {
        for r in spec.discontinuities() {
            prop_assert!(r.v_minus <= r.v_left + 1e-14 && r.v_plus <= r.v_right + 1e-14);
            prop_assert!(r.right_identity_defect().abs() < 1e-12);
            prop_assert!(r.left_identity_defect().abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_is_symmetric_with_variance_on_the_diagonal(spec in model(), t in 0.0..1.0f64, s in 0.0..1.0f64) {
        prop_assert_eq!(spec.covariance(t, s).unwrap(), spec.covariance(s, t).unwrap());
        prop_assert!((spec.covariance(t, t).unwrap() - spec.variance().value(t)).abs() < 1e-14);
    }

    #[test]
    fn sections_reproduce_the_covariance(spec in model(), ti in 0.0..1.0f64, t in 0.0..1.0f64) {
        let section = spec.section(ti, Side::At).unwrap();
        prop_assert!((section.value(t) - spec.covariance(t, ti).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn cameron_martin_map_is_linear(
        spec in model(),
        raw in proptest::collection::vec((-2.0..2.0f64, 0usize..12, 0u8..3), 1..4),
        c in -3.0..3.0f64,
        t in 0.0..1.0f64,
    ) {
        let terms = cm_terms(&spec, &raw);
        let h = spec.cm_element(terms.clone()).unwrap();
        let direct: f64 = terms.iter().map(|a| a.coeff * spec.cov(t, Side::At, a.time, a.side)).sum();
        prop_assert!((h.hbar().value(t) - direct).abs() < 1e-12);
        prop_assert!(h.norm_sq() >= 0.0);
        let scaled: Vec<CmTerm> = terms.iter().map(|a| CmTerm::sided(c * a.coeff, a.time, a.side)).collect();
        let hc = spec.cm_element(scaled).unwrap();
        prop_assert!((hc.hbar().value(t) - c * h.hbar().value(t)).abs() < 1e-12);
    }

    #[test]
    fn s_transform_of_a_value_scales_with_h(
        spec in model(),
        raw in proptest::collection::vec((-1.0..1.0f64, 0usize..12, 0u8..3), 1..3),
        c in -2.0..2.0f64,
        t in 0.0..1.0f64,
    ) {
        let terms = cm_terms(&spec, &raw);
        let scaled: Vec<CmTerm> = terms.iter().map(|a| CmTerm::sided(c * a.coeff, a.time, a.side)).collect();
        let obs = Observable::Value { t, side: Side::At };
        let base = ItoCase::new(spec.clone(), TestFunction::monomial(1), terms).unwrap();
        let case = ItoCase::new(spec, TestFunction::monomial(1), scaled).unwrap();
        let hbar = base.h().hbar().value(t);
        prop_assert!((s_transform(&case, &obs).unwrap() - c * hbar).abs() < 1e-12);
    }

    #[test]
    fn battery_residual_vanishes_for_random_elements(
        spec in model(),
        raw in proptest::collection::vec((-1.0..1.0f64, 0usize..12, 0u8..3), 1..3),
        k in 1usize..4,
    ) {
        let terms = cm_terms(&spec, &raw);
        let case = ItoCase::new(spec, TestFunction::monomial(k), terms).unwrap();
        let b = ito_stransform_residual(&case).unwrap();
        prop_assert!(b.converged && b.residual.abs() < 1e-8, "residual {}", b.residual);
    }
}

#[test]
fn planar_sums_match_a_direct_fbm_oracle() {
    let oracle = |hurst: f64, n: usize| {
        let r = |t: f64, s: f64| 0.5 * (t.powf(2.0 * hurst) + s.powf(2.0 * hurst) - (t - s).abs().powf(2.0 * hurst));
        let p: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let (mut var, mut qv) = (0.0, 0.0);
        for i in 1..=n {
            for j in 1..=n {
                let c = r(p[i], p[j]) + r(p[i - 1], p[j - 1]) - r(p[i], p[j - 1]) - r(p[i - 1], p[j]);
                var += c.abs();
                qv += c * c;
            }
        }
        (var, qv)
    };
    let pi = Partition::uniform(1.0, 8).unwrap();
    for (hurst, variation, qv) in [(0.3, 3.594_793_419_988_14, 0.730_748_082_396_951), (0.7, 1.0, 0.030_524_478_264_539)] {
        let spec = ProcessSpec::fbm(hurst, 1.0).unwrap();
        let (v, q) = oracle(hurst, 8);
        assert!((v - variation).abs() < 1e-12 && (q - qv).abs() < 1e-12);
        assert!((planar_variation_sum(&spec, &pi).unwrap() - variation).abs() < 1e-12);
        assert!((planar_qv_sum(&spec, &pi).unwrap() - qv).abs() < 1e-12);
    }
}

#[test]
fn every_mutation_moves_the_residual_by_its_term() {
    let spec = ProcessSpec::jump_bm(&[(0.3, 0.2), (0.5, 0.25)], 1.0).unwrap();
    let case = ItoCase::new(spec, TestFunction::monomial(2), vec![CmTerm::new(1.0, 1.0)]).unwrap();
    let clean = ito_stransform_residual(&case).unwrap();
    let drops = [
        (Mutations { drop_dv_integral: true, ..Default::default() }, clean.dv_integral),
        (Mutations { drop_jump_sum: true, ..Default::default() }, clean.left_jump_sum + clean.right_jump_sum),
        (Mutations { drop_left_jumps: true, ..Default::default() }, clean.left_jump_sum),
    ];
    for (m, term) in drops {
        assert!(term.abs() > 1e-3);
        let r = ito_stransform_residual(&case.clone().with_mutations(m)).unwrap();
        assert!((r.residual - clean.residual - term).abs() < 1e-10, "{m:?}");
    }
}

