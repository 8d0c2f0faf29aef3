use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use jointbound::bounds::{
    angle_inequality_lhs, angle_visibilities, chsh_value, coherence_bound_lhs, embed_outcome_signs, outcome_bound_lhs,
    selected_outcome, simplified_bound_lhs, sup_over_angles, tight_bound_lhs, AnglePair, DEFAULT_COARSE_STEPS,
    DEFAULT_REFINE_ITERS,
};
use jointbound::joint::{outcome_distribution, povm_element, BlochEquatorial, OutcomeLabel, VisibilityPair};
use jointbound::matrix::{matmul, trace, ComplexMatrix};
use jointbound::pair::{
    bell_basis, correlations_of_state, equatorial_components, pair_distribution_formula, pair_distribution_trace,
    pair_moment, CorrelationVector, DensityOperator4, MomentSpec,
};
use jointbound::sampling::{ginibre_random_mixed_state, haar_random_pure_state, Ensemble, SeededSampler};
use proptest::prelude::*;
use rayon::prelude::*;

fn visibility() -> impl Strategy<Value = VisibilityPair> {
    (0.0..=1.0f64, 0.0..=FRAC_PI_2)
        .prop_map(|(r, t)| VisibilityPair::new(r.sqrt() * t.cos(), r.sqrt() * t.sin()).unwrap())
}

fn bell_mixture() -> impl Strategy<Value = DensityOperator4> {
    prop::array::uniform4(1e-6..1.0f64).prop_map(|w| {
        let total: f64 = w.iter().sum();
        let basis = bell_basis();
        let parts: Vec<(f64, &DensityOperator4)> = w.iter().map(|x| x / total).zip(basis.iter()).collect();
        DensityOperator4::mixture(&parts).unwrap()
    })
}

fn any_state() -> impl Strategy<Value = DensityOperator4> {
    (any::<u64>(), any::<bool>()).prop_map(|(seed, pure)| {
        let s = SeededSampler::new(seed);
        if pure {
            haar_random_pure_state(&s)
        } else {
            ginibre_random_mixed_state(&s)
        }
    })
}

fn correlation_vector() -> impl Strategy<Value = CorrelationVector> {
    prop::array::uniform4(-1.0..=1.0f64).prop_map(CorrelationVector::from_array)
}

/// Correlations read straight off the density-matrix entries, without Pauli
/// operators.
fn correlations_from_entries(rho: &DensityOperator4) -> [f64; 4] {
    let m = rho.matrix();
    let (r03, r12) = (m[(0, 3)], m[(1, 2)]);
    [2.0 * (r03.re + r12.re), 2.0 * (r12.im - r03.im), -2.0 * (r03.im + r12.im), 2.0 * (r12.re - r03.re)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn povm_elements_sum_to_identity(v in visibility()) {
        let mut total = ComplexMatrix::zeros(2);
        for o in OutcomeLabel::ALL {
            total = &total + &povm_element(&v, o);
        }
        prop_assert!(total.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn single_distribution_matches_trace_oracle(v in visibility(), r in 0.0..=1.0f64, t in 0.0..(2.0 * PI)) {
        let s = BlochEquatorial::new(r.sqrt() * t.cos(), r.sqrt() * t.sin()).unwrap();
        let d = outcome_distribution(&v, &s);
        for o in OutcomeLabel::ALL {
            let p = trace(&matmul(&s.density(), &povm_element(&v, o)).unwrap());
            prop_assert!((p.re - d.get(o)).abs() < 1e-12);
            prop_assert!(p.im.abs() < 1e-12);
        }
    }

    #[test]
    fn formula_matches_trace_for_zero_mean_states(rho in bell_mixture(), va in visibility(), vb in visibility()) {
        let c = correlations_of_state(&rho);
        let d = pair_distribution_trace(&rho, &va, &vb);
        prop_assert!(pair_distribution_formula(&c, &va, &vb).max_abs_diff(&d) < 1e-11);
    }

    #[test]
    fn xy_moments_vanish_for_any_state(rho in any_state(), va in visibility(), vb in visibility()) {
        let d = pair_distribution_trace(&rho, &va, &vb);
        for spec in MomentSpec::mixed_xy() {
            prop_assert!(pair_moment(&d, spec).abs() < 1e-12);
        }
        prop_assert!(d.min() >= -1e-12);
    }

    #[test]
    fn marginal_matches_reduced_state(rho in any_state(), va in visibility(), vb in visibility()) {
        let d = pair_distribution_trace(&rho, &va, &vb);
        let s = equatorial_components(&rho.reduced_a()).unwrap();
        let single = outcome_distribution(&va, &s);
        let marginal = d.marginal_a();
        for o in OutcomeLabel::ALL {
            prop_assert!((marginal.get(o) - single.get(o)).abs() < 1e-12);
        }
    }

    #[test]
    fn correlations_agree_with_matrix_entries(rho in any_state()) {
        let want = correlations_from_entries(&rho);
        let got = correlations_of_state(&rho).to_array();
        for k in 0..4 {
            prop_assert!((want[k] - got[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn coherence_identity(rho in any_state()) {
        let tight = tight_bound_lhs(&correlations_of_state(&rho));
        prop_assert!((4.0 * coherence_bound_lhs(&rho) - tight).abs() < 1e-10);
        prop_assert!(coherence_bound_lhs(&rho) <= 0.5 + 1e-12);
    }

    #[test]
    fn outcome_bound_is_selected_probability(c in correlation_vector(), alpha in -PI..PI, beta in -PI..PI) {
        let a = AnglePair::new(alpha, beta);
        let o = selected_outcome(a);
        let (va, vb) = angle_visibilities(a);
        let sv = embed_outcome_signs(o, &va, &vb);
        // at the selected outcome the signed visibilities are plain cosines and sines
        prop_assert!((sv.va_x - alpha.cos()).abs() < 1e-15 && (sv.va_y - alpha.sin()).abs() < 1e-15);
        prop_assert!((sv.vb_x - beta.cos()).abs() < 1e-15 && (sv.vb_y - beta.sin()).abs() < 1e-15);
        let lhs = outcome_bound_lhs(&c, &sv);
        let p = pair_distribution_formula(&c, &va, &vb).get(o);
        prop_assert!(((1.0 - lhs) / 16.0 - p).abs() < 1e-12);
        prop_assert!((2.0 * lhs - angle_inequality_lhs(&c, a)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sup_over_angles_equals_closed_form(c in correlation_vector()) {
        let p = c.c_xx - c.c_yy;
        let q = c.c_xy + c.c_yx;
        let r = c.c_xx + c.c_yy;
        let s = c.c_xy - c.c_yx;
        let closed = (p * p + q * q).sqrt() + (r * r + s * s).sqrt();
        let sup = sup_over_angles(&c, DEFAULT_COARSE_STEPS, DEFAULT_REFINE_ITERS);
        prop_assert!((sup - closed).abs() < 1e-9, "sup {sup} closed {closed}");
    }
}

#[test]
fn implication_chain_on_random_states() {
    let s = SeededSampler::new(31);
    let broken: usize = (0..100_000u64)
        .into_par_iter()
        .map(|i| {
            let e = if i % 2 == 0 { Ensemble::HaarPure } else { Ensemble::GinibreMixed };
            let c = correlations_of_state(&e.draw(&s.derive(i)));
            let tight = tight_bound_lhs(&c) <= 2.0 + 1e-9;
            let simplified = simplified_bound_lhs(&c) <= 4.0 + 1e-9;
            let chsh = chsh_value(&c) <= 2.0 * SQRT_2 + 1e-9;
            usize::from(!tight || (tight && !simplified) || (simplified && !chsh))
        })
        .sum();
    assert_eq!(broken, 0);
}

#[test]
fn haar_mean_correlation_is_near_zero() {
    let s = SeededSampler::new(99);
    let n = 20_000;
    let sum: f64 =
        (0..n as u64).into_par_iter().map(|i| correlations_of_state(&haar_random_pure_state(&s.derive(i))).c_xx).sum();
    // each c_xx has variance 1/5 for Haar states
    assert!((sum / n as f64).abs() < 5.0 * (0.2 / n as f64).sqrt());
}

#[test]
fn state_file_rows_round_trip() {
    let rho = ginibre_random_mixed_state(&SeededSampler::new(4));
    let back = DensityOperator4::from_nested_rows(&rho.to_nested_rows()).unwrap();
    assert_eq!(back, rho);
}
