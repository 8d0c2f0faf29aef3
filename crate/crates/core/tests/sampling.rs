use std::f64::consts::{FRAC_PI_2, PI};

use jointbound::bounds::{angle_visibilities, chsh_value, selected_outcome, AnglePair};
use jointbound::cli::shots_csv_bytes;
use jointbound::pair::{bell_family_correlations, pair_distribution_trace, pair_moment, BellFamilyState, MomentSpec};
use jointbound::sampling::{
    bound_violation_search, constrained_chsh_max, estimate_moment, sample_outcomes, selected_outcome_probability,
    zero_probability_curve, zero_probability_curve_max, SeededSampler,
};
use jointbound::suite::zero_probability_shots;
use rayon::prelude::*;

#[test]
fn same_seed_same_shots() {
    let phi = 0.9;
    let s = SeededSampler::new(123);
    let a = zero_probability_shots(phi, 50_000, &s).unwrap().1;
    let b = zero_probability_shots(phi, 50_000, &s).unwrap().1;
    assert_eq!(shots_csv_bytes(&a).unwrap(), shots_csv_bytes(&b).unwrap());
    let c = zero_probability_shots(phi, 50_000, &SeededSampler::new(124)).unwrap().1;
    assert_ne!(a.outcomes, c.outcomes);
}

#[test]
fn estimates_fall_within_five_standard_errors() {
    let phi = 1.1;
    let (va, vb) = angle_visibilities(AnglePair::new(0.3, 1.2));
    let d = pair_distribution_trace(&BellFamilyState::new(phi).to_density(), &va, &vb);
    let specs: Vec<MomentSpec> = MomentSpec::all_nontrivial().collect();
    let s = SeededSampler::new(8);
    let misses: Vec<usize> = (0..1000u64)
        .into_par_iter()
        .map(|run| {
            let r = sample_outcomes(&d, 10_000, &s.derive(run), "repeat").unwrap();
            specs
                .iter()
                .map(|&spec| {
                    let e = estimate_moment(&r, spec).unwrap();
                    usize::from((e.value - pair_moment(&d, spec)).abs() >= 5.0 * e.std_error)
                })
                .collect::<Vec<_>>()
        })
        .reduce(|| vec![0; specs.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    for (spec, m) in specs.iter().zip(misses) {
        assert!(m <= 10, "{}: {m} of 1000 runs outside 5 standard errors", spec.label());
    }
}

#[test]
fn zero_probability_outcome_never_sampled() {
    let s = SeededSampler::new(77);
    let seen: Vec<(f64, usize, f64)> = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let phi = PI * (k as f64 + 0.5) / 50.0;
            let (_, r) = zero_probability_shots(phi, 1_000_000, &s.derive(k)).unwrap();
            let a = AnglePair::new(0.5 * phi, 0.5 * phi);
            let o = selected_outcome(a);
            (phi, r.counts()[o.index()], selected_outcome_probability(phi, a))
        })
        .collect();
    for (phi, count, p) in seen {
        assert_eq!(count, 0, "phi = {phi}");
        // closed form (1 - cos(α+β-φ))/16 at α+β = φ
        assert!(p.abs() < 1e-12);
    }
}

#[test]
fn selected_outcome_is_plus_plus_minus_minus_for_acute_angles() {
    let o = selected_outcome(AnglePair::new(0.4, 0.6));
    assert_eq!(o.values(), [1, 1, -1, -1]);
}

#[test]
fn half_phase_split_is_the_constrained_maximizer() {
    for k in 1..40 {
        let phi = FRAC_PI_2 * k as f64 / 40.0;
        let (alpha, value) = constrained_chsh_max(phi, 1e-4);
        assert!((value - zero_probability_curve(phi)).abs() < 1e-6, "phi {phi}");
        assert!((alpha - 0.5 * phi).abs() < 1e-2, "phi {phi}: argmax {alpha}");
    }
}

#[test]
fn curve_peak() {
    let z = zero_probability_curve_max(1e-4).unwrap();
    assert!((z.value - 1.25).abs() < 1e-6);
    assert!((z.cos_phi - 0.5).abs() < 1e-6);
    assert!((z.quantum_chsh - (1.0 + 3f64.sqrt())).abs() < 1e-9);
    // at cos φ = 1/2 the state's own CHSH is 2(cos φ + sin φ)
    assert!((chsh_value(&bell_family_correlations(PI / 3.0)) - (1.0 + 3f64.sqrt())).abs() < 1e-12);
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let s = SeededSampler::new(3);
    let many = bound_violation_search(5_000, &s);
    let one =
        rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| bound_violation_search(5_000, &s));
    assert_eq!(many, one);
}
