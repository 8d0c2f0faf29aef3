//! The verification criteria, each a list of scalar checks with a pinned
//! tolerance. The CLI `verify` subcommand and the acceptance tests both run
//! these.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI, SQRT_2, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    angle_visibilities, chsh_value, coherence_bound_lhs, sup_over_angles, tight_bound_lhs, AnglePair, CIRELSON_BOUND,
    DEFAULT_COARSE_STEPS, DEFAULT_REFINE_ITERS, TIGHT_BOUND,
};
use crate::error::Result;
use crate::joint::{
    check_visibility_admissible, distribution_moments, outcome_distribution, povm_element, state_positivity_lhs,
    BlochEquatorial, OutcomeLabel, VisibilityPair,
};
use crate::matrix::is_positive_semidefinite;
use crate::pair::{
    bell_basis, bell_family_correlations, correlations_of_state, pair_distribution_formula, pair_distribution_trace,
    pair_moment, BellFamilyState, CorrelationVector, DensityOperator4, Factor, MomentSpec, PairOutcomeDistribution,
};
use crate::sampling::{
    bound_violation_search_in, constrained_chsh_max, estimate_moment, ginibre_random_mixed_state,
    haar_random_pure_state, max_experimental_chsh, sample_outcomes, selected_outcome_probability,
    zero_probability_curve_max, Ensemble, SampleStream, SeededSampler, ShotRecord,
};

/// Tolerance used wherever a criterion is stated at 1e-9; callers may
/// override it.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `value ≤ bound + tolerance`
    AtMost,
    /// `|value - bound| ≤ tolerance`
    Equals,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        let pass = value <= bound + tolerance;
        Self { name: name.into(), value, bound, tolerance, relation: Relation::AtMost, pass }
    }

    pub fn equals(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let pass = (value - target).abs() <= tolerance;
        Self { name: name.into(), value, bound: target, tolerance, relation: Relation::Equals, pass }
    }

    /// A count of failing cases that must be zero.
    pub fn no_failures(name: impl Into<String>, failures: usize) -> Self {
        Self::at_most(name, failures as f64, 0.0, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    fn new(id: u8, title: &str, checks: Vec<Check>) -> Self {
        Self { id, title: title.to_string(), checks }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One summary line, e.g. `[PASS] criterion 3: ...`.
    pub fn summary_line(&self) -> String {
        let failing: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let status = if self.pass() { "PASS" } else { "FAIL" };
        if failing.is_empty() {
            format!("[{status}] criterion {}: {} ({} checks)", self.id, self.title, self.checks.len())
        } else {
            format!("[{status}] criterion {}: {} (failing: {})", self.id, self.title, failing.join(", "))
        }
    }
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// Uniform draw from the admissible quarter disk `v_x² + v_y² ≤ 1`.
pub fn random_admissible_visibility(stream: &mut SampleStream) -> VisibilityPair {
    let r = stream.uniform().sqrt();
    let t = FRAC_PI_2 * stream.uniform();
    VisibilityPair::new(r * t.cos(), r * t.sin()).expect("inside the unit square")
}

/// Uniform draw from the physical Bloch disk.
pub fn random_physical_bloch(stream: &mut SampleStream) -> BlochEquatorial {
    let r = stream.uniform().sqrt();
    let t = TAU * stream.uniform();
    BlochEquatorial::new(r * t.cos(), r * t.sin()).expect("inside the unit square")
}

/// Mixture of the four Bell states with flat-Dirichlet weights; every local
/// mean vanishes exactly.
pub fn random_zero_local_mean_state(stream: &mut SampleStream) -> DensityOperator4 {
    let raw: [f64; 4] = [(); 4].map(|_| -(1.0 - stream.uniform()).ln());
    let total: f64 = raw.iter().sum();
    let basis = bell_basis();
    let parts: Vec<(f64, &DensityOperator4)> = raw.iter().map(|w| w / total).zip(basis.iter()).collect();
    DensityOperator4::mixture(&parts).expect("convex mixture of states")
}

pub fn random_correlation_vector(stream: &mut SampleStream) -> CorrelationVector {
    CorrelationVector::from_array([(); 4].map(|_| 2.0 * stream.uniform() - 1.0))
}

/// Criterion 1: on a 101×101 grid over `[0, 1]²`, `v_x² + v_y² ≤ 1`
/// agrees with positivity of all four POVM elements.
pub fn povm_uncertainty_equivalence() -> Result<CriterionResult> {
    const TOL: f64 = 1e-10;
    let mut disagreements = 0;
    let mut admissible_count = 0;
    for i in 0..=100 {
        for j in 0..=100 {
            let v = VisibilityPair::new(i as f64 / 100.0, j as f64 / 100.0)?;
            let admissible = check_visibility_admissible(&v, TOL);
            let mut psd = true;
            for o in OutcomeLabel::ALL {
                psd &= is_positive_semidefinite(&povm_element(&v, o), TOL)?;
            }
            admissible_count += admissible as usize;
            disagreements += (admissible != psd) as usize;
        }
    }
    // i² + j² ≤ 100² counts the admissible lattice points exactly
    let lattice_count =
        (0..=100i64).flat_map(|i| (0..=100i64).map(move |j| i * i + j * j)).filter(|&r| r <= 10_000).count();
    Ok(CriterionResult::new(
        1,
        "POVM positivity agrees with the visibility uncertainty relation",
        vec![
            Check::no_failures("admissibility_vs_psd_disagreements", disagreements),
            Check::equals("admissible_grid_points", admissible_count as f64, lattice_count as f64, 0.0),
        ],
    ))
}

/// Criterion 2: `⟨xy⟩ = 0` and `⟨x⟩ = v_x⟨X⟩`, `⟨y⟩ = v_y⟨Y⟩` on 1000 random
/// visibility/state pairs.
pub fn product_average_vanishes(seed: u64) -> Result<CriterionResult> {
    let mut stream = SeededSampler::new(seed).derive(2).stream();
    let (mut max_xy, mut max_prop): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let v = VisibilityPair::new(stream.uniform(), stream.uniform())?;
        let s = random_physical_bloch(&mut stream);
        let m = distribution_moments(&outcome_distribution(&v, &s));
        max_xy = max_xy.max(m.mean_xy.abs());
        max_prop = max_prop.max((m.mean_x - v.v_x() * s.ex()).abs()).max((m.mean_y - v.v_y() * s.ey()).abs());
    }
    Ok(CriterionResult::new(
        2,
        "outcome product average vanishes; averages scale with visibility",
        vec![
            Check::at_most("max_abs_mean_xy", max_xy, 0.0, 1e-14),
            Check::at_most("max_visibility_proportionality_error", max_prop, 0.0, 1e-12),
        ],
    ))
}

/// Criterion 3: every unphysical grid state admits a saturated visibility
/// pair with a negative probability; physical states never do.
pub fn bloch_bound_derivation() -> Result<CriterionResult> {
    const GRID: i64 = 50;
    let thetas: Vec<f64> = {
        let n = (FRAC_PI_2 / 0.01).floor() as usize;
        let mut t: Vec<f64> = (0..=n).map(|k| k as f64 * 0.01).collect();
        t.push(FRAC_PI_2);
        t
    };
    let family: Vec<VisibilityPair> = thetas.iter().map(|&t| VisibilityPair::saturated(t)).collect::<Result<_>>()?;

    let mut unphysical_without_witness = 0;
    let mut physical_min: f64 = f64::INFINITY;
    let mut lhs_mismatches = 0;
    for i in -GRID..=GRID {
        for j in -GRID..=GRID {
            let s = BlochEquatorial::new(i as f64 / GRID as f64, j as f64 / GRID as f64)?;
            // exact integer classification avoids rounding at the circle
            let unphysical = i * i + j * j > GRID * GRID;
            let mut min_p = f64::INFINITY;
            for v in &family {
                let d = outcome_distribution(v, &s);
                min_p = min_p.min(d.min());
                let lhs_ok = state_positivity_lhs(v, &s) <= 1.0 + 1e-12;
                if lhs_ok != (d.min() >= -1e-12) {
                    lhs_mismatches += 1;
                }
            }
            if unphysical {
                if min_p >= -1e-9 {
                    unphysical_without_witness += 1;
                }
            } else {
                physical_min = physical_min.min(min_p);
            }
        }
    }
    Ok(CriterionResult::new(
        3,
        "Bloch-disk bound follows from positivity of joint-measurement statistics",
        vec![
            Check::no_failures("unphysical_states_without_negative_probability", unphysical_without_witness),
            Check::at_most("negated_min_probability_physical_states", -physical_min, 0.0, 1e-12),
            Check::no_failures("positivity_lhs_mismatches", lhs_mismatches),
        ],
    ))
}

/// Criterion 4: moment rules and formula/trace agreement on 1000 random
/// zero-local-mean states.
pub fn pair_moment_rules(seed: u64) -> Result<CriterionResult> {
    let mut stream = SeededSampler::new(seed).derive(4).stream();
    let (mut max_xy, mut max_corr, mut max_formula): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let rho = random_zero_local_mean_state(&mut stream);
        let va = random_admissible_visibility(&mut stream);
        let vb = random_admissible_visibility(&mut stream);
        let c = correlations_of_state(&rho);
        let d = pair_distribution_trace(&rho, &va, &vb);
        max_xy = max_xy.max(max_of(MomentSpec::mixed_xy().iter().map(|&s| pair_moment(&d, s).abs())));
        use Factor::{X, Y};
        let factored = [
            (MomentSpec::new(X, X), va.v_x() * vb.v_x() * c.c_xx),
            (MomentSpec::new(X, Y), va.v_x() * vb.v_y() * c.c_xy),
            (MomentSpec::new(Y, X), va.v_y() * vb.v_x() * c.c_yx),
            (MomentSpec::new(Y, Y), va.v_y() * vb.v_y() * c.c_yy),
        ];
        max_corr = max_corr.max(max_of(factored.iter().map(|&(s, want)| (pair_moment(&d, s) - want).abs())));
        max_formula = max_formula.max(pair_distribution_formula(&c, &va, &vb).max_abs_diff(&d));
    }
    Ok(CriterionResult::new(
        4,
        "mixed xy moments vanish, correlations factor, closed form matches trace",
        vec![
            Check::at_most("max_abs_xy_moment", max_xy, 0.0, 1e-12),
            Check::at_most("max_correlation_factoring_error", max_corr, 0.0, 1e-12),
            Check::at_most("max_formula_vs_trace_difference", max_formula, 0.0, 1e-11),
        ],
    ))
}

/// Criterion 5: no random state exceeds the tight bound; the Bell family
/// saturates it.
pub fn tight_bound_validity(seed: u64, tol: f64) -> Result<CriterionResult> {
    let s = SeededSampler::new(seed).derive(5);
    let pure = bound_violation_search_in(Ensemble::HaarPure, 100_000, &s.derive(0));
    let mixed = bound_violation_search_in(Ensemble::GinibreMixed, 100_000, &s.derive(1));
    let family_dev = max_of((0..100).map(|k| {
        let phi = TAU * k as f64 / 100.0;
        (tight_bound_lhs(&correlations_of_state(&BellFamilyState::new(phi).to_density())) - TIGHT_BOUND).abs()
    }));
    Ok(CriterionResult::new(
        5,
        "tight bound holds for random states and is saturated by the Bell family",
        vec![
            Check::at_most("max_tight_lhs_haar_pure", pure.max_tight_lhs, TIGHT_BOUND, tol),
            Check::at_most("max_tight_lhs_ginibre_mixed", mixed.max_tight_lhs, TIGHT_BOUND, tol),
            Check::at_most("bell_family_max_deviation_from_2", family_dev, 0.0, 1e-12),
        ],
    ))
}

/// Criterion 6: the numeric supremum of the angle inequality equals the
/// closed-form tight bound on 1000 random correlation vectors.
pub fn sup_identity(seed: u64, tol: f64) -> Result<CriterionResult> {
    let mut stream = SeededSampler::new(seed).derive(6).stream();
    let vectors: Vec<CorrelationVector> = (0..1000).map(|_| random_correlation_vector(&mut stream)).collect();
    let max_dev = vectors
        .par_iter()
        .map(|c| (sup_over_angles(c, DEFAULT_COARSE_STEPS, DEFAULT_REFINE_ITERS) - tight_bound_lhs(c)).abs())
        .reduce(|| 0.0, f64::max);
    Ok(CriterionResult::new(
        6,
        "supremum over angles equals the closed-form tight bound",
        vec![Check::at_most("max_sup_vs_closed_form", max_dev, 0.0, tol)],
    ))
}

/// Criterion 7: CHSH reaches 2√2 at φ = π/4 and never exceeds it.
pub fn cirelson_corollary(seed: u64, tol: f64) -> Result<CriterionResult> {
    let s = SeededSampler::new(seed).derive(7);
    let pure = bound_violation_search_in(Ensemble::HaarPure, 100_000, &s.derive(0));
    let mixed = bound_violation_search_in(Ensemble::GinibreMixed, 20_000, &s.derive(1));
    Ok(CriterionResult::new(
        7,
        "CHSH combination is bounded by 2√2 and saturated at φ = π/4",
        vec![
            Check::equals(
                "chsh_bell_pi_over_4",
                chsh_value(&bell_family_correlations(FRAC_PI_4)),
                CIRELSON_BOUND,
                1e-12,
            ),
            Check::at_most("max_chsh_haar_pure", pure.max_chsh, CIRELSON_BOUND, tol),
            Check::at_most("max_chsh_ginibre_mixed", mixed.max_chsh, CIRELSON_BOUND, tol),
        ],
    ))
}

/// Criterion 8: four times the coherence sum equals the tight bound, and
/// the saturating states reach 1/2.
pub fn coherence_identity(seed: u64) -> Result<CriterionResult> {
    let s = SeededSampler::new(seed).derive(8);
    let max_dev = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let child = s.derive(i);
            let rho = if i % 2 == 0 { haar_random_pure_state(&child) } else { ginibre_random_mixed_state(&child) };
            (4.0 * coherence_bound_lhs(&rho) - tight_bound_lhs(&correlations_of_state(&rho))).abs()
        })
        .reduce(|| 0.0, f64::max);
    let family_dev = max_of(
        (0..100).map(|k| (coherence_bound_lhs(&BellFamilyState::new(TAU * k as f64 / 100.0).to_density()) - 0.5).abs()),
    );
    let [phi_plus, _, _, psi_minus] = bell_basis();
    let mix = DensityOperator4::mixture(&[(0.5, &phi_plus), (0.5, &psi_minus)])?;
    Ok(CriterionResult::new(
        8,
        "coherence form of the tight bound",
        vec![
            Check::at_most("max_identity_deviation", max_dev, 0.0, 1e-10),
            Check::at_most("bell_family_coherence_max_deviation", family_dev, 0.0, 1e-12),
            Check::equals("equal_bell_mixture_coherence", coherence_bound_lhs(&mix), 0.5, 1e-12),
        ],
    ))
}

/// Criterion 9: optima of the observed CHSH statistics at the bound.
pub fn experimental_optima(tol: f64) -> Result<CriterionResult> {
    let m = max_experimental_chsh(FRAC_PI_4);
    let z = zero_probability_curve_max(1e-4)?;
    let max_zero_p = max_of((0..50).flat_map(|k| {
        let phi = PI * (k as f64 + 0.5) / 50.0;
        // symmetric and asymmetric splits of α + β = φ
        [0.5, 0.2, 0.8].map(|w| selected_outcome_probability(phi, AnglePair::new(w * phi, (1.0 - w) * phi)).abs())
    }));
    let max_split_dev = max_of((1..50).map(|k| {
        let phi = FRAC_PI_2 * k as f64 / 50.0;
        let (_, value) = constrained_chsh_max(phi, 1e-4);
        (value - crate::sampling::zero_probability_curve(phi)).abs()
    }));
    Ok(CriterionResult::new(
        9,
        "observed CHSH optima at the bound",
        vec![
            Check::equals("max_observed_chsh_at_pi_over_4", m.value, SQRT_2, 1e-6),
            Check::equals("argmax_alpha", m.alpha, FRAC_PI_4, 1e-6),
            Check::equals("argmax_beta", m.beta, FRAC_PI_4, 1e-6),
            Check::equals("zero_probability_curve_max", z.value, 1.25, 1e-6),
            Check::equals("zero_probability_curve_argmax_cos_phi", z.cos_phi, 0.5, 1e-6),
            Check::equals("quantum_chsh_at_curve_argmax", z.quantum_chsh, 1.0 + 3f64.sqrt(), tol),
            Check::at_most("max_constrained_outcome_probability", max_zero_p, 0.0, 1e-12),
            Check::at_most("half_phase_split_vs_grid_max", max_split_dev, 0.0, 1e-6),
        ],
    ))
}

/// Shot record for the Bell-family state measured at `α = β = φ/2`.
pub fn zero_probability_shots(phi: f64, n: usize, s: &SeededSampler) -> Result<(PairOutcomeDistribution, ShotRecord)> {
    let a = AnglePair::new(0.5 * phi, 0.5 * phi);
    let (va, vb) = angle_visibilities(a);
    let d = pair_distribution_trace(&BellFamilyState::new(phi).to_density(), &va, &vb);
    let r = sample_outcomes(&d, n, s, format!("bell_family phi={phi:?} alpha=beta={:?}", a.alpha))?;
    Ok((d, r))
}

/// Criterion 10: Monte Carlo estimates agree with population moments, the
/// zero-probability outcome never appears, and sampling is reproducible.
pub fn monte_carlo_consistency(seed: u64) -> Result<CriterionResult> {
    const SHOTS: usize = 1_000_000;
    let s = SeededSampler::new(seed).derive(10);
    let phi = FRAC_PI_3;
    let (d_bell, r_bell) = zero_probability_shots(phi, SHOTS, &s.derive(0))?;

    let mut stream = s.derive(1).stream();
    let rho = ginibre_random_mixed_state(&s.derive(2));
    let (va, vb) = (random_admissible_visibility(&mut stream), random_admissible_visibility(&mut stream));
    let d_rand = pair_distribution_trace(&rho, &va, &vb);
    let r_rand = sample_outcomes(&d_rand, SHOTS, &s.derive(3), "ginibre")?;

    let mut max_z: f64 = 0.0;
    for (d, r) in [(&d_bell, &r_bell), (&d_rand, &r_rand)] {
        for spec in MomentSpec::all_nontrivial() {
            max_z = max_z.max(estimate_moment(r, spec)?.z_score(pair_moment(d, spec)));
        }
    }
    let zero_outcome = crate::bounds::selected_outcome(AnglePair::new(0.5 * phi, 0.5 * phi));
    let zero_count = r_bell.counts()[zero_outcome.index()];

    let again = zero_probability_shots(phi, SHOTS, &s.derive(0))?.1;
    let same = crate::cli::shots_csv_bytes(&r_bell)? == crate::cli::shots_csv_bytes(&again)?;
    Ok(CriterionResult::new(
        10,
        "Monte Carlo estimates, zero-probability outcome and reproducibility",
        vec![
            Check::at_most("max_moment_z_score", max_z, 5.0, 0.0),
            Check::no_failures("zero_probability_outcome_count", zero_count),
            Check::no_failures("shot_archive_differs_for_same_seed", (!same) as usize),
        ],
    ))
}

/// Runs all ten criteria.
pub fn run_all(seed: u64, tol: f64) -> Result<Vec<CriterionResult>> {
    Ok(vec![
        povm_uncertainty_equivalence()?,
        product_average_vanishes(seed)?,
        bloch_bound_derivation()?,
        pair_moment_rules(seed)?,
        tight_bound_validity(seed, tol)?,
        sup_identity(seed, tol)?,
        cirelson_corollary(seed, tol)?,
        coherence_identity(seed)?,
        experimental_optima(tol)?,
        monte_carlo_consistency(seed)?,
    ])
}
