//! Seeded random states, Monte Carlo shot sampling and the experimental CHSH
//! statistics of the saturating Bell family.
//!
//! All randomness flows from a [`SeededSampler`]. A sampler is a value: every
//! call that consumes one starts the same stream, and sweeps derive one child
//! sampler per sample index, so results do not depend on how work is split
//! across threads.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{angle_visibilities, chsh_value, selected_outcome, tight_bound_lhs, AnglePair};
use crate::error::{Error, Result};
use crate::matrix::{matmul, trace, ComplexMatrix};
use crate::optimize::{golden_section_max, grid_max, stationary_point};
use crate::pair::{
    bell_family_correlations, correlations_of_state, pair_distribution_formula, pair_moment, DensityOperator4, Factor,
    MomentSpec, PairOutcomeDistribution, PairOutcomeLabel,
};

/// Identifier recorded with every sample stream: ChaCha20 from
/// `rand_chacha` 0.3, seeded through `seed_from_u64`, with Box–Muller
/// normals and SplitMix64 child-seed derivation.
pub const ALGORITHM_ID: &str = "chacha20-rand_chacha0.3/box-muller/splitmix64-v1";

/// Entries down to this value are treated as zero when sampling.
pub const SAMPLING_NEGATIVE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededSampler {
    pub seed: u64,
    pub algorithm_id: String,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeededSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed, algorithm_id: ALGORITHM_ID.to_string() }
    }

    /// Child sampler for task `index`.
    pub fn derive(&self, index: u64) -> Self {
        Self { seed: splitmix64(splitmix64(self.seed) ^ index), algorithm_id: self.algorithm_id.clone() }
    }

    pub fn stream(&self) -> SampleStream {
        SampleStream { rng: ChaCha20Rng::seed_from_u64(self.seed) }
    }
}

pub struct SampleStream {
    rng: ChaCha20Rng,
}

impl SampleStream {
    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Two independent standard normals from one uniform pair.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        (r * c, r * s)
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        let (re, im) = self.normal_pair();
        Complex64::new(re, im)
    }
}

/// Rank-one state from a normalized complex Gaussian 4-vector.
pub fn haar_random_pure_state(s: &SeededSampler) -> DensityOperator4 {
    let mut stream = s.stream();
    loop {
        let ket = [(); 4].map(|_| stream.complex_normal());
        if let Ok(rho) = DensityOperator4::from_ket(&ket) {
            return rho;
        }
    }
}

/// `G·G† / Tr(G·G†)` for a 4×4 matrix `G` of complex Gaussians.
pub fn ginibre_random_mixed_state(s: &SeededSampler) -> DensityOperator4 {
    let mut stream = s.stream();
    loop {
        let entries = (0..16).map(|_| stream.complex_normal()).collect();
        let g = ComplexMatrix::from_row_major(entries).expect("16 finite entries");
        let ggd = matmul(&g, &g.adjoint()).expect("same dimension");
        let tr = trace(&ggd).re;
        if let Ok(rho) = DensityOperator4::new(ggd.scale_real(1.0 / tr)) {
            return rho;
        }
    }
}

/// SHA-256 over the little-endian bytes of every entry, hex encoded.
pub fn state_digest(rho: &DensityOperator4) -> String {
    let mut h = Sha256::new();
    for z in rho.matrix().entries() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotSource {
    pub description: String,
    pub seed: u64,
    pub algorithm_id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub outcomes: Vec<PairOutcomeLabel>,
    pub n: usize,
    pub source: ShotSource,
}

impl ShotRecord {
    pub fn counts(&self) -> [usize; 16] {
        let mut c = [0; 16];
        for o in &self.outcomes {
            c[o.index()] += 1;
        }
        c
    }
}

/// `n` independent draws from `d` by inverse CDF over the fixed outcome
/// order. Entries below `-SAMPLING_NEGATIVE_TOL` are an error; smaller
/// negative rounding noise is treated as zero.
pub fn sample_outcomes(
    d: &PairOutcomeDistribution,
    n: usize,
    s: &SeededSampler,
    description: impl Into<String>,
) -> Result<ShotRecord> {
    let min = d.min();
    if min < -SAMPLING_NEGATIVE_TOL {
        return Err(Error::NegativeProbability { value: min });
    }
    let mut cdf = [0.0; 16];
    let mut acc = 0.0;
    for (k, p) in d.probabilities().iter().enumerate() {
        acc += p.max(0.0);
        cdf[k] = acc;
    }
    let total = acc;
    let last_nonzero = d.probabilities().iter().rposition(|&p| p > 0.0).unwrap_or(15);

    let mut stream = s.stream();
    let outcomes = (0..n)
        .map(|_| {
            let u = stream.uniform() * total;
            let k = cdf.iter().position(|&c| u < c).unwrap_or(last_nonzero);
            PairOutcomeLabel::from_index(k)
        })
        .collect();
    Ok(ShotRecord {
        outcomes,
        n,
        source: ShotSource { description: description.into(), seed: s.seed, algorithm_id: s.algorithm_id.clone() },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
}

impl EstimateWithError {
    /// `|value - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if self.std_error == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.std_error
        }
    }
}

/// Sample mean and standard error of an arbitrary per-shot function.
pub fn estimate_observable(r: &ShotRecord, f: impl Fn(PairOutcomeLabel) -> f64) -> Result<EstimateWithError> {
    let n = r.outcomes.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let mean = r.outcomes.iter().map(|&o| f(o)).sum::<f64>() / n as f64;
    let var = r.outcomes.iter().map(|&o| (f(o) - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(EstimateWithError { value: mean, std_error: (var / n as f64).sqrt(), n })
}

pub fn estimate_moment(r: &ShotRecord, spec: MomentSpec) -> Result<EstimateWithError> {
    estimate_observable(r, |o| spec.eval(o))
}

/// Per-shot CHSH combination `x_a x_b + y_a x_b + x_a y_b - y_a y_b`.
pub fn chsh_shot_value(o: PairOutcomeLabel) -> f64 {
    let (xa, ya, xb, yb) = (o.x_a.value(), o.y_a.value(), o.x_b.value(), o.y_b.value());
    xa * xb + ya * xb + xa * yb - ya * yb
}

/// Population CHSH combination of the observed outcomes.
pub fn experimental_chsh_of_distribution(d: &PairOutcomeDistribution) -> f64 {
    use Factor::{X, Y};
    pair_moment(d, MomentSpec::new(X, X))
        + pair_moment(d, MomentSpec::new(Y, X))
        + pair_moment(d, MomentSpec::new(X, Y))
        - pair_moment(d, MomentSpec::new(Y, Y))
}

/// Observed CHSH combination on the Bell-family state with phase `phi`
/// measured with visibilities `(cos α, sin α)` and `(cos β, sin β)`:
/// `cos(α-β)·cos φ + sin(α+β)·sin φ`.
pub fn experimental_chsh(phi: f64, a: AnglePair) -> f64 {
    a.difference().cos() * phi.cos() + a.sum().sin() * phi.sin()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshOptimum {
    pub value: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub const DEFAULT_CHSH_GRID: usize = 256;

pub fn max_experimental_chsh(phi: f64) -> ChshOptimum {
    max_experimental_chsh_with(phi, DEFAULT_CHSH_GRID, 80)
}

/// Maximizes [`experimental_chsh`] over `α, β ∈ [0, π/2]`.
///
/// Grid points sit at half-step offsets, so the end points are never
/// sampled directly. The objective separates in `u = α+β` and `v = α-β`, so
/// the refinement alternates golden-section searches along those directions
/// inside the feasible square.
pub fn max_experimental_chsh_with(phi: f64, grid_steps: usize, refine_iters: usize) -> ChshOptimum {
    let n = grid_steps.max(8);
    let step = FRAC_PI_2 / n as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (alpha, beta) = ((i as f64 + 0.5) * step, (j as f64 + 0.5) * step);
            let v = experimental_chsh(phi, AnglePair::new(alpha, beta));
            if v > best.0 {
                best = (v, alpha, beta);
            }
        }
    }
    let (mut u, mut v) = (best.1 + best.2, best.1 - best.2);
    let f = |u: f64, v: f64| experimental_chsh(phi, AnglePair::from_sum_difference(u, v));
    for _ in 0..2 {
        let (lo, hi) = ((u - 2.0 * step).max(v.abs()), (u + 2.0 * step).min(PI - v.abs()));
        u = golden_section_max(|x| f(x, v), lo, hi, refine_iters).x;
        let half_width = u.min(PI - u);
        let (lo, hi) = ((v - 2.0 * step).max(-half_width), (v + 2.0 * step).min(half_width));
        v = golden_section_max(|y| f(u, y), lo, hi, refine_iters).x;
    }
    let a = AnglePair::from_sum_difference(u, v);
    let refined = ChshOptimum { value: experimental_chsh(phi, a), alpha: a.alpha, beta: a.beta };
    if refined.value >= best.0 {
        refined
    } else {
        ChshOptimum { value: best.0, alpha: best.1, beta: best.2 }
    }
}

/// Probability of the outcome selected by `a` on the Bell-family state,
/// `(1 - cos(α+β-φ))/16`, computed from the full 16-outcome formula.
pub fn selected_outcome_probability(phi: f64, a: AnglePair) -> f64 {
    let (va, vb) = angle_visibilities(a);
    pair_distribution_formula(&bell_family_correlations(phi), &va, &vb).get(selected_outcome(a))
}

/// Observed CHSH combination at `α = β = φ/2`, where one outcome has zero
/// probability: `1 + cos φ - cos² φ`.
///
/// Fails if the selected outcome's probability is not zero within 1e-12.
pub fn zero_probability_chsh(phi: f64) -> Result<f64> {
    let a = AnglePair::new(0.5 * phi, 0.5 * phi);
    let p = selected_outcome_probability(phi, a);
    if p.abs() > 1e-12 {
        return Err(Error::Consistency(format!("constrained outcome probability {p:e} at phi = {phi}")));
    }
    Ok(experimental_chsh(phi, a))
}

/// `1 + cos φ - cos² φ`.
pub fn zero_probability_curve(phi: f64) -> f64 {
    let c = phi.cos();
    1.0 + c - c * c
}

/// Maximizes [`experimental_chsh`] along `α + β = φ` with `α` on a grid of
/// the given spacing over `[0, φ]` (both angles stay in `[0, π/2]` for
/// `φ ≤ π/2`). Returns the best `(α, value)`.
pub fn constrained_chsh_max(phi: f64, step: f64) -> (f64, f64) {
    let lo = (phi - FRAC_PI_2).max(0.0);
    let hi = phi.min(FRAC_PI_2);
    let n = (((hi - lo) / step).round() as usize).max(1);
    (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .map(|alpha| (alpha, experimental_chsh(phi, AnglePair::new(alpha, phi - alpha))))
        .fold((f64::NAN, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroProbabilityOptimum {
    pub phi: f64,
    pub cos_phi: f64,
    pub value: f64,
    /// CHSH value of the state's own correlations at the maximizing phase.
    pub quantum_chsh: f64,
}

/// Maximum of the zero-probability curve over `φ ∈ [0, π]`: a grid with the
/// given spacing, then a derivative-sign bisection around the best point.
pub fn zero_probability_curve_max(grid_step: f64) -> Result<ZeroProbabilityOptimum> {
    let n = ((PI / grid_step).round() as usize).max(8);
    let step = PI / n as f64;
    let curve = |phi: f64| experimental_chsh(phi, AnglePair::new(0.5 * phi, 0.5 * phi));
    let seed = grid_max(curve, 0.0, PI + step, n + 1, 0.0);
    let (lo, hi) = ((seed.x - step).max(step * 1e-3), (seed.x + step).min(PI));
    let phi = stationary_point(curve, lo, hi, 1e-5);
    let value = zero_probability_chsh(phi)?;
    Ok(ZeroProbabilityOptimum {
        phi,
        cos_phi: phi.cos(),
        value,
        quantum_chsh: chsh_value(&bell_family_correlations(phi)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationSearch {
    pub n_states: usize,
    pub max_tight_lhs: f64,
    pub max_chsh: f64,
    pub argmax_state_digest: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ensemble {
    HaarPure,
    GinibreMixed,
}

impl Ensemble {
    pub fn draw(self, s: &SeededSampler) -> DensityOperator4 {
        match self {
            Ensemble::HaarPure => haar_random_pure_state(s),
            Ensemble::GinibreMixed => ginibre_random_mixed_state(s),
        }
    }
}

/// Maximum of the tight-bound and CHSH left-hand sides over `n_states`
/// Haar-random pure states.
pub fn bound_violation_search(n_states: usize, s: &SeededSampler) -> ViolationSearch {
    bound_violation_search_in(Ensemble::HaarPure, n_states, s)
}

pub fn bound_violation_search_in(ensemble: Ensemble, n_states: usize, s: &SeededSampler) -> ViolationSearch {
    // (tight, index) and (chsh, index); ties resolve to the lower index so
    // the reduction order does not matter
    let better = |a: (f64, usize), b: (f64, usize)| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a };
    let init = || ((f64::NEG_INFINITY, usize::MAX), (f64::NEG_INFINITY, usize::MAX));
    let (tight, chsh) = (0..n_states)
        .into_par_iter()
        .map(|i| {
            let c = correlations_of_state(&ensemble.draw(&s.derive(i as u64)));
            ((tight_bound_lhs(&c), i), (chsh_value(&c), i))
        })
        .reduce(init, |a, b| (better(a.0, b.0), better(a.1, b.1)));
    let argmax_state_digest =
        if tight.1 == usize::MAX { String::new() } else { state_digest(&ensemble.draw(&s.derive(tight.1 as u64))) };
    ViolationSearch { n_states, max_tight_lhs: tight.0, max_chsh: chsh.0, argmax_state_digest }
}
