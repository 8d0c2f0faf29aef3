//! Positivity bounds on the four two-qubit correlations.
//!
//! Every one of the 16 joint probabilities has the form `(1 - L)/16`, where
//! `L` is a bilinear form in sign-carrying visibilities and the correlations
//! ([`outcome_bound_lhs`]). Parametrizing visibilities on the uncertainty
//! limit by two angles turns the 16 conditions into one angle inequality
//! ([`angle_inequality_lhs`] ≤ 2), whose supremum over the angles is the
//! closed-form [`tight_bound_lhs`] ≤ 2.

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::joint::{Sign, VisibilityPair};
use crate::optimize::{golden_section_max, grid_max};
use crate::pair::{correlations_of_state, CorrelationVector, DensityOperator4, PairOutcomeLabel};

pub const TIGHT_BOUND: f64 = 2.0;
pub const SIMPLIFIED_BOUND: f64 = 4.0;
pub const CIRELSON_BOUND: f64 = 2.0 * SQRT_2;
pub const COHERENCE_BOUND: f64 = 0.5;

/// Distance from a bound within which a value counts as saturating it.
pub const SATURATION_TOL: f64 = 1e-6;

pub const DEFAULT_COARSE_STEPS: usize = 64;
pub const DEFAULT_REFINE_ITERS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnglePair {
    pub alpha: f64,
    pub beta: f64,
}

impl AnglePair {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// From the decoupled coordinates `u = α + β`, `v = α - β`.
    pub fn from_sum_difference(u: f64, v: f64) -> Self {
        Self { alpha: 0.5 * (u + v), beta: 0.5 * (u - v) }
    }

    pub fn sum(&self) -> f64 {
        self.alpha + self.beta
    }

    pub fn difference(&self) -> f64 {
        self.alpha - self.beta
    }
}

/// Visibilities with the outcome signs folded in: A's components carry
/// `x_a`, `y_a` and B's carry `-x_b`, `-y_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedVisibilities {
    pub va_x: f64,
    pub va_y: f64,
    pub vb_x: f64,
    pub vb_y: f64,
}

impl SignedVisibilities {
    pub fn is_admissible(&self, tol: f64) -> bool {
        self.va_x * self.va_x + self.va_y * self.va_y <= 1.0 + tol
            && self.vb_x * self.vb_x + self.vb_y * self.vb_y <= 1.0 + tol
    }
}

/// `(x_a cos α, y_a sin α, -x_b cos β, -y_b sin β)`.
pub fn signed_visibilities(a: AnglePair, o: PairOutcomeLabel) -> SignedVisibilities {
    let (sa, ca) = a.alpha.sin_cos();
    let (sb, cb) = a.beta.sin_cos();
    SignedVisibilities {
        va_x: o.x_a.value() * ca,
        va_y: o.y_a.value() * sa,
        vb_x: -o.x_b.value() * cb,
        vb_y: -o.y_b.value() * sb,
    }
}

/// Folds the signs of outcome `o` into ordinary (non-negative) visibilities,
/// so that `P(o) = (1 - outcome_bound_lhs(c, ·))/16`.
pub fn embed_outcome_signs(o: PairOutcomeLabel, va: &VisibilityPair, vb: &VisibilityPair) -> SignedVisibilities {
    SignedVisibilities {
        va_x: o.x_a.value() * va.v_x(),
        va_y: o.y_a.value() * va.v_y(),
        vb_x: -o.x_b.value() * vb.v_x(),
        vb_y: -o.y_b.value() * vb.v_y(),
    }
}

/// The outcome whose probability the angle pair `a` constrains: the one for
/// which `(x_a cos α, y_a sin α, -x_b cos β, -y_b sin β)` are all
/// non-negative.
pub fn selected_outcome(a: AnglePair) -> PairOutcomeLabel {
    let (sa, ca) = a.alpha.sin_cos();
    let (sb, cb) = a.beta.sin_cos();
    PairOutcomeLabel::new(Sign::of(ca), Sign::of(sa), -Sign::of(cb), -Sign::of(sb))
}

/// Non-negative visibilities `(|cos α|, |sin α|)`, `(|cos β|, |sin β|)` of the
/// local measurements realizing `a`.
pub fn angle_visibilities(a: AnglePair) -> (VisibilityPair, VisibilityPair) {
    let pair = |t: f64| {
        let (s, c) = t.sin_cos();
        VisibilityPair::new(c.abs().min(1.0), s.abs().min(1.0)).expect("trig magnitudes lie in [0, 1]")
    };
    (pair(a.alpha), pair(a.beta))
}

/// `va_x·vb_x·c_xx + va_x·vb_y·c_xy + va_y·vb_x·c_yx + va_y·vb_y·c_yy`.
pub fn outcome_bound_lhs(c: &CorrelationVector, sv: &SignedVisibilities) -> f64 {
    sv.va_x * sv.vb_x * c.c_xx + sv.va_x * sv.vb_y * c.c_xy + sv.va_y * sv.vb_x * c.c_yx + sv.va_y * sv.vb_y * c.c_yy
}

pub fn angle_inequality_lhs(c: &CorrelationVector, a: AnglePair) -> f64 {
    let (u, v) = (a.sum(), a.difference());
    u.cos() * (c.c_xx - c.c_yy) + u.sin() * (c.c_xy + c.c_yx) + v.cos() * (c.c_xx + c.c_yy)
        - v.sin() * (c.c_xy - c.c_yx)
}

/// `√((c_xx - c_yy)² + (c_xy + c_yx)²) + √((c_xx + c_yy)² + (c_xy - c_yx)²)`.
pub fn tight_bound_lhs(c: &CorrelationVector) -> f64 {
    (c.c_xx - c.c_yy).hypot(c.c_xy + c.c_yx) + (c.c_xx + c.c_yy).hypot(c.c_xy - c.c_yx)
}

/// `(c_xx - c_yy)² + (c_xy + c_yx)²`.
pub fn simplified_bound_lhs(c: &CorrelationVector) -> f64 {
    let p = c.c_xx - c.c_yy;
    let q = c.c_xy + c.c_yx;
    p * p + q * q
}

/// CHSH combination `c_xx + c_xy + c_yx - c_yy`.
pub fn chsh_value(c: &CorrelationVector) -> f64 {
    c.c_xx + c.c_xy + c.c_yx - c.c_yy
}

/// `|⟨00|ρ|11⟩| + |⟨10|ρ|01⟩|`.
pub fn coherence_bound_lhs(rho: &DensityOperator4) -> f64 {
    let m = rho.matrix();
    m[(0, 3)].norm() + m[(2, 1)].norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleOptimum {
    pub value: f64,
    pub angles: AnglePair,
}

/// Numerically maximizes [`angle_inequality_lhs`] over both angles.
///
/// A `coarse_steps × coarse_steps` grid over `[0, 2π)²` gives a starting
/// value. The objective splits as `f(α+β) + g(α-β)`; each part is isolated
/// by averaging two evaluations half a period apart in the other variable,
/// scanned on the same spacing, and refined by golden-section search over
/// one grid step on either side of its best point.
pub fn maximize_angle_inequality(c: &CorrelationVector, coarse_steps: usize, refine_iters: usize) -> AngleOptimum {
    assert!(coarse_steps >= 8, "coarse_steps must be at least 8");
    let step = TAU / coarse_steps as f64;
    let lhs = |a: AnglePair| angle_inequality_lhs(c, a);

    let mut best = AngleOptimum { value: f64::NEG_INFINITY, angles: AnglePair::new(0.0, 0.0) };
    for i in 0..coarse_steps {
        for j in 0..coarse_steps {
            let angles = AnglePair::new(i as f64 * step, j as f64 * step);
            let value = lhs(angles);
            if value > best.value {
                best = AngleOptimum { value, angles };
            }
        }
    }

    // g(0) + g(π) = 0 and f(0) + f(π) = 0, so these isolate each part
    let sum_part =
        |u: f64| 0.5 * (lhs(AnglePair::from_sum_difference(u, 0.0)) + lhs(AnglePair::from_sum_difference(u, PI)));
    let diff_part =
        |v: f64| 0.5 * (lhs(AnglePair::from_sum_difference(0.0, v)) + lhs(AnglePair::from_sum_difference(PI, v)));

    let refine = |part: &dyn Fn(f64) -> f64| {
        let seed = grid_max(part, 0.0, TAU, coarse_steps, 0.0);
        golden_section_max(part, seed.x - step, seed.x + step, refine_iters).x
    };
    let u = refine(&sum_part);
    let v = refine(&diff_part);
    let angles = AnglePair::from_sum_difference(u, v);
    let refined = AngleOptimum { value: lhs(angles), angles };
    if refined.value >= best.value {
        refined
    } else {
        best
    }
}

/// Supremum of [`angle_inequality_lhs`] over all angle pairs, found
/// numerically; agrees with [`tight_bound_lhs`].
pub fn sup_over_angles(c: &CorrelationVector, coarse_steps: usize, refine_iters: usize) -> f64 {
    maximize_angle_inequality(c, coarse_steps, refine_iters).value
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Saturation {
    pub tight: bool,
    pub simplified: bool,
    pub chsh: bool,
    pub coherence: bool,
    pub sup_angles: bool,
}

/// All bound left-hand sides for one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub correlations: CorrelationVector,
    pub tight_lhs: f64,
    pub simplified_lhs: f64,
    pub chsh: f64,
    pub coherence_lhs: f64,
    pub sup_angles: f64,
    pub saturating: Saturation,
}

impl BoundReport {
    pub fn for_state(rho: &DensityOperator4, coarse_steps: usize, refine_iters: usize) -> Self {
        let c = correlations_of_state(rho);
        let tight_lhs = tight_bound_lhs(&c);
        let simplified_lhs = simplified_bound_lhs(&c);
        let chsh = chsh_value(&c);
        let coherence_lhs = coherence_bound_lhs(rho);
        let sup_angles = sup_over_angles(&c, coarse_steps, refine_iters);
        let near = |v: f64, bound: f64| (v - bound).abs() <= SATURATION_TOL;
        Self {
            correlations: c,
            tight_lhs,
            simplified_lhs,
            chsh,
            coherence_lhs,
            sup_angles,
            saturating: Saturation {
                tight: near(tight_lhs, TIGHT_BOUND),
                simplified: near(simplified_lhs, SIMPLIFIED_BOUND),
                chsh: near(chsh, CIRELSON_BOUND),
                coherence: near(coherence_lhs, COHERENCE_BOUND),
                sup_angles: near(sup_angles, TIGHT_BOUND),
            },
        }
    }
}
