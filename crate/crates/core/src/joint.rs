//! Single-qubit joint measurement of X and Y with visibilities `(v_x, v_y)`.
//!
//! The measurement is the four-element POVM
//! `E(x, y) = (I + x·v_x·X + y·v_y·Y) / 4`, `x, y ∈ {±1}`. It reproduces the
//! outcome averages `⟨x⟩ = v_x⟨X⟩`, `⟨y⟩ = v_y⟨Y⟩` with a vanishing product
//! average `⟨xy⟩ = 0`, and its elements are positive exactly when
//! `v_x² + v_y² ≤ 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{pauli, ComplexMatrix, Pauli};

/// Tolerance used by the admissibility and physicality flags.
pub const FLAG_TOL: f64 = 1e-12;

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && (lo..=hi).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value, lo, hi })
    }
}

/// Visibilities of one local joint measurement.
///
/// Pairs violating `v_x² + v_y² ≤ 1` can be constructed so that the negative
/// probabilities they would imply can be exhibited; [`Self::is_admissible`]
/// tells them apart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityPair {
    v_x: f64,
    v_y: f64,
}

impl VisibilityPair {
    pub fn new(v_x: f64, v_y: f64) -> Result<Self> {
        Ok(Self { v_x: check_range("v_x", v_x, 0.0, 1.0)?, v_y: check_range("v_y", v_y, 0.0, 1.0)? })
    }

    /// `(cos θ, sin θ)`, the saturated family on the uncertainty limit.
    /// Requires `θ ∈ [0, π/2]` up to rounding.
    pub fn saturated(theta: f64) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        let clamp = |v: f64| if (-1e-15..0.0).contains(&v) { 0.0 } else { v };
        Self::new(clamp(c), clamp(s))
    }

    pub fn v_x(&self) -> f64 {
        self.v_x
    }

    pub fn v_y(&self) -> f64 {
        self.v_y
    }

    pub fn is_admissible(&self, tol: f64) -> bool {
        check_visibility_admissible(self, tol)
    }
}

/// Equatorial Bloch components `(⟨X⟩, ⟨Y⟩)` of a qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochEquatorial {
    ex: f64,
    ey: f64,
}

impl BlochEquatorial {
    pub fn new(ex: f64, ey: f64) -> Result<Self> {
        Ok(Self { ex: check_range("ex", ex, -1.0, 1.0)?, ey: check_range("ey", ey, -1.0, 1.0)? })
    }

    pub fn ex(&self) -> f64 {
        self.ex
    }

    pub fn ey(&self) -> f64 {
        self.ey
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        bloch_bound_lhs(self) <= 1.0 + tol
    }

    /// `(I + ex·X + ey·Y) / 2`; a density operator only when physical.
    pub fn density(&self) -> ComplexMatrix {
        let m = &(&pauli(Pauli::I) + &pauli(Pauli::X).scale_real(self.ex)) + &pauli(Pauli::Y).scale_real(self.ey);
        m.scale_real(0.5)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Sign of `v`, with zero mapped to `Plus`.
    pub fn of(v: f64) -> Sign {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeLabel {
    pub x: Sign,
    pub y: Sign,
}

impl OutcomeLabel {
    /// Fixed ordering used for indexing: `(+,+), (+,-), (-,+), (-,-)`.
    pub const ALL: [OutcomeLabel; 4] = [
        OutcomeLabel { x: Sign::Plus, y: Sign::Plus },
        OutcomeLabel { x: Sign::Plus, y: Sign::Minus },
        OutcomeLabel { x: Sign::Minus, y: Sign::Plus },
        OutcomeLabel { x: Sign::Minus, y: Sign::Minus },
    ];

    pub fn new(x: Sign, y: Sign) -> Self {
        Self { x, y }
    }

    pub fn index(&self) -> usize {
        ((self.x == Sign::Minus) as usize) << 1 | (self.y == Sign::Minus) as usize
    }
}

/// Whether a distribution came from inputs that are all physical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Physical,
    /// At least one input violates its physical constraint; entries may be
    /// negative.
    Hypothetical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleOutcomeDistribution {
    p: [f64; 4],
    provenance: Provenance,
}

impl SingleOutcomeDistribution {
    pub fn from_probabilities(p: [f64; 4], provenance: Provenance) -> Self {
        Self { p, provenance }
    }

    pub fn uniform() -> Self {
        Self { p: [0.25; 4], provenance: Provenance::Physical }
    }

    pub fn get(&self, o: OutcomeLabel) -> f64 {
        self.p[o.index()]
    }

    pub fn probabilities(&self) -> &[f64; 4] {
        &self.p
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn has_negative(&self, tol: f64) -> bool {
        self.min() < -tol
    }

    pub fn iter(&self) -> impl Iterator<Item = (OutcomeLabel, f64)> + '_ {
        OutcomeLabel::ALL.into_iter().map(|o| (o, self.get(o)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub mean_xy: f64,
}

/// `E(x, y) = (I + x·v_x·X + y·v_y·Y) / 4`.
pub fn povm_element(v: &VisibilityPair, o: OutcomeLabel) -> ComplexMatrix {
    let x = pauli(Pauli::X).scale_real(o.x.value() * v.v_x);
    let y = pauli(Pauli::Y).scale_real(o.y.value() * v.v_y);
    (&(&pauli(Pauli::I) + &x) + &y).scale_real(0.25)
}

/// `P(x, y) = (1 + x·v_x·ex + y·v_y·ey) / 4`.
pub fn outcome_distribution(v: &VisibilityPair, s: &BlochEquatorial) -> SingleOutcomeDistribution {
    let mut p = [0.0; 4];
    for o in OutcomeLabel::ALL {
        p[o.index()] = 0.25 * (1.0 + o.x.value() * v.v_x * s.ex + o.y.value() * v.v_y * s.ey);
    }
    let provenance = if v.is_admissible(FLAG_TOL) && s.is_physical(FLAG_TOL) {
        Provenance::Physical
    } else {
        Provenance::Hypothetical
    };
    SingleOutcomeDistribution { p, provenance }
}

pub fn distribution_moments(d: &SingleOutcomeDistribution) -> Moments {
    let mut m = Moments { mean_x: 0.0, mean_y: 0.0, mean_xy: 0.0 };
    for (o, p) in d.iter() {
        let (x, y) = (o.x.value(), o.y.value());
        m.mean_x += x * p;
        m.mean_y += y * p;
        m.mean_xy += x * y * p;
    }
    m
}

/// `|v_x·ex| + |v_y·ey|`; at most 1 exactly when every outcome probability is
/// non-negative.
pub fn state_positivity_lhs(v: &VisibilityPair, s: &BlochEquatorial) -> f64 {
    (v.v_x * s.ex).abs() + (v.v_y * s.ey).abs()
}

/// `v_x² + v_y² ≤ 1 + tol`.
pub fn check_visibility_admissible(v: &VisibilityPair, tol: f64) -> bool {
    v.v_x * v.v_x + v.v_y * v.v_y <= 1.0 + tol
}

/// `ex² + ey²`.
pub fn bloch_bound_lhs(s: &BlochEquatorial) -> f64 {
    s.ex * s.ex + s.ey * s.ey
}
