//! Two-qubit states and the 16-outcome statistics of independent local joint
//! measurements on each qubit.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::joint::{
    outcome_distribution, povm_element, BlochEquatorial, OutcomeLabel, Provenance, Sign, SingleOutcomeDistribution,
    VisibilityPair, FLAG_TOL,
};
use crate::matrix::{hermitian_eigenvalues, pauli, tensor_product, trace, trace_of_product, ComplexMatrix, Pauli};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// A validated two-qubit density operator: Hermitian, unit trace and
/// positive semidefinite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityOperator4 {
    mat: ComplexMatrix,
}

impl DensityOperator4 {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.dim() != 4 {
            return Err(Error::InvalidState(format!("expected a 4x4 matrix, got {0}x{0}", mat.dim())));
        }
        let dev = mat.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = trace(&mat);
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&mat, HERMITIAN_TOL)?.min();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat })
    }

    /// `|ψ⟩⟨ψ|` for the normalized version of `ket`.
    pub fn from_ket(ket: &[Complex64; 4]) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("state vector has zero or non-finite norm".into()));
        }
        let v: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v)?)
    }

    pub fn maximally_mixed() -> Self {
        Self { mat: ComplexMatrix::identity(4).scale_real(0.25) }
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityOperator4)]) -> Result<Self> {
        if parts.iter().any(|(w, _)| w.is_nan() || *w < 0.0) {
            return Err(Error::InvalidState("mixture weights must be non-negative".into()));
        }
        let mat = parts.iter().fold(ComplexMatrix::zeros(4), |acc, (w, rho)| &acc + &rho.mat.scale_real(*w));
        Self::new(mat)
    }

    /// Parses rows of `[re, im]` pairs.
    pub fn from_nested_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(Error::InvalidState("state file must hold 4 rows of 4 [re, im] pairs".into()));
        }
        let entries = rows.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
        Self::new(ComplexMatrix::from_row_major(entries)?)
    }

    pub fn to_nested_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..4).map(|i| (0..4).map(|j| [self.mat[(i, j)].re, self.mat[(i, j)].im]).collect()).collect()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        trace_of_product(&self.mat, &self.mat).expect("same dimension").re
    }

    /// Partial trace over qubit B.
    pub fn reduced_a(&self) -> ComplexMatrix {
        let mut r = ComplexMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                r[(i, j)] = (0..2).map(|k| self.mat[(2 * i + k, 2 * j + k)]).sum();
            }
        }
        r
    }

    /// Partial trace over qubit A.
    pub fn reduced_b(&self) -> ComplexMatrix {
        let mut r = ComplexMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                r[(i, j)] = (0..2).map(|k| self.mat[(2 * k + i, 2 * k + j)]).sum();
            }
        }
        r
    }

    fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        trace_of_product(&self.mat, op).expect("4x4 operator")
    }
}

/// The four correlations `⟨X⊗X⟩, ⟨X⊗Y⟩, ⟨Y⊗X⟩, ⟨Y⊗Y⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationVector {
    pub c_xx: f64,
    pub c_xy: f64,
    pub c_yx: f64,
    pub c_yy: f64,
}

impl CorrelationVector {
    pub const ZERO: CorrelationVector = CorrelationVector { c_xx: 0.0, c_xy: 0.0, c_yx: 0.0, c_yy: 0.0 };

    pub fn new(c_xx: f64, c_xy: f64, c_yx: f64, c_yy: f64) -> Self {
        Self { c_xx, c_xy, c_yx, c_yy }
    }

    pub fn from_array([c_xx, c_xy, c_yx, c_yy]: [f64; 4]) -> Self {
        Self { c_xx, c_xy, c_yx, c_yy }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.c_xx, self.c_xy, self.c_yx, self.c_yy]
    }

    pub fn in_range(&self, tol: f64) -> bool {
        self.to_array().iter().all(|c| c.abs() <= 1.0 + tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array().iter().zip(other.to_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMeans {
    pub ax: f64,
    pub ay: f64,
    pub bx: f64,
    pub by: f64,
}

impl LocalMeans {
    pub fn max_abs(&self) -> f64 {
        [self.ax, self.ay, self.bx, self.by].iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairOutcomeLabel {
    pub x_a: Sign,
    pub y_a: Sign,
    pub x_b: Sign,
    pub y_b: Sign,
}

impl PairOutcomeLabel {
    pub fn new(x_a: Sign, y_a: Sign, x_b: Sign, y_b: Sign) -> Self {
        Self { x_a, y_a, x_b, y_b }
    }

    /// Builds a label from ±1 integers; anything else is rejected.
    pub fn from_values(x_a: i8, y_a: i8, x_b: i8, y_b: i8) -> Result<Self> {
        let sign = |v: i8| match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Config(format!("outcome value {v} is not ±1"))),
        };
        Ok(Self::new(sign(x_a)?, sign(y_a)?, sign(x_b)?, sign(y_b)?))
    }

    pub fn from_parts(a: OutcomeLabel, b: OutcomeLabel) -> Self {
        Self { x_a: a.x, y_a: a.y, x_b: b.x, y_b: b.y }
    }

    pub fn a(&self) -> OutcomeLabel {
        OutcomeLabel::new(self.x_a, self.y_a)
    }

    pub fn b(&self) -> OutcomeLabel {
        OutcomeLabel::new(self.x_b, self.y_b)
    }

    /// Position in the fixed ordering: `x_a` is the most significant bit,
    /// `-1` sets a bit.
    pub fn index(&self) -> usize {
        self.a().index() << 2 | self.b().index()
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < 16, "pair outcome index out of range");
        Self::from_parts(OutcomeLabel::ALL[i >> 2], OutcomeLabel::ALL[i & 3])
    }

    pub fn all() -> impl Iterator<Item = PairOutcomeLabel> {
        (0..16).map(Self::from_index)
    }

    pub fn values(&self) -> [i8; 4] {
        [self.x_a.as_i8(), self.y_a.as_i8(), self.x_b.as_i8(), self.y_b.as_i8()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairOutcomeDistribution {
    p: [f64; 16],
    provenance: Provenance,
}

impl PairOutcomeDistribution {
    pub fn from_probabilities(p: [f64; 16], provenance: Provenance) -> Self {
        Self { p, provenance }
    }

    pub fn uniform() -> Self {
        Self { p: [1.0 / 16.0; 16], provenance: Provenance::Physical }
    }

    pub fn get(&self, o: PairOutcomeLabel) -> f64 {
        self.p[o.index()]
    }

    pub fn probabilities(&self) -> &[f64; 16] {
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

    pub fn iter(&self) -> impl Iterator<Item = (PairOutcomeLabel, f64)> + '_ {
        PairOutcomeLabel::all().map(|o| (o, self.get(o)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.p.iter().zip(&other.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Distribution of A's outcomes, summing over B.
    pub fn marginal_a(&self) -> SingleOutcomeDistribution {
        let mut p = [0.0; 4];
        for (o, q) in self.iter() {
            p[o.a().index()] += q;
        }
        SingleOutcomeDistribution::from_probabilities(p, self.provenance)
    }

    pub fn marginal_b(&self) -> SingleOutcomeDistribution {
        let mut p = [0.0; 4];
        for (o, q) in self.iter() {
            p[o.b().index()] += q;
        }
        SingleOutcomeDistribution::from_probabilities(p, self.provenance)
    }
}

/// Outcome function on one side: `1`, `x`, `y` or `x·y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    One,
    X,
    Y,
    XY,
}

impl Factor {
    pub const ALL: [Factor; 4] = [Factor::One, Factor::X, Factor::Y, Factor::XY];

    pub fn eval(self, o: OutcomeLabel) -> f64 {
        match self {
            Factor::One => 1.0,
            Factor::X => o.x.value(),
            Factor::Y => o.y.value(),
            Factor::XY => o.x.value() * o.y.value(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MomentSpec {
    pub factor_a: Factor,
    pub factor_b: Factor,
}

impl MomentSpec {
    pub fn new(factor_a: Factor, factor_b: Factor) -> Self {
        Self { factor_a, factor_b }
    }

    pub fn eval(&self, o: PairOutcomeLabel) -> f64 {
        self.factor_a.eval(o.a()) * self.factor_b.eval(o.b())
    }

    /// Product of outcome symbols, e.g. `x_a*y_a*x_b`; `1` for the trivial spec.
    pub fn label(&self) -> String {
        let side = |f: Factor, s: &str| match f {
            Factor::One => vec![],
            Factor::X => vec![format!("x_{s}")],
            Factor::Y => vec![format!("y_{s}")],
            Factor::XY => vec![format!("x_{s}"), format!("y_{s}")],
        };
        let parts = [side(self.factor_a, "a"), side(self.factor_b, "b")].concat();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn involves_xy(&self) -> bool {
        self.factor_a == Factor::XY || self.factor_b == Factor::XY
    }

    /// All 15 non-trivial specs.
    pub fn all_nontrivial() -> impl Iterator<Item = MomentSpec> {
        Factor::ALL
            .into_iter()
            .flat_map(|a| Factor::ALL.into_iter().map(move |b| MomentSpec::new(a, b)))
            .filter(|s| !(s.factor_a == Factor::One && s.factor_b == Factor::One))
    }

    /// The five specs that stay non-trivial for zero-local-mean states and
    /// contain an `xy` factor.
    pub fn mixed_xy() -> [MomentSpec; 5] {
        use Factor::*;
        [
            MomentSpec::new(XY, One),
            MomentSpec::new(One, XY),
            MomentSpec::new(XY, X),
            MomentSpec::new(XY, Y),
            MomentSpec::new(XY, XY),
        ]
    }
}

/// `(|00⟩ + e^{iφ}|11⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellFamilyState {
    phi: f64,
}

impl BellFamilyState {
    /// The phase is reduced into `[0, 2π)`.
    pub fn new(phi: f64) -> Self {
        Self { phi: phi.rem_euclid(std::f64::consts::TAU) }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn ket(&self) -> [Complex64; 4] {
        let zero = Complex64::new(0.0, 0.0);
        [Complex64::new(FRAC_1_SQRT_2, 0.0), zero, zero, Complex64::from_polar(FRAC_1_SQRT_2, self.phi)]
    }

    pub fn to_density(&self) -> DensityOperator4 {
        let ket = self.ket();
        let mat = ComplexMatrix::outer(&ket, &ket).expect("equal lengths");
        DensityOperator4 { mat }
    }
}

/// The four Bell states `Φ+, Φ-, Ψ+, Ψ-`.
pub fn bell_basis() -> [DensityOperator4; 4] {
    let (h, z) = (Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, 0.0));
    let kets = [[h, z, z, h], [h, z, z, -h], [z, h, h, z], [z, h, -h, z]];
    kets.map(|k| DensityOperator4 { mat: ComplexMatrix::outer(&k, &k).expect("equal lengths") })
}

fn local_pair(a: Pauli, b: Pauli) -> ComplexMatrix {
    tensor_product(&pauli(a), &pauli(b))
}

/// `c_ij = Re Tr(ρ·σ_i⊗σ_j)` for `i, j ∈ {X, Y}`.
pub fn correlations_of_state(rho: &DensityOperator4) -> CorrelationVector {
    let c = |a, b| {
        let t = rho.expectation(&local_pair(a, b));
        debug_assert!(t.im.abs() < 1e-12, "expectation of a Hermitian operator must be real");
        t.re
    };
    CorrelationVector {
        c_xx: c(Pauli::X, Pauli::X),
        c_xy: c(Pauli::X, Pauli::Y),
        c_yx: c(Pauli::Y, Pauli::X),
        c_yy: c(Pauli::Y, Pauli::Y),
    }
}

pub fn local_means_of_state(rho: &DensityOperator4) -> LocalMeans {
    let e = |a, b| rho.expectation(&local_pair(a, b)).re;
    LocalMeans {
        ax: e(Pauli::X, Pauli::I),
        ay: e(Pauli::Y, Pauli::I),
        bx: e(Pauli::I, Pauli::X),
        by: e(Pauli::I, Pauli::Y),
    }
}

/// `P(o) = Tr(ρ·E_A(x_a, y_a)⊗E_B(x_b, y_b))`, valid for any state.
pub fn pair_distribution_trace(
    rho: &DensityOperator4,
    va: &VisibilityPair,
    vb: &VisibilityPair,
) -> PairOutcomeDistribution {
    let ea = OutcomeLabel::ALL.map(|o| povm_element(va, o));
    let eb = OutcomeLabel::ALL.map(|o| povm_element(vb, o));
    let mut p = [0.0; 16];
    for o in PairOutcomeLabel::all() {
        let op = tensor_product(&ea[o.a().index()], &eb[o.b().index()]);
        p[o.index()] = rho.expectation(&op).re;
    }
    let provenance = if va.is_admissible(FLAG_TOL) && vb.is_admissible(FLAG_TOL) {
        Provenance::Physical
    } else {
        Provenance::Hypothetical
    };
    PairOutcomeDistribution { p, provenance }
}

/// Closed-form distribution for states whose local means all vanish:
/// `P = (1 + Σ sign·V·V·c) / 16`, with each sign the product of the matching
/// outcome values on A and B.
///
/// Hypothetical correlation vectors are accepted; the result is flagged when
/// any probability drops below `-FLAG_TOL`.
pub fn pair_distribution_formula(
    c: &CorrelationVector,
    va: &VisibilityPair,
    vb: &VisibilityPair,
) -> PairOutcomeDistribution {
    let mut p = [0.0; 16];
    for o in PairOutcomeLabel::all() {
        let (xa, ya, xb, yb) = (o.x_a.value(), o.y_a.value(), o.x_b.value(), o.y_b.value());
        p[o.index()] = (1.0
            + xa * xb * va.v_x() * vb.v_x() * c.c_xx
            + xa * yb * va.v_x() * vb.v_y() * c.c_xy
            + ya * xb * va.v_y() * vb.v_x() * c.c_yx
            + ya * yb * va.v_y() * vb.v_y() * c.c_yy)
            / 16.0;
    }
    let physical = va.is_admissible(FLAG_TOL) && vb.is_admissible(FLAG_TOL) && p.iter().all(|&q| q >= -FLAG_TOL);
    let provenance = if physical { Provenance::Physical } else { Provenance::Hypothetical };
    PairOutcomeDistribution { p, provenance }
}

pub fn pair_moment(d: &PairOutcomeDistribution, spec: MomentSpec) -> f64 {
    d.iter().map(|(o, p)| spec.eval(o) * p).sum()
}

/// `(cos φ, sin φ, sin φ, -cos φ)`.
pub fn bell_family_correlations(phi: f64) -> CorrelationVector {
    let (s, c) = phi.sin_cos();
    CorrelationVector { c_xx: c, c_xy: s, c_yx: s, c_yy: -c }
}

/// Equatorial Bloch components of a reduced single-qubit state.
pub fn equatorial_components(reduced: &ComplexMatrix) -> Result<BlochEquatorial> {
    let ex = trace_of_product(reduced, &pauli(Pauli::X))?.re;
    let ey = trace_of_product(reduced, &pauli(Pauli::Y))?.re;
    BlochEquatorial::new(ex.clamp(-1.0, 1.0), ey.clamp(-1.0, 1.0))
}

/// A's single-qubit distribution predicted from the reduced state.
pub fn reduced_outcome_distribution_a(
    rho: &DensityOperator4,
    va: &VisibilityPair,
) -> Result<SingleOutcomeDistribution> {
    Ok(outcome_distribution(va, &equatorial_components(&rho.reduced_a())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn vis(a: f64, b: f64) -> VisibilityPair {
        VisibilityPair::new(a, b).unwrap()
    }

    fn assert_corr(got: CorrelationVector, want: [f64; 4], tol: f64) {
        let d = got.max_abs_diff(&CorrelationVector::from_array(want));
        assert!(d < tol, "{got:?} vs {want:?}");
    }

    #[test]
    fn pair_label_index_roundtrip() {
        for i in 0..16 {
            assert_eq!(PairOutcomeLabel::from_index(i).index(), i);
        }
        let o = PairOutcomeLabel::from_values(1, 1, -1, -1).unwrap();
        assert_eq!(o.index(), 0b0011);
        assert!(PairOutcomeLabel::from_values(0, 1, 1, 1).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator4::new(ComplexMatrix::identity(4)).is_err());
        assert!(DensityOperator4::new(ComplexMatrix::identity(2).scale_real(0.5)).is_err());
        let mut m = ComplexMatrix::identity(4).scale_real(0.25);
        m[(0, 0)] = Complex64::new(-0.1, 0.0);
        m[(1, 1)] = Complex64::new(0.6, 0.0);
        assert!(matches!(DensityOperator4::new(m), Err(Error::InvalidState(_))));
        let mut m = ComplexMatrix::identity(4).scale_real(0.25);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(DensityOperator4::new(m).is_err());
    }

    #[test]
    fn bell_family_is_a_valid_rank_one_state() {
        for phi in [0.0, 0.3, FRAC_PI_2, 4.0] {
            let rho = BellFamilyState::new(phi).to_density();
            let checked = DensityOperator4::new(rho.matrix().clone()).unwrap();
            assert!((checked.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn correlations_of_known_states() {
        assert_corr(correlations_of_state(&DensityOperator4::maximally_mixed()), [0.0; 4], 1e-15);
        assert_corr(correlations_of_state(&BellFamilyState::new(0.0).to_density()), [1.0, 0.0, 0.0, -1.0], 1e-12);
        assert_corr(correlations_of_state(&BellFamilyState::new(FRAC_PI_2).to_density()), [0.0, 1.0, 1.0, 0.0], 1e-12);
    }

    #[test]
    fn bell_family_correlations_values() {
        assert_corr(bell_family_correlations(0.0), [1.0, 0.0, 0.0, -1.0], 0.0 + 1e-300);
        let h = SQRT_2 / 2.0;
        assert_corr(bell_family_correlations(FRAC_PI_4), [h, h, h, -h], 1e-15);
    }

    #[test]
    fn local_means() {
        for phi in [0.0, 1.0, 2.5] {
            assert!(local_means_of_state(&BellFamilyState::new(phi).to_density()).max_abs() < 1e-15);
        }
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        // (|0⟩+|1⟩)/√2 ⊗ |0⟩
        let rho = DensityOperator4::from_ket(&[h, z, h, z]).unwrap();
        let m = local_means_of_state(&rho);
        assert!((m.ax - 1.0).abs() < 1e-15);
        assert!(m.ay.abs() < 1e-15 && m.bx.abs() < 1e-15 && m.by.abs() < 1e-15);
        assert_eq!(local_means_of_state(&DensityOperator4::maximally_mixed()).max_abs(), 0.0);
    }

    #[test]
    fn maximally_mixed_gives_uniform() {
        let d = pair_distribution_trace(&DensityOperator4::maximally_mixed(), &vis(0.6, 0.8), &vis(0.1, 0.3));
        assert!(d.max_abs_diff(&PairOutcomeDistribution::uniform()) < 1e-15);
    }

    #[test]
    fn bell_family_outcome_probability() {
        let (alpha, beta, phi) = (0.4_f64, 1.1_f64, 0.9_f64);
        let rho = BellFamilyState::new(phi).to_density();
        let va = VisibilityPair::saturated(alpha).unwrap();
        let vb = VisibilityPair::saturated(beta).unwrap();
        let d = pair_distribution_trace(&rho, &va, &vb);
        let o = PairOutcomeLabel::from_values(1, 1, -1, -1).unwrap();
        let want = (1.0 - (alpha + beta - phi).cos()) / 16.0;
        assert!((d.get(o) - want).abs() < 1e-15);
    }

    #[test]
    fn product_states_factorize() {
        let sa = BlochEquatorial::new(0.6, -0.3).unwrap();
        let sb = BlochEquatorial::new(-0.2, 0.9).unwrap();
        let rho = DensityOperator4::new(tensor_product(&sa.density(), &sb.density())).unwrap();
        let (va, vb) = (vis(0.8, 0.5), vis(0.3, 0.95));
        let d = pair_distribution_trace(&rho, &va, &vb);
        let (da, db) = (outcome_distribution(&va, &sa), outcome_distribution(&vb, &sb));
        for o in PairOutcomeLabel::all() {
            assert!((d.get(o) - da.get(o.a()) * db.get(o.b())).abs() < 1e-15);
        }
    }

    #[test]
    fn formula_sign_rule_for_printed_outcome() {
        // at (+1,+1,-1,-1) every correlation enters with a minus sign
        let c = CorrelationVector::new(0.1, 0.2, 0.3, 0.4);
        let (va, vb) = (vis(0.6, 0.8), vis(0.28, 0.96));
        let d = pair_distribution_formula(&c, &va, &vb);
        let want = (1.0
            - va.v_x() * vb.v_x() * c.c_xx
            - va.v_x() * vb.v_y() * c.c_xy
            - va.v_y() * vb.v_x() * c.c_yx
            - va.v_y() * vb.v_y() * c.c_yy)
            / 16.0;
        assert_eq!(d.get(PairOutcomeLabel::from_values(1, 1, -1, -1).unwrap()), want);
        let d0 = pair_distribution_formula(&CorrelationVector::ZERO, &va, &vb);
        assert!(d0.max_abs_diff(&PairOutcomeDistribution::uniform()) == 0.0);
    }

    #[test]
    fn hypothetical_correlations_go_negative() {
        let h = FRAC_1_SQRT_2;
        let c = CorrelationVector::new(1.0, 1.0, 1.0, -1.0);
        let o = PairOutcomeLabel::from_values(1, 1, -1, -1).unwrap();
        // equal visibilities only reach the boundary: 1 - (1 + 1 + 1 - 1)/2 = 0
        let d = pair_distribution_formula(&c, &vis(h, h), &vis(h, h));
        assert!(d.get(o).abs() < 1e-15);
        assert!(d.min() >= -1e-15);
        // a projective X measurement on B pushes it below zero
        let d = pair_distribution_formula(&c, &vis(h, h), &vis(1.0, 0.0));
        assert!((d.get(o) - (1.0 - SQRT_2) / 16.0).abs() < 1e-15);
        assert_eq!(d.provenance(), Provenance::Hypothetical);
    }

    #[test]
    fn moments_on_bell_state() {
        let d = pair_distribution_trace(&BellFamilyState::new(0.0).to_density(), &vis(1.0, 0.0), &vis(1.0, 0.0));
        assert!((pair_moment(&d, MomentSpec::new(Factor::X, Factor::X)) - 1.0).abs() < 1e-15);
        assert!((pair_moment(&d, MomentSpec::new(Factor::One, Factor::One)) - 1.0).abs() < 1e-15);
        assert!(pair_moment(&d, MomentSpec::new(Factor::XY, Factor::One)).abs() < 1e-15);
    }

    #[test]
    fn moment_spec_enumeration() {
        assert_eq!(MomentSpec::all_nontrivial().count(), 15);
        assert!(MomentSpec::mixed_xy().iter().all(|s| s.involves_xy()));
    }

    #[test]
    fn nested_rows_roundtrip() {
        let rho = BellFamilyState::new(0.7).to_density();
        let back = DensityOperator4::from_nested_rows(&rho.to_nested_rows()).unwrap();
        assert_eq!(back, rho);
        assert!(DensityOperator4::from_nested_rows(&rho.to_nested_rows()[..3]).is_err());
    }

    #[test]
    fn reduced_states_of_bell_family_are_maximally_mixed() {
        let rho = BellFamilyState::new(1.3).to_density();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(rho.reduced_a().max_abs_diff(&half) < 1e-15);
        assert!(rho.reduced_b().max_abs_diff(&half) < 1e-15);
    }
}
