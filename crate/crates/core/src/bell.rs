//! Exact, table-driven algebra of Bell-diagonal two-qubit states.
//!
//! A Bell pair subject to Pauli noise stays diagonal in the Bell basis, so
//! its state is fully described by a probability vector over the four Bell
//! labels. This module provides the depolarizing error channel, the
//! entanglement-swapping composition, the entanglement-purification
//! composition, and the two success-probability rules those compositions
//! induce. Everything is expected-value arithmetic on immutable values; no
//! rounding or renormalization happens inside the operations.
//!
//! The composition tables are stored as literal constants so they stay the
//! single source of truth; the group-structure shortcuts they happen to obey
//! live only in test oracles.

use std::error::Error;
use std::fmt;

/// Tolerance for validating that the four components sum to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// The four Bell labels, in the fixed component order (Φ⁺, Ψ⁺, Ψ⁻, Φ⁻).
///
/// Φ⁺ is the target state. The other three mark an accumulated X, Y or Z
/// error on one half of the pair. This order is the index order of
/// [`BellDiagonalState`] components and of the composition tables below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    /// (|00⟩ + |11⟩)/√2 — the target state.
    PhiPlus = 0,
    /// (|01⟩ + |10⟩)/√2 — one bit flip away from the target.
    PsiPlus = 1,
    /// (|01⟩ − |10⟩)/√2 — bit and phase flip.
    PsiMinus = 2,
    /// (|00⟩ − |11⟩)/√2 — one phase flip.
    PhiMinus = 3,
}

impl BellLabel {
    /// All four labels in component order.
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiMinus,
    ];

    /// Component index of this label.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BellLabel::PhiPlus => "Φ+",
            BellLabel::PsiPlus => "Ψ+",
            BellLabel::PsiMinus => "Ψ-",
            BellLabel::PhiMinus => "Φ-",
        };
        write!(f, "{s}")
    }
}

use BellLabel::{PhiMinus, PhiPlus, PsiMinus, PsiPlus};

/// Output label of entanglement swapping, indexed `[input1][input2]`.
///
/// Swapping a pair carrying error `input1` with a pair carrying error
/// `input2` yields a pair carrying the tabulated error.
pub const SWAP_OUTPUT: [[BellLabel; 4]; 4] = [
    [PhiPlus, PsiPlus, PsiMinus, PhiMinus],
    [PsiPlus, PhiPlus, PhiMinus, PsiMinus],
    [PsiMinus, PhiMinus, PhiPlus, PsiPlus],
    [PhiMinus, PsiMinus, PsiPlus, PhiPlus],
];

/// Output label of entanglement purification, indexed `[input1][input2]`.
///
/// `None` marks a discarded combination: the parity comparison flags an
/// error and both pairs are lost. The surviving combinations are exactly
/// those with both labels in {Φ⁺, Ψ⁻} or both in {Ψ⁺, Φ⁻}.
pub const PURIFY_OUTPUT: [[Option<BellLabel>; 4]; 4] = [
    [Some(PhiPlus), None, Some(PsiMinus), None],
    [None, Some(PsiPlus), None, Some(PhiMinus)],
    [Some(PsiMinus), None, Some(PhiPlus), None],
    [None, Some(PhiMinus), None, Some(PsiPlus)],
];

/// A mixture of the four Bell states: components are probabilities summing
/// to one, and the fidelity is the Φ⁺ component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonalState {
    probs: [f64; 4],
}

/// Validation failure when constructing a [`BellDiagonalState`].
#[derive(Debug, Clone, PartialEq)]
pub enum StateError {
    /// A component is outside [0, 1] (or not finite).
    ComponentOutOfRange { index: usize, value: f64 },
    /// The components do not sum to one within [`NORMALIZATION_TOLERANCE`].
    NotNormalized { sum: f64 },
}

impl fmt::Display for StateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateError::ComponentOutOfRange { index, value } => {
                write!(f, "state component {index} = {value} is outside [0, 1]")
            }
            StateError::NotNormalized { sum } => {
                write!(f, "state components sum to {sum}, expected 1")
            }
        }
    }
}

impl Error for StateError {}

impl BellDiagonalState {
    /// Validate and construct a state from its four components.
    pub fn new(probs: [f64; 4]) -> Result<Self, StateError> {
        for (index, &value) in probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(StateError::ComponentOutOfRange { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(StateError::NotNormalized { sum });
        }
        Ok(Self { probs })
    }

    /// Construct without validation. Only for operations that preserve
    /// normalization by construction.
    fn new_unchecked(probs: [f64; 4]) -> Self {
        Self { probs }
    }

    /// The pure target state Φ⁺.
    pub fn pure_target() -> Self {
        Self::pure(PhiPlus)
    }

    /// A pure Bell state.
    pub fn pure(label: BellLabel) -> Self {
        let mut probs = [0.0; 4];
        probs[label.index()] = 1.0;
        Self { probs }
    }

    /// The fully mixed state (0.25, 0.25, 0.25, 0.25).
    pub fn uniform() -> Self {
        Self { probs: [0.25; 4] }
    }

    /// Werner state of fidelity `f`: the three error components share the
    /// remaining weight equally. Requires `f` in [0, 1].
    pub fn werner(f: f64) -> Result<Self, StateError> {
        if !(0.0..=1.0).contains(&f) || !f.is_finite() {
            return Err(StateError::ComponentOutOfRange { index: 0, value: f });
        }
        let rest = (1.0 - f) / 3.0;
        Ok(Self {
            probs: [f, rest, rest, rest],
        })
    }

    /// Probability weight of the target state Φ⁺.
    pub fn fidelity(&self) -> f64 {
        self.probs[0]
    }

    /// Probability weight of one Bell label.
    pub fn component(&self, label: BellLabel) -> f64 {
        self.probs[label.index()]
    }

    /// The four components in label order.
    pub fn components(&self) -> [f64; 4] {
        self.probs
    }

    /// Absolute deviation of the component sum from one. Stays tiny across
    /// long runs because every operation preserves the sum exactly in real
    /// arithmetic.
    pub fn normalization_error(&self) -> f64 {
        (self.probs.iter().sum::<f64>() - 1.0).abs()
    }
}

impl fmt::Display for BellDiagonalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(Φ+:{:.6}, Ψ+:{:.6}, Ψ-:{:.6}, Φ-:{:.6})",
            self.probs[0], self.probs[1], self.probs[2], self.probs[3]
        )
    }
}

/// A per-application error probability.
///
/// For memory errors the application unit is one qubit-pair for one unit
/// time; for operation errors it is one node executing one operation. Values
/// above 3/4 are rejected: past that point the depolarizing map overshoots
/// the fully mixed state.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ErrorProbability(f64);

/// Validation failure when constructing an [`ErrorProbability`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityOutOfRange(pub f64);

impl fmt::Display for ProbabilityOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error probability {} is outside [0, 0.75]", self.0)
    }
}

impl Error for ProbabilityOutOfRange {}

impl ErrorProbability {
    /// No error.
    pub const ZERO: ErrorProbability = ErrorProbability(0.0);

    /// Largest accepted probability.
    pub const MAX: f64 = 0.75;

    /// Validate and wrap a probability in [0, 3/4].
    pub fn new(p: f64) -> Result<Self, ProbabilityOutOfRange> {
        if !(0.0..=Self::MAX).contains(&p) || !p.is_finite() {
            return Err(ProbabilityOutOfRange(p));
        }
        Ok(Self(p))
    }

    /// The wrapped probability.
    pub fn value(self) -> f64 {
        self.0
    }
}

/// One step of the symmetric error channel: with probability `1 − p` the
/// state is kept, with probability `p/3` each of the X, Y and Z errors is
/// applied. Componentwise, each weight keeps `1 − p` of itself and receives
/// `p/3` of each of the other three.
pub fn apply_error_channel(s: BellDiagonalState, p: ErrorProbability) -> BellDiagonalState {
    let q = p.value();
    let probs = s.components();
    let total: f64 = probs.iter().sum();
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = (1.0 - q) * probs[i] + q / 3.0 * (total - probs[i]);
    }
    BellDiagonalState::new_unchecked(out)
}

/// Output label of entanglement swapping on two definite input labels.
pub fn swap_label(l1: BellLabel, l2: BellLabel) -> BellLabel {
    SWAP_OUTPUT[l1.index()][l2.index()]
}

/// Entanglement-swapping composition of two Bell-diagonal states: the
/// 16-term convolution of the inputs through [`SWAP_OUTPUT`]. Normalized by
/// construction.
pub fn swap_states(s1: BellDiagonalState, s2: BellDiagonalState) -> BellDiagonalState {
    let a = s1.components();
    let b = s2.components();
    let mut out = [0.0; 4];
    for (i, row) in SWAP_OUTPUT.iter().enumerate() {
        for (j, label) in row.iter().enumerate() {
            out[label.index()] += a[i] * b[j];
        }
    }
    BellDiagonalState::new_unchecked(out)
}

/// Purification of two identically held states discarded every surviving
/// combination: no output state exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroSurvival;

impl fmt::Display for ZeroSurvival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "purification has zero survival probability")
    }
}

impl Error for ZeroSurvival {}

/// Entanglement-purification composition of two Bell-diagonal states.
///
/// Accumulates the surviving rows of [`PURIFY_OUTPUT`]; the survival mass
/// `p_table` normalizes the output state and is returned alongside it.
/// Fails with [`ZeroSurvival`] when no surviving combination carries weight.
pub fn purify_states(
    s1: BellDiagonalState,
    s2: BellDiagonalState,
) -> Result<(BellDiagonalState, f64), ZeroSurvival> {
    let a = s1.components();
    let b = s2.components();
    let mut out = [0.0; 4];
    let mut p_table = 0.0;
    for (i, row) in PURIFY_OUTPUT.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if let Some(label) = entry {
                let w = a[i] * b[j];
                out[label.index()] += w;
                p_table += w;
            }
        }
    }
    if p_table <= 0.0 {
        return Err(ZeroSurvival);
    }
    for component in &mut out {
        *component /= p_table;
    }
    Ok((BellDiagonalState::new_unchecked(out), p_table))
}

/// The statistical purification success probability
/// `(A₀+D₀)(A₁+D₁) + (B₀+C₀)(B₁+C₁)`.
///
/// This groups {Φ⁺, Φ⁻} against {Ψ⁺, Ψ⁻} and therefore disagrees with the
/// survival mass of [`PURIFY_OUTPUT`] (which groups {Φ⁺, Ψ⁻} against
/// {Ψ⁺, Φ⁻}) on states outside the Werner family. Both rules are exposed so
/// the disagreement stays observable; which one divides the resource count
/// is a policy choice.
pub fn purify_success_probability_paper(s1: BellDiagonalState, s2: BellDiagonalState) -> f64 {
    let a = s1.components();
    let b = s2.components();
    (a[0] + a[3]) * (b[0] + b[3]) + (a[1] + a[2]) * (b[1] + b[2])
}

/// Project a state onto the Werner family, keeping its fidelity and
/// spreading the error weight equally over the three error labels. Models
/// the random bilateral rotations (twirl) applied between purification
/// rounds.
pub fn twirl_to_werner(s: BellDiagonalState) -> BellDiagonalState {
    let probs = s.components();
    let rest = (probs[1] + probs[2] + probs[3]) / 3.0;
    BellDiagonalState::new_unchecked([probs[0], rest, rest, rest])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual}"
        );
    }

    // The swap table transcribed row by row in its published order, with
    // Φ⁻ listed before Ψ⁻ inside each block.
    #[test]
    fn swap_table_matches_published_rows() {
        let rows = [
            (PhiPlus, PhiPlus, PhiPlus),
            (PhiPlus, PsiPlus, PsiPlus),
            (PhiPlus, PhiMinus, PhiMinus),
            (PhiPlus, PsiMinus, PsiMinus),
            (PsiPlus, PhiPlus, PsiPlus),
            (PsiPlus, PsiPlus, PhiPlus),
            (PsiPlus, PhiMinus, PsiMinus),
            (PsiPlus, PsiMinus, PhiMinus),
            (PhiMinus, PhiPlus, PhiMinus),
            (PhiMinus, PsiPlus, PsiMinus),
            (PhiMinus, PhiMinus, PhiPlus),
            (PhiMinus, PsiMinus, PsiPlus),
            (PsiMinus, PhiPlus, PsiMinus),
            (PsiMinus, PsiPlus, PhiMinus),
            (PsiMinus, PhiMinus, PsiPlus),
            (PsiMinus, PsiMinus, PhiPlus),
        ];
        for (l1, l2, expected) in rows {
            assert_eq!(swap_label(l1, l2), expected, "swap({l1}, {l2})");
        }
    }

    // The purification table transcribed row by row in its published order.
    #[test]
    fn purify_table_matches_published_rows() {
        let rows = [
            (PhiPlus, PhiPlus, Some(PhiPlus)),
            (PhiPlus, PsiPlus, None),
            (PhiPlus, PhiMinus, None),
            (PhiPlus, PsiMinus, Some(PsiMinus)),
            (PsiPlus, PhiPlus, None),
            (PsiPlus, PsiPlus, Some(PsiPlus)),
            (PsiPlus, PhiMinus, Some(PhiMinus)),
            (PsiPlus, PsiMinus, None),
            (PhiMinus, PhiPlus, None),
            (PhiMinus, PsiPlus, Some(PhiMinus)),
            (PhiMinus, PhiMinus, Some(PsiPlus)),
            (PhiMinus, PsiMinus, None),
            (PsiMinus, PhiPlus, Some(PsiMinus)),
            (PsiMinus, PsiPlus, None),
            (PsiMinus, PhiMinus, None),
            (PsiMinus, PsiMinus, Some(PhiPlus)),
        ];
        for (l1, l2, expected) in rows {
            assert_eq!(
                PURIFY_OUTPUT[l1.index()][l2.index()],
                expected,
                "purify({l1}, {l2})"
            );
        }
    }

    #[test]
    fn channel_identity_when_error_free() {
        let s = BellDiagonalState::pure_target();
        let out = apply_error_channel(s, ErrorProbability::ZERO);
        assert_eq!(out.components(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn channel_fixes_uniform_state() {
        let s = BellDiagonalState::uniform();
        for p in [0.0, 1e-4, 0.3, 0.75] {
            let out = apply_error_channel(s, ErrorProbability::new(p).unwrap());
            for component in out.components() {
                assert_close(component, 0.25, 1e-15);
            }
        }
    }

    #[test]
    fn channel_single_step_from_target() {
        let p = ErrorProbability::new(3e-4).unwrap();
        let out = apply_error_channel(BellDiagonalState::pure_target(), p);
        assert_close(out.fidelity(), 0.9997, 1e-15);
        for label in [PsiPlus, PsiMinus, PhiMinus] {
            assert_close(out.component(label), 1e-4, 1e-15);
        }
    }

    #[test]
    fn swap_identity_and_self_inverse() {
        for label in BellLabel::ALL {
            assert_eq!(swap_label(PhiPlus, label), label);
            assert_eq!(swap_label(label, label), PhiPlus);
        }
        let s = BellDiagonalState::new([0.7, 0.1, 0.15, 0.05]).unwrap();
        let out = swap_states(s, BellDiagonalState::pure_target());
        assert_eq!(out, s);
    }

    #[test]
    fn swap_of_pure_states() {
        let phi = BellDiagonalState::pure_target();
        assert_eq!(swap_states(phi, phi), phi);
        let psi_minus = BellDiagonalState::pure(PsiMinus);
        assert_eq!(swap_states(psi_minus, psi_minus), phi);
    }

    #[test]
    fn swap_of_werner_pairs() {
        let w = BellDiagonalState::werner(0.8).unwrap();
        let out = swap_states(w, w);
        // 0.64 + 3·(1/15)²
        assert_close(out.fidelity(), 0.64 + 3.0 / 225.0, 1e-15);
        // The convolution of two Werner states is Werner again.
        let rest = (1.0 - out.fidelity()) / 3.0;
        for label in [PsiPlus, PsiMinus, PhiMinus] {
            assert_close(out.component(label), rest, 1e-15);
        }
    }

    #[test]
    fn purify_pure_target_is_lossless() {
        let phi = BellDiagonalState::pure_target();
        let (out, p) = purify_states(phi, phi).unwrap();
        assert_eq!(out, phi);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn purify_discarding_pair_has_zero_survival() {
        let phi = BellDiagonalState::pure_target();
        let psi_plus = BellDiagonalState::pure(PsiPlus);
        assert_eq!(purify_states(phi, psi_plus), Err(ZeroSurvival));
    }

    #[test]
    fn purify_werner_pairs_exactly() {
        let w = BellDiagonalState::werner(0.8).unwrap();
        let (out, p) = purify_states(w, w).unwrap();
        // With a = 4/5 and the error components 1/15 each:
        // p = (13/15)² + (2/15)² = 173/225, out = (145, 2, 24, 2)/173.
        assert_close(p, 173.0 / 225.0, 1e-15);
        assert_close(out.fidelity(), 145.0 / 173.0, 1e-15);
        assert_close(out.component(PsiPlus), 2.0 / 173.0, 1e-15);
        assert_close(out.component(PsiMinus), 24.0 / 173.0, 1e-15);
        assert_close(out.component(PhiMinus), 2.0 / 173.0, 1e-15);
    }

    #[test]
    fn success_rules_agree_on_werner_inputs_only() {
        let w = BellDiagonalState::werner(0.8).unwrap();
        let (_, p_table) = purify_states(w, w).unwrap();
        assert_close(purify_success_probability_paper(w, w), p_table, 1e-15);

        // The asymmetric witness: the two rules split.
        let witness = BellDiagonalState::new([0.8, 0.0, 0.0, 0.2]).unwrap();
        assert_close(purify_success_probability_paper(witness, witness), 1.0, 1e-15);
        let (_, p_table) = purify_states(witness, witness).unwrap();
        assert_close(p_table, 0.68, 1e-15);
    }

    #[test]
    fn twirl_keeps_fidelity_and_evens_errors() {
        let s = BellDiagonalState::new([0.7, 0.2, 0.06, 0.04]).unwrap();
        let t = twirl_to_werner(s);
        assert_eq!(t.fidelity(), 0.7);
        for label in [PsiPlus, PsiMinus, PhiMinus] {
            assert_close(t.component(label), 0.1, 1e-15);
        }
    }

    #[test]
    fn state_validation_rejects_bad_inputs() {
        assert!(matches!(
            BellDiagonalState::new([1.1, 0.0, 0.0, -0.1]),
            Err(StateError::ComponentOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            BellDiagonalState::new([0.5, 0.2, 0.2, 0.2]),
            Err(StateError::NotNormalized { .. })
        ));
        assert!(BellDiagonalState::new([0.25, 0.25, 0.25, 0.25]).is_ok());
    }

    #[test]
    fn werner_limits() {
        assert_eq!(
            BellDiagonalState::werner(1.0).unwrap(),
            BellDiagonalState::pure_target()
        );
        assert_eq!(
            BellDiagonalState::werner(0.25).unwrap(),
            BellDiagonalState::uniform()
        );
        assert!(BellDiagonalState::werner(1.2).is_err());
    }

    #[test]
    fn error_probability_bounds() {
        assert!(ErrorProbability::new(0.0).is_ok());
        assert!(ErrorProbability::new(0.75).is_ok());
        assert!(ErrorProbability::new(0.7501).is_err());
        assert!(ErrorProbability::new(-1e-9).is_err());
        assert!(ErrorProbability::new(f64::NAN).is_err());
    }
}
