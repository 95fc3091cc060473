//! State evolution: CZ gates, local Clifford gates, and local Pauli
//! measurement by stabilizer truncation.
//!
//! Measuring a single-qubit Pauli `A` keeps exactly the elements commuting
//! with `A`, flips the sign of every kept element that explicitly contains
//! the measured letter when the outcome is −1, and removes the measured
//! column. When `±A` is already in the group the outcome is determined and
//! the group is unchanged apart from the column removal. All operations are
//! pure: they return new states.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use thiserror::Error;

use crate::group::{GroupError, QubitId, StabilizerState};
use crate::pauli::{Letter, PauliError, Sign, SignedPauli};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("CZ needs two distinct qubits, got {label} twice")]
    SameQubit { label: QubitId },
    #[error("measurement basis {0:?} is not a Pauli basis (expected Z, X or Y)")]
    UnsupportedBasis(String),
    #[error("unknown local gate {0:?} (expected H, S, X, Y or Z)")]
    UnknownGate(String),
    #[error("qubit {qubit}: outcome is determined to be {}1", if *forced == Sign::Plus { "+" } else { "-" })]
    ContradictsDeterminedOutcome { qubit: QubitId, forced: Sign },
    #[error("measuring the last remaining qubit is not supported")]
    CannotMeasureLastQubit,
}

/// Measurement basis; the only bases the truncation rule covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub fn letter(self) -> Letter {
        match self {
            Basis::Z => Letter::Z,
            Basis::X => Letter::X,
            Basis::Y => Letter::Y,
        }
    }

    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Z => write!(f, "Z"),
            Basis::X => write!(f, "X"),
            Basis::Y => write!(f, "Y"),
        }
    }
}

impl FromStr for Basis {
    type Err = DynamicsError;
    fn from_str(s: &str) -> Result<Self, DynamicsError> {
        match s {
            "Z" | "z" => Ok(Basis::Z),
            "X" | "x" => Ok(Basis::X),
            "Y" | "y" => Ok(Basis::Y),
            other => Err(DynamicsError::UnsupportedBasis(other.to_string())),
        }
    }
}

/// Single-qubit Clifford gates; `H` and `S` generate the full group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalGate {
    H,
    S,
    X,
    Y,
    Z,
}

impl LocalGate {
    pub const ALL: [LocalGate; 5] = [LocalGate::H, LocalGate::S, LocalGate::X, LocalGate::Y, LocalGate::Z];
}

impl fmt::Display for LocalGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LocalGate::H => "H",
            LocalGate::S => "S",
            LocalGate::X => "X",
            LocalGate::Y => "Y",
            LocalGate::Z => "Z",
        };
        write!(f, "{s}")
    }
}

impl FromStr for LocalGate {
    type Err = DynamicsError;
    fn from_str(s: &str) -> Result<Self, DynamicsError> {
        match s {
            "H" | "h" => Ok(LocalGate::H),
            "S" | "s" => Ok(LocalGate::S),
            "X" | "x" => Ok(LocalGate::X),
            "Y" | "y" => Ok(LocalGate::Y),
            "Z" | "z" => Ok(LocalGate::Z),
            other => Err(DynamicsError::UnknownGate(other.to_string())),
        }
    }
}

/// How a measurement outcome is decided.
///
/// Randomness enters evolution only through [`OutcomeChoice::Sample`], so
/// any pipeline is replayable from its recorded outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeChoice {
    /// The caller asserts the outcome; contradicting a determined outcome is
    /// an error.
    Forced(Sign),
    /// +1 whenever the outcome is free, the forced value when determined.
    /// Bond structure does not depend on outcomes, so structural searches
    /// use this.
    FreePlus,
    /// Draw a fair coin from the supplied generator when free.
    Sample,
}

/// Record of one measurement, in stable external labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub qubit: QubitId,
    pub basis: Basis,
    pub outcome: Sign,
    /// True when the outcome was forced by the group.
    pub determined: bool,
}

/// One step of a measurement script.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementStep {
    pub qubit: QubitId,
    pub basis: Basis,
    pub choice: OutcomeChoice,
}

/// Conjugates one operator by `CZ` on columns `a`, `b`.
pub fn conjugate_cz(p: &SignedPauli, a: usize, b: usize) -> Result<SignedPauli, DynamicsError> {
    let n = p.n();
    for &c in &[a, b] {
        if c >= n {
            return Err(PauliError::IndexOutOfRange { index: c, count: n }.into());
        }
    }
    if a == b {
        return Err(DynamicsError::SameQubit { label: QubitId(a as u32 + 1) });
    }
    let xa = (p.x_bits() >> a) & 1;
    let xb = (p.x_bits() >> b) & 1;
    let za = (p.z_bits() >> a) & 1;
    let zb = (p.z_bits() >> b) & 1;
    // X_a -> X_a Z_b, X_b -> X_b Z_a, Z untouched; the sign flips exactly
    // when both X-parts are set and the Z-parts differ.
    let z = p.z_bits() ^ (xb << a) ^ (xa << b);
    let mut phase = p.phase();
    if xa & xb & (za ^ zb) == 1 {
        phase = (phase + 2) & 3;
    }
    Ok(SignedPauli::from_parts(n, p.x_bits(), z, phase))
}

/// Conjugates one operator by a single-qubit Clifford gate at column `k`.
pub fn conjugate_local(p: &SignedPauli, k: usize, gate: LocalGate) -> Result<SignedPauli, DynamicsError> {
    let n = p.n();
    if k >= n {
        return Err(PauliError::IndexOutOfRange { index: k, count: n }.into());
    }
    let bit = 1u64 << k;
    let xk = p.x_bits() & bit != 0;
    let zk = p.z_bits() & bit != 0;
    let (mut x, mut z, mut phase) = (p.x_bits(), p.z_bits(), p.phase());
    let flip = match gate {
        // H: X <-> Z, Y -> -Y
        LocalGate::H => {
            x = (x & !bit) | if zk { bit } else { 0 };
            z = (z & !bit) | if xk { bit } else { 0 };
            xk && zk
        }
        // S: X -> Y, Y -> -X, Z -> Z
        LocalGate::S => {
            z ^= if xk { bit } else { 0 };
            xk && zk
        }
        // Pauli conjugation flips the sign of anticommuting letters.
        LocalGate::X => zk,
        LocalGate::Y => xk != zk,
        LocalGate::Z => xk,
    };
    if flip {
        phase = (phase + 2) & 3;
    }
    Ok(SignedPauli::from_parts(n, x, z, phase))
}

/// Applies `CZ` between the qubits labeled `a` and `b`.
pub fn apply_cz(state: &StabilizerState, a: QubitId, b: QubitId) -> Result<StabilizerState, DynamicsError> {
    if a == b {
        return Err(DynamicsError::SameQubit { label: a });
    }
    let ca = state.col_of(a)?;
    let cb = state.col_of(b)?;
    let gens: Vec<SignedPauli> = state
        .generators()
        .iter()
        .map(|g| conjugate_cz(g, ca, cb))
        .collect::<Result<_, _>>()?;
    Ok(StabilizerState::rebuild(&gens, state.n(), state.labels().to_vec(), state.enumeration_cap())?)
}

/// Applies a single-qubit Clifford gate at the qubit labeled `k`.
pub fn apply_local_clifford(
    state: &StabilizerState,
    k: QubitId,
    gate: LocalGate,
) -> Result<StabilizerState, DynamicsError> {
    let col = state.col_of(k)?;
    let gens: Vec<SignedPauli> = state
        .generators()
        .iter()
        .map(|g| conjugate_local(g, col, gate))
        .collect::<Result<_, _>>()?;
    Ok(StabilizerState::rebuild(&gens, state.n(), state.labels().to_vec(), state.enumeration_cap())?)
}

/// Measures the qubit labeled `qubit` in `basis` and truncates the group.
///
/// The measured qubit is removed from the representation; surviving qubits
/// keep their external labels.
pub fn measure(
    state: &StabilizerState,
    qubit: QubitId,
    basis: Basis,
    choice: OutcomeChoice,
    rng: &mut dyn RngCore,
) -> Result<(StabilizerState, MeasurementRecord), DynamicsError> {
    let col = state.col_of(qubit)?;
    let n = state.n();
    if n == 1 {
        return Err(DynamicsError::CannotMeasureLastQubit);
    }
    let measured = SignedPauli::single(n, col, basis.letter());
    let rest: Vec<usize> = (0..n).filter(|&c| c != col).collect();
    let rest_labels: Vec<QubitId> = rest.iter().map(|&c| state.label_at(c)).collect();

    if let Some(member) = state.resolve_pattern(measured.x_bits(), measured.z_bits()) {
        // Determined: the group already pins the outcome. Nothing is
        // truncated physically; the representation collapses 2-to-1 onto
        // the sub-group acting as identity on the measured column.
        let forced = member.sign().expect("group elements carry ±1 signs");
        if let OutcomeChoice::Forced(requested) = choice {
            if requested != forced {
                return Err(DynamicsError::ContradictsDeterminedOutcome { qubit, forced });
            }
        }
        let kept = state.kernel_products(&state.identity_constraints(&[col]));
        let gens: Vec<SignedPauli> =
            kept.iter().map(|g| g.restrict(&rest)).collect::<Result<_, _>>()?;
        let post = StabilizerState::rebuild(&gens, n - 1, rest_labels, state.enumeration_cap())?;
        return Ok((post, MeasurementRecord { qubit, basis, outcome: forced, determined: true }));
    }

    let outcome = match choice {
        OutcomeChoice::Forced(sign) => sign,
        OutcomeChoice::FreePlus => Sign::Plus,
        OutcomeChoice::Sample => {
            if rng.next_u64() & 1 == 0 {
                Sign::Plus
            } else {
                Sign::Minus
            }
        }
    };
    let kept = state.kernel_products(&[state.commutation_constraint(&measured)]);
    let gens: Vec<SignedPauli> = kept
        .iter()
        .map(|g| {
            let flipped = outcome == Sign::Minus && g.letter(col) == basis.letter();
            let g = if flipped { g.negated() } else { *g };
            g.restrict(&rest)
        })
        .collect::<Result<_, _>>()?;
    let post = StabilizerState::rebuild(&gens, n - 1, rest_labels, state.enumeration_cap())?;
    Ok((post, MeasurementRecord { qubit, basis, outcome, determined: false }))
}

/// Left fold of [`measure`] over a script.
pub fn measure_sequence(
    state: &StabilizerState,
    steps: &[MeasurementStep],
    rng: &mut dyn RngCore,
) -> Result<(StabilizerState, Vec<MeasurementRecord>), DynamicsError> {
    let mut current = state.clone();
    let mut records = Vec::with_capacity(steps.len());
    for step in steps {
        let (next, record) = measure(&current, step.qubit, step.basis, step.choice, rng)?;
        current = next;
        records.push(record);
    }
    Ok((current, records))
}

/// RngCore that never gets consulted; for measurement policies that cannot
/// sample ([`OutcomeChoice::Forced`], [`OutcomeChoice::FreePlus`]).
pub(crate) struct NullRng;

impl RngCore for NullRng {
    fn next_u32(&mut self) -> u32 {
        0
    }
    fn next_u64(&mut self) -> u64 {
        0
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        dest.fill(0);
    }
}
