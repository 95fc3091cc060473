//! Signed N-qubit Pauli operators in binary symplectic form.
//!
//! An operator is stored as two bit words (X-part, Z-part) plus a phase
//! exponent of `i` modulo 4. The letter at qubit `k` is determined by the
//! bit pair `(x[k], z[k])`: `(0,0) = I`, `(1,0) = X`, `(0,1) = Z`,
//! `(1,1) = Y`, with the convention `Y = iXZ` fixing every product sign.
//! Operators held inside stabilizer groups always carry phase 0 or 2
//! (eigenvalues ±1); odd phases only occur transiently inside products.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Maximum supported qubit count. Keeps `(z << n) | x` inside one `u64`.
pub const MAX_QUBITS: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("empty Pauli string")]
    Empty,
    #[error("invalid Pauli character {0:?} (expected one of I, Z, X, Y)")]
    InvalidCharacter(char),
    #[error("{0} qubits exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("operator length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },
    #[error("qubit index {index} out of range for {count} qubits")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("restriction to an empty qubit set")]
    EmptyRestriction,
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    Z,
    X,
    Y,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (false, true) => Letter::Z,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
        }
    }

    /// `(x, z)` bit pair of this letter.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::Z => (false, true),
            Letter::X => (true, false),
            Letter::Y => (true, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::Z => 'Z',
            Letter::X => 'X',
            Letter::Y => 'Y',
        }
    }

    pub(crate) fn census_index(self) -> usize {
        match self {
            Letter::I => 0,
            Letter::Z => 1,
            Letter::X => 2,
            Letter::Y => 3,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A ±1 sign, the eigenvalue carried by a Hermitian group element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Phase exponent of `i` (0 or 2).
    pub fn phase(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 2,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

/// A signed N-qubit Pauli operator.
///
/// Qubit 0 is the leftmost letter of the text form, bit 0 of the packed
/// words. Values are immutable; all operations return new operators.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    n: u8,
    x: u64,
    z: u64,
    phase: u8,
}

impl SignedPauli {
    /// The identity `+I^n`.
    ///
    /// Panics if `n` is 0 or above [`MAX_QUBITS`].
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_QUBITS, "qubit count {n} out of range");
        SignedPauli { n: n as u8, x: 0, z: 0, phase: 0 }
    }

    /// Positive single-letter operator at qubit `k`, identity elsewhere.
    pub fn single(n: usize, k: usize, letter: Letter) -> Self {
        assert!(k < n, "qubit index {k} out of range for {n} qubits");
        let mut p = Self::identity(n);
        let (x, z) = letter.bits();
        p.x |= (x as u64) << k;
        p.z |= (z as u64) << k;
        p
    }

    pub(crate) fn from_parts(n: usize, x: u64, z: u64, phase: u8) -> Self {
        debug_assert!(n >= 1 && n <= MAX_QUBITS);
        let mask = Self::col_mask(n);
        debug_assert!(x & !mask == 0 && z & !mask == 0);
        SignedPauli { n: n as u8, x, z, phase: phase & 3 }
    }

    fn col_mask(n: usize) -> u64 {
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    /// Parses the text form: optional sign prefix (`+`/`-`) followed by one
    /// letter per qubit from `{I, Z, X, Y}`, most significant qubit first.
    pub fn parse(text: &str) -> Result<Self, PauliError> {
        let (phase, body) = match text.strip_prefix('+') {
            Some(rest) => (0u8, rest),
            None => match text.strip_prefix('-') {
                Some(rest) => (2u8, rest),
                None => (0u8, text),
            },
        };
        if body.is_empty() {
            return Err(PauliError::Empty);
        }
        let count = body.chars().count();
        if count > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(count));
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (k, ch) in body.chars().enumerate() {
            let letter = match ch {
                'I' => Letter::I,
                'Z' => Letter::Z,
                'X' => Letter::X,
                'Y' => Letter::Y,
                other => return Err(PauliError::InvalidCharacter(other)),
            };
            let (xb, zb) = letter.bits();
            x |= (xb as u64) << k;
            z |= (zb as u64) << k;
        }
        Ok(SignedPauli { n: count as u8, x, z, phase })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Phase exponent of `i`, modulo 4.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// The ±1 sign, or `None` while the phase is a transient `±i`.
    pub fn sign(&self) -> Option<Sign> {
        match self.phase {
            0 => Some(Sign::Plus),
            2 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn letter(&self, k: usize) -> Letter {
        assert!(k < self.n(), "qubit index {k} out of range");
        Letter::from_bits((self.x >> k) & 1 == 1, (self.z >> k) & 1 == 1)
    }

    /// Unsigned letter string, e.g. `"XYY"`.
    pub fn letters(&self) -> String {
        (0..self.n()).map(|k| self.letter(k).as_char()).collect()
    }

    /// True for `+I^n` exactly.
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0 && self.phase == 0
    }

    /// True when every letter is `I`, ignoring the phase.
    pub fn is_pattern_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.phase = sign.phase();
        self
    }

    /// Sort key placing elements in ascending `(z_bits, x_bits)` order; the
    /// canonical element order used throughout the crate.
    pub fn canonical_key(&self) -> u64 {
        (self.z << self.n) | self.x
    }

    /// Product `self * rhs` with exact phase tracking.
    pub fn multiply(&self, rhs: &SignedPauli) -> Result<SignedPauli, PauliError> {
        self.check_len(rhs)?;
        Ok(self.times(rhs))
    }

    /// Same-length product; lengths are a caller invariant here.
    pub(crate) fn times(&self, rhs: &SignedPauli) -> SignedPauli {
        debug_assert_eq!(self.n, rhs.n);
        let x = self.x ^ rhs.x;
        let z = self.z ^ rhs.z;
        // Per-column phase of letter products, derived from Y = iXZ:
        // t_k = y_a + y_b - y_ab + 2 * (z_a & x_b), everything mod 4.
        let t = (self.x & self.z).count_ones()
            + (rhs.x & rhs.z).count_ones()
            + 3 * (x & z).count_ones()
            + 2 * (self.z & rhs.x).count_ones();
        let phase = ((self.phase as u32 + rhs.phase as u32 + t) & 3) as u8;
        SignedPauli { n: self.n, x, z, phase }
    }

    /// True iff the operators commute; sign-independent.
    pub fn commutes(&self, rhs: &SignedPauli) -> Result<bool, PauliError> {
        self.check_len(rhs)?;
        Ok(self.commutes_unchecked(rhs))
    }

    pub(crate) fn commutes_unchecked(&self, rhs: &SignedPauli) -> bool {
        ((self.x & rhs.z).count_ones() + (self.z & rhs.x).count_ones()) % 2 == 0
    }

    /// True iff the single-qubit factors at `k` commute.
    pub fn commutes_at(&self, rhs: &SignedPauli, k: usize) -> Result<bool, PauliError> {
        self.check_len(rhs)?;
        if k >= self.n() {
            return Err(PauliError::IndexOutOfRange { index: k, count: self.n() });
        }
        Ok(self.commutes_at_unchecked(rhs, k))
    }

    pub(crate) fn commutes_at_unchecked(&self, rhs: &SignedPauli, k: usize) -> bool {
        let xa = (self.x >> k) & 1;
        let za = (self.z >> k) & 1;
        let xb = (rhs.x >> k) & 1;
        let zb = (rhs.z >> k) & 1;
        (xa & zb) ^ (za & xb) == 0
    }

    /// Deletes every column not in `keep`; remaining columns keep their
    /// relative order and the phase is preserved.
    pub fn restrict(&self, keep: &[usize]) -> Result<SignedPauli, PauliError> {
        if keep.is_empty() {
            return Err(PauliError::EmptyRestriction);
        }
        let mut cols: Vec<usize> = keep.to_vec();
        cols.sort_unstable();
        cols.dedup();
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.n()) {
            return Err(PauliError::IndexOutOfRange { index: bad, count: self.n() });
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (new_k, &old_k) in cols.iter().enumerate() {
            x |= ((self.x >> old_k) & 1) << new_k;
            z |= ((self.z >> old_k) & 1) << new_k;
        }
        Ok(SignedPauli { n: cols.len() as u8, x, z, phase: self.phase })
    }

    fn check_len(&self, rhs: &SignedPauli) -> Result<(), PauliError> {
        if self.n != rhs.n {
            return Err(PauliError::LengthMismatch { left: self.n(), right: rhs.n() });
        }
        Ok(())
    }
}

impl FromStr for SignedPauli {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, PauliError> {
        SignedPauli::parse(s)
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            0 => write!(f, "+")?,
            1 => write!(f, "+i")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i")?,
        }
        write!(f, "{}", self.letters())
    }
}

impl fmt::Debug for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
