//! Closed signed stabilizer groups.
//!
//! A [`StabilizerState`] is an abelian, `-I`-free group of signed Pauli
//! operators, held as a row-reduced generator tableau over GF(2). The full
//! element list is materialized on demand and cached. Qubits carry stable
//! external labels so that measured-out qubits leave gaps rather than
//! renumbering the survivors.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::pauli::{Letter, PauliError, SignedPauli, MAX_QUBITS};

/// Default cap on the generator count for full element enumeration (2^m
/// elements are materialized).
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Stable external name of a qubit; 1-based in every user-facing surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId(pub u32);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("a stabilizer group needs at least one generator")]
    EmptyGenerators,
    #[error("generators {i} and {j} do not commute")]
    NonCommutingGenerators { i: usize, j: usize },
    #[error("generator {index} is inconsistent with the others (-I would enter the group)")]
    InconsistentGenerator { index: usize },
    #[error("generator {index} carries a transient ±i phase")]
    TransientPhase { index: usize },
    #[error("{m} generators exceed the enumeration cap of {cap}")]
    EnumerationCapExceeded { m: usize, cap: usize },
    #[error("column {index} out of range for {n} qubits")]
    ColumnOutOfRange { index: usize, n: usize },
    #[error("unknown qubit label {label}")]
    UnknownLabel { label: QubitId },
    #[error("{labels} labels supplied for {n} qubits")]
    LabelCountMismatch { labels: usize, n: usize },
    #[error("duplicate qubit label {label}")]
    DuplicateLabel { label: QubitId },
    #[error("identity-product test on an empty set")]
    EmptySet,
    #[error("criticality check limited to {max} observables and {max} qubits, got {got}")]
    CriticalIdTooLarge { got: usize, max: usize },
    #[error("criticality check requires a set whose product is ±I")]
    NotAnIdentityProduct,
}

/// Row-reduced echelon form of a generator tableau, with signs.
///
/// Two states describe the same signed group (on equally labeled qubits)
/// iff their canonical tableaux are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalTableau {
    pub n: usize,
    pub rows: Vec<SignedPauli>,
}

/// Letter counts of one qubit column across all group elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnCensus {
    counts: [u64; 4],
}

impl ColumnCensus {
    pub fn count(&self, letter: Letter) -> u64 {
        self.counts[letter.census_index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of distinct non-identity letters that occur.
    pub fn distinct_non_identity(&self) -> usize {
        [Letter::Z, Letter::X, Letter::Y]
            .iter()
            .filter(|&&l| self.count(l) > 0)
            .count()
    }

    /// True when the column is the exact equal mix `{I, Z, X, Y}`, each with
    /// a quarter of the elements.
    pub fn is_equal_mix(&self) -> bool {
        let q = self.total() / 4;
        q > 0 && self.counts.iter().all(|&c| c == q)
    }

    /// For an unentangled column: the single non-identity letter making up
    /// half the column (the other half being `I`), if the column has that
    /// shape.
    pub fn half_identity_letter(&self) -> Option<Letter> {
        let h = self.total() / 2;
        if self.count(Letter::I) != h {
            return None;
        }
        let mut found = None;
        for l in [Letter::Z, Letter::X, Letter::Y] {
            match (self.count(l), found) {
                (0, _) => {}
                (c, None) if c == h => found = Some(l),
                _ => return None,
            }
        }
        found
    }
}

/// A closed signed stabilizer group together with its qubit labels.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    n: usize,
    labels: Vec<QubitId>,
    rows: Vec<SignedPauli>,
    enum_cap: usize,
    elements: OnceLock<Vec<SignedPauli>>,
}

impl PartialEq for StabilizerState {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.labels == other.labels && self.rows == other.rows
    }
}

impl Eq for StabilizerState {}

impl std::hash::Hash for StabilizerState {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.labels.hash(state);
        self.rows.hash(state);
    }
}

impl StabilizerState {
    /// Builds the group generated by `gens`, with default labels `1..=n`.
    ///
    /// Dependent generators are accepted and dropped when sign-consistent;
    /// a dependent generator with contradicting sign puts `-I` in the group
    /// and is rejected.
    pub fn from_generators(gens: &[SignedPauli]) -> Result<Self, GroupError> {
        let n = match gens.first() {
            Some(g) => g.n(),
            None => return Err(GroupError::EmptyGenerators),
        };
        Self::from_generators_labeled(gens, (1..=n as u32).map(QubitId).collect())
    }

    /// Like [`from_generators`](Self::from_generators) with explicit labels.
    pub fn from_generators_labeled(
        gens: &[SignedPauli],
        labels: Vec<QubitId>,
    ) -> Result<Self, GroupError> {
        let first = gens.first().ok_or(GroupError::EmptyGenerators)?;
        let n = first.n();
        for (index, g) in gens.iter().enumerate() {
            if g.n() != n {
                return Err(PauliError::LengthMismatch { left: n, right: g.n() }.into());
            }
            if g.sign().is_none() {
                return Err(GroupError::TransientPhase { index });
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if !gens[i].commutes_unchecked(&gens[j]) {
                    return Err(GroupError::NonCommutingGenerators { i, j });
                }
            }
        }
        check_labels(&labels, n)?;
        let mut rows = Vec::new();
        for (index, g) in gens.iter().enumerate() {
            insert_row(&mut rows, *g).map_err(|_| GroupError::InconsistentGenerator { index })?;
        }
        Ok(StabilizerState {
            n,
            labels,
            rows,
            enum_cap: DEFAULT_ENUMERATION_CAP,
            elements: OnceLock::new(),
        })
    }

    /// The trivial group `{+I}` on `n` qubits.
    pub fn trivial(n: usize) -> Self {
        Self::trivial_labeled(n, (1..=n as u32).map(QubitId).collect())
    }

    pub fn trivial_labeled(n: usize, labels: Vec<QubitId>) -> Self {
        assert!(n >= 1 && n <= MAX_QUBITS, "qubit count {n} out of range");
        check_labels(&labels, n).expect("valid labels");
        StabilizerState {
            n,
            labels,
            rows: Vec::new(),
            enum_cap: DEFAULT_ENUMERATION_CAP,
            elements: OnceLock::new(),
        }
    }

    pub fn with_enumeration_cap(mut self, cap: usize) -> Self {
        self.enum_cap = cap;
        self.elements = OnceLock::new();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of independent generators.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[QubitId] {
        &self.labels
    }

    pub fn enumeration_cap(&self) -> usize {
        self.enum_cap
    }

    /// Canonical (row-reduced) generators.
    pub fn generators(&self) -> &[SignedPauli] {
        &self.rows
    }

    pub fn label_at(&self, col: usize) -> QubitId {
        self.labels[col]
    }

    pub fn col_of(&self, label: QubitId) -> Result<usize, GroupError> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(GroupError::UnknownLabel { label })
    }

    pub fn canonical_form(&self) -> CanonicalTableau {
        CanonicalTableau { n: self.n, rows: self.rows.clone() }
    }

    /// All `2^m` group elements: identity first, then ascending
    /// `(z_bits, x_bits)`. Computed once and cached.
    pub fn elements(&self) -> Result<&[SignedPauli], GroupError> {
        if self.m() > self.enum_cap {
            return Err(GroupError::EnumerationCapExceeded { m: self.m(), cap: self.enum_cap });
        }
        Ok(self.elements.get_or_init(|| {
            let m = self.rows.len();
            let mut out = Vec::with_capacity(1 << m);
            let mut cur = SignedPauli::identity(self.n);
            out.push(cur);
            for i in 1u64..(1u64 << m) {
                let j = i.trailing_zeros() as usize;
                cur = cur.times(&self.rows[j]);
                out.push(cur);
            }
            out.sort_by_key(SignedPauli::canonical_key);
            out
        }))
    }

    /// The group element with the same letter pattern as `(x, z)`, if the
    /// pattern lies in the group's span.
    pub fn resolve_pattern(&self, x: u64, z: u64) -> Option<SignedPauli> {
        let mut key = (z << self.n) | x;
        let mut cur = SignedPauli::identity(self.n);
        for row in &self.rows {
            let pivot = 63 - row.canonical_key().leading_zeros();
            if (key >> pivot) & 1 == 1 {
                key ^= row.canonical_key();
                cur = cur.times(row);
            }
        }
        (key == 0).then_some(cur)
    }

    /// Signed membership test via tableau reduction, not by scanning.
    pub fn contains(&self, p: &SignedPauli) -> Result<bool, GroupError> {
        if p.n() != self.n {
            return Err(PauliError::LengthMismatch { left: self.n, right: p.n() }.into());
        }
        Ok(self.resolve_pattern(p.x_bits(), p.z_bits()).is_some_and(|e| e == *p))
    }

    pub fn column_census(&self, col: usize) -> Result<ColumnCensus, GroupError> {
        if col >= self.n {
            return Err(GroupError::ColumnOutOfRange { index: col, n: self.n });
        }
        let mut counts = [0u64; 4];
        for e in self.elements()? {
            counts[e.letter(col).census_index()] += 1;
        }
        Ok(ColumnCensus { counts })
    }

    /// True iff two anticommuting letters occur at this column.
    ///
    /// Computed from the generators alone: products of `{I, L}` letters stay
    /// in `{I, L}`, so a second letter appears among the elements iff it
    /// appears among the generators.
    pub fn is_entangled_qubit(&self, col: usize) -> Result<bool, GroupError> {
        if col >= self.n {
            return Err(GroupError::ColumnOutOfRange { index: col, n: self.n });
        }
        for i in 0..self.rows.len() {
            for j in i + 1..self.rows.len() {
                if !self.rows[i].commutes_at_unchecked(&self.rows[j], col) {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Product of the generator subset selected by `mask` (bit i = row i).
    pub(crate) fn product_of_mask(&self, mask: u32) -> SignedPauli {
        let mut cur = SignedPauli::identity(self.n);
        for (i, row) in self.rows.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                cur = cur.times(row);
            }
        }
        cur
    }

    /// One GF(2) functional per entry: bit i set iff row i anticommutes
    /// with `op`.
    pub(crate) fn commutation_constraint(&self, op: &SignedPauli) -> u32 {
        let mut c = 0u32;
        for (i, row) in self.rows.iter().enumerate() {
            if !row.commutes_unchecked(op) {
                c |= 1 << i;
            }
        }
        c
    }

    /// Two GF(2) functionals per column forcing the product's letter there
    /// to be `I`.
    pub(crate) fn identity_constraints(&self, cols: &[usize]) -> Vec<u32> {
        let mut out = Vec::with_capacity(2 * cols.len());
        for &col in cols {
            let mut cx = 0u32;
            let mut cz = 0u32;
            for (i, row) in self.rows.iter().enumerate() {
                if (row.x_bits() >> col) & 1 == 1 {
                    cx |= 1 << i;
                }
                if (row.z_bits() >> col) & 1 == 1 {
                    cz |= 1 << i;
                }
            }
            out.push(cx);
            out.push(cz);
        }
        out
    }

    /// Independent generators of the subgroup annihilated by every
    /// constraint functional: products over a kernel basis of the constraint
    /// matrix.
    pub(crate) fn kernel_products(&self, constraints: &[u32]) -> Vec<SignedPauli> {
        let m = self.rows.len();
        let mut pivots: Vec<(u64, u32)> = Vec::new(); // (constraint column bits, row mask)
        let mut basis_masks = Vec::new();
        for i in 0..m {
            let mut cbits = 0u64;
            for (c, con) in constraints.iter().enumerate() {
                if (con >> i) & 1 == 1 {
                    cbits |= 1 << c;
                }
            }
            let mut tag = 1u32 << i;
            for &(pb, pt) in &pivots {
                let pivot = 63 - pb.leading_zeros();
                if (cbits >> pivot) & 1 == 1 {
                    cbits ^= pb;
                    tag ^= pt;
                }
            }
            if cbits == 0 {
                basis_masks.push(tag);
            } else {
                pivots.push((cbits, tag));
                pivots.sort_by_key(|&(b, _)| std::cmp::Reverse(b));
            }
        }
        basis_masks.iter().map(|&mask| self.product_of_mask(mask)).collect()
    }

    /// Rebuilds a state with explicit labels and an inherited cap; used by
    /// evolution operations that must preserve both.
    pub(crate) fn rebuild(
        gens: &[SignedPauli],
        n: usize,
        labels: Vec<QubitId>,
        enum_cap: usize,
    ) -> Result<Self, GroupError> {
        let state = if gens.is_empty() {
            Self::trivial_labeled(n, labels)
        } else {
            Self::from_generators_labeled(gens, labels)?
        };
        Ok(state.with_enumeration_cap(enum_cap))
    }
}

fn check_labels(labels: &[QubitId], n: usize) -> Result<(), GroupError> {
    if labels.len() != n {
        return Err(GroupError::LabelCountMismatch { labels: labels.len(), n });
    }
    let mut seen = labels.to_vec();
    seen.sort_unstable();
    for w in seen.windows(2) {
        if w[0] == w[1] {
            return Err(GroupError::DuplicateLabel { label: w[0] });
        }
    }
    Ok(())
}

/// Inserts `candidate` into a pivot-descending RREF basis.
///
/// Returns `Ok(true)` if the rank grew, `Ok(false)` for a dependent but
/// sign-consistent candidate, and `Err(())` when the candidate reduces to
/// `-I` (a sign contradiction).
fn insert_row(rows: &mut Vec<SignedPauli>, candidate: SignedPauli) -> Result<bool, ()> {
    let mut acc = candidate;
    for row in rows.iter() {
        let pivot = 63 - row.canonical_key().leading_zeros();
        if (acc.canonical_key() >> pivot) & 1 == 1 {
            acc = acc.times(row);
        }
    }
    if acc.is_pattern_identity() {
        return if acc.phase() == 0 { Ok(false) } else { Err(()) };
    }
    let pivot = 63 - acc.canonical_key().leading_zeros();
    for row in rows.iter_mut() {
        if (row.canonical_key() >> pivot) & 1 == 1 {
            *row = row.times(&acc);
        }
    }
    rows.push(acc);
    rows.sort_by_key(|r| std::cmp::Reverse(r.canonical_key()));
    Ok(true)
}

/// True iff the product of all members is `+I` or `-I`.
pub fn is_identity_product(set: &[SignedPauli]) -> Result<bool, GroupError> {
    let first = set.first().ok_or(GroupError::EmptySet)?;
    let n = first.n();
    let mut acc = SignedPauli::identity(n);
    for p in set {
        if p.n() != n {
            return Err(PauliError::LengthMismatch { left: n, right: p.n() }.into());
        }
        acc = acc.times(p);
    }
    Ok(acc.is_pattern_identity() && acc.phase() % 2 == 0)
}

/// True iff no removal of observables and/or qubit columns (leaving at
/// least one of each, and excluding the unmodified set itself) yields a
/// smaller identity product.
///
/// A candidate `(observable subset, column subset)` counts as a smaller ID
/// only when it is a well-formed one: the restricted observables must be
/// non-identity, mutually commuting, and multiply to ±I. Without the first
/// two conditions nothing would ever be critical — every column of an ID
/// multiplies to a scalar on its own. Commuting Hermitian restrictions
/// whose letters cancel automatically carry a ±1 phase, so the sign needs
/// no separate tracking.
pub fn is_critical_id(set: &[SignedPauli]) -> Result<bool, GroupError> {
    const MAX: usize = 16;
    const CHECK_BUDGET: u64 = 1 << 24;
    if !is_identity_product(set)? {
        return Err(GroupError::NotAnIdentityProduct);
    }
    let m = set.len();
    let n = set[0].n();
    if m > MAX {
        return Err(GroupError::CriticalIdTooLarge { got: m, max: MAX });
    }
    if n > MAX {
        return Err(GroupError::CriticalIdTooLarge { got: n, max: MAX });
    }
    let col_mask = (1u64 << n) - 1;
    let full = (1u32 << m) - 1;
    let supports: Vec<u64> = set.iter().map(|o| o.x_bits() | o.z_bits()).collect();
    // columns where each pair anticommutes
    let mut anti = vec![0u64; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let mask = (set[i].x_bits() & set[j].z_bits()) ^ (set[i].z_bits() & set[j].x_bits());
            anti[i * m + j] = mask;
        }
    }
    let mut checks: u64 = 0;
    for subset in 1u32..=full {
        let members: Vec<usize> = (0..m).filter(|i| (subset >> i) & 1 == 1).collect();
        let mut px = 0u64;
        let mut pz = 0u64;
        for &i in &members {
            px ^= set[i].x_bits();
            pz ^= set[i].z_bits();
        }
        let icols = !(px | pz) & col_mask;
        if icols == 0 {
            continue;
        }
        let mut q = icols;
        while q != 0 {
            checks += 1;
            if checks > CHECK_BUDGET {
                return Err(GroupError::CriticalIdTooLarge { got: m.max(n), max: MAX });
            }
            let is_whole_set = subset == full && q == col_mask;
            if !is_whole_set
                && members.iter().all(|&i| supports[i] & q != 0)
                && members.iter().enumerate().all(|(a, &i)| {
                    members[a + 1..]
                        .iter()
                        .all(|&j| (anti[i * m + j] & q).count_ones() % 2 == 0)
                })
            {
                return Ok(false);
            }
            q = (q - 1) & icols;
        }
    }
    Ok(true)
}
