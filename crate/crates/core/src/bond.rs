//! Entangled subparts, bonds, color multigraphs, core spaces, and the
//! measurement searches built on top of them.
//!
//! Two qubits are bonded when some pair of group elements anticommutes at
//! both qubits *and* the qubits lie in the same entangled subpart. The
//! subpart condition is computed first, from per-qubit symplectic form
//! matrices, because two-point anticommutation alone also occurs across
//! unentangled factors (e.g. a pair of Bell states).

use std::collections::{BTreeMap, HashSet, VecDeque};

use thiserror::Error;

use crate::dynamics::{measure, Basis, DynamicsError, NullRng, OutcomeChoice};
use crate::group::{GroupError, QubitId, StabilizerState};
use crate::iso::SearchLimits;
use crate::pauli::{PauliError, SignedPauli};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BondError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("core requested about an empty qubit set")]
    EmptyAbout,
    #[error("core about all qubits leaves nothing to describe")]
    AboutIsEntireState,
    #[error("qubit {label} listed twice")]
    DuplicateQubit { label: QubitId },
    #[error("need two distinct qubits, got {label} twice")]
    SamePair { label: QubitId },
    #[error("minimal commuting-restriction sets are not disjoint; partition undefined")]
    PartitionNotDisjoint,
    #[error("partition kernel dimension {dimension} exceeds the enumeration cap")]
    PartitionCapExceeded { dimension: usize },
    #[error("search supports at most {max} qubits, state has {n}")]
    SearchTooLarge { n: usize, max: usize },
    #[error("search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
}

/// Partition of the qubits into maximally entangled subparts and
/// unentangled singletons; the tensor factorization of the state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntangledPartition {
    pub blocks: Vec<PartitionBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionBlock {
    /// Sorted external labels.
    pub qubits: Vec<QubitId>,
    pub entangled: bool,
}

impl EntangledPartition {
    pub fn block_containing(&self, q: QubitId) -> Option<&PartitionBlock> {
        self.blocks.iter().find(|b| b.qubits.contains(&q))
    }

    /// True when no entangled block remains.
    pub fn fully_separable(&self) -> bool {
        self.blocks.iter().all(|b| !b.entangled)
    }
}

/// One bond: an unordered qubit pair plus an unordered pair of canonical
/// element indices (colors) anticommuting at both qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bond {
    pub qubits: (QubitId, QubitId),
    pub colors: (u32, u32),
}

impl Bond {
    pub fn new(qubits: (QubitId, QubitId), colors: (u32, u32)) -> Self {
        let qubits = if qubits.0 <= qubits.1 { qubits } else { (qubits.1, qubits.0) };
        let colors = if colors.0 <= colors.1 { colors } else { (colors.1, colors.0) };
        Bond { qubits, colors }
    }
}

/// A color in the bond diagram: one non-identity group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorInfo {
    /// Index into the canonical element order (identity is index 0 and
    /// never appears in a bond).
    pub index: u32,
    /// Unsigned letter string of the element.
    pub letters: String,
}

/// The bond structure diagram: qubits as vertices, group elements as
/// colors, bonds as two-colored edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorMultigraph {
    pub vertices: Vec<QubitId>,
    pub colors: Vec<ColorInfo>,
    /// Deduplicated and sorted.
    pub edges: Vec<Bond>,
}

/// Bond diagram reduced to per-pair bond counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactMultigraph {
    pub vertices: Vec<QubitId>,
    pub weights: BTreeMap<(QubitId, QubitId), u32>,
}

/// The sub-group acting as identity on a chosen qubit set, restricted to
/// the remaining qubits; no local measurement on the `about` qubits can
/// discard it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreSpace {
    pub about: Vec<QubitId>,
    pub group: StabilizerState,
    /// Projector rank `2^((N - n_about) - m_core)`.
    pub rank: u64,
}

const PARTITION_KERNEL_CAP: usize = 12;
const SEARCH_MAX_QUBITS: usize = 6;

/// Computes the partition into maximally entangled subparts.
///
/// For each qubit `k` the m×m GF(2) matrix `M_k` of per-qubit symplectic
/// products between generators is formed; a qubit set `S` restricts to a
/// mutually commuting sub-stabilizer iff `Σ_{k∈S} M_k = 0`. Blocks are the
/// minimal nonempty zero-sum sets, found through the kernel of the linear
/// map `S ↦ Σ M_k`. The disjointness of the minimal sets is verified, not
/// assumed.
pub fn entangled_partition(state: &StabilizerState) -> Result<EntangledPartition, BondError> {
    let m = state.m();
    let n = state.n();
    let pair_count = m * m.saturating_sub(1) / 2;
    let words = pair_count.div_ceil(64).max(1);
    let gens = state.generators();

    let mut singles: Vec<usize> = Vec::new();
    let mut active: Vec<(Vec<u64>, u64)> = Vec::new(); // (flattened M_k, qubit mask)
    for col in 0..n {
        let mut bits = vec![0u64; words];
        let mut idx = 0usize;
        for i in 0..m {
            for j in i + 1..m {
                if !gens[i].commutes_at_unchecked(&gens[j], col) {
                    bits[idx / 64] |= 1 << (idx % 64);
                }
                idx += 1;
            }
        }
        if bits.iter().all(|&w| w == 0) {
            singles.push(col);
        } else {
            active.push((bits, 1u64 << col));
        }
    }

    // Kernel basis of the flattened matrices, tags tracking qubit subsets.
    let mut pivots: Vec<(Vec<u64>, u64)> = Vec::new();
    let mut kernel_tags: Vec<u64> = Vec::new();
    for (mut bits, mut tag) in active {
        for (pb, pt) in &pivots {
            let pivot = leading_bit(pb);
            if get_bit(&bits, pivot) {
                xor_into(&mut bits, pb);
                tag ^= pt;
            }
        }
        if bits.iter().all(|&w| w == 0) {
            kernel_tags.push(tag);
        } else {
            pivots.push((bits, tag));
            pivots.sort_by(|a, b| leading_bit(&b.0).cmp(&leading_bit(&a.0)));
        }
    }

    let d = kernel_tags.len();
    if d > PARTITION_KERNEL_CAP {
        return Err(BondError::PartitionCapExceeded { dimension: d });
    }
    let mut vectors: Vec<u64> = Vec::with_capacity((1usize << d).saturating_sub(1));
    for combo in 1u64..(1u64 << d) {
        let mut v = 0u64;
        for (i, tag) in kernel_tags.iter().enumerate() {
            if (combo >> i) & 1 == 1 {
                v ^= tag;
            }
        }
        vectors.push(v);
    }
    vectors.sort_unstable();
    vectors.dedup();
    let minimal: Vec<u64> = vectors
        .iter()
        .copied()
        .filter(|&v| !vectors.iter().any(|&u| u != v && u | v == v))
        .collect();

    let mut blocks: Vec<PartitionBlock> = singles
        .iter()
        .map(|&col| PartitionBlock { qubits: vec![state.label_at(col)], entangled: false })
        .collect();
    let mut covered = singles.iter().fold(0u64, |acc, &col| acc | 1 << col);
    for v in &minimal {
        if covered & v != 0 {
            return Err(BondError::PartitionNotDisjoint);
        }
        covered |= v;
        let mut qubits: Vec<QubitId> =
            (0..n).filter(|&c| (v >> c) & 1 == 1).map(|c| state.label_at(c)).collect();
        qubits.sort_unstable();
        blocks.push(PartitionBlock { qubits, entangled: true });
    }
    if covered != mask(n) {
        return Err(BondError::PartitionNotDisjoint);
    }
    blocks.sort_by_key(|b| b.qubits[0]);
    Ok(EntangledPartition { blocks })
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn leading_bit(words: &[u64]) -> usize {
    for (w, &word) in words.iter().enumerate().rev() {
        if word != 0 {
            return w * 64 + (63 - word.leading_zeros() as usize);
        }
    }
    0
}

fn get_bit(words: &[u64], bit: usize) -> bool {
    (words[bit / 64] >> (bit % 64)) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        *d ^= s;
    }
}

/// Scans the complete group — not just generators — for bonds.
pub fn bonds(state: &StabilizerState) -> Result<ColorMultigraph, BondError> {
    let partition = entangled_partition(state)?;
    let elements = state.elements()?;
    let n = state.n();

    // qubit pairs eligible for bonds: both columns in one entangled block
    let mut block_id = vec![usize::MAX; n];
    for (bid, block) in partition.blocks.iter().enumerate() {
        if !block.entangled {
            continue;
        }
        for q in &block.qubits {
            let col = state.col_of(*q)?;
            block_id[col] = bid;
        }
    }
    let mut col_pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if block_id[a] != usize::MAX && block_id[a] == block_id[b] {
                col_pairs.push((a, b));
            }
        }
    }

    let mut edges = Vec::new();
    for i in 1..elements.len() {
        for j in i + 1..elements.len() {
            let (a, b) = (&elements[i], &elements[j]);
            for &(ca, cb) in &col_pairs {
                if !a.commutes_at_unchecked(b, ca) && !a.commutes_at_unchecked(b, cb) {
                    edges.push(Bond::new(
                        (state.label_at(ca), state.label_at(cb)),
                        (i as u32, j as u32),
                    ));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();

    let colors = elements
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, e)| ColorInfo { index: i as u32, letters: e.letters() })
        .collect();
    Ok(ColorMultigraph { vertices: state.labels().to_vec(), colors, edges })
}

/// Per-pair bond counts.
pub fn compact(graph: &ColorMultigraph) -> CompactMultigraph {
    let mut weights: BTreeMap<(QubitId, QubitId), u32> = BTreeMap::new();
    for bond in &graph.edges {
        *weights.entry(bond.qubits).or_insert(0) += 1;
    }
    CompactMultigraph { vertices: graph.vertices.clone(), weights }
}

/// Extracts the sub-group acting as identity on every `about` qubit,
/// restricted to the remaining qubits.
pub fn core_group(state: &StabilizerState, about: &[QubitId]) -> Result<CoreSpace, BondError> {
    if about.is_empty() {
        return Err(BondError::EmptyAbout);
    }
    let mut sorted = about.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(BondError::DuplicateQubit { label: w[0] });
        }
    }
    if sorted.len() >= state.n() {
        return Err(BondError::AboutIsEntireState);
    }
    let cols: Vec<usize> = sorted.iter().map(|&q| state.col_of(q)).collect::<Result<_, _>>()?;
    let rest: Vec<usize> = (0..state.n()).filter(|c| !cols.contains(c)).collect();
    let rest_labels: Vec<QubitId> = rest.iter().map(|&c| state.label_at(c)).collect();

    let core_gens = state.kernel_products(&state.identity_constraints(&cols));
    let restricted: Vec<SignedPauli> =
        core_gens.iter().map(|g| g.restrict(&rest)).collect::<Result<_, _>>()?;
    let group = StabilizerState::rebuild(
        &restricted,
        rest.len(),
        rest_labels,
        state.enumeration_cap(),
    )?;
    let exponent = (state.n() - sorted.len()) - group.m();
    Ok(CoreSpace { about: sorted, group, rank: 1u64 << exponent })
}

/// Searches for local Pauli measurements on qubits other than `i`, `j`
/// leaving that pair in a Bell state.
///
/// Breadth-first over measurement plans, so a returned plan has minimal
/// length. Free outcomes are fixed to +1: truncation keeps the same rows
/// for either outcome, so the bond structure of the result is
/// outcome-independent and the search only has to range over bases.
pub fn bell_extraction(
    state: &StabilizerState,
    i: QubitId,
    j: QubitId,
    limits: &SearchLimits,
) -> Result<Option<Vec<(QubitId, Basis)>>, BondError> {
    if i == j {
        return Err(BondError::SamePair { label: i });
    }
    state.col_of(i)?;
    state.col_of(j)?;
    if state.n() > SEARCH_MAX_QUBITS {
        return Err(BondError::SearchTooLarge { n: state.n(), max: SEARCH_MAX_QUBITS });
    }

    let is_bell_pair = |s: &StabilizerState| -> Result<bool, BondError> {
        let partition = entangled_partition(s)?;
        let target = if i <= j { vec![i, j] } else { vec![j, i] };
        if !partition.blocks.iter().any(|b| b.qubits == target) {
            return Ok(false);
        }
        // the pair factor must be the full 4-element group (a pure Bell
        // state), not a lower-rank projector onto one
        if s.n() == 2 {
            return Ok(s.m() == 2);
        }
        let others: Vec<QubitId> =
            s.labels().iter().copied().filter(|&q| q != i && q != j).collect();
        Ok(core_group(s, &others)?.group.m() == 2)
    };

    if is_bell_pair(state)? {
        return Ok(Some(Vec::new()));
    }

    let mut nodes: u64 = 0;
    let mut seen: HashSet<StabilizerState> = HashSet::new();
    seen.insert(state.clone());
    let mut queue: VecDeque<(StabilizerState, Vec<(QubitId, Basis)>)> = VecDeque::new();
    queue.push_back((state.clone(), Vec::new()));
    while let Some((current, plan)) = queue.pop_front() {
        let targets: Vec<QubitId> =
            current.labels().iter().copied().filter(|&q| q != i && q != j).collect();
        for q in targets {
            for basis in Basis::ALL {
                nodes += 1;
                if nodes > limits.backtrack_nodes {
                    return Err(BondError::BudgetExceeded { nodes });
                }
                let (next, _) = measure(&current, q, basis, OutcomeChoice::FreePlus, &mut NullRng)?;
                if !seen.insert(next.clone()) {
                    continue;
                }
                let mut next_plan = plan.clone();
                next_plan.push((q, basis));
                if is_bell_pair(&next)? {
                    return Ok(Some(next_plan));
                }
                queue.push_back((next, next_plan));
            }
        }
    }
    Ok(None)
}

/// Minimum number of local Pauli measurements after which the entangled
/// partition is all singletons. Outcome-independent, so the search ranges
/// over bases only.
pub fn pauli_persistency(state: &StabilizerState, limits: &SearchLimits) -> Result<u32, BondError> {
    if state.n() > SEARCH_MAX_QUBITS {
        return Err(BondError::SearchTooLarge { n: state.n(), max: SEARCH_MAX_QUBITS });
    }
    if entangled_partition(state)?.fully_separable() {
        return Ok(0);
    }
    let mut nodes: u64 = 0;
    let mut seen: HashSet<StabilizerState> = HashSet::new();
    seen.insert(state.clone());
    let mut queue: VecDeque<(StabilizerState, u32)> = VecDeque::new();
    queue.push_back((state.clone(), 0));
    while let Some((current, depth)) = queue.pop_front() {
        // measuring an unentangled qubit never changes the remaining blocks
        let entangled: Vec<QubitId> = current
            .labels()
            .iter()
            .enumerate()
            .filter_map(|(col, &q)| {
                current.is_entangled_qubit(col).ok().filter(|&e| e).map(|_| q)
            })
            .collect();
        for q in entangled {
            for basis in Basis::ALL {
                nodes += 1;
                if nodes > limits.backtrack_nodes {
                    return Err(BondError::BudgetExceeded { nodes });
                }
                let (next, _) = measure(&current, q, basis, OutcomeChoice::FreePlus, &mut NullRng)?;
                if !seen.insert(next.clone()) {
                    continue;
                }
                if entangled_partition(&next)?.fully_separable() {
                    return Ok(depth + 1);
                }
                queue.push_back((next, depth + 1));
            }
        }
    }
    unreachable!("measuring every entangled qubit always separates the state")
}
