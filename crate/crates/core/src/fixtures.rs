//! Transcribed stabilizer tables shipped as golden test data.
//!
//! Each fixture holds the full pre-operation element table (unsigned
//! letters, in the published row order), the operation applied, the 1-based
//! indices of the rows that survive, the post-operation table, and the
//! expected entangled partition in stable qubit labels. Sign columns are
//! intentionally absent: the reference eigenvalues are symbolic, so sign
//! behavior is pinned by rule-level tests instead.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::dynamics::Basis;
use crate::group::{GroupError, StabilizerState};
use crate::pauli::SignedPauli;

/// Raw `(id, json)` sources, embedded so the data ships with the crate.
pub const RAW: [(&str, &str); 12] = [
    ("Fig1", include_str!("../fixtures/Fig1.json")),
    ("Fig2", include_str!("../fixtures/Fig2.json")),
    ("Fig6", include_str!("../fixtures/Fig6.json")),
    ("Fig7", include_str!("../fixtures/Fig7.json")),
    ("Fig9", include_str!("../fixtures/Fig9.json")),
    ("Fig10", include_str!("../fixtures/Fig10.json")),
    ("Fig11", include_str!("../fixtures/Fig11.json")),
    ("Fig12", include_str!("../fixtures/Fig12.json")),
    ("Fig13", include_str!("../fixtures/Fig13.json")),
    ("Fig14", include_str!("../fixtures/Fig14.json")),
    ("Fig15", include_str!("../fixtures/Fig15.json")),
    ("Fig16", include_str!("../fixtures/Fig16.json")),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixtureOp {
    Measure { qubit: u32, basis: Basis },
    Cz { a: u32, b: u32 },
    Core { about: Vec<u32> },
}

#[derive(Clone, Debug)]
pub struct FixtureTable {
    pub id: String,
    pub description: String,
    pub qubits: usize,
    /// False for element lists that are pieces of a larger stabilizer
    /// rather than the complete non-identity table.
    pub closed_group: bool,
    pub pre: Vec<String>,
    pub op: FixtureOp,
    /// 1-based indices into `pre` of the rows that survive the operation.
    pub kept: Vec<u32>,
    pub post: Vec<String>,
    /// Expected partition of the post state, in stable external labels.
    pub post_partition: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct FixtureJson {
    id: String,
    description: String,
    qubits: usize,
    closed_group: bool,
    pre: Vec<String>,
    op: OpJson,
    kept: Vec<u32>,
    post: Vec<String>,
    post_partition: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum OpJson {
    Measure { qubit: u32, basis: String },
    Cz { a: u32, b: u32 },
    Core { about: Vec<u32> },
}

fn parse_fixture(source: &str) -> FixtureTable {
    let raw: FixtureJson = serde_json::from_str(source).expect("embedded fixture parses");
    let op = match raw.op {
        OpJson::Measure { qubit, basis } => FixtureOp::Measure {
            qubit,
            basis: basis.parse().expect("fixture basis is Z, X or Y"),
        },
        OpJson::Cz { a, b } => FixtureOp::Cz { a, b },
        OpJson::Core { about } => FixtureOp::Core { about },
    };
    FixtureTable {
        id: raw.id,
        description: raw.description,
        qubits: raw.qubits,
        closed_group: raw.closed_group,
        pre: raw.pre,
        op,
        kept: raw.kept,
        post: raw.post,
        post_partition: raw.post_partition,
    }
}

/// All embedded fixture tables, in publication order.
pub fn fixtures() -> &'static [FixtureTable] {
    static TABLES: OnceLock<Vec<FixtureTable>> = OnceLock::new();
    TABLES.get_or_init(|| RAW.iter().map(|(_, src)| parse_fixture(src)).collect())
}

pub fn fixture(id: &str) -> Option<&'static FixtureTable> {
    fixtures().iter().find(|f| f.id == id)
}

/// Builds a state from unsigned table rows: a pattern-independent subset of
/// the rows becomes the generators, each taken with a `+` sign.
///
/// Dependent rows are skipped rather than inserted, because an all-plus
/// sign assignment of a dependent row need not be consistent with the
/// products of the independent ones; the unsigned closure is the same
/// either way.
pub fn state_from_rows<S: AsRef<str>>(rows: &[S]) -> Result<StabilizerState, GroupError> {
    let mut independent: Vec<SignedPauli> = Vec::new();
    let mut keys: Vec<u64> = Vec::new(); // RREF over patterns only
    for row in rows {
        let p = SignedPauli::parse(row.as_ref())?.with_sign(crate::pauli::Sign::Plus);
        let mut key = p.canonical_key();
        for &k in &keys {
            let pivot = 63 - k.leading_zeros();
            if (key >> pivot) & 1 == 1 {
                key ^= k;
            }
        }
        if key != 0 {
            independent.push(p);
            keys.push(key);
            keys.sort_unstable_by_key(|&k| std::cmp::Reverse(k));
        }
    }
    StabilizerState::from_generators(&independent)
}

impl FixtureTable {
    pub fn pre_state(&self) -> Result<StabilizerState, GroupError> {
        state_from_rows(&self.pre)
    }

    /// Sorted unsigned post-table rows.
    pub fn sorted_post(&self) -> Vec<String> {
        let mut v = self.post.clone();
        v.sort();
        v
    }

    /// Sorted 1-based struck row indices (complement of `kept`).
    pub fn struck(&self) -> Vec<u32> {
        (1..=self.pre.len() as u32).filter(|i| !self.kept.contains(i)).collect()
    }
}
