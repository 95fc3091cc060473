//! Helpers shared by the integration suites.

#![allow(dead_code)]

use rand::Rng;

use stabbond_core::catalog::{graph_state, GraphSpec, NamedState};
use stabbond_core::dynamics::{apply_local_clifford, LocalGate};
use stabbond_core::fixtures::FixtureTable;
use stabbond_core::group::{QubitId, StabilizerState};

pub fn unsigned_sorted(state: &StabilizerState) -> Vec<String> {
    let mut v: Vec<String> = state
        .elements()
        .expect("enumerable")
        .iter()
        .filter(|e| !e.is_pattern_identity())
        .map(|e| e.letters())
        .collect();
    v.sort();
    v
}

pub fn signed_sorted(state: &StabilizerState) -> Vec<String> {
    let mut v: Vec<String> = state
        .elements()
        .expect("enumerable")
        .iter()
        .filter(|e| !e.is_pattern_identity())
        .map(|e| e.to_string())
        .collect();
    v.sort();
    v
}

pub fn partition_labels(state: &StabilizerState) -> Vec<Vec<u32>> {
    stabbond_core::bond::entangled_partition(state)
        .expect("partition")
        .blocks
        .iter()
        .map(|b| b.qubits.iter().map(|q| q.0).collect())
        .collect()
}

/// Rows surviving a fixture operation, computed from the table text alone.
pub fn kept_rows_by_rule(table: &FixtureTable) -> Vec<u32> {
    use stabbond_core::fixtures::FixtureOp;
    match &table.op {
        FixtureOp::Measure { qubit, basis } => {
            let col = (*qubit - 1) as usize;
            let letter = basis.letter().as_char();
            table
                .pre
                .iter()
                .enumerate()
                .filter(|(_, row)| {
                    let ch = row.chars().nth(col).unwrap();
                    ch == 'I' || ch == letter
                })
                .map(|(i, _)| i as u32 + 1)
                .collect()
        }
        FixtureOp::Core { about } => table
            .pre
            .iter()
            .enumerate()
            .filter(|(_, row)| {
                about.iter().all(|q| row.chars().nth((*q - 1) as usize).unwrap() == 'I')
            })
            .map(|(i, _)| i as u32 + 1)
            .collect(),
        FixtureOp::Cz { .. } => (1..=table.pre.len() as u32).collect(),
    }
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, connected: bool) -> GraphSpec {
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<bool>() {
                    edges.push((a, b));
                }
            }
        }
        let spec = GraphSpec::new(n, &edges).unwrap();
        if !connected || spec.is_connected() {
            return spec;
        }
    }
}

pub fn random_graph_state<R: Rng>(rng: &mut R, n: usize, connected: bool) -> StabilizerState {
    graph_state(&random_graph(rng, n, connected)).unwrap()
}

pub fn random_local_sequence<R: Rng>(
    rng: &mut R,
    state: &StabilizerState,
    gates: usize,
) -> (StabilizerState, Vec<(QubitId, LocalGate)>) {
    let mut current = state.clone();
    let mut applied = Vec::with_capacity(gates);
    for _ in 0..gates {
        let q = state.labels()[rng.random_range(0..state.labels().len())];
        let gate = LocalGate::ALL[rng.random_range(0..LocalGate::ALL.len())];
        current = apply_local_clifford(&current, q, gate).unwrap();
        applied.push((q, gate));
    }
    (current, applied)
}

pub fn named(which: NamedState) -> StabilizerState {
    stabbond_core::catalog::named_state(&which).unwrap()
}

/// The maximally entangled reference states, by name.
pub fn entangled_fixture_states() -> Vec<(&'static str, StabilizerState)> {
    vec![
        ("ghz3", named(NamedState::Ghz(3))),
        ("ghz4", named(NamedState::Ghz(4))),
        ("ghz5", named(NamedState::Ghz(5))),
        ("cluster4", named(NamedState::Cluster(4))),
        ("cluster5", named(NamedState::Cluster(5))),
        ("cluster_b5", named(NamedState::ClusterB5)),
        ("pentagon", named(NamedState::Pentagon)),
    ]
}
