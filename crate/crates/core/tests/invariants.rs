//! Cross-module property suites: how measurement, cores, partitions and
//! bond structures interlock.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use stabbond_core::bond::{bonds, compact, core_group, Bond};
use stabbond_core::catalog::{
    classify_bond_structures, enumerate_connected_graphs, graph_state, GraphSpec,
};
use stabbond_core::dynamics::{measure, measure_sequence, Basis, MeasurementStep, OutcomeChoice};
use stabbond_core::group::QubitId;
use stabbond_core::iso::{multigraph_isomorphic, SearchLimits};
use stabbond_core::pauli::Sign;

struct NullRng;
impl rand::RngCore for NullRng {
    fn next_u32(&mut self) -> u32 {
        0
    }
    fn next_u64(&mut self) -> u64 {
        0
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        dest.fill(0)
    }
}

/// Truncation can only delete bonds: every post-measurement bond is the
/// image of a pre-measurement bond under column removal and the
/// kept-element color map.
#[test]
fn measurement_only_deletes_bonds() {
    for (name, state) in entangled_fixture_states() {
        let pre_graph = bonds(&state).unwrap();
        let pre_elements = state.elements().unwrap().to_vec();
        for &qubit in state.labels() {
            for basis in Basis::ALL {
                let (post, _) =
                    measure(&state, qubit, basis, OutcomeChoice::FreePlus, &mut NullRng).unwrap();
                let post_graph = bonds(&post).unwrap();
                let post_elements = post.elements().unwrap();
                let col = state.col_of(qubit).unwrap();
                let rest: Vec<usize> = (0..state.n()).filter(|&c| c != col).collect();

                // color map: kept pre element -> index of its restriction
                let color_map: Vec<Option<u32>> = pre_elements
                    .iter()
                    .map(|e| {
                        if e.letter(col) != stabbond_core::pauli::Letter::I
                            && e.letter(col) != basis.letter()
                        {
                            return None; // struck
                        }
                        let restricted = e.restrict(&rest).unwrap();
                        post_elements
                            .iter()
                            .position(|h| {
                                h.x_bits() == restricted.x_bits()
                                    && h.z_bits() == restricted.z_bits()
                            })
                            .map(|i| i as u32)
                    })
                    .collect();

                let mut image: Vec<Bond> = pre_graph
                    .edges
                    .iter()
                    .filter(|b| b.qubits.0 != qubit && b.qubits.1 != qubit)
                    .filter_map(|b| {
                        let c1 = color_map[b.colors.0 as usize]?;
                        let c2 = color_map[b.colors.1 as usize]?;
                        Some(Bond::new(b.qubits, (c1, c2)))
                    })
                    .collect();
                image.sort_unstable();
                for edge in &post_graph.edges {
                    assert!(
                        image.binary_search(edge).is_ok(),
                        "{name}: measuring {qubit} in {basis} created bond {edge:?}"
                    );
                }
            }
        }
    }
}

/// Elements acting as identity on the measured qubit survive any
/// measurement of it, with their signs untouched.
#[test]
fn core_survives_any_measurement() {
    for (name, state) in entangled_fixture_states() {
        for &qubit in state.labels() {
            let core = core_group(&state, &[qubit]).unwrap();
            for basis in Basis::ALL {
                for sign in [Sign::Plus, Sign::Minus] {
                    let (post, _) =
                        measure(&state, qubit, basis, OutcomeChoice::Forced(sign), &mut NullRng)
                            .unwrap();
                    for element in core.group.elements().unwrap() {
                        assert!(
                            post.contains(element).unwrap(),
                            "{name}: {element} discarded or flipped by {basis} on {qubit}"
                        );
                    }
                }
            }
        }
    }
}

/// Single-qubit cores of maximally entangled states are rank-2 projectors.
#[test]
fn core_dimension_law() {
    for (name, state) in entangled_fixture_states() {
        for &qubit in state.labels() {
            let core = core_group(&state, &[qubit]).unwrap();
            assert_eq!(core.rank, 2, "{name}: core about {qubit}");
            assert_eq!(
                core.group.elements().unwrap().len(),
                (1usize << state.n()) / 4,
                "{name}: core size about {qubit}"
            );
        }
    }
}

/// The entangled partition of a fresh graph state is exactly the connected
/// components of its generating graph.
#[test]
fn partition_equals_graph_components() {
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let spec = GraphSpec::new(n, &edges).unwrap();
            let state = graph_state(&spec).unwrap();
            let mut blocks = partition_labels(&state);
            blocks.sort();
            let mut components = graph_components(&spec);
            components.sort();
            assert_eq!(blocks, components, "graph {edges:?}");
        }
    }
}

fn graph_components(spec: &GraphSpec) -> Vec<Vec<u32>> {
    let n = spec.n();
    let mut component = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        component[start] = count;
        while let Some(v) = stack.pop() {
            for &(a, b) in spec.edges() {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if component[other] == usize::MAX {
                    component[other] = count;
                    stack.push(other);
                }
            }
        }
        count += 1;
    }
    (0..count)
        .map(|c| {
            (0..n).filter(|&v| component[v] == c).map(|v| v as u32 + 1).collect::<Vec<u32>>()
        })
        .collect()
}

/// Connected graph states are fully connected multigraphs: at least one
/// bond on every qubit pair.
#[test]
fn connected_states_are_fully_bonded() {
    for n in 2..=5usize {
        for spec in enumerate_connected_graphs(n).unwrap() {
            let state = graph_state(&spec).unwrap();
            let weights = compact(&bonds(&state).unwrap()).weights;
            for a in 1..=n as u32 {
                for b in a + 1..=n as u32 {
                    assert!(
                        weights.get(&(QubitId(a), QubitId(b))).copied().unwrap_or(0) >= 1,
                        "graph {:?}: pair ({a},{b}) unbonded",
                        spec.edges()
                    );
                }
            }
        }
    }
}

/// Class membership is transitive: all members of one class are pairwise
/// isomorphic, not only isomorphic to the representative.
#[test]
fn classification_is_transitive() {
    let limits = SearchLimits::default();
    for n in [4usize, 5] {
        let classification = classify_bond_structures(n, &limits, 2).unwrap();
        for class in &classification.classes {
            let graphs: Vec<_> = class
                .members
                .iter()
                .map(|spec| bonds(&graph_state(spec).unwrap()).unwrap())
                .collect();
            for i in 0..graphs.len() {
                for j in i + 1..graphs.len() {
                    assert!(
                        multigraph_isomorphic(&graphs[i], &graphs[j], &limits)
                            .unwrap()
                            .is_some(),
                        "n={n}: members {i} and {j} of one class are not isomorphic"
                    );
                }
            }
        }
    }
}

/// Truncation keeps the same rows for either outcome; only signs differ.
/// This is the lemma behind searching over bases with outcomes pinned to +1.
#[test]
fn truncation_structure_is_outcome_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.random_range(2..=5usize);
        let state = random_graph_state(&mut rng, n, true);
        let qubit = state.labels()[rng.random_range(0..n)];
        let basis = Basis::ALL[rng.random_range(0..3)];
        let (plus, _) =
            measure(&state, qubit, basis, OutcomeChoice::Forced(Sign::Plus), &mut NullRng)
                .unwrap();
        let (minus, _) =
            measure(&state, qubit, basis, OutcomeChoice::Forced(Sign::Minus), &mut NullRng)
                .unwrap();
        assert_eq!(unsigned_sorted(&plus), unsigned_sorted(&minus));
        assert_eq!(partition_labels(&plus), partition_labels(&minus));
    }
}

/// Sampled pipelines replay identically from the same seed.
#[test]
fn sampled_measurements_replay_from_seed() {
    let state = named(stabbond_core::catalog::NamedState::Pentagon);
    let steps: Vec<MeasurementStep> = [(1u32, Basis::Z), (3, Basis::X), (5, Basis::Y)]
        .iter()
        .map(|&(q, basis)| MeasurementStep {
            qubit: QubitId(q),
            basis,
            choice: OutcomeChoice::Sample,
        })
        .collect();
    let mut rng_a = ChaCha8Rng::seed_from_u64(99);
    let mut rng_b = ChaCha8Rng::seed_from_u64(99);
    let (state_a, records_a) = measure_sequence(&state, &steps, &mut rng_a).unwrap();
    let (state_b, records_b) = measure_sequence(&state, &steps, &mut rng_b).unwrap();
    assert_eq!(records_a, records_b);
    assert_eq!(state_a.canonical_form(), state_b.canonical_form());
    assert_eq!(signed_sorted(&state_a), signed_sorted(&state_b));
}

/// Entangled-qubit detection from generators agrees with the full census.
#[test]
fn entanglement_flag_matches_census() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..60 {
        let n = rng.random_range(2..=6usize);
        let state = random_graph_state(&mut rng, n, false);
        for col in 0..n {
            let census = state.column_census(col).unwrap();
            assert_eq!(
                state.is_entangled_qubit(col).unwrap(),
                census.distinct_non_identity() >= 2
            );
        }
    }
}
