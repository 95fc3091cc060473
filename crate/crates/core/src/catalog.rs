//! Graph states, named reference states, connected-graph enumeration, and
//! the bond-structure classification driver.

use thiserror::Error;

use crate::bond::{bonds, BondError, ColorMultigraph};
use crate::group::{GroupError, StabilizerState};
use crate::iso::{multigraph_isomorphic, IsoError, SearchLimits};
use crate::pauli::{Letter, SignedPauli, MAX_QUBITS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Bond(#[from] BondError),
    #[error("graph needs at least one vertex")]
    EmptyGraph,
    #[error("graph size {n} out of supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },
    #[error("edge ({a}, {b}) out of range for {n} vertices")]
    EdgeOutOfRange { a: usize, b: usize, n: usize },
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: usize },
    #[error("unknown named state {0:?}")]
    UnknownName(String),
    #[error("named state {name} needs a size between {min} and {max}, got {got}")]
    BadSize { name: String, got: usize, min: usize, max: usize },
}

/// A simple undirected graph on vertices `0..n`, no self-loops.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphSpec {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, CatalogError> {
        if n == 0 {
            return Err(CatalogError::EmptyGraph);
        }
        if n > MAX_QUBITS {
            return Err(CatalogError::SizeOutOfRange { n, min: 1, max: MAX_QUBITS });
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(CatalogError::SelfLoop { v: a });
            }
            if a >= n || b >= n {
                return Err(CatalogError::EdgeOutOfRange { a, b, n });
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(GraphSpec { n, edges: normalized })
    }

    pub fn path(n: usize) -> Result<Self, CatalogError> {
        let edges: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|v| (v, v + 1)).collect();
        Self::new(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self, CatalogError> {
        let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|v| (v, v + 1)).collect();
        edges.push((n - 1, 0));
        Self::new(n, &edges)
    }

    pub fn star(n: usize) -> Result<Self, CatalogError> {
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
        Self::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn edge_mask(&self) -> u32 {
        let mut mask = 0u32;
        for &(a, b) in &self.edges {
            mask |= 1 << pair_index(self.n, a, b);
        }
        mask
    }
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    // position of (a, b) in the lexicographic pair list
    (0..a).map(|i| n - 1 - i).sum::<usize>() + (b - a - 1)
}

/// Builds the graph state: one generator per vertex, `X` there and `Z` on
/// each neighbor, all signs `+`.
pub fn graph_state(spec: &GraphSpec) -> Result<StabilizerState, CatalogError> {
    let n = spec.n();
    let mut gens = Vec::with_capacity(n);
    for v in 0..n {
        let mut x = 0u64;
        let mut z = 0u64;
        x |= 1 << v;
        for &(a, b) in spec.edges() {
            if a == v {
                z |= 1 << b;
            } else if b == v {
                z |= 1 << a;
            }
        }
        gens.push(SignedPauli::from_parts(n, x, z, 0));
    }
    Ok(StabilizerState::from_generators(&gens)?)
}

/// The same state built the operational way: CZ gates on the edges applied
/// to the all-`|X⟩` product state.
pub fn graph_state_from_cz(spec: &GraphSpec) -> Result<StabilizerState, CatalogError> {
    let n = spec.n();
    let gens: Vec<SignedPauli> = (0..n).map(|v| SignedPauli::single(n, v, Letter::X)).collect();
    let mut state = StabilizerState::from_generators(&gens)?;
    for &(a, b) in spec.edges() {
        state = crate::dynamics::apply_cz(
            &state,
            crate::group::QubitId(a as u32 + 1),
            crate::group::QubitId(b as u32 + 1),
        )
        .expect("validated edges stay in range");
    }
    Ok(state)
}

/// Named reference states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedState {
    Bell,
    Ghz(usize),
    /// Linear (path-graph) cluster state. For 4 and 5 qubits the
    /// representative is ordered and locally framed to match the reference
    /// stabilizer tables; other sizes use the plain path construction.
    Cluster(usize),
    /// The second 5-qubit cluster class: a 4-star with one extra edge.
    ClusterB5,
    /// 5-cycle graph state.
    Pentagon,
}

impl NamedState {
    pub fn parse(name: &str, size: Option<usize>) -> Result<Self, CatalogError> {
        match (name.to_ascii_lowercase().as_str(), size) {
            ("bell", None) => Ok(NamedState::Bell),
            ("ghz", Some(n)) => Ok(NamedState::Ghz(n)),
            ("cluster", Some(n)) => Ok(NamedState::Cluster(n)),
            ("cluster_b5" | "cluster-b5" | "clusterb5", None) => Ok(NamedState::ClusterB5),
            ("pentagon", None) => Ok(NamedState::Pentagon),
            ("ghz" | "cluster", None) => Err(CatalogError::BadSize {
                name: name.to_string(),
                got: 0,
                min: 2,
                max: MAX_QUBITS,
            }),
            _ => Err(CatalogError::UnknownName(name.to_string())),
        }
    }
}

pub fn named_state(which: &NamedState) -> Result<StabilizerState, CatalogError> {
    let gens = |rows: &[&str]| -> Result<StabilizerState, CatalogError> {
        let parsed: Vec<SignedPauli> =
            rows.iter().map(|s| SignedPauli::parse(s).expect("valid literal")).collect();
        Ok(StabilizerState::from_generators(&parsed)?)
    };
    match which {
        NamedState::Bell => gens(&["XX", "ZZ"]),
        NamedState::Ghz(n) => {
            let n = *n;
            if !(2..=MAX_QUBITS).contains(&n) {
                return Err(CatalogError::BadSize {
                    name: "ghz".into(),
                    got: n,
                    min: 2,
                    max: MAX_QUBITS,
                });
            }
            let mut list = vec![SignedPauli::from_parts(n, (1u64 << n) - 1, 0, 0)];
            for v in 0..n - 1 {
                list.push(SignedPauli::from_parts(n, 0, 0b11 << v, 0));
            }
            Ok(StabilizerState::from_generators(&list)?)
        }
        NamedState::Cluster(n) => match *n {
            4 => gens(&["XXII", "XIXX", "ZZZI", "ZZIZ"]),
            5 => gens(&["XXXXZ", "XXIZX", "XXZIX", "IZXXX", "ZIXXX"]),
            n if (2..=MAX_QUBITS).contains(&n) => graph_state(&GraphSpec::path(n)?),
            n => Err(CatalogError::BadSize {
                name: "cluster".into(),
                got: n,
                min: 2,
                max: MAX_QUBITS,
            }),
        },
        NamedState::ClusterB5 => {
            let mut edges = vec![(0, 1), (0, 2), (0, 3), (0, 4)];
            edges.push((1, 2));
            graph_state(&GraphSpec::new(5, &edges)?)
        }
        NamedState::Pentagon => gens(&["XZIIZ", "ZXZII", "IZXZI", "IIZXZ", "ZIIZX"]),
    }
}

/// All connected graphs on `n` labeled vertices, one representative per
/// vertex-permutation class. Dedup is brute force over permutations with a
/// minimal-mask canonical form.
pub fn enumerate_connected_graphs(n: usize) -> Result<Vec<GraphSpec>, CatalogError> {
    if !(1..=7).contains(&n) {
        return Err(CatalogError::SizeOutOfRange { n, min: 1, max: 7 });
    }
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let perms = permutations(n);
    let mut out = Vec::new();
    'masks: for mask in 0u32..(1u32 << pairs.len()) {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| (mask >> i) & 1 == 1).map(|(_, &e)| e).collect();
        let spec = GraphSpec::new(n, &edges)?;
        if !spec.is_connected() {
            continue;
        }
        for perm in &perms {
            let permuted: Vec<(usize, usize)> =
                edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
            let pmask = GraphSpec::new(n, &permuted)?.edge_mask();
            if pmask < mask {
                continue 'masks; // a smaller representative exists
            }
        }
        out.push(spec);
    }
    out.sort_by_key(|g| (g.edges.len(), g.edge_mask()));
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

/// One bond-structure equivalence class.
#[derive(Clone, Debug)]
pub struct BondClass {
    pub representative: GraphSpec,
    pub members: Vec<GraphSpec>,
    pub multigraph: ColorMultigraph,
}

/// A pairwise comparison that ran out of budget; the graph involved is
/// reported instead of being silently classified.
#[derive(Clone, Debug)]
pub struct BudgetFailure {
    pub graph: GraphSpec,
    pub class_representative: GraphSpec,
    pub nodes: u64,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub n: usize,
    pub classes: Vec<BondClass>,
    /// Graphs whose class could not be decided within budget.
    pub unclassified: Vec<GraphSpec>,
    pub budget_failures: Vec<BudgetFailure>,
}

/// Buckets every connected `n`-vertex graph state by bond-multigraph
/// isomorphism. `workers > 1` parallelizes the bond-structure construction;
/// the classification itself is order-deterministic either way.
pub fn classify_bond_structures(
    n: usize,
    limits: &SearchLimits,
    workers: usize,
) -> Result<Classification, CatalogError> {
    let graphs = enumerate_connected_graphs(n)?;
    let multigraphs = build_multigraphs(&graphs, workers)?;

    let mut classes: Vec<BondClass> = Vec::new();
    let mut unclassified = Vec::new();
    let mut budget_failures = Vec::new();
    for (graph, multigraph) in graphs.into_iter().zip(multigraphs) {
        let mut placed = false;
        let mut uncertain = false;
        for class in classes.iter_mut() {
            match multigraph_isomorphic(&multigraph, &class.multigraph, limits) {
                Ok(Some(_)) => {
                    class.members.push(graph.clone());
                    placed = true;
                    break;
                }
                Ok(None) => {}
                Err(IsoError::BudgetExceeded { nodes }) => {
                    uncertain = true;
                    budget_failures.push(BudgetFailure {
                        graph: graph.clone(),
                        class_representative: class.representative.clone(),
                        nodes,
                    });
                }
            }
        }
        if placed {
            continue;
        }
        if uncertain {
            unclassified.push(graph);
        } else {
            classes.push(BondClass {
                representative: graph.clone(),
                members: vec![graph],
                multigraph,
            });
        }
    }
    Ok(Classification { n, classes, unclassified, budget_failures })
}

fn build_multigraphs(
    graphs: &[GraphSpec],
    workers: usize,
) -> Result<Vec<ColorMultigraph>, CatalogError> {
    let build = |g: &GraphSpec| -> Result<ColorMultigraph, CatalogError> {
        Ok(bonds(&graph_state(g)?)?)
    };
    if workers <= 1 || graphs.len() < 2 {
        return graphs.iter().map(build).collect();
    }
    let mut results: Vec<Option<Result<ColorMultigraph, CatalogError>>> = Vec::new();
    results.resize_with(graphs.len(), || None);
    let chunk = graphs.len().div_ceil(workers);
    std::thread::scope(|scope| {
        for (slot_chunk, graph_chunk) in results.chunks_mut(chunk).zip(graphs.chunks(chunk)) {
            scope.spawn(move || {
                for (slot, graph) in slot_chunk.iter_mut().zip(graph_chunk) {
                    *slot = Some(build(graph));
                }
            });
        }
    });
    results.into_iter().map(|r| r.expect("every slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn unsigned(state: &StabilizerState) -> Vec<String> {
        let mut v: Vec<String> = state
            .elements()
            .unwrap()
            .iter()
            .filter(|e| !e.is_pattern_identity())
            .map(|e| e.letters())
            .collect();
        v.sort();
        v
    }

    #[test]
    fn path2_graph_state() {
        let state = graph_state(&GraphSpec::path(2).unwrap()).unwrap();
        assert_eq!(unsigned(&state), vec!["XZ", "YY", "ZX"]);
    }

    #[test]
    fn pentagon_is_the_five_cycle() {
        let from_graph = graph_state(&GraphSpec::cycle(5).unwrap()).unwrap();
        let named = named_state(&NamedState::Pentagon).unwrap();
        assert_eq!(from_graph.canonical_form(), named.canonical_form());
    }

    #[test]
    fn edgeless_graph_is_a_product_state() {
        let spec = GraphSpec::new(3, &[]).unwrap();
        let state = graph_state(&spec).unwrap();
        let graph = crate::bond::bonds(&state).unwrap();
        assert!(graph.edges.is_empty());
    }

    #[test]
    fn generator_and_cz_constructions_agree() {
        for n in 1..=4usize {
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
                let a = graph_state(&spec).unwrap();
                let b = graph_state_from_cz(&spec).unwrap();
                assert_eq!(a.canonical_form(), b.canonical_form(), "graph {edges:?}");
            }
        }
    }

    #[test]
    fn graph_validation() {
        assert!(matches!(GraphSpec::new(0, &[]), Err(CatalogError::EmptyGraph)));
        assert!(matches!(GraphSpec::new(2, &[(0, 0)]), Err(CatalogError::SelfLoop { v: 0 })));
        assert!(matches!(
            GraphSpec::new(2, &[(0, 5)]),
            Err(CatalogError::EdgeOutOfRange { a: 0, b: 5, n: 2 })
        ));
        // duplicates collapse
        let g = GraphSpec::new(3, &[(1, 0), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn named_states_match_reference_tables() {
        for (name, fixture_id) in [
            (NamedState::Ghz(3), "Fig1"),
            (NamedState::Cluster(4), "Fig9"),
            (NamedState::Cluster(5), "Fig11"),
            (NamedState::Pentagon, "Fig15"),
        ] {
            let state = named_state(&name).unwrap();
            let table = fixtures::fixture(fixture_id).unwrap();
            let mut expected = table.pre.clone();
            expected.sort();
            assert_eq!(unsigned(&state), expected, "{name:?} vs {fixture_id}");
        }
    }

    #[test]
    fn named_state_parsing() {
        assert_eq!(NamedState::parse("bell", None).unwrap(), NamedState::Bell);
        assert_eq!(NamedState::parse("ghz", Some(4)).unwrap(), NamedState::Ghz(4));
        assert!(matches!(NamedState::parse("ghz", None), Err(CatalogError::BadSize { .. })));
        assert!(matches!(
            NamedState::parse("wstate", None),
            Err(CatalogError::UnknownName(_))
        ));
        assert!(matches!(named_state(&NamedState::Ghz(1)), Err(CatalogError::BadSize { .. })));
    }

    #[test]
    fn connected_graph_counts() {
        assert_eq!(enumerate_connected_graphs(2).unwrap().len(), 1);
        assert_eq!(enumerate_connected_graphs(3).unwrap().len(), 2);
        assert_eq!(enumerate_connected_graphs(4).unwrap().len(), 6);
        assert_eq!(enumerate_connected_graphs(5).unwrap().len(), 21);
        assert!(matches!(
            enumerate_connected_graphs(8),
            Err(CatalogError::SizeOutOfRange { .. })
        ));
    }

    #[test]
    fn classification_small_sizes() {
        let limits = SearchLimits::default();
        let c2 = classify_bond_structures(2, &limits, 1).unwrap();
        assert_eq!(c2.classes.len(), 1);

        // star and triangle generate the same bond structure
        let c3 = classify_bond_structures(3, &limits, 1).unwrap();
        assert_eq!(c3.classes.len(), 1);
        assert_eq!(c3.classes[0].members.len(), 2);

        let c4 = classify_bond_structures(4, &limits, 1).unwrap();
        assert_eq!(c4.classes.len(), 2);
        let mut member_counts: Vec<usize> =
            c4.classes.iter().map(|c| c.members.len()).collect();
        member_counts.sort_unstable();
        assert_eq!(member_counts, vec![2, 4]);
        assert!(c4.unclassified.is_empty());
    }

    #[test]
    fn classification_matches_with_workers() {
        let limits = SearchLimits::default();
        let serial = classify_bond_structures(4, &limits, 1).unwrap();
        let parallel = classify_bond_structures(4, &limits, 4).unwrap();
        assert_eq!(serial.classes.len(), parallel.classes.len());
        for (a, b) in serial.classes.iter().zip(parallel.classes.iter()) {
            assert_eq!(a.representative, b.representative);
            assert_eq!(a.members, b.members);
        }
    }
}
