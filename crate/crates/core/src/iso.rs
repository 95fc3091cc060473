//! Isomorphism testing for bond color multigraphs and compacted multigraphs.
//!
//! A multigraph isomorphism is a pair of bijections — vertices to vertices,
//! colors to colors — carrying the edge set to the edge set. The search
//! runs iterative signature refinement over vertex and color classes, then
//! backtracks over vertices and finally over colors, spending a bounded
//! node budget. Exceeding the budget is reported as an error, never as
//! "not isomorphic".

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bond::{Bond, ColorMultigraph, CompactMultigraph};
use crate::group::QubitId;

/// Budgets for the backtracking searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub backtrack_nodes: u64,
    pub refinement_rounds: u32,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { backtrack_nodes: 1_000_000, refinement_rounds: 3 }
    }
}

impl SearchLimits {
    pub fn with_backtrack_nodes(mut self, nodes: u64) -> Self {
        self.backtrack_nodes = nodes;
        self
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum IsoError {
    #[error("isomorphism search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
}

/// Witness for a color-multigraph isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultigraphWitness {
    /// Pairs `(vertex of left, vertex of right)`.
    pub vertex_map: Vec<(QubitId, QubitId)>,
    /// Pairs `(color index of left, color index of right)` over colors that
    /// appear in at least one edge.
    pub color_map: Vec<(u32, u32)>,
}

/// Witness for a compacted-multigraph isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactWitness {
    pub vertex_map: Vec<(QubitId, QubitId)>,
}

struct Side {
    vlabels: Vec<QubitId>,
    color_ids: Vec<u32>,
    edges: Vec<[usize; 4]>, // u < v vertices, c1 < c2 compact colors
    v_edges: Vec<Vec<usize>>,
    c_edges: Vec<Vec<usize>>,
}

impl Side {
    fn build(graph: &ColorMultigraph) -> Side {
        let vlabels = graph.vertices.clone();
        let vindex: BTreeMap<QubitId, usize> =
            vlabels.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut used: Vec<u32> = graph
            .edges
            .iter()
            .flat_map(|b| [b.colors.0, b.colors.1])
            .collect();
        used.sort_unstable();
        used.dedup();
        let cindex: BTreeMap<u32, usize> =
            used.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut edges: Vec<[usize; 4]> = graph
            .edges
            .iter()
            .map(|b| {
                let (u, v) = (vindex[&b.qubits.0], vindex[&b.qubits.1]);
                let (c1, c2) = (cindex[&b.colors.0], cindex[&b.colors.1]);
                [u.min(v), u.max(v), c1.min(c2), c1.max(c2)]
            })
            .collect();
        edges.sort_unstable();
        let mut v_edges = vec![Vec::new(); vlabels.len()];
        let mut c_edges = vec![Vec::new(); used.len()];
        for (e, edge) in edges.iter().enumerate() {
            v_edges[edge[0]].push(e);
            v_edges[edge[1]].push(e);
            c_edges[edge[2]].push(e);
            if edge[3] != edge[2] {
                c_edges[edge[3]].push(e);
            }
        }
        Side { vlabels, color_ids: used, edges, v_edges, c_edges }
    }

    fn nv(&self) -> usize {
        self.vlabels.len()
    }

    fn nc(&self) -> usize {
        self.color_ids.len()
    }
}

struct Classes {
    vclass: Vec<usize>,
    cclass: Vec<usize>,
}

/// Joint signature refinement over both graphs; class ids are shared so the
/// per-class histograms are directly comparable.
fn refine(a: &Side, b: &Side, rounds: u32) -> Option<(Classes, Classes)> {
    let mut ca = Classes { vclass: vec![0; a.nv()], cclass: vec![0; a.nc()] };
    let mut cb = Classes { vclass: vec![0; b.nv()], cclass: vec![0; b.nc()] };
    for _ in 0..rounds {
        let vertex_sig = |side: &Side, cl: &Classes, v: usize| {
            let mut incident: Vec<(usize, usize, usize)> = side.v_edges[v]
                .iter()
                .map(|&e| {
                    let edge = &side.edges[e];
                    let other = if edge[0] == v { edge[1] } else { edge[0] };
                    let (c1, c2) = (cl.cclass[edge[2]], cl.cclass[edge[3]]);
                    (c1.min(c2), c1.max(c2), cl.vclass[other])
                })
                .collect();
            incident.sort_unstable();
            (cl.vclass[v], incident)
        };
        let color_sig = |side: &Side, cl: &Classes, c: usize| {
            let mut incident: Vec<(usize, usize, usize)> = side.c_edges[c]
                .iter()
                .map(|&e| {
                    let edge = &side.edges[e];
                    let other = if edge[2] == c { edge[3] } else { edge[2] };
                    let (v1, v2) = (cl.vclass[edge[0]], cl.vclass[edge[1]]);
                    (v1.min(v2), v1.max(v2), cl.cclass[other])
                })
                .collect();
            incident.sort_unstable();
            (cl.cclass[c], incident)
        };

        let mut vids: BTreeMap<(usize, Vec<(usize, usize, usize)>), usize> = BTreeMap::new();
        let new_va: Vec<usize> = (0..a.nv())
            .map(|v| {
                let sig = vertex_sig(a, &ca, v);
                let next = vids.len();
                *vids.entry(sig).or_insert(next)
            })
            .collect();
        let new_vb: Vec<usize> = (0..b.nv())
            .map(|v| {
                let sig = vertex_sig(b, &cb, v);
                let next = vids.len();
                *vids.entry(sig).or_insert(next)
            })
            .collect();
        let mut cids: BTreeMap<(usize, Vec<(usize, usize, usize)>), usize> = BTreeMap::new();
        let new_ca: Vec<usize> = (0..a.nc())
            .map(|c| {
                let sig = color_sig(a, &ca, c);
                let next = cids.len();
                *cids.entry(sig).or_insert(next)
            })
            .collect();
        let new_cb: Vec<usize> = (0..b.nc())
            .map(|c| {
                let sig = color_sig(b, &cb, c);
                let next = cids.len();
                *cids.entry(sig).or_insert(next)
            })
            .collect();
        ca = Classes { vclass: new_va, cclass: new_ca };
        cb = Classes { vclass: new_vb, cclass: new_cb };
        if histogram(&ca.vclass) != histogram(&cb.vclass)
            || histogram(&ca.cclass) != histogram(&cb.cclass)
        {
            return None;
        }
    }
    Some((ca, cb))
}

fn histogram(classes: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &c in classes {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

struct Budget {
    nodes: u64,
    limit: u64,
}

impl Budget {
    fn spend(&mut self) -> Result<(), IsoError> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(IsoError::BudgetExceeded { nodes: self.nodes });
        }
        Ok(())
    }
}

pub fn multigraph_isomorphic(
    left: &ColorMultigraph,
    right: &ColorMultigraph,
    limits: &SearchLimits,
) -> Result<Option<MultigraphWitness>, IsoError> {
    let a = Side::build(left);
    let b = Side::build(right);
    if a.nv() != b.nv()
        || a.edges.len() != b.edges.len()
        || a.nc() != b.nc()
        || left.colors.len() != right.colors.len()
    {
        return Ok(None);
    }
    let Some((ca, cb)) = refine(&a, &b, limits.refinement_rounds) else {
        return Ok(None);
    };

    // per-pair multisets of color-class pairs, the vertex-level consistency check
    let pair_profile = |side: &Side, cl: &Classes| {
        let mut map: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for edge in &side.edges {
            let (c1, c2) = (cl.cclass[edge[2]], cl.cclass[edge[3]]);
            map.entry((edge[0], edge[1]))
                .or_default()
                .push((c1.min(c2), c1.max(c2)));
        }
        for v in map.values_mut() {
            v.sort_unstable();
        }
        map
    };
    let prof_a = pair_profile(&a, &ca);
    let prof_b = pair_profile(&b, &cb);

    let mut order: Vec<usize> = (0..a.nv()).collect();
    let vhist = histogram(&ca.vclass);
    order.sort_by_key(|&v| (vhist[&ca.vclass[v]], std::cmp::Reverse(a.v_edges[v].len()), v));

    let mut budget = Budget { nodes: 0, limit: limits.backtrack_nodes };
    let mut mapping = vec![usize::MAX; a.nv()];
    let mut used = vec![false; b.nv()];
    let found = assign_vertices(
        &a, &b, &ca, &cb, &prof_a, &prof_b, &order, 0, &mut mapping, &mut used, &mut budget,
    )?;
    Ok(found.map(|(vmap, cmap)| MultigraphWitness {
        vertex_map: (0..a.nv()).map(|v| (a.vlabels[v], b.vlabels[vmap[v]])).collect(),
        color_map: (0..a.nc()).map(|c| (a.color_ids[c], b.color_ids[cmap[c]])).collect(),
    }))
}

#[allow(clippy::too_many_arguments)]
fn assign_vertices(
    a: &Side,
    b: &Side,
    ca: &Classes,
    cb: &Classes,
    prof_a: &BTreeMap<(usize, usize), Vec<(usize, usize)>>,
    prof_b: &BTreeMap<(usize, usize), Vec<(usize, usize)>>,
    order: &[usize],
    depth: usize,
    mapping: &mut Vec<usize>,
    used: &mut Vec<bool>,
    budget: &mut Budget,
) -> Result<Option<(Vec<usize>, Vec<usize>)>, IsoError> {
    if depth == order.len() {
        let Some(cmap) = assign_colors(a, b, ca, cb, mapping, budget)? else {
            return Ok(None);
        };
        return Ok(Some((mapping.clone(), cmap)));
    }
    let v = order[depth];
    for w in 0..b.nv() {
        if used[w] || ca.vclass[v] != cb.vclass[w] {
            continue;
        }
        budget.spend()?;
        let consistent = order[..depth].iter().all(|&u| {
            let key_a = (u.min(v), u.max(v));
            let fu = mapping[u];
            let key_b = (fu.min(w), fu.max(w));
            prof_a.get(&key_a) == prof_b.get(&key_b)
        });
        if !consistent {
            continue;
        }
        mapping[v] = w;
        used[w] = true;
        if let Some(found) =
            assign_vertices(a, b, ca, cb, prof_a, prof_b, order, depth + 1, mapping, used, budget)?
        {
            return Ok(Some(found));
        }
        mapping[v] = usize::MAX;
        used[w] = false;
    }
    Ok(None)
}

/// Finds a color bijection once the vertex map is fixed.
fn assign_colors(
    a: &Side,
    b: &Side,
    ca: &Classes,
    cb: &Classes,
    vmap: &[usize],
    budget: &mut Budget,
) -> Result<Option<Vec<usize>>, IsoError> {
    // per-color multiset of mapped vertex pairs
    let profile_a: Vec<Vec<(usize, usize)>> = (0..a.nc())
        .map(|c| {
            let mut pairs: Vec<(usize, usize)> = a.c_edges[c]
                .iter()
                .map(|&e| {
                    let (u, v) = (vmap[a.edges[e][0]], vmap[a.edges[e][1]]);
                    (u.min(v), u.max(v))
                })
                .collect();
            pairs.sort_unstable();
            pairs
        })
        .collect();
    let profile_b: Vec<Vec<(usize, usize)>> = (0..b.nc())
        .map(|c| {
            let mut pairs: Vec<(usize, usize)> =
                b.c_edges[c].iter().map(|&e| (b.edges[e][0], b.edges[e][1])).collect();
            pairs.sort_unstable();
            pairs
        })
        .collect();

    let candidates: Vec<Vec<usize>> = (0..a.nc())
        .map(|c| {
            (0..b.nc())
                .filter(|&d| ca.cclass[c] == cb.cclass[d] && profile_a[c] == profile_b[d])
                .collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }

    // adjacency between colors, labeled by mapped vertex pairs
    let color_pairs = |side: &Side, map_vertices: bool| {
        let mut out: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for edge in &side.edges {
            let (u, v) = if map_vertices {
                (vmap[edge[0]], vmap[edge[1]])
            } else {
                (edge[0], edge[1])
            };
            out.entry((edge[2], edge[3])).or_default().push((u.min(v), u.max(v)));
        }
        for v in out.values_mut() {
            v.sort_unstable();
        }
        out
    };
    let cp_a = color_pairs(a, true);
    let cp_b = color_pairs(b, false);

    let mut order: Vec<usize> = (0..a.nc()).collect();
    order.sort_by_key(|&c| (candidates[c].len(), c));

    let mut cmap = vec![usize::MAX; a.nc()];
    let mut used = vec![false; b.nc()];

    fn recurse(
        order: &[usize],
        depth: usize,
        candidates: &[Vec<usize>],
        cp_a: &BTreeMap<(usize, usize), Vec<(usize, usize)>>,
        cp_b: &BTreeMap<(usize, usize), Vec<(usize, usize)>>,
        cmap: &mut Vec<usize>,
        used: &mut Vec<bool>,
        budget: &mut Budget,
    ) -> Result<bool, IsoError> {
        if depth == order.len() {
            return Ok(true);
        }
        let c = order[depth];
        for &d in &candidates[c] {
            if used[d] {
                continue;
            }
            budget.spend()?;
            let consistent = order[..depth].iter().all(|&prev| {
                let key_a = (prev.min(c), prev.max(c));
                let fp = cmap[prev];
                let key_b = (fp.min(d), fp.max(d));
                cp_a.get(&key_a) == cp_b.get(&key_b)
            });
            if !consistent {
                continue;
            }
            cmap[c] = d;
            used[d] = true;
            if recurse(order, depth + 1, candidates, cp_a, cp_b, cmap, used, budget)? {
                return Ok(true);
            }
            cmap[c] = usize::MAX;
            used[d] = false;
        }
        Ok(false)
    }

    if recurse(&order, 0, &candidates, &cp_a, &cp_b, &mut cmap, &mut used, budget)? {
        Ok(Some(cmap))
    } else {
        Ok(None)
    }
}

/// Verifies a witness by mapping every left edge and comparing edge sets.
pub fn verify_multigraph_witness(
    left: &ColorMultigraph,
    right: &ColorMultigraph,
    witness: &MultigraphWitness,
) -> bool {
    let vmap: BTreeMap<QubitId, QubitId> = witness.vertex_map.iter().copied().collect();
    let cmap: BTreeMap<u32, u32> = witness.color_map.iter().copied().collect();
    let mut mapped: Vec<Bond> = Vec::with_capacity(left.edges.len());
    for bond in &left.edges {
        let (Some(&u), Some(&v)) = (vmap.get(&bond.qubits.0), vmap.get(&bond.qubits.1)) else {
            return false;
        };
        let (Some(&c), Some(&d)) = (cmap.get(&bond.colors.0), cmap.get(&bond.colors.1)) else {
            return false;
        };
        mapped.push(Bond::new((u, v), (c, d)));
    }
    mapped.sort_unstable();
    let mut target = right.edges.clone();
    target.sort_unstable();
    mapped == target
}

pub fn compact_isomorphic(
    left: &CompactMultigraph,
    right: &CompactMultigraph,
    limits: &SearchLimits,
) -> Result<Option<CompactWitness>, IsoError> {
    if left.vertices.len() != right.vertices.len() {
        return Ok(None);
    }
    let nv = left.vertices.len();
    let index = |g: &CompactMultigraph| -> BTreeMap<QubitId, usize> {
        g.vertices.iter().enumerate().map(|(i, &q)| (q, i)).collect()
    };
    let (ia, ib) = (index(left), index(right));
    let weights = |g: &CompactMultigraph, idx: &BTreeMap<QubitId, usize>| {
        let mut w = vec![vec![0u32; nv]; nv];
        for (&(p, q), &count) in &g.weights {
            let (u, v) = (idx[&p], idx[&q]);
            w[u][v] = count;
            w[v][u] = count;
        }
        w
    };
    let wa = weights(left, &ia);
    let wb = weights(right, &ib);

    // degree signature = sorted multiset of incident weights
    let signature = |w: &Vec<Vec<u32>>, v: usize| {
        let mut s: Vec<u32> = (0..nv).filter(|&u| u != v).map(|u| w[v][u]).collect();
        s.sort_unstable();
        s
    };
    let sig_a: Vec<Vec<u32>> = (0..nv).map(|v| signature(&wa, v)).collect();
    let sig_b: Vec<Vec<u32>> = (0..nv).map(|v| signature(&wb, v)).collect();
    {
        let mut ha = sig_a.clone();
        let mut hb = sig_b.clone();
        ha.sort();
        hb.sort();
        if ha != hb {
            return Ok(None);
        }
    }

    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by_key(|&v| {
        let same = sig_a.iter().filter(|s| **s == sig_a[v]).count();
        (same, v)
    });

    let mut budget = Budget { nodes: 0, limit: limits.backtrack_nodes };
    let mut mapping = vec![usize::MAX; nv];
    let mut used = vec![false; nv];

    fn recurse(
        order: &[usize],
        depth: usize,
        wa: &Vec<Vec<u32>>,
        wb: &Vec<Vec<u32>>,
        sig_a: &[Vec<u32>],
        sig_b: &[Vec<u32>],
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
        budget: &mut Budget,
    ) -> Result<bool, IsoError> {
        if depth == order.len() {
            return Ok(true);
        }
        let v = order[depth];
        for w in 0..wb.len() {
            if used[w] || sig_a[v] != sig_b[w] {
                continue;
            }
            budget.spend()?;
            if order[..depth].iter().any(|&u| wa[u][v] != wb[mapping[u]][w]) {
                continue;
            }
            mapping[v] = w;
            used[w] = true;
            if recurse(order, depth + 1, wa, wb, sig_a, sig_b, mapping, used, budget)? {
                return Ok(true);
            }
            mapping[v] = usize::MAX;
            used[w] = false;
        }
        Ok(false)
    }

    if recurse(&order, 0, &wa, &wb, &sig_a, &sig_b, &mut mapping, &mut used, &mut budget)? {
        Ok(Some(CompactWitness {
            vertex_map: (0..nv).map(|v| (left.vertices[v], right.vertices[mapping[v]])).collect(),
        }))
    } else {
        Ok(None)
    }
}
