//! Graphviz DOT exports of bond multigraphs.
//!
//! Output is byte-deterministic for a given input. Display colors cycle
//! through a fixed palette by canonical element index; they are cosmetic
//! and play no role in isomorphism testing.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::bond::{ColorMultigraph, CompactMultigraph};

const PALETTE: [&str; 12] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999",
    "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3",
];

fn palette(index: u32) -> &'static str {
    PALETTE[(index as usize - 1) % PALETTE.len()]
}

/// Full bond diagram: one edge per bond, carrying both canonical color
/// indices and the unsigned element strings as a tooltip.
pub fn color_multigraph_dot(graph: &ColorMultigraph) -> String {
    let letters: BTreeMap<u32, &str> =
        graph.colors.iter().map(|c| (c.index, c.letters.as_str())).collect();
    let mut out = String::new();
    out.push_str("graph bonds {\n");
    out.push_str("  node [shape=circle];\n");
    for q in &graph.vertices {
        let _ = writeln!(out, "  {q};");
    }
    for bond in &graph.edges {
        let (a, b) = bond.qubits;
        let (c1, c2) = bond.colors;
        let tip = format!(
            "{}|{}",
            letters.get(&c1).copied().unwrap_or("?"),
            letters.get(&c2).copied().unwrap_or("?")
        );
        let _ = writeln!(
            out,
            "  {a} -- {b} [colorA={c1}, colorB={c2}, color=\"{}:{}\", tooltip=\"{tip}\"];",
            palette(c1),
            palette(c2)
        );
    }
    out.push_str("}\n");
    out
}

/// Compacted diagram: integer bond counts as edge labels.
pub fn compact_multigraph_dot(graph: &CompactMultigraph) -> String {
    let mut out = String::new();
    out.push_str("graph bonds_compact {\n");
    out.push_str("  node [shape=circle];\n");
    for q in &graph.vertices {
        let _ = writeln!(out, "  {q};");
    }
    for (&(a, b), &count) in &graph.weights {
        let _ = writeln!(out, "  {a} -- {b} [label={count}, weight={count}];");
    }
    out.push_str("}\n");
    out
}
