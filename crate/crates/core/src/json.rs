//! Serde schemas for the file formats: states, graphs, measurement scripts,
//! and the analysis reports.
//!
//! Qubits and graph vertices are 1-based in every file, matching the CLI
//! surface; conversion to the engine's 0-based internals happens here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bond::{ColorMultigraph, CompactMultigraph, CoreSpace, EntangledPartition};
use crate::catalog::{CatalogError, GraphSpec};
use crate::dynamics::{Basis, DynamicsError, MeasurementRecord, MeasurementStep, OutcomeChoice};
use crate::group::{GroupError, QubitId, StabilizerState};
use crate::iso::{CompactWitness, MultigraphWitness};
use crate::pauli::{Sign, SignedPauli};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("outcome must be 1, -1 or \"sample\", got {0}")]
    BadOutcome(String),
    #[error("vertex index {0} is 1-based and must be positive")]
    ZeroIndex(u32),
}

/// State file: `{"n": ..., "labels": [...], "generators": ["+XZIIZ", ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StateJson {
    pub n: usize,
    pub labels: Vec<u32>,
    pub generators: Vec<String>,
}

impl From<&StabilizerState> for StateJson {
    fn from(state: &StabilizerState) -> Self {
        StateJson {
            n: state.n(),
            labels: state.labels().iter().map(|q| q.0).collect(),
            generators: state.generators().iter().map(|g| g.to_string()).collect(),
        }
    }
}

impl StateJson {
    pub fn to_state(&self) -> Result<StabilizerState, SchemaError> {
        let labels: Vec<QubitId> = self.labels.iter().map(|&l| QubitId(l)).collect();
        if self.generators.is_empty() {
            return Ok(StabilizerState::trivial_labeled(self.n, labels));
        }
        let gens: Vec<SignedPauli> = self
            .generators
            .iter()
            .map(|s| SignedPauli::parse(s))
            .collect::<Result<_, _>>()
            .map_err(GroupError::from)?;
        Ok(StabilizerState::from_generators_labeled(&gens, labels)?)
    }
}

/// Graph file: `{"n": ..., "edges": [[1,2], ...]}`, 1-based vertices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[u32; 2]>,
}

impl GraphJson {
    pub fn to_spec(&self) -> Result<GraphSpec, SchemaError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for &[a, b] in &self.edges {
            if a == 0 || b == 0 {
                return Err(SchemaError::ZeroIndex(a.min(b)));
            }
            edges.push((a as usize - 1, b as usize - 1));
        }
        Ok(GraphSpec::new(self.n, &edges)?)
    }

    pub fn from_spec(spec: &GraphSpec) -> Self {
        GraphJson {
            n: spec.n(),
            edges: spec.edges().iter().map(|&(a, b)| [a as u32 + 1, b as u32 + 1]).collect(),
        }
    }
}

/// One measurement-script step: `{"qubit": 1, "basis": "Z", "outcome": ...}`
/// where `outcome` is `1`, `-1` or `"sample"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureStepJson {
    pub qubit: u32,
    pub basis: String,
    pub outcome: OutcomeJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutcomeJson {
    Fixed(i8),
    Named(String),
}

impl MeasureStepJson {
    pub fn to_step(&self) -> Result<MeasurementStep, SchemaError> {
        let basis: Basis = self.basis.parse()?;
        let choice = match &self.outcome {
            OutcomeJson::Fixed(v) => match Sign::from_i8(*v) {
                Some(sign) => OutcomeChoice::Forced(sign),
                None => return Err(SchemaError::BadOutcome(v.to_string())),
            },
            OutcomeJson::Named(s) if s == "sample" => OutcomeChoice::Sample,
            OutcomeJson::Named(s) => return Err(SchemaError::BadOutcome(s.clone())),
        };
        Ok(MeasurementStep { qubit: QubitId(self.qubit), basis, choice })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RecordJson {
    pub qubit: u32,
    pub basis: String,
    pub outcome: i8,
    pub determined: bool,
}

impl From<&MeasurementRecord> for RecordJson {
    fn from(r: &MeasurementRecord) -> Self {
        RecordJson {
            qubit: r.qubit.0,
            basis: r.basis.to_string(),
            outcome: r.outcome.as_i8(),
            determined: r.determined,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BlockJson {
    pub qubits: Vec<u32>,
    pub entangled: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PartitionReport {
    pub blocks: Vec<BlockJson>,
}

impl From<&EntangledPartition> for PartitionReport {
    fn from(p: &EntangledPartition) -> Self {
        PartitionReport {
            blocks: p
                .blocks
                .iter()
                .map(|b| BlockJson {
                    qubits: b.qubits.iter().map(|q| q.0).collect(),
                    entangled: b.entangled,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ColorJson {
    pub index: u32,
    pub letters: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeJson {
    pub qubits: [u32; 2],
    pub colors: [u32; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BondsReport {
    pub vertices: Vec<u32>,
    pub colors: Vec<ColorJson>,
    pub edges: Vec<EdgeJson>,
}

impl From<&ColorMultigraph> for BondsReport {
    fn from(g: &ColorMultigraph) -> Self {
        BondsReport {
            vertices: g.vertices.iter().map(|q| q.0).collect(),
            colors: g
                .colors
                .iter()
                .map(|c| ColorJson { index: c.index, letters: c.letters.clone() })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|b| EdgeJson {
                    qubits: [b.qubits.0 .0, b.qubits.1 .0],
                    colors: [b.colors.0, b.colors.1],
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WeightJson {
    pub qubits: [u32; 2],
    pub count: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CompactReport {
    pub vertices: Vec<u32>,
    pub weights: Vec<WeightJson>,
}

impl From<&CompactMultigraph> for CompactReport {
    fn from(g: &CompactMultigraph) -> Self {
        CompactReport {
            vertices: g.vertices.iter().map(|q| q.0).collect(),
            weights: g
                .weights
                .iter()
                .map(|(&(a, b), &count)| WeightJson { qubits: [a.0, b.0], count })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CoreReport {
    pub about: Vec<u32>,
    pub rank: u64,
    pub group: StateJson,
    /// All non-identity core elements, signed, in canonical order.
    pub elements: Vec<String>,
    pub partition: PartitionReport,
}

impl CoreReport {
    pub fn build(core: &CoreSpace) -> Result<Self, SchemaError> {
        let elements = core
            .group
            .elements()?
            .iter()
            .filter(|e| !e.is_pattern_identity())
            .map(|e| e.to_string())
            .collect();
        let partition = crate::bond::entangled_partition(&core.group)
            .map(|p| PartitionReport::from(&p))
            .unwrap_or(PartitionReport { blocks: Vec::new() });
        Ok(CoreReport {
            about: core.about.iter().map(|q| q.0).collect(),
            rank: core.rank,
            group: StateJson::from(&core.group),
            elements,
            partition,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PersistencyReport {
    pub measurements: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct IsoReport {
    pub isomorphic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_map: Option<Vec<[u32; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color_map: Option<Vec<[u32; 2]>>,
}

impl IsoReport {
    pub fn from_multigraph(witness: Option<&MultigraphWitness>) -> Self {
        match witness {
            Some(w) => IsoReport {
                isomorphic: true,
                vertex_map: Some(w.vertex_map.iter().map(|&(a, b)| [a.0, b.0]).collect()),
                color_map: Some(w.color_map.iter().map(|&(a, b)| [a, b]).collect()),
            },
            None => IsoReport { isomorphic: false, vertex_map: None, color_map: None },
        }
    }

    pub fn from_compact(witness: Option<&CompactWitness>) -> Self {
        match witness {
            Some(w) => IsoReport {
                isomorphic: true,
                vertex_map: Some(w.vertex_map.iter().map(|&(a, b)| [a.0, b.0]).collect()),
                color_map: None,
            },
            None => IsoReport { isomorphic: false, vertex_map: None, color_map: None },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassJson {
    pub representative: GraphJson,
    pub members: Vec<GraphJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub n: usize,
    pub class_count: usize,
    pub classes: Vec<ClassJson>,
    pub unclassified: Vec<GraphJson>,
}
