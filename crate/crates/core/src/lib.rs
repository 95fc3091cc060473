//! Stabilizer-group engine for the entanglement bond structure of N-qubit
//! graph states.
//!
//! The crate works entirely in the binary symplectic picture: a state is a
//! closed group of signed Pauli observables, measurements truncate the group,
//! and entanglement between qubits is read off as *bonds* — pairs of group
//! elements that anticommute at both qubits of a pair lying in the same
//! entangled subpart. Bond structures form color multigraphs whose
//! isomorphism classes are invariant under local unitaries.
//!
//! Modules:
//! - [`pauli`]: signed Pauli operators and their exact arithmetic,
//! - [`group`]: closed stabilizer groups, canonical tableaux, censuses,
//! - [`dynamics`]: CZ gates, local Cliffords, Pauli measurement truncation,
//! - [`bond`]: entangled partitions, bonds, core spaces, extraction searches,
//! - [`iso`]: color-multigraph and compacted-multigraph isomorphism,
//! - [`catalog`]: graph states, named states, classification drivers,
//! - [`fixtures`]: transcribed reference tables used as golden data,
//! - [`dense`]: dense-vector reference simulation for cross-checking,
//! - [`dot`]: Graphviz exports,
//! - [`json`]: file-format schemas.

pub mod bond;
pub mod catalog;
pub mod dense;
pub mod dot;
pub mod dynamics;
pub mod fixtures;
pub mod group;
pub mod iso;
pub mod json;
pub mod pauli;

pub use bond::{Bond, ColorMultigraph, CompactMultigraph, CoreSpace, EntangledPartition};
pub use dynamics::{Basis, LocalGate, MeasurementRecord, OutcomeChoice};
pub use group::{ColumnCensus, QubitId, StabilizerState};
pub use iso::SearchLimits;
pub use pauli::{Letter, Sign, SignedPauli};
