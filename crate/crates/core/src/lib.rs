//! Carleman-linearized 1D Burgers' equation as a structured linear system.
//!
//! The pipeline runs from the finite-difference operators through the
//! truncated Carleman system and its zero-padded embedding to an exact
//! decomposition into tensor products of single-entry and identity factors
//! plus a few permutation blocks. Each term is block encoded with a gate-level
//! circuit, costed in Clifford and T gates, and the whole system can be solved
//! either classically or with a statevector VQLS.

pub mod basis;
pub mod block_encoding;
pub mod burgers;
pub mod circuits;
pub mod decomposition;
pub mod embedding;
pub mod error;
pub mod pauli;
pub mod resources;
pub mod solve;
pub mod sparse;
pub mod vqls;

pub use basis::{BasisFactor, Factor, FactorList};
pub use block_encoding::{block_encode, verify_encoding, BlockEncoding, EncodingReport, U1Descriptor};
pub use burgers::{CarlemanSystem, GridConfig};
pub use circuits::{Circuit, Gate, GateKind};
pub use decomposition::{CompositeBlock, DecompositionTerm, TermClass, TermCounts};
pub use embedding::{EmbeddedSystem, SolutionTrajectory};
pub use error::{Error, Result};
pub use resources::{CostModel, ResourceCount};
pub use solve::classical_solve;
pub use sparse::{SparseMatrix, C64};
pub use vqls::{AnsatzConfig, VqlsResult};
