//! Circuit-to-Hamiltonian compilation for clock-register constructions and
//! the numerical audits that check their structural properties.

pub mod circuit;
pub mod constructions;
pub mod linalg;
pub mod spectral;
pub mod tensorspace;
pub mod verify;

pub use circuit::{named_gate, parse_circuit, validate_for, Circuit, CircuitError, Diagnostic, Gate, ParseError};
pub use constructions::{
    build, build_reference, history_state, layout, legal_clock_basis, schedule, ClockLayout, ConstructionError,
    ConstructionKind, HamiltonianBundle, ReferenceHamiltonian, Schedule,
};
pub use linalg::{DenseMatrix, C64};
pub use spectral::{eig_dense, lowest_eigs, restrict, subspace_residual, EigResult, SpectralError};
pub use tensorspace::{
    apply, assemble, embed, term_norm, Family, GroupId, LocalTerm, SpaceShape, SparseOperator, StateVector,
    TensorError,
};
pub use verify::{run_audit, AuditOptions, AuditReport, CheckRecord};
