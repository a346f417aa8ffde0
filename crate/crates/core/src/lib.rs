//! Variational simulation of 1D evolution PDEs on a real-amplitude
//! statevector, checked against a finite-difference reference.

pub mod ansatz;
pub mod dlvo;
pub mod encode;
pub mod error;
pub mod hamiltonian;
pub mod problem;
pub mod reference;
pub mod sampling;
pub mod statevec;
pub mod vqs;

pub use ansatz::{AnsatzSpec, Entanglement, FinalLayer, ParameterSet};
pub use error::{Error, Result};
pub use hamiltonian::{BoundaryCondition, HamiltonianSpec, SourceSpec};
pub use problem::Problem;
pub use statevec::{GateOp, RealState};
pub use vqs::{Backend, EvolutionConfig, Stepper, Trajectory};
