//! Driven two-photon micromaser in a truncated Fock space.
//!
//! A thermal cavity field is probed by a stream of atoms, each coupled to the
//! field through a displaced two-photon Jaynes-Cummings interaction. Tracing
//! out every atom leaves a quantum channel on the field, which is iterated
//! atom by atom while purity, photon statistics and phase-space diagnostics
//! are recorded.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod linalg;
pub mod observables;

pub use dynamics::{
    apply_atom, block_unitary, full_unitary, kraus_pair, rabi_frequencies, recursion_oracle,
    unitary_exponential_oracle, AtomFieldUnitary, AtomPrep, ChannelOutput, KrausPair, ModelParams,
    RabiFrequencies,
};
pub use error::{Error, Result};
pub use experiments::{
    convergence_audit, optimize_interaction_time, parity_reflection_check, run_sequence,
    AuditReport, ObservableSeries, RunConfig, Snapshot, TauOptimum, TauSample, TauScan,
};
pub use fock::{
    displacement_exponential_oracle, displacement_matrix, laguerre_assoc, thermal_state,
    DensityOperator, DisplacementMatrix, FockSpace,
};
pub use linalg::{ComplexMatrix, C64};
pub use observables::{
    g2_zero, linear_entropy, mean_photon, photon_distribution, q_function, von_neumann_entropy,
    GridSpec, PhotonDistribution, QGrid,
};
