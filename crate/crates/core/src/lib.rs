//! Distances between two-meson density matrices.
//!
//! The crate is split into four layers:
//!
//! * [`linalg`]: small dense complex matrices and a Jacobi Hermitian eigensolver.
//! * [`states`]: the singlet, slab regeneration, decoherence, mixing and the
//!   scenario families built from them.
//! * [`metrics`]: fidelity and the Bures, Hilbert–Schmidt and trace distances.
//! * [`analysis`]: sweeps, finite-difference sensitivities and the bisection
//!   search for sensitivity crossovers.

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod states;

pub use analysis::{
    difference_curve, sensitivity, sensitivity_crossover, sweep, sweep_2d, CrossoverReport, SweepResult,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexScalar, EigenDecomposition};
pub use metrics::{all_distances, bures, fidelity, hilbert_schmidt, trace_distance, DistanceKind, Distances};
pub use states::{make_family, DensityMatrix, FamilyKind, FamilyParams, StateFamily, SweepParam};
