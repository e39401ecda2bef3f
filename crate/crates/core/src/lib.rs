//! Periodically driven XXZ spin models: lattices, spin Hilbert spaces, the
//! time-dependent and Bessel-dressed effective Hamiltonians, cluster
//! classification of product states, Krylov time evolution and entanglement
//! diagnostics.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod classifier;
pub mod error;
pub mod evolution;
pub mod floquet_average;
pub mod lattice;
pub mod linalg;
pub mod observables;
pub mod operators;
pub mod specfun;
pub mod spin;

pub use classifier::{
    classify_cluster, classify_product_state, enumerate_localized_states, ClusterClass,
    LibraryState, Localization, Spin, StateClass,
};
pub use error::{Error, Result};
pub use evolution::{EvolutionConfig, RunSummary, Trajectory};
pub use floquet_average::{effcheck, EffCheck, RotatingFrame};
pub use lattice::{LatticeGraph, LatticeKind};
pub use linalg::DenseMatrix;
pub use operators::{build_dense, LinearOperator, ModelParams, OperatorHandle, OperatorKind, XxzModel};
pub use specfun::{j0, j0_zero};
pub use spin::{ProductState, SpinBasis, StateVector};
