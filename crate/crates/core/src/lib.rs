//! Exact-statevector simulation and optimization of layered variational
//! circuits for spin chains.
//!
//! The crate is organized around a small set of building blocks:
//!
//! * [`pauli`]: sparse Pauli strings and real-coefficient Pauli sums with
//!   matrix-free application to statevectors.
//! * [`state`]: dense statevectors and exact exponentials of commuting
//!   Pauli-sum layer generators.
//! * [`hamiltonians`]: transverse-field Ising and cluster-model builders
//!   plus their protecting parity operators.
//! * [`ansatz`]: layered circuit templates (with and without
//!   symmetry-breaking layers), parameter layout, and initialization.
//! * [`derivatives`]: exact parameter-shift-free derivative states, energy
//!   gradients, and quantum Fisher information matrices.
//! * [`exact`]: dense and Lanczos ground-state references.
//! * [`optimizer`]: quantum natural gradient descent with a damped Fisher
//!   metric.
//!
//! # Index convention
//!
//! Qubit `i` is bit `i` of the amplitude index: site 0 is the least
//! significant bit, and the basis state `|b_{n-1} ... b_1 b_0>` lives at
//! index `sum_i b_i 2^i`. Every module in this crate and everything built
//! on top of it shares this convention.

pub mod ansatz;
pub mod derivatives;
pub mod error;
pub mod exact;
pub mod hamiltonians;
pub mod optimizer;
pub mod pauli;
pub mod state;

pub use ansatz::{AnsatzSpec, InitStrategy};
pub use derivatives::{DerivativeMode, FisherMatrix, FisherVariant};
pub use error::{Error, Result};
pub use exact::{GroundTruth, SolveMethod};
pub use hamiltonians::{Model, ModelSpec};
pub use optimizer::{OptimizerConfig, RunRecord};
pub use pauli::{Axis, PauliString, PauliSum};
pub use state::{LayerSpec, Statevector, MAX_QUBITS};
