//! Laboratory for adiabatic quantum optimization on NP-complete problems.
//!
//! Exact Cover and 3SAT instances are reduced to maximum-weight independent
//! set, turned into transverse-field Ising problem Hamiltonians, and studied
//! by exact diagonalization (minimum spectral gap) and state-vector
//! simulation of the adiabatic sweep (success probability).
//!
//! Combinatorial data and problem Hamiltonians are generic over an exact or
//! floating [`Weight`]; spectra and dynamics are generic over a [`Real`]
//! (`f32` or `f64`). The aliases below fix the common choices: exact
//! rational weights for reductions and oracles, `f64` for numerics.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod formats;
pub mod hamiltonian;
pub mod instances;
mod linalg;
pub mod oracle;
pub mod reductions;
pub mod scalar;
pub mod spectrum;

pub use error::{Certificate, Error, Result};
pub use hamiltonian::{ClauseStats, DRule, IsingModel, MisParams};
pub use instances::{Assignment, CnfFormula, ExactCoverInstance, Literal, Semantics};
pub use reductions::{SolutionMapping, WeightedGraph};
pub use scalar::{Real, Weight};
pub use spectrum::{EigenOptions, SolverKind, SpectrumScan, SystemSpec};

/// Exact rational number used for vertex weights and exact Hamiltonian
/// coefficients.
pub type Rational = num_rational::Rational64;

/// Vertex-weighted graph with exact rational weights.
pub type ExactGraph = WeightedGraph<Rational>;
/// Coupling parameters with exact rational values.
pub type ExactMisParams = MisParams<Rational>;
/// Ising model with exact rational coefficients.
pub type ExactIsing = IsingModel<Rational>;
/// Ising model in double precision.
pub type Ising64 = IsingModel<f64>;
/// System Hamiltonian `H(s)` in double precision.
pub type System64 = SystemSpec<f64>;
/// Spectrum scan in double precision.
pub type Scan64 = SpectrumScan<f64>;

/// Default upper bound on the number of qubits for anything that
/// materializes a `2^n` vector.
pub const DEFAULT_MAX_QUBITS: usize = 20;

/// Environment variable that overrides [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "AQOLAB_MAX_QUBITS";

/// Identifier of the random number generator used by every generator in the
/// crate. Written into output metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

/// The active qubit cap: [`MAX_QUBITS_ENV`] if set to a valid integer,
/// otherwise [`DEFAULT_MAX_QUBITS`].
pub fn qubit_cap() -> usize {
    std::env::var(MAX_QUBITS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_QUBITS)
}

pub(crate) fn rng_from_seed(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
