//! Simulator and toolkit for testing and learning quantum junta unitaries.
//!
//! An `n`-qubit unitary is a *quantum k-junta* when it acts nontrivially on at
//! most `k` qubits: `U = V ⊗ I` up to qubit ordering, with `V` on `k` qubits.
//! This crate provides
//!
//! - exact Pauli-spectrum machinery for dense and structured unitaries
//!   ([`spectrum`], [`unitary`]), including influence, partial traces,
//!   phase-invariant distance and Choi–Jamiolkowski states;
//! - a query-counting oracle that simulates the measurement statistics a
//!   quantum algorithm would see ([`oracle`]);
//! - a property tester that decides "k-junta vs ε-far from every k-junta"
//!   ([`testing`]);
//! - a learner that reconstructs a junta from Pauli sampling, conditional
//!   state preparation and tomography ([`learning`]);
//! - independent brute-force oracles used to cross-check every closed form
//!   ([`verify`]).
//!
//! Qubits are indexed `1..=n`, with qubit 1 the most significant tensor
//! factor; a basis index `i` carries the bit of qubit `q` at position
//! `n - q` counting from the least significant bit.
//!
//! Everything is deterministic given a seed: randomness flows through
//! [`rand_chacha::ChaCha8Rng`] handles owned by the caller or the oracle.

pub mod boolean;
pub mod cj;
pub mod instance;
pub mod learning;
pub mod oracle;
pub mod pauli;
pub mod spectrum;
pub mod testing;
pub mod unitary;
pub mod verify;

#[cfg(doctest)]
mod book;

#[cfg(test)]
pub(crate) mod testutil;

pub use boolean::BooleanFunction;
pub use cj::CJState;
pub use instance::Instance;
pub use oracle::{BellOutcome, PostMeasurementState, QueryLedger, UnitaryOracle};
pub use pauli::{pauli_matrix, PauliLetter, PauliString};
pub use spectrum::PauliSpectrum;
pub use unitary::{
    dist, encode_boolean, haar_random_unitary, influence_via_partial_trace, partial_trace,
    DenseUnitary, StructuredJunta, Unitary, DENSE_QUBIT_CAP,
};

/// Hard ceiling on qubit count; subset bookkeeping uses 64-bit masks.
pub const MAX_QUBITS: usize = 64;

/// Errors surfaced by the library.
///
/// Probabilistic failures (a conditional preparation measuring the wrong
/// outcome) are ordinary values of the algorithms' sample space and also
/// travel through this type so callers can distinguish retryable outcomes
/// ([`Error::PrepFailed`]) from contract violations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not unitary: deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { deviation: f64, tolerance: f64 },
    #[error("qubit index {index} out of range for n = {n} (qubits are 1-based)")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("dense operation on {requested} qubits exceeds the cap of {cap}")]
    DenseCapExceeded { requested: usize, cap: usize },
    #[error("conditional preparation failed: {0}")]
    PrepFailed(&'static str),
    #[error("insufficient copies: tomography needs {needed}, only {available} prepared")]
    InsufficientCopies { needed: usize, available: usize },
    #[error("measurement tomography supports k <= {max_k}, got k = {k}")]
    BackendUnsupported { k: usize, max_k: usize },
    #[error("sampled support has {found} qubits, exceeding the junta promise k = {k}")]
    SupportExceedsPromise { found: usize, k: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_qubit_subset(n: usize, subset: &[usize]) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "n = {n} exceeds MAX_QUBITS = {MAX_QUBITS}"
        )));
    }
    let mut prev = 0usize;
    for &q in subset {
        if q == 0 || q > n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        if q <= prev {
            return Err(Error::InvalidParameter(format!(
                "qubit subset must be strictly increasing, saw {q} after {prev}"
            )));
        }
        prev = q;
    }
    Ok(())
}

/// Bit mask with bit `q - 1` set for each qubit `q` in `subset`.
pub(crate) fn subset_mask(subset: &[usize]) -> u64 {
    subset.iter().fold(0u64, |m, &q| m | (1u64 << (q - 1)))
}
