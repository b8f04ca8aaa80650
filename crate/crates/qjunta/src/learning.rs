//! Junta learning.
//!
//! Under the promise that the hidden unitary acts on at most `k` qubits,
//! the learner recovers it to distance `eps`:
//!
//! 1. Pauli-sample to find the influential qubits (the sampled supports
//!    only ever contain qubits of nonzero influence).
//! 2. Pad the set to exactly `k` qubits and repeatedly prepare the
//!    conditional CJ state on those register pairs.
//! 3. Run pure-state tomography on the copies.
//! 4. Reshape the estimated state into a matrix and project it onto the
//!    nearest unitary, which becomes the core of the learned junta.
//!
//! Copies are physically identical here because the simulator's
//! conditional state is deterministic, so a batch stores one state and a
//! count instead of materializing every copy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cj::CJState;
use crate::oracle::{PostMeasurementState, UnitaryOracle};
use crate::pauli::PauliString;
use crate::unitary::{DenseUnitary, StructuredJunta, DENSE_QUBIT_CAP};
use crate::{Error, Result};

/// Tomography copy constant: `ceil(c_t * 4^k / eps')` copies per estimate.
/// Sized so the measurement backend reaches fidelity `1 - eps'` with
/// probability well above 0.95 at k <= 2.
pub const DEFAULT_C_T: f64 = 48.0;

/// Copy-preparation constant, `t = ceil(c_l * 4^k / eps^2)`. Tied to
/// `4 * c_t` so the prepared batch exactly covers the tomography draw at
/// the default error split `eps' = eps^2 / 4`.
pub const DEFAULT_C_L: f64 = 4.0 * DEFAULT_C_T;

/// Largest `k` the measurement tomography backend supports; it estimates
/// all `16^k` Pauli expectations of the copy state.
pub const MEASUREMENT_BACKEND_MAX_K: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TomographyBackend {
    /// Returns the true state and charges the copy budget; stands in for
    /// an optimal pure-state tomography black box.
    Exact,
    /// Estimates the density matrix from simulated Pauli measurements on
    /// the copies and returns its top eigenvector.
    Measurement,
}

#[derive(Clone, Debug)]
pub struct LearnerParams {
    pub k: usize,
    pub eps: f64,
    pub c_l: f64,
    pub c_t: f64,
    pub backend: TomographyBackend,
}

impl LearnerParams {
    pub fn new(k: usize, eps: f64) -> Result<LearnerParams> {
        if k == 0 || k > DENSE_QUBIT_CAP {
            return Err(Error::InvalidParameter(format!(
                "k must lie in 1..={DENSE_QUBIT_CAP}, got {k}"
            )));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1], got {eps}"
            )));
        }
        Ok(LearnerParams {
            k,
            eps,
            c_l: DEFAULT_C_L,
            c_t: DEFAULT_C_T,
            backend: TomographyBackend::Exact,
        })
    }

    /// Influence floor for the sampling stage: `eps^2 / (4k)`.
    pub fn gamma(&self) -> f64 {
        self.eps * self.eps / (4.0 * self.k as f64)
    }

    /// Pauli samples drawn: `ceil(ln(100k) / gamma)`.
    pub fn sample_count(&self) -> usize {
        ((100.0 * self.k as f64).ln() / self.gamma()).ceil() as usize
    }

    /// Copies the learner must secure: `ceil(c_l * 4^k / eps^2)`.
    pub fn copies(&self) -> usize {
        (self.c_l * 4f64.powi(self.k as i32) / (self.eps * self.eps)).ceil() as usize
    }

    /// Preparation attempts budgeted: ten times the copy target.
    pub fn attempts(&self) -> usize {
        10 * self.copies()
    }

    /// Error split handed to tomography: `eps^2 / 4`.
    pub fn tomography_eps(&self) -> f64 {
        self.eps * self.eps / 4.0
    }
}

/// Union of the supports of `ceil(ln(100k)/gamma)` Pauli samples, sorted.
///
/// Every returned qubit has nonzero influence; with probability at least
/// 0.99 the set contains every qubit of influence at least `gamma`.
/// Charges one simulated and one modeled query per sample.
pub fn pauli_sample_relevant(
    oracle: &mut UnitaryOracle,
    gamma: f64,
    k: usize,
) -> Result<Vec<usize>> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    let samples = ((100.0 * k as f64).ln() / gamma).ceil() as u64;
    oracle.charge_modeled(samples);
    let mut seen = vec![false; oracle.n() + 1];
    for _ in 0..samples {
        for q in oracle.pauli_sample().support() {
            seen[q] = true;
        }
    }
    Ok((1..=oracle.n()).filter(|&q| seen[q]).collect())
}

/// Identical prepared copies of one conditional state.
#[derive(Clone, Debug)]
pub struct CopyBatch {
    state: Option<PostMeasurementState>,
    available: usize,
}

impl CopyBatch {
    pub fn new(state: PostMeasurementState, count: usize) -> CopyBatch {
        CopyBatch {
            state: Some(state),
            available: count,
        }
    }

    pub fn available(&self) -> usize {
        self.available
    }

    pub fn state(&self) -> Option<&PostMeasurementState> {
        self.state.as_ref()
    }

    /// Spend `count` copies and hand back the shared state.
    pub fn consume(&mut self, count: usize) -> Result<&PostMeasurementState> {
        if count > self.available {
            return Err(Error::InsufficientCopies {
                needed: count,
                available: self.available,
            });
        }
        self.available -= count;
        self.state.as_ref().ok_or(Error::PrepFailed(
            "no copy was ever prepared for this batch",
        ))
    }
}

/// Run `attempts` conditional preparations on `subset` (padded to `k`
/// retained pairs) and collect the successes. Each attempt is one
/// simulated and one modeled query. The batch stores the one shared state;
/// per-attempt randomness is only in the success draw.
pub fn prepare_copies(
    oracle: &mut UnitaryOracle,
    subset: &[usize],
    k: usize,
    attempts: usize,
) -> Result<CopyBatch> {
    oracle.charge_modeled(attempts as u64);
    let mut successes = 0usize;
    for _ in 0..attempts {
        if oracle.conditional_prep_succeeds(subset, k)? {
            successes += 1;
        }
    }
    let state = if successes > 0 {
        Some(oracle.post_state_of(subset, k)?)
    } else {
        None
    };
    Ok(CopyBatch {
        state,
        available: successes,
    })
}

fn pauli_expectation(psi: &DVector<Complex64>, y: &PauliString, qubits: usize) -> f64 {
    let dim = psi.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for row in 0..dim {
        let mut col = 0usize;
        let mut phase = Complex64::new(1.0, 0.0);
        for q in 1..=qubits {
            let row_bit = ((row >> (qubits - q)) & 1) as u8;
            let (col_bit, entry) = y.letter(q).action(row_bit);
            col = (col << 1) | col_bit as usize;
            phase *= entry;
        }
        acc += psi[row].conj() * phase * psi[col];
    }
    acc.re
}

/// Pure-state tomography on the copies in `batch`, targeting fidelity
/// `1 - eps_prime`. Consumes `ceil(c_t * 4^k / eps_prime)` copies.
pub fn tomography(
    batch: &mut CopyBatch,
    eps_prime: f64,
    backend: TomographyBackend,
    c_t: f64,
    rng: &mut ChaCha8Rng,
) -> Result<CJState> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tomography error must lie in (0, 1), got {eps_prime}"
        )));
    }
    let k = batch
        .state()
        .ok_or(Error::PrepFailed("tomography on an empty batch"))?
        .k();
    if backend == TomographyBackend::Measurement && k > MEASUREMENT_BACKEND_MAX_K {
        return Err(Error::BackendUnsupported {
            k,
            max_k: MEASUREMENT_BACKEND_MAX_K,
        });
    }
    let cost = (c_t * 4f64.powi(k as i32) / eps_prime).ceil() as usize;
    let state = batch.consume(cost)?;
    let psi = state.to_state_vector();
    match backend {
        TomographyBackend::Exact => CJState::from_amplitudes(k, psi),
        TomographyBackend::Measurement => {
            let qubits = 2 * k;
            let observables = 1usize << (2 * qubits);
            let shots = cost / (observables - 1);
            if shots == 0 {
                return Err(Error::InvalidParameter(format!(
                    "copy budget {cost} leaves no shots for {} observables",
                    observables - 1
                )));
            }
            let dim = psi.len();
            let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
            let id_weight = Complex64::new(1.0 / dim as f64, 0.0);
            for i in 0..dim {
                rho[(i, i)] = id_weight;
            }
            for code in 1..observables {
                let y = PauliString::from_code(qubits, code);
                let truth = pauli_expectation(&psi, &y, qubits);
                let p_plus = ((1.0 + truth) / 2.0).clamp(0.0, 1.0);
                let mut plus = 0i64;
                for _ in 0..shots {
                    if rng.gen_bool(p_plus) {
                        plus += 1;
                    }
                }
                let estimate = (2 * plus - shots as i64) as f64 / shots as f64;
                let weight = Complex64::new(estimate / dim as f64, 0.0);
                for row in 0..dim {
                    let mut colbits = 0usize;
                    let mut phase = Complex64::new(1.0, 0.0);
                    for q in 1..=qubits {
                        let row_bit = ((row >> (qubits - q)) & 1) as u8;
                        let (col_bit, entry) = y.letter(q).action(row_bit);
                        colbits = (colbits << 1) | col_bit as usize;
                        phase *= entry;
                    }
                    rho[(row, colbits)] += weight * phase;
                }
            }
            // The estimate is Hermitian by construction; its top
            // eigenvector is the state estimate.
            let eig = nalgebra::SymmetricEigen::new(rho);
            let mut best = 0;
            for i in 1..eig.eigenvalues.len() {
                if eig.eigenvalues[i] > eig.eigenvalues[best] {
                    best = i;
                }
            }
            CJState::from_amplitudes(k, eig.eigenvectors.column(best).into_owned())
        }
    }
}

/// Decode a CJ state back into a unitary: reshape into a `K x K` matrix
/// scaled by `sqrt(K)`, then polar-project onto the unitary group.
pub fn state_to_unitary(state: &CJState) -> Result<DenseUnitary> {
    let k = state.n();
    let dim = 1usize << k;
    let scale = (dim as f64).sqrt();
    let amps = state.amplitudes();
    let mut w = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            w[(i, j)] = amps[i * dim + j] * scale;
        }
    }
    let svd = w
        .try_svd(true, true, 1e-13, 0)
        .ok_or(Error::PrepFailed("singular value decomposition failed"))?;
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    DenseUnitary::new(u * v_t)
}

/// End-to-end learner. Requires the hidden unitary to be a `k`-junta;
/// breaking the promise surfaces as `SupportExceedsPromise` when sampling
/// finds more than `k` influential qubits.
///
/// The reported support is the sampled set padded to exactly `k` qubits
/// with the smallest unused indices (identity action on the padding).
pub fn junta_learner(oracle: &mut UnitaryOracle, params: &LearnerParams) -> Result<StructuredJunta> {
    let n = oracle.n();
    if params.k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {} exceeds the register size {n}",
            params.k
        )));
    }
    let sampled = pauli_sample_relevant(oracle, params.gamma(), params.k)?;
    if sampled.len() > params.k {
        return Err(Error::SupportExceedsPromise {
            found: sampled.len(),
            k: params.k,
        });
    }
    let mut support = sampled;
    let mut next = 1;
    while support.len() < params.k {
        if !support.contains(&next) {
            support.push(next);
        }
        next += 1;
    }
    support.sort_unstable();

    let mut batch = prepare_copies(oracle, &support, params.k, params.attempts())?;
    let target = params.copies();
    if batch.available() < target {
        return Err(Error::InsufficientCopies {
            needed: target,
            available: batch.available(),
        });
    }
    let estimate = tomography(
        &mut batch,
        params.tomography_eps(),
        params.backend,
        params.c_t,
        oracle.rng_mut(),
    )?;
    let core = state_to_unitary(&estimate)?;
    StructuredJunta::new(n, support, core)
}
