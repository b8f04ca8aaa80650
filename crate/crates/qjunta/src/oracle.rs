//! Query-access simulation of a hidden unitary.
//!
//! The oracle owns the hidden unitary, its cached Pauli spectrum, a seeded
//! RNG and a [`QueryLedger`]. Algorithms only see measurement outcomes whose
//! statistics match what the corresponding quantum circuits would produce:
//! Bell measurements on the Choi–Jamiolkowski state land on Pauli string `x`
//! with probability `|Uhat(x)|^2`. The one-time spectrum decomposition is a
//! simulator shortcut and charges nothing.
//!
//! Two cost columns are tracked. *Simulated* counts record state
//! preparations this process actually sampled. *Modeled* counts record the
//! query budget the algorithms would spend on quantum hardware; they are
//! charged by the algorithm layers in [`crate::testing`] and
//! [`crate::learning`], never by the primitives here.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::pauli::PauliString;
use crate::spectrum::PauliSpectrum;
use crate::unitary::Unitary;
use crate::{check_qubit_subset, subset_mask, Error, Result};

/// Exact query counts for one oracle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    /// CJ-state preparations actually sampled by the simulator.
    pub simulated_u: u64,
    /// Inverse applications actually sampled (none of the shipped
    /// algorithms need one; amplification accounts for inverses in the
    /// modeled column instead).
    pub simulated_u_dagger: u64,
    /// Queries the algorithms would issue on quantum hardware.
    pub modeled_quantum: u64,
}

impl QueryLedger {
    pub fn merge(&mut self, other: &QueryLedger) {
        self.simulated_u += other.simulated_u;
        self.simulated_u_dagger += other.simulated_u_dagger;
        self.modeled_quantum += other.modeled_quantum;
    }
}

/// Bell-measurement outcome restricted to a qubit subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BellOutcome {
    AllIdentity,
    /// The restricted Pauli string; at least one letter is nontrivial.
    Nontrivial(PauliString),
}

/// The conditional state left on `k` register pairs after measuring the
/// complement pairs of the CJ state and observing all-identity.
///
/// Coefficients are the renormalized hidden-spectrum entries supported
/// inside the retained set, keyed by their restriction to the retained
/// qubits (in increasing qubit order) padded with trailing identities up
/// to `k` letters; the padding factors stand for fresh EPR pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PostMeasurementState {
    k: usize,
    retained: Vec<usize>,
    coefficients: BTreeMap<PauliString, Complex64>,
}

impl PostMeasurementState {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Original qubit indices behind the first `retained().len()` factors.
    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn coefficients(&self) -> &BTreeMap<PauliString, Complex64> {
        &self.coefficients
    }

    pub fn total_weight(&self) -> f64 {
        self.coefficients.values().map(|v| v.norm_sqr()).sum()
    }

    /// Amplitude vector on `2k` qubits: `sum_y c(y) |v(sigma_y)>`.
    pub fn to_state_vector(&self) -> DVector<Complex64> {
        let dim = 1usize << self.k;
        let scale = 1.0 / (dim as f64).sqrt();
        let mut amps = DVector::zeros(dim * dim);
        for (y, c) in &self.coefficients {
            // sigma_y has one nonzero per row; walk them directly.
            for row in 0..dim {
                let mut col = 0usize;
                let mut phase = Complex64::new(1.0, 0.0);
                for q in 1..=self.k {
                    let row_bit = ((row >> (self.k - q)) & 1) as u8;
                    let (col_bit, entry) = y.letter(q).action(row_bit);
                    col = (col << 1) | col_bit as usize;
                    phase *= entry;
                }
                amps[row * dim + col] += c * phase * scale;
            }
        }
        amps
    }

    /// The `2^k x 2^k` operator `sum_y c(y) sigma_y` whose CJ state this is.
    pub fn encoded_matrix(&self) -> nalgebra::DMatrix<Complex64> {
        PauliSpectrum::from_coefficients(
            self.k,
            self.coefficients.iter().map(|(x, v)| (x.clone(), *v)),
        )
        .expect("keys have length k")
        .reconstruct()
    }
}

/// Simulated query access to a hidden unitary.
pub struct UnitaryOracle {
    hidden: Unitary,
    n: usize,
    /// Sampling table: strings, their squared-coefficient masses and the
    /// prefix sums, all in the spectrum's (deterministic) map order.
    strings: Vec<PauliString>,
    cumulative: Vec<f64>,
    total_mass: f64,
    spectrum: PauliSpectrum,
    mass_by_support: Vec<(u64, f64)>,
    rng: ChaCha8Rng,
    ledger: QueryLedger,
}

impl UnitaryOracle {
    pub fn new(hidden: Unitary, seed: u64) -> Self {
        Self::with_rng(hidden, ChaCha8Rng::seed_from_u64(seed))
    }

    /// Build with an explicit RNG handle (callers split per-trial streams).
    pub fn with_rng(hidden: Unitary, rng: ChaCha8Rng) -> Self {
        let spectrum = hidden.spectrum();
        let n = hidden.n();
        let mut strings = Vec::with_capacity(spectrum.coefficients().len());
        let mut cumulative = Vec::with_capacity(spectrum.coefficients().len());
        let mut acc = 0.0;
        for (x, v) in spectrum.coefficients() {
            acc += v.norm_sqr();
            strings.push(x.clone());
            cumulative.push(acc);
        }
        let mass_by_support = spectrum.mass_by_support();
        UnitaryOracle {
            hidden,
            n,
            strings,
            cumulative,
            total_mass: acc,
            spectrum,
            mass_by_support,
            rng,
            ledger: QueryLedger::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hidden(&self) -> &Unitary {
        &self.hidden
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    /// Sample a Pauli string with probability `|Uhat(x)|^2`
    /// (one CJ-state preparation and Bell measurement).
    pub fn pauli_sample(&mut self) -> PauliString {
        self.ledger.simulated_u += 1;
        let r: f64 = self.rng.gen::<f64>() * self.total_mass;
        let idx = self.cumulative.partition_point(|&c| c < r);
        self.strings[idx.min(self.strings.len() - 1)].clone()
    }

    /// Bell outcome restricted to `subset`: all-identity, or the nontrivial
    /// restricted string.
    pub fn bell_outcome_on(&mut self, subset: &[usize]) -> Result<BellOutcome> {
        check_qubit_subset(self.n, subset)?;
        let x = self.pauli_sample();
        let restricted = x.restrict(subset);
        if restricted.is_identity() {
            Ok(BellOutcome::AllIdentity)
        } else {
            Ok(BellOutcome::Nontrivial(restricted))
        }
    }

    /// Measure the register pairs outside `subset` and post-select on the
    /// all-identity outcome, leaving a state on `k` retained pairs. Succeeds
    /// with probability `1 - Inf_{complement}`; the failure branch is an
    /// ordinary outcome reported as [`Error::PrepFailed`].
    pub fn conditional_post_state(
        &mut self,
        subset: &[usize],
        k: usize,
    ) -> Result<PostMeasurementState> {
        if self.conditional_prep_succeeds(subset, k)? {
            self.post_state_of(subset, k)
        } else {
            Err(Error::PrepFailed(
                "measurement on the traced-out pairs was not all-identity",
            ))
        }
    }

    /// One preparation attempt: charges a simulated query, draws the
    /// success Bernoulli, builds nothing.
    pub(crate) fn conditional_prep_succeeds(
        &mut self,
        subset: &[usize],
        k: usize,
    ) -> Result<bool> {
        check_qubit_subset(self.n, subset)?;
        if subset.len() > k {
            return Err(Error::InvalidParameter(format!(
                "retained set has {} qubits, more than k = {k}",
                subset.len()
            )));
        }
        self.ledger.simulated_u += 1;
        let p = self.true_success_probability(subset);
        Ok(self.rng.gen_bool(p.clamp(0.0, 1.0)))
    }

    /// The conditional state itself; deterministic, charges nothing.
    pub(crate) fn post_state_of(
        &self,
        subset: &[usize],
        k: usize,
    ) -> Result<PostMeasurementState> {
        let p = self.true_success_probability(subset);
        if p <= 0.0 {
            return Err(Error::PrepFailed(
                "the all-identity outcome has probability zero on this subset",
            ));
        }
        let alpha = 1.0 / p.sqrt();
        let mask = subset_mask(subset);
        let mut coefficients = BTreeMap::new();
        for (x, v) in self.spectrum.coefficients() {
            if x.support_mask() & !mask == 0 {
                let key = x.restrict(subset).pad_to(k);
                coefficients.insert(key, v * alpha);
            }
        }
        Ok(PostMeasurementState {
            k,
            retained: subset.to_vec(),
            coefficients,
        })
    }

    /// `Inf_subset` of the hidden unitary, for amplitude bookkeeping by the
    /// testing layer. Charges nothing; not part of the algorithm surface.
    pub(crate) fn true_influence(&self, subset: &[usize]) -> Result<f64> {
        check_qubit_subset(self.n, subset)?;
        Ok(self.influence_of_mask(subset_mask(subset)))
    }

    /// `1 - Inf_{complement of subset}`: the all-identity probability when
    /// measuring the pairs outside `subset`.
    pub(crate) fn true_success_probability(&self, subset: &[usize]) -> f64 {
        let full = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        let complement = full & !subset_mask(subset);
        (self.total_mass - self.influence_of_mask(complement)) / self.total_mass
    }

    fn influence_of_mask(&self, mask: u64) -> f64 {
        self.mass_by_support
            .iter()
            .filter(|(m, _)| m & mask != 0)
            .map(|(_, p)| p)
            .sum()
    }

    pub(crate) fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub(crate) fn charge_simulated_u(&mut self, count: u64) {
        self.ledger.simulated_u += count;
    }

    pub(crate) fn charge_modeled(&mut self, count: u64) {
        self.ledger.modeled_quantum += count;
    }
}
