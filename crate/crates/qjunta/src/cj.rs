//! Choi–Jamiolkowski states of unitaries.
//!
//! `|v(U)> = 2^{-n/2} sum_{i,j} U[i,j] |i>|j>` on `2n` qubits. Inner
//! products of CJ states reproduce normalized trace inner products,
//! `<v(U)|v(W)> = tr(U^dag W) / 2^n`, so the phase-invariant unitary
//! distance becomes a state overlap. A Bell measurement of the two
//! registers lands on outcome `x` with probability `|Uhat(x)|^2`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::unitary::{DenseUnitary, Unitary};
use crate::Result;

/// A pure state on `2n` qubits in the `|i>|j>` product basis
/// (amplitude of `|i>|j>` at index `i * 2^n + j`).
#[derive(Clone, Debug, PartialEq)]
pub struct CJState {
    n: usize,
    amplitudes: DVector<Complex64>,
}

impl CJState {
    /// CJ state of a dense unitary.
    ///
    /// # Example
    ///
    /// ```
    /// use qjunta::{pauli_matrix, CJState, DenseUnitary};
    ///
    /// let x = DenseUnitary::new(pauli_matrix(&"X".parse().unwrap())).unwrap();
    /// let v = CJState::of_unitary(&x);
    /// // (|01> + |10>) / sqrt(2)
    /// let s = std::f64::consts::FRAC_1_SQRT_2;
    /// assert!((v.amplitudes()[1].re - s).abs() < 1e-12);
    /// assert!((v.amplitudes()[2].re - s).abs() < 1e-12);
    /// assert!(v.amplitudes()[0].norm() < 1e-12);
    /// ```
    pub fn of_unitary(u: &DenseUnitary) -> CJState {
        let dim = u.dim();
        let scale = 1.0 / (dim as f64).sqrt();
        let mut amplitudes = DVector::zeros(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                amplitudes[i * dim + j] = u.matrix()[(i, j)] * scale;
            }
        }
        CJState { n: u.n(), amplitudes }
    }

    /// From raw amplitudes on `2n` qubits (length `4^n`); normalizes.
    pub fn from_amplitudes(n: usize, amplitudes: DVector<Complex64>) -> Result<CJState> {
        let expect = 1usize << (2 * n);
        if amplitudes.len() != expect {
            return Err(crate::Error::DimensionMismatch(format!(
                "state on 2*{n} qubits needs {expect} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(crate::Error::InvalidParameter(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(CJState {
            n,
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    /// Half-register qubit count `n` (the state lives on `2n` qubits).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn inner(&self, other: &CJState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(crate::Error::DimensionMismatch(format!(
                "states on 2*{} and 2*{} qubits",
                self.n, other.n
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.amplitudes.iter().zip(other.amplitudes.iter()) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    pub fn fidelity(&self, other: &CJState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Phase-invariant distance through overlaps:
    /// `sqrt(1 - |<self|other>|)`. For CJ states of unitaries this equals
    /// the unitary distance.
    pub fn dist_to(&self, other: &CJState) -> Result<f64> {
        Ok((1.0 - self.inner(other)?.norm()).max(0.0).sqrt())
    }
}

/// CJ state of a dense or structured unitary (expands the junta, so the
/// dense cap applies).
pub fn cj_state(u: &Unitary) -> Result<CJState> {
    Ok(CJState::of_unitary(&u.expand()?))
}
