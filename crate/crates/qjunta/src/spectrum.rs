//! Pauli spectra: sparse coefficient maps over Pauli strings.
//!
//! Every `2^n x 2^n` matrix `A` expands uniquely as
//! `A = sum_x Ahat(x) sigma_x` with `Ahat(x) = tr(sigma_x A) / 2^n`.
//! For a unitary the squared coefficients form a probability distribution
//! (Parseval), which is exactly the outcome distribution of a Bell
//! measurement on the Choi–Jamiolkowski state.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::PauliString;
use crate::{check_qubit_subset, subset_mask, Error, Result};

/// Coefficients below this magnitude are dropped when building a spectrum;
/// the discarded squared mass is far below every tolerance used here.
const PRUNE_EPS: f64 = 1e-12;

/// Sparse Pauli coefficient map of an `n`-qubit operator.
///
/// # Example
///
/// ```
/// use qjunta::{PauliSpectrum, pauli_matrix};
///
/// let s = PauliSpectrum::decompose(&pauli_matrix(&"ZI".parse().unwrap())).unwrap();
/// assert_eq!(s.coefficients().len(), 1);
/// assert!((s.coefficient(&"ZI".parse().unwrap()).re - 1.0).abs() < 1e-12);
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSpectrum {
    n: usize,
    coeffs: BTreeMap<PauliString, Complex64>,
}

impl PauliSpectrum {
    /// Build from explicit coefficients, dropping near-zero entries.
    pub fn from_coefficients(
        n: usize,
        coeffs: impl IntoIterator<Item = (PauliString, Complex64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, v) in coeffs {
            if x.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient string {x} has length {}, expected {n}",
                    x.len()
                )));
            }
            if v.norm() > PRUNE_EPS {
                map.insert(x, v);
            }
        }
        Ok(PauliSpectrum { n, coeffs: map })
    }

    /// Exact Pauli decomposition of a square matrix of power-of-two size.
    ///
    /// Splits the matrix into 2x2 blocks over the most significant qubit and
    /// recurses, `O(4^n log 2^n)` instead of the naive `O(16^n)`.
    pub fn decompose(m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "expected square matrix of power-of-two size, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = dim.trailing_zeros() as usize;
        let flat = transform(m);
        let mut coeffs = BTreeMap::new();
        for (code, v) in flat.into_iter().enumerate() {
            if v.norm() > PRUNE_EPS {
                coeffs.insert(PauliString::from_code(n, code), v);
            }
        }
        Ok(PauliSpectrum { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &BTreeMap<PauliString, Complex64> {
        &self.coeffs
    }

    /// Coefficient of `x`, zero when absent.
    pub fn coefficient(&self, x: &PauliString) -> Complex64 {
        self.coeffs
            .get(x)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// `sum_x |Ahat(x)|^2`; equals 1 for unitaries (Parseval).
    pub fn total_weight(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm_sqr()).sum()
    }

    /// Plancherel inner product `sum_x conj(Ahat(x)) Bhat(x)`,
    /// which equals `tr(A^dag B) / 2^n`.
    pub fn plancherel_inner(&self, other: &PauliSpectrum) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "spectra over {} and {} qubits",
                self.n, other.n
            )));
        }
        // Iterate the sparser side; absent coefficients are zero.
        let mut acc = Complex64::new(0.0, 0.0);
        if self.coeffs.len() <= other.coeffs.len() {
            for (x, a) in &self.coeffs {
                acc += a.conj() * other.coefficient(x);
            }
        } else {
            for (x, b) in &other.coeffs {
                acc += self.coefficient(x).conj() * b;
            }
        }
        Ok(acc)
    }

    /// Rebuild the dense matrix `sum_x Ahat(x) sigma_x`.
    /// `O(#coefficients * 2^n)` since every Pauli has one nonzero per row.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for (x, v) in &self.coeffs {
            for row in 0..dim {
                let mut col = 0usize;
                let mut phase = Complex64::new(1.0, 0.0);
                for q in 1..=self.n {
                    let row_bit = ((row >> (self.n - q)) & 1) as u8;
                    let (col_bit, entry) = x.letter(q).action(row_bit);
                    col = (col << 1) | col_bit as usize;
                    phase *= entry;
                }
                m[(row, col)] += v * phase;
            }
        }
        m
    }

    /// Influence of the qubit set `subset`:
    /// `sum over x meeting subset of |Ahat(x)|^2`.
    pub fn influence(&self, subset: &[usize]) -> Result<f64> {
        check_qubit_subset(self.n, subset)?;
        Ok(self.influence_of_mask(subset_mask(subset)))
    }

    /// Influence of the complement of `subset`.
    pub fn influence_complement(&self, subset: &[usize]) -> Result<f64> {
        check_qubit_subset(self.n, subset)?;
        let full = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        Ok(self.influence_of_mask(full & !subset_mask(subset)))
    }

    pub(crate) fn influence_of_mask(&self, mask: u64) -> f64 {
        self.coeffs
            .iter()
            .filter(|(x, _)| x.intersects_mask(mask))
            .map(|(_, v)| v.norm_sqr())
            .sum()
    }

    /// Squared-coefficient mass grouped by support mask. Juntas and other
    /// structured operators have few distinct supports, so influence queries
    /// against this table are much cheaper than a full scan.
    pub fn mass_by_support(&self) -> Vec<(u64, f64)> {
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for (x, v) in &self.coeffs {
            *acc.entry(x.support_mask()).or_insert(0.0) += v.norm_sqr();
        }
        acc.into_iter().collect()
    }

    /// Derivative with respect to qubit `q`: keeps exactly the terms whose
    /// letter on `q` is nontrivial. The squared mass of the result is the
    /// single-qubit influence of `q`.
    pub fn derivative(&self, q: usize) -> Result<PauliSpectrum> {
        if q == 0 || q > self.n {
            return Err(Error::QubitOutOfRange { index: q, n: self.n });
        }
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(x, _)| !x.letter(q).is_identity())
            .map(|(x, v)| (x.clone(), *v))
            .collect();
        Ok(PauliSpectrum { n: self.n, coeffs })
    }
}

fn transform(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let dim = m.nrows();
    if dim == 1 {
        return vec![m[(0, 0)]];
    }
    let h = dim / 2;
    let a = m.view((0, 0), (h, h));
    let b = m.view((0, h), (h, h));
    let c = m.view((h, 0), (h, h));
    let d = m.view((h, h), (h, h));
    let half = Complex64::new(0.5, 0.0);
    let ihalf = Complex64::new(0.0, 0.5);
    // 2x2 block decomposition over the leading qubit:
    // I: (A+D)/2, X: (B+C)/2, Y: i(B-C)/2, Z: (A-D)/2.
    let mut out = Vec::with_capacity(dim * dim);
    out.extend(transform(&((a + d) * half)));
    out.extend(transform(&((b + c) * half)));
    out.extend(transform(&((b - c) * ihalf)));
    out.extend(transform(&((a - d) * half)));
    out
}
