//! Shared fixtures for unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mat_close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    a.nrows() == b.nrows()
        && a.ncols() == b.ncols()
        && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> DMatrix<Complex64> {
    assert_eq!(entries.len(), rows * cols);
    DMatrix::from_row_slice(
        rows,
        cols,
        &entries
            .iter()
            .map(|&r| Complex64::new(r, 0.0))
            .collect::<Vec<_>>(),
    )
}

/// CNOT with control on qubit 1 (the most significant factor).
pub fn cnot() -> DMatrix<Complex64> {
    real_matrix(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

pub fn hadamard() -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    real_matrix(2, 2, &[s, s, s, -s])
}
