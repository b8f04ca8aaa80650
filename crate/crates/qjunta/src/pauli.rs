//! Pauli letters, Pauli strings and their dense matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// One single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [
        PauliLetter::I,
        PauliLetter::X,
        PauliLetter::Y,
        PauliLetter::Z,
    ];

    pub fn is_identity(self) -> bool {
        self == PauliLetter::I
    }

    /// Action on a basis bit: the column bit and the matrix entry at
    /// `(row_bit, col_bit)`. Every Pauli has exactly one nonzero per row.
    pub(crate) fn action(self, row_bit: u8) -> (u8, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        match self {
            PauliLetter::I => (row_bit, one),
            PauliLetter::X => (1 - row_bit, one),
            PauliLetter::Y => {
                // Y = [[0, -i], [i, 0]]
                if row_bit == 0 {
                    (1, Complex64::new(0.0, -1.0))
                } else {
                    (0, Complex64::new(0.0, 1.0))
                }
            }
            PauliLetter::Z => {
                if row_bit == 0 {
                    (0, one)
                } else {
                    (1, -one)
                }
            }
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// A tensor product of Pauli letters; index 0 is qubit 1, the most
/// significant tensor factor.
///
/// # Example
///
/// ```
/// use qjunta::{PauliLetter, PauliString};
///
/// let zx: PauliString = "ZX".parse().unwrap();
/// assert_eq!(zx.letter(1), PauliLetter::Z);
/// assert_eq!(zx.support(), vec![1, 2]);
/// assert!(!zx.is_identity());
/// ```
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<PauliLetter>);

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>) -> Self {
        PauliString(letters)
    }

    pub fn identity(n: usize) -> Self {
        PauliString(vec![PauliLetter::I; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letter acting on 1-based qubit `q`.
    pub fn letter(&self, q: usize) -> PauliLetter {
        self.0[q - 1]
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|l| l.is_identity())
    }

    /// 1-based qubits on which the string acts nontrivially.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_identity())
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Support as a bit mask (bit `q - 1` for qubit `q`).
    pub fn support_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_identity())
            .fold(0u64, |m, (i, _)| m | (1u64 << i))
    }

    /// True iff some nontrivial letter sits on a qubit of `mask`.
    pub fn intersects_mask(&self, mask: u64) -> bool {
        self.support_mask() & mask != 0
    }

    /// Restriction to the qubits of `subset` (strictly increasing, 1-based),
    /// keeping their relative order.
    pub fn restrict(&self, subset: &[usize]) -> PauliString {
        PauliString(subset.iter().map(|&q| self.0[q - 1]).collect())
    }

    /// Embed into `n` qubits, placing letter `r` on qubit `positions[r]`
    /// and identity elsewhere.
    pub fn embed(&self, n: usize, positions: &[usize]) -> PauliString {
        debug_assert_eq!(self.len(), positions.len());
        let mut letters = vec![PauliLetter::I; n];
        for (&q, &l) in positions.iter().zip(self.0.iter()) {
            letters[q - 1] = l;
        }
        PauliString(letters)
    }

    /// Append identity letters up to length `n`.
    pub fn pad_to(&self, n: usize) -> PauliString {
        let mut letters = self.0.clone();
        letters.resize(n, PauliLetter::I);
        PauliString(letters)
    }

    /// Enumerate all `4^n` strings on `n` qubits in lexicographic order
    /// (qubit 1 varies slowest, letter order I, X, Y, Z).
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        let total = 1usize << (2 * n);
        (0..total).map(move |code| PauliString::from_code(n, code))
    }

    /// Base-4 code with qubit 1 as the most significant digit
    /// (I=0, X=1, Y=2, Z=3).
    pub fn from_code(n: usize, code: usize) -> PauliString {
        let mut letters = vec![PauliLetter::I; n];
        let mut c = code;
        for q in (0..n).rev() {
            letters[q] = PauliLetter::ALL[c & 3];
            c >>= 2;
        }
        PauliString(letters)
    }

    pub fn code(&self) -> usize {
        self.0.iter().fold(0usize, |c, &l| (c << 2) | l as usize)
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'I' => Ok(PauliLetter::I),
                'X' => Ok(PauliLetter::X),
                'Y' => Ok(PauliLetter::Y),
                'Z' => Ok(PauliLetter::Z),
                other => Err(Error::InvalidParameter(format!(
                    "invalid Pauli letter `{other}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

/// Dense `2^n x 2^n` matrix of a Pauli string. Each row has exactly one
/// nonzero entry, so the build is `O(4^n)` overall.
///
/// # Example
///
/// ```
/// use qjunta::pauli_matrix;
///
/// let xi = pauli_matrix(&"XI".parse().unwrap());
/// // X on the most significant qubit swaps the two 2x2 blocks.
/// assert_eq!(xi[(0, 2)].re, 1.0);
/// assert_eq!(xi[(2, 0)].re, 1.0);
/// assert_eq!(xi[(0, 0)].re, 0.0);
/// ```
pub fn pauli_matrix(x: &PauliString) -> DMatrix<Complex64> {
    let n = x.len();
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for row in 0..dim {
        let mut col = 0usize;
        let mut phase = Complex64::new(1.0, 0.0);
        for q in 1..=n {
            let row_bit = ((row >> (n - q)) & 1) as u8;
            let (col_bit, entry) = x.letter(q).action(row_bit);
            col = (col << 1) | col_bit as usize;
            phase *= entry;
        }
        m[(row, col)] = phase;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_letter_matrices() {
        let x = pauli_matrix(&"X".parse().unwrap());
        assert_eq!(x[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(x[(1, 0)], Complex64::new(1.0, 0.0));
        let y = pauli_matrix(&"Y".parse().unwrap());
        assert_eq!(y[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], Complex64::new(0.0, 1.0));
        let z = pauli_matrix(&"Z".parse().unwrap());
        assert_eq!(z[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(z[(1, 1)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn strings_are_self_adjoint_and_unitary() {
        for s in PauliString::all(3) {
            let m = pauli_matrix(&s);
            let prod = &m * m.adjoint();
            for i in 0..8 {
                for j in 0..8 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tensor_order_puts_qubit_one_most_significant() {
        // XI must swap the upper and lower 2x2 blocks, leaving bit 2 alone.
        let xi = pauli_matrix(&"XI".parse().unwrap());
        for (r, c) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
            assert_eq!(xi[(r, c)], Complex64::new(1.0, 0.0));
        }
        // IX acts on the least significant bit.
        let ix = pauli_matrix(&"IX".parse().unwrap());
        for (r, c) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            assert_eq!(ix[(r, c)], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn code_round_trip() {
        for s in PauliString::all(4) {
            assert_eq!(PauliString::from_code(4, s.code()), s);
        }
    }

    #[test]
    fn restrict_and_embed() {
        let s: PauliString = "IZXI".parse().unwrap();
        assert_eq!(s.support(), vec![2, 3]);
        let r = s.restrict(&[2, 3]);
        assert_eq!(r.to_string(), "ZX");
        let back = r.embed(4, &[2, 3]);
        assert_eq!(back, s);
        assert_eq!(r.pad_to(4).to_string(), "ZXII");
    }

    #[test]
    fn support_mask_matches_support() {
        let s: PauliString = "XIIZ".parse().unwrap();
        assert_eq!(s.support_mask(), 0b1001);
        assert!(s.intersects_mask(0b0001));
        assert!(!s.intersects_mask(0b0110));
    }
}
