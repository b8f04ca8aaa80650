//! Boolean functions given by explicit truth tables.

use rand::Rng;

use crate::{Error, Result};

/// Cap on truth-table arguments; tables are stored densely.
const MAX_BOOLEAN_BITS: usize = 24;

/// A function `{0,1}^n -> {0,1}` stored as a dense truth table.
///
/// Input `x` is the basis index with bit `x_1` most significant, matching
/// the qubit convention used everywhere else, so `eval(i)` is the diagonal
/// position `i` of the encoded sign unitary.
///
/// # Example
///
/// ```
/// use qjunta::BooleanFunction;
///
/// let parity = BooleanFunction::parity(3, 3).unwrap();
/// assert_eq!(parity.truth_table(), "01101001");
/// assert!(!parity.eval(0b110));
/// assert!(parity.eval(0b100));
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanFunction {
    n: usize,
    bits: Vec<bool>,
}

impl BooleanFunction {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self> {
        if n == 0 || n > MAX_BOOLEAN_BITS {
            return Err(Error::InvalidParameter(format!(
                "boolean arity must be in 1..={MAX_BOOLEAN_BITS}, got {n}"
            )));
        }
        if bits.len() != 1usize << n {
            return Err(Error::InvalidInstance(format!(
                "truth table has {} entries, expected {}",
                bits.len(),
                1usize << n
            )));
        }
        Ok(BooleanFunction { n, bits })
    }

    /// Parse a `"0101..."` table; the length fixes `n`.
    pub fn from_truth_table(table: &str) -> Result<Self> {
        let bits = table
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInstance(format!(
                    "truth table must be 0/1 characters, saw `{other}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if !bits.len().is_power_of_two() || bits.len() < 2 {
            return Err(Error::InvalidInstance(format!(
                "truth table length {} is not a power of two >= 2",
                bits.len()
            )));
        }
        let n = bits.len().trailing_zeros() as usize;
        BooleanFunction::new(n, bits)
    }

    /// Parity of the first `m` input bits (the most significant `m`).
    pub fn parity(m: usize, n: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidParameter(format!(
                "parity needs 1 <= m <= n, got m = {m}, n = {n}"
            )));
        }
        let bits = (0..1usize << n)
            .map(|x| ((x >> (n - m)).count_ones() & 1) == 1)
            .collect();
        BooleanFunction::new(n, bits)
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        BooleanFunction::new(n, vec![value; 1usize << n])
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self> {
        let bits = (0..1usize << n).map(|_| rng.gen::<bool>()).collect();
        BooleanFunction::new(n, bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: usize) -> bool {
        self.bits[x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn truth_table(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Fraction of inputs where the two functions disagree.
    pub fn fraction_disagree(&self, other: &BooleanFunction) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "boolean functions on {} and {} bits",
                self.n, other.n
            )));
        }
        let diff = self
            .bits
            .iter()
            .zip(other.bits.iter())
            .filter(|(a, b)| a != b)
            .count();
        Ok(diff as f64 / self.bits.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::rng;

    #[test]
    fn parity_three_matches_hand_table() {
        let p = BooleanFunction::parity(3, 3).unwrap();
        assert_eq!(p.truth_table(), "01101001");
    }

    #[test]
    fn parity_on_leading_bits_ignores_the_rest() {
        let p = BooleanFunction::parity(2, 3).unwrap();
        // f(x1 x2 x3) = x1 xor x2; table indexed 000..111.
        assert_eq!(p.truth_table(), "00111100");
    }

    #[test]
    fn truth_table_round_trip() {
        let f = BooleanFunction::from_truth_table("0110").unwrap();
        assert_eq!(f.n(), 2);
        assert_eq!(f.truth_table(), "0110");
        assert!(BooleanFunction::from_truth_table("011").is_err());
        assert!(BooleanFunction::from_truth_table("01a0").is_err());
    }

    #[test]
    fn disagreement_fraction() {
        let f = BooleanFunction::parity(2, 2).unwrap();
        let g = BooleanFunction::constant(2, false).unwrap();
        assert_eq!(f.fraction_disagree(&g).unwrap(), 0.5);
        assert_eq!(f.fraction_disagree(&f).unwrap(), 0.0);
    }

    #[test]
    fn random_table_is_deterministic_per_seed() {
        let a = BooleanFunction::random(4, &mut rng(9)).unwrap();
        let b = BooleanFunction::random(4, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }
}
