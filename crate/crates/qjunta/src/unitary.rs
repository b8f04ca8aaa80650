//! Dense and structured unitaries, distance, partial traces, Haar sampling.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::boolean::BooleanFunction;
use crate::spectrum::PauliSpectrum;
use crate::{check_qubit_subset, Error, Result};

/// Dense matrices are capped at this many qubits (`2^8 = 256` dimensions).
pub const DENSE_QUBIT_CAP: usize = 8;

/// Entrywise tolerance for the unitarity check `U^dag U = I`.
pub const UNITARITY_TOL: f64 = 1e-9;

/// A validated dense unitary on `n <= DENSE_QUBIT_CAP` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    n: usize,
    m: DMatrix<Complex64>,
}

impl DenseUnitary {
    /// Validate shape (square, power-of-two, within the cap) and unitarity.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "expected square matrix of power-of-two size, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = dim.trailing_zeros() as usize;
        if n > DENSE_QUBIT_CAP {
            return Err(Error::DenseCapExceeded {
                requested: n,
                cap: DENSE_QUBIT_CAP,
            });
        }
        let gram = m.adjoint() * &m;
        let mut deviation: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                deviation = deviation.max((gram[(i, j)] - expect).norm());
            }
        }
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: UNITARITY_TOL,
            });
        }
        Ok(DenseUnitary { n, m })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 || n > DENSE_QUBIT_CAP {
            return Err(Error::DenseCapExceeded {
                requested: n,
                cap: DENSE_QUBIT_CAP,
            });
        }
        Ok(DenseUnitary {
            n,
            m: DMatrix::identity(1 << n, 1 << n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn adjoint(&self) -> DenseUnitary {
        DenseUnitary {
            n: self.n,
            m: self.m.adjoint(),
        }
    }

    pub fn spectrum(&self) -> PauliSpectrum {
        PauliSpectrum::decompose(&self.m).expect("validated unitary decomposes")
    }

    /// Tensor product, `self` on the most significant qubits.
    pub fn kron(&self, other: &DenseUnitary) -> Result<DenseUnitary> {
        let n = self.n + other.n;
        if n > DENSE_QUBIT_CAP {
            return Err(Error::DenseCapExceeded {
                requested: n,
                cap: DENSE_QUBIT_CAP,
            });
        }
        Ok(DenseUnitary {
            n,
            m: self.m.kronecker(&other.m),
        })
    }

    /// Global-phase multiple `e^{i theta} U`.
    pub fn phased(&self, theta: f64) -> DenseUnitary {
        let phase = Complex64::from_polar(1.0, theta);
        DenseUnitary {
            n: self.n,
            m: self.m.map(|v| v * phase),
        }
    }
}

/// A unitary acting as `core` on `support` and as identity elsewhere.
/// `support` is strictly increasing and 1-based; factor `r` of the core
/// acts on qubit `support[r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredJunta {
    n: usize,
    support: Vec<usize>,
    core: DenseUnitary,
}

impl StructuredJunta {
    pub fn new(n: usize, support: Vec<usize>, core: DenseUnitary) -> Result<Self> {
        check_qubit_subset(n, &support)?;
        if support.len() != core.n() {
            return Err(Error::DimensionMismatch(format!(
                "support has {} qubits but core acts on {}",
                support.len(),
                core.n()
            )));
        }
        Ok(StructuredJunta { n, support, core })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn core(&self) -> &DenseUnitary {
        &self.core
    }

    /// Spectrum on all `n` qubits without materializing the dense matrix:
    /// the coefficient of `x` is the core coefficient of `x` restricted to
    /// the support when `x` is identity elsewhere, and zero otherwise.
    pub fn spectrum(&self) -> PauliSpectrum {
        let core_spec = self.core.spectrum();
        let coeffs = core_spec
            .coefficients()
            .iter()
            .map(|(x, v)| (x.embed(self.n, &self.support), *v));
        PauliSpectrum::from_coefficients(self.n, coeffs).expect("embedded strings have length n")
    }

    /// Dense expansion `V tensor I` re-ordered onto the support qubits.
    /// Only available within the dense cap.
    pub fn expand(&self) -> Result<DenseUnitary> {
        if self.n > DENSE_QUBIT_CAP {
            return Err(Error::DenseCapExceeded {
                requested: self.n,
                cap: DENSE_QUBIT_CAP,
            });
        }
        let dim = 1usize << self.n;
        let k = self.support.len();
        // Bit position (from the least significant end) of each support qubit.
        let shifts: Vec<usize> = self.support.iter().map(|&q| self.n - q).collect();
        let off_mask: u64 = {
            let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
            full & !shifts.iter().fold(0u64, |m, &s| m | (1u64 << s))
        };
        let gather = |idx: usize| -> usize {
            let mut out = 0usize;
            for &s in &shifts {
                out = (out << 1) | ((idx >> s) & 1);
            }
            out
        };
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let it = i as u64 & off_mask;
            let ic = gather(i);
            for jc in 0..1usize << k {
                // scatter the core column bits into the support positions
                let mut j = it as usize;
                for (r, &s) in shifts.iter().enumerate() {
                    j |= ((jc >> (k - 1 - r)) & 1) << s;
                }
                m[(i, j)] = self.core.matrix()[(ic, jc)];
            }
        }
        DenseUnitary::new(m)
    }
}

/// A hidden unitary in either representation.
#[derive(Clone, Debug)]
pub enum Unitary {
    Dense(DenseUnitary),
    Junta(StructuredJunta),
}

impl Unitary {
    pub fn n(&self) -> usize {
        match self {
            Unitary::Dense(u) => u.n(),
            Unitary::Junta(j) => j.n(),
        }
    }

    pub fn spectrum(&self) -> PauliSpectrum {
        match self {
            Unitary::Dense(u) => u.spectrum(),
            Unitary::Junta(j) => j.spectrum(),
        }
    }

    pub fn expand(&self) -> Result<DenseUnitary> {
        match self {
            Unitary::Dense(u) => Ok(u.clone()),
            Unitary::Junta(j) => j.expand(),
        }
    }

    /// Phase-invariant distance to another unitary on the same qubits.
    ///
    /// Pairs too wide for dense expansion are compared through their Pauli
    /// spectra: `tr(A^dag B) / 2^n` equals the Plancherel inner product of the
    /// coefficient maps, which stay sparse for juntas at any width.
    pub fn dist_to(&self, other: &Unitary) -> Result<f64> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compare a {}-qubit unitary with a {}-qubit one",
                self.n(),
                other.n()
            )));
        }
        if self.n() <= DENSE_QUBIT_CAP {
            return dist(&self.expand()?, &other.expand()?);
        }
        let a = self.spectrum();
        let b = other.spectrum();
        let mut inner = Complex64::new(0.0, 0.0);
        for (x, va) in a.coefficients() {
            if let Some(vb) = b.coefficients().get(x) {
                inner += va.conj() * vb;
            }
        }
        Ok((1.0 - inner.norm()).max(0.0).sqrt())
    }
}

/// Phase-invariant normalized Frobenius distance
/// `min_theta ||e^{i theta} A - B|| / sqrt(2 * 2^n)`, which closes to
/// `sqrt(1 - |tr(A^dag B)| / 2^n)` for unitaries.
///
/// # Example
///
/// ```
/// use qjunta::{dist, pauli_matrix, DenseUnitary};
///
/// let x = DenseUnitary::new(pauli_matrix(&"X".parse().unwrap())).unwrap();
/// let z = DenseUnitary::new(pauli_matrix(&"Z".parse().unwrap())).unwrap();
/// assert!((dist(&x, &z).unwrap() - 1.0).abs() < 1e-12);
/// assert!(dist(&x, &x).unwrap() < 1e-12);
/// ```
pub fn dist(a: &DenseUnitary, b: &DenseUnitary) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(format!(
            "unitaries on {} and {} qubits",
            a.n(),
            b.n()
        )));
    }
    let dim = a.dim() as f64;
    let mut t = Complex64::new(0.0, 0.0);
    for (x, y) in a.matrix().iter().zip(b.matrix().iter()) {
        t += x.conj() * y;
    }
    Ok((1.0 - t.norm() / dim).max(0.0).sqrt())
}

/// Partial trace over the qubits of `subset`; the output acts on the
/// remaining qubits in their original relative order and has dimension
/// `2^(n - |subset|)`. Implemented directly as
/// `sum_b (I (x) <b|) U (I (x) |b>)` over basis states `b` of the traced
/// qubits.
pub fn partial_trace(u: &DenseUnitary, subset: &[usize]) -> Result<DMatrix<Complex64>> {
    check_qubit_subset(u.n(), subset)?;
    Ok(partial_trace_matrix(u.matrix(), u.n(), subset))
}

pub(crate) fn partial_trace_matrix(
    m: &DMatrix<Complex64>,
    n: usize,
    subset: &[usize],
) -> DMatrix<Complex64> {
    let s = subset.len();
    let kept: Vec<usize> = (1..=n).filter(|q| !subset.contains(q)).collect();
    let kept_shifts: Vec<usize> = kept.iter().map(|&q| n - q).collect();
    let sub_shifts: Vec<usize> = subset.iter().map(|&q| n - q).collect();
    let out_dim = 1usize << kept.len();
    let scatter = |bits: usize, shifts: &[usize]| -> usize {
        let mut idx = 0usize;
        for (j, &sh) in shifts.iter().enumerate() {
            idx |= ((bits >> (shifts.len() - 1 - j)) & 1) << sh;
        }
        idx
    };
    let mut out = DMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        let rbase = scatter(r, &kept_shifts);
        for c in 0..out_dim {
            let cbase = scatter(c, &kept_shifts);
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..1usize << s {
                let off = scatter(b, &sub_shifts);
                acc += m[(rbase | off, cbase | off)];
            }
            out[(r, c)] = acc;
        }
    }
    out
}

/// Influence through partial traces:
/// `Inf_S[U] = 1 - tr( Tr_S(U^dag) Tr_S(U) ) / 2^(n + |S|)`.
/// An independent route to the same quantity as summing squared Pauli
/// coefficients that meet `S`.
pub fn influence_via_partial_trace(u: &DenseUnitary, subset: &[usize]) -> Result<f64> {
    check_qubit_subset(u.n(), subset)?;
    let t_u = partial_trace_matrix(u.matrix(), u.n(), subset);
    let t_udag = partial_trace_matrix(&u.matrix().adjoint(), u.n(), subset);
    let dim = t_u.nrows();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            tr += t_udag[(i, j)] * t_u[(j, i)];
        }
    }
    let norm = (1u64 << (u.n() + subset.len())) as f64;
    Ok(1.0 - tr.re / norm)
}

/// Diagonal sign unitary `U_f = diag((-1)^{f(x)})`.
pub fn encode_boolean(f: &BooleanFunction) -> Result<DenseUnitary> {
    if f.n() > DENSE_QUBIT_CAP {
        return Err(Error::DenseCapExceeded {
            requested: f.n(),
            cap: DENSE_QUBIT_CAP,
        });
    }
    let dim = 1usize << f.n();
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        m[(x, x)] = Complex64::new(if f.eval(x) { -1.0 } else { 1.0 }, 0.0);
    }
    DenseUnitary::new(m)
}

/// Haar-distributed random unitary on `k` qubits: complex Gaussian matrix,
/// QR decomposition, then the R diagonal phases folded into Q so the
/// distribution is exactly Haar rather than QR-convention dependent.
pub fn haar_random_unitary(k: usize, rng: &mut ChaCha8Rng) -> Result<DenseUnitary> {
    if k == 0 || k > DENSE_QUBIT_CAP {
        return Err(Error::DenseCapExceeded {
            requested: k,
            cap: DENSE_QUBIT_CAP,
        });
    }
    let dim = 1usize << k;
    let ginibre = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = ginibre.qr();
    let q = qr.q();
    let r = qr.r();
    let mut m = q;
    for j in 0..dim {
        let rjj = r[(j, j)];
        let lambda = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            m[(i, j)] *= lambda;
        }
    }
    DenseUnitary::new(m)
}

/// Standard normal via Box-Muller on the caller's stream.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
