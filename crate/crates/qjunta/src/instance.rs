//! On-disk instance format.
//!
//! Instances are single JSON objects tagged by `kind`; complex entries are
//! `[re, im]` pairs in row-major order:
//!
//! ```text
//! {"kind": "dense",   "n": 2, "entries": [[1.0, 0.0], ...]}
//! {"kind": "junta",   "n": 8, "support": [2, 5], "core": [[...], ...]}
//! {"kind": "boolean", "n": 3, "truth_table": "01101001"}
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolean::BooleanFunction;
use crate::unitary::{encode_boolean, haar_random_unitary, DenseUnitary, StructuredJunta, Unitary};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Instance {
    Dense {
        n: usize,
        entries: Vec<[f64; 2]>,
    },
    Junta {
        n: usize,
        support: Vec<usize>,
        core: Vec<[f64; 2]>,
    },
    Boolean {
        n: usize,
        truth_table: String,
    },
}

fn pack(m: &DMatrix<Complex64>) -> Vec<[f64; 2]> {
    let dim = m.nrows();
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = m[(i, j)];
            out.push([v.re, v.im]);
        }
    }
    out
}

fn unpack(entries: &[[f64; 2]], what: &str) -> Result<DMatrix<Complex64>> {
    let len = entries.len();
    let dim = (len as f64).sqrt().round() as usize;
    if dim * dim != len || dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidInstance(format!(
            "{what} has {len} entries, expected a squared power of two"
        )));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = entries[i * dim + j];
        Complex64::new(re, im)
    }))
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::Dense { n, .. } | Instance::Junta { n, .. } | Instance::Boolean { n, .. } => {
                *n
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Dense { .. } => "dense",
            Instance::Junta { .. } => "junta",
            Instance::Boolean { .. } => "boolean",
        }
    }

    /// Validate and build the runtime unitary.
    pub fn to_unitary(&self) -> Result<Unitary> {
        match self {
            Instance::Dense { n, entries } => {
                let m = unpack(entries, "dense instance")?;
                let u = DenseUnitary::new(m)?;
                if u.n() != *n {
                    return Err(Error::InvalidInstance(format!(
                        "entries describe {} qubits but n = {n}",
                        u.n()
                    )));
                }
                Ok(Unitary::Dense(u))
            }
            Instance::Junta { n, support, core } => {
                let m = unpack(core, "junta core")?;
                let core_u = DenseUnitary::new(m)?;
                Ok(Unitary::Junta(StructuredJunta::new(
                    *n,
                    support.clone(),
                    core_u,
                )?))
            }
            Instance::Boolean { n, truth_table } => {
                let f = BooleanFunction::from_truth_table(truth_table)?;
                if f.n() != *n {
                    return Err(Error::InvalidInstance(format!(
                        "truth table describes {} bits but n = {n}",
                        f.n()
                    )));
                }
                Ok(Unitary::Dense(encode_boolean(&f)?))
            }
        }
    }

    pub fn from_unitary(u: &Unitary) -> Instance {
        match u {
            Unitary::Dense(d) => Instance::Dense {
                n: d.n(),
                entries: pack(d.matrix()),
            },
            Unitary::Junta(j) => Instance::Junta {
                n: j.n(),
                support: j.support().to_vec(),
                core: pack(j.core().matrix()),
            },
        }
    }

    pub fn boolean(f: &BooleanFunction) -> Instance {
        Instance::Boolean {
            n: f.n(),
            truth_table: f.truth_table(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instances serialize")
    }

    pub fn from_json(s: &str) -> Result<Instance> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInstance(e.to_string()))
    }

    /// Haar core on a uniformly random `k`-subset of the `n` qubits.
    pub fn gen_junta(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<Instance> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!(
                "junta size must satisfy 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        crate::check_qubit_subset(n, &[])?;
        let mut support: Vec<usize> = sample(rng, n, k).into_iter().map(|i| i + 1).collect();
        support.sort_unstable();
        let core = haar_random_unitary(k, rng)?;
        let j = StructuredJunta::new(n, support, core)?;
        Ok(Instance::from_unitary(&Unitary::Junta(j)))
    }

    /// Haar-random dense unitary (cap applies).
    pub fn gen_dense(n: usize, rng: &mut ChaCha8Rng) -> Result<Instance> {
        let u = haar_random_unitary(n, rng)?;
        Ok(Instance::from_unitary(&Unitary::Dense(u)))
    }

    pub fn gen_boolean_parity(m: usize, n: usize) -> Result<Instance> {
        Ok(Instance::boolean(&BooleanFunction::parity(m, n)?))
    }

    pub fn gen_boolean_random(n: usize, rng: &mut ChaCha8Rng) -> Result<Instance> {
        Ok(Instance::boolean(&BooleanFunction::random(n, rng)?))
    }
}
