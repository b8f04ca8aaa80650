//! Independent brute-force checks.
//!
//! Everything here recomputes quantities the fast paths obtain through the
//! Pauli spectrum, but by a different route: influences by explicit trace
//! inner products over all Pauli matrices, distances by grid minimization
//! over the global phase, Boolean junta distances by exhaustive majority
//! completion. The two routes are compared in tests and in the acceptance
//! suite; neither is derived from the other.

use num_complex::Complex64;

use crate::boolean::BooleanFunction;
use crate::pauli::PauliString;
use crate::unitary::{dist, encode_boolean, DenseUnitary, StructuredJunta};
use crate::{check_qubit_subset, subset_mask, Error, Result};

/// Influence by direct trace inner products: for every Pauli string `x`,
/// the coefficient is `Tr(sigma_x U) / 2^n`, computed entrywise without
/// the fast transform; sums squared magnitudes over strings meeting
/// `subset`.
pub fn exact_influence(u: &DenseUnitary, subset: &[usize]) -> Result<f64> {
    let n = u.n();
    check_qubit_subset(n, subset)?;
    let mask = subset_mask(subset);
    let dim = u.dim();
    let m = u.matrix();
    let mut total = 0.0;
    for code in 0..(1usize << (2 * n)) {
        let x = PauliString::from_code(n, code);
        if x.support_mask() & mask == 0 {
            continue;
        }
        // sigma_x has one nonzero per row, so Tr(sigma_x U) walks rows.
        let mut tr = Complex64::new(0.0, 0.0);
        for row in 0..dim {
            let mut col = 0usize;
            let mut phase = Complex64::new(1.0, 0.0);
            for q in 1..=n {
                let row_bit = ((row >> (n - q)) & 1) as u8;
                let (col_bit, entry) = x.letter(q).action(row_bit);
                col = (col << 1) | col_bit as usize;
                phase *= entry;
            }
            tr += phase * m[(col, row)];
        }
        total += (tr / dim as f64).norm_sqr();
    }
    Ok(total)
}

/// Distance by minimizing the entrywise normalized Frobenius norm
/// `sqrt(sum |a_ij - e^{i theta} b_ij|^2 / (2 dim))` over a phase grid,
/// then refining the best bracket by golden-section search. Never uses the
/// trace shortcut.
pub fn dist_grid(a: &DenseUnitary, b: &DenseUnitary, grid: usize) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compare unitaries on {} and {} qubits",
            a.n(),
            b.n()
        )));
    }
    if grid < 8 {
        return Err(Error::InvalidParameter(
            "phase grid needs at least 8 points".into(),
        ));
    }
    let ma = a.matrix();
    let mb = b.matrix();
    let dim = a.dim() as f64;
    let objective = |theta: f64| -> f64 {
        let rot = Complex64::from_polar(1.0, theta);
        let mut acc = 0.0;
        for (x, y) in ma.iter().zip(mb.iter()) {
            acc += (x - rot * y).norm_sqr();
        }
        (acc / (2.0 * dim)).max(0.0).sqrt()
    };

    let step = std::f64::consts::TAU / grid as f64;
    let mut best_idx = 0;
    let mut best = f64::INFINITY;
    for i in 0..grid {
        let value = objective(i as f64 * step);
        if value < best {
            best = value;
            best_idx = i;
        }
    }
    // Golden-section refinement inside the neighboring grid cells.
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = (best_idx as f64 - 1.0) * step;
    let mut hi = (best_idx as f64 + 1.0) * step;
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while hi - lo > 1e-12 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = objective(x2);
        }
    }
    Ok(best.min(f1).min(f2))
}

/// Fraction of inputs where `f` and `g` disagree.
pub fn boolean_distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<f64> {
    f.fraction_disagree(g)
}

fn masks_of_weight(n: usize, k: usize) -> impl Iterator<Item = u32> {
    (0u32..1 << n).filter(move |m| m.count_ones() as usize == k)
}

/// Distance from `f` to the nearest Boolean function depending on at most
/// `k` variables, by exhausting variable subsets and taking the majority
/// value on every restriction class.
pub fn distance_to_boolean_juntas(f: &BooleanFunction, k: usize) -> Result<f64> {
    let n = f.n();
    if k >= n {
        return Ok(0.0);
    }
    let size = 1usize << n;
    let mut best = f64::INFINITY;
    for mask in masks_of_weight(n, k) {
        // Qubit q corresponds to input bit n - q (most significant first).
        let positions: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
        let mut ones = vec![0u32; 1 << k];
        let mut totals = vec![0u32; 1 << k];
        for x in 0..size {
            let mut class = 0usize;
            for (i, b) in positions.iter().enumerate() {
                class |= ((x >> b) & 1) << i;
            }
            totals[class] += 1;
            if f.eval(x) {
                ones[class] += 1;
            }
        }
        let mismatches: u32 = ones
            .iter()
            .zip(totals.iter())
            .map(|(&o, &t)| o.min(t - o))
            .sum();
        best = best.min(mismatches as f64 / size as f64);
    }
    Ok(best)
}

fn sign(b: bool) -> f64 {
    if b {
        -1.0
    } else {
        1.0
    }
}

/// `dist(U_f, U_g)` for diagonal sign encodings, entirely via the
/// definition on truth tables.
fn encoded_distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<f64> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch(
            "functions have different arities".into(),
        ));
    }
    let size = 1usize << f.n();
    let mut tr = 0.0;
    for x in 0..size {
        tr += sign(f.eval(x)) * sign(g.eval(x));
    }
    Ok((1.0 - (tr.abs() / size as f64)).max(0.0).sqrt())
}

/// Exhaustive enumerations below walk all `2^(2^k)` truth tables.
fn check_enumerable(k: usize) -> Result<()> {
    if k > 4 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive junta enumeration is limited to k <= 4, got {k}"
        )));
    }
    Ok(())
}

/// Enumerate every Boolean function of at most `k` of the `n` variables.
fn all_boolean_juntas(n: usize, k: usize) -> Vec<BooleanFunction> {
    let mut out = Vec::new();
    let k = k.min(n);
    for mask in masks_of_weight(n, k) {
        let positions: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
        for table in 0u64..1 << (1 << k) {
            let mut bits = Vec::with_capacity(1 << n);
            for x in 0..1usize << n {
                let mut class = 0usize;
                for (i, b) in positions.iter().enumerate() {
                    class |= ((x >> b) & 1) << i;
                }
                bits.push(table >> class & 1 == 1);
            }
            out.push(BooleanFunction::new(n, bits).expect("table sized to n"));
        }
    }
    out
}

/// Minimum encoded distance from `U_f` to any Boolean `k`-junta encoding.
pub fn min_distance_to_encoded_juntas(f: &BooleanFunction, k: usize) -> Result<f64> {
    check_enumerable(k)?;
    let mut best = f64::INFINITY;
    for g in all_boolean_juntas(f.n(), k) {
        best = best.min(encoded_distance(f, &g)?);
    }
    Ok(best)
}

/// The encoding identity `dist(U_f, U_g)^2 = 2 min(Pr[f != g], Pr[f = g])`.
pub fn check_encoding_distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<bool> {
    let lhs = {
        let uf = encode_boolean(f)?;
        let ug = encode_boolean(g)?;
        dist(&uf, &ug)?.powi(2)
    };
    let p_neq = boolean_distance(f, g)?;
    let rhs = 2.0 * p_neq.min(1.0 - p_neq);
    Ok((lhs - rhs).abs() <= 1e-9)
}

/// Far Boolean functions stay far after encoding: if `f` is `eps`-far from
/// every Boolean `k`-junta, then `U_f` is at distance at least
/// `sqrt(2 eps)` from every encoded Boolean `k`-junta.
pub fn check_lb_no_case(f: &BooleanFunction, k: usize, eps: f64) -> Result<bool> {
    let boolean_far = distance_to_boolean_juntas(f, k)?;
    if boolean_far + 1e-12 < eps {
        return Err(Error::InvalidParameter(format!(
            "f is only {boolean_far}-far from Boolean {k}-juntas, not {eps}-far"
        )));
    }
    let quantum_far = min_distance_to_encoded_juntas(f, k)?;
    Ok(quantum_far >= (2.0 * eps).sqrt() - 1e-9)
}

/// Nearest-Boolean structure of quantum juntas: the best Boolean match to
/// a junta `V` with core on support `T` can be taken to be a junta on the
/// same `T`, namely the encoding of the core's nearest Boolean function.
/// Checks `dist(V, U_gtilde) <= dist(V, U_f) + 1e-9` for the given `f`.
pub fn check_structural_lemma(junta: &StructuredJunta, f: &BooleanFunction) -> Result<bool> {
    let n = junta.n();
    if f.n() != n {
        return Err(Error::DimensionMismatch(
            "junta and function sizes differ".into(),
        ));
    }
    let k = junta.support().len();
    check_enumerable(k)?;
    let v = junta.expand()?;
    let uf = encode_boolean(f)?;
    let candidate_dist = dist(&v, &uf)?;

    let core = junta.core();
    let mut best = f64::INFINITY;
    for table in 0u64..1 << (1 << k) {
        let bits: Vec<bool> = (0..1u64 << k).map(|x| table >> x & 1 == 1).collect();
        let h = BooleanFunction::new(k, bits)?;
        let uh = encode_boolean(&h)?;
        let d = dist(core, &uh)?;
        if d < best {
            best = d;
        }
    }
    // Embedding the nearest core match on the junta's own support leaves
    // the distance unchanged: off-support factors are identity on both
    // sides.
    Ok(best <= candidate_dist + 1e-9)
}

/// Influence floor for far unitaries: if `U` is `eps`-far from every
/// quantum `k`-junta then every complement of at most `k` qubits keeps
/// influence at least `eps^2 / 4`. Checked exhaustively over subsets via
/// the trace-route influence.
pub fn check_wang_lemma(u: &DenseUnitary, k: usize, eps: f64) -> Result<bool> {
    let n = u.n();
    let floor = eps * eps / 4.0 - 1e-9;
    for mask in 0u32..1 << n {
        if (mask.count_ones() as usize) > k {
            continue;
        }
        let complement: Vec<usize> = (1..=n).filter(|q| mask >> (q - 1) & 1 == 0).collect();
        if exact_influence(u, &complement)? < floor {
            return Ok(false);
        }
    }
    Ok(true)
}
