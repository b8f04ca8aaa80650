//! Named invariant sweeps behind the `verify` subcommand.
//!
//! Each check gets its own cipher stream (suites use disjoint stream
//! ranges), so `--suite all` reproduces the standalone suites byte for
//! byte and check order never matters.

use qjunta::boolean::BooleanFunction;
use qjunta::learning::{junta_learner, LearnerParams, TomographyBackend, DEFAULT_C_L, DEFAULT_C_T};
use qjunta::testing::{
    amplification_budget, amplified_bernoulli, quantum_ggt, GgtDecision, DEFAULT_C_AA,
    DEFAULT_C_GGT,
};
use qjunta::unitary::{
    dist, encode_boolean, haar_random_unitary, influence_via_partial_trace, StructuredJunta,
    Unitary,
};
use qjunta::verify::{
    check_encoding_distance, check_lb_no_case, check_structural_lemma, check_wang_lemma,
    dist_grid, exact_influence,
};
use qjunta::{instance::Instance, UnitaryOracle};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::commands::trial_rng;
use crate::error::CliError;

/// One pass/fail row of a verify report; `details` carries measured values
/// and, on failure, the first counterexample.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub details: Value,
}

fn check(name: &str, passed: bool, details: Value) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed,
        details,
    }
}

const CORE_STREAM: u64 = 0;
const LOWER_BOUND_STREAM: u64 = 100;
const CALIBRATION_STREAM: u64 = 200;

fn random_nonempty_subset(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    loop {
        let subset: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.5)).collect();
        if !subset.is_empty() {
            return subset;
        }
    }
}

/// Parseval, influence-route agreement, influence laws, distance routes,
/// and the exhaustive encoding identity.
pub fn core_suite(seed: u64) -> Result<Vec<CheckOutcome>, CliError> {
    let mut checks = Vec::new();

    let mut rng = trial_rng(seed, CORE_STREAM);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let n = 1 + i % 4;
        let u = haar_random_unitary(n, &mut rng)?;
        worst = worst.max((u.spectrum().total_weight() - 1.0).abs());
    }
    checks.push(check(
        "parseval",
        worst <= 1e-10,
        json!({ "cases": 20, "worst_deviation": worst, "tolerance": 1e-10 }),
    ));

    let mut rng = trial_rng(seed, CORE_STREAM + 1);
    let mut worst = 0.0f64;
    for i in 0..25 {
        let n = 1 + i % 4;
        let u = haar_random_unitary(n, &mut rng)?;
        let subset = random_nonempty_subset(n, &mut rng);
        let fast = u.spectrum().influence(&subset)?;
        worst = worst.max((fast - exact_influence(&u, &subset)?).abs());
        worst = worst.max((fast - influence_via_partial_trace(&u, &subset)?).abs());
    }
    checks.push(check(
        "influence-routes",
        worst <= 1e-9,
        json!({ "cases": 25, "worst_deviation": worst, "tolerance": 1e-9 }),
    ));

    checks.push(influence_laws(seed)?);
    checks.push(distance_routes(seed)?);
    checks.push(encoding_identity()?);
    Ok(checks)
}

fn influence_laws(seed: u64) -> Result<CheckOutcome, CliError> {
    let mut rng = trial_rng(seed, CORE_STREAM + 2);
    let mut violations = 0u32;
    let mut first: Option<Value> = None;
    for i in 0..100 {
        let n = 2 + i % 3;
        let spectrum = haar_random_unitary(n, &mut rng)?.spectrum();
        let t = random_nonempty_subset(n, &mut rng);
        let s: Vec<usize> = t.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let w = random_nonempty_subset(n, &mut rng);
        let inf_s = spectrum.influence(&s)?;
        let inf_t = spectrum.influence(&t)?;
        let mut union: Vec<usize> = t.iter().chain(w.iter()).copied().collect();
        union.sort_unstable();
        union.dedup();
        let inf_union = spectrum.influence(&union)?;
        let inf_w = spectrum.influence(&w)?;
        let monotone = inf_s <= inf_t + 1e-12;
        let subadditive = inf_union <= inf_t + inf_w + 1e-12;
        if !(monotone && subadditive) {
            violations += 1;
            first.get_or_insert(json!({
                "case": i, "s": s, "t": t, "w": w,
                "inf_s": inf_s, "inf_t": inf_t, "inf_union": inf_union, "inf_w": inf_w,
            }));
        }
    }
    Ok(check(
        "influence-laws",
        violations == 0,
        json!({ "cases": 100, "violations": violations, "slack": 1e-12, "counterexample": first }),
    ))
}

fn distance_routes(seed: u64) -> Result<CheckOutcome, CliError> {
    let mut rng = trial_rng(seed, CORE_STREAM + 3);
    let mut worst_grid = 0.0f64;
    let mut worst_invariance = 0.0f64;
    for i in 0..15 {
        let n = 1 + i % 3;
        let a = haar_random_unitary(n, &mut rng)?;
        let b = haar_random_unitary(n, &mut rng)?;
        let d = dist(&a, &b)?;
        worst_grid = worst_grid.max((d - dist_grid(&a, &b, 4096)?).abs());
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        worst_invariance = worst_invariance.max((dist(&a.phased(theta), &b)? - d).abs());
        let widen = |u: &qjunta::DenseUnitary| {
            StructuredJunta::new(n + 1, (1..=n).collect(), u.clone())
                .and_then(|j| j.expand())
        };
        worst_invariance = worst_invariance.max((dist(&widen(&a)?, &widen(&b)?)? - d).abs());
    }
    Ok(check(
        "distance-routes",
        worst_grid <= 1e-6 && worst_invariance <= 1e-9,
        json!({
            "cases": 15,
            "worst_grid_deviation": worst_grid,
            "grid_tolerance": 1e-6,
            "worst_invariance_deviation": worst_invariance,
            "invariance_tolerance": 1e-9,
        }),
    ))
}

fn encoding_identity() -> Result<CheckOutcome, CliError> {
    let mut cases = 0u64;
    let mut violations = 0u64;
    let mut first: Option<Value> = None;
    for n in 1..=3usize {
        let tables = 1u64 << (1 << n);
        for fa in 0..tables {
            let f = boolean_from_code(n, fa)?;
            for ga in 0..tables {
                let g = boolean_from_code(n, ga)?;
                cases += 1;
                if !check_encoding_distance(&f, &g)? {
                    violations += 1;
                    first.get_or_insert(json!({
                        "n": n, "f": f.truth_table(), "g": g.truth_table(),
                    }));
                }
            }
        }
    }
    Ok(check(
        "encoding-identity",
        violations == 0,
        json!({ "cases": cases, "violations": violations, "counterexample": first }),
    ))
}

fn boolean_from_code(n: usize, code: u64) -> Result<BooleanFunction, CliError> {
    let bits: Vec<bool> = (0..1usize << n).map(|x| code >> x & 1 == 1).collect();
    Ok(BooleanFunction::new(n, bits)?)
}

/// The two lemmas behind the no-case lower bound, a randomized structural
/// sweep, and the influence floor on certified far instances.
pub fn lower_bound_suite(seed: u64) -> Result<Vec<CheckOutcome>, CliError> {
    let mut checks = Vec::new();

    for (name, m) in [("lb-no-case-parity-2", 2usize), ("lb-no-case-parity-3", 3)] {
        let f = BooleanFunction::parity(m, m)?;
        let passed = check_lb_no_case(&f, 1, 0.5)?;
        checks.push(check(
            name,
            passed,
            json!({ "k": 1, "eps": 0.5, "floor": (2.0f64 * 0.5).sqrt() }),
        ));
    }

    let mut rng = trial_rng(seed, LOWER_BOUND_STREAM);
    let mut violations = 0u32;
    let mut first: Option<Value> = None;
    for i in 0..50 {
        let q = rng.gen_range(1..=3usize);
        let core = haar_random_unitary(1, &mut rng)?;
        let junta = StructuredJunta::new(3, vec![q], core)?;
        let f = BooleanFunction::random(3, &mut rng)?;
        if !check_structural_lemma(&junta, &f)? {
            violations += 1;
            first.get_or_insert(json!({ "case": i, "support": [q], "f": f.truth_table() }));
        }
    }
    checks.push(check(
        "structural-sweep",
        violations == 0,
        json!({ "cases": 50, "violations": violations, "counterexample": first }),
    ));

    let mut worst_ok = true;
    for m in [2usize, 3] {
        let f = BooleanFunction::parity(m, m)?;
        let u = encode_boolean(&f)?;
        // parity encodings are 1-far from every 1-junta, so the influence
        // floor applies at eps = 1
        worst_ok &= check_wang_lemma(&u, 1, 1.0)?;
    }
    checks.push(check(
        "wang-floor",
        worst_ok,
        json!({ "instances": ["parity-2", "parity-3"], "k": 1, "eps": 1.0 }),
    ));

    Ok(checks)
}

/// Measure the pinned constants: amplification success rates, the group
/// testing sweep behind the pinned cost model, and tomography overhead.
pub fn calibration_suite(seed: u64) -> Result<Vec<CheckOutcome>, CliError> {
    let mut checks = Vec::new();
    checks.push(amplification_rates(seed));
    checks.push(amplification_fit(seed));
    checks.push(ggt_exactness()?);
    checks.push(tomography_fit(seed)?);
    Ok(checks)
}

fn amplification_success_rate(p: f64, c_aa: f64, runs: u32, rng: &mut ChaCha8Rng) -> f64 {
    let budget = amplification_budget(p, c_aa);
    let mut hits = 0u32;
    for _ in 0..runs {
        if amplified_bernoulli(p, budget, rng).success {
            hits += 1;
        }
    }
    f64::from(hits) / f64::from(runs)
}

fn amplification_rates(seed: u64) -> CheckOutcome {
    let mut rng = trial_rng(seed, CALIBRATION_STREAM);
    let mut rates = Vec::new();
    let mut passed = true;
    for delta in [0.5, 0.1, 0.01] {
        let rate = amplification_success_rate(delta, DEFAULT_C_AA, 1000, &mut rng);
        passed &= rate >= 0.9;
        rates.push(json!({
            "delta": delta,
            "budget": amplification_budget(delta, DEFAULT_C_AA),
            "success_rate": rate,
        }));
    }
    let mut zero_fires = 0u32;
    for _ in 0..200 {
        if amplified_bernoulli(0.0, amplification_budget(0.01, DEFAULT_C_AA), &mut rng).success {
            zero_fires += 1;
        }
    }
    passed &= zero_fires == 0;
    check(
        "amplification",
        passed,
        json!({ "c_aa": DEFAULT_C_AA, "rates": rates, "zero_case_fires": zero_fires, "floor": 0.9 }),
    )
}

fn amplification_fit(seed: u64) -> CheckOutcome {
    let mut rng = trial_rng(seed, CALIBRATION_STREAM + 1);
    let mut fitted = None;
    for c in 1..=8u32 {
        let c_aa = f64::from(c);
        let all_pass = [0.5, 0.1, 0.01]
            .iter()
            .all(|&delta| amplification_success_rate(delta, c_aa, 400, &mut rng) >= 0.9);
        if all_pass {
            fitted = Some(c_aa);
            break;
        }
    }
    check(
        "amplification-fit",
        fitted.is_some_and(|c| c <= DEFAULT_C_AA),
        json!({ "fitted_c_aa": fitted, "pinned_c_aa": DEFAULT_C_AA }),
    )
}

fn ggt_exactness() -> Result<CheckOutcome, CliError> {
    let n = 6usize;
    let mut cases = 0u64;
    let mut errors = 0u64;
    let mut first: Option<Value> = None;
    for k in 1..=2usize {
        for d in 1..=2usize {
            for mask in 0u64..1 << n {
                let size = mask.count_ones() as usize;
                // sets strictly between the gap are a partial-function
                // don't-care, so only the promise cases count
                let expected = if size <= k {
                    GgtDecision::Small
                } else if size >= k + d {
                    GgtDecision::Large
                } else {
                    continue;
                };
                cases += 1;
                let outcome = quantum_ggt(n, k, d, |s| {
                    Ok(s.iter().any(|&q| mask >> (q - 1) & 1 == 1))
                })?;
                if outcome.decision != expected {
                    errors += 1;
                    first.get_or_insert(json!({ "mask": mask, "k": k, "d": d }));
                }
            }
        }
    }
    Ok(check(
        "ggt-exactness",
        errors == 0,
        json!({
            "n": n, "cases": cases, "errors": errors,
            "pinned_c_ggt": DEFAULT_C_GGT,
            "counterexample": first,
        }),
    ))
}

fn tomography_fit(seed: u64) -> Result<CheckOutcome, CliError> {
    let eps = 0.35;
    let trials = 20u32;
    let mut fractions = Vec::new();
    let mut fitted = None;
    let mut pinned_rate = 0.0;
    for (idx, c_t) in [8.0f64, 16.0, 32.0, DEFAULT_C_T].into_iter().enumerate() {
        let mut hits = 0u32;
        for trial in 0..trials {
            // one stream per (candidate, trial): the instance draw and the
            // oracle continue the same stream
            let mut rng = trial_rng(
                seed,
                CALIBRATION_STREAM + 10 + idx as u64 * u64::from(trials) + u64::from(trial),
            );
            let instance = Instance::gen_junta(3, 1, &mut rng)?;
            let hidden = instance.to_unitary()?;
            let mut params = LearnerParams::new(1, eps)?;
            params.backend = TomographyBackend::Measurement;
            params.c_t = c_t;
            params.c_l = 4.0 * c_t;
            let mut oracle = UnitaryOracle::with_rng(hidden.clone(), rng);
            if let Ok(learned) = junta_learner(&mut oracle, &params) {
                if hidden.dist_to(&Unitary::Junta(learned))? <= eps {
                    hits += 1;
                }
            }
        }
        let rate = f64::from(hits) / f64::from(trials);
        if rate >= 0.9 && fitted.is_none() {
            fitted = Some(c_t);
        }
        if c_t == DEFAULT_C_T {
            pinned_rate = rate;
        }
        fractions.push(json!({ "c_t": c_t, "success_rate": rate }));
    }
    Ok(check(
        "tomography-fit",
        fitted.is_some() && pinned_rate >= 0.9,
        json!({
            "eps": eps,
            "trials": trials,
            "rates": fractions,
            "fitted_c_t": fitted,
            "fitted_c_l": fitted.map(|c| 4.0 * c),
            "pinned_c_t": DEFAULT_C_T,
            "pinned_c_l": DEFAULT_C_L,
        }),
    ))
}
