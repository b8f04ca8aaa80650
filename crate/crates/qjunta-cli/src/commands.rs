//! The subcommands as library functions, callable without spawning a
//! process.
//!
//! Every command returns an [`ExperimentReport`]; the binary decides where
//! it goes. Trials run on a worker pool but are merged by trial index, and
//! each trial draws from its own cipher stream, so parallelism cannot
//! change any output.

use std::fs;
use std::path::{Path, PathBuf};

use qjunta::instance::Instance;
use qjunta::learning::{junta_learner, LearnerParams, TomographyBackend};
use qjunta::testing::{junta_tester, TesterParams};
use qjunta::{Error as LibError, QueryLedger, Unitary, UnitaryOracle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::ExperimentReport;
use crate::verify_suites;

/// Counter-based seed split: the base seed keys the stream cipher and the
/// trial index selects its stream, so trials stay independent no matter
/// which worker runs them.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(Instance::from_json(&text)?)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn fraction(num: usize, den: u64) -> Value {
    if den == 0 {
        Value::Null
    } else {
        json!(num as f64 / den as f64)
    }
}

pub struct GenArgs {
    pub kind: String,
    pub family: Option<String>,
    pub n: usize,
    pub k: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Generate an instance and embed it in the report; `out` also writes the
/// instance JSON to a file.
pub fn cmd_gen(args: &GenArgs) -> Result<ExperimentReport, CliError> {
    if args.family.is_some() && args.kind != "boolean" {
        return Err(CliError::InvalidArgument(format!(
            "--family only applies to kind boolean, not {}",
            args.kind
        )));
    }
    let mut rng = trial_rng(args.seed, 0);
    let instance = match args.kind.as_str() {
        "junta" => {
            let k = args.k.ok_or_else(|| {
                CliError::InvalidArgument("kind junta requires --k".into())
            })?;
            Instance::gen_junta(args.n, k, &mut rng)?
        }
        "dense" => {
            if args.k.is_some() {
                return Err(CliError::InvalidArgument(
                    "kind dense takes no --k".into(),
                ));
            }
            Instance::gen_dense(args.n, &mut rng)?
        }
        "boolean" => {
            let family = args.family.as_deref().ok_or_else(|| {
                CliError::InvalidArgument(
                    "kind boolean requires --family (parity-<m> or random)".into(),
                )
            })?;
            if let Some(m) = family.strip_prefix("parity-") {
                let m: usize = m.parse().map_err(|_| {
                    CliError::InvalidArgument(format!("malformed parity family {family:?}"))
                })?;
                Instance::gen_boolean_parity(m, args.n)?
            } else if family == "random" {
                Instance::gen_boolean_random(args.n, &mut rng)?
            } else {
                return Err(CliError::InvalidArgument(format!(
                    "unknown boolean family {family:?}; expected parity-<m> or random"
                )));
            }
        }
        other => {
            return Err(CliError::InvalidArgument(format!(
                "unknown kind {other:?}; expected junta, boolean, or dense"
            )));
        }
    };
    if let Some(path) = &args.out {
        write_text(path, &instance.to_json())?;
    }
    let parameters = json!({
        "kind": args.kind,
        "family": args.family,
        "n": args.n,
        "k": args.k,
        "seed": args.seed,
    });
    let results = json!({
        "instance": serde_json::to_value(&instance).expect("instances serialize"),
        "path": args.out.as_ref().map(|p| p.display().to_string()),
    });
    Ok(ExperimentReport::new(
        "gen",
        parameters,
        results,
        QueryLedger::default(),
    ))
}

pub struct TestArgs {
    pub instance: PathBuf,
    pub k: usize,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Run the junta tester `trials` times with independent streams.
pub fn cmd_test(args: &TestArgs) -> Result<ExperimentReport, CliError> {
    let instance = read_instance(&args.instance)?;
    let hidden = instance.to_unitary()?;
    let params = TesterParams::new(args.k, args.eps)?;
    let trials: Vec<(Value, QueryLedger, bool)> = (0..args.trials)
        .into_par_iter()
        .map(|trial| -> Result<(Value, QueryLedger, bool), CliError> {
            let mut oracle = UnitaryOracle::with_rng(hidden.clone(), trial_rng(args.seed, trial));
            let outcome = junta_tester(&mut oracle, &params)?;
            let ledger = *oracle.ledger();
            let row = json!({
                "trial": trial,
                "accepted": outcome.accepted,
                "stages": serde_json::to_value(&outcome.stages).expect("stages serialize"),
                "ledger": serde_json::to_value(ledger).expect("ledgers serialize"),
            });
            Ok((row, ledger, outcome.accepted))
        })
        .collect::<Result<_, _>>()?;
    let accepted = trials.iter().filter(|(_, _, a)| *a).count();
    let mut total = QueryLedger::default();
    for (_, ledger, _) in &trials {
        total.merge(ledger);
    }
    let parameters = json!({
        "instance": args.instance.display().to_string(),
        "n": hidden.n(),
        "k": args.k,
        "eps": args.eps,
        "trials": args.trials,
        "seed": args.seed,
        "c_aa": params.c_aa,
        "c_ggt": params.c_ggt,
        "majority": params.majority,
        "second_kind_reps": params.second_kind_reps,
    });
    let results = json!({
        "accept_fraction": fraction(accepted, args.trials),
        "accepted": accepted,
        "trials": trials.into_iter().map(|(row, _, _)| row).collect::<Vec<_>>(),
    });
    Ok(ExperimentReport::new("test", parameters, results, total))
}

pub struct LearnArgs {
    pub instance: PathBuf,
    pub k: usize,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
    pub backend: TomographyBackend,
    pub learned_out: Option<PathBuf>,
}

/// Probabilistic per-trial failures become report rows; contract errors
/// abort the whole command.
fn is_trial_error(e: &LibError) -> bool {
    matches!(
        e,
        LibError::InsufficientCopies { .. }
            | LibError::SupportExceedsPromise { .. }
            | LibError::PrepFailed(_)
    )
}

/// Run the junta learner `trials` times; report the exact distance from the
/// hidden unitary per trial and embed the first successful hypothesis.
pub fn cmd_learn(args: &LearnArgs) -> Result<ExperimentReport, CliError> {
    let instance = read_instance(&args.instance)?;
    let hidden = instance.to_unitary()?;
    let mut params = LearnerParams::new(args.k, args.eps)?;
    params.backend = args.backend;
    let trials: Vec<(Value, QueryLedger, Option<(bool, Instance)>)> = (0..args.trials)
        .into_par_iter()
        .map(
            |trial| -> Result<(Value, QueryLedger, Option<(bool, Instance)>), CliError> {
                let mut oracle =
                    UnitaryOracle::with_rng(hidden.clone(), trial_rng(args.seed, trial));
                let outcome = junta_learner(&mut oracle, &params);
                let ledger = *oracle.ledger();
                let ledger_value = serde_json::to_value(ledger).expect("ledgers serialize");
                match outcome {
                    Ok(learned) => {
                        let support = learned.support().to_vec();
                        let learned = Unitary::Junta(learned);
                        let dist = hidden.dist_to(&learned)?;
                        let success = dist <= args.eps;
                        let row = json!({
                            "trial": trial,
                            "dist": dist,
                            "success": success,
                            "support": support,
                            "ledger": ledger_value,
                        });
                        Ok((row, ledger, Some((success, Instance::from_unitary(&learned)))))
                    }
                    Err(e) if is_trial_error(&e) => {
                        let e = CliError::Lib(e);
                        let row = json!({
                            "trial": trial,
                            "success": false,
                            "error": { "kind": e.kind(), "message": e.to_string() },
                            "ledger": ledger_value,
                        });
                        Ok((row, ledger, None))
                    }
                    Err(e) => Err(CliError::Lib(e)),
                }
            },
        )
        .collect::<Result<_, _>>()?;
    let successes = trials
        .iter()
        .filter(|(_, _, l)| matches!(l, Some((true, _))))
        .count();
    let learned_pick = trials.iter().find_map(|(_, _, l)| match l {
        Some((true, inst)) => Some(inst.clone()),
        _ => None,
    });
    let mut total = QueryLedger::default();
    for (_, ledger, _) in &trials {
        total.merge(ledger);
    }
    if let (Some(path), Some(inst)) = (&args.learned_out, &learned_pick) {
        write_text(path, &inst.to_json())?;
    }
    let parameters = json!({
        "instance": args.instance.display().to_string(),
        "n": hidden.n(),
        "k": args.k,
        "eps": args.eps,
        "trials": args.trials,
        "seed": args.seed,
        "backend": serde_json::to_value(args.backend).expect("backends serialize"),
        "c_l": params.c_l,
        "c_t": params.c_t,
        "gamma": params.gamma(),
        "sample_count": params.sample_count(),
        "copies": params.copies(),
        "attempts": params.attempts(),
        "tomography_eps": params.tomography_eps(),
    });
    let results = json!({
        "success_fraction": fraction(successes, args.trials),
        "successes": successes,
        "learned": learned_pick
            .as_ref()
            .map(|i| serde_json::to_value(i).expect("instances serialize")),
        "learned_path": args
            .learned_out
            .as_ref()
            .filter(|_| learned_pick.is_some())
            .map(|p| p.display().to_string()),
        "trials": trials.into_iter().map(|(row, _, _)| row).collect::<Vec<_>>(),
    });
    Ok(ExperimentReport::new("learn", parameters, results, total))
}

pub struct VerifyArgs {
    pub suite: String,
    pub seed: u64,
}

/// Run an invariant suite; the report lists one pass/fail row per check.
pub fn cmd_verify(args: &VerifyArgs) -> Result<ExperimentReport, CliError> {
    let checks = match args.suite.as_str() {
        "core" => verify_suites::core_suite(args.seed)?,
        "lower-bound" => verify_suites::lower_bound_suite(args.seed)?,
        "calibration" => verify_suites::calibration_suite(args.seed)?,
        "all" => {
            let mut checks = verify_suites::core_suite(args.seed)?;
            checks.extend(verify_suites::lower_bound_suite(args.seed)?);
            checks.extend(verify_suites::calibration_suite(args.seed)?);
            checks
        }
        other => {
            return Err(CliError::InvalidArgument(format!(
                "unknown suite {other:?}; expected core, lower-bound, calibration, or all"
            )));
        }
    };
    let failed = checks.iter().filter(|c| !c.passed).count();
    let parameters = json!({ "suite": args.suite, "seed": args.seed });
    let results = json!({
        "suite": args.suite,
        "passed": checks.len() - failed,
        "failed": failed,
        "checks": serde_json::to_value(&checks).expect("checks serialize"),
    });
    Ok(ExperimentReport::new(
        "verify",
        parameters,
        results,
        QueryLedger::default(),
    ))
}

pub struct BenchArgs {
    pub k_list: Vec<usize>,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
    pub algo: String,
}

/// Measure simulated and modeled query counts against k. Each row draws a
/// fresh hidden junta on `n = k + 2` qubits and averages the trial ledgers.
pub fn cmd_bench(args: &BenchArgs) -> Result<ExperimentReport, CliError> {
    let algos: Vec<&str> = match args.algo.as_str() {
        "tester" => vec!["tester"],
        "learner" => vec!["learner"],
        "both" => vec!["tester", "learner"],
        other => {
            return Err(CliError::InvalidArgument(format!(
                "unknown algo {other:?}; expected tester, learner, or both"
            )));
        }
    };
    if args.trials >= u64::from(u32::MAX) {
        return Err(CliError::InvalidArgument(
            "trials must fit below 2^32 - 1 for the stream split".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut total = QueryLedger::default();
    // stream layout: row index in the high half, trial in the low half,
    // all-ones low half reserved for instance generation
    for (row_idx, (algo, k)) in algos
        .iter()
        .flat_map(|a| args.k_list.iter().map(move |k| (*a, *k)))
        .enumerate()
    {
        let row_base = (row_idx as u64) << 32;
        let n = k + 2;
        let mut gen_rng = trial_rng(args.seed, row_base | u64::from(u32::MAX));
        let instance = Instance::gen_junta(n, k, &mut gen_rng)?;
        let hidden = instance.to_unitary()?;
        let tester_params = TesterParams::new(k, args.eps)?;
        let learner_params = match algo {
            "learner" => Some(LearnerParams::new(k, args.eps)?),
            _ => None,
        };
        let ledgers: Vec<QueryLedger> = (0..args.trials)
            .into_par_iter()
            .map(|trial| -> Result<QueryLedger, CliError> {
                let mut oracle =
                    UnitaryOracle::with_rng(hidden.clone(), trial_rng(args.seed, row_base | trial));
                match &learner_params {
                    None => {
                        junta_tester(&mut oracle, &tester_params)?;
                    }
                    Some(params) => match junta_learner(&mut oracle, params) {
                        Ok(_) => {}
                        // failed preparations still spent their queries
                        Err(e) if is_trial_error(&e) => {}
                        Err(e) => return Err(CliError::Lib(e)),
                    },
                }
                Ok(*oracle.ledger())
            })
            .collect::<Result<_, _>>()?;
        let mut row_total = QueryLedger::default();
        for ledger in &ledgers {
            row_total.merge(ledger);
        }
        total.merge(&row_total);
        let mean = |v: u64| {
            if args.trials == 0 {
                Value::Null
            } else {
                json!(v as f64 / args.trials as f64)
            }
        };
        rows.push(json!({
            "algo": algo,
            "k": k,
            "n": n,
            "eps": args.eps,
            "trials": args.trials,
            "simulated_u_mean": mean(row_total.simulated_u),
            "simulated_u_dagger_mean": mean(row_total.simulated_u_dagger),
            "modeled_mean": mean(row_total.modeled_quantum),
        }));
    }
    let csv = bench_csv(&rows);
    let parameters = json!({
        "k_list": args.k_list,
        "eps": args.eps,
        "trials": args.trials,
        "seed": args.seed,
        "algo": args.algo,
    });
    let results = json!({ "rows": rows, "csv": csv });
    Ok(ExperimentReport::new("bench", parameters, results, total))
}

fn bench_csv(rows: &[Value]) -> String {
    let columns = [
        "algo",
        "k",
        "n",
        "eps",
        "trials",
        "simulated_u_mean",
        "simulated_u_dagger_mean",
        "modeled_mean",
    ];
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = columns
            .iter()
            .map(|c| match &row[c] {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_streams_are_independent_and_reproducible() {
        use rand::RngCore;
        let mut a = trial_rng(7, 0);
        let mut b = trial_rng(7, 1);
        let mut a2 = trial_rng(7, 0);
        assert_eq!(a.next_u64(), a2.next_u64());
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn bench_csv_renders_header_for_empty_table() {
        let csv = bench_csv(&[]);
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("algo,k,n,eps,trials"));
    }

    #[test]
    fn unknown_kind_is_an_invalid_argument() {
        let args = GenArgs {
            kind: "fourier".into(),
            family: None,
            n: 3,
            k: None,
            seed: 0,
            out: None,
        };
        let err = cmd_gen(&args).unwrap_err();
        assert_eq!(err.kind(), "invalid-argument");
    }
}
