//! Junta testing.
//!
//! The tester decides whether a hidden unitary acts on at most `k` qubits
//! or is `eps`-far from every such unitary. It runs two kinds of stages:
//!
//! * `tester_one` at scales `l = 0..=l_max` hunts for more than `k` qubits
//!   of individual influence at least `delta_l`, via gapped group testing
//!   bound to an amplified influence estimator.
//! * `tester_two` catches the remaining far case, where the influence is
//!   smeared over many qubits: random subsets that include each qubit with
//!   a fixed small probability light up the estimator too often.
//!
//! Amplitude amplification is simulated by amplitude bookkeeping: the
//! simulator knows the true success probability and draws each Grover
//! stage's outcome from the exact amplified distribution. Zero stays zero,
//! so the estimator is one-sided. The modeled ledger column carries the
//! iteration budgets a quantum implementation would reserve; one modeled
//! unit is one Grover iteration (one `U` and one `U†` application).

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::oracle::{BellOutcome, UnitaryOracle};
use crate::{Error, Result};

/// Amplification budget constant: `budget = ceil(c_aa / sqrt(delta))`.
/// Calibrated so that influence exactly `delta` fires with probability
/// at least 0.9 (see `calibration` tests and the verify suites).
pub const DEFAULT_C_AA: f64 = 6.0;

/// Modeled group-testing cost constant:
/// `ceil(c_ggt * sqrt(1 + k/d))` estimator calls' worth per run.
pub const DEFAULT_C_GGT: f64 = 4.0;

/// Repetitions for the second-kind acceptance estimate; Hoeffding gives
/// additive error 0.05 at confidence 0.99.
pub const SECOND_KIND_REPS: usize = 1100;

/// Parameters shared by all tester stages.
#[derive(Clone, Debug)]
pub struct TesterParams {
    pub k: usize,
    pub eps: f64,
    pub c_aa: f64,
    pub c_ggt: f64,
    /// Odd per-stage repetition count; the stage takes the majority.
    pub majority: usize,
    pub second_kind_reps: usize,
}

impl TesterParams {
    pub fn new(k: usize, eps: f64) -> Result<TesterParams> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1], got {eps}"
            )));
        }
        Ok(TesterParams {
            k,
            eps,
            c_aa: DEFAULT_C_AA,
            c_ggt: DEFAULT_C_GGT,
            majority: 3,
            second_kind_reps: SECOND_KIND_REPS,
        })
    }

    /// Largest scale index: `floor(log2(200 k))`.
    pub fn l_max(&self) -> usize {
        (200.0 * self.k as f64).log2().floor() as usize
    }

    /// Total stage count, `l_max + 2`.
    pub fn stage_count(&self) -> usize {
        self.l_max() + 2
    }

    /// Gap size at scale `l`.
    pub fn d_l(&self, l: usize) -> usize {
        1usize << l
    }

    /// Influence threshold at scale `l`:
    /// `eps^2 / (2^(l+5) log2(400 k))`.
    pub fn delta_l(&self, l: usize) -> f64 {
        let log_term = (400.0 * self.k as f64).log2();
        self.eps * self.eps / ((1u64 << (l + 5)) as f64 * log_term)
    }

    /// Second-kind influence threshold `eps^2 / (16 k)`.
    pub fn delta_second(&self) -> f64 {
        self.eps * self.eps / (16.0 * self.k as f64)
    }

    /// Per-qubit inclusion probability for second-kind subsets.
    ///
    /// `1/max(k, 2)` rather than `1/k`: at `k = 1` the subset would always
    /// be all of `[n]`, which has full influence on any nontrivial hidden
    /// unitary, so genuine 1-juntas would be rejected. Capping the
    /// probability at 1/2 keeps the junta-side acceptance bound (the hit
    /// probability on a k-element support stays at most `1 - 2^-k <= 3/4`
    /// for k <= 2 and at most `1 - (1 - 1/k)^k < 0.7` beyond) without
    /// weakening the far side, whose subsets only get smaller.
    pub fn inclusion_probability(&self) -> f64 {
        1.0 / (self.k.max(2) as f64)
    }
}

/// Iteration budget the estimator reserves at threshold `delta`.
pub fn amplification_budget(delta: f64, c_aa: f64) -> u64 {
    ((c_aa / delta.sqrt()).ceil() as u64).max(1)
}

/// Result of one amplified-Bernoulli run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmplifiedOutcome {
    pub success: bool,
    /// Grover stages simulated; each stage is one terminal measurement.
    pub stages: u64,
}

/// Amplitude bookkeeping for one estimator call with true success
/// probability `p` and an iteration budget.
///
/// Exponential schedule: stage `t` draws an iteration count `m` uniformly
/// from `[0, ceil(M_t))` with `M_t = (6/5)^t`, capped at the remaining
/// budget, and succeeds with probability `sin^2((2m+1) asin(sqrt p))`.
/// Each stage consumes `max(m, 1)` iterations. `p = 0` never succeeds.
pub fn amplified_bernoulli(p: f64, budget: u64, rng: &mut impl Rng) -> AmplifiedOutcome {
    let theta = p.clamp(0.0, 1.0).sqrt().asin();
    let mut remaining = budget;
    let mut schedule_cap = 1.0f64;
    let mut stages = 0u64;
    while remaining > 0 {
        let upper = (schedule_cap.ceil() as u64).max(1);
        let m = rng.gen_range(0..upper).min(remaining);
        let amplified = ((2 * m + 1) as f64 * theta).sin().powi(2);
        stages += 1;
        if rng.gen_bool(amplified.clamp(0.0, 1.0)) {
            return AmplifiedOutcome {
                success: true,
                stages,
            };
        }
        remaining -= m.max(1).min(remaining);
        schedule_cap *= 1.2;
    }
    AmplifiedOutcome {
        success: false,
        stages,
    }
}

/// Single-sample influence indicator: 1 iff the Bell outcome restricted to
/// `subset` is nontrivial. Its expectation is `Inf_subset`.
pub fn raw_influence_estimator(oracle: &mut UnitaryOracle, subset: &[usize]) -> Result<bool> {
    Ok(matches!(
        oracle.bell_outcome_on(subset)?,
        BellOutcome::Nontrivial(_)
    ))
}

/// Amplified influence estimator at threshold `delta` with the default
/// budget constant. One-sided: influence zero never fires; influence at
/// least `delta` fires with probability at least 0.9.
pub fn influence_estimator(
    oracle: &mut UnitaryOracle,
    subset: &[usize],
    delta: f64,
) -> Result<bool> {
    influence_estimator_with(oracle, subset, delta, DEFAULT_C_AA, true)
}

/// Estimator with an explicit budget constant. When `charge_modeled` is
/// false the caller accounts the modeled budget itself (group testing
/// charges one block per run instead of one budget per classical call).
pub fn influence_estimator_with(
    oracle: &mut UnitaryOracle,
    subset: &[usize],
    delta: f64,
    c_aa: f64,
    charge_modeled: bool,
) -> Result<bool> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    let budget = amplification_budget(delta, c_aa);
    if charge_modeled {
        oracle.charge_modeled(budget);
    }
    let p = oracle.true_influence(subset)?;
    let outcome = amplified_bernoulli(p, budget, oracle.rng_mut());
    oracle.charge_simulated_u(outcome.stages);
    Ok(outcome.success)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GgtDecision {
    Small,
    Large,
}

#[derive(Clone, Debug)]
pub struct GgtOutcome {
    pub decision: GgtDecision,
    /// Elements confirmed positive, in increasing order.
    pub found: Vec<usize>,
    /// Classical queries the stand-in issued (majority repetitions
    /// included); not the modeled quantum cost.
    pub classical_queries: u64,
}

/// Modeled quantum cost of one group-testing run whose queries are bound
/// to an estimator at threshold `delta`.
pub fn ggt_modeled_cost(k: usize, d: usize, delta: f64, c_aa: f64, c_ggt: f64) -> u64 {
    let calls = (c_ggt * (1.0 + k as f64 / d as f64).sqrt()).ceil() as u64;
    calls.max(1) * amplification_budget(delta, c_aa)
}

/// Gapped group testing over ground set `[n]`: decide whether the hidden
/// positive set has size at most `k` (`Small`) or at least `k + d`
/// (`Large`), given a one-sided intersection oracle (disjoint queries
/// answer false with certainty; intersecting queries answer true with
/// probability at least 0.9).
///
/// Classical stand-in: binary-search the complement of the confirmed set
/// for one positive element at a time, answering every set query by an
/// `r`-fold majority with `r = 2 ceil(log2(100 n (k+2))) + 1`. Confirmed
/// elements are always genuine because singleton queries on non-elements
/// never fire.
pub fn quantum_ggt<Q>(n: usize, k: usize, d: usize, mut query: Q) -> Result<GgtOutcome>
where
    Q: FnMut(&[usize]) -> Result<bool>,
{
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter(
            "group testing needs n >= 1 and d >= 1".into(),
        ));
    }
    let reps = 2 * (100.0 * n as f64 * (k + 2) as f64).log2().ceil() as u64 + 1;
    let mut classical_queries = 0u64;
    let mut majority = |set: &[usize], query: &mut Q| -> Result<bool> {
        let mut positives = 0u64;
        for _ in 0..reps {
            if query(set)? {
                positives += 1;
            }
        }
        classical_queries += reps;
        Ok(2 * positives > reps)
    };

    let mut found: BTreeSet<usize> = BTreeSet::new();
    // A failed confirmation means the binary search was misled by majority
    // noise; bounded retries keep the run finite.
    let mut retries_left = 16u32;
    loop {
        if found.len() == k + 1 {
            return Ok(GgtOutcome {
                decision: GgtDecision::Large,
                found: found.into_iter().collect(),
                classical_queries,
            });
        }
        let complement: Vec<usize> = (1..=n).filter(|q| !found.contains(q)).collect();
        if complement.is_empty() || !majority(&complement, &mut query)? {
            return Ok(GgtOutcome {
                decision: GgtDecision::Small,
                found: found.into_iter().collect(),
                classical_queries,
            });
        }
        // Descend to a single element. When the left half tests negative
        // the right half must intersect, up to majority noise caught by
        // the confirmation below.
        let mut window = complement;
        while window.len() > 1 {
            let (left, right) = window.split_at(window.len() / 2);
            window = if majority(left, &mut query)? {
                left.to_vec()
            } else {
                right.to_vec()
            };
        }
        let candidate = window[0];
        if majority(&window, &mut query)? {
            found.insert(candidate);
        } else if retries_left == 0 {
            // Persistent contradictions break the promise; fall back to
            // the completeness-safe answer.
            return Ok(GgtOutcome {
                decision: GgtDecision::Small,
                found: found.into_iter().collect(),
                classical_queries,
            });
        } else {
            retries_left -= 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageDecision {
    Accept,
    Reject,
}

impl StageDecision {
    pub fn accepted(self) -> bool {
        self == StageDecision::Accept
    }
}

/// First-kind stage at scale `l`: group testing over the qubits with the
/// estimator at threshold `delta_l`, gap `d_l`. Accepts iff the hidden
/// positive set tests small. Majority over `params.majority` runs.
pub fn tester_one(
    oracle: &mut UnitaryOracle,
    params: &TesterParams,
    l: usize,
) -> Result<StageDecision> {
    if l > params.l_max() {
        return Err(Error::InvalidParameter(format!(
            "stage index {l} exceeds l_max = {}",
            params.l_max()
        )));
    }
    let delta = params.delta_l(l);
    let d = params.d_l(l);
    let n = oracle.n();
    let mut small_votes = 0usize;
    for _ in 0..params.majority {
        oracle.charge_modeled(ggt_modeled_cost(params.k, d, delta, params.c_aa, params.c_ggt));
        let outcome = quantum_ggt(n, params.k, d, |set| {
            influence_estimator_with(oracle, set, delta, params.c_aa, false)
        })?;
        if outcome.decision == GgtDecision::Small {
            small_votes += 1;
        }
    }
    Ok(if 2 * small_votes > params.majority {
        StageDecision::Accept
    } else {
        StageDecision::Reject
    })
}

/// Second-kind stage: estimate how often the estimator fires on a random
/// subset that includes each qubit independently with the inclusion
/// probability; accept iff the firing rate is at most 0.8. Juntas keep the
/// rate at or below 0.75; far unitaries of the second kind push it to at
/// least 0.85. Majority over `params.majority` estimates.
pub fn tester_two(oracle: &mut UnitaryOracle, params: &TesterParams) -> Result<StageDecision> {
    let delta = params.delta_second();
    let q = params.inclusion_probability();
    let n = oracle.n();
    let mut accept_votes = 0usize;
    for _ in 0..params.majority {
        let mut fires = 0usize;
        for _ in 0..params.second_kind_reps {
            let subset: Vec<usize> = {
                let rng = oracle.rng_mut();
                (1..=n).filter(|_| rng.gen_bool(q)).collect()
            };
            if influence_estimator_with(oracle, &subset, delta, params.c_aa, true)? {
                fires += 1;
            }
        }
        let rate = fires as f64 / params.second_kind_reps as f64;
        if rate <= 0.8 {
            accept_votes += 1;
        }
    }
    Ok(if 2 * accept_votes > params.majority {
        StageDecision::Accept
    } else {
        StageDecision::Reject
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageOutcome {
    /// "one[l]" for first-kind stages, "two" for the second kind.
    pub stage: String,
    pub accepted: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JuntaTestReport {
    pub accepted: bool,
    pub stages: Vec<StageOutcome>,
}

/// The full tester: every first-kind scale plus the second-kind stage.
/// Accepts iff all stages accept. All stages always run, so the query
/// profile depends only on the outcomes' randomness, not on early exits.
pub fn junta_tester(oracle: &mut UnitaryOracle, params: &TesterParams) -> Result<JuntaTestReport> {
    let mut stages = Vec::with_capacity(params.stage_count());
    for l in 0..=params.l_max() {
        let decision = tester_one(oracle, params, l)?;
        stages.push(StageOutcome {
            stage: format!("one[{l}]"),
            accepted: decision.accepted(),
        });
    }
    let decision = tester_two(oracle, params)?;
    stages.push(StageOutcome {
        stage: "two".into(),
        accepted: decision.accepted(),
    });
    Ok(JuntaTestReport {
        accepted: stages.iter().all(|s| s.accepted),
        stages,
    })
}
