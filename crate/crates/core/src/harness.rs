//! Seeded Monte Carlo estimation of error probabilities.
//!
//! Every trial owns a random stream derived from
//! `(base_seed, rule, n, trial_index)`: a ChaCha8 key from the first three and
//! the trial index as the stream number. Results therefore do not depend on
//! scheduling or on the number of worker threads.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decide::{dgl_decide_type, map_decide_type, nn_decide, robust_decide, HypothesisSet};
use crate::error::{Error, Result};
use crate::exponents::{classical_bound, Bound};
use crate::format::format_sig;
use crate::robustify::{robust_bound, RobustModel};
use crate::types::{InverseCdf, TypeVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// NN on the true distributions.
    Nn,
    /// MAP on the true distributions and priors.
    Map,
    /// NN on the representatives of the robust model.
    Robust,
    /// DGL minimum-distance test on the nominals of the robust model.
    Dgl,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::Nn, Rule::Map, Rule::Robust, Rule::Dgl];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Nn => "nn",
            Rule::Map => "map",
            Rule::Robust => "robust",
            Rule::Dgl => "dgl",
        }
    }

    /// Stable identifier mixed into the random stream key.
    pub fn id(self) -> u64 {
        match self {
            Rule::Nn => 0,
            Rule::Map => 1,
            Rule::Robust => 2,
            Rule::Dgl => 3,
        }
    }

    pub fn needs_robust_model(self) -> bool {
        matches!(self, Rule::Robust | Rule::Dgl)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidPlan(format!("unknown rule {s:?}")))
    }
}

/// A validated Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    hypothesis_set: HypothesisSet<f64>,
    robust_model: Option<RobustModel<f64>>,
    rules: Vec<Rule>,
    n_values: Vec<u64>,
    trials: u64,
    base_seed: u64,
}

impl ExperimentPlan {
    pub fn new(
        hypothesis_set: HypothesisSet<f64>,
        robust_model: Option<RobustModel<f64>>,
        rules: Vec<Rule>,
        n_values: Vec<u64>,
        trials: u64,
        base_seed: u64,
    ) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::InvalidPlan("no rules".into()));
        }
        if n_values.is_empty() || n_values.contains(&0) {
            return Err(Error::InvalidPlan(
                "n values must be a non-empty list of positive integers".into(),
            ));
        }
        if trials == 0 {
            return Err(Error::InvalidPlan("trials must be at least 1".into()));
        }
        match &robust_model {
            Some(rm) => {
                if rm.len() != hypothesis_set.len()
                    || rm.alphabet_size() != hypothesis_set.alphabet_size()
                {
                    return Err(Error::InvalidPlan(format!(
                        "robust model has {} nominals over {} symbols, hypotheses are {} over {}",
                        rm.len(),
                        rm.alphabet_size(),
                        hypothesis_set.len(),
                        hypothesis_set.alphabet_size()
                    )));
                }
            }
            None => {
                if let Some(r) = rules.iter().find(|r| r.needs_robust_model()) {
                    return Err(Error::InvalidPlan(format!(
                        "rule {r} needs nominal distributions"
                    )));
                }
            }
        }
        Ok(Self {
            hypothesis_set,
            robust_model,
            rules,
            n_values,
            trials,
            base_seed,
        })
    }

    pub fn hypothesis_set(&self) -> &HypothesisSet<f64> {
        &self.hypothesis_set
    }

    pub fn robust_model(&self) -> Option<&RobustModel<f64>> {
        self.robust_model.as_ref()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn n_values(&self) -> &[u64] {
        &self.n_values
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }
}

/// Outcome of one trial; indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub true_index: usize,
    pub decided_index: usize,
}

impl TrialRecord {
    pub fn is_error(&self) -> bool {
        self.true_index != self.decided_index
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_key(base_seed: u64, rule: Rule, n: u64) -> [u8; 32] {
    let mut state = base_seed;
    let a = splitmix64(&mut state);
    let mut state = a ^ rule.id();
    let b = splitmix64(&mut state);
    let mut state = b ^ n;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Samplers and decision inputs shared by all trials of a plan.
struct Engine<'a> {
    plan: &'a ExperimentPlan,
    cumulative_priors: Vec<f64>,
    samplers: Vec<InverseCdf>,
}

impl<'a> Engine<'a> {
    fn new(plan: &'a ExperimentPlan) -> Self {
        let mut acc = 0.0;
        let cumulative_priors = plan
            .hypothesis_set
            .priors()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let samplers = plan
            .hypothesis_set
            .distributions()
            .iter()
            .map(InverseCdf::new)
            .collect();
        Self {
            plan,
            cumulative_priors,
            samplers,
        }
    }

    fn draw_hypothesis<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative_priors
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative_priors.len() - 1)
    }

    fn trial(&self, key: [u8; 32], rule: Rule, n: u64, trial_index: u64) -> TrialRecord {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(trial_index);
        let true_index = self.draw_hypothesis(&mut rng);
        let sampler = &self.samplers[true_index];
        let mut counts = vec![0u64; self.plan.hypothesis_set.alphabet_size()];
        for _ in 0..n {
            counts[sampler.draw(&mut rng) as usize] += 1;
        }
        let t = TypeVector::new(counts).expect("n > 0 draws");
        TrialRecord {
            true_index,
            decided_index: self.decide(rule, &t),
        }
    }

    // The plan was validated, so alphabets agree and the model exists when needed.
    fn decide(&self, rule: Rule, t: &TypeVector) -> usize {
        let h = &self.plan.hypothesis_set;
        let rm = || self.plan.robust_model.as_ref().expect("validated plan");
        let decision = match rule {
            Rule::Nn => nn_decide(h, t),
            Rule::Map => Ok(map_decide_type(h, t)),
            Rule::Robust => robust_decide(rm(), t),
            Rule::Dgl => dgl_decide_type(rm().nominals(), t),
        };
        decision.expect("validated plan").index
    }
}

/// A single trial, fully determined by `(base_seed, rule, n, trial_index)`.
pub fn run_trial(
    plan: &ExperimentPlan,
    rule: Rule,
    n: u64,
    trial_index: u64,
) -> Result<TrialRecord> {
    if n == 0 {
        return Err(Error::InvalidPlan("n must be positive".into()));
    }
    if rule.needs_robust_model() && plan.robust_model.is_none() {
        return Err(Error::InvalidPlan(format!(
            "rule {rule} needs nominal distributions"
        )));
    }
    let engine = Engine::new(plan);
    Ok(engine.trial(stream_key(plan.base_seed, rule, n), rule, n, trial_index))
}

/// Aggregated error estimate for one rule at one sequence length.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub rule: Rule,
    pub n: u64,
    pub trials: u64,
    pub errors: u64,
    pub pe_hat: f64,
    /// Normal-approximation 95% half-width, or the one-sided bound `3/trials`
    /// when no error was observed.
    pub ci95_halfwidth: f64,
    pub bound_exponent: Option<f64>,
    pub bound_value: Option<f64>,
}

impl RunSummary {
    pub fn new(rule: Rule, n: u64, trials: u64, errors: u64, bound: Option<Bound<f64>>) -> Self {
        let t = trials as f64;
        let pe_hat = errors as f64 / t;
        let ci95_halfwidth = if errors == 0 {
            3.0 / t
        } else {
            1.96 * (pe_hat * (1.0 - pe_hat) / t).sqrt()
        };
        Self {
            rule,
            n,
            trials,
            errors,
            pe_hat,
            ci95_halfwidth,
            bound_exponent: bound.map(|b| b.exponent),
            bound_value: bound.map(|b| b.value()),
        }
    }
}

fn bound_for(plan: &ExperimentPlan, rule: Rule, n: u64) -> Result<Option<Bound<f64>>> {
    match rule {
        Rule::Nn => classical_bound(&plan.hypothesis_set, n).map(Some),
        Rule::Robust => {
            robust_bound(plan.robust_model.as_ref().expect("validated plan"), n).map(Some)
        }
        Rule::Map | Rule::Dgl => Ok(None),
    }
}

/// Runs every rule at every `n` on the current rayon pool. Output is ordered
/// by rule, then by `n`, as listed in the plan.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<Vec<RunSummary>> {
    let engine = Engine::new(plan);
    let mut out = Vec::with_capacity(plan.rules.len() * plan.n_values.len());
    for &rule in &plan.rules {
        for &n in &plan.n_values {
            let key = stream_key(plan.base_seed, rule, n);
            let errors: u64 = (0..plan.trials)
                .into_par_iter()
                .map(|i| engine.trial(key, rule, n, i).is_error() as u64)
                .sum();
            out.push(RunSummary::new(
                rule,
                n,
                plan.trials,
                errors,
                bound_for(plan, rule, n)?,
            ));
        }
    }
    Ok(out)
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    plan: &ExperimentPlan,
    threads: usize,
) -> Result<Vec<RunSummary>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidPlan(format!("cannot start {threads} workers: {e}")))?;
    pool.install(|| run_experiment(plan))
}

pub const CSV_HEADER: &str = "rule,n,trials,errors,pe_hat,ci95,bound_exponent,bound_value";

fn optional(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), format_sig)
}

pub fn write_summaries_csv<W: Write>(summaries: &[RunSummary], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in summaries {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.rule,
            s.n,
            s.trials,
            s.errors,
            format_sig(s.pe_hat),
            format_sig(s.ci95_halfwidth),
            optional(s.bound_exponent),
            optional(s.bound_value)
        )?;
    }
    Ok(())
}

/// Least-squares slope of `-log2(pe_hat)` against `n` over the cells with at
/// least one error.
pub fn empirical_exponent(summaries: &[RunSummary]) -> Result<f64> {
    let points: Vec<(f64, f64)> = summaries
        .iter()
        .filter(|s| s.errors > 0)
        .map(|s| (s.n as f64, -s.pe_hat.log2()))
        .collect();
    if points.len() < 3 {
        return Err(Error::UndefinedExponent(format!(
            "{} of {} cells have errors, need at least 3",
            points.len(),
            summaries.len()
        )));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::UndefinedExponent("all cells share one n".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}
