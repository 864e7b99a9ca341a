//! Numerical re-verification of every bound in the crate.
//!
//! [`verify_all`] runs a fixed registry of named checks. Each check derives
//! its own seed from the master seed and its name, so a check's outcome
//! does not depend on which other checks run or on thread scheduling.
//! Checks run concurrently and the report lists them sorted by name.
//!
//! Pass criteria: analytic quantities must satisfy their bound within
//! `1e-12`; Monte Carlo estimates within three standard errors.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bias::{
    applicable_targets_proportion, bias, bias_extrema, bias_of_strategy, conservation_sum,
    empirical_bias, famine_proportion, favorable_distributions_estimate,
    favorable_resource_probability, geometric_bound, hoeffding_experiment,
    mean_bias_over_distributions, set_bias, theorem1_factor, MCEstimate,
};
use crate::error::{Error, Result};
use crate::expressivity::{
    entropy_bits, expected_entropy, expected_expressivity_bias_upper, expressivity_range,
    kl_to_uniform, max_entropy_construction, min_entropy_construction, table_of_ranges,
    tradeoff_bias_upper, tradeoff_expressivity_upper,
};
use crate::oracle::{
    binomial_deviation_probability, exact_induced_strategy, lemma2_check, min_mass_subset,
    sample_simplex,
};
use crate::report::{CheckResult, VerificationReport};
use crate::rng::{named_seed, stream_rng};
use crate::sampling::{simplex_point, varied_strategy};
use crate::search::{
    binomial, enumerate_targets, induced_strategy, mix_strategies, per_query_success,
    uniform_strategy, validate_strategy, AlgorithmSpec, InformationResource, ResourceDistribution,
    ResourceSet, SearchSpace, StrategyDistribution, StrategyMap, TargetFunction,
};

/// Float slack for analytic comparisons.
const EXACT: f64 = 1e-12;

/// Monte Carlo slack, in standard errors.
const MC_SIGMAS: f64 = 3.0;

/// Largest search space the harness enumerates targets over.
pub const MAX_ENUMERATION_N: usize = 12;

/// Sizes and sample counts for [`verify_all`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Largest |Ω| for checks that enumerate every target (2..=12).
    pub max_enum_n: usize,
    pub conservation_strategies: usize,
    pub theorem1_max_n: usize,
    pub theorem1_strategies: usize,
    pub lemma1_max_n: usize,
    pub lemma1_vectors: usize,
    pub lemma2_max_n: usize,
    pub lemma2_samples: usize,
    pub hoeffding_trials: usize,
    pub hoeffding_ensembles: usize,
    pub sandwich_sizes: Vec<usize>,
    pub sandwich_eps_points: usize,
    pub sandwich_samples: usize,
    pub pinsker_sizes: Vec<usize>,
    pub pinsker_samples: usize,
    pub jensen_ensembles: usize,
    /// Random ensembles per famine-style check.
    pub ensembles: usize,
    /// Monte Carlo draws per ensemble.
    pub mc_samples: usize,
    pub induced_runs: usize,
    pub simplex_draws: usize,
    /// Glob over check names; `P` also selects every check under `P.`.
    pub only: Option<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_enum_n: MAX_ENUMERATION_N,
            conservation_strategies: 100,
            theorem1_max_n: 16,
            theorem1_strategies: 10_000,
            lemma1_max_n: 10,
            lemma1_vectors: 100,
            lemma2_max_n: 16,
            lemma2_samples: 100_000,
            hoeffding_trials: 10_000,
            hoeffding_ensembles: 20,
            sandwich_sizes: vec![2, 4, 8, 16, 64],
            sandwich_eps_points: 11,
            sandwich_samples: 10_000,
            pinsker_sizes: vec![2, 4, 8, 16],
            pinsker_samples: 100_000,
            jensen_ensembles: 10_000,
            ensembles: 1_000,
            mc_samples: 2_000,
            induced_runs: 4_000,
            simplex_draws: 100_000,
            only: None,
        }
    }
}

impl VerifyConfig {
    /// Same checks at a fraction of the sample counts.
    pub fn quick() -> Self {
        Self {
            conservation_strategies: 10,
            theorem1_strategies: 500,
            lemma1_vectors: 10,
            lemma2_samples: 5_000,
            hoeffding_trials: 10_000,
            hoeffding_ensembles: 3,
            sandwich_samples: 1_000,
            pinsker_samples: 5_000,
            jensen_ensembles: 1_000,
            ensembles: 100,
            mc_samples: 1_000,
            induced_runs: 2_000,
            simplex_draws: 20_000,
            ..Self::default()
        }
    }

    /// Caps every size grid at `n`.
    pub fn with_max_n(mut self, n: usize) -> Self {
        self.max_enum_n = self.max_enum_n.min(n);
        self.theorem1_max_n = self.theorem1_max_n.min(n);
        self.lemma1_max_n = self.lemma1_max_n.min(n);
        self.lemma2_max_n = self.lemma2_max_n.min(n);
        self.sandwich_sizes.retain(|&s| s <= n);
        self.pinsker_sizes.retain(|&s| s <= n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(2..=MAX_ENUMERATION_N).contains(&self.max_enum_n) {
            return fail(format!(
                "max_enum_n must lie in 2..={MAX_ENUMERATION_N}, got {}",
                self.max_enum_n
            ));
        }
        for (name, n) in [
            ("theorem1_max_n", self.theorem1_max_n),
            ("lemma1_max_n", self.lemma1_max_n),
            ("lemma2_max_n", self.lemma2_max_n),
        ] {
            if n < 2 {
                return fail(format!("{name} must be at least 2, got {n}"));
            }
        }
        if self.lemma1_max_n > 20 {
            return fail(format!(
                "lemma1_max_n enumerates 2^n subsets; {} is too large",
                self.lemma1_max_n
            ));
        }
        for (name, v) in [
            ("conservation_strategies", self.conservation_strategies),
            ("theorem1_strategies", self.theorem1_strategies),
            ("lemma1_vectors", self.lemma1_vectors),
            ("lemma2_samples", self.lemma2_samples),
            ("hoeffding_trials", self.hoeffding_trials),
            ("hoeffding_ensembles", self.hoeffding_ensembles),
            ("sandwich_samples", self.sandwich_samples),
            ("pinsker_samples", self.pinsker_samples),
            ("jensen_ensembles", self.jensen_ensembles),
            ("ensembles", self.ensembles),
            ("mc_samples", self.mc_samples),
            ("induced_runs", self.induced_runs),
            ("simplex_draws", self.simplex_draws),
        ] {
            if v == 0 {
                return fail(format!("{name} must be positive"));
            }
        }
        if self.sandwich_eps_points < 2 {
            return fail("sandwich_eps_points must be at least 2".into());
        }
        for (name, sizes) in [
            ("sandwich_sizes", &self.sandwich_sizes),
            ("pinsker_sizes", &self.pinsker_sizes),
        ] {
            if sizes.is_empty() || sizes.iter().any(|&s| s < 2) {
                return fail(format!(
                    "{name} must be non-empty with every size at least 2"
                ));
            }
        }
        if self.pinsker_sizes.iter().any(|&s| s > 64) {
            return fail("pinsker_sizes above 64 are not supported".into());
        }
        if let Some(p) = &self.only {
            glob::Pattern::new(p)
                .map_err(|e| Error::Config(format!("bad --only pattern `{p}`: {e}")))?;
        }
        Ok(())
    }

    fn selects(&self, name: &str) -> bool {
        match &self.only {
            None => true,
            Some(p) => [p.clone(), format!("{p}.*")]
                .iter()
                .filter_map(|p| glob::Pattern::new(p).ok())
                .any(|pat| pat.matches(name)),
        }
    }
}

type CheckFn = fn(&VerifyConfig, u64) -> Result<CheckResult>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("bias.definitions", check_bias_definitions),
    (
        "bias_over_distributions.conservation",
        check_bias_over_distributions_conservation,
    ),
    (
        "bias_over_distributions.mean",
        check_bias_over_distributions_mean,
    ),
    ("conservation.bias_sum", check_conservation),
    ("expressivity.constructions", check_constructions),
    ("expressivity.kl_decomposition", check_kl_decomposition),
    ("expressivity.range_peak", check_range_peak),
    ("expressivity.sandwich", check_sandwich),
    ("expressivity.table_of_ranges", check_table_of_ranges),
    ("famine.applicable_targets", check_applicable_targets),
    ("famine.bias_free_proportion", check_bias_free_proportion),
    (
        "famine.favorable_biasing_distributions",
        check_favorable_biasing_distributions,
    ),
    (
        "famine.favorable_resources",
        check_famine_favorable_resources,
    ),
    ("figure2.bound_monotone", check_figure2),
    ("futility.bias_free_search", check_futility),
    ("geometric.divergence", check_geometric),
    (
        "hoeffding.difference_estimated_actual",
        check_hoeffding_demo,
    ),
    ("hoeffding.random_ensembles", check_hoeffding_random),
    (
        "improbability.bias_free_corollary",
        check_bias_free_corollary,
    ),
    ("improbability.favorable_resources", check_improbability),
    ("jensen.expected_expressivity", check_jensen),
    ("lemma1.min_mass_subset", check_lemma1),
    ("lemma2.max_target_mass", check_lemma2),
    ("lemma2.tight_example", check_lemma2_tight),
    ("search.induced_strategy", check_induced_strategy),
    ("search.per_query_success", check_per_query_success),
    ("simplex.exchangeability", check_simplex_exchangeability),
    ("theorem1.bias_upper_bound", check_theorem1),
    ("theorem1.extrema_oracle", check_extrema_oracle),
    ("theorem1.tight_example", check_theorem1_tight),
    ("tradeoff.pinsker", check_pinsker),
];

/// Names of every registered check, sorted.
pub fn check_names() -> Vec<&'static str> {
    let mut names: Vec<_> = CHECKS.iter().map(|(n, _)| *n).collect();
    names.sort_unstable();
    names
}

/// Runs every selected check and collects the results.
///
/// A check that errors is reported as failed with the error in its detail.
pub fn verify_all(config: &VerifyConfig) -> Result<VerificationReport> {
    config.validate()?;
    let start = Instant::now();
    let selected: Vec<_> = CHECKS
        .iter()
        .filter(|(name, _)| config.selects(name))
        .collect();
    if selected.is_empty() {
        return Err(Error::Config(format!(
            "no check matches `{}`",
            config.only.as_deref().unwrap_or_default()
        )));
    }
    let mut checks: Vec<CheckResult> = selected
        .par_iter()
        .map(|(name, f)| {
            let seed = named_seed(config.seed, name);
            let mut result = f(config, seed).unwrap_or_else(|e| CheckResult {
                name: name.to_string(),
                inputs: String::new(),
                observed: f64::NAN,
                bound_or_expected: f64::NAN,
                tolerance: 0.0,
                passed: false,
                detail: format!("error: {e}"),
            });
            result.name = name.to_string();
            result
        })
        .collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(VerificationReport {
        seed: config.seed,
        elapsed_ms: start.elapsed().as_millis() as u64,
        checks,
    })
}

// ---------------------------------------------------------------------------
// Generators

/// `count` results of `f`, item `i` drawing from stream `i` of `seed`.
fn par_draws<T, F>(count: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| f(&mut stream_rng(seed, i as u64), i))
        .collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn random_target(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<TargetFunction> {
    let mut idx: Vec<usize> = (0..n).collect();
    let (chosen, _) = idx.partial_shuffle(rng, k);
    TargetFunction::new(n, chosen.to_vec())
}

fn explicit_strategies(set: &ResourceSet) -> Result<StrategyMap> {
    set.strategies(AlgorithmSpec::UniformSampler, 1, 0)
}

/// A resource distribution with its strategies, a target and a success
/// threshold.
struct Ensemble {
    d: ResourceDistribution,
    strategies: StrategyMap,
    t: TargetFunction,
    q_min: f64,
}

impl Ensemble {
    fn q(&self) -> Result<Vec<f64>> {
        self.d
            .set()
            .ordered(&self.strategies)?
            .into_iter()
            .map(|s| per_query_success(&self.t, s))
            .collect()
    }

    /// `Pr(q(t, F) ≥ q_min)` for `F ~ D`, summed exactly.
    fn favorable_mass(&self) -> Result<f64> {
        Ok(self
            .q()?
            .iter()
            .zip(self.d.weights())
            .filter(|(q, _)| **q >= self.q_min - EXACT)
            .map(|(_, w)| w)
            .sum())
    }
}

/// A random ensemble over at most `max_n` elements: up to six resources,
/// some simulated epsilon-greedy fitness tasks, random weights and target.
fn random_ensemble(rng: &mut ChaCha8Rng, max_n: usize) -> Result<Ensemble> {
    let n = rng.random_range(2..=max_n);
    let size = rng.random_range(1..=6usize);
    let mut resources = Vec::with_capacity(size);
    for i in 0..size {
        if rng.random_bool(0.25) {
            let fitness = (0..n).map(|_| rng.random_range(0..4u8) as f64).collect();
            resources.push(InformationResource::fitness_task(
                format!("task{i}"),
                fitness,
                rng.random_range(1..=4),
            )?);
        } else {
            resources.push(InformationResource::explicit(
                format!("f{i}"),
                varied_strategy(rng, n),
            ));
        }
    }
    let set = ResourceSet::new(n, resources)?;
    let algorithm = AlgorithmSpec::EpsilonGreedy {
        gamma: rng.random(),
    };
    let strategies = set.strategies(algorithm, 32, rng.random())?;
    let weights = if rng.random_bool(0.5) {
        simplex_point(rng, size)
    } else {
        vec![1.0 / size as f64; size]
    };
    let d = ResourceDistribution::new(set, weights)?;
    let k = rng.random_range(1..n);
    let t = random_target(rng, n, k)?;
    let mut e = Ensemble {
        d,
        strategies,
        t,
        q_min: 1.0,
    };
    let q = e.q()?;
    e.q_min = match rng.random_range(0..3u8) {
        // Thresholds sitting exactly on a resource's success probability.
        // Float sums can land a hair above 1, past the valid range.
        0 => q[rng.random_range(0..q.len())].min(1.0),
        1 => 1.0 - rng.random::<f64>(),
        _ => (1.0 - e.t.p()) * (1.0 - rng.random::<f64>()),
    };
    if e.q_min <= 0.0 {
        e.q_min = 1.0 - rng.random::<f64>();
    }
    Ok(e)
}

/// A strategy with bias exactly `eps` on `t`: a random mixture of the two
/// extremal constructions, shuffled within the target and its complement.
fn strategy_with_bias(
    rng: &mut ChaCha8Rng,
    t: &TargetFunction,
    eps: f64,
) -> Result<StrategyDistribution> {
    let lo = min_entropy_construction(t, eps)?;
    let hi = max_entropy_construction(t, eps)?;
    let lambda: f64 = rng.random();
    let mut mass: Vec<f64> = lo
        .mass()
        .iter()
        .zip(hi.mass())
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect();
    let inside = t.indices().to_vec();
    let outside: Vec<usize> = (0..t.space_size()).filter(|&i| !t.contains(i)).collect();
    for block in [inside, outside] {
        let mut values: Vec<f64> = block.iter().map(|&i| mass[i]).collect();
        values.shuffle(rng);
        for (&i, v) in block.iter().zip(values) {
            mass[i] = v;
        }
    }
    Ok(StrategyDistribution::from_weights(mass))
}

/// An ensemble whose uniform distribution over `B` has zero bias on `t`:
/// resources come in pairs with target mass `p ± δ`, plus optionally one
/// with mass exactly `p`.
fn zero_bias_ensemble(rng: &mut ChaCha8Rng, max_n: usize) -> Result<Ensemble> {
    let n = rng.random_range(2..=max_n);
    let k = rng.random_range(1..n);
    let t = random_target(rng, n, k)?;
    let p = t.p();
    let room = p.min(1.0 - p);
    let mut strategies = Vec::new();
    for _ in 0..rng.random_range(1..=3u8) {
        let delta = room * rng.random::<f64>();
        strategies.push(strategy_with_bias(rng, &t, delta)?);
        strategies.push(strategy_with_bias(rng, &t, -delta)?);
    }
    if rng.random_bool(0.5) {
        strategies.push(strategy_with_bias(rng, &t, 0.0)?);
    }
    strategies.shuffle(rng);
    let set = ResourceSet::from_strategies(strategies)?;
    let map = explicit_strategies(&set)?;
    let mut e = Ensemble {
        d: ResourceDistribution::uniform(set),
        strategies: map,
        t,
        q_min: 1.0,
    };
    let top = max_of(e.q()?);
    e.q_min = if rng.random_bool(0.5) && top > 0.0 {
        top.min(1.0)
    } else {
        1.0 - rng.random::<f64>()
    };
    Ok(e)
}

/// Standard error for a proportion estimate tested against `bound`: the
/// larger of the sample value and the value it would have if the true
/// proportion sat exactly on the bound.
fn proportion_se(est: &MCEstimate, bound: f64) -> f64 {
    let b = bound.clamp(0.0, 1.0);
    est.std_error
        .max((b * (1.0 - b) / est.samples as f64).sqrt())
}

fn summarize_tightness(ratios: &[f64]) -> String {
    let finite: Vec<f64> = ratios.iter().copied().filter(|r| r.is_finite()).collect();
    if finite.is_empty() {
        return "no informative bounds".into();
    }
    let mean = finite.iter().sum::<f64>() / finite.len() as f64;
    format!(
        "tightness (actual/bound): mean {mean:.3}, max {:.3}",
        max_of(finite.iter().copied())
    )
}

// ---------------------------------------------------------------------------
// search

fn check_per_query_success(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let mut uniform_dev: f64 = 0.0;
    let mut targets = 0usize;
    for n in 1..=cfg.max_enum_n {
        let u = uniform_strategy(SearchSpace::new(n)?);
        for k in 1..=n {
            for t in enumerate_targets(n, k)? {
                uniform_dev =
                    uniform_dev.max((per_query_success(&t, &u)? - k as f64 / n as f64).abs());
                targets += 1;
            }
        }
    }
    let linearity = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = random_ensemble(rng, cfg.max_enum_n)?;
        let mixed = per_query_success(&e.t, &mix_strategies(&e.d, &e.strategies)?)?;
        let weighted: f64 = e.d.weights().iter().zip(e.q()?).map(|(w, q)| w * q).sum();
        Ok((mixed - weighted).abs())
    })?;
    let lin_dev = max_of(linearity);
    Ok(CheckResult::at_most(
        "",
        format!("n<={} all targets; {} mixtures", cfg.max_enum_n, cfg.ensembles),
        uniform_dev.max(lin_dev),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "uniform strategy: max |q - k/n| = {uniform_dev:.2e} over {targets} targets; mixture linearity: max deviation {lin_dev:.2e}"
    ))
    .require(uniform_dev <= 1e-15, "q(t, uniform) differs from k/n"))
}

fn check_induced_strategy(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    // Uniform sampler on arbitrary tasks.
    let uniform_dev = max_of(par_draws(50, seed, |rng, i| {
        let n = rng.random_range(1..=6);
        let fitness: Vec<f64> = (0..n).map(|_| rng.random_range(0..3u8) as f64).collect();
        let task =
            InformationResource::fitness_task(format!("u{i}"), fitness, rng.random_range(1..=5))?;
        let s = induced_strategy(&task, AlgorithmSpec::UniformSampler, 16, rng.random())?;
        Ok(max_of(s.mass().iter().map(|m| (m - 1.0 / n as f64).abs())))
    })?);

    // Epsilon-greedy against the exact history-tree expansion.
    let runs = cfg.induced_runs;
    let tolerance = 4.0 * 0.5 / (runs as f64).sqrt();
    let shapes = [(2usize, 4usize), (3, 3), (4, 3), (5, 2)];
    let mut worst: f64 = 0.0;
    let mut sums_ok = true;
    let mut deterministic = true;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    for (i, &(n, queries)) in shapes.iter().enumerate() {
        let mut rng = stream_rng(seed, 1_000 + i as u64);
        let fitness: Vec<f64> = (0..n).map(|_| rng.random_range(0..3u8) as f64).collect();
        let gamma: f64 = rng.random();
        let alg = AlgorithmSpec::EpsilonGreedy { gamma };
        let exact = exact_induced_strategy(&fitness, queries, alg)?;
        let task = InformationResource::fitness_task("task", fitness, queries)?;
        let run_seed = rng.random();
        let est = induced_strategy(&task, alg, runs, run_seed)?;
        let again = single.install(|| induced_strategy(&task, alg, runs, run_seed))?;
        deterministic &= est == again;
        sums_ok &= (est.mass().iter().sum::<f64>() - 1.0).abs() <= 1e-9;
        worst = worst.max(max_of(
            est.mass().iter().zip(&exact).map(|(a, b)| (a - b).abs()),
        ));
    }
    Ok(CheckResult::at_most("", format!("runs={runs}"), worst, 0.0, tolerance)
        .with_detail(format!(
            "epsilon-greedy vs exact history expansion: max deviation {worst:.4}; uniform sampler max deviation {uniform_dev:.2e}"
        ))
        .require(uniform_dev <= EXACT, "uniform sampler did not induce the uniform strategy")
        .require(deterministic, "result depends on worker-thread count")
        .require(sums_ok, "induced strategy does not sum to 1"))
}

fn check_simplex_exchangeability(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let m = cfg.simplex_draws;
    let mut worst_z: f64 = 0.0;
    for dim in [3usize, 5] {
        let draws: Vec<Vec<f64>> = (0..m as u64)
            .into_par_iter()
            .map(|i| sample_simplex(dim, seed.wrapping_add(i).wrapping_mul(dim as u64)))
            .collect::<Result<_>>()?;
        let d = dim as f64;
        let mean_exact = 1.0 / d;
        let var_exact = (d - 1.0) / (d * d * (d + 1.0));
        for c in 0..dim {
            let xs: Vec<f64> = draws.iter().map(|v| v[c]).collect();
            let mean = xs.iter().sum::<f64>() / m as f64;
            let centered: Vec<f64> = xs.iter().map(|x| x - mean).collect();
            let var = centered.iter().map(|x| x * x).sum::<f64>() / (m - 1) as f64;
            let m4 = centered.iter().map(|x| x.powi(4)).sum::<f64>() / m as f64;
            let se_mean = (var / m as f64).sqrt();
            let se_var = ((m4 - var * var).max(0.0) / m as f64).sqrt();
            worst_z = worst_z.max(((mean - mean_exact) / se_mean).abs());
            worst_z = worst_z.max(((var - var_exact) / se_var).abs());
        }
    }
    Ok(
        CheckResult::at_most("", format!("dims 3,5; {m} draws each"), worst_z, 4.0, 0.0)
            .with_detail(
                "largest |z| of coordinate means and variances against the uniform-simplex values",
            ),
    )
}

// ---------------------------------------------------------------------------
// bias

fn check_bias_definitions(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let devs = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = random_ensemble(rng, cfg.max_enum_n)?;
        let p = e.t.p();
        let b = bias(&e.d, &e.strategies, &e.t)?;
        let range = (-p - b).max(b - (1.0 - p));
        let set = e.d.set().clone();
        let over_set = set_bias(&set, &e.strategies, &e.t)?;
        let uniform_d = bias(
            &ResourceDistribution::uniform(set.clone()),
            &e.strategies,
            &e.t,
        )?;
        let sample: Vec<StrategyDistribution> =
            set.ordered(&e.strategies)?.into_iter().cloned().collect();
        let empirical = empirical_bias(&sample, &e.t)?;
        Ok((
            range,
            (over_set - uniform_d)
                .abs()
                .max((over_set - empirical).abs()),
        ))
    })?;
    let range = max_of(devs.iter().map(|d| d.0));
    let agree = max_of(devs.iter().map(|d| d.1));
    Ok(CheckResult::at_most("", format!("{} ensembles", cfg.ensembles), range, 0.0, EXACT)
        .with_detail(format!(
            "largest excursion outside [-p, 1-p]: {range:.2e}; set bias vs uniform-D bias vs sample mean: {agree:.2e}"
        ))
        .require(agree <= EXACT, "bias over B disagrees with bias under uniform D"))
}

fn check_conservation(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let count = cfg.conservation_strategies;
    let per = par_draws(count * cfg.max_enum_n, seed, |rng, i| {
        let n = i % cfg.max_enum_n + 1;
        let s = varied_strategy(rng, n);
        let mut worst: f64 = 0.0;
        for k in 1..=n {
            worst = worst.max(conservation_sum(&s, k)?.abs() / binomial(n, k) as f64);
        }
        Ok(worst)
    })?;
    Ok(CheckResult::at_most(
        "",
        format!("n<={}, all k, {count} strategies each", cfg.max_enum_n),
        max_of(per),
        0.0,
        1e-9,
    )
    .with_detail("observed = max |sum of bias over all k-hot targets| / C(n,k)"))
}

fn check_theorem1(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let sizes: Vec<usize> = (2..=cfg.theorem1_max_n).collect();
    let per = par_draws(sizes.len() * cfg.theorem1_strategies, seed, |rng, i| {
        let n = sizes[i % sizes.len()];
        let s = varied_strategy(rng, n);
        let (mut upper, mut lower, mut beyond) = (f64::NEG_INFINITY, f64::NEG_INFINITY, false);
        for k in 1..n {
            let e = bias_extrema(&s, k)?;
            let margin = e.sup_bias - e.theorem1_bound;
            if 2 * k > n {
                beyond |= margin > EXACT;
                continue;
            }
            upper = upper.max(margin);
            // sup ≤ ((p−1)/p)·inf  ⇔  inf ≤ (p/(p−1))·sup
            lower = lower.max(e.inf_bias - e.p / (e.p - 1.0) * e.sup_bias);
        }
        Ok((upper, lower, beyond))
    })?;
    let upper = max_of(per.iter().map(|v| v.0));
    let lower = max_of(per.iter().map(|v| v.1));
    let beyond = per.iter().filter(|v| v.2).count();
    Ok(CheckResult::at_most(
        "",
        format!(
            "n in 2..={}, 1<=k<=n/2, {} strategies per n",
            cfg.theorem1_max_n, cfg.theorem1_strategies
        ),
        upper,
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(sup - ((p-1)/p)·inf); max(inf - (p/(p-1))·sup) = {lower:.2e}; \
         not applicable for k > n/2, where {beyond} of {} strategies violate it (e.g. P=(0.5,0.5,0), k=2)",
        per.len()
    ))
    .require(lower <= EXACT, "inf exceeds (p/(p-1))·sup"))
}

fn check_theorem1_tight(_: &VerifyConfig, _: u64) -> Result<CheckResult> {
    let s = validate_strategy(4, &[0.5, 0.3, 0.2, 0.0])?;
    let e = bias_extrema(&s, 2)?;
    Ok(CheckResult::close_to(
        "",
        "P=(0.5,0.3,0.2,0), k=2",
        e.sup_bias,
        e.theorem1_bound,
        EXACT,
    )
    .with_detail(format!("sup {:.15}, inf {:.15}", e.sup_bias, e.inf_bias))
    .require((e.sup_bias - 0.3).abs() <= EXACT, "sup bias is not 0.3"))
}

fn check_extrema_oracle(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(20 * cfg.max_enum_n, seed, |rng, i| {
        let n = i % cfg.max_enum_n + 1;
        let s = varied_strategy(rng, n);
        let mass = s.mass();
        let mut worst: f64 = 0.0;
        let mut out_of_range: f64 = f64::NEG_INFINITY;
        for k in 1..=n {
            let p = k as f64 / n as f64;
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            for t in enumerate_targets(n, k)? {
                let b = t.indices().iter().map(|&j| mass[j]).sum::<f64>() - p;
                hi = hi.max(b);
                lo = lo.min(b);
                out_of_range = out_of_range.max((-p - b).max(b - (1.0 - p)));
            }
            let e = bias_extrema(&s, k)?;
            worst = worst
                .max((e.sup_bias - hi).abs())
                .max((e.inf_bias - lo).abs());
        }
        Ok((worst, out_of_range))
    })?;
    let range = max_of(per.iter().map(|v| v.1));
    Ok(CheckResult::at_most(
        "",
        format!("n<={}, all k, 20 strategies each", cfg.max_enum_n),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "sorted extrema vs enumeration; largest bias excursion outside [-p, 1-p]: {range:.2e}"
    ))
    .require(range <= EXACT, "bias outside [-p, 1-p]"))
}

fn check_hoeffding_demo(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let set = ResourceSet::from_strategies(vec![
        StrategyDistribution::point_mass(4, 0)?,
        StrategyDistribution::point_mass(4, 1)?,
    ])?;
    let strategies = explicit_strategies(&set)?;
    let d = ResourceDistribution::uniform(set);
    let t = TargetFunction::new(4, vec![0])?;
    let (n, eps, trials) = (100, 0.2, cfg.hoeffding_trials);
    let r = hoeffding_experiment(&d, &strategies, &t, n, eps, trials, seed)?;
    let exact = binomial_deviation_probability(n, 0.5, eps);
    let se = (exact * (1.0 - exact) / trials as f64).sqrt();
    let gap = (r.exceedance_frequency - exact).abs();
    Ok(CheckResult::at_most(
        "",
        format!("two point masses, t={{0}}, n={n}, eps={eps}, trials={trials}"),
        r.exceedance_frequency,
        r.bound,
        0.0,
    )
    .with_detail(format!(
        "exact binomial tail {exact:.3e}; |freq - exact| = {gap:.2e} vs 3 se = {:.2e}",
        MC_SIGMAS * se
    ))
    .require(
        gap <= MC_SIGMAS * se,
        "frequency disagrees with the exact binomial tail",
    ))
}

fn check_hoeffding_random(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let grid = [
        (10usize, 0.1),
        (10, 0.2),
        (10, 0.3),
        (50, 0.1),
        (50, 0.2),
        (50, 0.3),
    ];
    let trials = cfg.hoeffding_trials;
    let per = par_draws(cfg.hoeffding_ensembles, seed, |rng, _| {
        let e = random_ensemble(rng, cfg.max_enum_n)?;
        let mut worst = f64::NEG_INFINITY;
        for &(n, eps) in &grid {
            let r = hoeffding_experiment(&e.d, &e.strategies, &e.t, n, eps, trials, rng.random())?;
            let b = r.bound.min(1.0);
            let se = (b * (1.0 - b) / trials as f64).sqrt();
            worst = worst.max(r.exceedance_frequency - r.bound - MC_SIGMAS * se);
        }
        Ok(worst)
    })?;
    Ok(CheckResult::at_most(
        "",
        format!(
            "{} ensembles × n in {{10,50}} × eps in {{0.1,0.2,0.3}}, trials={trials}",
            cfg.hoeffding_ensembles
        ),
        max_of(per),
        0.0,
        EXACT,
    )
    .with_detail("observed = max(frequency - bound - 3 se)"))
}

// ---------------------------------------------------------------------------
// famine, improbability, futility

fn check_improbability(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = random_ensemble(rng, cfg.max_enum_n)?;
        let (est, bound) = favorable_resource_probability(
            &e.d,
            &e.strategies,
            &e.t,
            e.q_min,
            cfg.mc_samples,
            rng.random(),
        )?;
        let exact = e.favorable_mass()?;
        Ok((
            est.estimate - bound - MC_SIGMAS * proportion_se(&est, bound),
            exact - bound,
            exact / bound,
        ))
    })?;
    let analytic = max_of(per.iter().map(|v| v.1));
    let ratios: Vec<f64> = per.iter().map(|v| v.2).collect();
    Ok(CheckResult::at_most(
        "",
        format!("{} ensembles, {} draws each", cfg.ensembles, cfg.mc_samples),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(estimate - bound - 3 se); exact Pr - bound max {analytic:.2e}; {}",
        summarize_tightness(&ratios)
    ))
    .require(
        analytic <= EXACT,
        "exact probability exceeds (p + bias)/q_min",
    ))
}

fn check_bias_free_corollary(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = zero_bias_ensemble(rng, cfg.max_enum_n)?;
        let b = bias(&e.d, &e.strategies, &e.t)?;
        let bound = e.t.p() / e.q_min;
        let (est, _) = favorable_resource_probability(
            &e.d,
            &e.strategies,
            &e.t,
            e.q_min,
            cfg.mc_samples,
            rng.random(),
        )?;
        Ok((
            est.estimate - bound - MC_SIGMAS * proportion_se(&est, bound),
            e.favorable_mass()? - bound,
            b.abs(),
        ))
    })?;
    let analytic = max_of(per.iter().map(|v| v.1));
    let bias_dev = max_of(per.iter().map(|v| v.2));
    Ok(CheckResult::at_most(
        "",
        format!("{} zero-bias ensembles", cfg.ensembles),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(estimate - p/q_min - 3 se); exact max {analytic:.2e}; |bias| max {bias_dev:.2e}"
    ))
    .require(analytic <= EXACT, "exact probability exceeds p/q_min")
    .require(bias_dev <= EXACT, "generator produced a biased ensemble"))
}

fn check_famine_favorable_resources(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = random_ensemble(rng, cfg.max_enum_n)?;
        let set = e.d.set();
        let r = famine_proportion(set, &e.strategies, &e.t, e.q_min)?;
        let q = e.q()?;
        let hits = q.iter().filter(|&&v| v >= e.q_min - EXACT).count() as f64 / q.len() as f64;
        let bound = q.iter().sum::<f64>() / q.len() as f64 / e.q_min;
        let agree = (hits - r.proportion).abs().max((bound - r.bound).abs());
        Ok((
            r.proportion - r.bound.min(1.0),
            agree,
            r.proportion / r.bound,
        ))
    })?;
    let agree = max_of(per.iter().map(|v| v.1));
    let ratios: Vec<f64> = per.iter().map(|v| v.2).collect();
    Ok(CheckResult::at_most(
        "",
        format!("{} ensembles", cfg.ensembles),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(proportion - bound); recomputation gap {agree:.2e}; {}",
        summarize_tightness(&ratios)
    ))
    .require(
        agree <= EXACT,
        "proportion or bound disagrees with direct recomputation",
    ))
}

fn check_bias_free_proportion(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = zero_bias_ensemble(rng, cfg.max_enum_n)?;
        let r = famine_proportion(e.d.set(), &e.strategies, &e.t, e.q_min)?;
        Ok(r.proportion - e.t.p() / e.q_min)
    })?;
    Ok(CheckResult::at_most(
        "",
        format!("{} zero-bias sets", cfg.ensembles),
        max_of(per),
        0.0,
        EXACT,
    )
    .with_detail("observed = max(proportion - p/q_min)"))
}

fn check_applicable_targets(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = random_ensemble(rng, cfg.max_enum_n)?;
        let pbar = mix_strategies(&e.d, &e.strategies)?;
        let k = e.t.k();
        let sup = bias_extrema(&pbar, k)?.sup_bias;
        // Half the time put the threshold at the best target's bias.
        let q_min = if rng.random_bool(0.5) && sup > 0.0 {
            sup
        } else {
            e.q_min
        };
        let r = applicable_targets_proportion(&pbar, k, q_min)?;
        Ok((r.proportion - r.bound, r.proportion / r.bound))
    })?;
    let ratios: Vec<f64> = per.iter().map(|v| v.1).collect();
    Ok(CheckResult::at_most(
        "",
        format!("{} ensembles, all targets of size k", cfg.ensembles),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(proportion - p/(p+q_min)); {}",
        summarize_tightness(&ratios)
    )))
}

fn check_favorable_biasing_distributions(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = random_ensemble(rng, cfg.max_enum_n)?;
        let headroom = max_of(e.q()?) - e.t.p();
        // Thresholds some distributions can actually reach.
        let q_min = if headroom > 1e-6 && rng.random_bool(0.75) {
            headroom * (1.0 - rng.random::<f64>())
        } else {
            e.q_min
        };
        let (est, bound) = favorable_distributions_estimate(
            e.d.set(),
            &e.strategies,
            &e.t,
            q_min,
            cfg.mc_samples,
            rng.random(),
        )?;
        Ok((
            est.estimate - bound - MC_SIGMAS * proportion_se(&est, bound),
            est.estimate / bound,
        ))
    })?;
    let ratios: Vec<f64> = per.iter().map(|v| v.1).collect();
    Ok(CheckResult::at_most(
        "",
        format!(
            "{} ensembles, {} simplex draws each",
            cfg.ensembles, cfg.mc_samples
        ),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(estimate - bound - 3 se); {}",
        summarize_tightness(&ratios)
    )))
}

fn check_futility(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(2 * cfg.ensembles, seed, |rng, i| {
        let zero = i % 2 == 1;
        let e = if zero {
            zero_bias_ensemble(rng, cfg.max_enum_n)?
        } else {
            random_ensemble(rng, cfg.max_enum_n)?
        };
        let p = e.t.p();
        let b = bias(&e.d, &e.strategies, &e.t)?;
        let via_mixture = per_query_success(&e.t, &mix_strategies(&e.d, &e.strategies)?)? - p;
        let via_resources: f64 =
            e.d.weights()
                .iter()
                .zip(e.q()?)
                .map(|(w, q)| w * q)
                .sum::<f64>()
                - p;
        let marginal = if zero { via_mixture.abs() } else { 0.0 };
        Ok((
            (via_mixture - b).abs().max((via_resources - b).abs()),
            marginal,
        ))
    })?;
    let marginal = max_of(per.iter().map(|v| v.1));
    Ok(CheckResult::at_most(
        "",
        format!("{} ensembles + {} zero-bias ensembles", cfg.ensembles, cfg.ensembles),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max |q(t, mixture) - p - bias|; zero-bias ensembles: max |q - p| = {marginal:.2e}"
    ))
    .require(marginal <= EXACT, "zero-bias ensemble has marginal success different from p"))
}

fn check_bias_over_distributions_mean(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = random_ensemble(rng, cfg.max_enum_n)?;
        let set = e.d.set();
        let est =
            mean_bias_over_distributions(set, &e.strategies, &e.t, cfg.mc_samples, rng.random())?;
        let exact = set_bias(set, &e.strategies, &e.t)?;
        // Single-resource sets have zero spread; float noise alone must
        // not count as a deviation.
        Ok((est.estimate - exact) / est.std_error.max(EXACT))
    })?;
    let pooled = per.iter().sum::<f64>() / (per.len() as f64).sqrt();
    let max_z = max_of(per.iter().map(|z| z.abs()));
    let beyond = per.iter().filter(|z| z.abs() > MC_SIGMAS).count();

    let demo = ResourceSet::from_strategies(vec![
        StrategyDistribution::point_mass(4, 0)?,
        uniform_strategy(SearchSpace::new(4)?),
    ])?;
    let demo_est = mean_bias_over_distributions(
        &demo,
        &explicit_strategies(&demo)?,
        &TargetFunction::new(4, vec![0])?,
        cfg.mc_samples.max(10_000),
        named_seed(seed, "demo"),
    )?;
    let demo_gap = (demo_est.estimate - 0.375).abs();

    Ok(CheckResult::at_most(
        "",
        format!("{} ensembles, {} simplex draws each", cfg.ensembles, cfg.mc_samples),
        pooled.abs(),
        MC_SIGMAS,
        0.0,
    )
    .with_detail(format!(
        "observed = |pooled z| of estimate vs bias(B,t); max |z| {max_z:.2}; {beyond} of {} beyond 3 se \
         (about {:.1} expected by chance); demo estimate {:.5} ± {:.5} vs 0.375",
        per.len(),
        0.0027 * per.len() as f64,
        demo_est.estimate,
        demo_est.std_error
    ))
    .require(max_z <= 5.0, "an ensemble deviates by more than 5 se")
    .require(demo_gap <= MC_SIGMAS * demo_est.std_error, "demo estimate misses 0.375"))
}

fn check_bias_over_distributions_conservation(
    cfg: &VerifyConfig,
    seed: u64,
) -> Result<CheckResult> {
    let max_n = cfg.max_enum_n.min(8);
    let per = par_draws(20, seed, |rng, _| {
        let e = random_ensemble(rng, max_n)?;
        let n = e.t.space_size();
        let k = rng.random_range(1..=n);
        let draw_seed: u64 = rng.random();
        let mut total = 0.0;
        for t in enumerate_targets(n, k)? {
            total += mean_bias_over_distributions(
                e.d.set(),
                &e.strategies,
                &t,
                cfg.mc_samples,
                draw_seed,
            )?
            .estimate;
        }
        Ok(total.abs() / binomial(n, k) as f64)
    })?;
    Ok(CheckResult::at_most(
        "",
        format!("20 ensembles, n<={max_n}"),
        max_of(per),
        0.0,
        1e-9,
    )
    .with_detail(
        "observed = max |sum over k-hot targets of the simplex-mean bias| / C(n,k), common draws",
    ))
}

fn check_geometric(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.ensembles, seed, |rng, _| {
        let e = random_ensemble(rng, cfg.max_enum_n)?;
        let pbar = mix_strategies(&e.d, &e.strategies)?;
        let g = geometric_bound(&e.t, &pbar, e.q_min)?;
        let root_k = (e.t.k() as f64).sqrt();
        let alignment = per_query_success(&e.t, &pbar)? - root_k * g.cos_theta;
        let (est, _) = favorable_resource_probability(
            &e.d,
            &e.strategies,
            &e.t,
            e.q_min,
            cfg.mc_samples,
            rng.random(),
        )?;
        Ok((
            est.estimate - g.bound - MC_SIGMAS * proportion_se(&est, g.bound),
            (e.favorable_mass()? - g.bound).max(alignment),
        ))
    })?;
    let analytic = max_of(per.iter().map(|v| v.1));
    Ok(CheckResult::at_most(
        "",
        format!("{} ensembles, {} draws each", cfg.ensembles, cfg.mc_samples),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(estimate - sqrt(k)cos(theta)/q_min - 3 se); exact and alignment margin {analytic:.2e}"
    ))
    .require(analytic <= EXACT, "exact probability or t·P exceeds the cosine bound"))
}

fn check_figure2(_: &VerifyConfig, _: u64) -> Result<CheckResult> {
    let ps: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let mut worst_rise = f64::NEG_INFINITY;
    let mut negative = 0usize;
    for inf in [-1.0, -0.5, -0.25, -0.1, -0.01, 0.0] {
        let bounds: Vec<f64> = ps.iter().map(|&p| theorem1_factor(p) * inf).collect();
        negative += bounds.iter().filter(|&&b| b < 0.0).count();
        for w in bounds.windows(2) {
            worst_rise = worst_rise.max(w[1] - w[0]);
        }
    }
    Ok(
        CheckResult::at_most("", "p = 0.01..0.99, inf in [-1, 0]", worst_rise, 0.0, EXACT)
            .with_detail("observed = largest increase of ((p-1)/p)·inf between consecutive p")
            .require(negative == 0, "negative bound for non-positive inf"),
    )
}

// ---------------------------------------------------------------------------
// lemmas

fn check_lemma1(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let sizes: Vec<usize> = (2..=cfg.lemma1_max_n).collect();
    let per = par_draws(sizes.len() * cfg.lemma1_vectors, seed, |rng, i| {
        let n = sizes[i % sizes.len()];
        let masses: Vec<f64> = match rng.random_range(0..3u8) {
            0 => {
                let scale = rng.random_range(0.1..10.0);
                simplex_point(rng, n)
                    .into_iter()
                    .map(|v| v * scale)
                    .collect()
            }
            // Small integers: many ties and zeros.
            1 => (0..n).map(|_| rng.random_range(0..3u8) as f64).collect(),
            _ => varied_strategy(rng, n).into_inner(),
        };
        let total: f64 = masses.iter().sum();
        let slack = EXACT * total.max(1.0);
        let mut best = vec![f64::INFINITY; n + 1];
        for mask in 0u32..(1 << n) {
            let size = mask.count_ones() as usize;
            let m: f64 = (0..n)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| masses[j])
                .sum();
            best[size] = best[size].min(m);
        }
        let (mut margin, mut gap, mut well_formed) = (f64::NEG_INFINITY, 0.0f64, true);
        for k in 1..n {
            let subset = min_mass_subset(&masses, k)?;
            well_formed &=
                subset.len() == k && subset.windows(2).all(|w| w[0] < w[1]) && subset[k - 1] < n;
            let m: f64 = subset.iter().map(|&j| masses[j]).sum();
            margin = margin.max((m - k as f64 / n as f64 * total) / total.max(1.0));
            gap = gap.max((m - best[k]).abs() - slack);
        }
        Ok((margin, gap, well_formed))
    })?;
    let gap = max_of(per.iter().map(|v| v.1));
    Ok(CheckResult::at_most(
        "",
        format!("n in 2..={}, all k<n, {} vectors per n", cfg.lemma1_max_n, cfg.lemma1_vectors),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max((subset mass - (k/n)·total)/max(total,1)); gap to exhaustive minimum {:.2e}",
        gap.max(0.0)
    ))
    .require(gap <= 0.0, "subset is not the minimum-mass k-subset")
    .require(per.iter().all(|v| v.2), "subset is not k distinct sorted indices"))
}

fn check_lemma2(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let sizes: Vec<usize> = (2..=cfg.lemma2_max_n).collect();
    let per = par_draws(cfg.lemma2_samples, seed, |rng, i| {
        let n = sizes[i % sizes.len()];
        let s = varied_strategy(rng, n);
        let (mut worst, mut beyond) = (f64::NEG_INFINITY, false);
        for k in 1..n {
            let (sup, bound) = lemma2_check(&s, k)?;
            if 2 * k > n {
                beyond |= sup - bound > EXACT;
            } else {
                worst = worst.max(sup - bound);
            }
        }
        Ok((worst, beyond))
    })?;
    let beyond = per.iter().filter(|v| v.1).count();
    Ok(CheckResult::at_most(
        "",
        format!(
            "{} distributions, n in 2..={}, 1<=k<=n/2",
            cfg.lemma2_samples, cfg.lemma2_max_n
        ),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(sum of k largest - (1 - ((1-p)/p)·sum of k smallest)); \
         not applicable for k > n/2, where {beyond} of {} distributions violate it",
        per.len()
    )))
}

fn check_lemma2_tight(_: &VerifyConfig, _: u64) -> Result<CheckResult> {
    let (sup, bound) = lemma2_check(&validate_strategy(4, &[0.7, 0.1, 0.1, 0.1])?, 1)?;
    Ok(
        CheckResult::close_to("", "P=(0.7,0.1,0.1,0.1), k=1", sup, bound, EXACT)
            .with_detail(format!("sup mass {sup:.15}, bound {bound:.15}"))
            .require((sup - 0.7).abs() <= EXACT, "sup mass is not 0.7"),
    )
}

// ---------------------------------------------------------------------------
// expressivity

fn eps_grid(p: f64, points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |j| -p + j as f64 / (points - 1) as f64)
}

fn check_constructions(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let cases: Vec<(usize, usize)> = cfg
        .sandwich_sizes
        .iter()
        .flat_map(|&n| (1..n).map(move |k| (n, k)))
        .collect();
    let per = par_draws(cases.len(), seed, |rng, i| {
        let (n, k) = cases[i];
        let t = random_target(rng, n, k)?;
        let (mut bias_err, mut entropy_err): (f64, f64) = (0.0, 0.0);
        for eps in eps_grid(t.p(), cfg.sandwich_eps_points) {
            let range = expressivity_range(n, k, eps)?;
            let lo = min_entropy_construction(&t, eps)?;
            let hi = max_entropy_construction(&t, eps)?;
            bias_err = bias_err
                .max((bias_of_strategy(&lo, &t)? - eps).abs())
                .max((bias_of_strategy(&hi, &t)? - eps).abs());
            entropy_err = entropy_err
                .max((entropy_bits(&lo) - range.lower).abs())
                .max((entropy_bits(&hi) - range.upper).abs());
        }
        Ok((bias_err, entropy_err))
    })?;
    let entropy_err = max_of(per.iter().map(|v| v.1));
    Ok(CheckResult::at_most(
        "",
        format!("n in {:?}, all k<n, {} eps values", cfg.sandwich_sizes, cfg.sandwich_eps_points),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max |bias - eps| of both constructions; max entropy error vs range endpoints {entropy_err:.2e}"
    ))
    .require(entropy_err <= 1e-9, "construction entropy differs from its range endpoint"))
}

fn check_sandwich(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.sandwich_samples, seed, |rng, _| {
        let n = cfg.sandwich_sizes[rng.random_range(0..cfg.sandwich_sizes.len())];
        let k = rng.random_range(1..n);
        let t = random_target(rng, n, k)?;
        let p = t.p();
        let eps = -p + rng.random::<f64>();
        let s = strategy_with_bias(rng, &t, eps)?;
        let range = expressivity_range(n, k, eps)?;
        let h = entropy_bits(&s);
        Ok((
            (range.lower - h).max(h - range.upper),
            (bias_of_strategy(&s, &t)? - eps).abs(),
        ))
    })?;
    let bias_err = max_of(per.iter().map(|v| v.1));
    Ok(CheckResult::at_most(
        "",
        format!(
            "{} strategies with prescribed bias, n in {:?}",
            cfg.sandwich_samples, cfg.sandwich_sizes
        ),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = largest excursion of H outside [lower, upper]; bias error {bias_err:.2e}"
    ))
    .require(
        bias_err <= EXACT,
        "generated strategy misses its prescribed bias",
    ))
}

fn check_range_peak(cfg: &VerifyConfig, _: u64) -> Result<CheckResult> {
    let mut worst_peak: f64 = 0.0;
    let mut worst_rise = f64::NEG_INFINITY;
    for &n in &cfg.sandwich_sizes {
        for k in 1..n {
            let p = k as f64 / n as f64;
            let peak = expressivity_range(n, k, 0.0)?.upper;
            worst_peak = worst_peak.max((peak - (n as f64).log2()).abs());
            for eps in eps_grid(p, cfg.sandwich_eps_points) {
                worst_rise = worst_rise.max(expressivity_range(n, k, eps)?.upper - peak);
            }
        }
    }
    Ok(CheckResult::at_most(
        "",
        format!("n in {:?}", cfg.sandwich_sizes),
        worst_rise,
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(upper(eps) - upper(0)); |upper(0) - log2 n| max {worst_peak:.2e}"
    ))
    .require(
        worst_peak <= EXACT,
        "upper endpoint at zero bias is not log2 n",
    ))
}

fn check_table_of_ranges(_: &VerifyConfig, _: u64) -> Result<CheckResult> {
    let rows = table_of_ranges(4, 2)?;
    let expected = [(0.0, 0.0, 1.0), (0.5, 1.0, 2.0), (1.0, 0.0, 1.0)];
    let mut worst: f64 = 0.0;
    for (r, (mass, lo, hi)) in rows.iter().zip(expected) {
        worst = worst
            .max((r.expected_mass_on_target - mass).abs())
            .max((r.lower_bits - lo).abs())
            .max((r.upper_bits - hi).abs());
    }
    let degenerate = table_of_ranges(2, 1)?;
    let degenerate_ok = degenerate[0].lower_bits == 0.0
        && degenerate[0].upper_bits == 0.0
        && degenerate[1].lower_bits == 1.0
        && degenerate[1].upper_bits == 1.0
        && degenerate[2].lower_bits == 0.0
        && degenerate[2].upper_bits == 0.0;
    let middle = table_of_ranges(8, 2)?[1];
    Ok(CheckResult::at_most("", "n=4, k=2", worst, 0.0, 0.0)
        .with_detail(format!(
            "rows [0,1], [1,2], [0,1] bits; (8,2) middle row [{:.6}, {:.6}]",
            middle.lower_bits, middle.upper_bits
        ))
        .require(degenerate_ok, "(2,1) rows are not [0,0], [1,1], [0,0]")
        .require(
            (middle.lower_bits - 0.811_278_124_459_132_8).abs() <= 1e-12
                && (middle.upper_bits - 3.0).abs() <= 1e-12,
            "(8,2) middle row is not [H(0.25), 3]",
        ))
}

fn check_kl_decomposition(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.sandwich_samples, seed, |rng, _| {
        let n = rng.random_range(1..=64);
        let s = varied_strategy(rng, n);
        Ok((kl_to_uniform(&s) + entropy_bits(&s) - (n as f64).log2()).abs())
    })?;
    Ok(CheckResult::at_most(
        "",
        format!("{} strategies, n<=64", cfg.sandwich_samples),
        max_of(per),
        0.0,
        EXACT,
    )
    .with_detail("observed = max |KL(P||U) + H(P) - log2 n|"))
}

fn check_pinsker(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    const ENUMERATED: usize = 256;
    let mut bias_margin = f64::NEG_INFINITY;
    let mut entropy_margin = f64::NEG_INFINITY;
    let mut oracle_gap: f64 = 0.0;
    for &n in &cfg.pinsker_sizes {
        let ks: Vec<usize> = if n / 2 == 1 { vec![1] } else { vec![1, n / 2] };
        let per = par_draws(
            cfg.pinsker_samples,
            named_seed(seed, &n.to_string()),
            |rng, i| {
                let s = StrategyDistribution::from_weights(simplex_point(rng, n));
                let h = entropy_bits(&s);
                let cap = tradeoff_bias_upper(&s);
                let (mut bm, mut em, mut gap) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64);
                for &k in &ks {
                    // The largest |bias| over τ_k is the binding target for both bounds.
                    let e = bias_extrema(&s, k)?;
                    let worst = e.sup_bias.max(-e.inf_bias);
                    bm = bm.max(worst - cap);
                    em = em.max(h - tradeoff_expressivity_upper(n, worst)?);
                    if i < ENUMERATED {
                        let mut enumerated: f64 = 0.0;
                        for t in enumerate_targets(n, k)? {
                            let b = bias_of_strategy(&s, &t)?;
                            enumerated = enumerated.max(b.abs());
                            bm = bm.max(b.abs() - cap);
                            em = em.max(h - tradeoff_expressivity_upper(n, b)?);
                        }
                        gap = gap.max((enumerated - worst).abs());
                    }
                }
                Ok((bm, em, gap))
            },
        )?;
        bias_margin = bias_margin.max(max_of(per.iter().map(|v| v.0)));
        entropy_margin = entropy_margin.max(max_of(per.iter().map(|v| v.1)));
        oracle_gap = oracle_gap.max(max_of(per.iter().map(|v| v.2)));
    }
    Ok(CheckResult::at_most(
        "",
        format!("n in {:?}, k in {{1, n/2}}, {} simplex draws each", cfg.pinsker_sizes, cfg.pinsker_samples),
        bias_margin.max(entropy_margin),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "max(|bias| - sqrt(KL/2)) = {bias_margin:.3e}; max(H - (log2 n - 2 bias^2)) = {entropy_margin:.3e}; \
         extrema vs enumeration gap {oracle_gap:.2e} on the first {ENUMERATED} draws"
    ))
    .require(oracle_gap <= EXACT, "sorted extrema disagree with enumeration"))
}

fn check_jensen(cfg: &VerifyConfig, seed: u64) -> Result<CheckResult> {
    let per = par_draws(cfg.jensen_ensembles, seed, |rng, _| {
        let n = rng.random_range(2..=16);
        let a = varied_strategy(rng, n);
        let b = if rng.random_bool(0.1) {
            a.clone()
        } else {
            varied_strategy(rng, n)
        };
        let set = ResourceSet::from_strategies(vec![a, b])?;
        let strategies = explicit_strategies(&set)?;
        let d = ResourceDistribution::new(set, simplex_point(rng, 2))?;
        let mixture = mix_strategies(&d, &strategies)?;
        let jensen = expected_entropy(&d, &strategies)? - entropy_bits(&mixture);
        // Compared squared: both bounds are square roots of nearly equal
        // numbers when the resources coincide, and the root amplifies ulps.
        let corollary = expected_expressivity_bias_upper(&d, &strategies)?.powi(2);
        let theorem = tradeoff_bias_upper(&mixture).powi(2);
        Ok((jensen, theorem - corollary))
    })?;
    let bounds = max_of(per.iter().map(|v| v.1));
    Ok(CheckResult::at_most(
        "",
        format!("{} two-resource ensembles", cfg.jensen_ensembles),
        max_of(per.iter().map(|v| v.0)),
        0.0,
        EXACT,
    )
    .with_detail(format!(
        "observed = max(E_D[H(P_F)] - H(P_D)); max(theorem bound^2 - corollary bound^2) = {bounds:.2e}"
    ))
    .require(bounds <= EXACT, "corollary bias bound below the theorem's"))
}
