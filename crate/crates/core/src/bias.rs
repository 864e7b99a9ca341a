//! Bias of a search algorithm toward a target, and the bounds that
//! constrain it.
//!
//! For an averaged strategy `P̄` and a k-hot target `t` over Ω, the bias is
//! `tᵀP̄ − p` with `p = k/|Ω|`: how much more often than a uniform sampler a
//! query lands in the target. Over a resource distribution `D` the strategy
//! is the mixture `P̄_D`; over a finite set `B` it is the uniform mixture.
//!
//! Everything here is exact arithmetic over small vectors except the
//! simplex integrals, which are estimated by Monte Carlo and returned as
//! [`MCEstimate`]s.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rng::stream_rng;
use crate::sampling::simplex_point;
use crate::search::{
    enumerate_targets, mix_strategies, per_query_success, sample_index, ResourceDistribution,
    ResourceSet, StrategyDistribution, StrategyMap, TargetFunction,
};

/// Absolute slack applied to threshold and bound comparisons.
pub const FLOAT_SLACK: f64 = 1e-12;

/// Monte Carlo samples drawn per generator stream.
const MC_BLOCK: usize = 1024;

/// Supremum and infimum of the bias over all k-hot targets, with the
/// upper bound on the supremum implied by the infimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasExtrema {
    pub inf_bias: f64,
    pub sup_bias: f64,
    /// `((p − 1)/p) · inf_bias`.
    pub theorem1_bound: f64,
    pub p: f64,
}

/// Outcome of a concentration experiment for the empirical bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoeffdingResult {
    pub sample_size: usize,
    pub epsilon: f64,
    /// `2·exp(−2·n·ε²)`.
    pub bound: f64,
    pub exceedance_frequency: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamineReport {
    pub proportion: f64,
    pub bound: f64,
    pub q_min: f64,
}

impl FamineReport {
    pub fn holds(&self) -> bool {
        self.proportion <= self.bound.min(1.0) + FLOAT_SLACK
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl MCEstimate {
    /// Sample mean and `s/√m`, with `s` the unbiased sample deviation.
    pub fn from_values(values: &[f64]) -> Self {
        let m = values.len();
        assert!(m > 0, "no Monte Carlo samples");
        let mean = values.iter().sum::<f64>() / m as f64;
        let std_error = if m > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (m - 1) as f64).sqrt() / (m as f64).sqrt()
        } else {
            0.0
        };
        Self {
            estimate: mean,
            std_error,
            samples: m,
        }
    }
}

/// Alignment between a target vector and an expected strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricReport {
    pub cos_theta: f64,
    /// `√k · cos θ / q_min`.
    pub bound: f64,
}

fn check_q_min(q_min: f64) -> Result<()> {
    if q_min.is_finite() && q_min > 0.0 && q_min <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("q_min must lie in (0, 1], got {q_min}")))
    }
}

/// Per-resource success probabilities `q(t, f)` in set order.
fn success_by_resource(
    set: &ResourceSet,
    strategies: &StrategyMap,
    t: &TargetFunction,
) -> Result<Vec<f64>> {
    set.ordered(strategies)?
        .into_iter()
        .map(|s| per_query_success(t, s))
        .collect()
}

/// Runs `f` on `samples` draws split into fixed blocks, each block on its
/// own stream, and returns the values in draw order.
fn mc_values<F>(samples: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let blocks = samples.div_ceil(MC_BLOCK);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let len = MC_BLOCK.min(samples - b * MC_BLOCK);
            (0..len).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// `tᵀP̄ − p` for an already-mixed strategy.
pub fn bias_of_strategy(pbar: &StrategyDistribution, t: &TargetFunction) -> Result<f64> {
    Ok(per_query_success(t, pbar)? - t.p())
}

/// `bias(D, t)`; a uniform `D` gives `bias(B, t)`.
pub fn bias(d: &ResourceDistribution, strategies: &StrategyMap, t: &TargetFunction) -> Result<f64> {
    bias_of_strategy(&mix_strategies(d, strategies)?, t)
}

/// `bias(B, t)` under the uniform distribution over the set.
pub fn set_bias(set: &ResourceSet, strategies: &StrategyMap, t: &TargetFunction) -> Result<f64> {
    bias(&ResourceDistribution::uniform(set.clone()), strategies, t)
}

/// Bias of a finite sample of strategies: mean of `tᵀP̄_{X_i}` minus `p`.
pub fn empirical_bias(sample: &[StrategyDistribution], t: &TargetFunction) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut total = 0.0;
    for s in sample {
        total += per_query_success(t, s)?;
    }
    Ok(total / sample.len() as f64 - t.p())
}

/// `2·exp(−2·n·ε²)`.
pub fn hoeffding_bound(n: usize, epsilon: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(2.0 * (-2.0 * n as f64 * epsilon * epsilon).exp())
}

/// Draws `trials` samples of `n` resources iid from `D` and reports how
/// often the empirical bias misses `bias(D, t)` by at least `ε`.
#[allow(clippy::too_many_arguments)]
pub fn hoeffding_experiment(
    d: &ResourceDistribution,
    strategies: &StrategyMap,
    t: &TargetFunction,
    n: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<HoeffdingResult> {
    let bound = hoeffding_bound(n, epsilon)?;
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let q = success_by_resource(d.set(), strategies, t)?;
    let weights = d.weights();
    let expected: f64 = weights.iter().zip(&q).map(|(w, q)| w * q).sum();
    let threshold = epsilon - FLOAT_SLACK.min(1e-9 * epsilon);

    let exceed: usize = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial);
            let mut total = 0.0;
            for _ in 0..n {
                total += q[sample_index(weights, rng.random::<f64>())];
            }
            usize::from((total / n as f64 - expected).abs() >= threshold)
        })
        .sum();

    Ok(HoeffdingResult {
        sample_size: n,
        epsilon,
        bound,
        exceedance_frequency: exceed as f64 / trials as f64,
        trials,
    })
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 ≤ k ≤ |Ω|, got k = {k}, |Ω| = {n}")));
    }
    Ok(())
}

/// Sum of the `k` largest and `k` smallest entries.
pub(crate) fn extreme_sums(mass: &[f64], k: usize) -> (f64, f64) {
    let mut sorted = mass.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let low: f64 = sorted[..k].iter().sum();
    let high: f64 = sorted[sorted.len() - k..].iter().sum();
    (high, low)
}

/// Sup and inf of the bias over all k-hot targets, via the k largest and
/// k smallest entries of `pbar`.
///
/// `theorem1_bound` bounds `sup_bias` only when `k ≤ n/2`. For larger
/// targets it can fail: `(0.5, 0.5, 0)` with `k = 2` has sup bias `1/3`
/// against a bound of `1/12`.
pub fn bias_extrema(pbar: &StrategyDistribution, k: usize) -> Result<BiasExtrema> {
    let n = pbar.space_size();
    check_k(n, k)?;
    let p = k as f64 / n as f64;
    if k == n {
        return Ok(BiasExtrema {
            inf_bias: 0.0,
            sup_bias: 0.0,
            theorem1_bound: 0.0,
            p,
        });
    }
    let (high, low) = extreme_sums(pbar.mass(), k);
    let inf_bias = low - p;
    Ok(BiasExtrema {
        inf_bias,
        sup_bias: high - p,
        theorem1_bound: theorem1_factor(p) * inf_bias,
        p,
    })
}

/// The factor `(p − 1)/p` relating the sup of the bias to its inf.
pub fn theorem1_factor(p: f64) -> f64 {
    (p - 1.0) / p
}

/// `Σ_{t ∈ τ_k} bias(P̄, t)`, by enumeration.
pub fn conservation_sum(pbar: &StrategyDistribution, k: usize) -> Result<f64> {
    let n = pbar.space_size();
    check_k(n, k)?;
    let p = k as f64 / n as f64;
    let mass = pbar.mass();
    Ok(enumerate_targets(n, k)?.map(|t| t.dot(mass) - p).sum())
}

/// `(p + bias)/q_min`, the Markov bound on `Pr(q(t, F) ≥ q_min)`.
pub fn improbability_bound(p: f64, bias_value: f64, q_min: f64) -> Result<f64> {
    check_q_min(q_min)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("p must lie in (0, 1], got {p}")));
    }
    Ok((p + bias_value) / q_min)
}

/// Fraction of resources in `B` whose success probability reaches `q_min`,
/// against the bound `(p + bias(B, t))/q_min`.
pub fn famine_proportion(
    b: &ResourceSet,
    strategies: &StrategyMap,
    t: &TargetFunction,
    q_min: f64,
) -> Result<FamineReport> {
    check_q_min(q_min)?;
    let q = success_by_resource(b, strategies, t)?;
    let favorable = q.iter().filter(|&&v| v >= q_min - FLOAT_SLACK).count();
    let mean_q = q.iter().sum::<f64>() / q.len() as f64;
    Ok(FamineReport {
        proportion: favorable as f64 / q.len() as f64,
        bound: improbability_bound(t.p(), mean_q - t.p(), q_min)?,
        q_min,
    })
}

/// Fraction of k-hot targets on which `P̄_D` has bias at least `q_min`,
/// against the bound `p/(p + q_min)`.
pub fn applicable_targets_proportion(
    pbar_d: &StrategyDistribution,
    k: usize,
    q_min: f64,
) -> Result<FamineReport> {
    if !(q_min.is_finite() && q_min > 0.0) {
        return Err(invalid(format!("q_min must be positive, got {q_min}")));
    }
    let n = pbar_d.space_size();
    check_k(n, k)?;
    let p = k as f64 / n as f64;
    let mass = pbar_d.mass();
    let (mut hits, mut total) = (0usize, 0usize);
    for t in enumerate_targets(n, k)? {
        total += 1;
        if t.dot(mass) - p >= q_min - FLOAT_SLACK {
            hits += 1;
        }
    }
    Ok(FamineReport {
        proportion: hits as f64 / total as f64,
        bound: p / (p + q_min),
        q_min,
    })
}

/// Fraction of the simplex of distributions over `B` on which the bias
/// reaches `q_min`, estimated with `samples` uniform draws. Returns the
/// estimate and the bound `(p + bias(B, t))/q_min`.
pub fn favorable_distributions_estimate(
    b: &ResourceSet,
    strategies: &StrategyMap,
    t: &TargetFunction,
    q_min: f64,
    samples: usize,
    seed: u64,
) -> Result<(MCEstimate, f64)> {
    check_q_min(q_min)?;
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    let q = success_by_resource(b, strategies, t)?;
    let p = t.p();
    let values = mc_values(samples, seed, |rng| {
        let d = simplex_point(rng, q.len());
        let bias: f64 = d.iter().zip(&q).map(|(w, q)| w * q).sum::<f64>() - p;
        if bias >= q_min - FLOAT_SLACK {
            1.0
        } else {
            0.0
        }
    });
    let mean_q = q.iter().sum::<f64>() / q.len() as f64;
    Ok((
        MCEstimate::from_values(&values),
        improbability_bound(p, mean_q - p, q_min)?,
    ))
}

/// Mean of `bias(D, t)` over `D` uniform on the simplex over `B`.
///
/// Calls with the same `seed` draw the same distributions, so summing the
/// estimates over all targets of one size cancels exactly, not just in
/// expectation.
pub fn mean_bias_over_distributions(
    b: &ResourceSet,
    strategies: &StrategyMap,
    t: &TargetFunction,
    samples: usize,
    seed: u64,
) -> Result<MCEstimate> {
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    let q = success_by_resource(b, strategies, t)?;
    let p = t.p();
    let values = mc_values(samples, seed, |rng| {
        let d = simplex_point(rng, q.len());
        d.iter().zip(&q).map(|(w, q)| w * q).sum::<f64>() - p
    });
    Ok(MCEstimate::from_values(&values))
}

/// Monte Carlo estimate of `Pr(q(t, F) ≥ q_min)` for `F ~ D`, with the
/// bound `(p + bias(D, t))/q_min` it must respect.
pub fn favorable_resource_probability(
    d: &ResourceDistribution,
    strategies: &StrategyMap,
    t: &TargetFunction,
    q_min: f64,
    samples: usize,
    seed: u64,
) -> Result<(MCEstimate, f64)> {
    check_q_min(q_min)?;
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    let q = success_by_resource(d.set(), strategies, t)?;
    let weights = d.weights();
    let values = mc_values(samples, seed, |rng| {
        let f = sample_index(weights, rng.random::<f64>());
        if q[f] >= q_min - FLOAT_SLACK {
            1.0
        } else {
            0.0
        }
    });
    let bound = improbability_bound(t.p(), bias(d, strategies, t)?, q_min)?;
    Ok((MCEstimate::from_values(&values), bound))
}

/// Angle between the target vector and `P̄_D`, and the success bound it
/// implies.
pub fn geometric_bound(
    t: &TargetFunction,
    pbar_d: &StrategyDistribution,
    q_min: f64,
) -> Result<GeometricReport> {
    check_q_min(q_min)?;
    let dot = per_query_success(t, pbar_d)?;
    let norm = pbar_d.l2_norm();
    if norm == 0.0 {
        return Err(invalid("strategy has zero norm"));
    }
    let root_k = (t.k() as f64).sqrt();
    let cos_theta = (dot / (root_k * norm)).clamp(-1.0, 1.0);
    Ok(GeometricReport {
        cos_theta,
        bound: root_k * cos_theta / q_min,
    })
}
