//! Constructive lemmas and brute-force oracles used by the verification
//! harness.

use crate::bias::extreme_sums;
use crate::error::{invalid, Result};
use crate::rng::stream_rng;
use crate::sampling::simplex_point;
use crate::search::{AlgorithmSpec, StrategyDistribution};

/// Indices of the `k` smallest entries (ties to the lowest index), sorted.
/// Their total is at most `(k/n)·Σ masses`.
pub fn min_mass_subset(masses: &[f64], k: usize) -> Result<Vec<usize>> {
    let n = masses.len();
    if k == 0 || k >= n {
        return Err(invalid(format!("need 1 ≤ k < n, got k = {k}, n = {n}")));
    }
    if let Some(i) = masses.iter().position(|m| !(m.is_finite() && *m >= 0.0)) {
        return Err(invalid(format!(
            "mass at index {i} is negative or not finite"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| masses[a].total_cmp(&masses[b]).then(a.cmp(&b)));
    let mut chosen = order[..k].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Largest mass any k-hot target can collect, and the cap
/// `1 − ((1−p)/p)·(smallest k-target mass)`.
///
/// The cap holds for `k ≤ n/2`; beyond that the complement has fewer than
/// `k` elements and the cap can be exceeded.
pub fn lemma2_check(p_dist: &StrategyDistribution, k: usize) -> Result<(f64, f64)> {
    let n = p_dist.space_size();
    if k == 0 || k >= n {
        return Err(invalid(format!("need 1 ≤ k < n, got k = {k}, n = {n}")));
    }
    let p = k as f64 / n as f64;
    let (high, low) = extreme_sums(p_dist.mass(), k);
    Ok((high, 1.0 - (1.0 - p) / p * low))
}

/// A point drawn uniformly from the `(dim − 1)`-simplex.
pub fn sample_simplex(dim: usize, seed: u64) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(invalid("simplex dimension must be at least 1"));
    }
    Ok(simplex_point(&mut stream_rng(seed, 0), dim))
}

/// `Pr(|X/n − prob| ≥ eps)` for `X ~ Binomial(n, prob)`, summed exactly
/// over the pmf. Outcomes within `1e-12` of the boundary count as hits.
pub fn binomial_deviation_probability(n: usize, prob: f64, eps: f64) -> f64 {
    let mut total = 0.0;
    for x in 0..=n {
        if (x as f64 / n as f64 - prob).abs() >= eps - 1e-12 {
            total += binomial_pmf(n, x, prob);
        }
    }
    total
}

fn binomial_pmf(n: usize, x: usize, prob: f64) -> f64 {
    // ln C(n, x) by summation keeps this exact enough for n in the thousands.
    let ln_choose: f64 = (0..x)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum();
    let ln_p = if x == 0 { 0.0 } else { x as f64 * prob.ln() };
    let ln_q = if x == n {
        0.0
    } else {
        (n - x) as f64 * (1.0 - prob).ln()
    };
    (ln_choose + ln_p + ln_q).exp()
}

/// Exact expected averaged strategy of a toy algorithm on a fitness task,
/// by expanding every query history. Cost is `n^queries`.
pub fn exact_induced_strategy(
    fitness: &[f64],
    queries: usize,
    algorithm: AlgorithmSpec,
) -> Result<Vec<f64>> {
    let n = fitness.len();
    if n == 0 || queries == 0 {
        return Err(invalid(
            "need a non-empty fitness vector and a positive query budget",
        ));
    }
    if (n as f64).powi(queries as i32) > 5e6 {
        return Err(invalid("history tree too large to expand"));
    }
    algorithm.validate()?;
    let gamma = match algorithm {
        AlgorithmSpec::UniformSampler => 0.0,
        AlgorithmSpec::EpsilonGreedy { gamma } => gamma,
    };
    let mut acc = vec![0.0; n];
    expand(fitness, queries, gamma, &mut Vec::new(), 1.0, &mut acc);
    acc.iter_mut().for_each(|a| *a /= queries as f64);
    Ok(acc)
}

fn expand(
    fitness: &[f64],
    remaining: usize,
    gamma: f64,
    history: &mut Vec<usize>,
    weight: f64,
    acc: &mut [f64],
) {
    if remaining == 0 {
        return;
    }
    let n = fitness.len();
    let mut strategy = vec![1.0 / n as f64; n];
    if !history.is_empty() {
        let best = history
            .iter()
            .map(|&i| fitness[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let mut argmax: Vec<usize> = history
            .iter()
            .copied()
            .filter(|&i| fitness[i] == best)
            .collect();
        argmax.sort_unstable();
        argmax.dedup();
        for (i, s) in strategy.iter_mut().enumerate() {
            *s = (1.0 - gamma) / n as f64;
            if argmax.contains(&i) {
                *s += gamma / argmax.len() as f64;
            }
        }
    }
    for (a, s) in acc.iter_mut().zip(&strategy) {
        *a += weight * s;
    }
    for (i, &s) in strategy.iter().enumerate() {
        if s > 0.0 {
            history.push(i);
            expand(fitness, remaining - 1, gamma, history, weight * s, acc);
            history.pop();
        }
    }
}
