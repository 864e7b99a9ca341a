//! Entropic expressivity and its relation to bias.
//!
//! The expressivity of an algorithm under a resource distribution `D` is the
//! Shannon entropy of the averaged strategy `P̄_D`, in bits. It decomposes as
//! `log2|Ω| − KL(P̄_D ‖ U)`. Fixing the bias `ε` on a target pins the target
//! block's mass at `p + ε`, which confines the entropy to an interval whose
//! ends are attained by two explicit constructions.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::search::{
    mix_strategies, ResourceDistribution, StrategyDistribution, StrategyMap, TargetFunction,
};

/// Tolerance when checking that a bias value is realizable.
const EPS_RANGE_SLACK: f64 = 1e-12;

/// `x·log2(c/x)` with the `0·log(c/0) = 0` convention.
fn weighted_log_ratio(x: f64, c: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (c / x).log2()
    }
}

/// Entropy in bits of a probability vector, skipping zero entries.
pub fn entropy_of(mass: &[f64]) -> f64 {
    -mass
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| m * m.log2())
        .sum::<f64>()
}

/// Shannon entropy of a strategy in bits.
pub fn entropy_bits(p_dist: &StrategyDistribution) -> f64 {
    entropy_of(p_dist.mass()).max(0.0)
}

/// Entropy in bits of a Bernoulli(`x`) variable.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    weighted_log_ratio(x, 1.0) + weighted_log_ratio(1.0 - x, 1.0)
}

/// `KL(P ‖ U)` in bits, computed as `Σ p_i log2(p_i·n)`.
pub fn kl_to_uniform(p_dist: &StrategyDistribution) -> f64 {
    let n = p_dist.space_size() as f64;
    p_dist
        .mass()
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| m * (m * n).log2())
        .sum::<f64>()
        .max(0.0)
}

/// Entropy of the mixture `P̄_D` (not the mean of per-resource entropies).
pub fn entropic_expressivity(d: &ResourceDistribution, strategies: &StrategyMap) -> Result<f64> {
    Ok(entropy_bits(&mix_strategies(d, strategies)?))
}

/// `E_D[H(P̄_F)]`, the D-weighted mean of per-resource entropies.
pub fn expected_entropy(d: &ResourceDistribution, strategies: &StrategyMap) -> Result<f64> {
    let ordered = d.set().ordered(strategies)?;
    Ok(d.weights()
        .iter()
        .zip(ordered)
        .map(|(w, s)| w * entropy_bits(s))
        .sum())
}

/// Interval of entropies compatible with a given bias on a target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpressivityRange {
    pub lower: f64,
    pub upper: f64,
    /// Mass on the target block, `p + ε`.
    pub p_plus_eps: f64,
}

/// One row of the table of ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeRow {
    pub eps: f64,
    pub expected_mass_on_target: f64,
    pub lower_bits: f64,
    pub upper_bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffBounds {
    pub expressivity_upper: f64,
    pub bias_upper: f64,
}

/// Checks `ε ∈ [−p, 1−p]` and returns the target-block mass `p + ε`,
/// snapped to the closed unit interval.
fn target_mass(p: f64, eps: f64) -> Result<f64> {
    if !eps.is_finite() || eps < -p - EPS_RANGE_SLACK || eps > 1.0 - p + EPS_RANGE_SLACK {
        return Err(invalid(format!(
            "bias {eps} is not realizable: must lie in [{}, {}]",
            -p,
            1.0 - p
        )));
    }
    let mass = (p + eps).clamp(0.0, 1.0);
    Ok(if mass < 1e-14 {
        0.0
    } else if 1.0 - mass < 1e-14 {
        1.0
    } else {
        mass
    })
}

/// Entropy interval for bias `eps` on a k-element target in an n-element
/// space: `[H(p+ε), (p+ε)·log2(k/(p+ε)) + (1−p−ε)·log2((n−k)/(1−p−ε))]`.
pub fn expressivity_range(n: usize, k: usize, eps: f64) -> Result<ExpressivityRange> {
    if k == 0 || k >= n {
        return Err(invalid(format!("need 1 ≤ k < n, got n = {n}, k = {k}")));
    }
    let p = k as f64 / n as f64;
    let q = target_mass(p, eps)?;
    Ok(ExpressivityRange {
        lower: binary_entropy(q),
        upper: weighted_log_ratio(q, k as f64) + weighted_log_ratio(1.0 - q, (n - k) as f64),
        p_plus_eps: q,
    })
}

/// The lowest-entropy strategy with bias `eps` on `t`: all target mass on
/// the lowest target index, all remaining mass on the lowest non-target
/// index.
pub fn min_entropy_construction(t: &TargetFunction, eps: f64) -> Result<StrategyDistribution> {
    let n = t.space_size();
    let q = target_mass(t.p(), eps)?;
    let mut mass = vec![0.0; n];
    mass[t.indices()[0]] = q;
    match (0..n).find(|&i| !t.contains(i)) {
        Some(outside) => mass[outside] = 1.0 - q,
        None if q == 1.0 => {}
        None => {
            return Err(invalid(
                "target covers the whole space, so its bias must be zero",
            ))
        }
    }
    Ok(StrategyDistribution::from_normalized(mass))
}

/// The highest-entropy strategy with bias `eps` on `t`: target mass spread
/// evenly over the target, the rest evenly over its complement.
pub fn max_entropy_construction(t: &TargetFunction, eps: f64) -> Result<StrategyDistribution> {
    let n = t.space_size();
    let k = t.k();
    if k >= n {
        return Err(invalid("maximum-entropy construction needs k < n"));
    }
    let q = target_mass(t.p(), eps)?;
    let inside = q / k as f64;
    let outside = (1.0 - q) / (n - k) as f64;
    let mass = (0..n)
        .map(|i| if t.contains(i) { inside } else { outside })
        .collect();
    Ok(StrategyDistribution::from_normalized(mass))
}

/// Largest entropy compatible with bias `bias_value`: `log2 n − 2·bias²`.
pub fn tradeoff_expressivity_upper(n: usize, bias_value: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("search space must contain at least one element"));
    }
    if !(bias_value.is_finite() && bias_value.abs() <= 1.0) {
        return Err(invalid(format!(
            "|bias| must be at most 1, got {bias_value}"
        )));
    }
    Ok((n as f64).log2() - 2.0 * bias_value * bias_value)
}

/// Largest |bias| on any target compatible with the strategy's entropy:
/// `√(½·KL(P̄ ‖ U))`.
pub fn tradeoff_bias_upper(pbar_d: &StrategyDistribution) -> f64 {
    (0.5 * kl_to_uniform(pbar_d)).sqrt()
}

/// Both trade-off bounds for a strategy and a target.
pub fn tradeoff_bounds(
    pbar_d: &StrategyDistribution,
    t: &TargetFunction,
) -> Result<TradeoffBounds> {
    let b = crate::bias::bias_of_strategy(pbar_d, t)?;
    Ok(TradeoffBounds {
        expressivity_upper: tradeoff_expressivity_upper(pbar_d.space_size(), b)?,
        bias_upper: tradeoff_bias_upper(pbar_d),
    })
}

/// Bias bound from the expected per-resource entropy:
/// `√(½·(log2 n − E_D[H(P̄_F)]))`. Never smaller than
/// [`tradeoff_bias_upper`] of the mixture, by concavity of entropy.
pub fn expected_expressivity_bias_upper(
    d: &ResourceDistribution,
    strategies: &StrategyMap,
) -> Result<f64> {
    let n = d.space_size() as f64;
    let gap = (n.log2() - expected_entropy(d, strategies)?).max(0.0);
    Ok((0.5 * gap).sqrt())
}

/// Ranges at minimum, zero, and maximum bias.
pub fn table_of_ranges(n: usize, k: usize) -> Result<[RangeRow; 3]> {
    if k == 0 || k >= n {
        return Err(invalid(format!("need 1 ≤ k < n, got n = {n}, k = {k}")));
    }
    let p = k as f64 / n as f64;
    let row = |eps: f64, expected: f64| -> Result<RangeRow> {
        let r = expressivity_range(n, k, eps)?;
        Ok(RangeRow {
            eps,
            expected_mass_on_target: expected,
            lower_bits: r.lower,
            upper_bits: r.upper,
        })
    };
    Ok([row(-p, 0.0)?, row(0.0, p)?, row(1.0 - p, 1.0)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bias::bias_of_strategy;
    use crate::search::{validate_strategy, AlgorithmSpec, ResourceSet, SearchSpace};
    use approx::assert_abs_diff_eq;

    fn sd(v: &[f64]) -> StrategyDistribution {
        validate_strategy(v.len(), v).unwrap()
    }

    fn uniform(n: usize) -> StrategyDistribution {
        StrategyDistribution::uniform(SearchSpace::new(n).unwrap())
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_bits(&uniform(4)), 2.0);
        assert_eq!(entropy_bits(&sd(&[1.0, 0.0, 0.0, 0.0])), 0.0);
        assert_eq!(entropy_bits(&sd(&[0.5, 0.25, 0.25])), 1.5);
    }

    #[test]
    fn kl_examples() {
        for n in 1..10 {
            assert_abs_diff_eq!(kl_to_uniform(&uniform(n)), 0.0, epsilon = 1e-15);
        }
        assert_eq!(kl_to_uniform(&sd(&[0.5, 0.5, 0.0, 0.0])), 1.0);
        assert_eq!(kl_to_uniform(&sd(&[0.0, 1.0, 0.0, 0.0])), 2.0);
    }

    #[test]
    fn expressivity_examples() {
        let pair = ResourceSet::from_strategies(vec![
            sd(&[1.0, 0.0, 0.0, 0.0]),
            sd(&[0.0, 0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let map = pair
            .strategies(AlgorithmSpec::UniformSampler, 1, 0)
            .unwrap();
        let d = ResourceDistribution::uniform(pair);
        assert_eq!(entropic_expressivity(&d, &map).unwrap(), 1.0);
        assert_eq!(expected_entropy(&d, &map).unwrap(), 0.0);

        let single = ResourceSet::from_strategies(vec![uniform(8)]).unwrap();
        let map = single
            .strategies(AlgorithmSpec::UniformSampler, 1, 0)
            .unwrap();
        assert_eq!(
            entropic_expressivity(&ResourceDistribution::uniform(single), &map).unwrap(),
            3.0
        );

        let same = ResourceSet::from_strategies(vec![sd(&[0.0, 1.0, 0.0]); 4]).unwrap();
        let map = same
            .strategies(AlgorithmSpec::UniformSampler, 1, 0)
            .unwrap();
        assert_eq!(
            entropic_expressivity(&ResourceDistribution::uniform(same), &map).unwrap(),
            0.0
        );
    }

    #[test]
    fn range_examples() {
        let r = expressivity_range(4, 2, 0.0).unwrap();
        assert_eq!((r.lower, r.upper), (1.0, 2.0));
        let r = expressivity_range(4, 2, 0.5).unwrap();
        assert_eq!((r.lower, r.upper), (0.0, 1.0));
        let r = expressivity_range(4, 2, -0.5).unwrap();
        assert_eq!((r.lower, r.upper), (0.0, 1.0));
        assert!(expressivity_range(4, 2, 0.6).is_err());
        assert!(expressivity_range(4, 4, 0.0).is_err());
        assert!(expressivity_range(4, 0, 0.0).is_err());
    }

    #[test]
    fn min_construction_examples() {
        let t = TargetFunction::new(4, vec![0, 1]).unwrap();
        let s = min_entropy_construction(&t, 0.25).unwrap();
        assert_eq!(s.mass(), &[0.75, 0.0, 0.25, 0.0]);
        // H(0.75) = 2 − 0.75·log2(3)
        assert_abs_diff_eq!(entropy_bits(&s), 2.0 - 0.75 * 3f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(entropy_bits(&s), 0.811278, epsilon = 1e-6);

        let top = min_entropy_construction(&t, 0.5).unwrap();
        assert_eq!(top.mass(), &[1.0, 0.0, 0.0, 0.0]);
        let bottom = min_entropy_construction(&t, -0.5).unwrap();
        assert_eq!(bottom.mass(), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(entropy_bits(&bottom), 0.0);

        let all = TargetFunction::new(3, vec![0, 1, 2]).unwrap();
        assert_eq!(
            min_entropy_construction(&all, 0.0).unwrap().mass(),
            &[1.0, 0.0, 0.0]
        );
        assert!(min_entropy_construction(&all, -0.5).is_err());
    }

    #[test]
    fn max_construction_examples() {
        let t = TargetFunction::new(4, vec![0, 1]).unwrap();
        let s = max_entropy_construction(&t, 0.25).unwrap();
        assert_eq!(s.mass(), &[0.375, 0.375, 0.125, 0.125]);
        let closed = 0.75 * (2.0f64 / 0.75).log2() + 0.25 * (2.0f64 / 0.25).log2();
        assert_abs_diff_eq!(entropy_bits(&s), closed, epsilon = 1e-12);
        assert_abs_diff_eq!(entropy_bits(&s), 1.811278, epsilon = 1e-6);

        let t3 = TargetFunction::new(8, vec![2, 5, 6]).unwrap();
        assert_eq!(
            max_entropy_construction(&t3, 0.0).unwrap().mass(),
            &[0.125; 8]
        );
        let top = max_entropy_construction(&t3, 1.0 - t3.p()).unwrap();
        assert_abs_diff_eq!(entropy_bits(&top), 3f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            bias_of_strategy(&top, &t3).unwrap(),
            1.0 - t3.p(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn tradeoff_examples() {
        assert_eq!(tradeoff_expressivity_upper(4, 0.5).unwrap(), 1.5);
        assert_eq!(entropy_bits(&sd(&[0.5, 0.5, 0.0, 0.0])), 1.0);
        assert_eq!(tradeoff_expressivity_upper(16, 0.0).unwrap(), 4.0);
        assert_eq!(tradeoff_expressivity_upper(4, 0.75).unwrap(), 0.875);
        assert!(tradeoff_expressivity_upper(4, 1.5).is_err());

        assert_eq!(tradeoff_bias_upper(&uniform(4)), 0.0);
        assert_abs_diff_eq!(
            tradeoff_bias_upper(&sd(&[0.5, 0.5, 0.0, 0.0])),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(tradeoff_bias_upper(&sd(&[1.0, 0.0, 0.0, 0.0])), 1.0);

        let t = TargetFunction::new(4, vec![0, 1]).unwrap();
        let b = tradeoff_bounds(&sd(&[0.5, 0.5, 0.0, 0.0]), &t).unwrap();
        assert_eq!(b.expressivity_upper, 1.5);
    }

    #[test]
    fn expected_expressivity_examples() {
        let pair = ResourceSet::from_strategies(vec![
            sd(&[1.0, 0.0, 0.0, 0.0]),
            sd(&[0.0, 0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let map = pair
            .strategies(AlgorithmSpec::UniformSampler, 1, 0)
            .unwrap();
        let d = ResourceDistribution::uniform(pair);
        assert_eq!(expected_expressivity_bias_upper(&d, &map).unwrap(), 1.0);
        let mixed = mix_strategies(&d, &map).unwrap();
        assert_abs_diff_eq!(tradeoff_bias_upper(&mixed), 0.5f64.sqrt(), epsilon = 1e-15);

        let u = ResourceSet::from_strategies(vec![uniform(4); 2]).unwrap();
        let umap = u.strategies(AlgorithmSpec::UniformSampler, 1, 0).unwrap();
        assert_eq!(
            expected_expressivity_bias_upper(&ResourceDistribution::uniform(u), &umap).unwrap(),
            0.0
        );

        let s = sd(&[0.6, 0.2, 0.2, 0.0]);
        let single = ResourceSet::from_strategies(vec![s.clone()]).unwrap();
        let smap = single
            .strategies(AlgorithmSpec::UniformSampler, 1, 0)
            .unwrap();
        assert_abs_diff_eq!(
            expected_expressivity_bias_upper(&ResourceDistribution::uniform(single), &smap)
                .unwrap(),
            tradeoff_bias_upper(&s),
            epsilon = 1e-12
        );
    }

    #[test]
    fn table_examples() {
        let rows = table_of_ranges(4, 2).unwrap();
        let ranges: Vec<_> = rows.iter().map(|r| (r.lower_bits, r.upper_bits)).collect();
        assert_eq!(ranges, vec![(0.0, 1.0), (1.0, 2.0), (0.0, 1.0)]);
        assert_eq!(
            rows.iter()
                .map(|r| r.expected_mass_on_target)
                .collect::<Vec<_>>(),
            vec![0.0, 0.5, 1.0]
        );

        let rows = table_of_ranges(8, 2).unwrap();
        assert_abs_diff_eq!(rows[1].lower_bits, 0.811278, epsilon = 1e-6);
        assert_eq!(rows[1].upper_bits, 3.0);

        let rows = table_of_ranges(2, 1).unwrap();
        let ranges: Vec<_> = rows.iter().map(|r| (r.lower_bits, r.upper_bits)).collect();
        assert_eq!(ranges, vec![(0.0, 0.0), (1.0, 1.0), (0.0, 0.0)]);
        assert!(table_of_ranges(3, 3).is_err());
    }
}
