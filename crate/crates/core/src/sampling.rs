//! Random probability vectors.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::search::StrategyDistribution;

/// A point drawn uniformly from the `(dim - 1)`-simplex: `dim` unit-rate
/// exponential variates divided by their sum.
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    assert!(dim >= 1, "simplex dimension must be positive");
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = v.iter().sum();
        if total > 0.0 && total.is_finite() {
            v.iter_mut().for_each(|x| *x /= total);
            return v;
        }
    }
}

/// Uniform-simplex strategy over `n` elements.
pub fn simplex_strategy<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StrategyDistribution {
    StrategyDistribution::from_weights(simplex_point(rng, n))
}

/// A strategy drawn from a mixture of shapes that stress the bounds:
/// uniform-simplex, sparse (random support), point masses, and peaked
/// (one dominant entry).
pub fn varied_strategy<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StrategyDistribution {
    match rng.random_range(0..4u8) {
        0 => simplex_strategy(rng, n),
        1 => {
            let mut v = simplex_point(rng, n);
            let keep = rng.random_range(1..=n);
            // Zero all but `keep` randomly chosen entries.
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                order.swap(i, rng.random_range(0..=i));
            }
            for &i in &order[keep..] {
                v[i] = 0.0;
            }
            if v.iter().all(|&x| x == 0.0) {
                v[order[0]] = 1.0;
            }
            StrategyDistribution::from_weights(v)
        }
        2 => StrategyDistribution::point_mass(n, rng.random_range(0..n)).expect("index in range"),
        _ => {
            let mut v = simplex_point(rng, n);
            let peak = rng.random_range(0..n);
            v[peak] += rng.random_range(1.0..20.0);
            StrategyDistribution::from_weights(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn simplex_points_are_distributions() {
        let mut rng = stream_rng(5, 0);
        for dim in 1..20 {
            let v = simplex_point(&mut rng, dim);
            assert_eq!(v.len(), dim);
            assert!(v.iter().all(|&x| x >= 0.0));
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(simplex_point(&mut rng, 1), vec![1.0]);
    }

    #[test]
    fn varied_strategies_are_valid() {
        let mut rng = stream_rng(6, 0);
        for _ in 0..2000 {
            let n = rng.random_range(1..=16);
            let s = varied_strategy(&mut rng, n);
            assert_eq!(s.space_size(), n);
            assert!((s.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
