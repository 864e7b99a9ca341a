use searchbias::oracle::sample_simplex;

/// Mean and variance of every coordinate over `m` draws, with standard
/// errors for both.
fn moments(dim: usize, m: usize, seed: u64) -> Vec<(f64, f64, f64, f64)> {
    let draws: Vec<Vec<f64>> = (0..m as u64)
        .map(|i| sample_simplex(dim, seed + i).unwrap())
        .collect();
    (0..dim)
        .map(|c| {
            let xs: Vec<f64> = draws.iter().map(|v| v[c]).collect();
            let mean = xs.iter().sum::<f64>() / m as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / m as f64;
            (
                mean,
                (var / m as f64).sqrt(),
                var,
                ((m4 - var * var) / m as f64).sqrt(),
            )
        })
        .collect()
}

#[test]
fn coordinates_have_uniform_simplex_moments() {
    let m = 100_000;
    for dim in [3usize, 4] {
        let d = dim as f64;
        let var_exact = (d - 1.0) / (d * d * (d + 1.0));
        for (c, &(mean, se, var, se_var)) in moments(dim, m, 1_000 * dim as u64).iter().enumerate()
        {
            assert!(
                (mean - 1.0 / d).abs() <= 3.0 * se,
                "dim {dim} coord {c}: mean {mean}"
            );
            assert!(
                (var - var_exact).abs() <= 4.0 * se_var,
                "dim {dim} coord {c}: var {var}"
            );
        }
    }
}

#[test]
fn coordinates_are_exchangeable() {
    let stats = moments(5, 100_000, 77);
    for a in &stats {
        for b in &stats {
            let se = (a.1 * a.1 + b.1 * b.1).sqrt();
            assert!((a.0 - b.0).abs() <= 4.0 * se);
            let se_var = (a.3 * a.3 + b.3 * b.3).sqrt();
            assert!((a.2 - b.2).abs() <= 4.0 * se_var);
        }
    }
}

#[test]
fn draws_are_distributions() {
    for seed in 0..1_000 {
        let v = sample_simplex(1 + (seed as usize % 9), seed).unwrap();
        assert!(v.iter().all(|&x| x >= 0.0));
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
