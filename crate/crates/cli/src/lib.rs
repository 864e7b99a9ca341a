//! Command implementations behind the `searchbias` binary.
//!
//! Every command returns its output as a string so the binary only decides
//! where it goes; nothing here touches stdout.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use searchbias::bias::{bias_extrema, hoeffding_experiment, theorem1_factor};
use searchbias::expressivity::{
    entropy_bits, expected_entropy, expected_expressivity_bias_upper, kl_to_uniform,
    table_of_ranges, tradeoff_bias_upper,
};
use searchbias::resource_file::ResourceFile;
use searchbias::search::{enumerate_targets, mix_strategies, per_query_success};
use searchbias::{AlgorithmSpec, Error, ResourceDistribution, StrategyMap, TargetFunction};

/// One point of the sup-bias bound as a function of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Figure2Row {
    pub p: f64,
    /// `(p − 1)/p`.
    pub m: f64,
    /// `m · inf_bias`.
    pub bound: f64,
}

/// Rows of the bound `((p−1)/p)·inf_bias` over a grid of `p`.
pub fn figure2_rows(inf_bias: f64, ps: &[f64]) -> searchbias::Result<Vec<Figure2Row>> {
    if !(inf_bias.is_finite() && inf_bias <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "inf_bias must be ≤ 0, got {inf_bias}"
        )));
    }
    if ps.is_empty() {
        return Err(Error::InvalidParameter("p grid is empty".into()));
    }
    ps.iter()
        .map(|&p| {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "p must lie in (0, 1), got {p}"
                )));
            }
            let m = theorem1_factor(p);
            Ok(Figure2Row {
                p,
                m,
                bound: m * inf_bias,
            })
        })
        .collect()
}

/// `0.05, 0.10, …, 0.95`.
pub fn default_p_grid() -> Vec<f64> {
    (1..20).map(|i| i as f64 / 20.0).collect()
}

/// A target given as explicit indices (`0,3`) or as a size (`k=2`), meaning
/// every target of that size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetSpec {
    Indices(Vec<usize>),
    Size(usize),
}

impl std::str::FromStr for TargetSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Some(k) = s.strip_prefix("k=") {
            return k
                .trim()
                .parse()
                .map(TargetSpec::Size)
                .map_err(|_| format!("bad target size `{k}`"));
        }
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad target index `{part}`"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(TargetSpec::Indices)
    }
}

/// Parses `0.5,0.5` style weight lists.
pub fn parse_weights(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad weight `{part}`"))
        })
        .collect()
}

/// A comma-separated list of numbers as one command-line value.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl std::str::FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        parse_weights(s).map(FloatList)
    }
}

/// How fitness-task resources are turned into strategies.
#[derive(Debug, Clone, Copy)]
pub struct Simulation {
    pub algorithm: AlgorithmSpec,
    pub runs: usize,
    pub seed: u64,
}

/// A loaded resource file with its distribution and strategies.
pub struct Loaded {
    pub d: ResourceDistribution,
    pub strategies: StrategyMap,
}

pub fn load(path: &Path, weights: Option<Vec<f64>>, sim: Simulation) -> Result<Loaded> {
    let file = ResourceFile::load(path).with_context(|| format!("loading {}", path.display()))?;
    let d = file.distribution(weights).context("--weights")?;
    let strategies = file.set.strategies(sim.algorithm, sim.runs, sim.seed)?;
    Ok(Loaded { d, strategies })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceSuccess {
    pub id: String,
    pub weight: f64,
    /// `q(t, f)`.
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetBias {
    pub target: Vec<usize>,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BiasReport {
    Single {
        target: Vec<usize>,
        k: usize,
        p: f64,
        bias: f64,
        per_resource: Vec<ResourceSuccess>,
    },
    AllTargets {
        k: usize,
        p: f64,
        sup_bias: f64,
        inf_bias: f64,
        sup_bias_bound: f64,
        bias_sum: f64,
        targets: Vec<TargetBias>,
    },
}

fn target(n: usize, indices: &[usize]) -> Result<TargetFunction> {
    TargetFunction::new(n, indices.to_vec()).context("--target")
}

pub fn cmd_bias(loaded: &Loaded, spec: &TargetSpec) -> Result<BiasReport> {
    let n = loaded.d.space_size();
    let mixture = mix_strategies(&loaded.d, &loaded.strategies)?;
    match spec {
        TargetSpec::Indices(idx) => {
            let t = target(n, idx)?;
            let ordered = loaded.d.set().ordered(&loaded.strategies)?;
            let per_resource = loaded
                .d
                .set()
                .resources()
                .iter()
                .zip(ordered)
                .zip(loaded.d.weights())
                .map(|((r, s), &weight)| {
                    Ok(ResourceSuccess {
                        id: r.id.clone(),
                        weight,
                        q: per_query_success(&t, s)?,
                    })
                })
                .collect::<searchbias::Result<Vec<_>>>()?;
            Ok(BiasReport::Single {
                target: t.indices().to_vec(),
                k: t.k(),
                p: t.p(),
                bias: per_query_success(&t, &mixture)? - t.p(),
                per_resource,
            })
        }
        &TargetSpec::Size(k) => {
            let targets = enumerate_targets(n, k)
                .context("--target")?
                .map(|t| {
                    Ok(TargetBias {
                        bias: per_query_success(&t, &mixture)? - t.p(),
                        target: t.indices().to_vec(),
                    })
                })
                .collect::<searchbias::Result<Vec<_>>>()?;
            let e = bias_extrema(&mixture, k)?;
            Ok(BiasReport::AllTargets {
                k,
                p: e.p,
                sup_bias: e.sup_bias,
                inf_bias: e.inf_bias,
                sup_bias_bound: e.theorem1_bound,
                bias_sum: targets.iter().map(|t| t.bias).sum(),
                targets,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceEntropy {
    pub id: String,
    pub weight: f64,
    pub entropy_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressivityReport {
    pub n: usize,
    pub log2_n: f64,
    /// `H(P̄_D)`.
    pub entropy_bits: f64,
    pub kl_to_uniform: f64,
    /// `E_D[H(P̄_F)]`.
    pub expected_entropy: f64,
    pub jensen_gap: f64,
    /// `√(½·KL(P̄_D ‖ U))`.
    pub bias_bound: f64,
    /// `√(½·(log2 n − E_D[H(P̄_F)]))`.
    pub bias_bound_expected: f64,
    pub per_resource: Vec<ResourceEntropy>,
}

pub fn cmd_expressivity(loaded: &Loaded) -> Result<ExpressivityReport> {
    let mixture = mix_strategies(&loaded.d, &loaded.strategies)?;
    let h = entropy_bits(&mixture);
    let expected = expected_entropy(&loaded.d, &loaded.strategies)?;
    let ordered = loaded.d.set().ordered(&loaded.strategies)?;
    let per_resource = loaded
        .d
        .set()
        .resources()
        .iter()
        .zip(ordered)
        .zip(loaded.d.weights())
        .map(|((r, s), &weight)| ResourceEntropy {
            id: r.id.clone(),
            weight,
            entropy_bits: entropy_bits(s),
        })
        .collect();
    let n = loaded.d.space_size();
    Ok(ExpressivityReport {
        n,
        log2_n: (n as f64).log2(),
        entropy_bits: h,
        kl_to_uniform: kl_to_uniform(&mixture),
        expected_entropy: expected,
        jensen_gap: h - expected,
        bias_bound: tradeoff_bias_upper(&mixture),
        bias_bound_expected: expected_expressivity_bias_upper(&loaded.d, &loaded.strategies)?,
        per_resource,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub target: Vec<usize>,
    pub bias: f64,
    pub n: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub exceedance_frequency: f64,
    /// `2·exp(−2·n·ε²)`.
    pub bound: f64,
}

pub fn cmd_estimate(
    loaded: &Loaded,
    spec: &TargetSpec,
    n: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<EstimateReport> {
    let TargetSpec::Indices(idx) = spec else {
        bail!("--target: estimate needs explicit indices, not a target size");
    };
    let t = target(loaded.d.space_size(), idx)?;
    let r = hoeffding_experiment(&loaded.d, &loaded.strategies, &t, n, epsilon, trials, seed)?;
    Ok(EstimateReport {
        target: t.indices().to_vec(),
        bias: searchbias::bias::bias(&loaded.d, &loaded.strategies, &t)?,
        n,
        epsilon,
        trials,
        seed,
        exceedance_frequency: r.exceedance_frequency,
        bound: r.bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub expected_mass_on_target: f64,
    pub lower_bits: f64,
    pub upper_bits: f64,
}

pub fn cmd_table(n: usize, k: usize) -> searchbias::Result<Vec<TableRow>> {
    Ok(table_of_ranges(n, k)?
        .iter()
        .map(|r| TableRow {
            n,
            k,
            eps: r.eps,
            expected_mass_on_target: r.expected_mass_on_target,
            lower_bits: r.lower_bits,
            upper_bits: r.upper_bits,
        })
        .collect())
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure2_examples() {
        let rows = figure2_rows(-0.5, &[0.5]).unwrap();
        assert_eq!(
            rows[0],
            Figure2Row {
                p: 0.5,
                m: -1.0,
                bound: 0.5
            }
        );
        let near_one = figure2_rows(-0.5, &[0.999_999]).unwrap()[0];
        assert!(near_one.m.abs() < 1e-5 && near_one.bound < 1e-5);
        assert!(figure2_rows(0.0, &default_p_grid())
            .unwrap()
            .iter()
            .all(|r| r.bound == 0.0));
        assert!(figure2_rows(0.1, &[0.5]).is_err());
        assert!(figure2_rows(-0.1, &[1.0]).is_err());
        assert!(figure2_rows(-0.1, &[0.0]).is_err());
    }

    #[test]
    fn target_specs() {
        assert_eq!(
            "0,3".parse::<TargetSpec>().unwrap(),
            TargetSpec::Indices(vec![0, 3])
        );
        assert_eq!(
            " 2 ".parse::<TargetSpec>().unwrap(),
            TargetSpec::Indices(vec![2])
        );
        assert_eq!("k=2".parse::<TargetSpec>().unwrap(), TargetSpec::Size(2));
        assert!("k=x".parse::<TargetSpec>().is_err());
        assert!("1,,2".parse::<TargetSpec>().is_err());
        assert_eq!(parse_weights("1, 0").unwrap(), vec![1.0, 0.0]);
        assert!(parse_weights("a").is_err());
    }

    #[test]
    fn table_examples() {
        let rows = cmd_table(8, 2).unwrap();
        assert!((rows[1].lower_bits - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert_eq!(rows[1].upper_bits, 3.0);
        assert!(cmd_table(3, 3).is_err());
        let csv = to_csv(&rows).unwrap();
        assert!(csv.starts_with("n,k,eps,expected_mass_on_target,lower_bits,upper_bits\n"));
    }
}
