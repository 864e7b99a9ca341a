//! Search spaces, targets, strategy distributions, information resources,
//! and the two toy black-box algorithms that turn a resource into an
//! averaged strategy.
//!
//! A search run produces a sequence of per-step sampling distributions
//! `P_1, …, P_m` over Ω. The quantity every other module consumes is the
//! averaged strategy `P̄_f`: the time average of that sequence within a
//! run, then the average across independent runs. Its inner product with a
//! k-hot target vector is the expected per-query probability of success.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rng::{named_seed, stream_rng};

/// Accepted deviation of an input distribution's sum from 1.
pub const INPUT_TOLERANCE: f64 = 1e-6;
/// Accepted deviation of an internally produced distribution's sum from 1.
pub const INTERNAL_TOLERANCE: f64 = 1e-9;
/// Negative entries at least this close to zero are treated as zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;
/// Default cap on `C(n, k)` for target enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// The finite search space Ω, identified by its size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchSpace {
    size: usize,
}

impl SearchSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(invalid("search space must contain at least one element"));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// A k-hot target function over Ω, stored as sorted distinct indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TargetFunction {
    space_size: usize,
    indices: Vec<usize>,
}

impl TargetFunction {
    /// Builds a target from indices in any order. Duplicates, out-of-range
    /// indices and the empty target are rejected.
    pub fn new(space_size: usize, indices: impl Into<Vec<usize>>) -> Result<Self> {
        let mut indices = indices.into();
        if space_size == 0 {
            return Err(invalid("search space must contain at least one element"));
        }
        if indices.is_empty() {
            return Err(invalid("target must contain at least one element"));
        }
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(invalid(format!("duplicate target index {}", w[0])));
        }
        if let Some(&last) = indices.last() {
            if last >= space_size {
                return Err(invalid(format!(
                    "target index {last} out of range for |Ω| = {space_size}"
                )));
            }
        }
        Ok(Self {
            space_size,
            indices,
        })
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of target elements.
    pub fn k(&self) -> usize {
        self.indices.len()
    }

    /// Success probability of a single uniform query, `k / |Ω|`.
    pub fn p(&self) -> f64 {
        self.k() as f64 / self.space_size as f64
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// The 0/1 indicator vector.
    pub fn indicator(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.space_size];
        for &i in &self.indices {
            v[i] = 1.0;
        }
        v
    }

    /// `tᵀ v` for a vector of the right length.
    pub(crate) fn dot(&self, v: &[f64]) -> f64 {
        self.indices.iter().map(|&i| v[i]).sum()
    }
}

impl fmt::Display for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.indices.iter().join(","))
    }
}

/// A probability vector over Ω.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct StrategyDistribution {
    mass: Vec<f64>,
}

impl StrategyDistribution {
    pub fn uniform(space: SearchSpace) -> Self {
        let n = space.size();
        Self {
            mass: vec![1.0 / n as f64; n],
        }
    }

    /// All mass on `index`.
    pub fn point_mass(space_size: usize, index: usize) -> Result<Self> {
        if index >= space_size {
            return Err(invalid(format!(
                "index {index} out of range for |Ω| = {space_size}"
            )));
        }
        let mut mass = vec![0.0; space_size];
        mass[index] = 1.0;
        Ok(Self { mass })
    }

    /// Wraps a vector already known to be a distribution.
    pub(crate) fn from_normalized(mass: Vec<f64>) -> Self {
        debug_assert!(!mass.is_empty());
        debug_assert!(mass.iter().all(|&m| m >= 0.0), "negative mass: {mass:?}");
        debug_assert!(
            (mass.iter().sum::<f64>() - 1.0).abs() <= INTERNAL_TOLERANCE,
            "unnormalized: {mass:?}"
        );
        Self { mass }
    }

    /// Divides a non-negative vector with positive sum by its sum.
    pub(crate) fn from_weights(mut mass: Vec<f64>) -> Self {
        let total: f64 = mass.iter().sum();
        debug_assert!(total > 0.0);
        for m in &mut mass {
            *m /= total;
        }
        Self::from_normalized(mass)
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn space_size(&self) -> usize {
        self.mass.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.mass
    }

    /// Euclidean norm of the mass vector.
    pub fn l2_norm(&self) -> f64 {
        self.mass.iter().map(|m| m * m).sum::<f64>().sqrt()
    }

    /// Inverse-CDF sampling over the stored entry order.
    pub fn sample_index(&self, u: f64) -> usize {
        sample_index(&self.mass, u)
    }
}

/// The uniform strategy `U` over Ω.
pub fn uniform_strategy(space: SearchSpace) -> StrategyDistribution {
    StrategyDistribution::uniform(space)
}

/// Checks and normalizes a raw mass vector read from user input.
pub fn validate_strategy(space_size: usize, raw: &[f64]) -> Result<StrategyDistribution> {
    if raw.len() != space_size {
        return Err(Error::DimensionMismatch {
            expected: space_size,
            found: raw.len(),
        });
    }
    if space_size == 0 {
        return Err(invalid("search space must contain at least one element"));
    }
    let mut mass = Vec::with_capacity(raw.len());
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(invalid(format!("non-finite mass {value} at index {index}")));
        }
        if value < -NEGATIVE_CLAMP {
            return Err(Error::NegativeMass { index, value });
        }
        mass.push(value.max(0.0));
    }
    let sum: f64 = mass.iter().sum();
    if (sum - 1.0).abs() > INPUT_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    if sum != 1.0 {
        for m in &mut mass {
            *m /= sum;
        }
    }
    Ok(StrategyDistribution { mass })
}

/// Index `i` such that the cumulative mass through `i` first exceeds `u`.
/// Falls back to the last index with positive mass when rounding leaves
/// the total slightly below `u`.
pub(crate) fn sample_index(mass: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &m) in mass.iter().enumerate() {
        acc += m;
        if u < acc {
            return i;
        }
    }
    mass.iter()
        .rposition(|&m| m > 0.0)
        .unwrap_or(mass.len() - 1)
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All k-hot targets over an n-element space, lexicographically, with the
/// default cap.
pub fn enumerate_targets(
    space_size: usize,
    k: usize,
) -> Result<impl Iterator<Item = TargetFunction>> {
    enumerate_targets_capped(space_size, k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_targets_capped(
    space_size: usize,
    k: usize,
    cap: u128,
) -> Result<impl Iterator<Item = TargetFunction>> {
    if space_size == 0 || k == 0 || k > space_size {
        return Err(invalid(format!(
            "need 1 ≤ k ≤ n, got n = {space_size}, k = {k}"
        )));
    }
    let count = binomial(space_size, k);
    if count > cap {
        return Err(Error::TooLarge {
            n: space_size,
            k,
            count,
            cap,
        });
    }
    Ok((0..space_size)
        .combinations(k)
        .map(move |indices| TargetFunction {
            space_size,
            indices,
        }))
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Expected per-query probability of success, `q(t, f) = tᵀ P̄_f`.
pub fn per_query_success(t: &TargetFunction, pbar: &StrategyDistribution) -> Result<f64> {
    check_dims(t.space_size(), pbar.space_size())?;
    Ok(t.dot(pbar.mass()))
}

/// The black-box algorithms available for simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgorithmSpec {
    /// Every query is drawn uniformly from Ω.
    UniformSampler,
    /// The first query is uniform. Afterwards, mass `gamma` is spread over
    /// the indices holding the best evaluation seen so far and `1 - gamma`
    /// over all of Ω.
    EpsilonGreedy { gamma: f64 },
}

impl AlgorithmSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AlgorithmSpec::UniformSampler => Ok(()),
            AlgorithmSpec::EpsilonGreedy { gamma } => {
                if gamma.is_finite() && (0.0..=1.0).contains(&gamma) {
                    Ok(())
                } else {
                    Err(Error::InvalidAlgorithmSpec(format!(
                        "epsilon-greedy gamma must lie in [0, 1], got {gamma}"
                    )))
                }
            }
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::UniformSampler => f.write_str("uniform-sampler"),
            AlgorithmSpec::EpsilonGreedy { gamma } => write!(f, "epsilon-greedy({gamma})"),
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    /// Accepts `uniform-sampler`, `epsilon-greedy(0.3)`, `epsilon-greedy:0.3`
    /// and `epsilon-greedy=0.3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "uniform-sampler" || s == "uniform" {
            return Ok(AlgorithmSpec::UniformSampler);
        }
        let rest = s
            .strip_prefix("epsilon-greedy")
            .ok_or_else(|| Error::InvalidAlgorithmSpec(format!("unknown algorithm `{s}`")))?;
        let arg = if let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            inner
        } else if let Some(v) = rest.strip_prefix(':').or_else(|| rest.strip_prefix('=')) {
            v
        } else {
            return Err(Error::InvalidAlgorithmSpec(format!(
                "expected `epsilon-greedy(<gamma>)`, got `{s}`"
            )));
        };
        let gamma: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::InvalidAlgorithmSpec(format!("gamma `{arg}` is not a number")))?;
        let spec = AlgorithmSpec::EpsilonGreedy { gamma };
        spec.validate()?;
        Ok(spec)
    }
}

/// Payload of an information resource.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourcePayload {
    /// The resource is described directly by the averaged strategy it induces.
    ExplicitStrategy(StrategyDistribution),
    /// A fitness vector over Ω and a query budget, consumed by an algorithm.
    FitnessTask { fitness: Vec<f64>, queries: usize },
}

/// An external information resource `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InformationResource {
    pub id: String,
    pub payload: ResourcePayload,
}

impl InformationResource {
    pub fn explicit(id: impl Into<String>, strategy: StrategyDistribution) -> Self {
        Self {
            id: id.into(),
            payload: ResourcePayload::ExplicitStrategy(strategy),
        }
    }

    pub fn fitness_task(id: impl Into<String>, fitness: Vec<f64>, queries: usize) -> Result<Self> {
        if fitness.is_empty() {
            return Err(invalid("fitness vector must not be empty"));
        }
        if let Some(i) = fitness.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("fitness entry {i} is not finite")));
        }
        if queries == 0 {
            return Err(invalid("query budget must be positive"));
        }
        Ok(Self {
            id: id.into(),
            payload: ResourcePayload::FitnessTask { fitness, queries },
        })
    }

    pub fn space_size(&self) -> usize {
        match &self.payload {
            ResourcePayload::ExplicitStrategy(s) => s.space_size(),
            ResourcePayload::FitnessTask { fitness, .. } => fitness.len(),
        }
    }
}

/// A finite, non-empty set `B` of resources over a common search space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceSet {
    space_size: usize,
    resources: Vec<InformationResource>,
}

/// Averaged strategies keyed by resource id.
pub type StrategyMap = BTreeMap<String, StrategyDistribution>;

impl ResourceSet {
    pub fn new(space_size: usize, resources: Vec<InformationResource>) -> Result<Self> {
        SearchSpace::new(space_size)?;
        if resources.is_empty() {
            return Err(invalid("resource set must not be empty"));
        }
        let mut seen = std::collections::HashSet::new();
        for r in &resources {
            check_dims(space_size, r.space_size())?;
            if !seen.insert(r.id.as_str()) {
                return Err(invalid(format!("duplicate resource id `{}`", r.id)));
            }
        }
        Ok(Self {
            space_size,
            resources,
        })
    }

    /// A set of explicit-strategy resources named `f0`, `f1`, ….
    pub fn from_strategies(strategies: Vec<StrategyDistribution>) -> Result<Self> {
        let space_size = strategies
            .first()
            .map(StrategyDistribution::space_size)
            .ok_or_else(|| invalid("resource set must not be empty"))?;
        let resources = strategies
            .into_iter()
            .enumerate()
            .map(|(i, s)| InformationResource::explicit(format!("f{i}"), s))
            .collect();
        Self::new(space_size, resources)
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn resources(&self) -> &[InformationResource] {
        &self.resources
    }

    pub fn len(&self) -> usize {
        self.resources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resources.is_empty()
    }

    /// Induced strategy of every resource. Each resource simulates under
    /// its own seed derived from `seed` and its id.
    pub fn strategies(
        &self,
        algorithm: AlgorithmSpec,
        runs: usize,
        seed: u64,
    ) -> Result<StrategyMap> {
        self.resources
            .iter()
            .map(|r| {
                let s = induced_strategy(r, algorithm, runs, named_seed(seed, &r.id))?;
                Ok((r.id.clone(), s))
            })
            .collect()
    }

    /// Strategies in set order, looked up from `strategies`.
    pub fn ordered<'a>(
        &self,
        strategies: &'a StrategyMap,
    ) -> Result<Vec<&'a StrategyDistribution>> {
        self.resources
            .iter()
            .map(|r| {
                let s = strategies
                    .get(&r.id)
                    .ok_or_else(|| Error::MissingStrategy(r.id.clone()))?;
                check_dims(self.space_size, s.space_size())?;
                Ok(s)
            })
            .collect()
    }
}

/// A distribution `D` over a resource set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceDistribution {
    set: ResourceSet,
    weights: Vec<f64>,
}

impl ResourceDistribution {
    /// Weights are accepted within the input tolerance and renormalized.
    pub fn new(set: ResourceSet, weights: Vec<f64>) -> Result<Self> {
        let weights = validate_strategy(set.len(), &weights)
            .map_err(|e| match e {
                Error::DimensionMismatch { expected, found } => invalid(format!(
                    "expected {expected} weights (one per resource), found {found}"
                )),
                other => other,
            })?
            .into_inner();
        Ok(Self { set, weights })
    }

    /// `U[B]`, the uniform distribution over the set.
    pub fn uniform(set: ResourceSet) -> Self {
        let w = 1.0 / set.len() as f64;
        let weights = vec![w; set.len()];
        Self { set, weights }
    }

    pub fn set(&self) -> &ResourceSet {
        &self.set
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn space_size(&self) -> usize {
        self.set.space_size()
    }
}

/// One query of a search run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchStep {
    pub queried_index: usize,
    pub evaluation: f64,
}

/// History `H` of a run together with the per-step strategies `P̃`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchTrace {
    pub steps: Vec<SearchStep>,
    pub per_step_strategies: Vec<StrategyDistribution>,
}

impl SearchTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Time average of the per-step strategies.
    pub fn time_average(&self) -> StrategyDistribution {
        let n = self.per_step_strategies[0].space_size();
        let mut acc = vec![0.0; n];
        for s in &self.per_step_strategies {
            for (a, m) in acc.iter_mut().zip(s.mass()) {
                *a += m;
            }
        }
        StrategyDistribution::from_weights(acc)
    }
}

/// Runs one search, calling `visit(strategy, queried, evaluation)` per step.
fn simulate<R: Rng>(
    fitness: &[f64],
    queries: usize,
    algorithm: AlgorithmSpec,
    rng: &mut R,
    mut visit: impl FnMut(&[f64], usize, f64),
) {
    let n = fitness.len();
    let uniform = 1.0 / n as f64;
    let mut strategy = vec![uniform; n];
    let mut best = f64::NEG_INFINITY;
    let mut argmax: Vec<usize> = Vec::new();
    let mut dirty = false;

    for _ in 0..queries {
        if let AlgorithmSpec::EpsilonGreedy { gamma } = algorithm {
            if dirty {
                let explore = (1.0 - gamma) * uniform;
                let exploit = gamma / argmax.len() as f64;
                strategy.iter_mut().for_each(|m| *m = explore);
                for &i in &argmax {
                    strategy[i] += exploit;
                }
                dirty = false;
            }
        }
        let index = sample_index(&strategy, rng.random::<f64>());
        let evaluation = fitness[index];
        visit(&strategy, index, evaluation);

        if evaluation > best {
            best = evaluation;
            argmax.clear();
            argmax.push(index);
            dirty = true;
        } else if evaluation == best {
            if let Err(pos) = argmax.binary_search(&index) {
                argmax.insert(pos, index);
                dirty = true;
            }
        }
    }
}

/// Runs the algorithm once on a fitness-task resource.
pub fn run_search(
    resource: &InformationResource,
    algorithm: AlgorithmSpec,
    seed: u64,
) -> Result<SearchTrace> {
    algorithm.validate()?;
    let (fitness, queries) = match &resource.payload {
        ResourcePayload::FitnessTask { fitness, queries } => (fitness, *queries),
        ResourcePayload::ExplicitStrategy(_) => {
            return Err(invalid(format!(
                "resource `{}` has an explicit strategy; only fitness tasks can be searched",
                resource.id
            )))
        }
    };
    let mut rng = stream_rng(seed, 0);
    let mut steps = Vec::with_capacity(queries);
    let mut per_step_strategies = Vec::with_capacity(queries);
    simulate(
        fitness,
        queries,
        algorithm,
        &mut rng,
        |strategy, queried_index, evaluation| {
            steps.push(SearchStep {
                queried_index,
                evaluation,
            });
            per_step_strategies.push(StrategyDistribution::from_normalized(strategy.to_vec()));
        },
    );
    Ok(SearchTrace {
        steps,
        per_step_strategies,
    })
}

/// Estimates `P̄_f`: average the per-step strategies within each run, then
/// average across `runs` independent runs. Explicit strategies are returned
/// unchanged and the algorithm is not consulted.
///
/// Run `r` draws from stream `r` of `seed`, and per-run averages are summed
/// in run order, so the output does not depend on the rayon pool size.
pub fn induced_strategy(
    resource: &InformationResource,
    algorithm: AlgorithmSpec,
    runs: usize,
    seed: u64,
) -> Result<StrategyDistribution> {
    let (fitness, queries) = match &resource.payload {
        ResourcePayload::ExplicitStrategy(s) => return Ok(s.clone()),
        ResourcePayload::FitnessTask { fitness, queries } => (fitness, *queries),
    };
    algorithm.validate()?;
    if runs == 0 {
        return Err(invalid("runs must be at least 1"));
    }
    let n = fitness.len();
    let per_run: Vec<Vec<f64>> = (0..runs as u64)
        .into_par_iter()
        .map(|run| {
            let mut rng = stream_rng(seed, run);
            let mut acc = vec![0.0; n];
            simulate(fitness, queries, algorithm, &mut rng, |strategy, _, _| {
                for (a, m) in acc.iter_mut().zip(strategy) {
                    *a += m;
                }
            });
            let steps = queries as f64;
            acc.iter_mut().for_each(|a| *a /= steps);
            acc
        })
        .collect();

    let mut total = vec![0.0; n];
    for run in &per_run {
        for (t, v) in total.iter_mut().zip(run) {
            *t += v;
        }
    }
    Ok(StrategyDistribution::from_weights(total))
}

/// `Σ_i w_i · S_i` for strategies in matching order.
pub fn mix_weighted(
    weights: &[f64],
    strategies: &[&StrategyDistribution],
) -> Result<StrategyDistribution> {
    check_dims(weights.len(), strategies.len())?;
    let first = strategies.first().ok_or(Error::EmptySample)?;
    let n = first.space_size();
    let mut acc = vec![0.0; n];
    for (&w, s) in weights.iter().zip(strategies) {
        check_dims(n, s.space_size())?;
        if w == 0.0 {
            continue;
        }
        for (a, m) in acc.iter_mut().zip(s.mass()) {
            *a += w * m;
        }
    }
    Ok(StrategyDistribution::from_weights(acc))
}

/// `P̄_D = E_D[P̄_F]`, the D-weighted average of the resources' strategies.
pub fn mix_strategies(
    d: &ResourceDistribution,
    strategies: &StrategyMap,
) -> Result<StrategyDistribution> {
    let ordered = d.set().ordered(strategies)?;
    mix_weighted(d.weights(), &ordered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sd(v: &[f64]) -> StrategyDistribution {
        validate_strategy(v.len(), v).unwrap()
    }

    #[test]
    fn uniform_examples() {
        let u = uniform_strategy(SearchSpace::new(4).unwrap());
        assert_eq!(u.mass(), &[0.25; 4]);
        assert_eq!(
            uniform_strategy(SearchSpace::new(1).unwrap()).mass(),
            &[1.0]
        );
        assert_eq!(
            uniform_strategy(SearchSpace::new(2).unwrap()).mass(),
            &[0.5, 0.5]
        );
        assert!(SearchSpace::new(0).is_err());
    }

    #[test]
    fn validate_examples() {
        let ok = validate_strategy(4, &[0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(ok.mass(), &[0.5, 0.5, 0.0, 0.0]);

        let renorm = validate_strategy(4, &[0.5, 0.5000005, 0.0, 0.0]).unwrap();
        assert!((renorm.mass().iter().sum::<f64>() - 1.0).abs() <= 2.0 * f64::EPSILON);

        assert!(matches!(
            validate_strategy(4, &[0.7, 0.7, 0.0, 0.0]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            validate_strategy(3, &[0.5, 0.5, 0.0, 0.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 4
            })
        ));
        assert!(matches!(
            validate_strategy(2, &[1.1, -0.1]),
            Err(Error::NegativeMass { index: 1, .. })
        ));
        let clamped = validate_strategy(2, &[1.0, -1e-13]).unwrap();
        assert_eq!(clamped.mass()[1], 0.0);
    }

    #[test]
    fn target_construction() {
        let t = TargetFunction::new(5, vec![3, 1]).unwrap();
        assert_eq!(t.indices(), &[1, 3]);
        assert_eq!(t.k(), 2);
        assert_abs_diff_eq!(t.p(), 0.4);
        assert_eq!(t.to_string(), "{1,3}");
        assert!(TargetFunction::new(5, vec![1, 1]).is_err());
        assert!(TargetFunction::new(5, vec![5]).is_err());
        assert!(TargetFunction::new(5, Vec::new()).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let all: Vec<_> = enumerate_targets(4, 2).unwrap().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0].indices(), &[0, 1]);
        assert_eq!(all[5].indices(), &[2, 3]);

        let full: Vec<_> = enumerate_targets(3, 3).unwrap().collect();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].indices(), &[0, 1, 2]);

        assert!(matches!(
            enumerate_targets_capped(30, 15, 1_000_000),
            Err(Error::TooLarge { .. })
        ));
        assert!(enumerate_targets(4, 0).is_err());
        assert!(enumerate_targets(4, 5).is_err());
    }

    #[test]
    fn enumeration_count_matches_bitmask_oracle() {
        // Oracle: count n-bit masks with popcount k.
        for n in 1..=12usize {
            for k in 1..=n {
                let oracle = (0u32..(1 << n))
                    .filter(|m| m.count_ones() as usize == k)
                    .count();
                let listed: Vec<_> = enumerate_targets(n, k).unwrap().collect();
                assert_eq!(listed.len(), oracle, "n={n} k={k}");
                assert_eq!(binomial(n, k), oracle as u128);
                assert!(listed.windows(2).all(|w| w[0].indices() < w[1].indices()));
            }
        }
        assert_eq!(enumerate_targets(12, 6).unwrap().count(), 924);
    }

    #[test]
    fn per_query_success_examples() {
        let t = TargetFunction::new(4, vec![0, 1]).unwrap();
        assert_abs_diff_eq!(
            per_query_success(&t, &sd(&[0.5, 0.3, 0.2, 0.0])).unwrap(),
            0.8
        );
        let t0 = TargetFunction::new(4, vec![0]).unwrap();
        let u = uniform_strategy(SearchSpace::new(4).unwrap());
        assert_eq!(per_query_success(&t0, &u).unwrap(), 0.25);
        let all = TargetFunction::new(4, vec![0, 1, 2, 3]).unwrap();
        assert_abs_diff_eq!(
            per_query_success(&all, &sd(&[0.1, 0.2, 0.3, 0.4])).unwrap(),
            1.0
        );
        assert!(per_query_success(&t, &u.clone()).is_ok());
        let small = uniform_strategy(SearchSpace::new(3).unwrap());
        assert!(matches!(
            per_query_success(&t, &small),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn algorithm_spec_parsing() {
        assert_eq!(
            "uniform-sampler".parse::<AlgorithmSpec>().unwrap(),
            AlgorithmSpec::UniformSampler
        );
        assert_eq!(
            "epsilon-greedy(0.25)".parse::<AlgorithmSpec>().unwrap(),
            AlgorithmSpec::EpsilonGreedy { gamma: 0.25 }
        );
        assert_eq!(
            "epsilon-greedy:1".parse::<AlgorithmSpec>().unwrap(),
            AlgorithmSpec::EpsilonGreedy { gamma: 1.0 }
        );
        assert!("epsilon-greedy(1.5)".parse::<AlgorithmSpec>().is_err());
        assert!("hill-climber".parse::<AlgorithmSpec>().is_err());
        let spec = AlgorithmSpec::EpsilonGreedy { gamma: 0.5 };
        assert_eq!(spec.to_string().parse::<AlgorithmSpec>().unwrap(), spec);
    }

    #[test]
    fn explicit_strategy_passes_through() {
        let s = sd(&[0.5, 0.0, 0.0, 0.5]);
        let r = InformationResource::explicit("a", s.clone());
        let got = induced_strategy(&r, AlgorithmSpec::EpsilonGreedy { gamma: 0.9 }, 5, 1).unwrap();
        assert_eq!(got, s);
    }

    #[test]
    fn uniform_sampler_trace() {
        let r = InformationResource::fitness_task("f", vec![3.0, 1.0, 2.0], 3).unwrap();
        let trace = run_search(&r, AlgorithmSpec::UniformSampler, 11).unwrap();
        assert_eq!(trace.len(), 3);
        for (step, s) in trace.steps.iter().zip(&trace.per_step_strategies) {
            assert_eq!(s.mass(), &[1.0 / 3.0; 3]);
            assert_eq!(step.evaluation, [3.0, 1.0, 2.0][step.queried_index]);
        }
    }

    #[test]
    fn zero_gamma_matches_uniform_sampler() {
        let r = InformationResource::fitness_task("f", vec![0.0, 5.0, 1.0, 2.0], 6).unwrap();
        let a = run_search(&r, AlgorithmSpec::UniformSampler, 3).unwrap();
        let b = run_search(&r, AlgorithmSpec::EpsilonGreedy { gamma: 0.0 }, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn same_seed_same_trace() {
        let r = InformationResource::fitness_task("f", vec![0.0, 5.0, 1.0, 2.0, 7.0], 8).unwrap();
        let alg = AlgorithmSpec::EpsilonGreedy { gamma: 0.7 };
        let a = serde_json::to_string(&run_search(&r, alg, 42).unwrap()).unwrap();
        let b = serde_json::to_string(&run_search(&r, alg, 42).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn run_search_rejects_explicit_resources() {
        let r = InformationResource::explicit("a", sd(&[1.0, 0.0]));
        assert!(run_search(&r, AlgorithmSpec::UniformSampler, 0).is_err());
        let f = InformationResource::fitness_task("f", vec![1.0, 0.0], 2).unwrap();
        assert!(matches!(
            run_search(&f, AlgorithmSpec::EpsilonGreedy { gamma: -0.1 }, 0),
            Err(Error::InvalidAlgorithmSpec(_))
        ));
    }

    #[test]
    fn greedy_ties_include_all_indices() {
        // Constant fitness: every queried index joins the argmax set.
        let r = InformationResource::fitness_task("f", vec![1.0; 4], 5).unwrap();
        let trace = run_search(&r, AlgorithmSpec::EpsilonGreedy { gamma: 1.0 }, 9).unwrap();
        let mut seen = Vec::new();
        for (i, step) in trace.steps.iter().enumerate() {
            let s = trace.per_step_strategies[i].mass();
            if i > 0 {
                let w = 1.0 / seen.len() as f64;
                for (j, &mass) in s.iter().enumerate() {
                    let expected = if seen.contains(&j) { w } else { 0.0 };
                    assert_abs_diff_eq!(mass, expected, epsilon = 1e-15);
                }
            }
            if !seen.contains(&step.queried_index) {
                seen.push(step.queried_index);
            }
        }
    }

    #[test]
    fn mix_examples() {
        let set = ResourceSet::from_strategies(vec![
            sd(&[1.0, 0.0, 0.0, 0.0]),
            sd(&[0.0, 0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let map = set.strategies(AlgorithmSpec::UniformSampler, 1, 0).unwrap();
        let d = ResourceDistribution::uniform(set.clone());
        assert_eq!(
            mix_strategies(&d, &map).unwrap().mass(),
            &[0.5, 0.0, 0.0, 0.5]
        );

        let d = ResourceDistribution::new(set.clone(), vec![1.0, 0.0]).unwrap();
        assert_eq!(
            mix_strategies(&d, &map).unwrap().mass(),
            &[1.0, 0.0, 0.0, 0.0]
        );

        let single = ResourceSet::from_strategies(vec![sd(&[0.2, 0.8])]).unwrap();
        let m = single
            .strategies(AlgorithmSpec::UniformSampler, 1, 0)
            .unwrap();
        let d = ResourceDistribution::uniform(single);
        assert_eq!(mix_strategies(&d, &m).unwrap().mass(), &[0.2, 0.8]);

        let mut missing = map.clone();
        missing.remove("f1");
        let d = ResourceDistribution::uniform(set);
        assert_eq!(
            mix_strategies(&d, &missing),
            Err(Error::MissingStrategy("f1".into()))
        );
    }

    #[test]
    fn resource_set_validation() {
        let a = InformationResource::explicit("a", sd(&[1.0, 0.0]));
        let b = InformationResource::explicit("a", sd(&[0.0, 1.0]));
        assert!(ResourceSet::new(2, vec![a.clone(), b]).is_err());
        assert!(ResourceSet::new(3, vec![a.clone()]).is_err());
        assert!(ResourceSet::new(2, vec![]).is_err());
        let set = ResourceSet::new(2, vec![a]).unwrap();
        assert!(ResourceDistribution::new(set.clone(), vec![0.5, 0.5]).is_err());
        assert!(ResourceDistribution::new(set, vec![0.9]).is_err());
    }

    #[test]
    fn inverse_cdf_sampling() {
        let m = [0.25, 0.0, 0.75];
        assert_eq!(sample_index(&m, 0.0), 0);
        assert_eq!(sample_index(&m, 0.2499), 0);
        assert_eq!(sample_index(&m, 0.25), 2);
        assert_eq!(sample_index(&m, 0.999_999_999_999), 2);
        assert_eq!(sample_index(&[0.5, 0.5, 0.0], 1.0), 1);
    }
}
