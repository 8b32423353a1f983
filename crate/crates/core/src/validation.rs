//! Statistical checks of sampler output against exhaustively enumerated
//! ground truth: total variation, chi-square, failure rates and paired
//! campaigns against an exactly uniform baseline.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::bipartite::{bip_run, BipConfig, BipOutcome, DegreeSequence};
use crate::counting::{bipartite_rejection_sample, rejection_sample};
use crate::graph::Graph;
use crate::sampler::{run, GenerationOutcome, Params};
use crate::seed::{run_rng, SeededRng};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("sampled graph {0} is not in the enumerated set")]
    ForeignKey(String),
    #[error("no successful samples")]
    NoSuccesses,
    #[error("ground truth is empty")]
    EmptyGroundTruth,
}

/// Sorted labeled edge list as bytes: `n`, then each edge, as little-endian
/// `u32`s. Equal edge sets give equal keys.
pub fn canonical_key(g: &Graph) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 8 * g.edge_count());
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    for (i, j) in g.edges() {
        out.extend_from_slice(&(i as u32).to_le_bytes());
        out.extend_from_slice(&(j as u32).to_le_bytes());
    }
    out
}

fn describe_key(key: &[u8]) -> String {
    if key.len() < 4 || key.len() % 8 != 4 {
        return key.iter().map(|b| format!("{b:02x}")).collect();
    }
    let words: Vec<u32> = key
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let edges: Vec<String> = words[1..].chunks(2).map(|e| format!("{}-{}", e[0], e[1])).collect();
    format!("n={} [{}]", words[0], edges.join(" "))
}

/// Observed frequency of each distinct output plus failed runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    counts: BTreeMap<Vec<u8>, u64>,
    total: u64,
    failures: u64,
}

impl EmpiricalDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, outcome: Option<Vec<u8>>) {
        self.total += 1;
        match outcome {
            Some(key) => *self.counts.entry(key).or_insert(0) += 1,
            None => self.failures += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn failures(&self) -> u64 {
        self.failures
    }

    pub fn successes(&self) -> u64 {
        self.total - self.failures
    }

    pub fn failure_rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.failures as f64 / self.total as f64
        }
    }

    pub fn count(&self, key: &[u8]) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], u64)> {
        self.counts.iter().map(|(k, &c)| (k.as_slice(), c))
    }
}

impl FromIterator<Option<Vec<u8>>> for EmpiricalDistribution {
    fn from_iter<I: IntoIterator<Item = Option<Vec<u8>>>>(iter: I) -> Self {
        let mut d = Self::new();
        for o in iter {
            d.record(o);
        }
        d
    }
}

/// The enumerated set the sampler should be uniform over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    keys: BTreeSet<Vec<u8>>,
}

impl GroundTruth {
    pub fn from_graphs<'a, I: IntoIterator<Item = &'a Graph>>(graphs: I) -> Self {
        GroundTruth {
            keys: graphs.into_iter().map(canonical_key).collect(),
        }
    }

    pub fn from_keys<I: IntoIterator<Item = Vec<u8>>>(keys: I) -> Self {
        GroundTruth {
            keys: keys.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, key: &[u8]) -> bool {
        self.keys.contains(key)
    }

    fn check(&self, emp: &EmpiricalDistribution) -> Result<f64, ValidationError> {
        if self.keys.is_empty() {
            return Err(ValidationError::EmptyGroundTruth);
        }
        if let Some((key, _)) = emp.iter().find(|(k, _)| !self.contains(k)) {
            return Err(ValidationError::ForeignKey(describe_key(key)));
        }
        if emp.successes() == 0 {
            return Err(ValidationError::NoSuccesses);
        }
        Ok(emp.successes() as f64)
    }
}

/// Half the L1 distance between the success-conditioned empirical
/// distribution and uniform over `truth`.
pub fn tv_distance(emp: &EmpiricalDistribution, truth: &GroundTruth) -> Result<f64, ValidationError> {
    let s = truth.check(emp)?;
    let u = 1.0 / truth.len() as f64;
    let observed: f64 = emp.iter().map(|(_, c)| (c as f64 / s - u).abs()).sum();
    let unseen = (truth.len() - emp.distinct()) as f64 * u;
    Ok(0.5 * (observed + unseen))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub stat: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of the successes against uniform over `truth`.
pub fn chi_square(emp: &EmpiricalDistribution, truth: &GroundTruth) -> Result<ChiSquare, ValidationError> {
    let s = truth.check(emp)?;
    let g = truth.len();
    let expected = s / g as f64;
    let observed: f64 = emp
        .iter()
        .map(|(_, c)| (c as f64 - expected).powi(2) / expected)
        .sum();
    let stat = observed + (g - emp.distinct()) as f64 * expected;
    let dof = g - 1;
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).expect("positive dof").sf(stat)
    };
    Ok(ChiSquare { stat, dof, p_value })
}

/// Expected TV distance of an exactly uniform sampler over `size` outcomes
/// after `samples` draws, from the normal approximation of each cell.
pub fn sampling_noise_bound(size: usize, samples: u64) -> f64 {
    let g = size as f64;
    (g * (1.0 - 1.0 / g) / (2.0 * std::f64::consts::PI * samples as f64)).sqrt()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// One draw per call: the canonical key of the output, or `None` on failure.
pub trait Sampler: Sync {
    fn draw(&self, rng: &mut SeededRng) -> Option<Vec<u8>>;
}

/// The sequential sampler on simple graphs.
#[derive(Debug, Clone, Copy)]
pub struct SequentialSampler(pub Params);

impl Sampler for SequentialSampler {
    fn draw(&self, rng: &mut SeededRng) -> Option<Vec<u8>> {
        match run(self.0, rng) {
            GenerationOutcome::Success(g) => Some(canonical_key(&g)),
            GenerationOutcome::Fail(_) => None,
        }
    }
}

/// Uniform `m`-subsets filtered by girth.
#[derive(Debug, Clone, Copy)]
pub struct RejectionBaseline {
    pub params: Params,
    pub max_attempts: usize,
}

impl Sampler for RejectionBaseline {
    fn draw(&self, rng: &mut SeededRng) -> Option<Vec<u8>> {
        let p = self.params;
        rejection_sample(p.n, p.m, p.k, rng, self.max_attempts)
            .ok()
            .map(|(g, _)| canonical_key(&g))
    }
}

/// The sequential sampler on bipartite graphs with given degrees.
#[derive(Debug, Clone)]
pub struct BipartiteSequential {
    pub degrees: DegreeSequence,
    pub config: BipConfig,
}

impl Sampler for BipartiteSequential {
    fn draw(&self, rng: &mut SeededRng) -> Option<Vec<u8>> {
        match bip_run(&self.degrees, self.config, rng) {
            Ok(BipOutcome::Success(g)) => Some(canonical_key(g.graph())),
            Ok(BipOutcome::Fail { .. }) => None,
            Err(e) => panic!("bipartite sampler misconfigured: {e}"),
        }
    }
}

/// Configuration-model pairings filtered by simplicity and girth.
#[derive(Debug, Clone)]
pub struct BipartiteRejection {
    pub degrees: DegreeSequence,
    pub k: usize,
    pub max_attempts: usize,
}

impl Sampler for BipartiteRejection {
    fn draw(&self, rng: &mut SeededRng) -> Option<Vec<u8>> {
        bipartite_rejection_sample(&self.degrees, self.k, rng, self.max_attempts)
            .ok()
            .map(|(g, _)| canonical_key(g.graph()))
    }
}

/// `samples` independent draws; draw `i` uses stream `(arm, i)` of `seed`.
pub fn collect<S: Sampler + ?Sized>(sampler: &S, samples: u64, seed: u64, arm: u16) -> EmpiricalDistribution {
    let keys: Vec<Option<Vec<u8>>> = (0..samples)
        .into_par_iter()
        .map(|i| sampler.draw(&mut run_rng(seed, arm, i)))
        .collect();
    keys.into_iter().collect()
}

pub const SAMPLER_ARM: u16 = 0;
pub const BASELINE_ARM: u16 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Instance {
    Simple { n: usize, m: usize, k: usize },
    Bipartite { left: Vec<usize>, right: Vec<usize>, k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub instance: Instance,
    pub samples: u64,
    pub seed: u64,
    pub failures: u64,
    pub failure_rate: f64,
    pub tv_distance: f64,
    pub baseline_tv: f64,
    pub chi_square: ChiSquare,
    pub baseline_chi_square: ChiSquare,
    pub ground_truth_size: usize,
    pub sampling_noise_bound: f64,
    pub distinct_outputs: usize,
}

impl UniformityReport {
    /// `tv_distance - baseline_tv`.
    pub fn excess_tv(&self) -> f64 {
        self.tv_distance - self.baseline_tv
    }

    pub fn passes(&self, margin: f64) -> bool {
        self.tv_distance <= self.baseline_tv + margin
    }
}

/// Paired campaign: `sampler` and `baseline` each draw `samples` times
/// under independent streams of `seed`, and both are scored against `truth`.
pub fn uniformity_campaign<S, B>(
    instance: Instance,
    sampler: &S,
    baseline: &B,
    truth: &GroundTruth,
    samples: u64,
    seed: u64,
) -> Result<UniformityReport, ValidationError>
where
    S: Sampler + ?Sized,
    B: Sampler + ?Sized,
{
    let emp = collect(sampler, samples, seed, SAMPLER_ARM);
    let base = collect(baseline, samples, seed, BASELINE_ARM);
    Ok(UniformityReport {
        instance,
        samples,
        seed,
        failures: emp.failures(),
        failure_rate: emp.failure_rate(),
        tv_distance: tv_distance(&emp, truth)?,
        baseline_tv: tv_distance(&base, truth)?,
        chi_square: chi_square(&emp, truth)?,
        baseline_chi_square: chi_square(&base, truth)?,
        ground_truth_size: truth.len(),
        sampling_noise_bound: sampling_noise_bound(truth.len(), emp.successes()),
        distinct_outputs: emp.distinct(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailureRate {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub runs: u64,
    pub failures: u64,
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / runs)`.
    pub std_err: f64,
}

/// Fraction of runs of the sequential sampler that fail.
pub fn measure_failure_rate(params: Params, runs: u64, seed: u64) -> FailureRate {
    let failures: u64 = (0..runs)
        .into_par_iter()
        .map(|i| u64::from(matches!(run(params, &mut run_rng(seed, SAMPLER_ARM, i)), GenerationOutcome::Fail(_))))
        .sum();
    let rate = failures as f64 / runs as f64;
    FailureRate {
        n: params.n,
        m: params.m,
        k: params.k,
        runs,
        failures,
        rate,
        std_err: (rate * (1.0 - rate) / runs as f64).sqrt(),
    }
}
