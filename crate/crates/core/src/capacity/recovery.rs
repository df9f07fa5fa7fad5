use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pcorr::{pcorr_analytic, DetectionStats, Scenario, MIN_SIGMA};
use crate::error::{HvError, Result};
use crate::memory::ItemMemory;
use crate::model::{Model, ModelKind, ModelParams, Normalization};
use crate::space::{similarity, Hypervector, Metric, RngStream};

/// Fewest queries accepted for estimating detection statistics.
pub const MIN_STATS_TRIALS: usize = 1000;

/// Larger-is-better clean-up score: 1 − 2·Hamming for binary spaces, the mean
/// phasor cosine for modular spaces and dot/D otherwise.
pub fn detection_score(model: &Model, query: &Hypervector, item: &Hypervector) -> Result<f64> {
    match model.default_metric() {
        Metric::Hamming => Ok(1.0 - 2.0 * similarity(Metric::Hamming, query, item)?),
        Metric::McrManhattan | Metric::PhasorCos => similarity(Metric::PhasorCos, query, item),
        _ => Ok(similarity(Metric::Dot, query, item)? / model.dim() as f64),
    }
}

fn score_name(model: &Model) -> &'static str {
    match model.default_metric() {
        Metric::Hamming => "1-2*hamming",
        Metric::McrManhattan | Metric::PhasorCos => "phasor-cos",
        _ => "dot/D",
    }
}

/// Settings for the sequence recovery sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub model: ModelKind,
    pub dim: usize,
    /// Item memory size N.
    pub items: usize,
    /// Sequence lengths m to sweep.
    pub lengths: Vec<usize>,
    /// Independent runs, each with a freshly seeded model and item memory.
    pub runs: usize,
    /// Minimum recovered elements per run and length.
    pub trials: usize,
    /// Queries used to estimate the detection statistics of each length.
    pub stats_trials: usize,
    /// Bundle normalization; the model default when absent.
    pub norm: Option<Normalization>,
    pub seed: u64,
}

impl RecoveryConfig {
    pub fn new(model: ModelKind, dim: usize, items: usize, lengths: Vec<usize>, seed: u64) -> Self {
        Self {
            model,
            dim,
            items,
            lengths,
            runs: 5,
            trials: 2000,
            stats_trials: 2000,
            norm: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HvError::InvalidParameter(msg));
        if self.dim == 0 {
            return fail("dimension must be positive".into());
        }
        if self.items < 2 {
            return fail(format!("need at least 2 items, got {}", self.items));
        }
        if self.lengths.is_empty() {
            return fail("no sequence lengths given".into());
        }
        if self.lengths.contains(&0) {
            return fail("sequence lengths must be positive".into());
        }
        if self.runs == 0 || self.trials == 0 {
            return fail("runs and trials must be positive".into());
        }
        if self.stats_trials < MIN_STATS_TRIALS {
            return fail(format!(
                "detection statistics need at least {MIN_STATS_TRIALS} queries, got {}",
                self.stats_trials
            ));
        }
        Ok(())
    }
}

/// One sequence length of a recovery sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    pub length: usize,
    pub analytic_pcorr: f64,
    pub empirical_acc: f64,
    pub successes: usize,
    pub trials: usize,
    pub seed: u64,
    pub stats: DetectionStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityCurve {
    pub config: RecoveryConfig,
    pub points: Vec<CapacityPoint>,
}

impl CapacityCurve {
    /// Mean absolute gap between empirical accuracy and p_corr.
    pub fn mean_abs_deviation(&self) -> f64 {
        let total: f64 = self.points.iter().map(|p| (p.empirical_acc - p.analytic_pcorr).abs()).sum();
        total / self.points.len() as f64
    }
}

/// Model and item memory of one run.
fn setup(config: &RecoveryConfig, stream: &RngStream) -> Result<(Model, ItemMemory)> {
    let model = Model::new(config.model, ModelParams::with_dim(config.dim), &stream.derive("model"))?;
    let seed = stream.derive("memory").rng().next_u64();
    let memory = ItemMemory::symbols(*model.space(), model.default_metric(), seed, "s", config.items)?;
    Ok((model, memory))
}

/// Encodes one random sequence of `terms` symbols as Σ ρ^i(x_i) and returns
/// the symbol indices with the scores of every item for each position.
fn sequence_scores<R: Rng>(
    model: &Model,
    memory: &ItemMemory,
    terms: usize,
    norm: Normalization,
    rng: &mut R,
) -> Result<Vec<(usize, Vec<f64>)>> {
    let items = memory.vectors();
    let symbols: Vec<usize> = (0..terms).map(|_| rng.random_range(0..items.len())).collect();
    let rho = model.rho();
    let marked = symbols
        .iter()
        .enumerate()
        .map(|(i, &s)| model.permute(&items[s], &rho.pow(i as i64)))
        .collect::<Result<Vec<_>>>()?;
    let s = model.superpose(&marked, norm)?;
    symbols
        .iter()
        .enumerate()
        .map(|(i, &target)| {
            let query = model.permute(&s, &rho.pow(-(i as i64)))?;
            let scores = items
                .iter()
                .map(|item| detection_score(model, &query, item))
                .collect::<Result<Vec<_>>>()?;
            Ok((target, scores))
        })
        .collect()
}

/// Strict win of the target; a tie counts as a failure.
fn recovered(target: usize, scores: &[f64]) -> bool {
    let hit = scores[target];
    scores.iter().enumerate().all(|(i, &s)| i == target || s < hit)
}

fn mean_std(sum: f64, sum_sq: f64, n: usize) -> (f64, f64) {
    let mean = sum / n as f64;
    let var = if n > 1 {
        ((sum_sq - sum * mean) / (n - 1) as f64).max(0.0)
    } else {
        0.0
    };
    (mean, var.sqrt().max(MIN_SIGMA))
}

/// Monte Carlo hit and reject statistics for clean-up of one element of an
/// m-term sequence Σ ρ^i(x_i) with symbols drawn uniformly from `memory`.
pub fn estimate_detection_stats(
    model: &Model,
    memory: &ItemMemory,
    terms: usize,
    norm: Normalization,
    trials: usize,
    stream: &RngStream,
) -> Result<DetectionStats> {
    if terms == 0 {
        return Err(HvError::InvalidParameter("scenario has no superimposed terms".into()));
    }
    if trials < MIN_STATS_TRIALS {
        return Err(HvError::InvalidParameter(format!(
            "detection statistics need at least {MIN_STATS_TRIALS} queries, got {trials}"
        )));
    }
    if memory.len() < 2 {
        return Err(HvError::InvalidParameter("reject statistics need at least 2 items".into()));
    }
    let mut rng = stream.rng();
    let (mut hits, mut hits_sq, mut n_hit) = (0.0, 0.0, 0usize);
    let (mut rejects, mut rejects_sq, mut n_reject) = (0.0, 0.0, 0usize);
    while n_hit < trials {
        for (target, scores) in sequence_scores(model, memory, terms, norm, &mut rng)? {
            for (i, &s) in scores.iter().enumerate() {
                if i == target {
                    hits += s;
                    hits_sq += s * s;
                    n_hit += 1;
                } else {
                    rejects += s;
                    rejects_sq += s * s;
                    n_reject += 1;
                }
            }
        }
    }
    let (mu_hit, sigma_hit) = mean_std(hits, hits_sq, n_hit);
    let (mu_reject, sigma_reject) = mean_std(rejects, rejects_sq, n_reject);
    let scenario = Scenario {
        model: model.kind(),
        dim: model.dim(),
        items: memory.len(),
        terms,
    };
    Ok(DetectionStats::new(mu_hit, sigma_hit, mu_reject, sigma_reject)?.with_context(score_name(model), scenario))
}

/// Recovers every element of random sequences of each length and pairs the
/// accuracy with p_corr from separately estimated detection statistics.
///
/// Each (length, run) task has its own derived stream and results are merged
/// by index, so the curve does not depend on the thread count.
pub fn run_sequence_recovery_experiment(config: &RecoveryConfig) -> Result<CapacityCurve> {
    config.validate()?;
    let root = RngStream::new(config.seed, "sequence-recovery");
    let runs = (0..config.runs)
        .map(|r| setup(config, &root.derive(format!("run-{r}"))))
        .collect::<Result<Vec<_>>>()?;
    let stats_setup = setup(config, &root.derive("stats"))?;
    let norm = config.norm.unwrap_or_else(|| runs[0].0.default_norm());

    let tasks: Vec<(usize, usize)> = (0..config.lengths.len())
        .flat_map(|l| (0..config.runs).map(move |r| (l, r)))
        .collect();
    let counts = tasks
        .par_iter()
        .map(|&(l, r)| {
            let m = config.lengths[l];
            let (model, memory) = &runs[r];
            let mut rng = root.derive(format!("length-{m}/run-{r}")).rng();
            let (mut ok, mut total) = (0, 0);
            while total < config.trials {
                for (target, scores) in sequence_scores(model, memory, m, norm, &mut rng)? {
                    ok += usize::from(recovered(target, &scores));
                    total += 1;
                }
            }
            Ok((ok, total))
        })
        .collect::<Result<Vec<(usize, usize)>>>()?;
    let stats = config
        .lengths
        .par_iter()
        .map(|&m| {
            let (model, memory) = &stats_setup;
            estimate_detection_stats(model, memory, m, norm, config.stats_trials, &root.derive(format!("stats-{m}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let points = config
        .lengths
        .iter()
        .zip(stats)
        .enumerate()
        .map(|(l, (&length, stats))| {
            let (successes, trials) = counts[l * config.runs..(l + 1) * config.runs]
                .iter()
                .fold((0, 0), |(a, b), &(s, t)| (a + s, b + t));
            Ok(CapacityPoint {
                length,
                analytic_pcorr: pcorr_analytic(&stats, config.items)?,
                empirical_acc: successes as f64 / trials as f64,
                successes,
                trials,
                seed: config.seed,
                stats,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityCurve {
        config: config.clone(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(kind: ModelKind, lengths: Vec<usize>) -> RecoveryConfig {
        RecoveryConfig {
            runs: 2,
            trials: 200,
            stats_trials: 1000,
            ..RecoveryConfig::new(kind, 256, 64, lengths, 7)
        }
    }

    #[test]
    fn single_term_is_recovered_exactly() {
        for kind in [ModelKind::Bsc, ModelKind::Map, ModelKind::Fhrr] {
            let curve = run_sequence_recovery_experiment(&quick(kind, vec![1])).unwrap();
            let p = &curve.points[0];
            assert_eq!(p.empirical_acc, 1.0, "{kind}");
            assert!(p.analytic_pcorr > 0.999_999, "{kind}: {}", p.analytic_pcorr);
        }
    }

    #[test]
    fn noiseless_hits_are_guarded() {
        let m = Model::bsc(256, &RngStream::new(1, "m")).unwrap();
        let mem = ItemMemory::symbols(*m.space(), m.default_metric(), 1, "s", 16).unwrap();
        let s = estimate_detection_stats(&m, &mem, 1, m.default_norm(), 1000, &RngStream::new(1, "q")).unwrap();
        assert_eq!(s.mu_hit, 1.0);
        assert_eq!(s.sigma_hit, MIN_SIGMA);
        assert_eq!(s.scenario.unwrap().terms, 1);
    }

    #[test]
    fn bipolar_reject_spread_matches_binomial() {
        let d = 1024;
        let m = Model::map(d, &RngStream::new(2, "m")).unwrap();
        let mem = ItemMemory::symbols(*m.space(), m.default_metric(), 2, "s", 32).unwrap();
        let s = estimate_detection_stats(&m, &mem, 1, Normalization::None, 2000, &RngStream::new(2, "q")).unwrap();
        // dot/D of independent bipolar vectors: mean 0, std 1/√D
        let expect = 1.0 / (d as f64).sqrt();
        assert!(s.mu_reject.abs() < 0.1 * expect);
        assert!((s.sigma_reject / expect - 1.0).abs() < 0.1, "{} vs {expect}", s.sigma_reject);
    }

    #[test]
    fn degenerate_inputs_fail() {
        let m = Model::map(64, &RngStream::new(3, "m")).unwrap();
        let mem = ItemMemory::symbols(*m.space(), m.default_metric(), 3, "s", 8).unwrap();
        assert!(estimate_detection_stats(&m, &mem, 0, Normalization::None, 1000, &RngStream::new(3, "q")).is_err());
        assert!(estimate_detection_stats(&m, &mem, 2, Normalization::None, 999, &RngStream::new(3, "q")).is_err());
        let mut bad = quick(ModelKind::Map, vec![2, 0]);
        assert!(run_sequence_recovery_experiment(&bad).is_err());
        bad.lengths = vec![];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn ties_count_as_failures() {
        assert!(recovered(1, &[0.1, 0.5, 0.2]));
        assert!(!recovered(1, &[0.5, 0.5, 0.2]));
    }

    #[test]
    fn reruns_are_identical() {
        let c = quick(ModelKind::Bsc, vec![3, 9]);
        assert_eq!(
            run_sequence_recovery_experiment(&c).unwrap(),
            run_sequence_recovery_experiment(&c).unwrap()
        );
    }
}
