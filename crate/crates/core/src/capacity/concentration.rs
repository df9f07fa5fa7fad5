use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::space::{Bits, Components, RngStream, SpaceSpec};

/// Settings for the pairwise-similarity experiment on random bipolar vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcentrationConfig {
    pub dims: Vec<usize>,
    /// Random vectors per dimension.
    pub count: usize,
    /// Most pairs kept in the sample table per dimension; larger pair sets
    /// are subsampled uniformly. Fits always use every pair.
    pub sample_cap: usize,
    pub seed: u64,
}

impl ConcentrationConfig {
    pub fn new(dims: Vec<usize>, count: usize, seed: u64) -> Self {
        Self {
            dims,
            count,
            sample_cap: 100_000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(HvError::InvalidParameter(format!("need at least 2 vectors, got {}", self.count)));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(HvError::InvalidParameter(
                "dimensions must be a nonempty list of positive values".into(),
            ));
        }
        if self.count > u32::MAX as usize {
            return Err(HvError::InvalidParameter(format!("too many vectors: {}", self.count)));
        }
        Ok(())
    }
}

/// Normal fit of all pairwise cosines at one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationFit {
    pub dim: usize,
    pub count: usize,
    pub pairs: u64,
    pub mean: f64,
    /// Maximum-likelihood standard deviation.
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationSample {
    pub dim: usize,
    pub i: u32,
    pub j: u32,
    pub cosine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationTable {
    pub fits: Vec<ConcentrationFit>,
    pub samples: Vec<ConcentrationSample>,
}

/// Per-row partial results; integer sums keep the merge exact.
struct Row {
    sum: i128,
    sum_sq: i128,
    samples: Vec<ConcentrationSample>,
}

/// Pairwise cosines of `count` random bipolar vectors for each dimension.
pub fn run_concentration_experiment(config: &ConcentrationConfig) -> Result<ConcentrationTable> {
    config.validate()?;
    let root = RngStream::new(config.seed, "concentration");
    let mut fits = Vec::with_capacity(config.dims.len());
    let mut samples = Vec::new();
    for &dim in &config.dims {
        let (fit, mut s) = one_dim(dim, config, &root.derive(format!("dim-{dim}")))?;
        fits.push(fit);
        samples.append(&mut s);
    }
    Ok(ConcentrationTable { fits, samples })
}

fn one_dim(dim: usize, config: &ConcentrationConfig, stream: &RngStream) -> Result<(ConcentrationFit, Vec<ConcentrationSample>)> {
    let n = config.count;
    // a bipolar vector is stored as its sign bits: dot = D − 2·Hamming
    let space = SpaceSpec::dense_binary(dim)?;
    let vectors: Vec<Bits> = (0..n)
        .into_par_iter()
        .map(|i| match space.sample(&mut stream.at(i as u64).rng()).components() {
            Components::Binary(b) => b.clone(),
            _ => unreachable!("dense binary storage"),
        })
        .collect();
    let pairs = n * (n - 1) / 2;
    let mut chosen: Vec<usize> = if pairs <= config.sample_cap {
        (0..pairs).collect()
    } else {
        index::sample(&mut stream.derive("subsample").rng(), pairs, config.sample_cap).into_vec()
    };
    chosen.sort_unstable();
    // first pair index of row i
    let offset = |i: usize| i * n - i * (i + 1) / 2;

    let rows: Vec<Row> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let (start, end) = (offset(i), offset(i + 1));
            let lo = chosen.partition_point(|&k| k < start);
            let hi = chosen.partition_point(|&k| k < end);
            let mut picks = chosen[lo..hi].iter().map(|&k| i + 1 + (k - start)).peekable();
            let mut row = Row {
                sum: 0,
                sum_sq: 0,
                samples: Vec::with_capacity(hi - lo),
            };
            for j in i + 1..n {
                let dot = dim as i128 - 2 * vectors[i].hamming(&vectors[j]) as i128;
                row.sum += dot;
                row.sum_sq += dot * dot;
                if picks.peek() == Some(&j) {
                    picks.next();
                    row.samples.push(ConcentrationSample {
                        dim,
                        i: i as u32,
                        j: j as u32,
                        cosine: dot as f64 / dim as f64,
                    });
                }
            }
            row
        })
        .collect();

    let (sum, sum_sq) = rows.iter().fold((0i128, 0i128), |(a, b), r| (a + r.sum, b + r.sum_sq));
    let p = pairs as i128;
    let d = dim as f64;
    // P²D²·var = P·Σdot² − (Σdot)², exact in integers
    let scaled_var = p * sum_sq - sum * sum;
    let fit = ConcentrationFit {
        dim,
        count: n,
        pairs: pairs as u64,
        mean: sum as f64 / (pairs as f64 * d),
        std: (scaled_var as f64).sqrt() / (pairs as f64 * d),
    };
    Ok((fit, rows.into_iter().flat_map(|r| r.samples).collect()))
}
