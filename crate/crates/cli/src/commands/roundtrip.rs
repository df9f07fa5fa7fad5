use std::fmt;

use hyperalg::{recover_factor, HvError, ItemMemory, Model, ModelKind, ModelParams, RngStream};
use rand::seq::index;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::positive;
use crate::args::RoundtripOpts;
use crate::config::resolve;
use crate::error::CliResult;
use crate::output::{check_targets, emit};

/// Success rate and score margins of recovering each factor of
/// s = a∘b + c∘d given its partner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub model: ModelKind,
    pub dim: usize,
    pub items: usize,
    pub trials: usize,
    pub recoveries: usize,
    pub successes: usize,
    /// Correct score minus best wrong score, oriented so positive is good.
    pub margin_mean: f64,
    pub margin_min: f64,
}

impl RoundtripReport {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.recoveries as f64
    }
}

impl fmt::Display for RoundtripReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "model={} dim={} items={} trials={} recoveries={} success={} margin_mean={} margin_min={}",
            self.model,
            self.dim,
            self.items,
            self.trials,
            self.recoveries,
            self.success_rate(),
            self.margin_mean,
            self.margin_min
        )
    }
}

/// Builds `trials` composites from four distinct random items each and
/// recovers every factor from its partner by unbinding and clean-up. Ties
/// count as failures.
pub fn roundtrip_check(kind: ModelKind, dim: usize, items: usize, trials: usize, seed: u64) -> Result<RoundtripReport, HvError> {
    if items < 4 {
        return Err(HvError::InvalidParameter(format!("need at least 4 items, got {items}")));
    }
    if trials == 0 {
        return Err(HvError::InvalidParameter("trials must be positive".into()));
    }
    let root = RngStream::new(seed, "roundtrip");
    let model = Model::new(kind, ModelParams::with_dim(dim), &root.derive("model"))?;
    let memory = ItemMemory::symbols(
        *model.space(),
        model.default_metric(),
        root.derive("memory").rng().next_u64(),
        "item",
        items,
    )?;
    let metric = memory.metric();
    let trial = |t: usize| -> Result<Vec<(bool, f64)>, HvError> {
        let pick = index::sample(&mut root.derive("trials").at(t as u64).rng(), items, 4).into_vec();
        let v = |i: usize| &memory.vectors()[pick[i]];
        let s = model.superpose([&model.bind(v(0), v(1))?, &model.bind(v(2), v(3))?], model.default_norm())?;
        [(0, 1), (1, 0), (2, 3), (3, 2)]
            .iter()
            .map(|&(known, target)| {
                let c = recover_factor(&model, &s, v(known), &memory)?;
                let want = pick[target];
                let best_other = c
                    .scores
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != want)
                    .map(|(_, &s)| s)
                    .reduce(|a, b| if metric.better(b, a) { b } else { a })
                    .expect("at least 4 items");
                let margin = if metric.is_distance() {
                    best_other - c.scores[want]
                } else {
                    c.scores[want] - best_other
                };
                Ok((c.index == want && !c.tied, margin))
            })
            .collect()
    };
    let outcomes = (0..trials).into_par_iter().map(trial).collect::<Result<Vec<_>, _>>()?;
    let flat: Vec<(bool, f64)> = outcomes.into_iter().flatten().collect();
    let successes = flat.iter().filter(|(ok, _)| *ok).count();
    let margin_sum: f64 = flat.iter().map(|&(_, m)| m).sum();
    Ok(RoundtripReport {
        model: kind,
        dim,
        items,
        trials,
        recoveries: flat.len(),
        successes,
        margin_mean: margin_sum / flat.len() as f64,
        margin_min: flat.iter().map(|&(_, m)| m).fold(f64::INFINITY, f64::min),
    })
}

pub fn run(flags: &RoundtripOpts) -> CliResult<()> {
    let r = resolve("roundtrip", flags, flags.config.as_deref(), |c| c.roundtrip.take())?;
    let o = &r.opts;
    let seed = o.seed.ok_or_else(|| r.missing("seed"))?;
    let kind = o.model.unwrap_or(ModelKind::Bsc);
    let dim = positive(&r, "dim", o.dim.unwrap_or(1024))?;
    let items = o.items.unwrap_or(64);
    if items < 4 {
        return Err(r.invalid("items", "need at least 4 items"));
    }
    let trials = positive(&r, "trials", o.trials.unwrap_or(1000))?;
    Model::new(kind, ModelParams::with_dim(dim), &RngStream::new(seed, "check")).map_err(|e| r.invalid("dim", e))?;
    check_targets([o.out.as_deref()])?;
    let report = roundtrip_check(kind, dim, items, trials, seed)?;
    emit(o.out.as_deref(), format!("{report}\n").as_bytes())
}
