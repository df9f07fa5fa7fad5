use hyperalg::capacity::{run_sequence_recovery_experiment, CapacityCurve, RecoveryConfig, MIN_STATS_TRIALS};
use hyperalg::{HvError, Model, ModelKind, ModelParams, RngStream};

use super::{num, positive};
use crate::args::{CapacityOpts, List, NormArg};
use crate::config::{resolve, to_config_toml};
use crate::error::{CliError, CliResult};
use crate::output::{check_targets, emit, manifest_path, to_csv, to_json, write_atomic, Manifest};

pub const CSV_HEADER: [&str; 8] = ["model", "D", "N", "m", "trials", "empirical_acc", "analytic_pcorr", "seed"];

pub fn run(flags: &CapacityOpts) -> CliResult<()> {
    let r = resolve("capacity", flags, flags.config.as_deref(), |c| c.capacity.take())?;
    let o = &r.opts;
    let seed = o.seed.ok_or_else(|| r.missing("seed"))?;
    let models = o.model.clone().map_or(vec![ModelKind::Bsc], |l| l.0);
    let dim = positive(&r, "dim", o.dim.unwrap_or(256))?;
    let items = o.items.unwrap_or(64);
    if items < 2 {
        return Err(r.invalid("items", "need at least 2 items"));
    }
    let lengths = o.lengths.clone().map_or_else(|| (2..=50).collect(), |l| l.0);
    if lengths.contains(&0) {
        return Err(r.invalid("lengths", "lengths must be positive"));
    }
    let runs = positive(&r, "runs", o.runs.unwrap_or(5))?;
    let trials = positive(&r, "trials", o.trials.unwrap_or(2000))?;
    let stats_trials = o.stats_trials.unwrap_or(2000);
    if stats_trials < MIN_STATS_TRIALS {
        return Err(r.invalid("stats-trials", format!("must be at least {MIN_STATS_TRIALS}")));
    }
    for &kind in &models {
        let model = Model::new(kind, ModelParams::with_dim(dim), &RngStream::new(seed, "check")).map_err(|e| r.invalid("dim", e))?;
        if let Some(NormArg(norm)) = o.norm {
            if let Err(e @ HvError::NormIncompatible { .. }) = model.normalize(model.zero(), norm) {
                return Err(r.invalid("norm", e));
            }
        }
    }
    let manifest = manifest_path(o.manifest.as_deref(), o.out.as_deref());
    check_targets([o.out.as_deref(), manifest.as_deref()])?;
    let resolved = CapacityOpts {
        config: None,
        model: Some(List(models.clone())),
        dim: Some(dim),
        items: Some(items),
        lengths: Some(crate::args::Lengths(lengths.clone())),
        runs: Some(runs),
        trials: Some(trials),
        stats_trials: Some(stats_trials),
        norm: o.norm,
        seed: Some(seed),
        out: o.out.clone(),
        manifest: manifest.clone(),
    };

    let curves = models
        .iter()
        .map(|&model| {
            let config = RecoveryConfig {
                model,
                dim,
                items,
                lengths: lengths.clone(),
                runs,
                trials,
                stats_trials,
                norm: o.norm.map(|n| n.0),
                seed,
            };
            run_sequence_recovery_experiment(&config).map_err(CliError::from)
        })
        .collect::<CliResult<Vec<CapacityCurve>>>()?;
    for c in &curves {
        eprintln!(
            "{}: {} lengths, mean |accuracy - p_corr| = {:.4}",
            c.config.model,
            c.points.len(),
            c.mean_abs_deviation()
        );
    }

    let rows = curves.iter().flat_map(|c| {
        c.points.iter().map(move |p| {
            vec![
                c.config.model.to_string(),
                c.config.dim.to_string(),
                c.config.items.to_string(),
                p.length.to_string(),
                p.trials.to_string(),
                num(p.empirical_acc),
                num(p.analytic_pcorr),
                p.seed.to_string(),
            ]
        })
    });
    emit(o.out.as_deref(), &to_csv(&CSV_HEADER, rows)?)?;
    if let Some(path) = manifest {
        let m = Manifest {
            tool: "hyperalg",
            version: env!("CARGO_PKG_VERSION"),
            command: "capacity",
            config: &resolved,
            config_toml: to_config_toml("capacity", &resolved)?,
            results: &curves,
        };
        write_atomic(&path, &to_json(&m)?)?;
    }
    Ok(())
}
