use hyperalg::capacity::{run_concentration_experiment, ConcentrationConfig, ConcentrationTable};

use super::{num, positive};
use crate::args::{ConcentrationOpts, List};
use crate::config::{resolve, to_config_toml};
use crate::error::CliResult;
use crate::output::{check_targets, emit, manifest_path, to_csv, to_json, write_atomic, Manifest};

pub const FIT_HEADER: [&str; 6] = ["D", "count", "pairs", "mean", "std", "inv_sqrt_d"];
pub const SAMPLE_HEADER: [&str; 4] = ["D", "i", "j", "cosine"];

pub fn run(flags: &ConcentrationOpts) -> CliResult<()> {
    let r = resolve("concentration", flags, flags.config.as_deref(), |c| c.concentration.take())?;
    let o = &r.opts;
    let seed = o.seed.ok_or_else(|| r.missing("seed"))?;
    let dims = o.dims.clone().map_or(vec![128, 1024, 8192], |l| l.0);
    if dims.contains(&0) {
        return Err(r.invalid("dims", "dimensions must be positive"));
    }
    let count = o.count.unwrap_or(2000);
    if count < 2 {
        return Err(r.invalid("count", "need at least 2 vectors"));
    }
    if count > u32::MAX as usize {
        return Err(r.invalid("count", "too many vectors"));
    }
    let sample_cap = positive(&r, "sample-cap", o.sample_cap.unwrap_or(100_000))?;
    let manifest = manifest_path(o.manifest.as_deref(), o.out.as_deref());
    check_targets([o.out.as_deref(), o.samples.as_deref(), manifest.as_deref()])?;
    let resolved = ConcentrationOpts {
        config: None,
        dims: Some(List(dims.clone())),
        count: Some(count),
        sample_cap: Some(sample_cap),
        seed: Some(seed),
        out: o.out.clone(),
        samples: o.samples.clone(),
        manifest: manifest.clone(),
    };

    let table: ConcentrationTable = run_concentration_experiment(&ConcentrationConfig {
        dims,
        count,
        sample_cap,
        seed,
    })?;
    let fits = table.fits.iter().map(|f| {
        vec![
            f.dim.to_string(),
            f.count.to_string(),
            f.pairs.to_string(),
            num(f.mean),
            num(f.std),
            num(1.0 / (f.dim as f64).sqrt()),
        ]
    });
    emit(o.out.as_deref(), &to_csv(&FIT_HEADER, fits)?)?;
    if let Some(path) = &o.samples {
        let rows = table
            .samples
            .iter()
            .map(|s| vec![s.dim.to_string(), s.i.to_string(), s.j.to_string(), num(s.cosine)]);
        write_atomic(path, &to_csv(&SAMPLE_HEADER, rows)?)?;
    }
    if let Some(path) = manifest {
        let m = Manifest {
            tool: "hyperalg",
            version: env!("CARGO_PKG_VERSION"),
            command: "concentration",
            config: &resolved,
            config_toml: to_config_toml("concentration", &resolved)?,
            results: &table.fits,
        };
        write_atomic(&path, &to_json(&m)?)?;
    }
    Ok(())
}
