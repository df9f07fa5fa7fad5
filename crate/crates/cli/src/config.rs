//! Config files and flag overlay.
//!
//! A config file is TOML with optional `[concentration]`, `[capacity]`,
//! `[encode]` and `[roundtrip]` sections whose keys mirror the flags, plus a
//! top-level `seed` shared by all sections. Flags override the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::{CapacityOpts, ConcentrationOpts, EncodeOpts, RoundtripOpts};
use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub concentration: Option<ConcentrationOpts>,
    pub capacity: Option<CapacityOpts>,
    pub encode: Option<EncodeOpts>,
    pub roundtrip: Option<RoundtripOpts>,
}

/// A loaded config file, kept for line lookups in diagnostics.
#[derive(Debug, Clone)]
pub struct Source {
    pub path: PathBuf,
    pub text: String,
}

impl Source {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: cannot read config: {e}", path.display())))?;
        Ok(Self {
            path: path.to_path_buf(),
            text,
        })
    }

    pub fn parse(&self) -> CliResult<ConfigFile> {
        toml::from_str(&self.text).map_err(|e| {
            let line = e.span().map_or(1, |s| self.line_at(s.start));
            CliError::Config(format!("{}:{line}: {}", self.path.display(), e.message().trim_end()))
        })
    }

    fn line_at(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    /// Line of `key` inside `[section]`, falling back to the top level.
    pub fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        let mut current = String::new();
        let mut top = None;
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                current = name.trim().to_string();
                continue;
            }
            let Some((k, _)) = line.split_once('=') else { continue };
            if k.trim().trim_matches('"') != key {
                continue;
            }
            if current == section {
                return Some(i + 1);
            }
            if current.is_empty() {
                top = Some(i + 1);
            }
        }
        top
    }
}

/// Options after overlaying flags on the file, with what is needed to point
/// diagnostics at the offending key.
#[derive(Debug)]
pub struct Resolved<T> {
    pub opts: T,
    pub section: &'static str,
    pub source: Option<Source>,
    /// Keys whose value came from the file.
    pub file_keys: BTreeSet<String>,
}

impl<T> Resolved<T> {
    /// Config error about `key`, located in the file when it came from there.
    pub fn invalid(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        if let Some(src) = self.source.as_ref().filter(|_| self.file_keys.contains(key)) {
            if let Some(line) = src.line_of(self.section, key) {
                return CliError::Config(format!("{}:{line}: invalid `{key}`: {msg}", src.path.display()));
            }
        }
        CliError::Config(format!("invalid --{key}: {msg}"))
    }

    /// Config error for a required key that is missing everywhere.
    pub fn missing(&self, key: &str) -> CliError {
        let hint = match &self.source {
            Some(src) => format!(" or set `{key}` in {}", src.path.display()),
            None => String::new(),
        };
        CliError::Config(format!("missing required --{key}{hint}"))
    }
}

fn keys_of<T: Serialize>(v: &T) -> CliResult<serde_json::Map<String, serde_json::Value>> {
    match serde_json::to_value(v).map_err(|e| CliError::Runtime(e.to_string()))? {
        serde_json::Value::Object(m) => Ok(m),
        _ => unreachable!("options serialize as maps"),
    }
}

/// Loads `config` if given and overlays the non-empty flags on its section.
pub fn resolve<T, F>(section: &'static str, flags: &T, config: Option<&Path>, pick: F) -> CliResult<Resolved<T>>
where
    T: Serialize + DeserializeOwned + Default + Clone,
    F: FnOnce(&mut ConfigFile) -> Option<T>,
{
    let Some(path) = config else {
        return Ok(Resolved {
            opts: flags.clone(),
            section,
            source: None,
            file_keys: BTreeSet::new(),
        });
    };
    let source = Source::load(path)?;
    let mut file = source.parse()?;
    let shared_seed = file.seed;
    let from_file = pick(&mut file).unwrap_or_default();
    let mut base = keys_of(&from_file)?;
    if base.get("seed").is_none_or(|v| v.is_null()) {
        if let Some(seed) = shared_seed {
            base.insert("seed".into(), seed.into());
        }
    }
    let mut file_keys: BTreeSet<String> = base.iter().filter(|(_, v)| !v.is_null()).map(|(k, _)| k.clone()).collect();
    for (k, v) in keys_of(flags)? {
        if !v.is_null() {
            file_keys.remove(&k);
            base.insert(k, v);
        }
    }
    let opts = serde_json::from_value(serde_json::Value::Object(base)).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Resolved {
        opts,
        section,
        source: Some(source),
        file_keys,
    })
}

/// The fully resolved options of a run as a config file that reproduces it.
pub fn to_config_toml<T: Serialize>(section: &str, opts: &T) -> CliResult<String> {
    let mut root = toml::Table::new();
    let value = toml::Value::try_from(opts).map_err(|e| CliError::Runtime(e.to_string()))?;
    root.insert(section.into(), value);
    toml::to_string(&root).map_err(|e| CliError::Runtime(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flags_override_file() {
        let f = write("seed = 3\n[capacity]\ndim = 128\nitems = 32\n");
        let flags = CapacityOpts {
            dim: Some(512),
            ..Default::default()
        };
        let r = resolve("capacity", &flags, Some(f.path()), |c| c.capacity.take()).unwrap();
        assert_eq!(r.opts.dim, Some(512));
        assert_eq!(r.opts.items, Some(32));
        assert_eq!(r.opts.seed, Some(3));
        assert!(r.file_keys.contains("items") && !r.file_keys.contains("dim"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let f = write("[capacity]\ndim = 128\nitems = = 3\n");
        let err = resolve("capacity", &CapacityOpts::default(), Some(f.path()), |c| c.capacity.take()).unwrap_err();
        assert!(matches!(&err, CliError::Config(m) if m.contains(":3:")), "{err}");
    }

    #[test]
    fn unknown_keys_and_bad_types_are_located() {
        let f = write("[capacity]\ndim = 128\n\nbogus = 1\n");
        let err = resolve("capacity", &CapacityOpts::default(), Some(f.path()), |c| c.capacity.take()).unwrap_err();
        assert!(err.to_string().contains(":4:"), "{err}");
        let f = write("seed = 1\n[roundtrip]\ndim = \"big\"\n");
        let err = resolve("roundtrip", &RoundtripOpts::default(), Some(f.path()), |c| c.roundtrip.take()).unwrap_err();
        assert!(err.to_string().contains(":3:"), "{err}");
    }

    #[test]
    fn semantic_errors_point_at_the_key() {
        let f = write("seed = 1\n[capacity]\n\ndim = 0\n");
        let r = resolve("capacity", &CapacityOpts::default(), Some(f.path()), |c| c.capacity.take()).unwrap();
        let msg = r.invalid("dim", "must be positive").to_string();
        assert!(msg.contains(":4: invalid `dim`"), "{msg}");
        assert_eq!(r.invalid("items", "x").to_string(), "invalid --items: x");
    }

    #[test]
    fn resolved_config_round_trips() {
        let opts = CapacityOpts {
            dim: Some(64),
            lengths: Some("2..4".parse().unwrap()),
            norm: Some("clip:2".parse().unwrap()),
            model: Some("bsc,map".parse().unwrap()),
            seed: Some(9),
            ..Default::default()
        };
        let text = to_config_toml("capacity", &opts).unwrap();
        let f = write(&text);
        let r = resolve("capacity", &CapacityOpts::default(), Some(f.path()), |c| c.capacity.take()).unwrap();
        assert_eq!(r.opts, opts);
    }
}
