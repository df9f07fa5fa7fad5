//! Subcommand options. Every flag mirrors a kebab-case key of the matching
//! config file section, so one struct serves both sources.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperalg::encode::{LevelScheme, Tokenizer};
use hyperalg::{ModelKind, Normalization};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Parser)]
#[command(name = "hyperalg", version, about = "Seeded hypervector experiments and encoders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise cosine of random bipolar vectors per dimension.
    Concentration(ConcentrationOpts),
    /// Sequence recovery accuracy against the analytic p_corr.
    Capacity(CapacityOpts),
    /// Encode a text, CSV vector or edge-list graph file to hypervectors.
    Encode(EncodeOpts),
    /// Factor recovery from s = a∘b + c∘d.
    Roundtrip(RoundtripOpts),
}

/// Comma-separated values on the command line; a string or an array in the
/// config file.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let items = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<T>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if items.is_empty() {
            return Err("empty list".into());
        }
        Ok(List(items))
    }
}

impl<T: Serialize> Serialize for List<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ListForm<T> {
    Text(String),
    Items(Vec<T>),
}

impl<'de, T> Deserialize<'de> for List<T>
where
    T: FromStr + Deserialize<'de>,
    T::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ListForm::<T>::deserialize(d)? {
            ListForm::Text(s) => s.parse().map_err(serde::de::Error::custom),
            ListForm::Items(v) if v.is_empty() => Err(serde::de::Error::custom("empty list")),
            ListForm::Items(v) => Ok(List(v)),
        }
    }
}

/// Sequence lengths: values and inclusive ranges, e.g. `2..50` or `1,5..8`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lengths(pub Vec<usize>);

impl FromStr for Lengths {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
            match part.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                    if a > b {
                        return Err(format!("empty range {part}"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(num(part)?),
            }
        }
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(Lengths(out))
    }
}

impl Serialize for Lengths {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lengths {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ListForm::<usize>::deserialize(d)? {
            ListForm::Text(s) => s.parse().map_err(serde::de::Error::custom),
            ListForm::Items(v) if v.is_empty() => Err(serde::de::Error::custom("empty list")),
            ListForm::Items(v) => Ok(Lengths(v)),
        }
    }
}

/// Bundle normalization by name, `clip:K` for clipping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NormArg(pub Normalization);

impl FromStr for NormArg {
    type Err = hyperalg::HvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(NormArg)
    }
}

impl TryFrom<String> for NormArg {
    type Error = hyperalg::HvError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<NormArg> for String {
    fn from(n: NormArg) -> String {
        match n.0 {
            Normalization::Clip(k) => format!("clip:{k}"),
            other => other.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConcentrationOpts {
    /// TOML config file; flags override its `[concentration]` section.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Dimensions to sample [default: 128,1024,8192].
    #[arg(long)]
    pub dims: Option<List<usize>>,
    /// Random vectors per dimension [default: 2000].
    #[arg(long)]
    pub count: Option<usize>,
    /// Most pairs written per dimension to the sample table [default: 100000].
    #[arg(long)]
    pub sample_cap: Option<usize>,
    /// Master seed (required).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fit table CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pairwise sample table CSV.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// JSON run manifest [default: next to --out with a .json extension].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CapacityOpts {
    /// TOML config file; flags override its `[capacity]` section.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Models, comma-separated [default: bsc].
    #[arg(long)]
    pub model: Option<List<ModelKind>>,
    /// Dimension D [default: 256].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Item memory size N [default: 64].
    #[arg(long)]
    pub items: Option<usize>,
    /// Sequence lengths, e.g. 2..50 (inclusive) or 1,2,4 [default: 2..50].
    #[arg(long)]
    pub lengths: Option<Lengths>,
    /// Independently seeded runs [default: 5].
    #[arg(long)]
    pub runs: Option<usize>,
    /// Minimum recovered elements per run and length [default: 2000].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Queries for detection statistics per length, at least 1000 [default: 2000].
    #[arg(long)]
    pub stats_trials: Option<usize>,
    /// Bundle normalization [default: the model's].
    #[arg(long)]
    pub norm: Option<NormArg>,
    /// Master seed (required).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Result CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON run manifest [default: next to --out with a .json extension].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    /// UTF-8 text, encoded as n-gram statistics.
    Text,
    /// CSV of numeric rows, one hypervector per row.
    Vector,
    /// Edge list, one `u v [->]` per line.
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorMethod {
    /// Σ role_i ∘ level(x_i) with a level codebook.
    Levels,
    /// Gaussian random projection to real (or binarized) components.
    Rp,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct EncodeOpts {
    /// TOML config file; flags override its `[encode]` section.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Input file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input format [default: from the extension: .txt text, .csv vector, .edges graph].
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Model [default: map].
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Dimension D [default: 10000].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Master seed (required).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Text tokenizer: bytes, chars or whitespace [default: chars].
    #[arg(long)]
    pub tokenizer: Option<Tokenizer>,
    /// Text n-gram size [default: 3].
    #[arg(long)]
    pub ngram: Option<usize>,
    /// Vector encoding method [default: levels].
    #[arg(long, value_enum)]
    pub method: Option<VectorMethod>,
    /// Level count for the levels method [default: 16].
    #[arg(long)]
    pub levels: Option<usize>,
    /// Level scheme: concatenation or flip [default: concatenation].
    #[arg(long)]
    pub level_scheme: Option<LevelScheme>,
    /// Lower end of the value range [default: data minimum].
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    /// Upper end of the value range [default: data maximum].
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// Binarize random projections at zero.
    #[arg(long)]
    pub binarize: Option<bool>,
    /// Output JSON file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RoundtripOpts {
    /// TOML config file; flags override its `[roundtrip]` section.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Model [default: bsc].
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Dimension D [default: 1024].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Item memory size N [default: 64].
    #[arg(long)]
    pub items: Option<usize>,
    /// Composites to build [default: 1000].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed (required).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_expand_ranges() {
        assert_eq!("2..5".parse::<Lengths>().unwrap().0, vec![2, 3, 4, 5]);
        assert_eq!("1, 3..=4,9".parse::<Lengths>().unwrap().0, vec![1, 3, 4, 9]);
        assert!("5..2".parse::<Lengths>().is_err());
        assert!("".parse::<Lengths>().is_err());
        assert!("x".parse::<Lengths>().is_err());
    }

    #[test]
    fn lists_accept_strings_and_arrays() {
        #[derive(Deserialize)]
        struct T {
            a: List<usize>,
            b: List<ModelKind>,
            c: Lengths,
        }
        let t: T = toml::from_str("a = \"1,2\"\nb = [\"bsc\", \"map\"]\nc = [3, 4]").unwrap();
        assert_eq!(t.a.0, vec![1, 2]);
        assert_eq!(t.b.0, vec![ModelKind::Bsc, ModelKind::Map]);
        assert_eq!(t.c.0, vec![3, 4]);
        assert!(toml::from_str::<T>("a = []\nb = \"bsc\"\nc = \"1\"").is_err());
    }

    #[test]
    fn norms_round_trip_as_strings() {
        for s in ["majority", "clip:1.5", "none"] {
            let n: NormArg = s.parse().unwrap();
            assert_eq!(String::from(n), s);
        }
    }
}
