use std::collections::HashSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::memory::ItemMemory;
use crate::model::{Model, Normalization};
use crate::space::Hypervector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tokenizer {
    /// One token per byte, named by its hex value.
    Bytes,
    /// One token per Unicode scalar value.
    Chars,
    /// Whitespace-separated words.
    Whitespace,
}

impl Tokenizer {
    pub fn tokenize(self, text: &str) -> Vec<String> {
        match self {
            Tokenizer::Bytes => text.bytes().map(|b| format!("0x{b:02x}")).collect(),
            Tokenizer::Chars => text.chars().map(String::from).collect(),
            Tokenizer::Whitespace => text.split_whitespace().map(String::from).collect(),
        }
    }
}

impl FromStr for Tokenizer {
    type Err = HvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bytes" | "byte" => Ok(Tokenizer::Bytes),
            "chars" | "char" => Ok(Tokenizer::Chars),
            "whitespace" | "words" => Ok(Tokenizer::Whitespace),
            _ => Err(HvError::InvalidParameter(format!("unknown tokenizer {s:?}"))),
        }
    }
}

/// Item memory with one seeded symbol per distinct token, in order of first
/// appearance. A token's vector depends only on the seed and the token.
pub fn symbol_memory<S: AsRef<str>>(model: &Model, seed: u64, tokens: &[S]) -> Result<ItemMemory> {
    let mut seen = HashSet::new();
    let labels: Vec<&str> = tokens.iter().map(AsRef::as_ref).filter(|t| seen.insert(*t)).collect();
    ItemMemory::from_seed(*model.space(), model.default_metric(), seed, &labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NgramScheme {
    /// ρ⁰(s₀) ∘ ρ¹(s₁) ∘ …: distinct n-grams are quasi-orthogonal.
    Multiplicative,
    /// ρ⁰(s₀) + ρ¹(s₁) + …: n-grams sharing symbols stay similar.
    Superposed,
}

/// n-gram of symbol vectors; position i uses ρ^i of the model's fixed ρ.
pub fn ngram(model: &Model, symbols: &[&Hypervector], scheme: NgramScheme) -> Result<Hypervector> {
    if symbols.is_empty() {
        return Err(HvError::EmptyInput);
    }
    let rho = model.rho();
    let terms = symbols
        .iter()
        .enumerate()
        .map(|(i, hv)| model.permute(hv, &rho.pow(i as i64)))
        .collect::<Result<Vec<_>>>()?;
    match scheme {
        NgramScheme::Multiplicative => model.bind_all(&terms.iter().collect::<Vec<_>>()),
        NgramScheme::Superposed => model.bundle(&terms),
    }
}

/// n-gram of symbol identifiers looked up in `memory`.
pub fn encode_ngram<S: AsRef<str>>(model: &Model, memory: &ItemMemory, ids: &[S], scheme: NgramScheme) -> Result<Hypervector> {
    let symbols = ids.iter().map(|id| memory.require(id.as_ref())).collect::<Result<Vec<_>>>()?;
    ngram(model, &symbols, scheme)
}

/// Unnormalized sum of the multiplicative n-grams of every sliding window.
/// The dot product with one n-gram's vector, divided by D, estimates how
/// often that n-gram occurs.
pub fn encode_ngram_stats<S: AsRef<str>>(model: &Model, memory: &ItemMemory, tokens: &[S], n: usize) -> Result<Hypervector> {
    if n == 0 {
        return Err(HvError::InvalidParameter("n-gram size must be at least 1".into()));
    }
    if tokens.len() < n {
        return Err(HvError::LengthMismatch {
            expected: n,
            found: tokens.len(),
        });
    }
    if !model.supports_linear_bundles() {
        return Err(HvError::Unsupported {
            model: model.kind().name().into(),
            operation: "unnormalized n-gram statistics".into(),
        });
    }
    let symbols = tokens.iter().map(|t| memory.require(t.as_ref())).collect::<Result<Vec<_>>>()?;
    let mut acc = model.accumulator();
    for window in symbols.windows(n) {
        acc.add(&ngram(model, window, NgramScheme::Multiplicative)?)?;
    }
    acc.finish(Normalization::None)
}
