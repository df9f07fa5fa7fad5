use std::path::Path;

use hyperalg::encode::{
    encode_graph, encode_vector_compositional, encode_vector_rp, ngram, symbol_memory, Edge, EntryKind, LevelCodebook, LevelScheme,
    NgramScheme, PostProcess, RoleSet, RpSpec, Tokenizer,
};
use hyperalg::{Hypervector, ItemMemory, Model, ModelKind, ModelParams, RngStream};
use serde::Serialize;

use super::positive;
use crate::args::{EncodeOpts, InputFormat, VectorMethod};
use crate::config::resolve;
use crate::error::{CliError, CliResult};
use crate::output::{check_targets, emit, to_json};

#[derive(Debug, Serialize)]
pub struct EncodedVector {
    pub id: String,
    pub hypervector: Hypervector,
}

/// Encoder output: the resolved options followed by the vectors.
#[derive(Debug, Serialize)]
pub struct EncodeOutput<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a EncodeOpts,
    pub vectors: Vec<EncodedVector>,
}

fn input_error(path: &Path, line: Option<usize>, msg: impl std::fmt::Display) -> CliError {
    match line {
        Some(l) => CliError::Runtime(format!("{}:{l}: {msg}", path.display())),
        None => CliError::Runtime(format!("{}: {msg}", path.display())),
    }
}

/// Sum of the multiplicative n-grams of every window, under the model's
/// bundle normalization.
pub fn encode_text(model: &Model, seed: u64, text: &str, tokenizer: Tokenizer, n: usize) -> hyperalg::Result<Hypervector> {
    let tokens = tokenizer.tokenize(text);
    if tokens.len() < n {
        return Err(hyperalg::HvError::LengthMismatch {
            expected: n,
            found: tokens.len(),
        });
    }
    let memory = symbol_memory(model, seed, &tokens)?;
    let symbols = tokens.iter().map(|t| memory.require(t)).collect::<hyperalg::Result<Vec<_>>>()?;
    let mut acc = model.accumulator();
    for window in symbols.windows(n) {
        acc.add(&ngram(model, window, NgramScheme::Multiplicative)?)?;
    }
    acc.finish(model.default_norm())
}

/// Edge list: one `u v` (undirected) or `u v ->` (directed) per line; `#`
/// starts a comment.
pub fn parse_edges(text: &str) -> Result<Vec<Edge>, (usize, String)> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let edge = match parts.as_slice() {
            [u, v] => Edge::undirected(*u, *v),
            [u, v, "->"] => Edge::directed(*u, *v),
            _ => return Err((i + 1, format!("expected `u v [->]`, got {line:?}"))),
        };
        edges.push(edge);
    }
    if edges.is_empty() {
        return Err((1, "no edges".into()));
    }
    Ok(edges)
}

/// Numeric CSV rows. A first row that is not numeric is taken as a header.
pub fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>, (usize, String)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| (e.position().map_or(i + 1, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) if v.iter().all(|x| x.is_finite()) => rows.push(v),
            Ok(_) => return Err((line, "non-finite value".into())),
            Err(_) if i == 0 => continue,
            Err(e) => return Err((line, format!("not a number: {e}"))),
        }
    }
    if rows.is_empty() {
        return Err((1, "no data rows".into()));
    }
    Ok(rows)
}

pub fn run(flags: &EncodeOpts) -> CliResult<()> {
    let r = resolve("encode", flags, flags.config.as_deref(), |c| c.encode.take())?;
    let o = &r.opts;
    let seed = o.seed.ok_or_else(|| r.missing("seed"))?;
    let input = o.input.clone().ok_or_else(|| r.missing("input"))?;
    let format = match o.format {
        Some(f) => f,
        None => match input.extension().and_then(|e| e.to_str()) {
            Some("txt") => InputFormat::Text,
            Some("csv") => InputFormat::Vector,
            Some("edges") => InputFormat::Graph,
            _ => return Err(r.missing("format")),
        },
    };
    let kind = o.model.unwrap_or(ModelKind::Map);
    let dim = positive(&r, "dim", o.dim.unwrap_or(10_000))?;
    let model = Model::new(kind, ModelParams::with_dim(dim), &RngStream::new(seed, "model")).map_err(|e| r.invalid("dim", e))?;
    let mut resolved = EncodeOpts {
        config: None,
        input: Some(input.clone()),
        format: Some(format),
        model: Some(kind),
        dim: Some(dim),
        seed: Some(seed),
        out: o.out.clone(),
        ..Default::default()
    };

    check_targets([o.out.as_deref()])?;
    let text = std::fs::read_to_string(&input).map_err(|e| input_error(&input, None, e))?;
    let vectors = match format {
        InputFormat::Text => {
            let tokenizer = o.tokenizer.unwrap_or(Tokenizer::Chars);
            let n = positive(&r, "ngram", o.ngram.unwrap_or(3))?;
            resolved.tokenizer = Some(tokenizer);
            resolved.ngram = Some(n);
            let hv = encode_text(&model, seed, &text, tokenizer, n).map_err(|e| input_error(&input, None, e))?;
            vec![EncodedVector {
                id: "document".into(),
                hypervector: hv,
            }]
        }
        InputFormat::Graph => {
            let edges = parse_edges(&text).map_err(|(l, m)| input_error(&input, Some(l), m))?;
            let mut labels: Vec<&str> = Vec::new();
            for e in &edges {
                for n in [e.u.as_str(), e.v.as_str()] {
                    if !labels.contains(&n) {
                        labels.push(n);
                    }
                }
            }
            let nodes = ItemMemory::from_seed(*model.space(), model.default_metric(), seed, &labels)?;
            let hv = encode_graph(&model, &nodes, &edges).map_err(|e| input_error(&input, None, e))?;
            vec![EncodedVector {
                id: "graph".into(),
                hypervector: hv,
            }]
        }
        InputFormat::Vector => {
            let rows = parse_rows(&text).map_err(|(l, m)| input_error(&input, Some(l), m))?;
            let cols = rows[0].len();
            let method = o.method.unwrap_or(VectorMethod::Levels);
            resolved.method = Some(method);
            let encoded = match method {
                VectorMethod::Levels => {
                    let count = o.levels.unwrap_or(16);
                    if count < 2 {
                        return Err(r.invalid("levels", "need at least 2 levels"));
                    }
                    let scheme = o.level_scheme.unwrap_or(LevelScheme::Concatenation);
                    let data_lo = rows.iter().flatten().copied().fold(f64::INFINITY, f64::min);
                    let data_hi = rows.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
                    let lo = o.lo.unwrap_or(data_lo);
                    let hi = o.hi.unwrap_or(if data_hi > lo { data_hi } else { lo + 1.0 });
                    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                        return Err(r.invalid("hi", format!("range [{lo}, {hi}] is empty")));
                    }
                    resolved.levels = Some(count);
                    resolved.level_scheme = Some(scheme);
                    resolved.lo = Some(lo);
                    resolved.hi = Some(hi);
                    let codebook = LevelCodebook::build(*model.space(), count, scheme, lo, hi, &RngStream::new(seed, "levels"))
                        .map_err(|e| r.invalid("levels", e))?
                        .with_clamp(true);
                    let roles = RoleSet::random(&model, cols, &RngStream::new(seed, "roles"));
                    rows.iter()
                        .map(|row| encode_vector_compositional(&model, row, &codebook, &roles))
                        .collect::<hyperalg::Result<Vec<_>>>()
                }
                VectorMethod::Rp => {
                    let binarize = o.binarize.unwrap_or(false);
                    resolved.binarize = Some(binarize);
                    let post = if binarize {
                        PostProcess::Binarize { threshold: 0.0 }
                    } else {
                        PostProcess::None
                    };
                    let spec = RpSpec::single(dim, cols, EntryKind::Gaussian, post, &RngStream::new(seed, "projection"))?;
                    rows.iter().map(|row| encode_vector_rp(row, &spec)).collect()
                }
            };
            encoded
                .map_err(|e| input_error(&input, None, e))?
                .into_iter()
                .enumerate()
                .map(|(i, hv)| EncodedVector {
                    id: format!("row-{i}"),
                    hypervector: hv,
                })
                .collect()
        }
    };
    let out = EncodeOutput {
        tool: "hyperalg",
        version: env!("CARGO_PKG_VERSION"),
        config: &resolved,
        vectors,
    };
    emit(o.out.as_deref(), &to_json(&out)?)
}
