//! Item memory: an ordered codebook with nearest-neighbor clean-up.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::model::Model;
use crate::space::{random_hv, similarity, Hypervector, Metric, RngStream, SpaceSpec};

/// Where the entries of a memory came from, when they were drawn from a seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedManifest {
    pub seed: u64,
    pub labels: Vec<String>,
    pub space: SpaceSpec,
}

/// One entry of a JSON snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub id: String,
    pub hypervector: Hypervector,
}

/// Result of a clean-up query.
#[derive(Debug, Clone, PartialEq)]
pub struct Cleanup {
    pub id: String,
    pub index: usize,
    pub score: f64,
    /// Score of every entry, in insertion order.
    pub scores: Vec<f64>,
    /// True when another entry has exactly the winning score.
    pub tied: bool,
}

/// Ordered (identifier, hypervector) codebook over a single space.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemMemory {
    space: SpaceSpec,
    metric: Metric,
    ids: Vec<String>,
    vectors: Vec<Hypervector>,
    index: HashMap<String, usize>,
    provenance: Option<SeedManifest>,
}

/// Label of the stream family used for seeded entries.
const ITEM_STREAM: &str = "item-memory";

impl ItemMemory {
    pub fn new(space: SpaceSpec, metric: Metric) -> Self {
        Self {
            space,
            metric,
            ids: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
            provenance: None,
        }
    }

    /// Empty memory using the model's space and clean-up metric.
    pub fn for_model(model: &Model) -> Self {
        Self::new(*model.space(), model.default_metric())
    }

    /// Draws one atomic vector per label. Each entry depends only on
    /// `(seed, label)`, so the memory can be rebuilt from its manifest.
    pub fn from_seed<S: AsRef<str>>(space: SpaceSpec, metric: Metric, seed: u64, labels: &[S]) -> Result<Self> {
        let root = RngStream::new(seed, ITEM_STREAM);
        let mut memory = Self::new(space, metric);
        for label in labels {
            let label = label.as_ref();
            memory.add(label, random_hv(&space, &root.derive(label))?)?;
        }
        memory.provenance = Some(SeedManifest {
            seed,
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            space,
        });
        Ok(memory)
    }

    pub fn from_manifest(manifest: &SeedManifest, metric: Metric) -> Result<Self> {
        Self::from_seed(manifest.space, metric, manifest.seed, &manifest.labels)
    }

    /// Memory of `n` seeded symbols named `prefix0 .. prefix{n-1}`.
    pub fn symbols(space: SpaceSpec, metric: Metric, seed: u64, prefix: &str, n: usize) -> Result<Self> {
        let labels: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
        Self::from_seed(space, metric, seed, &labels)
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vectors(&self) -> &[Hypervector] {
        &self.vectors
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Hypervector)> {
        self.ids.iter().map(String::as_str).zip(&self.vectors)
    }

    /// Seed manifest when every entry was drawn by [`ItemMemory::from_seed`].
    pub fn provenance(&self) -> Option<&SeedManifest> {
        self.provenance.as_ref()
    }

    pub fn add(&mut self, id: impl Into<String>, hv: Hypervector) -> Result<()> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(HvError::DuplicateId(id));
        }
        if hv.space() != &self.space {
            return Err(HvError::SpaceMismatch {
                expected: self.space.to_string(),
                found: hv.space().to_string(),
            });
        }
        self.index.insert(id.clone(), self.ids.len());
        self.ids.push(id);
        self.vectors.push(hv);
        // hand-added entries cannot be rebuilt from the seed alone
        if let Some(p) = &self.provenance {
            if p.labels.len() != self.ids.len() {
                self.provenance = None;
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Hypervector> {
        self.index.get(id).map(|&i| &self.vectors[i])
    }

    /// Looks up an entry, reporting unknown identifiers as errors.
    pub fn require(&self, id: &str) -> Result<&Hypervector> {
        self.get(id).ok_or_else(|| HvError::UnknownId(id.to_string()))
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Scores of every entry against `query`, in insertion order.
    pub fn scores(&self, query: &Hypervector) -> Result<Vec<f64>> {
        self.check_query(query)?;
        self.vectors.iter().map(|hv| similarity(self.metric, query, hv)).collect()
    }

    /// Nearest entry under the memory's metric; ties go to the earlier entry.
    pub fn cleanup(&self, query: &Hypervector) -> Result<Cleanup> {
        if self.is_empty() {
            return Err(HvError::EmptyInput);
        }
        let scores = self.scores(query)?;
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            if self.metric.better(s, scores[best]) {
                best = i;
            }
        }
        let top = scores[best];
        let tied = scores.iter().enumerate().any(|(i, &s)| i != best && s == top);
        Ok(Cleanup {
            id: self.ids[best].clone(),
            index: best,
            score: top,
            scores,
            tied,
        })
    }

    fn check_query(&self, query: &Hypervector) -> Result<()> {
        if query.dim() != self.space.dim {
            return Err(HvError::DimensionMismatch {
                left: self.space.dim,
                right: query.dim(),
            });
        }
        if query.space() != &self.space {
            return Err(HvError::SpaceMismatch {
                expected: self.space.to_string(),
                found: query.space().to_string(),
            });
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Vec<SnapshotEntry> {
        self.iter()
            .map(|(id, hv)| SnapshotEntry {
                id: id.to_string(),
                hypervector: hv.clone(),
            })
            .collect()
    }

    /// Rebuilds a memory from a snapshot; an empty snapshot needs an explicit space.
    pub fn from_snapshot(entries: Vec<SnapshotEntry>, space: Option<SpaceSpec>, metric: Metric) -> Result<Self> {
        let space = match (entries.first(), space) {
            (Some(e), _) => *e.hypervector.space(),
            (None, Some(s)) => s,
            (None, None) => return Err(HvError::EmptyInput),
        };
        let mut memory = Self::new(space, metric);
        for e in entries {
            memory.add(e.id, e.hypervector)?;
        }
        Ok(memory)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.snapshot()).map_err(|e| HvError::Format(e.to_string()))
    }

    pub fn from_json(text: &str, metric: Metric) -> Result<Self> {
        let entries: Vec<SnapshotEntry> = serde_json::from_str(text).map_err(|e| HvError::Format(e.to_string()))?;
        Self::from_snapshot(entries, None, metric)
    }
}

/// Unbinds `known` from `composite` and cleans up the result.
pub fn recover_factor(model: &Model, composite: &Hypervector, known: &Hypervector, memory: &ItemMemory) -> Result<Cleanup> {
    memory.cleanup(&model.unbind(composite, known)?)
}

/// Best pair `(i, j)` such that `bind(left[i], right[j])` is most similar to
/// `composite`. Exhaustive: costs |left|·|right| bindings, so keep both
/// memories small.
pub fn factorize_pair(model: &Model, composite: &Hypervector, left: &ItemMemory, right: &ItemMemory) -> Result<(String, String, f64)> {
    let metric = model.default_metric();
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, a) in left.vectors().iter().enumerate() {
        for (j, b) in right.vectors().iter().enumerate() {
            let s = similarity(metric, composite, &model.bind(a, b)?)?;
            if best.is_none_or(|(_, _, t)| metric.better(s, t)) {
                best = Some((i, j, s));
            }
        }
    }
    let (i, j, s) = best.ok_or(HvError::EmptyInput)?;
    Ok((left.ids()[i].clone(), right.ids()[j].clone(), s))
}
