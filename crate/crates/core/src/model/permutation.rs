use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{HvError, Result};
use crate::space::{Bits, Components, Hypervector};

/// A bijection on component positions, stored as a source map:
/// `out[j] = input[sources[j]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Permutation {
    sources: Arc<[u32]>,
    inverse: Arc<[u32]>,
    shift: Option<usize>,
    fraction: f64,
}

impl Permutation {
    /// Cyclic shift: `out[(j + shift) mod D] = input[j]`.
    pub fn cyclic(dim: usize, shift: usize) -> Self {
        let s = shift % dim;
        let sources: Vec<u32> = (0..dim).map(|j| ((j + dim - s) % dim) as u32).collect();
        let mut p = Self::from_sources_unchecked(sources);
        p.shift = Some(s);
        p
    }

    /// Uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut sources: Vec<u32> = (0..dim as u32).collect();
        sources.shuffle(rng);
        Self::from_sources_unchecked(sources)
    }

    /// Partial permutation: a seeded subset of round(φ·D) positions is
    /// rotated along a single cycle; the remaining positions stay fixed.
    pub fn partial<R: Rng + ?Sized>(dim: usize, fraction: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(HvError::InvalidParameter(format!("partial fraction {fraction} outside [0, 1]")));
        }
        let mut order: Vec<u32> = (0..dim as u32).collect();
        order.shuffle(rng);
        let k = (fraction * dim as f64).round() as usize;
        let mut sources: Vec<u32> = (0..dim as u32).collect();
        if k >= 2 {
            let moved = &order[..k];
            for i in 0..k {
                sources[moved[i] as usize] = moved[(i + k - 1) % k];
            }
        }
        let mut p = Self::from_sources_unchecked(sources);
        p.fraction = fraction;
        Ok(p)
    }

    /// Explicit source map; rejects maps that are not bijections on 0..D.
    pub fn from_sources(sources: Vec<u32>) -> Result<Self> {
        let d = sources.len();
        let mut seen = vec![false; d];
        for &s in &sources {
            let s = s as usize;
            if s >= d {
                return Err(HvError::NotBijective(format!("index {s} out of range {d}")));
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(HvError::NotBijective(format!("index {s} repeated")));
            }
        }
        Ok(Self::from_sources_unchecked(sources))
    }

    fn from_sources_unchecked(sources: Vec<u32>) -> Self {
        let mut inverse = vec![0u32; sources.len()];
        for (j, &s) in sources.iter().enumerate() {
            inverse[s as usize] = j as u32;
        }
        Self {
            sources: sources.into(),
            inverse: inverse.into(),
            shift: None,
            fraction: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[u32] {
        &self.sources
    }

    /// Fraction of positions in the moved subset (1 for full permutations).
    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    /// Source map of the `power`-th power (negative powers use the inverse).
    pub fn power_sources(&self, power: i64) -> Vec<u32> {
        let d = self.dim();
        if let Some(s) = self.shift {
            let total = ((s as i128 * power as i128).rem_euclid(d as i128)) as usize;
            return (0..d).map(|j| ((j + d - total) % d) as u32).collect();
        }
        let base: &[u32] = if power >= 0 { &self.sources } else { &self.inverse };
        let k = power.unsigned_abs();
        let mut out = vec![0u32; d];
        let mut visited = vec![false; d];
        let mut cycle = Vec::new();
        for start in 0..d {
            if visited[start] {
                continue;
            }
            cycle.clear();
            let mut j = start;
            while !visited[j] {
                visited[j] = true;
                cycle.push(j as u32);
                j = base[j] as usize;
            }
            // cycle[i] takes its value from cycle[i + 1] under one application
            let len = cycle.len();
            let step = (k % len as u64) as usize;
            for i in 0..len {
                out[cycle[i] as usize] = cycle[(i + step) % len];
            }
        }
        out
    }
}

/// A permutation raised to an integer power; ρ^i in the usual notation.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationSpec {
    pub base: Permutation,
    pub power: i64,
}

impl PermutationSpec {
    pub fn new(base: Permutation, power: i64) -> Self {
        Self { base, power }
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.base.clone(), -self.power)
    }

    pub fn pow(&self, power: i64) -> Self {
        Self::new(self.base.clone(), self.power * power)
    }
}

/// Applies `spec` to every component of `a`.
pub fn permute(a: &Hypervector, spec: &PermutationSpec) -> Result<Hypervector> {
    if spec.base.dim() != a.dim() {
        return Err(HvError::DimensionMismatch {
            left: a.dim(),
            right: spec.base.dim(),
        });
    }
    if spec.power == 0 {
        return Ok(a.clone());
    }
    let src = spec.base.power_sources(spec.power);
    Ok(apply_sources(a, &src))
}

pub(crate) fn apply_sources(a: &Hypervector, src: &[u32]) -> Hypervector {
    let data = match a.components() {
        Components::Binary(b) => {
            let mut out = Bits::zeros(b.len());
            for (j, &s) in src.iter().enumerate() {
                if b.get(s as usize) {
                    out.set(j, true);
                }
            }
            Components::Binary(out)
        }
        Components::Real(v) => Components::Real(src.iter().map(|&s| v[s as usize]).collect()),
        Components::Complex(v) => Components::Complex(src.iter().map(|&s| v[s as usize]).collect()),
        Components::Modular(v) => Components::Modular(src.iter().map(|&s| v[s as usize]).collect()),
    };
    Hypervector::from_parts(*a.space(), data)
}
