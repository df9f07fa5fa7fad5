//! Hypervector spaces, the `Hypervector` value type, seeded generation and
//! the similarity measures defined over each space.

mod bits;
mod rng;
pub mod serial;
mod similarity;

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};

pub use bits::Bits;
pub use rng::RngStream;
pub use similarity::{similarity, Metric};

/// Element domain of a hypervector space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceKind {
    /// Components in {0, 1}.
    DenseBinary,
    /// Components in {-1, +1} for atomic vectors. Unnormalized bundles in
    /// this space carry integer counts.
    Bipolar,
    /// Real components, atomic draws from N(0, 1/D).
    Real,
    /// Unit phasors with angles in (0, 2π] for atomic vectors; bundles keep
    /// their complex magnitudes.
    Phasor,
    /// {0, 1} components with exactly round(density · D) ones when atomic.
    SparseBinary { density: f64 },
    /// D / block_size blocks, one active component per block when canonical.
    /// Bundles are stored as real-valued block activations.
    BlockSparse { block_size: usize },
    /// Integers in {0, .., range - 1}.
    ModularInteger { range: u32 },
}

impl SpaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::DenseBinary => "dense-binary",
            SpaceKind::Bipolar => "bipolar",
            SpaceKind::Real => "real",
            SpaceKind::Phasor => "phasor",
            SpaceKind::SparseBinary { .. } => "sparse-binary",
            SpaceKind::BlockSparse { .. } => "block-sparse",
            SpaceKind::ModularInteger { .. } => "modular-integer",
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, SpaceKind::DenseBinary | SpaceKind::SparseBinary { .. })
    }
}

/// A space kind together with its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub kind: SpaceKind,
    pub dim: usize,
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::SparseBinary { density } => {
                write!(f, "sparse-binary(D={}, p={})", self.dim, density)
            }
            SpaceKind::BlockSparse { block_size } => {
                write!(f, "block-sparse(D={}, block={})", self.dim, block_size)
            }
            SpaceKind::ModularInteger { range } => {
                write!(f, "modular-integer(D={}, r={})", self.dim, range)
            }
            kind => write!(f, "{}(D={})", kind.name(), self.dim),
        }
    }
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind, dim: usize) -> Result<Self> {
        let spec = Self { kind, dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dense_binary(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::DenseBinary, dim)
    }

    pub fn bipolar(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Bipolar, dim)
    }

    pub fn real(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Real, dim)
    }

    pub fn phasor(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Phasor, dim)
    }

    pub fn sparse_binary(dim: usize, density: f64) -> Result<Self> {
        Self::new(SpaceKind::SparseBinary { density }, dim)
    }

    pub fn block_sparse(dim: usize, block_size: usize) -> Result<Self> {
        Self::new(SpaceKind::BlockSparse { block_size }, dim)
    }

    pub fn modular(dim: usize, range: u32) -> Result<Self> {
        Self::new(SpaceKind::ModularInteger { range }, dim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(HvError::InvalidSpace("dimension must be at least 1".into()));
        }
        match self.kind {
            SpaceKind::SparseBinary { density } => {
                if !(density > 0.0 && density < 1.0) {
                    return Err(HvError::InvalidSpace(format!("sparse density {density} outside (0, 1)")));
                }
            }
            SpaceKind::BlockSparse { block_size } => {
                if block_size == 0 || !self.dim.is_multiple_of(block_size) {
                    return Err(HvError::InvalidSpace(format!(
                        "block size {block_size} does not divide D = {}",
                        self.dim
                    )));
                }
            }
            SpaceKind::ModularInteger { range } if range < 2 => {
                return Err(HvError::InvalidSpace(format!("modular range {range} < 2")));
            }
            _ => {}
        }
        Ok(())
    }

    /// Number of ones in an atomic sparse-binary vector: round(p · D).
    pub fn sparse_count(&self) -> Option<usize> {
        match self.kind {
            SpaceKind::SparseBinary { density } => Some((density * self.dim as f64).round() as usize),
            _ => None,
        }
    }

    pub fn block_size(&self) -> Option<usize> {
        match self.kind {
            SpaceKind::BlockSparse { block_size } => Some(block_size),
            _ => None,
        }
    }

    pub fn modular_range(&self) -> Option<u32> {
        match self.kind {
            SpaceKind::ModularInteger { range } => Some(range),
            _ => None,
        }
    }

    pub(crate) fn storage(&self) -> Storage {
        match self.kind {
            SpaceKind::DenseBinary | SpaceKind::SparseBinary { .. } => Storage::Binary,
            SpaceKind::Bipolar | SpaceKind::Real | SpaceKind::BlockSparse { .. } => Storage::Real,
            SpaceKind::Phasor => Storage::Complex,
            SpaceKind::ModularInteger { .. } => Storage::Modular,
        }
    }

    /// Draws an i.i.d. atomic hypervector from this space.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Hypervector {
        let d = self.dim;
        let data = match self.kind {
            SpaceKind::DenseBinary => Components::Binary(random_bits(d, rng)),
            SpaceKind::Bipolar => {
                let bits = random_bits(d, rng);
                Components::Real(bits.iter().map(|b| if b { 1.0 } else { -1.0 }).collect())
            }
            SpaceKind::Real => {
                let normal = Normal::new(0.0, 1.0 / (d as f64).sqrt()).expect("finite std");
                Components::Real((0..d).map(|_| normal.sample(rng)).collect())
            }
            SpaceKind::Phasor => Components::Complex(
                (0..d)
                    .map(|_| Complex64::from_polar(1.0, TAU * (1.0 - rng.random::<f64>())))
                    .collect(),
            ),
            SpaceKind::SparseBinary { .. } => {
                let m = self.sparse_count().unwrap_or(0);
                let mut bits = Bits::zeros(d);
                for i in index::sample(rng, d, m) {
                    bits.set(i, true);
                }
                Components::Binary(bits)
            }
            SpaceKind::BlockSparse { block_size } => {
                let mut v = vec![0.0; d];
                for block in 0..d / block_size {
                    v[block * block_size + rng.random_range(0..block_size)] = 1.0;
                }
                Components::Real(v)
            }
            SpaceKind::ModularInteger { range } => Components::Modular((0..d).map(|_| rng.random_range(0..range)).collect()),
        };
        Hypervector { space: *self, data }
    }
}

fn random_bits<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Bits {
    Bits::from_words((0..d.div_ceil(64)).map(|_| rng.random()).collect(), d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Storage {
    Binary,
    Real,
    Complex,
    Modular,
}

/// Component storage of a hypervector.
#[derive(Debug, Clone, PartialEq)]
pub enum Components {
    Binary(Bits),
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
    Modular(Vec<u32>),
}

impl Components {
    pub fn len(&self) -> usize {
        match self {
            Components::Binary(b) => b.len(),
            Components::Real(v) => v.len(),
            Components::Complex(v) => v.len(),
            Components::Modular(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A fixed-dimension vector tagged with the space it lives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "serial::HypervectorRecord", try_from = "serial::HypervectorRecord")]
pub struct Hypervector {
    space: SpaceSpec,
    data: Components,
}

impl Hypervector {
    /// Validates that `data` has the right storage, length and domain for `space`.
    pub fn new(space: SpaceSpec, data: Components) -> Result<Self> {
        space.validate()?;
        if data.len() != space.dim {
            return Err(HvError::DimensionMismatch {
                left: space.dim,
                right: data.len(),
            });
        }
        let ok = matches!(
            (space.storage(), &data),
            (Storage::Binary, Components::Binary(_))
                | (Storage::Real, Components::Real(_))
                | (Storage::Complex, Components::Complex(_))
                | (Storage::Modular, Components::Modular(_))
        );
        if !ok {
            return Err(HvError::Format(format!(
                "component storage does not match {} space",
                space.kind.name()
            )));
        }
        match &data {
            Components::Real(v) if v.iter().any(|x| !x.is_finite()) => return Err(HvError::NonFinite("real component".into())),
            Components::Complex(v) if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) => {
                return Err(HvError::NonFinite("complex component".into()))
            }
            Components::Modular(v) => {
                let r = space.modular_range().unwrap_or(u32::MAX);
                if let Some(bad) = v.iter().find(|&&x| x >= r) {
                    return Err(HvError::Format(format!("component {bad} outside range {r}")));
                }
            }
            _ => {}
        }
        Ok(Self { space, data })
    }

    /// Construction for callers that already guarantee the invariants.
    pub(crate) fn from_parts(space: SpaceSpec, data: Components) -> Self {
        debug_assert_eq!(space.dim, data.len());
        Self { space, data }
    }

    pub fn from_bits(space: SpaceSpec, bits: Bits) -> Result<Self> {
        Self::new(space, Components::Binary(bits))
    }

    pub fn from_binary(space: SpaceSpec, values: &[u8]) -> Result<Self> {
        if let Some(bad) = values.iter().find(|&&v| v > 1) {
            return Err(HvError::Format(format!("binary component {bad}")));
        }
        Self::from_bits(space, Bits::from_bools(values.iter().map(|&v| v == 1)))
    }

    pub fn from_real(space: SpaceSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(space, Components::Real(values))
    }

    pub fn from_complex(space: SpaceSpec, values: Vec<Complex64>) -> Result<Self> {
        Self::new(space, Components::Complex(values))
    }

    /// Unit phasors from angles in radians.
    pub fn from_angles(space: SpaceSpec, angles: &[f64]) -> Result<Self> {
        Self::from_complex(space, angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect())
    }

    pub fn from_modular(space: SpaceSpec, values: Vec<u32>) -> Result<Self> {
        Self::new(space, Components::Modular(values))
    }

    /// Canonical block-sparse vector with the given active index per block.
    pub fn from_block_indices(space: SpaceSpec, indices: &[usize]) -> Result<Self> {
        let block = space.block_size().ok_or_else(|| HvError::SpaceMismatch {
            expected: "block-sparse".into(),
            found: space.kind.name().into(),
        })?;
        let blocks = space.dim / block;
        if indices.len() != blocks {
            return Err(HvError::LengthMismatch {
                expected: blocks,
                found: indices.len(),
            });
        }
        let mut v = vec![0.0; space.dim];
        for (b, &i) in indices.iter().enumerate() {
            if i >= block {
                return Err(HvError::Format(format!("block index {i} >= block size {block}")));
            }
            v[b * block + i] = 1.0;
        }
        Self::from_real(space, v)
    }

    /// The all-zero vector (empty bundle) of a space.
    pub fn zeros(space: SpaceSpec) -> Self {
        let d = space.dim;
        let data = match space.storage() {
            Storage::Binary => Components::Binary(Bits::zeros(d)),
            Storage::Real => Components::Real(vec![0.0; d]),
            Storage::Complex => Components::Complex(vec![Complex64::new(0.0, 0.0); d]),
            Storage::Modular => Components::Modular(vec![0; d]),
        };
        Self { space, data }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn components(&self) -> &Components {
        &self.data
    }

    pub fn into_components(self) -> Components {
        self.data
    }

    pub fn as_bits(&self) -> Option<&Bits> {
        match &self.data {
            Components::Binary(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match &self.data {
            Components::Real(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_complex(&self) -> Option<&[Complex64]> {
        match &self.data {
            Components::Complex(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_modular(&self) -> Option<&[u32]> {
        match &self.data {
            Components::Modular(v) => Some(v),
            _ => None,
        }
    }

    /// Binary components as 0/1 bytes.
    pub fn to_binary_vec(&self) -> Option<Vec<u8>> {
        self.as_bits().map(|b| b.iter().map(u8::from).collect())
    }

    /// Phasor angles mapped into (0, 2π].
    pub fn angles(&self) -> Option<Vec<f64>> {
        self.as_complex().map(|v| v.iter().map(|z| wrap_angle(z.arg())).collect())
    }

    /// Active index of each block, or `NotCanonical` if a block does not hold
    /// exactly one 1 and zeros elsewhere.
    pub fn block_indices(&self) -> Result<Vec<usize>> {
        let block = self.space.block_size().ok_or_else(|| HvError::SpaceMismatch {
            expected: "block-sparse".into(),
            found: self.space.kind.name().into(),
        })?;
        let v = self.as_real().expect("block-sparse stores reals");
        v.chunks(block)
            .map(|chunk| {
                let mut active = None;
                for (i, &x) in chunk.iter().enumerate() {
                    if x == 1.0 && active.is_none() {
                        active = Some(i);
                    } else if x != 0.0 {
                        return Err(HvError::NotCanonical);
                    }
                }
                active.ok_or(HvError::NotCanonical)
            })
            .collect()
    }

    /// Whether every component lies in the atomic domain of the space.
    pub fn is_atomic_form(&self) -> bool {
        match (&self.space.kind, &self.data) {
            (SpaceKind::Bipolar, Components::Real(v)) => v.iter().all(|&x| x == 1.0 || x == -1.0),
            (SpaceKind::Phasor, Components::Complex(v)) => v.iter().all(|z| (z.norm() - 1.0).abs() < 1e-9),
            (SpaceKind::BlockSparse { .. }, _) => self.block_indices().is_ok(),
            _ => true,
        }
    }

    /// Fraction of nonzero components.
    pub fn density(&self) -> f64 {
        let nonzero = match &self.data {
            Components::Binary(b) => b.count_ones(),
            Components::Real(v) => v.iter().filter(|&&x| x != 0.0).count(),
            Components::Complex(v) => v.iter().filter(|z| z.norm_sqr() != 0.0).count(),
            Components::Modular(v) => v.iter().filter(|&&x| x != 0).count(),
        };
        nonzero as f64 / self.dim() as f64
    }

    /// Squared Euclidean norm (binary vectors count their ones).
    pub fn norm_sqr(&self) -> f64 {
        match &self.data {
            Components::Binary(b) => b.count_ones() as f64,
            Components::Real(v) => v.iter().map(|x| x * x).sum(),
            Components::Complex(v) => v.iter().map(|z| z.norm_sqr()).sum(),
            Components::Modular(v) => v.iter().map(|&x| (x as f64) * (x as f64)).sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sqr() == 0.0
    }

    pub(crate) fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(HvError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        if self.space != other.space {
            return Err(HvError::SpaceMismatch {
                expected: self.space.to_string(),
                found: other.space.to_string(),
            });
        }
        Ok(())
    }

    pub(crate) fn data_mut(&mut self) -> &mut Components {
        &mut self.data
    }
}

/// Maps an angle in radians into (0, 2π].
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r == 0.0 {
        TAU
    } else {
        r
    }
}

/// Draws a fresh atomic hypervector for `space` from the stream's current counter.
pub fn random_hv(space: &SpaceSpec, stream: &RngStream) -> Result<Hypervector> {
    space.validate()?;
    Ok(space.sample(&mut stream.rng()))
}
