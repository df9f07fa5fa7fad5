//! The model algebras: one [`Model`] value per VSA family, each owning its
//! space, tie-break state and binding parameters.

pub mod conv;
mod matrix;
mod permutation;
mod sbdr;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::space::{Bits, Components, Hypervector, Metric, RngStream, SpaceKind, SpaceSpec};

pub use matrix::{unbinding_vectors, BindingMatrix, MatrixKind, Tensor2};
pub use permutation::{permute, Permutation, PermutationSpec};
pub use sbdr::{cdt, conj_disj_bind, disjunction, Conjunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Bsc,
    Map,
    Hrr,
    Fhrr,
    Sbdr,
    Sbc,
    Mcr,
    Cgr,
    Mbat,
    Tpr2,
}

impl ModelKind {
    pub const ALL: [ModelKind; 10] = [
        ModelKind::Bsc,
        ModelKind::Map,
        ModelKind::Hrr,
        ModelKind::Fhrr,
        ModelKind::Sbdr,
        ModelKind::Sbc,
        ModelKind::Mcr,
        ModelKind::Cgr,
        ModelKind::Mbat,
        ModelKind::Tpr2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Bsc => "bsc",
            ModelKind::Map => "map",
            ModelKind::Hrr => "hrr",
            ModelKind::Fhrr => "fhrr",
            ModelKind::Sbdr => "sbdr",
            ModelKind::Sbc => "sbc",
            ModelKind::Mcr => "mcr",
            ModelKind::Cgr => "cgr",
            ModelKind::Mbat => "mbat",
            ModelKind::Tpr2 => "tpr2",
        }
    }

    /// Whether binding is its own inverse (position powers collapse).
    pub fn self_inverse_binding(self) -> bool {
        matches!(self, ModelKind::Bsc | ModelKind::Map)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = HvError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| HvError::InvalidParameter(format!("unknown model {s:?}")))
    }
}

/// How a superposition is normalized after summation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Plain component-wise sum.
    None,
    /// Sum scaled to unit Euclidean norm.
    Euclidean,
    /// Sum clipped to [-k, k].
    Clip(f64),
    /// Dense binary majority rule; even counts add the model tie-break vector.
    Majority,
    /// Bipolar sign; zeros take the model tie-break mask.
    Sign,
    /// Phasor sum projected back onto the unit circle.
    UnitMagnitude,
    /// Block-sparse sum reduced to the argmax of each block (ties: largest index).
    BlockArgmax,
    /// Sparse binary OR.
    Disjunction,
    /// Modular integers summed as phasors and snapped to the nearest of the r phases.
    Discretize,
}

impl Normalization {
    pub fn name(&self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::Euclidean => "euclidean",
            Normalization::Clip(_) => "clip",
            Normalization::Majority => "majority",
            Normalization::Sign => "sign",
            Normalization::UnitMagnitude => "unit-magnitude",
            Normalization::BlockArgmax => "block-argmax",
            Normalization::Disjunction => "disjunction",
            Normalization::Discretize => "discretize",
        }
    }

    fn supports(&self, kind: &SpaceKind) -> bool {
        use SpaceKind::*;
        match self {
            Normalization::None | Normalization::Euclidean => {
                matches!(kind, Bipolar | Real | Phasor | BlockSparse { .. })
            }
            Normalization::Clip(_) => matches!(kind, Bipolar | Real),
            Normalization::Majority => matches!(kind, DenseBinary),
            Normalization::Sign => matches!(kind, Bipolar),
            Normalization::UnitMagnitude => matches!(kind, Phasor),
            Normalization::BlockArgmax => matches!(kind, BlockSparse { .. }),
            Normalization::Disjunction => matches!(kind, DenseBinary | SparseBinary { .. }),
            Normalization::Discretize => matches!(kind, ModularInteger { .. }),
        }
    }
}

impl FromStr for Normalization {
    type Err = HvError;

    /// Names as printed by [`Normalization::name`]; clipping is `clip:K`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        if let Some(k) = lower.strip_prefix("clip:") {
            return match k.parse::<f64>() {
                Ok(k) if k.is_finite() && k > 0.0 => Ok(Normalization::Clip(k)),
                _ => Err(HvError::InvalidParameter(format!("invalid clip bound {k:?}"))),
            };
        }
        [
            Normalization::None,
            Normalization::Euclidean,
            Normalization::Majority,
            Normalization::Sign,
            Normalization::UnitMagnitude,
            Normalization::BlockArgmax,
            Normalization::Disjunction,
            Normalization::Discretize,
        ]
        .into_iter()
        .find(|n| n.name() == lower)
        .ok_or_else(|| HvError::InvalidParameter(format!("unknown normalization {s:?}")))
    }
}

/// How SBDR binds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SbdrBinding {
    Conjunction,
    #[default]
    Cdt,
}

/// Construction parameters shared by all models; each model reads the
/// fields that apply to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub dim: usize,
    /// SBDR density of atomic vectors.
    pub density: f64,
    /// SBC block size.
    pub block_size: usize,
    /// MCR / CGR range r.
    pub range: u32,
    /// CDT thinning depth T.
    pub depth: usize,
    /// Number of seeded permutations in the CDT pool.
    pub pool_size: usize,
    pub sbdr_binding: SbdrBinding,
    pub matrix_kind: MatrixKind,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            dim: 1024,
            density: 0.01,
            block_size: 16,
            range: 16,
            depth: 4,
            pool_size: 16,
            sbdr_binding: SbdrBinding::Cdt,
            matrix_kind: MatrixKind::RandomOrthogonal,
        }
    }
}

impl ModelParams {
    pub fn with_dim(dim: usize) -> Self {
        Self { dim, ..Self::default() }
    }
}

/// A model algebra over one hypervector space. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Model {
    kind: ModelKind,
    space: SpaceSpec,
    params: ModelParams,
    /// BSC majority tie-break vector or MAP sign tie mask.
    tie_break: Option<Hypervector>,
    cdt_pool: Vec<PermutationSpec>,
}

impl Model {
    /// Builds a model; all model-owned randomness derives from `stream`.
    pub fn new(kind: ModelKind, params: ModelParams, stream: &RngStream) -> Result<Self> {
        let d = params.dim;
        let space = match kind {
            ModelKind::Bsc => SpaceSpec::dense_binary(d)?,
            ModelKind::Map | ModelKind::Mbat => SpaceSpec::bipolar(d)?,
            ModelKind::Hrr | ModelKind::Tpr2 => SpaceSpec::real(d)?,
            ModelKind::Fhrr => SpaceSpec::phasor(d)?,
            ModelKind::Sbdr => SpaceSpec::sparse_binary(d, params.density)?,
            ModelKind::Sbc => SpaceSpec::block_sparse(d, params.block_size)?,
            ModelKind::Mcr | ModelKind::Cgr => SpaceSpec::modular(d, params.range)?,
        };
        let tie_break = match kind {
            ModelKind::Bsc | ModelKind::Map => Some(space.sample(&mut stream.derive("tie-break").rng())),
            _ => None,
        };
        let cdt_pool = if kind == ModelKind::Sbdr {
            if params.depth == 0 || params.pool_size < params.depth {
                return Err(HvError::InvalidParameter(format!(
                    "CDT depth {} needs 1 <= depth <= pool size {}",
                    params.depth, params.pool_size
                )));
            }
            let pool = stream.derive("cdt-pool");
            (0..params.pool_size as u64)
                .map(|k| PermutationSpec::new(Permutation::random(d, &mut pool.at(k).rng()), 1))
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            kind,
            space,
            params,
            tie_break,
            cdt_pool,
        })
    }

    pub fn bsc(dim: usize, stream: &RngStream) -> Result<Self> {
        Self::new(ModelKind::Bsc, ModelParams::with_dim(dim), stream)
    }

    pub fn map(dim: usize, stream: &RngStream) -> Result<Self> {
        Self::new(ModelKind::Map, ModelParams::with_dim(dim), stream)
    }

    pub fn hrr(dim: usize, stream: &RngStream) -> Result<Self> {
        Self::new(ModelKind::Hrr, ModelParams::with_dim(dim), stream)
    }

    pub fn fhrr(dim: usize, stream: &RngStream) -> Result<Self> {
        Self::new(ModelKind::Fhrr, ModelParams::with_dim(dim), stream)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn tie_break(&self) -> Option<&Hypervector> {
        self.tie_break.as_ref()
    }

    pub fn cdt_pool(&self) -> &[PermutationSpec] {
        &self.cdt_pool
    }

    /// Similarity measure the model uses for clean-up.
    pub fn default_metric(&self) -> Metric {
        match self.kind {
            ModelKind::Bsc => Metric::Hamming,
            ModelKind::Map | ModelKind::Fhrr => Metric::Cosine,
            ModelKind::Hrr | ModelKind::Tpr2 | ModelKind::Mbat | ModelKind::Sbc | ModelKind::Sbdr => Metric::Dot,
            ModelKind::Mcr => Metric::McrManhattan,
            ModelKind::Cgr => Metric::PhasorCos,
        }
    }

    /// Normalization used for plain bundling (sets, sequences, records).
    pub fn default_norm(&self) -> Normalization {
        match self.kind {
            ModelKind::Bsc => Normalization::Majority,
            ModelKind::Sbdr => Normalization::Disjunction,
            ModelKind::Mcr | ModelKind::Cgr => Normalization::Discretize,
            _ => Normalization::None,
        }
    }

    /// Normalization that maps a bundle back into the atomic domain (or unit
    /// norm for real spaces); used for bracketed sub-structures.
    pub fn normalizing_norm(&self) -> Normalization {
        match self.kind {
            ModelKind::Bsc => Normalization::Majority,
            ModelKind::Map => Normalization::Sign,
            ModelKind::Fhrr => Normalization::UnitMagnitude,
            ModelKind::Sbdr => Normalization::Disjunction,
            ModelKind::Sbc => Normalization::BlockArgmax,
            ModelKind::Mcr | ModelKind::Cgr => Normalization::Discretize,
            ModelKind::Hrr | ModelKind::Mbat | ModelKind::Tpr2 => Normalization::Euclidean,
        }
    }

    /// Whether bundles can be accumulated as plain sums (stacks, incremental sequences).
    pub fn supports_linear_bundles(&self) -> bool {
        Normalization::None.supports(&self.space.kind)
    }

    /// The standard position permutation ρ: a cyclic shift by one component
    /// (by one whole block for SBC so that block structure survives).
    pub fn rho(&self) -> PermutationSpec {
        let shift = self.space.block_size().unwrap_or(1);
        PermutationSpec::new(Permutation::cyclic(self.dim(), shift), 1)
    }

    pub fn random(&self, stream: &RngStream) -> Hypervector {
        self.space.sample(&mut stream.rng())
    }

    pub fn zero(&self) -> Hypervector {
        Hypervector::zeros(self.space)
    }

    /// Identity element of binding, where one exists.
    pub fn identity(&self) -> Result<Hypervector> {
        let d = self.dim();
        let data = match self.kind {
            ModelKind::Bsc => Components::Binary(Bits::zeros(d)),
            ModelKind::Map => Components::Real(vec![1.0; d]),
            ModelKind::Hrr => {
                let mut v = vec![0.0; d];
                v[0] = 1.0;
                Components::Real(v)
            }
            ModelKind::Fhrr => Components::Complex(vec![Complex64::new(1.0, 0.0); d]),
            ModelKind::Mcr | ModelKind::Cgr => Components::Modular(vec![0; d]),
            ModelKind::Sbc => {
                let b = self.space.block_size().expect("block size");
                return Hypervector::from_block_indices(self.space, &vec![0; d / b]);
            }
            _ => return Err(self.unsupported("binding identity")),
        };
        Ok(Hypervector::from_parts(self.space, data))
    }

    fn unsupported(&self, op: &str) -> HvError {
        HvError::Unsupported {
            model: self.kind.name().into(),
            operation: op.into(),
        }
    }

    fn check(&self, hv: &Hypervector) -> Result<()> {
        if hv.dim() != self.dim() {
            return Err(HvError::DimensionMismatch {
                left: self.dim(),
                right: hv.dim(),
            });
        }
        if hv.space() != &self.space {
            return Err(HvError::SpaceMismatch {
                expected: self.space.to_string(),
                found: hv.space().to_string(),
            });
        }
        Ok(())
    }

    /// Multiplicative binding of two hypervectors.
    ///
    /// MBAT binds with a matrix ([`Model::bind_matrix`]) and TPR2 produces a
    /// tensor ([`Model::tensor_bind`]); both are rejected here.
    pub fn bind(&self, a: &Hypervector, b: &Hypervector) -> Result<Hypervector> {
        self.check(a)?;
        self.check(b)?;
        let data = match (self.kind, a.components(), b.components()) {
            (ModelKind::Bsc, Components::Binary(x), Components::Binary(y)) => Components::Binary(x.xor(y)),
            (ModelKind::Map, Components::Real(x), Components::Real(y)) => Components::Real(x.iter().zip(y).map(|(p, q)| p * q).collect()),
            (ModelKind::Hrr, Components::Real(x), Components::Real(y)) => Components::Real(conv::circular_convolution(x, y)),
            (ModelKind::Fhrr, Components::Complex(x), Components::Complex(y)) => {
                Components::Complex(x.iter().zip(y).map(|(p, q)| p * q).collect())
            }
            (ModelKind::Mcr | ModelKind::Cgr, Components::Modular(x), Components::Modular(y)) => {
                let r = self.params.range;
                Components::Modular(x.iter().zip(y).map(|(&p, &q)| (p + q) % r).collect())
            }
            (ModelKind::Sbc, _, _) => {
                let block = self.params.block_size;
                let ia = a.block_indices()?;
                let ib = b.block_indices()?;
                let sum: Vec<usize> = ia.iter().zip(&ib).map(|(p, q)| (p + q) % block).collect();
                return Hypervector::from_block_indices(self.space, &sum);
            }
            (ModelKind::Sbdr, _, _) => {
                return match self.params.sbdr_binding {
                    SbdrBinding::Conjunction => Ok(conj_disj_bind(&[a, b])?.hv),
                    SbdrBinding::Cdt => cdt(&[a, b], self.params.depth, &self.cdt_pool),
                }
            }
            _ => return Err(self.unsupported("vector-vector binding")),
        };
        Ok(Hypervector::from_parts(self.space, data))
    }

    /// Binds a sequence of vectors left to right.
    pub fn bind_all(&self, items: &[&Hypervector]) -> Result<Hypervector> {
        let (first, rest) = items.split_first().ok_or(HvError::EmptyInput)?;
        if self.kind == ModelKind::Sbdr {
            return match self.params.sbdr_binding {
                SbdrBinding::Conjunction if items.len() >= 2 => Ok(conj_disj_bind(items)?.hv),
                SbdrBinding::Conjunction => Ok((*first).clone()),
                SbdrBinding::Cdt => cdt(items, self.params.depth, &self.cdt_pool),
            };
        }
        rest.iter().try_fold((*first).clone(), |acc, hv| self.bind(&acc, hv))
    }

    /// Recovers the other factor of `bound` given `known`.
    ///
    /// Exact for BSC, bipolar MAP, MCR/CGR and unit-magnitude FHRR; HRR and
    /// SBC bundles return the factor plus crosstalk.
    pub fn unbind(&self, bound: &Hypervector, known: &Hypervector) -> Result<Hypervector> {
        self.check(bound)?;
        self.check(known)?;
        let data = match (self.kind, bound.components(), known.components()) {
            (ModelKind::Bsc, Components::Binary(x), Components::Binary(y)) => Components::Binary(x.xor(y)),
            (ModelKind::Map, Components::Real(x), Components::Real(y)) => Components::Real(x.iter().zip(y).map(|(p, q)| p * q).collect()),
            (ModelKind::Hrr, Components::Real(x), Components::Real(y)) => Components::Real(conv::circular_correlation(y, x)),
            (ModelKind::Fhrr, Components::Complex(x), Components::Complex(y)) => {
                Components::Complex(x.iter().zip(y).map(|(p, q)| p * q.conj()).collect())
            }
            (ModelKind::Mcr | ModelKind::Cgr, Components::Modular(x), Components::Modular(y)) => {
                let r = self.params.range;
                Components::Modular(x.iter().zip(y).map(|(&p, &q)| (p + r - q) % r).collect())
            }
            (ModelKind::Sbc, Components::Real(x), _) => {
                // block-wise circular correlation with a one-hot block is a shift
                let block = self.params.block_size;
                let shifts = known.block_indices()?;
                let mut out = vec![0.0; x.len()];
                for (b, &k) in shifts.iter().enumerate() {
                    let base = b * block;
                    for i in 0..block {
                        out[base + i] = x[base + (i + k) % block];
                    }
                }
                Components::Real(out)
            }
            _ => return Err(self.unsupported("unbinding")),
        };
        Ok(Hypervector::from_parts(self.space, data))
    }

    /// MBAT binding: matrix-vector product.
    pub fn bind_matrix(&self, role: &BindingMatrix, v: &Hypervector) -> Result<Hypervector> {
        self.matrix_operands(role, v)?;
        Ok(Hypervector::from_parts(
            self.space,
            Components::Real(role.apply(v.as_real().expect("real storage"))),
        ))
    }

    /// MBAT unbinding: multiplication by the (pseudo-)inverse matrix.
    pub fn unbind_matrix(&self, role: &BindingMatrix, bound: &Hypervector) -> Result<Hypervector> {
        self.matrix_operands(role, bound)?;
        Ok(Hypervector::from_parts(
            self.space,
            Components::Real(role.apply_inverse(bound.as_real().expect("real storage"))?),
        ))
    }

    pub fn binding_matrix(&self, stream: &RngStream) -> Result<BindingMatrix> {
        if self.kind != ModelKind::Mbat {
            return Err(self.unsupported("binding matrices"));
        }
        Ok(BindingMatrix::generate(self.dim(), self.params.matrix_kind, stream))
    }

    fn matrix_operands(&self, role: &BindingMatrix, v: &Hypervector) -> Result<()> {
        if self.kind != ModelKind::Mbat {
            return Err(self.unsupported("matrix binding"));
        }
        self.check(v)?;
        if role.dim() != self.dim() {
            return Err(HvError::DimensionMismatch {
                left: self.dim(),
                right: role.dim(),
            });
        }
        Ok(())
    }

    /// TPR2 binding: outer product a ⊗ b.
    pub fn tensor_bind(&self, a: &Hypervector, b: &Hypervector) -> Result<Tensor2> {
        if self.kind != ModelKind::Tpr2 {
            return Err(self.unsupported("tensor binding"));
        }
        self.check(a)?;
        self.check(b)?;
        Ok(Tensor2::outer(self.space, a.as_real().unwrap(), b.as_real().unwrap()))
    }

    /// TPR2 unbinding with an unbinding vector (see [`unbinding_vectors`]).
    pub fn tensor_unbind(&self, t: &Tensor2, unbinder: &Hypervector) -> Result<Hypervector> {
        if self.kind != ModelKind::Tpr2 {
            return Err(self.unsupported("tensor unbinding"));
        }
        self.check(unbinder)?;
        if t.space() != &self.space {
            return Err(HvError::SpaceMismatch {
                expected: self.space.to_string(),
                found: t.space().to_string(),
            });
        }
        Ok(Hypervector::from_parts(
            self.space,
            Components::Real(t.contract(unbinder.as_real().unwrap())),
        ))
    }

    pub fn permute(&self, a: &Hypervector, spec: &PermutationSpec) -> Result<Hypervector> {
        self.check(a)?;
        permute(a, spec)
    }

    /// Superposition with the given normalization.
    pub fn superpose<'a, I>(&self, inputs: I, norm: Normalization) -> Result<Hypervector>
    where
        I: IntoIterator<Item = &'a Hypervector>,
    {
        self.check_norm(norm)?;
        let mut acc = self.accumulator();
        for hv in inputs {
            acc.add(hv)?;
        }
        acc.finish(norm)
    }

    /// Empty running sum over the model's space.
    pub fn accumulator(&self) -> Accumulator<'_> {
        Accumulator::new(self)
    }

    fn check_norm(&self, norm: Normalization) -> Result<()> {
        if norm.supports(&self.space.kind) {
            Ok(())
        } else {
            Err(HvError::NormIncompatible {
                norm: norm.name().into(),
                space: self.space.kind.name().into(),
            })
        }
    }

    /// Superposition with [`Model::default_norm`].
    pub fn bundle<'a, I>(&self, inputs: I) -> Result<Hypervector>
    where
        I: IntoIterator<Item = &'a Hypervector>,
    {
        self.superpose(inputs, self.default_norm())
    }

    /// Applies a normalization to an already-summed vector. Majority,
    /// disjunction and discretization need the individual summands and are
    /// only available through [`Model::superpose`].
    pub fn normalize(&self, sum: Hypervector, norm: Normalization) -> Result<Hypervector> {
        self.check(&sum)?;
        self.check_norm(norm)?;
        let mut out = sum;
        match (norm, out.data_mut()) {
            (Normalization::None, _) => {}
            (Normalization::Euclidean, Components::Real(v)) => {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 0.0 {
                    v.iter_mut().for_each(|x| *x /= n);
                }
            }
            (Normalization::Euclidean, Components::Complex(v)) => {
                let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if n > 0.0 {
                    v.iter_mut().for_each(|z| *z /= n);
                }
            }
            (Normalization::Clip(k), Components::Real(v)) => {
                v.iter_mut().for_each(|x| *x = x.clamp(-k, k));
            }
            (Normalization::Sign, Components::Real(v)) => {
                let mask = self
                    .tie_break
                    .as_ref()
                    .and_then(|t| t.as_real())
                    .ok_or_else(|| self.unsupported("sign normalization"))?;
                for (x, &m) in v.iter_mut().zip(mask) {
                    *x = if *x > 0.0 {
                        1.0
                    } else if *x < 0.0 {
                        -1.0
                    } else {
                        m
                    };
                }
            }
            (Normalization::UnitMagnitude, Components::Complex(v)) => {
                for z in v.iter_mut() {
                    let n = z.norm();
                    *z = if n > 0.0 { *z / n } else { Complex64::new(1.0, 0.0) };
                }
            }
            (Normalization::BlockArgmax, Components::Real(v)) => {
                let block = self.space.block_size().expect("block size");
                for chunk in v.chunks_mut(block) {
                    let mut best = 0;
                    for i in 1..block {
                        if chunk[i] >= chunk[best] {
                            best = i;
                        }
                    }
                    chunk.iter_mut().for_each(|x| *x = 0.0);
                    chunk[best] = 1.0;
                }
            }
            _ => {
                return Err(HvError::NormIncompatible {
                    norm: norm.name().into(),
                    space: "pre-summed input".into(),
                })
            }
        }
        Ok(out)
    }
}

/// Snaps a phasor to the nearest of the r discrete phases, ties toward the
/// smaller integer. A zero sum maps to 0.
fn nearest_phase(z: Complex64, r: u32) -> u32 {
    if z.norm_sqr() < 1e-24 {
        return 0;
    }
    let pos = z.arg().rem_euclid(TAU) * r as f64 / TAU;
    let floor = pos.floor();
    let frac = pos - floor;
    let k = if (frac - 0.5).abs() < 1e-9 || frac < 0.5 {
        floor as u32
    } else {
        floor as u32 + 1
    };
    k % r
}

/// Running superposition. Keeps per-component tallies so that terms can be
/// added one at a time and any compatible normalization applied at the end.
#[derive(Debug, Clone)]
pub struct Accumulator<'m> {
    model: &'m Model,
    tally: Tally,
    count: usize,
}

#[derive(Debug, Clone)]
enum Tally {
    /// Number of set bits per component.
    Counts(Vec<u32>),
    Real(Vec<f64>),
    /// Complex sums; modular integers are accumulated as phasors.
    Complex(Vec<Complex64>),
}

impl<'m> Accumulator<'m> {
    fn new(model: &'m Model) -> Self {
        let d = model.dim();
        let tally = match model.space.kind {
            SpaceKind::DenseBinary | SpaceKind::SparseBinary { .. } => Tally::Counts(vec![0; d]),
            SpaceKind::Phasor | SpaceKind::ModularInteger { .. } => Tally::Complex(vec![Complex64::new(0.0, 0.0); d]),
            _ => Tally::Real(vec![0.0; d]),
        };
        Self { model, tally, count: 0 }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn add(&mut self, hv: &Hypervector) -> Result<()> {
        self.add_scaled(hv, 1.0)
    }

    /// Adds `weight · hv`. Binary and modular tallies only accept unit weights.
    pub fn add_scaled(&mut self, hv: &Hypervector, weight: f64) -> Result<()> {
        self.model.check(hv)?;
        match (&mut self.tally, hv.components()) {
            (Tally::Counts(c), Components::Binary(b)) => {
                if weight != 1.0 {
                    return Err(self.model.unsupported("weighted binary superposition"));
                }
                for i in b.iter_ones() {
                    c[i] += 1;
                }
            }
            (Tally::Real(s), Components::Real(v)) => {
                for (x, y) in s.iter_mut().zip(v) {
                    *x += weight * y;
                }
            }
            (Tally::Complex(s), Components::Complex(v)) => {
                for (x, y) in s.iter_mut().zip(v) {
                    *x += y * weight;
                }
            }
            (Tally::Complex(s), Components::Modular(v)) => {
                if weight != 1.0 {
                    return Err(self.model.unsupported("weighted modular superposition"));
                }
                let r = self.model.params.range as f64;
                for (x, &k) in s.iter_mut().zip(v) {
                    *x += Complex64::from_polar(1.0, TAU * k as f64 / r);
                }
            }
            _ => unreachable!("storage checked against the model space"),
        }
        self.count += 1;
        Ok(())
    }

    /// Applies `norm` to the current sum without consuming the tallies.
    pub fn finish(&self, norm: Normalization) -> Result<Hypervector> {
        if self.count == 0 {
            return Err(HvError::EmptyInput);
        }
        let model = self.model;
        model.check_norm(norm)?;
        let data = match (&self.tally, norm) {
            (Tally::Counts(c), Normalization::Majority) => {
                let mut n = self.count;
                let mut counts = c.clone();
                if n.is_multiple_of(2) {
                    if let Some(t) = &model.tie_break {
                        for i in t.as_bits().expect("binary").iter_ones() {
                            counts[i] += 1;
                        }
                        n += 1;
                    }
                }
                Components::Binary(Bits::from_bools(counts.iter().map(|&k| 2 * k as usize > n)))
            }
            (Tally::Counts(c), Normalization::Disjunction) => Components::Binary(Bits::from_bools(c.iter().map(|&k| k > 0))),
            (Tally::Complex(s), Normalization::Discretize) => {
                let r = model.params.range;
                Components::Modular(s.iter().map(|z| nearest_phase(*z, r)).collect())
            }
            (Tally::Real(s), _) => return model.normalize(Hypervector::from_parts(model.space, Components::Real(s.clone())), norm),
            (Tally::Complex(s), _) if model.space.kind == SpaceKind::Phasor => {
                return model.normalize(Hypervector::from_parts(model.space, Components::Complex(s.clone())), norm)
            }
            _ => {
                return Err(HvError::NormIncompatible {
                    norm: norm.name().into(),
                    space: model.space.kind.name().into(),
                })
            }
        };
        Ok(Hypervector::from_parts(model.space, data))
    }
}

/// Component-wise sum of two linear-space hypervectors.
pub fn add(a: &Hypervector, b: &Hypervector) -> Result<Hypervector> {
    combine(a, b, 1.0)
}

/// Component-wise difference `a - b` of two linear-space hypervectors.
pub fn sub(a: &Hypervector, b: &Hypervector) -> Result<Hypervector> {
    combine(a, b, -1.0)
}

fn combine(a: &Hypervector, b: &Hypervector, sign: f64) -> Result<Hypervector> {
    a.check_same_space(b)?;
    let data = match (a.components(), b.components()) {
        (Components::Real(x), Components::Real(y)) => Components::Real(x.iter().zip(y).map(|(p, q)| p + sign * q).collect()),
        (Components::Complex(x), Components::Complex(y)) => Components::Complex(x.iter().zip(y).map(|(p, q)| p + q * sign).collect()),
        _ => {
            return Err(HvError::NormIncompatible {
                norm: "linear arithmetic".into(),
                space: a.space().kind.name().into(),
            })
        }
    };
    Ok(Hypervector::from_parts(*a.space(), data))
}

/// Multiplies every component by `k` (linear spaces only).
pub fn scale(a: &Hypervector, k: f64) -> Result<Hypervector> {
    let data = match a.components() {
        Components::Real(x) => Components::Real(x.iter().map(|p| p * k).collect()),
        Components::Complex(x) => Components::Complex(x.iter().map(|p| p * k).collect()),
        _ => {
            return Err(HvError::NormIncompatible {
                norm: "scaling".into(),
                space: a.space().kind.name().into(),
            })
        }
    };
    Ok(Hypervector::from_parts(*a.space(), data))
}
