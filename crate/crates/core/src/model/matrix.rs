//! Matrix-valued binding: MBAT role matrices and order-2 tensor products.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::space::{Hypervector, RngStream, SpaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    /// QR-orthonormalized Gaussian matrix; unbinding is the transpose.
    #[default]
    RandomOrthogonal,
    /// Entries ±1/√D; unbinding uses the inverse or, failing that, the pseudo-inverse.
    RandomSign,
}

/// A D×D matrix used as a role.
#[derive(Debug, Clone, PartialEq)]
pub struct BindingMatrix {
    pub kind: MatrixKind,
    pub provenance: RngStream,
    matrix: DMatrix<f64>,
    inverse: Option<DMatrix<f64>>,
}

impl BindingMatrix {
    pub fn generate(dim: usize, kind: MatrixKind, stream: &RngStream) -> Self {
        let mut rng = stream.rng();
        let (matrix, inverse) = match kind {
            MatrixKind::RandomOrthogonal => {
                let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
                let qr = g.qr();
                let mut q = qr.q();
                let r = qr.r();
                // sign-fix columns so the distribution is Haar
                for j in 0..dim {
                    if r[(j, j)] < 0.0 {
                        q.column_mut(j).neg_mut();
                    }
                }
                let t = q.transpose();
                (q, Some(t))
            }
            MatrixKind::RandomSign => {
                let scale = 1.0 / (dim as f64).sqrt();
                let m = DMatrix::<f64>::from_fn(dim, dim, |_, _| if rng.random::<bool>() { scale } else { -scale });
                let inv = m.clone().try_inverse().or_else(|| m.clone().pseudo_inverse(1e-10).ok());
                (m, inv)
            }
        };
        Self {
            kind,
            provenance: stream.clone(),
            matrix,
            inverse,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> Option<&DMatrix<f64>> {
        self.inverse.as_ref()
    }

    pub(crate) fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(v)).iter().copied().collect()
    }

    pub(crate) fn apply_inverse(&self, v: &[f64]) -> Result<Vec<f64>> {
        let inv = self.inverse.as_ref().ok_or(HvError::NotInvertible)?;
        Ok((inv * DVector::from_column_slice(v)).iter().copied().collect())
    }
}

/// Order-2 tensor produced by outer-product binding. It cannot be bound
/// again; only superposed with other tensors or unbound by a vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    space: SpaceSpec,
    data: DMatrix<f64>,
}

impl Tensor2 {
    pub(crate) fn outer(space: SpaceSpec, a: &[f64], b: &[f64]) -> Self {
        let data = DVector::from_column_slice(a) * DVector::from_column_slice(b).transpose();
        Self { space, data }
    }

    pub fn zeros(space: SpaceSpec) -> Self {
        Self {
            space,
            data: DMatrix::zeros(space.dim, space.dim),
        }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Component-wise sum of tensors over the same space.
    pub fn superpose(tensors: &[Tensor2]) -> Result<Tensor2> {
        let first = tensors.first().ok_or(HvError::EmptyInput)?;
        let mut acc = first.clone();
        for t in &tensors[1..] {
            if t.space != acc.space {
                return Err(HvError::SpaceMismatch {
                    expected: acc.space.to_string(),
                    found: t.space.to_string(),
                });
            }
            acc.data += &t.data;
        }
        Ok(acc)
    }

    /// Tensor-vector inner product uᵀT along the first mode.
    pub(crate) fn contract(&self, u: &[f64]) -> Vec<f64> {
        (DVector::from_column_slice(u).transpose() * &self.data).iter().copied().collect()
    }
}

/// Unbinding vectors for a set of atomic vectors: the rows of the
/// pseudo-inverse of the matrix whose columns are the atoms. For an
/// orthonormal set these are the atoms themselves.
pub fn unbinding_vectors(atoms: &[Hypervector]) -> Result<Vec<Hypervector>> {
    let first = atoms.first().ok_or(HvError::EmptyInput)?;
    let space = *first.space();
    let d = space.dim;
    let mut cols = Vec::with_capacity(atoms.len() * d);
    for hv in atoms {
        first.check_same_space(hv)?;
        cols.extend_from_slice(hv.as_real().ok_or_else(|| HvError::SpaceMismatch {
            expected: "real".into(),
            found: space.kind.name().into(),
        })?);
    }
    let a = DMatrix::from_column_slice(d, atoms.len(), &cols);
    let pinv = a.pseudo_inverse(1e-12).map_err(|_| HvError::NotInvertible)?;
    (0..atoms.len())
        .map(|i| Hypervector::from_real(space, pinv.row(i).iter().copied().collect()))
        .collect()
}
