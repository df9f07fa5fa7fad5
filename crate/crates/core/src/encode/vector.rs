use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::model::{Model, PermutationSpec};
use crate::space::{Bits, Components, Hypervector, RngStream, SpaceSpec};

use super::levels::LevelCodebook;

/// Component identities for compositional vector encoding.
#[derive(Debug, Clone, PartialEq)]
pub enum RoleSet {
    /// One independent role vector per component.
    Vectors(Vec<Hypervector>),
    /// Component i is marked by ρ^i.
    Powers(PermutationSpec),
}

impl RoleSet {
    /// `n` independent roles drawn from `stream`.
    pub fn random(model: &Model, n: usize, stream: &RngStream) -> Self {
        RoleSet::Vectors((0..n).map(|i| model.random(&stream.at(i as u64))).collect())
    }

    fn apply(&self, model: &Model, i: usize, filler: &Hypervector) -> Result<Hypervector> {
        match self {
            RoleSet::Vectors(roles) => {
                let role = roles.get(i).ok_or(HvError::LengthMismatch {
                    expected: roles.len(),
                    found: i + 1,
                })?;
                model.bind(role, filler)
            }
            RoleSet::Powers(rho) => model.permute(filler, &rho.pow(i as i64)),
        }
    }
}

/// Σᵢ bind(roleᵢ, level(vᵢ)) under the model's default normalization.
pub fn encode_vector_compositional(model: &Model, values: &[f64], codebook: &LevelCodebook, roles: &RoleSet) -> Result<Hypervector> {
    if let RoleSet::Vectors(r) = roles {
        if r.len() != values.len() {
            return Err(HvError::LengthMismatch {
                expected: r.len(),
                found: values.len(),
            });
        }
    }
    if values.is_empty() {
        return Err(HvError::EmptyInput);
    }
    let mut acc = model.accumulator();
    for (i, &x) in values.iter().enumerate() {
        acc.add(&roles.apply(model, i, codebook.encode(x)?)?)?;
    }
    acc.finish(model.default_norm())
}

/// Distribution of random projection entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum EntryKind {
    Gaussian,
    Bipolar,
    /// ±1 with total probability `density`, 0 otherwise.
    TernarySparse {
        density: f64,
    },
}

/// Post-processing of the projected vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PostProcess {
    None,
    /// 1 where the value exceeds the threshold; output is dense binary.
    Binarize {
        threshold: f64,
    },
    /// -1 below `lo`, +1 above `hi`, 0 between; output stays real.
    Ternarize {
        lo: f64,
        hi: f64,
    },
}

/// One projection matrix (output dim × input dim).
#[derive(Debug, Clone, PartialEq)]
pub struct RpMatrix {
    pub kind: Option<EntryKind>,
    pub matrix: DMatrix<f64>,
}

impl RpMatrix {
    /// Random matrix with entries scaled so that expected squared norms are preserved.
    pub fn random(rows: usize, cols: usize, kind: EntryKind, stream: &RngStream) -> Result<Self> {
        let mut rng = stream.rng();
        let scale = 1.0 / (rows as f64).sqrt();
        let matrix = match kind {
            EntryKind::Gaussian => DMatrix::from_fn(rows, cols, |_, _| scale * rng.sample::<f64, _>(StandardNormal)),
            EntryKind::Bipolar => DMatrix::from_fn(rows, cols, |_, _| if rng.random::<bool>() { scale } else { -scale }),
            EntryKind::TernarySparse { density } => {
                if !(density > 0.0 && density <= 1.0) {
                    return Err(HvError::InvalidParameter(format!("ternary density {density} outside (0, 1]")));
                }
                let s = scale / density.sqrt();
                DMatrix::from_fn(rows, cols, |_, _| {
                    let u: f64 = rng.random();
                    if u < density / 2.0 {
                        s
                    } else if u < density {
                        -s
                    } else {
                        0.0
                    }
                })
            }
        };
        Ok(Self { kind: Some(kind), matrix })
    }

    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        Self { kind: None, matrix }
    }
}

/// z = post(Σ λᵢ Rᵢ x).
#[derive(Debug, Clone, PartialEq)]
pub struct RpSpec {
    matrices: Vec<RpMatrix>,
    weights: Vec<f64>,
    post: PostProcess,
}

impl RpSpec {
    pub fn new(matrices: Vec<RpMatrix>, weights: Vec<f64>, post: PostProcess) -> Result<Self> {
        let first = matrices.first().ok_or(HvError::EmptyInput)?;
        let shape = first.matrix.shape();
        if let Some(m) = matrices.iter().find(|m| m.matrix.shape() != shape) {
            return Err(HvError::InvalidParameter(format!(
                "projection shapes differ: {:?} vs {:?}",
                shape,
                m.matrix.shape()
            )));
        }
        if weights.len() != matrices.len() {
            return Err(HvError::LengthMismatch {
                expected: matrices.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(HvError::NonFinite("projection weight".into()));
        }
        Ok(Self { matrices, weights, post })
    }

    /// One random matrix with unit weight.
    pub fn single(out_dim: usize, in_dim: usize, kind: EntryKind, post: PostProcess, stream: &RngStream) -> Result<Self> {
        Self::new(vec![RpMatrix::random(out_dim, in_dim, kind, stream)?], vec![1.0], post)
    }

    pub fn out_dim(&self) -> usize {
        self.matrices[0].matrix.nrows()
    }

    pub fn in_dim(&self) -> usize {
        self.matrices[0].matrix.ncols()
    }

    pub fn post(&self) -> PostProcess {
        self.post
    }

    /// Space of the encoded vectors.
    pub fn output_space(&self) -> Result<SpaceSpec> {
        match self.post {
            PostProcess::Binarize { .. } => SpaceSpec::dense_binary(self.out_dim()),
            _ => SpaceSpec::real(self.out_dim()),
        }
    }
}

pub fn encode_vector_rp(values: &[f64], spec: &RpSpec) -> Result<Hypervector> {
    if values.len() != spec.in_dim() {
        return Err(HvError::LengthMismatch {
            expected: spec.in_dim(),
            found: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(HvError::NonFinite("projection input".into()));
    }
    let x = DVector::from_column_slice(values);
    let mut z = DVector::zeros(spec.out_dim());
    for (m, &w) in spec.matrices.iter().zip(&spec.weights) {
        z += (&m.matrix * &x) * w;
    }
    let space = spec.output_space()?;
    let data = match spec.post {
        PostProcess::None => Components::Real(z.iter().copied().collect()),
        PostProcess::Binarize { threshold } => Components::Binary(Bits::from_bools(z.iter().map(|&v| v > threshold))),
        PostProcess::Ternarize { lo, hi } => Components::Real(
            z.iter()
                .map(|&v| {
                    if v > hi {
                        1.0
                    } else if v < lo {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect(),
        ),
    };
    Hypervector::new(space, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::LevelScheme;
    use crate::space::{similarity, Metric};

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        cov / (vx * vy).sqrt()
    }

    fn preservation(kind: EntryKind) -> f64 {
        let spec = RpSpec::single(1024, 50, kind, PostProcess::None, &RngStream::new(1, "rp")).unwrap();
        let mut rng = RngStream::new(2, "inputs").rng();
        // inputs share a random common component so input similarities spread out
        let common: Vec<f64> = (0..50).map(|_| rng.sample(StandardNormal)).collect();
        let inputs: Vec<Vec<f64>> = (0..100)
            .map(|_| {
                let w: f64 = rng.random_range(0.0..2.0);
                common.iter().map(|c| w * c + rng.sample::<f64, _>(StandardNormal)).collect()
            })
            .collect();
        let outputs: Vec<Hypervector> = inputs.iter().map(|x| encode_vector_rp(x, &spec).unwrap()).collect();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for i in 0..100 {
            for j in i + 1..100 {
                a.push(cosine(&inputs[i], &inputs[j]));
                b.push(similarity(Metric::Cosine, &outputs[i], &outputs[j]).unwrap());
            }
        }
        pearson(&a, &b)
    }

    #[test]
    fn identity_projection_returns_input() {
        let spec = RpSpec::new(vec![RpMatrix::from_matrix(DMatrix::identity(4, 4))], vec![1.0], PostProcess::None).unwrap();
        let z = encode_vector_rp(&[1.0, -2.0, 0.5, 3.0], &spec).unwrap();
        assert_eq!(z.as_real().unwrap(), &[1.0, -2.0, 0.5, 3.0]);
        assert!(encode_vector_rp(&[1.0], &spec).is_err());
    }

    #[test]
    fn projection_preserves_similarity() {
        assert!(preservation(EntryKind::Gaussian) >= 0.95);
        assert!(preservation(EntryKind::Bipolar) >= 0.95);
        assert!(preservation(EntryKind::TernarySparse { density: 0.1 }) >= 0.9);
    }

    #[test]
    fn weighted_and_thresholded_variants() {
        let eye = DMatrix::identity(3, 3);
        let spec = RpSpec::new(
            vec![RpMatrix::from_matrix(eye.clone()), RpMatrix::from_matrix(eye * 2.0)],
            vec![1.0, 0.5],
            PostProcess::Ternarize { lo: -1.0, hi: 1.0 },
        )
        .unwrap();
        let z = encode_vector_rp(&[0.3, -0.9, 2.0], &spec).unwrap();
        assert_eq!(z.as_real().unwrap(), &[0.0, -1.0, 1.0]);
        let bin = RpSpec::new(
            vec![RpMatrix::from_matrix(DMatrix::identity(3, 3))],
            vec![1.0],
            PostProcess::Binarize { threshold: 0.0 },
        )
        .unwrap();
        assert_eq!(
            encode_vector_rp(&[0.3, -0.9, 2.0], &bin).unwrap().to_binary_vec().unwrap(),
            vec![1, 0, 1]
        );
        assert!(RpSpec::new(
            vec![RpMatrix::from_matrix(DMatrix::identity(2, 2))],
            vec![f64::NAN],
            PostProcess::None
        )
        .is_err());
    }

    #[test]
    fn compositional_one_dimensional_reduces_to_bound_scalar() {
        let m = Model::map(256, &RngStream::new(3, "m")).unwrap();
        let cb = LevelCodebook::build(*m.space(), 5, LevelScheme::Concatenation, 0.0, 1.0, &RngStream::new(3, "cb")).unwrap();
        let roles = RoleSet::random(&m, 1, &RngStream::new(3, "roles"));
        let z = encode_vector_compositional(&m, &[0.5], &cb, &roles).unwrap();
        let RoleSet::Vectors(r) = &roles else { unreachable!() };
        assert_eq!(z, m.bind(&r[0], cb.encode(0.5).unwrap()).unwrap());
        assert!(matches!(
            encode_vector_compositional(&m, &[0.5, 0.1], &cb, &roles),
            Err(HvError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn compositional_similarity_orders_by_shared_components() {
        for seed in 0..100 {
            let m = Model::map(4096, &RngStream::new(seed, "m")).unwrap();
            let cb = LevelCodebook::build(*m.space(), 8, LevelScheme::Concatenation, 0.0, 1.0, &RngStream::new(seed, "cb")).unwrap();
            let roles = RoleSet::random(&m, 4, &RngStream::new(seed, "roles"));
            let base = encode_vector_compositional(&m, &[0.0, 0.2, 0.4, 0.6], &cb, &roles).unwrap();
            let one = encode_vector_compositional(&m, &[1.0, 0.2, 0.4, 0.6], &cb, &roles).unwrap();
            let all = encode_vector_compositional(&m, &[1.0, 1.0, 0.0, 0.0], &cb, &roles).unwrap();
            let s1 = similarity(Metric::Cosine, &base, &one).unwrap();
            let s2 = similarity(Metric::Cosine, &base, &all).unwrap();
            assert!(s1 > s2, "seed {seed}: {s1} <= {s2}");
        }
    }

    #[test]
    fn equal_values_under_distinct_roles_are_quasi_orthogonal() {
        let m = Model::map(4096, &RngStream::new(4, "m")).unwrap();
        let cb = LevelCodebook::build(*m.space(), 8, LevelScheme::Concatenation, 0.0, 1.0, &RngStream::new(4, "cb")).unwrap();
        for roles in [RoleSet::random(&m, 2, &RngStream::new(4, "roles")), RoleSet::Powers(m.rho())] {
            let a = roles.apply(&m, 0, cb.encode(0.3).unwrap()).unwrap();
            let b = roles.apply(&m, 1, cb.encode(0.3).unwrap()).unwrap();
            assert!(similarity(Metric::Cosine, &a, &b).unwrap().abs() < 0.1);
        }
    }
}
