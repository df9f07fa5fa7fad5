//! Encoders from structured data to hypervectors.

mod fpe;
mod graph;
mod image;
mod levels;
mod sequence;
mod text;
mod vector;

pub use fpe::FpeBase;
pub use graph::{encode_graph, encode_relation, Edge, RelationSchema, RelationStyle};
pub use image::{Image, ImageEncoder, ImageMode, PositionCoding};
pub use levels::{LevelCodebook, LevelScheme};
pub use sequence::{stack_pop, stack_push, Composition, PositionScheme, SequenceBuilder, SequenceCodec};
pub use text::{encode_ngram, encode_ngram_stats, ngram, symbol_memory, NgramScheme, Tokenizer};
pub use vector::{encode_vector_compositional, encode_vector_rp, EntryKind, PostProcess, RoleSet, RpMatrix, RpSpec};

use crate::error::{HvError, Result};
use crate::model::{Model, PermutationSpec};
use crate::space::Hypervector;

/// A role in a role-filler pair: either a vector bound multiplicatively or a
/// permutation applied to the filler.
#[derive(Debug, Clone, Copy)]
pub enum Role<'a> {
    Vector(&'a Hypervector),
    Permutation(&'a PermutationSpec),
}

impl Role<'_> {
    pub(crate) fn apply(&self, model: &Model, filler: &Hypervector) -> Result<Hypervector> {
        match self {
            Role::Vector(r) => model.bind(r, filler),
            Role::Permutation(p) => model.permute(filler, p),
        }
    }
}

/// Superposition of the members with the model's default normalization.
/// Repeated members are counted with multiplicity.
pub fn encode_set(model: &Model, members: &[&Hypervector]) -> Result<Hypervector> {
    if members.is_empty() {
        return Err(HvError::EmptyInput);
    }
    model.bundle(members.iter().copied())
}

/// Σ bind(roleᵢ, fillerᵢ). Roles should be mutually quasi-orthogonal; that
/// is the caller's responsibility.
pub fn encode_role_filler(model: &Model, pairs: &[(Role<'_>, &Hypervector)]) -> Result<Hypervector> {
    if pairs.is_empty() {
        return Err(HvError::EmptyInput);
    }
    let mut acc = model.accumulator();
    for (role, filler) in pairs {
        acc.add(&role.apply(model, filler)?)?;
    }
    acc.finish(model.default_norm())
}

/// Binds several vectors into one term, e.g. context ∘ action ∘ result.
pub fn bind_chain(model: &Model, items: &[&Hypervector]) -> Result<Hypervector> {
    model.bind_all(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::ItemMemory;
    use crate::model::{ModelKind, ModelParams};
    use crate::space::{similarity, Metric, RngStream};

    #[test]
    fn singleton_set_is_the_member() {
        for kind in [ModelKind::Bsc, ModelKind::Map, ModelKind::Hrr, ModelKind::Fhrr, ModelKind::Mcr] {
            let m = Model::new(kind, ModelParams::with_dim(128), &RngStream::new(1, "m")).unwrap();
            let a = m.random(&RngStream::new(1, "a"));
            assert_eq!(encode_set(&m, &[&a]).unwrap(), a, "{kind}");
        }
    }

    #[test]
    fn set_of_three_matches_expected_cosine() {
        let m = Model::map(1024, &RngStream::new(2, "m")).unwrap();
        let mem = ItemMemory::symbols(*m.space(), Metric::Cosine, 2, "x", 3).unwrap();
        let v: Vec<&Hypervector> = mem.vectors().iter().collect();
        let s = encode_set(&m, &v).unwrap();
        for member in &v {
            let c = similarity(Metric::Cosine, &s, member).unwrap();
            assert!((c - 1.0 / 3f64.sqrt()).abs() < 0.05, "{c}");
        }
        let shuffled = encode_set(&m, &[v[2], v[0], v[1]]).unwrap();
        assert_eq!(shuffled, s);
        assert_eq!(encode_set(&m, &[]), Err(HvError::EmptyInput));
    }

    #[test]
    fn single_pair_unbinds_exactly() {
        let m = Model::bsc(512, &RngStream::new(3, "m")).unwrap();
        let r = m.random(&RngStream::new(3, "r"));
        let f = m.random(&RngStream::new(3, "f"));
        let s = encode_role_filler(&m, &[(Role::Vector(&r), &f)]).unwrap();
        assert_eq!(s, m.bind(&r, &f).unwrap());
        assert_eq!(m.unbind(&s, &r).unwrap(), f);
    }

    #[test]
    fn permutation_roles_are_accepted() {
        let m = Model::map(256, &RngStream::new(4, "m")).unwrap();
        let f = m.random(&RngStream::new(4, "f"));
        let rho = m.rho().pow(3);
        let s = encode_role_filler(&m, &[(Role::Permutation(&rho), &f)]).unwrap();
        assert_eq!(s, m.permute(&f, &rho).unwrap());
    }

    #[test]
    fn three_way_binding_folds() {
        let m = Model::map(256, &RngStream::new(5, "m")).unwrap();
        let v: Vec<_> = (0..3).map(|i| m.random(&RngStream::new(5, format!("v{i}")))).collect();
        let chained = bind_chain(&m, &[&v[0], &v[1], &v[2]]).unwrap();
        let manual = m.bind(&m.bind(&v[0], &v[1]).unwrap(), &v[2]).unwrap();
        assert_eq!(chained, manual);
    }
}
