//! Sparse binary binding: conjunction and additive context-dependent thinning.

use crate::error::{HvError, Result};
use crate::space::{Bits, Hypervector, SpaceKind};

use super::permutation::{permute, PermutationSpec};

fn require_sparse(inputs: &[&Hypervector]) -> Result<()> {
    let first = inputs.first().ok_or(HvError::EmptyInput)?;
    if !matches!(first.space().kind, SpaceKind::SparseBinary { .. }) {
        return Err(HvError::SpaceMismatch {
            expected: "sparse-binary".into(),
            found: first.space().kind.name().into(),
        });
    }
    for hv in &inputs[1..] {
        first.check_same_space(hv)?;
    }
    Ok(())
}

fn disjunction_bits(inputs: &[&Hypervector]) -> Bits {
    let mut acc = inputs[0].as_bits().expect("binary").clone();
    for hv in &inputs[1..] {
        acc = acc.or(hv.as_bits().expect("binary"));
    }
    acc
}

/// Component-wise OR of sparse binary vectors.
pub fn disjunction(inputs: &[&Hypervector]) -> Result<Hypervector> {
    require_sparse(inputs)?;
    Ok(Hypervector::from_parts(
        *inputs[0].space(),
        crate::space::Components::Binary(disjunction_bits(inputs)),
    ))
}

/// Conjunction binding together with a flag raised when the result has no
/// active components left.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjunction {
    pub hv: Hypervector,
    pub underflow: bool,
}

/// Component-wise AND of two or more sparse binary vectors.
pub fn conj_disj_bind(inputs: &[&Hypervector]) -> Result<Conjunction> {
    require_sparse(inputs)?;
    if inputs.len() < 2 {
        return Err(HvError::InvalidParameter("conjunction needs at least two inputs".into()));
    }
    let mut acc = inputs[0].as_bits().expect("binary").clone();
    for hv in &inputs[1..] {
        acc = acc.and(hv.as_bits().expect("binary"));
    }
    let underflow = acc.count_ones() == 0;
    Ok(Conjunction {
        hv: Hypervector::from_parts(*inputs[0].space(), crate::space::Components::Binary(acc)),
        underflow,
    })
}

/// Additive context-dependent thinning: z ∧ (ρ₁(z) ∨ … ∨ ρ_T(z)) with z the
/// disjunction of the inputs.
pub fn cdt(inputs: &[&Hypervector], depth: usize, pool: &[PermutationSpec]) -> Result<Hypervector> {
    require_sparse(inputs)?;
    if depth == 0 {
        return Err(HvError::InvalidParameter("thinning depth must be at least 1".into()));
    }
    if pool.len() < depth {
        return Err(HvError::InvalidParameter(format!(
            "thinning depth {depth} exceeds permutation pool of {}",
            pool.len()
        )));
    }
    let z = disjunction(inputs)?;
    let zb = z.as_bits().expect("binary");
    let mut mask = Bits::zeros(z.dim());
    for rho in &pool[..depth] {
        mask = mask.or(permute(&z, rho)?.as_bits().expect("binary"));
    }
    Ok(Hypervector::from_parts(*z.space(), crate::space::Components::Binary(zb.and(&mask))))
}
