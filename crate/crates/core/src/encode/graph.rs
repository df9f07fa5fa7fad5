use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::memory::ItemMemory;
use crate::model::{cdt, Model, ModelKind, Permutation, PermutationSpec};
use crate::space::{Hypervector, RngStream};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: String,
    pub v: String,
    #[serde(default)]
    pub directed: bool,
}

impl Edge {
    pub fn undirected(u: impl Into<String>, v: impl Into<String>) -> Self {
        Self {
            u: u.into(),
            v: v.into(),
            directed: false,
        }
    }

    pub fn directed(u: impl Into<String>, v: impl Into<String>) -> Self {
        Self {
            u: u.into(),
            v: v.into(),
            directed: true,
        }
    }
}

/// Σ bind(u, v) over undirected edges and Σ bind(u, ρ(v)) over directed ones.
pub fn encode_graph(model: &Model, nodes: &ItemMemory, edges: &[Edge]) -> Result<Hypervector> {
    if edges.is_empty() {
        return Err(HvError::EmptyInput);
    }
    let rho = model.rho();
    let mut acc = model.accumulator();
    for e in edges {
        if e.u == e.v {
            return Err(HvError::SelfLoop(e.u.clone()));
        }
        let u = nodes.require(&e.u)?;
        let v = nodes.require(&e.v)?;
        let term = if e.directed {
            model.bind(u, &model.permute(v, &rho)?)?
        } else {
            model.bind(u, v)?
        };
        acc.add(&term)?;
    }
    acc.finish(model.default_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationStyle {
    /// ⟨pred + ⟨Σ args⟩ + Σ bind(roleᵢ, argᵢ)⟩.
    RoleFiller,
    /// ⟨pred ∨ ⟨role₁ ∨ arg₁⟩ ∨ …⟩ with ⟨·⟩ the context-dependent thinning.
    SbdrCdt,
    /// ⟨pred + Σ args + Σ ρ_roleᵢ(argᵢ)⟩.
    PermutationRoles,
}

/// A predicate with ordered argument roles. Predicate and role vectors are
/// looked up by name in a lexicon memory; permutation roles are seeded by
/// role name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSchema {
    pub predicate: String,
    pub roles: Vec<String>,
    pub style: RelationStyle,
    /// Seed of the per-role permutations of the permutation style.
    #[serde(default)]
    pub seed: u64,
}

impl RelationSchema {
    pub fn new<S: Into<String>>(predicate: impl Into<String>, roles: impl IntoIterator<Item = S>, style: RelationStyle) -> Result<Self> {
        let roles: Vec<String> = roles.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        if let Some(dup) = roles.iter().find(|r| !seen.insert(r.as_str())) {
            return Err(HvError::DuplicateId(dup.clone()));
        }
        Ok(Self {
            predicate: predicate.into(),
            roles,
            style,
            seed: 0,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn arity(&self) -> usize {
        self.roles.len()
    }

    /// ρ for the role at `index` in the permutation style.
    pub fn role_permutation(&self, model: &Model, index: usize) -> PermutationSpec {
        let stream = RngStream::new(self.seed, "relation-role").derive(&self.roles[index]);
        PermutationSpec::new(Permutation::random(model.dim(), &mut stream.rng()), 1)
    }
}

pub fn encode_relation(model: &Model, schema: &RelationSchema, lexicon: &ItemMemory, args: &[&Hypervector]) -> Result<Hypervector> {
    if args.len() != schema.arity() {
        return Err(HvError::LengthMismatch {
            expected: schema.arity(),
            found: args.len(),
        });
    }
    let pred = lexicon.require(&schema.predicate)?;
    if args.is_empty() {
        return Ok(pred.clone());
    }
    let bracket = model.normalizing_norm();
    match schema.style {
        RelationStyle::RoleFiller => {
            let arg_bundle = model.superpose(args.iter().copied(), bracket)?;
            let mut terms = vec![pred.clone(), arg_bundle];
            for (role, arg) in schema.roles.iter().zip(args) {
                terms.push(model.bind(lexicon.require(role)?, arg)?);
            }
            model.superpose(&terms, bracket)
        }
        RelationStyle::PermutationRoles => {
            let mut acc = model.accumulator();
            acc.add(pred)?;
            for arg in args {
                acc.add(arg)?;
            }
            for (i, arg) in args.iter().enumerate() {
                acc.add(&model.permute(arg, &schema.role_permutation(model, i))?)?;
            }
            acc.finish(bracket)
        }
        RelationStyle::SbdrCdt => {
            if model.kind() != ModelKind::Sbdr {
                return Err(HvError::Unsupported {
                    model: model.kind().name().into(),
                    operation: "CDT relation encoding".into(),
                });
            }
            let depth = model.params().depth;
            let pool = model.cdt_pool();
            let mut parts = vec![pred.clone()];
            for (role, arg) in schema.roles.iter().zip(args) {
                parts.push(cdt(&[lexicon.require(role)?, arg], depth, pool)?);
            }
            cdt(&parts.iter().collect::<Vec<_>>(), depth, pool)
        }
    }
}
