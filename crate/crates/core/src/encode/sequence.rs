use serde::{Deserialize, Serialize};

use crate::error::{HvError, Result};
use crate::memory::{Cleanup, ItemMemory};
use crate::model::{add, sub, Accumulator, Model, ModelKind, PermutationSpec};
use crate::space::{Hypervector, RngStream};

use super::fpe::FpeBase;
use super::levels::{LevelCodebook, LevelScheme};

/// How position i is marked.
#[derive(Debug, Clone, PartialEq)]
pub enum PositionScheme {
    /// An independent role vector per position.
    Roles(Vec<Hypervector>),
    /// ρ^i applied to the symbol.
    Permutation(PermutationSpec),
    /// Position vectors from a level codebook, so nearby positions are similar.
    Correlated(LevelCodebook),
    /// Powers p^i of one base vector (trajectory association).
    Trajectory(Hypervector),
}

impl PositionScheme {
    pub fn roles(model: &Model, max_len: usize, stream: &RngStream) -> Self {
        PositionScheme::Roles((0..max_len).map(|i| model.random(&stream.at(i as u64))).collect())
    }

    pub fn permutation(model: &Model) -> Self {
        PositionScheme::Permutation(model.rho())
    }

    pub fn correlated(model: &Model, max_len: usize, stream: &RngStream) -> Result<Self> {
        let hi = (max_len.max(2) - 1) as f64;
        let cb = LevelCodebook::build(*model.space(), max_len.max(2), LevelScheme::Concatenation, 0.0, hi, stream)?;
        Ok(PositionScheme::Correlated(cb))
    }

    /// Base vector for trajectory association. HRR uses a unitary base so
    /// its powers neither grow nor vanish.
    pub fn trajectory(model: &Model, stream: &RngStream) -> Result<Self> {
        let base = match model.kind() {
            ModelKind::Hrr => FpeBase::new(*model.space(), 1.0, stream)?.base(),
            ModelKind::Fhrr | ModelKind::Mcr | ModelKind::Cgr => model.random(stream),
            _ => return Err(trajectory_unsupported(model)),
        };
        Ok(PositionScheme::Trajectory(base))
    }

    pub fn name(&self) -> &'static str {
        match self {
            PositionScheme::Roles(_) => "roles",
            PositionScheme::Permutation(_) => "permutation",
            PositionScheme::Correlated(_) => "correlated",
            PositionScheme::Trajectory(_) => "trajectory",
        }
    }
}

fn trajectory_unsupported(model: &Model) -> HvError {
    HvError::Unsupported {
        model: model.kind().name().into(),
        operation: "trajectory association (needs binding that is not self-inverse)".into(),
    }
}

/// How the position-marked terms are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Composition {
    /// Σ pos_i(symbol_i).
    Superpose,
    /// ∏ pos_i(symbol_i); distinct sequences become quasi-orthogonal.
    Bind,
    /// Bag of symbols plus the superposed ordered form, in one sum.
    Hybrid,
}

/// Sequence encoder over a symbol memory.
#[derive(Debug, Clone)]
pub struct SequenceCodec<'a> {
    model: &'a Model,
    memory: &'a ItemMemory,
    positions: PositionScheme,
    composition: Composition,
}

impl<'a> SequenceCodec<'a> {
    pub fn new(model: &'a Model, memory: &'a ItemMemory, positions: PositionScheme, composition: Composition) -> Result<Self> {
        if memory.space() != model.space() {
            return Err(HvError::SpaceMismatch {
                expected: model.space().to_string(),
                found: memory.space().to_string(),
            });
        }
        if matches!(positions, PositionScheme::Trajectory(_))
            && !matches!(model.kind(), ModelKind::Hrr | ModelKind::Fhrr | ModelKind::Mcr | ModelKind::Cgr)
        {
            return Err(trajectory_unsupported(model));
        }
        Ok(Self {
            model,
            memory,
            positions,
            composition,
        })
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    pub fn memory(&self) -> &ItemMemory {
        self.memory
    }

    pub fn positions(&self) -> &PositionScheme {
        &self.positions
    }

    pub fn composition(&self) -> Composition {
        self.composition
    }

    /// Position vector p^i for trajectory association.
    fn trajectory_power(&self, base: &Hypervector, i: usize) -> Result<Hypervector> {
        let mut p = self.model.identity()?;
        for _ in 0..i {
            p = self.model.bind(&p, base)?;
        }
        Ok(p)
    }

    /// The position-marked term for symbol `hv` at position `i`.
    pub fn term(&self, i: usize, hv: &Hypervector) -> Result<Hypervector> {
        match &self.positions {
            PositionScheme::Roles(roles) => {
                let role = roles.get(i).ok_or(HvError::OutOfRange {
                    value: i as f64,
                    lo: 0.0,
                    hi: roles.len() as f64 - 1.0,
                })?;
                self.model.bind(role, hv)
            }
            PositionScheme::Permutation(rho) => self.model.permute(hv, &rho.pow(i as i64)),
            PositionScheme::Correlated(cb) => self.model.bind(cb.level(i)?, hv),
            PositionScheme::Trajectory(base) => self.model.bind(&self.trajectory_power(base, i)?, hv),
        }
    }

    /// Removes the position marker of position `i` from `s`.
    pub fn unmark(&self, s: &Hypervector, i: usize) -> Result<Hypervector> {
        match &self.positions {
            PositionScheme::Roles(roles) => {
                let role = roles.get(i).ok_or(HvError::OutOfRange {
                    value: i as f64,
                    lo: 0.0,
                    hi: roles.len() as f64 - 1.0,
                })?;
                self.model.unbind(s, role)
            }
            PositionScheme::Permutation(rho) => self.model.permute(s, &rho.pow(-(i as i64))),
            PositionScheme::Correlated(cb) => self.model.unbind(s, cb.level(i)?),
            PositionScheme::Trajectory(base) => self.model.unbind(s, &self.trajectory_power(base, i)?),
        }
    }

    pub fn builder(&self) -> SequenceBuilder<'_, 'a> {
        SequenceBuilder {
            codec: self,
            acc: self.model.accumulator(),
            product: None,
            power: None,
            len: 0,
        }
    }

    /// Encodes a sequence of symbol identifiers.
    pub fn encode<S: AsRef<str>>(&self, ids: &[S]) -> Result<Hypervector> {
        let mut b = self.builder();
        for id in ids {
            b.push_id(id.as_ref())?;
        }
        b.finish()
    }

    /// Encodes a sequence of symbol vectors directly.
    pub fn encode_vectors(&self, symbols: &[&Hypervector]) -> Result<Hypervector> {
        let mut b = self.builder();
        for hv in symbols {
            b.push(hv)?;
        }
        b.finish()
    }

    /// Recovers the symbol at position `i` of a superposed or hybrid encoding.
    pub fn decode_position(&self, s: &Hypervector, i: usize) -> Result<Cleanup> {
        if self.composition == Composition::Bind {
            return Err(HvError::Unsupported {
                model: self.model.kind().name().into(),
                operation: "position decoding of bound sequences".into(),
            });
        }
        self.memory.cleanup(&self.unmark(s, i)?)
    }
}

/// Incremental sequence encoding: each push costs one term regardless of
/// the current length.
#[derive(Debug, Clone)]
pub struct SequenceBuilder<'c, 'a> {
    codec: &'c SequenceCodec<'a>,
    acc: Accumulator<'a>,
    product: Option<Hypervector>,
    /// Running trajectory power p^len.
    power: Option<Hypervector>,
    len: usize,
}

impl SequenceBuilder<'_, '_> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push_id(&mut self, id: &str) -> Result<()> {
        let hv = self.codec.memory.require(id)?.clone();
        self.push(&hv)
    }

    /// Appends a symbol at position `len`.
    pub fn push(&mut self, hv: &Hypervector) -> Result<()> {
        let model = self.codec.model;
        let term = match &self.codec.positions {
            PositionScheme::Trajectory(base) => {
                let next = match &self.power {
                    None => model.identity()?,
                    Some(p) => model.bind(p, base)?,
                };
                let t = model.bind(&next, hv)?;
                self.power = Some(next);
                t
            }
            _ => self.codec.term(self.len, hv)?,
        };
        match self.codec.composition {
            Composition::Superpose => self.acc.add(&term)?,
            Composition::Hybrid => {
                self.acc.add(hv)?;
                self.acc.add(&term)?;
            }
            Composition::Bind => {
                self.product = Some(match &self.product {
                    None => term,
                    Some(p) => model.bind(p, &term)?,
                });
            }
        }
        self.len += 1;
        Ok(())
    }

    pub fn finish(&self) -> Result<Hypervector> {
        match self.codec.composition {
            Composition::Bind => self.product.clone().ok_or(HvError::EmptyInput),
            _ => self.acc.finish(self.codec.model.default_norm()),
        }
    }
}

fn require_linear(model: &Model, op: &str) -> Result<()> {
    if model.supports_linear_bundles() {
        Ok(())
    } else {
        Err(HvError::Unsupported {
            model: model.kind().name().into(),
            operation: op.into(),
        })
    }
}

/// ρ(stack) + item. The empty stack is the zero vector.
pub fn stack_push(model: &Model, stack: &Hypervector, item: &Hypervector) -> Result<Hypervector> {
    require_linear(model, "stack")?;
    add(&model.permute(stack, &model.rho())?, item)
}

/// Cleans up the top element and returns it with the remaining stack
/// ρ⁻¹(stack − top).
pub fn stack_pop(model: &Model, stack: &Hypervector, memory: &ItemMemory) -> Result<(Cleanup, Hypervector)> {
    require_linear(model, "stack")?;
    if stack.is_zero() {
        return Err(HvError::EmptyStack);
    }
    let top = memory.cleanup(stack)?;
    let rest = sub(stack, &memory.vectors()[top.index])?;
    let rest = model.permute(&rest, &model.rho().inverse())?;
    Ok((top, rest))
}
