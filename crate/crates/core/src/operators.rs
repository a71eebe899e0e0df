//! Carry, remainder and transformant kernels for a single operator firing.
//!
//! All four step forms share one formula set: L, D and F are the (1,1),
//! (1,v) and (w,1) specializations of M. Partial carries come from the
//! operator kind, the common carry is their minimum, operands are reduced to
//! their remainders and every image receives `p · r`.

use std::collections::{BTreeMap, HashMap};
use std::hash::BuildHasher;

use indexmap::IndexMap;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::model::{Cardinal, EntityName, FunctionHook, OperatorKind, OperatorSpec};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("operator {op} not allowed")]
    NotAllowed { op: String },
    #[error("invalid remainder hook {hook}: remainder {remainder} exceeds operand value {value}")]
    InvalidRemainderHook {
        hook: String,
        value: BigUint,
        remainder: BigUint,
    },
    #[error("carry {carry} exceeds what operand value {value} can supply at radix {radix}")]
    CarryTooLarge {
        value: BigUint,
        radix: BigUint,
        carry: BigUint,
    },
    #[error("operator {op}: no cardinal for entity {entity}")]
    MissingCardinal { op: String, entity: EntityName },
}

/// Read access to a cardinal assignment keyed by entity name.
pub trait CardinalLookup {
    fn cardinal(&self, name: &EntityName) -> Option<&Cardinal>;
}

impl<S: BuildHasher> CardinalLookup for HashMap<EntityName, Cardinal, S> {
    fn cardinal(&self, name: &EntityName) -> Option<&Cardinal> {
        self.get(name)
    }
}

impl CardinalLookup for BTreeMap<EntityName, Cardinal> {
    fn cardinal(&self, name: &EntityName) -> Option<&Cardinal> {
        self.get(name)
    }
}

impl<S: BuildHasher> CardinalLookup for IndexMap<EntityName, Cardinal, S> {
    fn cardinal(&self, name: &EntityName) -> Option<&Cardinal> {
        self.get(name)
    }
}

/// Result of one operator firing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorEffect {
    pub op_id: String,
    /// One per operand, in operand order.
    pub partial_carries: Vec<BigUint>,
    pub common_carry: BigUint,
    /// Remainders, one per operand. These replace the operand cardinals.
    pub new_operand_values: Vec<Cardinal>,
    /// One per image; added to the image cardinals.
    pub transformants: Vec<BigUint>,
}

/// Per-operand carry.
pub fn partial_carry(kind: &OperatorKind, value: &BigUint, radix: &BigUint) -> BigUint {
    match kind {
        OperatorKind::RadixMultiplicity => match (value.to_u64(), radix.to_u64()) {
            (Some(v), Some(n)) => BigUint::from(v / n),
            _ => value / radix,
        },
        OperatorKind::RadixExcessValue => {
            if value > radix {
                value - radix
            } else {
                BigUint::zero()
            }
        }
        OperatorKind::RadixExcessFact(_) => {
            if value > radix {
                BigUint::one()
            } else {
                BigUint::zero()
            }
        }
        OperatorKind::ArbitraryFunction(hook) => hook.carry(value, radix),
    }
}

/// What is left in an operand after `carry` conversions were applied.
pub fn remainder(
    kind: &OperatorKind,
    value: &BigUint,
    radix: &BigUint,
    carry: &BigUint,
) -> Result<BigUint, KernelError> {
    match kind {
        OperatorKind::RadixMultiplicity => {
            if let (Some(v), Some(n), Some(p)) = (value.to_u64(), radix.to_u64(), carry.to_u64()) {
                if let Some(used) = p.checked_mul(n).filter(|&used| used <= v) {
                    return Ok(BigUint::from(v - used));
                }
            }
            let used = carry * radix;
            if used > *value {
                return Err(KernelError::CarryTooLarge {
                    value: value.clone(),
                    radix: radix.clone(),
                    carry: carry.clone(),
                });
            }
            Ok(value - used)
        }
        OperatorKind::RadixExcessValue => Ok(BigUint::zero()),
        OperatorKind::RadixExcessFact(hook) => {
            checked_hook(hook.name(), value, hook.call(value, radix, carry))
        }
        OperatorKind::ArbitraryFunction(hook) => {
            checked_hook(hook.name(), value, hook.remainder(value, radix, carry))
        }
    }
}

fn checked_hook(name: &str, value: &BigUint, rem: BigUint) -> Result<BigUint, KernelError> {
    if rem > *value {
        Err(KernelError::InvalidRemainderHook {
            hook: name.to_owned(),
            value: value.clone(),
            remainder: rem,
        })
    } else {
        Ok(rem)
    }
}

/// Minimum of the partial carries.
///
/// # Panics
///
/// If `partials` is empty.
pub fn common_carry<'a>(partials: impl IntoIterator<Item = &'a BigUint>) -> BigUint {
    partials
        .into_iter()
        .min()
        .cloned()
        .expect("common carry of an operator with no operands")
}

/// Whether a single operand can contribute at least one carry.
pub(crate) fn operand_allows(kind: &OperatorKind, value: &BigUint, radix: &BigUint) -> bool {
    match kind {
        OperatorKind::RadixMultiplicity => value >= radix,
        OperatorKind::RadixExcessValue | OperatorKind::RadixExcessFact(_) => value > radix,
        OperatorKind::ArbitraryFunction(hook) => !hook.carry(value, radix).is_zero(),
    }
}

/// True iff the common carry over the operator's operands is at least 1.
/// Operands missing from `cardinals` count as zero.
pub fn is_allowed(op: &OperatorSpec, cardinals: &impl CardinalLookup) -> bool {
    let zero = BigUint::zero();
    !op.operands.is_empty()
        && op.operands.iter().all(|o| {
            let v = cardinals.cardinal(&o.entity).map_or(&zero, Cardinal::value);
            operand_allows(&op.kind, v, &o.radix)
        })
}

/// Evaluates one firing of `op` against a snapshot of cardinals.
pub fn eval_operator(
    op: &OperatorSpec,
    cardinals: &impl CardinalLookup,
) -> Result<OperatorEffect, KernelError> {
    let values = op
        .operands
        .iter()
        .map(|o| {
            cardinals
                .cardinal(&o.entity)
                .map(Cardinal::value)
                .ok_or_else(|| KernelError::MissingCardinal {
                    op: op.id.clone(),
                    entity: o.entity.clone(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    evaluate(op, &values)
}

/// Kernel proper; `values` is aligned with `op.operands`.
/// [`eval_operator`] with the operand values given positionally.
pub fn evaluate(op: &OperatorSpec, values: &[&BigUint]) -> Result<OperatorEffect, KernelError> {
    debug_assert_eq!(values.len(), op.operands.len());
    let partial_carries: Vec<BigUint> = op
        .operands
        .iter()
        .zip(values)
        .map(|(o, v)| partial_carry(&op.kind, v, &o.radix))
        .collect();
    if partial_carries.is_empty() {
        return Err(KernelError::NotAllowed { op: op.id.clone() });
    }
    let p = common_carry(&partial_carries);
    if p.is_zero() {
        return Err(KernelError::NotAllowed { op: op.id.clone() });
    }
    let new_operand_values = op
        .operands
        .iter()
        .zip(values)
        .map(|(o, v)| remainder(&op.kind, v, &o.radix, &p).map(Cardinal::from))
        .collect::<Result<Vec<_>, _>>()?;
    let transformants = op.images.iter().map(|i| &p * &i.rate).collect();
    Ok(OperatorEffect {
        op_id: op.id.clone(),
        partial_carries,
        common_carry: p,
        new_operand_values,
        transformants,
    })
}

/// Arbitrary-function hooks available to the text format by name.
pub fn builtin_functions() -> Vec<FunctionHook> {
    vec![
        // Same arithmetic as radix-multiplicity, routed through the hook path.
        FunctionHook::new("div", |v, n| v / n, |v, n, p| v - p * n),
        // Converts like radix-multiplicity but discards the remainder.
        FunctionHook::new("drain", |v, n| v / n, |_, _, _| BigUint::zero()),
    ]
}
