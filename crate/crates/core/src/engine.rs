//! Complete cardinal semantic transformations: repeated steps over every
//! allowed operator until no operator can fire.
//!
//! A step under [`Scheduler::Synchronous`] evaluates all allowed operators
//! against the step-start snapshot and applies the effects jointly. The
//! sequential schedulers fire operators one at a time against the live
//! state; they exist so that scheduler independence of the final state can
//! be checked.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Cao, Cardinal, EntityName, Multicardinal, Multinumber};
use crate::operators::{self, KernelError, OperatorEffect};
use crate::topology::{self, Cycle};

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

/// Cardinals keyed by entity, in declaration order.
pub type CardinalMap = IndexMap<EntityName, Cardinal>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Scheduler {
    #[default]
    Synchronous,
    SequentialDeclared,
    /// Sequential in a per-step pseudo-random order derived from the seed.
    SequentialPermuted(u64),
}

impl Scheduler {
    /// Visiting order for step `tau`; `None` for the synchronous scheduler.
    pub fn order(&self, operator_count: usize, tau: usize) -> Option<Vec<usize>> {
        match *self {
            Scheduler::Synchronous => None,
            Scheduler::SequentialDeclared => Some((0..operator_count).collect()),
            Scheduler::SequentialPermuted(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(tau as u64);
                let mut order: Vec<usize> = (0..operator_count).collect();
                order.shuffle(&mut rng);
                Some(order)
            }
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheduler::Synchronous => f.write_str("sync"),
            Scheduler::SequentialDeclared => f.write_str("seq"),
            Scheduler::SequentialPermuted(seed) => write!(f, "perm:{seed}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown scheduler {0:?}; expected sync, seq or perm:SEED")]
pub struct ParseSchedulerError(String);

impl FromStr for Scheduler {
    type Err = ParseSchedulerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sync" => Ok(Scheduler::Synchronous),
            "seq" => Ok(Scheduler::SequentialDeclared),
            _ => s
                .strip_prefix("perm:")
                .and_then(|seed| seed.parse().ok())
                .map(Scheduler::SequentialPermuted)
                .ok_or_else(|| ParseSchedulerError(s.to_owned())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    /// 1-based: the first step of a run has index 1.
    pub step_index: usize,
    /// Effects in firing order.
    pub fired: Vec<OperatorEffect>,
    /// Aligned with the CAO's entity order.
    pub cardinals_after: Vec<Cardinal>,
}

impl StepRecord {
    pub fn cardinal_map(&self, cao: &Cao) -> CardinalMap {
        cao.entities()
            .iter()
            .cloned()
            .zip(self.cardinals_after.iter().cloned())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Terminated,
    BudgetExhausted,
}

impl RunStatus {
    pub fn label(self) -> &'static str {
        match self {
            RunStatus::Terminated => "terminated",
            RunStatus::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult<'a> {
    pub scheduler: Scheduler,
    pub initial: Multinumber<'a>,
    pub final_state: Multinumber<'a>,
    pub final_multicardinal: Multicardinal,
    /// Number of steps taken, the length ω of the transformation.
    pub length: usize,
    pub trace: Vec<StepRecord>,
    pub status: RunStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("no operator allowed")]
    NoOperatorAllowed,
    #[error("CAO {0} contains non-transforming operators and cannot be executed")]
    NotExecutable(String),
    #[error("max_steps must be at least 1")]
    ZeroBudget,
    #[error("no cardinal given for entity {0}")]
    MissingCardinal(EntityName),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Every entity mapped to zero.
pub fn reset(cao: &Cao) -> CardinalMap {
    cao.entities()
        .iter()
        .map(|e| (e.clone(), Cardinal::zero()))
        .collect()
}

pub fn multicardinal_of(cardinals: &CardinalMap, tau: usize) -> Multicardinal {
    Multicardinal::from_named(cardinals.clone(), tau)
}

/// Performs step `tau` from `cardinals`.
pub fn step(
    cao: &Cao,
    cardinals: &CardinalMap,
    scheduler: Scheduler,
    tau: usize,
) -> Result<(CardinalMap, StepRecord), EngineError> {
    if !cao.is_executable() {
        return Err(EngineError::NotExecutable(cao.name().to_owned()));
    }
    let mut state = aligned(cao, cardinals)?;
    let record =
        step_in_place(cao, &mut state, scheduler, tau)?.ok_or(EngineError::NoOperatorAllowed)?;
    let map = cao.entities().iter().cloned().zip(state).collect();
    Ok((map, record))
}

fn aligned(cao: &Cao, cardinals: &CardinalMap) -> Result<Vec<Cardinal>, EngineError> {
    cao.entities()
        .iter()
        .map(|e| {
            cardinals
                .get(e)
                .cloned()
                .ok_or_else(|| EngineError::MissingCardinal(e.clone()))
        })
        .collect()
}

fn allowed(cao: &Cao, state: &[Cardinal], op: usize) -> bool {
    let spec = &cao.operators()[op];
    cao.operand_indices(op)
        .iter()
        .zip(&spec.operands)
        .all(|(&e, o)| operators::operand_allows(&spec.kind, state[e].value(), &o.radix))
}

fn fire(cao: &Cao, state: &[Cardinal], op: usize) -> Result<OperatorEffect, KernelError> {
    let values: Vec<&BigUint> = cao
        .operand_indices(op)
        .iter()
        .map(|&e| state[e].value())
        .collect();
    operators::evaluate(&cao.operators()[op], &values)
}

fn apply_remainders(cao: &Cao, state: &mut [Cardinal], op: usize, effect: &OperatorEffect) {
    for (&e, v) in cao
        .operand_indices(op)
        .iter()
        .zip(&effect.new_operand_values)
    {
        state[e] = v.clone();
    }
}

fn apply_transformants(cao: &Cao, state: &mut [Cardinal], op: usize, effect: &OperatorEffect) {
    for (&e, q) in cao.image_indices(op).iter().zip(&effect.transformants) {
        state[e] = &state[e] + q;
    }
}

/// `None` when no operator is allowed (the state is a fixpoint).
fn step_in_place(
    cao: &Cao,
    state: &mut [Cardinal],
    scheduler: Scheduler,
    tau: usize,
) -> Result<Option<StepRecord>, EngineError> {
    let count = cao.operators().len();
    let mut fired = Vec::new();
    match scheduler.order(count, tau) {
        None => {
            let mut effects = Vec::new();
            for op in 0..count {
                if allowed(cao, state, op) {
                    effects.push((op, fire(cao, state, op)?));
                }
            }
            // Each entity feeds at most one operator, so remainders never collide.
            for (op, effect) in &effects {
                apply_remainders(cao, state, *op, effect);
            }
            for (op, effect) in &effects {
                apply_transformants(cao, state, *op, effect);
            }
            fired.extend(effects.into_iter().map(|(_, e)| e));
        }
        Some(order) => {
            for op in order {
                if allowed(cao, state, op) {
                    let effect = fire(cao, state, op)?;
                    apply_remainders(cao, state, op, &effect);
                    apply_transformants(cao, state, op, &effect);
                    fired.push(effect);
                }
            }
        }
    }
    if fired.is_empty() {
        return Ok(None);
    }
    Ok(Some(StepRecord {
        step_index: tau,
        fired,
        cardinals_after: state.to_vec(),
    }))
}

/// Runs from the CAO's initial assignment.
pub fn run(
    cao: &Cao,
    scheduler: Scheduler,
    max_steps: usize,
) -> Result<RunResult<'_>, EngineError> {
    run_state(cao, cao.initial_cardinals(), scheduler, max_steps)
}

/// Runs from an explicit assignment covering every entity.
pub fn run_from<'a>(
    cao: &'a Cao,
    cardinals: &CardinalMap,
    scheduler: Scheduler,
    max_steps: usize,
) -> Result<RunResult<'a>, EngineError> {
    let state = aligned(cao, cardinals)?;
    run_state(cao, state, scheduler, max_steps)
}

fn run_state(
    cao: &Cao,
    mut state: Vec<Cardinal>,
    scheduler: Scheduler,
    max_steps: usize,
) -> Result<RunResult<'_>, EngineError> {
    if max_steps == 0 {
        return Err(EngineError::ZeroBudget);
    }
    if !cao.is_executable() {
        return Err(EngineError::NotExecutable(cao.name().to_owned()));
    }
    let initial = Multinumber::new(cao, state.clone(), 0);
    let mut trace = Vec::new();
    let mut status = RunStatus::Terminated;
    loop {
        if trace.len() == max_steps {
            // Budget spent; still a fixpoint if nothing can fire.
            if (0..cao.operators().len()).any(|op| allowed(cao, &state, op)) {
                status = RunStatus::BudgetExhausted;
            }
            break;
        }
        match step_in_place(cao, &mut state, scheduler, trace.len() + 1)? {
            Some(record) => trace.push(record),
            None => break,
        }
    }
    let length = trace.len();
    let final_state = Multinumber::new(cao, state, length);
    Ok(RunResult {
        scheduler,
        initial,
        final_multicardinal: final_state.multicardinal(),
        final_state,
        length,
        trace,
        status,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfluenceError {
    #[error("confluence is only defined for acyclic CAOs; found cycle {0}")]
    Cyclic(Cycle),
    #[error("inconclusive: run under {0} exhausted its step budget")]
    Inconclusive(Scheduler),
    #[error("no schedulers given")]
    NoSchedulers,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Debug)]
pub struct ConfluenceReport<'a> {
    pub confluent: bool,
    /// First run and the first run whose final cardinals differ from it.
    pub witness: Option<(RunResult<'a>, RunResult<'a>)>,
    pub lengths: Vec<(Scheduler, usize)>,
}

/// Runs the CAO under every scheduler and compares final cardinal maps.
pub fn confluence_check<'a>(
    cao: &'a Cao,
    schedulers: &[Scheduler],
    max_steps: usize,
) -> Result<ConfluenceReport<'a>, ConfluenceError> {
    if let Some(cycle) = topology::detect_cycles(cao).into_iter().next() {
        return Err(ConfluenceError::Cyclic(cycle));
    }
    let mut runs = Vec::with_capacity(schedulers.len());
    for &s in schedulers {
        let r = run(cao, s, max_steps)?;
        if r.status != RunStatus::Terminated {
            return Err(ConfluenceError::Inconclusive(s));
        }
        runs.push(r);
    }
    let lengths = runs.iter().map(|r| (r.scheduler, r.length)).collect();
    let mut runs = runs.into_iter();
    let first = runs.next().ok_or(ConfluenceError::NoSchedulers)?;
    for other in runs {
        if other.final_state.cardinals != first.final_state.cardinals {
            return Ok(ConfluenceReport {
                confluent: false,
                witness: Some((first, other)),
                lengths,
            });
        }
    }
    Ok(ConfluenceReport {
        confluent: true,
        witness: None,
        lengths,
    })
}
