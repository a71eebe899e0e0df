//! Random CAO generation shared by the property and acceptance suites.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sns_core::engine::Scheduler;
use sns_core::model::{Cao, OperatorForm, OperatorKind, OperatorSpec};
use sns_core::operators::builtin_functions;

pub const MAX_ENTITIES: usize = 12;
pub const MAX_OPERATORS: usize = 8;
pub const MAX_INIT: u64 = 1_000_000;

/// Synchronous, declared order and five permutation seeds.
pub fn all_schedulers() -> Vec<Scheduler> {
    let mut s = vec![Scheduler::Synchronous, Scheduler::SequentialDeclared];
    s.extend((0..5).map(Scheduler::SequentialPermuted));
    s
}

fn form_for(w: usize, v: usize, rng: &mut impl Rng) -> OperatorForm {
    if rng.gen_bool(0.2) {
        return OperatorForm::M;
    }
    match (w, v) {
        (1, 1) => OperatorForm::L,
        (1, _) => OperatorForm::D,
        (_, 1) => OperatorForm::F,
        _ => OperatorForm::M,
    }
}

/// Any kind with surface syntax; `fn` uses the built-in hooks.
pub fn random_kind(rng: &mut impl Rng) -> OperatorKind {
    match rng.gen_range(0..5) {
        0 => OperatorKind::RadixExcessValue,
        1 => OperatorKind::excess_fact(),
        2 => {
            let hooks = builtin_functions();
            OperatorKind::ArbitraryFunction(hooks.choose(rng).unwrap().clone())
        }
        _ => OperatorKind::RadixMultiplicity,
    }
}

/// A valid acyclic CAO: every edge runs from a lower to a higher entity
/// index, and each entity is an operand of at most one operator. With
/// `kind` unset every operator gets a random kind.
pub fn random_acyclic(rng: &mut impl Rng, kind: Option<&OperatorKind>) -> Cao {
    loop {
        if let Some(cao) = try_random_acyclic(rng, kind) {
            return cao;
        }
    }
}

fn try_random_acyclic(rng: &mut impl Rng, kind: Option<&OperatorKind>) -> Option<Cao> {
    let n_entities = rng.gen_range(2..=MAX_ENTITIES);
    let names: Vec<String> = (0..n_entities).map(|k| format!("e{k}")).collect();
    let mut free: Vec<usize> = (0..n_entities - 1).collect();
    let n_ops = rng.gen_range(1..=MAX_OPERATORS);
    let mut ops = Vec::new();
    let mut written = Vec::new();
    for k in 0..n_ops {
        if free.is_empty() {
            break;
        }
        free.shuffle(rng);
        // Prefer feeding from an entity some earlier operator writes to, so
        // that operators chain instead of all reading initial entities.
        if rng.gen_bool(0.7) {
            if let Some(at) = free.iter().position(|e| written.contains(e)) {
                free.swap(0, at);
            }
        }
        let w = rng.gen_range(1..=3usize).min(free.len());
        let mut operands: Vec<usize> = free.drain(..w).collect();
        operands.sort_unstable();
        let top = *operands.last().unwrap();
        let above: Vec<usize> = (top + 1..n_entities).collect();
        if above.is_empty() {
            free.extend(operands);
            continue;
        }
        let v = rng.gen_range(1..=3usize).min(above.len());
        let images: Vec<usize> = above.choose_multiple(rng, v).copied().collect();
        written.extend(&images);
        let mut rates: Vec<u64> = (0..v).map(|_| rng.gen_range(0..=3)).collect();
        if rates.iter().all(|&r| r == 0) {
            rates[0] = rng.gen_range(1..=3);
        }
        let form = form_for(operands.len(), images.len(), rng);
        let kind = kind.cloned().unwrap_or_else(|| random_kind(rng));
        ops.push(
            OperatorSpec::new(
                format!("o{k}"),
                form,
                operands
                    .iter()
                    .map(|&e| (names[e].as_str(), rng.gen_range(1..=10u64)))
                    .collect::<Vec<_>>(),
                images
                    .iter()
                    .zip(&rates)
                    .map(|(&e, &r)| (names[e].as_str(), r))
                    .collect::<Vec<_>>(),
            )
            .with_kind(kind),
        );
    }
    if ops.is_empty() {
        return None;
    }
    let mut init: Vec<(&str, u64)> = Vec::new();
    for e in &names {
        if rng.gen_bool(0.6) {
            init.push((e.as_str(), rng.gen_range(0..=MAX_INIT)));
        }
    }
    Some(
        Cao::new("random", names.iter().map(String::as_str), ops, init)
            .expect("generator builds valid CAOs"),
    )
}

pub fn random_batch(seed: u64, count: usize, kind: Option<&OperatorKind>) -> Vec<Cao> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_acyclic(&mut rng, kind)).collect()
}
