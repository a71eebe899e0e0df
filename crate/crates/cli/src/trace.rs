//! JSON trace of a run. Integers are decimal strings so that no JSON reader
//! has to round them.

use indexmap::IndexMap;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use sns_core::engine::{RunResult, Scheduler};
use sns_core::model::Cao;
use sns_core::operators::OperatorEffect;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub cao: String,
    pub scheduler: String,
    pub status: String,
    pub length: usize,
    pub steps: Vec<TraceStep>,
    pub final_multicardinal: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub tau: usize,
    pub fired: Vec<FiredOperator>,
    /// Entity name to cardinal, declaration order.
    pub cardinals_after: IndexMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiredOperator {
    pub op_id: String,
    pub partial_carries: Vec<String>,
    pub common_carry: String,
    pub remainders: Vec<String>,
    pub transformants: Vec<String>,
}

fn strings<'a, T: ToString + 'a>(items: impl IntoIterator<Item = &'a T>) -> Vec<String> {
    items.into_iter().map(ToString::to_string).collect()
}

impl FiredOperator {
    fn from_effect(e: &OperatorEffect) -> Self {
        Self {
            op_id: e.op_id.clone(),
            partial_carries: strings(&e.partial_carries),
            common_carry: e.common_carry.to_string(),
            remainders: strings(&e.new_operand_values),
            transformants: strings(&e.transformants),
        }
    }
}

impl TraceDocument {
    pub fn from_run(cao: &Cao, run: &RunResult<'_>) -> Self {
        let steps = run
            .trace
            .iter()
            .map(|rec| TraceStep {
                tau: rec.step_index,
                fired: rec.fired.iter().map(FiredOperator::from_effect).collect(),
                cardinals_after: cao
                    .entities()
                    .iter()
                    .zip(&rec.cardinals_after)
                    .map(|(e, c)| (e.to_string(), c.to_string()))
                    .collect(),
            })
            .collect();
        Self {
            cao: cao.name().to_owned(),
            scheduler: run.scheduler.to_string(),
            status: run.status.label().to_owned(),
            length: run.length,
            steps,
            final_multicardinal: strings(&run.final_multicardinal.values),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayError {
    Scheduler(String),
    UnknownOperator {
        tau: usize,
        op: String,
    },
    Arity {
        tau: usize,
        op: String,
    },
    Number {
        tau: usize,
        text: String,
    },
    /// The replayed state disagrees with the recorded `cardinals_after`.
    Diverged {
        tau: usize,
    },
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::Scheduler(s) => write!(f, "unknown scheduler `{s}`"),
            ReplayError::UnknownOperator { tau, op } => {
                write!(f, "step {tau}: unknown operator {op}")
            }
            ReplayError::Arity { tau, op } => {
                write!(
                    f,
                    "step {tau}: operator {op} has the wrong number of values"
                )
            }
            ReplayError::Number { tau, text } => {
                write!(f, "step {tau}: `{text}` is not a natural number")
            }
            ReplayError::Diverged { tau } => {
                write!(f, "step {tau}: replayed state differs from the trace")
            }
        }
    }
}

impl std::error::Error for ReplayError {}

/// Applies the recorded effects to the CAO's initial cardinals and returns
/// the final state, aligned with the entity order. Each step is checked
/// against its recorded `cardinals_after`.
pub fn replay(cao: &Cao, doc: &TraceDocument) -> Result<Vec<BigUint>, ReplayError> {
    let scheduler: Scheduler = doc
        .scheduler
        .parse()
        .map_err(|_| ReplayError::Scheduler(doc.scheduler.clone()))?;
    let mut state: Vec<BigUint> = cao
        .initial_cardinals()
        .into_iter()
        .map(|c| c.into_inner())
        .collect();
    for step in &doc.steps {
        let tau = step.tau;
        let num = |text: &String| {
            text.parse::<BigUint>().map_err(|_| ReplayError::Number {
                tau,
                text: text.clone(),
            })
        };
        let mut resolved = Vec::with_capacity(step.fired.len());
        for f in &step.fired {
            let op = cao
                .operator_index(&f.op_id)
                .ok_or_else(|| ReplayError::UnknownOperator {
                    tau,
                    op: f.op_id.clone(),
                })?;
            if f.remainders.len() != cao.operand_indices(op).len()
                || f.transformants.len() != cao.image_indices(op).len()
            {
                return Err(ReplayError::Arity {
                    tau,
                    op: f.op_id.clone(),
                });
            }
            let remainders = f
                .remainders
                .iter()
                .map(num)
                .collect::<Result<Vec<_>, _>>()?;
            let transformants = f
                .transformants
                .iter()
                .map(num)
                .collect::<Result<Vec<_>, _>>()?;
            resolved.push((op, remainders, transformants));
        }
        let set_remainders = |state: &mut Vec<BigUint>, op: usize, rem: &[BigUint]| {
            for (&k, v) in cao.operand_indices(op).iter().zip(rem) {
                state[k] = v.clone();
            }
        };
        let add_transformants = |state: &mut Vec<BigUint>, op: usize, q: &[BigUint]| {
            for (&k, v) in cao.image_indices(op).iter().zip(q) {
                state[k] += v;
            }
        };
        if scheduler == Scheduler::Synchronous {
            for (op, rem, _) in &resolved {
                set_remainders(&mut state, *op, rem);
            }
            for (op, _, q) in &resolved {
                add_transformants(&mut state, *op, q);
            }
        } else {
            for (op, rem, q) in &resolved {
                set_remainders(&mut state, *op, rem);
                add_transformants(&mut state, *op, q);
            }
        }
        let recorded: Vec<&String> = step.cardinals_after.values().collect();
        let matches = recorded.len() == state.len()
            && recorded
                .iter()
                .zip(&state)
                .all(|(r, s)| **r == s.to_string());
        if !matches {
            return Err(ReplayError::Diverged { tau });
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sns_core::dsl;
    use sns_core::engine::{self, DEFAULT_MAX_STEPS};

    const DECIMAL: &str = "cao dec { entities: c0, c1, c2;
        op a: L (c0/10) -> (c1*1); op b: L (c1/10) -> (c2*1); init: c0=234; }";

    #[test]
    fn keys_and_decimal_strings() {
        let cao = dsl::parse(DECIMAL).unwrap();
        let run = engine::run(&cao, Scheduler::Synchronous, DEFAULT_MAX_STEPS).unwrap();
        let doc = TraceDocument::from_run(&cao, &run);
        let v: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            [
                "cao",
                "scheduler",
                "status",
                "length",
                "steps",
                "final_multicardinal"
            ]
        );
        assert_eq!(v["steps"][0]["fired"][0]["common_carry"], "23");
        assert_eq!(v["steps"][0]["cardinals_after"]["c1"], "23");
        assert_eq!(v["final_multicardinal"], serde_json::json!(["2", "3", "4"]));
    }

    #[test]
    fn replay_reproduces_every_scheduler() {
        let cao = dsl::parse(DECIMAL).unwrap();
        for s in ["sync", "seq", "perm:3"] {
            let run = engine::run(&cao, s.parse().unwrap(), DEFAULT_MAX_STEPS).unwrap();
            let doc =
                TraceDocument::from_json(&TraceDocument::from_run(&cao, &run).to_json()).unwrap();
            let got = replay(&cao, &doc).unwrap();
            let want: Vec<BigUint> = run
                .final_state
                .cardinals
                .iter()
                .map(|c| c.value().clone())
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let cao = dsl::parse(DECIMAL).unwrap();
        let run = engine::run(&cao, Scheduler::Synchronous, DEFAULT_MAX_STEPS).unwrap();
        let mut doc = TraceDocument::from_run(&cao, &run);
        doc.steps[0].fired[0].transformants[0] = "22".into();
        assert_eq!(replay(&cao, &doc), Err(ReplayError::Diverged { tau: 1 }));
        doc.steps[0].fired[0].op_id = "zz".into();
        assert!(matches!(
            replay(&cao, &doc),
            Err(ReplayError::UnknownOperator { .. })
        ));
    }
}
