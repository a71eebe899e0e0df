//! Semantic numeration systems: cardinal abstract entities, the operators
//! that transform them, and the analyses built on top.
//!
//! ```
//! use sns_core::{dsl, engine::{self, Scheduler}};
//!
//! let cao = dsl::parse(
//!     "cao dec { entities: c0, c1, c2;
//!        op a: L (c0/10) -> (c1*1);
//!        op b: L (c1/10) -> (c2*1);
//!        init: c0=234; }",
//! )
//! .unwrap();
//! let run = engine::run(&cao, Scheduler::Synchronous, engine::DEFAULT_MAX_STEPS).unwrap();
//! assert_eq!(run.final_multicardinal.to_string(), "[2, 3, 4]");
//! ```

pub mod classic;
pub mod dsl;
pub mod engine;
pub mod model;
pub mod operators;
pub mod topology;

pub use model::{Cao, Cardinal, EntityName, OperatorForm, OperatorKind, OperatorSpec};
