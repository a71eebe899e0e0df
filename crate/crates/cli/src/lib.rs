//! Front end for `.sns` files: validation, runs with JSON traces,
//! classification, positional encoding and Graphviz export.

pub mod commands;
pub mod dot;
pub mod trace;
