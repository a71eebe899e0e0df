//! Graphviz rendering in the usual schematic style: entities as ellipses,
//! operators as boxes.

use std::fmt::Write;

use sns_core::model::{Cao, OperatorKind};
use sns_core::topology::operator_order;

fn kind_symbol(kind: &OperatorKind) -> String {
    match kind {
        OperatorKind::RadixMultiplicity => "↑#".into(),
        OperatorKind::RadixExcessValue => "↑Δ".into(),
        OperatorKind::RadixExcessFact(_) => "↑•".into(),
        OperatorKind::ArbitraryFunction(h) => format!("↑fn {}", h.name()),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Operators are listed in dependency order when the CAO is acyclic, in
/// declaration order otherwise.
pub fn render(cao: &Cao) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(cao.name()));
    out.push_str("  rankdir=LR;\n");
    for (k, (e, n)) in cao
        .entities()
        .iter()
        .zip(cao.initial_cardinals())
        .enumerate()
    {
        let _ = writeln!(
            out,
            "  e{k} [shape=ellipse, label={}];",
            quote(&format!("{e}:{n}"))
        );
    }
    let order = operator_order(cao).unwrap_or_else(|| (0..cao.operators().len()).collect());
    for op in order {
        let spec = &cao.operators()[op];
        let _ = writeln!(
            out,
            "  o{op} [shape=box, label={}, tooltip={}];",
            quote(&format!("{} {}", spec.form, kind_symbol(&spec.kind))),
            quote(&spec.id)
        );
        for (&e, operand) in cao.operand_indices(op).iter().zip(&spec.operands) {
            let _ = writeln!(
                out,
                "  e{e} -> o{op} [label={}];",
                quote(&format!("/{}", operand.radix))
            );
        }
        for (&e, image) in cao.image_indices(op).iter().zip(&spec.images) {
            let _ = writeln!(
                out,
                "  o{op} -> e{e} [label={}];",
                quote(&format!("*{}", image.rate))
            );
        }
    }
    out.push_str("}\n");
    out
}
