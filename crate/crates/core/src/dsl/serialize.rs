use std::fmt::Write;

use crate::model::{Cao, OperatorKind};

/// Canonical text: declaration order throughout, one declaration per line,
/// `kind` only when it is not radix-multiplicity.
///
/// Entity coordinates and custom remainder hooks have no surface syntax and
/// are not written.
pub fn serialize(cao: &Cao) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cao {} {{", cao.name());
    let entities: Vec<&str> = cao.entities().iter().map(|e| e.id()).collect();
    if entities.is_empty() {
        out.push_str("  entities: ;\n");
    } else {
        let _ = writeln!(out, "  entities: {};", entities.join(", "));
    }
    for op in cao.operators() {
        let operands: Vec<String> = op
            .operands
            .iter()
            .map(|o| format!("{}/{}", o.entity.id(), o.radix))
            .collect();
        let images: Vec<String> = op
            .images
            .iter()
            .map(|i| format!("{}*{}", i.entity.id(), i.rate))
            .collect();
        let _ = write!(
            out,
            "  op {}: {} ({}) -> ({})",
            op.id,
            op.form,
            operands.join(", "),
            images.join(", ")
        );
        match &op.kind {
            OperatorKind::RadixMultiplicity => {}
            OperatorKind::RadixExcessValue => out.push_str(" kind delta"),
            OperatorKind::RadixExcessFact(_) => out.push_str(" kind fact"),
            OperatorKind::ArbitraryFunction(h) => {
                let _ = write!(out, " kind fn {}", h.name());
            }
        }
        out.push_str(";\n");
    }
    if !cao.init().is_empty() {
        let init: Vec<String> = cao
            .init()
            .iter()
            .map(|(e, v)| format!("{}={}", e.id(), v))
            .collect();
        let _ = writeln!(out, "  init: {};", init.join(", "));
    }
    out.push_str("}\n");
    out
}
