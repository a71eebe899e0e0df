//! Subcommand bodies. Each writes to the given streams and returns the exit
//! code, so they can be tested without spawning a process.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use sns_core::classic::{decode, encode, ChainSpec};
use sns_core::dsl::{self, ParseError};
use sns_core::engine::{self, RunStatus, Scheduler};
use sns_core::model::Cao;
use sns_core::topology::{classify_entities, classify_sns};

use crate::dot;
use crate::trace::TraceDocument;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

fn report(err: &mut dyn Write, path: &Path, text: &str, e: &ParseError) {
    let _ = writeln!(err, "{}:{e}", path.display());
    if let Some(line) = text.lines().nth(e.span.line - 1) {
        let width = text[e.span.start..e.span.end.max(e.span.start)]
            .chars()
            .take_while(|&c| c != '\n')
            .count()
            .max(1);
        let _ = writeln!(err, "  {line}");
        let _ = writeln!(
            err,
            "  {}{}",
            " ".repeat(e.span.column - 1),
            "^".repeat(width)
        );
    }
}

/// Reads and validates a `.sns` file, printing diagnostics on failure.
fn load(path: &Path, err: &mut dyn Write) -> Result<Cao, u8> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", path.display());
            return Err(EXIT_IO);
        }
    };
    dsl::parse(&text).map_err(|errs| {
        for e in &errs {
            report(err, path, &text, e);
        }
        EXIT_INVALID
    })
}

pub fn check(path: &Path, err: &mut dyn Write) -> u8 {
    match load(path, err) {
        Ok(_) => EXIT_OK,
        Err(code) => code,
    }
}

pub struct RunOptions<'a> {
    pub scheduler: Scheduler,
    pub max_steps: usize,
    pub trace: Option<&'a Path>,
    pub quiet: bool,
}

pub fn run(path: &Path, opts: &RunOptions<'_>, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cao = match load(path, err) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let result = match engine::run(&cao, opts.scheduler, opts.max_steps) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_INVALID;
        }
    };
    if !opts.quiet {
        for (e, c) in cao.entities().iter().zip(&result.final_state.cardinals) {
            let _ = writeln!(out, "{e}: {c}");
        }
        let _ = writeln!(out, "multicardinal: {}", result.final_multicardinal);
        let _ = writeln!(out, "length: {}", result.length);
        let _ = writeln!(out, "status: {}", result.status.label());
    }
    if let Some(trace) = opts.trace {
        let doc = TraceDocument::from_run(&cao, &result);
        if let Err(e) = fs::write(trace, doc.to_json() + "\n") {
            let _ = writeln!(err, "{}: {e}", trace.display());
            return EXIT_IO;
        }
    }
    match result.status {
        RunStatus::Terminated => EXIT_OK,
        RunStatus::BudgetExhausted => {
            let _ = writeln!(err, "step budget of {} exhausted", opts.max_steps);
            EXIT_BUDGET
        }
    }
}

pub fn classify(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cao = match load(path, err) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let record = classify_sns(&cao);
    let _ = writeln!(out, "{record}");
    for (feature, value, is_default) in record.features() {
        if is_default {
            let _ = writeln!(out, "{feature}: [{value}]");
        } else {
            let _ = writeln!(out, "{feature}: {value}");
        }
    }
    if let Some(p) = record.parameters() {
        let _ = writeln!(out, "parameters: {p}");
    }
    let _ = writeln!(out, "roles:");
    for (e, role) in classify_entities(&cao) {
        let _ = writeln!(out, "  {e}: {}", role.label());
    }
    EXIT_OK
}

pub struct EncodeOptions {
    pub value: BigUint,
    pub radices: Vec<BigUint>,
    pub rates: Option<Vec<BigUint>>,
    pub width: Option<usize>,
}

/// Expands a single radix (or rate) to `width − 1` copies when a width is
/// given; otherwise the lists must already agree.
fn chain_spec(opts: &EncodeOptions) -> Result<ChainSpec, String> {
    let mut radices = opts.radices.clone();
    if radices.is_empty() {
        return Err("at least one radix is required".into());
    }
    if let Some(w) = opts.width {
        if w < 2 {
            return Err(format!("width {w} leaves no room for an operator"));
        }
        if radices.len() == 1 {
            radices = vec![radices[0].clone(); w - 1];
        } else if radices.len() != w - 1 {
            return Err(format!(
                "width {w} needs {} radices, got {}",
                w - 1,
                radices.len()
            ));
        }
    }
    let rates = match &opts.rates {
        None => vec![BigUint::from(1u32); radices.len()],
        Some(r) if r.len() == 1 && opts.width.is_some() => vec![r[0].clone(); radices.len()],
        Some(r) if r.len() == radices.len() => r.clone(),
        Some(r) => {
            return Err(format!(
                "{} rates given for {} radices",
                r.len(),
                radices.len()
            ))
        }
    };
    ChainSpec::new(radices, rates).map_err(|e| e.to_string())
}

pub fn encode_value(opts: &EncodeOptions, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let spec = match chain_spec(opts) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_INVALID;
        }
    };
    let digits = encode(&opts.value, &spec);
    let text: Vec<String> = digits.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "digits: {}", text.join(","));
    match decode(&digits, &spec) {
        Ok(v) => {
            let _ = writeln!(out, "decode: {v}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            EXIT_INVALID
        }
    }
}

pub fn dot(path: &Path, target: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cao = match load(path, err) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let text = dot::render(&cao);
    match target {
        Some(t) => {
            if let Err(e) = fs::write(t, text) {
                let _ = writeln!(err, "{}: {e}", t.display());
                return EXIT_IO;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    EXIT_OK
}
