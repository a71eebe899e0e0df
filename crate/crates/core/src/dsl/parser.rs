use num_bigint::BigUint;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, SourceSpan};
use crate::model::{
    Cao, Cardinal, EntityName, FunctionHook, ModelError, OperatorForm, OperatorKind, OperatorSpec,
    ValenceIssue,
};
use crate::operators::builtin_functions;

/// Parses a CAO using the built-in function hooks for `kind fn NAME`.
pub fn parse(text: &str) -> Result<Cao, Vec<ParseError>> {
    parse_with(text, &builtin_functions())
}

/// Parses a CAO; `kind fn NAME` resolves against `functions`.
pub fn parse_with(text: &str, functions: &[FunctionHook]) -> Result<Cao, Vec<ParseError>> {
    let tokens = tokenize(text).map_err(|e| vec![e])?;
    let mut p = Parser {
        tokens,
        pos: 0,
        errors: Vec::new(),
        functions,
        spans: Spans::default(),
    };
    let parsed = p.document();
    let Some(doc) = parsed else {
        return Err(p.errors);
    };
    if !p.errors.is_empty() {
        return Err(p.errors);
    }
    Cao::new(doc.name, doc.entities, doc.operators, doc.init)
        .map_err(|errs| errs.0.iter().map(|e| p.spans.locate(e)).collect())
}

struct Document {
    name: String,
    entities: Vec<EntityName>,
    operators: Vec<OperatorSpec>,
    init: Vec<(EntityName, Cardinal)>,
}

#[derive(Default)]
struct OpSpans {
    id: Option<SourceSpan>,
    operands: Vec<SourceSpan>,
    images: Vec<SourceSpan>,
    image_list: Option<SourceSpan>,
}

/// Where things were written, for mapping validation errors back to text.
#[derive(Default)]
struct Spans {
    whole: Option<SourceSpan>,
    entity_decls: Vec<(EntityName, SourceSpan)>,
    ops: Vec<(String, OpSpans)>,
    init_refs: Vec<(EntityName, SourceSpan)>,
    /// Operand then image entity names per operator, aligned with `ops`.
    operator_names: Vec<(String, Vec<EntityName>)>,
}

impl Spans {
    fn op(&self, id: &str) -> Option<&OpSpans> {
        self.ops.iter().find(|(k, _)| k == id).map(|(_, s)| s)
    }

    /// Span of the `nth` (0-based) reference to `entity` among an operator's
    /// operands and images.
    fn reference(
        &self,
        op: &str,
        entity: &EntityName,
        nth: usize,
        operators: &[(String, Vec<EntityName>)],
    ) -> Option<SourceSpan> {
        let spans = self.op(op)?;
        let (_, names) = operators.iter().find(|(k, _)| k == op)?;
        let all: Vec<&SourceSpan> = spans.operands.iter().chain(&spans.images).collect();
        names
            .iter()
            .zip(all)
            .filter(|(n, _)| *n == entity)
            .nth(nth)
            .map(|(_, s)| *s)
    }

    fn locate(&self, err: &ModelError) -> ParseError {
        let whole = self.whole.expect("document span");
        let span = self.span_of(err).unwrap_or(whole);
        ParseError::new(span, err.to_string())
    }

    fn span_of(&self, err: &ModelError) -> Option<SourceSpan> {
        let names = &self.operator_names;
        match err {
            ModelError::DuplicateEntity(e) => self
                .entity_decls
                .iter()
                .filter(|(n, _)| n == e)
                .nth(1)
                .map(|(_, s)| *s),
            ModelError::DuplicateOperator(id) => self
                .ops
                .iter()
                .filter(|(k, _)| k == id)
                .nth(1)
                .and_then(|(_, s)| s.id),
            ModelError::UnknownEntity {
                op: Some(op),
                entity,
            } => self.reference(op, entity, 0, names),
            ModelError::UnknownEntity { op: None, entity } => self
                .init_refs
                .iter()
                .find(|(n, _)| n == entity)
                .map(|(_, s)| *s),
            ModelError::MultipleOutputs { entity, operators } => operators
                .get(1)
                .and_then(|op| self.reference(op, entity, 0, names)),
            ModelError::ZeroRadix { op, entity } => self.reference(op, entity, 0, names),
            ModelError::DuplicateOperand { op, entity }
            | ModelError::DuplicateImage { op, entity }
            | ModelError::OperandImageOverlap { op, entity } => {
                self.reference(op, entity, 1, names)
            }
            ModelError::AllRatesZero { op } => self.op(op).and_then(|s| s.image_list),
            ModelError::NoOperands { op }
            | ModelError::NoImages { op }
            | ModelError::Valence { op, .. }
            | ModelError::NotStepOperator { op, .. }
            | ModelError::NotExecutable { op, .. } => self.op(op).and_then(|s| s.id),
            ModelError::EmptyEntityName | ModelError::EmptyOperatorId => None,
        }
    }
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
    functions: &'a [FunctionHook],
    spans: Spans,
}

type Step<T> = Result<T, ParseError>;

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(t.span, format!("unexpected {}", t.tok.describe())).expecting(expected)
    }

    fn expect(&mut self, tok: Tok) -> Step<SourceSpan> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    /// Closes a comma-separated list; a stray token is reported as wanting
    /// either another item or the closer.
    fn close_list(&mut self, close: Tok) -> Step<SourceSpan> {
        if self.peek().tok == close {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`,` or {}", close.describe())))
        }
    }

    fn ident(&mut self, what: &str) -> Step<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> Step<SourceSpan> {
        if self.at_keyword(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn nat(&mut self) -> Step<(BigUint, SourceSpan)> {
        match &self.peek().tok {
            Tok::Nat(n) => {
                let n = n.clone();
                Ok((n, self.bump().span))
            }
            _ => Err(self.unexpected("a natural number")),
        }
    }

    /// Skips past the next `;` (or to `}`/end) after a syntax error.
    fn recover(&mut self) {
        loop {
            match self.peek().tok {
                Tok::Semi => {
                    self.bump();
                    return;
                }
                Tok::RBrace | Tok::Eof => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn document(&mut self) -> Option<Document> {
        let first = self.peek().span;
        let last = self.tokens.last().expect("eof token").span;
        self.spans.whole = Some(SourceSpan {
            line: first.line,
            column: first.column,
            start: first.start.min(last.end),
            end: last.end,
        });
        match self.document_inner() {
            Ok(doc) => Some(doc),
            Err(e) => {
                self.errors.push(e);
                None
            }
        }
    }

    fn document_inner(&mut self) -> Step<Document> {
        self.keyword("cao")?;
        let (name, _) = self.ident("a CAO name")?;
        self.expect(Tok::LBrace)?;
        self.keyword("entities")?;
        self.expect(Tok::Colon)?;
        let mut entities = Vec::new();
        if self.peek().tok != Tok::Semi {
            loop {
                let (e, span) = self.ident("an entity name")?;
                let e = EntityName::new(e);
                self.spans.entity_decls.push((e.clone(), span));
                entities.push(e);
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.close_list(Tok::Semi)?;
        } else {
            self.bump();
        }

        let mut operators = Vec::new();
        let mut init = Vec::new();
        let mut seen_init = false;
        loop {
            if self.peek().tok == Tok::RBrace {
                self.bump();
                break;
            }
            if self.at_keyword("op") && !seen_init {
                match self.operator() {
                    Ok(Some(op)) => operators.push(op),
                    Ok(None) => {}
                    Err(e) => {
                        self.errors.push(e);
                        self.recover();
                    }
                }
            } else if self.at_keyword("init") && !seen_init {
                seen_init = true;
                if let Err(e) = self.init(&mut init) {
                    self.errors.push(e);
                    self.recover();
                }
            } else {
                let expected = if seen_init {
                    "`}`"
                } else {
                    "`op`, `init` or `}`"
                };
                return Err(self.unexpected(expected));
            }
        }
        if self.peek().tok != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        self.spans.operator_names = operators
            .iter()
            .map(|op: &OperatorSpec| {
                let names = op
                    .operands
                    .iter()
                    .map(|o| o.entity.clone())
                    .chain(op.images.iter().map(|i| i.entity.clone()))
                    .collect();
                (op.id.clone(), names)
            })
            .collect();
        Ok(Document {
            name,
            entities,
            operators,
            init,
        })
    }

    /// `Ok(None)` when the declaration parsed but broke a valence rule.
    fn operator(&mut self) -> Step<Option<OperatorSpec>> {
        self.keyword("op")?;
        let (id, id_span) = self.ident("an operator id")?;
        self.expect(Tok::Colon)?;
        let (form_name, form_span) = self.ident("a form (L, D, F or M)")?;
        let form = match form_name.as_str() {
            "L" => OperatorForm::L,
            "D" => OperatorForm::D,
            "F" => OperatorForm::F,
            "M" => OperatorForm::M,
            other => {
                return Err(
                    ParseError::new(form_span, format!("unknown form `{other}`"))
                        .expecting("L, D, F or M"),
                )
            }
        };
        let mut spans = OpSpans {
            id: Some(id_span),
            ..OpSpans::default()
        };

        let operand_open = self.expect(Tok::LParen)?;
        let mut operands = Vec::new();
        loop {
            let (e, e_span) = self.ident("an entity name")?;
            self.expect(Tok::Slash)?;
            let (n, n_span) = self.nat()?;
            spans.operands.push(join(e_span, n_span));
            operands.push((EntityName::new(e), n));
            if self.peek().tok == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        let operand_close = self.close_list(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        let image_open = self.expect(Tok::LParen)?;
        let mut images = Vec::new();
        loop {
            let (e, e_span) = self.ident("an entity name")?;
            self.expect(Tok::Star)?;
            let (r, r_span) = self.nat()?;
            spans.images.push(join(e_span, r_span));
            images.push((EntityName::new(e), r));
            if self.peek().tok == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        let image_close = self.close_list(Tok::RParen)?;
        spans.image_list = Some(join(image_open, image_close));

        let kind = if self.at_keyword("kind") {
            self.bump();
            self.kind()?
        } else {
            OperatorKind::RadixMultiplicity
        };
        self.expect(Tok::Semi)?;

        let valence = form
            .valence_issue(operands.len(), images.len())
            .map(|issue| {
                let span = match issue {
                    ValenceIssue::TooManyOperands => spans.operands[1],
                    ValenceIssue::TooFewOperands => join(operand_open, operand_close),
                    ValenceIssue::TooManyImages => spans.images[1],
                    ValenceIssue::TooFewImages => join(image_open, image_close),
                };
                ParseError::new(span, issue.message(form))
            });
        self.spans.ops.push((id.clone(), spans));
        if let Some(err) = valence {
            self.errors.push(err);
            return Ok(None);
        }
        Ok(Some(
            OperatorSpec::new(id, form, operands, images).with_kind(kind),
        ))
    }

    fn kind(&mut self) -> Step<OperatorKind> {
        if self.peek().tok == Tok::Hash {
            self.bump();
            return Ok(OperatorKind::RadixMultiplicity);
        }
        let (k, span) = self.ident("`#`, `delta`, `fact` or `fn`")?;
        match k.as_str() {
            "delta" => Ok(OperatorKind::RadixExcessValue),
            "fact" => Ok(OperatorKind::excess_fact()),
            "fn" => {
                let (name, name_span) = self.ident("a function name")?;
                self.functions
                    .iter()
                    .find(|h| h.name() == name)
                    .map(|h| OperatorKind::ArbitraryFunction(h.clone()))
                    .ok_or_else(|| ParseError::new(name_span, format!("unknown function `{name}`")))
            }
            other => Err(ParseError::new(span, format!("unknown kind `{other}`"))
                .expecting("`#`, `delta`, `fact` or `fn`")),
        }
    }

    fn init(&mut self, out: &mut Vec<(EntityName, Cardinal)>) -> Step<()> {
        self.keyword("init")?;
        self.expect(Tok::Colon)?;
        loop {
            let (e, e_span) = self.ident("an entity name")?;
            self.expect(Tok::Eq)?;
            let (n, n_span) = self.nat()?;
            let e = EntityName::new(e);
            self.spans.init_refs.push((e.clone(), join(e_span, n_span)));
            out.push((e, Cardinal::from(n)));
            if self.peek().tok == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.close_list(Tok::Semi)?;
        Ok(())
    }
}

fn join(a: SourceSpan, b: SourceSpan) -> SourceSpan {
    SourceSpan {
        line: a.line,
        column: a.column,
        start: a.start,
        end: b.end,
    }
}
