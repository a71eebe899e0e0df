//! Domain types shared by every module: named entities, cardinals, operator
//! signatures and the cardinal abstract object (CAO) that wires them together.
//!
//! Everything here is immutable once constructed. [`Cao::new`] is the single
//! validating entry point; it reports every violated invariant at once.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Add;
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexMap;
use num_bigint::{BigUint, ParseBigIntError};
use num_traits::{One, Zero};
use thiserror::Error;

/// One coordinate of a composite entity name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Ident(String),
    Index(i64),
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Ident(s) => f.write_str(s),
            Coord::Index(i) => write!(f, "{i}"),
        }
    }
}

/// Identifier of a cardinal abstract entity, optionally carrying abstract
/// coordinates (e.g. the cell `(row, col)` of a lattice).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityName {
    id: String,
    coords: Vec<Coord>,
}

impl EntityName {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            coords: Vec::new(),
        }
    }

    pub fn with_coords(id: impl Into<String>, coords: Vec<Coord>) -> Self {
        Self {
            id: id.into(),
            coords,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }
}

impl fmt::Display for EntityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)?;
        if !self.coords.is_empty() {
            f.write_str("[")?;
            for (k, c) in self.coords.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

impl From<&str> for EntityName {
    fn from(id: &str) -> Self {
        EntityName::new(id)
    }
}

impl From<String> for EntityName {
    fn from(id: String) -> Self {
        EntityName::new(id)
    }
}

impl From<&EntityName> for EntityName {
    fn from(name: &EntityName) -> Self {
        name.clone()
    }
}

/// Count of semantic unit quanta held by an entity. Never negative.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cardinal(BigUint);

impl Cardinal {
    pub fn zero() -> Self {
        Cardinal(BigUint::zero())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<BigUint> for Cardinal {
    fn from(v: BigUint) -> Self {
        Cardinal(v)
    }
}

impl From<u64> for Cardinal {
    fn from(v: u64) -> Self {
        Cardinal(BigUint::from(v))
    }
}

impl From<u32> for Cardinal {
    fn from(v: u32) -> Self {
        Cardinal(BigUint::from(v))
    }
}

impl From<Cardinal> for BigUint {
    fn from(c: Cardinal) -> Self {
        c.0
    }
}

impl PartialEq<u64> for Cardinal {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl Add<&BigUint> for &Cardinal {
    type Output = Cardinal;

    fn add(self, rhs: &BigUint) -> Cardinal {
        Cardinal(&self.0 + rhs)
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for Cardinal {
    type Err = ParseBigIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<BigUint>().map(Cardinal)
    }
}

/// An entity together with its current cardinal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalAbstractEntity {
    pub name: EntityName,
    pub cardinal: Cardinal,
}

pub type CarryFn = dyn Fn(&BigUint, &BigUint) -> BigUint + Send + Sync;
/// Remainder hook: `(value, radix, carry) -> remainder`.
pub type RemainderFn = dyn Fn(&BigUint, &BigUint, &BigUint) -> BigUint + Send + Sync;

/// Named remainder rule for the radix-excess-fact kind.
#[derive(Clone)]
pub struct RemainderHook {
    name: String,
    f: Arc<RemainderFn>,
}

impl RemainderHook {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&BigUint, &BigUint, &BigUint) -> BigUint + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// Default rule: the operand is capped at its threshold, `rem = n`.
    pub fn cap_at_radix() -> Self {
        Self::new("cap", |_, radix, _| radix.clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn call(&self, value: &BigUint, radix: &BigUint, carry: &BigUint) -> BigUint {
        (self.f)(value, radix, carry)
    }
}

/// Named carry/remainder pair for the arbitrary-function kind.
#[derive(Clone)]
pub struct FunctionHook {
    name: String,
    carry: Arc<CarryFn>,
    remainder: Arc<RemainderFn>,
}

impl FunctionHook {
    pub fn new(
        name: impl Into<String>,
        carry: impl Fn(&BigUint, &BigUint) -> BigUint + Send + Sync + 'static,
        remainder: impl Fn(&BigUint, &BigUint, &BigUint) -> BigUint + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            carry: Arc::new(carry),
            remainder: Arc::new(remainder),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carry(&self, value: &BigUint, radix: &BigUint) -> BigUint {
        (self.carry)(value, radix)
    }

    pub fn remainder(&self, value: &BigUint, radix: &BigUint, carry: &BigUint) -> BigUint {
        (self.remainder)(value, radix, carry)
    }
}

// Hooks are identified by name; the closures themselves are opaque.
impl PartialEq for RemainderHook {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for RemainderHook {}

impl fmt::Debug for RemainderHook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RemainderHook({})", self.name)
    }
}

impl PartialEq for FunctionHook {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for FunctionHook {}

impl fmt::Debug for FunctionHook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionHook({})", self.name)
    }
}

/// How carries and remainders are formed from an operand's cardinal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum OperatorKind {
    /// `p = ⌊N/n⌋`, `rem = N − p·n`.
    #[default]
    RadixMultiplicity,
    /// `p = N − n` when `N > n`, `rem = 0`.
    RadixExcessValue,
    /// `p = 1` when `N > n`, remainder from the hook.
    RadixExcessFact(RemainderHook),
    ArbitraryFunction(FunctionHook),
}

impl OperatorKind {
    pub fn excess_fact() -> Self {
        OperatorKind::RadixExcessFact(RemainderHook::cap_at_radix())
    }

    pub fn tag(&self) -> KindTag {
        match self {
            OperatorKind::RadixMultiplicity => KindTag::RadixMultiplicity,
            OperatorKind::RadixExcessValue => KindTag::RadixExcessValue,
            OperatorKind::RadixExcessFact(_) => KindTag::RadixExcessFact,
            OperatorKind::ArbitraryFunction(_) => KindTag::ArbitraryFunction,
        }
    }
}

/// Hook-free discriminant of [`OperatorKind`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KindTag {
    RadixMultiplicity,
    RadixExcessValue,
    RadixExcessFact,
    ArbitraryFunction,
}

impl KindTag {
    pub fn label(self) -> &'static str {
        match self {
            KindTag::RadixMultiplicity => "radix-multiplicity",
            KindTag::RadixExcessValue => "radix-excess-value",
            KindTag::RadixExcessFact => "radix-excess-fact",
            KindTag::ArbitraryFunction => "arbitrary-function",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorForm {
    /// Line, valence (1, 1).
    L,
    /// Distribution, valence (1, v > 1).
    D,
    /// Fusion, valence (w > 1, 1).
    F,
    /// Multi, valence (w ≥ 1, v ≥ 1).
    M,
    /// Initial assignment; not a step operator.
    Assign,
    /// Reset to zero; not a step operator.
    Zero,
}

impl OperatorForm {
    pub fn is_step_operator(self) -> bool {
        !matches!(self, OperatorForm::Assign | OperatorForm::Zero)
    }

    /// First valence rule broken by `(w, v)`, if any.
    pub fn valence_issue(self, w: usize, v: usize) -> Option<ValenceIssue> {
        use ValenceIssue::*;
        match self {
            OperatorForm::L if w > 1 => Some(TooManyOperands),
            OperatorForm::L | OperatorForm::F if v > 1 => Some(TooManyImages),
            OperatorForm::D if w > 1 => Some(TooManyOperands),
            OperatorForm::D if v < 2 => Some(TooFewImages),
            OperatorForm::F if w < 2 => Some(TooFewOperands),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            OperatorForm::L => "L",
            OperatorForm::D => "D",
            OperatorForm::F => "F",
            OperatorForm::M => "M",
            OperatorForm::Assign => "A",
            OperatorForm::Zero => "Z",
        }
    }
}

impl fmt::Display for OperatorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValenceIssue {
    TooManyOperands,
    TooFewOperands,
    TooManyImages,
    TooFewImages,
}

impl ValenceIssue {
    pub fn message(self, form: OperatorForm) -> String {
        match (form, self) {
            (_, ValenceIssue::TooManyOperands) => {
                format!("form {form} requires exactly one operand")
            }
            (_, ValenceIssue::TooFewOperands) => {
                format!("form {form} requires at least two operands")
            }
            (_, ValenceIssue::TooManyImages) => format!("form {form} requires exactly one image"),
            (_, ValenceIssue::TooFewImages) => format!("form {form} requires at least two images"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OperatorFamily {
    /// Changes both operand and image cardinals. The only executable family.
    #[default]
    Transforming,
    /// Changes images only.
    Preserving,
    Complex,
}

impl OperatorFamily {
    pub fn label(self) -> &'static str {
        match self {
            OperatorFamily::Transforming => "transforming",
            OperatorFamily::Preserving => "preserving",
            OperatorFamily::Complex => "complex",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operand {
    pub entity: EntityName,
    pub radix: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub entity: EntityName,
    pub rate: BigUint,
}

/// Signature and wiring of one cardinal semantic operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    pub id: String,
    pub family: OperatorFamily,
    pub kind: OperatorKind,
    pub form: OperatorForm,
    pub operands: Vec<Operand>,
    pub images: Vec<Image>,
}

impl OperatorSpec {
    /// A transforming radix-multiplicity operator.
    pub fn new<A, B, N, R>(
        id: impl Into<String>,
        form: OperatorForm,
        operands: A,
        images: B,
    ) -> Self
    where
        A: IntoIterator<Item = (N, R)>,
        B: IntoIterator<Item = (N, R)>,
        N: Into<EntityName>,
        R: Into<BigUint>,
    {
        Self {
            id: id.into(),
            family: OperatorFamily::Transforming,
            kind: OperatorKind::RadixMultiplicity,
            form,
            operands: operands
                .into_iter()
                .map(|(e, n)| Operand {
                    entity: e.into(),
                    radix: n.into(),
                })
                .collect(),
            images: images
                .into_iter()
                .map(|(e, r)| Image {
                    entity: e.into(),
                    rate: r.into(),
                })
                .collect(),
        }
    }

    pub fn with_kind(mut self, kind: OperatorKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_family(mut self, family: OperatorFamily) -> Self {
        self.family = family;
        self
    }

    /// Input valence W.
    pub fn input_valence(&self) -> usize {
        self.operands.len()
    }

    /// Output valence V (feedback of remainders not counted).
    pub fn output_valence(&self) -> usize {
        self.images.len()
    }

    pub fn radices(&self) -> impl Iterator<Item = &BigUint> {
        self.operands.iter().map(|o| &o.radix)
    }

    pub fn rates(&self) -> impl Iterator<Item = &BigUint> {
        self.images.iter().map(|i| &i.rate)
    }

    /// Structural problems local to this operator.
    pub fn violations(&self) -> Vec<ModelError> {
        let mut errs = Vec::new();
        let op = || self.id.clone();
        if self.id.is_empty() {
            errs.push(ModelError::EmptyOperatorId);
        }
        if !self.form.is_step_operator() {
            errs.push(ModelError::NotStepOperator {
                op: op(),
                form: self.form,
            });
        }
        if self.operands.is_empty() {
            errs.push(ModelError::NoOperands { op: op() });
        }
        if self.images.is_empty() {
            errs.push(ModelError::NoImages { op: op() });
        }
        if let Some(issue) = self
            .form
            .valence_issue(self.operands.len(), self.images.len())
        {
            errs.push(ModelError::Valence {
                op: op(),
                form: self.form,
                issue,
            });
        }
        for o in &self.operands {
            if o.radix.is_zero() {
                errs.push(ModelError::ZeroRadix {
                    op: op(),
                    entity: o.entity.clone(),
                });
            }
        }
        if !self.images.is_empty() && self.images.iter().all(|i| i.rate.is_zero()) {
            errs.push(ModelError::AllRatesZero { op: op() });
        }
        let mut seen = HashSet::new();
        for o in &self.operands {
            if !seen.insert(&o.entity) {
                errs.push(ModelError::DuplicateOperand {
                    op: op(),
                    entity: o.entity.clone(),
                });
            }
        }
        let operand_names = seen;
        let mut seen = HashSet::new();
        for i in &self.images {
            if !seen.insert(&i.entity) {
                errs.push(ModelError::DuplicateImage {
                    op: op(),
                    entity: i.entity.clone(),
                });
            } else if operand_names.contains(&i.entity) {
                errs.push(ModelError::OperandImageOverlap {
                    op: op(),
                    entity: i.entity.clone(),
                });
            }
        }
        errs
    }
}

/// A single violated structural invariant.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("entity name must not be empty")]
    EmptyEntityName,
    #[error("operator id must not be empty")]
    EmptyOperatorId,
    #[error("duplicate entity {0}")]
    DuplicateEntity(EntityName),
    #[error("duplicate operator {0}")]
    DuplicateOperator(String),
    #[error("unknown entity {entity}")]
    UnknownEntity {
        op: Option<String>,
        entity: EntityName,
    },
    #[error("entity {entity} has {} outputs ({}); an entity may feed at most one operator", count_word(.operators.len()), .operators.join(", "))]
    MultipleOutputs {
        entity: EntityName,
        operators: Vec<String>,
    },
    #[error("operator {op}: radix of {entity} must be at least 1")]
    ZeroRadix { op: String, entity: EntityName },
    #[error("operator {op} has no operands")]
    NoOperands { op: String },
    #[error("operator {op} has no images")]
    NoImages { op: String },
    #[error("operator {op}: at least one image rate must be positive")]
    AllRatesZero { op: String },
    #[error("operator {op}: {entity} appears twice among operands")]
    DuplicateOperand { op: String, entity: EntityName },
    #[error("operator {op}: {entity} appears twice among images")]
    DuplicateImage { op: String, entity: EntityName },
    #[error("operator {op}: {entity} is both operand and image")]
    OperandImageOverlap { op: String, entity: EntityName },
    #[error("operator {op}: {}", .issue.message(*.form))]
    Valence {
        op: String,
        form: OperatorForm,
        issue: ValenceIssue,
    },
    #[error("operator {op}: form {form} is an initialization directive, not a step operator")]
    NotStepOperator { op: String, form: OperatorForm },
    #[error("operator {op} belongs to the {} family and cannot be executed", .family.label())]
    NotExecutable { op: String, family: OperatorFamily },
}

fn count_word(n: usize) -> String {
    match n {
        2 => "two".into(),
        3 => "three".into(),
        _ => n.to_string(),
    }
}

/// Every violation found while building a [`Cao`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationErrors(pub Vec<ModelError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Cardinal abstract object: entities wired by operators plus the initial
/// assignment. This is the unit that gets parsed, analysed and executed.
#[derive(Clone, Debug)]
pub struct Cao {
    name: String,
    entities: Vec<EntityName>,
    operators: Vec<OperatorSpec>,
    init: IndexMap<EntityName, Cardinal>,
    index: HashMap<EntityName, usize>,
    operand_idx: Vec<Vec<usize>>,
    image_idx: Vec<Vec<usize>>,
    consumer: Vec<Option<usize>>,
}

impl PartialEq for Cao {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.entities == other.entities
            && self.operators == other.operators
            && self.init == other.init
    }
}

impl Eq for Cao {}

impl Cao {
    /// Builds an executable CAO. Only transforming operators are admitted.
    pub fn new(
        name: impl Into<String>,
        entities: impl IntoIterator<Item = impl Into<EntityName>>,
        operators: Vec<OperatorSpec>,
        init: impl IntoIterator<Item = (impl Into<EntityName>, impl Into<Cardinal>)>,
    ) -> Result<Cao, ValidationErrors> {
        Self::build(name.into(), entities, operators, init, true)
    }

    /// Like [`Cao::new`] but admits preserving and complex operators. The
    /// result can be classified but the engine refuses to run it.
    pub fn new_for_classification(
        name: impl Into<String>,
        entities: impl IntoIterator<Item = impl Into<EntityName>>,
        operators: Vec<OperatorSpec>,
        init: impl IntoIterator<Item = (impl Into<EntityName>, impl Into<Cardinal>)>,
    ) -> Result<Cao, ValidationErrors> {
        Self::build(name.into(), entities, operators, init, false)
    }

    fn build(
        name: String,
        entities: impl IntoIterator<Item = impl Into<EntityName>>,
        operators: Vec<OperatorSpec>,
        init: impl IntoIterator<Item = (impl Into<EntityName>, impl Into<Cardinal>)>,
        executable_only: bool,
    ) -> Result<Cao, ValidationErrors> {
        let entities: Vec<EntityName> = entities.into_iter().map(Into::into).collect();
        let mut errs = Vec::new();

        let mut index = HashMap::with_capacity(entities.len());
        for (k, e) in entities.iter().enumerate() {
            if e.id().is_empty() {
                errs.push(ModelError::EmptyEntityName);
            }
            if index.insert(e.clone(), k).is_some() {
                errs.push(ModelError::DuplicateEntity(e.clone()));
            }
        }

        let mut op_ids = HashSet::new();
        let mut outputs: IndexMap<&EntityName, Vec<String>> = IndexMap::new();
        for op in &operators {
            if !op_ids.insert(op.id.as_str()) {
                errs.push(ModelError::DuplicateOperator(op.id.clone()));
            }
            errs.extend(op.violations());
            if executable_only && op.family != OperatorFamily::Transforming {
                errs.push(ModelError::NotExecutable {
                    op: op.id.clone(),
                    family: op.family,
                });
            }
            let mut reported = HashSet::new();
            for e in op
                .operands
                .iter()
                .map(|o| &o.entity)
                .chain(op.images.iter().map(|i| &i.entity))
            {
                if !index.contains_key(e) && reported.insert(e) {
                    errs.push(ModelError::UnknownEntity {
                        op: Some(op.id.clone()),
                        entity: e.clone(),
                    });
                }
            }
            let mut fed = HashSet::new();
            for o in &op.operands {
                if fed.insert(&o.entity) {
                    outputs.entry(&o.entity).or_default().push(op.id.clone());
                }
            }
        }
        for (entity, ops) in &outputs {
            if ops.len() > 1 {
                errs.push(ModelError::MultipleOutputs {
                    entity: (*entity).clone(),
                    operators: ops.clone(),
                });
            }
        }

        let mut init_map = IndexMap::new();
        for (e, v) in init {
            let e: EntityName = e.into();
            if !index.contains_key(&e) {
                errs.push(ModelError::UnknownEntity {
                    op: None,
                    entity: e.clone(),
                });
            }
            init_map.insert(e, v.into());
        }

        if !errs.is_empty() {
            return Err(ValidationErrors(errs));
        }

        let operand_idx: Vec<Vec<usize>> = operators
            .iter()
            .map(|op| op.operands.iter().map(|o| index[&o.entity]).collect())
            .collect();
        let image_idx: Vec<Vec<usize>> = operators
            .iter()
            .map(|op| op.images.iter().map(|i| index[&i.entity]).collect())
            .collect();
        let mut consumer = vec![None; entities.len()];
        for (k, ops) in operand_idx.iter().enumerate() {
            for &e in ops {
                consumer[e] = Some(k);
            }
        }

        Ok(Cao {
            name,
            entities,
            operators,
            init: init_map,
            index,
            operand_idx,
            image_idx,
            consumer,
        })
    }

    /// Same structure with a different initial assignment.
    pub fn with_init(
        &self,
        init: impl IntoIterator<Item = (impl Into<EntityName>, impl Into<Cardinal>)>,
    ) -> Result<Cao, ValidationErrors> {
        let mut init_map = IndexMap::new();
        let mut errs = Vec::new();
        for (e, v) in init {
            let e: EntityName = e.into();
            if !self.index.contains_key(&e) {
                errs.push(ModelError::UnknownEntity {
                    op: None,
                    entity: e.clone(),
                });
            }
            init_map.insert(e, v.into());
        }
        if !errs.is_empty() {
            return Err(ValidationErrors(errs));
        }
        Ok(Cao {
            init: init_map,
            ..self.clone()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Entities in declaration order.
    pub fn entities(&self) -> &[EntityName] {
        &self.entities
    }

    /// Operators in declaration order.
    pub fn operators(&self) -> &[OperatorSpec] {
        &self.operators
    }

    pub fn operator(&self, id: &str) -> Option<&OperatorSpec> {
        self.operators.iter().find(|op| op.id == id)
    }

    pub fn operator_index(&self, id: &str) -> Option<usize> {
        self.operators.iter().position(|op| op.id == id)
    }

    /// Explicit initial assignments, in the order given.
    pub fn init(&self) -> &IndexMap<EntityName, Cardinal> {
        &self.init
    }

    pub fn index_of(&self, name: &EntityName) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Entity indices of each operator's operands.
    pub fn operand_indices(&self, op: usize) -> &[usize] {
        &self.operand_idx[op]
    }

    /// Entity indices of each operator's images.
    pub fn image_indices(&self, op: usize) -> &[usize] {
        &self.image_idx[op]
    }

    /// The operator reading from entity `e`, if any.
    pub fn consumer_of(&self, e: usize) -> Option<usize> {
        self.consumer[e]
    }

    pub fn is_executable(&self) -> bool {
        self.operators
            .iter()
            .all(|op| op.family == OperatorFamily::Transforming)
    }

    /// Initial cardinals aligned with [`Cao::entities`]; unassigned entities are 0.
    pub fn initial_cardinals(&self) -> Vec<Cardinal> {
        self.entities
            .iter()
            .map(|e| self.init.get(e).cloned().unwrap_or_default())
            .collect()
    }

    pub fn initial_entities(&self) -> Vec<CardinalAbstractEntity> {
        self.entities
            .iter()
            .cloned()
            .zip(self.initial_cardinals())
            .map(|(name, cardinal)| CardinalAbstractEntity { name, cardinal })
            .collect()
    }
}

/// The multiset of all cardinals at a step: the meaning of the CAO, with the
/// structure stripped away.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multicardinal {
    /// Sorted ascending, multiplicities kept.
    pub values: Vec<Cardinal>,
    pub named: IndexMap<EntityName, Cardinal>,
    pub step: usize,
}

impl Multicardinal {
    pub fn from_named(named: IndexMap<EntityName, Cardinal>, step: usize) -> Self {
        let mut values: Vec<Cardinal> = named.values().cloned().collect();
        values.sort();
        Self {
            values,
            named,
            step,
        }
    }

    /// Multiset equality, ignoring names and step.
    pub fn same_values(&self, other: &Multicardinal) -> bool {
        self.values == other.values
    }
}

impl fmt::Display for Multicardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// Structured snapshot: the CAO together with every entity's cardinal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multinumber<'a> {
    pub cao: &'a Cao,
    /// Aligned with `cao.entities()`.
    pub cardinals: Vec<Cardinal>,
    pub step: usize,
}

impl<'a> Multinumber<'a> {
    pub fn new(cao: &'a Cao, cardinals: Vec<Cardinal>, step: usize) -> Self {
        assert_eq!(
            cardinals.len(),
            cao.entities().len(),
            "one cardinal per entity"
        );
        Self {
            cao,
            cardinals,
            step,
        }
    }

    pub fn get(&self, name: &EntityName) -> Option<&Cardinal> {
        self.cao.index_of(name).map(|k| &self.cardinals[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntityName, &Cardinal)> {
        self.cao.entities().iter().zip(&self.cardinals)
    }

    pub fn cardinal_map(&self) -> IndexMap<EntityName, Cardinal> {
        self.iter().map(|(e, c)| (e.clone(), c.clone())).collect()
    }

    pub fn multicardinal(&self) -> Multicardinal {
        Multicardinal::from_named(self.cardinal_map(), self.step)
    }
}

pub(crate) fn is_one(n: &BigUint) -> bool {
    n.is_one()
}
