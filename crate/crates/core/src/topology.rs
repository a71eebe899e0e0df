//! Static analyses over a CAO: entity roles, cycles, classification of the
//! numeration system, and conservation weights.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use petgraph::algo::{tarjan_scc, toposort};
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::model::{
    is_one, Cao, Cardinal, Coord, EntityName, KindTag, OperatorFamily, OperatorForm,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntityRole {
    /// Has an output, no input.
    Initial,
    /// Has both.
    Intermediate,
    /// Input only.
    Final,
    /// Neither.
    Detached,
}

impl EntityRole {
    pub fn label(self) -> &'static str {
        match self {
            EntityRole::Initial => "initial",
            EntityRole::Intermediate => "intermediate",
            EntityRole::Final => "final",
            EntityRole::Detached => "detached",
        }
    }
}

pub fn classify_entities(cao: &Cao) -> IndexMap<EntityName, EntityRole> {
    let n = cao.entities().len();
    let mut has_input = vec![false; n];
    for op in 0..cao.operators().len() {
        for &e in cao.image_indices(op) {
            has_input[e] = true;
        }
    }
    cao.entities()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let role = match (has_input[k], cao.consumer_of(k).is_some()) {
                (false, true) => EntityRole::Initial,
                (true, true) => EntityRole::Intermediate,
                (true, false) => EntityRole::Final,
                (false, false) => EntityRole::Detached,
            };
            (e.clone(), role)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Entity(usize),
    Operator(usize),
}

/// Bipartite dependency graph: operand → operator → image.
fn dependency_graph(cao: &Cao) -> DiGraph<Node, ()> {
    let mut g = DiGraph::new();
    for k in 0..cao.entities().len() {
        g.add_node(Node::Entity(k));
    }
    let entity_count = cao.entities().len();
    for op in 0..cao.operators().len() {
        let o = g.add_node(Node::Operator(op));
        for &e in cao.operand_indices(op) {
            g.add_edge(NodeIndex::new(e), o, ());
        }
        for &e in cao.image_indices(op) {
            g.add_edge(o, NodeIndex::new(e), ());
        }
    }
    debug_assert_eq!(g.node_count(), entity_count + cao.operators().len());
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleNode {
    Entity(EntityName),
    Operator(String),
}

/// Closed alternating entity/operator path; the first entity is repeated at the end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle(pub Vec<CycleNode>);

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" -> ")?;
            }
            match n {
                CycleNode::Entity(e) => write!(f, "{e}")?,
                CycleNode::Operator(o) => write!(f, "{o}")?,
            }
        }
        Ok(())
    }
}

/// One representative cycle per strongly connected component; empty iff acyclic.
pub fn detect_cycles(cao: &Cao) -> Vec<Cycle> {
    let g = dependency_graph(cao);
    let mut sccs: Vec<Vec<NodeIndex>> =
        tarjan_scc(&g).into_iter().filter(|c| c.len() > 1).collect();
    for scc in &mut sccs {
        scc.sort();
    }
    sccs.sort();
    sccs.iter().map(|scc| cycle_within(cao, &g, scc)).collect()
}

pub fn is_acyclic(cao: &Cao) -> bool {
    detect_cycles(cao).is_empty()
}

fn cycle_within(cao: &Cao, g: &DiGraph<Node, ()>, scc: &[NodeIndex]) -> Cycle {
    let members: BTreeSet<NodeIndex> = scc.iter().copied().collect();
    // Entities occupy the low node indices, so the smallest member is an entity.
    let start = scc[0];
    // Breadth-first search for the shortest way back to `start`.
    let mut parent = IndexMap::new();
    let mut queue = std::collections::VecDeque::from([start]);
    let mut closing = None;
    while let Some(u) = queue.pop_front() {
        for v in g.neighbors(u) {
            if !members.contains(&v) {
                continue;
            }
            if v == start {
                closing = Some(u);
                break;
            }
            if !parent.contains_key(&v) {
                parent.insert(v, u);
                queue.push_back(v);
            }
        }
        if closing.is_some() {
            break;
        }
    }
    let mut path = vec![start];
    let mut cur = closing.expect("strongly connected component contains a cycle");
    while cur != start {
        path.push(cur);
        cur = parent[&cur];
    }
    path.push(start);
    let last = path.len() - 1;
    path[1..last].reverse();
    Cycle(
        path.into_iter()
            .map(|n| match g[n] {
                Node::Entity(e) => CycleNode::Entity(cao.entities()[e].clone()),
                Node::Operator(o) => CycleNode::Operator(cao.operators()[o].id.clone()),
            })
            .collect(),
    )
}

/// Operator indices in dependency order, or `None` if cyclic. Operators are
/// grouped into layers by their longest chain of predecessors; within a layer
/// declaration order is kept.
pub fn operator_order(cao: &Cao) -> Option<Vec<usize>> {
    let g = dependency_graph(cao);
    let order = toposort(&g, None).ok()?;
    let mut depth = vec![0usize; cao.operators().len()];
    for n in order {
        let Node::Operator(op) = g[n] else { continue };
        for &e in cao.image_indices(op) {
            if let Some(next) = cao.consumer_of(e) {
                depth[next] = depth[next].max(depth[op] + 1);
            }
        }
    }
    let mut ops: Vec<usize> = (0..cao.operators().len()).collect();
    ops.sort_by_key(|&op| (depth[op], op));
    Some(ops)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uncertainty {
    Deterministic,
    Stochastic,
    Fuzzy,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopologyShape {
    Linear,
    Tree,
    Lattice,
    Cyclic,
    Arbitrary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variability {
    Homogeneous,
    Heterogeneous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindLabel {
    Single(KindTag),
    Mixed,
}

impl Uncertainty {
    pub fn label(self) -> &'static str {
        match self {
            Uncertainty::Deterministic => "deterministic",
            Uncertainty::Stochastic => "stochastic",
            Uncertainty::Fuzzy => "fuzzy",
            Uncertainty::Mixed => "mixed",
        }
    }
}

impl TopologyShape {
    pub fn label(self) -> &'static str {
        match self {
            TopologyShape::Linear => "linear",
            TopologyShape::Tree => "tree-like",
            TopologyShape::Lattice => "lattice",
            TopologyShape::Cyclic => "cyclic",
            TopologyShape::Arbitrary => "arbitrary",
        }
    }
}

impl Variability {
    pub fn label(self) -> &'static str {
        match self {
            Variability::Homogeneous => "homogeneous",
            Variability::Heterogeneous => "heterogeneous",
        }
    }
}

impl KindLabel {
    pub fn label(self) -> &'static str {
        match self {
            KindLabel::Single(k) => k.label(),
            KindLabel::Mixed => "mixed",
        }
    }
}

/// Classification features of the numeration system a CAO belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationRecord {
    pub name: String,
    pub family_influence: OperatorFamily,
    pub uncertainty: Uncertainty,
    pub topology_shape: TopologyShape,
    pub variability: Variability,
    pub kind_label: KindLabel,
    /// Radix vector of every operator, declaration order.
    pub radices: Vec<Vec<BigUint>>,
    /// Conversion vector of every operator, declaration order.
    pub rates: Vec<Vec<BigUint>>,
}

impl ClassificationRecord {
    /// `(feature, value, is_default)` in listing order.
    pub fn features(&self) -> Vec<(&'static str, &'static str, bool)> {
        vec![
            (
                "influence",
                self.family_influence.label(),
                self.family_influence == OperatorFamily::Transforming,
            ),
            (
                "uncertainty",
                self.uncertainty.label(),
                self.uncertainty == Uncertainty::Deterministic,
            ),
            (
                "topology",
                self.topology_shape.label(),
                self.topology_shape == TopologyShape::Linear,
            ),
            (
                "variability",
                self.variability.label(),
                self.variability == Variability::Homogeneous,
            ),
            (
                "kind",
                self.kind_label.label(),
                self.kind_label == KindLabel::Single(KindTag::RadixMultiplicity),
            ),
        ]
    }

    /// Radix (and non-unit rate) suffix, e.g. `radix 10` or `radices 2,3,4`.
    pub fn parameters(&self) -> Option<String> {
        if self.radices.is_empty() {
            return None;
        }
        let vector = |v: &[BigUint]| {
            if v.len() == 1 {
                v[0].to_string()
            } else {
                let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                format!("({})", parts.join(","))
            }
        };
        let unit_rates = self.rates.iter().flatten().all(is_one);
        let mut out = match self.variability {
            Variability::Homogeneous => format!("radix {}", vector(&self.radices[0])),
            Variability::Heterogeneous => {
                let all: Vec<String> = self.radices.iter().map(|v| vector(v)).collect();
                format!("radices {}", all.join(","))
            }
        };
        if !unit_rates {
            match self.variability {
                Variability::Homogeneous => {
                    out.push_str(&format!(", rate {}", vector(&self.rates[0])))
                }
                Variability::Heterogeneous => {
                    let all: Vec<String> = self.rates.iter().map(|v| vector(v)).collect();
                    out.push_str(&format!(", rates {}", all.join(",")));
                }
            }
        }
        Some(out)
    }
}

impl fmt::Display for ClassificationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.features().into_iter().map(|(_, v, _)| v).collect();
        f.write_str(&labels.join(", "))?;
        if let Some(p) = self.parameters() {
            write!(f, "; {p}")?;
        }
        Ok(())
    }
}

pub fn classify_sns(cao: &Cao) -> ClassificationRecord {
    let ops = cao.operators();
    let family_influence = {
        let fams: BTreeSet<u8> = ops.iter().map(|o| o.family as u8).collect();
        match ops.first() {
            Some(first) if fams.len() == 1 => first.family,
            None => OperatorFamily::Transforming,
            Some(_) => OperatorFamily::Complex,
        }
    };
    let radices: Vec<Vec<BigUint>> = ops.iter().map(|o| o.radices().cloned().collect()).collect();
    let rates: Vec<Vec<BigUint>> = ops.iter().map(|o| o.rates().cloned().collect()).collect();
    let homogeneous =
        radices.windows(2).all(|w| w[0] == w[1]) && rates.windows(2).all(|w| w[0] == w[1]);
    let kinds: Vec<KindTag> = ops.iter().map(|o| o.kind.tag()).collect();
    let kind_label = match kinds.first() {
        None => KindLabel::Single(KindTag::RadixMultiplicity),
        Some(&k) if kinds.iter().all(|&x| x == k) => KindLabel::Single(k),
        Some(_) => KindLabel::Mixed,
    };
    ClassificationRecord {
        name: cao.name().to_owned(),
        family_influence,
        uncertainty: Uncertainty::Deterministic,
        topology_shape: shape_of(cao),
        variability: if homogeneous {
            Variability::Homogeneous
        } else {
            Variability::Heterogeneous
        },
        kind_label,
        radices,
        rates,
    }
}

fn shape_of(cao: &Cao) -> TopologyShape {
    if !is_acyclic(cao) {
        return TopologyShape::Cyclic;
    }
    if is_linear(cao) {
        return TopologyShape::Linear;
    }
    if is_grid_lattice(cao) {
        return TopologyShape::Lattice;
    }
    let mut inputs = vec![0usize; cao.entities().len()];
    for op in 0..cao.operators().len() {
        for &e in cao.image_indices(op) {
            inputs[e] += 1;
        }
    }
    if inputs.iter().all(|&c| c <= 1) {
        TopologyShape::Tree
    } else {
        TopologyShape::Arbitrary
    }
}

/// All operators are L and the non-detached entities form one path.
fn is_linear(cao: &Cao) -> bool {
    let ops = cao.operators();
    if ops.iter().any(|o| o.form != OperatorForm::L) {
        return false;
    }
    if ops.is_empty() {
        return true;
    }
    let roles = classify_entities(cao);
    let count = |r: EntityRole| roles.values().filter(|&&x| x == r).count();
    let mut inputs = vec![0usize; cao.entities().len()];
    for op in 0..ops.len() {
        for &e in cao.image_indices(op) {
            inputs[e] += 1;
        }
    }
    if count(EntityRole::Initial) != 1
        || count(EntityRole::Final) != 1
        || inputs.iter().any(|&c| c > 1)
    {
        return false;
    }
    // Walk from the initial entity; the path must visit every operator.
    let start = roles
        .values()
        .position(|&r| r == EntityRole::Initial)
        .expect("one initial entity");
    let mut visited = 0;
    let mut cur = start;
    while let Some(op) = cao.consumer_of(cur) {
        visited += 1;
        cur = cao.image_indices(op)[0];
    }
    visited == ops.len()
}

/// Recognizes the rectangular grids built by the lattice generator: every
/// entity has two integer coordinates covering a full grid, and every
/// operator moves from a cell to some of its right/down neighbours.
fn is_grid_lattice(cao: &Cao) -> bool {
    let mut cells = Vec::with_capacity(cao.entities().len());
    for e in cao.entities() {
        match e.coords() {
            [Coord::Index(r), Coord::Index(c)] => cells.push((*r, *c)),
            _ => return false,
        }
    }
    if cells.len() < 4 || cao.operators().is_empty() {
        return false;
    }
    let rows: BTreeSet<i64> = cells.iter().map(|c| c.0).collect();
    let cols: BTreeSet<i64> = cells.iter().map(|c| c.1).collect();
    if rows.len() < 2 || cols.len() < 2 || rows.len() * cols.len() != cells.len() {
        return false;
    }
    (0..cao.operators().len()).all(|op| {
        let [src] = cao.operand_indices(op) else {
            return false;
        };
        let (r, c) = cells[*src];
        cao.image_indices(op)
            .iter()
            .all(|&img| cells[img] == (r + 1, c) || cells[img] == (r, c + 1))
    })
}

/// Positive exact weights per entity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightAssignment {
    pub weights: IndexMap<EntityName, BigRational>,
}

impl WeightAssignment {
    pub fn get(&self, e: &EntityName) -> Option<&BigRational> {
        self.weights.get(e)
    }

    /// Weights aligned with the CAO's entity order.
    pub fn aligned(&self, cao: &Cao) -> Result<Vec<BigRational>, WeightError> {
        cao.entities()
            .iter()
            .map(|e| {
                self.weights
                    .get(e)
                    .cloned()
                    .ok_or_else(|| WeightError::MissingWeight(e.clone()))
            })
            .collect()
    }

    /// Σ w(e)·N(e) for cardinals aligned with the CAO's entities.
    pub fn total(&self, cao: &Cao, cardinals: &[Cardinal]) -> Result<BigRational, WeightError> {
        Ok(weighted_total(&self.aligned(cao)?, cardinals))
    }
}

/// Σ w·N over aligned slices.
pub fn weighted_total(weights: &[BigRational], cardinals: &[Cardinal]) -> BigRational {
    weights
        .iter()
        .zip(cardinals)
        .filter(|(_, c)| !c.is_zero())
        .fold(BigRational::zero(), |acc, (w, c)| {
            acc + w * BigRational::from_integer(BigInt::from(c.value().clone()))
        })
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("no weight for entity {0}")]
    MissingWeight(EntityName),
    #[error("weights are only derived for acyclic CAOs")]
    Cyclic,
    #[error("operator {op}: weights of {} are underdetermined", names(.unknowns))]
    Underdetermined {
        op: String,
        unknowns: Vec<EntityName>,
    },
    #[error("operator {op}: {entity} already has weight {existing} but the operator requires {required}")]
    Inconsistent {
        op: String,
        entity: EntityName,
        existing: Box<BigRational>,
        required: Box<BigRational>,
    },
    #[error("operator {op}: {entity} would need the non-positive weight {required}")]
    NonPositive {
        op: String,
        entity: EntityName,
        required: Box<BigRational>,
    },
    #[error("operator {op} is not radix-multiplicity; its value conversion is not linear")]
    UnsupportedKind { op: String },
}

fn names(v: &[EntityName]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightCheck {
    pub consistent: bool,
    /// `Σ_images w·r − Σ_operands w·n` per radix-multiplicity operator.
    pub residuals: Vec<(String, BigRational)>,
}

fn ratio(v: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

pub fn check_weights(cao: &Cao, weights: &WeightAssignment) -> Result<WeightCheck, WeightError> {
    let w = weights.aligned(cao)?;
    let mut residuals = Vec::new();
    for (k, op) in cao.operators().iter().enumerate() {
        if op.kind.tag() != KindTag::RadixMultiplicity || op.family != OperatorFamily::Transforming
        {
            continue;
        }
        let inflow: BigRational = cao
            .operand_indices(k)
            .iter()
            .zip(op.radices())
            .map(|(&e, n)| &w[e] * ratio(n))
            .sum();
        let outflow: BigRational = cao
            .image_indices(k)
            .iter()
            .zip(op.rates())
            .map(|(&e, r)| &w[e] * ratio(r))
            .sum();
        residuals.push((op.id.clone(), outflow - inflow));
    }
    Ok(WeightCheck {
        consistent: residuals.iter().all(|(_, r)| r.is_zero()),
        residuals,
    })
}

/// Seeds every initial entity with weight 1 and propagates through the
/// operators in dependency order.
pub fn derive_weights(cao: &Cao) -> Result<WeightAssignment, WeightError> {
    let order = operator_order(cao).ok_or(WeightError::Cyclic)?;
    let n = cao.entities().len();
    let mut w: Vec<Option<BigRational>> = vec![None; n];
    let roles = classify_entities(cao);
    for (k, role) in roles.values().enumerate() {
        if matches!(role, EntityRole::Initial | EntityRole::Detached) {
            w[k] = Some(BigRational::one());
        }
    }
    for op in order {
        let spec = &cao.operators()[op];
        if spec.kind.tag() != KindTag::RadixMultiplicity {
            return Err(WeightError::UnsupportedKind {
                op: spec.id.clone(),
            });
        }
        let mut inflow = BigRational::zero();
        for (&e, radix) in cao.operand_indices(op).iter().zip(spec.radices()) {
            // Reached only through zero-rate images so far: unconstrained.
            let we = w[e].get_or_insert_with(BigRational::one);
            inflow += &*we * ratio(radix);
        }
        let mut fixed = BigRational::zero();
        let mut unknown = Vec::new();
        for (&e, rate) in cao.image_indices(op).iter().zip(spec.rates()) {
            if rate.is_zero() {
                continue;
            }
            match &w[e] {
                Some(we) => fixed += we * ratio(rate),
                None => unknown.push((e, rate)),
            }
        }
        match unknown.as_slice() {
            [] => {
                if fixed != inflow {
                    // Report the clash on the last weighted image.
                    let (e, rate) = cao
                        .image_indices(op)
                        .iter()
                        .zip(spec.rates())
                        .filter(|(_, r)| !r.is_zero())
                        .last()
                        .expect("at least one positive rate");
                    let existing = w[*e].clone().expect("weighted image");
                    let required = (&inflow - (&fixed - &existing * ratio(rate))) / ratio(rate);
                    return Err(WeightError::Inconsistent {
                        op: spec.id.clone(),
                        entity: cao.entities()[*e].clone(),
                        existing: Box::new(existing),
                        required: Box::new(required),
                    });
                }
            }
            [(e, rate)] => {
                let required = (&inflow - &fixed) / ratio(rate);
                if !required.is_positive() {
                    return Err(WeightError::NonPositive {
                        op: spec.id.clone(),
                        entity: cao.entities()[*e].clone(),
                        required: Box::new(required),
                    });
                }
                w[*e] = Some(required);
            }
            many => {
                return Err(WeightError::Underdetermined {
                    op: spec.id.clone(),
                    unknowns: many
                        .iter()
                        .map(|(e, _)| cao.entities()[*e].clone())
                        .collect(),
                })
            }
        }
    }
    Ok(WeightAssignment {
        weights: cao
            .entities()
            .iter()
            .cloned()
            .zip(w.into_iter().map(|x| x.unwrap_or_else(BigRational::one)))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{OperatorKind, OperatorSpec};

    fn none() -> [(&'static str, u64); 0] {
        []
    }

    fn line(id: &str, from: &str, n: u64, to: &str, r: u64) -> OperatorSpec {
        OperatorSpec::new(id, OperatorForm::L, [(from, n)], [(to, r)])
    }

    fn chain(radices: &[u64], rates: &[u64]) -> Cao {
        let names: Vec<String> = (0..=radices.len()).map(|k| format!("c{k}")).collect();
        let ops = (0..radices.len())
            .map(|k| {
                line(
                    &format!("l{k}"),
                    &names[k],
                    radices[k],
                    &names[k + 1],
                    rates[k],
                )
            })
            .collect();
        Cao::new("chain", names.iter().map(String::as_str), ops, none()).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn weights(cao: &Cao, w: &[BigRational]) -> WeightAssignment {
        WeightAssignment {
            weights: cao
                .entities()
                .iter()
                .cloned()
                .zip(w.iter().cloned())
                .collect(),
        }
    }

    fn two_loop() -> Cao {
        Cao::new(
            "loop",
            ["i", "j"],
            vec![line("L1", "i", 2, "j", 1), line("L2", "j", 2, "i", 1)],
            none(),
        )
        .unwrap()
    }

    fn fan_in() -> Cao {
        Cao::new(
            "f",
            ["i", "j", "k"],
            vec![OperatorSpec::new(
                "f",
                OperatorForm::F,
                [("i", 2u64), ("j", 3)],
                [("k", 1u64)],
            )],
            none(),
        )
        .unwrap()
    }

    #[test]
    fn chain_roles() {
        let roles = classify_entities(&chain(&[10, 10], &[1, 1]));
        assert_eq!(
            roles.values().copied().collect::<Vec<_>>(),
            vec![
                EntityRole::Initial,
                EntityRole::Intermediate,
                EntityRole::Final
            ]
        );
        let roles = classify_entities(&fan_in());
        assert_eq!(
            roles.values().copied().collect::<Vec<_>>(),
            vec![EntityRole::Initial, EntityRole::Initial, EntityRole::Final]
        );
    }

    #[test]
    fn unreferenced_entity_is_detached() {
        let cao = Cao::new(
            "x",
            ["a", "b", "x"],
            vec![line("l", "a", 2, "b", 1)],
            none(),
        )
        .unwrap();
        assert_eq!(
            classify_entities(&cao)[&EntityName::new("x")],
            EntityRole::Detached
        );
    }

    #[test]
    fn cycles() {
        assert!(detect_cycles(&chain(&[10, 10], &[1, 1])).is_empty());
        let cycles = detect_cycles(&two_loop());
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].to_string(), "i -> L1 -> j -> L2 -> i");
    }

    #[test]
    fn classify_decimal_chain() {
        let rec = classify_sns(&chain(&[10, 10], &[1, 1]));
        assert_eq!(rec.family_influence, OperatorFamily::Transforming);
        assert_eq!(rec.uncertainty, Uncertainty::Deterministic);
        assert_eq!(rec.topology_shape, TopologyShape::Linear);
        assert_eq!(rec.variability, Variability::Homogeneous);
        assert_eq!(
            rec.kind_label,
            KindLabel::Single(KindTag::RadixMultiplicity)
        );
        assert_eq!(
            rec.to_string(),
            "transforming, deterministic, linear, homogeneous, radix-multiplicity; radix 10"
        );
    }

    #[test]
    fn classify_variants() {
        let rec = classify_sns(&chain(&[2, 3, 4], &[1, 1, 1]));
        assert_eq!(rec.variability, Variability::Heterogeneous);
        assert!(rec
            .to_string()
            .ends_with("heterogeneous, radix-multiplicity; radices 2,3,4"));

        let rec = classify_sns(&chain(&[3, 3], &[2, 2]));
        assert!(rec.to_string().ends_with("; radix 3, rate 2"));

        assert_eq!(
            classify_sns(&two_loop()).topology_shape,
            TopologyShape::Cyclic
        );
        assert_eq!(classify_sns(&fan_in()).topology_shape, TopologyShape::Tree);
    }

    #[test]
    fn fan_in_of_lines_is_arbitrary() {
        let cao = Cao::new(
            "v",
            ["a", "b", "c"],
            vec![line("x", "a", 2, "c", 1), line("y", "b", 2, "c", 1)],
            none(),
        )
        .unwrap();
        assert_eq!(classify_sns(&cao).topology_shape, TopologyShape::Arbitrary);
    }

    #[test]
    fn mixed_kinds_and_families() {
        let cao = Cao::new_for_classification(
            "m",
            ["a", "b", "c"],
            vec![
                line("x", "a", 2, "b", 1).with_kind(OperatorKind::RadixExcessValue),
                line("y", "b", 2, "c", 1).with_family(OperatorFamily::Preserving),
            ],
            none(),
        )
        .unwrap();
        let rec = classify_sns(&cao);
        assert_eq!(rec.kind_label, KindLabel::Mixed);
        assert_eq!(rec.family_influence, OperatorFamily::Complex);
    }

    #[test]
    fn check_weights_examples() {
        let dec = chain(&[10, 10], &[1, 1]);
        assert!(
            check_weights(&dec, &weights(&dec, &[q(1, 1), q(10, 1), q(100, 1)]))
                .unwrap()
                .consistent
        );
        let rat = chain(&[3, 3, 3], &[2, 2, 2]);
        assert!(
            check_weights(&rat, &weights(&rat, &[q(1, 1), q(3, 2), q(9, 4), q(27, 8)]))
                .unwrap()
                .consistent
        );
        let f = fan_in();
        assert!(
            check_weights(&f, &weights(&f, &[q(1, 1), q(1, 1), q(5, 1)]))
                .unwrap()
                .consistent
        );

        let bad = check_weights(&dec, &weights(&dec, &[q(1, 1), q(10, 1), q(99, 1)])).unwrap();
        assert!(!bad.consistent);
        assert_eq!(bad.residuals[1], ("l1".to_string(), q(-1, 1)));

        assert!(matches!(
            check_weights(&dec, &weights(&dec, &[q(1, 1)])),
            Err(WeightError::MissingWeight(_))
        ));
    }

    #[test]
    fn derive_weights_examples() {
        let dec = chain(&[10, 10], &[1, 1]);
        let w = derive_weights(&dec).unwrap();
        assert_eq!(w.aligned(&dec).unwrap(), vec![q(1, 1), q(10, 1), q(100, 1)]);

        let f = fan_in();
        assert_eq!(
            derive_weights(&f).unwrap().aligned(&f).unwrap(),
            vec![q(1, 1), q(1, 1), q(5, 1)]
        );

        let rat = chain(&[3, 3, 3], &[2, 2, 2]);
        assert_eq!(
            derive_weights(&rat).unwrap().aligned(&rat).unwrap(),
            vec![q(1, 1), q(3, 2), q(9, 4), q(27, 8)]
        );

        let d = Cao::new(
            "d",
            ["i", "j", "k"],
            vec![OperatorSpec::new(
                "d",
                OperatorForm::D,
                [("i", 4u64)],
                [("j", 2u64), ("k", 3)],
            )],
            none(),
        )
        .unwrap();
        assert!(matches!(
            derive_weights(&d),
            Err(WeightError::Underdetermined { .. })
        ));

        assert_eq!(derive_weights(&two_loop()), Err(WeightError::Cyclic));
    }

    #[test]
    fn conflicting_paths_are_inconsistent() {
        let cao = Cao::new(
            "clash",
            ["a", "b", "c"],
            vec![line("x", "a", 2, "c", 1), line("y", "b", 3, "c", 1)],
            none(),
        )
        .unwrap();
        let err = derive_weights(&cao).unwrap_err();
        assert!(matches!(err, WeightError::Inconsistent { ref entity, .. } if entity.id() == "c"));
    }

    #[test]
    fn zero_rate_image_stays_unconstrained() {
        let cao = Cao::new(
            "z",
            ["a", "b", "c"],
            vec![OperatorSpec::new(
                "d",
                OperatorForm::D,
                [("a", 2u64)],
                [("b", 1u64), ("c", 0)],
            )],
            none(),
        )
        .unwrap();
        let w = derive_weights(&cao).unwrap();
        assert!(check_weights(&cao, &w).unwrap().consistent);
        assert_eq!(w.aligned(&cao).unwrap(), vec![q(1, 1), q(2, 1), q(1, 1)]);
    }

    #[test]
    fn operator_order_respects_dependencies() {
        let cao = Cao::new(
            "rev",
            ["a", "b", "c"],
            vec![
                line("second", "b", 2, "c", 1),
                line("first", "a", 2, "b", 1),
            ],
            none(),
        )
        .unwrap();
        assert_eq!(operator_order(&cao), Some(vec![1, 0]));
        assert_eq!(operator_order(&two_loop()), None);
    }

    #[test]
    fn operator_order_is_layered() {
        let cao = crate::dsl::parse(include_str!("../scenarios/layered.sns")).unwrap();
        // m; then p and d side by side; then f.
        assert_eq!(operator_order(&cao), Some(vec![0, 1, 2, 3]));
        let cao = crate::dsl::parse(
            "cao x { entities: a, b, c, d, e;
               op late: L (c/2) -> (d*1); op side: L (e/2) -> (d*1); op early: L (a/2) -> (c*1); }",
        )
        .unwrap();
        assert_eq!(operator_order(&cao), Some(vec![1, 2, 0]));
    }
}
