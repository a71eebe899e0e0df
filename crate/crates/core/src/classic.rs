//! Generators for the standard operator topologies, and the bridge to
//! classic positional, mixed-radix and rational-base numeration.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::engine::{self, Scheduler, DEFAULT_MAX_STEPS};
use crate::model::{
    Cao, Cardinal, Coord, EntityName, OperatorForm, OperatorSpec, ValidationErrors,
};
use crate::topology::{self, WeightError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClassicError {
    #[error("{what}: expected {expected} entries, got {got}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("chain width must be at least 1")]
    ZeroWidth,
    #[error("radix must be at least 1")]
    ZeroRadix,
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
    #[error(transparent)]
    Weights(Box<WeightError>),
}

impl From<WeightError> for ClassicError {
    fn from(e: WeightError) -> Self {
        ClassicError::Weights(Box::new(e))
    }
}

/// A linear chain `c0 → c1 → … → c(m−1)` of L operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    width: usize,
    radices: Vec<BigUint>,
    rates: Vec<BigUint>,
}

impl ChainSpec {
    pub fn new(radices: Vec<BigUint>, rates: Vec<BigUint>) -> Result<Self, ClassicError> {
        if rates.len() != radices.len() {
            return Err(ClassicError::Length {
                what: "rates",
                expected: radices.len(),
                got: rates.len(),
            });
        }
        if radices.iter().any(Zero::is_zero) {
            return Err(ClassicError::ZeroRadix);
        }
        Ok(Self {
            width: radices.len() + 1,
            radices,
            rates,
        })
    }

    /// All conversion rates 1.
    pub fn unit(radices: Vec<BigUint>) -> Result<Self, ClassicError> {
        let rates = vec![BigUint::one(); radices.len()];
        Self::new(radices, rates)
    }

    /// `width − 1` copies of `radix`, all rates 1.
    pub fn uniform(radix: u64, width: usize) -> Result<Self, ClassicError> {
        if width == 0 {
            return Err(ClassicError::ZeroWidth);
        }
        Self::unit(vec![BigUint::from(radix); width - 1])
    }

    pub fn from_u64(radices: &[u64], rates: &[u64]) -> Result<Self, ClassicError> {
        Self::new(
            radices.iter().map(|&n| n.into()).collect(),
            rates.iter().map(|&r| r.into()).collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn radices(&self) -> &[BigUint] {
        &self.radices
    }

    pub fn rates(&self) -> &[BigUint] {
        &self.rates
    }
}

pub fn chain_entity(k: usize) -> EntityName {
    EntityName::new(format!("c{k}"))
}

fn no_init() -> Vec<(EntityName, Cardinal)> {
    Vec::new()
}

/// `(L)^m`: entities `c0…c(m−1)`, operator `l{k}` from `c{k}` to `c{k+1}`.
pub fn make_chain(spec: &ChainSpec) -> Cao {
    let entities: Vec<EntityName> = (0..spec.width).map(chain_entity).collect();
    let ops = spec
        .radices
        .iter()
        .zip(&spec.rates)
        .enumerate()
        .map(|(k, (n, r))| {
            OperatorSpec::new(
                format!("l{k}"),
                OperatorForm::L,
                [(chain_entity(k), n.clone())],
                [(chain_entity(k + 1), r.clone())],
            )
        })
        .collect();
    Cao::new("chain", entities, ops, no_init()).expect("chain specs always yield valid CAOs")
}

fn named(prefix: &str, count: usize) -> Vec<EntityName> {
    (0..count)
        .map(|k| EntityName::new(format!("{prefix}{k}")))
        .collect()
}

/// Single operator from `x0…x(w−1)` to `y0…y(v−1)`. The form is the reduced
/// one matching the valence (L, D, F) unless `force_m` is set.
fn single_operator(
    name: &str,
    radices: &[BigUint],
    rates: &[BigUint],
    force_m: bool,
) -> Result<Cao, ClassicError> {
    if radices.is_empty() {
        return Err(ClassicError::Empty("radices"));
    }
    if rates.is_empty() {
        return Err(ClassicError::Empty("rates"));
    }
    let xs = named("x", radices.len());
    let ys = named("y", rates.len());
    let form = match (force_m, radices.len(), rates.len()) {
        (true, _, _) => OperatorForm::M,
        (false, 1, 1) => OperatorForm::L,
        (false, 1, _) => OperatorForm::D,
        (false, _, 1) => OperatorForm::F,
        _ => OperatorForm::M,
    };
    let op = OperatorSpec::new(
        "op",
        form,
        xs.iter().cloned().zip(radices.iter().cloned()),
        ys.iter().cloned().zip(rates.iter().cloned()),
    );
    Ok(Cao::new(
        name,
        xs.into_iter().chain(ys),
        vec![op],
        no_init(),
    )?)
}

/// One D operator (L when a single rate is given).
pub fn make_fan_out(radix: BigUint, rates: &[BigUint]) -> Result<Cao, ClassicError> {
    single_operator("fan_out", &[radix], rates, false)
}

/// One F operator (L when a single radix is given).
pub fn make_fan_in(radices: &[BigUint], rate: BigUint) -> Result<Cao, ClassicError> {
    single_operator("fan_in", radices, &[rate], false)
}

/// One M operator of valence `(w, v)`.
pub fn make_mixed(
    w: usize,
    v: usize,
    radices: &[BigUint],
    rates: &[BigUint],
) -> Result<Cao, ClassicError> {
    if radices.len() != w {
        return Err(ClassicError::Length {
            what: "radices",
            expected: w,
            got: radices.len(),
        });
    }
    if rates.len() != v {
        return Err(ClassicError::Length {
            what: "rates",
            expected: v,
            got: rates.len(),
        });
    }
    single_operator("mixed", radices, rates, true)
}

/// A `rows × cols` grid. Every cell but the last passes carries to its right
/// and lower neighbours (D), or to the one neighbour it has on the border (L).
pub fn make_lattice(rows: usize, cols: usize, radix: u64, rate: u64) -> Result<Cao, ClassicError> {
    if rows == 0 || cols == 0 {
        return Err(ClassicError::ZeroWidth);
    }
    if radix == 0 {
        return Err(ClassicError::ZeroRadix);
    }
    let cell = |r: usize, c: usize| {
        EntityName::with_coords(
            format!("c_{r}_{c}"),
            vec![Coord::Index(r as i64), Coord::Index(c as i64)],
        )
    };
    let mut entities = Vec::new();
    let mut ops = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            entities.push(cell(r, c));
            let mut images = Vec::new();
            if c + 1 < cols {
                images.push((cell(r, c + 1), BigUint::from(rate)));
            }
            if r + 1 < rows {
                images.push((cell(r + 1, c), BigUint::from(rate)));
            }
            if images.is_empty() {
                continue;
            }
            let form = if images.len() == 1 {
                OperatorForm::L
            } else {
                OperatorForm::D
            };
            ops.push(OperatorSpec::new(
                format!("o_{r}_{c}"),
                form,
                [(cell(r, c), BigUint::from(radix))],
                images,
            ));
        }
    }
    Ok(Cao::new("lattice", entities, ops, no_init())?)
}

/// Runs the chain from `c0 = value` to its fixpoint (synchronously) and
/// returns the final cardinals, low to high.
pub fn encode(value: &BigUint, spec: &ChainSpec) -> Vec<BigUint> {
    let cao = make_chain(spec)
        .with_init([(chain_entity(0), Cardinal::from(value.clone()))])
        .expect("c0 exists in every chain");
    let result = engine::run(&cao, Scheduler::Synchronous, DEFAULT_MAX_STEPS)
        .expect("chains are executable");
    result
        .final_state
        .cardinals
        .into_iter()
        .map(Cardinal::into_inner)
        .collect()
}

/// Σ digits[k]·w(c_k) with weights derived from the chain.
pub fn decode(digits: &[BigUint], spec: &ChainSpec) -> Result<BigRational, ClassicError> {
    if digits.len() != spec.width {
        return Err(ClassicError::Length {
            what: "digits",
            expected: spec.width,
            got: digits.len(),
        });
    }
    let cao = make_chain(spec);
    let weights = topology::derive_weights(&cao)?.aligned(&cao)?;
    Ok(weights
        .iter()
        .zip(digits)
        .map(|(w, d)| w * BigRational::from_integer(BigInt::from(d.clone())))
        .sum())
}

/// Textbook mixed-radix digits: `d_k = N mod n_k`, `N ← ⌊N / n_k⌋`; the last
/// entry holds what is left. Independent of the engine.
pub fn oracle_digits(value: &BigUint, radices: &[BigUint]) -> Vec<BigUint> {
    let mut rest = value.clone();
    let mut digits = Vec::with_capacity(radices.len() + 1);
    for n in radices {
        let (q, r) = rest.div_rem(n);
        digits.push(r);
        rest = q;
    }
    digits.push(rest);
    digits
}

/// Number of base-`radix` digits of `value` (at least 1): the chain width
/// needed for a unit-rate chain whose last entity ends below the radix.
pub fn positional_width(value: &BigUint, radix: u64) -> usize {
    assert!(radix >= 2, "positional width needs radix ≥ 2");
    let radix = BigUint::from(radix);
    let mut rest = value.clone();
    let mut width = 1;
    while rest >= radix {
        rest /= &radix;
        width += 1;
    }
    width
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Multinumber;
    use crate::operators::eval_operator;
    use crate::topology::{classify_sns, TopologyShape};
    use std::collections::HashMap;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn bigs(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| big(x)).collect()
    }

    #[test]
    fn chain_shapes() {
        let dec = make_chain(&ChainSpec::from_u64(&[10, 10], &[1, 1]).unwrap());
        assert_eq!(dec.entities().len(), 3);
        assert_eq!(dec.operators().len(), 2);
        assert_eq!(classify_sns(&dec).topology_shape, TopologyShape::Linear);

        let single = make_chain(&ChainSpec::uniform(10, 1).unwrap());
        assert_eq!(single.entities().len(), 1);
        assert!(single.operators().is_empty());
        assert_eq!(classify_sns(&single).topology_shape, TopologyShape::Linear);
    }

    #[test]
    fn chain_spec_rejects_bad_lists() {
        assert!(matches!(
            ChainSpec::from_u64(&[10, 10], &[1]),
            Err(ClassicError::Length { .. })
        ));
        assert_eq!(
            ChainSpec::from_u64(&[0], &[1]),
            Err(ClassicError::ZeroRadix)
        );
        assert_eq!(ChainSpec::uniform(2, 0), Err(ClassicError::ZeroWidth));
    }

    fn state(cao: &Cao, vals: &[u64]) -> HashMap<EntityName, Cardinal> {
        cao.entities()
            .iter()
            .cloned()
            .zip(vals.iter().map(|&v| Cardinal::from(v)))
            .collect()
    }

    #[test]
    fn single_operator_constructors_match_kernel_examples() {
        let d = make_fan_out(big(4), &bigs(&[2, 3])).unwrap();
        assert_eq!(d.operators()[0].form, OperatorForm::D);
        let e = eval_operator(&d.operators()[0], &state(&d, &[9, 0, 0])).unwrap();
        assert_eq!(e.transformants, bigs(&[4, 6]));

        let f = make_fan_in(&bigs(&[2, 3]), big(1)).unwrap();
        assert_eq!(f.operators()[0].form, OperatorForm::F);
        let e = eval_operator(&f.operators()[0], &state(&f, &[7, 10, 0])).unwrap();
        assert_eq!(e.common_carry, big(3));

        let m = make_mixed(2, 2, &bigs(&[3, 5]), &bigs(&[2, 1])).unwrap();
        assert_eq!(m.operators()[0].form, OperatorForm::M);
        let e = eval_operator(&m.operators()[0], &state(&m, &[10, 12, 0, 0])).unwrap();
        assert_eq!(e.transformants, bigs(&[4, 2]));

        assert!(make_mixed(2, 2, &bigs(&[3]), &bigs(&[2, 1])).is_err());
        assert!(make_fan_in(&[], big(1)).is_err());
    }

    #[test]
    fn lattice_is_recognized() {
        let cao = make_lattice(3, 4, 2, 1).unwrap();
        assert_eq!(cao.entities().len(), 12);
        assert_eq!(cao.operators().len(), 11);
        assert_eq!(classify_sns(&cao).topology_shape, TopologyShape::Lattice);
        // A one-row lattice is just a chain.
        let row = make_lattice(1, 4, 2, 1).unwrap();
        assert_eq!(classify_sns(&row).topology_shape, TopologyShape::Linear);
    }

    #[test]
    fn encode_examples() {
        let dec = ChainSpec::from_u64(&[10, 10], &[1, 1]).unwrap();
        assert_eq!(
            encode(&big(234), &dec),
            oracle_digits(&big(234), dec.radices())
        );
        assert_eq!(encode(&big(234), &dec), bigs(&[4, 3, 2]));

        let mixed = ChainSpec::from_u64(&[2, 3, 4], &[1, 1, 1]).unwrap();
        assert_eq!(encode(&big(23), &mixed), bigs(&[1, 2, 3, 0]));
        assert_eq!(
            oracle_digits(&big(23), mixed.radices()),
            bigs(&[1, 2, 3, 0])
        );

        let rational = ChainSpec::from_u64(&[3, 3, 3], &[2, 2, 2]).unwrap();
        assert_eq!(encode(&big(10), &rational), bigs(&[1, 0, 1, 2]));
    }

    #[test]
    fn decode_examples() {
        let dec = ChainSpec::from_u64(&[10, 10], &[1, 1]).unwrap();
        assert_eq!(
            decode(&bigs(&[4, 3, 2]), &dec).unwrap(),
            BigRational::from_integer(234.into())
        );
        let rational = ChainSpec::from_u64(&[3, 3, 3], &[2, 2, 2]).unwrap();
        assert_eq!(
            decode(&bigs(&[1, 0, 1, 2]), &rational).unwrap(),
            BigRational::from_integer(10.into())
        );
        assert!(decode(&bigs(&[0, 0, 0]), &dec).unwrap().is_zero());
        assert!(decode(&bigs(&[0, 0]), &dec).is_err());
    }

    #[test]
    fn oracle_zero() {
        assert_eq!(oracle_digits(&big(0), &bigs(&[10, 10])), bigs(&[0, 0, 0]));
    }

    #[test]
    fn width_calculator() {
        assert_eq!(positional_width(&big(0), 10), 1);
        assert_eq!(positional_width(&big(9), 10), 1);
        assert_eq!(positional_width(&big(10), 10), 2);
        assert_eq!(positional_width(&big(255), 2), 8);
        assert_eq!(positional_width(&big(256), 2), 9);
    }

    #[test]
    fn encoded_digits_form_a_multinumber() {
        let spec = ChainSpec::from_u64(&[10, 10], &[1, 1]).unwrap();
        let cao = make_chain(&spec);
        let digits: Vec<Cardinal> = encode(&big(234), &spec)
            .into_iter()
            .map(Cardinal::from)
            .collect();
        let mn = Multinumber::new(&cao, digits, 2);
        assert_eq!(mn.get(&chain_entity(2)), Some(&Cardinal::from(2u64)));
        assert_eq!(
            mn.multicardinal().values,
            vec![
                Cardinal::from(2u64),
                Cardinal::from(3u64),
                Cardinal::from(4u64)
            ]
        );
    }
}
