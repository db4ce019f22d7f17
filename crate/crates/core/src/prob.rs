//! Discrete joint distributions and the conditional-independence test on
//! them.
//!
//! Tables are generic over a [`Probability`] scalar. Rational scalars give
//! exact answers, which matters when zero-probability configurations decide
//! the outcome; floats compare conditional probabilities with a tolerance.

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Num, One};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsep::DiGraph;
use crate::element::{
    enumerate_canonical, Canonical, CanonicalStatement, Element, ElementSet, Statement,
};
use crate::error::{Error, Result};

/// Largest variable count accepted by [`DiscreteJoint::all_ci`].
pub const ALL_CI_GUARD: usize = 6;

/// Tolerance on conditional probabilities for `f64` tables.
pub const F64_TOLERANCE: f64 = 1e-9;

pub trait Probability: Clone + Debug + PartialOrd + Num + Sum {
    fn from_ratio(num: u64, den: u64) -> Self;

    /// Equality of two probabilities under the scalar's comparison rule.
    fn close_to(&self, other: &Self) -> bool;

    /// Whether a table total is acceptably close to one.
    fn is_unit_total(&self) -> bool;
}

impl Probability for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn close_to(&self, other: &Self) -> bool {
        (self - other).abs() <= F64_TOLERANCE
    }

    fn is_unit_total(&self) -> bool {
        (self - 1.0).abs() <= 1e-12
    }
}

impl Probability for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f32 / den as f32
    }

    fn close_to(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-5
    }

    fn is_unit_total(&self) -> bool {
        (self - 1.0).abs() <= 1e-5
    }
}

impl Probability for Rational64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        Rational64::new(num as i64, den as i64)
    }

    fn close_to(&self, other: &Self) -> bool {
        self == other
    }

    fn is_unit_total(&self) -> bool {
        self.is_one()
    }
}

impl Probability for BigRational {
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn close_to(&self, other: &Self) -> bool {
        self == other
    }

    fn is_unit_total(&self) -> bool {
        self.is_one()
    }
}

/// Dense probability table. Rows are in mixed-radix order with the first
/// variable most significant.
#[derive(Clone, PartialEq, Debug)]
pub struct DiscreteJoint<P> {
    variables: Vec<Element>,
    cardinalities: Vec<usize>,
    probabilities: Vec<P>,
}

impl<P: Probability> DiscreteJoint<P> {
    pub fn new(
        variables: Vec<Element>,
        cardinalities: Vec<usize>,
        probabilities: Vec<P>,
    ) -> Result<Self> {
        if variables.len() != cardinalities.len() {
            return Err(Error::InvalidJoint("one cardinality per variable".into()));
        }
        let vs: ElementSet = variables.iter().copied().collect();
        if vs.len() != variables.len() {
            return Err(Error::InvalidJoint("repeated variable".into()));
        }
        if cardinalities.contains(&0) {
            return Err(Error::InvalidJoint("cardinalities must be positive".into()));
        }
        let rows: usize = cardinalities.iter().product();
        if probabilities.len() != rows {
            return Err(Error::InvalidJoint(format!(
                "expected {rows} probabilities, got {}",
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|p| *p < P::zero()) {
            return Err(Error::InvalidJoint("negative probability".into()));
        }
        let total: P = probabilities.iter().cloned().sum();
        if !total.is_unit_total() {
            return Err(Error::InvalidJoint(
                "probabilities do not sum to one".into(),
            ));
        }
        Ok(DiscreteJoint {
            variables,
            cardinalities,
            probabilities,
        })
    }

    /// All-binary table over `variables` from a row function on bit values.
    pub fn binary_from_fn(
        variables: Vec<Element>,
        mut f: impl FnMut(&[usize]) -> P,
    ) -> Result<Self> {
        let n = variables.len();
        let probs = (0..1usize << n)
            .map(|row| {
                let bits: Vec<usize> = (0..n).map(|i| (row >> (n - 1 - i)) & 1).collect();
                f(&bits)
            })
            .collect();
        Self::new(variables, vec![2; n], probs)
    }

    pub fn variables(&self) -> &[Element] {
        &self.variables
    }

    pub fn variable_set(&self) -> ElementSet {
        self.variables.iter().copied().collect()
    }

    pub fn probabilities(&self) -> &[P] {
        &self.probabilities
    }

    fn digits(&self, mut row: usize) -> Vec<usize> {
        let mut d = vec![0; self.variables.len()];
        for i in (0..d.len()).rev() {
            d[i] = row % self.cardinalities[i];
            row /= self.cardinalities[i];
        }
        d
    }

    fn sub_index(&self, digits: &[usize], s: ElementSet) -> usize {
        let mut idx = 0;
        for (i, v) in self.variables.iter().enumerate() {
            if s.contains(*v) {
                idx = idx * self.cardinalities[i] + digits[i];
            }
        }
        idx
    }

    fn sub_size(&self, s: ElementSet) -> usize {
        self.variables
            .iter()
            .zip(&self.cardinalities)
            .filter(|(v, _)| s.contains(**v))
            .map(|(_, c)| c)
            .product()
    }

    fn marginal(&self, s: ElementSet) -> Vec<P> {
        let mut out = vec![P::zero(); self.sub_size(s)];
        for (row, p) in self.probabilities.iter().enumerate() {
            let i = self.sub_index(&self.digits(row), s);
            out[i] = out[i].clone() + p.clone();
        }
        out
    }

    /// `P{x | z, y} = P{x | z}` for every configuration with `P{z} > 0`
    /// and `P{z, y} > 0`.
    pub fn ci_holds(&self, x: ElementSet, z: ElementSet, y: ElementSet) -> Result<bool> {
        if let Some(e) = x.union(z).union(y).difference(self.variable_set()).first() {
            return Err(Error::UnknownElement(format!("#{}", e.index())));
        }
        let s = match Statement::new(x, z, y).canonicalize()? {
            Canonical::TriviallyTrue => return Ok(true),
            Canonical::Statement(s) => s,
        };
        Ok(self.ci_holds_canonical(&s))
    }

    pub fn ci_holds_canonical(&self, s: &CanonicalStatement) -> bool {
        let (x, z, y) = (s.x(), s.z(), s.y());
        let xz = x.union(z);
        let zy = z.union(y);
        let xzy = xz.union(y);
        let (p_z, p_xz, p_zy, p_xzy) = (
            self.marginal(z),
            self.marginal(xz),
            self.marginal(zy),
            self.marginal(xzy),
        );
        let mut seen = vec![false; p_xzy.len()];
        for row in 0..self.probabilities.len() {
            let d = self.digits(row);
            let i_xzy = self.sub_index(&d, xzy);
            if std::mem::replace(&mut seen[i_xzy], true) {
                continue;
            }
            let pz = &p_z[self.sub_index(&d, z)];
            let pzy = &p_zy[self.sub_index(&d, zy)];
            if !(*pz > P::zero() && *pzy > P::zero()) {
                continue;
            }
            let with_y = p_xzy[i_xzy].clone() / pzy.clone();
            let without_y = p_xz[self.sub_index(&d, xz)].clone() / pz.clone();
            if !with_y.close_to(&without_y) {
                return false;
            }
        }
        true
    }

    /// Every canonical statement over the table's variables that holds.
    pub fn all_ci(&self) -> Result<BTreeSet<CanonicalStatement>> {
        Ok(enumerate_canonical(self.variable_set(), ALL_CI_GUARD)?
            .into_iter()
            .filter(|s| self.ci_holds_canonical(s))
            .collect())
    }
}

/// Random binary joint factorizing along `d`. Tables are drawn in
/// topological order from a ChaCha8 stream seeded with `seed`; ordinary
/// rows use `P(v = 1 | parents) = k/16` with `k` in `1..=15`, deterministic
/// rows put all mass on a random value.
pub fn sample_dag_joint<P: Probability>(d: &DiGraph, seed: u64) -> DiscreteJoint<P> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<Element> = d.nodes().iter().collect();
    let pos = |e: Element| vars.iter().position(|&v| v == e).unwrap();
    let mut one_given_parents: Vec<Vec<P>> = vec![Vec::new(); vars.len()];
    let mut parent_pos: Vec<Vec<usize>> = vec![Vec::new(); vars.len()];
    for v in d.topological_order() {
        let i = pos(v);
        parent_pos[i] = d.parents(v).iter().map(pos).collect();
        let rows = 1usize << parent_pos[i].len();
        one_given_parents[i] = (0..rows)
            .map(|_| {
                if d.deterministic().contains(v) {
                    P::from_ratio(rng.gen_range(0..=1), 1)
                } else {
                    P::from_ratio(rng.gen_range(1..=15), 16)
                }
            })
            .collect();
    }
    DiscreteJoint::binary_from_fn(vars.clone(), |bits| {
        let mut p = P::one();
        for i in 0..bits.len() {
            let cfg = parent_pos[i].iter().fold(0, |acc, &j| (acc << 1) | bits[j]);
            let one = one_given_parents[i][cfg].clone();
            p = p * if bits[i] == 1 { one } else { P::one() - one };
        }
        p
    })
    .expect("product of conditional tables is a distribution")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Universe;
    use num_traits::Zero;

    fn fx(names: &[&str]) -> Universe {
        Universe::new(names.iter().copied()).unwrap()
    }

    fn set(u: &Universe, n: &[&str]) -> ElementSet {
        u.set(n.iter().copied()).unwrap()
    }

    fn vars(u: &Universe) -> Vec<Element> {
        u.elements().collect()
    }

    fn half() -> BigRational {
        BigRational::from_ratio(1, 2)
    }

    #[test]
    fn rejects_bad_tables() {
        let u = fx(&["a"]);
        assert!(DiscreteJoint::new(vars(&u), vec![2], vec![0.5f64, 0.4]).is_err());
        assert!(DiscreteJoint::new(vars(&u), vec![2], vec![1.5f64, -0.5]).is_err());
        assert!(DiscreteJoint::new(vars(&u), vec![3], vec![0.5f64, 0.5]).is_err());
        assert!(DiscreteJoint::new(vars(&u), vec![2], vec![0.25f64, 0.75]).is_ok());
    }

    #[test]
    fn independent_bits() {
        let u = fx(&["a", "b"]);
        let p = DiscreteJoint::binary_from_fn(vars(&u), |_| BigRational::from_ratio(1, 4)).unwrap();
        assert!(p
            .ci_holds(set(&u, &["a"]), ElementSet::EMPTY, set(&u, &["b"]))
            .unwrap());
    }

    #[test]
    fn xor_triple() {
        let u = fx(&["a", "b", "c"]);
        // rows (a, b, c), c = a xor b
        let p = DiscreteJoint::binary_from_fn(vars(&u), |b| {
            if b[2] == b[0] ^ b[1] {
                BigRational::from_ratio(1, 4)
            } else {
                BigRational::zero()
            }
        })
        .unwrap();
        assert!(p
            .ci_holds(set(&u, &["a"]), ElementSet::EMPTY, set(&u, &["b"]))
            .unwrap());
        assert!(!p
            .ci_holds(set(&u, &["a"]), set(&u, &["c"]), set(&u, &["b"]))
            .unwrap());
        let all = p.all_ci().unwrap();
        // the three marginal pairwise independencies and nothing conditioned
        assert_eq!(all.len(), 3);
        assert!(all.iter().all(|s| s.z().is_empty()));
    }

    #[test]
    fn copy_makes_everything_independent_given_the_copy() {
        let u = fx(&["a", "b", "c"]);
        // b = a, c independent fair bit
        let p = DiscreteJoint::binary_from_fn(vars(&u), |b| {
            if b[0] == b[1] {
                BigRational::from_ratio(1, 4)
            } else {
                BigRational::zero()
            }
        })
        .unwrap();
        assert!(p
            .ci_holds(set(&u, &["a"]), set(&u, &["b"]), set(&u, &["c"]))
            .unwrap());
    }

    #[test]
    fn intersection_fails_without_positivity() {
        // x = y = w, all copies of one fair bit; z empty
        let u = fx(&["w", "x", "y"]);
        let p = DiscreteJoint::binary_from_fn(vars(&u), |b| {
            if b[0] == b[1] && b[1] == b[2] {
                half()
            } else {
                BigRational::zero()
            }
        })
        .unwrap();
        let (w, x, y) = (set(&u, &["w"]), set(&u, &["x"]), set(&u, &["y"]));
        assert!(p.ci_holds(x, y, w).unwrap());
        assert!(p.ci_holds(x, w, y).unwrap());
        assert!(!p.ci_holds(x, ElementSet::EMPTY, y.union(w)).unwrap());
    }

    #[test]
    fn copy_chain_all_ci() {
        let u = fx(&["a", "b", "c"]);
        let p = DiscreteJoint::binary_from_fn(vars(&u), |b| {
            if b[0] == b[1] && b[1] == b[2] {
                half()
            } else {
                BigRational::zero()
            }
        })
        .unwrap();
        let s = CanonicalStatement::from_parts(set(&u, &["a"]), set(&u, &["b"]), set(&u, &["c"]))
            .unwrap();
        assert!(p.all_ci().unwrap().contains(&s));
    }

    #[test]
    fn factorized_joint_satisfies_everything() {
        let u = fx(&["a", "b", "c"]);
        let p = DiscreteJoint::binary_from_fn(vars(&u), |b| {
            let f =
                |bit: usize, k: u64| BigRational::from_ratio(if bit == 1 { k } else { 8 - k }, 8);
            f(b[0], 1) * f(b[1], 3) * f(b[2], 6)
        })
        .unwrap();
        assert_eq!(
            p.all_ci().unwrap().len(),
            u.enumerate_canonical().unwrap().len()
        );
    }

    #[test]
    fn unknown_variable() {
        let u = fx(&["a", "b", "c"]);
        let p = DiscreteJoint::binary_from_fn(
            vec![u.element("a").unwrap(), u.element("b").unwrap()],
            |_| 0.25f64,
        )
        .unwrap();
        assert!(p
            .ci_holds(set(&u, &["a"]), ElementSet::EMPTY, set(&u, &["c"]))
            .is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let u = fx(&["a", "b", "c"]);
        let (a, b, c) = (
            u.element("a").unwrap(),
            u.element("b").unwrap(),
            u.element("c").unwrap(),
        );
        let d = DiGraph::new(u.all(), [(a, c), (b, c)], ElementSet::EMPTY).unwrap();
        let p1: DiscreteJoint<f64> = sample_dag_joint(&d, 7);
        let p2: DiscreteJoint<f64> = sample_dag_joint(&d, 7);
        assert_eq!(
            p1.probabilities()
                .iter()
                .map(|p| p.to_bits())
                .collect::<Vec<_>>(),
            p2.probabilities()
                .iter()
                .map(|p| p.to_bits())
                .collect::<Vec<_>>()
        );
        let exact: DiscreteJoint<BigRational> = sample_dag_joint(&d, 7);
        assert_eq!(exact, sample_dag_joint(&d, 7));
    }

    #[test]
    fn arcless_sample_is_a_product() {
        let u = fx(&["a", "b"]);
        let d = DiGraph::new(u.all(), [], ElementSet::EMPTY).unwrap();
        for seed in 0..10 {
            let p: DiscreteJoint<BigRational> = sample_dag_joint(&d, seed);
            assert_eq!(p.all_ci().unwrap().len(), 1);
        }
    }

    #[test]
    fn collider_sample() {
        let u = fx(&["a", "b", "c"]);
        let (a, b, c) = (
            u.element("a").unwrap(),
            u.element("b").unwrap(),
            u.element("c").unwrap(),
        );
        let d = DiGraph::new(u.all(), [(a, c), (b, c)], ElementSet::EMPTY).unwrap();
        let marg =
            CanonicalStatement::from_parts(set(&u, &["a"]), ElementSet::EMPTY, set(&u, &["b"]))
                .unwrap();
        let cond =
            CanonicalStatement::from_parts(set(&u, &["a"]), set(&u, &["c"]), set(&u, &["b"]))
                .unwrap();
        let mut generic = 0;
        for seed in 0..20 {
            let p: DiscreteJoint<BigRational> = sample_dag_joint(&d, seed);
            let all = p.all_ci().unwrap();
            assert!(all.contains(&marg));
            // a degenerate draw can make c ignore a parent; skip those
            if !all.contains(&cond) {
                generic += 1;
            }
        }
        assert!(generic >= 15);
    }

    #[test]
    fn deterministic_rows_are_zero_one() {
        let u = fx(&["a", "b"]);
        let (a, b) = (u.element("a").unwrap(), u.element("b").unwrap());
        let d = DiGraph::new(u.all(), [(a, b)], set(&u, &["b"])).unwrap();
        let p: DiscreteJoint<BigRational> = sample_dag_joint(&d, 3);
        // b is a function of a
        assert!(p
            .ci_holds(set(&u, &["b"]), set(&u, &["a"]), set(&u, &["b"]))
            .is_err());
        assert!(p.probabilities().iter().filter(|q| q.is_zero()).count() >= 2);
    }

    #[test]
    fn float_and_rational_agree() {
        let u = fx(&["a", "b", "c", "d"]);
        let e = |n| u.element(n).unwrap();
        let d = DiGraph::new(
            u.all(),
            [(e("a"), e("b")), (e("b"), e("c")), (e("a"), e("d"))],
            set(&u, &["b"]),
        )
        .unwrap();
        for seed in 0..5 {
            let q: DiscreteJoint<BigRational> = sample_dag_joint(&d, seed);
            let f: DiscreteJoint<f64> = sample_dag_joint(&d, seed);
            assert_eq!(q.all_ci().unwrap(), f.all_ci().unwrap());
        }
    }
}
