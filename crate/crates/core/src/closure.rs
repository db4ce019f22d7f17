//! Least fixpoint of a statement set under the graphoid axioms.
//!
//! Symmetry and overlap are absorbed by the canonical form; closure only
//! generates with decomposition, weak union and contraction. Each derived
//! statement remembers the first rule application that produced it, which
//! is enough to rebuild a derivation chain on demand.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::element::{
    Canonical, CanonicalStatement, ElementSet, Statement, Universe, DEFAULT_ENUMERATION_GUARD,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Rule {
    Given,
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Given => "given",
            Rule::Symmetry => "symmetry",
            Rule::Decomposition => "decomposition",
            Rule::WeakUnion => "weak_union",
            Rule::Contraction => "contraction",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "given" => Rule::Given,
            "symmetry" => Rule::Symmetry,
            "decomposition" => Rule::Decomposition,
            "weak_union" => Rule::WeakUnion,
            "contraction" => Rule::Contraction,
            _ => return Err(format!("unknown rule `{s}`")),
        })
    }
}

/// One line of a derivation chain. Premises index earlier steps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomStep {
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub conclusion: CanonicalStatement,
}

/// A contraction instance `I(x, z ∪ y, w)` and `I(x, z, y)` giving
/// `I(x, z, y ∪ w)`, with the sides as oriented in the premises.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ContractionMatch {
    pub x: ElementSet,
    pub z: ElementSet,
    pub y: ElementSet,
    pub w: ElementSet,
}

impl ContractionMatch {
    pub fn conclusion(&self) -> CanonicalStatement {
        CanonicalStatement::from_parts(self.x, self.z, self.y.union(self.w))
            .expect("contraction of canonical premises is canonical")
    }

    /// The first premise, oriented as `(x, z ∪ y, w)`.
    pub fn major(&self) -> CanonicalStatement {
        CanonicalStatement::from_parts(self.x, self.z.union(self.y), self.w).unwrap()
    }

    /// The second premise, oriented as `(x, z, y)`.
    pub fn minor(&self) -> CanonicalStatement {
        CanonicalStatement::from_parts(self.x, self.z, self.y).unwrap()
    }
}

/// Decomposition and weak-union consequences of `s`, read in both
/// orientations, over every split of the far side into non-empty parts.
fn unary_consequences(s: &CanonicalStatement, out: &mut BTreeSet<(Rule, CanonicalStatement)>) {
    for (x, z, far) in s.orientations() {
        for y in far.subsets() {
            if y.is_empty() || y == far {
                continue;
            }
            let w = far.difference(y);
            if let Some(c) = CanonicalStatement::from_parts(x, z, y) {
                out.insert((Rule::Decomposition, c));
            }
            if let Some(c) = CanonicalStatement::from_parts(x, z.union(y), w) {
                out.insert((Rule::WeakUnion, c));
            }
        }
    }
}

/// Every way to read `major` as `I(x, z ∪ y, w)` and `minor` as `I(x, z, y)`.
pub fn contraction_matches(
    major: &CanonicalStatement,
    minor: &CanonicalStatement,
) -> Vec<ContractionMatch> {
    let mut out = Vec::new();
    for (x1, cond, w) in major.orientations() {
        for (x2, z, y) in minor.orientations() {
            if x1 == x2 && z.union(y) == cond && z.is_disjoint(y) {
                out.push(ContractionMatch { x: x1, z, y, w });
            }
        }
    }
    out
}

/// Single-application consequences. With `s2` present only contraction
/// with `s1` as the major premise is tried.
pub fn axiom_consequences(
    s1: &CanonicalStatement,
    s2: Option<&CanonicalStatement>,
) -> BTreeSet<(Rule, CanonicalStatement)> {
    let mut out = BTreeSet::new();
    match s2 {
        None => unary_consequences(s1, &mut out),
        Some(s2) => {
            for m in contraction_matches(s1, s2) {
                out.insert((Rule::Contraction, m.conclusion()));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
struct Justification {
    rule: Rule,
    premises: Vec<CanonicalStatement>,
}

#[derive(Clone, Debug)]
pub struct Closure {
    universe: Arc<Universe>,
    init: BTreeSet<CanonicalStatement>,
    statements: BTreeSet<CanonicalStatement>,
    justifications: BTreeMap<CanonicalStatement, Justification>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum QueryResult {
    /// The statement holds; the chain is empty for trivially true queries.
    Proven(Vec<AxiomStep>),
    NotDerivable,
}

impl Closure {
    pub fn new(init: &BTreeSet<CanonicalStatement>, universe: Arc<Universe>) -> Result<Closure> {
        Self::with_guard(init, universe, DEFAULT_ENUMERATION_GUARD)
    }

    /// FIFO worklist seeded with `init` in statement order. Every processed
    /// statement is paired with all earlier ones for contraction, in both
    /// premise roles.
    pub fn with_guard(
        init: &BTreeSet<CanonicalStatement>,
        universe: Arc<Universe>,
        guard: usize,
    ) -> Result<Closure> {
        if universe.len() > guard {
            return Err(Error::UniverseTooLarge {
                size: universe.len(),
                guard,
            });
        }
        let mut justifications = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &s in init {
            justifications.insert(
                s,
                Justification {
                    rule: Rule::Given,
                    premises: Vec::new(),
                },
            );
            queue.push_back(s);
        }
        let mut processed: Vec<CanonicalStatement> = Vec::new();
        let mut found = BTreeSet::new();
        while let Some(s) = queue.pop_front() {
            processed.push(s);
            found.clear();
            unary_consequences(&s, &mut found);
            for (rule, c) in std::mem::take(&mut found) {
                if let std::collections::btree_map::Entry::Vacant(v) = justifications.entry(c) {
                    v.insert(Justification {
                        rule,
                        premises: vec![s],
                    });
                    queue.push_back(c);
                }
            }
            for &t in &processed {
                for (major, minor) in [(s, t), (t, s)] {
                    for m in contraction_matches(&major, &minor) {
                        let c = m.conclusion();
                        if let std::collections::btree_map::Entry::Vacant(v) =
                            justifications.entry(c)
                        {
                            v.insert(Justification {
                                rule: Rule::Contraction,
                                premises: vec![major, minor],
                            });
                            queue.push_back(c);
                        }
                    }
                }
            }
        }
        Ok(Closure {
            universe,
            init: init.clone(),
            statements: justifications.keys().copied().collect(),
            justifications,
        })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn init(&self) -> &BTreeSet<CanonicalStatement> {
        &self.init
    }

    pub fn statements(&self) -> &BTreeSet<CanonicalStatement> {
        &self.statements
    }

    pub fn contains(&self, s: &CanonicalStatement) -> bool {
        self.statements.contains(s)
    }

    /// Derivation chain for `s`, premises before conclusions, each
    /// statement appearing once.
    pub fn chain(&self, s: &CanonicalStatement) -> Option<Vec<AxiomStep>> {
        if !self.contains(s) {
            return None;
        }
        let mut steps = Vec::new();
        let mut index = BTreeMap::new();
        self.emit(*s, &mut steps, &mut index);
        Some(steps)
    }

    fn emit(
        &self,
        s: CanonicalStatement,
        steps: &mut Vec<AxiomStep>,
        index: &mut BTreeMap<CanonicalStatement, usize>,
    ) -> usize {
        if let Some(&i) = index.get(&s) {
            return i;
        }
        let j = &self.justifications[&s];
        let premises = j
            .premises
            .iter()
            .map(|&p| self.emit(p, steps, index))
            .collect();
        steps.push(AxiomStep {
            rule: j.rule,
            premises,
            conclusion: s,
        });
        index.insert(s, steps.len() - 1);
        steps.len() - 1
    }

    pub fn query(&self, s: Statement) -> Result<QueryResult> {
        match s.canonicalize()? {
            Canonical::TriviallyTrue => Ok(QueryResult::Proven(Vec::new())),
            Canonical::Statement(c) => Ok(self
                .chain(&c)
                .map_or(QueryResult::NotDerivable, QueryResult::Proven)),
        }
    }
}

/// Checks a chain against its givens. `Err` carries the first failing step.
pub fn verify_chain(chain: &[AxiomStep], init: &BTreeSet<CanonicalStatement>) -> Result<(), usize> {
    for (i, step) in chain.iter().enumerate() {
        if step.premises.iter().any(|&p| p >= i) {
            return Err(i);
        }
        let prem: Vec<&CanonicalStatement> = step
            .premises
            .iter()
            .map(|&p| &chain[p].conclusion)
            .collect();
        let ok = match (step.rule, prem.as_slice()) {
            (Rule::Given, []) => init.contains(&step.conclusion),
            (Rule::Symmetry, [p]) => **p == step.conclusion,
            (Rule::Decomposition | Rule::WeakUnion, [p]) => {
                axiom_consequences(p, None).contains(&(step.rule, step.conclusion))
            }
            (Rule::Contraction, [a, b]) => {
                axiom_consequences(a, Some(b)).contains(&(Rule::Contraction, step.conclusion))
            }
            _ => false,
        };
        if !ok {
            return Err(i);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fx {
        u: Arc<Universe>,
    }

    impl Fx {
        fn new(names: &[&str]) -> Self {
            Fx {
                u: Arc::new(Universe::new(names.iter().copied()).unwrap()),
            }
        }

        fn set(&self, n: &[&str]) -> ElementSet {
            self.u.set(n.iter().copied()).unwrap()
        }

        fn s(&self, x: &[&str], z: &[&str], y: &[&str]) -> CanonicalStatement {
            CanonicalStatement::from_parts(self.set(x), self.set(z), self.set(y)).unwrap()
        }

        fn closure(&self, init: &[CanonicalStatement]) -> Closure {
            Closure::new(&init.iter().copied().collect(), self.u.clone()).unwrap()
        }
    }

    #[test]
    fn decomposition_and_weak_union() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let got = axiom_consequences(&f.s(&["x"], &["z"], &["y", "w"]), None);
        let want = BTreeSet::from([
            (Rule::Decomposition, f.s(&["x"], &["z"], &["y"])),
            (Rule::Decomposition, f.s(&["x"], &["z"], &["w"])),
            (Rule::WeakUnion, f.s(&["x"], &["z", "y"], &["w"])),
            (Rule::WeakUnion, f.s(&["x"], &["z", "w"], &["y"])),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn contraction_instance() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let got = axiom_consequences(
            &f.s(&["x"], &["z", "y"], &["w"]),
            Some(&f.s(&["x"], &["z"], &["y"])),
        );
        assert_eq!(
            got,
            BTreeSet::from([(Rule::Contraction, f.s(&["x"], &["z"], &["y", "w"]))])
        );
    }

    #[test]
    fn singleton_sides_have_no_unary_consequences() {
        let f = Fx::new(&["x", "y", "z"]);
        assert!(axiom_consequences(&f.s(&["x"], &["z"], &["y"]), None).is_empty());
    }

    #[test]
    fn closure_of_one_statement() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let c = f.closure(&[f.s(&["x"], &["z"], &["y", "w"])]);
        let want = BTreeSet::from([
            f.s(&["x"], &["z"], &["y", "w"]),
            f.s(&["x"], &["z"], &["y"]),
            f.s(&["x"], &["z"], &["w"]),
            f.s(&["x"], &["z", "y"], &["w"]),
            f.s(&["x"], &["z", "w"], &["y"]),
        ]);
        assert_eq!(c.statements(), &want);
        assert!(f.closure(&[]).statements().is_empty());
    }

    #[test]
    fn mixing_and_chaining() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let mix = f.closure(&[
            f.s(&["x", "y"], &["z"], &["w"]),
            f.s(&["x"], &["z"], &["y"]),
        ]);
        assert!(mix.contains(&f.s(&["x"], &["z"], &["y", "w"])));

        let chain = f.closure(&[
            f.s(&["x", "z"], &["y"], &["w"]),
            f.s(&["x"], &["z"], &["y"]),
        ]);
        let QueryResult::Proven(steps) = chain
            .query(Statement::new(f.set(&["x"]), f.set(&["z"]), f.set(&["w"])))
            .unwrap()
        else {
            panic!("chaining should be derivable")
        };
        assert_eq!(verify_chain(&steps, chain.init()), Ok(()));
    }

    #[test]
    fn intersection_is_not_derivable() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let c = f.closure(&[
            f.s(&["x"], &["z", "y"], &["w"]),
            f.s(&["x"], &["z", "w"], &["y"]),
        ]);
        assert!(!c.contains(&f.s(&["x"], &["z"], &["y", "w"])));
    }

    #[test]
    fn chaining_is_not_reversible_from_the_conclusion() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let c = f.closure(&[f.s(&["x"], &["z"], &["w"])]);
        assert!(!c.contains(&f.s(&["x", "z"], &["y"], &["w"])));
    }

    #[test]
    fn query_absorbs_symmetry_and_trivia() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let c = f.closure(&[f.s(&["x"], &["z"], &["y", "w"])]);
        let q = c
            .query(Statement::new(
                f.set(&["y", "w"]),
                f.set(&["z"]),
                f.set(&["x"]),
            ))
            .unwrap();
        let QueryResult::Proven(steps) = q else {
            panic!()
        };
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].rule, Rule::Given);
        assert_eq!(
            c.query(Statement::new(
                ElementSet::EMPTY,
                f.set(&["z"]),
                f.set(&["y"])
            ))
            .unwrap(),
            QueryResult::Proven(vec![])
        );
        assert_eq!(
            c.query(Statement::new(f.set(&["x"]), f.set(&["w"]), f.set(&["y"])))
                .unwrap(),
            QueryResult::NotDerivable
        );
        assert_eq!(
            c.query(Statement::new(f.set(&["x"]), f.set(&[]), f.set(&["x"]))),
            Err(Error::InvalidOverlap)
        );
    }

    #[test]
    fn every_emitted_chain_verifies() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let c = f.closure(&[
            f.s(&["x", "y"], &["z"], &["w"]),
            f.s(&["x"], &["z"], &["y"]),
        ]);
        for s in c.statements() {
            let chain = c.chain(s).unwrap();
            assert_eq!(
                verify_chain(&chain, c.init()),
                Ok(()),
                "{}",
                c.universe().fmt_statement(s)
            );
            assert_eq!(chain.last().unwrap().conclusion, *s);
        }
    }

    #[test]
    fn mismatched_contraction_is_rejected() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let a = f.s(&["x"], &["z", "y"], &["w"]);
        let b = f.s(&["x"], &["w"], &["y"]);
        let init = BTreeSet::from([a, b]);
        let chain = vec![
            AxiomStep {
                rule: Rule::Given,
                premises: vec![],
                conclusion: a,
            },
            AxiomStep {
                rule: Rule::Given,
                premises: vec![],
                conclusion: b,
            },
            AxiomStep {
                rule: Rule::Contraction,
                premises: vec![0, 1],
                conclusion: f.s(&["x"], &["z"], &["y", "w"]),
            },
        ];
        assert_eq!(verify_chain(&chain, &init), Err(2));
    }

    #[test]
    fn hand_built_weak_union_then_decomposition() {
        // I(x, z, {y,w,v}) -> weak union I(x, {z,v}, {y,w}) -> decomposition I(x, {z,v}, y)
        let f = Fx::new(&["v", "w", "x", "y", "z"]);
        let g = f.s(&["x"], &["z"], &["y", "w", "v"]);
        let chain = vec![
            AxiomStep {
                rule: Rule::Given,
                premises: vec![],
                conclusion: g,
            },
            AxiomStep {
                rule: Rule::WeakUnion,
                premises: vec![0],
                conclusion: f.s(&["x"], &["z", "v"], &["y", "w"]),
            },
            AxiomStep {
                rule: Rule::Decomposition,
                premises: vec![1],
                conclusion: f.s(&["x"], &["z", "v"], &["y"]),
            },
        ];
        assert_eq!(verify_chain(&chain, &BTreeSet::from([g])), Ok(()));
        // a given that is not in init
        assert_eq!(verify_chain(&chain, &BTreeSet::new()), Err(0));
        // forward reference
        let mut bad = chain.clone();
        bad[1].premises = vec![2];
        assert_eq!(verify_chain(&bad, &BTreeSet::from([g])), Err(1));
    }
}
