//! Elements, element sets, and independence statements in canonical form.
//!
//! Elements are indices into a [`Universe`] whose names are kept in
//! lexicographic order, so index order and name order agree. Every
//! enumeration in the crate is driven by these orders and is therefore
//! deterministic.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest universe an [`ElementSet`] can address.
pub const MAX_ELEMENTS: usize = 64;

/// Default bound on universe size for exhaustive statement enumeration.
pub const DEFAULT_ENUMERATION_GUARD: usize = 12;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Element(u8);

impl Element {
    pub fn new(index: usize) -> Self {
        assert!(index < MAX_ELEMENTS, "element index {index} out of range");
        Element(index as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of elements stored as a bitmask.
///
/// `Ord` is the lexicographic order of the sorted element sequences, not
/// the numeric order of the mask: `{a} < {a,b} < {b}` and `{} ` is least.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElementSet(u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ElementSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(e: Element) -> Self {
        ElementSet(1 << e.0)
    }

    /// The first `n` elements of a universe.
    pub fn first_n(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS);
        if n == MAX_ELEMENTS {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, e: Element) -> bool {
        self.0 & (1 << e.0) != 0
    }

    pub fn insert(&mut self, e: Element) {
        self.0 |= 1 << e.0;
    }

    pub fn remove(&mut self, e: Element) {
        self.0 &= !(1 << e.0);
    }

    pub fn union(self, other: Self) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ElementSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest element, if any.
    pub fn first(self) -> Option<Element> {
        (self.0 != 0).then(|| Element(self.0.trailing_zeros() as u8))
    }

    pub fn iter(self) -> ElementIter {
        ElementIter(self.0)
    }

    /// Every subset of `self`, each exactly once, starting with `self`
    /// and ending with the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(self.0),
        }
    }
}

impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        let bit = (self.0 ^ other.0).trailing_zeros();
        // Both sequences agree below `bit`. The set holding `bit` continues
        // with it; the other continues with a larger element or stops.
        let self_holds = (self.0 >> bit) & 1 == 1;
        let lacks = if self_holds { other.0 } else { self.0 };
        let holder_is_less = bit < 63 && (lacks >> (bit + 1)) != 0;
        if self_holds == holder_is_less {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(Element::index))
            .finish()
    }
}

impl FromIterator<Element> for ElementSet {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        let mut s = ElementSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl IntoIterator for ElementSet {
    type Item = Element;
    type IntoIter = ElementIter;

    fn into_iter(self) -> ElementIter {
        self.iter()
    }
}

pub struct ElementIter(u64);

impl Iterator for ElementIter {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(Element(i as u8))
    }
}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = ElementSet;

    fn next(&mut self) -> Option<ElementSet> {
        let cur = self.next?;
        self.next = (cur != 0).then(|| (cur - 1) & self.mask);
        Some(ElementSet(cur))
    }
}

/// The ground set of named elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Universe {
    names: Vec<String>,
}

impl Universe {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.iter().any(|n| n.is_empty()) {
            return Err(Error::EmptyName);
        }
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0].clone()));
        }
        if names.len() > MAX_ELEMENTS {
            return Err(Error::TooManyElements);
        }
        Ok(Universe { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn all(&self) -> ElementSet {
        ElementSet::first_n(self.names.len())
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.names.len()).map(Element::new)
    }

    pub fn element(&self, name: &str) -> Result<Element> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .map(Element::new)
            .map_err(|_| Error::UnknownElement(name.to_string()))
    }

    pub fn name(&self, e: Element) -> &str {
        &self.names[e.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn set<'a, I>(&self, names: I) -> Result<ElementSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        names.into_iter().map(|n| self.element(n)).collect()
    }

    pub fn set_names(&self, s: ElementSet) -> Vec<&str> {
        s.iter().map(|e| self.name(e)).collect()
    }

    /// `{a,b}` rendering used by every text format.
    pub fn fmt_set(&self, s: ElementSet) -> String {
        format!("{{{}}}", self.set_names(s).join(","))
    }

    pub fn fmt_statement(&self, s: &CanonicalStatement) -> String {
        format!(
            "{} | {} | {}",
            self.fmt_set(s.x),
            self.fmt_set(s.z),
            self.fmt_set(s.y)
        )
    }
}

/// A raw triple `I(X, Z, Y)`; sets may overlap.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Statement {
    pub x: ElementSet,
    pub z: ElementSet,
    pub y: ElementSet,
}

impl Statement {
    pub fn new(x: ElementSet, z: ElementSet, y: ElementSet) -> Self {
        Statement { x, z, y }
    }

    pub fn canonicalize(self) -> Result<Canonical> {
        canonicalize(self)
    }
}

/// `I(X, Z, Y)` with pairwise disjoint sides, non-empty `x` and `y`, and
/// `x <= y`. Ordering is lexicographic on `(x, z, y)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalStatement {
    x: ElementSet,
    z: ElementSet,
    y: ElementSet,
}

impl CanonicalStatement {
    pub fn x(&self) -> ElementSet {
        self.x
    }

    pub fn z(&self) -> ElementSet {
        self.z
    }

    pub fn y(&self) -> ElementSet {
        self.y
    }

    pub fn elements(&self) -> ElementSet {
        self.x.union(self.z).union(self.y)
    }

    /// Both readings `(X, Z, Y)` and `(Y, Z, X)` of the statement.
    pub fn orientations(&self) -> [(ElementSet, ElementSet, ElementSet); 2] {
        [(self.x, self.z, self.y), (self.y, self.z, self.x)]
    }

    /// Canonical form of a triple that is known to be non-trivial.
    /// Returns `None` when the triple canonicalizes to the trivial marker
    /// or has an invalid overlap.
    pub fn from_parts(x: ElementSet, z: ElementSet, y: ElementSet) -> Option<Self> {
        match canonicalize(Statement::new(x, z, y)) {
            Ok(Canonical::Statement(s)) => Some(s),
            _ => None,
        }
    }
}

impl From<CanonicalStatement> for Statement {
    fn from(s: CanonicalStatement) -> Statement {
        Statement::new(s.x, s.z, s.y)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Canonical {
    /// Empty `X` or `Y` after removing `Z`.
    TriviallyTrue,
    Statement(CanonicalStatement),
}

/// Removes `Z` from both sides, rejects overlap outside `Z`, and orders
/// the sides so that `x <= y`.
pub fn canonicalize(s: Statement) -> Result<Canonical> {
    let x = s.x.difference(s.z);
    let y = s.y.difference(s.z);
    if !x.is_disjoint(y) {
        return Err(Error::InvalidOverlap);
    }
    if x.is_empty() || y.is_empty() {
        return Ok(Canonical::TriviallyTrue);
    }
    let (x, y) = if y < x { (y, x) } else { (x, y) };
    Ok(Canonical::Statement(CanonicalStatement { x, z: s.z, y }))
}

/// Every canonical statement whose elements lie in `set`, sorted.
pub fn enumerate_canonical(set: ElementSet, guard: usize) -> Result<Vec<CanonicalStatement>> {
    if set.len() > guard {
        return Err(Error::UniverseTooLarge {
            size: set.len(),
            guard,
        });
    }
    let mut out = Vec::new();
    for x in set.subsets().filter(|x| !x.is_empty()) {
        let rest = set.difference(x);
        for y in rest.subsets().filter(|y| !y.is_empty() && x < *y) {
            for z in rest.difference(y).subsets() {
                out.push(CanonicalStatement { x, z, y });
            }
        }
    }
    out.sort();
    Ok(out)
}

impl Universe {
    pub fn enumerate_canonical(&self) -> Result<Vec<CanonicalStatement>> {
        enumerate_canonical(self.all(), DEFAULT_ENUMERATION_GUARD)
    }
}
