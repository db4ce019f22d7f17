//! Helpers shared by the integration test targets. Oracles here are written
//! from the definitions, on raw bitmasks, without calling the library's
//! closure or separation code.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use graphoid::dsep::DiGraph;
use graphoid::ugraph::{NodeId, UGraph};
use graphoid::{CanonicalStatement, Element, ElementSet, Universe};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn universe(n: usize) -> Arc<Universe> {
    Arc::new(Universe::new((0..n).map(|i| format!("v{i}"))).unwrap())
}

/// Ordered triple of pairwise-disjoint masks, x and y non-empty.
pub type Raw = (u64, u64, u64);

fn nonempty_proper_subsets(m: u64) -> impl Iterator<Item = u64> {
    let mut sub = m;
    std::iter::from_fn(move || loop {
        if sub == 0 {
            return None;
        }
        sub = (sub - 1) & m;
        if sub != 0 {
            return Some(sub);
        }
    })
}

/// Saturates under symmetry, decomposition, weak union and contraction by
/// repeated full passes until nothing changes.
pub fn naive_closure(init: &BTreeSet<Raw>) -> BTreeSet<Raw> {
    let mut all: BTreeSet<Raw> = init
        .iter()
        .flat_map(|&(x, z, y)| [(x, z, y), (y, z, x)])
        .collect();
    loop {
        let mut fresh = BTreeSet::new();
        for &(x, z, y) in &all {
            fresh.insert((y, z, x));
            for w in nonempty_proper_subsets(y) {
                fresh.insert((x, z, w));
                fresh.insert((x, z | w, y & !w));
            }
        }
        for &(x1, z1, w) in &all {
            for &(x2, z2, y2) in &all {
                // I(x, z ∪ y, w) and I(x, z, y) give I(x, z, y ∪ w)
                if x1 == x2 && z2 & !z1 == 0 && z1 & !z2 == y2 {
                    fresh.insert((x1, z2, y2 | w));
                }
            }
        }
        let before = all.len();
        all.extend(fresh);
        if all.len() == before {
            return all;
        }
    }
}

pub fn to_raw(s: &CanonicalStatement) -> Raw {
    (s.x().bits(), s.z().bits(), s.y().bits())
}

pub fn from_raw(r: Raw) -> CanonicalStatement {
    CanonicalStatement::from_parts(
        ElementSet::from_bits(r.0),
        ElementSet::from_bits(r.1),
        ElementSet::from_bits(r.2),
    )
    .unwrap()
}

pub fn canonical_set(raw: &BTreeSet<Raw>) -> BTreeSet<CanonicalStatement> {
    raw.iter().map(|&r| from_raw(r)).collect()
}

/// Uniform random disjoint triple with non-empty sides over `n` elements.
pub fn random_statement(rng: &mut impl Rng, n: usize) -> CanonicalStatement {
    loop {
        let (mut x, mut z, mut y) = (0u64, 0u64, 0u64);
        for i in 0..n {
            match rng.gen_range(0..4) {
                0 => x |= 1 << i,
                1 => z |= 1 << i,
                2 => y |= 1 << i,
                _ => {}
            }
        }
        if x != 0 && y != 0 {
            return from_raw((x, z, y));
        }
    }
}

/// Separation by enumerating simple paths in the element graph of `g`.
pub fn separated_by_paths(g: &UGraph, x: u64, z: u64, y: u64) -> bool {
    let n = 64;
    let mut adj = vec![0u64; n];
    let nodes: Vec<(NodeId, ElementSet)> = g.nodes().collect();
    for &(_, s) in &nodes {
        for a in s {
            adj[a.index()] |= s.bits() & !(1 << a.index());
        }
    }
    for (a, b) in g.edges() {
        let (sa, sb) = (g.node(a).unwrap(), g.node(b).unwrap());
        for e in sa {
            adj[e.index()] |= sb.bits() & !(1 << e.index());
        }
        for e in sb {
            adj[e.index()] |= sa.bits() & !(1 << e.index());
        }
    }
    fn dfs(adj: &[u64], v: usize, visited: u64, z: u64, y: u64) -> bool {
        if y >> v & 1 == 1 {
            return true;
        }
        for w in 0..64 {
            if adj[v] >> w & 1 == 1
                && visited >> w & 1 == 0
                && z >> w & 1 == 0
                && dfs(adj, w, visited | 1 << w, z, y)
            {
                return true;
            }
        }
        false
    }
    (0..64)
        .filter(|&v| x >> v & 1 == 1 && z >> v & 1 == 0)
        .all(|v| !dfs(&adj, v, 1 << v, z, y & !z))
}

/// Random graph over the first `n` elements with a random partition into
/// nodes and each node pair joined with probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64, multi: bool) -> UGraph {
    let mut elems: Vec<usize> = (0..n).collect();
    elems.shuffle(rng);
    let mut parts: Vec<ElementSet> = Vec::new();
    for e in elems {
        let el = Element::new(e);
        if multi && !parts.is_empty() && rng.gen_bool(0.3) {
            let i = rng.gen_range(0..parts.len());
            parts[i].insert(el);
        } else {
            parts.push(ElementSet::singleton(el));
        }
    }
    parts.sort();
    let mut g = UGraph::new();
    for (i, s) in parts.iter().enumerate() {
        g.insert_node(NodeId(i as u32), *s);
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if rng.gen_bool(p) {
                g.add_edge(NodeId(i as u32), NodeId(j as u32)).unwrap();
            }
        }
    }
    g
}

/// Random DAG over the first `n` elements: a random topological order,
/// each forward pair joined with probability `p`, and each node
/// deterministic with probability `det`.
pub fn random_dag(rng: &mut impl Rng, n: usize, p: f64, det: f64) -> DiGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                arcs.push((Element::new(order[i]), Element::new(order[j])));
            }
        }
    }
    let mut d = ElementSet::EMPTY;
    for i in 0..n {
        if rng.gen_bool(det) {
            d.insert(Element::new(i));
        }
    }
    DiGraph::new(ElementSet::first_n(n), arcs, d).unwrap()
}
