//! Directed graphs with deterministic elements, moral graphs, and join
//! trees.
//!
//! The separation test prunes to the ancestral set of the query, pushes
//! each deterministic element's outgoing arcs up to its parents unless the
//! element is observed, moralizes, and checks undirected separation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::element::{Canonical, Element, ElementSet, Statement};
use crate::error::{Error, Result};
use crate::ugraph::{NodeId, UGraph};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiGraph {
    nodes: ElementSet,
    arcs: BTreeSet<(Element, Element)>,
    deterministic: ElementSet,
}

impl DiGraph {
    pub fn new(
        nodes: ElementSet,
        arcs: impl IntoIterator<Item = (Element, Element)>,
        deterministic: ElementSet,
    ) -> Result<Self> {
        let arcs: BTreeSet<_> = arcs.into_iter().collect();
        for &(a, b) in &arcs {
            for e in [a, b] {
                if !nodes.contains(e) {
                    return Err(Error::UnknownElement(format!("#{}", e.index())));
                }
            }
            if a == b {
                return Err(Error::Cyclic);
            }
        }
        if !deterministic.is_subset(nodes) {
            return Err(Error::UnknownElement(format!(
                "#{}",
                deterministic.difference(nodes).first().unwrap().index()
            )));
        }
        let d = DiGraph {
            nodes,
            arcs,
            deterministic,
        };
        if d.topological_order().len() != nodes.len() {
            return Err(Error::Cyclic);
        }
        Ok(d)
    }

    pub fn nodes(&self) -> ElementSet {
        self.nodes
    }

    pub fn arcs(&self) -> impl Iterator<Item = (Element, Element)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn has_arc(&self, a: Element, b: Element) -> bool {
        self.arcs.contains(&(a, b))
    }

    pub fn deterministic(&self) -> ElementSet {
        self.deterministic
    }

    pub fn parents(&self, v: Element) -> ElementSet {
        self.arcs
            .iter()
            .filter(|&&(_, c)| c == v)
            .map(|&(p, _)| p)
            .collect()
    }

    pub fn children(&self, v: Element) -> ElementSet {
        self.arcs
            .iter()
            .filter(|&&(p, _)| p == v)
            .map(|&(_, c)| c)
            .collect()
    }

    /// `set` together with all of its ancestors.
    pub fn ancestral_closure(&self, set: ElementSet) -> ElementSet {
        let mut out = set;
        let mut frontier = set;
        while !frontier.is_empty() {
            let mut next = ElementSet::EMPTY;
            for v in frontier {
                next = next.union(self.parents(v));
            }
            frontier = next.difference(out);
            out = out.union(frontier);
        }
        out
    }

    /// Kahn's algorithm, smallest ready element first. Shorter than
    /// `nodes` when the arcs contain a cycle.
    pub fn topological_order(&self) -> Vec<Element> {
        let mut indegree: BTreeMap<Element, usize> = self.nodes.iter().map(|v| (v, 0)).collect();
        for &(_, c) in &self.arcs {
            *indegree.get_mut(&c).unwrap() += 1;
        }
        let mut ready: BTreeSet<Element> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| v)
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for c in self.children(v) {
                let d = indegree.get_mut(&c).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    pub fn ancestral_prune(&self, keep: ElementSet) -> Result<DiGraph> {
        if let Some(e) = keep.difference(self.nodes).first() {
            return Err(Error::UnknownElement(format!("#{}", e.index())));
        }
        let nodes = self.ancestral_closure(keep);
        Ok(DiGraph {
            nodes,
            arcs: self
                .arcs
                .iter()
                .copied()
                .filter(|&(a, b)| nodes.contains(a) && nodes.contains(b))
                .collect(),
            deterministic: self.deterministic.intersection(nodes),
        })
    }

    /// Visits elements in topological order; each deterministic element
    /// outside `z` hands its children to its current parents.
    pub fn det_propagate(&self, z: ElementSet) -> DiGraph {
        let mut d = self.clone();
        for v in self.topological_order() {
            if !d.deterministic.contains(v) || z.contains(v) {
                continue;
            }
            let parents = d.parents(v);
            let children = d.children(v);
            for c in children {
                d.arcs.remove(&(v, c));
                for p in parents {
                    d.arcs.insert((p, c));
                }
            }
        }
        d
    }

    /// Pairs of parents sharing a child that are not already joined by an
    /// arc, each listed once.
    pub fn marriages(&self) -> Vec<(Element, Element)> {
        let mut out = BTreeSet::new();
        for c in self.nodes {
            let ps: Vec<Element> = self.parents(c).iter().collect();
            for (i, &a) in ps.iter().enumerate() {
                for &b in &ps[i + 1..] {
                    if !self.has_arc(a, b) && !self.has_arc(b, a) {
                        out.insert((a, b));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Single-element undirected graph: arcs lose direction and co-parents
    /// are joined. Node ids equal element indices.
    pub fn moralize(&self) -> UGraph {
        let edges = self.arcs.iter().copied().chain(self.marriages());
        UGraph::single_element(self.nodes, edges).expect("arcs join existing nodes")
    }

    pub fn d_separated(&self, x: ElementSet, z: ElementSet, y: ElementSet) -> Result<bool> {
        if let Some(e) = x.union(z).union(y).difference(self.nodes).first() {
            return Err(Error::UnknownElement(format!("#{}", e.index())));
        }
        let s = match Statement::new(x, z, y).canonicalize()? {
            Canonical::TriviallyTrue => return Ok(true),
            Canonical::Statement(s) => s,
        };
        let moral = self
            .ancestral_prune(s.elements())?
            .det_propagate(s.z())
            .moralize();
        moral.separates(s.x(), s.z(), s.y())
    }
}

/// Tree of element clusters. Sepsets are derived from the clusters when
/// built with [`JoinTree::new`]; fields stay public so that malformed trees
/// can be represented and diagnosed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct JoinTree {
    pub clusters: BTreeMap<NodeId, ElementSet>,
    pub edges: BTreeSet<(NodeId, NodeId)>,
    pub sepsets: BTreeMap<(NodeId, NodeId), ElementSet>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum JoinTreeViolation {
    UnknownNode(NodeId),
    /// Edge count or connectivity rules out a tree.
    NotATree,
    SepsetMismatch {
        edge: (NodeId, NodeId),
        expected: ElementSet,
    },
    RunningIntersection {
        element: Element,
        from: NodeId,
        to: NodeId,
        via: NodeId,
    },
}

impl JoinTree {
    pub fn new(
        clusters: BTreeMap<NodeId, ElementSet>,
        links: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Self {
        let edges: BTreeSet<(NodeId, NodeId)> = links
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        let sepsets = edges
            .iter()
            .filter_map(|&(a, b)| {
                let (ca, cb) = (clusters.get(&a)?, clusters.get(&b)?);
                Some(((a, b), ca.intersection(*cb)))
            })
            .collect();
        JoinTree {
            clusters,
            edges,
            sepsets,
        }
    }

    fn neighbors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == n {
                Some(b)
            } else if b == n {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Tree path from `a` to `b`, both ends included.
    fn path(&self, a: NodeId, b: NodeId) -> Option<Vec<NodeId>> {
        let mut prev = BTreeMap::from([(a, a)]);
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for v in self.neighbors(u) {
                if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(v) {
                    e.insert(u);
                    queue.push_back(v);
                }
            }
        }
        prev.contains_key(&b).then(|| {
            let mut p = vec![b];
            while *p.last().unwrap() != a {
                p.push(prev[p.last().unwrap()]);
            }
            p.reverse();
            p
        })
    }

    pub fn validate(&self) -> Vec<JoinTreeViolation> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            for n in [a, b] {
                if !self.clusters.contains_key(&n) {
                    out.push(JoinTreeViolation::UnknownNode(n));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        let connected = match self.clusters.keys().next() {
            None => true,
            Some(&first) => self.clusters.keys().all(|&n| self.path(first, n).is_some()),
        };
        let n = self.clusters.len();
        if !connected || self.edges.len() + 1 != n.max(1) || self.edges.iter().any(|(a, b)| a == b)
        {
            out.push(JoinTreeViolation::NotATree);
        }
        for &(a, b) in &self.edges {
            let expected = self.clusters[&a].intersection(self.clusters[&b]);
            if self.sepsets.get(&(a, b)) != Some(&expected) {
                out.push(JoinTreeViolation::SepsetMismatch {
                    edge: (a, b),
                    expected,
                });
            }
        }
        if out.contains(&JoinTreeViolation::NotATree) {
            return out;
        }
        let all = self
            .clusters
            .values()
            .fold(ElementSet::EMPTY, |acc, &s| acc.union(s));
        for e in all {
            let holders: Vec<NodeId> = self
                .clusters
                .iter()
                .filter(|(_, s)| s.contains(e))
                .map(|(&n, _)| n)
                .collect();
            for (i, &a) in holders.iter().enumerate() {
                for &b in &holders[i + 1..] {
                    let path = self.path(a, b).expect("tree is connected");
                    if let Some(&via) = path.iter().find(|n| !self.clusters[n].contains(e)) {
                        out.push(JoinTreeViolation::RunningIntersection {
                            element: e,
                            from: a,
                            to: b,
                            via,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Triangulates `g` by eliminating elements in `order`, then links the
/// maximal cliques of the filled graph by a maximum-weight spanning tree on
/// sepset sizes (ties broken by cluster index).
pub fn build_join_tree(g: &UGraph, order: &[Element]) -> Result<(UGraph, JoinTree)> {
    if !g.is_single_element() {
        return Err(Error::MultiElementNode);
    }
    let elements = g.elements();
    let as_set: ElementSet = order.iter().copied().collect();
    if as_set != elements || order.len() != elements.len() {
        return Err(Error::InvalidOrder);
    }
    let eg = g.expand();
    let mut filled: BTreeMap<Element, ElementSet> =
        elements.iter().map(|e| (e, eg.neighbors(e))).collect();
    let mut remaining = elements;
    let mut candidates = Vec::new();
    for &v in order {
        remaining.remove(v);
        let nb = filled[&v].intersection(remaining);
        for a in nb {
            let grown = filled[&a].union(nb);
            let mut grown = grown;
            grown.remove(a);
            filled.insert(a, grown);
        }
        let mut clique = nb;
        clique.insert(v);
        candidates.push(clique);
    }
    let mut cliques: Vec<ElementSet> = Vec::new();
    for (i, &c) in candidates.iter().enumerate() {
        let dominated = candidates
            .iter()
            .enumerate()
            .any(|(j, &d)| j != i && c.is_subset(d) && (c != d || j < i));
        if !dominated {
            cliques.push(c);
        }
    }

    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            pairs.push((cliques[i].intersection(cliques[j]).len(), i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut root: Vec<usize> = (0..cliques.len()).collect();
    fn find(root: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while root[r] != r {
            r = root[r];
        }
        root[i] = r;
        r
    }
    let mut links = Vec::new();
    for (_, i, j) in pairs {
        let (ri, rj) = (find(&mut root, i), find(&mut root, j));
        if ri != rj {
            root[ri] = rj;
            links.push((NodeId(i as u32), NodeId(j as u32)));
        }
    }
    let clusters = cliques
        .iter()
        .enumerate()
        .map(|(i, &c)| (NodeId(i as u32), c))
        .collect();

    let mut edges = Vec::new();
    for (&a, &nb) in &filled {
        for b in nb {
            if a < b {
                edges.push((a, b));
            }
        }
    }
    let chordal = UGraph::single_element(elements, edges)?;
    Ok((chordal, JoinTree::new(clusters, links)))
}
