//! Undirected graphs whose nodes carry element sets.
//!
//! Separation is always decided on the element graph produced by
//! [`UGraph::expand`], which treats co-occurring and adjacent elements as
//! neighbours and merges repeated elements into one vertex. All
//! transformations are pure and return a new graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::element::{Element, ElementSet, MAX_ELEMENTS};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

fn ordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UGraph {
    nodes: BTreeMap<NodeId, ElementSet>,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl UGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// One node per element of `elements` (node id = element index) and
    /// one edge per element pair.
    pub fn single_element(
        elements: ElementSet,
        edges: impl IntoIterator<Item = (Element, Element)>,
    ) -> Result<Self> {
        let mut g = UGraph::new();
        for e in elements {
            g.nodes
                .insert(NodeId(e.index() as u32), ElementSet::singleton(e));
        }
        for (a, b) in edges {
            g.add_edge(NodeId(a.index() as u32), NodeId(b.index() as u32))?;
        }
        Ok(g)
    }

    /// Adds a node with a fresh id (one past the largest id in use).
    pub fn add_node(&mut self, elements: ElementSet) -> NodeId {
        let id = self.fresh_id();
        self.nodes.insert(id, elements);
        id
    }

    pub fn insert_node(&mut self, id: NodeId, elements: ElementSet) {
        self.nodes.insert(id, elements);
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<()> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        self.edges.insert(ordered(a, b));
        Ok(())
    }

    fn fresh_id(&self) -> NodeId {
        self.nodes
            .keys()
            .next_back()
            .map_or(NodeId(0), |n| NodeId(n.0 + 1))
    }

    fn check_node(&self, n: NodeId) -> Result<ElementSet> {
        self.nodes.get(&n).copied().ok_or(Error::UnknownNode(n))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, ElementSet)> + '_ {
        self.nodes.iter().map(|(&n, &s)| (n, s))
    }

    pub fn node(&self, n: NodeId) -> Option<ElementSet> {
        self.nodes.get(&n).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.edges.contains(&ordered(a, b))
    }

    pub fn neighbors(&self, n: NodeId) -> BTreeSet<NodeId> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == n {
                    Some(b)
                } else if b == n {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Union of all node element sets.
    pub fn elements(&self) -> ElementSet {
        self.nodes
            .values()
            .fold(ElementSet::EMPTY, |acc, &s| acc.union(s))
    }

    pub fn is_single_element(&self) -> bool {
        self.nodes.values().all(|s| s.len() == 1)
    }

    /// The lowest-id node whose element set contains `e`.
    pub fn node_with(&self, e: Element) -> Option<NodeId> {
        self.nodes
            .iter()
            .find(|(_, s)| s.contains(e))
            .map(|(&n, _)| n)
    }

    pub fn expand(&self) -> ElementGraph {
        let mut adj = vec![ElementSet::EMPTY; MAX_ELEMENTS];
        for &s in self.nodes.values() {
            for e in s {
                adj[e.index()] = adj[e.index()].union(s);
            }
        }
        for &(a, b) in &self.edges {
            let (sa, sb) = (self.nodes[&a], self.nodes[&b]);
            for e in sa {
                adj[e.index()] = adj[e.index()].union(sb);
            }
            for e in sb {
                adj[e.index()] = adj[e.index()].union(sa);
            }
        }
        for (i, s) in adj.iter_mut().enumerate() {
            s.remove(Element::new(i));
        }
        ElementGraph {
            vertices: self.elements(),
            adj,
        }
    }

    /// Re-expresses the graph with one node per element, node id equal to
    /// the element index. Separation is unchanged.
    pub fn to_single_element(&self) -> UGraph {
        let eg = self.expand();
        let mut g = UGraph::new();
        for e in eg.vertices {
            g.nodes
                .insert(NodeId(e.index() as u32), ElementSet::singleton(e));
        }
        for (a, b) in eg.edges() {
            g.edges
                .insert((NodeId(a.index() as u32), NodeId(b.index() as u32)));
        }
        g
    }

    /// Whether `z` separates `x` from `y`. Every queried element must be
    /// present in the graph.
    pub fn separates(&self, x: ElementSet, z: ElementSet, y: ElementSet) -> Result<bool> {
        if !x.union(z).union(y).is_subset(self.elements()) {
            return Err(Error::MissingElements);
        }
        Ok(self.expand().separates(x, z, y))
    }

    pub fn add_arcs(&self, arcs: &[(NodeId, NodeId)]) -> Result<UGraph> {
        let mut g = self.clone();
        for &(a, b) in arcs {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Connects every pair of `n`'s neighbours, then removes `n`.
    pub fn delete_node(&self, n: NodeId) -> Result<UGraph> {
        self.check_node(n)?;
        let nbrs: Vec<NodeId> = self.neighbors(n).into_iter().collect();
        let mut g = self.clone();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                g.edges.insert(ordered(a, b));
            }
        }
        g.nodes.remove(&n);
        g.edges.retain(|&(a, b)| a != n && b != n);
        Ok(g)
    }

    /// Replaces `n1` and `n2` by one node, kept under id `n1`, holding the
    /// union of their elements and adjacent to all of their neighbours.
    pub fn merge_nodes(&self, n1: NodeId, n2: NodeId) -> Result<UGraph> {
        let s1 = self.check_node(n1)?;
        let s2 = self.check_node(n2)?;
        if n1 == n2 {
            return Err(Error::SameNode(n1));
        }
        let mut nbrs = self.neighbors(n1);
        nbrs.extend(self.neighbors(n2));
        nbrs.remove(&n1);
        nbrs.remove(&n2);
        let mut g = self.clone();
        g.nodes.remove(&n2);
        g.nodes.insert(n1, s1.union(s2));
        g.edges
            .retain(|&(a, b)| a != n1 && b != n1 && a != n2 && b != n2);
        for m in nbrs {
            g.edges.insert(ordered(n1, m));
        }
        Ok(g)
    }

    /// Replaces `n` by two adjacent nodes: `part1` keeps id `n`, `part2`
    /// gets a fresh id. Both inherit all of `n`'s neighbours. Parts may
    /// overlap but must cover `n`'s elements.
    pub fn split_node(&self, n: NodeId, part1: ElementSet, part2: ElementSet) -> Result<UGraph> {
        let s = self.check_node(n)?;
        if part1.is_empty() || part2.is_empty() {
            return Err(Error::EmptyPart);
        }
        if part1.union(part2) != s {
            return Err(Error::CoverageGap);
        }
        let nbrs = self.neighbors(n);
        let mut g = self.clone();
        g.nodes.insert(n, part1);
        let m = g.add_node(part2);
        g.edges.insert(ordered(n, m));
        for k in nbrs {
            g.edges.insert(ordered(m, k));
        }
        Ok(g)
    }

    /// Reports node pairs sharing an element that are joined by a simple
    /// path through some node lacking that element.
    pub fn validate_element_paths(&self) -> Vec<PathViolation> {
        let ids: Vec<NodeId> = self.nodes.keys().copied().collect();
        let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for &(a, b) in &self.edges {
            adj[index[&a]].push(index[&b]);
            adj[index[&b]].push(index[&a]);
        }
        let mut out = Vec::new();
        for e in self.elements() {
            let holders: Vec<usize> = (0..ids.len())
                .filter(|&i| self.nodes[&ids[i]].contains(e))
                .collect();
            if holders.len() < 2 {
                continue;
            }
            for (i, &a) in holders.iter().enumerate() {
                for &b in &holders[i + 1..] {
                    let via = (0..ids.len())
                        .filter(|&w| !self.nodes[&ids[w]].contains(e))
                        .find(|&w| simple_path_through(&adj, a, w, b));
                    if let Some(w) = via {
                        out.push(PathViolation {
                            element: e,
                            from: ids[a],
                            to: ids[b],
                            via: ids[w],
                        });
                    }
                }
            }
        }
        out
    }
}

/// Element `element` sits in `from` and `to` but a path between them passes
/// through `via`, which lacks it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PathViolation {
    pub element: Element,
    pub from: NodeId,
    pub to: NodeId,
    pub via: NodeId,
}

/// Whether a simple path `a .. w .. b` exists: two vertex-disjoint paths
/// from `w`, one ending at `a` and one at `b`. Unit vertex capacities,
/// two rounds of augmentation.
fn simple_path_through(adj: &[Vec<usize>], a: usize, w: usize, b: usize) -> bool {
    let n = adj.len();
    // Vertex v splits into in = 2v and out = 2v+1; sink = 2n.
    let sink = 2 * n;
    let mut cap: BTreeMap<(usize, usize), i32> = BTreeMap::new();
    let mut out_edges = vec![Vec::new(); 2 * n + 1];
    let mut link = |u: usize, v: usize, c: i32, cap: &mut BTreeMap<(usize, usize), i32>| {
        *cap.entry((u, v)).or_insert(0) += c;
        cap.entry((v, u)).or_insert(0);
        out_edges[u].push(v);
        out_edges[v].push(u);
    };
    for (v, nbrs) in adj.iter().enumerate() {
        let c = if v == w { 2 } else { 1 };
        link(2 * v, 2 * v + 1, c, &mut cap);
        for &u in nbrs {
            link(2 * v + 1, 2 * u, 1, &mut cap);
        }
    }
    link(2 * a + 1, sink, 1, &mut cap);
    link(2 * b + 1, sink, 1, &mut cap);

    let source = 2 * w + 1;
    let mut flow = 0;
    while flow < 2 {
        let mut prev = vec![usize::MAX; 2 * n + 1];
        prev[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &out_edges[u] {
                if prev[v] == usize::MAX && cap[&(u, v)] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            break;
        }
        let mut v = sink;
        while v != source {
            let u = prev[v];
            *cap.get_mut(&(u, v)).unwrap() -= 1;
            *cap.get_mut(&(v, u)).unwrap() += 1;
            v = u;
        }
        flow += 1;
    }
    // The source is w's out-half; w's in-half must not be reused, which the
    // unit capacities on other vertices already guarantee.
    flow == 2
}

/// Simple graph over elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ElementGraph {
    vertices: ElementSet,
    adj: Vec<ElementSet>,
}

impl ElementGraph {
    pub fn vertices(&self) -> ElementSet {
        self.vertices
    }

    pub fn neighbors(&self, e: Element) -> ElementSet {
        self.adj[e.index()]
    }

    pub fn edges(&self) -> Vec<(Element, Element)> {
        let mut out = Vec::new();
        for a in self.vertices {
            for b in self.adj[a.index()] {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn has_edge(&self, a: Element, b: Element) -> bool {
        self.adj[a.index()].contains(b)
    }

    /// No path from `x` to `y` once `z` is removed.
    pub fn separates(&self, x: ElementSet, z: ElementSet, y: ElementSet) -> bool {
        let y = y.difference(z);
        let mut reached = x.difference(z);
        let mut frontier = reached;
        while !frontier.is_empty() {
            if !reached.is_disjoint(y) {
                return false;
            }
            let mut next = ElementSet::EMPTY;
            for e in frontier {
                next = next.union(self.adj[e.index()]);
            }
            frontier = next.difference(z).difference(reached);
            reached = reached.union(frontier);
        }
        reached.is_disjoint(y)
    }
}
