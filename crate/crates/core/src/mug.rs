//! Multiple undirected graphs (MUGs) as a dependency model.
//!
//! A statement holds in a MUG when some member graph contains all of its
//! elements and separates its sides. Transformations never touch existing
//! graphs: they append one, and a graph whose [`GraphKey`] is already
//! present is not stored twice.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::element::{
    enumerate_canonical, CanonicalStatement, ElementSet, Universe, DEFAULT_ENUMERATION_GUARD,
};
use crate::error::{Error, Result};
use crate::ugraph::{ElementGraph, NodeId, UGraph};

/// Label-exact canonical form of a graph: sorted node element sets and
/// sorted edges between them.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GraphKey {
    nodes: Vec<ElementSet>,
    edges: Vec<(ElementSet, ElementSet)>,
}

impl GraphKey {
    pub fn of(g: &UGraph) -> GraphKey {
        let mut nodes: Vec<ElementSet> = g.nodes().map(|(_, s)| s).collect();
        nodes.sort();
        let mut edges: Vec<(ElementSet, ElementSet)> = g
            .edges()
            .map(|(a, b)| {
                let (sa, sb) = (g.node(a).unwrap(), g.node(b).unwrap());
                if sa <= sb {
                    (sa, sb)
                } else {
                    (sb, sa)
                }
            })
            .collect();
        edges.sort();
        GraphKey { nodes, edges }
    }
}

#[derive(Debug)]
struct Entry {
    graph: UGraph,
    expanded: ElementGraph,
    elements: ElementSet,
    key: GraphKey,
}

impl Entry {
    fn new(graph: UGraph) -> Self {
        Entry {
            expanded: graph.expand(),
            elements: graph.elements(),
            key: GraphKey::of(&graph),
            graph,
        }
    }

    fn witnesses(&self, s: &CanonicalStatement) -> bool {
        s.elements().is_subset(self.elements) && self.expanded.separates(s.x(), s.z(), s.y())
    }
}

/// Per-graph transformations that leave the represented statements
/// unchanged.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Transformation {
    AddArcs(Vec<(NodeId, NodeId)>),
    DeleteNode(NodeId),
    MergeNodes(NodeId, NodeId),
    SplitNode {
        node: NodeId,
        part1: ElementSet,
        part2: ElementSet,
    },
}

impl Transformation {
    pub fn apply(&self, g: &UGraph) -> Result<UGraph> {
        match self {
            Transformation::AddArcs(arcs) => g.add_arcs(arcs),
            Transformation::DeleteNode(n) => g.delete_node(*n),
            Transformation::MergeNodes(a, b) => g.merge_nodes(*a, *b),
            Transformation::SplitNode { node, part1, part2 } => g.split_node(*node, *part1, *part2),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mug {
    universe: Arc<Universe>,
    entries: Vec<Arc<Entry>>,
}

impl Mug {
    pub fn new(universe: Arc<Universe>) -> Self {
        Mug {
            universe,
            entries: Vec::new(),
        }
    }

    pub fn from_graphs(
        universe: Arc<Universe>,
        graphs: impl IntoIterator<Item = UGraph>,
    ) -> Result<Self> {
        let mut m = Mug::new(universe);
        for g in graphs {
            m.push(g)?;
        }
        Ok(m)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn graph(&self, gi: usize) -> Result<&UGraph> {
        self.entries
            .get(gi)
            .map(|e| &e.graph)
            .ok_or(Error::UnknownGraph(gi))
    }

    pub fn graphs(&self) -> impl Iterator<Item = &UGraph> {
        self.entries.iter().map(|e| &e.graph)
    }

    pub fn keys(&self) -> impl Iterator<Item = &GraphKey> {
        self.entries.iter().map(|e| &e.key)
    }

    /// Appends `g` unless an identical graph is present; returns the index
    /// holding it either way.
    pub fn push(&mut self, g: UGraph) -> Result<usize> {
        let extra = g.elements().difference(self.universe.all());
        if let Some(e) = extra.first() {
            return Err(Error::UnknownElement(format!("#{}", e.index())));
        }
        let entry = Entry::new(g);
        if let Some(i) = self.entries.iter().position(|e| e.key == entry.key) {
            return Ok(i);
        }
        self.entries.push(Arc::new(entry));
        Ok(self.entries.len() - 1)
    }

    /// Lowest-index graph witnessing `s`, if any.
    pub fn satisfies(&self, s: &CanonicalStatement) -> Option<usize> {
        self.entries.iter().position(|e| e.witnesses(s))
    }

    pub fn enumerate_satisfied(&self) -> Result<BTreeSet<CanonicalStatement>> {
        self.enumerate_satisfied_with_guard(DEFAULT_ENUMERATION_GUARD)
    }

    pub fn enumerate_satisfied_with_guard(
        &self,
        guard: usize,
    ) -> Result<BTreeSet<CanonicalStatement>> {
        if self.universe.len() > guard {
            return Err(Error::UniverseTooLarge {
                size: self.universe.len(),
                guard,
            });
        }
        let mut out = BTreeSet::new();
        for e in &self.entries {
            for s in enumerate_canonical(e.elements, guard)? {
                if e.expanded.separates(s.x(), s.z(), s.y()) {
                    out.insert(s);
                }
            }
        }
        Ok(out)
    }

    /// Graph combination. Graph `gi` must hold exactly the elements of one
    /// side of `s` together with its conditioning set; the other side is
    /// added as fresh single-element nodes, cliqued with each other and
    /// with every node carrying a conditioning element.
    pub fn combine(&self, s: &CanonicalStatement, gi: usize) -> Result<(Mug, usize)> {
        let g = self.graph(gi)?;
        if self.satisfies(s).is_none() {
            return Err(Error::StatementNotSatisfied);
        }
        let have = g.elements();
        let added = s
            .orientations()
            .into_iter()
            .find(|&(side, z, _)| side.union(z) == have)
            .map(|(_, _, other)| other)
            .ok_or(Error::WrongElementSet { graph: gi })?;

        let mut next = g.clone();
        let mut clique: Vec<NodeId> = g
            .nodes()
            .filter(|(_, els)| !els.is_disjoint(s.z()))
            .map(|(n, _)| n)
            .collect();
        for e in added {
            clique.push(next.add_node(ElementSet::singleton(e)));
        }
        for (i, &a) in clique.iter().enumerate() {
            for &b in &clique[i + 1..] {
                next.add_edge(a, b)?;
            }
        }
        let mut m = self.clone();
        let idx = m.push(next)?;
        Ok((m, idx))
    }

    pub fn append_transformed(&self, gi: usize, t: &Transformation) -> Result<(Mug, usize)> {
        let g = t.apply(self.graph(gi)?)?;
        let mut m = self.clone();
        let idx = m.push(g)?;
        Ok((m, idx))
    }

    /// Same statements, every graph re-expressed with single-element nodes.
    pub fn to_single_element(&self) -> Mug {
        let mut m = Mug::new(self.universe.clone());
        for e in &self.entries {
            m.push(e.graph.to_single_element())
                .expect("elements already validated");
        }
        m
    }

    /// Order-independent identity of the MUG's graph collection.
    pub fn state_key(&self) -> Vec<GraphKey> {
        let mut keys: Vec<GraphKey> = self.keys().cloned().collect();
        keys.sort();
        keys
    }
}
