//! Graphical derivations: move scripts over MUGs that end in a MUG
//! satisfying a target statement.
//!
//! [`replay_chain`] turns an axiom chain into a script using node deletion
//! and graph combination only. [`search`] looks for a script directly with
//! a bounded breadth-first search. Both work on single-element-node graphs.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use crate::closure::{contraction_matches, AxiomStep, Rule};
use crate::element::{CanonicalStatement, Element, ElementSet, Universe};
use crate::error::{Error, Result};
use crate::mug::{GraphKey, Mug, Transformation};
use crate::ugraph::{NodeId, UGraph};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Move {
    Delete {
        graph: usize,
        node: NodeId,
    },
    AddArcs {
        graph: usize,
        arcs: Vec<(NodeId, NodeId)>,
    },
    Combine {
        statement: CanonicalStatement,
        graph: usize,
    },
    Merge {
        graph: usize,
        a: NodeId,
        b: NodeId,
    },
    Split {
        graph: usize,
        node: NodeId,
        part1: ElementSet,
        part2: ElementSet,
    },
}

impl Move {
    /// Applies the move; returns the new MUG and the index of the graph it
    /// produced (an existing index when the graph was already present).
    pub fn apply(&self, m: &Mug) -> Result<(Mug, usize)> {
        match self {
            Move::Delete { graph, node } => {
                m.append_transformed(*graph, &Transformation::DeleteNode(*node))
            }
            Move::AddArcs { graph, arcs } => {
                m.append_transformed(*graph, &Transformation::AddArcs(arcs.clone()))
            }
            Move::Combine { statement, graph } => m.combine(statement, *graph),
            Move::Merge { graph, a, b } => {
                m.append_transformed(*graph, &Transformation::MergeNodes(*a, *b))
            }
            Move::Split {
                graph,
                node,
                part1,
                part2,
            } => m.append_transformed(
                *graph,
                &Transformation::SplitNode {
                    node: *node,
                    part1: *part1,
                    part2: *part2,
                },
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MoveScript {
    pub initial: Mug,
    pub moves: Vec<Move>,
    pub target: CanonicalStatement,
}

impl MoveScript {
    /// Every MUG along the script, starting with `initial`. `Err` carries
    /// the index of the first move that fails to apply.
    pub fn states(&self) -> Result<Vec<Mug>, usize> {
        let mut out = vec![self.initial.clone()];
        for (i, mv) in self.moves.iter().enumerate() {
            let (next, _) = mv.apply(out.last().unwrap()).map_err(|_| i)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Replays the script. `Err(i)` names the failing move; `i == moves.len()`
/// means every move applied but the target is not satisfied at the end.
pub fn verify_script(script: &MoveScript) -> Result<(), usize> {
    let states = script.states()?;
    match states.last().unwrap().satisfies(&script.target) {
        Some(_) => Ok(()),
        None => Err(script.moves.len()),
    }
}

/// Single-element graph with a clique on `x ∪ z`, a clique on `y ∪ z`, and
/// no edge between `x` and `y`.
pub fn witness_graph(s: &CanonicalStatement) -> UGraph {
    let mut edges = Vec::new();
    for side in [s.x().union(s.z()), s.y().union(s.z())] {
        let els: Vec<Element> = side.iter().collect();
        for (i, &a) in els.iter().enumerate() {
            for &b in &els[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    UGraph::single_element(s.elements(), edges).expect("edges between present elements")
}

/// MUG holding one witness graph per statement, in the given order.
pub fn witness_mug<'a>(
    universe: Arc<Universe>,
    statements: impl IntoIterator<Item = &'a CanonicalStatement>,
) -> Result<Mug> {
    Mug::from_graphs(universe, statements.into_iter().map(witness_graph))
}

/// Builds a move script realizing the last conclusion of `chain`.
///
/// Steps already satisfied need no moves; this covers givens and every
/// decomposition, weak-union and symmetry step, whose premise witness
/// also witnesses the conclusion. A contraction from `I(x, z ∪ y, w)` and
/// `I(x, z, y)` reduces the witness of the second premise to exactly
/// `x ∪ z ∪ y` by deleting the other nodes in element order, then combines
/// it with the first premise, or with `I(x ∪ y, z, w)` when that is
/// already satisfied.
pub fn replay_chain(m0: &Mug, chain: &[AxiomStep]) -> Result<MoveScript> {
    let initial = m0.to_single_element();
    let target = chain
        .last()
        .ok_or(Error::InvalidChain { step: 0 })?
        .conclusion;
    let mut m = initial.clone();
    let mut moves = Vec::new();
    for (i, step) in chain.iter().enumerate() {
        if m.satisfies(&step.conclusion).is_some() {
            continue;
        }
        match step.rule {
            Rule::Given => return Err(Error::PremiseNotSatisfied { step: i }),
            Rule::Symmetry | Rule::Decomposition | Rule::WeakUnion => {
                return Err(Error::InvalidChain { step: i })
            }
            Rule::Contraction => {}
        }
        let [major, minor] = match step.premises.as_slice() {
            &[a, b] if a < i && b < i => [chain[a].conclusion, chain[b].conclusion],
            _ => return Err(Error::InvalidChain { step: i }),
        };
        let inst = contraction_matches(&major, &minor)
            .into_iter()
            .find(|c| c.conclusion() == step.conclusion)
            .ok_or(Error::InvalidChain { step: i })?;
        if m.satisfies(&major).is_none() {
            return Err(Error::PremiseNotSatisfied { step: i });
        }
        let mut gi = m
            .satisfies(&minor)
            .ok_or(Error::PremiseNotSatisfied { step: i })?;

        let keep = inst.x.union(inst.z).union(inst.y);
        let extra = m.graph(gi)?.elements().difference(keep);
        for e in extra {
            let node = m.graph(gi)?.node_with(e).expect("element present");
            let mv = Move::Delete { graph: gi, node };
            let (next, idx) = mv.apply(&m)?;
            moves.push(mv);
            m = next;
            gi = idx;
        }
        if !m.graph(gi)?.separates(inst.x, inst.z, inst.y)? {
            return Err(Error::ReducedGraphLosesSeparation { step: i });
        }
        // I(x ∪ y, z, w) also fits the reduced graph and cliques w with z
        // alone; use it when the MUG already has it.
        let statement = CanonicalStatement::from_parts(inst.x.union(inst.y), inst.z, inst.w)
            .filter(|s| m.satisfies(s).is_some())
            .unwrap_or(major);
        let mv = Move::Combine {
            statement,
            graph: gi,
        };
        let (next, _) = mv.apply(&m)?;
        moves.push(mv);
        m = next;
        if m.satisfies(&step.conclusion).is_none() {
            return Err(Error::InvalidChain { step: i });
        }
    }
    Ok(MoveScript {
        initial,
        moves,
        target,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchBounds {
    pub max_moves: usize,
    pub max_graphs: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct SearchStats {
    /// Distinct MUG states reached, including the start.
    pub states: usize,
    /// Deepest level expanded.
    pub depth: usize,
    /// Size of the last non-empty frontier.
    pub frontier: usize,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(MoveScript),
    Exhausted(SearchStats),
}

/// Deletions and combinations available in `m`, ordered by graph index,
/// then deletions by node id, then combinations by statement.
pub fn candidate_moves(m: &Mug) -> Result<Vec<Move>> {
    let satisfied = m.enumerate_satisfied()?;
    let mut out = Vec::new();
    for (gi, g) in m.graphs().enumerate() {
        if g.node_count() > 1 {
            for (node, _) in g.nodes() {
                out.push(Move::Delete { graph: gi, node });
            }
        }
        let have = g.elements();
        for s in &satisfied {
            if s.orientations()
                .iter()
                .any(|&(side, z, _)| side.union(z) == have)
            {
                out.push(Move::Combine {
                    statement: *s,
                    graph: gi,
                });
            }
        }
    }
    Ok(out)
}

/// Breadth-first search over MUG states reachable by node deletion and
/// graph combination. States are identified by their sorted graph keys;
/// states with more than `max_graphs` graphs are dropped.
pub fn search(
    m0: &Mug,
    target: &CanonicalStatement,
    bounds: SearchBounds,
) -> Result<SearchOutcome> {
    let start = m0.to_single_element();
    let found = |moves: Vec<Move>| {
        SearchOutcome::Found(MoveScript {
            initial: start.clone(),
            moves,
            target: *target,
        })
    };
    if start.satisfies(target).is_some() {
        return Ok(found(Vec::new()));
    }
    let mut seen: HashSet<Vec<GraphKey>> = HashSet::from([start.state_key()]);
    let mut frontier = vec![(start.clone(), Vec::<Move>::new())];
    let mut stats = SearchStats {
        states: 1,
        depth: 0,
        frontier: 1,
    };
    for depth in 1..=bounds.max_moves {
        let mut next = Vec::new();
        for (m, path) in &frontier {
            for mv in candidate_moves(m)? {
                let (after, _) = mv.apply(m)?;
                if after.len() > bounds.max_graphs || !seen.insert(after.state_key()) {
                    continue;
                }
                stats.states += 1;
                let mut moves = path.clone();
                moves.push(mv);
                if after.satisfies(target).is_some() {
                    return Ok(found(moves));
                }
                next.push((after, moves));
            }
        }
        if next.is_empty() {
            break;
        }
        stats.depth = depth;
        stats.frontier = next.len();
        frontier = next;
    }
    Ok(SearchOutcome::Exhausted(stats))
}

/// Union of statements satisfied along every state of the script.
pub fn satisfied_along(script: &MoveScript) -> Result<BTreeSet<CanonicalStatement>> {
    let states = script
        .states()
        .map_err(|step| Error::InvalidChain { step })?;
    let mut out = BTreeSet::new();
    for m in &states {
        out.extend(m.enumerate_satisfied()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::Closure;

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

        fn el(&self, n: &str) -> Element {
            self.u.element(n).unwrap()
        }
    }

    #[test]
    fn witness_graph_shapes() {
        let f = Fx::new(&["a", "b", "c", "w", "x", "y", "z"]);
        let g = witness_graph(&f.s(&["x"], &["z"], &["y"])).expand();
        assert_eq!(g.edges().len(), 2);
        assert!(g.has_edge(f.el("x"), f.el("z")) && g.has_edge(f.el("z"), f.el("y")));

        let g = witness_graph(&f.s(&["x"], &["z"], &["y", "w"])).expand();
        for (a, b) in [("x", "z"), ("z", "y"), ("z", "w"), ("y", "w")] {
            assert!(g.has_edge(f.el(a), f.el(b)));
        }
        assert_eq!(g.edges().len(), 4);

        let g = witness_graph(&f.s(&["a", "b"], &[], &["c"])).expand();
        assert_eq!(g.edges(), vec![(f.el("a"), f.el("b"))]);
        assert_eq!(g.vertices(), f.set(&["a", "b", "c"]));
    }

    fn replay_target(
        f: &Fx,
        premises: &[CanonicalStatement],
        target: CanonicalStatement,
    ) -> MoveScript {
        let m0 = witness_mug(f.u.clone(), premises).unwrap();
        let init = m0.enumerate_satisfied().unwrap();
        let c = Closure::new(&init, f.u.clone()).unwrap();
        let chain = c.chain(&target).expect("target in closure");
        let script = replay_chain(&m0, &chain).unwrap();
        assert_eq!(verify_script(&script), Ok(()));
        script
    }

    #[test]
    fn given_needs_no_moves() {
        let f = Fx::new(&["x", "y", "z"]);
        let s = f.s(&["x"], &["z"], &["y"]);
        assert!(replay_target(&f, &[s], s).moves.is_empty());
    }

    #[test]
    fn contraction_replay_ends_in_combine() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let major = f.s(&["x"], &["z", "y"], &["w"]);
        let minor = f.s(&["x"], &["z"], &["y"]);
        let script = replay_target(&f, &[major, minor], f.s(&["x"], &["z"], &["y", "w"]));
        assert_eq!(
            script.moves,
            vec![Move::Combine {
                statement: major,
                graph: 1
            }]
        );
    }

    #[test]
    fn mixing_replay_separates_everything_by_z() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let p1 = f.s(&["x", "y"], &["z"], &["w"]);
        let p2 = f.s(&["x"], &["z"], &["y"]);
        let script = replay_target(&f, &[p1, p2], f.s(&["x"], &["z"], &["y", "w"]));
        let last = script.states().unwrap().pop().unwrap();
        let g = last.graph(last.len() - 1).unwrap().expand();
        // z is the hub: x, y and w are pairwise separated by it
        for (a, b) in [("x", "y"), ("x", "w"), ("y", "w")] {
            assert!(
                g.separates(f.set(&[a]), f.set(&["z"]), f.set(&[b])),
                "{a} {b}"
            );
        }
    }

    #[test]
    fn replay_rejects_unsatisfied_given() {
        let f = Fx::new(&["x", "y", "z"]);
        let s = f.s(&["x"], &["z"], &["y"]);
        let m0 = Mug::new(f.u.clone());
        let chain = vec![AxiomStep {
            rule: Rule::Given,
            premises: vec![],
            conclusion: s,
        }];
        assert_eq!(
            replay_chain(&m0, &chain).unwrap_err(),
            Error::PremiseNotSatisfied { step: 0 }
        );
    }

    #[test]
    fn replay_deletes_extraneous_nodes() {
        // minor premise I(x, z, y) is only witnessed inside a graph that also holds v
        let f = Fx::new(&["v", "w", "x", "y", "z"]);
        let major = f.s(&["x"], &["z", "y"], &["w"]);
        let wide = f.s(&["x"], &["z"], &["y", "v"]);
        let script = replay_target(&f, &[major, wide], f.s(&["x"], &["z"], &["y", "w"]));
        assert!(matches!(script.moves[0], Move::Delete { graph: 1, .. }));
        assert!(matches!(script.moves.last(), Some(Move::Combine { .. })));
    }

    #[test]
    fn verify_script_rejects_bad_combine() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let minor = f.s(&["x"], &["z"], &["y"]);
        let m0 = witness_mug(f.u.clone(), &[minor]).unwrap();
        let script = MoveScript {
            initial: m0,
            moves: vec![Move::Combine {
                statement: f.s(&["x"], &["z", "y"], &["w"]),
                graph: 0,
            }],
            target: f.s(&["x"], &["z"], &["y", "w"]),
        };
        assert_eq!(verify_script(&script), Err(0));
        let unreached = MoveScript {
            moves: vec![],
            ..script
        };
        assert_eq!(verify_script(&unreached), Err(0));
    }

    #[test]
    fn search_finds_contraction() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let m0 = witness_mug(
            f.u.clone(),
            &[
                f.s(&["x"], &["z", "y"], &["w"]),
                f.s(&["x"], &["z"], &["y"]),
            ],
        )
        .unwrap();
        let target = f.s(&["x"], &["z"], &["y", "w"]);
        let bounds = SearchBounds {
            max_moves: 3,
            max_graphs: 6,
        };
        let SearchOutcome::Found(script) = search(&m0, &target, bounds).unwrap() else {
            panic!("expected a script")
        };
        assert_eq!(verify_script(&script), Ok(()));
        assert_eq!(script.moves.len(), 1);
        let again = search(&m0, &target, bounds).unwrap();
        let SearchOutcome::Found(again) = again else {
            panic!()
        };
        assert_eq!(again.moves, script.moves);
    }

    #[test]
    fn search_trivial_when_already_satisfied() {
        let f = Fx::new(&["x", "y", "z"]);
        let s = f.s(&["x"], &["z"], &["y"]);
        let m0 = witness_mug(f.u.clone(), &[s]).unwrap();
        let out = search(
            &m0,
            &s,
            SearchBounds {
                max_moves: 2,
                max_graphs: 4,
            },
        )
        .unwrap();
        assert!(matches!(out, SearchOutcome::Found(ref sc) if sc.moves.is_empty()));
    }

    #[test]
    fn search_exhausts_on_intersection() {
        let f = Fx::new(&["w", "x", "y", "z"]);
        let m0 = witness_mug(
            f.u.clone(),
            &[
                f.s(&["x"], &["z", "y"], &["w"]),
                f.s(&["x"], &["z", "w"], &["y"]),
            ],
        )
        .unwrap();
        let out = search(
            &m0,
            &f.s(&["x"], &["z"], &["y", "w"]),
            SearchBounds {
                max_moves: 4,
                max_graphs: 8,
            },
        )
        .unwrap();
        let SearchOutcome::Exhausted(stats) = out else {
            panic!("intersection must not be derivable")
        };
        assert!(stats.states > 1);
    }
}
