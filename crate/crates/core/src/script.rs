//! Text forms of proof artifacts: axiom chains and move scripts.
//!
//! Chain lines read `step <i> <rule> [<premise>...] : <X> | <Z> | <Y>`.
//! A move script is a universe line, the initial graphs, one line per move
//! and a closing target line:
//!
//! ```text
//! universe w x y z
//! graph g0 {
//!   node n1 = {x};
//!   edge n1 n3;
//! }
//! move delete g0 n1
//! move add-arcs g0 n1 n2 n2 n3
//! move combine g1 {x} | {z} | {y}
//! move merge g0 n1 n2
//! move split g0 n1 {x} {y}
//! target {x} | {z} | {y,w}
//! ```
//!
//! Graphs are named by MUG index and nodes by id, both as of the state the
//! move applies to.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::closure::{AxiomStep, Rule};
use crate::derivation::{Move, MoveScript};
use crate::element::{Canonical, CanonicalStatement, ElementSet, Statement, Universe};
use crate::error::{Error, ParseErrorKind, Result};
use crate::mug::Mug;
use crate::ugraph::{NodeId, UGraph};

pub fn format_chain(u: &Universe, chain: &[AxiomStep]) -> String {
    let mut out = String::new();
    for (i, step) in chain.iter().enumerate() {
        let _ = write!(out, "step {i} {}", step.rule);
        for p in &step.premises {
            let _ = write!(out, " {p}");
        }
        let _ = writeln!(out, " : {}", u.fmt_statement(&step.conclusion));
    }
    out
}

pub fn parse_chain(u: &Universe, text: &str) -> Result<Vec<AxiomStep>> {
    let mut steps = Vec::new();
    for (ln, line) in lines(text) {
        let (head, stmt) = line
            .split_once(':')
            .ok_or_else(|| syntax(ln, "expected `:` before the conclusion"))?;
        let mut words = head.split_whitespace();
        if words.next() != Some("step") {
            return Err(syntax(ln, "expected `step`"));
        }
        let idx: usize = number(ln, words.next())?;
        if idx != steps.len() {
            return Err(syntax(ln, "steps must be numbered from 0 in order"));
        }
        let rule: Rule = words
            .next()
            .ok_or_else(|| syntax(ln, "missing rule"))?
            .parse()
            .map_err(|e: String| syntax(ln, e))?;
        let premises = words
            .map(|w| number(ln, Some(w)))
            .collect::<Result<Vec<usize>>>()?;
        steps.push(AxiomStep {
            rule,
            premises,
            conclusion: statement(u, ln, stmt)?,
        });
    }
    Ok(steps)
}

fn node(n: NodeId) -> String {
    format!("n{}", n.0)
}

pub fn format_graph(u: &Universe, name: &str, g: &UGraph) -> String {
    let mut out = format!("graph {name} {{\n");
    for (n, s) in g.nodes() {
        let _ = writeln!(out, "  node {} = {};", node(n), u.fmt_set(s));
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  edge {} {};", node(a), node(b));
    }
    out.push_str("}\n");
    out
}

pub fn format_move(u: &Universe, mv: &Move) -> String {
    match mv {
        Move::Delete { graph, node: n } => format!("move delete g{graph} {}", node(*n)),
        Move::AddArcs { graph, arcs } => {
            let mut s = format!("move add-arcs g{graph}");
            for &(a, b) in arcs {
                let _ = write!(s, " {} {}", node(a), node(b));
            }
            s
        }
        Move::Combine { statement, graph } => {
            format!("move combine g{graph} {}", u.fmt_statement(statement))
        }
        Move::Merge { graph, a, b } => format!("move merge g{graph} {} {}", node(*a), node(*b)),
        Move::Split {
            graph,
            node: n,
            part1,
            part2,
        } => format!(
            "move split g{graph} {} {} {}",
            node(*n),
            u.fmt_set(*part1),
            u.fmt_set(*part2)
        ),
    }
}

pub fn format_script(s: &MoveScript) -> String {
    let u = s.initial.universe();
    let mut out = format!("universe {}\n", u.names().join(" "));
    for (i, g) in s.initial.graphs().enumerate() {
        out.push_str(&format_graph(u, &format!("g{i}"), g));
    }
    for mv in &s.moves {
        out.push_str(&format_move(u, mv));
        out.push('\n');
    }
    let _ = writeln!(out, "target {}", u.fmt_statement(&s.target));
    out
}

pub fn parse_script(text: &str) -> Result<MoveScript> {
    let mut lines = lines(text).peekable();
    let (ln, first) = lines.next().ok_or_else(|| syntax(1, "empty script"))?;
    let names: Vec<&str> = match first.split_whitespace().collect::<Vec<_>>().split_first() {
        Some((&"universe", rest)) => rest.to_vec(),
        _ => return Err(syntax(ln, "expected `universe`")),
    };
    let u = Arc::new(Universe::new(names).map_err(|e| invalid(ln, e))?);
    let mut graphs = Vec::new();
    while let Some((ln, line)) = lines.peek().copied() {
        if !line.starts_with("graph ") {
            break;
        }
        lines.next();
        let head: Vec<&str> = line.split_whitespace().collect();
        if head.len() != 3 || head[1] != format!("g{}", graphs.len()) || head[2] != "{" {
            return Err(syntax(ln, format!("expected `graph g{} {{`", graphs.len())));
        }
        let mut g = UGraph::new();
        let mut edges = Vec::new();
        loop {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| syntax(ln, "unterminated graph"))?;
            if line == "}" {
                break;
            }
            let body = line
                .strip_suffix(';')
                .ok_or_else(|| syntax(ln, "expected `;`"))?;
            let w: Vec<&str> = body.split_whitespace().collect();
            match w.as_slice() {
                ["node", id, "=", set] => {
                    g.insert_node(node_id(ln, id)?, element_set(&u, ln, set)?)
                }
                ["edge", a, b] => edges.push((ln, node_id(ln, a)?, node_id(ln, b)?)),
                _ => return Err(syntax(ln, "expected `node` or `edge`")),
            }
        }
        for (ln, a, b) in edges {
            g.add_edge(a, b).map_err(|e| invalid(ln, e))?;
        }
        graphs.push(g);
    }
    let n_graphs = graphs.len();
    let initial = Mug::from_graphs(u.clone(), graphs).map_err(|e| invalid(ln, e))?;
    if initial.len() != n_graphs {
        return Err(syntax(ln, "initial graphs must be distinct"));
    }
    let mut moves = Vec::new();
    let mut target = None;
    for (ln, line) in lines {
        if target.is_some() {
            return Err(syntax(ln, "nothing may follow the target"));
        }
        if let Some(rest) = line.strip_prefix("target ") {
            target = Some(statement(&u, ln, rest)?);
            continue;
        }
        let w: Vec<&str> = line.split_whitespace().collect();
        let mv = match w.as_slice() {
            ["move", "delete", g, n] => Move::Delete {
                graph: graph_index(ln, g)?,
                node: node_id(ln, n)?,
            },
            ["move", "add-arcs", g, rest @ ..] if rest.len() % 2 == 0 => Move::AddArcs {
                graph: graph_index(ln, g)?,
                arcs: rest
                    .chunks(2)
                    .map(|p| Ok((node_id(ln, p[0])?, node_id(ln, p[1])?)))
                    .collect::<Result<_>>()?,
            },
            ["move", "combine", g, ..] => {
                let rest = line.splitn(4, char::is_whitespace).nth(3).unwrap_or("");
                Move::Combine {
                    graph: graph_index(ln, g)?,
                    statement: statement(&u, ln, rest)?,
                }
            }
            ["move", "merge", g, a, b] => Move::Merge {
                graph: graph_index(ln, g)?,
                a: node_id(ln, a)?,
                b: node_id(ln, b)?,
            },
            ["move", "split", g, n, p1, p2] => Move::Split {
                graph: graph_index(ln, g)?,
                node: node_id(ln, n)?,
                part1: element_set(&u, ln, p1)?,
                part2: element_set(&u, ln, p2)?,
            },
            _ => return Err(syntax(ln, "unrecognized move")),
        };
        moves.push(mv);
    }
    let target = target.ok_or_else(|| syntax(ln, "missing `target` line"))?;
    Ok(MoveScript {
        initial,
        moves,
        target,
    })
}

/// Trimmed non-empty lines with `#` comments removed, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap().trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column: 1,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

fn invalid(line: usize, e: Error) -> Error {
    Error::Parse {
        line,
        column: 1,
        kind: ParseErrorKind::Invalid(Box::new(e)),
    }
}

fn number(ln: usize, w: Option<&str>) -> Result<usize> {
    w.and_then(|w| w.parse().ok())
        .ok_or_else(|| syntax(ln, "expected a number"))
}

fn node_id(ln: usize, w: &str) -> Result<NodeId> {
    w.strip_prefix('n')
        .and_then(|d| d.parse().ok())
        .map(NodeId)
        .ok_or_else(|| syntax(ln, format!("bad node id `{w}`")))
}

fn graph_index(ln: usize, w: &str) -> Result<usize> {
    w.strip_prefix('g')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| syntax(ln, format!("bad graph name `{w}`")))
}

fn element_set(u: &Universe, ln: usize, w: &str) -> Result<ElementSet> {
    let inner = w
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| syntax(ln, format!("bad set `{w}`")))?;
    let mut s = ElementSet::EMPTY;
    if inner.trim().is_empty() {
        return Ok(s);
    }
    for name in inner.split(',') {
        let name = name.trim();
        let e = u.element(name).map_err(|_| Error::Parse {
            line: ln,
            column: 1,
            kind: ParseErrorKind::UnknownElement(name.to_string()),
        })?;
        s.insert(e);
    }
    Ok(s)
}

/// Parses `<X> | <Z> | <Y>`; trivially true triples are rejected since no
/// artifact needs them.
pub fn statement(u: &Universe, ln: usize, text: &str) -> Result<CanonicalStatement> {
    let parts: Vec<&str> = text.split('|').collect();
    let [x, z, y] = parts.as_slice() else {
        return Err(syntax(ln, "expected `X | Z | Y`"));
    };
    let s = Statement::new(
        element_set(u, ln, x)?,
        element_set(u, ln, z)?,
        element_set(u, ln, y)?,
    );
    match s.canonicalize().map_err(|e| invalid(ln, e))? {
        Canonical::Statement(c) => Ok(c),
        Canonical::TriviallyTrue => Err(syntax(ln, "statement is trivially true")),
    }
}
