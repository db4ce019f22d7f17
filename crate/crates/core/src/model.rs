//! Model files: a universe plus named graphs, directed graphs, join trees
//! and statements.
//!
//! ```text
//! universe a b c
//! graph G { node n1 = {a,b}; node n2 = {c}; edge n1 n2; }
//! digraph D { node a; det node b; arc a b; }
//! jointree T { cluster c1 = {a,b}; cluster c2 = {b,c}; link c1 c2; }
//! stmt S: {a} | {b} | {c}
//! ```
//!
//! Newlines end `universe` and `stmt` lines; inside braces they are plain
//! whitespace. `#` starts a comment running to the end of the line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::dsep::{DiGraph, JoinTree};
use crate::element::{ElementSet, Statement, Universe};
use crate::error::{Error, ParseErrorKind, Result};
use crate::ugraph::{NodeId, UGraph};

/// Undirected graph with its declared node names. Node ids follow
/// declaration order from zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NamedGraph {
    pub graph: UGraph,
    pub node_names: BTreeMap<NodeId, String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NamedJoinTree {
    pub tree: JoinTree,
    pub cluster_names: BTreeMap<NodeId, String>,
}

impl NamedGraph {
    pub fn node_name(&self, n: NodeId) -> String {
        self.node_names
            .get(&n)
            .cloned()
            .unwrap_or_else(|| n.to_string())
    }
}

impl NamedJoinTree {
    pub fn cluster_name(&self, n: NodeId) -> String {
        self.cluster_names
            .get(&n)
            .cloned()
            .unwrap_or_else(|| n.to_string())
    }
}

/// Parsed model. Each list keeps declaration order; names are unique
/// across all lists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModelFile {
    pub universe: Arc<Universe>,
    pub graphs: Vec<(String, NamedGraph)>,
    pub digraphs: Vec<(String, DiGraph)>,
    pub jointrees: Vec<(String, NamedJoinTree)>,
    pub statements: Vec<(String, Statement)>,
}

impl ModelFile {
    pub fn graph(&self, name: &str) -> Option<&NamedGraph> {
        self.graphs.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn digraph(&self, name: &str) -> Option<&DiGraph> {
        self.digraphs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
    }

    pub fn jointree(&self, name: &str) -> Option<&NamedJoinTree> {
        self.jointrees
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn statement(&self, name: &str) -> Option<&Statement> {
        self.statements
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Punct(char),
    Newline,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> Error {
    Error::Parse { line, column, kind }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if is_ident_char(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let tok = Tok::Ident(chars[start..i].iter().collect());
                out.push(Token { tok, line, column });
            } else if "{}=;,|:".contains(c) {
                out.push(Token {
                    tok: Tok::Punct(c),
                    line,
                    column,
                });
                i += 1;
            } else {
                return Err(err(
                    line,
                    column,
                    ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
                ));
            }
        }
        out.push(Token {
            tok: Tok::Newline,
            line,
            column: chars.len() + 1,
        });
    }
    let line = out.last().map_or(1, |t| t.line + 1);
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: 1,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    universe: Option<Arc<Universe>>,
    names: BTreeSet<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn syntax(t: &Token, msg: impl Into<String>) -> Error {
        err(t.line, t.column, ParseErrorKind::Syntax(msg.into()))
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            _ => Err(Self::syntax(&t, "expected a name")),
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Punct(c) {
            Ok(())
        } else {
            Err(Self::syntax(&t, format!("expected `{c}`")))
        }
    }

    /// Like `punct` but skips newlines first; used inside braces.
    fn punct_in_block(&mut self, c: char) -> Result<()> {
        self.skip_newlines();
        self.punct(c)
    }

    fn end_of_line(&mut self) -> Result<()> {
        if self.peek().tok == Tok::Punct(';') {
            self.pos += 1;
        }
        let t = self.next();
        match t.tok {
            Tok::Newline | Tok::Eof => Ok(()),
            _ => Err(Self::syntax(&t, "expected end of line")),
        }
    }

    fn declare(&mut self, name: &str, at: &Token) -> Result<()> {
        if !self.names.insert(name.to_string()) {
            return Err(err(
                at.line,
                at.column,
                ParseErrorKind::DuplicateName(name.to_string()),
            ));
        }
        Ok(())
    }

    fn universe(&self, at: &Token) -> Result<&Arc<Universe>> {
        self.universe
            .as_ref()
            .ok_or_else(|| Self::syntax(at, "`universe` must come first"))
    }

    fn element(&mut self) -> Result<crate::element::Element> {
        let (name, t) = self.ident()?;
        self.universe(&t)?
            .element(&name)
            .map_err(|_| err(t.line, t.column, ParseErrorKind::UnknownElement(name)))
    }

    fn set(&mut self) -> Result<ElementSet> {
        self.punct('{')?;
        let mut s = ElementSet::EMPTY;
        if self.peek().tok == Tok::Punct('}') {
            self.pos += 1;
            return Ok(s);
        }
        loop {
            s.insert(self.element()?);
            let t = self.next();
            match t.tok {
                Tok::Punct(',') => {}
                Tok::Punct('}') => return Ok(s),
                _ => return Err(Self::syntax(&t, "expected `,` or `}`")),
            }
        }
    }

    fn parse(mut self) -> Result<ModelFile> {
        let mut m = ModelFile {
            universe: Arc::new(Universe::new(Vec::<String>::new())?),
            graphs: Vec::new(),
            digraphs: Vec::new(),
            jointrees: Vec::new(),
            statements: Vec::new(),
        };
        loop {
            self.skip_newlines();
            let t = self.next();
            let kw = match &t.tok {
                Tok::Eof => break,
                Tok::Ident(s) => s.clone(),
                _ => return Err(Self::syntax(&t, "expected a declaration")),
            };
            match kw.as_str() {
                "universe" => {
                    if self.universe.is_some() {
                        return Err(err(
                            t.line,
                            t.column,
                            ParseErrorKind::DuplicateName("universe".into()),
                        ));
                    }
                    let mut names = Vec::new();
                    while let Tok::Ident(_) = self.peek().tok {
                        let (n, nt) = self.ident()?;
                        if names.contains(&n) {
                            return Err(err(nt.line, nt.column, ParseErrorKind::DuplicateName(n)));
                        }
                        names.push(n);
                    }
                    self.end_of_line()?;
                    let u = Universe::new(names)
                        .map_err(|e| err(t.line, t.column, ParseErrorKind::Invalid(Box::new(e))))?;
                    let u = Arc::new(u);
                    m.universe = u.clone();
                    self.universe = Some(u);
                }
                "graph" => {
                    self.universe(&t)?;
                    let (name, nt) = self.ident()?;
                    self.declare(&name, &nt)?;
                    let g = self.graph_body()?;
                    m.graphs.push((name, g));
                }
                "digraph" => {
                    self.universe(&t)?;
                    let (name, nt) = self.ident()?;
                    self.declare(&name, &nt)?;
                    let d = self.digraph_body(&nt)?;
                    m.digraphs.push((name, d));
                }
                "jointree" => {
                    self.universe(&t)?;
                    let (name, nt) = self.ident()?;
                    self.declare(&name, &nt)?;
                    let j = self.jointree_body()?;
                    m.jointrees.push((name, j));
                }
                "stmt" => {
                    self.universe(&t)?;
                    let (name, nt) = self.ident()?;
                    self.declare(&name, &nt)?;
                    self.punct(':')?;
                    let at = self.peek().clone();
                    let x = self.set()?;
                    self.punct('|')?;
                    let z = self.set()?;
                    self.punct('|')?;
                    let y = self.set()?;
                    let s = Statement::new(x, z, y);
                    s.canonicalize().map_err(|e| {
                        err(at.line, at.column, ParseErrorKind::Invalid(Box::new(e)))
                    })?;
                    self.end_of_line()?;
                    m.statements.push((name, s));
                }
                _ => return Err(Self::syntax(&t, format!("unknown declaration `{kw}`"))),
            }
        }
        if self.universe.is_none() {
            let t = self.peek().clone();
            return Err(Self::syntax(&t, "missing `universe` declaration"));
        }
        Ok(m)
    }

    /// Reads `{ item; ... }`, handing each item's leading keyword token to `f`.
    fn block(&mut self, mut f: impl FnMut(&mut Self, Token) -> Result<()>) -> Result<()> {
        self.punct_in_block('{')?;
        loop {
            self.skip_newlines();
            let t = self.next();
            if t.tok == Tok::Punct('}') {
                return Ok(());
            }
            f(self, t)?;
            self.punct_in_block(';')?;
        }
    }

    fn node_ref(ids: &BTreeMap<String, NodeId>, name: String, at: &Token) -> Result<NodeId> {
        ids.get(&name)
            .copied()
            .ok_or_else(|| err(at.line, at.column, ParseErrorKind::UnknownNode(name)))
    }

    fn graph_body(&mut self) -> Result<NamedGraph> {
        let mut ids: BTreeMap<String, NodeId> = BTreeMap::new();
        let mut g = UGraph::new();
        self.block(|p, t| {
            match &t.tok {
                Tok::Ident(k) if k == "node" => {
                    let (id, it) = p.ident()?;
                    if ids.contains_key(&id) {
                        return Err(err(it.line, it.column, ParseErrorKind::DuplicateName(id)));
                    }
                    p.punct('=')?;
                    let at = p.peek().clone();
                    let s = p.set()?;
                    if s.is_empty() {
                        return Err(Self::syntax(&at, "node must hold at least one element"));
                    }
                    let n = NodeId(ids.len() as u32);
                    ids.insert(id, n);
                    g.insert_node(n, s);
                }
                Tok::Ident(k) if k == "edge" => {
                    let (a, at) = p.ident()?;
                    let a = Self::node_ref(&ids, a, &at)?;
                    let (b, bt) = p.ident()?;
                    let b = Self::node_ref(&ids, b, &bt)?;
                    g.add_edge(a, b).map_err(|e| {
                        err(bt.line, bt.column, ParseErrorKind::Invalid(Box::new(e)))
                    })?;
                }
                _ => return Err(Self::syntax(&t, "expected `node` or `edge`")),
            }
            Ok(())
        })?;
        let node_names = ids.into_iter().map(|(k, v)| (v, k)).collect();
        Ok(NamedGraph {
            graph: g,
            node_names,
        })
    }

    fn digraph_body(&mut self, at: &Token) -> Result<DiGraph> {
        let mut nodes = ElementSet::EMPTY;
        let mut det = ElementSet::EMPTY;
        let mut arcs = Vec::new();
        self.block(|p, t| {
            match &t.tok {
                Tok::Ident(k) if k == "node" => nodes.insert(p.element()?),
                Tok::Ident(k) if k == "det" => {
                    let (k2, kt) = p.ident()?;
                    if k2 != "node" {
                        return Err(Self::syntax(&kt, "expected `node`"));
                    }
                    let e = p.element()?;
                    nodes.insert(e);
                    det.insert(e);
                }
                Tok::Ident(k) if k == "arc" => {
                    let a = p.element()?;
                    let b = p.element()?;
                    arcs.push((a, b));
                }
                _ => return Err(Self::syntax(&t, "expected `node`, `det node` or `arc`")),
            }
            Ok(())
        })?;
        for &(a, b) in &arcs {
            nodes.insert(a);
            nodes.insert(b);
        }
        DiGraph::new(nodes, arcs, det)
            .map_err(|e| err(at.line, at.column, ParseErrorKind::Invalid(Box::new(e))))
    }

    fn jointree_body(&mut self) -> Result<NamedJoinTree> {
        let mut ids: BTreeMap<String, NodeId> = BTreeMap::new();
        let mut clusters = BTreeMap::new();
        let mut links = Vec::new();
        self.block(|p, t| {
            match &t.tok {
                Tok::Ident(k) if k == "cluster" => {
                    let (id, it) = p.ident()?;
                    if ids.contains_key(&id) {
                        return Err(err(it.line, it.column, ParseErrorKind::DuplicateName(id)));
                    }
                    p.punct('=')?;
                    let s = p.set()?;
                    let n = NodeId(ids.len() as u32);
                    ids.insert(id, n);
                    clusters.insert(n, s);
                }
                Tok::Ident(k) if k == "link" => {
                    let (a, at) = p.ident()?;
                    let a = Self::node_ref(&ids, a, &at)?;
                    let (b, bt) = p.ident()?;
                    let b = Self::node_ref(&ids, b, &bt)?;
                    links.push((a, b));
                }
                _ => return Err(Self::syntax(&t, "expected `cluster` or `link`")),
            }
            Ok(())
        })?;
        let cluster_names = ids.into_iter().map(|(k, v)| (v, k)).collect();
        Ok(NamedJoinTree {
            tree: JoinTree::new(clusters, links),
            cluster_names,
        })
    }
}

pub fn parse_model(text: &str) -> Result<ModelFile> {
    Parser {
        toks: tokenize(text)?,
        pos: 0,
        universe: None,
        names: BTreeSet::new(),
    }
    .parse()
}

/// Canonical text form; parses back to an equal model.
pub fn serialize(m: &ModelFile) -> String {
    let u = &m.universe;
    let mut out = String::new();
    let _ = writeln!(out, "universe {}", u.names().join(" "));
    for (name, g) in &m.graphs {
        let _ = writeln!(out, "graph {name} {{");
        for (n, s) in g.graph.nodes() {
            let _ = writeln!(out, "  node {} = {};", g.node_name(n), u.fmt_set(s));
        }
        for (a, b) in g.graph.edges() {
            let _ = writeln!(out, "  edge {} {};", g.node_name(a), g.node_name(b));
        }
        out.push_str("}\n");
    }
    for (name, d) in &m.digraphs {
        let _ = writeln!(out, "digraph {name} {{");
        for e in d.nodes() {
            let det = if d.deterministic().contains(e) {
                "det "
            } else {
                ""
            };
            let _ = writeln!(out, "  {det}node {};", u.name(e));
        }
        for (a, b) in d.arcs() {
            let _ = writeln!(out, "  arc {} {};", u.name(a), u.name(b));
        }
        out.push_str("}\n");
    }
    for (name, t) in &m.jointrees {
        let _ = writeln!(out, "jointree {name} {{");
        for (&n, &s) in &t.tree.clusters {
            let _ = writeln!(out, "  cluster {} = {};", t.cluster_name(n), u.fmt_set(s));
        }
        for &(a, b) in &t.tree.edges {
            let _ = writeln!(out, "  link {} {};", t.cluster_name(a), t.cluster_name(b));
        }
        out.push_str("}\n");
    }
    for (name, s) in &m.statements {
        let _ = writeln!(
            out,
            "stmt {name}: {} | {} | {}",
            u.fmt_set(s.x),
            u.fmt_set(s.z),
            u.fmt_set(s.y)
        );
    }
    out
}
