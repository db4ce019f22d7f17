//! Command dispatch for the `graphoid` binary.
//!
//! Every command writes line records to stdout and returns an exit code:
//! 0 when the answer is positive (proven, separated, valid), 1 when it is
//! negative, 2 on any parse or validation error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::closure::{verify_chain, Closure, QueryResult};
use crate::derivation::{
    replay_chain, search, verify_script, witness_graph, SearchBounds, SearchOutcome,
};
use crate::dsep::{build_join_tree, JoinTreeViolation};
use crate::element::{Canonical, CanonicalStatement, Element, ElementSet, Statement, Universe};
use crate::error::{Error, Result};
use crate::model::{parse_model, ModelFile};
use crate::mug::Mug;
use crate::script::{format_chain, format_script, parse_chain, parse_script};
use crate::ugraph::NodeId;

pub const DEFAULT_MAX_MOVES: usize = 6;
pub const DEFAULT_MAX_GRAPHS: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "graphoid",
    about = "Conditional-independence inference over element universes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Mode {
    Axioms,
    Replay,
    Search,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closure of the declared statements and graph-satisfied statements.
    Closure {
        file: PathBuf,
        #[arg(long)]
        emit_chains: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a statement follows from the model.
    Query {
        file: PathBuf,
        /// `X|Z|Y`, each side a comma-separated list, braces optional.
        #[arg(long)]
        stmt: String,
        #[arg(long, value_enum, default_value = "axioms")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_MAX_MOVES)]
        max_moves: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_GRAPHS)]
        max_graphs: usize,
    },
    /// Separation in a directed graph (d-separation) or an undirected graph.
    Dsep {
        file: PathBuf,
        #[arg(long)]
        graph: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value = "")]
        z: String,
        #[arg(long)]
        y: String,
    },
    /// Moral graph of a directed graph, in model syntax.
    Moralize {
        file: PathBuf,
        #[arg(long)]
        graph: String,
    },
    /// Validate a declared join tree.
    CheckJointree {
        file: PathBuf,
        #[arg(long)]
        tree: String,
    },
    /// Triangulate an undirected graph and build a join tree.
    BuildJointree {
        file: PathBuf,
        #[arg(long)]
        graph: String,
        #[arg(long)]
        order: String,
    },
    /// Re-check a move script.
    VerifyScript { script: PathBuf },
    /// Re-check an axiom chain against a model's givens.
    VerifyChain { file: PathBuf, chain: PathBuf },
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

fn positive(stdout: String) -> Outcome {
    Outcome { code: 0, stdout }
}

fn negative(stdout: String) -> Outcome {
    Outcome { code: 1, stdout }
}

/// Runs a parsed command. `Err` maps to exit code 2.
pub fn run(cmd: &Command) -> Result<Outcome, String> {
    match cmd {
        Command::Closure {
            file,
            emit_chains,
            json,
        } => {
            let m = load(file)?;
            closure_cmd(&m, *emit_chains, *json).map_err(fmt_err)
        }
        Command::Query {
            file,
            stmt,
            mode,
            max_moves,
            max_graphs,
        } => {
            let m = load(file)?;
            let bounds = SearchBounds {
                max_moves: *max_moves,
                max_graphs: *max_graphs,
            };
            let raw = parse_statement(&m.universe, stmt)?;
            query_cmd(&m, raw, *mode, bounds).map_err(fmt_err)
        }
        Command::Dsep {
            file,
            graph,
            x,
            z,
            y,
        } => {
            let m = load(file)?;
            dsep_cmd(&m, graph, x, z, y)
        }
        Command::Moralize { file, graph } => {
            let m = load(file)?;
            let d = m
                .digraph(graph)
                .ok_or_else(|| format!("no digraph named `{graph}`"))?;
            let u = &m.universe;
            let mut out = String::new();
            for (a, b) in d.marriages() {
                let _ = writeln!(out, "# marriage {} {}", u.name(a), u.name(b));
            }
            out.push_str(&element_graph_text(
                u,
                &format!("{graph}_moral"),
                &d.moralize(),
            ));
            Ok(positive(out))
        }
        Command::CheckJointree { file, tree } => {
            let m = load(file)?;
            let t = m
                .jointree(tree)
                .ok_or_else(|| format!("no jointree named `{tree}`"))?;
            let u = &m.universe;
            let name = |n: NodeId| t.cluster_name(n);
            let violations = t.tree.validate();
            let mut out = String::new();
            for (&(a, b), &s) in &t.tree.sepsets {
                let _ = writeln!(out, "sepset {} {} = {}", name(a), name(b), u.fmt_set(s));
            }
            for v in &violations {
                let _ = match v {
                    JoinTreeViolation::UnknownNode(n) => {
                        writeln!(out, "violation unknown-node {}", name(*n))
                    }
                    JoinTreeViolation::NotATree => writeln!(out, "violation not-a-tree"),
                    JoinTreeViolation::SepsetMismatch { edge, expected } => writeln!(
                        out,
                        "violation sepset-mismatch {} {} expected {}",
                        name(edge.0),
                        name(edge.1),
                        u.fmt_set(*expected)
                    ),
                    JoinTreeViolation::RunningIntersection {
                        element,
                        from,
                        to,
                        via,
                    } => writeln!(
                        out,
                        "violation running-intersection element {} from {} to {} via {}",
                        u.name(*element),
                        name(*from),
                        name(*to),
                        name(*via)
                    ),
                };
            }
            if violations.is_empty() {
                out.push_str("valid\n");
                Ok(positive(out))
            } else {
                out.push_str("invalid\n");
                Ok(negative(out))
            }
        }
        Command::BuildJointree { file, graph, order } => {
            let m = load(file)?;
            let g = m
                .graph(graph)
                .ok_or_else(|| format!("no graph named `{graph}`"))?;
            let u = &m.universe;
            let order: Vec<Element> = names(order)
                .into_iter()
                .map(|n| u.element(n))
                .collect::<Result<_>>()
                .map_err(fmt_err)?;
            let (filled, tree) = build_join_tree(&g.graph, &order).map_err(fmt_err)?;
            let mut out = element_graph_text(u, &format!("{graph}_filled"), &filled);
            let _ = writeln!(out, "jointree {graph}_tree {{");
            for (n, s) in &tree.clusters {
                let _ = writeln!(out, "  cluster c{} = {};", n.0, u.fmt_set(*s));
            }
            for (a, b) in &tree.edges {
                let _ = writeln!(out, "  link c{} c{};", a.0, b.0);
            }
            out.push_str("}\n");
            Ok(positive(out))
        }
        Command::VerifyScript { script } => {
            let text = read(script)?;
            let s = parse_script(&text).map_err(fmt_err)?;
            Ok(match verify_script(&s) {
                Ok(()) => positive("verified\n".into()),
                Err(i) if i == s.moves.len() => negative("failed target-not-satisfied\n".into()),
                Err(i) => negative(format!("failed move {i}\n")),
            })
        }
        Command::VerifyChain { file, chain } => {
            let m = load(file)?;
            let givens = givens(&m).map_err(fmt_err)?;
            let steps = parse_chain(&m.universe, &read(chain)?).map_err(fmt_err)?;
            Ok(match verify_chain(&steps, &givens) {
                Ok(()) => positive("verified\n".into()),
                Err(i) => negative(format!("failed step {i}\n")),
            })
        }
    }
}

fn fmt_err(e: Error) -> String {
    e.to_string()
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &PathBuf) -> Result<ModelFile, String> {
    parse_model(&read(path)?).map_err(|e| format!("{}:{e}", path.display()))
}

/// Splits a list like `{a,b}`, `a,b` or `a b`.
fn names(list: &str) -> Vec<&str> {
    list.trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_set(u: &Universe, list: &str) -> Result<ElementSet> {
    u.set(names(list))
}

fn parse_statement(u: &Universe, text: &str) -> Result<Statement, String> {
    let parts: Vec<&str> = text.split('|').collect();
    let [x, z, y] = parts.as_slice() else {
        return Err(format!("statement `{text}` must have the form X|Z|Y"));
    };
    let set = |s: &str| parse_set(u, s).map_err(fmt_err);
    Ok(Statement::new(set(x)?, set(z)?, set(y)?))
}

/// Declared statements as witness graphs, after the declared graphs.
fn model_mug(m: &ModelFile) -> Result<Mug> {
    let mut mug = Mug::new(m.universe.clone());
    for (_, g) in &m.graphs {
        mug.push(g.graph.clone())?;
    }
    for s in declared(m)? {
        mug.push(witness_graph(&s))?;
    }
    Ok(mug)
}

fn declared(m: &ModelFile) -> Result<Vec<CanonicalStatement>> {
    let mut out = Vec::new();
    for (_, s) in &m.statements {
        if let Canonical::Statement(c) = s.canonicalize()? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Declared statements plus every statement satisfied by a declared graph.
pub fn givens(m: &ModelFile) -> Result<BTreeSet<CanonicalStatement>> {
    let mut out: BTreeSet<_> = declared(m)?.into_iter().collect();
    if !m.graphs.is_empty() {
        let graphs = Mug::from_graphs(
            m.universe.clone(),
            m.graphs.iter().map(|(_, g)| g.graph.clone()),
        )?;
        out.extend(graphs.enumerate_satisfied()?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct JsonStep {
    rule: String,
    premises: Vec<usize>,
    conclusion: String,
}

#[derive(Serialize)]
struct JsonStatement {
    statement: String,
    x: Vec<String>,
    z: Vec<String>,
    y: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chain: Option<Vec<JsonStep>>,
}

#[derive(Serialize)]
struct JsonClosure {
    universe: Vec<String>,
    givens: usize,
    statements: Vec<JsonStatement>,
}

fn closure_cmd(m: &ModelFile, emit_chains: bool, json: bool) -> Result<Outcome> {
    let u = &m.universe;
    let givens = givens(m)?;
    let c = Closure::new(&givens, u.clone())?;
    let chain_of = |s: &CanonicalStatement| c.chain(s).expect("closure member has a chain");
    let out = if json {
        let owned = |set: ElementSet| u.set_names(set).into_iter().map(String::from).collect();
        let doc = JsonClosure {
            universe: u.names().to_vec(),
            givens: givens.len(),
            statements: c
                .statements()
                .iter()
                .map(|s| JsonStatement {
                    statement: u.fmt_statement(s),
                    x: owned(s.x()),
                    z: owned(s.z()),
                    y: owned(s.y()),
                    chain: emit_chains.then(|| {
                        chain_of(s)
                            .into_iter()
                            .map(|st| JsonStep {
                                rule: st.rule.to_string(),
                                premises: st.premises,
                                conclusion: u.fmt_statement(&st.conclusion),
                            })
                            .collect()
                    }),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
        text.push('\n');
        text
    } else {
        let mut out = format!(
            "closure givens {} statements {}\n",
            givens.len(),
            c.statements().len()
        );
        for s in c.statements() {
            let _ = writeln!(out, "holds {}", u.fmt_statement(s));
            if emit_chains {
                for line in format_chain(u, &chain_of(s)).lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
        }
        out
    };
    Ok(positive(out))
}

fn query_cmd(m: &ModelFile, raw: Statement, mode: Mode, bounds: SearchBounds) -> Result<Outcome> {
    let u = &m.universe;
    let target = match raw.canonicalize()? {
        Canonical::TriviallyTrue => return Ok(positive("proven trivially\n".into())),
        Canonical::Statement(s) => s,
    };
    let header = format!("query {}\n", u.fmt_statement(&target));
    let givens = givens(m)?;
    match mode {
        Mode::Axioms | Mode::Replay => {
            let c = Closure::new(&givens, u.clone())?;
            let QueryResult::Proven(chain) = c.query(target.into())? else {
                return Ok(negative(header + "not-derivable\n"));
            };
            debug_assert_eq!(verify_chain(&chain, &givens), Ok(()));
            if mode == Mode::Axioms {
                return Ok(positive(header + "proven\n" + &format_chain(u, &chain)));
            }
            let script = replay_chain(&model_mug(m)?, &chain)?;
            if verify_script(&script).is_err() {
                return Err(Error::InvalidChain { step: chain.len() });
            }
            Ok(positive(header + "proven\n" + &format_script(&script)))
        }
        Mode::Search => match search(&model_mug(m)?, &target, bounds)? {
            SearchOutcome::Found(script) => {
                debug_assert_eq!(verify_script(&script), Ok(()));
                Ok(positive(header + "proven\n" + &format_script(&script)))
            }
            SearchOutcome::Exhausted(st) => Ok(negative(format!(
                "{header}exhausted states {} depth {} frontier {}\n",
                st.states, st.depth, st.frontier
            ))),
        },
    }
}

fn dsep_cmd(m: &ModelFile, graph: &str, x: &str, z: &str, y: &str) -> Result<Outcome, String> {
    let u = &m.universe;
    let set = |s: &str| parse_set(u, s).map_err(fmt_err);
    let (x, z, y) = (set(x)?, set(z)?, set(y)?);
    let separated = if let Some(d) = m.digraph(graph) {
        d.d_separated(x, z, y).map_err(fmt_err)?
    } else if let Some(g) = m.graph(graph) {
        g.graph.separates(x, z, y).map_err(fmt_err)?
    } else {
        return Err(format!("no graph named `{graph}`"));
    };
    let line = format!("{} | {} | {}", u.fmt_set(x), u.fmt_set(z), u.fmt_set(y));
    Ok(if separated {
        positive(format!("separated {line}\n"))
    } else {
        negative(format!("not-separated {line}\n"))
    })
}

/// Model-syntax block for a graph whose nodes are single elements; nodes
/// are named after their elements.
fn element_graph_text(u: &Arc<Universe>, name: &str, g: &crate::ugraph::UGraph) -> String {
    let eg = g.expand();
    let mut out = format!("graph {name} {{\n");
    for e in eg.vertices() {
        let _ = writeln!(out, "  node {} = {{{}}};", u.name(e), u.name(e));
    }
    for (a, b) in eg.edges() {
        let _ = writeln!(out, "  edge {} {};", u.name(a), u.name(b));
    }
    out.push_str("}\n");
    out
}

/// Parses `args` (without the program name) and runs the command. Returns
/// the exit code, stdout and stderr text.
pub fn main_with(args: &[String]) -> (i32, String, String) {
    let argv = std::iter::once("graphoid".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (
                code,
                if code == 0 {
                    e.to_string()
                } else {
                    String::new()
                },
                e.to_string(),
            );
        }
    };
    match run(&cli.command) {
        Ok(o) => (o.code, o.stdout, String::new()),
        Err(msg) => (2, String::new(), format!("error: {msg}\n")),
    }
}
