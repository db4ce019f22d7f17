use thiserror::Error;

use crate::ugraph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element name must be a non-empty identifier")]
    EmptyName,
    #[error("element `{0}` declared twice")]
    DuplicateElement(String),
    #[error("universe holds more than {max} elements", max = crate::element::MAX_ELEMENTS)]
    TooManyElements,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("X and Y share elements outside the conditioning set")]
    InvalidOverlap,
    #[error("universe of {size} elements exceeds the enumeration guard of {guard}")]
    UniverseTooLarge { size: usize, guard: usize },

    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("cannot merge node {0} with itself")]
    SameNode(NodeId),
    #[error("split parts must be non-empty")]
    EmptyPart,
    #[error("split parts do not cover the node's elements")]
    CoverageGap,
    #[error("graph does not contain every queried element")]
    MissingElements,

    #[error("graph index {0} is out of range")]
    UnknownGraph(usize),
    #[error("statement is not satisfied by the MUG")]
    StatementNotSatisfied,
    #[error("graph {graph} does not hold exactly the X and Z elements")]
    WrongElementSet { graph: usize },

    #[error("chain step {step}: premise is not satisfied by the MUG")]
    PremiseNotSatisfied { step: usize },
    #[error("chain step {step}: reduced graph lost the separation")]
    ReducedGraphLosesSeparation { step: usize },
    #[error("chain step {step} does not verify")]
    InvalidChain { step: usize },

    #[error("directed graph contains a cycle")]
    Cyclic,
    #[error("elimination order is not a permutation of the graph's elements")]
    InvalidOrder,
    #[error("graph has a node with more than one element")]
    MultiElementNode,

    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),

    #[error("{line}:{column}: {kind}")]
    Parse {
        line: usize,
        column: usize,
        kind: ParseErrorKind,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("name `{0}` declared twice")]
    DuplicateName(String),
    #[error("{0}")]
    Invalid(Box<Error>),
}
