use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::parser::ParseError;

/// Which resource guard fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    Timeout,
    TableauNodes(usize),
    HstNodes(usize),
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Timeout => f.write_str("timeout"),
            Limit::TableauNodes(n) => write!(f, "tableau node budget of {n}"),
            Limit::HstNodes(n) => write!(f, "hitting set tree node budget of {n}"),
        }
    }
}

/// Counters collected while searching for justifications.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub tableau_calls: usize,
    pub hst_nodes: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{limit} exceeded")]
    Exhausted { limit: Limit, stats: SearchStats },
    #[error("query is not entailed by the knowledge base")]
    NotEntailed,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("variable ordinal {ordinal} out of range ({count} variables)")]
    OrdinalOutOfRange { ordinal: usize, count: usize },
    #[error("no probability given for variable ordinal {0}")]
    MissingProbability(usize),
    #[error("{count} probabilistic axioms exceed the world enumeration limit of {limit}")]
    TooManyWorlds { count: usize, limit: usize },
    #[error("composite choice is inconsistent on ordinal {0}")]
    InconsistentChoice(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn exhausted(limit: Limit) -> Self {
        Error::Exhausted {
            limit,
            stats: SearchStats::default(),
        }
    }

    pub fn is_resource_error(&self) -> bool {
        matches!(self, Error::Exhausted { .. } | Error::TooManyWorlds { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
