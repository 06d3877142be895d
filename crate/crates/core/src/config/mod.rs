// SPDX-License-Identifier: Apache-2.0

//! Network and spec files, the predicate language, the tracked-literal
//! universe, and input diffs.

mod diff;
mod dsl;
mod files;
mod universe;

use thiserror::Error;

use crate::model::{Edge, Location, Violation};

pub use diff::{diff_inputs, diff_networks, NetworkDiff};
pub use dsl::{parse_predicate, DslError};
pub use files::{parse_network, parse_spec, print_network, print_spec, RouteDoc, Spec};
pub use universe::{compute_universe, Universe, UniverseBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("duplicate {0}")]
    Duplicate(String),
    #[error("invalid network: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("undeclared ghost `{0}`")]
    UndeclaredGhost(String),
    #[error(transparent)]
    Predicate(#[from] DslError),
    #[error("external edge invariant must be true on {0}")]
    ExternalInvariant(Edge),
    #[error("invariant at {0} is a symbolic set and has no textual form")]
    Unprintable(Location),
}

fn join(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
