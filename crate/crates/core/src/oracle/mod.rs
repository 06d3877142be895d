// SPDX-License-Identifier: Apache-2.0

//! Whole-network reference semantics: a fixpoint over symbolic route sets,
//! bounded trace exploration, and invariants derived from the fixpoint.

mod failures;
mod fixpoint;
mod suggest;
mod traces;

use thiserror::Error;

use crate::model::{Location, ModelError, Violation};
use crate::symbolic::SymbolicError;

pub use failures::apply_failures;
pub use fixpoint::{
    check_property_fixpoint, compute_fixpoint, compute_fixpoint_with, network_regexes,
    FixpointDump, FixpointOptions, FixpointSolution, LocationDump, PropertyVerdict,
};
pub use suggest::strongest_invariants;
pub use traces::{
    enumerate_valid_traces, reachable_events, EventKind, EventReachability, TraceEnumerator,
    TraceEvent, TraceLimits,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("invalid network: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("location {0} is not in the network")]
    UnknownLocation(Location),
    #[error("no node or edge named {0}")]
    UnknownElement(String),
    #[error("instance too large for trace exploration: {value} {what} (limit {limit})")]
    InstanceTooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("the path bound must be positive")]
    ZeroBound,
    #[error("fixpoint did not stabilise within {0} rounds")]
    NoConvergence(usize),
}
