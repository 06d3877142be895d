// SPDX-License-Identifier: Apache-2.0

//! Topology, routes, route maps, ghost attributes and the predicate language,
//! with concrete (per-route) semantics.

mod aspath;
mod network;
mod predicate;
mod route;
mod routemap;

use thiserror::Error;

pub use aspath::{AsPathRegex, RegexError, RegexNode};
pub use network::{
    validate_network, Constraint, Direction, Edge, Effect, GhostSpec, InvariantMap, Location,
    Network, NetworkProperty, Policy, Topology, Violation,
};
pub use predicate::{CmpOp, PredicateExpr};
pub use route::{mask, Asn, Community, Prefix, PrefixRange, Route};
pub use routemap::{Comparison, Disposition, MapOutcome, MatchClause, RouteMap, SetAction, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("prefix length {0} exceeds 32")]
    PrefixLength(u8),
    #[error("prefix {0}/{1} has host bits set")]
    NonCanonicalPrefix(String, u8),
    #[error("malformed prefix `{0}`")]
    BadPrefix(String),
    #[error("prefix range {0} ge {1} le {2} is not ordered")]
    BadPrefixRange(String, u8, u8),
    #[error("malformed community `{0}`")]
    BadCommunity(String),
    #[error("malformed location `{0}`")]
    BadLocation(String),
    #[error("predicate references undeclared ghost `{0}`")]
    UndeclaredGhost(String),
    #[error("no {1} map on edge {0}")]
    MissingMap(Edge, Direction),
}
