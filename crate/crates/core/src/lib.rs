// SPDX-License-Identifier: Apache-2.0

//! Modular verification of BGP route policies.
//!
//! A network-wide safety property is reduced to local checks, one per
//! import filter, export filter and origination, each assuming the invariants
//! of its neighbours. The checks are discharged over symbolic route sets.
//! The [`oracle`] module computes the exact reachable route sets as an
//! independent cross-check.

pub mod checker;
pub mod config;
pub mod gen;
pub mod model;
pub mod oracle;
pub mod symbolic;

pub use checker::{verify, CheckResult, Obligation, ObligationKind, VerificationReport};
pub use config::{parse_network, parse_spec, Spec, Universe};
pub use model::{
    Edge, InvariantMap, Location, Network, NetworkProperty, PredicateExpr, Route, RouteMap,
};
