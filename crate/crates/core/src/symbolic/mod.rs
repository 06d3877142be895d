// SPDX-License-Identifier: Apache-2.0

//! Symbolic route sets: decision diagrams over the fixed-width attributes
//! paired with automata over AS paths, and the image of route maps over them.

mod bdd;
mod closure;
mod dfa;
mod encoding;
mod engine;
mod portable;
mod transfer;

use thiserror::Error;

use crate::model::{Asn, Community};

pub use bdd::{Bdd, BddImage, BddManager};
pub use dfa::Dfa;
pub use encoding::Encoding;
pub use engine::{DfaId, Engine, RouteSet, SetStats};
pub use portable::{PortableSet, Summary};
pub use transfer::{TermImage, TransferResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("community {0} is not in the tracked universe")]
    UntrackedCommunity(Community),
    #[error("ASN {0} is not in the tracked universe")]
    UntrackedAsn(Asn),
    #[error("ghost `{0}` is not declared")]
    UndeclaredGhost(String),
    #[error("symbolic set was built over a universe this engine does not contain")]
    IncompatibleUniverse,
}
