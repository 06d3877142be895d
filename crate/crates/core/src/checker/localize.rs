// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::Serialize;

use super::report::{CheckResult, FailureCategory, Witness};
use super::ObligationKind;
use crate::model::{Direction, Edge, Location, Network};

/// Where a failed check points in the configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: ObligationKind,
    pub category: FailureCategory,
    pub edge: Option<Edge>,
    pub direction: Option<Direction>,
    pub term: Option<usize>,
    /// The offending route-map term as text.
    pub term_text: Option<String>,
    pub location: Location,
    pub predicate: String,
    pub pre_witness: Witness,
    pub post_witness: Witness,
}

pub fn localize(res: &CheckResult, net: &Network) -> Option<Diagnostic> {
    let f = res.failure.as_ref()?;
    let term_text = match (&res.edge, res.direction, f.term) {
        (Some(e), Some(d), Some(i)) => net
            .policy
            .map(e, d)
            .and_then(|m| m.terms.get(i))
            .map(|t| t.to_string()),
        _ => None,
    };
    Some(Diagnostic {
        kind: res.kind,
        category: f.category,
        edge: res.edge.clone(),
        direction: res.direction,
        term: f.term,
        term_text,
        location: f.violated_location.clone(),
        predicate: f.violated_pred.clone(),
        pre_witness: f.pre_witness.clone(),
        post_witness: f.post_witness.clone(),
    })
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, &self.edge) {
            (ObligationKind::Implication, _) => writeln!(
                f,
                "implication check failed: the invariant at {} does not imply the property",
                self.location
            )?,
            (ObligationKind::Originate, Some(e)) => writeln!(
                f,
                "local invariant failure: origination on {e} violates the invariant at {}",
                self.location
            )?,
            (kind, Some(e)) => {
                write!(f, "local invariant failure: {kind} on {e}")?;
                if let Some(t) = self.term {
                    write!(f, ", term {t}")?;
                    if let Some(text) = &self.term_text {
                        write!(f, " ({text})")?;
                    }
                }
                writeln!(f, ", violates the invariant at {}", self.location)?;
            }
            (kind, None) => writeln!(f, "{kind} check failed at {}", self.location)?,
        }
        writeln!(f, "  violated: {}", self.predicate)?;
        match self.kind {
            ObligationKind::Implication => {
                writeln!(f, "  route:    {}", self.post_witness)?;
            }
            ObligationKind::Originate => {
                writeln!(f, "  route:    {}", self.post_witness)?;
            }
            _ => {
                writeln!(f, "  input:    {}", self.pre_witness)?;
                writeln!(f, "  output:   {}", self.post_witness)?;
            }
        }
        Ok(())
    }
}

/// Text form of a failure without access to the network (no term text).
pub(crate) fn describe(res: &CheckResult) -> String {
    match &res.failure {
        None => String::new(),
        Some(f) => {
            let mut s = format!("[{}] ", res.id);
            let d = Diagnostic {
                kind: res.kind,
                category: f.category,
                edge: res.edge.clone(),
                direction: res.direction,
                term: f.term,
                term_text: None,
                location: f.violated_location.clone(),
                predicate: f.violated_pred.clone(),
                pre_witness: f.pre_witness.clone(),
                post_witness: f.post_witness.clone(),
            };
            s.push_str(&d.to_string());
            s
        }
    }
}
