// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};

use super::ObligationKind;
use crate::config::Universe;
use crate::model::{Asn, Community, Direction, Edge, Location, Network, Prefix, Route};
use crate::symbolic::Encoding;

/// A concrete route as shown in reports. Communities outside the tracked
/// universe appear as `OTHER`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub prefix: Prefix,
    pub as_path: Vec<Asn>,
    pub next_hop: Ipv4Addr,
    pub local_pref: u32,
    pub med: u32,
    pub communities: Vec<String>,
    pub ghosts: BTreeMap<String, bool>,
}

pub const OTHER: &str = "OTHER";

impl Witness {
    pub fn render(r: &Route, enc: &Encoding) -> Self {
        Witness {
            prefix: r.prefix,
            as_path: r.as_path.clone(),
            next_hop: Ipv4Addr::from(r.next_hop),
            local_pref: r.local_pref,
            med: r.med,
            communities: r
                .communities
                .iter()
                .map(|c| {
                    if enc.is_tracked_community(c) {
                        c.to_string()
                    } else {
                        OTHER.to_string()
                    }
                })
                .collect(),
            ghosts: r.ghosts.clone(),
        }
    }

    /// Back to a route; `OTHER` becomes the encoding's fresh community.
    pub fn to_route(&self, enc: &Encoding) -> Route {
        Route {
            prefix: self.prefix,
            as_path: self.as_path.clone(),
            next_hop: u32::from(self.next_hop),
            local_pref: self.local_pref,
            med: self.med,
            communities: self
                .communities
                .iter()
                .map(|c| {
                    c.parse::<Community>()
                        .unwrap_or_else(|_| enc.fresh_community())
                })
                .collect(),
            ghosts: self.ghosts.clone(),
        }
    }

    pub fn has_community(&self, c: &str) -> bool {
        self.communities.iter().any(|x| x == c)
    }
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} path [", self.prefix)?;
        for (i, a) in self.as_path.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        write!(
            f,
            "] nh {} lp {} med {} comm {{{}}}",
            self.next_hop,
            self.local_pref,
            self.med,
            self.communities.join(", ")
        )?;
        for (g, v) in &self.ghosts {
            write!(f, " {g}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Why an obligation failed. A local-invariant failure means a local check
/// could not be proven; it does not by itself mean the property is violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCategory {
    LocalInvariant,
    Implication,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub category: FailureCategory,
    /// Route satisfying the hypothesis (the originated route for originate checks).
    pub pre_witness: Witness,
    /// Its image, which violates the goal.
    pub post_witness: Witness,
    pub violated_location: Location,
    pub violated_pred: String,
    /// Index of the route-map term that produced `post_witness`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub kind: ObligationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    pub hypothesis_location: Location,
    pub goal_location: Location,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    /// Wall time spent discharging this obligation.
    pub time_us: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub obligations: usize,
    pub passed: usize,
    pub failed: usize,
    pub import: usize,
    pub export: usize,
    pub originate: usize,
    pub implication: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub totals: Totals,
    pub universe: Universe,
    /// Obligations discharged in this run (all of them unless incremental).
    pub rechecked: usize,
    /// Total wall time of the discharge phase.
    pub time_us: u64,
    pub results: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(
        mut results: Vec<CheckResult>,
        universe: Universe,
        rechecked: usize,
        time_us: u64,
    ) -> Self {
        results.sort_by(|a, b| a.id.cmp(&b.id));
        let mut t = Totals {
            obligations: results.len(),
            ..Totals::default()
        };
        for r in &results {
            match r.verdict {
                Verdict::Pass => t.passed += 1,
                Verdict::Fail => t.failed += 1,
            }
            match r.kind {
                ObligationKind::Import => t.import += 1,
                ObligationKind::Export => t.export += 1,
                ObligationKind::Originate => t.originate += 1,
                ObligationKind::Implication => t.implication += 1,
            }
        }
        VerificationReport {
            verdict: if t.failed == 0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            totals: t,
            universe,
            rechecked,
            time_us,
            results,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn result(&self, id: &str) -> Option<&CheckResult> {
        self.results
            .binary_search_by(|r| r.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.results[i])
    }

    /// The report with timing and run-specific counters cleared, for
    /// comparing the outcome of two runs.
    pub fn outcome(&self) -> VerificationReport {
        let mut r = self.clone();
        r.time_us = 0;
        r.rechecked = 0;
        for x in &mut r.results {
            x.time_us = 0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Human-readable summary; with the network at hand, failures also name
    /// the offending route-map term.
    pub fn to_text(&self, net: Option<&Network>) -> String {
        let mut s = String::new();
        let t = &self.totals;
        let _ = writeln!(
            s,
            "{}: {}/{} obligations passed ({} import, {} export, {} originate, {} implication)",
            match self.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            },
            t.passed,
            t.obligations,
            t.import,
            t.export,
            t.originate,
            t.implication
        );
        for r in self.failures() {
            let _ = writeln!(s);
            match net.and_then(|n| super::localize(r, n)) {
                Some(d) => {
                    let _ = write!(s, "[{}] {d}", r.id);
                }
                None => s.push_str(&super::localize::describe(r)),
            }
        }
        s
    }
}
