// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::fmt;
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};

use super::{AsPathRegex, Asn, CmpOp, Community, PrefixRange, Route};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Comparison {
    pub cmp: CmpOp,
    pub value: u32,
}

/// One match condition of a route-map term. A term matches when all of its
/// clauses hold.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchClause {
    /// Matches when any entry of the list contains the route's prefix.
    PrefixList(Vec<PrefixRange>),
    CommunityPresent(Community),
    CommunityAbsent(Community),
    LocalPref(Comparison),
    Med(Comparison),
    AsPath(AsPathRegex),
}

impl MatchClause {
    pub fn matches(&self, r: &Route) -> bool {
        match self {
            MatchClause::PrefixList(entries) => entries.iter().any(|e| e.contains(&r.prefix)),
            MatchClause::CommunityPresent(c) => r.communities.contains(c),
            MatchClause::CommunityAbsent(c) => !r.communities.contains(c),
            MatchClause::LocalPref(c) => c.cmp.holds(r.local_pref, c.value),
            MatchClause::Med(c) => c.cmp.holds(r.med, c.value),
            MatchClause::AsPath(rx) => rx.is_match(&r.as_path),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetAction {
    AddCommunity(Community),
    DeleteCommunity(Community),
    DeleteAllCommunities,
    SetLocalPref(u32),
    SetMed(u32),
    SetNextHop(Ipv4Addr),
    /// Prepends a single ASN to the front of the path.
    Prepend(Asn),
}

impl SetAction {
    pub fn apply(&self, r: &mut Route) {
        match self {
            SetAction::AddCommunity(c) => {
                r.communities.insert(*c);
            }
            SetAction::DeleteCommunity(c) => {
                r.communities.remove(c);
            }
            SetAction::DeleteAllCommunities => r.communities.clear(),
            SetAction::SetLocalPref(v) => r.local_pref = *v,
            SetAction::SetMed(v) => r.med = *v,
            SetAction::SetNextHop(ip) => r.next_hop = u32::from(*ip),
            SetAction::Prepend(a) => r.as_path.insert(0, *a),
        }
    }
}

impl fmt::Display for SetAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetAction::AddCommunity(c) => write!(f, "add-community {c}"),
            SetAction::DeleteCommunity(c) => write!(f, "delete-community {c}"),
            SetAction::DeleteAllCommunities => f.write_str("delete-all-communities"),
            SetAction::SetLocalPref(v) => write!(f, "set-local-pref {v}"),
            SetAction::SetMed(v) => write!(f, "set-med {v}"),
            SetAction::SetNextHop(ip) => write!(f, "set-next-hop {ip}"),
            SetAction::Prepend(a) => write!(f, "prepend {a}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    Permit,
    Deny,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    #[serde(rename = "match", default, skip_serializing_if = "Vec::is_empty")]
    pub matches: Vec<MatchClause>,
    pub action: Disposition,
    /// Applied in order when the term permits; always empty for deny terms.
    #[serde(rename = "set", default, skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<SetAction>,
}

impl Term {
    pub fn permit(matches: Vec<MatchClause>, sets: Vec<SetAction>) -> Self {
        Self {
            matches,
            action: Disposition::Permit,
            sets,
        }
    }

    pub fn deny(matches: Vec<MatchClause>) -> Self {
        Self {
            matches,
            action: Disposition::Deny,
            sets: Vec::new(),
        }
    }

    pub fn matches(&self, r: &Route) -> bool {
        self.matches.iter().all(|m| m.matches(r))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.action {
            Disposition::Permit => f.write_str("permit")?,
            Disposition::Deny => f.write_str("deny")?,
        }
        if self.matches.is_empty() {
            f.write_str(" all")?;
        } else {
            f.write_str(" if ")?;
            for (i, m) in self.matches.iter().enumerate() {
                if i > 0 {
                    f.write_str(" and ")?;
                }
                match m {
                    MatchClause::PrefixList(es) => {
                        f.write_str("prefix in [")?;
                        for (j, e) in es.iter().enumerate() {
                            if j > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{e}")?;
                        }
                        f.write_str("]")?;
                    }
                    MatchClause::CommunityPresent(c) => write!(f, "community {c}")?,
                    MatchClause::CommunityAbsent(c) => write!(f, "no community {c}")?,
                    MatchClause::LocalPref(c) => {
                        write!(f, "localpref {} {}", c.cmp.symbol(), c.value)?
                    }
                    MatchClause::Med(c) => write!(f, "med {} {}", c.cmp.symbol(), c.value)?,
                    MatchClause::AsPath(rx) => write!(f, "aspath matches \"{rx}\"")?,
                }
            }
        }
        for s in &self.sets {
            write!(f, "; {s}")?;
        }
        Ok(())
    }
}

/// Outcome of running a route through a map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapOutcome {
    /// Accepted by the term at `term` (index into the map).
    Accept { route: Route, term: usize },
    /// Dropped by a deny term, or by the implicit deny when `term` is `None`.
    Reject { term: Option<usize> },
}

impl MapOutcome {
    pub fn route(self) -> Option<Route> {
        match self {
            MapOutcome::Accept { route, .. } => Some(route),
            MapOutcome::Reject { .. } => None,
        }
    }
}

/// Ordered list of terms; the first matching term decides, and a route
/// matching no term is rejected.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RouteMap {
    pub terms: Vec<Term>,
}

impl RouteMap {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn permit_all() -> Self {
        Self::new(vec![Term::permit(vec![], vec![])])
    }

    pub fn evaluate(&self, r: &Route) -> MapOutcome {
        for (i, term) in self.terms.iter().enumerate() {
            if term.matches(r) {
                return match term.action {
                    Disposition::Deny => MapOutcome::Reject { term: Some(i) },
                    Disposition::Permit => {
                        let mut out = r.clone();
                        for s in &term.sets {
                            s.apply(&mut out);
                        }
                        MapOutcome::Accept {
                            route: out,
                            term: i,
                        }
                    }
                };
            }
        }
        MapOutcome::Reject { term: None }
    }

    /// `None` means Reject.
    pub fn apply(&self, r: &Route) -> Option<Route> {
        self.evaluate(r).route()
    }

    pub fn communities(&self) -> BTreeSet<Community> {
        let mut out = BTreeSet::new();
        for t in &self.terms {
            for m in &t.matches {
                match m {
                    MatchClause::CommunityPresent(c) | MatchClause::CommunityAbsent(c) => {
                        out.insert(*c);
                    }
                    _ => {}
                }
            }
            for s in &t.sets {
                if let SetAction::AddCommunity(c) | SetAction::DeleteCommunity(c) = s {
                    out.insert(*c);
                }
            }
        }
        out
    }

    pub fn asns(&self) -> BTreeSet<Asn> {
        let mut out = BTreeSet::new();
        for t in &self.terms {
            for m in &t.matches {
                if let MatchClause::AsPath(rx) = m {
                    out.extend(rx.literals());
                }
            }
            for s in &t.sets {
                if let SetAction::Prepend(a) = s {
                    out.insert(*a);
                }
            }
        }
        out
    }

    pub fn regexes(&self) -> Vec<AsPathRegex> {
        self.terms
            .iter()
            .flat_map(|t| t.matches.iter())
            .filter_map(|m| match m {
                MatchClause::AsPath(rx) => Some(rx.clone()),
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Prefix;

    fn route() -> Route {
        Route::new("10.0.0.0/8".parse::<Prefix>().unwrap())
    }

    #[test]
    fn tagging_map_adds_community() {
        let m = RouteMap::new(vec![Term::permit(
            vec![],
            vec![SetAction::AddCommunity(Community(100, 1))],
        )]);
        let out = m.apply(&route()).unwrap();
        assert_eq!(out.communities, BTreeSet::from([Community(100, 1)]));
    }

    #[test]
    fn empty_map_rejects() {
        assert_eq!(RouteMap::default().apply(&route()), None);
        assert_eq!(
            RouteMap::default().evaluate(&route()),
            MapOutcome::Reject { term: None }
        );
    }

    #[test]
    fn deny_tagged_then_permit() {
        let m = RouteMap::new(vec![
            Term::deny(vec![MatchClause::CommunityPresent(Community(100, 1))]),
            Term::permit(vec![], vec![]),
        ]);
        let tagged = route().with_communities([Community(100, 1)]);
        assert_eq!(m.evaluate(&tagged), MapOutcome::Reject { term: Some(0) });
        assert_eq!(m.apply(&route()), Some(route()));
    }

    #[test]
    fn actions_apply_in_order() {
        let m = RouteMap::new(vec![Term::permit(
            vec![],
            vec![
                SetAction::AddCommunity(Community(1, 1)),
                SetAction::DeleteAllCommunities,
                SetAction::AddCommunity(Community(2, 2)),
                SetAction::Prepend(7),
                SetAction::Prepend(8),
                SetAction::SetLocalPref(300),
                SetAction::SetNextHop(Ipv4Addr::new(192, 0, 2, 1)),
            ],
        )]);
        let out = m.apply(&route().with_path(vec![1])).unwrap();
        assert_eq!(out.communities, BTreeSet::from([Community(2, 2)]));
        assert_eq!(out.as_path, vec![8, 7, 1]);
        assert_eq!(out.local_pref, 300);
        assert_eq!(out.next_hop, 0xc000_0201);
    }

    #[test]
    fn json_shape() {
        let m = RouteMap::new(vec![
            Term::deny(vec![
                MatchClause::CommunityPresent(Community(100, 1)),
                MatchClause::AsPath(AsPathRegex::parse("^65001 .*$").unwrap()),
            ]),
            Term::permit(
                vec![],
                vec![SetAction::DeleteAllCommunities, SetAction::Prepend(5)],
            ),
        ]);
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(
            js,
            r#"[{"match":[{"community_present":"100:1"},{"as_path":"^65001 .*$"}],"action":"deny"},{"action":"permit","set":["delete_all_communities",{"prepend":5}]}]"#
        );
        let back: RouteMap = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
    }
}
