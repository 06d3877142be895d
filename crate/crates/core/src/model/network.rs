// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Asn, MapOutcome, ModelError, PredicateExpr, Route, RouteMap};
use crate::symbolic::PortableSet;

/// A directed BGP session `src -> dst`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: String,
    pub dst: String,
}

impl Edge {
    pub fn new(src: impl Into<String>, dst: impl Into<String>) -> Self {
        Self {
            src: src.into(),
            dst: dst.into(),
        }
    }

    pub fn reversed(&self) -> Edge {
        Edge::new(self.dst.clone(), self.src.clone())
    }

    pub fn touches(&self, node: &str) -> bool {
        self.src == node || self.dst == node
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.src, self.dst)
    }
}

/// A place where routes can be observed: selected at an internal router, or
/// sent along an edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Node(String),
    Edge(Edge),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Node(n) => f.write_str(n),
            Location::Edge(e) => write!(f, "{e}"),
        }
    }
}

impl FromStr for Location {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once("->") {
            Some((a, b)) => {
                let (a, b) = (a.trim(), b.trim());
                if a.is_empty() || b.is_empty() {
                    return Err(ModelError::BadLocation(s.to_string()));
                }
                Ok(Location::Edge(Edge::new(a, b)))
            }
            None if !s.is_empty() => Ok(Location::Node(s.to_string())),
            None => Err(ModelError::BadLocation(s.to_string())),
        }
    }
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Location {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Topology {
    pub routers: BTreeSet<String>,
    pub externals: BTreeSet<String>,
    pub edges: BTreeSet<Edge>,
}

impl Topology {
    pub fn is_internal(&self, node: &str) -> bool {
        self.routers.contains(node)
    }

    pub fn is_external(&self, node: &str) -> bool {
        self.externals.contains(node)
    }

    pub fn in_edges<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.dst == node)
    }

    pub fn out_edges<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.src == node)
    }

    /// Every location: internal routers followed by all edges.
    pub fn locations(&self) -> Vec<Location> {
        self.routers
            .iter()
            .cloned()
            .map(Location::Node)
            .chain(self.edges.iter().cloned().map(Location::Edge))
            .collect()
    }

    pub fn has_location(&self, loc: &Location) -> bool {
        match loc {
            Location::Node(n) => self.routers.contains(n),
            Location::Edge(e) => self.edges.contains(e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Import,
    Export,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Import => "import",
            Direction::Export => "export",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Policy {
    pub import_maps: BTreeMap<Edge, RouteMap>,
    pub export_maps: BTreeMap<Edge, RouteMap>,
    /// Routes originated on an edge; absent means none.
    pub originate: BTreeMap<Edge, BTreeSet<Route>>,
}

impl Policy {
    pub fn map(&self, edge: &Edge, dir: Direction) -> Option<&RouteMap> {
        match dir {
            Direction::Import => self.import_maps.get(edge),
            Direction::Export => self.export_maps.get(edge),
        }
    }

    pub fn originated(&self, edge: &Edge) -> impl Iterator<Item = &Route> {
        self.originate.get(edge).into_iter().flatten()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Effect {
    SetTrue,
    SetFalse,
    Preserve,
}

/// Ghost attribute declarations and their location-based updates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GhostSpec {
    pub declarations: Vec<String>,
    pub import_effects: BTreeMap<(Edge, String), Effect>,
    pub export_effects: BTreeMap<(Edge, String), Effect>,
    pub origin_defaults: BTreeMap<String, bool>,
}

impl GhostSpec {
    pub fn is_declared(&self, ghost: &str) -> bool {
        self.declarations.iter().any(|g| g == ghost)
    }

    pub fn effect(&self, edge: &Edge, dir: Direction, ghost: &str) -> Effect {
        let table = match dir {
            Direction::Import => &self.import_effects,
            Direction::Export => &self.export_effects,
        };
        table
            .get(&(edge.clone(), ghost.to_string()))
            .copied()
            .unwrap_or(Effect::Preserve)
    }

    /// Non-preserving effects on `edge` in declaration order.
    pub fn effects(&self, edge: &Edge, dir: Direction) -> Vec<(&str, Effect)> {
        self.declarations
            .iter()
            .map(|g| (g.as_str(), self.effect(edge, dir, g)))
            .filter(|(_, e)| *e != Effect::Preserve)
            .collect()
    }

    pub fn origin_default(&self, ghost: &str) -> bool {
        self.origin_defaults.get(ghost).copied().unwrap_or(false)
    }

    pub fn defaults(&self) -> BTreeMap<String, bool> {
        self.declarations
            .iter()
            .map(|g| (g.clone(), self.origin_default(g)))
            .collect()
    }

    /// Overwrites ghost fields per the effects on `edge`; route attributes are untouched.
    pub fn apply(&self, edge: &Edge, dir: Direction, r: &Route) -> Route {
        let mut out = r.clone();
        for (g, eff) in self.effects(edge, dir) {
            match eff {
                Effect::SetTrue => {
                    out.ghosts.insert(g.to_string(), true);
                }
                Effect::SetFalse => {
                    out.ghosts.insert(g.to_string(), false);
                }
                Effect::Preserve => {}
            }
        }
        out
    }

    /// Replaces the route's ghosts with the origin defaults.
    pub fn with_defaults(&self, r: &Route) -> Route {
        let mut out = r.clone();
        out.ghosts = self.defaults();
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Network {
    pub topology: Topology,
    /// ASN of every node, internal and external.
    pub asns: BTreeMap<String, Asn>,
    pub policy: Policy,
    pub ghosts: GhostSpec,
}

impl Network {
    fn transfer(&self, edge: &Edge, dir: Direction, r: &Route) -> Result<MapOutcome, ModelError> {
        let map = self
            .policy
            .map(edge, dir)
            .ok_or_else(|| ModelError::MissingMap(edge.clone(), dir))?;
        Ok(match map.evaluate(r) {
            MapOutcome::Accept { route, term } => MapOutcome::Accept {
                route: self.ghosts.apply(edge, dir, &route),
                term,
            },
            reject => reject,
        })
    }

    /// Import filter at `edge.dst` followed by the edge's import ghost effects.
    pub fn import_transfer(&self, edge: &Edge, r: &Route) -> Result<Option<Route>, ModelError> {
        Ok(self.transfer(edge, Direction::Import, r)?.route())
    }

    /// Export filter at `edge.src` followed by the edge's export ghost effects.
    pub fn export_transfer(&self, edge: &Edge, r: &Route) -> Result<Option<Route>, ModelError> {
        Ok(self.transfer(edge, Direction::Export, r)?.route())
    }

    /// Like the directional transfers but also reports the deciding term.
    pub fn transfer_outcome(
        &self,
        edge: &Edge,
        dir: Direction,
        r: &Route,
    ) -> Result<MapOutcome, ModelError> {
        self.transfer(edge, dir, r)
    }

    /// Origination routes on `edge`, completed with the ghost origin defaults.
    pub fn originated(&self, edge: &Edge) -> Vec<Route> {
        self.policy
            .originated(edge)
            .map(|r| self.ghosts.with_defaults(r))
            .collect()
    }
}

/// A safety property: every route reaching `location` satisfies `pred`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkProperty {
    pub location: Location,
    pub pred: PredicateExpr,
}

/// The route set assigned to one location: either a predicate, or a symbolic
/// set that has no predicate rendering (e.g. a fixpoint-derived invariant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Pred(PredicateExpr),
    Symbolic(Arc<PortableSet>),
}

impl Constraint {
    pub fn is_true(&self) -> bool {
        matches!(self, Constraint::Pred(PredicateExpr::True))
    }

    pub fn contains(&self, r: &Route) -> Result<bool, ModelError> {
        match self {
            Constraint::Pred(p) => p.eval(r),
            Constraint::Symbolic(s) => Ok(s.contains(r)),
        }
    }

    pub fn as_pred(&self) -> Option<&PredicateExpr> {
        match self {
            Constraint::Pred(p) => Some(p),
            Constraint::Symbolic(_) => None,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Pred(p) => write!(f, "{p}"),
            Constraint::Symbolic(s) => write!(f, "<symbolic set: {}>", s.summary()),
        }
    }
}

impl From<PredicateExpr> for Constraint {
    fn from(p: PredicateExpr) -> Self {
        Constraint::Pred(p)
    }
}

/// One constraint per location.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantMap {
    pub entries: BTreeMap<Location, Constraint>,
}

impl InvariantMap {
    /// Fills every location of `topo`: `true` on edges from externals, `default` elsewhere.
    pub fn uniform(topo: &Topology, default: PredicateExpr) -> Self {
        let entries = topo
            .locations()
            .into_iter()
            .map(|loc| {
                let c = match &loc {
                    Location::Edge(e) if topo.is_external(&e.src) => PredicateExpr::True,
                    _ => default.clone(),
                };
                (loc, Constraint::Pred(c))
            })
            .collect();
        Self { entries }
    }

    pub fn get(&self, loc: &Location) -> Option<&Constraint> {
        self.entries.get(loc)
    }

    pub fn set(&mut self, loc: Location, c: impl Into<Constraint>) {
        self.entries.insert(loc, c.into());
    }
}

/// A broken structural rule found by [`validate_network`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    NodeBothInternalAndExternal(String),
    UnknownNode {
        edge: Edge,
        node: String,
    },
    SelfLoop(Edge),
    ExternalToExternal(Edge),
    IsolatedExternal(String),
    MissingImportMap(Edge),
    MissingExportMap(Edge),
    UnexpectedImportMap(Edge),
    UnexpectedExportMap(Edge),
    UnexpectedOrigination(Edge),
    DenyWithActions {
        edge: Edge,
        dir: Direction,
        term: usize,
    },
    UndeclaredGhost {
        ghost: String,
        context: String,
    },
    DuplicateGhost(String),
    GhostEffectOnUnknownEdge(Edge),
    MissingAsn(String),
    MissingInvariant(Location),
    UnknownInvariantLocation(Location),
    ExternalEdgeInvariantNotTrue(Edge),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NodeBothInternalAndExternal(n) => {
                write!(f, "node {n} is declared both internal and external")
            }
            Violation::UnknownNode { edge, node } => {
                write!(f, "edge {edge} references undeclared node {node}")
            }
            Violation::SelfLoop(e) => write!(f, "self-loop edge {e}"),
            Violation::ExternalToExternal(e) => write!(f, "edge {e} connects two externals"),
            Violation::IsolatedExternal(n) => {
                write!(f, "external {n} has no session with an internal router")
            }
            Violation::MissingImportMap(e) => write!(f, "missing import map for edge {e}"),
            Violation::MissingExportMap(e) => write!(f, "missing export map for edge {e}"),
            Violation::UnexpectedImportMap(e) => {
                write!(f, "import map on edge {e} whose destination is external")
            }
            Violation::UnexpectedExportMap(e) => {
                write!(f, "export map on edge {e} whose source is external")
            }
            Violation::UnexpectedOrigination(e) => {
                write!(f, "origination on edge {e} whose source is external")
            }
            Violation::DenyWithActions { edge, dir, term } => {
                write!(
                    f,
                    "{dir} map on {edge}: deny term {term} carries set actions"
                )
            }
            Violation::UndeclaredGhost { ghost, context } => {
                write!(f, "undeclared ghost {ghost} in {context}")
            }
            Violation::DuplicateGhost(g) => write!(f, "ghost {g} declared twice"),
            Violation::GhostEffectOnUnknownEdge(e) => write!(f, "ghost effect on unknown edge {e}"),
            Violation::MissingAsn(n) => write!(f, "node {n} has no ASN"),
            Violation::MissingInvariant(l) => write!(f, "missing invariant for location {l}"),
            Violation::UnknownInvariantLocation(l) => {
                write!(f, "invariant for unknown location {l}")
            }
            Violation::ExternalEdgeInvariantNotTrue(e) => {
                write!(f, "external edge invariant must be true on {e}")
            }
        }
    }
}

/// Collects every structural violation; an empty result means the network
/// (and, when given, the invariant map) is well-formed.
pub fn validate_network(net: &Network, inv: Option<&InvariantMap>) -> Vec<Violation> {
    let topo = &net.topology;
    let mut out = Vec::new();

    for n in topo.routers.intersection(&topo.externals) {
        out.push(Violation::NodeBothInternalAndExternal(n.clone()));
    }
    for n in topo.routers.iter().chain(&topo.externals) {
        if !net.asns.contains_key(n) {
            out.push(Violation::MissingAsn(n.clone()));
        }
    }
    let known = |n: &str| topo.is_internal(n) || topo.is_external(n);
    for e in &topo.edges {
        for node in [&e.src, &e.dst] {
            if !known(node) {
                out.push(Violation::UnknownNode {
                    edge: e.clone(),
                    node: node.clone(),
                });
            }
        }
        if e.src == e.dst {
            out.push(Violation::SelfLoop(e.clone()));
        }
        if topo.is_external(&e.src) && topo.is_external(&e.dst) {
            out.push(Violation::ExternalToExternal(e.clone()));
        }
        if topo.is_internal(&e.dst) && !net.policy.import_maps.contains_key(e) {
            out.push(Violation::MissingImportMap(e.clone()));
        }
        if topo.is_internal(&e.src) && !net.policy.export_maps.contains_key(e) {
            out.push(Violation::MissingExportMap(e.clone()));
        }
    }
    for ext in &topo.externals {
        let attached = topo.edges.iter().any(|e| {
            (e.src == *ext && topo.is_internal(&e.dst))
                || (e.dst == *ext && topo.is_internal(&e.src))
        });
        if !attached {
            out.push(Violation::IsolatedExternal(ext.clone()));
        }
    }
    for (dir, maps) in [
        (Direction::Import, &net.policy.import_maps),
        (Direction::Export, &net.policy.export_maps),
    ] {
        for (e, map) in maps {
            let owner_ok = match dir {
                Direction::Import => topo.edges.contains(e) && topo.is_internal(&e.dst),
                Direction::Export => topo.edges.contains(e) && topo.is_internal(&e.src),
            };
            if !owner_ok {
                out.push(match dir {
                    Direction::Import => Violation::UnexpectedImportMap(e.clone()),
                    Direction::Export => Violation::UnexpectedExportMap(e.clone()),
                });
            }
            for (i, t) in map.terms.iter().enumerate() {
                if t.action == super::Disposition::Deny && !t.sets.is_empty() {
                    out.push(Violation::DenyWithActions {
                        edge: e.clone(),
                        dir,
                        term: i,
                    });
                }
            }
        }
    }
    for (e, routes) in &net.policy.originate {
        if !(topo.edges.contains(e) && topo.is_internal(&e.src)) && !routes.is_empty() {
            out.push(Violation::UnexpectedOrigination(e.clone()));
        }
    }

    let ghosts = &net.ghosts;
    let mut seen = BTreeSet::new();
    for g in &ghosts.declarations {
        if !seen.insert(g) {
            out.push(Violation::DuplicateGhost(g.clone()));
        }
    }
    for ((e, g), _) in ghosts.import_effects.iter().chain(&ghosts.export_effects) {
        if !ghosts.is_declared(g) {
            out.push(Violation::UndeclaredGhost {
                ghost: g.clone(),
                context: format!("effect on {e}"),
            });
        }
        if !topo.edges.contains(e) {
            out.push(Violation::GhostEffectOnUnknownEdge(e.clone()));
        }
    }
    for g in ghosts.origin_defaults.keys() {
        if !ghosts.is_declared(g) {
            out.push(Violation::UndeclaredGhost {
                ghost: g.clone(),
                context: "origin defaults".into(),
            });
        }
    }

    if let Some(inv) = inv {
        for loc in topo.locations() {
            match inv.get(&loc) {
                None => out.push(Violation::MissingInvariant(loc)),
                Some(c) => {
                    if let Location::Edge(e) = &loc {
                        if topo.is_external(&e.src) && !c.is_true() {
                            out.push(Violation::ExternalEdgeInvariantNotTrue(e.clone()));
                        }
                    }
                    if let Constraint::Pred(p) = c {
                        for g in p.ghosts() {
                            if !ghosts.is_declared(&g) {
                                out.push(Violation::UndeclaredGhost {
                                    ghost: g,
                                    context: format!("invariant at {loc}"),
                                });
                            }
                        }
                    }
                }
            }
        }
        for loc in inv.entries.keys() {
            if !topo.has_location(loc) {
                out.push(Violation::UnknownInvariantLocation(loc.clone()));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}
