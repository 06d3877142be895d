// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{
    Constraint, Direction, Edge, Effect, InvariantMap, Location, MapOutcome, Network,
    NetworkProperty, PredicateExpr, Route, RouteMap,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObligationKind {
    Import,
    Export,
    Originate,
    Implication,
}

impl fmt::Display for ObligationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObligationKind::Import => "import",
            ObligationKind::Export => "export",
            ObligationKind::Originate => "originate",
            ObligationKind::Implication => "implication",
        })
    }
}

/// One local proof obligation: every route of `hypothesis`, pushed through
/// the transfer (if any), lands in `goal`.
#[derive(Clone, Debug)]
pub struct Obligation {
    pub id: String,
    pub kind: ObligationKind,
    pub edge: Option<Edge>,
    pub hypothesis_location: Location,
    pub hypothesis: Constraint,
    pub goal_location: Location,
    pub goal: Constraint,
    /// Route map and non-preserving ghost effects (import/export only).
    pub map: Option<RouteMap>,
    pub effects: Vec<(String, Effect)>,
    /// Originated routes with ghost defaults applied (originate only).
    pub origin_routes: Vec<Route>,
}

impl Obligation {
    pub fn direction(&self) -> Option<Direction> {
        match self.kind {
            ObligationKind::Import => Some(Direction::Import),
            ObligationKind::Export => Some(Direction::Export),
            _ => None,
        }
    }

    pub fn effect_refs(&self) -> Vec<(&str, Effect)> {
        self.effects.iter().map(|(g, e)| (g.as_str(), *e)).collect()
    }

    /// Concrete transfer of this obligation's map and ghost effects.
    pub fn apply(&self, r: &Route) -> MapOutcome {
        let map = self.map.as_ref().expect("transfer obligations carry a map");
        match map.evaluate(r) {
            MapOutcome::Accept { mut route, term } => {
                for (g, e) in &self.effects {
                    match e {
                        Effect::SetTrue => {
                            route.ghosts.insert(g.clone(), true);
                        }
                        Effect::SetFalse => {
                            route.ghosts.insert(g.clone(), false);
                        }
                        Effect::Preserve => {}
                    }
                }
                MapOutcome::Accept { route, term }
            }
            reject => reject,
        }
    }

    /// Whether re-checking is needed when `node` changes.
    pub fn touches(&self, node: &str) -> bool {
        self.edge.as_ref().is_some_and(|e| e.touches(node))
    }
}

fn canonical(c: &Constraint) -> String {
    match c {
        Constraint::Pred(p) => format!("pred:{p}"),
        Constraint::Symbolic(s) => format!("set:{}", s.fingerprint()),
    }
}

fn make_id(ob: &Obligation) -> String {
    let mut h = Sha256::new();
    h.update(ob.kind.to_string());
    if let Some(e) = &ob.edge {
        h.update(format!("\0{e}"));
    }
    h.update(format!(
        "\0{}\0{}",
        ob.hypothesis_location,
        canonical(&ob.hypothesis)
    ));
    h.update(format!("\0{}\0{}", ob.goal_location, canonical(&ob.goal)));
    if let Some(m) = &ob.map {
        h.update(serde_json::to_string(m).expect("maps serialise"));
    }
    for (g, e) in &ob.effects {
        h.update(format!("\0{g}={e:?}"));
    }
    for r in &ob.origin_routes {
        h.update(format!("\0{r}"));
    }
    let digest = h.finalize();
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    match &ob.edge {
        Some(e) => format!("{}:{}:{}", ob.kind, e, hex),
        None => format!("{}:{}:{}", ob.kind, ob.goal_location, hex),
    }
}

/// Routes arriving from an external neighbour: anything at all, with ghost
/// fields at their origin defaults.
pub fn external_routes(net: &Network) -> PredicateExpr {
    net.ghosts
        .defaults()
        .into_iter()
        .map(|(g, v)| {
            let atom = PredicateExpr::Ghost(g);
            if v {
                atom
            } else {
                PredicateExpr::not(atom)
            }
        })
        .reduce(PredicateExpr::and)
        .unwrap_or(PredicateExpr::True)
}

fn invariant(net: &Network, inv: &InvariantMap, loc: &Location) -> Constraint {
    if let Location::Edge(e) = loc {
        if net.topology.is_external(&e.src) {
            return Constraint::Pred(external_routes(net));
        }
    }
    inv.get(loc)
        .cloned()
        .unwrap_or(Constraint::Pred(PredicateExpr::True))
}

/// All local obligations: per edge `A->B`, an import check when `B` is
/// internal, export and originate checks when `A` is internal, plus one
/// implication check from the invariant at the property's location to the
/// property.
pub fn generate_checks(
    net: &Network,
    inv: &InvariantMap,
    prop: &NetworkProperty,
) -> Vec<Obligation> {
    let topo = &net.topology;
    let mut out = Vec::new();
    let effects = |e: &Edge, d: Direction| -> Vec<(String, Effect)> {
        net.ghosts
            .effects(e, d)
            .into_iter()
            .map(|(g, eff)| (g.to_string(), eff))
            .collect()
    };
    for e in &topo.edges {
        let edge_loc = Location::Edge(e.clone());
        if topo.is_internal(&e.dst) {
            let node = Location::Node(e.dst.clone());
            out.push(Obligation {
                id: String::new(),
                kind: ObligationKind::Import,
                edge: Some(e.clone()),
                hypothesis: invariant(net, inv, &edge_loc),
                hypothesis_location: edge_loc.clone(),
                goal: invariant(net, inv, &node),
                goal_location: node,
                map: net.policy.import_maps.get(e).cloned(),
                effects: effects(e, Direction::Import),
                origin_routes: Vec::new(),
            });
        }
        if topo.is_internal(&e.src) {
            let node = Location::Node(e.src.clone());
            out.push(Obligation {
                id: String::new(),
                kind: ObligationKind::Export,
                edge: Some(e.clone()),
                hypothesis: invariant(net, inv, &node),
                hypothesis_location: node.clone(),
                goal: invariant(net, inv, &edge_loc),
                goal_location: edge_loc.clone(),
                map: net.policy.export_maps.get(e).cloned(),
                effects: effects(e, Direction::Export),
                origin_routes: Vec::new(),
            });
            out.push(Obligation {
                id: String::new(),
                kind: ObligationKind::Originate,
                edge: Some(e.clone()),
                hypothesis: Constraint::Pred(PredicateExpr::True),
                hypothesis_location: node,
                goal: invariant(net, inv, &edge_loc),
                goal_location: edge_loc,
                map: None,
                effects: Vec::new(),
                origin_routes: net.originated(e),
            });
        }
    }
    out.push(Obligation {
        id: String::new(),
        kind: ObligationKind::Implication,
        edge: None,
        hypothesis: invariant(net, inv, &prop.location),
        hypothesis_location: prop.location.clone(),
        goal: Constraint::Pred(prop.pred.clone()),
        goal_location: prop.location.clone(),
        map: None,
        effects: Vec::new(),
        origin_routes: Vec::new(),
    });
    for ob in &mut out {
        ob.id = make_id(ob);
    }
    out
}

/// `|ext->int| + 2|int->ext| + 3|int->int| + 1`
pub fn expected_count(net: &Network) -> usize {
    let t = &net.topology;
    1 + t
        .edges
        .iter()
        .map(|e| match (t.is_internal(&e.src), t.is_internal(&e.dst)) {
            (false, true) => 1,
            (true, false) => 2,
            (true, true) => 3,
            (false, false) => 0,
        })
        .sum::<usize>()
}
