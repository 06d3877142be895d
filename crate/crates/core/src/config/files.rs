// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};

use super::dsl::parse_predicate;
use super::ConfigError;
use crate::model::{
    validate_network, Asn, Community, Constraint, Direction, Edge, Effect, GhostSpec, InvariantMap,
    Location, Network, NetworkProperty, PredicateExpr, Prefix, Route, Term,
};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    #[serde(default)]
    routers: Vec<NodeDoc>,
    #[serde(default)]
    externals: Vec<NodeDoc>,
    #[serde(default)]
    edges: Vec<Edge>,
    #[serde(default)]
    policies: Vec<PolicyDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    originations: Vec<OriginationDoc>,
    #[serde(default)]
    ghosts: GhostsDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    name: String,
    asn: Asn,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyDoc {
    edge: Edge,
    direction: Direction,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OriginationDoc {
    edge: Edge,
    routes: Vec<RouteDoc>,
}

/// A route as written in files; omitted numeric fields are zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteDoc {
    pub prefix: Prefix,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub as_path: Vec<Asn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next_hop: Option<Ipv4Addr>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub local_pref: u32,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub med: u32,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub communities: BTreeSet<Community>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ghosts: BTreeMap<String, bool>,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

impl From<&Route> for RouteDoc {
    fn from(r: &Route) -> Self {
        RouteDoc {
            prefix: r.prefix,
            as_path: r.as_path.clone(),
            next_hop: (r.next_hop != 0).then(|| Ipv4Addr::from(r.next_hop)),
            local_pref: r.local_pref,
            med: r.med,
            communities: r.communities.clone(),
            ghosts: r.ghosts.clone(),
        }
    }
}

impl From<RouteDoc> for Route {
    fn from(d: RouteDoc) -> Self {
        Route {
            prefix: d.prefix,
            as_path: d.as_path,
            next_hop: d.next_hop.map_or(0, u32::from),
            local_pref: d.local_pref,
            med: d.med,
            communities: d.communities,
            ghosts: d.ghosts,
        }
    }
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GhostsDoc {
    #[serde(default)]
    declarations: Vec<String>,
    #[serde(default)]
    effects: Vec<EffectDoc>,
    #[serde(default)]
    origin_defaults: BTreeMap<String, bool>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EffectDoc {
    edge: Edge,
    direction: Direction,
    ghost: String,
    effect: Effect,
}

fn json_error(e: serde_json::Error) -> ConfigError {
    ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    }
}

pub fn parse_network(text: &str) -> Result<Network, ConfigError> {
    let doc: NetworkDoc = serde_json::from_str(text).map_err(json_error)?;
    let mut net = Network::default();
    for (n, internal) in doc
        .routers
        .iter()
        .map(|n| (n, true))
        .chain(doc.externals.iter().map(|n| (n, false)))
    {
        if net.asns.insert(n.name.clone(), n.asn).is_some() {
            return Err(ConfigError::Duplicate(format!("node {}", n.name)));
        }
        if internal {
            net.topology.routers.insert(n.name.clone());
        } else {
            net.topology.externals.insert(n.name.clone());
        }
    }
    for e in doc.edges {
        if !net.topology.edges.insert(e.clone()) {
            return Err(ConfigError::Duplicate(format!("edge {e}")));
        }
    }
    for p in doc.policies {
        let maps = match p.direction {
            Direction::Import => &mut net.policy.import_maps,
            Direction::Export => &mut net.policy.export_maps,
        };
        let key = p.edge.clone();
        if maps
            .insert(p.edge, crate::model::RouteMap::new(p.terms))
            .is_some()
        {
            return Err(ConfigError::Duplicate(format!(
                "{} policy on {key}",
                p.direction
            )));
        }
    }
    for o in doc.originations {
        let set = net.policy.originate.entry(o.edge).or_default();
        set.extend(o.routes.into_iter().map(Route::from));
    }
    let mut ghosts = GhostSpec {
        declarations: doc.ghosts.declarations,
        origin_defaults: doc.ghosts.origin_defaults,
        ..GhostSpec::default()
    };
    for eff in doc.ghosts.effects {
        let table = match eff.direction {
            Direction::Import => &mut ghosts.import_effects,
            Direction::Export => &mut ghosts.export_effects,
        };
        let key = (eff.edge, eff.ghost);
        if table.insert(key.clone(), eff.effect).is_some() {
            return Err(ConfigError::Duplicate(format!(
                "{} effect for ghost {} on {}",
                eff.direction, key.1, key.0
            )));
        }
    }
    net.ghosts = ghosts;
    let violations = validate_network(&net, None);
    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations));
    }
    Ok(net)
}

pub fn print_network(net: &Network) -> String {
    let node = |n: &String| NodeDoc {
        name: n.clone(),
        asn: net.asns.get(n).copied().unwrap_or(0),
    };
    let mut policies = Vec::new();
    for e in &net.topology.edges {
        for dir in [Direction::Import, Direction::Export] {
            if let Some(m) = net.policy.map(e, dir) {
                policies.push(PolicyDoc {
                    edge: e.clone(),
                    direction: dir,
                    terms: m.terms.clone(),
                });
            }
        }
    }
    let originations = net
        .policy
        .originate
        .iter()
        .filter(|(_, rs)| !rs.is_empty())
        .map(|(e, rs)| OriginationDoc {
            edge: e.clone(),
            routes: rs.iter().map(RouteDoc::from).collect(),
        })
        .collect();
    let mut effects = Vec::new();
    for (dir, table) in [
        (Direction::Import, &net.ghosts.import_effects),
        (Direction::Export, &net.ghosts.export_effects),
    ] {
        for ((edge, ghost), effect) in table {
            effects.push(EffectDoc {
                edge: edge.clone(),
                direction: dir,
                ghost: ghost.clone(),
                effect: *effect,
            });
        }
    }
    let doc = NetworkDoc {
        routers: net.topology.routers.iter().map(node).collect(),
        externals: net.topology.externals.iter().map(node).collect(),
        edges: net.topology.edges.iter().cloned().collect(),
        policies,
        originations,
        ghosts: GhostsDoc {
            declarations: net.ghosts.declarations.clone(),
            effects,
            origin_defaults: net.ghosts.origin_defaults.clone(),
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("network documents serialise");
    s.push('\n');
    s
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    property: LocatedPred,
    #[serde(default)]
    invariants: InvariantsDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocatedPred {
    location: String,
    pred: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvariantsDoc {
    #[serde(default)]
    entries: Vec<LocatedPred>,
    default: String,
}

impl Default for InvariantsDoc {
    fn default() -> Self {
        InvariantsDoc {
            entries: Vec::new(),
            default: "true".into(),
        }
    }
}

/// A parsed verification spec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spec {
    pub property: NetworkProperty,
    pub invariants: InvariantMap,
    /// The default predicate used for locations without an explicit entry.
    pub default: PredicateExpr,
    pub ghosts: GhostSpec,
}

fn resolve(net: &Network, loc: &str) -> Result<Location, ConfigError> {
    let l: Location = loc
        .parse()
        .map_err(|_| ConfigError::UnknownLocation(loc.to_string()))?;
    if !net.topology.has_location(&l) {
        return Err(ConfigError::UnknownLocation(loc.to_string()));
    }
    Ok(l)
}

fn predicate(net: &Network, src: &str) -> Result<PredicateExpr, ConfigError> {
    let p = parse_predicate(src)?;
    for g in p.ghosts() {
        if !net.ghosts.is_declared(&g) {
            return Err(ConfigError::UndeclaredGhost(g));
        }
    }
    Ok(p)
}

pub fn parse_spec(text: &str, net: &Network) -> Result<Spec, ConfigError> {
    let doc: SpecDoc = serde_json::from_str(text).map_err(json_error)?;
    let property = NetworkProperty {
        location: resolve(net, &doc.property.location)?,
        pred: predicate(net, &doc.property.pred)?,
    };
    let default = predicate(net, &doc.invariants.default)?;
    let mut invariants = InvariantMap::uniform(&net.topology, default.clone());
    let mut seen = BTreeSet::new();
    for entry in &doc.invariants.entries {
        let loc = resolve(net, &entry.location)?;
        if !seen.insert(loc.clone()) {
            return Err(ConfigError::Duplicate(format!("invariant for {loc}")));
        }
        let p = predicate(net, &entry.pred)?;
        if let Location::Edge(e) = &loc {
            if net.topology.is_external(&e.src) && !p.is_true() {
                return Err(ConfigError::ExternalInvariant(e.clone()));
            }
        }
        invariants.set(loc, p);
    }
    Ok(Spec {
        property,
        invariants,
        default,
        ghosts: net.ghosts.clone(),
    })
}

/// Prints a spec whose invariants are all predicates; entries equal to the
/// default (and the forced `true` on external edges) are omitted.
pub fn print_spec(spec: &Spec, net: &Network) -> Result<String, ConfigError> {
    let mut entries = Vec::new();
    for (loc, c) in &spec.invariants.entries {
        let p = match c {
            Constraint::Pred(p) => p,
            Constraint::Symbolic(_) => return Err(ConfigError::Unprintable(loc.clone())),
        };
        let external = matches!(loc, Location::Edge(e) if net.topology.is_external(&e.src));
        if external || *p == spec.default {
            continue;
        }
        entries.push(LocatedPred {
            location: loc.to_string(),
            pred: p.to_string(),
        });
    }
    let doc = SpecDoc {
        property: LocatedPred {
            location: spec.property.location.to_string(),
            pred: spec.property.pred.to_string(),
        },
        invariants: InvariantsDoc {
            entries,
            default: spec.default.to_string(),
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("spec documents serialise");
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NET: &str = r#"{
        "routers": [{"name": "R", "asn": 1}],
        "externals": [{"name": "X", "asn": 2}],
        "edges": [{"src": "X", "dst": "R"}, {"src": "R", "dst": "X"}],
        "policies": [
            {"edge": {"src": "X", "dst": "R"}, "direction": "import",
             "terms": [{"action": "permit", "set": [{"add_community": "1:1"}]}]},
            {"edge": {"src": "R", "dst": "X"}, "direction": "export",
             "terms": [{"action": "deny", "match": [{"community_present": "1:1"}]}, {"action": "permit"}]}
        ]
    }"#;

    fn net() -> Network {
        parse_network(NET).unwrap()
    }

    #[test]
    fn network_round_trips() {
        let n = net();
        assert_eq!(n.topology.edges.len(), 2);
        assert_eq!(parse_network(&print_network(&n)).unwrap(), n);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_network("{\n  \"routers\": [,]\n}").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }), "{err}");
        let err = parse_network(r#"{"routers": [], "bogus": 1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn duplicates_and_structure_are_checked() {
        let dup = NET.replacen(
            r#"{"src": "X", "dst": "R"},"#,
            r#"{"src": "X", "dst": "R"}, {"src": "X", "dst": "R"},"#,
            1,
        );
        assert!(matches!(
            parse_network(&dup),
            Err(ConfigError::Duplicate(_))
        ));
        let no_map = NET.replace(r#""direction": "import""#, r#""direction": "export""#);
        assert!(parse_network(&no_map).is_err());
    }

    #[test]
    fn spec_checks_locations_and_ghosts() {
        let n = net();
        let ok = r#"{"property": {"location": "R->X", "pred": "not community 1:1"},
                     "invariants": {"default": "true", "entries": [{"location": "R->X", "pred": "not community 1:1"}]}}"#;
        let s = parse_spec(ok, &n).unwrap();
        assert_eq!(s.invariants.entries.len(), 3);
        assert_eq!(parse_spec(&print_spec(&s, &n).unwrap(), &n).unwrap(), s);

        let unknown = ok.replace(
            r#""location": "R->X", "pred": "not"#,
            r#""location": "R->Q", "pred": "not"#,
        );
        assert!(matches!(
            parse_spec(&unknown, &n),
            Err(ConfigError::UnknownLocation(_))
        ));
        let ghost = ok.replacen("not community 1:1", "ghost Nope", 1);
        assert!(matches!(
            parse_spec(&ghost, &n),
            Err(ConfigError::UndeclaredGhost(_))
        ));
        let ext = r#"{"property": {"location": "R", "pred": "true"},
                      "invariants": {"default": "true", "entries": [{"location": "X->R", "pred": "med < 3"}]}}"#;
        assert!(matches!(
            parse_spec(ext, &n),
            Err(ConfigError::ExternalInvariant(_))
        ));
    }
}
