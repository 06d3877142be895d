// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::sync::Arc;

use log::{debug, info};
use serde::Serialize;

use super::OracleError;
use crate::checker::{external_routes, Witness};
use crate::config::Universe;
use crate::model::{
    validate_network, AsPathRegex, Direction, Edge, Location, MatchClause, Network,
    NetworkProperty, PredicateExpr, Route,
};
use crate::symbolic::{DfaId, Encoding, Engine, PortableSet, RouteSet, SetStats};

/// Knobs for [`compute_fixpoint_with`].
#[derive(Clone, Debug)]
pub struct FixpointOptions {
    /// Paths up to this length are kept exactly; defaults to the node count plus 2.
    pub aspath_bound: Option<usize>,
    /// Restrict external announcements to these routes instead of all routes.
    pub seeds: Option<Vec<Route>>,
    /// Predicates that will be evaluated against the solution. Their
    /// literals are tracked and their regexes observed by the path closure.
    pub predicates: Vec<PredicateExpr>,
    /// Extra literals to track, e.g. to compare with another solution.
    pub universe: Option<Universe>,
    /// Extra path regexes for the closure to keep apart, e.g. those of a
    /// larger network this solution will be compared with.
    pub observe: Vec<AsPathRegex>,
    pub max_rounds: usize,
}

impl Default for FixpointOptions {
    fn default() -> Self {
        FixpointOptions {
            aspath_bound: None,
            seeds: None,
            predicates: Vec::new(),
            universe: None,
            observe: Vec::new(),
            max_rounds: 10_000,
        }
    }
}

/// Reachable routes at every location: selectable at each internal router,
/// and sent along each edge.
pub struct FixpointSolution {
    engine: Engine,
    pub node_sets: BTreeMap<String, RouteSet>,
    pub edge_sets: BTreeMap<Edge, RouteSet>,
    pub aspath_bound: usize,
    /// Rounds of chaotic iteration until nothing changed.
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertyVerdict {
    Holds,
    Violated(Witness),
}

#[derive(Clone, Debug, Serialize)]
pub struct LocationDump {
    pub location: Location,
    pub stats: SetStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixpointDump {
    pub aspath_bound: usize,
    pub iterations: usize,
    pub universe: Universe,
    pub locations: Vec<LocationDump>,
}

impl FixpointSolution {
    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn engine_mut(&mut self) -> &mut Engine {
        &mut self.engine
    }

    pub fn encoding(&self) -> &Arc<Encoding> {
        self.engine.encoding()
    }

    pub fn set_at(&self, loc: &Location) -> Option<&RouteSet> {
        match loc {
            Location::Node(n) => self.node_sets.get(n),
            Location::Edge(e) => self.edge_sets.get(e),
        }
    }

    pub fn export(&self, loc: &Location) -> Option<PortableSet> {
        self.set_at(loc).map(|s| self.engine.export(s))
    }

    pub fn locations(&self) -> Vec<Location> {
        self.node_sets
            .keys()
            .map(|n| Location::Node(n.clone()))
            .chain(self.edge_sets.keys().map(|e| Location::Edge(e.clone())))
            .collect()
    }

    /// Per-location statistics, optionally with one sample route each.
    pub fn dump(&mut self, samples: bool) -> FixpointDump {
        let mut locations = Vec::new();
        for loc in self.locations() {
            let set = self.set_at(&loc).expect("listed location").clone();
            let sample = if samples {
                self.engine
                    .witness(&set)
                    .map(|r| Witness::render(&r, self.engine.encoding()))
            } else {
                None
            };
            locations.push(LocationDump {
                stats: self.engine.stats(&set),
                location: loc,
                sample,
            });
        }
        FixpointDump {
            aspath_bound: self.aspath_bound,
            iterations: self.iterations,
            universe: self.engine.encoding().universe().clone(),
            locations,
        }
    }
}

/// Path regexes matched by the network's route maps.
pub fn network_regexes(net: &Network) -> Vec<AsPathRegex> {
    let mut out = Vec::new();
    for map in net
        .policy
        .import_maps
        .values()
        .chain(net.policy.export_maps.values())
    {
        for t in &map.terms {
            for m in &t.matches {
                if let MatchClause::AsPath(rx) = m {
                    out.push(rx.clone());
                }
            }
        }
    }
    out
}

pub fn compute_fixpoint(
    net: &Network,
    aspath_bound: Option<usize>,
) -> Result<FixpointSolution, OracleError> {
    compute_fixpoint_with(
        net,
        &FixpointOptions {
            aspath_bound,
            ..FixpointOptions::default()
        },
    )
}

/// Least solution of the transfer equations, iterated to stabilisation in a
/// fixed order. Path languages are closed at every step (see
/// [`Engine::close_paths`]) so the iteration terminates.
pub fn compute_fixpoint_with(
    net: &Network,
    opts: &FixpointOptions,
) -> Result<FixpointSolution, OracleError> {
    let violations = validate_network(net, None);
    if !violations.is_empty() {
        return Err(OracleError::Invalid(violations));
    }
    let topo = &net.topology;
    let bound = opts
        .aspath_bound
        .unwrap_or(topo.routers.len() + topo.externals.len() + 2);
    if bound == 0 {
        return Err(OracleError::ZeroBound);
    }

    let mut ub = Universe::builder().network(net);
    for p in &opts.predicates {
        ub = ub.predicate(p);
    }
    if let Some(u) = &opts.universe {
        ub = ub.universe(u);
    }
    for rx in &opts.observe {
        ub = ub.predicate(&PredicateExpr::AsPathMatches(rx.clone()));
    }
    let seeds: Option<Vec<Route>> = opts
        .seeds
        .as_ref()
        .map(|s| s.iter().map(|r| net.ghosts.with_defaults(r)).collect());
    if let Some(s) = &seeds {
        let mut b = Universe::builder();
        for r in s {
            b = b.routes(r);
        }
        ub = ub.universe(&b.build());
    }
    let mut eng = Engine::new(Arc::new(Encoding::new(ub.build())));

    let mut observers: Vec<DfaId> = Vec::new();
    for rx in network_regexes(net).iter().chain(&opts.observe) {
        observers.push(eng.regex_language(rx)?);
    }
    for rx in opts.predicates.iter().flat_map(|p| p.regexes()) {
        let id = eng.regex_language(&rx)?;
        if eng.dfa(id).num_states() > bound {
            log::warn!("regex {rx} has more automaton states than the path bound {bound}");
        }
        observers.push(id);
    }

    let external = match &seeds {
        None => eng.encode_predicate(&external_routes(net))?,
        Some(s) => eng.encode_routes(s.iter()),
    };
    let external = eng.close_paths(&external, bound, &observers);

    let mut node_sets: BTreeMap<String, RouteSet> = topo
        .routers
        .iter()
        .map(|r| (r.clone(), eng.empty()))
        .collect();
    let mut edge_sets: BTreeMap<Edge, RouteSet> = BTreeMap::new();
    for e in &topo.edges {
        let init = if topo.is_external(&e.src) {
            external.clone()
        } else {
            eng.empty()
        };
        edge_sets.insert(e.clone(), init);
    }
    let origins: BTreeMap<Edge, RouteSet> = topo
        .edges
        .iter()
        .filter(|e| topo.is_internal(&e.src))
        .map(|e| {
            let rs = net.originated(e);
            (e.clone(), eng.encode_routes(rs.iter()))
        })
        .collect();

    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > opts.max_rounds {
            return Err(OracleError::NoConvergence(opts.max_rounds));
        }
        let mut changed = false;
        for r in &topo.routers {
            let mut acc = node_sets[r].clone();
            for e in topo.in_edges(r) {
                let map = net.policy.map(e, Direction::Import).expect("validated");
                let effects = net.ghosts.effects(e, Direction::Import);
                let out = eng.transfer(map, &effects, &edge_sets[e])?.output;
                acc = eng.union(&acc, &out);
            }
            let acc = eng.close_paths(&acc, bound, &observers);
            if acc != node_sets[r] {
                node_sets.insert(r.clone(), acc);
                changed = true;
            }
        }
        for e in &topo.edges {
            if !topo.is_internal(&e.src) {
                continue;
            }
            let map = net.policy.map(e, Direction::Export).expect("validated");
            let effects = net.ghosts.effects(e, Direction::Export);
            let out = eng.transfer(map, &effects, &node_sets[&e.src])?.output;
            let acc = eng.union(&edge_sets[e], &out);
            let acc = eng.union(&acc, &origins[e]);
            let acc = eng.close_paths(&acc, bound, &observers);
            if acc != edge_sets[e] {
                edge_sets.insert(e.clone(), acc);
                changed = true;
            }
        }
        debug!("fixpoint round {rounds}: changed = {changed}");
        if !changed {
            break;
        }
    }
    info!("fixpoint stabilised after {rounds} rounds (path bound {bound})");
    Ok(FixpointSolution {
        engine: eng,
        node_sets,
        edge_sets,
        aspath_bound: bound,
        iterations: rounds,
    })
}

/// Whether every route reaching the property's location satisfies it.
pub fn check_property_fixpoint(
    fp: &mut FixpointSolution,
    prop: &NetworkProperty,
) -> Result<PropertyVerdict, OracleError> {
    let set = fp
        .set_at(&prop.location)
        .ok_or_else(|| OracleError::UnknownLocation(prop.location.clone()))?
        .clone();
    let goal = fp.engine.encode_predicate(&prop.pred)?;
    Ok(match fp.engine.subset_witness(&set, &goal) {
        None => PropertyVerdict::Holds,
        Some(r) => PropertyVerdict::Violated(Witness::render(&r, fp.engine.encoding())),
    })
}
