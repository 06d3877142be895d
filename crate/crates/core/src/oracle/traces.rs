// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use super::fixpoint::FixpointSolution;
use super::OracleError;
use crate::model::{Direction, Edge, Location, Network, NetworkProperty, Route};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Recv,
    Slct,
    Frwd,
}

/// `recv(router, neighbor, r)`, `slct(router, r)` or `frwd(router, neighbor, r)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub router: String,
    pub neighbor: Option<String>,
    pub route: Route,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, &self.neighbor) {
            (EventKind::Slct, _) => write!(f, "slct({}, {})", self.router, self.route),
            (k, Some(n)) => write!(
                f,
                "{}({}, {}, {})",
                if *k == EventKind::Recv {
                    "recv"
                } else {
                    "frwd"
                },
                self.router,
                n,
                self.route
            ),
            (_, None) => write!(f, "{:?}({})", self.kind, self.router),
        }
    }
}

impl TraceEvent {
    fn recv(router: &str, neighbor: &str, route: Route) -> Self {
        TraceEvent {
            kind: EventKind::Recv,
            router: router.to_string(),
            neighbor: Some(neighbor.to_string()),
            route,
        }
    }

    fn slct(router: &str, route: Route) -> Self {
        TraceEvent {
            kind: EventKind::Slct,
            router: router.to_string(),
            neighbor: None,
            route,
        }
    }

    fn frwd(router: &str, neighbor: &str, route: Route) -> Self {
        TraceEvent {
            kind: EventKind::Frwd,
            router: router.to_string(),
            neighbor: Some(neighbor.to_string()),
            route,
        }
    }

    /// The location whose invariant constrains this event's route.
    pub fn location(&self) -> Location {
        match (self.kind, &self.neighbor) {
            (EventKind::Slct, _) => Location::Node(self.router.clone()),
            (EventKind::Frwd, Some(n)) => Location::Edge(Edge::new(self.router.clone(), n.clone())),
            (EventKind::Recv, Some(n)) => Location::Edge(Edge::new(n.clone(), self.router.clone())),
            _ => unreachable!("recv and frwd events carry a neighbour"),
        }
    }
}

/// Size limits for trace exploration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceLimits {
    pub max_nodes: usize,
    pub max_seeds: usize,
    pub max_events: usize,
}

impl Default for TraceLimits {
    fn default() -> Self {
        TraceLimits {
            max_nodes: 6,
            max_seeds: 4,
            max_events: 12,
        }
    }
}

impl TraceLimits {
    pub fn check(
        &self,
        net: &Network,
        seeds: &[Route],
        max_events: usize,
    ) -> Result<(), OracleError> {
        let nodes = net.topology.routers.len() + net.topology.externals.len();
        for (what, value, limit) in [
            ("nodes", nodes, self.max_nodes),
            ("seeds", seeds.len(), self.max_seeds),
            ("events", max_events, self.max_events),
        ] {
            if value > limit {
                return Err(OracleError::InstanceTooLarge { what, value, limit });
            }
        }
        Ok(())
    }
}

/// Event semantics of one network over a fixed seed alphabet.
struct Semantics<'a> {
    net: &'a Network,
    roots: Vec<TraceEvent>,
}

impl<'a> Semantics<'a> {
    fn new(net: &'a Network, seeds: &[Route]) -> Self {
        let topo = &net.topology;
        let mut roots = Vec::new();
        for e in &topo.edges {
            if topo.is_external(&e.src) && topo.is_internal(&e.dst) {
                for s in seeds {
                    roots.push(TraceEvent::recv(
                        &e.dst,
                        &e.src,
                        net.ghosts.with_defaults(s),
                    ));
                }
            }
            if topo.is_internal(&e.src) {
                for r in net.originated(e) {
                    roots.push(TraceEvent::frwd(&e.src, &e.dst, r));
                }
            }
        }
        roots.sort();
        roots.dedup();
        Semantics { net, roots }
    }

    /// Events whose validity is witnessed by `ev` occurring earlier.
    fn successors(&self, ev: &TraceEvent) -> Vec<TraceEvent> {
        let topo = &self.net.topology;
        match ev.kind {
            EventKind::Recv => {
                let n = ev.neighbor.as_ref().expect("recv has a neighbour");
                let e = Edge::new(n.clone(), ev.router.clone());
                match self.net.transfer_outcome(&e, Direction::Import, &ev.route) {
                    Ok(o) => o
                        .route()
                        .map(|r| TraceEvent::slct(&ev.router, r))
                        .into_iter()
                        .collect(),
                    Err(_) => Vec::new(),
                }
            }
            EventKind::Slct => topo
                .out_edges(&ev.router)
                .filter_map(|e| {
                    self.net
                        .export_transfer(e, &ev.route)
                        .ok()
                        .flatten()
                        .map(|r| TraceEvent::frwd(&e.src, &e.dst, r))
                })
                .collect(),
            EventKind::Frwd => {
                let n = ev.neighbor.as_ref().expect("frwd has a neighbour");
                if topo.is_internal(n) {
                    vec![TraceEvent::recv(n, &ev.router, ev.route.clone())]
                } else {
                    Vec::new()
                }
            }
        }
    }
}

/// Every event that occurs in some valid trace of at most `max_events`
/// events, with a shortest such trace for each.
///
/// Each event's validity rests on a single earlier event (or none), so an
/// event occurs in a valid trace of length `n` exactly when its shortest
/// chain of justifying events has at most `n` links.
#[derive(Clone, Debug)]
pub struct EventReachability {
    parent: BTreeMap<TraceEvent, (usize, Option<TraceEvent>)>,
}

impl EventReachability {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn events(&self) -> impl Iterator<Item = &TraceEvent> {
        self.parent.keys()
    }

    pub fn depth(&self, ev: &TraceEvent) -> Option<usize> {
        self.parent.get(ev).map(|(d, _)| *d)
    }

    /// A shortest valid trace ending in `ev`.
    pub fn trace_to(&self, ev: &TraceEvent) -> Option<Vec<TraceEvent>> {
        let mut out = vec![ev.clone()];
        let mut cur = self.parent.get(ev)?;
        while let Some(p) = &cur.1 {
            out.push(p.clone());
            cur = &self.parent[p];
        }
        out.reverse();
        Some(out)
    }

    /// Events at the property's location whose route violates it.
    pub fn violations(&self, prop: &NetworkProperty) -> Vec<&TraceEvent> {
        self.parent
            .keys()
            .filter(|ev| ev.location() == prop.location)
            .filter(|ev| !prop.pred.eval(&ev.route).unwrap_or(false))
            .collect()
    }

    /// Events whose route lies outside the fixpoint set of their location.
    pub fn disagreements(&self, fp: &FixpointSolution) -> Vec<&TraceEvent> {
        self.parent
            .keys()
            .filter(|ev| match fp.set_at(&ev.location()) {
                Some(s) => !fp.engine().contains(s, &ev.route),
                None => true,
            })
            .collect()
    }
}

pub fn reachable_events(
    net: &Network,
    seeds: &[Route],
    max_events: usize,
    limits: Option<TraceLimits>,
) -> Result<EventReachability, OracleError> {
    if let Some(l) = limits {
        l.check(net, seeds, max_events)?;
    }
    let sem = Semantics::new(net, seeds);
    let mut parent = BTreeMap::new();
    let mut queue = VecDeque::new();
    if max_events > 0 {
        for r in &sem.roots {
            parent.insert(r.clone(), (1, None));
            queue.push_back(r.clone());
        }
    }
    while let Some(ev) = queue.pop_front() {
        let d = parent[&ev].0;
        if d >= max_events {
            continue;
        }
        for s in sem.successors(&ev) {
            if !parent.contains_key(&s) {
                parent.insert(s.clone(), (d + 1, Some(ev.clone())));
                queue.push_back(s);
            }
        }
    }
    Ok(EventReachability { parent })
}

/// All valid traces of at most `max_events` events, shortest first.
///
/// The number of traces grows exponentially with the length; use
/// [`reachable_events`] for questions about which events can occur.
pub struct TraceEnumerator<'a> {
    sem: Semantics<'a>,
    max_events: usize,
    queue: VecDeque<(Vec<TraceEvent>, BTreeSet<TraceEvent>)>,
}

impl Iterator for TraceEnumerator<'_> {
    type Item = Vec<TraceEvent>;

    fn next(&mut self) -> Option<Vec<TraceEvent>> {
        let (trace, enabled) = self.queue.pop_front()?;
        if trace.len() < self.max_events {
            for ev in &enabled {
                let mut t = trace.clone();
                t.push(ev.clone());
                let mut en = enabled.clone();
                en.extend(self.sem.successors(ev));
                self.queue.push_back((t, en));
            }
        }
        Some(trace)
    }
}

pub fn enumerate_valid_traces<'a>(
    net: &'a Network,
    seeds: &[Route],
    max_events: usize,
    limits: Option<TraceLimits>,
) -> Result<TraceEnumerator<'a>, OracleError> {
    if let Some(l) = limits {
        l.check(net, seeds, max_events)?;
    }
    let sem = Semantics::new(net, seeds);
    let enabled: BTreeSet<TraceEvent> = sem.roots.iter().cloned().collect();
    Ok(TraceEnumerator {
        sem,
        max_events,
        queue: VecDeque::from([(Vec::new(), enabled)]),
    })
}
