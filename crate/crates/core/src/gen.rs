// SPDX-License-Identifier: Apache-2.0

//! Synthetic full-mesh networks for scaling runs.
//!
//! A mesh of size `N` has routers `R0..R{N-1}` in one AS, all pairs joined
//! by iBGP sessions, and one external neighbour `Ei` per router. Sessions
//! are bidirectional, so there are `N(N-1)` internal directed edges plus
//! `2N` to and from the externals. Every eBGP import drops a fixed bogon
//! list, tags the route with `65000:i` and sets a local preference. One
//! source external `Es` is tracked with the ghost `FromEs`; the export from
//! `Rt` to a different external `Et` drops routes tagged `65000:s`. The
//! property says no route from `Es` is sent to `Et`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::Spec;
use crate::model::{
    Community, Direction, Edge, Effect, GhostSpec, InvariantMap, Location, MatchClause, Network,
    NetworkProperty, PredicateExpr, Prefix, PrefixRange, RouteMap, SetAction, Term,
};

pub const MESH_ASN: u32 = 65000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("a mesh needs at least 2 routers, got {0}")]
    TooSmall(usize),
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub network: Network,
    pub spec: Spec,
    pub source: usize,
    pub target: usize,
}

pub fn router(i: usize) -> String {
    format!("R{i}")
}

pub fn external(i: usize) -> String {
    format!("E{i}")
}

fn tag(i: usize) -> Community {
    Community(MESH_ASN as u16, i as u16)
}

pub fn bogons() -> Vec<PrefixRange> {
    [
        "10.0.0.0/8",
        "172.16.0.0/12",
        "192.168.0.0/16",
        "100.64.0.0/10",
    ]
    .iter()
    .map(|p| PrefixRange::new(p.parse::<Prefix>().unwrap(), None, Some(32)).unwrap())
    .collect()
}

/// `N(N-1) + 2N`
pub fn mesh_edge_count(n: usize) -> usize {
    n * (n - 1) + 2 * n
}

pub fn full_mesh(n: usize, seed: u64) -> Result<Mesh, GenError> {
    if n < 2 {
        return Err(GenError::TooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source = rng.gen_range(0..n);
    let target = (source + rng.gen_range(1..n)) % n;
    let ghost = format!("FromE{source}");

    let mut net = Network::default();
    for i in 0..n {
        net.topology.routers.insert(router(i));
        net.topology.externals.insert(external(i));
        net.asns.insert(router(i), MESH_ASN);
        net.asns.insert(external(i), 64512 + i as u32);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let e = Edge::new(router(i), router(j));
                net.policy
                    .import_maps
                    .insert(e.clone(), RouteMap::permit_all());
                net.policy
                    .export_maps
                    .insert(e.clone(), RouteMap::permit_all());
                net.topology.edges.insert(e);
            }
        }
        let inbound = Edge::new(external(i), router(i));
        let outbound = inbound.reversed();
        let import = RouteMap::new(vec![
            Term::deny(vec![MatchClause::PrefixList(bogons())]),
            Term::permit(
                vec![],
                vec![
                    SetAction::AddCommunity(tag(i)),
                    SetAction::SetLocalPref(rng.gen_range(50..=200)),
                ],
            ),
        ]);
        let export = if i == target {
            RouteMap::new(vec![
                Term::deny(vec![MatchClause::CommunityPresent(tag(source))]),
                Term::permit(vec![], vec![]),
            ])
        } else {
            RouteMap::permit_all()
        };
        net.policy.import_maps.insert(inbound.clone(), import);
        net.policy.export_maps.insert(outbound.clone(), export);
        net.topology.edges.insert(inbound);
        net.topology.edges.insert(outbound);
    }
    let mut import_effects = BTreeMap::new();
    import_effects.insert(
        (Edge::new(external(source), router(source)), ghost.clone()),
        Effect::SetTrue,
    );
    net.ghosts = GhostSpec {
        declarations: vec![ghost.clone()],
        import_effects,
        export_effects: BTreeMap::new(),
        origin_defaults: BTreeMap::from([(ghost.clone(), false)]),
    };

    let not_ghost = PredicateExpr::not(PredicateExpr::ghost(&ghost));
    let default = PredicateExpr::implies(
        PredicateExpr::ghost(&ghost),
        PredicateExpr::Community(tag(source)),
    );
    let prop_loc = Location::Edge(Edge::new(router(target), external(target)));
    let mut invariants = InvariantMap::uniform(&net.topology, default.clone());
    invariants.set(prop_loc.clone(), not_ghost.clone());
    let spec = Spec {
        property: NetworkProperty {
            location: prop_loc,
            pred: not_ghost,
        },
        invariants,
        default,
        ghosts: net.ghosts.clone(),
    };
    Ok(Mesh {
        network: net,
        spec,
        source,
        target,
    })
}

/// Changes one route map owned by a random router (an import into it or an
/// export out of it) and returns the router's name.
pub fn mutate_router<R: Rng>(net: &mut Network, rng: &mut R) -> String {
    let routers: Vec<String> = net.topology.routers.iter().cloned().collect();
    let r = routers.choose(rng).expect("network has routers").clone();
    let mut owned: Vec<(Edge, Direction)> = net
        .topology
        .in_edges(&r)
        .map(|e| (e.clone(), Direction::Import))
        .chain(
            net.topology
                .out_edges(&r)
                .map(|e| (e.clone(), Direction::Export)),
        )
        .collect();
    owned.sort();
    let (edge, dir) = owned.choose(rng).expect("routers have sessions").clone();
    let communities: Vec<Community> = net
        .policy
        .import_maps
        .values()
        .flat_map(|m| m.communities())
        .collect();
    let maps = match dir {
        Direction::Import => &mut net.policy.import_maps,
        Direction::Export => &mut net.policy.export_maps,
    };
    let map = maps.get_mut(&edge).expect("validated network");
    let c = communities
        .choose(rng)
        .copied()
        .unwrap_or(Community(MESH_ASN as u16, 0));
    match rng.gen_range(0..4) {
        0 => map
            .terms
            .insert(0, Term::deny(vec![MatchClause::CommunityPresent(c)])),
        1 => map.terms.insert(
            0,
            Term::permit(
                vec![MatchClause::CommunityPresent(c)],
                vec![SetAction::DeleteCommunity(c)],
            ),
        ),
        2 => map
            .terms
            .insert(0, Term::permit(vec![], vec![SetAction::AddCommunity(c)])),
        _ => map.terms.insert(
            0,
            Term::permit(
                vec![MatchClause::PrefixList(bogons())],
                vec![SetAction::SetLocalPref(rng.gen_range(1..=300))],
            ),
        ),
    }
    r
}
