// SPDX-License-Identifier: Apache-2.0

//! Small random networks and route maps for randomized cross-checks.
//!
//! Everything draws from fixed pools: three communities, two ASNs (100 for
//! routers, 200 for externals), a handful of prefixes and regexes. That keeps
//! instances inside the trace explorer's limits and makes the pools double
//! as an enumerable route domain.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use bgpmv_core::model::{
    AsPathRegex, CmpOp, Community, Comparison, Edge, Effect, GhostSpec, MatchClause, Prefix,
    PrefixRange, SetAction, Term,
};
use bgpmv_core::{Network, PredicateExpr, Route, RouteMap};

pub const GHOST: &str = "G";
pub const COMMUNITIES: [Community; 3] = [Community(1, 1), Community(1, 2), Community(2, 1)];
pub const INTERNAL_ASN: u32 = 100;
pub const EXTERNAL_ASN: u32 = 200;
pub const PREFIXES: [&str; 5] = [
    "10.0.0.0/8",
    "10.1.0.0/16",
    "192.168.1.0/24",
    "0.0.0.0/0",
    "8.0.0.0/8",
];
pub const LOCAL_PREFS: [u32; 3] = [0, 100, 200];
pub const MEDS: [u32; 2] = [0, 10];
const REGEXES: [&str; 5] = ["^$", "^100 .*$", "^.* 200$", "^(100|200)+$", "^. 100$"];

pub fn prefix(s: &str) -> Prefix {
    s.parse().unwrap()
}

fn ranges() -> Vec<PrefixRange> {
    vec![
        PrefixRange::new(prefix("10.0.0.0/8"), Some(8), Some(16)).unwrap(),
        PrefixRange::exact(prefix("10.1.0.0/16")),
        PrefixRange::new(prefix("192.168.0.0/16"), None, Some(24)).unwrap(),
        PrefixRange::new(prefix("0.0.0.0/0"), None, Some(8)).unwrap(),
    ]
}

fn regex<R: Rng>(rng: &mut R) -> AsPathRegex {
    AsPathRegex::parse(REGEXES.choose(rng).unwrap()).unwrap()
}

fn cmp<R: Rng>(rng: &mut R) -> CmpOp {
    *[
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Gt,
        CmpOp::Ge,
    ]
    .choose(rng)
    .unwrap()
}

fn community<R: Rng>(rng: &mut R) -> Community {
    *COMMUNITIES.choose(rng).unwrap()
}

fn match_clause<R: Rng>(rng: &mut R) -> MatchClause {
    match rng.gen_range(0..6) {
        0 => MatchClause::CommunityPresent(community(rng)),
        1 => MatchClause::CommunityAbsent(community(rng)),
        2 => {
            let k = rng.gen_range(1..=2);
            MatchClause::PrefixList(ranges().choose_multiple(rng, k).cloned().collect())
        }
        3 => MatchClause::LocalPref(Comparison {
            cmp: cmp(rng),
            value: *LOCAL_PREFS.choose(rng).unwrap(),
        }),
        4 => MatchClause::Med(Comparison {
            cmp: cmp(rng),
            value: *MEDS.choose(rng).unwrap(),
        }),
        _ => MatchClause::AsPath(regex(rng)),
    }
}

fn set_action<R: Rng>(rng: &mut R) -> SetAction {
    match rng.gen_range(0..7) {
        0 => SetAction::AddCommunity(community(rng)),
        1 => SetAction::DeleteCommunity(community(rng)),
        2 => SetAction::DeleteAllCommunities,
        3 => SetAction::SetLocalPref(*LOCAL_PREFS.choose(rng).unwrap()),
        4 => SetAction::SetMed(*MEDS.choose(rng).unwrap()),
        5 => SetAction::SetNextHop([10, 0, 0, rng.gen_range(1..=2)].into()),
        _ => SetAction::Prepend(*[INTERNAL_ASN, EXTERNAL_ASN].choose(rng).unwrap()),
    }
}

pub fn random_map<R: Rng>(rng: &mut R) -> RouteMap {
    let n = rng.gen_range(1..=3);
    let mut terms = Vec::new();
    for i in 0..n {
        let last = i + 1 == n;
        let k = if last && rng.gen_bool(0.5) {
            0
        } else {
            rng.gen_range(0..=2)
        };
        let matches = (0..k).map(|_| match_clause(rng)).collect();
        if rng.gen_bool(0.75) {
            let s = rng.gen_range(0..=2);
            terms.push(Term::permit(
                matches,
                (0..s).map(|_| set_action(rng)).collect(),
            ));
        } else {
            terms.push(Term::deny(matches));
        }
    }
    RouteMap::new(terms)
}

pub fn random_effect<R: Rng>(rng: &mut R) -> Option<Effect> {
    match rng.gen_range(0..6) {
        0 => Some(Effect::SetTrue),
        1 => Some(Effect::SetFalse),
        _ => None,
    }
}

pub fn random_route<R: Rng>(rng: &mut R, ghost: bool) -> Route {
    let paths: [&[u32]; 4] = [&[], &[200], &[200, 100], &[100, 200, 200]];
    let mut r = Route::new(prefix(PREFIXES.choose(rng).unwrap()))
        .with_communities(COMMUNITIES.iter().copied().filter(|_| rng.gen_bool(0.4)))
        .with_path(paths.choose(rng).unwrap().to_vec());
    r.local_pref = *LOCAL_PREFS.choose(rng).unwrap();
    r.med = *MEDS.choose(rng).unwrap();
    if ghost {
        r = r.with_ghost(GHOST, rng.gen_bool(0.5));
    }
    r
}

pub fn random_pred<R: Rng>(rng: &mut R, ghost: bool, depth: u32) -> PredicateExpr {
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..7) {
            0 => PredicateExpr::Community(community(rng)),
            1 => PredicateExpr::PrefixIn(*ranges().choose(rng).unwrap()),
            2 => PredicateExpr::LocalPref(cmp(rng), *LOCAL_PREFS.choose(rng).unwrap()),
            3 => PredicateExpr::Med(cmp(rng), *MEDS.choose(rng).unwrap()),
            4 if ghost => PredicateExpr::ghost(GHOST),
            5 => PredicateExpr::AsPathMatches(regex(rng)),
            _ => PredicateExpr::True,
        };
    }
    let a = random_pred(rng, ghost, depth - 1);
    match rng.gen_range(0..4) {
        0 => PredicateExpr::not(a),
        1 => PredicateExpr::and(a, random_pred(rng, ghost, depth - 1)),
        2 => PredicateExpr::or(a, random_pred(rng, ghost, depth - 1)),
        _ => PredicateExpr::implies(a, random_pred(rng, ghost, depth - 1)),
    }
}

/// A valid network with 1 to 3 routers, at most 5 nodes in total.
pub fn random_network<R: Rng>(rng: &mut R) -> Network {
    let n_int = rng.gen_range(1..=3);
    let n_ext = rng.gen_range(1..=(5 - n_int).min(2));
    let routers: Vec<String> = (0..n_int).map(|i| format!("R{i}")).collect();
    let externals: Vec<String> = (0..n_ext).map(|i| format!("X{i}")).collect();

    let mut net = Network::default();
    for r in &routers {
        net.topology.routers.insert(r.clone());
        net.asns.insert(r.clone(), INTERNAL_ASN);
    }
    for x in &externals {
        net.topology.externals.insert(x.clone());
        net.asns.insert(x.clone(), EXTERNAL_ASN);
    }
    let mut edges = Vec::new();
    for x in &externals {
        let r = routers.choose(rng).unwrap();
        edges.push(Edge::new(x.clone(), r.clone()));
        if rng.gen_bool(0.8) {
            edges.push(Edge::new(r.clone(), x.clone()));
        }
    }
    for (i, a) in routers.iter().enumerate() {
        for b in &routers[i + 1..] {
            let p: f64 = rng.gen();
            if p < 0.6 {
                edges.push(Edge::new(a.clone(), b.clone()));
                edges.push(Edge::new(b.clone(), a.clone()));
            } else if p < 0.8 {
                edges.push(Edge::new(a.clone(), b.clone()));
            }
        }
    }

    let ghost = rng.gen_bool(0.6);
    let mut ghosts = GhostSpec::default();
    if ghost {
        ghosts.declarations.push(GHOST.to_string());
        ghosts.origin_defaults = BTreeMap::from([(GHOST.to_string(), rng.gen_bool(0.5))]);
    }
    for e in &edges {
        net.topology.edges.insert(e.clone());
        if net.topology.is_internal(&e.dst) {
            net.policy.import_maps.insert(e.clone(), random_map(rng));
            if ghost {
                if let Some(eff) = random_effect(rng) {
                    ghosts
                        .import_effects
                        .insert((e.clone(), GHOST.to_string()), eff);
                }
            }
        }
        if net.topology.is_internal(&e.src) {
            net.policy.export_maps.insert(e.clone(), random_map(rng));
            if ghost {
                if let Some(eff) = random_effect(rng) {
                    ghosts
                        .export_effects
                        .insert((e.clone(), GHOST.to_string()), eff);
                }
            }
            if rng.gen_bool(0.3) {
                let mut r = random_route(rng, false);
                r.as_path.clear();
                net.policy.originate.insert(e.clone(), BTreeSet::from([r]));
            }
        }
    }
    net.ghosts = ghosts;
    net
}

/// Every route over the pools: prefixes, community subsets, local
/// preferences, MEDs, six short paths (300 is untracked) and both ghost
/// values. 2880 routes.
pub fn route_domain() -> Vec<Route> {
    let paths: [Vec<u32>; 6] = [
        vec![],
        vec![100],
        vec![200],
        vec![300],
        vec![200, 100],
        vec![100, 300],
    ];
    let mut out = Vec::new();
    for p in PREFIXES {
        for mask in 0..(1u32 << COMMUNITIES.len()) {
            let comms = COMMUNITIES
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| *c);
            for lp in LOCAL_PREFS {
                for med in MEDS {
                    for path in &paths {
                        for g in [false, true] {
                            let mut r = Route::new(prefix(p))
                                .with_communities(comms.clone())
                                .with_path(path.clone())
                                .with_ghost(GHOST, g);
                            r.local_pref = lp;
                            r.med = med;
                            out.push(r);
                        }
                    }
                }
            }
        }
    }
    out
}
