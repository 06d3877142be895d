// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Spec;
use crate::model::{Asn, Community, Constraint, Network, PredicateExpr, Route};

/// The literals the symbolic encoding tracks individually. Everything else
/// collapses into one OTHER community bit and one OTHER path symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Universe {
    pub communities: Vec<Community>,
    pub asns: Vec<Asn>,
    pub ghost_names: Vec<String>,
}

#[derive(Default)]
pub struct UniverseBuilder {
    communities: BTreeSet<Community>,
    asns: BTreeSet<Asn>,
    ghosts: BTreeSet<String>,
}

impl UniverseBuilder {
    pub fn network(mut self, net: &Network) -> Self {
        self.asns.extend(net.asns.values().copied());
        for map in net
            .policy
            .import_maps
            .values()
            .chain(net.policy.export_maps.values())
        {
            self.communities.extend(map.communities());
            self.asns.extend(map.asns());
        }
        for r in net.policy.originate.values().flatten() {
            self = self.routes(r);
        }
        self.ghosts.extend(net.ghosts.declarations.iter().cloned());
        self
    }

    pub fn routes(mut self, r: &Route) -> Self {
        self.communities.extend(r.communities.iter().copied());
        self.asns.extend(r.as_path.iter().copied());
        self
    }

    pub fn predicate(mut self, p: &PredicateExpr) -> Self {
        self.communities.extend(p.communities());
        self.asns.extend(p.asns());
        self.ghosts.extend(p.ghosts());
        self
    }

    /// Symbolic constraints contribute the universe they were built over.
    pub fn constraint(self, c: &Constraint) -> Self {
        match c {
            Constraint::Pred(p) => self.predicate(p),
            Constraint::Symbolic(s) => self.universe(s.encoding().universe()),
        }
    }

    pub fn universe(mut self, u: &Universe) -> Self {
        self.communities.extend(u.communities.iter().copied());
        self.asns.extend(u.asns.iter().copied());
        self.ghosts.extend(u.ghost_names.iter().cloned());
        self
    }

    pub fn build(self) -> Universe {
        Universe {
            communities: self.communities.into_iter().collect(),
            asns: self.asns.into_iter().collect(),
            ghost_names: self.ghosts.into_iter().collect(),
        }
    }
}

impl Universe {
    pub fn builder() -> UniverseBuilder {
        UniverseBuilder::default()
    }
}

/// Every literal of the network, the property and the invariants.
pub fn compute_universe(net: &Network, spec: &Spec) -> Universe {
    let mut b = Universe::builder()
        .network(net)
        .predicate(&spec.property.pred);
    for c in spec.invariants.entries.values() {
        b = b.constraint(c);
    }
    b.build()
}
