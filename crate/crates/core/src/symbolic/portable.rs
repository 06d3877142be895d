// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::sync::Arc;

use super::bdd::{Bdd, BddImage};
use super::dfa::Dfa;
use super::encoding::{Encoding, FIXED};
use super::engine::{Engine, RouteSet};
use super::SymbolicError;
use crate::model::Route;

/// A route set detached from any engine.
///
/// Parts are sorted by automaton, so equal sets over the same encoding are
/// structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PortableSet {
    encoding: Arc<Encoding>,
    parts: Vec<(BddImage, Dfa)>,
}

impl PortableSet {
    pub fn encoding(&self) -> &Arc<Encoding> {
        &self.encoding
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, r: &Route) -> bool {
        let bits = self.encoding.assignment(r);
        let word = self.encoding.word(&r.as_path);
        self.parts
            .iter()
            .find(|(b, _)| b.eval(&bits))
            .is_some_and(|(_, d)| d.accepts(&word))
    }

    /// Canonical text form, stable across runs; used for hashing.
    pub fn fingerprint(&self) -> String {
        let u = self.encoding.universe();
        let mut s = format!("{u:?}");
        for (b, d) in &self.parts {
            s.push_str(&format!(
                "|{}:{:?}|{}:{:?}",
                b.root,
                b.nodes,
                d.alphabet(),
                d
            ));
        }
        s
    }

    pub fn summary(&self) -> Summary {
        Summary {
            parts: self.parts.len(),
            nodes: self.parts.iter().map(|(b, _)| b.nodes.len()).sum(),
            states: self.parts.iter().map(|(_, d)| d.num_states()).sum(),
        }
    }
}

pub struct Summary {
    parts: usize,
    nodes: usize,
    states: usize,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} parts, {} diagram nodes, {} automaton states",
            self.parts, self.nodes, self.states
        )
    }
}

impl Engine {
    pub fn export(&self, s: &RouteSet) -> PortableSet {
        let mut parts: Vec<(BddImage, Dfa)> = s
            .parts
            .iter()
            .map(|&(b, l)| (self.bdd.export(b), (**self.dfa(l)).clone()))
            .collect();
        parts.sort_by(|a, b| a.1.cmp(&b.1));
        PortableSet {
            encoding: self.encoding().clone(),
            parts,
        }
    }

    /// Loads a set exported from an engine whose universe is contained in
    /// this one's. Literals untracked there but tracked here are folded into
    /// the OTHER community bit and the OTHER path symbol.
    pub fn import(&mut self, p: &PortableSet) -> Result<RouteSet, SymbolicError> {
        if p.encoding == *self.encoding() {
            let parts: Vec<(Bdd, _)> = p
                .parts
                .iter()
                .map(|(img, d)| {
                    let b = self.bdd.import(img);
                    (b, self.intern(d.clone()))
                })
                .collect();
            return Ok(self.from_products(parts));
        }
        let src = p.encoding.universe();
        let dst = self.encoding().universe().clone();
        let subset = src
            .communities
            .iter()
            .all(|c| dst.communities.binary_search(c).is_ok())
            && src.asns.iter().all(|a| dst.asns.binary_search(a).is_ok())
            && src.ghost_names.iter().all(|g| dst.ghost_names.contains(g));
        if !subset {
            return Err(SymbolicError::IncompatibleUniverse);
        }
        let enc = self.encoding().clone();
        // Image of every source variable as a function over this encoding.
        let n = p.encoding.num_vars();
        let mut var_fn = Vec::with_capacity(n as usize);
        for v in 0..n {
            let f = if v < FIXED {
                self.bdd.var(v)
            } else if v < p.encoding.other_community_bit() {
                let c = src.communities[(v - FIXED) as usize];
                self.bdd.var(enc.community_bit(&c).unwrap())
            } else if v == p.encoding.other_community_bit() {
                let mut acc = self.bdd.var(enc.other_community_bit());
                for c in &dst.communities {
                    if src.communities.binary_search(c).is_err() {
                        let x = self.bdd.var(enc.community_bit(c).unwrap());
                        acc = self.bdd.or(acc, x);
                    }
                }
                acc
            } else {
                let g = &src.ghost_names[(v - p.encoding.other_community_bit() - 1) as usize];
                self.bdd.var(enc.ghost_bit(g).unwrap())
            };
            var_fn.push(f);
        }
        let k = enc.alphabet();
        let sym_map: Vec<u32> = (0..k)
            .map(|s| {
                dst.asns
                    .get(s as usize)
                    .map_or(p.encoding.other_symbol(), |&a| p.encoding.symbol(a))
            })
            .collect();
        let mut parts = Vec::new();
        for (img, d) in &p.parts {
            let mut map: Vec<Bdd> = vec![Bdd::FALSE, Bdd::TRUE];
            for &(var, lo, hi) in &img.nodes {
                let b = self
                    .bdd
                    .ite(var_fn[var as usize], map[hi as usize], map[lo as usize]);
                map.push(b);
            }
            let b = map[img.root as usize];
            let l = self.intern(d.remap(k, &sym_map));
            parts.push((b, l));
        }
        Ok(self.from_products(parts))
    }
}
