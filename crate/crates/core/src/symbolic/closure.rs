// SPDX-License-Identifier: Apache-2.0

use super::dfa::Dfa;
use super::engine::{DfaId, Engine, RouteSet};

impl Engine {
    /// Path closure used to keep fixpoint iteration finite.
    ///
    /// Paths of length at most `bound` are kept exactly. Longer paths are
    /// widened to every long path that no observer automaton (from any of its
    /// states) can tell apart from one already present. When the observers
    /// include every regex that later matches or tests the set, the widening
    /// is invisible to them and is stable under prepending.
    pub fn close_paths(&mut self, s: &RouteSet, bound: usize, observers: &[DfaId]) -> RouteSet {
        let mut obs = observers.to_vec();
        obs.sort();
        obs.dedup();
        let parts: Vec<_> = s.parts().to_vec();
        let mut out = Vec::with_capacity(parts.len());
        for (b, l) in parts {
            let key = (l, bound, obs.clone());
            let closed = match self.closure_cache.get(&key) {
                Some(&c) => c,
                None => {
                    let c = self.close_language(l, bound, &obs);
                    self.closure_cache.insert(key, c);
                    c
                }
            };
            out.push((b, closed));
        }
        // Regions are already disjoint; closing may merge languages.
        self.from_products(out)
    }

    fn close_language(&mut self, l: DfaId, bound: usize, obs: &[DfaId]) -> DfaId {
        let k = self.encoding().alphabet();
        let short = self.intern(Dfa::max_len(k, bound));
        let long_part = self.lang_diff(l, short);
        if self.dfa(long_part).is_empty() {
            return l;
        }
        let observers: Vec<Dfa> = obs.iter().map(|&o| (**self.dfa(o)).clone()).collect();
        let refs: Vec<&Dfa> = observers.iter().collect();
        let sat = self.dfa(long_part).saturate(&refs);
        let sat = self.intern(sat);
        let sat_long = self.lang_diff(sat, short);
        let short_part = self.lang_and(l, short);
        self.lang_or(short_part, sat_long)
    }
}
