// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::sync::Arc;

use rustc_hash::FxHashMap as HashMap;

use super::bdd::{Bdd, BddManager};
use super::dfa::Dfa;
use super::encoding::{Encoding, ADDR, LEN, LOCAL_PREF, MED};
use super::SymbolicError;
use crate::model::{AsPathRegex, CmpOp, Constraint, PredicateExpr, PrefixRange, Route};

/// Index of an interned automaton inside an [`Engine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DfaId(u32);

/// A set of routes: a partition of attribute space into disjoint regions,
/// each paired with the AS-path language allowed there.
///
/// Regions are nonempty and lie inside the valid domain; languages are
/// nonempty and pairwise distinct; parts are sorted by language. Two sets
/// built by the same engine are equal iff they denote the same routes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RouteSet {
    pub(crate) parts: Vec<(Bdd, DfaId)>,
}

impl RouteSet {
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[(Bdd, DfaId)] {
        &self.parts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum LangOp {
    And,
    Or,
    Diff,
}

/// Size statistics of a set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SetStats {
    pub parts: usize,
    pub bdd_nodes: usize,
    pub dfa_states: usize,
}

/// Owns the decision-diagram arena and the automaton table for one encoding.
///
/// Handles inside a [`RouteSet`] are only meaningful for the engine that
/// created them; use [`super::PortableSet`] to move sets between engines.
pub struct Engine {
    enc: Arc<Encoding>,
    pub(crate) bdd: BddManager,
    dfas: Vec<Arc<Dfa>>,
    dfa_ids: HashMap<Arc<Dfa>, DfaId>,
    lang_cache: HashMap<(LangOp, DfaId, DfaId), DfaId>,
    regex_cache: HashMap<AsPathRegex, DfaId>,
    pub(crate) closure_cache: HashMap<(DfaId, usize, Vec<DfaId>), DfaId>,
    valid: Bdd,
    empty_lang: DfaId,
    full_lang: DfaId,
}

impl Engine {
    pub fn new(enc: Arc<Encoding>) -> Self {
        let mut bdd = BddManager::new(enc.num_vars());
        let k = enc.alphabet();
        let valid = valid_domain(&mut bdd);
        let mut e = Engine {
            enc,
            bdd,
            dfas: Vec::new(),
            dfa_ids: HashMap::default(),
            lang_cache: HashMap::default(),
            regex_cache: HashMap::default(),
            closure_cache: HashMap::default(),
            valid,
            empty_lang: DfaId(0),
            full_lang: DfaId(0),
        };
        e.empty_lang = e.intern(Dfa::empty(k));
        e.full_lang = e.intern(Dfa::universal(k));
        e
    }

    pub fn encoding(&self) -> &Arc<Encoding> {
        &self.enc
    }

    pub fn intern(&mut self, d: Dfa) -> DfaId {
        if let Some(&id) = self.dfa_ids.get(&d) {
            return id;
        }
        let id = DfaId(self.dfas.len() as u32);
        let d = Arc::new(d);
        self.dfas.push(d.clone());
        self.dfa_ids.insert(d, id);
        id
    }

    pub fn dfa(&self, id: DfaId) -> &Arc<Dfa> {
        &self.dfas[id.0 as usize]
    }

    pub fn universal_language(&self) -> DfaId {
        self.full_lang
    }

    pub fn valid_domain(&self) -> Bdd {
        self.valid
    }

    pub fn empty(&self) -> RouteSet {
        RouteSet::default()
    }

    pub fn full(&self) -> RouteSet {
        RouteSet {
            parts: vec![(self.valid, self.full_lang)],
        }
    }

    /// The set `region × lang`, clipped to the valid domain.
    pub fn product(&mut self, region: Bdd, lang: DfaId) -> RouteSet {
        let region = self.bdd.and(region, self.valid);
        if region.is_false() || lang == self.empty_lang {
            return self.empty();
        }
        RouteSet {
            parts: vec![(region, lang)],
        }
    }

    /// Builds a canonical set from regions that are pairwise disjoint.
    fn build_disjoint(&mut self, parts: impl IntoIterator<Item = (Bdd, DfaId)>) -> RouteSet {
        let mut grouped: BTreeMap<DfaId, Bdd> = BTreeMap::new();
        for (b, l) in parts {
            if b.is_false() || l == self.empty_lang {
                continue;
            }
            let acc = grouped.entry(l).or_insert(Bdd::FALSE);
            *acc = self.bdd.or(*acc, b);
        }
        RouteSet {
            parts: grouped.into_iter().map(|(l, b)| (b, l)).collect(),
        }
    }

    /// Builds a canonical set from arbitrary (possibly overlapping) products.
    pub fn from_products(&mut self, parts: impl IntoIterator<Item = (Bdd, DfaId)>) -> RouteSet {
        let mut acc = self.empty();
        for (b, l) in parts {
            let single = self.product(b, l);
            acc = self.union(&acc, &single);
        }
        acc
    }

    fn cover(&mut self, s: &RouteSet) -> Bdd {
        let mut acc = Bdd::FALSE;
        for &(b, _) in &s.parts {
            acc = self.bdd.or(acc, b);
        }
        acc
    }

    fn lang_op(&mut self, op: LangOp, a: DfaId, b: DfaId) -> DfaId {
        let (e, f) = (self.empty_lang, self.full_lang);
        match op {
            LangOp::And if a == e || b == e => return e,
            LangOp::And if a == f => return b,
            LangOp::And if b == f || a == b => return a,
            LangOp::Or if a == f || b == f => return f,
            LangOp::Or if a == e => return b,
            LangOp::Or if b == e || a == b => return a,
            LangOp::Diff if a == e || b == f || a == b => return e,
            LangOp::Diff if b == e => return a,
            _ => {}
        }
        if let Some(&r) = self.lang_cache.get(&(op, a, b)) {
            return r;
        }
        let (da, db) = (self.dfa(a).clone(), self.dfa(b).clone());
        let d = match op {
            LangOp::And => da.intersect(&db),
            LangOp::Or => da.union(&db),
            LangOp::Diff => da.difference(&db),
        };
        let r = self.intern(d);
        self.lang_cache.insert((op, a, b), r);
        r
    }

    pub fn lang_and(&mut self, a: DfaId, b: DfaId) -> DfaId {
        self.lang_op(LangOp::And, a, b)
    }

    pub fn lang_or(&mut self, a: DfaId, b: DfaId) -> DfaId {
        self.lang_op(LangOp::Or, a, b)
    }

    pub fn lang_diff(&mut self, a: DfaId, b: DfaId) -> DfaId {
        self.lang_op(LangOp::Diff, a, b)
    }

    fn combine(&mut self, a: &RouteSet, b: &RouteSet, op: LangOp) -> RouteSet {
        let cover_a = self.cover(a);
        let cover_b = self.cover(b);
        let mut parts = Vec::new();
        for &(ba, la) in &a.parts {
            for &(bb, lb) in &b.parts {
                let r = self.bdd.and(ba, bb);
                if !r.is_false() {
                    parts.push((r, self.lang_op(op, la, lb)));
                }
            }
            let r = self.bdd.diff(ba, cover_b);
            if !r.is_false() {
                parts.push((r, self.lang_op(op, la, self.empty_lang)));
            }
        }
        for &(bb, lb) in &b.parts {
            let r = self.bdd.diff(bb, cover_a);
            if !r.is_false() {
                parts.push((r, self.lang_op(op, self.empty_lang, lb)));
            }
        }
        self.build_disjoint(parts)
    }

    pub fn union(&mut self, a: &RouteSet, b: &RouteSet) -> RouteSet {
        if a.is_empty() {
            return b.clone();
        }
        if b.is_empty() || a == b {
            return a.clone();
        }
        self.combine(a, b, LangOp::Or)
    }

    pub fn intersect(&mut self, a: &RouteSet, b: &RouteSet) -> RouteSet {
        if a.is_empty() || b.is_empty() {
            return self.empty();
        }
        if a == b {
            return a.clone();
        }
        self.combine(a, b, LangOp::And)
    }

    /// `a \ b`
    pub fn difference(&mut self, a: &RouteSet, b: &RouteSet) -> RouteSet {
        if a.is_empty() || b.is_empty() {
            return a.clone();
        }
        if a == b {
            return self.empty();
        }
        self.combine(a, b, LangOp::Diff)
    }

    /// Complement relative to all valid routes.
    pub fn complement(&mut self, a: &RouteSet) -> RouteSet {
        let full = self.full();
        self.difference(&full, a)
    }

    pub fn is_subset(&mut self, a: &RouteSet, b: &RouteSet) -> bool {
        self.difference(a, b).is_empty()
    }

    /// `None` when `a ⊆ b`, otherwise a deterministic route in `a \ b`.
    pub fn subset_witness(&mut self, a: &RouteSet, b: &RouteSet) -> Option<Route> {
        let d = self.difference(a, b);
        self.witness(&d)
    }

    /// The route whose attribute assignment is lexicographically least,
    /// carrying the shortest (then lexicographically least) allowed path.
    pub fn witness(&mut self, s: &RouteSet) -> Option<Route> {
        if s.is_empty() {
            return None;
        }
        let cover = self.cover(s);
        let bits = self.bdd.least_sat(cover)?;
        let &(_, lang) = s
            .parts
            .iter()
            .find(|(b, _)| self.bdd.eval(*b, &bits))
            .expect("assignment lies in some region");
        let word = self
            .dfa(lang)
            .shortest_word()
            .expect("languages in a set are nonempty");
        Some(self.enc.decode(&bits, &word))
    }

    pub fn contains(&self, s: &RouteSet, r: &Route) -> bool {
        let bits = self.enc.assignment(r);
        let word = self.enc.word(&r.as_path);
        s.parts
            .iter()
            .find(|(b, _)| self.bdd.eval(*b, &bits))
            .is_some_and(|&(_, l)| self.dfa(l).accepts(&word))
    }

    pub fn stats(&self, s: &RouteSet) -> SetStats {
        let mut nodes = 0;
        let mut states = 0;
        for &(b, l) in &s.parts {
            nodes += self.bdd.node_count(b);
            states += self.dfa(l).num_states();
        }
        SetStats {
            parts: s.parts.len(),
            bdd_nodes: nodes,
            dfa_states: states,
        }
    }

    /// Conjunction of literals fixing every non-path bit to the value in `r`.
    pub fn route_cube(&mut self, r: &Route) -> Bdd {
        let lits: Vec<(u32, bool)> = self
            .enc
            .assignment(r)
            .into_iter()
            .enumerate()
            .map(|(i, v)| (i as u32, v))
            .collect();
        self.bdd.cube(&lits)
    }

    pub fn word_language(&mut self, word: &[u32]) -> DfaId {
        let d = Dfa::word(self.enc.alphabet(), word);
        self.intern(d)
    }

    pub fn encode_route(&mut self, r: &Route) -> RouteSet {
        let cube = self.route_cube(r);
        let word = self.enc.word(&r.as_path);
        let lang = self.word_language(&word);
        self.product(cube, lang)
    }

    pub fn encode_routes<'a>(&mut self, rs: impl IntoIterator<Item = &'a Route>) -> RouteSet {
        let mut acc = self.empty();
        for r in rs {
            let s = self.encode_route(r);
            acc = self.union(&acc, &s);
        }
        acc
    }

    pub fn regex_language(&mut self, rx: &AsPathRegex) -> Result<DfaId, SymbolicError> {
        if let Some(&id) = self.regex_cache.get(rx) {
            return Ok(id);
        }
        for a in rx.literals() {
            if self.enc.tracked_symbol(a).is_none() {
                return Err(SymbolicError::UntrackedAsn(a));
            }
        }
        let enc = self.enc.clone();
        let d = Dfa::from_regex(enc.alphabet(), rx.root(), &|a| enc.symbol(a));
        let id = self.intern(d);
        self.regex_cache.insert(rx.clone(), id);
        Ok(id)
    }

    /// Unsigned comparison of the 32-bit field at `offset` against `value`.
    pub fn compare(&mut self, offset: u32, op: CmpOp, value: u32) -> Bdd {
        match op {
            CmpOp::Lt => self.less(offset, value, false),
            CmpOp::Le => self.less(offset, value, true),
            CmpOp::Gt => {
                let le = self.less(offset, value, true);
                self.bdd.not(le)
            }
            CmpOp::Ge => {
                let lt = self.less(offset, value, false);
                self.bdd.not(lt)
            }
            CmpOp::Eq => self.field_equals(offset, 32, value),
            CmpOp::Ne => {
                let eq = self.field_equals(offset, 32, value);
                self.bdd.not(eq)
            }
        }
    }

    fn less(&mut self, offset: u32, value: u32, or_equal: bool) -> Bdd {
        // Built from the least significant bit upwards so every `mk` sits
        // above its children.
        let mut acc = if or_equal { Bdd::TRUE } else { Bdd::FALSE };
        for i in (0..32).rev() {
            let var = offset + i;
            let bit = value >> (31 - i) & 1 == 1;
            acc = if bit {
                self.bdd.mk(var, Bdd::TRUE, acc)
            } else {
                self.bdd.mk(var, acc, Bdd::FALSE)
            };
        }
        acc
    }

    pub fn field_equals(&mut self, offset: u32, width: u32, value: u32) -> Bdd {
        let lits: Vec<(u32, bool)> = (0..width)
            .map(|i| (offset + i, value >> (width - 1 - i) & 1 == 1))
            .collect();
        self.bdd.cube(&lits)
    }

    pub fn prefix_range(&mut self, r: &PrefixRange) -> Bdd {
        let mut len = Bdd::FALSE;
        for l in r.ge..=r.le {
            let eq = self.field_equals(LEN, 6, l as u32);
            len = self.bdd.or(len, eq);
        }
        let plen = r.prefix.length() as u32;
        let lits: Vec<(u32, bool)> = (0..plen)
            .map(|i| (ADDR + i, r.prefix.address() >> (31 - i) & 1 == 1))
            .collect();
        let net = self.bdd.cube(&lits);
        self.bdd.and(len, net)
    }

    pub fn encode_predicate(&mut self, p: &PredicateExpr) -> Result<RouteSet, SymbolicError> {
        Ok(match p {
            PredicateExpr::True => self.full(),
            PredicateExpr::False => self.empty(),
            PredicateExpr::Community(c) => {
                let bit = self
                    .enc
                    .community_bit(c)
                    .ok_or(SymbolicError::UntrackedCommunity(*c))?;
                let v = self.bdd.var(bit);
                self.product(v, self.full_lang)
            }
            PredicateExpr::PrefixIn(r) => {
                let b = self.prefix_range(r);
                self.product(b, self.full_lang)
            }
            PredicateExpr::LocalPref(op, v) => {
                let b = self.compare(LOCAL_PREF, *op, *v);
                self.product(b, self.full_lang)
            }
            PredicateExpr::Med(op, v) => {
                let b = self.compare(MED, *op, *v);
                self.product(b, self.full_lang)
            }
            PredicateExpr::Ghost(g) => {
                let bit = self
                    .enc
                    .ghost_bit(g)
                    .ok_or_else(|| SymbolicError::UndeclaredGhost(g.clone()))?;
                let v = self.bdd.var(bit);
                self.product(v, self.full_lang)
            }
            PredicateExpr::AsPathMatches(rx) => {
                let l = self.regex_language(rx)?;
                let v = self.valid;
                self.product(v, l)
            }
            PredicateExpr::Not(a) => {
                let a = self.encode_predicate(a)?;
                self.complement(&a)
            }
            PredicateExpr::And(a, b) => {
                let a = self.encode_predicate(a)?;
                let b = self.encode_predicate(b)?;
                self.intersect(&a, &b)
            }
            PredicateExpr::Or(a, b) => {
                let a = self.encode_predicate(a)?;
                let b = self.encode_predicate(b)?;
                self.union(&a, &b)
            }
            PredicateExpr::Implies(a, b) => {
                let a = self.encode_predicate(a)?;
                let na = self.complement(&a);
                let b = self.encode_predicate(b)?;
                self.union(&na, &b)
            }
        })
    }

    pub fn encode_constraint(&mut self, c: &Constraint) -> Result<RouteSet, SymbolicError> {
        match c {
            Constraint::Pred(p) => self.encode_predicate(p),
            Constraint::Symbolic(s) => self.import(s),
        }
    }

    /// Applies `f` to every (region, language) part and rebuilds the set.
    pub fn map_parts(
        &mut self,
        s: &RouteSet,
        mut f: impl FnMut(&mut Engine, Bdd, DfaId) -> (Bdd, DfaId),
    ) -> RouteSet {
        let mapped: Vec<(Bdd, DfaId)> = s.parts.iter().map(|&(b, l)| f(self, b, l)).collect();
        self.from_products(mapped)
    }

    /// Existentially quantifies `vars`, then conjoins `constraint`.
    pub fn overwrite(&mut self, b: Bdd, vars: &[u32], constraint: Bdd) -> Bdd {
        let mut mask = vec![false; self.enc.num_vars() as usize];
        for &v in vars {
            mask[v as usize] = true;
        }
        let q = self.bdd.exists(b, &mask);
        self.bdd.and(q, constraint)
    }

    /// Restricts every region to routes whose bits outside `free` equal those
    /// of `r`.
    pub fn cube_except(&mut self, r: &Route, free: &[bool]) -> Bdd {
        let lits: Vec<(u32, bool)> = self
            .enc
            .assignment(r)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !free[*i])
            .map(|(i, v)| (i as u32, v))
            .collect();
        self.bdd.cube(&lits)
    }
}

/// Canonical prefixes: length at most 32 and no address bits past it.
///
/// Built bottom-up: after the address bits the only state that matters is
/// the position just past the last set bit, which the length must reach.
fn valid_domain(m: &mut BddManager) -> Bdd {
    let lens: Vec<Bdd> = (0..=32).map(|lo| len_between(m, 0, 0, lo, 32)).collect();
    let mut level = lens;
    for i in (0..32u32).rev() {
        let hi = level[i as usize + 1];
        level = (0..=i as usize)
            .map(|s| m.mk(ADDR + i, level[s], hi))
            .collect();
    }
    level[0]
}

/// Length bits from `bit` on, given the value `acc` of the bits above, lie in `[lo, hi]`.
fn len_between(m: &mut BddManager, bit: u32, acc: u32, lo: u32, hi: u32) -> Bdd {
    let rest = 6 - bit;
    let (min, max) = (acc << rest, (acc << rest) | ((1 << rest) - 1));
    if min >= lo && max <= hi {
        return Bdd::TRUE;
    }
    if max < lo || min > hi {
        return Bdd::FALSE;
    }
    let l = len_between(m, bit + 1, acc << 1, lo, hi);
    let h = len_between(m, bit + 1, (acc << 1) | 1, lo, hi);
    m.mk(LEN + bit, l, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_domain_matches_cube_definition() {
        let mut m = BddManager::new(40);
        let fast = valid_domain(&mut m);
        let mut slow = Bdd::FALSE;
        for l in 0..=32u32 {
            let mut lits: Vec<(u32, bool)> =
                (0..6).map(|i| (LEN + i, l >> (5 - i) & 1 == 1)).collect();
            lits.extend((l..32).map(|i| (ADDR + i, false)));
            let c = m.cube(&lits);
            slow = m.or(slow, c);
        }
        assert_eq!(fast, slow);
    }
}
