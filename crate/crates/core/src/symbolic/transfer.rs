// SPDX-License-Identifier: Apache-2.0

use super::bdd::Bdd;
use super::encoding::{LOCAL_PREF, MED, NEXT_HOP};
use super::engine::{DfaId, Engine, RouteSet};
use super::SymbolicError;
use crate::model::{Disposition, Effect, MatchClause, Route, RouteMap, SetAction, Term};

/// Routes handled by one permit term and what they became.
#[derive(Clone, Debug)]
pub struct TermImage {
    pub term: usize,
    pub matched: RouteSet,
    pub image: RouteSet,
}

#[derive(Clone, Debug)]
pub struct TransferResult {
    pub output: RouteSet,
    pub terms: Vec<TermImage>,
}

impl Engine {
    /// Routes matching every clause of `term`.
    pub fn match_set(&mut self, term: &Term) -> Result<RouteSet, SymbolicError> {
        let mut cond = Bdd::TRUE;
        let mut lang = self.universal_language();
        for m in &term.matches {
            let b = match m {
                MatchClause::PrefixList(entries) => {
                    let mut any = Bdd::FALSE;
                    for e in entries {
                        let r = self.prefix_range(e);
                        any = self.bdd.or(any, r);
                    }
                    any
                }
                MatchClause::CommunityPresent(c) | MatchClause::CommunityAbsent(c) => {
                    let bit = self
                        .encoding()
                        .community_bit(c)
                        .ok_or(SymbolicError::UntrackedCommunity(*c))?;
                    let present = matches!(m, MatchClause::CommunityPresent(_));
                    self.bdd.literal(bit, present)
                }
                MatchClause::LocalPref(c) => self.compare(LOCAL_PREF, c.cmp, c.value),
                MatchClause::Med(c) => self.compare(MED, c.cmp, c.value),
                MatchClause::AsPath(rx) => {
                    let l = self.regex_language(rx)?;
                    lang = self.lang_and(lang, l);
                    Bdd::TRUE
                }
            };
            cond = self.bdd.and(cond, b);
        }
        Ok(self.product(cond, lang))
    }

    fn ghost_bits(&self, effects: &[(&str, Effect)]) -> Result<Vec<(u32, bool)>, SymbolicError> {
        effects
            .iter()
            .filter_map(|&(g, e)| match e {
                Effect::Preserve => None,
                e => Some((g, e == Effect::SetTrue)),
            })
            .map(|(g, v)| {
                self.encoding()
                    .ghost_bit(g)
                    .map(|b| (b, v))
                    .ok_or_else(|| SymbolicError::UndeclaredGhost(g.to_string()))
            })
            .collect()
    }

    fn apply_actions(
        &mut self,
        sets: &[SetAction],
        ghosts: &[(u32, bool)],
        mut b: Bdd,
        mut l: DfaId,
    ) -> Result<(Bdd, DfaId), SymbolicError> {
        for s in sets {
            match s {
                SetAction::AddCommunity(c) | SetAction::DeleteCommunity(c) => {
                    let bit = self
                        .encoding()
                        .community_bit(c)
                        .ok_or(SymbolicError::UntrackedCommunity(*c))?;
                    let lit = self
                        .bdd
                        .literal(bit, matches!(s, SetAction::AddCommunity(_)));
                    b = self.overwrite(b, &[bit], lit);
                }
                SetAction::DeleteAllCommunities => {
                    let bits: Vec<u32> = self.encoding().community_bits().collect();
                    let lits: Vec<(u32, bool)> = bits.iter().map(|&v| (v, false)).collect();
                    let none = self.bdd.cube(&lits);
                    b = self.overwrite(b, &bits, none);
                }
                SetAction::SetLocalPref(v) => b = self.set_field(b, LOCAL_PREF, *v),
                SetAction::SetMed(v) => b = self.set_field(b, MED, *v),
                SetAction::SetNextHop(ip) => b = self.set_field(b, NEXT_HOP, u32::from(*ip)),
                SetAction::Prepend(a) => {
                    let sym = self
                        .encoding()
                        .tracked_symbol(*a)
                        .ok_or(SymbolicError::UntrackedAsn(*a))?;
                    let d = self.dfa(l).prepend(sym);
                    l = self.intern(d);
                }
            }
        }
        for &(bit, v) in ghosts {
            let lit = self.bdd.literal(bit, v);
            b = self.overwrite(b, &[bit], lit);
        }
        Ok((b, l))
    }

    fn set_field(&mut self, b: Bdd, offset: u32, value: u32) -> Bdd {
        let vars: Vec<u32> = (offset..offset + 32).collect();
        let eq = self.field_equals(offset, 32, value);
        self.overwrite(b, &vars, eq)
    }

    /// Image of `input` under `map` followed by the ghost `effects`, with the
    /// per-term breakdown kept for pre-image queries.
    pub fn transfer(
        &mut self,
        map: &RouteMap,
        effects: &[(&str, Effect)],
        input: &RouteSet,
    ) -> Result<TransferResult, SymbolicError> {
        let ghosts = self.ghost_bits(effects)?;
        let mut remaining = input.clone();
        let mut output = self.empty();
        let mut terms = Vec::new();
        for (i, term) in map.terms.iter().enumerate() {
            if remaining.is_empty() {
                break;
            }
            let m = self.match_set(term)?;
            let matched = self.intersect(&remaining, &m);
            remaining = self.difference(&remaining, &m);
            if term.action == Disposition::Deny || matched.is_empty() {
                continue;
            }
            let mut mapped = Vec::with_capacity(matched.parts.len());
            for &(b, l) in &matched.parts {
                mapped.push(self.apply_actions(&term.sets, &ghosts, b, l)?);
            }
            let image = self.from_products(mapped);
            output = self.union(&output, &image);
            terms.push(TermImage {
                term: i,
                matched,
                image,
            });
        }
        Ok(TransferResult { output, terms })
    }

    /// Routes in `matched` that `term` (plus `effects`) sends to exactly `post`.
    pub fn preimage(
        &mut self,
        term: &Term,
        effects: &[(&str, Effect)],
        matched: &RouteSet,
        post: &Route,
    ) -> Result<RouteSet, SymbolicError> {
        let n = self.encoding().num_vars() as usize;
        let mut free = vec![false; n];
        let mut prepends = 0;
        for s in &term.sets {
            match s {
                SetAction::AddCommunity(c) | SetAction::DeleteCommunity(c) => {
                    if let Some(bit) = self.encoding().community_bit(c) {
                        free[bit as usize] = true;
                    }
                }
                SetAction::DeleteAllCommunities => {
                    for bit in self.encoding().community_bits() {
                        free[bit as usize] = true;
                    }
                }
                SetAction::SetLocalPref(_) => free[LOCAL_PREF as usize..][..32].fill(true),
                SetAction::SetMed(_) => free[MED as usize..][..32].fill(true),
                SetAction::SetNextHop(_) => free[NEXT_HOP as usize..][..32].fill(true),
                SetAction::Prepend(_) => prepends += 1,
            }
        }
        for (bit, _) in self.ghost_bits(effects)? {
            free[bit as usize] = true;
        }
        let cube = self.cube_except(post, &free);
        let word = self.encoding().word(&post.as_path);
        if word.len() < prepends {
            return Ok(self.empty());
        }
        let lang = self.word_language(&word[prepends..]);
        let candidates = self.product(cube, lang);
        Ok(self.intersect(&candidates, matched))
    }
}
