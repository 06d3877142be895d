// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};

use crate::config::Universe;
use crate::model::{Asn, Community, Prefix, Route};

pub const ADDR: u32 = 0;
pub const LEN: u32 = 32;
pub const LOCAL_PREF: u32 = 38;
pub const MED: u32 = 70;
pub const NEXT_HOP: u32 = 102;
/// Number of bits before the first community bit.
pub const FIXED: u32 = 134;

/// Bit layout of a route over a fixed [`Universe`].
///
/// Variables in order: prefix address (32, most significant first), prefix
/// length (6), local preference (32), MED (32), next hop (32), one bit per
/// tracked community, one bit for any other community, one bit per ghost.
/// AS paths use the alphabet of tracked ASNs plus a final OTHER symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Encoding {
    universe: Universe,
}

impl Encoding {
    pub fn new(universe: Universe) -> Self {
        Self { universe }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn num_vars(&self) -> u32 {
        FIXED + self.universe.communities.len() as u32 + 1 + self.universe.ghost_names.len() as u32
    }

    pub fn community_bit(&self, c: &Community) -> Option<u32> {
        self.universe
            .communities
            .binary_search(c)
            .ok()
            .map(|i| FIXED + i as u32)
    }

    pub fn other_community_bit(&self) -> u32 {
        FIXED + self.universe.communities.len() as u32
    }

    /// All community bits, OTHER included.
    pub fn community_bits(&self) -> std::ops::RangeInclusive<u32> {
        FIXED..=self.other_community_bit()
    }

    pub fn ghost_bit(&self, name: &str) -> Option<u32> {
        self.universe
            .ghost_names
            .iter()
            .position(|g| g == name)
            .map(|i| self.other_community_bit() + 1 + i as u32)
    }

    pub fn ghost_names(&self) -> &[String] {
        &self.universe.ghost_names
    }

    /// Alphabet size: tracked ASNs plus OTHER.
    pub fn alphabet(&self) -> u32 {
        self.universe.asns.len() as u32 + 1
    }

    pub fn other_symbol(&self) -> u32 {
        self.universe.asns.len() as u32
    }

    pub fn tracked_symbol(&self, a: Asn) -> Option<u32> {
        self.universe.asns.binary_search(&a).ok().map(|i| i as u32)
    }

    pub fn symbol(&self, a: Asn) -> u32 {
        self.tracked_symbol(a)
            .unwrap_or_else(|| self.other_symbol())
    }

    pub fn word(&self, path: &[Asn]) -> Vec<u32> {
        path.iter().map(|&a| self.symbol(a)).collect()
    }

    /// Concrete ASN for a symbol; OTHER becomes [`Self::fresh_asn`].
    pub fn asn_of(&self, sym: u32) -> Asn {
        self.universe
            .asns
            .get(sym as usize)
            .copied()
            .unwrap_or_else(|| self.fresh_asn())
    }

    /// A fixed ASN outside the universe, used to render OTHER.
    pub fn fresh_asn(&self) -> Asn {
        (64512..)
            .find(|a| self.universe.asns.binary_search(a).is_err())
            .expect("universe cannot exhaust the ASN space")
    }

    /// A fixed community outside the universe, used to render OTHER.
    pub fn fresh_community(&self) -> Community {
        (0..=u16::MAX)
            .rev()
            .map(|b| Community(65535, b))
            .find(|c| self.universe.communities.binary_search(c).is_err())
            .expect("universe cannot exhaust the community space")
    }

    pub fn is_tracked_community(&self, c: &Community) -> bool {
        self.universe.communities.binary_search(c).is_ok()
    }

    /// Bit assignment of the non-path attributes of `r`.
    pub fn assignment(&self, r: &Route) -> Vec<bool> {
        let mut bits = vec![false; self.num_vars() as usize];
        put(&mut bits, ADDR, 32, r.prefix.address());
        put(&mut bits, LEN, 6, r.prefix.length() as u32);
        put(&mut bits, LOCAL_PREF, 32, r.local_pref);
        put(&mut bits, MED, 32, r.med);
        put(&mut bits, NEXT_HOP, 32, r.next_hop);
        for c in &r.communities {
            match self.community_bit(c) {
                Some(b) => bits[b as usize] = true,
                None => bits[self.other_community_bit() as usize] = true,
            }
        }
        for (g, &v) in &r.ghosts {
            if let Some(b) = self.ghost_bit(g) {
                bits[b as usize] = v;
            }
        }
        bits
    }

    /// Inverse of [`Self::assignment`] given an explicit path. Assignments
    /// must satisfy the validity constraint (canonical prefix).
    pub fn decode(&self, bits: &[bool], path: &[u32]) -> Route {
        let len = get(bits, LEN, 6).min(32) as u8;
        let prefix = Prefix::truncating(get(bits, ADDR, 32), len);
        let mut communities = BTreeSet::new();
        for (i, c) in self.universe.communities.iter().enumerate() {
            if bits[(FIXED + i as u32) as usize] {
                communities.insert(*c);
            }
        }
        if bits[self.other_community_bit() as usize] {
            communities.insert(self.fresh_community());
        }
        let ghosts: BTreeMap<String, bool> = self
            .universe
            .ghost_names
            .iter()
            .map(|g| (g.clone(), bits[self.ghost_bit(g).unwrap() as usize]))
            .collect();
        Route {
            prefix,
            as_path: path.iter().map(|&s| self.asn_of(s)).collect(),
            next_hop: get(bits, NEXT_HOP, 32),
            local_pref: get(bits, LOCAL_PREF, 32),
            med: get(bits, MED, 32),
            communities,
            ghosts,
        }
    }
}

fn put(bits: &mut [bool], offset: u32, width: u32, value: u32) {
    for i in 0..width {
        bits[(offset + i) as usize] = value >> (width - 1 - i) & 1 == 1;
    }
}

fn get(bits: &[bool], offset: u32, width: u32) -> u32 {
    (0..width).fold(0, |acc, i| acc << 1 | bits[(offset + i) as usize] as u32)
}
