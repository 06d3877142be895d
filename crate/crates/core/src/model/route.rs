// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::net::Ipv4Addr;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// An IPv4 prefix in canonical form: host bits below the mask are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prefix {
    address: u32,
    length: u8,
}

impl Prefix {
    pub fn new(address: u32, length: u8) -> Result<Self, ModelError> {
        if length > 32 {
            return Err(ModelError::PrefixLength(length));
        }
        if address & !mask(length) != 0 {
            return Err(ModelError::NonCanonicalPrefix(
                Ipv4Addr::from(address).to_string(),
                length,
            ));
        }
        Ok(Self { address, length })
    }

    /// Builds a prefix, zeroing any host bits.
    pub fn truncating(address: u32, length: u8) -> Self {
        let length = length.min(32);
        Self {
            address: address & mask(length),
            length,
        }
    }

    pub fn address(&self) -> u32 {
        self.address
    }

    pub fn length(&self) -> u8 {
        self.length
    }

    /// True when `other` lies inside this prefix (same network bits, at least as long).
    pub fn covers(&self, other: &Prefix) -> bool {
        other.length >= self.length && other.address & mask(self.length) == self.address
    }
}

/// Netmask with the top `length` bits set.
pub fn mask(length: u8) -> u32 {
    match length {
        0 => 0,
        l if l >= 32 => u32::MAX,
        l => u32::MAX << (32 - l),
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", Ipv4Addr::from(self.address), self.length)
    }
}

impl FromStr for Prefix {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (addr, len) = s
            .split_once('/')
            .ok_or_else(|| ModelError::BadPrefix(s.to_string()))?;
        let addr: Ipv4Addr = addr
            .trim()
            .parse()
            .map_err(|_| ModelError::BadPrefix(s.to_string()))?;
        let len: u8 = len
            .trim()
            .parse()
            .map_err(|_| ModelError::BadPrefix(s.to_string()))?;
        Prefix::new(u32::from(addr), len)
    }
}

impl Serialize for Prefix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Prefix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A prefix-list entry: prefixes covered by `prefix` whose length lies in `[ge, le]`.
///
/// Without explicit bounds the entry matches the exact prefix only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrefixRange {
    pub prefix: Prefix,
    pub ge: u8,
    pub le: u8,
}

impl PrefixRange {
    pub fn exact(prefix: Prefix) -> Self {
        Self {
            prefix,
            ge: prefix.length(),
            le: prefix.length(),
        }
    }

    pub fn new(prefix: Prefix, ge: Option<u8>, le: Option<u8>) -> Result<Self, ModelError> {
        let base = prefix.length();
        let (ge, le) = match (ge, le) {
            (None, None) => (base, base),
            (Some(g), None) => (g, 32),
            (None, Some(l)) => (base, l),
            (Some(g), Some(l)) => (g, l),
        };
        if !(base <= ge && ge <= le && le <= 32) {
            return Err(ModelError::BadPrefixRange(prefix.to_string(), ge, le));
        }
        Ok(Self { prefix, ge, le })
    }

    pub fn contains(&self, p: &Prefix) -> bool {
        self.ge <= p.length() && p.length() <= self.le && self.prefix.covers(p)
    }
}

impl fmt::Display for PrefixRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefix)?;
        let base = self.prefix.length();
        if self.ge == base && self.le == base {
            return Ok(());
        }
        if self.ge != base {
            write!(f, " ge {}", self.ge)?;
        }
        if self.le != 32 || self.ge == base {
            write!(f, " le {}", self.le)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PrefixRangeDoc {
    prefix: Prefix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ge: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    le: Option<u8>,
}

impl Serialize for PrefixRange {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let base = self.prefix.length();
        let exact = self.ge == base && self.le == base;
        PrefixRangeDoc {
            prefix: self.prefix,
            ge: (!exact && self.ge != base).then_some(self.ge),
            le: (!exact).then_some(self.le),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrefixRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = PrefixRangeDoc::deserialize(d)?;
        PrefixRange::new(doc.prefix, doc.ge, doc.le).map_err(serde::de::Error::custom)
    }
}

/// A BGP standard community, written `A:B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Community(pub u16, pub u16);

impl fmt::Display for Community {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0, self.1)
    }
}

impl FromStr for Community {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::BadCommunity(s.to_string());
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        Ok(Community(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ))
    }
}

impl Serialize for Community {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Community {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type Asn = u32;

/// A route announcement plus its ghost attributes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Route {
    pub prefix: Prefix,
    pub as_path: Vec<Asn>,
    pub next_hop: u32,
    pub local_pref: u32,
    pub med: u32,
    pub communities: BTreeSet<Community>,
    pub ghosts: BTreeMap<String, bool>,
}

impl Route {
    /// A route for `prefix` with every other attribute zeroed.
    pub fn new(prefix: Prefix) -> Self {
        Self {
            prefix,
            as_path: Vec::new(),
            next_hop: 0,
            local_pref: 0,
            med: 0,
            communities: BTreeSet::new(),
            ghosts: BTreeMap::new(),
        }
    }

    pub fn with_communities<I: IntoIterator<Item = Community>>(mut self, comms: I) -> Self {
        self.communities.extend(comms);
        self
    }

    pub fn with_path(mut self, path: Vec<Asn>) -> Self {
        self.as_path = path;
        self
    }

    pub fn with_ghost(mut self, name: &str, value: bool) -> Self {
        self.ghosts.insert(name.to_string(), value);
        self
    }

    pub fn ghost(&self, name: &str) -> Option<bool> {
        self.ghosts.get(name).copied()
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} path [", self.prefix)?;
        for (i, a) in self.as_path.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        write!(
            f,
            "] nh {} lp {} med {} comm {{",
            Ipv4Addr::from(self.next_hop),
            self.local_pref,
            self.med
        )?;
        for (i, c) in self.communities.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")?;
        for (g, v) in &self.ghosts {
            write!(f, " {g}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_parse_and_canonical_form() {
        let p: Prefix = "10.0.0.0/8".parse().unwrap();
        assert_eq!(p.address(), 0x0a00_0000);
        assert_eq!(p.length(), 8);
        assert!("10.0.0.1/8".parse::<Prefix>().is_err());
        assert!("10.0.0.0/33".parse::<Prefix>().is_err());
        assert_eq!(Prefix::truncating(0x0a01_0203, 8), p);
        assert_eq!(
            "0.0.0.0/0".parse::<Prefix>().unwrap().to_string(),
            "0.0.0.0/0"
        );
    }

    #[test]
    fn prefix_range_bounds() {
        let base: Prefix = "10.0.0.0/8".parse().unwrap();
        let exact = PrefixRange::new(base, None, None).unwrap();
        assert!(exact.contains(&base));
        assert!(!exact.contains(&"10.1.0.0/16".parse().unwrap()));

        let r = PrefixRange::new(base, Some(16), Some(24)).unwrap();
        assert!(r.contains(&"10.1.0.0/16".parse().unwrap()));
        assert!(r.contains(&"10.1.2.0/24".parse().unwrap()));
        assert!(!r.contains(&"10.1.2.128/25".parse().unwrap()));
        assert!(!r.contains(&"11.1.0.0/16".parse().unwrap()));
        assert!(!r.contains(&base));

        let le = PrefixRange::new(base, None, Some(32)).unwrap();
        assert_eq!(le.ge, 8);
        assert!(le.contains(&base));
        assert!(PrefixRange::new(base, Some(4), None).is_err());
        assert!(PrefixRange::new(base, Some(20), Some(16)).is_err());
    }

    #[test]
    fn community_text_form() {
        let c: Community = "100:1".parse().unwrap();
        assert_eq!(c, Community(100, 1));
        assert_eq!(c.to_string(), "100:1");
        assert!("100".parse::<Community>().is_err());
        assert!("70000:1".parse::<Community>().is_err());
    }
}
