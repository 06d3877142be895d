// SPDX-License-Identifier: Apache-2.0

//! AS-path regular expressions.
//!
//! Tokens are whitespace-separated ASN literals, `.` (any ASN), the postfix
//! operators `*`, `+`, `?`, alternation `|` and parentheses. Every expression
//! is anchored with a leading `^` and a trailing `$`.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::Asn;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegexError {
    #[error("as-path regex `{0}` must start with `^` and end with `$`")]
    Unanchored(String),
    #[error("as-path regex `{src}`: unexpected `{token}` at token {pos}")]
    Unexpected {
        src: String,
        token: String,
        pos: usize,
    },
    #[error("as-path regex `{0}`: unexpected end of input")]
    UnexpectedEnd(String),
    #[error("as-path regex `{src}`: bad token `{token}`")]
    BadToken { src: String, token: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegexNode {
    Empty,
    Asn(Asn),
    Any,
    Concat(Vec<RegexNode>),
    Alt(Vec<RegexNode>),
    Star(Box<RegexNode>),
    Plus(Box<RegexNode>),
    Opt(Box<RegexNode>),
}

impl RegexNode {
    /// End positions reachable after matching this node from `start`.
    fn ends(&self, path: &[Asn], start: usize) -> BTreeSet<usize> {
        match self {
            RegexNode::Empty => BTreeSet::from([start]),
            RegexNode::Asn(a) => {
                if path.get(start) == Some(a) {
                    BTreeSet::from([start + 1])
                } else {
                    BTreeSet::new()
                }
            }
            RegexNode::Any => {
                if start < path.len() {
                    BTreeSet::from([start + 1])
                } else {
                    BTreeSet::new()
                }
            }
            RegexNode::Concat(parts) => {
                let mut cur = BTreeSet::from([start]);
                for p in parts {
                    cur = cur.iter().flat_map(|&s| p.ends(path, s)).collect();
                    if cur.is_empty() {
                        break;
                    }
                }
                cur
            }
            RegexNode::Alt(alts) => alts.iter().flat_map(|a| a.ends(path, start)).collect(),
            RegexNode::Star(inner) => closure(inner, path, BTreeSet::from([start])),
            RegexNode::Plus(inner) => closure(inner, path, inner.ends(path, start)),
            RegexNode::Opt(inner) => {
                let mut out = inner.ends(path, start);
                out.insert(start);
                out
            }
        }
    }

    /// Every ASN literal appearing in the expression.
    pub fn literals(&self, out: &mut BTreeSet<Asn>) {
        match self {
            RegexNode::Asn(a) => {
                out.insert(*a);
            }
            RegexNode::Concat(xs) | RegexNode::Alt(xs) => xs.iter().for_each(|x| x.literals(out)),
            RegexNode::Star(x) | RegexNode::Plus(x) | RegexNode::Opt(x) => x.literals(out),
            RegexNode::Empty | RegexNode::Any => {}
        }
    }
}

fn closure(inner: &RegexNode, path: &[Asn], seed: BTreeSet<usize>) -> BTreeSet<usize> {
    let mut seen = seed.clone();
    let mut work: Vec<usize> = seed.into_iter().collect();
    while let Some(s) = work.pop() {
        for e in inner.ends(path, s) {
            if seen.insert(e) {
                work.push(e);
            }
        }
    }
    seen
}

/// A parsed, anchored AS-path regular expression.
#[derive(Clone, Debug)]
pub struct AsPathRegex {
    source: String,
    root: RegexNode,
}

impl PartialEq for AsPathRegex {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Eq for AsPathRegex {}

impl Hash for AsPathRegex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.root.hash(state)
    }
}

impl AsPathRegex {
    pub fn parse(src: &str) -> Result<Self, RegexError> {
        let tokens = tokenize(src)?;
        if tokens.first() != Some(&Tok::Caret)
            || tokens.last() != Some(&Tok::Dollar)
            || tokens.len() < 2
        {
            return Err(RegexError::Unanchored(src.to_string()));
        }
        let body = &tokens[1..tokens.len() - 1];
        let mut p = Parser {
            src,
            toks: body,
            pos: 0,
        };
        let root = p.alt()?;
        if p.pos != body.len() {
            return Err(p.unexpected());
        }
        Ok(Self {
            source: src.trim().to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &RegexNode {
        &self.root
    }

    /// Whole-path match against concrete ASNs.
    pub fn is_match(&self, path: &[Asn]) -> bool {
        self.root.ends(path, 0).contains(&path.len())
    }

    pub fn literals(&self) -> BTreeSet<Asn> {
        let mut out = BTreeSet::new();
        self.root.literals(&mut out);
        out
    }
}

impl fmt::Display for AsPathRegex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for AsPathRegex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for AsPathRegex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        AsPathRegex::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Asn(Asn),
    Dot,
    Star,
    Plus,
    Question,
    Bar,
    LParen,
    RParen,
    Caret,
    Dollar,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Asn(a) => write!(f, "{a}"),
            Tok::Dot => f.write_str("."),
            Tok::Star => f.write_str("*"),
            Tok::Plus => f.write_str("+"),
            Tok::Question => f.write_str("?"),
            Tok::Bar => f.write_str("|"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::Caret => f.write_str("^"),
            Tok::Dollar => f.write_str("$"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Tok>, RegexError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            '.' => Tok::Dot,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '?' => Tok::Question,
            '|' => Tok::Bar,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '^' => Tok::Caret,
            '$' => Tok::Dollar,
            c if c.is_ascii_digit() => {
                let mut end = i + 1;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        end = j + 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let lit = &src[i..end];
                Tok::Asn(lit.parse().map_err(|_| RegexError::BadToken {
                    src: src.to_string(),
                    token: lit.to_string(),
                })?)
            }
            other => {
                return Err(RegexError::BadToken {
                    src: src.to_string(),
                    token: other.to_string(),
                })
            }
        };
        out.push(tok);
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn unexpected(&self) -> RegexError {
        match self.peek() {
            Some(t) => RegexError::Unexpected {
                src: self.src.to_string(),
                token: t.to_string(),
                pos: self.pos + 1,
            },
            None => RegexError::UnexpectedEnd(self.src.to_string()),
        }
    }

    fn alt(&mut self) -> Result<RegexNode, RegexError> {
        let mut alts = vec![self.concat()?];
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            alts.push(self.concat()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            RegexNode::Alt(alts)
        })
    }

    fn concat(&mut self) -> Result<RegexNode, RegexError> {
        let mut parts = Vec::new();
        while let Some(t) = self.peek() {
            if matches!(t, Tok::Bar | Tok::RParen) {
                break;
            }
            parts.push(self.postfix()?);
        }
        Ok(match parts.len() {
            0 => RegexNode::Empty,
            1 => parts.pop().unwrap(),
            _ => RegexNode::Concat(parts),
        })
    }

    fn postfix(&mut self) -> Result<RegexNode, RegexError> {
        let mut node = self.atom()?;
        loop {
            node = match self.peek() {
                Some(Tok::Star) => RegexNode::Star(Box::new(node)),
                Some(Tok::Plus) => RegexNode::Plus(Box::new(node)),
                Some(Tok::Question) => RegexNode::Opt(Box::new(node)),
                _ => return Ok(node),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<RegexNode, RegexError> {
        let node = match self.peek() {
            Some(Tok::Asn(a)) => RegexNode::Asn(*a),
            Some(Tok::Dot) => RegexNode::Any,
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.alt()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected());
                }
                inner
            }
            _ => return Err(self.unexpected()),
        };
        self.pos += 1;
        Ok(node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rx(s: &str) -> AsPathRegex {
        AsPathRegex::parse(s).unwrap()
    }

    #[test]
    fn anchors_are_mandatory() {
        assert!(matches!(
            AsPathRegex::parse("65001"),
            Err(RegexError::Unanchored(_))
        ));
        assert!(AsPathRegex::parse("^65001").is_err());
        assert!(AsPathRegex::parse("^$").is_ok());
    }

    #[test]
    fn literal_and_wildcards() {
        let r = rx("^65001$");
        assert!(r.is_match(&[65001]));
        assert!(!r.is_match(&[]));
        assert!(!r.is_match(&[65001, 65001]));

        let r = rx("^65001 .*$");
        assert!(r.is_match(&[65001]));
        assert!(r.is_match(&[65001, 7, 8]));
        assert!(!r.is_match(&[7, 65001]));

        let r = rx("^(65201|65202) .*$");
        assert!(r.is_match(&[65202, 1]));
        assert!(!r.is_match(&[65203]));

        let r = rx("^1+ 2? $");
        assert!(r.is_match(&[1, 1, 2]));
        assert!(r.is_match(&[1]));
        assert!(!r.is_match(&[2]));
        assert!(rx("^$").is_match(&[]));
    }

    #[test]
    fn malformed_inputs() {
        assert!(AsPathRegex::parse("^(1$").is_err());
        assert!(AsPathRegex::parse("^*$").is_err());
        assert!(AsPathRegex::parse("^a$").is_err());
        assert!(AsPathRegex::parse("^1)$").is_err());
    }

    #[test]
    fn literals_collected() {
        assert_eq!(
            rx("^(65201|65202) . 7*$").literals(),
            BTreeSet::from([7, 65201, 65202])
        );
    }
}
