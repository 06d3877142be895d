// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AsPathRegex, Asn, Community, ModelError, PrefixRange, Route};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CmpOp {
    pub fn holds(self, lhs: u32, rhs: u32) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "==" => CmpOp::Eq,
            "!=" => CmpOp::Ne,
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            ">" => CmpOp::Gt,
            ">=" => CmpOp::Ge,
            _ => return None,
        })
    }
}

/// Constraint language for properties and invariants.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PredicateExpr {
    True,
    False,
    Community(Community),
    PrefixIn(PrefixRange),
    LocalPref(CmpOp, u32),
    Med(CmpOp, u32),
    Ghost(String),
    AsPathMatches(AsPathRegex),
    Not(Box<PredicateExpr>),
    And(Box<PredicateExpr>, Box<PredicateExpr>),
    Or(Box<PredicateExpr>, Box<PredicateExpr>),
    Implies(Box<PredicateExpr>, Box<PredicateExpr>),
}

impl PredicateExpr {
    #[allow(clippy::should_implement_trait)]
    pub fn not(p: PredicateExpr) -> Self {
        PredicateExpr::Not(Box::new(p))
    }

    pub fn and(a: PredicateExpr, b: PredicateExpr) -> Self {
        PredicateExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PredicateExpr, b: PredicateExpr) -> Self {
        PredicateExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: PredicateExpr, b: PredicateExpr) -> Self {
        PredicateExpr::Implies(Box::new(a), Box::new(b))
    }

    pub fn ghost(name: &str) -> Self {
        PredicateExpr::Ghost(name.to_string())
    }

    pub fn is_true(&self) -> bool {
        matches!(self, PredicateExpr::True)
    }

    /// Evaluates the predicate on a concrete route.
    pub fn eval(&self, r: &Route) -> Result<bool, ModelError> {
        Ok(match self {
            PredicateExpr::True => true,
            PredicateExpr::False => false,
            PredicateExpr::Community(c) => r.communities.contains(c),
            PredicateExpr::PrefixIn(range) => range.contains(&r.prefix),
            PredicateExpr::LocalPref(op, v) => op.holds(r.local_pref, *v),
            PredicateExpr::Med(op, v) => op.holds(r.med, *v),
            PredicateExpr::Ghost(g) => r
                .ghost(g)
                .ok_or_else(|| ModelError::UndeclaredGhost(g.clone()))?,
            PredicateExpr::AsPathMatches(rx) => rx.is_match(&r.as_path),
            PredicateExpr::Not(p) => !p.eval(r)?,
            PredicateExpr::And(a, b) => a.eval(r)? & b.eval(r)?,
            PredicateExpr::Or(a, b) => a.eval(r)? | b.eval(r)?,
            PredicateExpr::Implies(a, b) => !a.eval(r)? | b.eval(r)?,
        })
    }

    pub fn ghosts(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |p| {
            if let PredicateExpr::Ghost(g) = p {
                out.insert(g.clone());
            }
        });
        out
    }

    pub fn communities(&self) -> BTreeSet<Community> {
        let mut out = BTreeSet::new();
        self.visit(&mut |p| {
            if let PredicateExpr::Community(c) = p {
                out.insert(*c);
            }
        });
        out
    }

    pub fn asns(&self) -> BTreeSet<Asn> {
        let mut out = BTreeSet::new();
        self.visit(&mut |p| {
            if let PredicateExpr::AsPathMatches(rx) = p {
                out.extend(rx.literals());
            }
        });
        out
    }

    pub fn regexes(&self) -> Vec<AsPathRegex> {
        let mut out = Vec::new();
        self.visit(&mut |p| {
            if let PredicateExpr::AsPathMatches(rx) = p {
                out.push(rx.clone());
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&PredicateExpr)) {
        f(self);
        match self {
            PredicateExpr::Not(p) => p.visit(f),
            PredicateExpr::And(a, b) | PredicateExpr::Or(a, b) | PredicateExpr::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }
}

impl fmt::Display for PredicateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateExpr::True => f.write_str("true"),
            PredicateExpr::False => f.write_str("false"),
            PredicateExpr::Community(c) => write!(f, "community {c}"),
            PredicateExpr::PrefixIn(r) => write!(f, "prefix in {r}"),
            PredicateExpr::LocalPref(op, v) => write!(f, "localpref {} {v}", op.symbol()),
            PredicateExpr::Med(op, v) => write!(f, "med {} {v}", op.symbol()),
            PredicateExpr::Ghost(g) => write!(f, "ghost {g}"),
            PredicateExpr::AsPathMatches(rx) => write!(f, "aspath matches \"{rx}\""),
            PredicateExpr::Not(p) => write!(f, "not {}", Paren(p)),
            PredicateExpr::And(a, b) => write!(f, "{} and {}", Paren(a), Paren(b)),
            PredicateExpr::Or(a, b) => write!(f, "{} or {}", Paren(a), Paren(b)),
            PredicateExpr::Implies(a, b) => write!(f, "{} implies {}", Paren(a), Paren(b)),
        }
    }
}

/// Parenthesises compound operands so printed text re-parses to the same tree.
struct Paren<'a>(&'a PredicateExpr);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            PredicateExpr::And(..) | PredicateExpr::Or(..) | PredicateExpr::Implies(..) => {
                write!(f, "({})", self.0)
            }
            p => write!(f, "{p}"),
        }
    }
}
