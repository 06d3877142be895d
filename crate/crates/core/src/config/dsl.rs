// SPDX-License-Identifier: Apache-2.0

//! Infix predicate language.
//!
//! ```text
//! expr   := term (("or" | "implies") term)*
//! term   := factor ("and" factor)*
//! factor := "not" factor | "(" expr ")" | atom
//! atom   := "true" | "false" | "community" A:B
//!         | "prefix" "in" CIDR ["ge" n] ["le" n]
//!         | "localpref" cmp n | "med" cmp n
//!         | "ghost" name | "aspath" "matches" "\"regex\""
//! ```
//!
//! `or` and `implies` share one precedence level and associate to the left.

use thiserror::Error;

use crate::model::{AsPathRegex, CmpOp, Community, PredicateExpr, Prefix, PrefixRange};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("predicate `{src}`, column {col}: {msg}")]
pub struct DslError {
    pub src: String,
    /// 1-based character column.
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Str(String),
    Op(String),
    Word(String),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: &str| DslError {
        src: src.to_string(),
        col: col + 1,
        msg: msg.to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            out.push((Tok::LParen, i));
            i += 1;
        } else if c == ')' {
            out.push((Tok::RParen, i));
            i += 1;
        } else if c == '"' {
            let start = i;
            i += 1;
            let mut s = String::new();
            while i < chars.len() && chars[i] != '"' {
                s.push(chars[i]);
                i += 1;
            }
            if i == chars.len() {
                return Err(err(start, "unterminated string"));
            }
            i += 1;
            out.push((Tok::Str(s), start));
        } else if "<>=!".contains(c) {
            let start = i;
            let mut s = String::new();
            while i < chars.len() && "<>=!".contains(chars[i]) {
                s.push(chars[i]);
                i += 1;
            }
            out.push((Tok::Op(s), start));
        } else {
            let start = i;
            let mut s = String::new();
            while i < chars.len() && !chars[i].is_whitespace() && !"()\"<>=!".contains(chars[i]) {
                s.push(chars[i]);
                i += 1;
            }
            out.push((Tok::Word(s), start));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> DslError {
        let col = self
            .toks
            .get(self.pos)
            .map_or(self.src.chars().count(), |t| t.1);
        DslError {
            src: self.src.to_string(),
            col: col + 1,
            msg: msg.into(),
        }
    }

    fn peek_word(&self) -> Option<&str> {
        match self.toks.get(self.pos) {
            Some((Tok::Word(w), _)) => Some(w),
            _ => None,
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn word(&mut self, what: &str) -> Result<String, DslError> {
        match self.toks.get(self.pos) {
            Some((Tok::Word(w), _)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DslError> {
        if self.peek_word() == Some(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{kw}`")))
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, DslError> {
        let at = self.pos;
        let w = self.word(what)?;
        w.parse().map_err(|_| {
            self.pos = at;
            self.err(format!("expected {what}, found `{w}`"))
        })
    }

    fn expr(&mut self) -> Result<PredicateExpr, DslError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek_word() {
                Some("or") => {
                    self.pos += 1;
                    lhs = PredicateExpr::or(lhs, self.term()?);
                }
                Some("implies") => {
                    self.pos += 1;
                    lhs = PredicateExpr::implies(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<PredicateExpr, DslError> {
        let mut lhs = self.factor()?;
        while self.peek_word() == Some("and") {
            self.pos += 1;
            lhs = PredicateExpr::and(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<PredicateExpr, DslError> {
        match self.toks.get(self.pos).map(|t| &t.0) {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => {
                        self.pos = self.pos.saturating_sub(1);
                        Err(self.err("expected `)`"))
                    }
                }
            }
            Some(Tok::Word(w)) if w == "not" => {
                self.pos += 1;
                Ok(PredicateExpr::not(self.factor()?))
            }
            _ => self.atom(),
        }
    }

    fn cmp(&mut self) -> Result<CmpOp, DslError> {
        match self.toks.get(self.pos) {
            Some((Tok::Op(op), _)) => match CmpOp::from_symbol(op) {
                Some(c) => {
                    self.pos += 1;
                    Ok(c)
                }
                None => Err(self.err(format!("unknown comparison `{op}`"))),
            },
            _ => Err(self.err("expected comparison operator")),
        }
    }

    fn atom(&mut self) -> Result<PredicateExpr, DslError> {
        let start = self.pos;
        let w = self.word("predicate")?;
        Ok(match w.as_str() {
            "true" => PredicateExpr::True,
            "false" => PredicateExpr::False,
            "community" => {
                let at = self.pos;
                let c = self.word("community")?;
                let c: Community = c.parse().map_err(|e: crate::model::ModelError| {
                    self.pos = at;
                    self.err(e.to_string())
                })?;
                PredicateExpr::Community(c)
            }
            "prefix" => {
                self.keyword("in")?;
                let at = self.pos;
                let p = self.word("prefix")?;
                let prefix: Prefix = p.parse().map_err(|e: crate::model::ModelError| {
                    self.pos = at;
                    self.err(e.to_string())
                })?;
                let mut ge = None;
                let mut le = None;
                if self.peek_word() == Some("ge") {
                    self.pos += 1;
                    ge = Some(self.number("length")?);
                }
                if self.peek_word() == Some("le") {
                    self.pos += 1;
                    le = Some(self.number("length")?);
                }
                let range = PrefixRange::new(prefix, ge, le).map_err(|e| {
                    self.pos = at;
                    self.err(e.to_string())
                })?;
                PredicateExpr::PrefixIn(range)
            }
            "localpref" => {
                let op = self.cmp()?;
                PredicateExpr::LocalPref(op, self.number("integer")?)
            }
            "med" => {
                let op = self.cmp()?;
                PredicateExpr::Med(op, self.number("integer")?)
            }
            "ghost" => PredicateExpr::Ghost(self.word("ghost name")?),
            "aspath" => {
                self.keyword("matches")?;
                let at = self.pos;
                match self.next() {
                    Some(Tok::Str(s)) => {
                        PredicateExpr::AsPathMatches(AsPathRegex::parse(&s).map_err(|e| {
                            self.pos = at;
                            self.err(e.to_string())
                        })?)
                    }
                    _ => {
                        self.pos = at;
                        return Err(self.err("expected quoted regex"));
                    }
                }
            }
            other => {
                self.pos = start;
                return Err(self.err(format!("unexpected `{other}`")));
            }
        })
    }
}

pub fn parse_predicate(src: &str) -> Result<PredicateExpr, DslError> {
    let toks = tokenize(src)?;
    let mut p = Parser { src, toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}
