// SPDX-License-Identifier: Apache-2.0

//! Reduced ordered binary decision diagrams.
//!
//! Nodes live in a [`BddManager`] arena and are hash-consed, so two handles
//! from the same manager are equal iff they denote the same function.

use rustc_hash::FxHashMap as HashMap;

/// Handle to a node inside a [`BddManager`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bdd(u32);

impl Bdd {
    pub const FALSE: Bdd = Bdd(0);
    pub const TRUE: Bdd = Bdd(1);

    pub fn is_false(self) -> bool {
        self == Bdd::FALSE
    }

    pub fn is_true(self) -> bool {
        self == Bdd::TRUE
    }

    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }
}

const TERMINAL_VAR: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: Bdd,
    hi: Bdd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Xor,
}

#[derive(Debug)]
pub struct BddManager {
    num_vars: u32,
    nodes: Vec<Node>,
    unique: HashMap<Node, Bdd>,
    apply_cache: HashMap<(Op, Bdd, Bdd), Bdd>,
    not_cache: HashMap<Bdd, Bdd>,
}

/// Serialisable copy of a single diagram, independent of any manager.
///
/// Nodes are listed children-first; `lo`/`hi` index into `nodes` with the
/// offset 2, and 0/1 are the terminals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BddImage {
    pub nodes: Vec<(u32, u32, u32)>,
    pub root: u32,
}

impl BddManager {
    pub fn new(num_vars: u32) -> Self {
        let term = Node {
            var: TERMINAL_VAR,
            lo: Bdd::FALSE,
            hi: Bdd::FALSE,
        };
        Self {
            num_vars,
            nodes: vec![term, term],
            unique: HashMap::default(),
            apply_cache: HashMap::default(),
            not_cache: HashMap::default(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Total number of nodes allocated in this manager.
    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    pub fn clear_caches(&mut self) {
        self.apply_cache.clear();
        self.not_cache.clear();
    }

    fn node(&self, f: Bdd) -> Node {
        self.nodes[f.0 as usize]
    }

    pub fn var_of(&self, f: Bdd) -> Option<u32> {
        (!f.is_terminal()).then(|| self.node(f).var)
    }

    pub fn low(&self, f: Bdd) -> Bdd {
        self.node(f).lo
    }

    pub fn high(&self, f: Bdd) -> Bdd {
        self.node(f).hi
    }

    pub fn mk(&mut self, var: u32, lo: Bdd, hi: Bdd) -> Bdd {
        debug_assert!(var < self.num_vars);
        if lo == hi {
            return lo;
        }
        let n = Node { var, lo, hi };
        if let Some(&b) = self.unique.get(&n) {
            return b;
        }
        let b = Bdd(self.nodes.len() as u32);
        self.nodes.push(n);
        self.unique.insert(n, b);
        b
    }

    pub fn var(&mut self, v: u32) -> Bdd {
        self.mk(v, Bdd::FALSE, Bdd::TRUE)
    }

    pub fn nvar(&mut self, v: u32) -> Bdd {
        self.mk(v, Bdd::TRUE, Bdd::FALSE)
    }

    pub fn literal(&mut self, v: u32, value: bool) -> Bdd {
        if value {
            self.var(v)
        } else {
            self.nvar(v)
        }
    }

    pub fn not(&mut self, f: Bdd) -> Bdd {
        match f {
            Bdd::FALSE => return Bdd::TRUE,
            Bdd::TRUE => return Bdd::FALSE,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&f) {
            return r;
        }
        let n = self.node(f);
        let lo = self.not(n.lo);
        let hi = self.not(n.hi);
        let r = self.mk(n.var, lo, hi);
        self.not_cache.insert(f, r);
        r
    }

    pub fn and(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(Op::And, a, b)
    }

    pub fn or(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(Op::Or, a, b)
    }

    pub fn xor(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(Op::Xor, a, b)
    }

    /// `a ∧ ¬b`
    pub fn diff(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let nb = self.not(b);
        self.and(a, nb)
    }

    pub fn implies(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let na = self.not(a);
        self.or(na, b)
    }

    pub fn ite(&mut self, c: Bdd, t: Bdd, e: Bdd) -> Bdd {
        let ct = self.and(c, t);
        let nc = self.not(c);
        let ce = self.and(nc, e);
        self.or(ct, ce)
    }

    fn apply(&mut self, op: Op, a: Bdd, b: Bdd) -> Bdd {
        // Terminal cases.
        match op {
            Op::And => {
                if a.is_false() || b.is_false() {
                    return Bdd::FALSE;
                }
                if a.is_true() {
                    return b;
                }
                if b.is_true() || a == b {
                    return a;
                }
            }
            Op::Or => {
                if a.is_true() || b.is_true() {
                    return Bdd::TRUE;
                }
                if a.is_false() {
                    return b;
                }
                if b.is_false() || a == b {
                    return a;
                }
            }
            Op::Xor => {
                if a == b {
                    return Bdd::FALSE;
                }
                if a.is_false() {
                    return b;
                }
                if b.is_false() {
                    return a;
                }
                if a.is_true() {
                    return self.not(b);
                }
                if b.is_true() {
                    return self.not(a);
                }
            }
        }
        // Commutative: normalise the cache key.
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if let Some(&r) = self.apply_cache.get(&(op, a, b)) {
            return r;
        }
        let na = self.node(a);
        let nb = self.node(b);
        let var = na.var.min(nb.var);
        let (alo, ahi) = if na.var == var {
            (na.lo, na.hi)
        } else {
            (a, a)
        };
        let (blo, bhi) = if nb.var == var {
            (nb.lo, nb.hi)
        } else {
            (b, b)
        };
        let lo = self.apply(op, alo, blo);
        let hi = self.apply(op, ahi, bhi);
        let r = self.mk(var, lo, hi);
        self.apply_cache.insert((op, a, b), r);
        r
    }

    /// Existentially quantifies every variable flagged in `vars`.
    pub fn exists(&mut self, f: Bdd, vars: &[bool]) -> Bdd {
        let last = match vars.iter().rposition(|&v| v) {
            Some(l) => l as u32,
            None => return f,
        };
        let mut memo = HashMap::default();
        self.exists_rec(f, vars, last, &mut memo)
    }

    fn exists_rec(
        &mut self,
        f: Bdd,
        vars: &[bool],
        last: u32,
        memo: &mut HashMap<Bdd, Bdd>,
    ) -> Bdd {
        if f.is_terminal() {
            return f;
        }
        let n = self.node(f);
        if n.var > last {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let lo = self.exists_rec(n.lo, vars, last, memo);
        let hi = self.exists_rec(n.hi, vars, last, memo);
        let r = if vars[n.var as usize] {
            self.or(lo, hi)
        } else {
            self.mk(n.var, lo, hi)
        };
        memo.insert(f, r);
        r
    }

    /// Conjunction of literals, given as `(var, value)` pairs in any order.
    pub fn cube(&mut self, lits: &[(u32, bool)]) -> Bdd {
        let mut sorted = lits.to_vec();
        sorted.sort_unstable();
        let mut acc = Bdd::TRUE;
        for &(v, val) in sorted.iter().rev() {
            acc = if val {
                self.mk(v, Bdd::FALSE, acc)
            } else {
                self.mk(v, acc, Bdd::FALSE)
            };
        }
        acc
    }

    pub fn eval(&self, f: Bdd, assignment: &[bool]) -> bool {
        let mut cur = f;
        while !cur.is_terminal() {
            let n = self.node(cur);
            cur = if assignment[n.var as usize] {
                n.hi
            } else {
                n.lo
            };
        }
        cur.is_true()
    }

    /// The lexicographically least satisfying assignment (variables in
    /// order, `false < true`), or `None` when unsatisfiable.
    pub fn least_sat(&self, f: Bdd) -> Option<Vec<bool>> {
        if f.is_false() {
            return None;
        }
        let mut out = vec![false; self.num_vars as usize];
        let mut cur = f;
        while !cur.is_terminal() {
            let n = self.node(cur);
            // In a reduced diagram every non-false node is satisfiable.
            if n.lo.is_false() {
                out[n.var as usize] = true;
                cur = n.hi;
            } else {
                cur = n.lo;
            }
        }
        Some(out)
    }

    pub fn node_count(&self, f: Bdd) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![f];
        while let Some(g) = stack.pop() {
            if g.is_terminal() || !seen.insert(g) {
                continue;
            }
            let n = self.node(g);
            stack.push(n.lo);
            stack.push(n.hi);
        }
        seen.len()
    }

    pub fn export(&self, f: Bdd) -> BddImage {
        let mut index: HashMap<Bdd, u32> = HashMap::default();
        let mut nodes = Vec::new();
        fn walk(
            m: &BddManager,
            g: Bdd,
            index: &mut HashMap<Bdd, u32>,
            nodes: &mut Vec<(u32, u32, u32)>,
        ) -> u32 {
            if g.is_terminal() {
                return g.0;
            }
            if let Some(&i) = index.get(&g) {
                return i;
            }
            let n = m.node(g);
            let lo = walk(m, n.lo, index, nodes);
            let hi = walk(m, n.hi, index, nodes);
            let i = nodes.len() as u32 + 2;
            nodes.push((n.var, lo, hi));
            index.insert(g, i);
            i
        }
        let root = walk(self, f, &mut index, &mut nodes);
        BddImage { nodes, root }
    }

    pub fn import(&mut self, img: &BddImage) -> Bdd {
        let mut map: Vec<Bdd> = vec![Bdd::FALSE, Bdd::TRUE];
        for &(var, lo, hi) in &img.nodes {
            let b = self.mk(var, map[lo as usize], map[hi as usize]);
            map.push(b);
        }
        map[img.root as usize]
    }
}

impl BddImage {
    pub fn eval(&self, assignment: &[bool]) -> bool {
        let mut cur = self.root;
        while cur >= 2 {
            let (var, lo, hi) = self.nodes[cur as usize - 2];
            cur = if assignment[var as usize] { hi } else { lo };
        }
        cur == 1
    }
}
