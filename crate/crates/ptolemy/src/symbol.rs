//! Tree-pair symbols `(T₁, T₀, σ)` for elements of T.
//!
//! A finite binary tree is stored by its leaves, a partition of the circle
//! into standard dyadic intervals. The implicit root splits the circle into
//! `[0, 1/2]` and `[1/2, 1]`, and every tree used here also splits
//! `[1/2, 1]`, so it contains the level-3 tree. Leaves are numbered
//! counterclockwise from the one starting at 0, which is the cyclic labeling
//! obtained by always passing label 1 to the left descendant.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::state::{Cell, Cusp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("malformed tree string {0:?}")]
    BadTree(String),
    #[error("tree does not contain the level-3 base tree")]
    MissingBase,
    #[error("source and target have different leaf counts ({0} vs {1})")]
    LevelMismatch(usize, usize),
    #[error("malformed symbol JSON: {0}")]
    BadJson(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FiniteBinaryTree {
    leaves: Vec<Cell>,
}

impl FiniteBinaryTree {
    /// The level-3 tree with leaves `[0,1/2]`, `[1/2,3/4]`, `[3/4,1]`.
    pub fn base() -> FiniteBinaryTree {
        FiniteBinaryTree { leaves: vec![Cell::A, Cell::B.lower(), Cell::B.upper()] }
    }

    /// Builds a tree from its leaf intervals; they must tile the circle in
    /// counterclockwise order starting at 0.
    pub fn from_leaves(leaves: Vec<Cell>) -> Result<FiniteBinaryTree, SymbolError> {
        let mut at = Cusp::ZERO;
        for (i, c) in leaves.iter().enumerate() {
            if c.lo() != at || (i > 0 && c.lo() == Cusp::ZERO) {
                return Err(SymbolError::BadTree(format!("{leaves:?}")));
            }
            at = c.hi();
        }
        if at != Cusp::ZERO || leaves.is_empty() {
            return Err(SymbolError::BadTree(format!("{leaves:?}")));
        }
        if leaves.contains(&Cell::B) {
            return Err(SymbolError::MissingBase);
        }
        Ok(FiniteBinaryTree { leaves })
    }

    pub fn leaves(&self) -> &[Cell] {
        &self.leaves
    }

    /// Number of leaves.
    pub fn level(&self) -> usize {
        self.leaves.len()
    }

    /// Internal vertices other than the implicit root, i.e. the base cells
    /// of the polygon this tree describes.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &leaf in &self.leaves {
            let mut c = leaf;
            while !c.is_root() {
                c = c.parent();
                out.push(c);
            }
        }
        out.push(Cell::B);
        out.sort();
        out.dedup();
        out
    }

    /// Cusps in counterclockwise order.
    pub fn cusps(&self) -> Vec<Cusp> {
        self.leaves.iter().map(|c| c.lo()).collect()
    }

    fn split(&mut self, i: usize) {
        let c = self.leaves[i];
        self.leaves[i] = c.lower();
        self.leaves.insert(i + 1, c.upper());
    }

    /// Whether leaves `i` and `i + 1` form a caret that may be removed.
    fn caret_at(&self, i: usize) -> bool {
        let (Some(&x), Some(&y)) = (self.leaves.get(i), self.leaves.get(i + 1)) else {
            return false;
        };
        x.level() == y.level()
            && x.level() >= 2
            && x.parent() == y.parent()
            && x.lower_sibling()
            && x.parent() != Cell::B
    }

    fn merge(&mut self, i: usize) {
        let p = self.leaves[i].parent();
        self.leaves[i] = p;
        self.leaves.remove(i + 1);
    }

    /// Balanced-parenthesis encoding: a leaf is `()` and an internal vertex
    /// is `(` left right `)`, starting from the implicit root.
    pub fn to_parens(&self) -> String {
        let mut out = String::new();
        let mut idx = 0;
        self.write_node(None, &mut idx, &mut out);
        out
    }

    fn write_node(&self, node: Option<Cell>, idx: &mut usize, out: &mut String) {
        if node.is_some() && self.leaves.get(*idx) == node.as_ref() {
            *idx += 1;
            out.push_str("()");
            return;
        }
        out.push('(');
        let (l, r) = match node {
            None => (Cell::A, Cell::B),
            Some(c) => (c.lower(), c.upper()),
        };
        self.write_node(Some(l), idx, out);
        self.write_node(Some(r), idx, out);
        out.push(')');
    }

    pub fn from_parens(s: &str) -> Result<FiniteBinaryTree, SymbolError> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut leaves = Vec::new();
        parse_node(bytes, &mut pos, None, &mut leaves).ok_or_else(|| SymbolError::BadTree(s.to_string()))?;
        if pos != bytes.len() {
            return Err(SymbolError::BadTree(s.to_string()));
        }
        FiniteBinaryTree::from_leaves(leaves)
    }
}

fn parse_node(b: &[u8], pos: &mut usize, node: Option<Cell>, leaves: &mut Vec<Cell>) -> Option<()> {
    if b.get(*pos) != Some(&b'(') {
        return None;
    }
    *pos += 1;
    if b.get(*pos) == Some(&b')') {
        *pos += 1;
        leaves.push(node?);
        return Some(());
    }
    let (l, r) = match node {
        None => (Cell::A, Cell::B),
        Some(c) if c.level() < crate::state::MAX_LEVEL => (c.lower(), c.upper()),
        Some(_) => return None,
    };
    parse_node(b, pos, Some(l), leaves)?;
    parse_node(b, pos, Some(r), leaves)?;
    if b.get(*pos) != Some(&b')') {
        return None;
    }
    *pos += 1;
    Some(())
}

/// `(target, source, shift)`: leaf `i` of the source goes to leaf
/// `i + shift (mod n)` of the target.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct TreePairSymbol {
    pub target: FiniteBinaryTree,
    pub source: FiniteBinaryTree,
    pub shift: usize,
}

impl TreePairSymbol {
    pub fn new(target: FiniteBinaryTree, source: FiniteBinaryTree, shift: usize) -> Result<Self, SymbolError> {
        let (n, m) = (target.level(), source.level());
        if n != m {
            return Err(SymbolError::LevelMismatch(n, m));
        }
        Ok(TreePairSymbol { target, source, shift: shift % n })
    }

    pub fn identity() -> TreePairSymbol {
        TreePairSymbol { target: FiniteBinaryTree::base(), source: FiniteBinaryTree::base(), shift: 0 }
    }

    pub fn level(&self) -> usize {
        self.source.level()
    }

    pub fn is_identity(&self) -> bool {
        self.reduce() == TreePairSymbol::identity()
    }

    /// Expands source leaf `i` and its image.
    pub fn expand_source(&mut self, i: usize) {
        let n = self.level();
        let j = (i + self.shift) % n;
        self.source.split(i);
        self.target.split(j);
        self.shift = (j + n + 1 - i) % (n + 1);
    }

    pub fn expand_target(&mut self, j: usize) {
        let n = self.level();
        self.expand_source((j + n - self.shift) % n);
    }

    /// Removes common carets until none is left.
    pub fn reduce(&self) -> TreePairSymbol {
        let mut s = self.clone();
        'outer: loop {
            let n = s.level();
            for i in 0..n.saturating_sub(1) {
                let j = (i + s.shift) % n;
                if j + 1 < n && s.source.caret_at(i) && s.target.caret_at(j) {
                    s.source.merge(i);
                    s.target.merge(j);
                    s.shift = (j + n - 1 - i) % (n - 1);
                    continue 'outer;
                }
            }
            return s;
        }
    }

    pub fn inverse(&self) -> TreePairSymbol {
        let n = self.level();
        TreePairSymbol {
            target: self.source.clone(),
            source: self.target.clone(),
            shift: (n - self.shift) % n,
        }
    }

    /// The composite `self ∘ other` (apply `other` first), reduced.
    pub fn multiply(&self, other: &TreePairSymbol) -> TreePairSymbol {
        let mut x = self.clone();
        let mut y = other.clone();
        let mut i = 0;
        while i < x.level() {
            let (a, b) = (x.source.leaves[i], y.target.leaves[i]);
            if a == b {
                i += 1;
            } else if a.level() < b.level() {
                x.expand_source(i);
            } else {
                y.expand_target(i);
            }
        }
        debug_assert_eq!(x.source, y.target);
        let n = x.level();
        TreePairSymbol { target: x.target, source: y.source, shift: (x.shift + y.shift) % n }.reduce()
    }

    /// Image of a source cusp under the circle map.
    pub fn map_cusp(&self, index: usize) -> Cusp {
        let n = self.level();
        self.target.leaves[(index + self.shift) % n].lo()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_parens(),
            "target": self.target.to_parens(),
            "shift": self.shift,
        })
    }

    pub fn from_json(v: &Value) -> Result<TreePairSymbol, SymbolError> {
        let get = |k: &str| v[k].as_str().ok_or_else(|| SymbolError::BadJson(k.to_string()));
        let source = FiniteBinaryTree::from_parens(get("source")?)?;
        let target = FiniteBinaryTree::from_parens(get("target")?)?;
        let shift = v["shift"].as_u64().ok_or_else(|| SymbolError::BadJson("shift".into()))? as usize;
        TreePairSymbol::new(target, source, shift)
    }
}

impl fmt::Display for TreePairSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.target.to_parens(), self.source.to_parens(), self.shift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level4() -> FiniteBinaryTree {
        FiniteBinaryTree::from_leaves(vec![Cell::A.lower(), Cell::A.upper(), Cell::B.lower(), Cell::B.upper()]).unwrap()
    }

    #[test]
    fn parens_round_trip() {
        let t = FiniteBinaryTree::base();
        assert_eq!(t.to_parens(), "(()(()()))");
        assert_eq!(FiniteBinaryTree::from_parens("(()(()()))").unwrap(), t);
        let t4 = level4();
        assert_eq!(FiniteBinaryTree::from_parens(&t4.to_parens()).unwrap(), t4);
        assert!(FiniteBinaryTree::from_parens("(()())").is_err());
        assert!(FiniteBinaryTree::from_parens("(()(()())").is_err());
    }

    #[test]
    fn same_tree_reduces_to_identity() {
        let mut s = TreePairSymbol::new(level4(), level4(), 0).unwrap();
        s.expand_source(2);
        assert!(s.is_identity());
    }

    #[test]
    fn expand_then_reduce() {
        let rot = TreePairSymbol::new(level4(), level4(), 1).unwrap();
        let mut e = rot.clone();
        e.expand_source(3);
        e.expand_target(0);
        assert_eq!(e.level(), 6);
        assert_eq!(e.reduce(), rot);
    }

    #[test]
    fn quarter_rotation_has_order_four() {
        let rot = TreePairSymbol::new(level4(), level4(), 1).unwrap();
        let r2 = rot.multiply(&rot);
        let r4 = r2.multiply(&r2);
        assert!(!r2.is_identity());
        assert!(r4.is_identity());
        assert!(rot.multiply(&rot.inverse()).is_identity());
    }

    #[test]
    fn json_round_trip() {
        let s = TreePairSymbol::new(level4(), level4(), 3).unwrap();
        assert_eq!(TreePairSymbol::from_json(&s.to_json()).unwrap(), s);
    }
}
