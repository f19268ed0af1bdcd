//! Half-twists of adjacent punctures and words in them.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use super::path::{half_at, other_cell, Path, Step};
use super::{Arc, BraidError, Homeo};
use crate::state::{BaseEdge, Cell, Cusp, EdgeAddress};

/// The half-twist exchanging the punctures of two sides of a base cell,
/// counterclockwise when `positive`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BraidLetter {
    pub e: BaseEdge,
    pub f: BaseEdge,
    pub positive: bool,
}

/// The base cell having both edges as sides.
pub fn common_cell(e: BaseEdge, f: BaseEdge) -> Option<Cell> {
    if e == f {
        return None;
    }
    let fc = f.cells();
    e.cells().into_iter().find(|c| fc.contains(c))
}

impl BraidLetter {
    /// The twist is symmetric in its two punctures; the pair is stored sorted.
    pub fn new(e: BaseEdge, f: BaseEdge, positive: bool) -> Result<BraidLetter, BraidError> {
        if common_cell(e, f).is_none() {
            return Err(BraidError::NotAdjacent(e.address().to_string(), f.address().to_string()));
        }
        let (e, f) = if e <= f { (e, f) } else { (f, e) };
        Ok(BraidLetter { e, f, positive })
    }

    pub fn inverse(self) -> BraidLetter {
        BraidLetter { positive: !self.positive, ..self }
    }

    pub fn cell(self) -> Cell {
        common_cell(self.e, self.f).expect("letter edges are adjacent")
    }

    /// Images of the two moved base arcs.
    pub fn homeo(self) -> Homeo {
        let c = self.cell();
        let vs = c.vertices();
        let (ce, cf) = (self.e.chord(), self.f.chord());
        let v = if cf.has_end(ce.a) { ce.a } else { ce.b };
        let other = |ch: crate::state::Chord| if ch.a == v { ch.b } else { ch.a };
        let idx = |x: Cusp| vs.iter().position(|&y| y == x).expect("vertex of the common cell");
        // name the sides so that u, v, w run counterclockwise around the cell
        let (e1, e2) = if idx(v) == (idx(other(ce)) + 1) % 3 { (self.e, self.f) } else { (self.f, self.e) };
        let (u, w) = (other(e1.chord()), other(e2.chord()));
        let c1 = other_cell(e1, c);
        let c2 = other_cell(e2, c);
        let s = |e: BaseEdge, z: Cusp| Step { edge: e, half: half_at(e, z).expect("edge ends at cusp") };
        let (img1, img2) = if self.positive {
            (
                Arc { tail: u, head: v, left: Path::new(c1, vec![s(e1, v), s(e2, w)]), right: Path::empty(c1), puncture: e2 },
                Arc {
                    tail: v,
                    head: w,
                    left: Path::new(c2, vec![s(e2, w), s(e1, v), s(e1, u)]),
                    right: Path::empty(c2),
                    puncture: e1,
                },
            )
        } else {
            (
                Arc {
                    tail: u,
                    head: v,
                    left: Path::new(c, vec![s(e2, w), s(e2, v), s(e1, u)]),
                    right: Path::empty(c1),
                    puncture: e2,
                },
                Arc { tail: v, head: w, left: Path::new(c1, vec![s(e1, u), s(e2, v)]), right: Path::empty(c2), puncture: e1 },
            )
        };
        Homeo::from_images([img1, img2])
    }
}

impl fmt::Display for BraidLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.positive { "s" } else { "S" };
        write!(f, "{s}({},{})", self.e.address(), self.f.address())
    }
}

impl FromStr for BraidLetter {
    type Err = BraidError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BraidError::InvalidWord(s.to_string());
        let positive = match s.chars().next() {
            Some('s') => true,
            Some('S') => false,
            _ => return Err(bad()),
        };
        let inner = s[1..].strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let edge = |t: &str| -> Result<BaseEdge, BraidError> {
            let addr: EdgeAddress = t.trim().parse().map_err(|_| bad())?;
            BaseEdge::from_address(&addr).map_err(|_| bad())
        };
        BraidLetter::new(edge(a)?, edge(b)?, positive)
    }
}

/// A braid `l1 ∘ l2 ∘ ⋯ ∘ lk`: the last letter acts first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct BraidWord(pub Vec<BraidLetter>);

impl BraidWord {
    pub fn new() -> BraidWord {
        BraidWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `[{e, f, sign}]` with edges as addresses.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.0
                .iter()
                .map(|l| json!({ "e": l.e.address().to_string(), "f": l.f.address().to_string(), "sign": if l.positive { 1 } else { -1 } }))
                .collect(),
        )
    }

    /// `self ∘ other`.
    pub fn then_after(&self, other: &BraidWord) -> BraidWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BraidWord(v)
    }

    /// Cancels adjacent inverse letters.
    pub fn free_reduce(&self) -> BraidWord {
        let mut out: Vec<BraidLetter> = Vec::new();
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        BraidWord(out)
    }

    pub fn homeo(&self) -> Result<Homeo, BraidError> {
        let mut h = Homeo::identity();
        for l in &self.0 {
            h = h.compose(&l.homeo());
        }
        Ok(h)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for BraidWord {
    type Err = BraidError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace().map(str::parse).collect::<Result<Vec<_>, _>>().map(BraidWord)
    }
}
