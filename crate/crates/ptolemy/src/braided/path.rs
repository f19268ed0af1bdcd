//! Paths in the punctured disk, up to homotopy.
//!
//! The disk with one puncture on every base edge retracts onto a graph whose
//! vertices are the base cells. Each base edge contributes two graph edges,
//! one through each half of the edge (the part between the puncture and the
//! lower or upper end of the chord). A path is a start cell plus the list of
//! half-edges it crosses; the direction of each crossing is implied by the
//! current cell.

use std::fmt;

use crate::state::{BaseEdge, Cell, Cusp};

/// One half of a base edge, named by the canonical end it touches.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Half {
    Lo,
    Hi,
}

/// Side of a puncture relative to a traveller crossing its edge.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Step {
    pub edge: BaseEdge,
    pub half: Half,
}

/// Cell on the left of the canonical orientation (the parent, or `B`).
pub fn left_cell(e: BaseEdge) -> Cell {
    e.cells()[1]
}

/// Cell on the right of the canonical orientation (the child, or `A`).
pub fn right_cell(e: BaseEdge) -> Cell {
    e.cells()[0]
}

pub fn other_cell(e: BaseEdge, c: Cell) -> Cell {
    let [x, y] = e.cells();
    debug_assert!(c == x || c == y, "{c:?} is not a cell of {e:?}");
    if c == x {
        y
    } else {
        x
    }
}

pub fn is_side_of(e: BaseEdge, c: Cell) -> bool {
    e.cells().contains(&c)
}

pub fn contains_cusp(c: Cell, w: Cusp) -> bool {
    c.vertices().contains(&w)
}

pub fn half_cusp(e: BaseEdge, h: Half) -> Cusp {
    let o = e.canonical();
    match h {
        Half::Lo => o.tail,
        Half::Hi => o.head,
    }
}

/// The half of `e` touching the cusp `w`, if `w` is an end of `e`.
pub fn half_at(e: BaseEdge, w: Cusp) -> Option<Half> {
    let o = e.canonical();
    if w == o.tail {
        Some(Half::Lo)
    } else if w == o.head {
        Some(Half::Hi)
    } else {
        None
    }
}

/// Which side the puncture of the edge lies on when `s` is crossed from `from`.
pub fn exponent(s: Step, from: Cell) -> Side {
    let from_left = from == left_cell(s.edge);
    match (from_left, s.half) {
        (true, Half::Lo) | (false, Half::Hi) => Side::L,
        (true, Half::Hi) | (false, Half::Lo) => Side::R,
    }
}

/// The crossing of `e` from `from` that leaves the puncture on side `side`.
pub fn step_with(e: BaseEdge, from: Cell, side: Side) -> Step {
    let from_left = from == left_cell(e);
    let half = match (from_left, side) {
        (true, Side::L) | (false, Side::R) => Half::Lo,
        (true, Side::R) | (false, Side::L) => Half::Hi,
    };
    Step { edge: e, half }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Path {
    pub start: Cell,
    pub steps: Vec<Step>,
}

impl Path {
    pub fn empty(c: Cell) -> Path {
        Path { start: c, steps: Vec::new() }
    }

    pub fn new(start: Cell, steps: Vec<Step>) -> Path {
        let p = Path { start, steps };
        debug_assert!(p.is_valid(), "invalid path {p:?}");
        p
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        let mut c = self.start;
        for s in &self.steps {
            if !is_side_of(s.edge, c) {
                return false;
            }
            c = other_cell(s.edge, c);
        }
        true
    }

    /// Cells visited, starting with `start`; one more entry than steps.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut c = self.start;
        out.push(c);
        for s in &self.steps {
            c = other_cell(s.edge, c);
            out.push(c);
        }
        out
    }

    pub fn end(&self) -> Cell {
        self.steps.iter().fold(self.start, |c, s| other_cell(s.edge, c))
    }

    /// Puncture sides along the path.
    pub fn exponents(&self) -> Vec<Side> {
        let cells = self.cells();
        self.steps.iter().zip(&cells).map(|(&s, &c)| exponent(s, c)).collect()
    }

    pub fn reversed(&self) -> Path {
        let mut steps = self.steps.clone();
        steps.reverse();
        Path { start: self.end(), steps }
    }

    /// Cancels immediate backtracks.
    pub fn reduced(&self) -> Path {
        let mut out: Vec<Step> = Vec::with_capacity(self.steps.len());
        for &s in &self.steps {
            if out.last() == Some(&s) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        Path { start: self.start, steps: out }
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn then(&self, other: &Path) -> Path {
        assert_eq!(self.end(), other.start, "paths do not meet");
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Path { start: self.start, steps }.reduced()
    }

    /// Joins two paths that end and start near the same cusp `w`, going
    /// around `w` in between.
    pub fn join_at(&self, other: &Path, w: Cusp) -> Path {
        let bridge = Path { start: self.end(), steps: fan(self.end(), other.start, w) };
        self.then(&bridge).then(other)
    }

    /// Reduced form of a path running from near `tail` to near `head`, with
    /// the freedom of sliding each end around its cusp removed.
    pub fn canonical(&self, tail: Cusp, head: Cusp) -> Path {
        let mut p = self.reduced();
        let mut start = p.start;
        let mut k = 0;
        while k < p.steps.len() && half_at(p.steps[k].edge, tail) == Some(p.steps[k].half) {
            start = other_cell(p.steps[k].edge, start);
            k += 1;
        }
        let mut n = p.steps.len();
        while n > k && half_at(p.steps[n - 1].edge, head) == Some(p.steps[n - 1].half) {
            n -= 1;
        }
        p.steps = p.steps[k..n].to_vec();
        p.start = start;
        p
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.start.address())?;
        for s in &self.steps {
            let h = match s.half {
                Half::Lo => "lo",
                Half::Hi => "hi",
            };
            write!(f, " {}:{h}", s.edge.address())?;
        }
        write!(f, "]")
    }
}

fn chain(c: Cell) -> Vec<Cell> {
    let mut out = vec![c];
    let mut x = c;
    while !x.is_root() {
        x = x.parent();
        out.push(x);
    }
    out
}

/// Base edges crossed by the dual-tree path from `c1` to `c2`, in order.
pub fn tree_edges(c1: Cell, c2: Cell) -> Vec<BaseEdge> {
    if c1 == c2 {
        return Vec::new();
    }
    let (mut ch1, mut ch2) = (chain(c1), chain(c2));
    let mut tail = Vec::new();
    if ch1.last() != ch2.last() {
        tail.push(BaseEdge::Root);
    } else {
        while ch1.len() >= 2 && ch2.len() >= 2 && ch1[ch1.len() - 2] == ch2[ch2.len() - 2] {
            ch1.pop();
            ch2.pop();
        }
    }
    let mut out: Vec<BaseEdge> = ch1[..ch1.len() - 1].iter().map(|c| c.edge_above()).collect();
    out.extend(tail);
    out.extend(ch2[..ch2.len() - 1].iter().rev().map(|c| c.edge_above()));
    out
}

/// Steps around the cusp `w` from `c1` to `c2`; both cells must have `w`
/// as a vertex.
pub fn fan(c1: Cell, c2: Cell, w: Cusp) -> Vec<Step> {
    debug_assert!(contains_cusp(c1, w) && contains_cusp(c2, w), "fan {c1:?} {c2:?} at {w:?}");
    tree_edges(c1, c2)
        .into_iter()
        .map(|e| Step { edge: e, half: half_at(e, w).expect("fan edge ends at the cusp") })
        .collect()
}

/// The dual-tree path between two cells, crossing every edge through its
/// lower half.
pub fn tree_path(c1: Cell, c2: Cell) -> Path {
    let steps = tree_edges(c1, c2).into_iter().map(|e| Step { edge: e, half: Half::Lo }).collect();
    Path { start: c1, steps }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(s: &str) -> Cell {
        Cell::from_address(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn tree_edges_through_root() {
        let a2 = Cell::A.lower();
        let b2 = Cell::B.upper();
        let e = tree_edges(a2, b2);
        assert_eq!(e, vec![BaseEdge::Above(a2), BaseEdge::Root, BaseEdge::Above(b2)]);
        assert_eq!(tree_edges(b2, a2), e.iter().rev().copied().collect::<Vec<_>>());
        let x = Cell::A.lower().upper();
        let y = Cell::A.upper();
        assert_eq!(tree_edges(x, y).len(), 3);
        assert!(tree_edges(y, y).is_empty());
        let _ = cell;
    }

    #[test]
    fn fan_around_zero() {
        // cells at cusp 0: B, A, A.lower, A.lower.lower ...
        let deep = Cell::A.lower().lower();
        let f = fan(Cell::B, deep, Cusp::ZERO);
        assert_eq!(f.len(), 3);
        let p = Path::new(Cell::B, f);
        assert_eq!(p.end(), deep);
        assert!(p.canonical(Cusp::ZERO, Cusp::HALF).is_empty());
    }

    #[test]
    fn exponents_round_trip() {
        for e in [BaseEdge::Root, BaseEdge::Above(Cell::A.upper())] {
            for from in e.cells() {
                for side in [Side::L, Side::R] {
                    assert_eq!(exponent(step_with(e, from, side), from), side);
                }
            }
        }
    }

    #[test]
    fn reduction_and_reversal() {
        let e = BaseEdge::Root;
        let s = Step { edge: e, half: Half::Lo };
        let t = Step { edge: e, half: Half::Hi };
        let p = Path::new(Cell::A, vec![s, s, t]);
        assert_eq!(p.reduced(), Path::new(Cell::A, vec![t]));
        let q = Path::new(Cell::A, vec![s, t]);
        assert_eq!(q.end(), Cell::A);
        assert_eq!(q.then(&q.reversed()), Path::empty(Cell::A));
        // a loop around the puncture keeps it on one side twice
        assert_eq!(q.exponents(), vec![Side::R, Side::R]);
    }
}
