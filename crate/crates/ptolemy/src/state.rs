//! Labeled Farey-type triangulations and the local moves F and R.
//!
//! The base tessellation is modeled on the dyadic circle `[0, 1)`: its cusps
//! are the dyadic rationals and its triangles are the standard dyadic
//! intervals `I` of length at most 1/2, each spanning the triangle
//! `(lo(I), mid(I), hi(I))`. The two half circles `A = [0, 1/2]` and
//! `B = [1/2, 1]` share the root edge `{0, 1/2}`. A triangle is a vertex of the
//! dual trivalent tree, called a [`Cell`] here.
//!
//! A [`LabeledState`] stores the chords of its triangulation that are not base
//! edges together with the distinguished oriented edge (d.o.e.). Every other
//! edge is the base edge it would be anyway, so this pair is already a
//! canonical form; the support polygon is derived from it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Number of fractional bits of a cusp coordinate.
pub const PREC: u32 = 120;
const ONE: u128 = 1 << PREC;
const HALF: u128 = ONE >> 1;
/// Deepest cell level that still has a representable midpoint.
pub const MAX_LEVEL: u8 = (PREC - 1) as u8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("cell {0} is not adjacent to the support")]
    NotAdjacent(String),
    #[error("chord {0} is not an edge of the triangulation")]
    NotAnEdge(String),
    #[error("invalid move letter {ch:?} at position {pos}")]
    BadLetter { pos: usize, ch: char },
    #[error("invalid address {0:?}")]
    BadAddress(String),
}

/// A dyadic point of the circle, stored as a fixed-point fraction of a turn.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cusp(u128);

impl Cusp {
    pub const ZERO: Cusp = Cusp(0);
    pub const HALF: Cusp = Cusp(HALF);

    /// The cusp `num / 2^level`, taken modulo one.
    pub fn dyadic(num: u128, level: u32) -> Cusp {
        assert!(level <= PREC);
        Cusp((num << (PREC - level)) & (ONE - 1))
    }

    pub fn raw(self) -> u128 {
        self.0
    }

    /// Dyadic level: 0 for the cusp 0, `k` for `odd / 2^k`.
    pub fn level(self) -> u32 {
        if self.0 == 0 {
            0
        } else {
            PREC - self.0.trailing_zeros()
        }
    }

    pub fn to_f64(self) -> f64 {
        (self.0 >> 60) as f64 / (1u128 << 60) as f64
    }
}

impl fmt::Debug for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.level();
        write!(f, "{}/2^{}", self.0 >> (PREC - k), k)
    }
}

/// A triangle of the base tessellation, i.e. a vertex of the dual tree.
///
/// The cell `(lo, k)` is the standard interval `[lo, lo + 2^-k]`, `k >= 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Cell {
    lo: u128,
    k: u8,
}

impl Cell {
    /// The root triangle `(0, 1/4, 1/2)`, on the right of the base d.o.e.
    pub const A: Cell = Cell { lo: 0, k: 1 };
    /// The root triangle `(1/2, 3/4, 0)`, on the left of the base d.o.e.
    pub const B: Cell = Cell { lo: HALF, k: 1 };

    pub(crate) fn new(lo: u128, k: u8) -> Cell {
        assert!(
            k <= MAX_LEVEL,
            "triangulation support is deeper than the supported {MAX_LEVEL} levels"
        );
        debug_assert_eq!(lo % (ONE >> k), 0);
        Cell { lo, k }
    }

    pub fn level(self) -> u8 {
        self.k
    }

    /// The standard interval running counterclockwise from `lo` to `hi`.
    pub fn from_interval(lo: Cusp, hi: Cusp) -> Option<Cell> {
        let len = (hi.0.wrapping_sub(lo.0)) & (ONE - 1);
        let len = if len == 0 { ONE } else { len };
        if !len.is_power_of_two() || len > HALF || !lo.0.is_multiple_of(len) {
            return None;
        }
        Some(Cell::new(lo.0, (PREC - len.trailing_zeros()) as u8))
    }

    pub(crate) fn len(self) -> u128 {
        ONE >> self.k
    }

    pub fn lo(self) -> Cusp {
        Cusp(self.lo)
    }

    pub fn mid(self) -> Cusp {
        Cusp(self.lo + self.len() / 2)
    }

    pub fn hi(self) -> Cusp {
        Cusp((self.lo + self.len()) & (ONE - 1))
    }

    pub fn vertices(self) -> [Cusp; 3] {
        [self.lo(), self.mid(), self.hi()]
    }

    pub fn lower(self) -> Cell {
        Cell::new(self.lo, self.k + 1)
    }

    pub fn upper(self) -> Cell {
        Cell::new(self.lo + self.len() / 2, self.k + 1)
    }

    /// Neighbor across the edge `{lo, hi}`: the parent interval, or the
    /// other root triangle.
    pub fn parent(self) -> Cell {
        if self.k == 1 {
            Cell { lo: self.lo ^ HALF, k: 1 }
        } else {
            let len = self.len() << 1;
            Cell::new(self.lo - self.lo % len, self.k - 1)
        }
    }

    pub fn neighbors(self) -> [Cell; 3] {
        [self.parent(), self.lower(), self.upper()]
    }

    pub fn is_root(self) -> bool {
        self.k == 1
    }

    /// Whether this is the lower half of its parent interval.
    pub fn lower_sibling(self) -> bool {
        self.k >= 2 && self.lo.is_multiple_of(self.len() << 1)
    }

    /// Base edge separating this cell from its parent.
    pub fn edge_above(self) -> BaseEdge {
        if self.k == 1 {
            BaseEdge::Root
        } else {
            BaseEdge::Above(self)
        }
    }

    pub fn address(self) -> CellAddress {
        let anchor = if self.lo < HALF { Anchor::Tail } else { Anchor::Head };
        let turns = (2..=self.k)
            .map(|j| {
                if self.lo >> (PREC - j as u32) & 1 == 1 {
                    Turn::L
                } else {
                    Turn::R
                }
            })
            .collect();
        CellAddress { anchor, turns }
    }

    pub fn from_address(addr: &CellAddress) -> Result<Cell, StateError> {
        let mut c = match addr.anchor {
            Anchor::Tail => Cell::A,
            Anchor::Head => Cell::B,
            Anchor::Root => return Err(StateError::BadAddress(addr.to_string())),
        };
        for t in &addr.turns {
            if c.k >= MAX_LEVEL {
                return Err(StateError::BadAddress(addr.to_string()));
            }
            c = match t {
                Turn::L => c.upper(),
                Turn::R => c.lower(),
            };
        }
        Ok(c)
    }

    fn contains_closed(self, x: Cusp) -> bool {
        let hi = self.lo + self.len();
        (x.0 >= self.lo && x.0 <= hi) || (hi == ONE && x.0 == 0)
    }
}

/// An edge of the base tessellation (equivalently, of the dual tree).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BaseEdge {
    Root,
    /// The edge between a non-root cell and its parent.
    Above(Cell),
}

impl BaseEdge {
    pub fn cells(self) -> [Cell; 2] {
        match self {
            BaseEdge::Root => [Cell::A, Cell::B],
            BaseEdge::Above(c) => [c, c.parent()],
        }
    }

    pub fn chord(self) -> Chord {
        match self {
            BaseEdge::Root => Chord::new(Cusp::ZERO, Cusp::HALF),
            BaseEdge::Above(c) => Chord::new(c.lo(), c.hi()),
        }
    }

    /// Canonical orientation: from the lower to the upper end of the
    /// interval, so that the child cell lies on the right.
    pub fn canonical(self) -> OrientedChord {
        match self {
            BaseEdge::Root => OrientedChord::new(Cusp::ZERO, Cusp::HALF),
            BaseEdge::Above(c) => OrientedChord::new(c.lo(), c.hi()),
        }
    }

    pub fn address(self) -> EdgeAddress {
        match self {
            BaseEdge::Root => EdgeAddress::root(),
            BaseEdge::Above(c) => {
                let a = c.address();
                EdgeAddress { anchor: a.anchor, turns: a.turns }
            }
        }
    }

    pub fn from_address(addr: &EdgeAddress) -> Result<BaseEdge, StateError> {
        match addr.anchor {
            Anchor::Root if addr.turns.is_empty() => Ok(BaseEdge::Root),
            Anchor::Root => Err(StateError::BadAddress(addr.to_string())),
            _ if addr.turns.is_empty() => Err(StateError::BadAddress(addr.to_string())),
            _ => Ok(BaseEdge::Above(Cell::from_address(&CellAddress {
                anchor: addr.anchor,
                turns: addr.turns.clone(),
            })?)),
        }
    }

    /// Dual-tree edge order used to enumerate edges: by address length, then
    /// turns, then anchor, with the root first.
    pub fn order_key(self) -> (usize, Vec<Turn>, Anchor) {
        let a = self.address();
        (a.turns.len(), a.turns, a.anchor)
    }
}

/// A chord between two distinct cusps, stored with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Chord {
    pub a: Cusp,
    pub b: Cusp,
}

impl Chord {
    pub fn new(x: Cusp, y: Cusp) -> Chord {
        assert_ne!(x, y, "degenerate chord");
        if x < y {
            Chord { a: x, b: y }
        } else {
            Chord { a: y, b: x }
        }
    }

    pub fn has_end(self, x: Cusp) -> bool {
        self.a == x || self.b == x
    }

    /// The base edge with these endpoints, if there is one.
    pub fn base_edge(self) -> Option<BaseEdge> {
        let (a, b) = (self.a.0, self.b.0);
        let d = b - a;
        if a == 0 && b == HALF {
            return Some(BaseEdge::Root);
        }
        if d.is_power_of_two() && d < HALF && a % d == 0 {
            let k = (PREC - d.trailing_zeros()) as u8;
            return Some(BaseEdge::Above(Cell::new(a, k)));
        }
        let e = ONE - d;
        if e.is_power_of_two() && e < HALF && b % e == 0 {
            let k = (PREC - e.trailing_zeros()) as u8;
            return Some(BaseEdge::Above(Cell::new(b, k)));
        }
        None
    }

    pub fn is_base(self) -> bool {
        self.base_edge().is_some()
    }

    /// Standard crossing predicate for chords of a circle.
    pub fn crosses(self, other: Chord) -> bool {
        let inside = |x: Cusp| x > self.a && x < self.b;
        let on = |x: Cusp| x == self.a || x == self.b;
        if on(other.a) || on(other.b) {
            return false;
        }
        inside(other.a) != inside(other.b)
    }

    /// Base cells whose interior the chord meets, sorted. Empty for base
    /// edges.
    pub fn cells_crossed(self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for (x, y) in [(self.a, self.b), (self.b, self.a)] {
            for j in 2..x.level() {
                let len = ONE >> j;
                let c = Cell::new(x.0 - x.0 % len, j as u8);
                if !c.contains_closed(y) {
                    cells.push(c);
                    cells.push(c.parent());
                }
            }
        }
        let side = |x: Cusp| {
            if x.0 == 0 || x.0 == HALF {
                0
            } else if x.0 < HALF {
                1
            } else {
                2
            }
        };
        let (sa, sb) = (side(self.a), side(self.b));
        if sa != 0 && sb != 0 && sa != sb {
            cells.push(Cell::A);
            cells.push(Cell::B);
        }
        cells.sort();
        cells.dedup();
        cells
    }
}

/// A chord with a direction, used for the d.o.e.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OrientedChord {
    pub tail: Cusp,
    pub head: Cusp,
}

impl OrientedChord {
    pub fn new(tail: Cusp, head: Cusp) -> OrientedChord {
        assert_ne!(tail, head, "degenerate chord");
        OrientedChord { tail, head }
    }

    pub fn chord(self) -> Chord {
        Chord::new(self.tail, self.head)
    }

    pub fn reversed(self) -> OrientedChord {
        OrientedChord { tail: self.head, head: self.tail }
    }

    /// Orientation relative to the canonical one, for base edges.
    pub fn orientation(self) -> Option<Orientation> {
        let e = self.chord().base_edge()?;
        Some(if e.canonical() == self {
            Orientation::Canonical
        } else {
            Orientation::Reversed
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Anchor {
    Root,
    /// Side of the root cell `B`, on the left of the base d.o.e.
    Head,
    /// Side of the root cell `A`, on the right of the base d.o.e.
    Tail,
}

/// Turn taken when descending into a cell: `L` enters the upper half of the
/// interval, which lies on the left when looking from the parent edge.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Turn {
    L,
    R,
}

fn fmt_turns(f: &mut fmt::Formatter<'_>, turns: &[Turn]) -> fmt::Result {
    for t in turns {
        f.write_str(match t {
            Turn::L => "L",
            Turn::R => "R",
        })?;
    }
    Ok(())
}

fn parse_turns(s: &str, whole: &str) -> Result<Vec<Turn>, StateError> {
    s.chars()
        .map(|c| match c {
            'L' => Ok(Turn::L),
            'R' => Ok(Turn::R),
            _ => Err(StateError::BadAddress(whole.to_string())),
        })
        .collect()
}

/// Address of an edge of the dual tree: `root`, or a walk from one endpoint
/// of the root dual edge.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeAddress {
    pub anchor: Anchor,
    pub turns: Vec<Turn>,
}

impl EdgeAddress {
    pub fn root() -> EdgeAddress {
        EdgeAddress { anchor: Anchor::Root, turns: Vec::new() }
    }
}

impl fmt::Display for EdgeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.anchor {
            Anchor::Root => f.write_str("root"),
            Anchor::Head => {
                f.write_str("h")?;
                fmt_turns(f, &self.turns)
            }
            Anchor::Tail => {
                f.write_str("t")?;
                fmt_turns(f, &self.turns)
            }
        }
    }
}

impl FromStr for EdgeAddress {
    type Err = StateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "root" {
            return Ok(EdgeAddress::root());
        }
        let anchor = match s.chars().next() {
            Some('h') => Anchor::Head,
            Some('t') => Anchor::Tail,
            _ => return Err(StateError::BadAddress(s.to_string())),
        };
        let turns = parse_turns(&s[1..], s)?;
        if turns.is_empty() {
            return Err(StateError::BadAddress(s.to_string()));
        }
        Ok(EdgeAddress { anchor, turns })
    }
}

/// Address of a cell: a root cell and the turns leading down from it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CellAddress {
    pub anchor: Anchor,
    pub turns: Vec<Turn>,
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.anchor == Anchor::Head { "h" } else { "t" })?;
        fmt_turns(f, &self.turns)
    }
}

impl FromStr for CellAddress {
    type Err = StateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let anchor = match s.chars().next() {
            Some('h') => Anchor::Head,
            Some('t') => Anchor::Tail,
            _ => return Err(StateError::BadAddress(s.to_string())),
        };
        Ok(CellAddress { anchor, turns: parse_turns(&s[1..], s)? })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Orientation {
    Canonical,
    Reversed,
}

/// A base edge with an orientation flag relative to its canonical one.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OrientedEdge {
    pub address: EdgeAddress,
    pub orientation: Orientation,
}

impl OrientedEdge {
    pub fn chord(&self) -> Result<OrientedChord, StateError> {
        let c = BaseEdge::from_address(&self.address)?.canonical();
        Ok(match self.orientation {
            Orientation::Canonical => c,
            Orientation::Reversed => c.reversed(),
        })
    }
}

/// Smallest subtree of the dual tree containing the given cells, sorted.
pub fn hull(cells: &[Cell]) -> Vec<Cell> {
    let mut set: BTreeSet<Cell> = cells.iter().copied().collect();
    let Some(&first) = set.iter().next() else {
        return Vec::new();
    };
    let two_sided = set.iter().any(|c| c.lo < HALF) && set.iter().any(|c| c.lo >= HALF);
    let top = if two_sided {
        None
    } else {
        // smallest standard interval containing every cell
        let mut top = first;
        for &c in cells {
            while !(top.k <= c.k && c.lo >= top.lo && c.lo < top.lo + top.len()) {
                top = top.parent();
            }
        }
        Some(top)
    };
    let mut extra = Vec::new();
    for &c in &set {
        let mut x = c;
        loop {
            if Some(x) == top || x.is_root() {
                break;
            }
            x = x.parent();
            extra.push(x);
        }
    }
    set.extend(extra);
    if two_sided {
        set.insert(Cell::A);
        set.insert(Cell::B);
    }
    set.into_iter().collect()
}

/// The support polygon: a connected set of base cells.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SupportPolygon {
    pub cells: Vec<Cell>,
}

impl SupportPolygon {
    /// Cusps of the polygon in counterclockwise order starting from the
    /// smallest.
    pub fn cusps(&self) -> Vec<Cusp> {
        let mut v: Vec<Cusp> = self.cells.iter().flat_map(|c| c.vertices()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Base edges between two cells of the polygon.
    pub fn internal_edges(&self) -> Vec<BaseEdge> {
        let mut out = Vec::new();
        for &c in &self.cells {
            if c.is_root() {
                if c == Cell::A && self.cells.binary_search(&Cell::B).is_ok() {
                    out.push(BaseEdge::Root);
                }
            } else if self.cells.binary_search(&c.parent()).is_ok() {
                out.push(BaseEdge::Above(c));
            }
        }
        out
    }

    /// Cells outside the polygon sharing an edge with it.
    pub fn frontier(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = self
            .cells
            .iter()
            .flat_map(|c| c.neighbors())
            .filter(|n| self.cells.binary_search(n).is_err())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Triangulation of the support polygon, by boundary positions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolygonTriangulation {
    pub boundary_size: usize,
    pub diagonals: Vec<(usize, usize)>,
}

impl PolygonTriangulation {
    pub fn is_valid(&self) -> bool {
        let n = self.boundary_size;
        if n < 3 || self.diagonals.len() != n - 3 {
            return false;
        }
        for &(i, j) in &self.diagonals {
            if i >= j || j >= n || j - i < 2 || (i == 0 && j == n - 1) {
                return false;
            }
        }
        for (x, &(a, b)) in self.diagonals.iter().enumerate() {
            for &(c, d) in &self.diagonals[x + 1..] {
                if (a, b) == (c, d) {
                    return false;
                }
                let inside = |p: usize| p > a && p < b;
                let on = |p: usize| p == a || p == b;
                if !on(c) && !on(d) && inside(c) != inside(d) {
                    return false;
                }
            }
        }
        true
    }
}

/// Working copy of the triangulation restricted to a polygon.
pub(crate) struct Local {
    pub cusps: Vec<Cusp>,
    nbrs: Vec<Vec<usize>>,
}

impl Local {
    pub fn build(cells: &[Cell], diags: &[Chord]) -> Local {
        let poly = SupportPolygon { cells: cells.to_vec() };
        let cusps = poly.cusps();
        let n = cusps.len();
        let idx = |x: Cusp| cusps.binary_search(&x).expect("chord end outside polygon");
        let mut nbrs = vec![Vec::new(); n];
        let mut add = |i: usize, j: usize| {
            nbrs[i].push(j);
            nbrs[j].push(i);
        };
        for i in 0..n {
            add(i, (i + 1) % n);
        }
        for d in diags {
            add(idx(d.a), idx(d.b));
        }
        for e in poly.internal_edges() {
            let c = e.chord();
            if !diags.iter().any(|d| d.crosses(c)) {
                add(idx(c.a), idx(c.b));
            }
        }
        for v in &mut nbrs {
            v.sort();
            v.dedup();
        }
        Local { cusps, nbrs }
    }

    pub fn index(&self, x: Cusp) -> usize {
        self.cusps.binary_search(&x).expect("cusp outside polygon")
    }

    /// Apex of the triangle on the counterclockwise arc from `x` to `y`.
    pub fn apex(&self, x: Cusp, y: Cusp) -> Cusp {
        let n = self.cusps.len();
        let (i, j) = (self.index(x), self.index(y));
        let span = (j + n - i) % n;
        let k = self.nbrs[i]
            .iter()
            .copied()
            .filter(|&k| {
                let d = (k + n - i) % n;
                d > 0 && d < span
            })
            .max_by_key(|&k| (k + n - i) % n)
            .expect("no triangle on this side");
        self.cusps[k]
    }

    pub fn left_apex(&self, e: OrientedChord) -> Cusp {
        self.apex(e.head, e.tail)
    }

    pub fn right_apex(&self, e: OrientedChord) -> Cusp {
        self.apex(e.tail, e.head)
    }

    /// All chords of the local triangulation that are diagonals.
    pub fn diagonals(&self) -> Vec<Chord> {
        let n = self.cusps.len();
        let mut out = Vec::new();
        for i in 0..n {
            for &j in &self.nbrs[i] {
                if j > i + 1 && !(i == 0 && j == n - 1) {
                    out.push(Chord::new(self.cusps[i], self.cusps[j]));
                }
            }
        }
        out
    }

    /// The same triangulation on vertices `0..n`.
    pub fn to_poly(&self) -> crate::polygon::PolyTri {
        let d: Vec<(usize, usize)> = self.diagonals().into_iter().map(|c| (self.index(c.a), self.index(c.b))).collect();
        crate::polygon::PolyTri::new(self.cusps.len(), &d).expect("local triangulation is complete")
    }

    pub fn has_chord(&self, c: Chord) -> bool {
        match (self.cusps.binary_search(&c.a), self.cusps.binary_search(&c.b)) {
            (Ok(i), Ok(j)) => self.nbrs[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }
}

/// The local moves: F, F⁻¹, R, R⁻¹.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Move {
    F,
    FInv,
    R,
    RInv,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::F, Move::FInv, Move::R, Move::RInv];

    pub fn inverse(self) -> Move {
        match self {
            Move::F => Move::FInv,
            Move::FInv => Move::F,
            Move::R => Move::RInv,
            Move::RInv => Move::R,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Move::F => 'f',
            Move::FInv => 'F',
            Move::R => 'r',
            Move::RInv => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Move> {
        match c {
            'f' => Some(Move::F),
            'F' => Some(Move::FInv),
            'r' => Some(Move::R),
            'R' => Some(Move::RInv),
            _ => None,
        }
    }
}

/// A word in the moves, applied left to right.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct MoveWord(pub Vec<Move>);

impl MoveWord {
    pub fn new() -> MoveWord {
        MoveWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> MoveWord {
        MoveWord(self.0.iter().rev().map(|m| m.inverse()).collect())
    }

    pub fn push(&mut self, m: Move) {
        self.0.push(m);
    }

    pub fn extend(&mut self, w: &MoveWord) {
        self.0.extend_from_slice(&w.0);
    }

    pub fn concat(&self, w: &MoveWord) -> MoveWord {
        let mut out = self.clone();
        out.extend(w);
        out
    }

    /// Cancels adjacent inverse pairs.
    pub fn free_reduce(&self) -> MoveWord {
        let mut out: Vec<Move> = Vec::with_capacity(self.0.len());
        for &m in &self.0 {
            if out.last() == Some(&m.inverse()) {
                out.pop();
            } else {
                out.push(m);
            }
        }
        MoveWord(out)
    }

    pub fn has_inverse_pair(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == w[1].inverse())
    }
}

impl fmt::Display for MoveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.0 {
            write!(f, "{}", m.letter())?;
        }
        Ok(())
    }
}

impl FromStr for MoveWord {
    type Err = StateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .filter(|(_, c)| !c.is_whitespace())
            .map(|(pos, ch)| Move::from_letter(ch).ok_or(StateError::BadLetter { pos, ch }))
            .collect::<Result<Vec<_>, _>>()
            .map(MoveWord)
    }
}

/// A triangulation agreeing with the base outside a finite polygon, with a
/// distinguished oriented edge.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct LabeledState {
    /// Chords of the triangulation that are not base edges, sorted.
    diags: Vec<Chord>,
    doe: OrientedChord,
    /// Support cells, sorted. Minimal unless grown explicitly.
    support: Vec<Cell>,
}

/// Canonical identity of a state, independent of any explicit support growth.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct StateKey {
    pub diags: Vec<Chord>,
    pub doe: OrientedChord,
}

impl LabeledState {
    pub fn base() -> LabeledState {
        LabeledState::from_parts(Vec::new(), BaseEdge::Root.canonical())
    }

    /// Builds the normalized state with the given non-base chords and d.o.e.
    ///
    /// Base chords in `diags` are dropped. The chords must be pairwise
    /// non-crossing and the d.o.e. must not cross any of them.
    pub fn from_parts(mut diags: Vec<Chord>, doe: OrientedChord) -> LabeledState {
        diags.retain(|c| !c.is_base());
        diags.sort();
        diags.dedup();
        let support = minimal_support(&diags, doe);
        LabeledState { diags, doe, support }
    }

    pub fn diags(&self) -> &[Chord] {
        &self.diags
    }

    pub fn doe(&self) -> OrientedChord {
        self.doe
    }

    pub fn key(&self) -> StateKey {
        StateKey { diags: self.diags.clone(), doe: self.doe }
    }

    pub fn support(&self) -> SupportPolygon {
        SupportPolygon { cells: self.support.clone() }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.support
    }

    pub fn is_base(&self) -> bool {
        self.diags.is_empty() && self.doe == BaseEdge::Root.canonical()
    }

    pub fn is_base_triangulation(&self) -> bool {
        self.diags.is_empty()
    }

    pub(crate) fn local(&self) -> Local {
        Local::build(&self.support, &self.diags)
    }

    pub(crate) fn local_with(&self, extra: &[Cell]) -> Local {
        let mut cells = self.support.clone();
        cells.extend_from_slice(extra);
        Local::build(&hull(&cells), &self.diags)
    }

    pub fn normalize(&self) -> LabeledState {
        LabeledState::from_parts(self.diags.clone(), self.doe)
    }

    pub fn is_normalized(&self) -> bool {
        self.support == minimal_support(&self.diags, self.doe)
    }

    /// Adds one base cell adjacent to the support. The element is unchanged.
    pub fn grow_support(&self, cell: Cell) -> Result<LabeledState, StateError> {
        if self.support.binary_search(&cell).is_ok()
            || !cell.neighbors().iter().any(|n| self.support.binary_search(n).is_ok())
        {
            return Err(StateError::NotAdjacent(cell.address().to_string()));
        }
        let mut out = self.clone();
        let pos = out.support.binary_search(&cell).unwrap_err();
        out.support.insert(pos, cell);
        Ok(out)
    }

    /// Whether the chord is an edge of the (infinite) triangulation.
    pub fn has_edge(&self, c: Chord) -> bool {
        if c.is_base() {
            !self.diags.iter().any(|d| d.crosses(c))
        } else {
            self.diags.binary_search(&c).is_ok()
        }
    }

    /// Apex of the triangle adjacent to edge `e` on its left.
    pub fn left_apex(&self, e: OrientedChord) -> Cusp {
        self.local_for(e.chord()).left_apex(e)
    }

    /// Apex of the triangle adjacent to edge `e` on its right.
    pub fn right_apex(&self, e: OrientedChord) -> Cusp {
        self.local_for(e.chord()).right_apex(e)
    }

    fn local_for(&self, c: Chord) -> Local {
        match c.base_edge() {
            Some(be) => self.local_with(&be.cells()),
            None => self.local(),
        }
    }

    /// Flips an edge. When the edge is the d.o.e. the new d.o.e. is the new
    /// diagonal, oriented so that the old and new edges form a positive frame.
    pub fn flip(&self, edge: Chord) -> Result<LabeledState, StateError> {
        if !self.has_edge(edge) {
            return Err(StateError::NotAnEdge(format!("{edge:?}")));
        }
        let e = OrientedChord::new(edge.a, edge.b);
        let local = self.local_for(edge);
        let x = local.left_apex(e);
        let y = local.right_apex(e);
        let mut diags: Vec<Chord> = self.diags.iter().copied().filter(|&d| d != edge).collect();
        diags.push(Chord::new(x, y));
        let doe = if self.doe.chord() == edge {
            let (x, y) = (local.left_apex(self.doe), local.right_apex(self.doe));
            OrientedChord::new(y, x)
        } else {
            self.doe
        };
        Ok(LabeledState::from_parts(diags, doe))
    }

    pub fn move_f(&self) -> LabeledState {
        self.flip(self.doe.chord()).expect("d.o.e. is an edge")
    }

    /// Moves the d.o.e. to the next edge of the triangle on its left,
    /// keeping that triangle on its left: `(t, h)` becomes `(h, x)`.
    pub fn move_r(&self) -> LabeledState {
        let x = self.local().left_apex(self.doe);
        let doe = OrientedChord::new(self.doe.head, x);
        LabeledState {
            diags: self.diags.clone(),
            doe,
            support: minimal_support(&self.diags, doe),
        }
    }

    pub fn apply(&self, m: Move) -> LabeledState {
        match m {
            Move::F => self.move_f(),
            Move::FInv => self.move_f().move_f().move_f(),
            Move::R => self.move_r(),
            Move::RInv => self.move_r().move_r(),
        }
    }

    pub fn apply_word(&self, w: &MoveWord) -> LabeledState {
        w.0.iter().fold(self.clone(), |s, &m| s.apply(m))
    }

    /// Same as [`apply_word`](Self::apply_word) but keeps every prefix state,
    /// starting with `self`.
    pub fn trajectory(&self, w: &MoveWord) -> Vec<LabeledState> {
        let mut out = Vec::with_capacity(w.len() + 1);
        out.push(self.clone());
        for &m in &w.0 {
            let next = out.last().unwrap().apply(m);
            out.push(next);
        }
        out
    }

    /// Triangulation of the support polygon.
    pub fn triangulation(&self) -> PolygonTriangulation {
        let local = self.local();
        let mut diagonals: Vec<(usize, usize)> = local
            .diagonals()
            .into_iter()
            .map(|c| (local.index(c.a), local.index(c.b)))
            .collect();
        diagonals.sort();
        PolygonTriangulation { boundary_size: local.cusps.len(), diagonals }
    }

    /// All edges of the triangulation that are diagonals of the support.
    pub fn support_diagonals(&self) -> Vec<Chord> {
        self.local().diagonals()
    }

    /// Canonical JSON with sorted keys.
    pub fn to_json(&self) -> Value {
        let local = self.local();
        let tri = self.triangulation();
        let support: Vec<String> = self.support.iter().map(|c| c.address().to_string()).collect();
        let diagonals: Vec<[usize; 2]> = tri.diagonals.iter().map(|&(i, j)| [i, j]).collect();
        json!({
            "support": support,
            "diagonals": diagonals,
            "doe": {
                "tail": local.index(self.doe.tail),
                "head": local.index(self.doe.head),
            },
        })
    }

    /// Rebuilds a state from [`to_json`](Self::to_json) output.
    pub fn from_json(v: &Value) -> Result<LabeledState, StateError> {
        let bad = || StateError::BadAddress(v.to_string());
        let cells = v["support"]
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|a| {
                let s = a.as_str().ok_or_else(bad)?;
                Cell::from_address(&s.parse()?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut cells = cells;
        cells.sort();
        cells.dedup();
        if hull(&cells) != cells {
            return Err(bad());
        }
        let cusps = SupportPolygon { cells: cells.clone() }.cusps();
        let at = |x: &Value| -> Result<Cusp, StateError> {
            let i = x.as_u64().ok_or_else(bad)? as usize;
            cusps.get(i).copied().ok_or_else(bad)
        };
        let mut diags = Vec::new();
        for d in v["diagonals"].as_array().ok_or_else(bad)? {
            let d = d.as_array().ok_or_else(bad)?;
            if d.len() != 2 {
                return Err(bad());
            }
            diags.push(Chord::new(at(&d[0])?, at(&d[1])?));
        }
        let doe = OrientedChord::new(at(&v["doe"]["tail"])?, at(&v["doe"]["head"])?);
        let tri = PolygonTriangulation {
            boundary_size: cusps.len(),
            diagonals: diags
                .iter()
                .map(|c| {
                    let i = cusps.binary_search(&c.a).unwrap();
                    let j = cusps.binary_search(&c.b).unwrap();
                    (i, j)
                })
                .collect(),
        };
        if !tri.is_valid() {
            return Err(bad());
        }
        let state = LabeledState::from_parts(diags, doe);
        if !state.has_edge(doe.chord()) {
            return Err(bad());
        }
        Ok(state)
    }

    /// SHA-256 of the canonical JSON of the normalized state.
    pub fn fingerprint(&self) -> String {
        let s = self.normalize().to_json().to_string();
        hex::encode(Sha256::digest(s.as_bytes()))
    }
}

/// Equality of the represented elements.
pub fn state_equal(a: &LabeledState, b: &LabeledState) -> bool {
    a.diags == b.diags && a.doe == b.doe
}

fn minimal_support(diags: &[Chord], doe: OrientedChord) -> Vec<Cell> {
    let mut cells: Vec<Cell> = diags.iter().flat_map(|d| d.cells_crossed()).collect();
    match doe.chord().base_edge() {
        Some(e) => cells.extend(e.cells()),
        None => cells.extend(doe.chord().cells_crossed()),
    }
    hull(&cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> MoveWord {
        s.parse().unwrap()
    }

    fn q(n: u128, k: u32) -> Cusp {
        Cusp::dyadic(n, k)
    }

    #[test]
    fn base_is_root_quadrilateral() {
        let s = LabeledState::base();
        assert_eq!(s.cells(), &[Cell::A, Cell::B]);
        assert_eq!(s.support().cusps(), vec![q(0, 0), q(1, 2), q(1, 1), q(3, 2)]);
        assert_eq!(s.triangulation(), PolygonTriangulation { boundary_size: 4, diagonals: vec![(0, 2)] });
    }

    #[test]
    fn base_chords_are_recognized() {
        assert_eq!(Chord::new(q(0, 0), q(1, 1)).base_edge(), Some(BaseEdge::Root));
        assert!(Chord::new(q(3, 2), q(0, 0)).is_base());
        assert!(Chord::new(q(1, 2), q(3, 3)).is_base());
        assert!(!Chord::new(q(1, 2), q(3, 2)).is_base());
        assert!(!Chord::new(q(1, 3), q(1, 2)).is_base() || q(1, 3) < q(1, 2));
        assert!(!Chord::new(q(3, 3), q(5, 3)).is_base());
    }

    #[test]
    fn crossed_cells_of_the_flipped_root() {
        let c = Chord::new(q(1, 2), q(3, 2));
        assert_eq!(c.cells_crossed(), vec![Cell::A, Cell::B]);
        let c = Chord::new(q(1, 3), q(1, 1));
        assert_eq!(c.cells_crossed(), vec![Cell::A, Cell::A.lower()]);
    }

    #[test]
    fn flip_root_rotates_quadrilateral() {
        let s = LabeledState::base().move_f();
        assert_eq!(s.diags(), &[Chord::new(q(1, 2), q(3, 2))]);
        assert_eq!(s.doe(), OrientedChord::new(q(1, 2), q(3, 2)));
        let s2 = s.move_f();
        assert!(s2.is_base_triangulation());
        assert_eq!(s2.doe(), BaseEdge::Root.canonical().reversed());
    }

    #[test]
    fn rotation_moves_doe_in_left_triangle() {
        let s = LabeledState::base().move_r();
        assert_eq!(s.doe(), OrientedChord::new(q(1, 1), q(3, 2)));
        assert!(s.is_base_triangulation());
        assert!(!state_equal(&s, &LabeledState::base().move_f()));
    }

    #[test]
    fn torsion_relations_on_base() {
        let b = LabeledState::base();
        assert!(state_equal(&b.apply_word(&w("ffff")), &b));
        assert!(state_equal(&b.apply_word(&w("rrr")), &b));
        assert!(state_equal(&b.apply_word(&w("frfrfrfrfr")), &b));
        assert!(state_equal(&b.apply_word(&w("rfrfrfrfrf")), &b));
        assert!(!state_equal(&b.apply_word(&w("ff")), &b));
    }

    #[test]
    fn grow_then_normalize_is_identity() {
        let b = LabeledState::base();
        let g = b.grow_support(Cell::A.lower()).unwrap();
        assert_eq!(g.support().cusps().len(), 5);
        let g2 = g.grow_support(Cell::A.lower().upper()).unwrap();
        assert_eq!(g2.support().cusps().len(), 6);
        assert!(state_equal(&g2, &b));
        assert_eq!(g2.normalize(), b);
        assert!(b.grow_support(Cell::A.lower().lower()).is_err());
    }

    #[test]
    fn flip_far_edge_is_involution() {
        let b = LabeledState::base();
        let e = BaseEdge::Above(Cell::B.upper().lower()).chord();
        let s = b.flip(e).unwrap();
        assert!(!state_equal(&s, &b));
        let f = s.diags()[0];
        assert!(state_equal(&s.flip(f).unwrap(), &b));
    }

    #[test]
    fn addresses_round_trip() {
        let c = Cell::B.upper().lower().upper();
        let a = c.address();
        assert_eq!(a.to_string(), "hLRL");
        assert_eq!(Cell::from_address(&a.to_string().parse().unwrap()).unwrap(), c);
        let e = BaseEdge::Above(c).address();
        assert_eq!(BaseEdge::from_address(&e.to_string().parse().unwrap()).unwrap(), BaseEdge::Above(c));
        assert_eq!("root".parse::<EdgeAddress>().unwrap(), EdgeAddress::root());
    }

    #[test]
    fn json_round_trip() {
        let s = LabeledState::base().apply_word(&w("frfrrfF"));
        let v = s.to_json();
        assert_eq!(LabeledState::from_json(&v).unwrap(), s);
        assert_eq!(s.fingerprint().len(), 64);
    }

    #[test]
    fn word_syntax() {
        assert_eq!(w("fFrR").to_string(), "fFrR");
        assert_eq!(w("fR").inverse().to_string(), "rF");
        assert!("fx".parse::<MoveWord>().is_err());
        assert_eq!(w("frRf").free_reduce().to_string(), "ff");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word() -> impl Strategy<Value = MoveWord> {
            proptest::collection::vec(proptest::sample::select(Move::ALL.to_vec()), 0..14).prop_map(MoveWord)
        }

        proptest! {
            #[test]
            fn torsion_on_random_states(m in word()) {
                let s = LabeledState::base().apply_word(&m);
                prop_assert!(state_equal(&s.apply_word(&w("rrr")), &s));
                prop_assert!(state_equal(&s.apply_word(&w("ffff")), &s));
                prop_assert!(state_equal(&s.apply_word(&w("rfrfrfrfrf")), &s));
            }

            #[test]
            fn word_then_inverse(m in word()) {
                let b = LabeledState::base();
                prop_assert_eq!(b.apply_word(&m).apply_word(&m.inverse()), b);
            }

            #[test]
            fn support_grows_at_most_one_cell_per_move(m in word()) {
                let s = LabeledState::base().apply_word(&m);
                prop_assert!(s.cells().len() <= m.len() + 2);
                prop_assert!(s.triangulation().is_valid());
            }

            #[test]
            fn far_flip_is_involution(m in word(), pick in 0usize..64) {
                let s = LabeledState::base().apply_word(&m);
                let edges: Vec<Chord> = s.support_diagonals().into_iter().filter(|&c| c != s.doe().chord()).collect();
                prop_assume!(!edges.is_empty());
                let e = edges[pick % edges.len()];
                let t = s.flip(e).unwrap();
                let oe = OrientedChord::new(e.a, e.b);
                let back = Chord::new(s.left_apex(oe), s.right_apex(oe));
                prop_assert_eq!(t.doe(), s.doe());
                prop_assert_eq!(t.flip(back).unwrap(), s);
            }

            #[test]
            fn normalize_commutes_with_growth(m in word(), pick in 0usize..64) {
                let s = LabeledState::base().apply_word(&m);
                prop_assert!(s.is_normalized());
                prop_assert_eq!(s.normalize(), s.clone());
                let fr = s.support().frontier();
                let g = s.grow_support(fr[pick % fr.len()]).unwrap();
                prop_assert!(!g.is_normalized());
                prop_assert_eq!(g.normalize().normalize(), s);
            }

            #[test]
            fn json_round_trips(m in word()) {
                let s = LabeledState::base().apply_word(&m);
                prop_assert_eq!(LabeledState::from_json(&s.to_json()).unwrap(), s);
            }
        }
    }
}
