//! The braided Ptolemy-Thompson group `T*`.
//!
//! A punctured state is a labeled state whose edges are arcs in the disk
//! with one puncture per base edge. Each arc carries exactly one puncture
//! and is stored as a pair of push-offs: the homotopy classes of the two
//! boundary curves of a thin band around it, one passing the carried
//! puncture on each side. Arcs that coincide with their base edge are not
//! stored, so two states are equal exactly when they represent the same
//! element.
//!
//! Braids are mapping classes that fix every cusp. They act on arcs by
//! substitution: a path is cut into pieces that each run inside one base
//! cell between two cusp neighbourhoods, and each piece is replaced by the
//! matching push-off of the image of that side of the cell.

mod braid;
mod path;
mod tstar;
mod word;

pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::state::{BaseEdge, Cell, Chord, Cusp, LabeledState, Move, MoveWord, OrientedChord, PREC};

pub use braid::{BraidLetter, BraidWord};
pub use path::{exponent, fan, half_at, half_cusp, left_cell, other_cell, right_cell, step_with, tree_path, Half, Path, Side, Step};
pub use tstar::{
    admissibility_balance, admissible_lift, correction_factor, kernel_braid, pentagon_word, project_to_t, straighten_comb_arc,
    transfer_states, tstar_combing, untangle_state, StraightenOp, StrandAutomorphism, TStarCombing, TStarElement,
};
pub use word::{Conjugate, CrossingWord, Entry, Exp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("{0} is not an edge of the triangulation")]
    NotAnEdge(String),
    #[error("edges {0} and {1} are not sides of a common cell")]
    NotAdjacent(String, String),
    #[error("crossing word has a triple pattern at entry {0}")]
    TriplePattern(usize),
    #[error("crossing word of length {0} has no conjugate puncture")]
    Monotone(usize),
    #[error("arc length did not decrease ({before} -> {after})")]
    NoProgress { before: usize, after: usize },
    #[error("underlying state is not the base state")]
    NotKernel,
    #[error("arc {0} is not a base chord of the state")]
    NotCombed(String),
    #[error("gave up after {0} rounds")]
    Cap(usize),
    #[error("invalid crossing word: {0}")]
    InvalidWord(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

const MASK: u128 = (1u128 << PREC) - 1;

/// Counterclockwise distance from `x` to `y` as a fraction of a turn.
pub(crate) fn ccw(x: Cusp, y: Cusp) -> u128 {
    y.raw().wrapping_sub(x.raw()) & MASK
}

/// Whether `z` lies strictly inside the counterclockwise arc from `x` to `y`.
pub(crate) fn strictly_between(x: Cusp, z: Cusp, y: Cusp) -> bool {
    z != x && z != y && ccw(x, z) < ccw(x, y)
}

/// The vertex of `c` other than `a` and `b`.
pub(crate) fn third_vertex(c: Cell, a: Cusp, b: Cusp) -> Cusp {
    c.vertices().into_iter().find(|&m| m != a && m != b).expect("cell has three vertices")
}

/// An arc between two cusps, carrying one puncture.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Arc {
    pub tail: Cusp,
    pub head: Cusp,
    /// Push-off with the carried puncture on its right.
    pub left: Path,
    /// Push-off with the carried puncture on its left.
    pub right: Path,
    pub puncture: BaseEdge,
}

impl Arc {
    /// The base edge itself, canonically oriented.
    pub fn base(e: BaseEdge) -> Arc {
        let o = e.canonical();
        Arc {
            tail: o.tail,
            head: o.head,
            left: Path::empty(left_cell(e)),
            right: Path::empty(right_cell(e)),
            puncture: e,
        }
    }

    pub fn chord(&self) -> Chord {
        Chord::new(self.tail, self.head)
    }

    pub fn reversed(&self) -> Arc {
        Arc {
            tail: self.head,
            head: self.tail,
            left: self.right.reversed(),
            right: self.left.reversed(),
            puncture: self.puncture,
        }
    }

    /// The same arc, starting at `tail`.
    pub fn from_tail(&self, tail: Cusp) -> Arc {
        if tail == self.tail {
            self.clone()
        } else {
            debug_assert_eq!(tail, self.head);
            self.reversed()
        }
    }

    pub fn push_off(&self, side: Side) -> &Path {
        match side {
            Side::L => &self.left,
            Side::R => &self.right,
        }
    }

    pub fn normalized(mut self) -> Arc {
        self.left = self.left.canonical(self.tail, self.head);
        self.right = self.right.canonical(self.tail, self.head);
        self
    }

    /// Whether this is a base edge carrying its own puncture, straight.
    pub fn is_base(&self) -> bool {
        match self.chord().base_edge() {
            Some(e) => *self == Arc::base(e).from_tail(self.tail),
            None => false,
        }
    }

    /// Number of entries of the crossing word relative to the base edges.
    pub fn crossing_length(&self) -> Result<usize, BraidError> {
        Ok(CrossingWord::from_arc(self)?.len())
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}->{:?} via {} L{} R{}", self.tail, self.head, self.puncture.address(), self.left, self.right)
    }
}

/// A mapping class fixing every cusp, given by the images of the finitely
/// many base arcs it moves.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Homeo {
    moved: BTreeMap<BaseEdge, Arc>,
}

impl Homeo {
    pub fn identity() -> Homeo {
        Homeo::default()
    }

    pub fn from_images(images: impl IntoIterator<Item = Arc>) -> Homeo {
        let mut moved = BTreeMap::new();
        for a in images {
            let e = a.chord().base_edge().expect("image of a base arc joins its ends");
            let a = a.from_tail(e.canonical().tail).normalized();
            if !a.is_base() {
                moved.insert(e, a);
            }
        }
        Homeo { moved }
    }

    pub fn moved(&self) -> impl Iterator<Item = (&BaseEdge, &Arc)> {
        self.moved.iter()
    }

    /// Image of a base arc, canonically oriented.
    pub fn image(&self, e: BaseEdge) -> Arc {
        self.moved.get(&e).cloned().unwrap_or_else(|| Arc::base(e))
    }

    /// Image of the path running inside `c` from near `a` to near `b`.
    fn side_image(&self, c: Cell, a: Cusp, b: Cusp) -> Path {
        if a == b {
            return Path::empty(c);
        }
        let e = Chord::new(a, b).base_edge().expect("cell side is a base edge");
        debug_assert!(path::is_side_of(e, c));
        let img = self.image(e).from_tail(a);
        let m = third_vertex(c, a, b);
        if strictly_between(b, m, a) {
            img.left
        } else {
            img.right
        }
    }

    /// Image of a path from near `x0` to near `x1`, not canonicalized.
    pub fn map_path(&self, p: &Path, x0: Cusp, x1: Cusp) -> Path {
        let cells = p.cells();
        let mut ways = Vec::with_capacity(p.len() + 2);
        ways.push(x0);
        ways.extend(p.steps.iter().map(|s| half_cusp(s.edge, s.half)));
        ways.push(x1);
        let mut out = self.side_image(cells[0], ways[0], ways[1]);
        for i in 1..cells.len() {
            let piece = self.side_image(cells[i], ways[i], ways[i + 1]);
            out = out.join_at(&piece, ways[i]);
        }
        out
    }

    /// Image of a loop based near the cusp 0 in cell `A`.
    pub fn map_loop(&self, p: &Path) -> Path {
        debug_assert!(p.start == Cell::A && p.end() == Cell::A);
        let img = self.map_path(p, Cusp::ZERO, Cusp::ZERO);
        Path::empty(Cell::A).join_at(&img, Cusp::ZERO).join_at(&Path::empty(Cell::A), Cusp::ZERO)
    }

    pub fn map_arc(&self, a: &Arc) -> Arc {
        Arc {
            tail: a.tail,
            head: a.head,
            left: self.map_path(&a.left, a.tail, a.head),
            right: self.map_path(&a.right, a.tail, a.head),
            puncture: self.image(a.puncture).puncture,
        }
        .normalized()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Homeo) -> Homeo {
        let mut edges: Vec<BaseEdge> = other.moved.keys().copied().collect();
        edges.extend(self.moved.keys().copied());
        edges.sort();
        edges.dedup();
        Homeo::from_images(edges.into_iter().map(|e| self.map_arc(&other.image(e))))
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }
}

/// A labeled state of `T*`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PuncturedState {
    underlying: LabeledState,
    arcs: BTreeMap<Chord, Arc>,
}

impl PuncturedState {
    pub fn base() -> PuncturedState {
        PuncturedState { underlying: LabeledState::base(), arcs: BTreeMap::new() }
    }

    /// The state with base underlying triangulation whose arcs are the
    /// images of the base arcs.
    pub fn from_homeo(h: &Homeo) -> PuncturedState {
        PuncturedState::base().apply_homeo(h)
    }

    pub fn underlying(&self) -> &LabeledState {
        &self.underlying
    }

    /// Arcs that differ from their base edge, keyed by chord and oriented
    /// from the smaller cusp.
    pub fn arcs(&self) -> &BTreeMap<Chord, Arc> {
        &self.arcs
    }

    pub fn is_base(&self) -> bool {
        self.arcs.is_empty() && self.underlying.is_base()
    }

    /// Whether the underlying triangulation is the base one with the base d.o.e.
    pub fn is_kernel(&self) -> bool {
        self.underlying.is_base()
    }

    pub fn arc(&self, tail: Cusp, head: Cusp) -> Result<Arc, BraidError> {
        let c = Chord::new(tail, head);
        if let Some(a) = self.arcs.get(&c) {
            return Ok(a.from_tail(tail));
        }
        match c.base_edge() {
            Some(e) if self.underlying.has_edge(c) => Ok(Arc::base(e).from_tail(tail)),
            _ => Err(BraidError::NotAnEdge(format!("{c:?}"))),
        }
    }

    fn store(&mut self, a: Arc) {
        let c = a.chord();
        let a = a.from_tail(c.a);
        if a.is_base() {
            self.arcs.remove(&c);
        } else {
            self.arcs.insert(c, a);
        }
    }

    /// Flips an edge of the triangulation, carrying its puncture over to the
    /// new diagonal. The d.o.e. follows the rule of the unpunctured flip.
    pub fn flip(&self, chord: Chord) -> Result<PuncturedState, BraidError> {
        let underlying = self.underlying.flip(chord).map_err(|_| BraidError::NotAnEdge(format!("{chord:?}")))?;
        let e = OrientedChord::new(chord.a, chord.b);
        let (t, h) = (e.tail, e.head);
        let x = self.underlying.left_apex(e);
        let y = self.underlying.right_apex(e);
        let old = self.arc(t, h)?;
        let right = self.arc(x, t)?.left.join_at(&self.arc(t, y)?.left, t);
        let left = self.arc(x, h)?.right.join_at(&self.arc(h, y)?.right, h);
        let delta = Arc { tail: x, head: y, left, right, puncture: old.puncture }.normalized();
        let mut out = PuncturedState { underlying, arcs: self.arcs.clone() };
        out.arcs.remove(&chord);
        out.store(delta);
        Ok(out)
    }

    pub fn move_f(&self) -> PuncturedState {
        self.flip(self.underlying.doe().chord()).expect("d.o.e. is an edge")
    }

    pub fn move_r(&self) -> PuncturedState {
        PuncturedState { underlying: self.underlying.move_r(), arcs: self.arcs.clone() }
    }

    pub fn apply(&self, m: Move) -> PuncturedState {
        match m {
            Move::F => self.move_f(),
            Move::FInv => self.move_f().move_f().move_f(),
            Move::R => self.move_r(),
            Move::RInv => self.move_r().move_r(),
        }
    }

    pub fn apply_word(&self, w: &MoveWord) -> PuncturedState {
        w.0.iter().fold(self.clone(), |s, &m| s.apply(m))
    }

    /// Applies a mapping class to every arc; the labeled state is unchanged.
    pub fn apply_homeo(&self, h: &Homeo) -> PuncturedState {
        let mut chords: Vec<Chord> = self.arcs.keys().copied().collect();
        for (e, _) in h.moved() {
            let c = e.chord();
            if self.underlying.has_edge(c) {
                chords.push(c);
            }
        }
        chords.sort();
        chords.dedup();
        let mut out = self.clone();
        for c in chords {
            let a = self.arc(c.a, c.b).expect("chord is an edge");
            out.store(h.map_arc(&a));
        }
        out
    }

    pub fn apply_braid(&self, b: &BraidWord) -> Result<PuncturedState, BraidError> {
        Ok(self.apply_homeo(&b.homeo()?))
    }

    /// The mapping class taking the base arcs to these arcs.
    pub fn to_homeo(&self) -> Result<Homeo, BraidError> {
        if !self.underlying.is_base_triangulation() {
            return Err(BraidError::NotKernel);
        }
        Ok(Homeo::from_images(self.arcs.values().cloned()))
    }

    pub fn with_underlying(&self, underlying: LabeledState) -> Result<PuncturedState, BraidError> {
        for c in self.arcs.keys() {
            if !underlying.has_edge(*c) {
                return Err(BraidError::NotAnEdge(format!("{c:?}")));
            }
        }
        Ok(PuncturedState { underlying, arcs: self.arcs.clone() })
    }

    pub fn to_json(&self) -> Value {
        let arcs: Vec<Value> = self
            .arcs
            .values()
            .map(|a| {
                let w = CrossingWord::from_arc(a).map(|w| w.to_string()).unwrap_or_else(|e| format!("error: {e}"));
                json!({
                    "tail": format!("{:?}", a.tail),
                    "head": format!("{:?}", a.head),
                    "puncture": a.puncture.address().to_string(),
                    "crossingWord": w,
                })
            })
            .collect();
        json!({ "state": self.underlying.to_json(), "arcs": arcs })
    }

    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.underlying.fingerprint().as_bytes());
        for a in self.arcs.values() {
            h.update(a.to_string().as_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests;
