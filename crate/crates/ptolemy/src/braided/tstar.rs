//! Elements of `T*`, their combing, and braid decomposition of kernel states.

use std::collections::{BTreeMap, BTreeSet};

use super::path::{half_at, left_cell, tree_path, Half, Path, Side, Step};
use super::{strictly_between, third_vertex, Arc, BraidError, BraidLetter, BraidWord, Conjugate, CrossingWord, Homeo, PuncturedState};
use crate::combing::reduced_combing;
use crate::group::{GeneratorWord, TElement};
use crate::mosher::{mosher_flip_sequence, TraceOp};
use crate::state::{BaseEdge, Cell, Chord, Cusp, LabeledState, MoveWord, OrientedChord};
use crate::transfers::transfer_word;

/// Rounds allowed when untangling a kernel state.
const UNTANGLE_CAP: usize = 10_000;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TStarElement {
    state: PuncturedState,
}

impl TStarElement {
    pub fn identity() -> TStarElement {
        TStarElement { state: PuncturedState::base() }
    }

    pub fn from_moves(w: &MoveWord) -> TStarElement {
        TStarElement { state: PuncturedState::base().apply_word(w) }
    }

    pub fn from_word(w: &GeneratorWord) -> TStarElement {
        TStarElement::from_moves(&w.phi())
    }

    pub fn from_state(state: PuncturedState) -> TStarElement {
        TStarElement { state }
    }

    pub fn state(&self) -> &PuncturedState {
        &self.state
    }

    pub fn is_identity(&self) -> bool {
        self.state.is_base()
    }

    /// Product `self · other`: the moves of `self` act after those of
    /// `other`.
    pub fn multiply(&self, other: &TStarElement) -> Result<TStarElement, BraidError> {
        let w = tstar_combing(self)?.moves;
        Ok(TStarElement { state: other.state.apply_word(&w) })
    }

    pub fn inverse(&self) -> Result<TStarElement, BraidError> {
        Ok(TStarElement::from_moves(&tstar_combing(self)?.moves.inverse()))
    }
}

pub fn project_to_t(z: &TStarElement) -> TElement {
    TElement::from_state(z.state.underlying())
}

fn edge_order(e: BaseEdge) -> impl Ord {
    e.order_key()
}

/// Writes a state with base underlying triangulation as `b(S₀)` for a braid
/// `b`, by repeatedly untangling the first arc that is not straight.
pub fn untangle_state(k: &PuncturedState) -> Result<BraidWord, BraidError> {
    if !k.underlying().is_base_triangulation() {
        return Err(BraidError::NotKernel);
    }
    let mut s = k.clone();
    let mut applied: Vec<BraidWord> = Vec::new();
    for _ in 0..UNTANGLE_CAP {
        let Some(arc) = s
            .arcs()
            .values()
            .min_by_key(|a| edge_order(a.chord().base_edge().expect("kernel arcs are base chords")))
            .cloned()
        else {
            let mut b = BraidWord::new();
            for c in &applied {
                b = b.then_after(&c.inverse());
            }
            return Ok(b);
        };
        let (c, next) = untangle_step(&s, &arc)?;
        applied.push(c);
        s = next;
    }
    Err(BraidError::Cap(UNTANGLE_CAP))
}

/// One untangling round on `arc`, applied to the whole state. The scan for
/// conjugate punctures runs along the arc and, failing that, along its
/// reverse. The first candidate that shortens the arc is taken.
fn untangle_step(s: &PuncturedState, arc: &Arc) -> Result<(BraidWord, PuncturedState), BraidError> {
    let w = CrossingWord::from_arc(arc)?;
    let mut factors = Vec::new();
    for a in [arc.clone(), arc.reversed()] {
        let wa = CrossingWord::from_arc(&a)?;
        if let Conjugate::Pair { i, j } = wa.conjugate_puncture() {
            factors.push(wa.untangling_factor(i, j)?);
        }
    }
    if factors.is_empty() {
        factors.push(own_puncture_factor(&w, arc)?);
    }
    // fallback when the scanned pair only re-threads a loop: every sign
    // change along the arc, with either twist sign
    factors.extend(w.sign_changes().into_iter().flat_map(|(i, j)| {
        let f = w.untangling_factor(i, j).ok();
        f.into_iter().flat_map(|f| [f.inverse(), f])
    }));
    let mut best = None;
    for c in factors {
        let next = s.apply_homeo(&c.homeo()?);
        let img = next.arc(arc.tail, arc.head)?;
        let after = CrossingWord::from_arc(&img)?.len();
        if after < w.len() || img.is_base() {
            return Ok((c, next));
        }
        best = Some(after);
    }
    Err(BraidError::NoProgress { before: w.len(), after: best.unwrap_or(w.len()) })
}

/// A straight arc carrying the puncture of a neighbouring edge is bent by a
/// single half-twist of that puncture with its own.
fn own_puncture_factor(w: &CrossingWord, arc: &Arc) -> Result<BraidWord, BraidError> {
    let own = arc.chord().base_edge();
    match (w.entries.as_slice(), own) {
        ([only], Some(e)) if only.edge != e => {
            let candidates = [BraidLetter::new(e, only.edge, true)?, BraidLetter::new(e, only.edge, false)?];
            for l in candidates {
                let img = l.homeo().map_arc(arc);
                if img.is_base() {
                    return Ok(BraidWord(vec![l]));
                }
            }
            Err(BraidError::Monotone(w.len()))
        }
        _ => Err(BraidError::Monotone(w.len())),
    }
}

/// The braid of an element with trivial image in `T`. Words act on states
/// through the anti-isomorphism, so an element whose state is `b(S₀)` is the
/// braid `b⁻¹`; this makes the map multiplicative.
pub fn kernel_braid(z: &TStarElement) -> Result<BraidWord, BraidError> {
    if !z.state.underlying().is_base() {
        return Err(BraidError::NotKernel);
    }
    Ok(untangle_state(&z.state)?.inverse())
}

fn transfer_moves(to: OrientedChord) -> MoveWord {
    transfer_word(&LabeledState::base(), LabeledState::base().doe(), to).expect("base edges are edges of the base state").to_moves()
}

/// The side of the cell of a letter that the pentagon word is based on,
/// oriented with the cell on its left.
fn pentagon_doe(l: BraidLetter) -> OrientedChord {
    let c = l.cell();
    let o = l.f.canonical();
    if left_cell(l.f) == c {
        o
    } else {
        o.reversed()
    }
}

/// Moves `V` with `S₀·V = l(S₀)`: a transfer to a side of the cell of the
/// letter, a pentagon, and the transfer back.
pub fn pentagon_word(l: BraidLetter) -> MoveWord {
    let t = transfer_moves(pentagon_doe(l));
    let at = LabeledState::base().apply_word(&t);
    // the pentagon twists the d.o.e. with the next side of its left cell
    let x = at.left_apex(at.doe());
    let next = Chord::new(at.doe().head, x).base_edge().expect("side of a base cell");
    let p = pentagon(next == l.e || next == l.f);
    let p = if l.positive { p.inverse() } else { p };
    t.concat(&p).concat(&t.inverse())
}

/// The pentagon word twisting clockwise the d.o.e. with the next (or, if
/// not `next`, the previous) side of the triangle on its left.
fn pentagon(next: bool) -> MoveWord {
    let w = if next { "rfrfrfrfrf" } else { "frfrfrfrfr" };
    w.parse().expect("pentagon word")
}

/// States visited by the transfer from the base d.o.e. to `to`.
pub fn transfer_states(to: OrientedChord) -> Vec<PuncturedState> {
    let mut s = PuncturedState::base();
    let mut out = vec![s.clone()];
    for &m in &transfer_moves(to).0 {
        s = s.apply(m);
        out.push(s.clone());
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TStarCombing {
    /// Combing of the image in `T`.
    pub combing: MoveWord,
    /// Braid of the kernel part.
    pub braid: BraidWord,
    /// Full move word: the braid part, then the combing.
    pub moves: MoveWord,
    pub word: GeneratorWord,
}

/// Splits `z` into a braid and the combing of its image in `T`, and writes
/// the braid with pentagon words.
pub fn tstar_combing(z: &TStarElement) -> Result<TStarCombing, BraidError> {
    let combing = reduced_combing(&project_to_t(z));
    let k = z.state.apply_word(&combing.inverse());
    if !k.is_kernel() {
        return Err(BraidError::Inconsistent("combing does not reach the base state".into()));
    }
    let braid = untangle_state(&k)?;
    let mut moves = MoveWord::new();
    for &l in &braid.0 {
        moves.extend(&pentagon_word(l));
    }
    moves.extend(&combing);
    if PuncturedState::base().apply_word(&moves) != z.state {
        return Err(BraidError::Inconsistent("combing does not reproduce the element".into()));
    }
    let word = GeneratorWord::from_moves(&moves);
    Ok(TStarCombing { combing, braid, moves, word })
}

fn created_chord(before: &LabeledState, flipped: Chord) -> Chord {
    let o = OrientedChord::new(flipped.a, flipped.b);
    Chord::new(before.left_apex(o), before.right_apex(o))
}

/// The punctured lift of a triangulation obtained by undoing its combing
/// flips from the base state.
pub fn admissible_lift(tau: &LabeledState) -> PuncturedState {
    let trace = mosher_flip_sequence(&TElement::from_state(tau));
    let mut s = PuncturedState::base();
    for step in trace.steps.iter().rev() {
        if let TraceOp::Flip(c) = step.op {
            s = s.flip(created_chord(&step.before, c)).expect("created chord is an edge");
        }
    }
    s.with_underlying(tau.clone()).expect("lift has the triangulation of tau")
}

/// The braid `c` with `c(S)` equal to the admissible lift of the underlying
/// triangulation of `S`.
pub fn correction_factor(s: &PuncturedState) -> Result<BraidWord, BraidError> {
    let flips = mosher_flip_sequence(&TElement::from_state(s.underlying())).flips();
    let mut k = s.clone();
    for f in flips {
        k = k.flip(f)?;
    }
    Ok(untangle_state(&k)?.inverse())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StraightenOp {
    Flip(Chord),
    Untangle(BraidWord),
}

/// Combs the triangulation to the base one and then untangles the arc on
/// `chord` until it is straight. Every untangling round must shorten it.
pub fn straighten_comb_arc(s: &PuncturedState, chord: Chord) -> Result<(Vec<StraightenOp>, PuncturedState), BraidError> {
    if !chord.is_base() || !s.underlying().has_edge(chord) {
        return Err(BraidError::NotCombed(format!("{chord:?}")));
    }
    let mut ops = Vec::new();
    let mut cur = s.clone();
    for f in mosher_flip_sequence(&TElement::from_state(s.underlying())).flips() {
        cur = cur.flip(f)?;
        ops.push(StraightenOp::Flip(f));
    }
    for _ in 0..UNTANGLE_CAP {
        let arc = cur.arc(chord.a, chord.b)?;
        if arc.is_base() {
            return Ok((ops, cur));
        }
        let (c, next) = untangle_step(&cur, &arc)?;
        ops.push(StraightenOp::Untangle(c));
        cur = next;
    }
    Err(BraidError::Cap(UNTANGLE_CAP))
}

/// Side of the puncture of `e` relative to a path from near `u` to near `v`.
pub(crate) fn puncture_side(p: &Path, u: Cusp, v: Cusp, e: BaseEdge) -> Side {
    let o = e.canonical();
    let far = |z: Cusp| if strictly_between(v, z, u) { Side::L } else { Side::R };
    let flip = |s: Side, n: usize| if n % 2 == 1 { s.opposite() } else { s };
    if let Some(z) = [o.tail, o.head].into_iter().find(|&z| z != u && z != v) {
        let h = half_at(e, z);
        let n = p.steps.iter().filter(|s| s.edge == e && Some(s.half) == h).count();
        return flip(far(z), n);
    }
    // e joins u and v: use the segment from its puncture to the third
    // vertex of one of its cells
    let c = left_cell(e);
    let m = third_vertex(c, o.tail, o.head);
    let lo_side = Chord::new(o.tail, m).base_edge();
    let half_of_cusp = |z: Cusp| if z == o.tail { Half::Lo } else { Half::Hi };
    let port = |st: Step| {
        if st.edge == e {
            st.half
        } else if Some(st.edge) == lo_side {
            Half::Lo
        } else {
            Half::Hi
        }
    };
    let cells = p.cells();
    let mut n = 0;
    for (k, &cell) in cells.iter().enumerate() {
        if cell != c {
            continue;
        }
        let entry = if k == 0 { half_of_cusp(u) } else { port(p.steps[k - 1]) };
        let exit = if k == p.steps.len() { half_of_cusp(v) } else { port(p.steps[k]) };
        if entry != exit {
            n += 1;
        }
    }
    flip(far(m), n)
}

/// Sizes of the two sets of punctures lying on the left of one arc and on
/// the right of the other, for arcs with the same ends. The left side is a
/// closed disk containing the puncture carried by the arc, so the counts are
/// those of `D^L(a) − D^L(b)` and `D^L(b) − D^L(a)`.
pub fn admissibility_balance(a: &Arc, b: &Arc) -> Result<(usize, usize), BraidError> {
    if a.chord() != b.chord() {
        return Err(BraidError::Inconsistent("arcs have different ends".into()));
    }
    let b = b.from_tail(a.tail);
    let (u, v) = (a.tail, a.head);
    let mut cand: BTreeSet<BaseEdge> = BTreeSet::new();
    for p in [&a.left, &a.right, &b.left, &b.right] {
        cand.extend(p.steps.iter().map(|s| s.edge));
    }
    cand.extend(Chord::new(u, v).base_edge());
    cand.extend([a.puncture, b.puncture]);
    // None: on the arc
    let side = |x: &Arc, e: BaseEdge| (e != x.puncture).then(|| puncture_side(&x.left, u, v, e));
    let count = |p: &Arc, q: &Arc| {
        cand.iter()
            .filter(|&&e| {
                let (sp, sq) = (side(p, e), side(q, e));
                sp != Some(Side::R) && sq == Some(Side::R)
            })
            .count()
    };
    Ok((count(a, &b), count(&b, a)))
}

/// Action of a braid on the free group of loops around the punctures,
/// restricted to the punctures inside a polygon containing its support.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StrandAutomorphism {
    /// Generators considered: the base edges inside the window.
    pub window: Vec<BaseEdge>,
    /// Images that differ from the generator itself.
    pub images: BTreeMap<BaseEdge, Vec<(BaseEdge, i8)>>,
}

/// Loop around the puncture of `e`, based near the cusp 0 in `A`.
pub fn generator_loop(e: BaseEdge) -> Path {
    let l = left_cell(e);
    let there = tree_path(Cell::A, l);
    let around = Path::new(l, vec![Step { edge: e, half: Half::Hi }, Step { edge: e, half: Half::Lo }]);
    there.then(&around).then(&there.reversed())
}

/// Free-group word of a loop: lower halves span a tree, so only crossings
/// of upper halves count, positively from the parent side.
pub fn loop_word(p: &Path) -> Vec<(BaseEdge, i8)> {
    let cells = p.cells();
    let mut out: Vec<(BaseEdge, i8)> = Vec::new();
    for (s, &c) in p.steps.iter().zip(&cells) {
        if s.half != Half::Hi {
            continue;
        }
        let g = (s.edge, if c == left_cell(s.edge) { 1 } else { -1 });
        if out.last() == Some(&(g.0, -g.1)) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

fn window_cells(hs: &[&Homeo]) -> Vec<Cell> {
    let mut cells = vec![Cell::A, Cell::B];
    for h in hs {
        for (e, a) in h.moved() {
            cells.extend(e.cells());
            cells.extend(a.puncture.cells());
            cells.extend(a.left.cells());
            cells.extend(a.right.cells());
        }
    }
    crate::state::hull(&cells)
}

impl StrandAutomorphism {
    fn over(h: &Homeo, cells: &[Cell]) -> StrandAutomorphism {
        let set: BTreeSet<Cell> = cells.iter().copied().collect();
        let mut window: Vec<BaseEdge> = Vec::new();
        for &c in cells {
            for e in [c.edge_above()] {
                if e.cells().iter().all(|x| set.contains(x)) {
                    window.push(e);
                }
            }
        }
        window.sort();
        window.dedup();
        let mut images = BTreeMap::new();
        for &e in &window {
            let w = loop_word(&h.map_loop(&generator_loop(e)));
            if w != vec![(e, 1)] {
                images.insert(e, w);
            }
        }
        StrandAutomorphism { window, images }
    }

    pub fn of_homeo(h: &Homeo) -> StrandAutomorphism {
        StrandAutomorphism::over(h, &window_cells(&[h]))
    }

    pub fn of_state(k: &PuncturedState) -> Result<StrandAutomorphism, BraidError> {
        Ok(StrandAutomorphism::of_homeo(&k.to_homeo()?))
    }

    /// Punctures whose loops are moved.
    pub fn support(&self) -> Vec<BaseEdge> {
        self.images.keys().copied().collect()
    }

    /// Whether two braids act identically, compared on a common window.
    pub fn same_action(a: &Homeo, b: &Homeo) -> bool {
        let cells = window_cells(&[a, b]);
        StrandAutomorphism::over(a, &cells).images == StrandAutomorphism::over(b, &cells).images
    }

    /// Whether every image is a conjugate of a generator.
    pub fn images_are_conjugates(&self) -> bool {
        self.images.values().all(|w| {
            let n = w.len();
            n % 2 == 1 && w[n / 2].1 == 1 && (0..n / 2).all(|i| w[i].0 == w[n - 1 - i].0 && w[i].1 == -w[n - 1 - i].1)
        })
    }
}
