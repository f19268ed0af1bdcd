//! The modified combing: far flips are realized through corridors of small
//! polygons so that the d.o.e. never travels far on its own.
//!
//! For a flip on an edge `f` away from the quadrilateral `Q` of the d.o.e.
//! `e`, the strip of triangles between `Q` and `f` is shortened one triangle
//! at a time. Each step retriangulates `Q ∪ W` (at most 7 vertices), where
//! `W` is the shortest prefix of the strip with three consecutive vertices
//! on one side, so that those three vertices bound a triangle. Then the flip
//! is done by a short transfer, F and a transfer back, and the corridor is
//! undone. Moves inside a small polygon are the lexicographically least
//! among the shortest, found by BFS in its labeled move graph.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::group::TElement;
use crate::mosher::mosher_flip_sequence;
use crate::polygon::{LabeledPoly, PolyTri};
use crate::state::{BaseEdge, Cell, Chord, Cusp, LabeledState, Local, Move, MoveWord, OrientedChord};
use crate::transfers::{transfer_to_edge, transfer_word};

/// Largest corridor polygon `Q ∪ W`.
pub const CORRIDOR_BOUND: usize = 7;
/// Largest polygon used for the final flip.
pub const FINAL_BOUND: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombError {
    #[error("edge lies in the quadrilateral of the d.o.e.")]
    Nearby,
    #[error("{0:?} is not an edge")]
    NotAnEdge(Chord),
}

/// Triangles strictly beyond `Q` up to the one adjacent to `f`, with the
/// oriented edges crossed to enter each of them (the next triangle on the
/// left).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TriangleChain {
    pub triangles: Vec<[Cusp; 3]>,
    pub crossings: Vec<OrientedChord>,
    /// Edge of `Q` on the side of `f`.
    pub start: OrientedChord,
}

impl TriangleChain {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn cusps(&self) -> Vec<Cusp> {
        let mut v: Vec<Cusp> = self.triangles.iter().flatten().copied().collect();
        v.sort();
        v.dedup();
        v
    }
}

fn on_arc(f: Chord, a: Cusp, b: Cusp) -> bool {
    let within = |x: Cusp| if a <= b { x >= a && x <= b } else { x >= a || x <= b };
    within(f.a) && within(f.b)
}

fn extra_cells(f: Chord) -> Vec<Cell> {
    f.base_edge().map(|b| b.cells().to_vec()).unwrap_or_default()
}

fn local_for(state: &LabeledState, f: Chord) -> Local {
    state.local_with(&extra_cells(f))
}

fn chain_in(local: &Local, e: OrientedChord, f: Chord) -> Result<TriangleChain, CombError> {
    if f == e.chord() {
        return Err(CombError::Nearby);
    }
    let start = if on_arc(f, e.head, e.tail) { e } else { e.reversed() };
    let mut cur = start;
    let mut triangles = Vec::new();
    let mut crossings = Vec::new();
    loop {
        let (u, v) = (cur.tail, cur.head);
        let x = local.left_apex(cur);
        if f == Chord::new(v, x) || f == Chord::new(x, u) {
            if triangles.is_empty() {
                return Err(CombError::Nearby);
            }
            return Ok(TriangleChain { triangles, crossings, start });
        }
        cur = if on_arc(f, v, x) { OrientedChord::new(x, v) } else { OrientedChord::new(u, x) };
        let y = local.left_apex(cur);
        crossings.push(cur);
        triangles.push([cur.tail, cur.head, y]);
    }
}

/// Chain of triangles from `Q` (of the d.o.e.) to the edge `f`.
pub fn triangle_chain(state: &LabeledState, f: Chord) -> Result<TriangleChain, CombError> {
    if !state.has_edge(f) {
        return Err(CombError::NotAnEdge(f));
    }
    chain_in(&local_for(state, f), state.doe(), f)
}

/// Cusps of the quadrilateral of `e`.
fn quad(local: &Local, e: OrientedChord) -> [Cusp; 4] {
    [e.tail, e.head, local.left_apex(e), local.right_apex(e)]
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CorridorStep {
    pub z_polygon: Vec<Cusp>,
    pub moves_inside: MoveWord,
    pub state_after: LabeledState,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Corridor {
    pub steps: Vec<CorridorStep>,
    /// Cusps of `Q ∪ W_n ∪ Q_f` once the strip is short.
    pub final_polygon: Vec<Cusp>,
}

impl Corridor {
    pub fn moves(&self) -> MoveWord {
        let mut w = MoveWord::new();
        for s in &self.steps {
            w.extend(&s.moves_inside);
        }
        w
    }

    pub fn final_state<'a>(&'a self, start: &'a LabeledState) -> &'a LabeledState {
        self.steps.last().map_or(start, |s| &s.state_after)
    }
}

/// The shortest prefix of the strip with three consecutive vertices on one
/// side: its vertices and the chord cutting off those three.
fn strip_prefix(chain: &TriangleChain) -> Option<(Vec<Cusp>, Chord)> {
    // the strip excludes the last triangle, which lies in Q_f
    let m = chain.len() - 1;
    let c0 = chain.crossings[0];
    let mut tails = vec![c0.tail];
    let mut heads = vec![c0.head];
    for i in 0..m {
        let x = chain.triangles[i][2];
        let next = chain.crossings[i + 1];
        if next.head == chain.crossings[i].head {
            tails.push(x);
        } else {
            heads.push(x);
        }
        for side in [&tails, &heads] {
            if side.len() == 3 {
                let mut verts: Vec<Cusp> = tails.iter().chain(heads.iter()).copied().collect();
                verts.sort();
                return Some((verts, Chord::new(side[0], side[2])));
            }
        }
    }
    None
}

/// Restriction of a triangulation to the convex polygon on `verts`.
fn restrict(local: &Local, verts: &[Cusp]) -> PolyTri {
    let k = verts.len();
    let mut diags = Vec::new();
    for i in 0..k {
        for j in i + 2..k {
            if (i, j) != (0, k - 1) && local.has_chord(Chord::new(verts[i], verts[j])) {
                diags.push((i, j));
            }
        }
    }
    PolyTri::new(k, &diags).expect("corridor polygon is a union of triangles")
}

/// Lexicographically least among the shortest move words in the labeled
/// move graph leading from `start` to a state satisfying `goal`.
pub fn bfs_moves(start: &LabeledPoly, goal: impl Fn(&LabeledPoly) -> bool) -> Option<MoveWord> {
    let mut seen: HashMap<LabeledPoly, (Option<LabeledPoly>, Option<Move>)> = HashMap::new();
    seen.insert(start.clone(), (None, None));
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(s) = queue.pop_front() {
        if goal(&s) {
            let mut word = Vec::new();
            let mut cur = s;
            while let (Some(p), Some(m)) = seen[&cur].clone() {
                word.push(m);
                cur = p;
            }
            word.reverse();
            return Some(MoveWord(word));
        }
        for m in Move::ALL {
            if let Some(t) = s.apply(m) {
                if !seen.contains_key(&t) {
                    seen.insert(t.clone(), (Some(s.clone()), Some(m)));
                    queue.push_back(t);
                }
            }
        }
    }
    None
}

/// Shortens the strip between `Q` and `f` until no side of it has three
/// vertices, recording each step.
pub fn build_corridor(state: &LabeledState, f: Chord) -> Result<Corridor, CombError> {
    let e = state.doe();
    let mut s = state.clone();
    let mut steps = Vec::new();
    let mut chain = triangle_chain(&s, f)?;
    loop {
        let local = local_for(&s, f);
        let Some((w_verts, ear)) = strip_prefix(&chain) else {
            let mut verts: Vec<Cusp> = quad(&local, e).to_vec();
            verts.extend(chain.cusps());
            let fo = OrientedChord::new(f.a, f.b);
            verts.extend([local.left_apex(fo), local.right_apex(fo)]);
            verts.sort();
            verts.dedup();
            assert!(verts.len() <= FINAL_BOUND, "final polygon has {} vertices", verts.len());
            return Ok(Corridor { steps, final_polygon: verts });
        };
        let q = quad(&local, e);
        let mut verts: Vec<Cusp> = q.iter().copied().chain(w_verts).collect();
        verts.sort();
        verts.dedup();
        assert!(verts.len() <= CORRIDOR_BOUND, "corridor polygon has {} vertices", verts.len());
        let small = restrict(&local, &verts);
        let idx = |x: Cusp| verts.binary_search(&x).expect("vertex of the corridor polygon");
        let doe = (idx(e.tail), idx(e.head));
        let start = LabeledPoly { tri: small.clone(), doe };
        let (ql, qr) = (small.left_apex(doe), small.right_apex(doe));
        let (ea, eb) = (idx(ear.a), idx(ear.b));
        let word = bfs_moves(&start, |p| {
            p.doe == doe && p.tri.has_edge(ea, eb) && p.tri.left_apex(doe) == ql && p.tri.right_apex(doe) == qr
        })
        .expect("corridor target is reachable");
        let next = s.apply_word(&word);
        debug_assert_eq!(next.doe(), e);
        let next_chain = triangle_chain(&next, f)?;
        assert!(next_chain.len() < chain.len(), "corridor step must shorten the strip");
        steps.push(CorridorStep { z_polygon: verts, moves_inside: word, state_after: next.clone() });
        s = next;
        chain = next_chain;
    }
}

/// Pieces of a combing path. Transfers are stored by target and turned into
/// moves from whatever state they start in.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Segment {
    Moves(MoveWord),
    Transfer(OrientedChord),
    Flip,
}

/// Segments of the combing path of the flip on `f`.
pub fn flip_segments(state: &LabeledState, f: Chord) -> Result<Vec<Segment>, CombError> {
    let e = state.doe();
    if f == e.chord() {
        return Ok(vec![Segment::Flip]);
    }
    if !state.has_edge(f) {
        return Err(CombError::NotAnEdge(f));
    }
    match build_corridor(state, f) {
        Err(CombError::Nearby) => {
            let (_, reached) = transfer_to_edge(state, e, f).expect("f is an edge");
            Ok(vec![Segment::Transfer(reached), Segment::Flip, Segment::Transfer(e)])
        }
        Err(err) => Err(err),
        Ok(c) => {
            let m = c.moves();
            let (_, reached) = transfer_to_edge(c.final_state(state), e, f).expect("f is an edge");
            let mut out = Vec::new();
            if !m.is_empty() {
                out.push(Segment::Moves(m.clone()));
            }
            out.extend([Segment::Transfer(reached), Segment::Flip, Segment::Transfer(e)]);
            if !m.is_empty() {
                out.push(Segment::Moves(m.inverse()));
            }
            Ok(out)
        }
    }
}

/// Turns segments into moves starting from `start`.
pub fn flatten(start: &LabeledState, segs: &[Segment]) -> MoveWord {
    let mut s = start.clone();
    let mut w = MoveWord::new();
    for seg in segs {
        let m = match seg {
            Segment::Moves(m) => m.clone(),
            Segment::Transfer(to) => transfer_word(&s, s.doe(), *to).expect("transfer target is an edge").to_moves(),
            Segment::Flip => MoveWord(vec![Move::F]),
        };
        s = s.apply_word(&m);
        w.extend(&m);
    }
    w
}

/// Merges consecutive transfers into one and cancels corridors against
/// each other.
pub fn reduce_segments(segs: &[Segment]) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for seg in segs {
        match (out.last_mut(), seg) {
            (Some(Segment::Moves(v)), Segment::Moves(w)) => {
                *v = v.concat(w).free_reduce();
                if v.is_empty() {
                    out.pop();
                }
            }
            (Some(Segment::Transfer(t)), Segment::Transfer(u)) => *t = *u,
            (_, Segment::Moves(w)) if w.is_empty() => {}
            _ => out.push(seg.clone()),
        }
    }
    out
}

/// Path of the flip on `f`: a move word turning `state` into the flipped
/// state with the d.o.e. back in place.
pub fn comb_flip_path(state: &LabeledState, f: Chord) -> Result<MoveWord, CombError> {
    Ok(flatten(state, &flip_segments(state, f)?))
}

/// Segments reducing `state` to the base state: the combed flips of its
/// Mosher normal form, then a transfer home.
pub fn reduction_segments(state: &LabeledState) -> Vec<Segment> {
    let z = TElement::from_state(state);
    let mut s = state.clone();
    let mut segs = Vec::new();
    for f in mosher_flip_sequence(&z).flips() {
        segs.extend(flip_segments(&s, f).expect("Mosher flips are edges"));
        s = s.flip(f).expect("Mosher flips are edges");
    }
    segs.push(Segment::Transfer(BaseEdge::Root.canonical()));
    segs
}

/// The combing of `z`: a move word from the identity to `z`.
pub fn combing(z: &TElement) -> MoveWord {
    let s = z.state();
    flatten(s, &reduction_segments(s)).inverse()
}

/// The combing with consecutive transfers merged and inverse pairs
/// cancelled.
pub fn reduced_combing(z: &TElement) -> MoveWord {
    let s = z.state();
    flatten(s, &reduce_segments(&reduction_segments(s))).free_reduce().inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{eval_moves, eval_word, relators};

    fn el(w: &str) -> TElement {
        eval_word(&w.parse().unwrap())
    }

    /// Base state and the base edge at the end of `turns` below the cell
    /// `[1/2, 3/4]`, which is far from the d.o.e.
    fn far_edge(depth: usize, zigzag: bool) -> Chord {
        let mut c = Cell::B.lower();
        for i in 0..depth {
            c = if zigzag && i % 2 == 1 { c.lower() } else { c.upper() };
        }
        c.edge_above().chord()
    }

    #[test]
    fn doe_flip_is_one_letter() {
        let s = LabeledState::base();
        assert_eq!(comb_flip_path(&s, s.doe().chord()).unwrap().to_string(), "f");
    }

    #[test]
    fn nearby_flips_use_transfers() {
        let s = LabeledState::base();
        let f = BaseEdge::Above(Cell::B.lower()).chord();
        assert_eq!(triangle_chain(&s, f), Err(CombError::Nearby));
        let w = comb_flip_path(&s, f).unwrap();
        assert_eq!(s.apply_word(&w), s.flip(f).unwrap());
    }

    #[test]
    fn chain_lengths_follow_depth() {
        let s = LabeledState::base();
        for depth in 1..8 {
            let f = far_edge(depth, false);
            let chain = triangle_chain(&s, f).unwrap();
            assert_eq!(chain.len(), depth);
        }
    }

    #[test]
    fn straight_chains_respect_the_bound() {
        let s = LabeledState::base();
        for depth in 1..9 {
            for zigzag in [false, true] {
                let f = far_edge(depth, zigzag);
                let c = build_corridor(&s, f).unwrap();
                assert!(c.steps.iter().all(|st| st.z_polygon.len() <= CORRIDOR_BOUND));
                assert!(c.final_polygon.len() <= FINAL_BOUND);
                assert!(c.steps.len() <= depth);
                let w = comb_flip_path(&s, f).unwrap();
                assert_eq!(s.apply_word(&w), s.flip(f).unwrap(), "depth {depth}");
            }
        }
    }

    #[test]
    fn flip_path_length_grows_linearly() {
        let s = LabeledState::base();
        let lens: Vec<usize> = (2..=8).map(|d| comb_flip_path(&s, far_edge(d, false)).unwrap().len()).collect();
        let slope = (lens[6] as f64 - lens[0] as f64) / 6.0;
        println!("flip path lengths {lens:?}, slope {slope:.2}");
        assert!(lens.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn identity_and_relators() {
        assert!(combing(&TElement::identity()).is_empty());
        assert!(reduced_combing(&TElement::identity()).is_empty());
        for (name, r) in relators() {
            assert!(combing(&eval_word(&r)).is_empty(), "{name}");
        }
    }

    #[test]
    fn reduction_merges_transfers() {
        let t = |d: Chord| Segment::Transfer(OrientedChord::new(d.a, d.b));
        let a = far_edge(3, false);
        let b = far_edge(4, false);
        let segs = vec![t(a), Segment::Flip, t(b), t(a), Segment::Moves("fr".parse().unwrap()), Segment::Moves("RF".parse().unwrap())];
        assert_eq!(reduce_segments(&segs), vec![t(a), Segment::Flip, t(a)]);
        assert_eq!(reduce_segments(&reduce_segments(&segs)), reduce_segments(&segs));
    }

    #[test]
    fn nearby_far_flips_reduce() {
        // two flips on adjacent far edges
        let mut c = Cell::B.lower();
        for _ in 0..6 {
            c = c.upper();
        }
        let f1 = c.lower().edge_above().chord();
        let f2 = c.upper().edge_above().chord();
        let s = LabeledState::base().flip(f1).unwrap().flip(f2).unwrap();
        let z = TElement::from_state(&s);
        let full = combing(&z);
        let red = reduced_combing(&z);
        assert_eq!(eval_moves(&full), z);
        assert_eq!(eval_moves(&red), z);
        assert!(red.len() < full.len(), "{} vs {}", red.len(), full.len());
        assert!(!red.has_inverse_pair());
    }

    #[test]
    fn round_trip_short_words() {
        for w in ["a", "b", "ab", "abab", "aabab", "babaab", "abbaab"] {
            let z = el(w);
            assert_eq!(eval_moves(&combing(&z)), z, "{w}");
            assert_eq!(eval_moves(&reduced_combing(&z)), z, "{w}");
        }
    }

    mod props {
        use super::*;
        use crate::group::{Gen, GeneratorWord};
        use proptest::prelude::*;

        fn word(max: usize) -> impl Strategy<Value = GeneratorWord> {
            proptest::collection::vec(proptest::sample::select(Gen::ALL.to_vec()), 0..max).prop_map(GeneratorWord)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn combing_round_trips(u in word(9)) {
                let z = eval_word(&u);
                prop_assert_eq!(eval_moves(&combing(&z)), z.clone());
                let r = reduced_combing(&z);
                prop_assert!(!r.has_inverse_pair());
                prop_assert_eq!(eval_moves(&r), z);
            }

            #[test]
            fn flip_paths_are_local(u in word(9), pick in 0usize..64) {
                let s = eval_word(&u).state().clone();
                let mut edges = s.support_diagonals();
                edges.extend(s.support().internal_edges().into_iter().map(|b| b.chord()).filter(|&c| s.has_edge(c)));
                let f = edges[pick % edges.len()];
                let w = comb_flip_path(&s, f).unwrap();
                let target = s.flip(f).unwrap();
                prop_assert_eq!(s.apply_word(&w), target.clone());
                let region: Vec<Cusp> = match triangle_chain(&s, f) {
                    Ok(ch) => {
                        let local = local_for(&s, f);
                        let mut v = ch.cusps();
                        v.extend(quad(&local, s.doe()));
                        let fo = OrientedChord::new(f.a, f.b);
                        v.extend([local.left_apex(fo), local.right_apex(fo)]);
                        v
                    }
                    Err(_) => return Ok(()),
                };
                for p in s.trajectory(&w) {
                    for d in p.diags().iter().filter(|d| s.diags().binary_search(d).is_err()) {
                        prop_assert!(region.contains(&d.a) && region.contains(&d.b));
                    }
                }
            }
        }
    }
}
