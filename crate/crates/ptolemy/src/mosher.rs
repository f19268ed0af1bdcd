//! Mosher's combing by flips and its translation into F and R.
//!
//! An element is combed by flipping its triangulation until every base edge
//! it is missing (an uncombed arc) is present again, the arcs taken in the
//! global edge order. Each arc is oriented from its smaller endpoint. The
//! move word returned by [`mosher_word`] is the reduction read backwards, so
//! it evaluates to the element.

use serde_json::{json, Value};

use crate::group::TElement;
use crate::polygon::PolyTri;
use crate::state::{hull, BaseEdge, Cell, Chord, Cusp, LabeledState, Move, MoveWord, OrientedChord, SupportPolygon};
use crate::transfers::{transfer_to_edge, transfer_word};

/// The angle at `vertex` between two consecutive edges.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Prong {
    pub vertex: Cusp,
    pub left: Chord,
    pub right: Chord,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TraceOp {
    Flip(Chord),
    Transfer { from: OrientedChord, to: OrientedChord },
    Relabel,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceStep {
    pub before: LabeledState,
    pub op: TraceOp,
    pub after: LabeledState,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CombingTrace {
    pub steps: Vec<TraceStep>,
}

fn cusp_str(x: Cusp) -> String {
    format!("{x:?}")
}

impl CombingTrace {
    pub fn flip_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s.op, TraceOp::Flip(_))).count()
    }

    pub fn flips(&self) -> Vec<Chord> {
        self.steps
            .iter()
            .filter_map(|s| match s.op {
                TraceOp::Flip(c) => Some(c),
                _ => None,
            })
            .collect()
    }

    /// `[{op, args, stateHash}]`, the hash being that of the state after the
    /// step.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.steps
                .iter()
                .map(|s| {
                    let (op, args) = match &s.op {
                        TraceOp::Flip(c) => ("flip", json!([cusp_str(c.a), cusp_str(c.b)])),
                        TraceOp::Transfer { from, to } => (
                            "transfer",
                            json!([[cusp_str(from.tail), cusp_str(from.head)], [cusp_str(to.tail), cusp_str(to.head)]]),
                        ),
                        TraceOp::Relabel => ("relabel", json!([])),
                    };
                    json!({ "op": op, "args": args, "stateHash": s.after.fingerprint() })
                })
                .collect(),
        )
    }
}

/// Orientation used for uncombed arcs: from the smaller endpoint.
pub fn orient_arc(c: Chord) -> OrientedChord {
    OrientedChord::new(c.a, c.b)
}

fn deviation_cells(s: &LabeledState) -> Vec<Cell> {
    let mut cells = s.cells().to_vec();
    cells.extend([Cell::A, Cell::B]);
    hull(&cells)
}

fn uncombed(s: &LabeledState, poly: &SupportPolygon) -> Vec<OrientedChord> {
    let mut edges: Vec<BaseEdge> = poly.internal_edges().into_iter().filter(|e| !s.has_edge(e.chord())).collect();
    edges.sort_by_key(|e| e.order_key());
    edges.into_iter().map(|e| orient_arc(e.chord())).collect()
}

/// Smallest connected polygon holding the uncombed arcs and both d.o.e.'s,
/// with the uncombed arcs in the global edge order.
pub fn deviation_polygon(z: &TElement) -> (SupportPolygon, Vec<OrientedChord>) {
    let s = z.state();
    let poly = SupportPolygon { cells: deviation_cells(s) };
    let arcs = uncombed(s, &poly);
    (poly, arcs)
}

/// Prong of a polygon triangulation containing the start of `g`, as
/// `(right, left)` far ends. `None` when `g` is an edge.
pub fn prong_poly(tri: &PolyTri, g: (usize, usize)) -> Option<(usize, usize)> {
    let (p, q) = g;
    if tri.has_edge(p, q) {
        return None;
    }
    let n = tri.size();
    let d = |k: usize| (k + n - p) % n;
    let dq = d(q);
    let nb = tri.neighbors(p);
    let u = nb.iter().copied().filter(|&k| d(k) < dq).max_by_key(|&k| d(k))?;
    let v = nb.iter().copied().filter(|&k| d(k) > dq).min_by_key(|&k| d(k))?;
    Some((u, v))
}

/// Combs the arc `g` in a polygon triangulation, returning the flipped
/// diagonals in order. Every flip adds an edge at the start of `g`, so the
/// loop runs at most `n - 3` times.
pub fn comb_poly(tri: &mut PolyTri, g: (usize, usize)) -> Vec<(usize, usize)> {
    let mut flips = Vec::new();
    while let Some((u, v)) = prong_poly(tri, g) {
        tri.flip((u, v)).expect("third side of a prong triangle is a diagonal");
        flips.push((u, v));
    }
    flips
}

/// Flips turning `tri` into `target`, combing the target's diagonals in
/// order, each oriented from its smaller vertex.
pub fn comb_to(tri: &PolyTri, target: &PolyTri) -> Vec<(usize, usize)> {
    let mut t = tri.clone();
    let mut out = Vec::new();
    for g in target.diagonals() {
        out.extend(comb_poly(&mut t, g));
    }
    debug_assert_eq!(&t, target);
    out
}

fn arc_cells(g: Chord) -> Vec<Cell> {
    match g.base_edge() {
        Some(b) => b.cells().to_vec(),
        None => g.cells_crossed(),
    }
}

/// The prong of `state` containing the start of `g`, if `g` is not an edge.
pub fn prong(state: &LabeledState, g: OrientedChord) -> Option<Prong> {
    let local = state.local_with(&arc_cells(g.chord()));
    let tri = local.to_poly();
    let (p, q) = (local.index(g.tail), local.index(g.head));
    let (u, v) = prong_poly(&tri, (p, q))?;
    let c = |i: usize| local.cusps[i];
    Some(Prong { vertex: g.tail, left: Chord::new(c(p), c(v)), right: Chord::new(c(p), c(u)) })
}

/// Flips that comb `g` into `state`, and the resulting state.
pub fn comb_arc(state: &LabeledState, g: OrientedChord) -> (Vec<Chord>, LabeledState) {
    let local = state.local_with(&arc_cells(g.chord()));
    let mut tri = local.to_poly();
    let flips: Vec<Chord> = comb_poly(&mut tri, (local.index(g.tail), local.index(g.head)))
        .into_iter()
        .map(|(u, v)| Chord::new(local.cusps[u], local.cusps[v]))
        .collect();
    let mut s = state.clone();
    for &f in &flips {
        s = s.flip(f).expect("combing flips an edge");
    }
    (flips, s)
}

/// Mosher normal form: the flips combing each uncombed arc in turn, then a
/// relabeling of the d.o.e.
pub fn mosher_flip_sequence(z: &TElement) -> CombingTrace {
    let (_, arcs) = deviation_polygon(z);
    let mut s = z.state().clone();
    let mut steps = Vec::new();
    for g in arcs {
        let (flips, _) = comb_arc(&s, g);
        for f in flips {
            let next = s.flip(f).expect("combing flips an edge");
            steps.push(TraceStep { before: s, op: TraceOp::Flip(f), after: next.clone() });
            s = next;
        }
    }
    debug_assert!(s.is_base_triangulation());
    if !s.is_base() {
        steps.push(TraceStep { before: s, op: TraceOp::Relabel, after: LabeledState::base() });
    }
    CombingTrace { steps }
}

/// Moves reducing `state` to the base state: transfers to each flipped edge
/// followed by F, then a final transfer home.
pub fn mosher_reduction(state: &LabeledState) -> MoveWord {
    let z = TElement::from_state(state);
    let flips = mosher_flip_sequence(&z).flips();
    let mut s = state.clone();
    let mut w = MoveWord::new();
    for f in flips {
        let (t, _) = transfer_to_edge(&s, s.doe(), f).expect("flipped chord is an edge");
        let mut m = t.to_moves();
        m.push(Move::F);
        s = s.apply_word(&m);
        w.extend(&m);
    }
    let home = BaseEdge::Root.canonical();
    let t = transfer_word(&s, s.doe(), home).expect("root edge is present");
    w.extend(&t.to_moves());
    w
}

/// The Mosher-type combing of `z` as a move word from the identity to `z`.
pub fn mosher_word(z: &TElement) -> MoveWord {
    mosher_reduction(z.state()).inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{eval_moves, eval_word, relators};
    use std::collections::{HashMap, VecDeque};

    fn el(w: &str) -> TElement {
        eval_word(&w.parse().unwrap())
    }

    /// Flip distances from `t` in the unlabeled flip graph.
    fn flip_bfs(t: &PolyTri) -> HashMap<PolyTri, usize> {
        let mut dist = HashMap::from([(t.clone(), 0)]);
        let mut queue = VecDeque::from([t.clone()]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            for e in u.diagonals() {
                let v = u.flipped(e).unwrap();
                if !dist.contains_key(&v) {
                    dist.insert(v.clone(), d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    #[test]
    fn identity_has_nothing_to_comb() {
        let (_, arcs) = deviation_polygon(&TElement::identity());
        assert!(arcs.is_empty());
        assert!(mosher_flip_sequence(&TElement::identity()).steps.is_empty());
        assert!(mosher_word(&TElement::identity()).is_empty());
    }

    #[test]
    fn alpha_has_one_uncombed_arc() {
        let (poly, arcs) = deviation_polygon(&el("a"));
        assert_eq!(poly.cusps().len(), 4);
        assert_eq!(arcs, vec![BaseEdge::Root.canonical()]);
        let t = mosher_flip_sequence(&el("a"));
        assert_eq!(t.flip_count(), 1);
        assert_eq!(t.steps.last().unwrap().op, TraceOp::Relabel);
        // flipping the d.o.e. carries it along, which for α⁻¹ lands at home
        let t = mosher_flip_sequence(&el("A"));
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.flip_count(), 1);
        assert_eq!(eval_moves(&mosher_word(&el("a"))), el("a"));
        assert_eq!(mosher_reduction(el("a").state()).to_string(), "fff");
    }

    #[test]
    fn uncombed_count_matches_flip_distance() {
        let z = el("abab");
        let (poly, arcs) = deviation_polygon(&z);
        let s = z.state();
        let local = s.local_with(&poly.cells);
        let tri = local.to_poly();
        let base = LabeledState::base().local_with(&poly.cells).to_poly();
        assert_eq!(flip_bfs(&tri)[&base], arcs.len());
    }

    #[test]
    fn comb_arc_cases() {
        let s = LabeledState::base();
        let g = BaseEdge::Above(Cell::B.lower()).canonical();
        assert_eq!(comb_arc(&s, g).0, vec![]);
        let a = el("a");
        let (flips, t) = comb_arc(a.state(), BaseEdge::Root.canonical());
        assert_eq!(flips.len(), 1);
        assert!(t.is_base_triangulation());
        let p = prong(a.state(), BaseEdge::Root.canonical()).unwrap();
        assert_eq!(p.vertex, Cusp::ZERO);
        assert_eq!(flips[0], Chord::new(p.left.b.min(p.right.b), p.left.b.max(p.right.b)));
    }

    #[test]
    fn relators_comb_to_nothing() {
        for (name, r) in relators() {
            let t = mosher_flip_sequence(&eval_word(&r));
            assert!(t.steps.is_empty(), "{name}");
        }
    }

    #[test]
    fn combing_terminates_on_small_polygons() {
        for n in 4..=10 {
            for t in PolyTri::all(n) {
                for p in 0..n {
                    for q in 0..n {
                        if p == q || t.is_side(p, q) {
                            continue;
                        }
                        let mut u = t.clone();
                        let flips = comb_poly(&mut u, (p, q));
                        assert!(flips.len() <= n - 3);
                        assert!(u.has_edge(p, q));
                        assert_eq!(flips.is_empty(), t.has_edge(p, q));
                    }
                }
            }
        }
    }

    #[test]
    fn pentagon_combing_is_optimal_per_arc() {
        // the pentagon flip graph is a 5-cycle of diameter 2
        for t in PolyTri::all(5) {
            let dist = flip_bfs(&t);
            assert_eq!(dist.values().max(), Some(&2));
            for target in PolyTri::all(5) {
                let flips = comb_to(&t, &target);
                assert!(flips.len() >= dist[&target]);
                assert!(flips.len() <= dist[&target] + 1);
            }
        }
    }

    #[test]
    fn comb_counts_bound_flip_distance() {
        for n in 5..=8 {
            let all = PolyTri::all(n);
            let mut worst: f64 = 1.0;
            for t in &all {
                let dist = flip_bfs(t);
                for target in &all {
                    let c = comb_to(t, target).len();
                    let d = dist[target];
                    assert!(c >= d);
                    if d > 0 {
                        worst = worst.max(c as f64 / d as f64);
                    }
                }
            }
            println!("n = {n}: worst comb/optimal ratio {worst:.3}");
        }
    }

    #[test]
    fn trace_json_chains() {
        let z = el("abaab");
        let t = mosher_flip_sequence(&z);
        for w in t.steps.windows(2) {
            assert_eq!(w[0].after, w[1].before);
        }
        let j = t.to_json();
        assert_eq!(j.as_array().unwrap().len(), t.steps.len());
        assert_eq!(j[t.steps.len() - 1]["stateHash"], LabeledState::base().fingerprint());
    }

    mod props {
        use super::*;
        use crate::group::{Gen, GeneratorWord};
        use proptest::prelude::*;

        fn word(max: usize) -> impl Strategy<Value = GeneratorWord> {
            proptest::collection::vec(proptest::sample::select(Gen::ALL.to_vec()), 0..max).prop_map(GeneratorWord)
        }

        proptest! {
            #[test]
            fn mosher_word_round_trips(u in word(11)) {
                let z = eval_word(&u);
                prop_assert_eq!(eval_moves(&mosher_word(&z)), z);
            }

            #[test]
            fn trace_stays_in_deviation_polygon(u in word(11)) {
                let z = eval_word(&u);
                let (poly, arcs) = deviation_polygon(&z);
                let t = mosher_flip_sequence(&z);
                let cusps = poly.cusps();
                for step in &t.steps {
                    prop_assert!(step.after.cells().iter().all(|c| poly.cells.binary_search(c).is_ok()));
                    if let TraceOp::Flip(f) = step.op {
                        prop_assert!(cusps.binary_search(&f.a).is_ok() && cusps.binary_search(&f.b).is_ok());
                    }
                }
                // arcs once combed stay combed
                let mut s = z.state().clone();
                let mut done = 0;
                for step in &t.steps {
                    s = step.after.clone();
                    while done < arcs.len() && s.has_edge(arcs[done].chord()) {
                        done += 1;
                    }
                    prop_assert!(arcs[..done].iter().all(|g| s.has_edge(g.chord())));
                }
                prop_assert!(s.is_base());
            }
        }
    }
}
