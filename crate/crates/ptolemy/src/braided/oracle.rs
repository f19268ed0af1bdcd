//! Planar model used to check the combinatorial twist and flip rules.
//!
//! Cusps sit on the unit circle and base edges are straight chords. The
//! puncture of a base edge is where it meets the other diagonal of its
//! quadrilateral. Paths are realized as polylines, moved by explicit planar
//! maps, and read back by walking through the cells they cross.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use thiserror::Error;

use super::path::{half_cusp, other_cell, Half, Path, Side, Step};
use super::{third_vertex, Arc, BraidLetter, PuncturedState};
use crate::state::{BaseEdge, Cell, Chord, Cusp, Move, MoveWord, OrientedChord};

pub type P = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("polyline passes within {0:e} of a puncture")]
    HitsPuncture(f64),
    #[error("walk did not terminate")]
    Lost,
    #[error("twist region contains another puncture or a cusp")]
    Crowded,
    #[error("flipped arc crosses another arc")]
    Unrealizable,
    #[error("combinatorial rule disagrees: {0}")]
    Mismatch(String),
}

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}

fn add(a: P, b: P) -> P {
    [a[0] + b[0], a[1] + b[1]]
}

fn scale(a: P, s: f64) -> P {
    [a[0] * s, a[1] * s]
}

fn cross(a: P, b: P) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: P) -> f64 {
    dot(a, a).sqrt()
}

fn lerp(a: P, b: P, t: f64) -> P {
    add(a, scale(sub(b, a), t))
}

/// Parameters `(t, s)` of the proper intersection of segments `a→b` and `c→d`.
fn intersect(a: P, b: P, c: P, d: P) -> Option<(f64, f64)> {
    let r = sub(b, a);
    let q = sub(d, c);
    let den = cross(r, q);
    if den.abs() < 1e-300 {
        return None;
    }
    let t = cross(sub(c, a), q) / den;
    let s = cross(sub(c, a), r) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s) {
        Some((t, s))
    } else {
        None
    }
}

pub fn cusp_point(x: Cusp) -> P {
    let a = 2.0 * PI * x.to_f64();
    [a.cos(), a.sin()]
}

pub fn centroid(c: Cell) -> P {
    let [a, b, d] = c.vertices().map(cusp_point);
    [(a[0] + b[0] + d[0]) / 3.0, (a[1] + b[1] + d[1]) / 3.0]
}

pub fn puncture_point(e: BaseEdge) -> P {
    let o = e.canonical();
    let [c0, c1] = e.cells();
    let m0 = cusp_point(third_vertex(c0, o.tail, o.head));
    let m1 = cusp_point(third_vertex(c1, o.tail, o.head));
    let (a, b) = (cusp_point(o.tail), cusp_point(o.head));
    let (t, _) = intersect(a, b, m0, m1).expect("diagonals of a convex quadrilateral cross");
    lerp(a, b, t)
}

fn sides(c: Cell) -> [BaseEdge; 3] {
    [c.edge_above(), BaseEdge::Above(c.lower()), BaseEdge::Above(c.upper())]
}

/// Polyline following a path from `tail` to `head`, crossing each edge at
/// the middle of the recorded half.
pub fn realize_path(p: &Path, tail: Cusp, head: Cusp) -> Vec<P> {
    let cells = p.cells();
    let mut out = vec![cusp_point(tail), centroid(cells[0])];
    for (k, s) in p.steps.iter().enumerate() {
        let x = lerp(puncture_point(s.edge), cusp_point(half_cusp(s.edge, s.half)), 0.5);
        out.push(lerp(x, centroid(cells[k]), 0.02));
        out.push(lerp(x, centroid(cells[k + 1]), 0.02));
        out.push(centroid(cells[k + 1]));
    }
    out.push(cusp_point(head));
    out
}

/// Walks a segment starting inside `cell`, recording the half-edges crossed.
fn walk(mut cell: Cell, a: P, b: P, steps: &mut Vec<Step>) -> Result<Cell, OracleError> {
    // Decisions use only the side of `b` with respect to each edge line, so
    // a vertex lying on an edge is classified the same way by both segments
    // meeting there.
    let side = |p: P, q: P, z: P| cross(sub(q, p), sub(z, p));
    for _ in 0..100_000 {
        let inside = centroid(cell);
        let mut best: Option<(f64, BaseEdge, P)> = None;
        for e in sides(cell) {
            let o = e.canonical();
            let (p, q) = (cusp_point(o.tail), cusp_point(o.head));
            let (sb, sc) = (side(p, q, b), side(p, q, inside));
            if sb == 0.0 || sb.signum() == sc.signum() {
                continue;
            }
            let (r, d) = (sub(b, a), sub(q, p));
            let den = cross(r, d);
            if den == 0.0 {
                continue;
            }
            let t = cross(sub(p, a), d) / den;
            let s = (cross(sub(p, a), r) / den).clamp(0.0, 1.0);
            if best.is_none_or(|(bt, _, _)| t < bt) {
                best = Some((t, e, lerp(p, q, s)));
            }
        }
        let Some((_, e, x)) = best else {
            return Ok(cell);
        };
        let pe = puncture_point(e);
        let len = norm(sub(cusp_point(e.canonical().tail), cusp_point(e.canonical().head)));
        let d = norm(sub(x, pe));
        if d < 1e-9 * len {
            return Err(OracleError::HitsPuncture(d));
        }
        let lo = cusp_point(e.canonical().tail);
        let half = if norm(sub(x, lo)) < norm(sub(pe, lo)) { Half::Lo } else { Half::Hi };
        steps.push(Step { edge: e, half });
        cell = other_cell(e, cell);
    }
    Err(OracleError::Lost)
}

fn locate(p: P) -> Result<Cell, OracleError> {
    let mut scratch = Vec::new();
    // an interior point of A off every line through two special points
    let from = add(centroid(Cell::A), [0.0123, -0.0071]);
    walk(Cell::A, from, p, &mut scratch)
}

/// Reads a polyline from `tail` to `head` back as a canonical path.
pub fn read_path(poly: &[P], tail: Cusp, head: Cusp) -> Result<Path, OracleError> {
    let n = poly.len();
    assert!(n >= 3, "polyline needs an interior vertex");
    let first = lerp(poly[0], poly[1], 1e-7);
    let last = lerp(poly[n - 1], poly[n - 2], 1e-7);
    let mut pts = vec![first];
    pts.extend_from_slice(&poly[1..n - 1]);
    pts.push(last);
    let start = locate(first)?;
    let mut cell = start;
    let mut steps = Vec::new();
    for w in pts.windows(2) {
        cell = walk(cell, w[0], w[1], &mut steps)?;
    }
    Ok(Path { start, steps }.canonical(tail, head))
}

/// Polyline of a push-off of a base arc: the chord bent slightly around its
/// puncture.
pub fn base_push_off(e: BaseEdge, side: Side) -> Vec<P> {
    let o = e.canonical();
    let (a, b) = (cusp_point(o.tail), cusp_point(o.head));
    let d = sub(b, a);
    let left = scale([-d[1], d[0]], 1.0 / norm(d));
    let s = match side {
        Side::L => 1.0,
        Side::R => -1.0,
    };
    let off = 0.05 * norm(sub(centroid(e.cells()[0]), puncture_point(e))).min(norm(sub(centroid(e.cells()[1]), puncture_point(e))));
    // tilted off the normal to keep images in general position
    let dir = add(scale(left, s * 0.96), scale(d, 0.28 / norm(d)));
    vec![a, add(puncture_point(e), scale(dir, off)), b]
}

/// A half-twist supported in an elliptical disk around the segment joining
/// two punctures.
#[derive(Clone, Debug)]
pub struct Twist {
    center: P,
    axis: P,
    normal: P,
    half_len: f64,
    width: f64,
    angle: f64,
}

const INNER: f64 = 1.1;
const OUTER: f64 = 1.35;

impl Twist {
    pub fn new(a: P, b: P, counterclockwise: bool, width: f64) -> Twist {
        let d = sub(b, a);
        let half_len = norm(d) / 2.0;
        let axis = scale(d, 1.0 / norm(d));
        Twist {
            center: lerp(a, b, 0.5),
            axis,
            normal: [-axis[1], axis[0]],
            half_len,
            width,
            angle: if counterclockwise { PI } else { -PI },
        }
    }

    pub fn for_letter(l: BraidLetter) -> Result<Twist, OracleError> {
        let pe = puncture_point(l.e);
        let pf = puncture_point(l.f);
        for width in [0.3, 0.2, 0.12, 0.06] {
            let tw = Twist::new(pe, pf, l.positive, width);
            if tw.is_clear(l) {
                return Ok(tw);
            }
        }
        Err(OracleError::Crowded)
    }

    fn radius(&self, p: P) -> (f64, f64, f64) {
        let r = sub(p, self.center);
        let s = dot(r, self.axis) / self.half_len;
        let t = dot(r, self.normal) / (self.width * self.half_len);
        (s, t, (s * s + t * t).sqrt())
    }

    /// No other puncture or cusp nearby lies in the support.
    fn is_clear(&self, l: BraidLetter) -> bool {
        let c = l.cell();
        let mut cells = vec![c];
        for e in sides(c) {
            let o = other_cell(e, c);
            cells.push(o);
            for f in sides(o) {
                cells.push(other_cell(f, o));
            }
        }
        cells.iter().all(|&x| {
            sides(x).iter().all(|&e| e == l.e || e == l.f || self.radius(puncture_point(e)).2 > OUTER + 0.05)
                && x.vertices().iter().all(|&v| self.radius(cusp_point(v)).2 > OUTER + 0.05)
        })
    }

    pub fn apply(&self, p: P) -> P {
        let (s, t, rho) = self.radius(p);
        if rho >= OUTER {
            return p;
        }
        let f = ((OUTER - rho) / (OUTER - INNER)).clamp(0.0, 1.0);
        let th = self.angle * f;
        let (s2, t2) = (s * th.cos() - t * th.sin(), s * th.sin() + t * th.cos());
        add(self.center, add(scale(self.axis, s2 * self.half_len), scale(self.normal, t2 * self.width * self.half_len)))
    }

    /// Image of a polyline, subdivided until consecutive image points are
    /// much closer than the punctures are to each other.
    pub fn apply_polyline(&self, poly: &[P]) -> Vec<P> {
        let tol = self.width * self.half_len / 50.0;
        let mut out = vec![self.apply(poly[0])];
        for w in poly.windows(2) {
            self.refine(w[0], w[1], self.apply(w[0]), self.apply(w[1]), tol, 0, &mut out);
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(&self, a: P, b: P, fa: P, fb: P, tol: f64, depth: u32, out: &mut Vec<P>) {
        let m = lerp(a, b, 0.5);
        let fm = self.apply(m);
        let straight = norm(sub(fm, lerp(fa, fb, 0.5))) < tol * 0.1;
        if depth >= 40 || (norm(sub(fb, fa)) < tol && straight) || (straight && !self.touches(a, b)) {
            out.push(fb);
            return;
        }
        self.refine(a, m, fa, fm, tol, depth + 1, out);
        self.refine(m, b, fm, fb, tol, depth + 1, out);
    }

    /// Whether the segment meets the support.
    fn touches(&self, a: P, b: P) -> bool {
        let (_, c) = closest(a, b, self.center);
        let reach = self.half_len * OUTER;
        norm(sub(c, self.center)) <= reach * 1.01
    }
}

fn closest(a: P, b: P, c: P) -> (f64, P) {
    let d = sub(b, a);
    let t = (dot(sub(c, a), d) / dot(d, d)).clamp(0.0, 1.0);
    (t, lerp(a, b, t))
}

/// Geometric image of a base arc under a half-twist: both push-offs read
/// back, and the base edge whose puncture the carried one is moved onto.
pub fn twist_image(l: BraidLetter, e: BaseEdge) -> Result<Arc, OracleError> {
    let tw = Twist::for_letter(l)?;
    let o = e.canonical();
    let read = |side| read_path(&tw.apply_polyline(&base_push_off(e, side)), o.tail, o.head);
    let q = tw.apply(puncture_point(e));
    let puncture = [l.e, l.f, e]
        .into_iter()
        .min_by(|a, b| norm(sub(puncture_point(*a), q)).total_cmp(&norm(sub(puncture_point(*b), q))))
        .expect("candidates");
    Ok(Arc { tail: o.tail, head: o.head, left: read(Side::L)?, right: read(Side::R)?, puncture })
}

/// A punctured state realized in the plane. Arcs on base chords that were
/// never flipped stay straight; flipped arcs are two segments through their
/// puncture.
#[derive(Clone, Debug)]
pub struct PlanarState {
    state: PuncturedState,
    bent: BTreeMap<Chord, (OrientedChord, P)>,
}

impl PlanarState {
    pub fn base() -> PlanarState {
        PlanarState { state: PuncturedState::base(), bent: BTreeMap::new() }
    }

    pub fn state(&self) -> &PuncturedState {
        &self.state
    }

    fn polyline(&self, c: Chord) -> Vec<P> {
        match self.bent.get(&c) {
            Some((o, q)) => vec![cusp_point(o.tail), *q, cusp_point(o.head)],
            None => vec![cusp_point(c.a), cusp_point(c.b)],
        }
    }

    fn nearby_edges(&self) -> Vec<Chord> {
        let mut out: Vec<Chord> = self.bent.keys().copied().collect();
        for &c in self.state.underlying().cells() {
            for cc in [c, c.lower(), c.upper()] {
                for e in sides(cc) {
                    if self.state.underlying().has_edge(e.chord()) {
                        out.push(e.chord());
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Flips an edge geometrically and returns the new state together with
    /// the push-offs of the new arc read back from the plane.
    pub fn flip(&self, chord: Chord) -> Result<(PlanarState, Arc), OracleError> {
        let next = self.state.flip(chord).map_err(|_| OracleError::Unrealizable)?;
        let e = OrientedChord::new(chord.a, chord.b);
        let x = self.state.underlying().left_apex(e);
        let y = self.state.underlying().right_apex(e);
        let puncture = self.state.arc(chord.a, chord.b).map_err(|_| OracleError::Unrealizable)?.puncture;
        let q = puncture_point(puncture);
        let (px, py) = (cusp_point(x), cusp_point(y));
        let new = [px, q, py];
        for c in self.nearby_edges() {
            if c == chord {
                continue;
            }
            let poly = self.polyline(c);
            for s in new.windows(2) {
                for t in poly.windows(2) {
                    if let Some((a, b)) = intersect(s[0], s[1], t[0], t[1]) {
                        let at_end = !(1e-9..=1.0 - 1e-9).contains(&a) && !(1e-9..=1.0 - 1e-9).contains(&b);
                        if !at_end {
                            return Err(OracleError::Unrealizable);
                        }
                    }
                }
            }
        }
        // push-offs: move the puncture vertex off along the bisector
        let d1 = scale(sub(q, px), 1.0 / norm(sub(q, px)));
        let d2 = scale(sub(py, q), 1.0 / norm(sub(py, q)));
        let nl = add([-d1[1], d1[0]], [-d2[1], d2[0]]);
        let nl = scale(nl, 1.0 / norm(nl));
        let mut off = f64::INFINITY;
        for c in self.nearby_edges() {
            if let Some(be) = c.base_edge() {
                if be != puncture {
                    off = off.min(norm(sub(puncture_point(be), q)));
                }
            }
            for k in [c.a, c.b] {
                off = off.min(norm(sub(cusp_point(k), q)));
            }
        }
        let off = off * 1e-3;
        let left = read_path(&[px, add(q, scale(nl, off)), py], x, y)?;
        let right = read_path(&[px, add(q, scale(nl, -off)), py], x, y)?;
        let arc = Arc { tail: x, head: y, left, right, puncture };
        let mut bent = self.bent.clone();
        bent.remove(&chord);
        bent.insert(Chord::new(x, y), (OrientedChord::new(x, y), q));
        Ok((PlanarState { state: next, bent }, arc))
    }

    /// Applies moves; each flip is checked against the combinatorial rule.
    /// Returns the number of flips compared.
    pub fn run(&self, w: &MoveWord) -> Result<(PlanarState, usize), OracleError> {
        let mut cur = self.clone();
        let mut checked = 0;
        for &m in &w.0 {
            let flips = match m {
                Move::F => 1,
                Move::FInv => 3,
                Move::R | Move::RInv => 0,
            };
            for _ in 0..flips {
                let doe = cur.state.underlying().doe().chord();
                let (next, arc) = cur.flip(doe)?;
                let comb = next.state.arc(arc.tail, arc.head).expect("new diagonal");
                if comb != arc.clone().normalized() {
                    return Err(OracleError::Mismatch(format!("plane {arc} vs rule {comb}")));
                }
                checked += 1;
                cur = next;
            }
            if matches!(m, Move::R | Move::RInv) {
                let s = cur.state.apply(m);
                cur = PlanarState { state: s, bent: cur.bent };
            }
        }
        Ok((cur, checked))
    }
}
