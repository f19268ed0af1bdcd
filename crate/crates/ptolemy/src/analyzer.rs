//! Measurements in the Cayley graph: balls, certified distance bounds,
//! corridor widths between combing paths, move graphs of small polygons and
//! departure profiles.
//!
//! Distances are between states: two states are adjacent when one move
//! carries one to the other, which is the Cayley graph in which consecutive
//! points of a combing path are adjacent.

use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::cmp::Reverse;

use serde::Serialize;
use thiserror::Error;

use crate::combing::reduced_combing;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{eval_moves, Gen, GeneratorWord, TElement};
use crate::mosher::mosher_word;
use crate::polygon::{LabeledPoly, PolyTri};
use crate::state::{Cell, LabeledState, Move, MoveWord, StateKey};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyzerError {
    #[error("ball of radius {radius} exceeds the cap of {cap} states")]
    BallCap { radius: usize, cap: usize },
    #[error("polygon size {0} outside the supported range")]
    PolygonSize(usize),
    #[error("paths do not start at a common state")]
    DifferentStarts,
}

pub const DEFAULT_BALL_CAP: usize = 2_000_000;

/// Exact distances from a center up to a radius, with BFS parents.
pub struct Ball {
    pub center: LabeledState,
    pub radius: usize,
    seen: HashMap<StateKey, (usize, Option<(StateKey, Move)>)>,
    frontier: Vec<LabeledState>,
}

impl Ball {
    pub fn new(center: &LabeledState) -> Ball {
        let mut seen = HashMap::new();
        seen.insert(center.key(), (0, None));
        Ball { center: center.clone(), radius: 0, seen, frontier: vec![center.clone()] }
    }

    /// Adds one more layer; returns the states it added.
    pub fn grow(&mut self, cap: usize) -> Result<&[LabeledState], AnalyzerError> {
        let mut next = Vec::new();
        for s in &self.frontier {
            let k = s.key();
            for m in Move::ALL {
                let t = s.apply(m);
                let tk = t.key();
                if !self.seen.contains_key(&tk) {
                    self.seen.insert(tk, (self.radius + 1, Some((k.clone(), m))));
                    next.push(t);
                }
            }
            if self.seen.len() > cap {
                return Err(AnalyzerError::BallCap { radius: self.radius + 1, cap });
            }
        }
        self.radius += 1;
        self.frontier = next;
        Ok(&self.frontier)
    }

    pub fn around(center: &LabeledState, radius: usize, cap: usize) -> Result<Ball, AnalyzerError> {
        let mut b = Ball::new(center);
        for _ in 0..radius {
            b.grow(cap)?;
        }
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    pub fn distance(&self, s: &LabeledState) -> Option<usize> {
        self.distance_key(&s.key())
    }

    pub fn distance_key(&self, k: &StateKey) -> Option<usize> {
        self.seen.get(k).map(|e| e.0)
    }

    /// A shortest word carrying the center to `s`.
    pub fn word_to(&self, s: &LabeledState) -> Option<MoveWord> {
        let mut k = s.key();
        let mut w = Vec::new();
        while let Some((_, Some((p, m)))) = self.seen.get(&k) {
            w.push(*m);
            k = p.clone();
        }
        self.seen.get(&s.key())?;
        w.reverse();
        Some(MoveWord(w))
    }

    /// Sizes of the spheres of radius `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for (d, _) in self.seen.values() {
            out[*d] += 1;
        }
        out
    }

    pub fn keys(&self) -> impl Iterator<Item = (&StateKey, usize)> {
        self.seen.iter().map(|(k, e)| (k, e.0))
    }
}

/// Ball around the identity.
pub fn ball_bfs(radius: usize, cap: usize) -> Result<Ball, AnalyzerError> {
    Ball::around(&LabeledState::base(), radius, cap)
}

/// A distance between two states, always with a word carrying the first to
/// the second.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Distance {
    Exact { d: usize, witness: MoveWord },
    Upper { d: usize, witness: MoveWord },
    Unknown,
}

impl Distance {
    pub fn value(&self) -> Option<usize> {
        match self {
            Distance::Exact { d, .. } | Distance::Upper { d, .. } => Some(*d),
            Distance::Unknown => None,
        }
    }

    pub fn witness(&self) -> Option<&MoveWord> {
        match self {
            Distance::Exact { witness, .. } | Distance::Upper { witness, .. } => Some(witness),
            Distance::Unknown => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Distance::Exact { .. })
    }
}

/// Certified distances: bidirectional search up to `budget`, otherwise the
/// combing of the difference element as a witness.
pub struct DistanceOracle {
    pub budget: usize,
    pub cap: usize,
    cache: HashMap<(StateKey, StateKey), Distance>,
}

impl DistanceOracle {
    pub fn new(budget: usize) -> DistanceOracle {
        DistanceOracle { budget, cap: DEFAULT_BALL_CAP, cache: HashMap::new() }
    }

    pub fn cached(&self) -> usize {
        self.cache.len()
    }

    pub fn distance_upper(&mut self, g: &LabeledState, h: &LabeledState) -> Distance {
        let key = (g.key(), h.key());
        if let Some(d) = self.cache.get(&key) {
            return d.clone();
        }
        let d = match bidirectional(g, h, self.budget, self.cap) {
            Some(w) => Distance::Exact { d: w.len(), witness: w },
            None => match connecting_word(g, h) {
                Some(w) => Distance::Upper { d: w.len(), witness: w },
                None => Distance::Unknown,
            },
        };
        self.cache.insert(key, d.clone());
        d
    }
}

/// A shortest word from `g` to `h` if their distance is at most `budget`.
pub fn bidirectional(g: &LabeledState, h: &LabeledState, budget: usize, cap: usize) -> Option<MoveWord> {
    if g.key() == h.key() {
        return Some(MoveWord::new());
    }
    let mut a = Ball::new(g);
    let mut b = Ball::new(h);
    for step in 0..budget {
        let (grown, other) = if step % 2 == 0 { (&mut a, &b) } else { (&mut b, &a) };
        let layer = grown.grow(cap).ok()?;
        let best = layer
            .iter()
            .filter_map(|s| other.distance(s).map(|d| (d, s.clone())))
            .min_by_key(|(d, s)| (*d, s.key()));
        if let Some((_, meet)) = best {
            let w1 = a.word_to(&meet)?;
            let w2 = b.word_to(&meet)?;
            return Some(w1.concat(&w2.inverse()));
        }
    }
    None
}

/// A word carrying `g` to `h`, built from combings of the difference
/// element and verified.
pub fn connecting_word(g: &LabeledState, h: &LabeledState) -> Option<MoveWord> {
    let wg = mosher_word(&TElement::from_state(g));
    let wh = mosher_word(&TElement::from_state(h));
    let raw = wg.inverse().concat(&wh).free_reduce();
    let x = eval_moves(&raw);
    let mut candidates = vec![raw, reduced_combing(&x), mosher_word(&x)];
    candidates.sort_by_key(|w| w.len());
    candidates.into_iter().find(|w| g.apply_word(w).key() == h.key())
}

/// States along a move word, with the word kept for witnesses.
#[derive(Clone, Debug)]
pub struct CombingPath {
    pub word: MoveWord,
    pub states: Vec<LabeledState>,
}

impl CombingPath {
    pub fn new(start: &LabeledState, word: &MoveWord) -> CombingPath {
        CombingPath { word: word.clone(), states: start.trajectory(word) }
    }

    pub fn from_identity(word: &MoveWord) -> CombingPath {
        CombingPath::new(&LabeledState::base(), word)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorridorOutcome {
    Feasible,
    /// Every cell on the best matching is exact and some exceeds the cap.
    NotFound,
    /// Some cell that blocks the matching only has a loose bound.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorridorReport {
    pub outcome: CorridorOutcome,
    /// Width of the best matching found (present even above the cap).
    pub k_feasible: Option<usize>,
    pub kmax: usize,
    pub matched_pairs: Vec<(usize, usize)>,
    pub oracle_queries: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Source {
    /// Found in the ball around the point of the first path.
    Ball,
    /// From the oracle; the witness is in `oracle_words`.
    Oracle,
    /// One step along a path from the given cell.
    Via(usize),
}

/// Grid of certified bounds `d(a_i, b_j)`.
pub struct CorridorGrid<'a> {
    a: &'a CombingPath,
    b: &'a CombingPath,
    n: usize,
    m: usize,
    bound: Vec<usize>,
    exact: Vec<bool>,
    source: Vec<Source>,
    balls: Vec<Ball>,
    oracle_words: HashMap<usize, MoveWord>,
}

impl<'a> CorridorGrid<'a> {
    /// Exact values inside balls of radius `r0` around the points of `a`,
    /// then bounds spread along both paths.
    pub fn new(a: &'a CombingPath, b: &'a CombingPath, r0: usize) -> Result<CorridorGrid<'a>, AnalyzerError> {
        if a.states.first().map(|s| s.key()) != b.states.first().map(|s| s.key()) {
            return Err(AnalyzerError::DifferentStarts);
        }
        let (n, m) = (a.len(), b.len());
        let mut at: HashMap<StateKey, Vec<usize>> = HashMap::new();
        for (j, s) in b.states.iter().enumerate() {
            at.entry(s.key()).or_default().push(j);
        }
        let mut bound = vec![usize::MAX; n * m];
        let mut exact = vec![false; n * m];
        let mut source = vec![Source::Ball; n * m];
        let mut balls = Vec::with_capacity(n);
        for (i, s) in a.states.iter().enumerate() {
            let ball = Ball::around(s, r0, DEFAULT_BALL_CAP)?;
            for (k, d) in ball.keys() {
                for &j in at.get(k).into_iter().flatten() {
                    bound[i * m + j] = d;
                    exact[i * m + j] = true;
                    source[i * m + j] = Source::Ball;
                }
            }
            balls.push(ball);
        }
        let mut g = CorridorGrid { a, b, n, m, bound, exact, source, balls, oracle_words: HashMap::new() };
        g.relax();
        Ok(g)
    }

    fn neighbors(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = (c / self.m, c % self.m);
        let mut v = Vec::with_capacity(4);
        if i > 0 {
            v.push(c - self.m);
        }
        if i + 1 < self.n {
            v.push(c + self.m);
        }
        if j > 0 {
            v.push(c - 1);
        }
        if j + 1 < self.m {
            v.push(c + 1);
        }
        v.into_iter()
    }

    /// Spreads bounds by the triangle inequality along both paths.
    fn relax(&mut self) {
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
            (0..self.bound.len()).filter(|&c| self.bound[c] != usize::MAX).map(|c| Reverse((self.bound[c], c))).collect();
        while let Some(Reverse((d, c))) = heap.pop() {
            if d > self.bound[c] {
                continue;
            }
            let nbrs: Vec<usize> = self.neighbors(c).collect();
            for nb in nbrs {
                if d + 1 < self.bound[nb] {
                    self.bound[nb] = d + 1;
                    self.exact[nb] = false;
                    self.source[nb] = Source::Via(c);
                    heap.push(Reverse((d + 1, nb)));
                }
            }
        }
    }

    pub fn bound(&self, i: usize, j: usize) -> usize {
        self.bound[i * self.m + j]
    }

    pub fn is_exact(&self, i: usize, j: usize) -> bool {
        self.exact[i * self.m + j]
    }

    /// Best monotone matching: its width and cells.
    pub fn bottleneck(&self) -> (usize, Vec<(usize, usize)>) {
        let (n, m) = (self.n, self.m);
        let mut best = vec![usize::MAX; n * m];
        let mut from = vec![usize::MAX; n * m];
        for i in 0..n {
            for j in 0..m {
                let c = i * m + j;
                if i == 0 && j == 0 {
                    best[c] = self.bound[c];
                    continue;
                }
                // prefer diagonal steps on ties so matchings stay short
                let mut opts = Vec::with_capacity(3);
                if i > 0 && j > 0 {
                    opts.push(c - m - 1);
                }
                if i > 0 {
                    opts.push(c - m);
                }
                if j > 0 {
                    opts.push(c - 1);
                }
                let p = opts.into_iter().min_by_key(|&p| best[p]).expect("some predecessor");
                best[c] = best[p].max(self.bound[c]);
                from[c] = p;
            }
        }
        let mut c = n * m - 1;
        let mut path = vec![(c / m, c % m)];
        while c != 0 {
            c = from[c];
            path.push((c / m, c % m));
        }
        path.reverse();
        (best[n * m - 1], path)
    }

    /// Queries the oracle on the blocking inexact cells of the best matching.
    /// Returns the number of queries made.
    fn refine(&mut self, oracle: &mut DistanceOracle, width: usize, path: &[(usize, usize)]) -> usize {
        let mut queries = 0;
        let mut improved = false;
        for &(i, j) in path {
            let c = i * self.m + j;
            if self.exact[c] || self.bound[c] < width || self.oracle_words.contains_key(&c) {
                continue;
            }
            queries += 1;
            let d = oracle.distance_upper(&self.a.states[i], &self.b.states[j]);
            if let Some(w) = d.witness() {
                self.oracle_words.insert(c, w.clone());
                if w.len() < self.bound[c] || (d.is_exact() && w.len() == self.bound[c]) {
                    improved |= w.len() < self.bound[c];
                    self.bound[c] = w.len();
                    self.exact[c] = d.is_exact();
                    self.source[c] = Source::Oracle;
                }
            }
        }
        if improved {
            self.relax();
        }
        queries
    }

    /// A word carrying `a_i` to `b_j` of length at most the stored bound.
    pub fn witness(&self, i: usize, j: usize) -> MoveWord {
        let mut prefix = MoveWord::new();
        let mut suffix: Vec<MoveWord> = Vec::new();
        let (mut i, mut j) = (i, j);
        let core = loop {
            let c = i * self.m + j;
            match self.source[c] {
                Source::Ball => break self.balls[i].word_to(&self.b.states[j]).expect("cell found in ball"),
                Source::Oracle => break self.oracle_words[&c].clone(),
                Source::Via(p) => {
                    let (pi, pj) = (p / self.m, p % self.m);
                    if pi + 1 == i {
                        prefix.push(self.a.word.0[pi].inverse());
                    } else if pi == i + 1 {
                        prefix.push(self.a.word.0[i]);
                    } else if pj + 1 == j {
                        suffix.push(MoveWord(vec![self.b.word.0[pj]]));
                    } else {
                        suffix.push(MoveWord(vec![self.b.word.0[j].inverse()]));
                    }
                    i = pi;
                    j = pj;
                }
            }
        };
        let mut w = prefix.concat(&core);
        for s in suffix.iter().rev() {
            w.extend(s);
        }
        w
    }
}

/// Smallest certified width of a monotone matching between two paths with a
/// common start.
pub fn min_corridor_k(
    a: &CombingPath,
    b: &CombingPath,
    kmax: usize,
    r0: usize,
    oracle: &mut DistanceOracle,
) -> Result<CorridorReport, AnalyzerError> {
    let mut grid = CorridorGrid::new(a, b, r0)?;
    let mut queries = 0;
    let (width, path) = loop {
        let (width, path) = grid.bottleneck();
        let q = grid.refine(oracle, width, &path);
        queries += q;
        let (w2, p2) = grid.bottleneck();
        if q == 0 || w2 == width {
            break (w2, p2);
        }
    };
    let blocking_inexact = path.iter().any(|&(i, j)| grid.bound(i, j) > kmax && !grid.is_exact(i, j));
    let outcome = if width <= kmax {
        CorridorOutcome::Feasible
    } else if blocking_inexact {
        CorridorOutcome::Inconclusive
    } else {
        CorridorOutcome::NotFound
    };
    Ok(CorridorReport { outcome, k_feasible: Some(width), kmax, matched_pairs: path, oracle_queries: queries })
}

/// Whether the two paths stay within `k` of each other along some monotone
/// matching; `None` when the bounds cannot decide.
pub fn corridor_feasible(a: &CombingPath, b: &CombingPath, k: usize, oracle: &mut DistanceOracle) -> Option<bool> {
    let r = min_corridor_k(a, b, k, 3, oracle).ok()?;
    match r.outcome {
        CorridorOutcome::Feasible => Some(true),
        CorridorOutcome::NotFound => Some(false),
        CorridorOutcome::Inconclusive => None,
    }
}

/// Reduced combings of `g` and of a neighbour `g·m`.
pub fn neighbor_paths(g: &TElement, m: Move) -> (CombingPath, CombingPath) {
    let h = TElement::from_state(&g.state().apply(m));
    (CombingPath::from_identity(&reduced_combing(g)), CombingPath::from_identity(&reduced_combing(&h)))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PolygonGraphReport {
    pub n: usize,
    pub triangulations: usize,
    pub states: usize,
    pub components: usize,
    pub diameter: usize,
    /// `(eccentricity, number of states)`, increasing.
    pub eccentricities: Vec<(usize, usize)>,
}

/// Labeled states of the `n`-gon and their F/R edges as index lists.
fn labeled_graph(n: usize) -> (Vec<LabeledPoly>, Vec<Vec<usize>>) {
    let states = LabeledPoly::all(n);
    let index: HashMap<&LabeledPoly, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let adj = states
        .iter()
        .map(|s| {
            let mut v: Vec<usize> = Move::ALL.iter().filter_map(|&m| s.apply(m)).map(|t| index[&t]).collect();
            v.sort();
            v.dedup();
            v
        })
        .collect();
    (states, adj)
}

fn bfs_indices(adj: &[Vec<usize>], src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

/// Exact BFS over the labeled move graph of the `n`-gon. States whose d.o.e.
/// has no triangle on its left are excluded.
pub fn polygon_move_graph(n: usize) -> Result<PolygonGraphReport, AnalyzerError> {
    if !(4..=10).contains(&n) {
        return Err(AnalyzerError::PolygonSize(n));
    }
    let (states, adj) = labeled_graph(n);
    let mut comp = vec![usize::MAX; states.len()];
    let mut components = 0;
    let mut ecc_count: HashMap<usize, usize> = HashMap::new();
    let mut diameter = 0;
    for s in 0..states.len() {
        let dist = bfs_indices(&adj, s);
        if comp[s] == usize::MAX {
            for (t, &d) in dist.iter().enumerate() {
                if d != usize::MAX {
                    comp[t] = components;
                }
            }
            components += 1;
        }
        let ecc = dist.iter().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0);
        *ecc_count.entry(ecc).or_default() += 1;
        diameter = diameter.max(ecc);
    }
    let mut eccentricities: Vec<(usize, usize)> = ecc_count.into_iter().collect();
    eccentricities.sort();
    Ok(PolygonGraphReport { n, triangulations: PolyTri::all(n).len(), states: states.len(), components, diameter, eccentricities })
}

/// Diameter of the labeled move graph from powers of `I + A`, as an
/// independent check of the BFS. `None` if the graph is disconnected.
pub fn polygon_diameter_by_matrix(n: usize) -> Option<usize> {
    let (states, adj) = labeled_graph(n);
    let k = states.len();
    let mut reach = vec![vec![false; k]; k];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    let step = |r: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
        (0..k)
            .map(|i| (0..k).map(|j| r[i][j] || adj[j].iter().any(|&p| r[i][p])).collect())
            .collect()
    };
    for power in 0..=k {
        if reach.iter().all(|row| row.iter().all(|&x| x)) {
            return Some(power);
        }
        let next = step(&reach);
        if next == reach {
            return None;
        }
        reach = next;
    }
    None
}

fn dihedral_images(t: &PolyTri) -> Vec<Vec<(usize, usize)>> {
    let n = t.size();
    let d = t.diagonals();
    let mut out = Vec::with_capacity(2 * n);
    for r in 0..n {
        for refl in [false, true] {
            let map = |x: usize| if refl { (n + r - x) % n } else { (x + r) % n };
            let mut img: Vec<(usize, usize)> = d.iter().map(|&(a, b)| (map(a).min(map(b)), map(a).max(map(b)))).collect();
            img.sort();
            out.push(img);
        }
    }
    out
}

/// Diameter of the unlabeled flip graph of the `n`-gon, by BFS from one
/// triangulation in each dihedral orbit.
pub fn flip_graph_diameter(n: usize) -> usize {
    let all = PolyTri::all(n);
    let index: HashMap<Vec<(usize, usize)>, usize> = all.iter().enumerate().map(|(i, t)| (t.diagonals(), i)).collect();
    let adj: Vec<Vec<usize>> = all
        .iter()
        .map(|t| t.diagonals().into_iter().map(|d| index[&t.flipped(d).expect("diagonal").diagonals()]).collect())
        .collect();
    let mut done = vec![false; all.len()];
    let mut diameter = 0;
    for (i, t) in all.iter().enumerate() {
        if done[i] {
            continue;
        }
        for img in dihedral_images(t) {
            done[index[&img]] = true;
        }
        diameter = diameter.max(bfs_indices(&adj, i).into_iter().max().unwrap_or(0));
    }
    diameter
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DepartureProfile {
    pub rmax: usize,
    /// `d[r - 1]` is the largest `t - s` with `d(p_s, p_t) <= r`.
    pub d: Vec<usize>,
    pub paths: usize,
    pub longest_path: usize,
}

/// Exact departure profile of combing paths for `r = 1..=rmax`.
pub fn departure_profile(paths: &[CombingPath], rmax: usize) -> Result<DepartureProfile, AnalyzerError> {
    let mut d = vec![0; rmax];
    for p in paths {
        let mut at: HashMap<StateKey, Vec<usize>> = HashMap::new();
        for (t, s) in p.states.iter().enumerate() {
            at.entry(s.key()).or_default().push(t);
        }
        for (s, st) in p.states.iter().enumerate() {
            let ball = Ball::around(st, rmax, DEFAULT_BALL_CAP)?;
            for (k, r) in ball.keys() {
                if let Some(ts) = at.get(k) {
                    let far = ts.iter().copied().filter(|&t| t > s).max();
                    if let Some(t) = far {
                        for slot in d.iter_mut().skip(r.max(1) - 1) {
                            *slot = (*slot).max(t - s);
                        }
                    }
                }
            }
        }
    }
    Ok(DepartureProfile { rmax, d, paths: paths.len(), longest_path: paths.iter().map(|p| p.len()).max().unwrap_or(0) })
}

/// Element whose unreduced combing flips an edge `depth` levels deep and
/// later flips it back: the two edges of the cell `B.lower` followed by
/// `depth` upper steps.
pub fn planted_back_and_forth(depth: usize) -> TElement {
    let mut c = Cell::B.lower();
    for _ in 0..depth {
        c = c.upper();
    }
    let f1 = c.lower().edge_above().chord();
    let f2 = c.upper().edge_above().chord();
    TElement::from_state(&LabeledState::base().flip(f1).and_then(|s| s.flip(f2)).expect("edges above a cell are flippable"))
}

/// `count` generator words with lengths uniform in `1..=max_len`, drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn sample_words(seed: u64, count: usize, max_len: usize) -> Vec<GeneratorWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_len.max(1));
            GeneratorWord((0..n).map(|_| Gen::ALL[rng.gen_range(0..4)]).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combing::combing;
    use crate::group::{eval_word, relators};

    fn el(w: &str) -> TElement {
        eval_word(&w.parse().unwrap())
    }

    #[test]
    fn small_balls() {
        let b0 = ball_bfs(0, 10).unwrap();
        assert_eq!(b0.len(), 1);
        let b1 = ball_bfs(1, 100).unwrap();
        assert_eq!(b1.len(), 5);
        let base = LabeledState::base();
        let n: Vec<StateKey> = Move::ALL.iter().map(|&m| base.apply(m).key()).collect();
        for i in 0..4 {
            for j in 0..i {
                assert_ne!(n[i], n[j]);
            }
        }
        let sizes: Vec<usize> = (0..5).map(|r| ball_bfs(r, 100_000).unwrap().len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
        assert!(matches!(ball_bfs(4, 10), Err(AnalyzerError::BallCap { .. })));
    }

    #[test]
    fn ball_words_are_shortest() {
        let b = ball_bfs(3, 100_000).unwrap();
        let base = LabeledState::base();
        for (k, d) in b.keys().map(|(k, d)| (k.clone(), d)).collect::<Vec<_>>() {
            let s = LabeledState::from_parts(k.diags.clone(), k.doe);
            let w = b.word_to(&s).unwrap();
            assert_eq!(w.len(), d);
            assert_eq!(base.apply_word(&w).key(), k);
        }
    }

    #[test]
    fn oracle_basics() {
        let mut o = DistanceOracle::new(6);
        let g = el("abaab").state().clone();
        assert_eq!(o.distance_upper(&g, &g).value(), Some(0));
        let h = g.apply(Move::F);
        assert_eq!(o.distance_upper(&g, &h), Distance::Exact { d: 1, witness: "f".parse().unwrap() });
        for (name, r) in relators() {
            if r.len() == 10 {
                // r·g equals g, so split the relator loop in the middle
                let half = MoveWord(r.phi().0[..5].to_vec());
                let mid = g.apply_word(&half);
                let d = o.distance_upper(&g, &mid);
                assert!(d.value().unwrap() <= 5, "{name}");
                assert_eq!(g.apply_word(d.witness().unwrap()).key(), mid.key());
            }
        }
    }

    #[test]
    fn oracle_falls_back_to_witnesses() {
        let mut o = DistanceOracle::new(2);
        let g = LabeledState::base();
        let h = el("abababbaab").state().clone();
        let d = o.distance_upper(&g, &h);
        assert!(matches!(d, Distance::Upper { .. }));
        assert_eq!(g.apply_word(d.witness().unwrap()).key(), h.key());
    }

    #[test]
    fn identical_paths_have_width_zero() {
        let p = CombingPath::from_identity(&reduced_combing(&el("abbab")));
        let mut o = DistanceOracle::new(4);
        let r = min_corridor_k(&p, &p, 30, 2, &mut o).unwrap();
        assert_eq!(r.k_feasible, Some(0));
        assert_eq!(r.outcome, CorridorOutcome::Feasible);
    }

    #[test]
    fn inserted_loop_has_small_width() {
        let w = reduced_combing(&el("abab"));
        let half = w.len() / 2;
        let loop5 = "rfrfrfrfrf".parse::<MoveWord>().unwrap();
        let mut detour = MoveWord(w.0[..half].to_vec());
        detour.extend(&loop5);
        detour.extend(&MoveWord(w.0[half..].to_vec()));
        let a = CombingPath::from_identity(&w);
        let b = CombingPath::from_identity(&detour);
        let mut o = DistanceOracle::new(6);
        let r = min_corridor_k(&a, &b, 30, 3, &mut o).unwrap();
        assert!(r.k_feasible.unwrap() <= 5, "{r:?}");
        let grid = CorridorGrid::new(&a, &b, 3).unwrap();
        for &(i, j) in &r.matched_pairs {
            let w = grid.witness(i, j);
            assert!(w.len() <= grid.bound(i, j));
            assert_eq!(a.states[i].apply_word(&w).key(), b.states[j].key());
        }
    }

    #[test]
    fn different_starts_rejected() {
        let a = CombingPath::from_identity(&MoveWord::new());
        let b = CombingPath::new(&LabeledState::base().apply(Move::F), &MoveWord::new());
        assert!(CorridorGrid::new(&a, &b, 1).is_err());
    }

    #[test]
    fn neighbour_combings_fellow_travel() {
        let mut o = DistanceOracle::new(6);
        for w in ["ab", "abab", "aabbab", "babba"] {
            for m in [Move::F, Move::R] {
                let (a, b) = neighbor_paths(&el(w), m);
                let r = min_corridor_k(&a, &b, 30, 3, &mut o).unwrap();
                assert_eq!(r.outcome, CorridorOutcome::Feasible, "{w}");
                let k = r.k_feasible.unwrap();
                assert_eq!(corridor_feasible(&a, &b, k + 1, &mut o), Some(true));
            }
        }
    }

    #[test]
    fn polygon_graphs() {
        let r4 = polygon_move_graph(4).unwrap();
        assert_eq!(r4.triangulations, 2);
        assert_eq!(r4.states, 2 * (4 + 2));
        assert_eq!(r4.components, 1);
        let r5 = polygon_move_graph(5).unwrap();
        assert_eq!(r5.states, 5 * (5 + 4));
        assert_eq!(Some(r5.diameter), polygon_diameter_by_matrix(5));
        assert_eq!(Some(r4.diameter), polygon_diameter_by_matrix(4));
        println!("diameters n=4: {}, n=5: {}", r4.diameter, r5.diameter);
        assert!(polygon_move_graph(3).is_err());
    }

    #[test]
    fn r_is_a_bijection_and_f_has_order_four() {
        let states = LabeledPoly::all(6);
        let images: std::collections::HashSet<LabeledPoly> = states.iter().map(|s| s.move_r().unwrap()).collect();
        assert_eq!(images.len(), states.len());
        for s in &states {
            if let Some(f) = s.move_f() {
                assert_eq!(f.move_f().unwrap().move_f().unwrap().move_f().unwrap(), *s);
            }
        }
    }

    #[test]
    fn flip_diameters_match_plain_bfs() {
        for n in 4..=8 {
            let all = PolyTri::all(n);
            let index: HashMap<PolyTri, usize> = all.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
            let adj: Vec<Vec<usize>> =
                all.iter().map(|t| t.diagonals().into_iter().map(|d| index[&t.flipped(d).unwrap()]).collect()).collect();
            let plain = (0..all.len()).map(|s| bfs_indices(&adj, s).into_iter().max().unwrap()).max().unwrap();
            assert_eq!(flip_graph_diameter(n), plain, "n = {n}");
        }
    }

    #[test]
    fn flip_diameters_small() {
        let d: Vec<usize> = (4..=9).map(flip_graph_diameter).collect();
        assert_eq!(d, vec![1, 2, 4, 5, 7, 9]);
    }

    #[test]
    fn departure_of_single_letter() {
        let p = CombingPath::from_identity(&"f".parse().unwrap());
        let prof = departure_profile(&[p], 3).unwrap();
        assert!(prof.d.iter().all(|&x| x <= 1));
    }

    #[test]
    fn planted_back_and_forth_is_detected() {
        let mut raw = Vec::new();
        let mut red = Vec::new();
        for depth in [3, 6] {
            let z = planted_back_and_forth(depth);
            let a = departure_profile(&[CombingPath::from_identity(&combing(&z))], 2).unwrap();
            let b = departure_profile(&[CombingPath::from_identity(&reduced_combing(&z))], 2).unwrap();
            raw.push(a.d[1]);
            red.push(b.d[1]);
        }
        println!("unreduced D(2) {raw:?}, reduced D(2) {red:?}");
        assert!(raw[1] > raw[0]);
        assert_eq!(red[0], red[1]);
    }
}
