//! Triangulations of an abstract convex polygon with vertices `0..n` in
//! counterclockwise order, and their labeled versions with a d.o.e.
//!
//! Conventions match [`LabeledState`](crate::state::LabeledState): the left
//! side of an oriented chord `(t, h)` is the counterclockwise arc from `h` to
//! `t`.

use std::collections::HashMap;

use crate::state::Move;

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PolyTri {
    nbrs: Vec<Vec<usize>>,
}

/// Whether two chords cross in their interiors.
pub fn crosses(e: (usize, usize), f: (usize, usize)) -> bool {
    let (a, b) = (e.0.min(e.1), e.0.max(e.1));
    let (c, d) = (f.0.min(f.1), f.0.max(f.1));
    let inside = |x: usize| x > a && x < b;
    let on = |x: usize| x == a || x == b;
    !on(c) && !on(d) && inside(c) != inside(d)
}

impl PolyTri {
    /// Builds a triangulation from its diagonals; `None` unless they form one.
    pub fn new(n: usize, diags: &[(usize, usize)]) -> Option<PolyTri> {
        if n < 3 || diags.len() != n - 3 {
            return None;
        }
        let mut nbrs: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
        for (k, &(a, b)) in diags.iter().enumerate() {
            if a >= n || b >= n || a == b || is_side(n, a, b) {
                return None;
            }
            if diags[..k].iter().any(|&d| crosses(d, (a, b)) || (d.0.min(d.1), d.0.max(d.1)) == (a.min(b), a.max(b))) {
                return None;
            }
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        for v in &mut nbrs {
            v.sort();
            v.dedup();
        }
        Some(PolyTri { nbrs })
    }

    /// All diagonals from vertex 0.
    pub fn fan(n: usize) -> PolyTri {
        let d: Vec<(usize, usize)> = (2..n - 1).map(|j| (0, j)).collect();
        PolyTri::new(n, &d).expect("fan is a triangulation")
    }

    /// Every triangulation of the `n`-gon.
    pub fn all(n: usize) -> Vec<PolyTri> {
        let mut memo = HashMap::new();
        all_between(0, n - 1, &mut memo)
            .into_iter()
            .map(|d| PolyTri::new(n, &d).expect("enumerated triangulation"))
            .collect()
    }

    pub fn size(&self) -> usize {
        self.nbrs.len()
    }

    pub fn is_side(&self, a: usize, b: usize) -> bool {
        is_side(self.size(), a, b)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.nbrs[a].binary_search(&b).is_ok()
    }

    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.nbrs[a]
    }

    /// Diagonals as sorted pairs, sorted.
    pub fn diagonals(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, v) in self.nbrs.iter().enumerate() {
            for &b in v {
                if b > a && !self.is_side(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn dist(&self, a: usize, b: usize) -> usize {
        let n = self.size();
        (b + n - a) % n
    }

    /// Apex of the triangle on the counterclockwise arc from `x` to `y`,
    /// where `x y` is an edge.
    pub fn apex(&self, x: usize, y: usize) -> Option<usize> {
        let span = self.dist(x, y);
        self.nbrs[x]
            .iter()
            .copied()
            .filter(|&k| {
                let d = self.dist(x, k);
                d > 0 && d < span
            })
            .max_by_key(|&k| self.dist(x, k))
    }

    pub fn left_apex(&self, e: (usize, usize)) -> Option<usize> {
        self.apex(e.1, e.0)
    }

    pub fn right_apex(&self, e: (usize, usize)) -> Option<usize> {
        self.apex(e.0, e.1)
    }

    /// Replaces a diagonal by the other diagonal of its quadrilateral and
    /// returns the new one as `(left apex, right apex)` of `e`.
    pub fn flip(&mut self, e: (usize, usize)) -> Option<(usize, usize)> {
        if self.is_side(e.0, e.1) || !self.has_edge(e.0, e.1) {
            return None;
        }
        let x = self.left_apex(e)?;
        let y = self.right_apex(e)?;
        self.remove(e.0, e.1);
        self.insert(x, y);
        Some((x, y))
    }

    pub fn flipped(&self, e: (usize, usize)) -> Option<PolyTri> {
        let mut t = self.clone();
        t.flip(e)?;
        Some(t)
    }

    fn remove(&mut self, a: usize, b: usize) {
        self.nbrs[a].retain(|&k| k != b);
        self.nbrs[b].retain(|&k| k != a);
    }

    fn insert(&mut self, a: usize, b: usize) {
        for (u, v) in [(a, b), (b, a)] {
            let pos = self.nbrs[u].binary_search(&v).unwrap_err();
            self.nbrs[u].insert(pos, v);
        }
    }

    /// Triangles as sorted vertex triples.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for i in 0..self.size() {
            for &j in &self.nbrs[i] {
                if j <= i {
                    continue;
                }
                for &k in &self.nbrs[j] {
                    if k > j && self.has_edge(i, k) {
                        out.push([i, j, k]);
                    }
                }
            }
        }
        out
    }
}

fn is_side(n: usize, a: usize, b: usize) -> bool {
    (a + 1) % n == b || (b + 1) % n == a
}

type Diags = Vec<(usize, usize)>;

fn all_between(i: usize, j: usize, memo: &mut HashMap<(usize, usize), Vec<Diags>>) -> Vec<Diags> {
    if j <= i + 1 {
        return vec![Vec::new()];
    }
    if let Some(v) = memo.get(&(i, j)) {
        return v.clone();
    }
    let mut out = Vec::new();
    for k in i + 1..j {
        let left = all_between(i, k, memo);
        let right = all_between(k, j, memo);
        for l in &left {
            for r in &right {
                let mut d = l.clone();
                d.extend_from_slice(r);
                if k > i + 1 {
                    d.push((i, k));
                }
                if j > k + 1 {
                    d.push((k, j));
                }
                out.push(d);
            }
        }
    }
    memo.insert((i, j), out.clone());
    out
}

/// A polygon triangulation with a d.o.e. that has a triangle on its left.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct LabeledPoly {
    pub tri: PolyTri,
    pub doe: (usize, usize),
}

impl LabeledPoly {
    /// F, defined when the d.o.e. is a diagonal.
    pub fn move_f(&self) -> Option<LabeledPoly> {
        let mut tri = self.tri.clone();
        let (x, y) = tri.flip(self.doe)?;
        Some(LabeledPoly { tri, doe: (y, x) })
    }

    /// R: `(t, h)` becomes `(h, x)` with `x` the left apex.
    pub fn move_r(&self) -> Option<LabeledPoly> {
        let x = self.tri.left_apex(self.doe)?;
        Some(LabeledPoly { tri: self.tri.clone(), doe: (self.doe.1, x) })
    }

    pub fn apply(&self, m: Move) -> Option<LabeledPoly> {
        match m {
            Move::F => self.move_f(),
            Move::FInv => self.move_f()?.move_f()?.move_f(),
            Move::R => self.move_r(),
            Move::RInv => self.move_r()?.move_r(),
        }
    }

    /// Every labeled state of the `n`-gon: each triangulation with each
    /// oriented edge having a triangle on its left.
    pub fn all(n: usize) -> Vec<LabeledPoly> {
        let mut out = Vec::new();
        for tri in PolyTri::all(n) {
            for a in 0..n {
                for &b in tri.neighbors(a) {
                    if tri.left_apex((a, b)).is_some() {
                        out.push(LabeledPoly { tri: tri.clone(), doe: (a, b) });
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan(k: usize) -> usize {
        (0..k).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
    }

    #[test]
    fn counts_are_catalan() {
        for n in 3..=10 {
            assert_eq!(PolyTri::all(n).len(), catalan(n - 2), "n = {n}");
        }
        assert_eq!(catalan(6), 132);
    }

    #[test]
    fn flip_is_involution() {
        for t in PolyTri::all(7) {
            for d in t.diagonals() {
                let mut u = t.clone();
                let back = u.flip(d).unwrap();
                assert_ne!(u, t);
                u.flip(back).unwrap();
                assert_eq!(u, t);
            }
            assert_eq!(t.triangles().len(), 5);
        }
    }

    #[test]
    fn rejects_bad_diagonals() {
        assert!(PolyTri::new(5, &[(0, 2), (1, 3)]).is_none());
        assert!(PolyTri::new(5, &[(0, 1), (0, 2)]).is_none());
        assert!(PolyTri::new(5, &[(0, 2), (0, 3)]).is_some());
    }

    #[test]
    fn labeled_torsion() {
        for s in LabeledPoly::all(6) {
            let r3 = s.move_r().unwrap().move_r().unwrap().move_r().unwrap();
            assert_eq!(r3, s);
            if let Some(f) = s.move_f() {
                let f4 = f.move_f().unwrap().move_f().unwrap().move_f().unwrap();
                assert_eq!(f4, s);
            }
        }
    }
}
