//! Crossing words: the sequence of base edges an arc crosses, with the side
//! on which each edge's puncture is passed, and a `0` at the carried
//! puncture.

use std::fmt;

use super::path::{exponent, fan, half_at, is_side_of, other_cell, step_with, Path, Side, Step};
use super::{Arc, BraidError, BraidLetter, BraidWord};
use crate::state::{BaseEdge, Cell, Cusp};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Exp {
    L,
    R,
    Zero,
}

impl From<Side> for Exp {
    fn from(s: Side) -> Exp {
        match s {
            Side::L => Exp::L,
            Side::R => Exp::R,
        }
    }
}

impl Exp {
    fn opposite(self) -> Exp {
        match self {
            Exp::L => Exp::R,
            Exp::R => Exp::L,
            Exp::Zero => Exp::Zero,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Entry {
    pub edge: BaseEdge,
    pub exp: Exp,
}

/// Crossing word of an arc from `start` to `end`. `cell` is the cell the
/// arc leaves `start` in; it matters only when the first entry is the
/// carried puncture on an edge at `start`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CrossingWord {
    pub start: Cusp,
    pub end: Cusp,
    pub cell: Cell,
    pub entries: Vec<Entry>,
}

/// Result of the search for a puncture conjugate to the first one.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Conjugate {
    Pair { i: usize, j: usize },
    Monotone,
}

fn inconsistent(what: &str, arc: &Arc) -> BraidError {
    BraidError::Inconsistent(format!("{what} for arc {arc}"))
}

impl CrossingWord {
    /// Reads the word off the two push-offs: they agree up to the carried
    /// puncture, which they pass on opposite sides.
    pub fn from_arc(arc: &Arc) -> Result<CrossingWord, BraidError> {
        let (u, v) = (arc.tail, arc.head);
        let pl = &arc.left;
        let mut qr = fan(pl.start, arc.right.start, u);
        qr.extend_from_slice(&arc.right.steps);
        qr.extend(fan(arc.right.end(), pl.end(), v));
        let qr = Path { start: pl.start, steps: qr }.reduced();
        let (a, b) = (&pl.steps, &qr.steps);
        let mut p = 0;
        while p < a.len() && p < b.len() && a[p] == b[p] {
            p += 1;
        }
        let mut s = 0;
        while s < a.len() - p && s < b.len() - p && a[a.len() - 1 - s] == b[b.len() - 1 - s] {
            s += 1;
        }
        let ml = &a[p..a.len() - s];
        let mr = &b[p..b.len() - s];
        let c = pl.cells()[p];
        let mut d: Vec<Step> = ml.to_vec();
        d.extend(mr.iter().rev());
        let d = Path { start: c, steps: d }.reduced().steps;
        if d.len() < 2 || !d.len().is_multiple_of(2) {
            return Err(inconsistent("push-offs do not bound a single puncture", arc));
        }
        let k = (d.len() - 2) / 2;
        let (d1, d2) = (d[k], d[k + 1]);
        if (0..k).any(|i| d[i] != d[d.len() - 1 - i]) || d1.edge != d2.edge || d1.half == d2.half {
            return Err(inconsistent("push-offs differ by more than one puncture", arc));
        }
        if d1.edge != arc.puncture {
            return Err(inconsistent("push-offs bound the wrong puncture", arc));
        }
        let x = &d[..k];
        let cp = Path { start: c, steps: x.to_vec() }.end();
        if exponent(d1, cp) != Side::R {
            return Err(inconsistent("push-offs are swapped", arc));
        }
        // the rest of the left push-off after the carried puncture
        let mut z: Vec<Step> = x.iter().copied().chain([d1]).rev().collect();
        z.extend_from_slice(ml);
        let z = Path { start: other_cell(d1.edge, cp), steps: z }.reduced();

        let mut steps: Vec<Option<Step>> = a[..p].iter().copied().map(Some).collect();
        steps.extend(x.iter().copied().map(Some));
        steps.push(None);
        steps.extend(z.steps.iter().copied().map(Some));
        steps.extend(a[a.len() - s..].iter().copied().map(Some));

        let mut entries = Vec::with_capacity(steps.len());
        let mut cell = pl.start;
        let mut cells = Vec::with_capacity(steps.len());
        for st in &steps {
            cells.push(cell);
            match st {
                Some(st) => {
                    entries.push(Entry { edge: st.edge, exp: exponent(*st, cell).into() });
                    cell = other_cell(st.edge, cell);
                }
                None => {
                    entries.push(Entry { edge: d1.edge, exp: Exp::Zero });
                    cell = other_cell(d1.edge, cell);
                }
            }
        }
        // ends sliding around the cusps
        let mut lo = 0;
        while let Some(Some(st)) = steps.get(lo) {
            if half_at(st.edge, u) != Some(st.half) {
                break;
            }
            lo += 1;
        }
        let mut hi = steps.len();
        while hi > lo {
            match steps[hi - 1] {
                Some(st) if half_at(st.edge, v) == Some(st.half) => hi -= 1,
                _ => break,
            }
        }
        let w = CrossingWord { start: u, end: v, cell: cells[lo], entries: entries[lo..hi].to_vec() };
        if w.to_arc()? != *arc {
            return Err(inconsistent("crossing word does not reproduce the arc", arc));
        }
        Ok(w)
    }

    fn resolve(&self, zero: Side) -> Result<Path, BraidError> {
        if !self.cell.vertices().contains(&self.start) {
            return Err(BraidError::InvalidWord(format!("start cell does not touch {:?}", self.start)));
        }
        let mut c = self.cell;
        let mut steps = Vec::with_capacity(self.entries.len());
        for en in &self.entries {
            if !is_side_of(en.edge, c) {
                return Err(BraidError::InvalidWord(format!("{} is not a side of {}", en.edge.address(), c.address())));
            }
            let side = match en.exp {
                Exp::L => Side::L,
                Exp::R => Side::R,
                Exp::Zero => zero,
            };
            let st = step_with(en.edge, c, side);
            steps.push(st);
            c = other_cell(en.edge, c);
        }
        if !c.vertices().contains(&self.end) {
            return Err(BraidError::InvalidWord(format!("end cell does not touch {:?}", self.end)));
        }
        Ok(Path { start: self.cell, steps }.canonical(self.start, self.end))
    }

    pub fn to_arc(&self) -> Result<Arc, BraidError> {
        let zeros: Vec<&Entry> = self.entries.iter().filter(|e| e.exp == Exp::Zero).collect();
        if zeros.len() != 1 {
            return Err(BraidError::InvalidWord(format!("{} zero entries", zeros.len())));
        }
        Ok(Arc {
            tail: self.start,
            head: self.end,
            left: self.resolve(Side::R)?,
            right: self.resolve(Side::L)?,
            puncture: zeros[0].edge,
        })
    }

    /// Number of punctures met, counted with multiplicity.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_straight(&self) -> bool {
        self.entries.len() == 1
    }

    /// Exponents of every occurrence of a puncture.
    pub fn exponents_of(&self, e: BaseEdge) -> Vec<Exp> {
        self.entries.iter().filter(|x| x.edge == e).map(|x| x.exp).collect()
    }

    /// Removes bigons `p^ε p^-ε`; three equal crossings in a row are
    /// rejected.
    pub fn tight_reduce(&self) -> Result<CrossingWord, BraidError> {
        let triple = |es: &[Entry]| {
            es.windows(3)
                .position(|t| t[0].exp != Exp::Zero && t.iter().all(|x| x.edge == t[0].edge && x.exp == t[0].exp))
        };
        if let Some(i) = triple(&self.entries) {
            return Err(BraidError::TriplePattern(i));
        }
        let mut out: Vec<Entry> = Vec::with_capacity(self.entries.len());
        for &en in &self.entries {
            match out.last() {
                Some(&last) if last.edge == en.edge && en.exp != Exp::Zero && last.exp == en.exp.opposite() => {
                    out.pop();
                }
                _ => out.push(en),
            }
        }
        if let Some(i) = triple(&out) {
            return Err(BraidError::TriplePattern(i));
        }
        Ok(CrossingWord { entries: out, ..self.clone() })
    }

    /// First non-carried puncture and the first later one passed on the
    /// other side. The carried puncture counts only when no later puncture
    /// is passed on the other side.
    pub fn conjugate_puncture(&self) -> Conjugate {
        let Some(i) = self.entries.iter().position(|e| e.exp != Exp::Zero) else {
            return Conjugate::Monotone;
        };
        let eps = self.entries[i].exp;
        for j in i + 1..self.entries.len() {
            let x = self.entries[j].exp;
            if x == eps.opposite() {
                return Conjugate::Pair { i, j };
            }
            if x == Exp::Zero && !self.entries[j + 1..].iter().any(|e| e.exp == eps.opposite()) {
                return Conjugate::Pair { i, j };
            }
        }
        Conjugate::Monotone
    }

    /// Every pair `(i, j)` where puncture `i` is passed on one side and `j`
    /// is the next puncture passed on the other side.
    pub fn sign_changes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.entries.iter().enumerate() {
            if a.exp == Exp::Zero {
                continue;
            }
            if let Some(j) = (i + 1..self.entries.len()).find(|&j| self.entries[j].exp == a.exp.opposite()) {
                out.push((i, j));
            }
        }
        out
    }

    /// The braid pulling the conjugate punctures `i` and `j` together along
    /// the arc: the half-twists of consecutive distinct punctures between
    /// them, all of one sign fixed by the side of puncture `i`.
    pub fn untangling_factor(&self, i: usize, j: usize) -> Result<BraidWord, BraidError> {
        let mut seq: Vec<BaseEdge> = Vec::new();
        for e in &self.entries[i..=j] {
            if seq.last() != Some(&e.edge) {
                seq.push(e.edge);
            }
        }
        let positive = match self.entries[i].exp {
            Exp::L => UNTANGLE_POSITIVE_ON_L,
            Exp::R => !UNTANGLE_POSITIVE_ON_L,
            Exp::Zero => return Err(BraidError::InvalidWord("factor starts at the carried puncture".into())),
        };
        seq.windows(2).map(|p| BraidLetter::new(p[0], p[1], positive)).collect::<Result<Vec<_>, _>>().map(BraidWord)
    }

    /// Image of the arc under a braid.
    pub fn apply_braid(&self, b: &BraidWord) -> Result<CrossingWord, BraidError> {
        let h = b.homeo()?;
        CrossingWord::from_arc(&h.map_arc(&self.to_arc()?))
    }
}

/// Sign of the untangling half-twists when the first puncture is passed on
/// the left. Fixed by the requirement that untangling shortens the arc.
pub(crate) const UNTANGLE_POSITIVE_ON_L: bool = false;

impl fmt::Display for CrossingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.start)?;
        for e in &self.entries {
            let x = match e.exp {
                Exp::L => "L",
                Exp::R => "R",
                Exp::Zero => "0",
            };
            write!(f, " {}^{x}", e.edge.address())?;
        }
        write!(f, " {:?}", self.end)
    }
}
