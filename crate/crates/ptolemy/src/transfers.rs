//! Transfers: moving the d.o.e. along a dual geodesic with F² and R while the
//! triangulation stays fixed, and the normal form in PSL(2,Z) = Z/2 * Z/3.

use thiserror::Error;

use crate::group::{Gen, GeneratorWord};
use crate::state::{Chord, Cusp, LabeledState, Local, Move, MoveWord, OrientedChord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("edges are not both sides of the given triangle")]
    NotIncident,
    #[error("{0:?} is not an edge of the triangulation")]
    NotAnEdge(Chord),
    #[error("letter run at position {0} is not a power of α², β or β²")]
    OutsideAlphabet(usize),
}

/// ε(e, f) at a common triangle `v`: 0 if `e = f`, 1 if `f` is on the left
/// of `e` (one R step when `v` lies left of `e`), 2 otherwise.
pub fn epsilon(v: [Cusp; 3], e: Chord, f: Chord) -> Result<u8, TransferError> {
    let mut v = v;
    v.sort();
    let sides = [Chord::new(v[0], v[1]), Chord::new(v[1], v[2]), Chord::new(v[2], v[0])];
    let i = sides.iter().position(|&s| s == e).ok_or(TransferError::NotIncident)?;
    let j = sides.iter().position(|&s| s == f).ok_or(TransferError::NotIncident)?;
    Ok(((j + 3 - i) % 3) as u8)
}

/// `β^{ε₀} α² β^{ε₁} α² ⋯ β^{ε_q} α^{2δ}`, exponents listed in the order the
/// d.o.e. meets the triangles of the geodesic.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct TransferWord {
    pub exponents: Vec<u8>,
    pub delta: u8,
}

impl TransferWord {
    /// The moves, in application order: `R^{ε₀} F² R^{ε₁} ⋯ R^{ε_q} F^{2δ}`.
    pub fn to_moves(&self) -> MoveWord {
        let mut w = MoveWord::new();
        for (k, &e) in self.exponents.iter().enumerate() {
            if k > 0 {
                w.push(Move::F);
                w.push(Move::F);
            }
            for _ in 0..e {
                w.push(Move::R);
            }
        }
        if self.delta == 1 {
            w.push(Move::F);
            w.push(Move::F);
        }
        w
    }

    /// Generator word whose image under Φ is [`to_moves`](Self::to_moves).
    /// Because Φ reverses letters this reads the blocks from the far end.
    pub fn to_generator_word(&self) -> GeneratorWord {
        GeneratorWord::from_moves(&self.to_moves())
    }
}

/// Dual edges crossed walking from the triangle on the left of `from` to the
/// nearer triangle adjacent to `to` (`h₁, …, h_q`).
pub fn geodesic(state: &LabeledState, from: OrientedChord, to: Chord) -> Result<Vec<Chord>, TransferError> {
    Ok(walk(state, from, to)?.0)
}

fn local_for(state: &LabeledState, edges: &[Chord]) -> Result<Local, TransferError> {
    let mut extra = Vec::new();
    for &e in edges {
        if !state.has_edge(e) {
            return Err(TransferError::NotAnEdge(e));
        }
        if let Some(b) = e.base_edge() {
            extra.extend(b.cells());
        }
    }
    Ok(state.local_with(&extra))
}

/// Whether both ends of `f` lie on the closed counterclockwise arc `[a, b]`.
fn on_arc(f: Chord, a: Cusp, b: Cusp) -> bool {
    let within = |x: Cusp| {
        if a <= b {
            x >= a && x <= b
        } else {
            x >= a || x <= b
        }
    };
    within(f.a) && within(f.b)
}

/// Walks from `from` toward `to`. Returns the crossed edges, the rotation
/// exponents and the oriented edge reached.
fn walk(state: &LabeledState, from: OrientedChord, to: Chord) -> Result<(Vec<Chord>, Vec<u8>, OrientedChord), TransferError> {
    let local = local_for(state, &[from.chord(), to])?;
    let mut crossed = Vec::new();
    let mut exps = Vec::new();
    let mut d = from;
    if to == from.chord() {
        return Ok((crossed, exps, d));
    }
    // `to` on the right of `from`: cross `from` first
    if !on_arc(to, from.head, from.tail) {
        exps.push(0);
        crossed.push(d.chord());
        d = d.reversed();
    }
    loop {
        let x = local.left_apex(d);
        let (t, h) = (d.tail, d.head);
        let (e1, e2) = (Chord::new(h, x), Chord::new(x, t));
        if to == e1 {
            exps.push(1);
            return Ok((crossed, exps, OrientedChord::new(h, x)));
        }
        if to == e2 {
            exps.push(2);
            return Ok((crossed, exps, OrientedChord::new(x, t)));
        }
        if on_arc(to, h, x) {
            exps.push(1);
            crossed.push(e1);
            d = OrientedChord::new(x, h);
        } else {
            debug_assert!(on_arc(to, x, t));
            exps.push(2);
            crossed.push(e2);
            d = OrientedChord::new(t, x);
        }
    }
}

/// The transfer moving the d.o.e. from `from` to `to` without changing the
/// triangulation.
pub fn transfer_word(state: &LabeledState, from: OrientedChord, to: OrientedChord) -> Result<TransferWord, TransferError> {
    let (_, exponents, reached) = walk(state, from, to.chord())?;
    let delta = u8::from(reached != to);
    Ok(TransferWord { exponents, delta })
}

/// Transfer to `to` in whichever orientation the walk reaches, so `δ = 0`.
pub fn transfer_to_edge(state: &LabeledState, from: OrientedChord, to: Chord) -> Result<(TransferWord, OrientedChord), TransferError> {
    let (_, exponents, reached) = walk(state, from, to)?;
    Ok((TransferWord { exponents, delta: 0 }, reached))
}

/// Number of dual edges on the geodesic from the root triangle of `from` to
/// `to`.
pub fn dual_distance(state: &LabeledState, from: OrientedChord, to: Chord) -> Result<usize, TransferError> {
    Ok(geodesic(state, from, to)?.len())
}

/// Letters of PSL(2,Z) words.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PslLetter {
    A2,
    B,
    B2,
}

/// Splits a generator word into α², β, β² letters.
pub fn psl_letters(w: &GeneratorWord) -> Result<Vec<PslLetter>, TransferError> {
    let mut out = Vec::new();
    let mut i = 0;
    let g = &w.0;
    while i < g.len() {
        let start = i;
        let is_a = matches!(g[i], Gen::A | Gen::AInv);
        let mut sum: i32 = 0;
        while i < g.len() && matches!(g[i], Gen::A | Gen::AInv) == is_a {
            sum += match g[i] {
                Gen::A | Gen::B => 1,
                Gen::AInv | Gen::BInv => -1,
            };
            i += 1;
        }
        if is_a {
            match sum.rem_euclid(4) {
                0 => {}
                2 => out.push(PslLetter::A2),
                _ => return Err(TransferError::OutsideAlphabet(start)),
            }
        } else {
            match sum.rem_euclid(3) {
                0 => {}
                1 => out.push(PslLetter::B),
                _ => out.push(PslLetter::B2),
            }
        }
    }
    Ok(out)
}

/// Normal form `β^{ε₀} α² β^{ε₁} ⋯ α² β^{ε_{m+1}}`, returned as the exponent
/// list `[ε₀, …, ε_{m+1}]`. Interior exponents are 1 or 2.
pub fn psl2z_normal_form(letters: &[PslLetter]) -> Vec<u8> {
    let mut nf: Vec<u8> = vec![0];
    for &l in letters {
        match l {
            PslLetter::A2 => {
                if nf.len() >= 2 && *nf.last().unwrap() == 0 {
                    nf.pop();
                } else {
                    nf.push(0);
                }
            }
            PslLetter::B | PslLetter::B2 => {
                let k = if l == PslLetter::B { 1 } else { 2 };
                let last = nf.last_mut().unwrap();
                *last = (*last + k) % 3;
            }
        }
    }
    nf
}

/// Renders a normal form back to a generator word.
pub fn render_normal_form(nf: &[u8]) -> GeneratorWord {
    let mut out = Vec::new();
    for (k, &e) in nf.iter().enumerate() {
        if k > 0 {
            out.push(Gen::A);
            out.push(Gen::A);
        }
        for _ in 0..e {
            out.push(Gen::B);
        }
    }
    GeneratorWord(out)
}
