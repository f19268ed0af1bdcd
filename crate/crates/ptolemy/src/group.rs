//! Elements of T: words in α, β, their evaluation on states through the
//! anti-isomorphism Φ(α) = F, Φ(β) = R, and conversion to tree-pair symbols.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::state::{hull, Cell, Chord, Cusp, LabeledState, Local, Move, MoveWord, OrientedChord, SupportPolygon};
use crate::symbol::{FiniteBinaryTree, TreePairSymbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid generator letter {ch:?} at position {pos}")]
    BadLetter { pos: usize, ch: char },
}

/// α, α⁻¹, β, β⁻¹.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Gen {
    A,
    AInv,
    B,
    BInv,
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::A, Gen::AInv, Gen::B, Gen::BInv];

    pub fn inverse(self) -> Gen {
        match self {
            Gen::A => Gen::AInv,
            Gen::AInv => Gen::A,
            Gen::B => Gen::BInv,
            Gen::BInv => Gen::B,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Gen::A => 'a',
            Gen::AInv => 'A',
            Gen::B => 'b',
            Gen::BInv => 'B',
        }
    }

    pub fn phi(self) -> Move {
        match self {
            Gen::A => Move::F,
            Gen::AInv => Move::FInv,
            Gen::B => Move::R,
            Gen::BInv => Move::RInv,
        }
    }

    pub fn from_move(m: Move) -> Gen {
        match m {
            Move::F => Gen::A,
            Move::FInv => Gen::AInv,
            Move::R => Gen::B,
            Move::RInv => Gen::BInv,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct GeneratorWord(pub Vec<Gen>);

impl GeneratorWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GeneratorWord {
        GeneratorWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    pub fn concat(&self, other: &GeneratorWord) -> GeneratorWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GeneratorWord(v)
    }

    pub fn pow(&self, n: usize) -> GeneratorWord {
        GeneratorWord(self.0.iter().copied().cycle().take(self.0.len() * n).collect())
    }

    /// Φ(w): the move word, letters reversed.
    pub fn phi(&self) -> MoveWord {
        MoveWord(self.0.iter().rev().map(|g| g.phi()).collect())
    }

    /// Φ⁻¹ of a move word.
    pub fn from_moves(w: &MoveWord) -> GeneratorWord {
        GeneratorWord(w.0.iter().rev().map(|&m| Gen::from_move(m)).collect())
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.0 {
            write!(f, "{}", g.letter())?;
        }
        Ok(())
    }
}

impl FromStr for GeneratorWord {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .filter(|(_, c)| !c.is_whitespace())
            .map(|(pos, ch)| match ch {
                'a' => Ok(Gen::A),
                'A' => Ok(Gen::AInv),
                'b' => Ok(Gen::B),
                'B' => Ok(Gen::BInv),
                _ => Err(WordError::BadLetter { pos, ch }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(GeneratorWord)
    }
}

/// An element of T, represented by the image of the base state.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct TElement {
    canonical: LabeledState,
}

impl TElement {
    pub fn identity() -> TElement {
        TElement { canonical: LabeledState::base() }
    }

    pub fn from_state(s: &LabeledState) -> TElement {
        TElement { canonical: s.normalize() }
    }

    pub fn state(&self) -> &LabeledState {
        &self.canonical
    }

    pub fn is_identity(&self) -> bool {
        self.canonical.is_base()
    }
}

/// Order in which word letters are fed to the base state.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum EvalOrder {
    /// Φ is an anti-isomorphism: the last letter acts first.
    Reversed,
    #[allow(dead_code)]
    Direct,
}

pub(crate) fn eval_with(w: &GeneratorWord, order: EvalOrder) -> TElement {
    let moves = match order {
        EvalOrder::Reversed => w.phi(),
        EvalOrder::Direct => MoveWord(w.0.iter().map(|g| g.phi()).collect()),
    };
    TElement::from_state(&LabeledState::base().apply_word(&moves))
}

pub fn eval_word(w: &GeneratorWord) -> TElement {
    eval_with(w, EvalOrder::Reversed)
}

/// Element reached from the base state by a move word.
pub fn eval_moves(w: &MoveWord) -> TElement {
    TElement::from_state(&LabeledState::base().apply_word(w))
}

/// Symbol of the map carrying the base state onto `s`.
fn carrying_symbol(s: &LabeledState) -> TreePairSymbol {
    let mut cells = s.cells().to_vec();
    cells.push(Cell::B);
    let local = Local::build(&hull(&cells), s.diags());
    let n = local.cusps.len();
    let doe = s.doe();
    let x = local.left_apex(doe);
    let y = local.right_apex(doe);
    let mut psi: HashMap<Cusp, Cusp> = HashMap::new();
    psi.insert(doe.tail, Cusp::ZERO);
    psi.insert(doe.head, Cusp::HALF);
    psi.insert(x, Cusp::dyadic(3, 2));
    psi.insert(y, Cusp::dyadic(1, 2));
    let (t, h) = (doe.tail, doe.head);
    let mut stack = vec![(h, x, t), (x, t, h), (t, y, h), (y, h, t)];
    while let Some((a, b, c)) = stack.pop() {
        let (i, j) = (local.index(a), local.index(b));
        if (i + 1) % n == j || (j + 1) % n == i {
            continue;
        }
        let ci = local.index(c);
        let c_in_ab = (ci + n - i) % n < (j + n - i) % n;
        let d = if c_in_ab { local.apex(b, a) } else { local.apex(a, b) };
        let base = Chord::new(psi[&a], psi[&b]).base_edge().expect("image of a diagonal is a base edge");
        let pc = psi[&c];
        let cell = base.cells().into_iter().find(|cell| !cell.vertices().contains(&pc)).unwrap();
        let pd = cell.vertices().into_iter().find(|v| *v != psi[&a] && *v != psi[&b]).unwrap();
        psi.insert(d, pd);
        stack.push((a, d, b));
        stack.push((d, b, a));
    }
    let mut src: Vec<Cusp> = local.cusps.iter().map(|v| psi[v]).collect();
    src.sort();
    let leaves = |cs: &[Cusp]| -> Vec<Cell> {
        (0..cs.len())
            .map(|k| Cell::from_interval(cs[k], cs[(k + 1) % cs.len()]).expect("boundary edge is a base edge"))
            .collect()
    };
    let source = FiniteBinaryTree::from_leaves(leaves(&src)).expect("source tree");
    let target = FiniteBinaryTree::from_leaves(leaves(&local.cusps)).expect("target tree");
    TreePairSymbol::new(target, source, local.index(t)).expect("same level").reduce()
}

/// State carried by a symbol of the form returned by [`carrying_symbol`].
fn carried_state(phi: &TreePairSymbol) -> LabeledState {
    let src = phi.source.cusps();
    let image = |u: Cusp| phi.map_cusp(src.binary_search(&u).expect("cusp of the source tree"));
    let q = SupportPolygon { cells: phi.source.cells() };
    let diags: Vec<Chord> = q
        .internal_edges()
        .into_iter()
        .map(|e| {
            let c = e.chord();
            Chord::new(image(c.a), image(c.b))
        })
        .collect();
    let doe = OrientedChord::new(image(Cusp::ZERO), image(Cusp::HALF));
    LabeledState::from_parts(diags, doe)
}

/// Tree-pair symbol of an element. The element of a state is the inverse of
/// the map carrying the base onto it, which makes word evaluation a
/// homomorphism for symbol composition.
pub fn to_tree_pair(e: &TElement) -> TreePairSymbol {
    carrying_symbol(&e.canonical).inverse()
}

pub fn to_state(s: &TreePairSymbol) -> TElement {
    TElement::from_state(&carried_state(&s.reduce().inverse()))
}

/// Symbol of a single generator, built by hand: α and β act as the rotations
/// of the root quadrilateral and of the root triangle `B`.
pub fn generator_symbol(g: Gen) -> TreePairSymbol {
    let l4 = FiniteBinaryTree::from_leaves(vec![Cell::A.lower(), Cell::A.upper(), Cell::B.lower(), Cell::B.upper()])
        .expect("level-4 tree");
    let l3 = FiniteBinaryTree::base();
    // the carrying maps rotate counterclockwise; elements are their inverses
    match g {
        Gen::A => TreePairSymbol::new(l4.clone(), l4, 3).unwrap(),
        Gen::AInv => TreePairSymbol::new(l4.clone(), l4, 1).unwrap(),
        Gen::B => TreePairSymbol::new(l3.clone(), l3, 2).unwrap(),
        Gen::BInv => TreePairSymbol::new(l3.clone(), l3, 1).unwrap(),
    }
}

/// Word evaluation through symbol multiplication only.
pub fn eval_tree_pair(w: &GeneratorWord) -> TreePairSymbol {
    w.0.iter()
        .fold(TreePairSymbol::identity(), |acc, &g| acc.multiply(&generator_symbol(g)))
}

/// Word problem in T. Both representations are evaluated and must agree.
pub fn is_identity(w: &GeneratorWord) -> bool {
    let by_state = eval_word(w).is_identity();
    let by_symbol = eval_tree_pair(w).is_identity();
    assert_eq!(by_state, by_symbol, "state and tree-pair routes disagree on {w}");
    by_state
}

/// Product of elements: the element of the word `x y`.
pub fn multiply(x: &TElement, y: &TElement) -> TElement {
    to_state(&to_tree_pair(x).multiply(&to_tree_pair(y)))
}

pub fn inverse(x: &TElement) -> TElement {
    to_state(&to_tree_pair(x).inverse())
}

fn w(s: &str) -> GeneratorWord {
    s.parse().expect("static word")
}

fn commutator(x: &GeneratorWord, y: &GeneratorWord) -> GeneratorWord {
    x.concat(y).concat(&x.inverse()).concat(&y.inverse())
}

/// The defining relators in α, β followed by the six relators in
/// `A = βα²`, `B = β²α`, `C = β²`.
pub fn relators() -> Vec<(&'static str, GeneratorWord)> {
    let a4 = w("aaaa");
    let b3 = w("bbb");
    let ba5 = w("ba").pow(5);
    let c1 = commutator(&w("bab"), &w("aababaa"));
    let c2 = commutator(&w("bab"), &w("aabbaababaabaa"));
    let a = w("baa");
    let b = w("bba");
    let c = w("bb");
    let ai = a.inverse();
    let bi = b.inverse();
    let ab_inv = a.concat(&bi);
    let r1 = commutator(&ab_inv, &ai.concat(&b).concat(&a));
    let r2 = commutator(&ab_inv, &ai.concat(&ai).concat(&b).concat(&a).concat(&a));
    let r3 = c.pow(3);
    // C = B A⁻¹ C B
    let r4 = c.concat(&b.concat(&ai).concat(&c).concat(&b).inverse());
    // C A = (A⁻¹ C B)²
    let acb = ai.concat(&c).concat(&b);
    let r5 = c.concat(&a).concat(&acb.pow(2).inverse());
    // (A⁻¹CB)(A⁻¹BA) = B(A⁻²CB²)
    let lhs = acb.concat(&ai).concat(&b).concat(&a);
    let rhs = b.concat(&ai).concat(&ai).concat(&c).concat(&b).concat(&b);
    let r6 = lhs.concat(&rhs.inverse());
    vec![
        ("a^4", a4),
        ("b^3", b3),
        ("(ba)^5", ba5),
        ("[bab, a2baba2]", c1),
        ("[bab, a2b2a2baba2ba2]", c2),
        ("[AB^-1, A^-1BA]", r1),
        ("[AB^-1, A^-2BA^2]", r2),
        ("C^3", r3),
        ("C = BA^-1CB", r4),
        ("CA = (A^-1CB)^2", r5),
        ("(A^-1CB)(A^-1BA) = B(A^-2CB^2)", r6),
    ]
}
