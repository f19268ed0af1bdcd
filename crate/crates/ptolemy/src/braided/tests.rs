use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::{self, PlanarState};
use super::*;
use crate::group::GeneratorWord;
use crate::state::{Cell, LabeledState, Move, MoveWord};

fn cells_to_depth(d: usize) -> Vec<Cell> {
    let mut cells = vec![Cell::A, Cell::B];
    let mut frontier = cells.clone();
    for _ in 0..d {
        frontier = frontier.iter().flat_map(|c| [c.lower(), c.upper()]).collect();
        cells.extend(frontier.iter().copied());
    }
    cells
}

fn adjacent_pairs() -> Vec<(BaseEdge, BaseEdge)> {
    let mut out = Vec::new();
    for c in cells_to_depth(2) {
        let sides = [c.edge_above(), BaseEdge::Above(c.lower()), BaseEdge::Above(c.upper())];
        for i in 0..3 {
            for j in i + 1..3 {
                out.push((sides[i], sides[j]));
            }
        }
    }
    out
}

fn all_letters() -> Vec<BraidLetter> {
    adjacent_pairs()
        .into_iter()
        .flat_map(|(e, f)| [true, false].map(|p| BraidLetter::new(e, f, p).unwrap()))
        .collect()
}

fn random_braid(rng: &mut ChaCha8Rng, letters: &[BraidLetter], len: usize) -> BraidWord {
    BraidWord((0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect())
}

fn random_moves(rng: &mut ChaCha8Rng, len: usize) -> MoveWord {
    let ms = [Move::F, Move::FInv, Move::R, Move::RInv];
    MoveWord((0..len).map(|_| ms[rng.gen_range(0..4)]).collect())
}

fn letter(s: &str) -> BraidLetter {
    s.parse().unwrap()
}

#[test]
fn letters_parse_and_print() {
    for l in all_letters() {
        assert_eq!(l.to_string().parse::<BraidLetter>().unwrap(), l);
    }
    let w: BraidWord = "s(root,tR) S(tL,tR)".parse().unwrap();
    assert_eq!(w.len(), 2);
    assert_eq!(w.to_string().parse::<BraidWord>().unwrap(), w);
    assert!("s(tR,hR)".parse::<BraidLetter>().is_err());
}

#[test]
fn half_twists_match_the_plane() {
    let mut compared = 0;
    for l in all_letters() {
        let h = l.homeo();
        let c = l.cell();
        // the twisted pair and the other sides of nearby cells
        let mut edges = vec![l.e, l.f];
        for e in [c.edge_above(), BaseEdge::Above(c.lower()), BaseEdge::Above(c.upper())] {
            for d in e.cells() {
                edges.extend([d.edge_above(), BaseEdge::Above(d.lower()), BaseEdge::Above(d.upper())]);
            }
        }
        edges.sort();
        edges.dedup();
        for g in edges {
            match oracle::twist_image(l, g) {
                Ok(a) => {
                    assert_eq!(a, h.image(g), "{l} on {}", g.address());
                    compared += 1;
                }
                Err(oracle::OracleError::Crowded) => {}
                Err(err) => panic!("{l} on {}: {err}", g.address()),
            }
        }
    }
    assert!(compared > 300, "only {compared} images compared");
}

#[test]
fn letter_inverse_cancels() {
    for l in all_letters() {
        assert!(l.homeo().compose(&l.inverse().homeo()).is_identity(), "{l}");
        let s = PuncturedState::base().apply_braid(&BraidWord(vec![l, l.inverse()])).unwrap();
        assert!(s.is_base(), "{l}");
        assert!(!PuncturedState::from_homeo(&l.homeo()).is_base());
    }
}

#[test]
fn crossing_words_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let letters = all_letters();
    for _ in 0..60 {
        let b = random_braid(&mut rng, &letters, 4);
        let s = PuncturedState::base().apply_braid(&b).unwrap();
        for a in s.arcs().values() {
            let w = CrossingWord::from_arc(a).unwrap();
            assert_eq!(w.to_arc().unwrap(), *a);
            assert_eq!(w.exponents_of(a.puncture).iter().filter(|x| **x == Exp::Zero).count(), 1);
            assert_eq!(a.crossing_length().unwrap(), w.len());
        }
    }
}

#[test]
fn base_arcs_are_straight() {
    for c in cells_to_depth(3) {
        let a = Arc::base(c.edge_above());
        assert!(a.is_base());
        assert!(CrossingWord::from_arc(&a).unwrap().is_straight());
    }
}

#[test]
fn untangling_recovers_single_letters() {
    for l in all_letters() {
        let k = PuncturedState::from_homeo(&l.homeo());
        let b = untangle_state(&k).unwrap();
        assert_eq!(PuncturedState::base().apply_braid(&b).unwrap(), k, "{l}: got {b}");
        assert_eq!(b.free_reduce().len(), 1, "{l}: got {b}");
    }
}

#[test]
fn untangling_recovers_random_braids() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let letters = all_letters();
    for len in 1..=5 {
        for _ in 0..40 {
            let b = random_braid(&mut rng, &letters, len);
            let k = PuncturedState::base().apply_braid(&b).unwrap();
            let got = untangle_state(&k).unwrap();
            assert_eq!(PuncturedState::base().apply_braid(&got).unwrap(), k, "{b} untangled to {got}");
            assert!(StrandAutomorphism::same_action(&got.homeo().unwrap(), &b.homeo().unwrap()));
        }
    }
}

#[test]
fn moves_of_order_two_and_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let s = PuncturedState::base().apply_word(&random_moves(&mut rng, 12));
        assert_eq!(s.move_f().move_f().move_f().move_f(), s);
        assert_eq!(s.move_r().move_r().move_r(), s);
        assert_eq!(s.apply(Move::F).apply(Move::FInv), s);
        assert_eq!(s.apply(Move::R).apply(Move::RInv), s);
    }
}

#[test]
fn flipping_twice_restores_the_arcs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let s = PuncturedState::base().apply_word(&random_moves(&mut rng, 10));
        let d = s.underlying().doe();
        let t = s.flip(d.chord()).unwrap();
        let back = t.flip(Chord::new(s.underlying().left_apex(d), s.underlying().right_apex(d))).unwrap();
        assert_eq!(back.arcs(), s.arcs());
    }
}

#[test]
fn flips_match_the_plane() {
    let ms = [Move::F, Move::FInv, Move::R, Move::RInv];
    let mut words = vec![MoveWord::new()];
    let mut checked = 0;
    let mut skipped = 0;
    for _ in 0..5 {
        words = words.iter().flat_map(|w| ms.map(|m| MoveWord(w.0.iter().copied().chain([m]).collect()))).collect();
        for w in &words {
            match PlanarState::base().run(w) {
                Ok((p, n)) => {
                    assert_eq!(*p.state(), PuncturedState::base().apply_word(w));
                    checked += n;
                }
                Err(oracle::OracleError::Mismatch(m)) => panic!("{w}: {m}"),
                Err(_) => skipped += 1,
            }
        }
    }
    assert!(checked > 1000 && skipped * 10 < words.len(), "{checked} flips checked, {skipped} words skipped");
}

#[test]
fn pentagon_words_realize_letters() {
    for l in all_letters() {
        let got = PuncturedState::base().apply_word(&pentagon_word(l));
        let want = PuncturedState::base().apply_braid(&BraidWord(vec![l])).unwrap();
        assert_eq!(got, want, "{l}");
    }
}

#[test]
fn pentagons_at_the_base_doe() {
    let fr = TStarElement::from_moves(&"frfrfrfrfr".parse().unwrap());
    assert!(fr.state().is_kernel());
    assert_eq!(kernel_braid(&fr).unwrap(), BraidWord(vec![letter("s(root,hL)")]));
    assert!(!fr.is_identity());
    assert!(project_to_t(&fr).is_identity());
    let rf = TStarElement::from_moves(&"rfrfrfrfrf".parse().unwrap());
    assert_eq!(kernel_braid(&rf).unwrap(), BraidWord(vec![letter("s(root,hR)")]));
    assert!(kernel_braid(&TStarElement::from_moves(&"f".parse().unwrap())).is_err());
}

#[test]
fn combing_reproduces_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..40 {
        let w = random_moves(&mut rng, 14);
        let z = TStarElement::from_moves(&w);
        let c = tstar_combing(&z).unwrap();
        assert_eq!(PuncturedState::base().apply_word(&c.moves), *z.state());
        assert_eq!(PuncturedState::base().apply_word(&c.word.phi()), *z.state());
        assert_eq!(project_to_t(&z), project_to_t(&TStarElement::from_moves(&c.combing)));
    }
}

#[test]
fn admissible_lifts_need_no_correction() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..40 {
        let tau = LabeledState::base().apply_word(&random_moves(&mut rng, 12));
        let s = admissible_lift(&tau);
        assert_eq!(*s.underlying(), tau);
        assert!(correction_factor(&s).unwrap().free_reduce().is_empty());
    }
}

#[test]
fn correction_factor_undoes_braids() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let letters = all_letters();
    for _ in 0..30 {
        let tau = LabeledState::base().apply_word(&random_moves(&mut rng, 10));
        let adm = admissible_lift(&tau);
        let b = random_braid(&mut rng, &letters, 2);
        let s = adm.apply_braid(&b).unwrap();
        let c = correction_factor(&s).unwrap();
        assert_eq!(s.apply_braid(&c).unwrap(), adm, "braid {b}");
    }
}

#[test]
fn straightening_shortens_every_round() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let letters = all_letters();
    for _ in 0..40 {
        let b = random_braid(&mut rng, &letters, 4);
        let s = PuncturedState::base().apply_braid(&b).unwrap();
        let chord = Cell::A.lower().edge_above().chord();
        let (ops, out) = straighten_comb_arc(&s, chord).unwrap();
        assert!(out.arc(chord.a, chord.b).unwrap().is_base());
        let mut cur = s.clone();
        let mut len = cur.arc(chord.a, chord.b).unwrap().crossing_length().unwrap();
        for op in ops {
            if let StraightenOp::Untangle(c) = op {
                cur = cur.apply_braid(&c).unwrap();
                let a = cur.arc(chord.a, chord.b).unwrap();
                let next = a.crossing_length().unwrap();
                assert!(next < len || a.is_base());
                len = next;
            }
        }
    }
}

#[test]
fn balance_of_base_arcs() {
    let twisted = PuncturedState::from_homeo(&letter("s(root,tR)").homeo());
    for e in [BaseEdge::Root, BaseEdge::Above(Cell::A.lower())] {
        let a = Arc::base(e);
        assert_eq!(admissibility_balance(&a, &a).unwrap(), (0, 0));
        let b = twisted.arc(a.tail, a.head).unwrap();
        // the puncture of tR lies right of the root edge and left of tR
        let want = if e == BaseEdge::Root { (1, 1) } else { (0, 0) };
        assert_eq!(admissibility_balance(&a, &b).unwrap(), want, "{}", e.address());
    }
    assert!(admissibility_balance(&Arc::base(BaseEdge::Root), &Arc::base(BaseEdge::Above(Cell::A.lower()))).is_err());
}

#[test]
fn strand_action_detects_braids() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let letters = all_letters();
    for _ in 0..40 {
        let b1 = random_braid(&mut rng, &letters, 3);
        let b2 = random_braid(&mut rng, &letters, 3);
        let (h1, h2) = (b1.homeo().unwrap(), b2.homeo().unwrap());
        let equal = PuncturedState::from_homeo(&h1) == PuncturedState::from_homeo(&h2);
        assert_eq!(StrandAutomorphism::same_action(&h1, &h2), equal, "{b1} vs {b2}");
        assert!(StrandAutomorphism::of_homeo(&h1).images_are_conjugates());
    }
    let l = letter("s(root,tR)");
    let sa = StrandAutomorphism::of_homeo(&l.homeo());
    assert_eq!(sa.support(), vec![l.e, l.f]);
}

#[test]
fn json_and_fingerprint() {
    let s = PuncturedState::from_homeo(&letter("s(root,tR)").homeo());
    assert_ne!(s.fingerprint(), PuncturedState::base().fingerprint());
    assert_eq!(s.fingerprint(), s.clone().fingerprint());
    assert!(s.to_json().is_object());
}


#[test]
fn products_match_word_concatenation() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..30 {
        let x = GeneratorWord::from_moves(&random_moves(&mut rng, 8));
        let y = GeneratorWord::from_moves(&random_moves(&mut rng, 8));
        let (zx, zy) = (TStarElement::from_word(&x), TStarElement::from_word(&y));
        assert_eq!(zx.multiply(&zy).unwrap(), TStarElement::from_word(&x.concat(&y)));
        assert!(zx.multiply(&zx.inverse().unwrap()).unwrap().is_identity());
        assert_eq!(project_to_t(&zx.multiply(&zy).unwrap()), crate::group::multiply(&project_to_t(&zx), &project_to_t(&zy)));
    }
}

#[test]
fn kernel_braid_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let letters = all_letters();
    for _ in 0..30 {
        let (b1, b2) = (random_braid(&mut rng, &letters, 2), random_braid(&mut rng, &letters, 2));
        // the element whose braid is b has state b⁻¹(S₀)
        let k = |b: &BraidWord| TStarElement::from_state(PuncturedState::base().apply_braid(&b.inverse()).unwrap());
        let (k1, k2) = (k(&b1), k(&b2));
        assert!(StrandAutomorphism::same_action(&kernel_braid(&k1).unwrap().homeo().unwrap(), &b1.homeo().unwrap()));
        let prod = kernel_braid(&k1.multiply(&k2).unwrap()).unwrap();
        assert!(StrandAutomorphism::same_action(&prod.homeo().unwrap(), &b1.then_after(&b2).homeo().unwrap()), "{b1} · {b2} gave {prod}");
    }
}

mod props {
    use proptest::prelude::*;

    use super::*;

    fn braid() -> impl Strategy<Value = BraidWord> {
        let letters = all_letters();
        prop::collection::vec(0..letters.len(), 0..5).prop_map(move |ix| BraidWord(ix.into_iter().map(|i| letters[i]).collect()))
    }

    fn moves() -> impl Strategy<Value = MoveWord> {
        prop::collection::vec(0..4usize, 0..10).prop_map(|ix| MoveWord(ix.into_iter().map(|i| [Move::F, Move::FInv, Move::R, Move::RInv][i]).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn untangling_inverts_braids(b in braid()) {
            let k = PuncturedState::base().apply_braid(&b).unwrap();
            let got = untangle_state(&k).unwrap();
            prop_assert_eq!(PuncturedState::base().apply_braid(&got).unwrap(), k);
        }

        #[test]
        fn braided_states_keep_their_arcs_tight(b in braid(), w in moves()) {
            let s = PuncturedState::base().apply_braid(&b).unwrap().apply_word(&w);
            for a in s.arcs().values() {
                let cw = CrossingWord::from_arc(a).unwrap();
                prop_assert_eq!(cw.tight_reduce().unwrap().entries, cw.entries.clone());
            }
        }

        #[test]
        fn balance_is_symmetric(b in braid(), w in moves()) {
            let tau = LabeledState::base().apply_word(&w);
            let adm = admissible_lift(&tau);
            let s = adm.apply_braid(&b).unwrap();
            for (c, a) in adm.arcs() {
                let other = s.arc(c.a, c.b).unwrap();
                let (x, y) = admissibility_balance(a, &other).unwrap();
                prop_assert_eq!(x, y);
            }
        }

        #[test]
        fn combing_round_trips(w in moves(), b in braid()) {
            let z = TStarElement::from_state(PuncturedState::base().apply_braid(&b).unwrap().apply_word(&w));
            let c = tstar_combing(&z).unwrap();
            prop_assert_eq!(TStarElement::from_word(&c.word), z);
        }
    }
}



