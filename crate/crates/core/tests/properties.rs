mod common;

use std::cmp::Ordering;

use common::{random_proof, rewrite, term, v};
use kstar_core::proof::check;
use kstar_core::{
    conclusion, expand, parse, parse_proof, render, serialize, sigma, Proof, Session, SummandSet,
    Term, TermKind, Vertex,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn depth(t: &Term) -> usize {
    match t.kind() {
        TermKind::Zero | TermKind::Act(_) => 0,
        TermKind::Plus(x, y) | TermKind::Mult(x, y) => depth(x).max(depth(y)),
        TermKind::Star(x, y) => (1 + depth(x)).max(depth(y)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn render_parse_round_trip(t in term(16, 4)) {
        let text = render(&t);
        prop_assert_eq!(parse(&text).unwrap(), t);
    }

    #[test]
    fn term_order_is_a_total_order(x in term(8, 2), y in term(8, 2), z in term(8, 2)) {
        prop_assert_eq!(x.term_order(&y), y.term_order(&x).reverse());
        prop_assert_eq!(x.term_order(&y) == Ordering::Equal, x == y);
        if x.term_order(&y) != Ordering::Greater && y.term_order(&z) != Ordering::Greater {
            prop_assert_ne!(x.term_order(&z), Ordering::Greater);
        }
    }

    #[test]
    fn star_depth_matches_definition(t in term(16, 4)) {
        prop_assert_eq!(t.star_depth(), depth(&t));
    }

    #[test]
    fn reachable_is_closed_under_steps(t in term(12, 3)) {
        let s = Session::new();
        let all = s.reachable(&t).unwrap();
        prop_assert!(all.contains(&v(&t)));
        for u in &all {
            for (_, w) in s.successors(u).iter() {
                prop_assert!(all.contains(w));
            }
        }
        let plus = s.reachable_plus(&t).unwrap();
        for u in plus.iter() {
            prop_assert!(all.contains(&v(u)));
        }
    }

    #[test]
    fn refinement_agrees_with_naive_fixpoint(p in term(9, 2), q in term(9, 2)) {
        let s = Session::new();
        prop_assert_eq!(s.bisimilar(&v(&p), &v(&q)).unwrap(), s.bisim_naive(&v(&p), &v(&q)).unwrap());
    }

    #[test]
    fn rewritten_terms_are_bisimilar(p in term(12, 3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = rewrite(&mut rng, &p, 4);
        let s = Session::new();
        prop_assert!(s.bisimilar_terms(&p, &q).unwrap(), "{} vs {}", p, q);
        let w = s.bisim_witness(&v(&p), &v(&q)).unwrap().unwrap();
        prop_assert!(w.is_valid());
        prop_assert!(w.contains(&v(&p), &v(&q)));
    }

    #[test]
    fn witness_iff_bisimilar(p in term(8, 2), q in term(8, 2)) {
        let s = Session::new();
        let w = s.bisim_witness(&v(&p), &v(&q)).unwrap();
        prop_assert_eq!(w.is_some(), s.bisimilar_terms(&p, &q).unwrap());
        if let Some(w) = w {
            prop_assert!(w.is_valid());
        }
    }

    #[test]
    fn right_compatibility(p in term(8, 2), q in term(8, 2), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rewrite(&mut rng, &q, 3);
        let s = Session::new();
        if s.is_nfmult(&p, &q).unwrap() {
            prop_assert!(s.is_nfmult(&p, &r).unwrap(), "{} / {} / {}", p, q, r);
        }
        if s.congr(&p, &q).unwrap() {
            prop_assert!(s.congr(&p, &r).unwrap(), "{} / {} / {}", p, q, r);
        }
    }

    #[test]
    fn steps_preserve_normal_forms(p in term(10, 2), r in term(6, 2)) {
        let s = Session::new();
        let n = s.normalize(&p).unwrap();
        for (_, w) in s.term_successors(&n).iter() {
            if let Vertex::Term(q) = w {
                prop_assert!(s.is_nf(q).unwrap(), "{} -> {}", n, q);
            }
        }
        let m = s.normalize_mult(&p, &r).unwrap();
        for (_, w) in s.term_successors(&m).iter() {
            if let Vertex::Term(q) = w {
                prop_assert!(s.is_nfmult(q, &r).unwrap(), "{} -> {} before {}", m, q, r);
            }
        }
    }

    #[test]
    fn congruence_cancellation(p in term(8, 2), r in term(6, 2)) {
        let s = Session::new();
        let q = s.normalize_mult(&p, &r).unwrap();
        if s.congr(&p, &r).unwrap() && s.congr(&q, &r).unwrap() {
            prop_assert!(s.bisimilar_terms(&p, &q).unwrap(), "{} vs {} before {}", p, q, r);
        }
    }

    #[test]
    fn expansion_is_exact(p in term(14, 3)) {
        let s = Session::new();
        let (n, cert) = expand(&p);
        let steps: SummandSet = s.term_successors(&p).iter().cloned().collect();
        prop_assert_eq!(&n, &steps);
        prop_assert!(check(&cert, &p, &sigma(&n)).unwrap());
    }

    #[test]
    fn certificate_serialization_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ts: Vec<Term> = (0..4).map(|_| common::bounded_term(&mut rng, 6, 2)).collect();
        let proof = random_proof(&mut rng, &ts, 12);
        let text = serialize(&proof);
        let back = parse_proof(&text).unwrap();
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(conclusion(&back).unwrap(), conclusion(&proof).unwrap());
    }

    #[test]
    fn random_certificates_are_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ts: Vec<Term> = (0..4).map(|_| common::bounded_term(&mut rng, 6, 2)).collect();
        let proof = random_proof(&mut rng, &ts, 16);
        let c = conclusion(&proof).unwrap();
        prop_assert!(Session::new().bisimilar_terms(&c.lhs, &c.rhs).unwrap(), "{} = {}", c.lhs, c.rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn prove_equal_on_rewritten_pairs(p in term(12, 3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = rewrite(&mut rng, &p, 5);
        let s = Session::new();
        let cert = s.prove_equal(&p, &q).unwrap();
        prop_assert!(check(&cert, &p, &q).unwrap(), "{} = {}", p, q);
    }

    #[test]
    fn prove_equal_against_normal_form(p in term(12, 3)) {
        let s = Session::new();
        let q = s.normalize(&p).unwrap();
        let cert = s.prove_equal(&q, &p).unwrap();
        prop_assert!(check(&cert, &q, &p).unwrap());
    }

    #[test]
    fn prove_equal_rejects_exactly_non_bisimilar(p in term(8, 2), q in term(8, 2)) {
        let s = Session::new();
        match s.prove_equal(&p, &q) {
            Ok(cert) => prop_assert!(check(&cert, &p, &q).unwrap()),
            Err(kstar_core::ProveError::NotBisimilar) => prop_assert!(!s.bisimilar_terms(&p, &q).unwrap()),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

#[test]
fn rsp_with_derived_premise() {
    let s = Session::new();
    let x = parse("a . (a * b) + b").unwrap();
    let (y, z) = (parse("a").unwrap(), parse("b").unwrap());
    let unfolded = Term::plus(Term::mult(y.clone(), x.clone()), z.clone());
    let premise = s.prove_equal(&x, &unfolded).unwrap();
    let cert = Proof::rsp(premise);
    assert!(check(&cert, &x, &Term::star(y, z)).unwrap());
}
