mod common;

use common::term;
use kstar_core::{NormalizationOutcome, Session, Term};
use proptest::prelude::*;

fn bisim(s: &Session, p: &Term, q: &Term) -> bool {
    s.bisimilar_terms(p, q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn normal_form_contract(p in term(10, 2)) {
        let s = Session::new();
        let q = s.normalize(&p).unwrap();
        prop_assert!(bisim(&s, &p, &q), "{} -> {}", p, q);
        prop_assert!(s.is_nf(&q).unwrap(), "{} -> {}", p, q);
        prop_assert!(q.star_depth() <= p.star_depth());
    }

    #[test]
    fn normalize_mult_contract(p in term(8, 2), r in term(6, 2)) {
        let s = Session::new();
        let q = s.normalize_mult(&p, &r).unwrap();
        prop_assert!(bisim(&s, &Term::mult(p.clone(), r.clone()), &Term::mult(q.clone(), r.clone())));
        prop_assert!(s.is_nfmult(&q, &r).unwrap(), "{} in front of {} -> {}", p, r, q);
        prop_assert!(q.star_depth() <= p.star_depth());
    }

    #[test]
    fn ex_step_contract(p in term(8, 2), r in term(6, 2)) {
        let s = Session::new();
        let p = s.normalize_mult(&p, &r).unwrap();
        match s.congr_ex_step(&p, &r).unwrap() {
            NormalizationOutcome::Multiplied(q) => {
                prop_assert!(bisim(&s, &Term::mult(p.clone(), r.clone()), &Term::mult(q.clone(), r.clone())));
                prop_assert!(s.is_nfmult(&q, &r).unwrap());
                prop_assert!(s.congr(&q, &r).unwrap());
                prop_assert!(q.star_depth() <= p.star_depth());
            }
            NormalizationOutcome::Collapsed(q) => {
                let q0 = Term::mult(q.clone(), Term::zero());
                prop_assert!(bisim(&s, &r, &q0));
                prop_assert!(s.is_nf(&q0).unwrap());
                prop_assert!(q.star_depth() <= 1 + p.star_depth());
            }
        }
    }

    #[test]
    fn mult_step_contract(p in term(6, 2), q in term(6, 2), r in term(6, 2)) {
        let s = Session::new();
        let q = s.normalize_mult(&q, &r).unwrap();
        prop_assume!(s.congr(&q, &r).unwrap());
        let qr = Term::mult(q.clone(), r.clone());
        let p = s.normalize_mult(&p, &qr).unwrap();
        let pq = Term::mult(p.clone(), q.clone());
        prop_assume!(s.is_nfmult(&pq, &r).unwrap());
        match s.congr_mult_step(&p, &q, &r).unwrap() {
            NormalizationOutcome::Multiplied(t) => {
                prop_assert!(bisim(&s, &Term::mult(pq.clone(), r.clone()), &Term::mult(t.clone(), r.clone())));
                prop_assert!(s.is_nfmult(&t, &r).unwrap());
                prop_assert!(s.congr(&t, &r).unwrap());
                prop_assert!(t.star_depth() <= pq.star_depth());
            }
            NormalizationOutcome::Collapsed(t) => {
                let t0 = Term::mult(t.clone(), Term::zero());
                prop_assert!(bisim(&s, &r, &t0));
                prop_assert!(s.is_nf(&t0).unwrap());
                prop_assert!(t.star_depth() <= 1 + pq.star_depth());
            }
        }
    }
}
