#![allow(dead_code)]

use kstar_core::{conclusion, Proof, Term, Vertex};
use proptest::prelude::*;

/// Random terms over the actions `a`, `b`, `c`.
pub fn term(max_size: usize, max_depth: usize) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        1 => Just(Term::zero()),
        3 => prop::sample::select(vec!["a", "b", "c"]).prop_map(Term::act),
    ];
    leaf.prop_recursive(4, max_size as u32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Term::plus(p, q)),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Term::mult(p, q)),
            (inner.clone(), inner).prop_map(|(p, q)| Term::star(p, q)),
        ]
    })
    .prop_filter("size and star depth bounds", move |t| {
        t.size() <= max_size && t.star_depth() <= max_depth
    })
}

pub fn v(t: &Term) -> Vertex {
    Vertex::Term(t.clone())
}

use rand::Rng;

/// A random term over `a`, `b`, `c` with exactly `size` nodes.
pub fn random_term<R: Rng>(rng: &mut R, size: usize) -> Term {
    if size <= 1 {
        return match rng.gen_range(0..7) {
            0 => Term::zero(),
            1 | 2 => Term::act("a"),
            3 | 4 => Term::act("b"),
            _ => Term::act("c"),
        };
    }
    if size == 2 {
        return random_term(rng, 1);
    }
    let left = rng.gen_range(1..size - 1);
    let p = random_term(rng, left);
    let q = random_term(rng, size - 1 - left);
    match rng.gen_range(0..3) {
        0 => Term::plus(p, q),
        1 => Term::mult(p, q),
        _ => Term::star(p, q),
    }
}

/// A random term within the size and star-depth bounds.
pub fn bounded_term<R: Rng>(rng: &mut R, max_size: usize, max_depth: usize) -> Term {
    loop {
        let size = rng.gen_range(1..=max_size);
        let t = random_term(rng, size);
        if t.star_depth() <= max_depth {
            return t;
        }
    }
}

/// Applies one axiom instance, in either direction, at the root of `t`
/// if it matches.
fn rewrite_root<R: Rng>(rng: &mut R, t: &Term) -> Option<Term> {
    use kstar_core::TermKind::*;
    let forward = rng.gen_bool(0.5);
    let mut out = Vec::new();
    match t.kind() {
        Plus(x, y) => {
            out.push(Term::plus(y.clone(), x.clone()));
            if let Plus(y1, y2) = y.kind() {
                out.push(Term::plus(Term::plus(x.clone(), y1.clone()), y2.clone()));
            }
            if let Plus(x1, x2) = x.kind() {
                out.push(Term::plus(x1.clone(), Term::plus(x2.clone(), y.clone())));
            }
            if x == y {
                out.push(x.clone());
            }
            if y.is_zero() {
                out.push(x.clone());
            }
            if let (Mult(x1, z1), Mult(y1, z2)) = (x.kind(), y.kind()) {
                if z1 == z2 {
                    out.push(Term::mult(Term::plus(x1.clone(), y1.clone()), z1.clone()));
                }
            }
            if let Mult(x1, s) = x.kind() {
                if let Star(sx, sy) = s.kind() {
                    if sx == x1 && sy == y {
                        out.push(s.clone());
                    }
                }
            }
        }
        Mult(x, z) => {
            if let Plus(x1, y1) = x.kind() {
                out.push(Term::plus(
                    Term::mult(x1.clone(), z.clone()),
                    Term::mult(y1.clone(), z.clone()),
                ));
            }
            if let Mult(x1, y1) = x.kind() {
                out.push(Term::mult(x1.clone(), Term::mult(y1.clone(), z.clone())));
            }
            if let Mult(y1, z1) = z.kind() {
                out.push(Term::mult(Term::mult(x.clone(), y1.clone()), z1.clone()));
            }
            if x.is_zero() {
                out.push(Term::zero());
            }
            if let Star(x1, y1) = x.kind() {
                out.push(Term::star(x1.clone(), Term::mult(y1.clone(), z.clone())));
            }
        }
        Star(x, y) => {
            out.push(Term::plus(Term::mult(x.clone(), t.clone()), y.clone()));
            if let Mult(y1, z) = y.kind() {
                out.push(Term::mult(Term::star(x.clone(), y1.clone()), z.clone()));
            }
        }
        Zero => {
            if !forward {
                out.push(Term::mult(Term::zero(), random_term(rng, 1)));
            }
        }
        Act(_) => {}
    }
    if !forward {
        out.push(Term::plus(t.clone(), t.clone()));
        out.push(Term::plus(t.clone(), Term::zero()));
    }
    if out.is_empty() {
        None
    } else {
        let i = rng.gen_range(0..out.len());
        Some(out.swap_remove(i))
    }
}

/// Rewrites a random subterm of `t` with one axiom instance.
pub fn rewrite_once<R: Rng>(rng: &mut R, t: &Term) -> Term {
    use kstar_core::TermKind::*;
    let descend = rng.gen_bool(0.6);
    let rebuilt = match (descend, t.kind()) {
        (true, Plus(x, y)) if rng.gen_bool(0.5) => {
            Some(Term::plus(rewrite_once(rng, x), y.clone()))
        }
        (true, Plus(x, y)) => Some(Term::plus(x.clone(), rewrite_once(rng, y))),
        (true, Mult(x, y)) if rng.gen_bool(0.5) => {
            Some(Term::mult(rewrite_once(rng, x), y.clone()))
        }
        (true, Mult(x, y)) => Some(Term::mult(x.clone(), rewrite_once(rng, y))),
        (true, Star(x, y)) if rng.gen_bool(0.5) => {
            Some(Term::star(rewrite_once(rng, x), y.clone()))
        }
        (true, Star(x, y)) => Some(Term::star(x.clone(), rewrite_once(rng, y))),
        _ => None,
    };
    rebuilt
        .or_else(|| rewrite_root(rng, t))
        .unwrap_or_else(|| t.clone())
}

/// `steps` random axiom rewrites of `t`; the result is bisimilar to `t`.
pub fn rewrite<R: Rng>(rng: &mut R, t: &Term, steps: usize) -> Term {
    (0..steps).fold(t.clone(), |acc, _| rewrite_once(rng, &acc))
}

/// A random well-formed certificate built from axiom instances over `ts`.
pub fn random_proof<R: Rng>(rng: &mut R, ts: &[Term], size: usize) -> Proof {
    let pick = |rng: &mut R| ts[rng.gen_range(0..ts.len())].clone();
    if size <= 1 {
        let (x, y, z) = (pick(rng), pick(rng), pick(rng));
        return match rng.gen_range(0..11) {
            0 => Proof::refl(x),
            1 => Proof::b1(x, y),
            2 => Proof::b2(x, y, z),
            3 => Proof::b3(x),
            4 => Proof::b4(x, y, z),
            5 => Proof::b5(x, y, z),
            6 => Proof::b6(x),
            7 => Proof::b7(x),
            8 => Proof::bks1(x, y),
            9 => Proof::bks2(x, y, z),
            _ => Proof::rsp(Proof::symm(Proof::bks1(x, y))),
        };
    }
    let l = random_proof(rng, ts, size / 2);
    let r = random_proof(rng, ts, size - size / 2);
    match rng.gen_range(0..5) {
        0 => Proof::symm(l),
        1 => Proof::comp_plus(l, r),
        2 => Proof::comp_mult(l, r),
        3 => Proof::comp_star(l, r),
        _ => {
            let cl = conclusion(&l).unwrap();
            let cr = conclusion(&r).unwrap();
            if cl.rhs == cr.lhs {
                Proof::trans(l, r)
            } else {
                Proof::trans(l.clone(), Proof::symm(l))
            }
        }
    }
}
