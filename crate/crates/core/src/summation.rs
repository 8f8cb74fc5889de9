//! Sums of summands and the certificates that move between a term and its
//! summation form.
//!
//! For a finite set `N` of `(action, vertex)` pairs, `sigma(N)` folds the
//! canonical entry order from the right: `sigma([]) = 0` and
//! `sigma([e1, e2, ..]) = sigma([e2, ..]) + c(e1)` where `c(a, √) = a` and
//! `c(a, u) = a . u`. So the first entry is the outermost summand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::proof::{self, Proof, ProofNode};
use crate::term::{Action, Term, TermKind, Vertex};

pub type Summand = (Action, Vertex);

/// A finite set of summands kept in canonical (sorted, duplicate free)
/// order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SummandSet {
    entries: Vec<Summand>,
}

impl SummandSet {
    pub fn new() -> SummandSet {
        SummandSet::default()
    }

    pub fn entries(&self) -> &[Summand] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, e: &Summand) -> bool {
        self.entries.binary_search(e).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Summand> {
        self.entries.iter()
    }

    pub fn union(&self, other: &SummandSet) -> SummandSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    pub fn to_set(&self) -> BTreeSet<Summand> {
        self.entries.iter().cloned().collect()
    }
}

impl FromIterator<Summand> for SummandSet {
    fn from_iter<I: IntoIterator<Item = Summand>>(iter: I) -> SummandSet {
        let mut entries: Vec<Summand> = iter.into_iter().collect();
        entries.sort();
        entries.dedup();
        SummandSet { entries }
    }
}

impl fmt::Debug for SummandSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.entries.iter().map(|(a, v)| format!("({a}, {v:?})")))
            .finish()
    }
}

impl fmt::Display for SummandSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({a}, {v})")?;
        }
        f.write_str("}")
    }
}

/// The summand contributed by one entry: `a` or `a . u`.
pub fn summand_term(e: &Summand) -> Term {
    let a = Term::action(e.0.clone());
    match &e.1 {
        Vertex::Tick => a,
        Vertex::Term(u) => Term::mult(a, u.clone()),
    }
}

fn fold_sum(entries: &[Summand]) -> Term {
    entries
        .iter()
        .rev()
        .fold(Term::zero(), |acc, e| Term::plus(acc, summand_term(e)))
}

/// The summation operator.
pub fn sigma(n: &SummandSet) -> Term {
    fold_sum(&n.entries)
}

/// `sigma(A) + c(e) = sigma(A ∪ {e})`; when `e ∈ A` this absorbs the
/// duplicate summand.
fn insert_proof(a: &[Summand], e: &Summand) -> Proof {
    let ce = summand_term(e);
    let Some((x1, rest)) = a.split_first() else {
        // 0 + c(e) is literally sigma({e})
        return Proof::refl(Term::plus(Term::zero(), ce));
    };
    let s_rest = fold_sum(rest);
    let cx = summand_term(x1);
    match e.cmp(x1) {
        std::cmp::Ordering::Less => Proof::refl(Term::plus(fold_sum(a), ce)),
        std::cmp::Ordering::Equal => Proof::trans(
            Proof::b2(s_rest.clone(), cx.clone(), cx.clone()),
            Proof::comp_plus(Proof::refl(s_rest), Proof::b3(cx)),
        ),
        std::cmp::Ordering::Greater => Proof::chain(
            Term::plus(Term::plus(s_rest.clone(), cx.clone()), ce.clone()),
            [
                Proof::b2(s_rest.clone(), cx.clone(), ce.clone()),
                Proof::comp_plus(
                    Proof::refl(s_rest.clone()),
                    Proof::b1(cx.clone(), ce.clone()),
                ),
                Proof::symm(Proof::b2(s_rest, ce, cx.clone())),
                Proof::comp_plus(insert_proof(rest, e), Proof::refl(cx)),
            ],
        ),
    }
}

/// `sigma(A) + sigma(B) = sigma(A ∪ B)`.
fn union_proof(a: &SummandSet, b: &[Summand]) -> (SummandSet, Proof) {
    let Some((b1, rest)) = b.split_first() else {
        return (a.clone(), Proof::b6(sigma(a)));
    };
    let (ab, ih) = union_proof(a, rest);
    let cb = summand_term(b1);
    let proof = Proof::chain(
        Term::plus(sigma(a), fold_sum(b)),
        [
            Proof::symm(Proof::b2(sigma(a), fold_sum(rest), cb.clone())),
            Proof::comp_plus(ih, Proof::refl(cb)),
            insert_proof(ab.entries(), b1),
        ],
    );
    let out: SummandSet = ab
        .iter()
        .cloned()
        .chain(std::iter::once(b1.clone()))
        .collect();
    (out, proof)
}

/// Certificate for `sigma(N1 ∪ N2) = sigma(N1) + sigma(N2)`.
pub fn prove_sum_union(n1: &SummandSet, n2: &SummandSet) -> Proof {
    Proof::symm(union_proof(n1, n2.entries()).1)
}

/// `fold(list) = sigma(set(list))` for a summand list in arbitrary order,
/// possibly with repeats, folded the same way as `sigma`.
fn list_proof(list: &[Summand]) -> (SummandSet, Proof) {
    let Some((f1, rest)) = list.split_first() else {
        return (SummandSet::new(), Proof::refl(Term::zero()));
    };
    let (set, ih) = list_proof(rest);
    let proof = Proof::trans(
        Proof::comp_plus(ih, Proof::refl(summand_term(f1))),
        insert_proof(set.entries(), f1),
    );
    let out: SummandSet = set
        .iter()
        .cloned()
        .chain(std::iter::once(f1.clone()))
        .collect();
    (out, proof)
}

fn project(e: &Summand, r: &Term) -> Summand {
    match &e.1 {
        Vertex::Tick => (e.0.clone(), Vertex::Term(r.clone())),
        Vertex::Term(u) => (e.0.clone(), Vertex::Term(Term::mult(u.clone(), r.clone()))),
    }
}

/// `sigma(E) . r = fold(project(E, r))`.
fn distribute_proof(entries: &[Summand], r: &Term) -> Proof {
    let Some((e1, rest)) = entries.split_first() else {
        return Proof::b7(r.clone());
    };
    let ce = summand_term(e1);
    let head = match &e1.1 {
        Vertex::Tick => Proof::refl(Term::mult(ce.clone(), r.clone())),
        Vertex::Term(u) => Proof::b5(Term::action(e1.0.clone()), u.clone(), r.clone()),
    };
    Proof::trans(
        Proof::b4(fold_sum(rest), ce, r.clone()),
        Proof::comp_plus(distribute_proof(rest, r), head),
    )
}

/// `sigma(N) . r = sigma(N')` where `N'` maps `(a, √)` to `(a, r)` and
/// `(a, u)` to `(a, u . r)`.
fn mult_proof(n: &SummandSet, r: &Term) -> (SummandSet, Proof) {
    let projected: Vec<Summand> = n.iter().map(|e| project(e, r)).collect();
    let (set, reorder) = list_proof(&projected);
    (set, Proof::trans(distribute_proof(n.entries(), r), reorder))
}

/// Expands `p` into summation form: returns the set `N` of its steps and a
/// certificate for `p = sigma(N)`.
pub fn expand(p: &Term) -> (SummandSet, Proof) {
    match p.kind() {
        TermKind::Zero => (SummandSet::new(), Proof::refl(p.clone())),
        TermKind::Act(a) => (
            [(a.clone(), Vertex::Tick)].into_iter().collect(),
            Proof::symm(Proof::trans(
                Proof::b1(Term::zero(), p.clone()),
                Proof::b6(p.clone()),
            )),
        ),
        TermKind::Plus(p1, p2) => {
            let (n1, e1) = expand(p1);
            let (n2, e2) = expand(p2);
            let (n, u) = union_proof(&n1, n2.entries());
            (n, Proof::trans(Proof::comp_plus(e1, e2), u))
        }
        TermKind::Mult(p1, p2) => {
            let (n1, e1) = expand(p1);
            let (n, m) = mult_proof(&n1, p2);
            (
                n,
                Proof::trans(Proof::comp_mult(e1, Proof::refl(p2.clone())), m),
            )
        }
        TermKind::Star(p1, p2) => {
            let (n1, e1) = expand(p1);
            let (n2, e2) = expand(p2);
            let (body, m) = mult_proof(&n1, p);
            let (n, u) = union_proof(&body, n2.entries());
            let proof = Proof::chain(
                p.clone(),
                [
                    Proof::symm(Proof::bks1(p1.clone(), p2.clone())),
                    Proof::comp_plus(
                        Proof::trans(Proof::comp_mult(e1, Proof::refl(p.clone())), m),
                        e2,
                    ),
                    u,
                ],
            );
            (n, proof)
        }
    }
}

/// Evidence that two step targets are both `√`, or are provably equal.
#[derive(Clone, Debug)]
pub enum TeqWitness {
    BothTick,
    Eq(Term, Term, Proof),
}

impl TeqWitness {
    /// Builds the `Eq` case from a proof, reading the sides off its
    /// conclusion.
    pub fn from_proof(p: Proof) -> Result<TeqWitness, proof::IllFormed> {
        let c = proof::conclusion(&p)?;
        Ok(TeqWitness::Eq(c.lhs, c.rhs, p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("step ({}, {}) of the {side} term has no matched partner", .step.0, .step.1)]
    IncompleteMatching { side: &'static str, step: Summand },
    #[error("witness for ({}, {}) does not relate the matched targets", .step.0, .step.1)]
    BadWitness { side: &'static str, step: Summand },
}

/// One matched pair: a step of the absorbed side, the step of the absorbing
/// side it is matched with, and a proof `extra target = base target`
/// (`None` when both are `√`).
pub(crate) type Match = (Summand, Summand, Option<Proof>);

fn refl_term(p: &Proof) -> Option<&Term> {
    match p.node() {
        ProofNode::Refl(t) => Some(t),
        _ => None,
    }
}

/// `comp-plus`, folding two reflexivity steps into one.
fn cplus(p: Proof, q: Proof) -> Proof {
    match (refl_term(&p), refl_term(&q)) {
        (Some(x), Some(y)) => Proof::refl(Term::plus(x.clone(), y.clone())),
        _ => Proof::comp_plus(p, q),
    }
}

/// `c(e) = c(f)` for matched steps on the same action.
fn summand_eq(e: &Summand, f: &Summand, p: &Option<Proof>) -> Proof {
    match p {
        Some(p) if !p.is_refl() => {
            Proof::comp_mult(Proof::refl(Term::action(e.0.clone())), p.clone())
        }
        _ => Proof::refl(summand_term(f)),
    }
}

/// `sigma(base) + sigma(extra) = sigma(base)`, every entry of `extra`
/// being matched to an entry of `base`.
fn absorb_all(base: &SummandSet, extra: &[Summand], matches: &BTreeMap<Summand, Match>) -> Proof {
    let sb = sigma(base);
    let Some((x1, rest)) = extra.split_first() else {
        return Proof::b6(sb);
    };
    let (_, target, p) = &matches[x1];
    let cx = summand_term(x1);
    Proof::chain(
        Term::plus(sb.clone(), fold_sum(extra)),
        [
            Proof::symm(Proof::b2(sb.clone(), fold_sum(rest), cx.clone())),
            cplus(absorb_all(base, rest, matches), Proof::refl(cx)),
            cplus(Proof::refl(sb), summand_eq(x1, target, p)),
            insert_proof(base.entries(), target),
        ],
    )
}

/// Rewrites every summand of `fold(entries)` into its matched partner:
/// returns the partners in order and `fold(entries) = fold(partners)`.
fn rewrite_summands(
    entries: &[Summand],
    matches: &BTreeMap<Summand, Match>,
) -> (Vec<Summand>, Proof) {
    let Some((e1, rest)) = entries.split_first() else {
        return (Vec::new(), Proof::refl(Term::zero()));
    };
    let (mut images, ih) = rewrite_summands(rest, matches);
    let (_, f1, p) = &matches[e1];
    let proof = cplus(ih, summand_eq(e1, f1, p));
    images.insert(0, f1.clone());
    (images, proof)
}

/// Assembles `p = q` from expansions of both sides.
///
/// Every step of `p` is rewritten in place into its `forward` partner;
/// the steps of `q` that are nobody's partner are then absorbed using
/// `backward`, which only needs entries for those. Each supplied proof
/// occurs at most once in the result. No validation; see
/// [`prove_by_matching`].
pub(crate) fn matching_proof(
    (mp, ep): &(SummandSet, Proof),
    (mq, eq): &(SummandSet, Proof),
    forward: &BTreeMap<Summand, Match>,
    backward: &BTreeMap<Summand, Match>,
) -> Proof {
    let (images, rewrite) = rewrite_summands(mp.entries(), forward);
    let (image_set, regroup) = list_proof(&images);
    let into_images = Proof::trans(rewrite, regroup);
    let rest: Vec<Summand> = mq
        .iter()
        .filter(|e| !image_set.contains(e))
        .cloned()
        .collect();
    let sp = sigma(mp);
    let middle = if rest.is_empty() {
        into_images
    } else {
        let (_, union) = union_proof(&image_set, &rest);
        Proof::chain(
            sp.clone(),
            [
                Proof::symm(absorb_all(mp, &rest, backward)),
                cplus(into_images, Proof::refl(fold_sum(&rest))),
                union,
            ],
        )
    };
    Proof::chain(sp, [ep.clone(), middle, Proof::symm(eq.clone())])
}

/// The steps of `q` that the forward matching leaves uncovered.
pub(crate) fn uncovered<'a>(
    mq: &'a SummandSet,
    forward: &BTreeMap<Summand, Match>,
) -> Vec<&'a Summand> {
    let images: BTreeSet<&Summand> = forward.values().map(|m| &m.1).collect();
    mq.iter().filter(|e| !images.contains(e)).collect()
}

fn validate(
    side: &'static str,
    own: &SummandSet,
    other: &SummandSet,
    map: &BTreeMap<Summand, (Summand, TeqWitness)>,
) -> Result<BTreeMap<Summand, Match>, MatchError> {
    let mut out = BTreeMap::new();
    for step in own.iter() {
        let incomplete = || MatchError::IncompleteMatching {
            side,
            step: step.clone(),
        };
        let bad = || MatchError::BadWitness {
            side,
            step: step.clone(),
        };
        let (partner, w) = map.get(step).ok_or_else(incomplete)?;
        if partner.0 != step.0 || !other.contains(partner) {
            return Err(incomplete());
        }
        let p = match (w, &step.1, &partner.1) {
            (TeqWitness::BothTick, Vertex::Tick, Vertex::Tick) => None,
            (TeqWitness::Eq(l, r, p), Vertex::Term(u), Vertex::Term(v)) => {
                let c = proof::conclusion(p).map_err(|_| bad())?;
                if (l, r) != (u, v) || (&c.lhs, &c.rhs) != (u, v) {
                    return Err(bad());
                }
                Some(p.clone())
            }
            _ => return Err(bad()),
        };
        out.insert(step.clone(), (step.clone(), partner.clone(), p));
    }
    Ok(out)
}

/// Proves `p = q` from a matching of their steps.
///
/// `forward` maps every step `(a, u)` of `p` to a step `(a, v)` of `q`
/// with a witness for `u = v`; `backward` maps every step `(a, v)` of `q`
/// to a step `(a, u)` of `p` with a witness for `v = u`.
pub fn prove_by_matching(
    p: &Term,
    q: &Term,
    forward: &BTreeMap<Summand, (Summand, TeqWitness)>,
    backward: &BTreeMap<Summand, (Summand, TeqWitness)>,
) -> Result<Proof, MatchError> {
    let ep = expand(p);
    let eq = expand(q);
    let fwd = validate("left", &ep.0, &eq.0, forward)?;
    let bwd = validate("right", &eq.0, &ep.0, backward)?;
    Ok(matching_proof(&ep, &eq, &fwd, &bwd))
}
