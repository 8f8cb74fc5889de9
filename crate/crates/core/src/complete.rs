//! Certificates for bisimilar pairs.
//!
//! `prove_equal(p, q)` normalizes `p` to some `r` and proves `r = p` and
//! `r = q`, each by matching the steps of the normal form `r` against the
//! other side. Matching a derivative of `r` with a bisimilar term is done by
//! a solver that follows the syntax of `r`:
//!
//! * derivatives produced by an action, sum or product are handled by
//!   recursion into the subterm that produced them, carrying the right
//!   context of a product along;
//! * derivatives produced by the body of a star `P = p * q` are first
//!   rewritten into an *obligation* `σ(M) . P + σ(N)` where `M` holds steps
//!   of a reduct of `p` and `N` holds steps of `q`. An obligation is then
//!   proved equal to a target term by recursion on the target. Star targets
//!   use RSP; a target of the form `x . X` where `X` is itself an
//!   obligation over `P` bottoms out in a comparison of two obligations,
//!   which recurses into `prove_equal` for strictly smaller star depth.
//!
//! Every result is an ordinary [`Proof`] whose conclusion is exactly the
//! requested pair, so proofs are memoized by their conclusion.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use thiserror::Error;

use crate::normalize::NormalizeError;
use crate::proof::Proof;
use crate::session::{CapExceeded, Session};
use crate::summation::{self, expand, Match, Summand, SummandSet};
use crate::term::{Action, Term, TermKind, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("not-bisimilar")]
    NotBisimilar,
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error("star depth budget exhausted: {term} has depth {depth}, budget {budget}")]
    DepthExhausted {
        term: Term,
        depth: usize,
        budget: usize,
    },
    #[error("certificate has {nodes} nodes, over the cap of {limit}")]
    CertTooLarge { nodes: u64, limit: u64 },
    #[error("invalid obligation: {0}")]
    InvalidObligation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<NormalizeError> for ProveError {
    fn from(e: NormalizeError) -> ProveError {
        match e {
            NormalizeError::Cap(c) => ProveError::Cap(c),
            other => ProveError::Internal(other.to_string()),
        }
    }
}

type Res<T> = Result<T, ProveError>;

fn internal<T>(msg: impl Into<String>) -> Res<T> {
    Err(ProveError::Internal(msg.into()))
}

/// `mult(√, q) = q` and `mult(p, q) = p . q`.
pub fn vertex_mult(u: &Vertex, q: &Term) -> Term {
    match u {
        Vertex::Tick => q.clone(),
        Vertex::Term(p) => Term::mult(p.clone(), q.clone()),
    }
}

/// The proof obligation `σ(M) . (p * q) + σ(N) = target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub p: Term,
    pub q: Term,
    pub m: SummandSet,
    pub n: SummandSet,
    pub target: Term,
    /// `d(p * q)`; nested proofs only run on strictly shallower terms.
    pub depth_budget: usize,
}

impl Obligation {
    pub fn new(p: Term, q: Term, m: SummandSet, n: SummandSet, target: Term) -> Obligation {
        let depth_budget = Term::star(p.clone(), q.clone()).star_depth();
        Obligation {
            p,
            q,
            m,
            n,
            target,
            depth_budget,
        }
    }

    /// `σ(M) . (p * q) + σ(N)`.
    pub fn term(&self) -> Term {
        obligation_term(
            &Term::star(self.p.clone(), self.q.clone()),
            &self.m,
            &self.n,
        )
    }
}

fn obligation_term(star: &Term, m: &SummandSet, n: &SummandSet) -> Term {
    Term::plus(
        Term::mult(summation::sigma(m), star.clone()),
        summation::sigma(n),
    )
}

/// Statistics of one `prove_equal` run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProveStats {
    /// Nodes of the certificate tree.
    pub nodes: u64,
    /// Deepest nesting of `prove_equal` calls.
    pub recursion_depth: usize,
}

/// Describes a term whose derivatives the engine can prove equal to any
/// bisimilar term.
#[derive(Debug)]
enum Next {
    /// A term in normal form.
    Nf(Term),
    /// `p . r`, where `p` is normal in front of `r` and the derivatives of
    /// `r` are described by the inner solver.
    Ctx(Term, Term, Rc<Next>),
}

impl Next {
    fn term(&self) -> Term {
        match self {
            Next::Nf(p) => p.clone(),
            Next::Ctx(p, r, _) => Term::mult(p.clone(), r.clone()),
        }
    }
}

/// A star `body * exit` together with a solver for the steps of `exit`.
struct StarCtx {
    star: Term,
    body: Term,
    exit: Term,
    next: Rc<Next>,
    budget: usize,
}

impl StarCtx {
    fn new(body: Term, exit: Term, next: Rc<Next>) -> StarCtx {
        StarCtx {
            star: Term::star(body.clone(), exit.clone()),
            budget: 1 + body.star_depth(),
            body,
            exit,
            next,
        }
    }
}

#[derive(Clone, Debug)]
struct Obl {
    m: SummandSet,
    n: SummandSet,
}

impl Obl {
    fn term(&self, ctx: &StarCtx) -> Term {
        obligation_term(&ctx.star, &self.m, &self.n)
    }
}

/// Where a step of an obligation term comes from.
#[derive(Clone, Debug)]
enum Prov {
    /// `(a, u) ∈ M`, giving the derivative `mult(u, P)`.
    M(Vertex),
    /// A step of the exit term.
    N,
}

enum Tail {
    End,
    Core(Obl),
}

struct Engine<'s> {
    s: &'s Session,
    expansions: RefCell<HashMap<Term, Rc<(SummandSet, Proof)>>>,
    proved: RefCell<HashMap<(Term, Term), Proof>>,
    depth: Cell<usize>,
    max_depth: Cell<usize>,
}

impl<'s> Engine<'s> {
    fn new(s: &'s Session) -> Engine<'s> {
        Engine {
            s,
            expansions: RefCell::new(HashMap::new()),
            proved: RefCell::new(HashMap::new()),
            depth: Cell::new(0),
            max_depth: Cell::new(0),
        }
    }

    fn bisim(&self, x: &Vertex, y: &Vertex) -> Res<bool> {
        Ok(self.s.bisimilar(x, y)?)
    }

    fn has_step(&self, p: &Term, a: &Action, u: &Vertex) -> bool {
        self.s
            .term_successors(p)
            .binary_search(&(a.clone(), u.clone()))
            .is_ok()
    }

    fn expand(&self, t: &Term) -> Rc<(SummandSet, Proof)> {
        if let Some(e) = self.expansions.borrow().get(t) {
            return e.clone();
        }
        let e = Rc::new(expand(t));
        self.expansions.borrow_mut().insert(t.clone(), e.clone());
        e
    }

    fn lookup(&self, l: &Term, r: &Term) -> Option<Proof> {
        if l == r {
            return Some(Proof::refl(l.clone()));
        }
        self.proved.borrow().get(&(l.clone(), r.clone())).cloned()
    }

    fn remember(&self, l: &Term, r: &Term, p: &Proof) {
        self.proved
            .borrow_mut()
            .insert((l.clone(), r.clone()), p.clone());
    }

    fn check_size(&self, p: &Proof) -> Res<()> {
        let limit = self.s.limits().max_cert_nodes;
        let nodes = p.node_count();
        if nodes > limit {
            return Err(ProveError::CertTooLarge { nodes, limit });
        }
        Ok(())
    }

    /// Step matching: `lhs = rhs` from total matchings in both directions.
    fn match_steps(
        &self,
        lhs: &Term,
        rhs: &Term,
        fwd: Vec<Match>,
        mut bwd: impl FnMut(&Summand) -> Res<Match>,
    ) -> Res<Proof> {
        if lhs == rhs {
            return Ok(Proof::refl(lhs.clone()));
        }
        let el = self.expand(lhs);
        let er = self.expand(rhs);
        let fmap: BTreeMap<Summand, Match> = fwd.into_iter().map(|m| (m.0.clone(), m)).collect();
        for e in el.0.iter() {
            match fmap.get(e) {
                Some(m) if er.0.contains(&m.1) => {}
                _ => {
                    return internal(format!(
                        "unmatched step ({}, {}) in {lhs} = {rhs}",
                        e.0, e.1
                    ))
                }
            }
        }
        let mut bmap = BTreeMap::new();
        for f in summation::uncovered(&er.0, &fmap) {
            let m = bwd(f)?;
            if m.0 != *f || !el.0.contains(&m.1) {
                return internal(format!(
                    "unmatched step ({}, {}) in {rhs} = {lhs}",
                    f.0, f.1
                ));
            }
            bmap.insert(f.clone(), m);
        }
        Ok(summation::matching_proof(&el, &er, &fmap, &bmap))
    }

    // ---- top level ----

    fn prove_equal(&self, p: &Term, q: &Term) -> Res<Proof> {
        if let Some(pr) = self.lookup(p, q) {
            return Ok(pr);
        }
        if !self.bisim(&Vertex::Term(p.clone()), &Vertex::Term(q.clone()))? {
            return Err(ProveError::NotBisimilar);
        }
        let d = self.depth.get() + 1;
        self.depth.set(d);
        self.max_depth.set(self.max_depth.get().max(d));
        let result = self.prove_equal_inner(p, q);
        self.depth.set(d - 1);
        let proof = result?;
        self.check_size(&proof)?;
        self.remember(p, q, &proof);
        Ok(proof)
    }

    fn prove_equal_inner(&self, p: &Term, q: &Term) -> Res<Proof> {
        let r = if self.s.is_nf(p)? {
            p.clone()
        } else {
            self.s.normalize(p)?
        };
        let left = self.prove_with_nf(&r, p)?;
        let right = self.prove_with_nf(&r, q)?;
        Ok(Proof::trans(Proof::symm(left), right))
    }

    fn prove_with_nf(&self, r: &Term, q: &Term) -> Res<Proof> {
        self.via_next(&Rc::new(Next::Nf(r.clone())), q)
    }

    /// `t = v` where `t` is the term described by `next`.
    fn via_next(&self, next: &Rc<Next>, v: &Term) -> Res<Proof> {
        let t = next.term();
        if let Some(p) = self.lookup(&t, v) {
            return Ok(p);
        }
        let ts = self.s.term_successors(&t);
        let vs = self.s.term_successors(v);
        let mut fwd = Vec::new();
        for (a, x) in ts.iter() {
            let y = self.partner(a, x, &vs)?;
            let pr = self.solve(next, a, x, &y)?;
            fwd.push(((a.clone(), x.clone()), (a.clone(), y), pr));
        }
        let bwd = |f: &Summand| {
            let x = self.partner(&f.0, &f.1, &ts)?;
            let pr = self.solve(next, &f.0, &x, &f.1)?.map(Proof::symm);
            Ok((f.clone(), (f.0.clone(), x), pr))
        };
        let proof = self.match_steps(&t, v, fwd, bwd)?;
        self.remember(&t, v, &proof);
        Ok(proof)
    }

    /// The first step in `steps` on `a` whose target is bisimilar to `x`.
    fn partner(&self, a: &Action, x: &Vertex, steps: &[(Action, Vertex)]) -> Res<Vertex> {
        if steps.iter().any(|(b, y)| b == a && y == x) {
            return Ok(x.clone());
        }
        for (b, y) in steps {
            if b == a && self.bisim(x, y)? {
                return Ok(y.clone());
            }
        }
        Err(ProveError::NotBisimilar)
    }

    // ---- derivative solvers ----

    /// `x = v` for a derivative `x` (on `a`) of the term described by
    /// `next`; `None` when both are `√`.
    fn solve(&self, next: &Rc<Next>, a: &Action, x: &Vertex, v: &Vertex) -> Res<Option<Proof>> {
        let (x, v) = match (x, v) {
            (Vertex::Tick, Vertex::Tick) => return Ok(None),
            (Vertex::Term(x), Vertex::Term(v)) => (x, v),
            _ => return internal("termination mismatch between matched steps"),
        };
        if let Some(p) = self.lookup(x, v) {
            return Ok(Some(p));
        }
        let proof = match &**next {
            Next::Nf(p) => self.nf_step(p, a, x, v)?,
            Next::Ctx(p, r, next_r) => {
                let y = self.context_source(p, r, a, x)?;
                self.ctx_step(p, r, next_r, a, &y, v)?
            }
        };
        self.remember(x, v, &proof);
        Ok(Some(proof))
    }

    /// The step `p -a-> y` with `mult(y, r) ≡ x`.
    fn context_source(&self, p: &Term, r: &Term, a: &Action, x: &Term) -> Res<Vertex> {
        self.s
            .term_successors(p)
            .iter()
            .find(|(b, y)| b == a && &vertex_mult(y, r) == x)
            .map(|(_, y)| y.clone())
            .ok_or_else(|| ProveError::Internal(format!("{x} is not a derivative of {p} . {r}")))
    }

    /// `x = v` for a derivative `x` of the normal form `p`.
    fn nf_step(&self, p: &Term, a: &Action, x: &Term, v: &Term) -> Res<Proof> {
        let xv = Vertex::Term(x.clone());
        match p.kind() {
            TermKind::Zero | TermKind::Act(_) => {
                internal(format!("{x} is not a derivative of {p}"))
            }
            TermKind::Plus(p1, p2) => {
                let side = if self.has_step(p1, a, &xv) { p1 } else { p2 };
                self.nf_step(side, a, x, v)
            }
            TermKind::Mult(p1, p2) => {
                let next = Rc::new(Next::Nf(p2.clone()));
                let y = self.context_source(p1, p2, a, x)?;
                self.ctx_step(p1, p2, &next, a, &y, v)
            }
            TermKind::Star(p1, p2) => {
                let ctx = StarCtx::new(p1.clone(), p2.clone(), Rc::new(Next::Nf(p2.clone())));
                if let Some(u) = self.body_source(p1, p, a, x) {
                    let (ob, conv) = self.derivative_obligation(&ctx, &u);
                    Ok(Proof::trans(conv, self.prove_obl(&ctx, &ob, v)?))
                } else {
                    self.nf_step(p2, a, x, v)
                }
            }
        }
    }

    /// If `x` is produced by the body `p1` of the star `star`, the body
    /// step target it comes from.
    fn body_source(&self, p1: &Term, star: &Term, a: &Action, x: &Term) -> Option<Vertex> {
        if x == star && self.has_step(p1, a, &Vertex::Tick) {
            return Some(Vertex::Tick);
        }
        if let TermKind::Mult(y, tail) = x.kind() {
            let y = Vertex::Term(y.clone());
            if tail == star && self.has_step(p1, a, &y) {
                return Some(y);
            }
        }
        None
    }

    /// `mult(y, r) = v` where `p -a-> y`, `p` is normal in front of `r` and
    /// `next_r` solves the derivatives of `r`.
    fn ctx_step(
        &self,
        p: &Term,
        r: &Term,
        next_r: &Rc<Next>,
        a: &Action,
        y: &Vertex,
        v: &Term,
    ) -> Res<Proof> {
        match p.kind() {
            TermKind::Zero => internal(format!("0 has no steps (context {r})")),
            TermKind::Act(_) => self.via_next(next_r, v),
            TermKind::Plus(p1, p2) => {
                let side = if self.has_step(p1, a, y) { p1 } else { p2 };
                self.ctx_step(side, r, next_r, a, y, v)
            }
            TermKind::Mult(p1, p2) => {
                let inner = Rc::new(Next::Ctx(p2.clone(), r.clone(), next_r.clone()));
                let r2 = Term::mult(p2.clone(), r.clone());
                match y {
                    Vertex::Term(t) if t == p2 && self.has_step(p1, a, &Vertex::Tick) => {
                        self.ctx_step(p1, &r2, &inner, a, &Vertex::Tick, v)
                    }
                    Vertex::Term(t) => match t.kind() {
                        TermKind::Mult(y1, rest) if rest == p2 => Ok(Proof::trans(
                            Proof::b5(y1.clone(), p2.clone(), r.clone()),
                            self.ctx_step(p1, &r2, &inner, a, &Vertex::Term(y1.clone()), v)?,
                        )),
                        _ => internal(format!("{t} is not a derivative of {p}")),
                    },
                    Vertex::Tick => internal(format!("{p} cannot terminate in one step")),
                }
            }
            TermKind::Star(p1, p2) => {
                let body = match y {
                    Vertex::Term(t) => self.body_source(p1, p, a, t),
                    Vertex::Tick => None,
                };
                let Some(u) = body else {
                    return self.ctx_step(p2, r, next_r, a, y, v);
                };
                let exit = Term::mult(p2.clone(), r.clone());
                let next = Rc::new(Next::Ctx(p2.clone(), r.clone(), next_r.clone()));
                let ctx = StarCtx::new(p1.clone(), exit, next);
                // (p1 * p2) . r = p1 * (p2 . r)
                let regroup = Proof::bks2(p1.clone(), p2.clone(), r.clone());
                let into_star = match &u {
                    Vertex::Tick => regroup,
                    Vertex::Term(y1) => Proof::trans(
                        Proof::b5(y1.clone(), p.clone(), r.clone()),
                        Proof::comp_mult(Proof::refl(y1.clone()), regroup),
                    ),
                };
                let (ob, conv) = self.derivative_obligation(&ctx, &u);
                Ok(Proof::chain(
                    vertex_mult(y, r),
                    [into_star, conv, self.prove_obl(&ctx, &ob, v)?],
                ))
            }
        }
    }

    // ---- obligations ----

    /// The obligation for the derivative `mult(u, P)` of a body step, with
    /// a proof of `mult(u, P) = σ(M') . P + σ(N')`.
    fn derivative_obligation(&self, ctx: &StarCtx, u: &Vertex) -> (Obl, Proof) {
        let star = &ctx.star;
        match u {
            Vertex::Tick => {
                let eb = self.expand(&ctx.body);
                let ee = self.expand(&ctx.exit);
                let proof = Proof::trans(
                    Proof::symm(Proof::bks1(ctx.body.clone(), ctx.exit.clone())),
                    Proof::comp_plus(
                        Proof::comp_mult(eb.1.clone(), Proof::refl(star.clone())),
                        ee.1.clone(),
                    ),
                );
                (
                    Obl {
                        m: eb.0.clone(),
                        n: ee.0.clone(),
                    },
                    proof,
                )
            }
            Vertex::Term(t) => {
                let et = self.expand(t);
                let prod = Term::mult(summation::sigma(&et.0), star.clone());
                let proof = Proof::trans(
                    Proof::comp_mult(et.1.clone(), Proof::refl(star.clone())),
                    Proof::symm(Proof::b6(prod)),
                );
                (
                    Obl {
                        m: et.0.clone(),
                        n: SummandSet::new(),
                    },
                    proof,
                )
            }
        }
    }

    /// Steps of an obligation term with their provenance; a step that
    /// arises from both `M` and `N` is attributed to `M`.
    fn obl_steps(&self, ctx: &StarCtx, ob: &Obl) -> Vec<(Summand, Prov)> {
        let mut steps: BTreeMap<Summand, Prov> = BTreeMap::new();
        for (a, u) in ob.m.iter() {
            steps
                .entry((a.clone(), Vertex::Term(vertex_mult(u, &ctx.star))))
                .or_insert_with(|| Prov::M(u.clone()));
        }
        for e in ob.n.iter() {
            steps.entry(e.clone()).or_insert(Prov::N);
        }
        steps.into_iter().collect()
    }

    fn prove_obl(&self, ctx: &StarCtx, ob: &Obl, target: &Term) -> Res<Proof> {
        self.split(ctx, ob, target, &[], &Tail::End)
    }

    /// `S` for a continuation: the product of `factors`, ending in the
    /// obligation term of the tail, if any.
    fn cont_term(&self, ctx: &StarCtx, factors: &[Term], tail: &Tail) -> Option<Term> {
        let mut acc = match tail {
            Tail::End => None,
            Tail::Core(y) => Some(y.term(ctx)),
        };
        for f in factors.iter().rev() {
            acc = Some(match acc {
                None => f.clone(),
                Some(s) => Term::mult(f.clone(), s),
            });
        }
        acc
    }

    /// Splits the obligation's steps between two targets by bisimilarity.
    /// A step matching both sides goes to both.
    fn partition(&self, ctx: &StarCtx, ob: &Obl, targets: [&Term; 2]) -> Res<[Obl; 2]> {
        let succs = targets.map(|t| self.s.term_successors(t));
        let mut parts: [(Vec<Summand>, Vec<Summand>); 2] = Default::default();
        for ((a, x), prov) in self.obl_steps(ctx, ob) {
            let mut placed = false;
            for (succ, part) in succs.iter().zip(parts.iter_mut()) {
                let mut hit = false;
                for (b, y) in succ.iter() {
                    if *b == a && self.bisim(&x, y)? {
                        hit = true;
                        break;
                    }
                }
                if hit {
                    placed = true;
                    match &prov {
                        Prov::M(u) => part.0.push((a.clone(), u.clone())),
                        Prov::N => part.1.push((a.clone(), x.clone())),
                    }
                }
            }
            if !placed {
                return Err(ProveError::NotBisimilar);
            }
        }
        Ok(parts.map(|(m, n)| Obl {
            m: m.into_iter().collect(),
            n: n.into_iter().collect(),
        }))
    }

    /// `X = X1 + X2` when `X1` and `X2` together carry every step of `X`.
    fn rejoin(&self, ctx: &StarCtx, ob: &Obl, parts: &[Obl; 2]) -> Res<Proof> {
        let lhs = ob.term(ctx);
        let rhs = Term::plus(parts[0].term(ctx), parts[1].term(ctx));
        let ident = |e: &Summand| {
            let pr = e.1.as_term().map(|t| Proof::refl(t.clone()));
            (e.clone(), e.clone(), pr)
        };
        let fwd = self.expand(&lhs).0.iter().map(ident).collect();
        self.match_steps(&lhs, &rhs, fwd, |f| Ok(ident(f)))
    }

    /// `σ(M) . P + σ(N) = r . S`, or `= r` when the continuation is empty;
    /// recursion on `r`.
    fn split(
        &self,
        ctx: &StarCtx,
        ob: &Obl,
        r: &Term,
        factors: &[Term],
        tail: &Tail,
    ) -> Res<Proof> {
        let s = self.cont_term(ctx, factors, tail);
        let with_s = |t: &Term| match &s {
            Some(s) => Term::mult(t.clone(), s.clone()),
            None => t.clone(),
        };
        let x = ob.term(ctx);
        let target = with_s(r);
        if let Some(p) = self.lookup(&x, &target) {
            return Ok(p);
        }
        let proof = match r.kind() {
            TermKind::Zero => {
                self.match_steps(&x, &target, Vec::new(), |_| Err(ProveError::NotBisimilar))?
            }
            TermKind::Act(a) => {
                self.split_action(ctx, ob, a, &target, s.as_ref(), factors, tail)?
            }
            TermKind::Plus(r1, r2) => {
                let (t1, t2) = (with_s(r1), with_s(r2));
                let parts = self.partition(ctx, ob, [&t1, &t2])?;
                let joined = Proof::trans(
                    self.rejoin(ctx, ob, &parts)?,
                    Proof::comp_plus(
                        self.split(ctx, &parts[0], r1, factors, tail)?,
                        self.split(ctx, &parts[1], r2, factors, tail)?,
                    ),
                );
                match &s {
                    Some(s) => Proof::trans(
                        joined,
                        Proof::symm(Proof::b4(r1.clone(), r2.clone(), s.clone())),
                    ),
                    None => joined,
                }
            }
            TermKind::Mult(r1, r2) => {
                let mut inner = Vec::with_capacity(factors.len() + 1);
                inner.push(r2.clone());
                inner.extend_from_slice(factors);
                let p = self.split(ctx, ob, r1, &inner, tail)?;
                match &s {
                    Some(s) => {
                        Proof::trans(p, Proof::symm(Proof::b5(r1.clone(), r2.clone(), s.clone())))
                    }
                    None => p,
                }
            }
            TermKind::Star(r1, r2) => {
                // X ↔ r1 . X + Z with Z = r2 . S; solve the recursion with RSP
                let z = with_s(r2);
                let loop_target = Term::mult(r1.clone(), x.clone());
                let parts = self.partition(ctx, ob, [&loop_target, &z])?;
                let unfolded = Proof::trans(
                    self.rejoin(ctx, ob, &parts)?,
                    Proof::comp_plus(
                        self.split(ctx, &parts[0], r1, &[], &Tail::Core(ob.clone()))?,
                        self.split(ctx, &parts[1], r2, factors, tail)?,
                    ),
                );
                let solved = Proof::rsp(unfolded);
                match &s {
                    Some(s) => Proof::trans(
                        solved,
                        Proof::symm(Proof::bks2(r1.clone(), r2.clone(), s.clone())),
                    ),
                    None => solved,
                }
            }
        };
        self.remember(&x, &target, &proof);
        Ok(proof)
    }

    #[allow(clippy::too_many_arguments)]
    fn split_action(
        &self,
        ctx: &StarCtx,
        ob: &Obl,
        a: &Action,
        target: &Term,
        s: Option<&Term>,
        factors: &[Term],
        tail: &Tail,
    ) -> Res<Proof> {
        let rhs_step: Summand = (
            a.clone(),
            s.map_or(Vertex::Tick, |s| Vertex::Term(s.clone())),
        );
        let mut fwd = Vec::new();
        for (step, prov) in self.obl_steps(ctx, ob) {
            if step.0 != *a {
                return Err(ProveError::NotBisimilar);
            }
            let proof = match (s, &prov) {
                (None, Prov::N) if step.1.is_tick() => None,
                (None, _) => return Err(ProveError::NotBisimilar),
                (Some(s), Prov::N) => {
                    self.solve(&ctx.next, a, &step.1, &Vertex::Term(s.clone()))?
                }
                (Some(_), Prov::M(u)) => {
                    let (next_ob, conv) = self.derivative_obligation(ctx, u);
                    let rest = match (factors.split_first(), tail) {
                        (Some((f1, rest)), _) => self.split(ctx, &next_ob, f1, rest, tail)?,
                        (None, Tail::Core(y)) => self.core(ctx, &next_ob, y)?,
                        (None, Tail::End) => return internal("empty continuation"),
                    };
                    Some(Proof::trans(conv, rest))
                }
            };
            fwd.push((step, rhs_step.clone(), proof));
        }
        let Some(first) = fwd.first() else {
            return Err(ProveError::NotBisimilar);
        };
        let back = (rhs_step, first.0.clone(), first.2.clone().map(Proof::symm));
        self.match_steps(&ob.term(ctx), target, fwd, |_| Ok(back.clone()))
    }

    /// Two obligations over the same star: `σ(M) . P + σ(N) = σ(K) . P + σ(L)`.
    fn core(&self, ctx: &StarCtx, x: &Obl, y: &Obl) -> Res<Proof> {
        let (xt, yt) = (x.term(ctx), y.term(ctx));
        if let Some(p) = self.lookup(&xt, &yt) {
            return Ok(p);
        }
        let xs = self.obl_steps(ctx, x);
        let ys = self.obl_steps(ctx, y);
        let mut fwd = Vec::new();
        for (e, pe) in &xs {
            let (f, pf) = self.core_partner(e, pe, &ys)?;
            fwd.push((e.clone(), f.clone(), self.core_teq(ctx, e, pe, f, pf)?));
        }
        let bwd = |f: &Summand| {
            let pf = &ys
                .iter()
                .find(|(g, _)| g == f)
                .expect("step of the obligation")
                .1;
            let (e, pe) = self.core_partner(f, pf, &xs)?;
            Ok((f.clone(), e.clone(), self.core_teq(ctx, f, pf, e, pe)?))
        };
        let proof = self.match_steps(&xt, &yt, fwd, bwd)?;
        self.remember(&xt, &yt, &proof);
        Ok(proof)
    }

    /// A bisimilar partner for `e`, preferring an identical step and then
    /// one of the same provenance.
    fn core_partner<'a>(
        &self,
        e: &Summand,
        pe: &Prov,
        others: &'a [(Summand, Prov)],
    ) -> Res<&'a (Summand, Prov)> {
        if let Some(f) = others.iter().find(|(f, _)| f == e) {
            return Ok(f);
        }
        let mut fallback = None;
        for f in others {
            if f.0 .0 != e.0 || !self.bisim(&e.1, &f.0 .1)? {
                continue;
            }
            if matches!((pe, &f.1), (Prov::M(_), Prov::M(_)) | (Prov::N, Prov::N)) {
                return Ok(f);
            }
            fallback.get_or_insert(f);
        }
        fallback.ok_or(ProveError::NotBisimilar)
    }

    /// Proof that the targets of two matched obligation steps are equal.
    fn core_teq(
        &self,
        ctx: &StarCtx,
        e: &Summand,
        pe: &Prov,
        f: &Summand,
        pf: &Prov,
    ) -> Res<Option<Proof>> {
        if e.1 == f.1 {
            return Ok(e.1.as_term().map(|t| Proof::refl(t.clone())));
        }
        let a = &e.0;
        match (pe, pf) {
            (Prov::N, _) => self.solve(&ctx.next, a, &e.1, &f.1),
            (Prov::M(_), Prov::N) => Ok(self.solve(&ctx.next, a, &f.1, &e.1)?.map(Proof::symm)),
            (Prov::M(u), Prov::M(w)) => match (u, w) {
                (Vertex::Tick, Vertex::Tick) => Ok(Some(Proof::refl(ctx.star.clone()))),
                (Vertex::Term(u), Vertex::Term(w)) => {
                    for t in [u, w] {
                        if t.star_depth() >= ctx.budget {
                            return Err(ProveError::DepthExhausted {
                                term: t.clone(),
                                depth: t.star_depth(),
                                budget: ctx.budget,
                            });
                        }
                    }
                    // u . P ↔ w . P with congr(u, P), congr(w, P) gives u ↔ w
                    let inner = self.prove_equal(u, w)?;
                    Ok(Some(Proof::comp_mult(inner, Proof::refl(ctx.star.clone()))))
                }
                _ => internal(format!(
                    "a reduct of {} loops back to {}",
                    ctx.body, ctx.star
                )),
            },
        }
    }

    /// Builds the internal context for a public obligation.
    fn open(&self, ob: &Obligation) -> Res<(StarCtx, Obl)> {
        let star = Term::star(ob.p.clone(), ob.q.clone());
        if !self.s.is_nf(&star)? {
            return Err(ProveError::InvalidObligation(format!(
                "{star} is not in normal form"
            )));
        }
        if !is_tail_in(self.s, &ob.p, &ob.m)? {
            return Err(ProveError::InvalidObligation(format!(
                "M is not a tail of {}",
                ob.p
            )));
        }
        let qs = self.s.term_successors(&ob.q);
        if ob.n.iter().any(|e| !qs.contains(e)) {
            return Err(ProveError::InvalidObligation(format!(
                "N is not contained in the steps of {}",
                ob.q
            )));
        }
        let ctx = StarCtx::new(ob.p.clone(), ob.q.clone(), Rc::new(Next::Nf(ob.q.clone())));
        let obl = Obl {
            m: ob.m.clone(),
            n: ob.n.clone(),
        };
        Ok((ctx, obl))
    }

    fn require_bisimilar(&self, x: &Term, y: &Term) -> Res<()> {
        if self.bisim(&Vertex::Term(x.clone()), &Vertex::Term(y.clone()))? {
            Ok(())
        } else {
            Err(ProveError::NotBisimilar)
        }
    }
}

fn is_tail_in(s: &Session, p: &Term, m: &SummandSet) -> Result<bool, CapExceeded> {
    if m.is_empty() {
        return Ok(true);
    }
    for v in s.reachable(p)? {
        if let Vertex::Term(t) = &v {
            let steps = s.term_successors(t);
            if m.iter().all(|e| steps.binary_search(e).is_ok()) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

impl Session {
    /// Whether some `q` with `p ->* q` has every step in `m`.
    pub fn is_tail(&self, p: &Term, m: &SummandSet) -> Result<bool, CapExceeded> {
        is_tail_in(self, p, m)
    }

    /// A certificate for `p = q`, or `NotBisimilar`.
    pub fn prove_equal(&self, p: &Term, q: &Term) -> Result<Proof, ProveError> {
        Ok(self.prove_equal_with_stats(p, q)?.0)
    }

    pub fn prove_equal_with_stats(
        &self,
        p: &Term,
        q: &Term,
    ) -> Result<(Proof, ProveStats), ProveError> {
        let e = Engine::new(self);
        let proof = e.prove_equal(p, q)?;
        let stats = ProveStats {
            nodes: proof.node_count(),
            recursion_depth: e.max_depth.get(),
        };
        Ok((proof, stats))
    }

    /// A certificate for `r = q` where `r` is in normal form.
    pub fn prove_with_nf(&self, r: &Term, q: &Term) -> Result<Proof, ProveError> {
        if !self.is_nf(r)? {
            return Err(ProveError::InvalidObligation(format!(
                "{r} is not in normal form"
            )));
        }
        let e = Engine::new(self);
        e.require_bisimilar(r, q)?;
        let proof = e.prove_with_nf(r, q)?;
        e.check_size(&proof)?;
        Ok(proof)
    }

    /// A certificate for `σ(M) . (p * q) + σ(N) = target`.
    pub fn prove_obligation(&self, ob: &Obligation) -> Result<Proof, ProveError> {
        let e = Engine::new(self);
        let (ctx, obl) = e.open(ob)?;
        e.require_bisimilar(&ob.term(), &ob.target)?;
        let proof = e.prove_obl(&ctx, &obl, &ob.target)?;
        e.check_size(&proof)?;
        Ok(proof)
    }

    /// A certificate for `σ(M) . (p * q) + σ(N) = r . s`.
    pub fn prove_split(&self, ob: &Obligation, r: &Term, s: &Term) -> Result<Proof, ProveError> {
        let e = Engine::new(self);
        let (ctx, obl) = e.open(ob)?;
        e.require_bisimilar(&ob.term(), &Term::mult(r.clone(), s.clone()))?;
        let proof = e.split(&ctx, &obl, r, std::slice::from_ref(s), &Tail::End)?;
        e.check_size(&proof)?;
        Ok(proof)
    }

    /// A certificate equating two obligations over the same star.
    pub fn prove_core(&self, x: &Obligation, y: &Obligation) -> Result<Proof, ProveError> {
        if (&x.p, &x.q) != (&y.p, &y.q) {
            return Err(ProveError::InvalidObligation(
                "obligations over different stars".into(),
            ));
        }
        let e = Engine::new(self);
        let (ctx, xo) = e.open(x)?;
        let (_, yo) = e.open(y)?;
        e.require_bisimilar(&x.term(), &y.term())?;
        let proof = e.core(&ctx, &xo, &yo)?;
        e.check_size(&proof)?;
        Ok(proof)
    }

    /// Checks, over a finite sample of candidate terms, that every
    /// derivative of `p` is provably equal to each bisimilar candidate.
    pub fn next_provable(&self, p: &Term, universe: &[Term]) -> Result<bool, ProveError> {
        for (_, u) in self.term_successors(p).iter() {
            let Vertex::Term(u) = u else { continue };
            for v in universe {
                if self.bisimilar_terms(u, v)? && self.prove_equal(u, v).is_err() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn is_tail(p: &Term, m: &SummandSet) -> Result<bool, CapExceeded> {
    Session::new().is_tail(p, m)
}

pub fn prove_equal(p: &Term, q: &Term) -> Result<Proof, ProveError> {
    Session::new().prove_equal(p, q)
}

pub fn prove_with_nf(r: &Term, q: &Term) -> Result<Proof, ProveError> {
    Session::new().prove_with_nf(r, q)
}

pub fn prove_obligation(ob: &Obligation) -> Result<Proof, ProveError> {
    Session::new().prove_obligation(ob)
}

pub fn prove_split(ob: &Obligation, r: &Term, s: &Term) -> Result<Proof, ProveError> {
    Session::new().prove_split(ob, r, s)
}

pub fn prove_core(x: &Obligation, y: &Obligation) -> Result<Proof, ProveError> {
    Session::new().prove_core(x, y)
}

pub fn next_provable(p: &Term, universe: &[Term]) -> Result<bool, ProveError> {
    Session::new().next_provable(p, universe)
}
