//! Equational certificates and their checker.
//!
//! A certificate is a derivation tree in the axiom system
//!
//! ```text
//! B1   x + y = y + x                 B6   x + 0 = x
//! B2   (x + y) + z = x + (y + z)     B7   0 . x = 0
//! B3   x + x = x                     BKS1 x . (x * y) + y = x * y
//! B4   (x + y) . z = x . z + y . z   BKS2 (x * y) . z = x * (y . z)
//! B5   (x . y) . z = x . (y . z)     RSP  x = y . x + z  implies  x = y * z
//! ```
//!
//! closed under reflexivity, symmetry, transitivity and congruence. The
//! checker computes the conclusion of a tree bottom-up; callers compare it
//! with whatever they expect.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::syntax::{self, SyntaxError};
use crate::term::{Term, TermKind};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ProofNode {
    Refl(Term),
    Symm(Proof),
    Trans(Proof, Proof),
    CompPlus(Proof, Proof),
    CompMult(Proof, Proof),
    CompStar(Proof, Proof),
    B1(Term, Term),
    B2(Term, Term, Term),
    B3(Term),
    B4(Term, Term, Term),
    B5(Term, Term, Term),
    B6(Term),
    B7(Term),
    Bks1(Term, Term),
    Bks2(Term, Term, Term),
    Rsp(Proof),
}

/// A shared, immutable derivation tree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Proof(Arc<ProofNode>);

/// The equation a certificate derives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Conclusion {
    pub lhs: Term,
    pub rhs: Term,
}

impl Conclusion {
    pub fn new(lhs: Term, rhs: Term) -> Conclusion {
        Conclusion { lhs, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ill-formed certificate at {}: {reason}", fmt_path(.path))]
pub struct IllFormed {
    pub reason: String,
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
}

fn fmt_path(path: &[usize]) -> String {
    let mut s = String::from("root");
    for i in path {
        let _ = write!(s, ".{i}");
    }
    s
}

fn placeholder() -> Proof {
    static P: OnceLock<Proof> = OnceLock::new();
    P.get_or_init(|| Proof(Arc::new(ProofNode::B3(Term::zero()))))
        .clone()
}

impl ProofNode {
    fn children(&self) -> Vec<&Proof> {
        match self {
            ProofNode::Symm(p) | ProofNode::Rsp(p) => vec![p],
            ProofNode::Trans(p, q)
            | ProofNode::CompPlus(p, q)
            | ProofNode::CompMult(p, q)
            | ProofNode::CompStar(p, q) => vec![p, q],
            _ => Vec::new(),
        }
    }

    fn take_children(&mut self, out: &mut Vec<Proof>) {
        match self {
            ProofNode::Symm(p) | ProofNode::Rsp(p) => out.push(std::mem::replace(p, placeholder())),
            ProofNode::Trans(p, q)
            | ProofNode::CompPlus(p, q)
            | ProofNode::CompMult(p, q)
            | ProofNode::CompStar(p, q) => {
                out.push(std::mem::replace(p, placeholder()));
                out.push(std::mem::replace(q, placeholder()));
            }
            _ => {}
        }
    }
}

// Long transitivity chains would otherwise be dropped recursively.
impl Drop for ProofNode {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        self.take_children(&mut stack);
        while let Some(p) = stack.pop() {
            if let Ok(mut node) = Arc::try_unwrap(p.0) {
                node.take_children(&mut stack);
            }
        }
    }
}

impl Proof {
    pub fn new(node: ProofNode) -> Proof {
        Proof(Arc::new(node))
    }

    pub fn node(&self) -> &ProofNode {
        &self.0
    }

    pub fn refl(t: Term) -> Proof {
        Proof::new(ProofNode::Refl(t))
    }

    pub fn is_refl(&self) -> bool {
        matches!(self.node(), ProofNode::Refl(_))
    }

    /// `Symm`, collapsing double symmetry and symmetric reflexivity.
    pub fn symm(p: Proof) -> Proof {
        match p.node() {
            ProofNode::Refl(_) => p,
            ProofNode::Symm(q) => q.clone(),
            _ => Proof::new(ProofNode::Symm(p)),
        }
    }

    /// `Trans`, dropping reflexive halves. Only sound to use when the
    /// dropped half is a reflexivity step on the shared middle term.
    pub fn trans(p: Proof, q: Proof) -> Proof {
        if p.is_refl() {
            return q;
        }
        if q.is_refl() {
            return p;
        }
        Proof::new(ProofNode::Trans(p, q))
    }

    /// Chains `steps` left to right with [`Proof::trans`]; `start` is the
    /// reflexive proof used when `steps` is empty.
    pub fn chain(start: Term, steps: impl IntoIterator<Item = Proof>) -> Proof {
        steps.into_iter().fold(Proof::refl(start), Proof::trans)
    }

    pub fn comp_plus(p: Proof, q: Proof) -> Proof {
        Proof::new(ProofNode::CompPlus(p, q))
    }

    pub fn comp_mult(p: Proof, q: Proof) -> Proof {
        Proof::new(ProofNode::CompMult(p, q))
    }

    pub fn comp_star(p: Proof, q: Proof) -> Proof {
        Proof::new(ProofNode::CompStar(p, q))
    }

    pub fn b1(x: Term, y: Term) -> Proof {
        Proof::new(ProofNode::B1(x, y))
    }

    pub fn b2(x: Term, y: Term, z: Term) -> Proof {
        Proof::new(ProofNode::B2(x, y, z))
    }

    pub fn b3(x: Term) -> Proof {
        Proof::new(ProofNode::B3(x))
    }

    pub fn b4(x: Term, y: Term, z: Term) -> Proof {
        Proof::new(ProofNode::B4(x, y, z))
    }

    pub fn b5(x: Term, y: Term, z: Term) -> Proof {
        Proof::new(ProofNode::B5(x, y, z))
    }

    pub fn b6(x: Term) -> Proof {
        Proof::new(ProofNode::B6(x))
    }

    pub fn b7(x: Term) -> Proof {
        Proof::new(ProofNode::B7(x))
    }

    pub fn bks1(x: Term, y: Term) -> Proof {
        Proof::new(ProofNode::Bks1(x, y))
    }

    pub fn bks2(x: Term, y: Term, z: Term) -> Proof {
        Proof::new(ProofNode::Bks2(x, y, z))
    }

    pub fn rsp(p: Proof) -> Proof {
        Proof::new(ProofNode::Rsp(p))
    }

    /// Number of nodes of the tree, counting shared subtrees once per
    /// occurrence. Saturates at `u64::MAX`.
    pub fn node_count(&self) -> u64 {
        let mut memo: HashMap<*const ProofNode, u64> = HashMap::new();
        let mut stack: Vec<(&Proof, bool)> = vec![(self, false)];
        while let Some((p, expanded)) = stack.pop() {
            let key = Arc::as_ptr(&p.0);
            if memo.contains_key(&key) {
                continue;
            }
            let children = p.node().children();
            if expanded {
                let n = children
                    .iter()
                    .fold(1u64, |acc, c| acc.saturating_add(memo[&Arc::as_ptr(&c.0)]));
                memo.insert(key, n);
            } else {
                stack.push((p, true));
                for c in children {
                    stack.push((c, false));
                }
            }
        }
        memo[&Arc::as_ptr(&self.0)]
    }

    /// Height of the tree.
    pub fn height(&self) -> usize {
        let mut memo: HashMap<*const ProofNode, usize> = HashMap::new();
        let mut stack: Vec<(&Proof, bool)> = vec![(self, false)];
        while let Some((p, expanded)) = stack.pop() {
            let key = Arc::as_ptr(&p.0);
            if memo.contains_key(&key) {
                continue;
            }
            let children = p.node().children();
            if expanded {
                let h = 1 + children
                    .iter()
                    .map(|c| memo[&Arc::as_ptr(&c.0)])
                    .max()
                    .unwrap_or(0);
                memo.insert(key, h);
            } else {
                stack.push((p, true));
                for c in children {
                    stack.push((c, false));
                }
            }
        }
        memo[&Arc::as_ptr(&self.0)]
    }
}

impl std::fmt::Debug for Proof {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&serialize(self))
    }
}

fn axiom(node: &ProofNode) -> Option<Conclusion> {
    use ProofNode::*;
    let c = |l, r| Some(Conclusion::new(l, r));
    match node {
        Refl(x) => c(x.clone(), x.clone()),
        B1(x, y) => c(
            Term::plus(x.clone(), y.clone()),
            Term::plus(y.clone(), x.clone()),
        ),
        B2(x, y, z) => c(
            Term::plus(Term::plus(x.clone(), y.clone()), z.clone()),
            Term::plus(x.clone(), Term::plus(y.clone(), z.clone())),
        ),
        B3(x) => c(Term::plus(x.clone(), x.clone()), x.clone()),
        B4(x, y, z) => c(
            Term::mult(Term::plus(x.clone(), y.clone()), z.clone()),
            Term::plus(
                Term::mult(x.clone(), z.clone()),
                Term::mult(y.clone(), z.clone()),
            ),
        ),
        B5(x, y, z) => c(
            Term::mult(Term::mult(x.clone(), y.clone()), z.clone()),
            Term::mult(x.clone(), Term::mult(y.clone(), z.clone())),
        ),
        B6(x) => c(Term::plus(x.clone(), Term::zero()), x.clone()),
        B7(x) => c(Term::mult(Term::zero(), x.clone()), Term::zero()),
        Bks1(x, y) => {
            let s = Term::star(x.clone(), y.clone());
            c(Term::plus(Term::mult(x.clone(), s.clone()), y.clone()), s)
        }
        Bks2(x, y, z) => c(
            Term::mult(Term::star(x.clone(), y.clone()), z.clone()),
            Term::star(x.clone(), Term::mult(y.clone(), z.clone())),
        ),
        _ => None,
    }
}

fn combine(node: &ProofNode, kids: &[&Conclusion]) -> Result<Conclusion, String> {
    use ProofNode::*;
    match node {
        Symm(_) => Ok(Conclusion::new(kids[0].rhs.clone(), kids[0].lhs.clone())),
        Trans(..) => {
            if kids[0].rhs != kids[1].lhs {
                return Err(format!(
                    "transitivity mismatch: `{}` vs `{}`",
                    kids[0].rhs, kids[1].lhs
                ));
            }
            Ok(Conclusion::new(kids[0].lhs.clone(), kids[1].rhs.clone()))
        }
        CompPlus(..) => Ok(Conclusion::new(
            Term::plus(kids[0].lhs.clone(), kids[1].lhs.clone()),
            Term::plus(kids[0].rhs.clone(), kids[1].rhs.clone()),
        )),
        CompMult(..) => Ok(Conclusion::new(
            Term::mult(kids[0].lhs.clone(), kids[1].lhs.clone()),
            Term::mult(kids[0].rhs.clone(), kids[1].rhs.clone()),
        )),
        CompStar(..) => Ok(Conclusion::new(
            Term::star(kids[0].lhs.clone(), kids[1].lhs.clone()),
            Term::star(kids[0].rhs.clone(), kids[1].rhs.clone()),
        )),
        Rsp(_) => {
            let x = &kids[0].lhs;
            if let TermKind::Plus(yx, z) = kids[0].rhs.kind() {
                if let TermKind::Mult(y, x2) = yx.kind() {
                    if x2 == x {
                        return Ok(Conclusion::new(x.clone(), Term::star(y.clone(), z.clone())));
                    }
                }
            }
            Err(format!(
                "RSP premise `{} = {}` is not of the form x = y . x + z",
                kids[0].lhs, kids[0].rhs
            ))
        }
        _ => unreachable!("axioms have no premises"),
    }
}

/// Computes the equation derived by `proof`, or reports the first ill-formed
/// node. Runs in time linear in the number of distinct nodes.
pub fn conclusion(proof: &Proof) -> Result<Conclusion, IllFormed> {
    let mut memo: HashMap<*const ProofNode, Conclusion> = HashMap::new();
    // (node, parent visit, child index) per visit, so paths are only built on failure
    let mut visits: Vec<(&Proof, usize, usize)> = vec![(proof, usize::MAX, 0)];
    let mut stack: Vec<(usize, bool)> = vec![(0, false)];
    while let Some((v, expanded)) = stack.pop() {
        let p = visits[v].0;
        let key = Arc::as_ptr(&p.0);
        if memo.contains_key(&key) {
            continue;
        }
        if let Some(c) = axiom(p.node()) {
            memo.insert(key, c);
            continue;
        }
        let children = p.node().children();
        if expanded {
            let kids: Vec<&Conclusion> =
                children.iter().map(|c| &memo[&Arc::as_ptr(&c.0)]).collect();
            let c = combine(p.node(), &kids).map_err(|reason| IllFormed {
                reason,
                path: visit_path(&visits, v),
            })?;
            memo.insert(key, c);
        } else {
            stack.push((v, true));
            for (i, c) in children.into_iter().enumerate().rev() {
                visits.push((c, v, i));
                stack.push((visits.len() - 1, false));
            }
        }
    }
    Ok(memo
        .remove(&Arc::as_ptr(&proof.0))
        .expect("root conclusion"))
}

fn visit_path(visits: &[(&Proof, usize, usize)], mut v: usize) -> Vec<usize> {
    let mut path = Vec::new();
    while visits[v].1 != usize::MAX {
        path.push(visits[v].2);
        v = visits[v].1;
    }
    path.reverse();
    path
}

/// Checks that `proof` is well formed and derives exactly `lhs = rhs`.
pub fn check(proof: &Proof, lhs: &Term, rhs: &Term) -> Result<bool, IllFormed> {
    let c = conclusion(proof)?;
    Ok(&c.lhs == lhs && &c.rhs == rhs)
}

fn keyword(node: &ProofNode) -> &'static str {
    use ProofNode::*;
    match node {
        Refl(_) => "refl",
        Symm(_) => "symm",
        Trans(..) => "trans",
        CompPlus(..) => "comp-plus",
        CompMult(..) => "comp-mult",
        CompStar(..) => "comp-star",
        B1(..) => "b1",
        B2(..) => "b2",
        B3(_) => "b3",
        B4(..) => "b4",
        B5(..) => "b5",
        B6(_) => "b6",
        B7(_) => "b7",
        Bks1(..) => "bks1",
        Bks2(..) => "bks2",
        Rsp(_) => "rsp",
    }
}

fn term_args(node: &ProofNode) -> Vec<&Term> {
    use ProofNode::*;
    match node {
        Refl(x) | B3(x) | B6(x) | B7(x) => vec![x],
        B1(x, y) | Bks1(x, y) => vec![x, y],
        B2(x, y, z) | B4(x, y, z) | B5(x, y, z) | Bks2(x, y, z) => vec![x, y, z],
        _ => Vec::new(),
    }
}

fn write_term_arg(out: &mut String, t: &Term) {
    match t.kind() {
        TermKind::Zero | TermKind::Act(_) => out.push_str(&syntax::render(t)),
        _ => {
            out.push('(');
            out.push_str(&syntax::render(t));
            out.push(')');
        }
    }
}

/// Canonical s-expression form, e.g. `(trans (b3 a) (refl a))`.
pub fn serialize(proof: &Proof) -> String {
    enum Item<'a> {
        Open(&'a Proof),
        Text(&'static str),
    }
    let mut out = String::new();
    let mut stack = vec![Item::Open(proof)];
    while let Some(item) = stack.pop() {
        match item {
            Item::Text(s) => out.push_str(s),
            Item::Open(p) => {
                out.push('(');
                out.push_str(keyword(p.node()));
                for t in term_args(p.node()) {
                    out.push(' ');
                    write_term_arg(&mut out, t);
                }
                stack.push(Item::Text(")"));
                for c in p.node().children().into_iter().rev() {
                    stack.push(Item::Open(c));
                    stack.push(Item::Text(" "));
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Arg {
    T,
    P,
}

fn signature(kw: &str) -> Option<&'static [Arg]> {
    use Arg::*;
    Some(match kw {
        "refl" | "b3" | "b6" | "b7" => &[T],
        "symm" | "rsp" => &[P],
        "trans" | "comp-plus" | "comp-mult" | "comp-star" => &[P, P],
        "b1" | "bks1" => &[T, T],
        "b2" | "b4" | "b5" | "bks2" => &[T, T, T],
        _ => return None,
    })
}

fn build(kw: &str, mut terms: Vec<Term>, mut proofs: Vec<Proof>) -> Proof {
    let mut t = || terms.remove(0);
    let node = match kw {
        "refl" => ProofNode::Refl(t()),
        "b3" => ProofNode::B3(t()),
        "b6" => ProofNode::B6(t()),
        "b7" => ProofNode::B7(t()),
        "b1" => ProofNode::B1(t(), t()),
        "bks1" => ProofNode::Bks1(t(), t()),
        "b2" => ProofNode::B2(t(), t(), t()),
        "b4" => ProofNode::B4(t(), t(), t()),
        "b5" => ProofNode::B5(t(), t(), t()),
        "bks2" => ProofNode::Bks2(t(), t(), t()),
        _ => {
            let mut p = || proofs.remove(0);
            match kw {
                "symm" => ProofNode::Symm(p()),
                "rsp" => ProofNode::Rsp(p()),
                "trans" => ProofNode::Trans(p(), p()),
                "comp-plus" => ProofNode::CompPlus(p(), p()),
                "comp-mult" => ProofNode::CompMult(p(), p()),
                "comp-star" => ProofNode::CompStar(p(), p()),
                _ => unreachable!("keyword validated by signature"),
            }
        }
    };
    Proof::new(node)
}

struct Frame {
    kw: String,
    sig: &'static [Arg],
    terms: Vec<Term>,
    proofs: Vec<Proof>,
}

impl Frame {
    fn filled(&self) -> usize {
        self.terms.len() + self.proofs.len()
    }
}

/// Parses the s-expression form produced by [`serialize`]. Whitespace
/// between tokens is free.
pub fn parse_proof(text: &str) -> Result<Proof, SyntaxError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut frames: Vec<Frame> = Vec::new();
    let mut result: Option<Proof> = None;
    let skip_ws = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_ws(&mut i);
        if result.is_some() {
            if i < bytes.len() {
                return Err(SyntaxError::new(i, "trailing input after certificate"));
            }
            return Ok(result.take().expect("checked"));
        }
        if i >= bytes.len() {
            return Err(SyntaxError::new(i, "unexpected end of certificate"));
        }
        let expect = frames.last().map(|f| f.sig.get(f.filled()).copied());
        match expect {
            // top level, or a proof argument
            None | Some(Some(Arg::P)) => {
                if bytes[i] != b'(' {
                    return Err(SyntaxError::new(i, "expected '('"));
                }
                i += 1;
                skip_ws(&mut i);
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'-') {
                    i += 1;
                }
                let kw = &text[start..i];
                let sig = signature(kw)
                    .ok_or_else(|| SyntaxError::new(start, format!("unknown rule {kw:?}")))?;
                frames.push(Frame {
                    kw: kw.to_string(),
                    sig,
                    terms: Vec::new(),
                    proofs: Vec::new(),
                });
            }
            Some(Some(Arg::T)) => {
                let start = i;
                let inner = if bytes[i] == b'(' {
                    let mut depth = 0usize;
                    loop {
                        if i >= bytes.len() {
                            return Err(SyntaxError::new(start, "unbalanced parentheses in term"));
                        }
                        match bytes[i] {
                            b'(' => depth += 1,
                            b')' => {
                                depth -= 1;
                                if depth == 0 {
                                    i += 1;
                                    break;
                                }
                            }
                            _ => {}
                        }
                        i += 1;
                    }
                    &text[start..i]
                } else {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    &text[start..i]
                };
                if inner.is_empty() {
                    return Err(SyntaxError::new(start, "expected a term"));
                }
                let t =
                    syntax::parse(inner).map_err(|e| SyntaxError::new(start + e.pos, e.message))?;
                frames.last_mut().expect("frame").terms.push(t);
            }
            // all arguments present
            Some(None) => {
                if bytes[i] != b')' {
                    return Err(SyntaxError::new(i, "expected ')'"));
                }
                i += 1;
                let f = frames.pop().expect("frame");
                let p = build(&f.kw, f.terms, f.proofs);
                match frames.last_mut() {
                    Some(parent) => parent.proofs.push(p),
                    None => result = Some(p),
                }
            }
        }
    }
}
