//! The term algebra: actions, 1-free star expressions and vertices.
//!
//! Terms are immutable, reference counted trees. Every node caches its
//! structural hash, size and star depth, so equality, hashing and the depth
//! measure are cheap on the large composite terms built by the proof engine.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// An action label. Any identifier is an action; the alphabet is open.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(Arc<str>);

impl Action {
    /// Creates an action without validating the identifier syntax.
    pub fn new(name: &str) -> Action {
        Action(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Whether `name` is a valid action identifier: a lowercase ASCII letter
    /// followed by ASCII letters, digits or underscores.
    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The shape of a term node. Variant order is the constructor rank used by
/// the total term order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TermKind {
    Zero,
    Act(Action),
    Plus(Term, Term),
    Mult(Term, Term),
    /// Binary Kleene star `l * r`.
    Star(Term, Term),
}

struct Node {
    kind: TermKind,
    hash: u64,
    size: usize,
    depth: usize,
}

/// A closed 1-free star expression.
#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    fn from_kind(kind: TermKind) -> Term {
        let mut h = DefaultHasher::new();
        let (size, depth) = match &kind {
            TermKind::Zero => {
                0u8.hash(&mut h);
                (1, 0)
            }
            TermKind::Act(a) => {
                1u8.hash(&mut h);
                a.hash(&mut h);
                (1, 0)
            }
            TermKind::Plus(l, r) => {
                2u8.hash(&mut h);
                h.write_u64(l.0.hash);
                h.write_u64(r.0.hash);
                (1 + l.size() + r.size(), l.star_depth().max(r.star_depth()))
            }
            TermKind::Mult(l, r) => {
                3u8.hash(&mut h);
                h.write_u64(l.0.hash);
                h.write_u64(r.0.hash);
                (1 + l.size() + r.size(), l.star_depth().max(r.star_depth()))
            }
            TermKind::Star(l, r) => {
                4u8.hash(&mut h);
                h.write_u64(l.0.hash);
                h.write_u64(r.0.hash);
                (
                    1 + l.size() + r.size(),
                    (1 + l.star_depth()).max(r.star_depth()),
                )
            }
        };
        Term(Arc::new(Node {
            kind,
            hash: h.finish(),
            size,
            depth,
        }))
    }

    pub fn zero() -> Term {
        Term::from_kind(TermKind::Zero)
    }

    pub fn act(name: &str) -> Term {
        Term::from_kind(TermKind::Act(Action::new(name)))
    }

    pub fn action(a: Action) -> Term {
        Term::from_kind(TermKind::Act(a))
    }

    pub fn plus(l: Term, r: Term) -> Term {
        Term::from_kind(TermKind::Plus(l, r))
    }

    pub fn mult(l: Term, r: Term) -> Term {
        Term::from_kind(TermKind::Mult(l, r))
    }

    pub fn star(l: Term, r: Term) -> Term {
        Term::from_kind(TermKind::Star(l, r))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        self.0.size
    }

    /// Nesting depth of the binary star:
    /// `d(0) = d(a) = 0`, `d(p+q) = d(p.q) = max(d(p), d(q))`,
    /// `d(p*q) = max(1 + d(p), d(q))`.
    pub fn star_depth(&self) -> usize {
        self.0.depth
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind(), TermKind::Zero)
    }

    /// Total order: constructor rank, then children (or action names)
    /// lexicographically.
    pub fn term_order(&self, other: &Term) -> Ordering {
        self.cmp(other)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.kind == other.0.kind)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", crate::syntax::render(self))
    }
}

/// A state of the transition system: a term or the termination symbol.
/// `Tick` sorts before every term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Tick,
    Term(Term),
}

impl Vertex {
    pub fn is_tick(&self) -> bool {
        matches!(self, Vertex::Tick)
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            Vertex::Tick => None,
            Vertex::Term(t) => Some(t),
        }
    }
}

impl From<Term> for Vertex {
    fn from(t: Term) -> Vertex {
        Vertex::Term(t)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Tick => f.write_str("TICK"),
            Vertex::Term(t) => t.fmt(f),
        }
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Tick => f.write_str("√"),
            Vertex::Term(t) => t.fmt(f),
        }
    }
}

/// Shorthand for the star depth of a term.
pub fn star_depth(t: &Term) -> usize {
    t.star_depth()
}

/// Shorthand for [`Term::term_order`].
pub fn term_order(t: &Term, u: &Term) -> Ordering {
    t.term_order(u)
}
