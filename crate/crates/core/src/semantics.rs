//! Structural operational semantics and reachability.
//!
//! The transition relation is generated by eight rules:
//!
//! ```text
//!  a -a-> √
//!  p -a-> v  ==>  p+q -a-> v           q -a-> v  ==>  p+q -a-> v
//!  p -a-> p' ==>  p.q -a-> p'.q        p -a-> √  ==>  p.q -a-> q
//!  p -a-> p' ==>  p*q -a-> p'.(p*q)    p -a-> √  ==>  p*q -a-> p*q
//!  q -a-> v  ==>  p*q -a-> v
//! ```

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::session::{CapExceeded, Session, Successors};
use crate::term::{Action, Term, TermKind, Vertex};

/// A single labelled step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: Vertex,
    pub label: Action,
    pub target: Vertex,
}

fn term_steps(t: &Term, out: &mut BTreeSet<(Action, Vertex)>) {
    match t.kind() {
        TermKind::Zero => {}
        TermKind::Act(a) => {
            out.insert((a.clone(), Vertex::Tick));
        }
        TermKind::Plus(p, q) => {
            term_steps(p, out);
            term_steps(q, out);
        }
        TermKind::Mult(p, q) => {
            let mut left = BTreeSet::new();
            term_steps(p, &mut left);
            for (a, v) in left {
                match v {
                    Vertex::Tick => out.insert((a, Vertex::Term(q.clone()))),
                    Vertex::Term(p1) => out.insert((a, Vertex::Term(Term::mult(p1, q.clone())))),
                };
            }
        }
        TermKind::Star(p, q) => {
            let mut body = BTreeSet::new();
            term_steps(p, &mut body);
            for (a, v) in body {
                match v {
                    Vertex::Tick => out.insert((a, Vertex::Term(t.clone()))),
                    Vertex::Term(p1) => out.insert((a, Vertex::Term(Term::mult(p1, t.clone())))),
                };
            }
            term_steps(q, out);
        }
    }
}

/// All `(a, u)` with `v -a-> u`, sorted and duplicate free. Not memoized.
pub fn successors(v: &Vertex) -> Vec<(Action, Vertex)> {
    match v {
        Vertex::Tick => Vec::new(),
        Vertex::Term(t) => {
            let mut out = BTreeSet::new();
            term_steps(t, &mut out);
            out.into_iter().collect()
        }
    }
}

/// The reachable fragment of a term, materialized.
///
/// Term states are numbered breadth first from the root; the successors of a
/// state are discovered in vertex order. `√`, when reachable, is the last
/// state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    pub states: Vec<Vertex>,
    /// `(source, label, target)` as indices into `states`.
    pub transitions: Vec<(usize, Action, usize)>,
    pub root: usize,
}

impl Lts {
    pub fn transition(&self, i: usize) -> Transition {
        let (s, a, t) = &self.transitions[i];
        Transition {
            source: self.states[*s].clone(),
            label: a.clone(),
            target: self.states[*t].clone(),
        }
    }

    /// Plain-text dump: a state table `<index> <term>` followed by one line
    /// per transition `<index> <action> <index-or-TICK>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.states.iter().enumerate() {
            if let Vertex::Term(t) = s {
                let _ = writeln!(out, "{i} {t}");
            }
        }
        for (s, a, t) in &self.transitions {
            match &self.states[*t] {
                Vertex::Tick => {
                    let _ = writeln!(out, "{s} {a} TICK");
                }
                Vertex::Term(_) => {
                    let _ = writeln!(out, "{s} {a} {t}");
                }
            }
        }
        out
    }
}

impl Session {
    /// Memoized [`successors`].
    pub fn successors(&self, v: &Vertex) -> Successors {
        let t = match v {
            Vertex::Tick => return Arc::from(Vec::new()),
            Vertex::Term(t) => t,
        };
        if let Some(s) = self.succ.borrow().get(t) {
            return s.clone();
        }
        let s: Successors = Arc::from(successors(v));
        self.succ.borrow_mut().insert(t.clone(), s.clone());
        s
    }

    pub fn term_successors(&self, t: &Term) -> Successors {
        self.successors(&Vertex::Term(t.clone()))
    }

    /// Breadth-first enumeration of everything reachable from `roots`.
    pub(crate) fn explore(&self, roots: &[Vertex]) -> Result<Vec<Vertex>, CapExceeded> {
        let limit = self.limits().max_states;
        let mut seen: HashSet<Vertex> = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for r in roots {
            if seen.insert(r.clone()) {
                order.push(r.clone());
                queue.push_back(r.clone());
            }
        }
        while let Some(v) = queue.pop_front() {
            let succ = self.successors(&v);
            let mut targets: Vec<&Vertex> = succ.iter().map(|(_, u)| u).collect();
            targets.sort();
            targets.dedup();
            for u in targets {
                if !seen.contains(u) {
                    if seen.len() >= limit {
                        return Err(CapExceeded { limit });
                    }
                    seen.insert(u.clone());
                    order.push(u.clone());
                    queue.push_back(u.clone());
                }
            }
        }
        Ok(order)
    }

    /// The least set containing `p` and closed under steps (includes `√`
    /// when some path terminates).
    pub fn reachable(&self, p: &Term) -> Result<BTreeSet<Vertex>, CapExceeded> {
        Ok(self
            .explore(&[Vertex::Term(p.clone())])?
            .into_iter()
            .collect())
    }

    /// Terms reachable from `p` in one or more steps, in breadth-first order.
    pub fn reachable_plus(&self, p: &Term) -> Result<Arc<[Term]>, CapExceeded> {
        if let Some(r) = self.reach_plus.borrow().get(p) {
            return Ok(r.clone());
        }
        let roots: Vec<Vertex> = {
            let mut targets: Vec<Vertex> = self
                .term_successors(p)
                .iter()
                .map(|(_, u)| u.clone())
                .collect();
            targets.sort();
            targets.dedup();
            targets
        };
        let all = self.explore(&roots)?;
        let terms: Arc<[Term]> = all
            .into_iter()
            .filter_map(|v| v.as_term().cloned())
            .collect();
        self.reach_plus
            .borrow_mut()
            .insert(p.clone(), terms.clone());
        Ok(terms)
    }

    /// Materializes the reachable fragment of `p`.
    pub fn build_lts(&self, p: &Term) -> Result<Lts, CapExceeded> {
        let mut states = self.explore(&[Vertex::Term(p.clone())])?;
        // move √ to the end so term states are numbered contiguously
        if let Some(i) = states.iter().position(Vertex::is_tick) {
            states.remove(i);
            states.push(Vertex::Tick);
        }
        let index: HashMap<&Vertex, usize> =
            states.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut transitions = Vec::new();
        for (i, v) in states.iter().enumerate() {
            for (a, u) in self.successors(v).iter() {
                transitions.push((i, a.clone(), index[u]));
            }
        }
        Ok(Lts {
            states,
            transitions,
            root: 0,
        })
    }
}

pub fn reachable(p: &Term) -> Result<BTreeSet<Vertex>, CapExceeded> {
    Session::new().reachable(p)
}

pub fn reachable_plus(p: &Term) -> Result<BTreeSet<Term>, CapExceeded> {
    Ok(Session::new().reachable_plus(p)?.iter().cloned().collect())
}

pub fn build_lts(p: &Term) -> Result<Lts, CapExceeded> {
    Session::new().build_lts(p)
}
