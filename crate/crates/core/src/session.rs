//! Shared state for the semantic decision procedures.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{Action, Term, Vertex};

pub const DEFAULT_MAX_STATES: usize = 100_000;
pub const DEFAULT_MAX_CERT_NODES: u64 = 1_000_000;

/// Resource caps. Neither is expected to trigger on ordinary inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest state space (reachable vertices) any single exploration may build.
    pub max_states: usize,
    /// Largest certificate, counted in proof-tree nodes.
    pub max_cert_nodes: u64,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            max_states: DEFAULT_MAX_STATES,
            max_cert_nodes: DEFAULT_MAX_CERT_NODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("state space exceeds the cap of {limit} states")]
pub struct CapExceeded {
    pub limit: usize,
}

pub(crate) type Successors = Arc<[(Action, Vertex)]>;

/// Memo tables for successor sets, bisimilarity verdicts and the normal-form
/// predicates.
///
/// A session is confined to one thread; every cached value is a pure
/// function of its key, so results do not depend on call order.
#[derive(Default)]
pub struct Session {
    limits: Limits,
    pub(crate) succ: RefCell<HashMap<Term, Successors>>,
    pub(crate) bisim: RefCell<HashMap<(Vertex, Vertex), bool>>,
    pub(crate) reach_plus: RefCell<HashMap<Term, Arc<[Term]>>>,
    pub(crate) congr: RefCell<HashMap<(Term, Term), bool>>,
    pub(crate) nfmult: RefCell<HashMap<(Term, Term), bool>>,
    pub(crate) nf: RefCell<HashMap<Term, bool>>,
}

impl Session {
    pub fn new() -> Session {
        Session::default()
    }

    pub fn with_limits(limits: Limits) -> Session {
        Session {
            limits,
            ..Session::default()
        }
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    /// Drops all memo tables.
    pub fn clear(&self) {
        self.succ.borrow_mut().clear();
        self.bisim.borrow_mut().clear();
        self.reach_plus.borrow_mut().clear();
        self.congr.borrow_mut().clear();
        self.nfmult.borrow_mut().clear();
        self.nf.borrow_mut().clear();
    }
}
