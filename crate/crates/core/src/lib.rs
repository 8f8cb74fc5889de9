//! Bisimilarity, normal forms and equational certificates for 1-free
//! process terms over the binary Kleene star.
//!
//! Terms are built from `0`, actions, `+`, `.` and the binary star `*`.
//! The crate decides strong bisimilarity, normalizes terms to a bisimilar
//! normal form of no greater star depth, and produces certificates in the
//! axiom system B1–B7, BKS1, BKS2, RSP that a small kernel checks.

pub mod bisim;
pub mod complete;
pub mod normalize;
pub mod proof;
pub mod semantics;
pub mod session;
pub mod summation;
pub mod syntax;
pub mod term;

pub use bisim::{bisim_naive, bisim_witness, bisimilar, BisimWitness};
pub use complete::{
    is_tail, next_provable, prove_core, prove_equal, prove_obligation, prove_split, prove_with_nf,
    vertex_mult, Obligation, ProveError, ProveStats,
};
pub use normalize::{
    congr, congr_ex_step, congr_mult_step, is_nf, is_nfmult, normalize, normalize_mult,
    NormalizationOutcome, NormalizeError,
};
pub use proof::{conclusion, parse_proof, serialize, Conclusion, IllFormed, Proof, ProofNode};
pub use semantics::{build_lts, reachable, reachable_plus, successors, Lts, Transition};
pub use session::{CapExceeded, Limits, Session};
pub use summation::{
    expand, prove_by_matching, prove_sum_union, sigma, summand_term, MatchError, Summand,
    SummandSet, TeqWitness,
};
pub use syntax::{parse, render, SyntaxError};
pub use term::{star_depth, term_order, Action, Term, TermKind, Vertex};
