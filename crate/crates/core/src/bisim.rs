//! Strong bisimilarity on vertices.
//!
//! The decision procedure refines a partition of the joint reachable state
//! space of both vertices (Kanellakis–Smolka style): blocks are split by the
//! set of `(action, target block)` pairs of their members until nothing
//! changes. `√` is the single member of its initial block.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::session::{CapExceeded, Session};
use crate::term::{Action, Term, Vertex};

/// A finite relation that is a bisimulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimWitness {
    pub pairs: BTreeSet<(Vertex, Vertex)>,
}

impl BisimWitness {
    pub fn contains(&self, x: &Vertex, y: &Vertex) -> bool {
        self.pairs.contains(&(x.clone(), y.clone()))
    }

    /// Checks the three transfer conditions on every pair using only the
    /// step relation.
    pub fn is_valid(&self) -> bool {
        self.pairs.iter().all(|(x, y)| {
            if x.is_tick() != y.is_tick() {
                return false;
            }
            let xs = crate::semantics::successors(x);
            let ys = crate::semantics::successors(y);
            let forth = xs.iter().all(|(a, x1)| {
                ys.iter()
                    .any(|(b, y1)| a == b && self.pairs.contains(&(x1.clone(), y1.clone())))
            });
            let back = ys.iter().all(|(b, y1)| {
                xs.iter()
                    .any(|(a, x1)| a == b && self.pairs.contains(&(x1.clone(), y1.clone())))
            });
            forth && back
        })
    }
}

impl Session {
    /// Coarsest stable partition of `states`, which must be closed under
    /// steps. Returns a block number per state.
    fn refine(&self, states: &[Vertex]) -> Vec<usize> {
        let index: HashMap<&Vertex, usize> =
            states.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let edges: Vec<Vec<(Action, usize)>> = states
            .iter()
            .map(|v| {
                self.successors(v)
                    .iter()
                    .map(|(a, u)| (a.clone(), index[u]))
                    .collect()
            })
            .collect();
        let mut block: Vec<usize> = states.iter().map(|v| usize::from(!v.is_tick())).collect();
        let mut count = block.iter().collect::<HashSet<_>>().len();
        loop {
            let mut ids: HashMap<(usize, Vec<(Action, usize)>), usize> = HashMap::new();
            let next: Vec<usize> = (0..states.len())
                .map(|i| {
                    let mut sig: Vec<(Action, usize)> = edges[i]
                        .iter()
                        .map(|(a, j)| (a.clone(), block[*j]))
                        .collect();
                    sig.sort();
                    sig.dedup();
                    let fresh = ids.len();
                    *ids.entry((block[i], sig)).or_insert(fresh)
                })
                .collect();
            let n = ids.len();
            block = next;
            if n == count {
                return block;
            }
            count = n;
        }
    }

    /// Decides `u ↔ v`.
    pub fn bisimilar(&self, u: &Vertex, v: &Vertex) -> Result<bool, CapExceeded> {
        if u == v {
            return Ok(true);
        }
        if u.is_tick() || v.is_tick() {
            return Ok(false);
        }
        let key = if u <= v {
            (u.clone(), v.clone())
        } else {
            (v.clone(), u.clone())
        };
        if let Some(&b) = self.bisim.borrow().get(&key) {
            return Ok(b);
        }
        let states = self.explore(&[u.clone(), v.clone()])?;
        let block = self.refine(&states);
        // explore lists the roots first
        let result = block[0] == block[1];
        self.bisim.borrow_mut().insert(key, result);
        Ok(result)
    }

    /// Term convenience wrapper for [`Session::bisimilar`].
    pub fn bisimilar_terms(&self, p: &Term, q: &Term) -> Result<bool, CapExceeded> {
        self.bisimilar(&Vertex::Term(p.clone()), &Vertex::Term(q.clone()))
    }

    /// A bisimulation relating `u` and `v`, if there is one: all same-block
    /// pairs between the states reachable from `u` and from `v`.
    pub fn bisim_witness(
        &self,
        u: &Vertex,
        v: &Vertex,
    ) -> Result<Option<BisimWitness>, CapExceeded> {
        let left = self.explore(std::slice::from_ref(u))?;
        let right = self.explore(std::slice::from_ref(v))?;
        let states = self.explore(&[u.clone(), v.clone()])?;
        let block = self.refine(&states);
        let index: HashMap<&Vertex, usize> =
            states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        if block[index[u]] != block[index[v]] {
            return Ok(None);
        }
        let mut pairs = BTreeSet::new();
        for x in &left {
            for y in &right {
                if block[index[x]] == block[index[y]] {
                    pairs.insert((x.clone(), y.clone()));
                }
            }
        }
        Ok(Some(BisimWitness { pairs }))
    }

    /// Greatest-fixpoint bisimilarity on the full product of the two
    /// reachable sets. Quadratic in space; meant as a test oracle.
    pub fn bisim_naive(&self, u: &Vertex, v: &Vertex) -> Result<bool, CapExceeded> {
        let left = self.explore(std::slice::from_ref(u))?;
        let right = self.explore(std::slice::from_ref(v))?;
        let li: HashMap<&Vertex, usize> = left.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let ri: HashMap<&Vertex, usize> = right.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let lsucc: Vec<Vec<(Action, usize)>> = left
            .iter()
            .map(|s| {
                crate::semantics::successors(s)
                    .into_iter()
                    .map(|(a, t)| (a, li[&t]))
                    .collect()
            })
            .collect();
        let rsucc: Vec<Vec<(Action, usize)>> = right
            .iter()
            .map(|s| {
                crate::semantics::successors(s)
                    .into_iter()
                    .map(|(a, t)| (a, ri[&t]))
                    .collect()
            })
            .collect();
        let (n, m) = (left.len(), right.len());
        let mut rel = vec![false; n * m];
        for i in 0..n {
            for j in 0..m {
                rel[i * m + j] = left[i].is_tick() == right[j].is_tick();
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                for j in 0..m {
                    if !rel[i * m + j] {
                        continue;
                    }
                    let forth = lsucc[i]
                        .iter()
                        .all(|(a, x)| rsucc[j].iter().any(|(b, y)| a == b && rel[x * m + y]));
                    let back = rsucc[j]
                        .iter()
                        .all(|(b, y)| lsucc[i].iter().any(|(a, x)| a == b && rel[x * m + y]));
                    if !(forth && back) {
                        rel[i * m + j] = false;
                        changed = true;
                    }
                }
            }
        }
        Ok(rel[0])
    }
}

pub fn bisimilar(u: &Vertex, v: &Vertex) -> Result<bool, CapExceeded> {
    Session::new().bisimilar(u, v)
}

pub fn bisim_witness(u: &Vertex, v: &Vertex) -> Result<Option<BisimWitness>, CapExceeded> {
    Session::new().bisim_witness(u, v)
}

pub fn bisim_naive(u: &Vertex, v: &Vertex) -> Result<bool, CapExceeded> {
    Session::new().bisim_naive(u, v)
}
