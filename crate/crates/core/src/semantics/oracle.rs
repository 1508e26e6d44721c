//! Literal reference evaluator.
//!
//! Works on plain boolean matrices, recomputes temporal accessibility
//! from the one-step relation by naive fixpoint iteration, and expands
//! every quantifier of the truth clauses as a loop over all states.
//! Nothing here is shared with the word-parallel engine beyond the
//! unrolled state space itself.

use crate::formula::Formula;
use crate::frames::{StateRef, UnrolledGraph};
use crate::semantics::Valuation;

#[derive(Clone, Copy, PartialEq, Eq)]
enum ClusterKey {
    Time(usize),
    Chain(usize, usize, usize),
}

pub(crate) struct OracleEvaluator {
    n: usize,
    states: Vec<(StateRef, usize)>,
    valuation: Valuation,
    next: Vec<Vec<bool>>,
    next_star: Vec<Vec<bool>>,
    next_plus: Vec<Vec<bool>>,
    agent: Vec<Vec<Vec<bool>>>,
    r_strict: Vec<Vec<bool>>,
    cluster: Vec<(usize, ClusterKey)>, // (copy, position in the description)
}

fn matrix(n: usize) -> Vec<Vec<bool>> {
    vec![vec![false; n]; n]
}

/// Naive reflexive or irreflexive transitive closure by repeated passes.
fn closure(step: &[Vec<bool>], reflexive: bool) -> Vec<Vec<bool>> {
    let n = step.len();
    let mut out = step.to_vec();
    if reflexive {
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = true;
        }
    }
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if !out[a][b] {
                    continue;
                }
                for c in 0..n {
                    if step[b][c] && !out[a][c] {
                        out[a][c] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return out;
        }
    }
}

impl OracleEvaluator {
    pub(crate) fn new(graph: &UnrolledGraph, valuation: &Valuation) -> OracleEvaluator {
        let n = graph.state_count();
        let mut next = matrix(n);
        for (a, b) in graph.next_rel().pairs() {
            next[a][b] = true;
        }
        let mut q = matrix(n);
        for (a, b) in graph.q_rel().pairs() {
            q[a][b] = true;
        }
        let mut agent = Vec::new();
        for j in 1..=graph.agent_count() {
            let mut m = matrix(n);
            for (a, b) in graph.agent_rel(j).pairs() {
                m[a][b] = true;
            }
            agent.push(m);
        }

        let r = closure(&q, false);
        let mut r_strict = matrix(n);
        for a in 0..n {
            for b in 0..n {
                r_strict[a][b] = r[a][b] && !r[b][a];
            }
        }
        let next_star = closure(&next, true);
        let mut next_plus = matrix(n);
        for c in 0..n {
            for b in 0..n {
                next_plus[c][b] = (0..n).any(|d| next[c][d] && next_star[d][b]);
            }
        }

        let cluster = graph
            .states()
            .iter()
            .map(|(state, copy)| {
                let key = match state {
                    StateRef::Time { cluster, .. } => ClusterKey::Time(*cluster),
                    StateRef::Chain { gap, chain, pos, .. } => {
                        ClusterKey::Chain(*gap, *chain, *pos)
                    }
                };
                (*copy, key)
            })
            .collect();

        OracleEvaluator {
            n,
            states: graph.states().to_vec(),
            valuation: valuation.clone(),
            next,
            next_star,
            next_plus,
            agent,
            r_strict,
            cluster,
        }
    }

    fn same_cluster(&self, a: usize, b: usize) -> bool {
        self.cluster[a] == self.cluster[b]
    }

    /// States reachable from `a` by chaining one or more agent steps; the
    /// agent relations are reflexive, so `a` itself is always included.
    fn interaction_reachable(&self, a: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut stack = Vec::new();
        for j in 0..self.agent.len() {
            for b in 0..self.n {
                if self.agent[j][a][b] && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        let mut out: Vec<usize> = stack.clone();
        while let Some(c) = stack.pop() {
            for j in 0..self.agent.len() {
                for b in 0..self.n {
                    if self.agent[j][c][b] && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                        out.push(b);
                    }
                }
            }
        }
        out
    }

    /// Is there a path of exactly `k` strict steps from `a` ending in a
    /// state where `holds` is true?
    fn strict_path_exists(&self, a: usize, k: usize, holds: &[bool]) -> bool {
        if k == 0 {
            return holds[a];
        }
        (0..self.n).any(|b| self.r_strict[a][b] && self.strict_path_exists(b, k - 1, holds))
    }

    pub(crate) fn truth_table(&self, f: &Formula) -> Vec<bool> {
        match f {
            Formula::Var(i) => self
                .states
                .iter()
                .map(|(state, _)| self.valuation.is_true(*i, state))
                .collect(),
            Formula::Top => vec![true; self.n],
            Formula::Bot => vec![false; self.n],
            Formula::Not(p) => self.truth_table(p).iter().map(|v| !v).collect(),
            Formula::And(p, q) => {
                let (tp, tq) = (self.truth_table(p), self.truth_table(q));
                (0..self.n).map(|a| tp[a] && tq[a]).collect()
            }
            Formula::Or(p, q) => {
                let (tp, tq) = (self.truth_table(p), self.truth_table(q));
                (0..self.n).map(|a| tp[a] || tq[a]).collect()
            }
            Formula::Implies(p, q) => {
                let (tp, tq) = (self.truth_table(p), self.truth_table(q));
                (0..self.n).map(|a| !tp[a] || tq[a]).collect()
            }
            Formula::K(agent, p) => {
                let tp = self.truth_table(p);
                let rel = &self.agent[*agent as usize - 1];
                (0..self.n)
                    .map(|a| (0..self.n).all(|b| !rel[a][b] || tp[b]))
                    .collect()
            }
            Formula::Next(p) => {
                let tp = self.truth_table(p);
                (0..self.n)
                    .map(|a| (0..self.n).all(|b| !self.next[a][b] || tp[b]))
                    .collect()
            }
            Formula::Until(p, q) => {
                let (tp, tq) = (self.truth_table(p), self.truth_table(q));
                (0..self.n)
                    .map(|a| {
                        (0..self.n).any(|b| {
                            self.next_star[a][b]
                                && tq[b]
                                && (0..self.n).all(|c| {
                                    !(self.next_star[a][c] && self.next_plus[c][b]) || tp[c]
                                })
                        })
                    })
                    .collect()
            }
            Formula::Dist(k, p) => {
                let tp = self.truth_table(p);
                (0..self.n)
                    .map(|a| self.strict_path_exists(a, *k as usize, &tp))
                    .collect()
            }
            Formula::Today(p) => {
                let tp = self.truth_table(p);
                (0..self.n)
                    .map(|a| (0..self.n).all(|b| !self.same_cluster(a, b) || tp[b]))
                    .collect()
            }
            Formula::KnI(p) => {
                let tp = self.truth_table(p);
                (0..self.n)
                    .map(|a| self.interaction_reachable(a).iter().any(|&b| tp[b]))
                    .collect()
            }
            Formula::Unc(p) => {
                let tp = self.truth_table(p);
                (0..self.n)
                    .map(|a| {
                        let reach = self.interaction_reachable(a);
                        reach.iter().any(|&b| tp[b]) && reach.iter().any(|&b| !tp[b])
                    })
                    .collect()
            }
        }
    }
}
