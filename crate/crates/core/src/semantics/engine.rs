//! Word-parallel evaluator over an unrolled graph.
//!
//! Each connective reduces to per-cluster, per-block or per-copy
//! aggregates of its argument's bit vector, so a formula node costs one
//! pass over the states. `Until` uses a backward scan over copies that
//! mirrors the quantifier shape of its truth clause: a witness cluster
//! ahead, the current state and every state of the clusters strictly in
//! between satisfying the left argument.

use crate::formula::Formula;
use crate::frames::UnrolledGraph;
use crate::relation::{Bits, Relation};
use crate::semantics::Valuation;
use std::cell::RefCell;
use std::collections::HashMap;

pub(crate) struct BitValuation {
    per_var: HashMap<u32, Bits>,
    n: usize,
}

impl BitValuation {
    pub(crate) fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (u32, Bits)>) -> Self {
        BitValuation { per_var: pairs.into_iter().collect(), n }
    }

    pub(crate) fn var(&self, var: u32) -> Bits {
        self.per_var
            .get(&var)
            .cloned()
            .unwrap_or_else(|| Bits::zeros(self.n))
    }
}

pub(crate) struct FrameEngine<'g> {
    graph: &'g UnrolledGraph,
    // (R^<)^k by increasing k, grown on demand.
    strict_powers: RefCell<Vec<Relation>>,
}

impl<'g> FrameEngine<'g> {
    pub(crate) fn new(graph: &'g UnrolledGraph) -> Self {
        FrameEngine { graph, strict_powers: RefCell::new(Vec::new()) }
    }

    pub(crate) fn graph(&self) -> &'g UnrolledGraph {
        self.graph
    }

    fn n(&self) -> usize {
        self.graph.state_count()
    }

    /// Expand a quotient valuation to bit vectors over the unrolled states.
    pub(crate) fn valuation_bits(&self, valuation: &Valuation) -> BitValuation {
        let n = self.n();
        let mut per_var = HashMap::new();
        for (&var, states) in valuation.iter() {
            let mut bits = Bits::zeros(n);
            for (i, (state, _copy)) in self.graph.states().iter().enumerate() {
                if states.contains(state) {
                    bits.set(i, true);
                }
            }
            per_var.insert(var, bits);
        }
        BitValuation { per_var, n }
    }

    pub(crate) fn eval(&self, f: &Formula, valuation: &BitValuation) -> Bits {
        match f {
            Formula::Var(i) => valuation.var(*i),
            Formula::Top => Bits::ones(self.n()),
            Formula::Bot => Bits::zeros(self.n()),
            Formula::Not(a) => self.eval(a, valuation).not(),
            Formula::And(a, b) => self.eval(a, valuation).and(&self.eval(b, valuation)),
            Formula::Or(a, b) => self.eval(a, valuation).or(&self.eval(b, valuation)),
            Formula::Implies(a, b) => self.eval(a, valuation).not().or(&self.eval(b, valuation)),
            Formula::K(agent, a) => self.op_k(*agent as usize, &self.eval(a, valuation)),
            Formula::Next(a) => self.op_next(&self.eval(a, valuation)),
            Formula::Until(a, b) => {
                self.op_until(&self.eval(a, valuation), &self.eval(b, valuation))
            }
            Formula::Dist(k, a) => self.op_dist(*k as usize, &self.eval(a, valuation)),
            Formula::Today(a) => self.op_today(&self.eval(a, valuation)),
            Formula::KnI(a) => self.op_kni(&self.eval(a, valuation)),
            Formula::Unc(a) => self.op_unc(&self.eval(a, valuation)),
        }
    }

    /// `K_i p`: `p` throughout the state's block of agent `i`'s partition.
    pub(crate) fn op_k(&self, agent: usize, bits: &Bits) -> Bits {
        let mut out = Bits::zeros(self.n());
        for block_id in 0..self.graph.block_count(agent) {
            let members = self.graph.block_members(agent, block_id);
            if members.iter().all(|&s| bits.get(s)) {
                for &s in members {
                    out.set(s, true);
                }
            }
        }
        out
    }

    /// `N p`: `p` at every state of the next time cluster; vacuously true
    /// past the final copy.
    pub(crate) fn op_next(&self, bits: &Bits) -> Bits {
        let horizon = self.graph.horizon();
        let all_at: Vec<bool> = (0..horizon)
            .map(|t| self.graph.time_states(t).iter().all(|&s| bits.get(s)))
            .collect();
        let mut out = Bits::zeros(self.n());
        for i in 0..self.n() {
            let v = match self.graph.frontier_of(i) {
                Some(t) => all_at[t],
                None => true,
            };
            out.set(i, v);
        }
        out
    }

    /// `p Until q`: a witness state satisfying `q` now or in some future
    /// time cluster, with `p` here and throughout every time cluster
    /// strictly in between.
    pub(crate) fn op_until(&self, left: &Bits, right: &Bits) -> Bits {
        let horizon = self.graph.horizon();
        let all_left: Vec<bool> = (0..horizon)
            .map(|t| self.graph.time_states(t).iter().all(|&s| left.get(s)))
            .collect();
        let any_right: Vec<bool> = (0..horizon)
            .map(|t| self.graph.time_states(t).iter().any(|&s| right.get(s)))
            .collect();
        // reach[t]: some later cluster t' > t holds a witness with every
        // cluster between t and t' satisfying the left argument everywhere.
        let mut reach = vec![false; horizon];
        for t in (0..horizon.saturating_sub(1)).rev() {
            reach[t] = any_right[t + 1] || (all_left[t + 1] && reach[t + 1]);
        }
        let mut out = Bits::zeros(self.n());
        for i in 0..self.n() {
            let v = right.get(i)
                || (left.get(i)
                    && match self.graph.frontier_of(i) {
                        Some(_) => reach[self.graph.copy_of(i)],
                        None => false,
                    });
            out.set(i, v);
        }
        out
    }

    /// `D_k p`: some state exactly `k` strict temporal steps away
    /// satisfies `p`.
    pub(crate) fn op_dist(&self, k: usize, bits: &Bits) -> Bits {
        let mut powers = self.strict_powers.borrow_mut();
        if powers.is_empty() {
            powers.push(Relation::identity(self.n()));
        }
        while powers.len() <= k {
            let next = powers.last().unwrap().compose(self.graph.r_strict());
            powers.push(next);
        }
        let power = &powers[k];
        let mut out = Bits::zeros(self.n());
        for i in 0..self.n() {
            if power.row(i).intersects(bits) {
                out.set(i, true);
            }
        }
        out
    }

    /// `Today p`: `p` at every state of the state's own cluster.
    pub(crate) fn op_today(&self, bits: &Bits) -> Bits {
        let mut out = Bits::zeros(self.n());
        for cid in 0..self.graph.cluster_count() {
            let members = self.graph.cluster_members(cid);
            if members.iter().all(|&s| bits.get(s)) {
                for &s in members {
                    out.set(s, true);
                }
            }
        }
        out
    }

    /// `KnI p`: some state of the interaction component satisfies `p`.
    pub(crate) fn op_kni(&self, bits: &Bits) -> Bits {
        let mut out = Bits::zeros(self.n());
        for comp in 0..self.graph.component_count() {
            let members = self.graph.component_members(comp);
            if members.iter().any(|&s| bits.get(s)) {
                for &s in members {
                    out.set(s, true);
                }
            }
        }
        out
    }

    /// `Unc p`: the interaction component contains both a `p`-state and a
    /// `~p`-state.
    pub(crate) fn op_unc(&self, bits: &Bits) -> Bits {
        let mut out = Bits::zeros(self.n());
        for comp in 0..self.graph.component_count() {
            let members = self.graph.component_members(comp);
            let has_true = members.iter().any(|&s| bits.get(s));
            let has_false = members.iter().any(|&s| !bits.get(s));
            if has_true && has_false {
                for &s in members {
                    out.set(s, true);
                }
            }
        }
        out
    }
}
