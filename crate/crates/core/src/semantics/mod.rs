//! Truth-value computation over models.
//!
//! Two evaluators are provided: [`eval`], which works word-parallel over
//! per-copy aggregates, and [`oracle_eval`], a deliberately naive
//! evaluator that expands every quantifier literally over the explicit
//! unrolled graph and recomputes its own reachability. The two must agree
//! everywhere; the test suites enforce it.
//!
//! Truth of the infinite frame is approximated on a finite unrolling.
//! Loop-free frames unroll exactly; lasso frames unroll to a horizon
//! derived from the formula's temporal weight ([`stable_horizon`]), and
//! truth is read from the canonical first realization of every state.

pub(crate) mod engine;
mod oracle;

use crate::formula::Formula;
use crate::frames::{
    self, render_violations, unroll, FrameSpec, StateRef, UnrollOptions, Violation,
};
use engine::FrameEngine;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Assignment of state sets to propositional variables.
///
/// States are quotient (copy-free) references; a variable holds at every
/// copy of each listed state. Variables absent from the map are false
/// everywhere.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    map: BTreeMap<u32, BTreeSet<StateRef>>,
}

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    pub fn insert(&mut self, var: u32, states: BTreeSet<StateRef>) {
        self.map.insert(var, states);
    }

    pub fn add(&mut self, var: u32, state: StateRef) {
        self.map.entry(var).or_default().insert(state);
    }

    pub fn states_of(&self, var: u32) -> Option<&BTreeSet<StateRef>> {
        self.map.get(&var)
    }

    pub fn is_true(&self, var: u32, state: &StateRef) -> bool {
        self.map.get(&var).is_some_and(|s| s.contains(state))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &BTreeSet<StateRef>)> {
        self.map.iter()
    }

    pub fn variables(&self) -> impl Iterator<Item = u32> + '_ {
        self.map.keys().copied()
    }
}

/// A frame description together with a valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub spec: FrameSpec,
    pub valuation: Valuation,
}

impl Model {
    /// Build a model, rejecting invalid frames and valuations that name
    /// unknown states.
    pub fn new(spec: FrameSpec, valuation: Valuation) -> Result<Model, Vec<Violation>> {
        let model = Model { spec, valuation };
        let violations = model.violations();
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(violations)
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = frames::validate(&self.spec);
        for (var, states) in self.valuation.iter() {
            for state in states {
                if !self.spec.contains_state(state) {
                    out.push(Violation {
                        location: format!("valuation.x{var}"),
                        message: format!("unknown state '{state}'"),
                    });
                }
            }
        }
        out
    }
}

/// Truth values of one formula over the readout window: the canonical
/// realization of every state of the description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthAssignment {
    values: BTreeMap<StateRef, bool>,
}

impl TruthAssignment {
    pub fn get(&self, state: &StateRef) -> Option<bool> {
        self.values.get(state).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateRef, bool)> {
        self.values.iter().map(|(s, &v)| (s, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn all_true(&self) -> bool {
        self.values.values().all(|&v| v)
    }

    /// States with the requested truth value, in canonical name order.
    pub fn states_where(&self, value: bool) -> Vec<&StateRef> {
        self.values
            .iter()
            .filter(|(_, &v)| v == value)
            .map(|(s, _)| s)
            .collect()
    }

    /// JSON map from state name to truth value.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.values
                .iter()
                .map(|(s, &v)| (s.to_string(), serde_json::Value::Bool(v)))
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    /// Number of copies to unroll; defaults to the exact length for
    /// loop-free frames and to [`stable_horizon`] for lassos.
    pub horizon: Option<usize>,
    /// See [`UnrollOptions::bridge_gaps`].
    pub bridge_gaps: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { horizon: None, bridge_gaps: true }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("formula uses agent {agent} but the model has {agents} agents")]
    AgentOutOfRange { agent: u32, agents: usize },
    #[error("horizon {given} is below the minimum {minimum} for this model")]
    HorizonTooSmall { given: usize, minimum: usize },
    #[error("horizon {given} does not match the length {expected} of a loop-free frame")]
    HorizonMismatch { given: usize, expected: usize },
    #[error("model has no loop; the stable horizon is defined for lasso frames only")]
    LoopFree,
    #[error("unknown state '{0}'")]
    UnknownState(StateRef),
    #[error("invalid model: {}", render_violations(.0))]
    InvalidModel(Vec<Violation>),
}

/// Default unrolling horizon for a lasso model: enough copies that every
/// temporal operator of `f` settles on the readout window. The horizon
/// stability suites check that doubling it never changes readout truth.
pub fn stable_horizon(model: &Model, f: &Formula) -> Result<usize, EvalError> {
    let prefix = model.spec.prefix().ok_or(EvalError::LoopFree)?;
    let period = model.spec.period().expect("lasso");
    let m = f.metrics();
    let weight = m.dist_weight as usize + m.next_count + m.until_count + 2;
    Ok(prefix + weight * period)
}

/// Pick and check a horizon for a model given the temporal weight of
/// whatever will be evaluated on it, then unroll.
pub(crate) fn unroll_for_weight(
    model: &Model,
    weight: usize,
    opts: &EvalOptions,
) -> Result<frames::UnrolledGraph, EvalError> {
    let len = model.spec.time_len();
    let horizon = match model.spec.loop_to {
        None => match opts.horizon {
            None => len,
            Some(h) if h == len => h,
            Some(h) => return Err(EvalError::HorizonMismatch { given: h, expected: len }),
        },
        Some(prefix) => {
            let period = model.spec.period().expect("lasso");
            let minimum = len + 1;
            match opts.horizon {
                None => (prefix + (weight + 2) * period).max(minimum),
                Some(h) if h >= minimum => h,
                Some(h) => return Err(EvalError::HorizonTooSmall { given: h, minimum }),
            }
        }
    };
    unroll(&model.spec, horizon, UnrollOptions { bridge_gaps: opts.bridge_gaps }).map_err(|e| {
        match e {
            frames::UnrollError::InvalidSpec(v) => EvalError::InvalidModel(v),
            frames::UnrollError::ZeroHorizon => EvalError::HorizonTooSmall { given: 0, minimum: 1 },
            frames::UnrollError::HorizonBeyondFrame { horizon, len } => {
                EvalError::HorizonMismatch { given: horizon, expected: len }
            }
        }
    })
}

/// Temporal weight of a formula: how many extra periods of unrolling its
/// step-counting operators can consume.
pub(crate) fn temporal_weight(f: &Formula) -> usize {
    let m = f.metrics();
    m.dist_weight as usize + m.next_count + m.until_count
}

fn check_model_and_agents(model: &Model, f: &Formula) -> Result<(), EvalError> {
    let violations = model.violations();
    if !violations.is_empty() {
        return Err(EvalError::InvalidModel(violations));
    }
    let max_agent = f.metrics().max_agent;
    if max_agent as usize > model.spec.agents {
        return Err(EvalError::AgentOutOfRange { agent: max_agent, agents: model.spec.agents });
    }
    Ok(())
}

fn unroll_for(
    model: &Model,
    f: &Formula,
    opts: &EvalOptions,
) -> Result<frames::UnrolledGraph, EvalError> {
    unroll_for_weight(model, temporal_weight(f), opts)
}

fn readout_assignment(
    graph: &frames::UnrolledGraph,
    truth: impl Fn(usize) -> bool,
) -> TruthAssignment {
    let values = graph
        .readout_indices()
        .iter()
        .map(|&i| (graph.state_ref(i).clone(), truth(i)))
        .collect();
    TruthAssignment { values }
}

/// Compute the truth of `f` at every readout state of the model.
pub fn eval(model: &Model, f: &Formula, opts: &EvalOptions) -> Result<TruthAssignment, EvalError> {
    check_model_and_agents(model, f)?;
    let graph = unroll_for(model, f, opts)?;
    let engine = FrameEngine::new(&graph);
    let valuation = engine.valuation_bits(&model.valuation);
    let bits = engine.eval(f, &valuation);
    Ok(readout_assignment(&graph, |i| bits.get(i)))
}

/// Naive reference evaluator; same contract as [`eval`], asymptotically
/// slower and maximally literal.
pub fn oracle_eval(
    model: &Model,
    f: &Formula,
    opts: &EvalOptions,
) -> Result<TruthAssignment, EvalError> {
    check_model_and_agents(model, f)?;
    let graph = unroll_for(model, f, opts)?;
    let oracle = oracle::OracleEvaluator::new(&graph, &model.valuation);
    let truth = oracle.truth_table(f);
    Ok(readout_assignment(&graph, |i| truth[i]))
}

/// Truth of `f` at one readout state.
pub fn holds_at(model: &Model, state: &StateRef, f: &Formula) -> Result<bool, EvalError> {
    let assignment = eval(model, f, &EvalOptions::default())?;
    assignment
        .get(state)
        .ok_or_else(|| EvalError::UnknownState(state.clone()))
}

/// Whether `f` holds at every readout state of the model.
pub fn valid_in_model(model: &Model, f: &Formula) -> Result<bool, EvalError> {
    Ok(eval(model, f, &EvalOptions::default())?.all_true())
}

/// Truth over the whole unrolling, one entry per copy. Names carry a
/// `.c<k>` suffix for the `k`-th repeat realization beyond the canonical
/// one; canonical realizations print plainly.
pub fn eval_unrolled(
    model: &Model,
    f: &Formula,
    opts: &EvalOptions,
) -> Result<Vec<(String, bool)>, EvalError> {
    check_model_and_agents(model, f)?;
    let graph = unroll_for(model, f, opts)?;
    let engine = FrameEngine::new(&graph);
    let valuation = engine.valuation_bits(&model.valuation);
    let bits = engine.eval(f, &valuation);
    let period = model.spec.period().unwrap_or(usize::MAX);
    let out = graph
        .states()
        .iter()
        .enumerate()
        .map(|(i, (state, copy))| {
            let canonical = match state {
                StateRef::Time { cluster, .. } => *cluster,
                StateRef::Chain { gap, .. } => *gap,
            };
            let name = if *copy == canonical {
                state.to_string()
            } else {
                format!("{state}.c{}", (copy - canonical) / period.max(1))
            };
            (name, bits.get(i))
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests;
