//! Bounded countermodel search: satisfiability, theoremhood and rule
//! refutation over an exhaustively enumerated family of frames.
//!
//! Frames within the bounds are generated once each up to state renaming
//! (clusters are canonical under permutations of their states, chains
//! within a gap are kept sorted) and visited in a fixed order: increasing
//! total state count, then lexicographic structure. For every frame all
//! valuations of the query's variables over its states are tried.
//! Completeness is therefore relative to the bounds: a search that comes
//! back empty reports `Exhausted`, never "valid".

use crate::formula::Formula;
use crate::frames::{self, Chain, Cluster, FrameSpec, Gap, StateRef, UnrollOptions};
use crate::relation::Bits;
use crate::rules::{InferenceRule, ReducedNormalFormRule, RnfAtom};
use crate::semantics::{
    engine::{BitValuation, FrameEngine},
    EvalError, Model, Valuation,
};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;
use thiserror::Error;

/// Limits of the frame family searched, plus the candidate budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub max_time_clusters: usize,
    pub max_cluster_size: usize,
    pub max_chains_per_gap: usize,
    pub max_chain_length: usize,
    pub allow_loop: bool,
    /// Number of agents of the enumerated frames; `None` uses the largest
    /// agent index of the query (at least 1).
    pub agents: Option<usize>,
    /// Whether consecutive time clusters are directly related by the
    /// one-step temporal relation.
    pub bridge_gaps: bool,
    /// Hard limit on `(frame, valuation)` candidates; exceeding it is an
    /// explicit error, never a silent truncation.
    pub candidate_cap: u64,
}

pub const DEFAULT_CANDIDATE_CAP: u64 = 2_000_000;

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_time_clusters: 2,
            max_cluster_size: 2,
            max_chains_per_gap: 1,
            max_chain_length: 1,
            allow_loop: true,
            agents: None,
            bridge_gaps: true,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A concrete model and state witnessing the query.
    Witness { model: Model, state: StateRef },
    /// Every frame within bounds was searched without a witness.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub bounds: SearchBounds,
    pub frames_checked: u64,
    pub candidates_checked: u64,
}

impl SearchOutcome {
    pub fn is_witness(&self) -> bool {
        matches!(self.verdict, Verdict::Witness { .. })
    }

    pub fn witness(&self) -> Option<(&Model, &StateRef)> {
        match &self.verdict {
            Verdict::Witness { model, state } => Some((model, state)),
            Verdict::Exhausted => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut doc = serde_json::json!({
            "verdict": if self.is_witness() { "witness" } else { "exhausted" },
            "bounds": serde_json::to_value(&self.bounds).expect("bounds serialize"),
            "frames_checked": self.frames_checked,
            "candidates_checked": self.candidates_checked,
        });
        if let Verdict::Witness { model, state } = &self.verdict {
            doc["model"] = frames::model_to_json(model);
            doc["state"] = serde_json::json!(state.to_string());
        }
        doc
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(
        "candidate cap {cap} exhausted after {candidates} candidate models over {frames} frames"
    )]
    CapExceeded { cap: u64, candidates: u64, frames: u64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

// ---------------------------------------------------------------------------
// Canonical frame enumeration
// ---------------------------------------------------------------------------

/// Per-agent partitions of `size` states as restricted growth strings.
type ShapeKey = (usize, Vec<Vec<u8>>);
type ChainKey = Vec<ShapeKey>;

fn all_partitions(size: usize) -> Vec<Vec<u8>> {
    fn extend(prefix: &mut Vec<u8>, size: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == size {
            out.push(prefix.clone());
            return;
        }
        let max = prefix.iter().copied().max().unwrap_or(0);
        let ceiling = if prefix.is_empty() { 0 } else { max + 1 };
        for label in 0..=ceiling {
            prefix.push(label);
            extend(prefix, size, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), size, &mut out);
    out
}

fn permutations(size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(size - 1) {
        for slot in 0..size {
            let mut perm = rest.clone();
            perm.insert(slot, size - 1);
            out.push(perm);
        }
    }
    out
}

/// Relabel a partition along a state permutation and renormalize block
/// labels to first-occurrence order.
fn relabel(rgs: &[u8], perm: &[usize]) -> Vec<u8> {
    let mut map = vec![u8::MAX; rgs.len() + 1];
    let mut next = 0u8;
    perm.iter()
        .map(|&old| {
            let label = rgs[old] as usize;
            if map[label] == u8::MAX {
                map[label] = next;
                next += 1;
            }
            map[label]
        })
        .collect()
}

/// All canonical joint shapes of `agents` partitions over `size` states:
/// one representative per orbit of the state-permutation action.
fn cluster_shapes(size: usize, agents: usize) -> Vec<ShapeKey> {
    let partitions = all_partitions(size);
    let perms = permutations(size);
    let mut tuples: Vec<Vec<Vec<u8>>> = vec![vec![]];
    for _ in 0..agents {
        tuples = tuples
            .into_iter()
            .flat_map(|prefix| {
                partitions.iter().map(move |p| {
                    let mut t = prefix.clone();
                    t.push(p.clone());
                    t
                })
            })
            .collect();
    }
    let mut shapes: Vec<ShapeKey> = tuples
        .into_iter()
        .filter(|tuple| {
            perms.iter().all(|perm| {
                let image: Vec<Vec<u8>> = tuple.iter().map(|p| relabel(p, perm)).collect();
                *tuple <= image
            })
        })
        .map(|tuple| (size, tuple))
        .collect();
    shapes.sort();
    shapes
}

fn state_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("s{i}")
    }
}

fn shape_to_cluster(shape: &ShapeKey) -> Cluster {
    let (size, partitions) = shape;
    let states: Vec<String> = (0..*size).map(state_name).collect();
    let partitions = partitions
        .iter()
        .map(|rgs| {
            let blocks = rgs.iter().copied().max().unwrap_or(0) as usize + 1;
            (0..blocks)
                .map(|label| {
                    (0..*size)
                        .filter(|&i| rgs[i] as usize == label)
                        .map(state_name)
                        .collect()
                })
                .collect()
        })
        .collect();
    Cluster { states, partitions }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct FrameShape {
    time: Vec<ShapeKey>,
    gaps: Vec<Vec<ChainKey>>,
    loop_to: Option<usize>,
}

impl FrameShape {
    fn state_count(&self) -> usize {
        let time: usize = self.time.iter().map(|s| s.0).sum();
        let chains: usize = self
            .gaps
            .iter()
            .flatten()
            .flatten()
            .map(|s| s.0)
            .sum();
        time + chains
    }

    fn to_spec(&self, agents: usize) -> FrameSpec {
        FrameSpec {
            agents,
            time_clusters: self.time.iter().map(shape_to_cluster).collect(),
            gaps: self
                .gaps
                .iter()
                .map(|chains| Gap {
                    chains: chains
                        .iter()
                        .map(|chain| Chain {
                            clusters: chain.iter().map(shape_to_cluster).collect(),
                        })
                        .collect(),
                })
                .collect(),
            loop_to: self.loop_to,
        }
    }
}

fn cartesian<T: Clone>(options: &[T], len: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Non-decreasing sequences over `options` of length `0..=max_len`:
/// multisets, matching the order-independence of chains within a gap.
fn multisets<T: Clone + Ord>(options: &[T], max_len: usize) -> Vec<Vec<T>> {
    fn extend<T: Clone + Ord>(
        options: &[T],
        start: usize,
        left: usize,
        prefix: &mut Vec<T>,
        out: &mut Vec<Vec<T>>,
    ) {
        out.push(prefix.clone());
        if left == 0 {
            return;
        }
        for i in start..options.len() {
            prefix.push(options[i].clone());
            extend(options, i, left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(options, 0, max_len, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Deterministic stream of every frame within the bounds, one per
/// renaming class, ordered by total state count then structure.
pub fn enumerate_frames(bounds: &SearchBounds) -> impl Iterator<Item = FrameSpec> {
    let agents = bounds.agents.unwrap_or(1).max(1);
    let mut shapes: Vec<ShapeKey> = Vec::new();
    for size in 1..=bounds.max_cluster_size {
        shapes.extend(cluster_shapes(size, agents));
    }
    shapes.sort();

    let mut chains: Vec<ChainKey> = Vec::new();
    for len in 1..=bounds.max_chain_length {
        chains.extend(cartesian(&shapes, len));
    }
    chains.sort();
    let gap_options = multisets(&chains, bounds.max_chains_per_gap);

    let mut frames: Vec<FrameShape> = Vec::new();
    for t_len in 1..=bounds.max_time_clusters {
        let mut loops: Vec<Option<usize>> = vec![None];
        if bounds.allow_loop {
            loops.extend((0..t_len).map(Some));
        }
        for loop_to in loops {
            let gap_count = if loop_to.is_some() { t_len } else { t_len - 1 };
            for time in cartesian(&shapes, t_len) {
                for gaps in cartesian(&gap_options, gap_count) {
                    frames.push(FrameShape { time: time.clone(), gaps, loop_to });
                }
            }
        }
    }
    frames.sort_by(|a, b| {
        (a.state_count(), &a.time, &a.gaps, rank(a.loop_to))
            .cmp(&(b.state_count(), &b.time, &b.gaps, rank(b.loop_to)))
    });
    fn rank(l: Option<usize>) -> usize {
        match l {
            None => 0,
            Some(i) => i + 1,
        }
    }
    frames.into_iter().map(move |shape| shape.to_spec(agents))
}

// ---------------------------------------------------------------------------
// Bounded search
// ---------------------------------------------------------------------------

enum Query<'q> {
    /// Find a readout state where the formula has the wanted value.
    FormulaWhere { f: &'q Formula, want: bool },
    /// Premises valid everywhere, conclusion failing somewhere.
    RuleRefutation { rule: &'q InferenceRule },
    /// Reduced rule over its own variables: every readout profile matches
    /// a disjunct, the conclusion variable fails somewhere.
    RnfRefutation { rnf: &'q ReducedNormalFormRule, rows: HashSet<Vec<bool>> },
}

impl Query<'_> {
    fn variables(&self) -> Vec<u32> {
        match self {
            Query::FormulaWhere { f, .. } => f.metrics().variables.into_iter().collect(),
            Query::RuleRefutation { rule } => rule.variables().into_iter().collect(),
            Query::RnfRefutation { rnf, .. } => rnf.variables().into_iter().collect(),
        }
    }

    fn max_agent(&self) -> u32 {
        match self {
            Query::FormulaWhere { f, .. } => f.metrics().max_agent,
            Query::RuleRefutation { rule } => rule.combined_metrics().max_agent,
            Query::RnfRefutation { rnf, .. } => rnf
                .atoms
                .iter()
                .filter_map(|a| match a {
                    RnfAtom::Know { agent, .. } => Some(*agent),
                    _ => None,
                })
                .max()
                .unwrap_or(0),
        }
    }

    fn temporal_weight(&self) -> usize {
        match self {
            Query::FormulaWhere { f, .. } => crate::semantics::temporal_weight(f),
            Query::RuleRefutation { rule } => {
                let m = rule.combined_metrics();
                m.dist_weight as usize + m.next_count + m.until_count
            }
            Query::RnfRefutation { rnf, .. } => {
                1 + rnf
                    .atoms
                    .iter()
                    .filter_map(|a| match a {
                        RnfAtom::Dist { k, .. } => Some(*k as usize),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    /// Check one candidate valuation; returns the readout position of the
    /// witness state if the candidate answers the query.
    fn check(
        &self,
        engine: &FrameEngine<'_>,
        readout: &[usize],
        valuation: &BitValuation,
    ) -> Option<usize> {
        match self {
            Query::FormulaWhere { f, want } => {
                let bits = engine.eval(f, valuation);
                readout.iter().position(|&s| bits.get(s) == *want)
            }
            Query::RuleRefutation { rule } => {
                for premise in &rule.premises {
                    let bits = engine.eval(premise, valuation);
                    if !readout.iter().all(|&s| bits.get(s)) {
                        return None;
                    }
                }
                let bits = engine.eval(&rule.conclusion, valuation);
                readout.iter().position(|&s| !bits.get(s))
            }
            Query::RnfRefutation { rnf, rows } => {
                let var = |i: usize| valuation.var(i as u32);
                let atom_bits: Vec<Bits> = rnf
                    .atoms
                    .iter()
                    .map(|atom| match atom {
                        RnfAtom::Base(i) => var(*i),
                        RnfAtom::Next(i) => engine.op_next(&var(*i)),
                        RnfAtom::Know { agent, var: i } => {
                            engine.op_k(*agent as usize, &var(*i))
                        }
                        RnfAtom::Dist { k, var: i } => engine.op_dist(*k as usize, &var(*i)),
                        RnfAtom::Until { left, right } => {
                            engine.op_until(&var(*left), &var(*right))
                        }
                        RnfAtom::KnI(i) => engine.op_kni(&var(*i)),
                        RnfAtom::Unc(i) => engine.op_unc(&var(*i)),
                    })
                    .collect();
                let premise_everywhere = readout.iter().all(|&s| {
                    let profile: Vec<bool> = atom_bits.iter().map(|b| b.get(s)).collect();
                    rows.contains(&profile)
                });
                if !premise_everywhere {
                    return None;
                }
                let conclusion = var(1);
                readout.iter().position(|&s| !conclusion.get(s))
            }
        }
    }
}

struct FrameSearch<'g> {
    engine: FrameEngine<'g>,
    readout: Vec<usize>,
    readout_refs: Vec<StateRef>,
    /// For each unrolled state: position of its quotient state in the
    /// readout list.
    quotient_pos: Vec<usize>,
}

impl<'g> FrameSearch<'g> {
    fn new(graph: &'g frames::UnrolledGraph) -> FrameSearch<'g> {
        let readout: Vec<usize> = graph.readout_indices().to_vec();
        let readout_refs: Vec<StateRef> =
            readout.iter().map(|&i| graph.state_ref(i).clone()).collect();
        let quotient_pos = graph
            .states()
            .iter()
            .map(|(state, _)| {
                readout_refs
                    .iter()
                    .position(|r| r == state)
                    .expect("every unrolled state realizes a described state")
            })
            .collect();
        FrameSearch { engine: FrameEngine::new(graph), readout, readout_refs, quotient_pos }
    }

    fn quotient_count(&self) -> usize {
        self.readout.len()
    }

    /// Decode candidate `counter` into per-variable bit vectors over the
    /// unrolled states.
    fn candidate_bits(&self, vars: &[u32], counter: u64) -> BitValuation {
        let n = self.engine.graph().state_count();
        let q = self.quotient_count();
        let pairs = vars.iter().enumerate().map(|(vi, &var)| {
            let offset = vi * q;
            let mut bits = Bits::zeros(n);
            for (state, &pos) in self.quotient_pos.iter().enumerate() {
                if counter >> (offset + pos) & 1 == 1 {
                    bits.set(state, true);
                }
            }
            (var, bits)
        });
        BitValuation::from_pairs(n, pairs.collect::<Vec<_>>())
    }

    fn candidate_valuation(&self, vars: &[u32], counter: u64) -> Valuation {
        let q = self.quotient_count();
        let mut valuation = Valuation::new();
        for (vi, &var) in vars.iter().enumerate() {
            let offset = vi * q;
            for (pos, state) in self.readout_refs.iter().enumerate() {
                if counter >> (offset + pos) & 1 == 1 {
                    valuation.add(var, state.clone());
                }
            }
        }
        valuation
    }
}

fn frame_horizon(spec: &FrameSpec, weight: usize) -> usize {
    match spec.loop_to {
        None => spec.time_len(),
        Some(prefix) => prefix + (weight + 2) * (spec.time_len() - prefix),
    }
}

fn candidate_count(var_count: usize, quotient_states: usize) -> u64 {
    let bits = var_count * quotient_states;
    if bits >= 63 {
        u64::MAX
    } else {
        1u64 << bits
    }
}

/// Search one frame for up to `limit` candidates; returns the counter and
/// witness readout position.
fn search_frame(
    spec: &FrameSpec,
    query: &Query<'_>,
    vars: &[u32],
    weight: usize,
    bridge_gaps: bool,
    limit: u64,
) -> Option<(u64, usize)> {
    let horizon = frame_horizon(spec, weight);
    let graph = frames::unroll(spec, horizon, UnrollOptions { bridge_gaps })
        .expect("enumerated frames are valid");
    let search = FrameSearch::new(&graph);
    for counter in 0..limit {
        let var_bits = search.candidate_bits(vars, counter);
        if let Some(pos) = query.check(&search.engine, &search.readout, &var_bits) {
            return Some((counter, pos));
        }
    }
    None
}

const CHUNK: usize = 64;

fn run_search(query: Query<'_>, bounds: &SearchBounds) -> Result<SearchOutcome, SearchError> {
    let agents = bounds
        .agents
        .unwrap_or_else(|| (query.max_agent() as usize).max(1));
    let enum_bounds = SearchBounds { agents: Some(agents), ..bounds.clone() };
    let vars = query.variables();
    let weight = query.temporal_weight();
    let specs: Vec<FrameSpec> = enumerate_frames(&enum_bounds).collect();
    let counts: Vec<u64> = specs
        .iter()
        .map(|s| candidate_count(vars.len(), s.state_refs().len()))
        .collect();

    let cap = bounds.candidate_cap;
    let mut candidates_before: u64 = 0;
    let mut boundary = specs.len();
    let mut full_until = specs.len();
    for (i, &c) in counts.iter().enumerate() {
        if candidates_before.saturating_add(c) > cap {
            full_until = i;
            boundary = i;
            break;
        }
        candidates_before = candidates_before.saturating_add(c);
    }

    let mut processed: u64 = 0;
    let mut frames_checked: u64 = 0;
    let mut found: Option<(usize, u64, usize)> = None;

    'outer: for chunk_start in (0..full_until).step_by(CHUNK) {
        let chunk_end = (chunk_start + CHUNK).min(full_until);
        let results: Vec<Option<(u64, usize)>> = specs[chunk_start..chunk_end]
            .par_iter()
            .enumerate()
            .map(|(i, spec)| {
                search_frame(
                    spec,
                    &query,
                    &vars,
                    weight,
                    bounds.bridge_gaps,
                    counts[chunk_start + i],
                )
            })
            .collect();
        for (i, result) in results.into_iter().enumerate() {
            let frame_index = chunk_start + i;
            frames_checked += 1;
            if let Some((counter, pos)) = result {
                processed = processed.saturating_add(counter + 1);
                found = Some((frame_index, counter, pos));
                break 'outer;
            }
            processed = processed.saturating_add(counts[frame_index]);
        }
    }

    if found.is_none() && boundary < specs.len() {
        // The budget ends inside this frame: try what remains of it.
        let budget = cap.saturating_sub(processed);
        frames_checked += 1;
        if let Some((counter, pos)) = search_frame(
            &specs[boundary],
            &query,
            &vars,
            weight,
            bounds.bridge_gaps,
            budget,
        ) {
            processed = processed.saturating_add(counter + 1);
            found = Some((boundary, counter, pos));
        } else {
            return Err(SearchError::CapExceeded {
                cap,
                candidates: processed.saturating_add(budget),
                frames: frames_checked,
            });
        }
    }

    match found {
        Some((frame_index, counter, pos)) => {
            let spec = &specs[frame_index];
            let graph = frames::unroll(
                spec,
                frame_horizon(spec, weight),
                UnrollOptions { bridge_gaps: bounds.bridge_gaps },
            )
            .expect("enumerated frames are valid");
            let search = FrameSearch::new(&graph);
            let valuation = search.candidate_valuation(&vars, counter);
            let state = search.readout_refs[pos].clone();
            let model = Model { spec: spec.clone(), valuation };
            Ok(SearchOutcome {
                verdict: Verdict::Witness { model, state },
                bounds: bounds.clone(),
                frames_checked,
                candidates_checked: processed,
            })
        }
        None => Ok(SearchOutcome {
            verdict: Verdict::Exhausted,
            bounds: bounds.clone(),
            frames_checked,
            candidates_checked: processed,
        }),
    }
}

/// Search for a model and state making `f` true.
pub fn sat_bounded(f: &Formula, bounds: &SearchBounds) -> Result<SearchOutcome, SearchError> {
    run_search(Query::FormulaWhere { f, want: true }, bounds)
}

/// Search for a countermodel of `f`: a model and state where `f` fails.
/// `Exhausted` means "no countermodel within bounds", not validity.
pub fn theorem_bounded(f: &Formula, bounds: &SearchBounds) -> Result<SearchOutcome, SearchError> {
    run_search(Query::FormulaWhere { f, want: false }, bounds)
}

/// Search for a model refuting the rule: premises valid everywhere, the
/// conclusion failing at the witness state.
pub fn refute_rule_bounded(
    rule: &InferenceRule,
    bounds: &SearchBounds,
) -> Result<SearchOutcome, SearchError> {
    run_search(Query::RuleRefutation { rule }, bounds)
}

/// Rule refutation for reduced rules, searching valuations of the reduced
/// rule's own variables.
pub fn refute_rnf_bounded(
    rnf: &ReducedNormalFormRule,
    bounds: &SearchBounds,
) -> Result<SearchOutcome, SearchError> {
    let rows: HashSet<Vec<bool>> = rnf.disjuncts.iter().cloned().collect();
    run_search(Query::RnfRefutation { rnf, rows }, bounds)
}
