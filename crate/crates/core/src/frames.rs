//! Finite frame descriptions and their unrolling into explicit graphs.
//!
//! A frame is a sequence of time clusters with gaps between consecutive
//! clusters filled by collections of chains. Each cluster carries the
//! universal temporal relation and one equivalence relation per agent,
//! stored as a partition. Time runs forever; finitely many time indices
//! are described either as a loop-free prefix or as a lasso (prefix plus
//! loop back-edge), and [`unroll`] materializes a chosen number of copies
//! with all relations as explicit edge sets.

use crate::relation::{Bits, Relation};
use crate::semantics::{Model, Valuation};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;
use thiserror::Error;

/// A set of states with one partition per agent.
///
/// The `j`-th partition encodes agent `j+1`'s equivalence relation: two
/// states are related exactly when they share a block. The temporal
/// relation inside a cluster is always universal and is never stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub states: Vec<String>,
    pub partitions: Vec<Vec<Vec<String>>>,
}

/// A nonempty ordered sequence of clusters filling a gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub clusters: Vec<Cluster>,
}

/// The (possibly empty) collection of chains sitting between two
/// consecutive time clusters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub chains: Vec<Chain>,
}

/// Finite description of a frame.
///
/// `gaps[i]` sits between time clusters `i` and `i+1`; when `loop_to` is
/// set the final gap sits between the last time cluster and the loop
/// target, making the frame ultimately periodic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub agents: usize,
    pub time_clusters: Vec<Cluster>,
    pub gaps: Vec<Gap>,
    #[serde(rename = "loop")]
    pub loop_to: Option<usize>,
}

impl FrameSpec {
    pub fn time_len(&self) -> usize {
        self.time_clusters.len()
    }

    /// Loop prefix length; only meaningful on lasso frames.
    pub fn prefix(&self) -> Option<usize> {
        self.loop_to
    }

    /// Loop period; only meaningful on lasso frames.
    pub fn period(&self) -> Option<usize> {
        self.loop_to.map(|l| self.time_len() - l)
    }

    /// Time-cluster index realized by unrolling copy `t`.
    pub fn realized(&self, t: usize) -> usize {
        let len = self.time_len();
        if t < len {
            return t;
        }
        match self.loop_to {
            Some(l) => l + (t - l) % (len - l),
            None => panic!("copy {t} beyond a loop-free frame of length {len}"),
        }
    }

    /// Total number of states over all clusters of the description.
    pub fn state_count(&self) -> usize {
        let chain_states: usize = self
            .gaps
            .iter()
            .flat_map(|g| &g.chains)
            .flat_map(|c| &c.clusters)
            .map(|c| c.states.len())
            .sum::<usize>();
        self.time_clusters.iter().map(|c| c.states.len()).sum::<usize>() + chain_states
    }

    /// All quotient states of the description, in canonical order.
    pub fn state_refs(&self) -> Vec<StateRef> {
        let mut out = Vec::new();
        for (i, c) in self.time_clusters.iter().enumerate() {
            for name in &c.states {
                out.push(StateRef::Time { cluster: i, name: name.clone() });
            }
        }
        for (g, gap) in self.gaps.iter().enumerate() {
            for (ci, chain) in gap.chains.iter().enumerate() {
                for (p, cluster) in chain.clusters.iter().enumerate() {
                    for name in &cluster.states {
                        out.push(StateRef::Chain {
                            gap: g,
                            chain: ci,
                            pos: p,
                            name: name.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    fn cluster_at(&self, r: &StateRef) -> Option<&Cluster> {
        match r {
            StateRef::Time { cluster, .. } => self.time_clusters.get(*cluster),
            StateRef::Chain { gap, chain, pos, .. } => self
                .gaps
                .get(*gap)
                .and_then(|g| g.chains.get(*chain))
                .and_then(|c| c.clusters.get(*pos)),
        }
    }

    /// Whether `r` names an existing state of this description.
    pub fn contains_state(&self, r: &StateRef) -> bool {
        let name = match r {
            StateRef::Time { name, .. } | StateRef::Chain { name, .. } => name,
        };
        self.cluster_at(r)
            .is_some_and(|c| c.states.iter().any(|s| s == name))
    }
}

/// Locator of a state inside a [`FrameSpec`], independent of unrolling.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateRef {
    Time { cluster: usize, name: String },
    Chain { gap: usize, chain: usize, pos: usize, name: String },
}

impl fmt::Display for StateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateRef::Time { cluster, name } => write!(f, "t{cluster}.{name}"),
            StateRef::Chain { gap, chain, pos, name } => {
                write!(f, "g{gap}.{chain}.{pos}.{name}")
            }
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("malformed state name '{0}': expected 't<i>.<name>' or 'g<gap>.<chain>.<pos>.<name>'")]
pub struct BadStateName(pub String);

impl FromStr for StateRef {
    type Err = BadStateName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadStateName(s.to_string());
        if let Some(rest) = s.strip_prefix('t') {
            let (idx, name) = rest.split_once('.').ok_or_else(bad)?;
            let cluster = idx.parse().map_err(|_| bad())?;
            if name.is_empty() {
                return Err(bad());
            }
            return Ok(StateRef::Time { cluster, name: name.to_string() });
        }
        if let Some(rest) = s.strip_prefix('g') {
            let mut it = rest.splitn(4, '.');
            let gap = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let chain = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let pos = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let name = it.next().ok_or_else(bad)?;
            if name.is_empty() {
                return Err(bad());
            }
            return Ok(StateRef::Chain { gap, chain, pos, name: name.to_string() });
        }
        Err(bad())
    }
}

/// One invariant violation found by [`validate`], with its location in
/// the description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

pub fn render_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

fn validate_cluster(cluster: &Cluster, agents: usize, location: &str, out: &mut Vec<Violation>) {
    let mut push = |message: String| {
        out.push(Violation { location: location.to_string(), message });
    };
    if cluster.states.is_empty() {
        push("cluster has no states".into());
    }
    let mut seen = BTreeSet::new();
    for name in &cluster.states {
        if name.is_empty() {
            push("empty state name".into());
        }
        if !seen.insert(name) {
            push(format!("duplicate state name '{name}'"));
        }
    }
    if cluster.partitions.len() != agents {
        push(format!(
            "expected {agents} partitions (one per agent), found {}",
            cluster.partitions.len()
        ));
    }
    for (j, partition) in cluster.partitions.iter().enumerate() {
        let loc = format!("{location}.partition{j}");
        let mut push = |message: String| out.push(Violation { location: loc.clone(), message });
        let mut covered = BTreeSet::new();
        for block in partition {
            if block.is_empty() {
                push("empty block".into());
            }
            for name in block {
                if !cluster.states.contains(name) {
                    push(format!("block mentions unknown state '{name}'"));
                } else if !covered.insert(name) {
                    push(format!("blocks not disjoint: state '{name}' appears twice"));
                }
            }
        }
        for name in &cluster.states {
            if !covered.contains(name) {
                push(format!("state '{name}' not covered by any block"));
            }
        }
    }
}

/// Check every structural invariant of a description; an empty result
/// means the description is well-formed.
pub fn validate(spec: &FrameSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if spec.agents == 0 {
        out.push(Violation {
            location: "agents".into(),
            message: "must be at least 1".into(),
        });
    }
    let len = spec.time_len();
    if len == 0 {
        out.push(Violation {
            location: "time_clusters".into(),
            message: "must contain at least one cluster".into(),
        });
    }
    if let Some(l) = spec.loop_to {
        if l >= len {
            out.push(Violation {
                location: "loop".into(),
                message: format!("loop index {l} out of range for {len} time clusters"),
            });
        }
    }
    let expected_gaps = if spec.loop_to.is_some() { len } else { len.saturating_sub(1) };
    if spec.gaps.len() != expected_gaps {
        out.push(Violation {
            location: "gaps".into(),
            message: format!("expected {expected_gaps} gaps, found {}", spec.gaps.len()),
        });
    }
    for (i, cluster) in spec.time_clusters.iter().enumerate() {
        validate_cluster(cluster, spec.agents, &format!("t{i}"), &mut out);
    }
    for (g, gap) in spec.gaps.iter().enumerate() {
        for (c, chain) in gap.chains.iter().enumerate() {
            if chain.clusters.is_empty() {
                out.push(Violation {
                    location: format!("g{g}.{c}"),
                    message: "chain has no clusters".into(),
                });
            }
            for (p, cluster) in chain.clusters.iter().enumerate() {
                validate_cluster(cluster, spec.agents, &format!("g{g}.{c}.{p}"), &mut out);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct UnrollOptions {
    /// Whether the temporal step relation contains the direct pairs
    /// between consecutive time clusters. Disabling this leaves empty
    /// gaps temporally disconnected.
    pub bridge_gaps: bool,
}

impl Default for UnrollOptions {
    fn default() -> Self {
        UnrollOptions { bridge_gaps: true }
    }
}

#[derive(Debug, Error)]
pub enum UnrollError {
    #[error("horizon must be positive")]
    ZeroHorizon,
    #[error("horizon {horizon} exceeds the {len} time clusters of a loop-free frame")]
    HorizonBeyondFrame { horizon: usize, len: usize },
    #[error("invalid frame: {}", render_violations(.0))]
    InvalidSpec(Vec<Violation>),
}

/// An explicit finite unrolling of a frame.
///
/// States are indexed densely; copy `t` realizes time cluster
/// `spec.realized(t)`, and the gap instance after copy `t` realizes gap
/// `realized(t)`. The temporal relations are exposed as explicit edge
/// sets: `q_rel` is the one-step relation, `r_rel` its transitive
/// closure, `r_strict` the non-symmetric part of `r_rel`, and `next_rel`
/// the tomorrow relation.
#[derive(Debug)]
pub struct UnrolledGraph {
    horizon: usize,
    time_len: usize,
    gap_count: usize,
    states: Vec<(StateRef, usize)>,
    cluster_of: Vec<usize>,
    cluster_members: Vec<Vec<usize>>,
    cluster_bits: Vec<Bits>,
    component_of: Vec<usize>,
    component_members: Vec<Vec<usize>>,
    block_of: Vec<Vec<usize>>,
    block_members: Vec<Vec<Vec<usize>>>,
    time_states: Vec<Vec<usize>>,
    frontier: Vec<Option<usize>>,
    readout: Vec<usize>,
    q_rel: Relation,
    next_rel: Relation,
    agent_rel: Vec<Relation>,
    cluster_q: Relation,
    closure: OnceLock<(Relation, Relation)>,
}

impl UnrolledGraph {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// `(quotient state, copy)` for every unrolled state in index order.
    pub fn states(&self) -> &[(StateRef, usize)] {
        &self.states
    }

    pub fn state_ref(&self, index: usize) -> &StateRef {
        &self.states[index].0
    }

    pub fn copy_of(&self, index: usize) -> usize {
        self.states[index].1
    }

    /// One-step temporal relation `Q`.
    pub fn q_rel(&self) -> &Relation {
        &self.q_rel
    }

    /// Tomorrow relation.
    pub fn next_rel(&self) -> &Relation {
        &self.next_rel
    }

    /// Agent `j`'s equivalence relation (1-based).
    pub fn agent_rel(&self, agent: usize) -> &Relation {
        &self.agent_rel[agent - 1]
    }

    pub fn agent_count(&self) -> usize {
        self.agent_rel.len()
    }

    /// Temporal accessibility `R`, the transitive closure of `Q`.
    pub fn r_rel(&self) -> &Relation {
        &self.closure().0
    }

    /// Strict part of `R`: forward but not backward.
    pub fn r_strict(&self) -> &Relation {
        &self.closure().1
    }

    fn closure(&self) -> &(Relation, Relation) {
        self.closure.get_or_init(|| {
            // Every cross-cluster Q edge group is a full bipartite block, so
            // R factors exactly through reachability between cluster copies.
            let n = self.state_count();
            let reach = self.cluster_q.transitive_closure();
            let mut cluster_rows: Vec<Bits> = self.cluster_bits.clone();
            for (cid, row) in cluster_rows.iter_mut().enumerate() {
                for d in reach.row(cid).iter_ones() {
                    row.or_in(&self.cluster_bits[d]);
                }
            }
            let mut r = Relation::empty(n);
            let mut strict = Relation::empty(n);
            for a in 0..n {
                let cid = self.cluster_of[a];
                r.or_into_row(a, &cluster_rows[cid]);
                for d in reach.row(cid).iter_ones() {
                    if d != cid {
                        strict.or_into_row(a, &self.cluster_bits[d]);
                    }
                }
            }
            (r, strict)
        })
    }

    /// Cluster-copy id of a state; two states share a cluster exactly when
    /// the ids are equal.
    pub fn cluster_of(&self, index: usize) -> usize {
        self.cluster_of[index]
    }

    pub fn cluster_members(&self, cluster_id: usize) -> &[usize] {
        &self.cluster_members[cluster_id]
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_members.len()
    }

    /// Interaction component id of a state: the class of states reachable
    /// by chaining agent relations inside the state's cluster.
    pub fn component_of(&self, index: usize) -> usize {
        self.component_of[index]
    }

    pub fn component_members(&self, component_id: usize) -> &[usize] {
        &self.component_members[component_id]
    }

    pub fn component_count(&self) -> usize {
        self.component_members.len()
    }

    /// Block id of a state in agent `j`'s partition (1-based agent).
    pub fn block_of(&self, agent: usize, index: usize) -> usize {
        self.block_of[agent - 1][index]
    }

    pub fn block_members(&self, agent: usize, block_id: usize) -> &[usize] {
        &self.block_members[agent - 1][block_id]
    }

    pub fn block_count(&self, agent: usize) -> usize {
        self.block_members[agent - 1].len()
    }

    /// Time-cluster states of copy `t`.
    pub fn time_states(&self, copy: usize) -> &[usize] {
        &self.time_states[copy]
    }

    /// Copy index of the next time frontier of a state, if it exists
    /// within the horizon.
    pub fn frontier_of(&self, index: usize) -> Option<usize> {
        self.frontier[index]
    }

    /// Canonical realization of every quotient state: time cluster `i` at
    /// copy `i`, gap `g` at gap instance `g`. Complete when the horizon
    /// covers the whole description.
    pub fn readout_indices(&self) -> &[usize] {
        &self.readout
    }

    /// Whether the readout window realizes every quotient state.
    pub fn readout_complete(&self) -> bool {
        let time_ok = self.horizon >= self.time_len;
        let gaps_ok = self.gap_count == 0 || self.horizon >= self.gap_count + 1;
        time_ok && gaps_ok
    }

    pub fn index_of(&self, state: &StateRef, copy: usize) -> Option<usize> {
        self.states
            .iter()
            .position(|(r, t)| *t == copy && r == state)
    }
}

/// `(R^<)^k`: exactly `k` compositions of the strict temporal relation,
/// the identity relation when `k = 0`.
pub fn strict_power(graph: &UnrolledGraph, k: usize) -> Relation {
    graph.r_strict().power(k)
}

/// Materialize `horizon` copies of the frame with all relations.
pub fn unroll(
    spec: &FrameSpec,
    horizon: usize,
    options: UnrollOptions,
) -> Result<UnrolledGraph, UnrollError> {
    if horizon == 0 {
        return Err(UnrollError::ZeroHorizon);
    }
    let violations = validate(spec);
    if !violations.is_empty() {
        return Err(UnrollError::InvalidSpec(violations));
    }
    let time_len = spec.time_len();
    if spec.loop_to.is_none() && horizon > time_len {
        return Err(UnrollError::HorizonBeyondFrame { horizon, len: time_len });
    }

    let mut states: Vec<(StateRef, usize)> = Vec::new();
    let mut cluster_of: Vec<usize> = Vec::new();
    let mut cluster_members: Vec<Vec<usize>> = Vec::new();
    // Per cluster copy: the source cluster in the description.
    let mut cluster_source: Vec<&Cluster> = Vec::new();
    let mut time_states: Vec<Vec<usize>> = vec![Vec::new(); horizon];
    // Gap instance t holds the ids of its chain-cluster copies, in
    // (chain, position) order.
    let mut gap_instance_clusters: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    let mut time_cluster_id: Vec<usize> = Vec::new();

    let add_cluster = |cluster: &'_ Cluster,
                           make_ref: &dyn Fn(&str) -> StateRef,
                           copy: usize,
                           states: &mut Vec<(StateRef, usize)>,
                           cluster_of: &mut Vec<usize>,
                           cluster_members: &mut Vec<Vec<usize>>|
     -> usize {
        let cid = cluster_members.len();
        let mut members = Vec::with_capacity(cluster.states.len());
        for name in &cluster.states {
            let idx = states.len();
            states.push((make_ref(name), copy));
            cluster_of.push(cid);
            members.push(idx);
        }
        cluster_members.push(members);
        cid
    };

    // SAFETY of indices: clusters are appended copy by copy, so ids are
    // stable and `cluster_source` lines up with `cluster_members`.
    let mut sources: Vec<&Cluster> = Vec::new();
    for t in 0..horizon {
        let ri = spec.realized(t);
        let time_cluster = &spec.time_clusters[ri];
        let cid = add_cluster(
            time_cluster,
            &|name| StateRef::Time { cluster: ri, name: name.to_string() },
            t,
            &mut states,
            &mut cluster_of,
            &mut cluster_members,
        );
        sources.push(time_cluster);
        time_cluster_id.push(cid);
        time_states[t] = cluster_members[cid].clone();

        if t + 1 < horizon {
            let g = ri; // gap after cluster ri, the loop gap when ri is last
            let mut instance = Vec::new();
            for (ci, chain) in spec.gaps[g].chains.iter().enumerate() {
                for (p, cluster) in chain.clusters.iter().enumerate() {
                    let cid = add_cluster(
                        cluster,
                        &|name| StateRef::Chain {
                            gap: g,
                            chain: ci,
                            pos: p,
                            name: name.to_string(),
                        },
                        t,
                        &mut states,
                        &mut cluster_of,
                        &mut cluster_members,
                    );
                    sources.push(cluster);
                    instance.push((ci, p, cid));
                }
            }
            gap_instance_clusters.push(instance);
        }
    }
    cluster_source.extend(sources);

    let n = states.len();
    let cluster_count = cluster_members.len();
    let cluster_bits: Vec<Bits> = cluster_members
        .iter()
        .map(|members| {
            let mut bits = Bits::zeros(n);
            for &s in members {
                bits.set(s, true);
            }
            bits
        })
        .collect();

    let mut q_rel = Relation::empty(n);
    let mut next_rel = Relation::empty(n);
    let mut cluster_q = Relation::empty(cluster_count);

    // Universal temporal relation inside every cluster copy.
    for (cid, members) in cluster_members.iter().enumerate() {
        for &a in members {
            q_rel.or_into_row(a, &cluster_bits[cid]);
        }
    }

    let connect = |q_rel: &mut Relation, cluster_q: &mut Relation, from: usize, to: usize| {
        for &a in &cluster_members[from] {
            q_rel.or_into_row(a, &cluster_bits[to]);
        }
        cluster_q.insert(from, to);
    };

    for t in 0..horizon.saturating_sub(1) {
        let here = time_cluster_id[t];
        let there = time_cluster_id[t + 1];
        let instance = &gap_instance_clusters[t];

        // Chain-internal forward steps and the entry/exit edges of each chain.
        let mut by_chain: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for &(ci, p, cid) in instance {
            by_chain.entry(ci).or_default().push((p, cid));
        }
        for chain_clusters in by_chain.values() {
            for (i, &(_, from_cid)) in chain_clusters.iter().enumerate() {
                for &(_, to_cid) in &chain_clusters[i + 1..] {
                    connect(&mut q_rel, &mut cluster_q, from_cid, to_cid);
                }
            }
            let first = chain_clusters.first().unwrap().1;
            let last = chain_clusters.last().unwrap().1;
            connect(&mut q_rel, &mut cluster_q, here, first);
            connect(&mut q_rel, &mut cluster_q, last, there);
        }
        if options.bridge_gaps {
            connect(&mut q_rel, &mut cluster_q, here, there);
        }

        // Tomorrow: time states and all chain states of this gap step to
        // every state of the next time cluster, and nowhere else.
        for &a in &cluster_members[here] {
            next_rel.or_into_row(a, &cluster_bits[there]);
        }
        for &(_, _, cid) in instance {
            for &a in &cluster_members[cid] {
                next_rel.or_into_row(a, &cluster_bits[there]);
            }
        }
    }

    // Agent equivalences: block structure per cluster copy.
    let agents = spec.agents;
    let mut agent_rel = vec![Relation::empty(n); agents];
    let mut block_of = vec![vec![usize::MAX; n]; agents];
    let mut block_members: Vec<Vec<Vec<usize>>> = vec![Vec::new(); agents];
    for (cid, members) in cluster_members.iter().enumerate() {
        let cluster = cluster_source[cid];
        let name_to_index: BTreeMap<&str, usize> = cluster
            .states
            .iter()
            .enumerate()
            .map(|(i, name)| (name.as_str(), members[i]))
            .collect();
        for (j, partition) in cluster.partitions.iter().enumerate() {
            for block in partition {
                let block_id = block_members[j].len();
                let mut ids: Vec<usize> = block.iter().map(|name| name_to_index[name.as_str()]).collect();
                ids.sort_unstable();
                let mut bits = Bits::zeros(n);
                for &s in &ids {
                    bits.set(s, true);
                    block_of[j][s] = block_id;
                }
                for &s in &ids {
                    agent_rel[j].or_into_row(s, &bits);
                }
                block_members[j].push(ids);
            }
        }
    }

    // Interaction components: union of all agents' blocks within a cluster.
    let mut component_of = vec![usize::MAX; n];
    let mut component_members: Vec<Vec<usize>> = Vec::new();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, a: usize) -> usize {
        if parent[a] != a {
            let root = find(parent, parent[a]);
            parent[a] = root;
        }
        parent[a]
    }
    for blocks in &block_members {
        for block in blocks {
            for window in block.windows(2) {
                let ra = find(&mut parent, window[0]);
                let rb = find(&mut parent, window[1]);
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    for a in 0..n {
        let root = find(&mut parent, a);
        if component_of[root] == usize::MAX {
            component_of[root] = component_members.len();
            component_members.push(Vec::new());
        }
        component_of[a] = component_of[root];
        component_members[component_of[a]].push(a);
    }

    // Next frontier per state: copy t+1 for time states of copy t and for
    // chain states of gap instance t; none at the final copy.
    let mut frontier = vec![None; n];
    for (idx, &(ref _r, t)) in states.iter().enumerate() {
        if t + 1 < horizon {
            frontier[idx] = Some(t + 1);
        }
    }

    // Canonical realization: time cluster i at copy i, gap g at instance g.
    let mut readout = Vec::new();
    for t in 0..horizon.min(time_len) {
        readout.extend(time_states[t].iter().copied());
        if t < gap_instance_clusters.len() && t < spec.gaps.len() {
            for &(_, _, cid) in &gap_instance_clusters[t] {
                readout.extend(cluster_members[cid].iter().copied());
            }
        }
    }

    Ok(UnrolledGraph {
        horizon,
        time_len,
        gap_count: spec.gaps.len(),
        states,
        cluster_of,
        cluster_members,
        cluster_bits,
        component_of,
        component_members,
        block_of,
        block_members,
        time_states,
        frontier,
        readout,
        q_rel,
        next_rel,
        agent_rel,
        cluster_q,
        closure: OnceLock::new(),
    })
}

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed model file: {message} (line {line}, column {column})")]
    Json { line: usize, column: usize, message: String },
    #[error("bad valuation key '{0}': expected 'x<i>' with i >= 1")]
    BadVariableKey(String),
    #[error("unknown state '{name}' in valuation of {var}")]
    UnknownState { var: String, name: String },
    #[error("invalid frame: {}", render_violations(.0))]
    InvalidSpec(Vec<Violation>),
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    agents: usize,
    time_clusters: Vec<Cluster>,
    gaps: Vec<Gap>,
    #[serde(rename = "loop")]
    loop_to: Option<usize>,
    valuation: BTreeMap<String, Vec<String>>,
}

fn model_from_file(file: ModelFile) -> Result<Model, ModelIoError> {
    let spec = FrameSpec {
        agents: file.agents,
        time_clusters: file.time_clusters,
        gaps: file.gaps,
        loop_to: file.loop_to,
    };
    let violations = validate(&spec);
    if !violations.is_empty() {
        return Err(ModelIoError::InvalidSpec(violations));
    }
    let mut valuation = Valuation::new();
    for (key, names) in file.valuation {
        let var: u32 = key
            .strip_prefix('x')
            .and_then(|rest| rest.parse().ok())
            .filter(|&v| v >= 1)
            .ok_or_else(|| ModelIoError::BadVariableKey(key.clone()))?;
        let mut set = BTreeSet::new();
        for name in names {
            let state: StateRef = name
                .parse()
                .map_err(|_| ModelIoError::UnknownState { var: key.clone(), name: name.clone() })?;
            if !spec.contains_state(&state) {
                return Err(ModelIoError::UnknownState { var: key, name });
            }
            set.insert(state);
        }
        valuation.insert(var, set);
    }
    Ok(Model { spec, valuation })
}

fn model_to_file(model: &Model) -> ModelFile {
    ModelFile {
        agents: model.spec.agents,
        time_clusters: model.spec.time_clusters.clone(),
        gaps: model.spec.gaps.clone(),
        loop_to: model.spec.loop_to,
        valuation: model
            .valuation
            .iter()
            .map(|(var, states)| {
                (format!("x{var}"), states.iter().map(StateRef::to_string).collect())
            })
            .collect(),
    }
}

/// Parse a model from its JSON document.
pub fn model_from_json(text: &str) -> Result<Model, ModelIoError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| ModelIoError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    model_from_file(file)
}

/// Serialize a model to its JSON document.
pub fn model_to_json(model: &Model) -> serde_json::Value {
    serde_json::to_value(model_to_file(model)).expect("model serialization cannot fail")
}

/// Load a model file from disk.
pub fn load_model(path: impl AsRef<Path>) -> Result<Model, ModelIoError> {
    let text = std::fs::read_to_string(path)?;
    model_from_json(&text)
}

/// Write a model file to disk, pretty-printed.
pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<(), ModelIoError> {
    let json = serde_json::to_string_pretty(&model_to_file(model)).expect("serialization");
    std::fs::write(path, json + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn singleton_cluster(name: &str, agents: usize) -> Cluster {
        Cluster {
            states: vec![name.to_string()],
            partitions: vec![vec![vec![name.to_string()]]; agents],
        }
    }

    fn two_state_cluster(one_block: bool) -> Cluster {
        let partition = if one_block {
            vec![vec!["a".to_string(), "b".to_string()]]
        } else {
            vec![vec!["a".to_string()], vec!["b".to_string()]]
        };
        Cluster {
            states: vec!["a".to_string(), "b".to_string()],
            partitions: vec![partition],
        }
    }

    fn spec_of(time_clusters: Vec<Cluster>, gaps: Vec<Gap>, loop_to: Option<usize>) -> FrameSpec {
        FrameSpec { agents: 1, time_clusters, gaps, loop_to }
    }

    #[test]
    fn singleton_frame_is_valid() {
        let spec = spec_of(vec![singleton_cluster("a", 1)], vec![], None);
        assert!(validate(&spec).is_empty());
    }

    #[test]
    fn overlapping_blocks_are_reported() {
        let cluster = Cluster {
            states: vec!["a".into(), "b".into()],
            partitions: vec![vec![vec!["a".into()], vec!["a".into(), "b".into()]]],
        };
        let spec = spec_of(vec![cluster], vec![], None);
        let violations = validate(&spec);
        assert!(violations.iter().any(|v| v.message.contains("not disjoint")));
        assert!(violations.iter().any(|v| v.location == "t0.partition0"));
    }

    #[test]
    fn loop_index_out_of_range_is_reported() {
        let spec = spec_of(
            vec![singleton_cluster("a", 1), singleton_cluster("b", 1)],
            vec![Gap { chains: vec![] }, Gap { chains: vec![] }],
            Some(2),
        );
        let violations = validate(&spec);
        assert!(violations.iter().any(|v| v.location == "loop"));
    }

    #[test]
    fn single_cluster_has_universal_r_and_empty_strict() {
        let spec = spec_of(vec![two_state_cluster(true)], vec![], None);
        let g = unroll(&spec, 1, UnrollOptions::default()).unwrap();
        assert_eq!(g.state_count(), 2);
        assert_eq!(g.r_rel().pair_count(), 4);
        assert_eq!(g.r_strict().pair_count(), 0);
    }

    #[test]
    fn chainless_two_cluster_frame() {
        let spec = spec_of(
            vec![two_state_cluster(true), two_state_cluster(false)],
            vec![Gap { chains: vec![] }],
            None,
        );
        let g = unroll(&spec, 2, UnrollOptions::default()).unwrap();
        // next = C(0) x C(1)
        for &a in g.time_states(0) {
            for &b in g.time_states(1) {
                assert!(g.next_rel().contains(a, b));
                assert!(g.r_strict().contains(a, b));
            }
        }
        assert_eq!(g.next_rel().pair_count(), 4);
    }

    #[test]
    fn chain_states_are_not_next_successors() {
        let chain = Chain { clusters: vec![singleton_cluster("c", 1)] };
        let spec = spec_of(
            vec![two_state_cluster(true), two_state_cluster(true)],
            vec![Gap { chains: vec![chain] }],
            None,
        );
        let g = unroll(&spec, 2, UnrollOptions::default()).unwrap();
        let chain_state = g
            .states()
            .iter()
            .position(|(r, _)| matches!(r, StateRef::Chain { .. }))
            .unwrap();
        for &a in g.time_states(0) {
            // Q steps into the chain, Next does not.
            assert!(g.q_rel().contains(a, chain_state));
            assert!(!g.next_rel().contains(a, chain_state));
            for &b in g.time_states(1) {
                assert!(g.next_rel().contains(a, b));
            }
        }
        for &b in g.time_states(1) {
            assert!(g.q_rel().contains(chain_state, b));
            assert!(g.next_rel().contains(chain_state, b));
        }
    }

    #[test]
    fn strict_power_examples() {
        let spec = spec_of(
            vec![
                two_state_cluster(true),
                two_state_cluster(true),
                two_state_cluster(true),
            ],
            vec![Gap { chains: vec![] }, Gap { chains: vec![] }],
            None,
        );
        let g = unroll(&spec, 3, UnrollOptions::default()).unwrap();
        assert_eq!(strict_power(&g, 0), Relation::identity(g.state_count()));
        assert_eq!(&strict_power(&g, 1), g.r_strict());
        let sq = strict_power(&g, 2);
        // Exactly the pairs from C(0) to C(2).
        let mut expected = Relation::empty(g.state_count());
        for &a in g.time_states(0) {
            for &b in g.time_states(2) {
                expected.insert(a, b);
            }
        }
        assert_eq!(sq, expected);
    }

    #[test]
    fn loop_free_horizon_is_bounded() {
        let spec = spec_of(vec![two_state_cluster(true)], vec![], None);
        assert!(matches!(
            unroll(&spec, 2, UnrollOptions::default()),
            Err(UnrollError::HorizonBeyondFrame { .. })
        ));
        assert!(matches!(
            unroll(&spec, 0, UnrollOptions::default()),
            Err(UnrollError::ZeroHorizon)
        ));
    }

    #[test]
    fn lasso_copies_realize_looped_indices() {
        let spec = spec_of(
            vec![two_state_cluster(true), two_state_cluster(false)],
            vec![Gap { chains: vec![] }, Gap { chains: vec![] }],
            Some(1),
        );
        assert_eq!(spec.realized(0), 0);
        assert_eq!(spec.realized(1), 1);
        assert_eq!(spec.realized(2), 1);
        assert_eq!(spec.realized(5), 1);
        let g = unroll(&spec, 4, UnrollOptions::default()).unwrap();
        assert!(g.readout_complete());
        for copy in 2..4 {
            for &s in g.time_states(copy) {
                assert!(matches!(g.state_ref(s), StateRef::Time { cluster: 1, .. }));
            }
        }
    }

    #[test]
    fn bridging_can_be_disabled() {
        let spec = spec_of(
            vec![two_state_cluster(true), two_state_cluster(true)],
            vec![Gap { chains: vec![] }],
            None,
        );
        let g = unroll(&spec, 2, UnrollOptions { bridge_gaps: false }).unwrap();
        for &a in g.time_states(0) {
            for &b in g.time_states(1) {
                assert!(!g.r_rel().contains(a, b));
                // Next is untouched by the bridging choice.
                assert!(g.next_rel().contains(a, b));
            }
        }
    }

    #[test]
    fn state_names_round_trip() {
        for name in ["t0.a", "t12.long_name", "g0.0.0.c", "g3.1.2.x.y"] {
            let parsed: StateRef = name.parse().unwrap();
            assert_eq!(parsed.to_string(), name);
        }
        assert!("plainname".parse::<StateRef>().is_err());
        assert!("t0.".parse::<StateRef>().is_err());
    }
}
