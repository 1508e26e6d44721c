//! Seed-driven random models and formulas for the property and
//! acceptance test suites. Nothing in the solver paths draws randomness;
//! generation here is fully determined by the caller's RNG.

use crate::formula::Formula;
use crate::frames::{Chain, Cluster, FrameSpec, Gap, StateRef};
use crate::semantics::{Model, Valuation};
use rand::prelude::IndexedRandom;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_agents: usize,
    pub max_time_clusters: usize,
    pub max_cluster_size: usize,
    pub max_chains_per_gap: usize,
    pub max_chain_length: usize,
    pub max_states_total: usize,
    pub allow_loop: bool,
    /// Variables the valuation ranges over.
    pub variables: Vec<u32>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_agents: 3,
            max_time_clusters: 3,
            max_cluster_size: 4,
            max_chains_per_gap: 1,
            max_chain_length: 2,
            max_states_total: 12,
            allow_loop: true,
            variables: vec![1, 2],
        }
    }
}

fn random_cluster(rng: &mut impl Rng, agents: usize, max_size: usize, budget: usize) -> Cluster {
    let size = rng.random_range(1..=max_size.min(budget).max(1));
    let states: Vec<String> = (0..size)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let partitions = (0..agents)
        .map(|_| {
            // Random restricted-growth assignment of states to blocks.
            let mut labels = vec![0usize];
            let mut max = 0usize;
            for _ in 1..size {
                let label = rng.random_range(0..=max + 1);
                max = max.max(label);
                labels.push(label);
            }
            (0..=max)
                .map(|block| {
                    states
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| labels[*i] == block)
                        .map(|(_, s)| s.clone())
                        .collect::<Vec<_>>()
                })
                .filter(|block: &Vec<String>| !block.is_empty())
                .collect()
        })
        .collect();
    Cluster { states, partitions }
}

/// Random well-formed frame description within the configured sizes.
pub fn random_spec(rng: &mut impl Rng, config: &GenConfig) -> FrameSpec {
    let agents = rng.random_range(1..=config.max_agents);
    let time_len = rng.random_range(1..=config.max_time_clusters);
    let loop_to = if config.allow_loop && rng.random_bool(0.5) {
        Some(rng.random_range(0..time_len))
    } else {
        None
    };

    let mut budget = config.max_states_total;
    let mut time_clusters = Vec::new();
    for _ in 0..time_len {
        let cluster = random_cluster(rng, agents, config.max_cluster_size, budget.max(1));
        budget = budget.saturating_sub(cluster.states.len());
        time_clusters.push(cluster);
    }

    let gap_count = if loop_to.is_some() { time_len } else { time_len - 1 };
    let gaps = (0..gap_count)
        .map(|_| {
            let mut chains = Vec::new();
            let chain_count = rng.random_range(0..=config.max_chains_per_gap);
            for _ in 0..chain_count {
                if budget == 0 {
                    break;
                }
                let len = rng.random_range(1..=config.max_chain_length);
                let clusters: Vec<Cluster> = (0..len)
                    .map_while(|_| {
                        if budget == 0 {
                            return None;
                        }
                        let c = random_cluster(rng, agents, config.max_cluster_size, budget);
                        budget = budget.saturating_sub(c.states.len());
                        Some(c)
                    })
                    .collect();
                if !clusters.is_empty() {
                    chains.push(Chain { clusters });
                }
            }
            Gap { chains }
        })
        .collect();

    FrameSpec { agents, time_clusters, gaps, loop_to }
}

/// Random valuation of the configured variables over the states of a
/// description; each state holds each variable with probability 1/2.
pub fn random_valuation(rng: &mut impl Rng, spec: &FrameSpec, variables: &[u32]) -> Valuation {
    let states: Vec<StateRef> = spec.state_refs();
    let mut valuation = Valuation::new();
    for &var in variables {
        for state in &states {
            if rng.random_bool(0.5) {
                valuation.add(var, state.clone());
            }
        }
    }
    valuation
}

/// Random model: spec plus valuation.
pub fn random_model(rng: &mut impl Rng, config: &GenConfig) -> Model {
    let spec = random_spec(rng, config);
    let valuation = random_valuation(rng, &spec, &config.variables);
    Model { spec, valuation }
}

/// Random formula with at most `budget` nodes over the given variables
/// and agents; `max_dist` caps the distance parameters.
pub fn random_formula(
    rng: &mut impl Rng,
    variables: &[u32],
    max_agent: u32,
    budget: usize,
    max_dist: u32,
) -> Formula {
    debug_assert!(!variables.is_empty());
    if budget <= 1 {
        return match rng.random_range(0..6) {
            0 => Formula::Top,
            1 => Formula::Bot,
            _ => Formula::Var(*variables.choose(rng).expect("nonempty")),
        };
    }
    let binary_ok = budget >= 3;
    let kind = loop {
        let k = rng.random_range(0..11);
        if matches!(k, 4..=6 | 9) && !binary_ok {
            continue;
        }
        if k == 7 && max_agent == 0 {
            continue;
        }
        break k;
    };
    let unary = |rng: &mut _| random_formula(rng, variables, max_agent, budget - 1, max_dist);
    match kind {
        0..=2 => random_formula(rng, variables, max_agent, 1, max_dist),
        3 => Formula::not(unary(rng)),
        4..=6 => {
            let left_budget = rng.random_range(1..budget - 1);
            let left = random_formula(rng, variables, max_agent, left_budget, max_dist);
            let right =
                random_formula(rng, variables, max_agent, budget - 1 - left_budget, max_dist);
            match kind {
                4 => Formula::and(left, right),
                5 => Formula::or(left, right),
                _ => Formula::implies(left, right),
            }
        }
        7 => Formula::k(rng.random_range(1..=max_agent), unary(rng)),
        8 => Formula::next(unary(rng)),
        9 => {
            let left_budget = rng.random_range(1..budget - 1);
            let left = random_formula(rng, variables, max_agent, left_budget, max_dist);
            let right =
                random_formula(rng, variables, max_agent, budget - 1 - left_budget, max_dist);
            Formula::until(left, right)
        }
        _ => match rng.random_range(0..4) {
            0 => Formula::dist(rng.random_range(0..=max_dist), unary(rng)),
            1 => Formula::today(unary(rng)),
            2 => Formula::kni(unary(rng)),
            _ => Formula::unc(unary(rng)),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_specs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let model = random_model(&mut rng, &GenConfig::default());
            assert!(model.violations().is_empty());
            assert!(model.spec.state_count() <= 12 + 4);
        }
    }

    #[test]
    fn generated_formulas_respect_budget_and_agents() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let f = random_formula(&mut rng, &[1, 2], 2, 12, 2);
            let m = f.metrics();
            assert!(m.size <= 12);
            assert!(m.max_agent <= 2);
        }
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = random_model(&mut ChaCha8Rng::seed_from_u64(42), &GenConfig::default());
        let b = random_model(&mut ChaCha8Rng::seed_from_u64(42), &GenConfig::default());
        assert_eq!(a, b);
    }
}
