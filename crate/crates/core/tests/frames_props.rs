//! Structural properties of unrolled frames, checked against independent
//! test-local oracles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempagent_core::frames::{
    load_model, model_from_json, save_model, unroll, validate, StateRef, UnrollOptions,
    UnrolledGraph,
};
use tempagent_core::gen::{random_model, random_spec, GenConfig};
use tempagent_core::semantics::{Model, Valuation};

fn unroll_default(spec: &tempagent_core::frames::FrameSpec, extra: usize) -> UnrolledGraph {
    let horizon = match spec.loop_to {
        None => spec.time_len(),
        Some(l) => spec.time_len() + (spec.time_len() - l) * 2 + extra,
    };
    unroll(spec, horizon, UnrollOptions::default()).unwrap()
}

/// Independent Floyd-Warshall closure over plain boolean matrices.
fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for &(a, b) in edges {
        m[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    m
}

#[test]
fn closure_matches_floyd_warshall_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..120 {
        let spec = random_spec(&mut rng, &GenConfig::default());
        let graph = unroll_default(&spec, 0);
        let n = graph.state_count();
        let q_edges: Vec<(usize, usize)> = graph.q_rel().pairs().collect();
        let oracle = floyd_warshall(n, &q_edges);
        for a in 0..n {
            for b in 0..n {
                assert_eq!(
                    graph.r_rel().contains(a, b),
                    oracle[a][b],
                    "closure mismatch at ({a},{b})"
                );
            }
        }
    }
}

#[test]
fn strict_part_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..120 {
        let spec = random_spec(&mut rng, &GenConfig::default());
        let graph = unroll_default(&spec, 0);
        let n = graph.state_count();
        for a in 0..n {
            for b in 0..n {
                let strict = graph.r_strict().contains(a, b);
                if strict {
                    assert!(graph.r_rel().contains(a, b), "strict outside r");
                    assert!(!graph.r_strict().contains(b, a), "mutual strict pair");
                }
                if graph.cluster_of(a) == graph.cluster_of(b) {
                    assert!(!strict, "strict pair inside a cluster");
                }
            }
        }
        assert!(graph.r_rel().is_transitive());
    }
}

#[test]
fn next_successor_sets_are_whole_clusters() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..120 {
        let spec = random_spec(&mut rng, &GenConfig::default());
        let graph = unroll_default(&spec, 0);
        let n = graph.state_count();
        for a in 0..n {
            let successors: Vec<usize> =
                (0..n).filter(|&b| graph.next_rel().contains(a, b)).collect();
            match graph.frontier_of(a) {
                Some(t) => assert_eq!(successors, graph.time_states(t).to_vec()),
                None => assert!(successors.is_empty()),
            }
        }
        // Loop-free final time cluster has no tomorrow.
        if spec.loop_to.is_none() {
            for &a in graph.time_states(spec.time_len() - 1) {
                assert_eq!(graph.frontier_of(a), None);
            }
        }
    }
}

#[test]
fn lasso_unrollings_are_shift_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut checked = 0;
    while checked < 60 {
        let spec = random_spec(&mut rng, &GenConfig::default());
        let Some(prefix) = spec.loop_to else { continue };
        let period = spec.time_len() - prefix;
        let graph = unroll_default(&spec, period + 2);
        checked += 1;

        let horizon = graph.horizon();
        let by_key: std::collections::HashMap<(&StateRef, usize), usize> = graph
            .states()
            .iter()
            .enumerate()
            .map(|(i, (state, copy))| ((state, *copy), i))
            .collect();
        let index_of = |state: &StateRef, copy: usize| by_key.get(&(state, copy)).copied();
        // Time-cluster copies exist below the horizon, gap instances one
        // copy earlier.
        let limit = |state: &StateRef| match state {
            StateRef::Time { .. } => horizon,
            StateRef::Chain { .. } => horizon - 1,
        };
        for (i, (state, copy)) in graph.states().iter().enumerate() {
            if *copy < prefix || copy + period >= limit(state) {
                continue;
            }
            let shifted = index_of(state, copy + period)
                .expect("shifted copy exists within the horizon");
            for (j, (other, other_copy)) in graph.states().iter().enumerate() {
                if *other_copy < prefix || other_copy + period >= limit(other) {
                    continue;
                }
                let other_shifted = index_of(other, other_copy + period).unwrap();
                assert_eq!(
                    graph.q_rel().contains(i, j),
                    graph.q_rel().contains(shifted, other_shifted),
                    "q not shift invariant"
                );
                assert_eq!(
                    graph.next_rel().contains(i, j),
                    graph.next_rel().contains(shifted, other_shifted),
                    "next not shift invariant"
                );
            }
        }
    }
}

#[test]
fn minimal_model_file_loads() {
    let text = r#"{
        "agents": 1,
        "time_clusters": [ { "states": ["a"], "partitions": [[["a"]]] } ],
        "gaps": [],
        "loop": null,
        "valuation": {}
    }"#;
    let model = model_from_json(text).unwrap();
    assert_eq!(model.spec.time_len(), 1);
    assert_eq!(model.spec.agents, 1);
}

#[test]
fn unknown_valuation_state_is_rejected() {
    let text = r#"{
        "agents": 1,
        "time_clusters": [ { "states": ["a"], "partitions": [[["a"]]] } ],
        "gaps": [],
        "loop": null,
        "valuation": { "x1": ["t0.z"] }
    }"#;
    let err = model_from_json(text).unwrap_err();
    assert!(err.to_string().contains("unknown state"), "got: {err}");
}

#[test]
fn model_files_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let dir = tempfile::tempdir().unwrap();
    for i in 0..40 {
        let model = random_model(&mut rng, &GenConfig::default());
        let path = dir.path().join(format!("model_{i}.json"));
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded, model);
    }
}

#[test]
fn two_gap_lasso_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let config = GenConfig { max_time_clusters: 2, allow_loop: true, ..GenConfig::default() };
    let spec = loop {
        let spec = random_spec(&mut rng, &config);
        if spec.loop_to.is_some() && spec.gaps.len() == 2 {
            break spec;
        }
    };
    assert!(validate(&spec).is_empty());
    let mut valuation = Valuation::new();
    for state in spec.state_refs() {
        valuation.add(1, state);
    }
    let model = Model { spec, valuation };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lasso.json");
    save_model(&model, &path).unwrap();
    assert_eq!(load_model(&path).unwrap(), model);
}
