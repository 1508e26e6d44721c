use super::*;
use crate::formula::parse;
use crate::frames::{Chain, Cluster, Gap};

fn cluster(states: &[&str], partitions: &[&[&[&str]]]) -> Cluster {
    Cluster {
        states: states.iter().map(|s| s.to_string()).collect(),
        partitions: partitions
            .iter()
            .map(|p| {
                p.iter()
                    .map(|b| b.iter().map(|s| s.to_string()).collect())
                    .collect()
            })
            .collect(),
    }
}

fn time_state(cluster: usize, name: &str) -> StateRef {
    StateRef::Time { cluster, name: name.to_string() }
}

/// Single two-state cluster, one agent; `joined` selects whether the two
/// states share the agent's block.
fn pair_model(joined: bool, x1_at_a: bool) -> Model {
    let partition: &[&[&str]] = if joined { &[&["a", "b"]] } else { &[&["a"], &["b"]] };
    let spec = FrameSpec {
        agents: 1,
        time_clusters: vec![cluster(&["a", "b"], &[partition])],
        gaps: vec![],
        loop_to: None,
    };
    let mut valuation = Valuation::new();
    if x1_at_a {
        valuation.add(1, time_state(0, "a"));
    }
    Model::new(spec, valuation).unwrap()
}

fn check(model: &Model, text: &str) -> TruthAssignment {
    let f = parse(text).unwrap();
    let fast = eval(model, &f, &EvalOptions::default()).unwrap();
    let slow = oracle_eval(model, &f, &EvalOptions::default()).unwrap();
    assert_eq!(fast, slow, "evaluators disagree on {text}");
    fast
}

#[test]
fn tautology_holds_everywhere() {
    let model = pair_model(true, true);
    assert!(check(&model, "x1 -> x1").all_true());
}

#[test]
fn uncertainty_in_a_joined_cluster() {
    let model = pair_model(true, true);
    let t = check(&model, "Unc x1");
    assert_eq!(t.get(&time_state(0, "a")), Some(true));
    assert_eq!(t.get(&time_state(0, "b")), Some(true));
}

#[test]
fn uncertainty_needs_an_interaction_path() {
    let model = pair_model(false, true);
    let t = check(&model, "Unc x1");
    assert_eq!(t.get(&time_state(0, "a")), Some(false));
    assert_eq!(t.get(&time_state(0, "b")), Some(false));
}

#[test]
fn nothing_is_uncertain_about_truth() {
    for model in [pair_model(true, true), pair_model(false, false)] {
        let t = check(&model, "Unc true");
        assert!(t.iter().all(|(_, v)| !v));
    }
}

#[test]
fn holds_at_matches_eval() {
    let model = pair_model(true, true);
    let a = time_state(0, "a");
    assert!(holds_at(&model, &a, &parse("true").unwrap()).unwrap());
    assert!(holds_at(&model, &a, &parse("KnI x1").unwrap()).unwrap());
    // b is in a's class and fails x1.
    assert!(!holds_at(&model, &a, &parse("K1 x1").unwrap()).unwrap());
}

#[test]
fn holds_at_rejects_unknown_states() {
    let model = pair_model(true, true);
    let missing = time_state(0, "z");
    assert!(matches!(
        holds_at(&model, &missing, &parse("true").unwrap()),
        Err(EvalError::UnknownState(_))
    ));
}

#[test]
fn knowledge_is_reflexive_in_every_model() {
    for model in [pair_model(true, true), pair_model(false, true)] {
        assert!(valid_in_model(&model, &parse("K1 x1 -> x1").unwrap()).unwrap());
        assert!(valid_in_model(&model, &parse("Today x1 -> x1").unwrap()).unwrap());
        assert!(valid_in_model(&model, &parse("x1 -> KnI x1").unwrap()).unwrap());
    }
}

#[test]
fn truth_does_not_force_knowledge() {
    let model = pair_model(true, true);
    assert!(!valid_in_model(&model, &parse("x1 -> K1 x1").unwrap()).unwrap());
}

#[test]
fn uncertainty_can_coexist_with_single_agent_knowledge() {
    // With two agents, K1 p and Unc p hold together: agent 1's block is
    // {a}, but interaction through agent 2 still reaches a ~p state.
    let spec = FrameSpec {
        agents: 2,
        time_clusters: vec![cluster(&["a", "b"], &[&[&["a"], &["b"]], &[&["a", "b"]]])],
        gaps: vec![],
        loop_to: None,
    };
    let mut valuation = Valuation::new();
    valuation.add(1, time_state(0, "a"));
    let model = Model::new(spec, valuation).unwrap();
    let a = time_state(0, "a");
    assert!(holds_at(&model, &a, &parse("K1 x1").unwrap()).unwrap());
    assert!(holds_at(&model, &a, &parse("Unc x1").unwrap()).unwrap());
    // Uncertainty still rules out cluster-wide truth.
    assert!(valid_in_model(&model, &parse("Unc x1 -> ~Today x1").unwrap()).unwrap());
}

#[test]
fn agent_out_of_range_is_an_error() {
    let model = pair_model(true, true);
    assert!(matches!(
        eval(&model, &parse("K2 x1").unwrap(), &EvalOptions::default()),
        Err(EvalError::AgentOutOfRange { agent: 2, agents: 1 })
    ));
}

fn lasso_model(prefix: usize, period: usize) -> Model {
    let len = prefix + period;
    let time_clusters = (0..len).map(|_| cluster(&["a"], &[&[&["a"]]])).collect();
    let gaps = (0..len).map(|_| Gap { chains: vec![] }).collect();
    let spec = FrameSpec { agents: 1, time_clusters, gaps, loop_to: Some(prefix) };
    let mut valuation = Valuation::new();
    valuation.add(1, time_state(len - 1, "a"));
    Model::new(spec, valuation).unwrap()
}

#[test]
fn stable_horizon_follows_the_formula_weight() {
    let model = lasso_model(1, 1);
    assert_eq!(stable_horizon(&model, &parse("N x1").unwrap()).unwrap(), 4);
    let model = lasso_model(2, 2);
    assert_eq!(stable_horizon(&model, &parse("D2 x1").unwrap()).unwrap(), 10);
}

#[test]
fn stable_horizon_requires_a_loop() {
    let model = pair_model(true, true);
    assert!(matches!(
        stable_horizon(&model, &parse("x1").unwrap()),
        Err(EvalError::LoopFree)
    ));
}

#[test]
fn low_horizons_are_rejected_on_lassos() {
    let model = lasso_model(1, 1);
    let f = parse("x1").unwrap();
    let opts = EvalOptions { horizon: Some(2), bridge_gaps: true };
    assert!(matches!(
        eval(&model, &f, &opts),
        Err(EvalError::HorizonTooSmall { given: 2, minimum: 3 })
    ));
}

#[test]
fn lasso_truth_is_read_from_canonical_copies() {
    // Two time points looping back to the start; x1 alternates false/true.
    let model = lasso_model(0, 2);
    let t = check(&model, "N x1");
    // At t0, tomorrow is t1 where x1 holds; at t1, tomorrow is t0 again.
    assert_eq!(t.get(&time_state(0, "a")), Some(true));
    assert_eq!(t.get(&time_state(1, "a")), Some(false));
    // Something eventually reaches x1 from both points.
    let u = check(&model, "true Until x1");
    assert!(u.all_true());
}

#[test]
fn unrolled_dump_marks_repeat_copies() {
    let model = lasso_model(1, 1);
    let f = parse("x1").unwrap();
    let rows = eval_unrolled(&model, &f, &EvalOptions::default()).unwrap();
    let names: Vec<&str> = rows.iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.contains(&"t0.a"));
    assert!(names.contains(&"t1.a"));
    assert!(names.contains(&"t1.a.c1"));
}

#[test]
fn chain_states_participate_in_today_and_interaction() {
    let chain = Chain { clusters: vec![cluster(&["c", "d"], &[&[&["c", "d"]]])] };
    let spec = FrameSpec {
        agents: 1,
        time_clusters: vec![
            cluster(&["a"], &[&[&["a"]]]),
            cluster(&["b"], &[&[&["b"]]]),
        ],
        gaps: vec![Gap { chains: vec![chain] }],
        loop_to: None,
    };
    let mut valuation = Valuation::new();
    valuation.add(
        1,
        StateRef::Chain { gap: 0, chain: 0, pos: 0, name: "c".into() },
    );
    let model = Model::new(spec, valuation).unwrap();
    let t = check(&model, "Unc x1");
    let c = StateRef::Chain { gap: 0, chain: 0, pos: 0, name: "c".into() };
    let d = StateRef::Chain { gap: 0, chain: 0, pos: 0, name: "d".into() };
    assert_eq!(t.get(&c), Some(true));
    assert_eq!(t.get(&d), Some(true));
    assert_eq!(t.get(&time_state(0, "a")), Some(false));
    // D1 from the first time cluster reaches the chain cluster.
    let d1 = check(&model, "D1 x1");
    assert_eq!(d1.get(&time_state(0, "a")), Some(true));
}
