//! Inference rules, rule validity in models, and the reduced normal form.
//!
//! A rule is valid in a model when global truth of all premises forces
//! global truth of the conclusion. Every rule can be rewritten into a
//! normal form `(θ_1 | ... | θ_s) |- x1` whose disjuncts are complete
//! conjuncts over a fixed table of atoms: each non-atomic subformula gets
//! a labeling variable, boolean structure constrains the table entries,
//! and modal atoms over the labels stay free. The rewriting is refutation
//! equivalent frame by frame; the test suites check this at desk scale.

use crate::formula::{parse, Formula, FormulaMetrics, ParseError};
use crate::semantics::{self, engine::FrameEngine, EvalError, EvalOptions, Model};
use serde_json::json;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

/// Premises over a conclusion. The premise list is never empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferenceRule {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

impl InferenceRule {
    /// Panics when `premises` is empty.
    pub fn new(premises: Vec<Formula>, conclusion: Formula) -> InferenceRule {
        assert!(!premises.is_empty(), "a rule needs at least one premise");
        InferenceRule { premises, conclusion }
    }

    /// Variables of premises and conclusion together.
    pub fn variables(&self) -> BTreeSet<u32> {
        let mut vars = self.conclusion.metrics().variables;
        for p in &self.premises {
            vars.extend(p.metrics().variables);
        }
        vars
    }

    /// Premises folded into a single conjunction.
    pub fn merged_premise(&self) -> Formula {
        let mut it = self.premises.iter().cloned();
        let first = it.next().expect("nonempty premises");
        it.fold(first, Formula::and)
    }

    /// Combined structural metrics of the whole rule, used to pick
    /// unrolling horizons.
    pub fn combined_metrics(&self) -> FormulaMetrics {
        let mut m = self.conclusion.metrics();
        for p in &self.premises {
            let pm = p.metrics();
            m.variables.extend(pm.variables);
            m.max_agent = m.max_agent.max(pm.max_agent);
            m.dist_weight += pm.dist_weight;
            m.next_count += pm.next_count;
            m.until_count += pm.until_count;
            m.size += pm.size;
        }
        m
    }
}

impl fmt::Display for InferenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, " |- {}", self.conclusion)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleParseError {
    #[error("rule must contain exactly one '|-'")]
    MissingTurnstile,
    #[error("rule must contain exactly one '|-', found {0}")]
    MultipleTurnstiles(usize),
    #[error("empty premise at position {0}")]
    EmptyPremise(usize),
    #[error("empty conclusion")]
    EmptyConclusion,
    #[error("{0}")]
    Formula(#[from] ParseError),
}

fn position_of(text: &str, byte: usize) -> (usize, usize) {
    let before = &text[..byte];
    let line = before.bytes().filter(|&b| b == b'\n').count() + 1;
    let column = match before.rfind('\n') {
        Some(nl) => byte - nl,
        None => byte + 1,
    };
    (line, column)
}

fn parse_segment(text: &str, start: usize, segment: &str) -> Result<Formula, RuleParseError> {
    let (line, column) = position_of(text, start);
    parse(segment)
        .map_err(|e| RuleParseError::Formula(e.offset(line - 1, column - 1)))
}

/// Parse `premise_1 ; ... ; premise_l |- conclusion`.
pub fn parse_rule(text: &str) -> Result<InferenceRule, RuleParseError> {
    let marks: Vec<usize> = text.match_indices("|-").map(|(i, _)| i).collect();
    match marks.len() {
        0 => return Err(RuleParseError::MissingTurnstile),
        1 => {}
        n => return Err(RuleParseError::MultipleTurnstiles(n)),
    }
    let split = marks[0];
    let premise_text = &text[..split];
    let conclusion_text = &text[split + 2..];
    if conclusion_text.trim().is_empty() {
        return Err(RuleParseError::EmptyConclusion);
    }

    let mut premises = Vec::new();
    let mut offset = 0usize;
    for (i, segment) in premise_text.split(';').enumerate() {
        if segment.trim().is_empty() {
            return Err(RuleParseError::EmptyPremise(i + 1));
        }
        premises.push(parse_segment(text, offset, segment)?);
        offset += segment.len() + 1;
    }
    let conclusion = parse_segment(text, split + 2, conclusion_text)?;
    Ok(InferenceRule::new(premises, conclusion))
}

/// The rule `x1 -> x1 |- f`: valid in exactly the frames where `f` is.
pub fn formula_to_rule(f: &Formula) -> InferenceRule {
    InferenceRule::new(
        vec![Formula::implies(Formula::Var(1), Formula::Var(1))],
        f.clone(),
    )
}

/// Global-consequence validity: if every premise holds at every readout
/// state, the conclusion must too.
pub fn rule_valid_in_model(model: &Model, rule: &InferenceRule) -> Result<bool, EvalError> {
    for p in &rule.premises {
        if !semantics::valid_in_model(model, p)? {
            return Ok(true);
        }
    }
    semantics::valid_in_model(model, &rule.conclusion)
}

/// One atom of the reduced-normal-form table. Variable indices are
/// 1-based labeling variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RnfAtom {
    Base(usize),
    Next(usize),
    Know { agent: u32, var: usize },
    Dist { k: u32, var: usize },
    Until { left: usize, right: usize },
    KnI(usize),
    Unc(usize),
}

impl RnfAtom {
    pub fn formula(&self) -> Formula {
        let var = |i: usize| Formula::Var(i as u32);
        match self {
            RnfAtom::Base(i) => var(*i),
            RnfAtom::Next(i) => Formula::next(var(*i)),
            RnfAtom::Know { agent, var: i } => Formula::k(*agent, var(*i)),
            RnfAtom::Dist { k, var: i } => Formula::dist(*k, var(*i)),
            RnfAtom::Until { left, right } => Formula::until(var(*left), var(*right)),
            RnfAtom::KnI(i) => Formula::kni(var(*i)),
            RnfAtom::Unc(i) => Formula::unc(var(*i)),
        }
    }
}

/// `(θ_1 | ... | θ_s) |- x1` with every disjunct a complete 0/1 row over
/// the atom table. `labels[i]` records which source subformula the
/// labeling variable `i+1` stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedNormalFormRule {
    pub atoms: Vec<RnfAtom>,
    pub disjuncts: Vec<Vec<bool>>,
    pub labels: Vec<Formula>,
    /// 1-based variable standing for the merged premise; forced true in
    /// every disjunct.
    pub premise_var: usize,
}

impl ReducedNormalFormRule {
    pub fn var_count(&self) -> usize {
        self.labels.len()
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        (1..=self.var_count() as u32).collect()
    }

    /// The premise disjunction as a plain formula.
    pub fn premise_formula(&self) -> Formula {
        let conjunct = |row: &Vec<bool>| -> Formula {
            let mut it = self.atoms.iter().zip(row).map(|(atom, &value)| {
                if value {
                    atom.formula()
                } else {
                    Formula::not(atom.formula())
                }
            });
            let first = it.next().expect("nonempty atom table");
            it.fold(first, Formula::and)
        };
        let mut it = self.disjuncts.iter().map(conjunct);
        let first = it.next().expect("nonempty disjunction");
        it.fold(first, Formula::or)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "variables": self.var_count(),
            "conclusion": "x1",
            "premise_variable": format!("x{}", self.premise_var),
            "labels": self
                .labels
                .iter()
                .enumerate()
                .map(|(i, f)| (format!("x{}", i + 1), json!(f.to_string())))
                .collect::<serde_json::Map<_, _>>(),
            "schema": self
                .atoms
                .iter()
                .map(|a| a.formula().to_string())
                .collect::<Vec<_>>(),
            "disjuncts": self
                .disjuncts
                .iter()
                .map(|row| row.iter().map(|&b| u8::from(b)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RnfOptions {
    /// Upper bound on candidate coefficient tables; enumeration is
    /// exponential and fails explicitly instead of truncating.
    pub cap: u64,
}

pub const DEFAULT_RNF_CAP: u64 = 1 << 20;

impl Default for RnfOptions {
    fn default() -> Self {
        RnfOptions { cap: DEFAULT_RNF_CAP }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RnfError {
    #[error("{candidates} candidate tables exceed the cap {cap}")]
    CapExceeded { candidates: u128, cap: u64 },
    #[error("'{0}' has no atom family in the reduced-normal-form table")]
    UnsupportedConnective(&'static str),
    #[error("premise is propositionally unsatisfiable; the normal form would have no disjuncts")]
    EmptyNormalForm,
}

enum Def {
    Free,
    Const(bool),
    Negation(usize),
    Conjunction(usize, usize),
    Disjunction(usize, usize),
    Implication(usize, usize),
    CopyAtom(usize),
}

/// Rewrite a rule into reduced normal form.
///
/// Labeling variables: `x1` is the conclusion, then the rule's original
/// variables in index order, then the remaining non-atomic subformulas in
/// first-appearance order. Each disjunct is one assignment of the free
/// coefficients (original variables and modal atoms) completed through
/// the defining equivalences of the labeled subformulas, kept when the
/// premise variable comes out true.
pub fn to_reduced_normal_form(
    rule: &InferenceRule,
    options: &RnfOptions,
) -> Result<ReducedNormalFormRule, RnfError> {
    let premise = rule.merged_premise();
    let conclusion = rule.conclusion.clone();

    let mut subformulas = premise.subformulas();
    for sub in conclusion.subformulas() {
        if !subformulas.contains(&sub) {
            subformulas.push(sub);
        }
    }
    if subformulas
        .iter()
        .any(|f| matches!(f, Formula::Today(_)))
    {
        return Err(RnfError::UnsupportedConnective("Today"));
    }

    // Variable numbering: conclusion first, then original variables, then
    // the other non-atomic subformulas.
    let mut labels: Vec<Formula> = vec![conclusion.clone()];
    for sub in &subformulas {
        if matches!(sub, Formula::Var(_)) && *sub != conclusion && !labels.contains(sub) {
            labels.push(sub.clone());
        }
    }
    for sub in &subformulas {
        if !matches!(sub, Formula::Var(_)) && *sub != conclusion {
            labels.push(sub.clone());
        }
    }
    let n = labels.len();
    let var_of: HashMap<&Formula, usize> =
        labels.iter().enumerate().map(|(i, f)| (f, i + 1)).collect();
    let premise_var = var_of[&premise];

    // Atom families present in the rule.
    let max_agent = subformulas
        .iter()
        .filter_map(|f| match f {
            Formula::K(agent, _) => Some(*agent),
            _ => None,
        })
        .max();
    let max_dist = subformulas
        .iter()
        .filter_map(|f| match f {
            Formula::Dist(k, _) => Some(*k),
            _ => None,
        })
        .max();
    let has = |pred: fn(&Formula) -> bool| subformulas.iter().any(pred);

    let mut atoms: Vec<RnfAtom> = Vec::new();
    for i in 1..=n {
        atoms.push(RnfAtom::Base(i));
    }
    if has(|f| matches!(f, Formula::Next(_))) {
        for i in 1..=n {
            atoms.push(RnfAtom::Next(i));
        }
    }
    if let Some(m) = max_agent {
        for agent in 1..=m {
            for i in 1..=n {
                atoms.push(RnfAtom::Know { agent, var: i });
            }
        }
    }
    if let Some(kmax) = max_dist {
        for k in 0..=kmax {
            for i in 1..=n {
                atoms.push(RnfAtom::Dist { k, var: i });
            }
        }
    }
    if has(|f| matches!(f, Formula::Until(_, _))) {
        for left in 1..=n {
            for right in 1..=n {
                atoms.push(RnfAtom::Until { left, right });
            }
        }
    }
    if has(|f| matches!(f, Formula::KnI(_))) {
        for i in 1..=n {
            atoms.push(RnfAtom::KnI(i));
        }
    }
    if has(|f| matches!(f, Formula::Unc(_))) {
        for i in 1..=n {
            atoms.push(RnfAtom::Unc(i));
        }
    }
    let atom_index: HashMap<&RnfAtom, usize> =
        atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();

    // Defining equivalence of each labeling variable.
    let defs: Vec<Def> = labels
        .iter()
        .map(|label| {
            let v = |f: &Formula| var_of[f];
            match label {
                Formula::Var(_) => Def::Free,
                Formula::Top => Def::Const(true),
                Formula::Bot => Def::Const(false),
                Formula::Not(a) => Def::Negation(v(a)),
                Formula::And(a, b) => Def::Conjunction(v(a), v(b)),
                Formula::Or(a, b) => Def::Disjunction(v(a), v(b)),
                Formula::Implies(a, b) => Def::Implication(v(a), v(b)),
                Formula::K(agent, a) => {
                    Def::CopyAtom(atom_index[&RnfAtom::Know { agent: *agent, var: v(a) }])
                }
                Formula::Next(a) => Def::CopyAtom(atom_index[&RnfAtom::Next(v(a))]),
                Formula::Until(a, b) => {
                    Def::CopyAtom(atom_index[&RnfAtom::Until { left: v(a), right: v(b) }])
                }
                Formula::Dist(k, a) => {
                    Def::CopyAtom(atom_index[&RnfAtom::Dist { k: *k, var: v(a) }])
                }
                Formula::KnI(a) => Def::CopyAtom(atom_index[&RnfAtom::KnI(v(a))]),
                Formula::Unc(a) => Def::CopyAtom(atom_index[&RnfAtom::Unc(v(a))]),
                Formula::Today(_) => unreachable!("rejected above"),
            }
        })
        .collect();

    // Free coefficients: every non-base atom plus the base atoms of
    // original variables.
    let free: Vec<usize> = atoms
        .iter()
        .enumerate()
        .filter_map(|(idx, atom)| match atom {
            RnfAtom::Base(i) => matches!(defs[i - 1], Def::Free).then_some(idx),
            _ => Some(idx),
        })
        .collect();
    let candidates: u128 = 1u128
        .checked_shl(free.len() as u32)
        .unwrap_or(u128::MAX);
    if candidates > u128::from(options.cap) {
        return Err(RnfError::CapExceeded { candidates, cap: options.cap });
    }

    // Derived base coefficients are filled children-first; ordering the
    // labels by size guarantees children come earlier.
    let mut topo: Vec<usize> = (0..n).collect();
    topo.sort_by_key(|&i| labels[i].metrics().size);

    let mut disjuncts = Vec::new();
    for counter in 0..candidates as u64 {
        let mut row = vec![false; atoms.len()];
        for (bit, &idx) in free.iter().enumerate() {
            row[idx] = counter >> bit & 1 == 1;
        }
        for &i in &topo {
            let base = |var: usize| -> bool { row[var - 1] };
            let value = match defs[i] {
                Def::Free => continue,
                Def::Const(c) => c,
                Def::Negation(a) => !base(a),
                Def::Conjunction(a, b) => base(a) && base(b),
                Def::Disjunction(a, b) => base(a) || base(b),
                Def::Implication(a, b) => !base(a) || base(b),
                Def::CopyAtom(idx) => row[idx],
            };
            row[i] = value;
        }
        if row[premise_var - 1] {
            disjuncts.push(row);
        }
    }
    if disjuncts.is_empty() {
        return Err(RnfError::EmptyNormalForm);
    }
    disjuncts.sort();
    disjuncts.dedup();

    Ok(ReducedNormalFormRule { atoms, disjuncts, labels, premise_var })
}

/// Validity of a reduced rule in a model over the source rule's
/// variables: the labeling variables take the truth sets of the
/// subformulas they stand for.
pub fn rnf_valid_in_model(
    model: &Model,
    rnf: &ReducedNormalFormRule,
    opts: &EvalOptions,
) -> Result<bool, EvalError> {
    let violations = model.violations();
    if !violations.is_empty() {
        return Err(EvalError::InvalidModel(violations));
    }
    let max_agent = rnf
        .labels
        .iter()
        .map(|f| f.metrics().max_agent)
        .chain(rnf.atoms.iter().filter_map(|a| match a {
            RnfAtom::Know { agent, .. } => Some(*agent),
            _ => None,
        }))
        .max()
        .unwrap_or(0);
    if max_agent as usize > model.spec.agents {
        return Err(EvalError::AgentOutOfRange { agent: max_agent, agents: model.spec.agents });
    }

    // Horizon: one modal layer of atoms on top of the deepest label.
    let label_weight = rnf
        .labels
        .iter()
        .map(semantics::temporal_weight)
        .max()
        .unwrap_or(0);
    let atom_extra = 1 + rnf
        .atoms
        .iter()
        .filter_map(|a| match a {
            RnfAtom::Dist { k, .. } => Some(*k as usize),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let weight = 2 * label_weight + atom_extra;

    // Induced valuation: evaluate every label once, then assemble atom
    // truths from engine primitives over those bit vectors.
    let graph = semantics::unroll_for_weight(model, weight, opts)?;
    let engine = FrameEngine::new(&graph);
    let valuation = engine.valuation_bits(&model.valuation);
    let label_bits: Vec<_> = rnf.labels.iter().map(|f| engine.eval(f, &valuation)).collect();
    let atom_bits: Vec<_> = rnf
        .atoms
        .iter()
        .map(|atom| match atom {
            RnfAtom::Base(i) => label_bits[i - 1].clone(),
            RnfAtom::Next(i) => engine.op_next(&label_bits[i - 1]),
            RnfAtom::Know { agent, var } => {
                engine.op_k(*agent as usize, &label_bits[var - 1])
            }
            RnfAtom::Dist { k, var } => engine.op_dist(*k as usize, &label_bits[var - 1]),
            RnfAtom::Until { left, right } => {
                engine.op_until(&label_bits[left - 1], &label_bits[right - 1])
            }
            RnfAtom::KnI(i) => engine.op_kni(&label_bits[i - 1]),
            RnfAtom::Unc(i) => engine.op_unc(&label_bits[i - 1]),
        })
        .collect();

    let rows: HashSet<&Vec<bool>> = rnf.disjuncts.iter().collect();
    let mut premise_everywhere = true;
    let mut conclusion_everywhere = true;
    for &state in graph.readout_indices() {
        let profile: Vec<bool> = atom_bits.iter().map(|bits| bits.get(state)).collect();
        if !rows.contains(&profile) {
            premise_everywhere = false;
        }
        if !label_bits[0].get(state) {
            conclusion_everywhere = false;
        }
    }
    Ok(!premise_everywhere || conclusion_everywhere)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{Cluster, FrameSpec, StateRef};
    use crate::semantics::Valuation;

    fn var(i: u32) -> Formula {
        Formula::Var(i)
    }

    fn one_state_model(x1_true: bool) -> Model {
        let spec = FrameSpec {
            agents: 1,
            time_clusters: vec![Cluster {
                states: vec!["a".into()],
                partitions: vec![vec![vec!["a".into()]]],
            }],
            gaps: vec![],
            loop_to: None,
        };
        let mut valuation = Valuation::new();
        if x1_true {
            valuation.add(1, StateRef::Time { cluster: 0, name: "a".into() });
        }
        Model::new(spec, valuation).unwrap()
    }

    #[test]
    fn formula_to_rule_uses_the_identity_premise() {
        for text in ["x1", "true", "Unc x2"] {
            let f = parse(text).unwrap();
            let rule = formula_to_rule(&f);
            assert_eq!(rule.premises, vec![Formula::implies(var(1), var(1))]);
            assert_eq!(rule.conclusion, f);
        }
    }

    #[test]
    fn rule_text_round_trips() {
        let rule = parse_rule("x1 ; x1 -> x2 |- x2").unwrap();
        assert_eq!(rule.premises.len(), 2);
        assert_eq!(parse_rule(&rule.to_string()).unwrap(), rule);
        assert_eq!(parse_rule("x1 x2"), Err(RuleParseError::MissingTurnstile));
        assert!(matches!(
            parse_rule("x1 |- x2 |- x3"),
            Err(RuleParseError::MultipleTurnstiles(2))
        ));
    }

    #[test]
    fn rule_parse_errors_keep_source_positions() {
        let err = parse_rule("x1 ; K0 x2 |- x3").unwrap_err();
        match err {
            RuleParseError::Formula(e) => {
                assert_eq!((e.line, e.column), (1, 6));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn trivial_rules_in_models() {
        let model = one_state_model(false);
        let always = parse_rule("x1 -> x1 |- true").unwrap();
        assert!(rule_valid_in_model(&model, &always).unwrap());
        let refuted = parse_rule("x1 -> x1 |- x1").unwrap();
        assert!(!rule_valid_in_model(&model, &refuted).unwrap());
    }

    #[test]
    fn premise_forcing_makes_knowledge_rules_valid() {
        let model = one_state_model(true);
        let rule = parse_rule("x1 |- K1 x1").unwrap();
        assert!(rule_valid_in_model(&model, &rule).unwrap());
    }

    #[test]
    fn rnf_of_the_identity_rule() {
        let rule = parse_rule("x1 -> x1 |- x1").unwrap();
        let rnf = to_reduced_normal_form(&rule, &RnfOptions::default()).unwrap();
        // x1 is the conclusion variable, x2 labels the premise.
        assert_eq!(rnf.var_count(), 2);
        assert_eq!(rnf.premise_var, 2);
        assert_eq!(rnf.atoms, vec![RnfAtom::Base(1), RnfAtom::Base(2)]);
        // The premise is a tautology over x1, so both rows keep x2 = 1.
        assert_eq!(rnf.disjuncts, vec![vec![false, true], vec![true, true]]);
        for row in &rnf.disjuncts {
            assert_eq!(row.len(), rnf.atoms.len());
        }
    }

    #[test]
    fn rnf_variable_count_is_bounded_by_subformulas() {
        for text in [
            "x1 -> x1 |- x1",
            "K1 x1 |- x1",
            "x1 ; x1 -> x2 |- x2",
            "Unc x1 |- KnI x1",
        ] {
            let rule = parse_rule(text).unwrap();
            let rnf = to_reduced_normal_form(&rule, &RnfOptions::default()).unwrap();
            let mut subs = rule.merged_premise().subformulas();
            for s in rule.conclusion.subformulas() {
                if !subs.contains(&s) {
                    subs.push(s);
                }
            }
            assert!(rnf.var_count() <= subs.len() + 1);
            for row in &rnf.disjuncts {
                assert_eq!(row.len(), rnf.atoms.len(), "rows must be total");
                assert!(row[rnf.premise_var - 1], "premise variable forced true");
            }
        }
    }

    #[test]
    fn rnf_rejects_today_and_empty_premises() {
        let today = parse_rule("Today x1 |- x1").unwrap();
        assert_eq!(
            to_reduced_normal_form(&today, &RnfOptions::default()),
            Err(RnfError::UnsupportedConnective("Today"))
        );
        let unsat = parse_rule("false |- x1").unwrap();
        assert_eq!(
            to_reduced_normal_form(&unsat, &RnfOptions::default()),
            Err(RnfError::EmptyNormalForm)
        );
    }

    #[test]
    fn rnf_cap_is_enforced() {
        let rule = parse_rule("x1 Until x2 |- x1").unwrap();
        let err = to_reduced_normal_form(&rule, &RnfOptions { cap: 4 }).unwrap_err();
        assert!(matches!(err, RnfError::CapExceeded { .. }));
    }

    #[test]
    fn rnf_matches_rule_verdict_on_models() {
        let rule = parse_rule("x1 -> x1 |- x1").unwrap();
        let rnf = to_reduced_normal_form(&rule, &RnfOptions::default()).unwrap();
        let refuting = one_state_model(false);
        assert!(!rnf_valid_in_model(&refuting, &rnf, &EvalOptions::default()).unwrap());
        let satisfying = one_state_model(true);
        assert!(rnf_valid_in_model(&satisfying, &rnf, &EvalOptions::default()).unwrap());

        let identity = parse_rule("x1 |- x1").unwrap();
        let rnf = to_reduced_normal_form(&identity, &RnfOptions::default()).unwrap();
        for model in [one_state_model(false), one_state_model(true)] {
            assert!(rnf_valid_in_model(&model, &rnf, &EvalOptions::default()).unwrap());
        }
    }

    #[test]
    fn rnf_serialization_lists_schema_and_rows() {
        let rule = parse_rule("x1 -> x1 |- x1").unwrap();
        let rnf = to_reduced_normal_form(&rule, &RnfOptions::default()).unwrap();
        let doc = rnf.to_json();
        assert_eq!(doc["variables"], 2);
        assert_eq!(doc["conclusion"], "x1");
        assert_eq!(doc["schema"].as_array().unwrap().len(), 2);
        assert_eq!(doc["disjuncts"].as_array().unwrap().len(), 2);
    }
}
