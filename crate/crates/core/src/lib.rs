//! Solver toolkit for a temporal multi-agent knowledge logic with
//! interaction-based uncertainty.
//!
//! The library is organized around five pieces:
//!
//! - [`formula`]: abstract syntax, parser, canonical printer, metrics;
//! - [`frames`]: cluster-and-chain frame descriptions, validation, and
//!   unrolling into explicit finite graphs with all temporal and agent
//!   relations;
//! - [`semantics`]: truth-value computation over models, with a fast
//!   evaluator and an independent literal oracle;
//! - [`rules`]: inference rules, rule validity, and the reduced-normal-form
//!   transformation;
//! - [`decide`]: bounded satisfiability, theoremhood and rule-refutation
//!   search over enumerated frames.
//!
//! [`gen`] holds seed-driven random generators for models and formulas,
//! shared by the property and acceptance test suites.

pub mod decide;
pub mod formula;
pub mod frames;
pub mod gen;
pub mod relation;
pub mod rules;
pub mod semantics;

pub use formula::{parse, Formula, FormulaMetrics, ParseError};
pub use frames::{
    load_model, model_from_json, model_to_json, save_model, strict_power, unroll, validate,
    Chain, Cluster, FrameSpec, Gap, StateRef, UnrolledGraph, UnrollOptions, Violation,
};
pub use semantics::{
    eval, holds_at, oracle_eval, stable_horizon, valid_in_model, EvalError, EvalOptions, Model,
    TruthAssignment, Valuation,
};
