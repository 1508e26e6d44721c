//! Abstract syntax, concrete syntax and structural metrics for formulas.
//!
//! The language has the classical connectives plus the agent-knowledge
//! operator `K<i>`, the temporal operators `N` (next) and `Until`, the
//! strict-distance operators `D<k>`, the cluster operator `Today`, the
//! interaction-knowledge operator `KnI` and the uncertainty operator `Unc`.

mod parser;

pub use parser::{parse, ParseError};

use std::collections::BTreeSet;
use std::fmt;

/// A formula of the logic.
///
/// Agent indices and variable indices are 1-based and positive; the
/// distance parameter of [`Formula::Dist`] may be zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// Propositional variable `x<i>`, `i >= 1`.
    Var(u32),
    /// Constant `true`.
    Top,
    /// Constant `false`.
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `K<i> p`: agent `i` knows `p` (throughout its equivalence class).
    K(u32, Box<Formula>),
    /// `N p`: `p` holds at every next-time state.
    Next(Box<Formula>),
    /// `p Until q` over the reflexive-transitive next relation.
    Until(Box<Formula>, Box<Formula>),
    /// `D<k> p`: `p` holds somewhere exactly `k` strict time steps away.
    Dist(u32, Box<Formula>),
    /// `Today p`: `p` holds at every state of the current cluster.
    Today(Box<Formula>),
    /// `KnI p`: `p` holds somewhere in the interaction component of the
    /// current state (states reachable by chaining agent relations inside
    /// the current cluster).
    KnI(Box<Formula>),
    /// `Unc p`: `p` is uncertain, i.e. both `KnI p` and `KnI ~p` hold.
    Unc(Box<Formula>),
}

/// Structural counts used to size unrolling horizons and search bounds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormulaMetrics {
    /// Indices of the variables occurring in the formula.
    pub variables: BTreeSet<u32>,
    /// Largest agent index of a `K` node, 0 when no `K` occurs.
    pub max_agent: u32,
    /// Sum of all `k` parameters over `Dist` nodes.
    pub dist_weight: u64,
    /// Number of `Next` nodes.
    pub next_count: usize,
    /// Number of `Until` nodes.
    pub until_count: usize,
    /// Total node count.
    pub size: usize,
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn k(agent: u32, f: Formula) -> Formula {
        Formula::K(agent, Box::new(f))
    }
    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }
    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }
    pub fn dist(k: u32, f: Formula) -> Formula {
        Formula::Dist(k, Box::new(f))
    }
    pub fn today(f: Formula) -> Formula {
        Formula::Today(Box::new(f))
    }
    pub fn kni(f: Formula) -> Formula {
        Formula::KnI(Box::new(f))
    }
    pub fn unc(f: Formula) -> Formula {
        Formula::Unc(Box::new(f))
    }

    /// Immediate children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => vec![],
            Formula::Not(a)
            | Formula::K(_, a)
            | Formula::Next(a)
            | Formula::Dist(_, a)
            | Formula::Today(a)
            | Formula::KnI(a)
            | Formula::Unc(a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b) => vec![a, b],
        }
    }

    /// All distinct subformulas in post order: children before parents,
    /// the formula itself last, duplicates merged on first occurrence.
    pub fn subformulas(&self) -> Vec<Formula> {
        fn walk(f: &Formula, out: &mut Vec<Formula>) {
            for c in f.children() {
                walk(c, out);
            }
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Structural counts of the formula.
    pub fn metrics(&self) -> FormulaMetrics {
        fn walk(f: &Formula, m: &mut FormulaMetrics) {
            m.size += 1;
            match f {
                Formula::Var(i) => {
                    m.variables.insert(*i);
                }
                Formula::K(agent, _) => m.max_agent = m.max_agent.max(*agent),
                Formula::Next(_) => m.next_count += 1,
                Formula::Until(_, _) => m.until_count += 1,
                Formula::Dist(k, _) => m.dist_weight += u64::from(*k),
                _ => {}
            }
            for c in f.children() {
                walk(c, m);
            }
        }
        let mut m = FormulaMetrics::default();
        walk(self, &mut m);
        m
    }

    /// True for `Var`, `Top` and `Bot`.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Var(_) | Formula::Top | Formula::Bot)
    }
}

// Precedence levels for the canonical printer. A child is parenthesized
// whenever its own level is below the level its context requires.
const LEVEL_IMPLIES: u8 = 0;
const LEVEL_UNTIL: u8 = 1;
const LEVEL_OR: u8 = 2;
const LEVEL_AND: u8 = 3;
const LEVEL_UNARY: u8 = 4;

fn level_of(f: &Formula) -> u8 {
    match f {
        Formula::Implies(_, _) => LEVEL_IMPLIES,
        Formula::Until(_, _) => LEVEL_UNTIL,
        Formula::Or(_, _) => LEVEL_OR,
        Formula::And(_, _) => LEVEL_AND,
        Formula::Not(_)
        | Formula::K(_, _)
        | Formula::Next(_)
        | Formula::Dist(_, _)
        | Formula::Today(_)
        | Formula::KnI(_)
        | Formula::Unc(_) => LEVEL_UNARY,
        Formula::Var(_) | Formula::Top | Formula::Bot => u8::MAX,
    }
}

fn write_prec(f: &Formula, required: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level_of(f) < required {
        write!(out, "(")?;
        write_prec(f, LEVEL_IMPLIES, out)?;
        return write!(out, ")");
    }
    match f {
        Formula::Var(i) => write!(out, "x{i}"),
        Formula::Top => write!(out, "true"),
        Formula::Bot => write!(out, "false"),
        Formula::Not(a) => {
            write!(out, "~")?;
            write_prec(a, LEVEL_UNARY, out)
        }
        Formula::And(a, b) => {
            write_prec(a, LEVEL_AND, out)?;
            write!(out, " & ")?;
            write_prec(b, LEVEL_UNARY, out)
        }
        Formula::Or(a, b) => {
            write_prec(a, LEVEL_OR, out)?;
            write!(out, " | ")?;
            write_prec(b, LEVEL_AND, out)
        }
        Formula::Implies(a, b) => {
            write_prec(a, LEVEL_UNTIL, out)?;
            write!(out, " -> ")?;
            write_prec(b, LEVEL_IMPLIES, out)
        }
        Formula::Until(a, b) => {
            write_prec(a, LEVEL_UNTIL, out)?;
            write!(out, " Until ")?;
            write_prec(b, LEVEL_UNARY, out)
        }
        Formula::K(agent, a) => {
            write!(out, "K{agent} ")?;
            write_prec(a, LEVEL_UNARY, out)
        }
        Formula::Next(a) => {
            write!(out, "N ")?;
            write_prec(a, LEVEL_UNARY, out)
        }
        Formula::Dist(k, a) => {
            write!(out, "D{k} ")?;
            write_prec(a, LEVEL_UNARY, out)
        }
        Formula::Today(a) => {
            write!(out, "Today ")?;
            write_prec(a, LEVEL_UNARY, out)
        }
        Formula::KnI(a) => {
            write!(out, "KnI ")?;
            write_prec(a, LEVEL_UNARY, out)
        }
        Formula::Unc(a) => {
            write!(out, "Unc ")?;
            write_prec(a, LEVEL_UNARY, out)
        }
    }
}

impl fmt::Display for Formula {
    /// Canonical concrete syntax; `parse` of the output returns a
    /// structurally equal formula.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, LEVEL_IMPLIES, f)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
