//! Interpretations, rule satisfaction, the reduct, k-minimal models and
//! answer sets.
//!
//! Models are computed on the transformed equation system. The inner loop
//! is a Jacobi iteration from the all-`[0,1]` interpretation; the outer loop
//! re-evaluates negation as failure against the previous interpretation
//! until it reproduces itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::interval::{Algebra, TruthInterval, DEFAULT_EPSILON};
use crate::program::{Atom, BodyElement, Literal, Program, Rule, RuleId};
use crate::transform::{transform, BodyExpr, TransformedProgram};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("no convergence after {sweeps} sweeps; unstable literals: {}", join(.unstable))]
    NonConvergence {
        sweeps: usize,
        unstable: Vec<Literal>,
    },
    #[error("no answer set found: negation as failure oscillates after {iterations} iterations")]
    Oscillation { iterations: usize },
    #[error("no answer set found: the fixpoint violates rules {}", join(.rules))]
    NotAModel { rules: Vec<RuleId> },
    #[error("k-minimal models are defined for programs without negation as failure")]
    NafInPositive,
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub algebra: Algebra,
    /// Inner iteration stops when no component moves by this much.
    pub inner_tolerance: f64,
    pub max_sweeps: usize,
    /// Equality tolerance for detecting the outer fixpoint.
    pub outer_tolerance: f64,
    pub max_outer: usize,
    /// Tolerance of the rule satisfaction check on computed models.
    pub model_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algebra: Algebra::default(),
            inner_tolerance: 1e-9,
            max_sweeps: 10_000,
            outer_tolerance: 1e-6,
            max_outer: 1000,
            model_tolerance: 1e-6,
        }
    }
}

/// Total map from literals to truth values; unassigned literals read `[0,1]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Interpretation {
    values: BTreeMap<Literal, TruthInterval>,
}

impl Interpretation {
    pub fn new() -> Self {
        Interpretation::default()
    }

    /// Every literal of the program set to `[0,1]`.
    pub fn unknown_over(literals: impl IntoIterator<Item = Literal>) -> Self {
        Interpretation {
            values: literals
                .into_iter()
                .map(|l| (l, TruthInterval::UNKNOWN))
                .collect(),
        }
    }

    pub fn get(&self, l: &Literal) -> TruthInterval {
        self.values
            .get(l)
            .copied()
            .unwrap_or(TruthInterval::UNKNOWN)
    }

    pub fn atom(&self, a: &Atom) -> TruthInterval {
        self.get(&Literal::pos(a.clone()))
    }

    pub fn set(&mut self, l: Literal, v: TruthInterval) {
        self.values.insert(l, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Literal, &TruthInterval)> {
        self.values.iter()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.values.keys().map(|l| l.atom.clone()).collect()
    }

    /// Equal on every literal assigned by either side, within `eps`.
    pub fn approx_eq(&self, other: &Interpretation, eps: f64) -> bool {
        self.values
            .keys()
            .chain(other.values.keys())
            .all(|l| self.get(l).approx_eq(&other.get(l), eps))
    }

    /// Values keyed by the literal's text, `-` marking classical negation.
    pub fn to_value_map(&self) -> BTreeMap<String, TruthInterval> {
        self.values
            .iter()
            .map(|(l, v)| (l.to_string(), *v))
            .collect()
    }
}

impl FromIterator<(Literal, TruthInterval)> for Interpretation {
    fn from_iter<T: IntoIterator<Item = (Literal, TruthInterval)>>(iter: T) -> Self {
        Interpretation {
            values: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, v) in &self.values {
            writeln!(f, "{l}: {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnswerSet {
    pub interpretation: Interpretation,
    pub consistent: bool,
    pub contradiction_atoms: BTreeSet<Atom>,
}

#[derive(Serialize)]
struct AnswerSetJson {
    consistent: bool,
    values: BTreeMap<String, TruthInterval>,
    contradictions: Vec<String>,
}

impl AnswerSet {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(AnswerSetJson {
            consistent: self.consistent,
            values: self.interpretation.to_value_map(),
            contradictions: self
                .contradiction_atoms
                .iter()
                .map(|a| a.to_string())
                .collect(),
        })
        .expect("answer sets serialize")
    }
}

/// Whether atom `a` is inconsistent in `i`: the sentinel on either
/// polarity, or equal certainty on `a` and `¬a` with truth degrees that are
/// not complementary.
pub fn atom_inconsistent(i: &Interpretation, a: &Atom, eps: f64) -> bool {
    let pv = i.get(&Literal::pos(a.clone()));
    let nv = i.get(&Literal::neg(a.clone()));
    if pv.is_contradiction() || nv.is_contradiction() {
        return true;
    }
    (pv.width() - nv.width()).abs() <= eps && (pv.midpoint() - (1.0 - nv.midpoint())).abs() > eps
}

pub fn is_inconsistent(i: &Interpretation) -> bool {
    i.atoms()
        .iter()
        .any(|a| atom_inconsistent(i, a, DEFAULT_EPSILON))
}

/// Value of the rule body conjoined with the rule weight.
pub fn body_value(i: &Interpretation, r: &Rule) -> TruthInterval {
    r.body
        .iter()
        .map(|b| match b {
            BodyElement::Lit(l) => i.get(l),
            BodyElement::Naf(l) => i.get(l).naf(),
            BodyElement::Const(c) => *c,
        })
        .fold(TruthInterval::TRUE, TruthInterval::and)
        .and(r.weight)
}

/// Rule satisfaction: the head equals the weighted body value, or is
/// strictly more certain, or strictly more true.
pub fn satisfies_within(i: &Interpretation, r: &Rule, eps: f64) -> bool {
    let head = i.get(&r.head);
    let body = body_value(i, r);
    if head.is_contradiction() || body.is_contradiction() {
        return head.is_contradiction();
    }
    head.approx_eq(&body, eps)
        || head.width() < body.width() - eps
        || head.midpoint() > body.midpoint() + eps
}

pub fn satisfies(i: &Interpretation, r: &Rule) -> bool {
    satisfies_within(i, r, DEFAULT_EPSILON)
}

/// Replaces every `not b` by the constant `naf(i(b))`.
pub fn reduct(p: &Program, i: &Interpretation) -> Program {
    if p.is_positive() {
        return p.clone();
    }
    let mut out = p.clone();
    for r in out.rules_mut() {
        for b in &mut r.body {
            if let BodyElement::Naf(l) = b {
                *b = BodyElement::Const(i.get(l).naf());
            }
        }
    }
    out
}

enum Node {
    Const(TruthInterval),
    Lit(usize),
    Naf(usize),
    And(Vec<Node>),
    Or(Vec<Node>),
    KAgg(Box<Node>, Box<Node>),
    CNeg(Box<Node>),
}

impl Node {
    fn eval(
        &self,
        alg: &Algebra,
        cur: &[TruthInterval],
        frozen: &[TruthInterval],
    ) -> TruthInterval {
        match self {
            Node::Const(c) => *c,
            Node::Lit(i) => cur[*i],
            Node::Naf(i) => frozen[*i].naf(),
            Node::And(xs) => xs.iter().fold(TruthInterval::TRUE, |acc, x| {
                acc.and(x.eval(alg, cur, frozen))
            }),
            Node::Or(xs) => xs.iter().fold(TruthInterval::FALSE, |acc, x| {
                acc.or(x.eval(alg, cur, frozen))
            }),
            Node::KAgg(a, b) => alg.k_aggregate(a.eval(alg, cur, frozen), b.eval(alg, cur, frozen)),
            Node::CNeg(x) => x.eval(alg, cur, frozen).cneg(),
        }
    }
}

/// The equation system with literals replaced by dense indices.
struct Compiled {
    literals: Vec<Literal>,
    equations: Vec<Option<Node>>,
    complement: Vec<Option<usize>>,
}

impl Compiled {
    fn new(tp: &TransformedProgram) -> Self {
        let literals: Vec<Literal> = tp.literals().iter().cloned().collect();
        let index: BTreeMap<&Literal, usize> =
            literals.iter().enumerate().map(|(i, l)| (l, i)).collect();
        fn compile(e: &BodyExpr, index: &BTreeMap<&Literal, usize>) -> Node {
            match e {
                BodyExpr::Const(c) => Node::Const(*c),
                BodyExpr::Lit(l) => Node::Lit(index[l]),
                BodyExpr::Naf(l) => Node::Naf(index[l]),
                BodyExpr::And(xs) => Node::And(xs.iter().map(|x| compile(x, index)).collect()),
                BodyExpr::Or(xs) => Node::Or(xs.iter().map(|x| compile(x, index)).collect()),
                BodyExpr::KAgg(a, b) => {
                    Node::KAgg(Box::new(compile(a, index)), Box::new(compile(b, index)))
                }
                BodyExpr::CNeg(x) => Node::CNeg(Box::new(compile(x, index))),
            }
        }
        let mut equations: Vec<Option<Node>> = (0..literals.len()).map(|_| None).collect();
        for eq in tp.all_equations() {
            equations[index[&eq.head]] = Some(compile(&eq.expr, &index));
        }
        let complement = literals
            .iter()
            .map(|l| index.get(&l.complement()).copied())
            .collect();
        Compiled {
            literals,
            equations,
            complement,
        }
    }

    /// Value of literal `i` under `cur`. A literal without an equation is
    /// unknown unless its complement is contradictory, in which case the
    /// whole atom is.
    fn eval(
        &self,
        i: usize,
        alg: &Algebra,
        cur: &[TruthInterval],
        frozen: &[TruthInterval],
    ) -> TruthInterval {
        match &self.equations[i] {
            Some(e) => e.eval(alg, cur, frozen),
            None => match self.complement[i] {
                Some(c) if cur[c].is_contradiction() => cur[c],
                _ => TruthInterval::UNKNOWN,
            },
        }
    }

    fn to_interpretation(&self, values: &[TruthInterval]) -> Interpretation {
        self.literals
            .iter()
            .cloned()
            .zip(values.iter().copied())
            .collect()
    }

    /// Jacobi iteration with naf-literals read from `frozen`.
    fn fixpoint(
        &self,
        cfg: &SolverConfig,
        frozen: &[TruthInterval],
    ) -> Result<Vec<TruthInterval>, SemanticsError> {
        let n = self.literals.len();
        let mut cur = vec![TruthInterval::UNKNOWN; n];
        let mut next = cur.clone();
        for _ in 0..cfg.max_sweeps {
            let mut delta = 0.0f64;
            for i in 0..n {
                next[i] = self.eval(i, &cfg.algebra, &cur, frozen);
                delta = delta.max(next[i].max_abs_diff(&cur[i]));
            }
            std::mem::swap(&mut cur, &mut next);
            if delta < cfg.inner_tolerance {
                return Ok(cur);
            }
        }
        let unstable = (0..n)
            .filter(|&i| {
                let v = self.eval(i, &cfg.algebra, &cur, frozen);
                v.max_abs_diff(&cur[i]) >= cfg.inner_tolerance
            })
            .map(|i| self.literals[i].clone())
            .collect();
        Err(SemanticsError::NonConvergence {
            sweeps: cfg.max_sweeps,
            unstable,
        })
    }
}

fn close(a: &[TruthInterval], b: &[TruthInterval], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| x.approx_eq(y, eps))
}

/// Least fixpoint of a naf-free equation system.
pub fn k_minimal_model(tp: &TransformedProgram) -> Result<Interpretation, SemanticsError> {
    k_minimal_model_with(tp, &SolverConfig::default())
}

pub fn k_minimal_model_with(
    tp: &TransformedProgram,
    cfg: &SolverConfig,
) -> Result<Interpretation, SemanticsError> {
    if tp.has_naf() {
        return Err(SemanticsError::NafInPositive);
    }
    let c = Compiled::new(tp);
    let frozen = vec![TruthInterval::UNKNOWN; c.literals.len()];
    Ok(c.to_interpretation(&c.fixpoint(cfg, &frozen)?))
}

/// Largest gap between an equation's right-hand side and its head value.
pub fn max_residual(tp: &TransformedProgram, i: &Interpretation, alg: &Algebra) -> f64 {
    tp.all_equations()
        .map(|eq| {
            let v = eq.expr.eval_with(alg, &|l| i.get(l), &|l| i.get(l));
            v.max_abs_diff(&i.get(&eq.head))
        })
        .fold(0.0, f64::max)
}

/// Rules the interpretation does not satisfy, within `eps`.
pub fn violated_rules(p: &Program, i: &Interpretation, eps: f64) -> Vec<RuleId> {
    p.rules()
        .iter()
        .filter(|r| !satisfies_within(i, r, eps))
        .map(|r| r.id.clone())
        .collect()
}

pub fn answer_set(p: &Program) -> Result<AnswerSet, SemanticsError> {
    answer_set_with(p, &SolverConfig::default())
}

/// Computes the answer set of a ground program. The fixpoint is accepted
/// only if it satisfies every rule.
pub fn answer_set_with(p: &Program, cfg: &SolverConfig) -> Result<AnswerSet, SemanticsError> {
    let (tp, _) = transform(p);
    let c = Compiled::new(&tp);
    let n = c.literals.len();
    let mut current = vec![TruthInterval::UNKNOWN; n];
    let mut history: Vec<Vec<TruthInterval>> = Vec::new();
    let positive = !tp.has_naf();
    let mut found = None;
    for _ in 0..cfg.max_outer {
        let next = c.fixpoint(cfg, &current)?;
        if positive || close(&next, &current, cfg.outer_tolerance) {
            found = Some(next);
            break;
        }
        if history.iter().any(|h| close(h, &next, cfg.outer_tolerance)) {
            return Err(SemanticsError::Oscillation {
                iterations: history.len() + 1,
            });
        }
        history.push(std::mem::replace(&mut current, next));
    }
    let Some(values) = found else {
        return Err(SemanticsError::Oscillation {
            iterations: cfg.max_outer,
        });
    };
    let interpretation = c.to_interpretation(&values);
    let violated = violated_rules(p, &interpretation, cfg.model_tolerance);
    if !violated.is_empty() {
        return Err(SemanticsError::NotAModel { rules: violated });
    }
    let contradiction_atoms: BTreeSet<Atom> = interpretation
        .atoms()
        .into_iter()
        .filter(|a| atom_inconsistent(&interpretation, a, cfg.algebra.epsilon))
        .collect();
    Ok(AnswerSet {
        consistent: contradiction_atoms.is_empty(),
        interpretation,
        contradiction_atoms,
    })
}

/// A program is consistent when it has an answer set free of contradictions.
pub fn is_consistent(p: &Program, cfg: &SolverConfig) -> bool {
    matches!(answer_set_with(p, cfg), Ok(a) if a.consistent)
}
