//! Abstract syntax of weighted logic programs.
//!
//! A program is an ordered list of labelled rules
//! `id: head :- b1, ..., not bk, [lo,hi] @ [wlo,whi].` Rule identity is the
//! label, not the structure, so two structurally identical rules with
//! different labels are different rules.

mod ground;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::TruthInterval;

pub use ground::{ground, ground_with_own_constants, GroundError};
pub use parser::{parse_program, ParseError};

/// Label of a rule, unique within a program.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RuleId(pub String);

impl RuleId {
    pub fn new(s: impl Into<String>) -> Self {
        RuleId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RuleId {
    fn from(s: &str) -> Self {
        RuleId(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    Var(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => f.write_str(c),
            Term::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn prop(name: impl Into<String>) -> Self {
        Atom {
            predicate: name.into(),
            args: Vec::new(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// An atom or its classical negation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            negated: true,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            negated: !self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BodyElement {
    Lit(Literal),
    Naf(Literal),
    Const(TruthInterval),
}

impl BodyElement {
    pub fn literal(&self) -> Option<&Literal> {
        match self {
            BodyElement::Lit(l) | BodyElement::Naf(l) => Some(l),
            BodyElement::Const(_) => None,
        }
    }
}

impl fmt::Display for BodyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElement::Lit(l) => write!(f, "{l}"),
            BodyElement::Naf(l) => write!(f, "not {l}"),
            BodyElement::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub id: RuleId,
    pub head: Literal,
    pub body: Vec<BodyElement>,
    pub weight: TruthInterval,
}

impl Rule {
    /// A fact has no literal in its body.
    pub fn is_fact(&self) -> bool {
        self.body.iter().all(|b| matches!(b, BodyElement::Const(_)))
    }

    pub fn has_naf(&self) -> bool {
        self.body.iter().any(|b| matches!(b, BodyElement::Naf(_)))
    }

    pub fn is_ground(&self) -> bool {
        self.head.atom.is_ground()
            && self
                .body
                .iter()
                .filter_map(BodyElement::literal)
                .all(|l| l.atom.is_ground())
    }

    /// Atoms mentioned anywhere in the rule, head first.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head.atom).chain(
            self.body
                .iter()
                .filter_map(BodyElement::literal)
                .map(|l| &l.atom),
        )
    }

    /// Same head and body, weight ignored.
    pub fn same_shape(&self, other: &Rule) -> bool {
        self.head == other.head && self.body == other.body
    }

    /// Same label, head and body, and weights equal within `eps`.
    pub fn syntactically_eq(&self, other: &Rule, eps: f64) -> bool {
        self.id == other.id && self.same_shape(other) && self.weight.approx_eq(&other.weight, eps)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.id, self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        write!(f, " @ {}.", self.weight)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProgramError {
    #[error("duplicate rule label `{0}`")]
    DuplicateLabel(RuleId),
}

/// An ordered, finite set of rules with unique labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Result<Self, ProgramError> {
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(&r.id) {
                return Err(ProgramError::DuplicateLabel(r.id.clone()));
            }
        }
        Ok(Program { rules })
    }

    pub fn empty() -> Self {
        Program::default()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, id: &RuleId) -> Option<&Rule> {
        self.rules.iter().find(|r| &r.id == id)
    }

    pub fn contains(&self, id: &RuleId) -> bool {
        self.get(id).is_some()
    }

    pub fn ids(&self) -> impl Iterator<Item = &RuleId> {
        self.rules.iter().map(|r| &r.id)
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(Rule::is_ground)
    }

    pub fn is_positive(&self) -> bool {
        !self.rules.iter().any(Rule::has_naf)
    }

    /// Every atom occurring in a head or a body.
    pub fn atom_base(&self) -> BTreeSet<Atom> {
        self.rules.iter().flat_map(|r| r.atoms().cloned()).collect()
    }

    /// Both polarities of every atom in the atom base.
    pub fn literals(&self) -> BTreeSet<Literal> {
        self.atom_base()
            .into_iter()
            .flat_map(|a| [Literal::pos(a.clone()), Literal::neg(a)])
            .collect()
    }

    pub fn constants(&self) -> BTreeSet<String> {
        self.rules
            .iter()
            .flat_map(|r| r.atoms())
            .flat_map(|a| a.args.iter())
            .filter_map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect()
    }

    /// The program minus the listed rules; unknown ids are ignored.
    pub fn without(&self, ids: &BTreeSet<RuleId>) -> Program {
        Program {
            rules: self
                .rules
                .iter()
                .filter(|r| !ids.contains(&r.id))
                .cloned()
                .collect(),
        }
    }

    /// Keeps only the listed rules, in program order.
    pub fn restricted_to(&self, ids: &BTreeSet<RuleId>) -> Program {
        Program {
            rules: self
                .rules
                .iter()
                .filter(|r| ids.contains(&r.id))
                .cloned()
                .collect(),
        }
    }

    pub fn push(&mut self, rule: Rule) -> Result<(), ProgramError> {
        if self.contains(&rule.id) {
            return Err(ProgramError::DuplicateLabel(rule.id));
        }
        self.rules.push(rule);
        Ok(())
    }

    /// Plain union. Rules of `other` whose label already exists are skipped
    /// when identical and rejected otherwise.
    pub fn union(&self, other: &Program) -> Result<Program, ProgramError> {
        let mut out = self.clone();
        for r in &other.rules {
            match out.get(&r.id) {
                Some(existing) if existing == r => {}
                Some(_) => return Err(ProgramError::DuplicateLabel(r.id.clone())),
                None => out.rules.push(r.clone()),
            }
        }
        Ok(out)
    }

    /// Relabels rules whose label is taken in `other`. Returns the renamed
    /// program and a map from new label to original label.
    pub fn relabeled_apart(&self, other: &Program) -> (Program, BTreeMap<RuleId, RuleId>) {
        let taken: BTreeSet<&RuleId> = other.ids().chain(self.ids()).collect();
        let mut fresh = BTreeSet::new();
        let mut renamed = BTreeMap::new();
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let mut r = r.clone();
            if other.contains(&r.id) {
                let mut n = 1;
                let new_id = loop {
                    let candidate = RuleId(format!("{}_p{}", r.id, n));
                    if !taken.contains(&candidate) && !fresh.contains(&candidate) {
                        break candidate;
                    }
                    n += 1;
                };
                fresh.insert(new_id.clone());
                renamed.insert(new_id.clone(), r.id.clone());
                r.id = new_id;
            }
            rules.push(r);
        }
        (Program { rules }, renamed)
    }

    pub(crate) fn rules_mut(&mut self) -> &mut Vec<Rule> {
        &mut self.rules
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Program {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_program(s)
    }
}
