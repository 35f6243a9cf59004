//! Grounding over a finite set of constants.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Atom, BodyElement, Literal, Program, Rule, RuleId, Term};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroundError {
    #[error("rule `{0}` has variables but the constant set is empty")]
    NoConstants(RuleId),
    #[error("grounding produced the label `{0}` twice")]
    LabelClash(RuleId),
}

fn subst_atom(a: &Atom, env: &BTreeMap<&str, &str>) -> Atom {
    Atom {
        predicate: a.predicate.clone(),
        args: a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Term::Const(env[v.as_str()].to_string()),
                c => c.clone(),
            })
            .collect(),
    }
}

fn subst_lit(l: &Literal, env: &BTreeMap<&str, &str>) -> Literal {
    Literal {
        atom: subst_atom(&l.atom, env),
        negated: l.negated,
    }
}

fn variables(rule: &Rule) -> Vec<&str> {
    let mut seen = Vec::new();
    for a in rule.atoms() {
        for t in &a.args {
            if let Term::Var(v) = t {
                if !seen.contains(&v.as_str()) {
                    seen.push(v.as_str());
                }
            }
        }
    }
    seen
}

/// Replaces every rule by all its substitution instances over `constants`.
///
/// Instances are labelled `<label>_<c1>_<c2>...` with the constants in
/// variable order; variable-free rules keep their label.
pub fn ground(program: &Program, constants: &BTreeSet<String>) -> Result<Program, GroundError> {
    let consts: Vec<&str> = constants.iter().map(String::as_str).collect();
    let mut out: Vec<Rule> = Vec::new();
    let mut labels = BTreeSet::new();
    for rule in program.rules() {
        let vars = variables(rule);
        if vars.is_empty() {
            if !labels.insert(rule.id.clone()) {
                return Err(GroundError::LabelClash(rule.id.clone()));
            }
            out.push(rule.clone());
            continue;
        }
        if consts.is_empty() {
            return Err(GroundError::NoConstants(rule.id.clone()));
        }
        // Odometer over consts^vars.
        let mut idx = vec![0usize; vars.len()];
        loop {
            let env: BTreeMap<&str, &str> = vars
                .iter()
                .zip(&idx)
                .map(|(v, &i)| (*v, consts[i]))
                .collect();
            let mut label = rule.id.0.clone();
            for &i in &idx {
                label.push('_');
                label.push_str(consts[i]);
            }
            let id = RuleId(label);
            if !labels.insert(id.clone()) {
                return Err(GroundError::LabelClash(id));
            }
            out.push(Rule {
                id,
                head: subst_lit(&rule.head, &env),
                body: rule
                    .body
                    .iter()
                    .map(|b| match b {
                        BodyElement::Lit(l) => BodyElement::Lit(subst_lit(l, &env)),
                        BodyElement::Naf(l) => BodyElement::Naf(subst_lit(l, &env)),
                        BodyElement::Const(c) => BodyElement::Const(*c),
                    })
                    .collect(),
                weight: rule.weight,
            });

            let mut exhausted = true;
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < consts.len() {
                    exhausted = false;
                    break;
                }
                idx[k] = 0;
            }
            if exhausted {
                break;
            }
        }
    }
    Ok(Program::new(out).expect("labels checked above"))
}

/// Grounds over the constants that occur in the program itself.
pub fn ground_with_own_constants(program: &Program) -> Result<Program, GroundError> {
    if program.is_ground() {
        return Ok(program.clone());
    }
    ground(program, &program.constants())
}
