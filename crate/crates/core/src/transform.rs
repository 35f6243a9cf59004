//! Program transformation into one equation per head literal, the
//! transformation table linking equations back to source rules, and
//! resolution trees over the equations.
//!
//! For every atom `a` the rules with head `a` are combined into a weighted
//! disjunction `(w1 ∧ body1) ∨ ... ∨ (wk ∧ bodyk)`. When rules for `¬a`
//! exist as well, the head value is `pos ⊗k ¬neg` and `¬a` is tied to the
//! classical negation of `a`. Atoms that head no rule at all get the
//! constant `[0,1]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::interval::{Algebra, TruthInterval};
use crate::program::{Atom, BodyElement, Literal, Program, Rule, RuleId};

/// Identifier of a transformed equation group, printed `r<n>^T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransformedId(pub usize);

impl fmt::Display for TransformedId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}^T", self.0)
    }
}

impl Serialize for TransformedId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BodyExpr {
    Const(TruthInterval),
    Lit(Literal),
    /// Negation as failure applied to a literal.
    Naf(Literal),
    And(Vec<BodyExpr>),
    Or(Vec<BodyExpr>),
    KAgg(Box<BodyExpr>, Box<BodyExpr>),
    CNeg(Box<BodyExpr>),
}

impl BodyExpr {
    fn and(mut items: Vec<BodyExpr>) -> BodyExpr {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            BodyExpr::And(items)
        }
    }

    fn or(mut items: Vec<BodyExpr>) -> BodyExpr {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            BodyExpr::Or(items)
        }
    }

    /// Evaluates bottom-up. `value` supplies literal values and `naf_value`
    /// the values seen through negation as failure.
    pub fn eval_with(
        &self,
        alg: &Algebra,
        value: &dyn Fn(&Literal) -> TruthInterval,
        naf_value: &dyn Fn(&Literal) -> TruthInterval,
    ) -> TruthInterval {
        match self {
            BodyExpr::Const(c) => *c,
            BodyExpr::Lit(l) => value(l),
            BodyExpr::Naf(l) => naf_value(l).naf(),
            BodyExpr::And(xs) => xs
                .iter()
                .map(|x| x.eval_with(alg, value, naf_value))
                .fold(TruthInterval::TRUE, TruthInterval::and),
            BodyExpr::Or(xs) => xs
                .iter()
                .map(|x| x.eval_with(alg, value, naf_value))
                .fold(TruthInterval::FALSE, TruthInterval::or),
            BodyExpr::KAgg(a, b) => alg.k_aggregate(
                a.eval_with(alg, value, naf_value),
                b.eval_with(alg, value, naf_value),
            ),
            BodyExpr::CNeg(x) => x.eval_with(alg, value, naf_value).cneg(),
        }
    }

    /// Literals referenced in the expression, left to right, without repeats.
    pub fn literal_refs(&self) -> Vec<&Literal> {
        fn walk<'a>(e: &'a BodyExpr, out: &mut Vec<&'a Literal>) {
            match e {
                BodyExpr::Const(_) => {}
                BodyExpr::Lit(l) | BodyExpr::Naf(l) => {
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
                BodyExpr::And(xs) | BodyExpr::Or(xs) => xs.iter().for_each(|x| walk(x, out)),
                BodyExpr::KAgg(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                BodyExpr::CNeg(x) => walk(x, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn has_naf(&self) -> bool {
        match self {
            BodyExpr::Naf(_) => true,
            BodyExpr::Const(_) | BodyExpr::Lit(_) => false,
            BodyExpr::And(xs) | BodyExpr::Or(xs) => xs.iter().any(BodyExpr::has_naf),
            BodyExpr::KAgg(a, b) => a.has_naf() || b.has_naf(),
            BodyExpr::CNeg(x) => x.has_naf(),
        }
    }

    fn is_compound(&self) -> bool {
        matches!(
            self,
            BodyExpr::And(_) | BodyExpr::Or(_) | BodyExpr::KAgg(..)
        )
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_compound() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn fmt_literal(l: &Literal, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if l.negated {
        write!(f, "¬{}", l.atom)
    } else {
        write!(f, "{}", l.atom)
    }
}

impl fmt::Display for BodyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyExpr::Const(c) => write!(f, "{c}"),
            BodyExpr::Lit(l) => fmt_literal(l, f),
            BodyExpr::Naf(l) => {
                f.write_str("not ")?;
                fmt_literal(l, f)
            }
            BodyExpr::And(xs) | BodyExpr::Or(xs) => {
                let sep = if matches!(self, BodyExpr::And(_)) {
                    " ∧ "
                } else {
                    " ∨ "
                };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    x.fmt_child(f)?;
                }
                Ok(())
            }
            BodyExpr::KAgg(a, b) => {
                a.fmt_child(f)?;
                f.write_str(" ⊗k ")?;
                b.fmt_child(f)
            }
            BodyExpr::CNeg(x) => {
                f.write_str("¬")?;
                x.fmt_child(f)
            }
        }
    }
}

/// One equation `head ⟵ expr` of the transformed program.
#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub id: TransformedId,
    pub head: Literal,
    pub expr: BodyExpr,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.id)?;
        fmt_literal(&self.head, f)?;
        write!(f, " ⟵ {}", self.expr)
    }
}

/// Row of the transformation table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub id: TransformedId,
    pub head: String,
    pub sources: BTreeSet<RuleId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TransformationTable {
    pub rows: Vec<TableRow>,
}

impl TransformationTable {
    pub fn sources(&self, id: TransformedId) -> Option<&BTreeSet<RuleId>> {
        self.rows.iter().find(|r| r.id == id).map(|r| &r.sources)
    }

    pub fn row_of(&self, rule: &RuleId) -> Option<TransformedId> {
        self.rows
            .iter()
            .find(|r| r.sources.contains(rule))
            .map(|r| r.id)
    }
}

impl fmt::Display for TransformationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let src: Vec<&str> = row.sources.iter().map(RuleId::as_str).collect();
            writeln!(f, "{}  {}  {{{}}}", row.id, row.head, src.join(", "))?;
        }
        Ok(())
    }
}

/// The equation system. Primary equations are the displayed rows; the
/// companion equations tie `¬a` to `a` where both polarities head rules.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TransformedProgram {
    equations: Vec<Equation>,
    companions: Vec<Equation>,
    literals: BTreeSet<Literal>,
}

impl TransformedProgram {
    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Equations for `¬a` of the form `¬a ⟵ ¬a` (classical negation of `a`).
    pub fn companions(&self) -> &[Equation] {
        &self.companions
    }

    pub fn all_equations(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter().chain(&self.companions)
    }

    pub fn equation_for(&self, l: &Literal) -> Option<&Equation> {
        self.all_equations().find(|e| &e.head == l)
    }

    /// Every literal the interpretation must assign, both polarities.
    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.literals
    }

    pub fn has_naf(&self) -> bool {
        self.all_equations().any(|e| e.expr.has_naf())
    }
}

impl fmt::Display for TransformedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equations {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

fn rule_term(rule: &Rule) -> BodyExpr {
    if rule.body.is_empty() {
        return BodyExpr::Const(rule.weight);
    }
    let mut items = Vec::with_capacity(rule.body.len() + 1);
    if rule.weight != TruthInterval::TRUE {
        items.push(BodyExpr::Const(rule.weight));
    }
    items.extend(rule.body.iter().map(|b| match b {
        BodyElement::Lit(l) => BodyExpr::Lit(l.clone()),
        BodyElement::Naf(l) => BodyExpr::Naf(l.clone()),
        BodyElement::Const(c) => BodyExpr::Const(*c),
    }));
    BodyExpr::and(items)
}

fn group_expr(rules: &[&Rule]) -> BodyExpr {
    BodyExpr::or(rules.iter().map(|r| rule_term(r)).collect())
}

/// Builds the equation system and its transformation table.
///
/// Groups are numbered by the first rule heading the atom, in program order;
/// atoms heading no rule follow in order of first occurrence.
pub fn transform(program: &Program) -> (TransformedProgram, TransformationTable) {
    let mut order: Vec<Atom> = Vec::new();
    let mut pos: BTreeMap<Atom, Vec<&Rule>> = BTreeMap::new();
    let mut neg: BTreeMap<Atom, Vec<&Rule>> = BTreeMap::new();
    for r in program.rules() {
        let a = &r.head.atom;
        if !pos.contains_key(a) && !neg.contains_key(a) {
            order.push(a.clone());
        }
        let side = if r.head.negated { &mut neg } else { &mut pos };
        side.entry(a.clone()).or_default().push(r);
    }
    let headed: BTreeSet<Atom> = order.iter().cloned().collect();
    let mut seen = BTreeSet::new();
    for r in program.rules() {
        for a in r.atoms() {
            if !headed.contains(a) && seen.insert(a.clone()) {
                order.push(a.clone());
            }
        }
    }

    let mut tp = TransformedProgram::default();
    let mut table = TransformationTable::default();
    for (i, atom) in order.into_iter().enumerate() {
        let id = TransformedId(i + 1);
        let p = pos.get(&atom).map(Vec::as_slice).unwrap_or(&[]);
        let n = neg.get(&atom).map(Vec::as_slice).unwrap_or(&[]);
        let pl = Literal::pos(atom.clone());
        let nl = Literal::neg(atom.clone());
        let sources: BTreeSet<RuleId> = p.iter().chain(n).map(|r| r.id.clone()).collect();
        let (head, expr) = match (p.is_empty(), n.is_empty()) {
            (true, true) => (pl.clone(), BodyExpr::Const(TruthInterval::UNKNOWN)),
            (false, true) => (pl.clone(), group_expr(p)),
            (true, false) => (nl.clone(), group_expr(n)),
            (false, false) => {
                tp.companions.push(Equation {
                    id,
                    head: nl.clone(),
                    expr: BodyExpr::CNeg(Box::new(BodyExpr::Lit(pl.clone()))),
                });
                (
                    pl.clone(),
                    BodyExpr::KAgg(
                        Box::new(group_expr(p)),
                        Box::new(BodyExpr::CNeg(Box::new(group_expr(n)))),
                    ),
                )
            }
        };
        table.rows.push(TableRow {
            id,
            head: if head.negated {
                format!("¬{}", head.atom)
            } else {
                head.atom.to_string()
            },
            sources,
        });
        tp.equations.push(Equation { id, head, expr });
        tp.literals.insert(pl);
        tp.literals.insert(nl);
    }
    (tp, table)
}

/// Node of a resolution tree: a literal together with the equation used to
/// expand it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeNode {
    pub literal: String,
    /// Equation expanded at this node; `None` for defaulted literals and
    /// cycle markers.
    pub rule: Option<TransformedId>,
    pub expr: String,
    /// The literal already occurs higher up on this branch.
    pub cycle: bool,
    pub children: Vec<TreeNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolutionTree {
    pub root: TreeNode,
    /// Every equation reachable from the root.
    pub used: BTreeSet<TransformedId>,
}

/// Upper bound on expanded nodes; deeper subtrees are cut (the used-rule
/// set is computed independently and stays exact).
const TREE_NODE_BUDGET: usize = 100_000;

fn literal_label(l: &Literal) -> String {
    if l.negated {
        format!("¬{}", l.atom)
    } else {
        l.atom.to_string()
    }
}

/// Expands `target` depth-first, left to right, replacing each literal by
/// its equation body once per branch.
pub fn resolution_tree(tp: &TransformedProgram, target: &Literal) -> ResolutionTree {
    fn expand(
        tp: &TransformedProgram,
        l: &Literal,
        path: &mut Vec<Literal>,
        budget: &mut usize,
    ) -> TreeNode {
        if path.contains(l) {
            return TreeNode {
                literal: literal_label(l),
                rule: None,
                expr: "cycle".into(),
                cycle: true,
                children: Vec::new(),
            };
        }
        let Some(eq) = tp.equation_for(l) else {
            return TreeNode {
                literal: literal_label(l),
                rule: None,
                expr: TruthInterval::UNKNOWN.to_string(),
                cycle: false,
                children: Vec::new(),
            };
        };
        *budget = budget.saturating_sub(1);
        path.push(l.clone());
        let children = if *budget == 0 {
            Vec::new()
        } else {
            eq.expr
                .literal_refs()
                .into_iter()
                .map(|c| expand(tp, c, path, budget))
                .collect()
        };
        path.pop();
        TreeNode {
            literal: literal_label(l),
            rule: Some(eq.id),
            expr: eq.expr.to_string(),
            cycle: false,
            children,
        }
    }

    let mut budget = TREE_NODE_BUDGET;
    let root = expand(tp, target, &mut Vec::new(), &mut budget);
    ResolutionTree {
        root,
        used: reachable_equations(tp, target),
    }
}

/// Equations reachable from `target` in the dependency graph.
pub fn reachable_equations(tp: &TransformedProgram, target: &Literal) -> BTreeSet<TransformedId> {
    let mut used = BTreeSet::new();
    let mut visited = BTreeSet::new();
    let mut stack = vec![target.clone()];
    while let Some(l) = stack.pop() {
        if !visited.insert(l.clone()) {
            continue;
        }
        if let Some(eq) = tp.equation_for(&l) {
            used.insert(eq.id);
            stack.extend(eq.expr.literal_refs().into_iter().cloned());
        }
    }
    used
}

/// Source rules of every equation used in the tree.
pub fn rules_in_derivation(tree: &ResolutionTree, table: &TransformationTable) -> BTreeSet<RuleId> {
    tree.used
        .iter()
        .filter_map(|id| table.sources(*id))
        .flat_map(|s| s.iter().cloned())
        .collect()
}

impl TreeNode {
    /// Indented text rendering, one node per line.
    pub fn render(&self) -> String {
        fn go(n: &TreeNode, depth: usize, out: &mut String) {
            out.push_str(&"  ".repeat(depth));
            match (n.cycle, n.rule) {
                (true, _) => out.push_str(&format!("{} (cycle)\n", n.literal)),
                (false, Some(id)) => out.push_str(&format!("{id}: {} ⟵ {}\n", n.literal, n.expr)),
                (false, None) => out.push_str(&format!("{} ⟵ {}\n", n.literal, n.expr)),
            }
            for c in &n.children {
                go(c, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }
}
