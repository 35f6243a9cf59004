//! Modified union: the plain union of two bases in which every disposition
//! has its weight widened once per exception contributed by the other base.

use std::collections::BTreeMap;

use serde::Serialize;

use super::RevisionConfig;
use crate::interval::TruthInterval;
use crate::program::{Program, RuleId};

/// A disposition (a rule with a non-exact weight) together with the rules
/// of the other base whose head is the complement of its head.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DispositionLink {
    pub disposition: RuleId,
    pub exceptions: Vec<RuleId>,
}

/// Which base a rule of a merged program came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Base,
    New,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergedProgram {
    pub program: Program,
    pub origin: BTreeMap<RuleId, Origin>,
    pub links: Vec<DispositionLink>,
}

/// Links in both directions: dispositions of `p` with exceptions in `q`,
/// then dispositions of `q` with exceptions in `p`.
pub fn find_disposition_links(p: &Program, q: &Program, eps: f64) -> Vec<DispositionLink> {
    fn one_way(from: &Program, other: &Program, eps: f64, out: &mut Vec<DispositionLink>) {
        for r in from.rules() {
            if r.weight.width() <= eps {
                continue;
            }
            let target = r.head.complement();
            let exceptions: Vec<RuleId> = other
                .rules()
                .iter()
                .filter(|x| x.head == target)
                .map(|x| x.id.clone())
                .collect();
            if !exceptions.is_empty() {
                out.push(DispositionLink {
                    disposition: r.id.clone(),
                    exceptions,
                });
            }
        }
    }
    let mut out = Vec::new();
    one_way(p, q, eps, &mut out);
    one_way(q, p, eps, &mut out);
    out
}

/// Rounds away the representation noise of repeated decimal arithmetic, so
/// that `0.7 + 0.1` widens to exactly `0.8`.
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Widens `w` by `delta` per new exception on both sides, clamped to `[0,1]`.
pub fn update_weight(w: TruthInterval, new_exceptions: usize, delta: f64) -> TruthInterval {
    if new_exceptions == 0 {
        return w;
    }
    let step = delta * new_exceptions as f64;
    let lo = snap((w.lo() - step).max(0.0));
    let hi = snap((w.hi() + step).min(1.0));
    TruthInterval::new(lo.min(w.lo()), hi.max(w.hi())).expect("widened weight stays in [0,1]")
}

/// `p ∪* q`. Rules of `p` whose label is also used in `q` must have been
/// relabelled beforehand; `q` keeps its labels.
pub fn modified_union(p: &Program, q: &Program, cfg: &RevisionConfig) -> MergedProgram {
    let links = find_disposition_links(p, q, cfg.solver.algebra.epsilon);
    let counts: BTreeMap<&RuleId, usize> = links
        .iter()
        .map(|l| (&l.disposition, l.exceptions.len()))
        .collect();
    let mut rules = Vec::with_capacity(p.len() + q.len());
    let mut origin = BTreeMap::new();
    for (prog, tag) in [(p, Origin::Base), (q, Origin::New)] {
        for r in prog.rules() {
            let mut r = r.clone();
            if let Some(&m) = counts.get(&r.id) {
                r.weight = update_weight(r.weight, m, cfg.delta);
            }
            origin.insert(r.id.clone(), tag);
            rules.push(r);
        }
    }
    MergedProgram {
        program: Program::new(rules).expect("base labels were made disjoint from the new ones"),
        origin,
        links,
    }
}
