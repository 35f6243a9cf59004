//! Executable checks of the base revision postulates for the operator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::program::{Atom, Program, Rule, RuleId};
use crate::revision::{find_disposition_links, modified_union, revise, Revision, RevisionConfig};
use crate::semantics::is_consistent;

/// Subsets are enumerated exhaustively up to this many rules.
pub const EXHAUSTIVE_LIMIT: usize = 12;
/// Number of sampled subsets above the exhaustive limit.
pub const SAMPLE_COUNT: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Postulate {
    Success,
    Inclusion,
    NmConsistency,
    Fullness,
    Uniformity,
    WeakDisjunction,
    WeakParallelism,
}

impl Postulate {
    pub const ALL: [Postulate; 7] = [
        Postulate::Success,
        Postulate::Inclusion,
        Postulate::NmConsistency,
        Postulate::Fullness,
        Postulate::Uniformity,
        Postulate::WeakDisjunction,
        Postulate::WeakParallelism,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Postulate::Success => "success",
            Postulate::Inclusion => "inclusion",
            Postulate::NmConsistency => "nm",
            Postulate::Fullness => "fullness",
            Postulate::Uniformity => "uniformity",
            Postulate::WeakDisjunction => "disjunction",
            Postulate::WeakParallelism => "parallelism",
        }
    }
}

impl fmt::Display for Postulate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for Postulate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Postulate::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown postulate `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    HoldsModified,
    PreconditionUnmet,
    Violated,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Status::Holds => "holds",
            Status::HoldsModified => "holds-modified",
            Status::PreconditionUnmet => "precondition-unmet",
            Status::Violated => "violated",
        })
    }
}

/// Inputs and removed sets needed to replay a check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub programs: BTreeMap<String, String>,
    pub removed: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub postulate: Postulate,
    pub status: Status,
    pub detail: String,
    pub witness: Option<Witness>,
}

impl Outcome {
    fn new(postulate: Postulate, status: Status, detail: impl Into<String>) -> Self {
        Outcome {
            postulate,
            status,
            detail: detail.into(),
            witness: None,
        }
    }

    fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<12} {:<19} {}",
            self.postulate, self.status, self.detail
        )
    }
}

fn witness(programs: &[(&str, &Program)], removed: &[(&str, &Revision)]) -> Witness {
    Witness {
        programs: programs
            .iter()
            .map(|(n, p)| (n.to_string(), p.to_string()))
            .collect(),
        removed: removed
            .iter()
            .map(|(n, r)| {
                (
                    n.to_string(),
                    r.removed.rules.iter().map(|id| id.to_string()).collect(),
                )
            })
            .collect(),
    }
}

fn ids(xs: &BTreeSet<RuleId>) -> String {
    let v: Vec<&str> = xs.iter().map(RuleId::as_str).collect();
    format!("{{{}}}", v.join(", "))
}

/// Every rule of `q` is in the revision result, possibly with a changed weight.
pub fn check_success(p: &Program, q: &Program, cfg: &RevisionConfig) -> Outcome {
    let post = Postulate::Success;
    let rev = match revise(p, q, cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::new(post, Status::PreconditionUnmet, e.to_string()),
    };
    let eps = cfg.solver.algebra.epsilon;
    let mut modified = Vec::new();
    for r in q.rules() {
        match rev.program().get(&r.id) {
            Some(x) if x.same_shape(r) && x.weight.approx_eq(&r.weight, eps) => {}
            Some(x) if x.same_shape(r) => {
                modified.push(format!("{} {} -> {}", r.id, r.weight, x.weight))
            }
            _ => {
                return Outcome::new(
                    post,
                    Status::Violated,
                    format!("rule {} of the new base is missing", r.id),
                )
                .with_witness(witness(&[("base", p), ("new", q)], &[("revision", &rev)]))
            }
        }
    }
    if modified.is_empty() {
        Outcome::new(post, Status::Holds, "every new rule kept unchanged")
    } else {
        Outcome::new(
            post,
            Status::HoldsModified,
            format!("weights updated: {}", modified.join("; ")),
        )
    }
}

/// Every rule of the revision result occurs in the modified union. A weight
/// may be narrower than in the union when a removed rule was one of its
/// exceptions.
pub fn check_inclusion(p: &Program, q: &Program, cfg: &RevisionConfig) -> Outcome {
    let post = Postulate::Inclusion;
    let rev = match revise(p, q, cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::new(post, Status::PreconditionUnmet, e.to_string()),
    };
    let eps = cfg.solver.algebra.epsilon;
    for r in rev.program().rules() {
        let ok = rev
            .union
            .program
            .get(&r.id)
            .is_some_and(|u| u.same_shape(r) && u.weight.contains(&r.weight, eps));
        if !ok {
            return Outcome::new(
                post,
                Status::Violated,
                format!("rule {} is not in the modified union", r.id),
            )
            .with_witness(witness(&[("base", p), ("new", q)], &[("revision", &rev)]));
        }
    }
    Outcome::new(
        post,
        Status::Holds,
        "result is contained in the modified union",
    )
}

/// All subsets of `p` as removal sets, or a seeded sample of them.
fn subsets(p: &Program, exhaustive: bool, seed: u64) -> Vec<BTreeSet<RuleId>> {
    let all: Vec<RuleId> = p.ids().cloned().collect();
    if exhaustive {
        (0u64..1 << all.len())
            .map(|mask| {
                all.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, id)| id.clone())
                    .collect()
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![BTreeSet::new(), all.iter().cloned().collect()];
        while out.len() < SAMPLE_COUNT {
            out.push(all.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect());
        }
        out
    }
}

fn union_consistent(kept: &Program, q: &Program, cfg: &RevisionConfig) -> bool {
    let (kept, _) = kept.relabeled_apart(q);
    is_consistent(&modified_union(&kept, q, cfg).program, &cfg.solver)
}

/// When some part of the base together with the new base is consistent,
/// the revision result is consistent.
pub fn check_nm_consistency(p: &Program, q: &Program, cfg: &RevisionConfig) -> Outcome {
    let post = Postulate::NmConsistency;
    let exhaustive = p.len() + q.len() <= EXHAUSTIVE_LIMIT;
    let witness_set = subsets(p, exhaustive, 0x5eed)
        .into_iter()
        .find(|removed| union_consistent(&p.without(removed), q, cfg));
    let sampled = if exhaustive { "" } else { " (sampled)" };
    match (witness_set, revise(p, q, cfg)) {
        (None, Err(e)) => Outcome::new(
            post,
            Status::PreconditionUnmet,
            format!("no consistent extension of the new base exists{sampled}; {e}"),
        ),
        (None, Ok(rev)) => Outcome::new(
            post,
            Status::Holds,
            format!(
                "consistent result removing {}{sampled}",
                ids(&rev.removed.rules)
            ),
        ),
        (Some(_), Ok(rev)) if is_consistent(rev.program(), &cfg.solver) => Outcome::new(
            post,
            Status::Holds,
            format!("consistent result removing {}", ids(&rev.removed.rules)),
        ),
        (Some(kept), res) => Outcome::new(
            post,
            Status::Violated,
            format!(
                "removing {} would be consistent but the revision {}",
                ids(&kept),
                match res {
                    Ok(_) => "is inconsistent".to_string(),
                    Err(e) => e.to_string(),
                }
            ),
        )
        .with_witness(witness(&[("base", p), ("new", q)], &[])),
    }
}

/// Putting back any single removed rule makes the result inconsistent again.
pub fn check_fullness(p: &Program, q: &Program, cfg: &RevisionConfig) -> Outcome {
    let post = Postulate::Fullness;
    let rev = match revise(p, q, cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::new(post, Status::PreconditionUnmet, e.to_string()),
    };
    if !is_consistent(rev.program(), &cfg.solver) {
        return Outcome::new(post, Status::Violated, "revision result is inconsistent")
            .with_witness(witness(&[("base", p), ("new", q)], &[("revision", &rev)]));
    }
    for r in &rev.removed.rules {
        let mut fewer = rev.removed.rules.clone();
        fewer.remove(r);
        let back = modified_union(&rev.base.without(&fewer), &rev.new, cfg);
        if is_consistent(&back.program, &cfg.solver) {
            return Outcome::new(
                post,
                Status::Violated,
                format!("re-adding {r} stays consistent"),
            )
            .with_witness(witness(&[("base", p), ("new", q)], &[("revision", &rev)]));
        }
    }
    if rev.removed.rules.is_empty() {
        Outcome::new(post, Status::Holds, "nothing removed")
    } else {
        Outcome::new(
            post,
            Status::Holds,
            format!(
                "each of {} restores the contradiction",
                ids(&rev.removed.rules)
            ),
        )
    }
}

/// New bases that make the same parts of the base inconsistent retain the
/// same base rules.
pub fn check_uniformity(p: &Program, q: &Program, r: &Program, cfg: &RevisionConfig) -> Outcome {
    let post = Postulate::Uniformity;
    let exhaustive = p.len() <= EXHAUSTIVE_LIMIT;
    let sampled = if exhaustive { "" } else { " (sampled)" };
    for removed in subsets(p, exhaustive, 0x0f0f) {
        let kept = p.without(&removed);
        if union_consistent(&kept, q, cfg) != union_consistent(&kept, r, cfg) {
            return Outcome::new(
                post,
                Status::PreconditionUnmet,
                format!(
                    "the new bases disagree on the consistency of removing {}{sampled}",
                    ids(&removed)
                ),
            );
        }
    }
    match (revise(p, q, cfg), revise(p, r, cfg)) {
        (Err(_), Err(_)) => Outcome::new(
            post,
            Status::Holds,
            format!("both revisions are undefined{sampled}"),
        ),
        (Ok(a), Ok(b)) => {
            let (ka, kb) = (a.retained_base_ids(), b.retained_base_ids());
            if ka == kb {
                Outcome::new(
                    post,
                    Status::Holds,
                    format!("both retain {}{sampled}", ids(&ka)),
                )
            } else {
                Outcome::new(
                    post,
                    Status::Violated,
                    format!("retained {} versus {}", ids(&ka), ids(&kb)),
                )
                .with_witness(witness(
                    &[("base", p), ("new", q), ("third", r)],
                    &[("first", &a), ("second", &b)],
                ))
            }
        }
        _ => Outcome::new(
            post,
            Status::Violated,
            "only one of the two revisions is defined",
        )
        .with_witness(witness(&[("base", p), ("new", q), ("third", r)], &[])),
    }
}

fn rule_atoms(r: &Rule) -> BTreeSet<Atom> {
    r.atoms().cloned().collect()
}

/// Rule sets equal as sets of labelled rules, weights within `eps`.
/// Duplicate labels across the right-hand programs must agree.
fn same_rule_set(left: &Program, right: &[&Program], eps: f64) -> bool {
    let mut merged: BTreeMap<&RuleId, &Rule> = BTreeMap::new();
    for prog in right {
        for r in prog.rules() {
            match merged.get(&r.id) {
                Some(x) if !x.syntactically_eq(r, eps) => return false,
                Some(_) => {}
                None => {
                    merged.insert(&r.id, r);
                }
            }
        }
    }
    left.len() == merged.len()
        && left.rules().iter().all(|r| {
            merged
                .get(&r.id)
                .is_some_and(|x| x.syntactically_eq(r, eps))
        })
}

fn disjoint_labels(a: &Program, b: &Program) -> bool {
    a.ids().all(|id| !b.contains(id))
}

/// Revising two independent halves of a base separately and joining the
/// results equals revising the whole base.
pub fn check_weak_disjunction(
    p1: &Program,
    p2: &Program,
    q: &Program,
    cfg: &RevisionConfig,
) -> Outcome {
    let post = Postulate::WeakDisjunction;
    let (a1, a2) = (p1.atom_base(), p2.atom_base());
    if !a1.is_disjoint(&a2) || !disjoint_labels(p1, p2) {
        return Outcome::new(
            post,
            Status::PreconditionUnmet,
            "the two halves share atoms or labels",
        );
    }
    if let Some(r) = q
        .rules()
        .iter()
        .find(|r| !rule_atoms(r).is_disjoint(&a1) && !rule_atoms(r).is_disjoint(&a2))
    {
        return Outcome::new(
            post,
            Status::PreconditionUnmet,
            format!("new rule {} touches both halves", r.id),
        );
    }
    let p = p1.union(p2).expect("labels are disjoint");
    let eps = cfg.solver.algebra.epsilon;
    let whole = revise(&p, q, cfg);
    let (h1, h2) = (revise(p1, q, cfg), revise(p2, q, cfg));
    let (whole, h1, h2) = match (whole, h1, h2) {
        (Ok(w), Ok(a), Ok(b)) => (w, a, b),
        (Err(_), a, b) if a.is_err() || b.is_err() => {
            return Outcome::new(post, Status::Holds, "both sides are undefined")
        }
        (Err(_), ..) => {
            return Outcome::new(
                post,
                Status::Violated,
                "only the revision of the whole is undefined",
            )
            .with_witness(witness(&[("base1", p1), ("base2", p2), ("new", q)], &[]))
        }
        _ => {
            // The new base may only become consistent with atoms of the
            // other half, leaving a half revision undefined.
            return Outcome::new(
                post,
                Status::PreconditionUnmet,
                "a revision of one half is undefined",
            );
        }
    };
    let (p, _) = p.relabeled_apart(q);
    let q_updates_from_base = find_disposition_links(&p, q, eps)
        .iter()
        .any(|l| q.contains(&l.disposition));
    let wit = || {
        witness(
            &[("base1", p1), ("base2", p2), ("new", q)],
            &[("whole", &whole), ("first", &h1), ("second", &h2)],
        )
    };
    if !q_updates_from_base {
        if same_rule_set(whole.program(), &[h1.program(), h2.program()], eps) {
            Outcome::new(
                post,
                Status::Holds,
                "revision of the whole equals the union of the halves",
            )
        } else {
            Outcome::new(
                post,
                Status::Violated,
                "revision of the whole differs from the union of the halves",
            )
            .with_witness(wit())
        }
    } else {
        let joined: BTreeSet<RuleId> = h1
            .removed_original_ids()
            .union(&h2.removed_original_ids())
            .cloned()
            .collect();
        if whole.removed_original_ids() == joined {
            Outcome::new(
                post,
                Status::HoldsModified,
                format!(
                    "new weights updated; removed sets agree on {}",
                    ids(&joined)
                ),
            )
        } else {
            Outcome::new(
                post,
                Status::Violated,
                format!(
                    "removed {} versus {}",
                    ids(&whole.removed_original_ids()),
                    ids(&joined)
                ),
            )
            .with_witness(wit())
        }
    }
}

/// Revising by two independent new bases at once versus one at a time.
///
/// The literal identity `P * (Q1 ∪ Q2) = (P * Q1) ∪ (P * Q2)` fails as soon
/// as either side removes a rule, because the other side keeps it. The
/// identity over the induced split of the base,
/// `P * (Q1 ∪ Q2) = (P1 * Q1) ∪ (P2 * Q2)`, is reported as holds-modified.
pub fn check_weak_parallelism(
    p: &Program,
    q1: &Program,
    q2: &Program,
    cfg: &RevisionConfig,
) -> Outcome {
    let post = Postulate::WeakParallelism;
    let (a1, a2) = (q1.atom_base(), q2.atom_base());
    if !a1.is_disjoint(&a2) || !disjoint_labels(q1, q2) {
        return Outcome::new(
            post,
            Status::PreconditionUnmet,
            "the two new bases share atoms or labels",
        );
    }
    if let Some(r) = p
        .rules()
        .iter()
        .find(|r| !rule_atoms(r).is_disjoint(&a1) && !rule_atoms(r).is_disjoint(&a2))
    {
        return Outcome::new(
            post,
            Status::PreconditionUnmet,
            format!("base rule {} touches both new bases", r.id),
        );
    }
    let q = q1.union(q2).expect("labels are disjoint");
    let eps = cfg.solver.algebra.epsilon;
    let part1: BTreeSet<RuleId> = p
        .rules()
        .iter()
        .filter(|r| rule_atoms(r).is_disjoint(&a2))
        .map(|r| r.id.clone())
        .collect();
    let p1 = p.restricted_to(&part1);
    let p2 = p.without(&part1);
    let revs = (
        revise(p, &q, cfg),
        revise(p, q1, cfg),
        revise(p, q2, cfg),
        revise(&p1, q1, cfg),
        revise(&p2, q2, cfg),
    );
    let (whole, s1, s2, h1, h2) = match revs {
        (Ok(w), Ok(a), Ok(b), Ok(c), Ok(d)) => (w, a, b, c, d),
        (Err(_), ..) => {
            return Outcome::new(
                post,
                Status::PreconditionUnmet,
                "revision by the joint new base is undefined",
            )
        }
        _ => {
            return Outcome::new(
                post,
                Status::Violated,
                "a revision by one of the new bases is undefined",
            )
            .with_witness(witness(&[("base", p), ("new1", q1), ("new2", q2)], &[]))
        }
    };
    if same_rule_set(whole.program(), &[s1.program(), s2.program()], eps) {
        return Outcome::new(
            post,
            Status::Holds,
            "joint revision equals the union of the separate revisions",
        );
    }
    let wit = witness(
        &[("base", p), ("new1", q1), ("new2", q2)],
        &[("joint", &whole), ("first", &s1), ("second", &s2)],
    );
    if same_rule_set(whole.program(), &[h1.program(), h2.program()], eps) {
        Outcome::new(
            post,
            Status::HoldsModified,
            format!(
                "joint revision equals the union of the split revisions removing {} and {}; the separate revisions keep each other's removals",
                ids(&h1.removed.rules),
                ids(&h2.removed.rules)
            ),
        )
        .with_witness(wit)
    } else {
        Outcome::new(
            post,
            Status::Violated,
            "joint revision differs from both unions",
        )
        .with_witness(wit)
    }
}
