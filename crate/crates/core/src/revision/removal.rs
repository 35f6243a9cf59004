//! Contradiction sets, potential removed sets, the removal strategy and the
//! revision operator.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use serde::Serialize;

use super::union::{modified_union, MergedProgram, Origin};
use super::{ids_sorted, set_distance, EmptyPrs, RevisionConfig, RevisionError, RevisionReport};
use crate::program::{Atom, Literal, Program, RuleId};
use crate::semantics::{answer_set_with, AnswerSet, Interpretation, SemanticsError};
use crate::transform::{reachable_equations, transform, TransformationTable, TransformedProgram};

/// Subset-minimal sets of base rules whose removal makes the atom consistent.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialRemovedSets {
    pub atom: Atom,
    pub candidates: Vec<BTreeSet<RuleId>>,
}

/// How a removed rule was selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    /// The unique least certain candidate of a single atom.
    LeastCertain,
    /// The unique least certain candidate shared by overlapping atoms.
    SharedLeastCertain,
    /// Equally certain candidates separated by answer set distance.
    ClosestModels,
    /// Search over the whole base, used when the per-atom sets do not
    /// combine into a consistent result.
    GlobalSearch,
    /// Kept after dropping redundant rules from a combined removed set.
    Shrunk,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RemovedSet {
    pub rules: BTreeSet<RuleId>,
    pub justification: BTreeMap<RuleId, Step>,
    /// Distance between the answer sets of the base before and after the
    /// removal, when distances decided the choice.
    pub distance: Option<f64>,
}

impl RemovedSet {
    fn tagged(rules: BTreeSet<RuleId>, step: Step, distance: Option<f64>) -> Self {
        let justification = rules.iter().map(|r| (r.clone(), step)).collect();
        RemovedSet {
            rules,
            justification,
            distance,
        }
    }
}

/// Outcome of revising a base by a new base.
#[derive(Clone, Debug)]
pub struct Revision {
    /// The base with labels clashing with the new base renamed.
    pub base: Program,
    pub new: Program,
    /// Renamed label to original label.
    pub relabeled: BTreeMap<RuleId, RuleId>,
    /// `base ∪* new`.
    pub union: MergedProgram,
    /// `(base ∖ removed) ∪* new`.
    pub result: MergedProgram,
    pub removed: RemovedSet,
    /// Contradicted atoms shared by both bases.
    pub contradiction_set: BTreeSet<Atom>,
    pub prs: BTreeMap<Atom, PotentialRemovedSets>,
}

impl Revision {
    pub fn program(&self) -> &Program {
        &self.result.program
    }

    pub fn report(&self) -> RevisionReport {
        RevisionReport {
            removed: ids_sorted(&self.removed.rules),
            contradiction_set: self
                .contradiction_set
                .iter()
                .map(|a| a.to_string())
                .collect(),
            prs: self
                .prs
                .iter()
                .map(|(a, s)| (a.to_string(), s.candidates.iter().map(ids_sorted).collect()))
                .collect(),
            distance: self.removed.distance,
            program: self.result.program.to_string(),
        }
    }

    /// Base rules kept in the result, under their original labels.
    pub fn retained_base_ids(&self) -> BTreeSet<RuleId> {
        self.base
            .ids()
            .filter(|id| !self.removed.rules.contains(*id))
            .map(|id| self.relabeled.get(id).unwrap_or(id).clone())
            .collect()
    }

    /// Removed rules under their original labels.
    pub fn removed_original_ids(&self) -> BTreeSet<RuleId> {
        self.removed
            .rules
            .iter()
            .map(|id| self.relabeled.get(id).unwrap_or(id).clone())
            .collect()
    }
}

struct Solved {
    merged: MergedProgram,
    answer: Result<AnswerSet, SemanticsError>,
}

impl Solved {
    fn consistent(&self) -> bool {
        matches!(&self.answer, Ok(a) if a.consistent)
    }

    fn consistent_wrt(&self, atom: &Atom) -> bool {
        matches!(&self.answer, Ok(a) if !a.contradiction_atoms.contains(atom))
    }
}

/// Lexicographic index combinations of `k` out of `n`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Removed set, targeted atoms and their potential removed sets.
type Chosen = (
    RemovedSet,
    BTreeSet<Atom>,
    BTreeMap<Atom, PotentialRemovedSets>,
);

struct Reviser<'a> {
    p: &'a Program,
    q: &'a Program,
    cfg: &'a RevisionConfig,
    cache: RefCell<HashMap<BTreeSet<RuleId>, Rc<Solved>>>,
    base_answers: RefCell<Option<Vec<Interpretation>>>,
}

impl<'a> Reviser<'a> {
    fn new(p: &'a Program, q: &'a Program, cfg: &'a RevisionConfig) -> Self {
        Reviser {
            p,
            q,
            cfg,
            cache: RefCell::new(HashMap::new()),
            base_answers: RefCell::new(None),
        }
    }

    fn eps(&self) -> f64 {
        self.cfg.solver.algebra.epsilon
    }

    /// `(P ∖ removed) ∪* Q` and its answer set, memoized.
    fn solve(&self, removed: &BTreeSet<RuleId>) -> Rc<Solved> {
        if let Some(s) = self.cache.borrow().get(removed) {
            return Rc::clone(s);
        }
        let merged = modified_union(&self.p.without(removed), self.q, self.cfg);
        let answer = answer_set_with(&merged.program, &self.cfg.solver);
        let solved = Rc::new(Solved { merged, answer });
        self.cache
            .borrow_mut()
            .insert(removed.clone(), Rc::clone(&solved));
        solved
    }

    fn consistent_answers(&self, p: &Program) -> Vec<Interpretation> {
        match answer_set_with(p, &self.cfg.solver) {
            Ok(a) if a.consistent => vec![a.interpretation],
            _ => Vec::new(),
        }
    }

    fn distance_after(&self, removed: &BTreeSet<RuleId>) -> f64 {
        let base = self.p.atom_base();
        let before = self
            .base_answers
            .borrow_mut()
            .get_or_insert_with(|| self.consistent_answers(self.p))
            .clone();
        let after = self.consistent_answers(&self.p.without(removed));
        set_distance(&before, &after, &base, self.cfg.distance).unwrap_or(base.len() as f64)
    }

    /// Base rules feeding the equations of either polarity of `atom`.
    fn pool(
        &self,
        tp: &TransformedProgram,
        table: &TransformationTable,
        atom: &Atom,
    ) -> Vec<RuleId> {
        let mut used = reachable_equations(tp, &Literal::pos(atom.clone()));
        used.extend(reachable_equations(tp, &Literal::neg(atom.clone())));
        let sources: BTreeSet<&RuleId> = used
            .iter()
            .filter_map(|id| table.sources(*id))
            .flatten()
            .collect();
        self.p
            .ids()
            .filter(|id| sources.contains(id))
            .cloned()
            .collect()
    }

    /// Subset-minimal sets of `pool`, up to the cardinality cap, accepted by
    /// `ok`, in order of size then position.
    fn minimal_sets(
        &self,
        pool: &[RuleId],
        mut ok: impl FnMut(&BTreeSet<RuleId>) -> bool,
    ) -> Vec<BTreeSet<RuleId>> {
        let mut found: Vec<BTreeSet<RuleId>> = Vec::new();
        for k in 1..=self.cfg.cap.min(pool.len()) {
            for combo in combinations(pool.len(), k) {
                let set: BTreeSet<RuleId> = combo.iter().map(|&i| pool[i].clone()).collect();
                if found.iter().any(|f| f.is_subset(&set)) {
                    continue;
                }
                if ok(&set) {
                    found.push(set);
                }
            }
        }
        found
    }

    fn prs_for(
        &self,
        tp: &TransformedProgram,
        table: &TransformationTable,
        atom: &Atom,
    ) -> PotentialRemovedSets {
        let pool = self.pool(tp, table, atom);
        let candidates = self.minimal_sets(&pool, |x| self.solve(x).consistent_wrt(atom));
        PotentialRemovedSets {
            atom: atom.clone(),
            candidates,
        }
    }

    /// Widths of the original weights, widest first.
    fn widths(&self, set: &BTreeSet<RuleId>) -> Vec<f64> {
        let mut w: Vec<f64> = set
            .iter()
            .filter_map(|id| self.p.get(id))
            .map(|r| r.weight.width())
            .collect();
        w.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        w
    }

    /// Fewer rules first, then less certain weights first.
    fn rank(&self, a: &BTreeSet<RuleId>, b: &BTreeSet<RuleId>) -> Ordering {
        a.len().cmp(&b.len()).then_with(|| {
            let eps = self.eps();
            for (x, y) in self.widths(a).into_iter().zip(self.widths(b)) {
                if (x - y).abs() > eps {
                    return y.partial_cmp(&x).unwrap_or(Ordering::Equal);
                }
            }
            Ordering::Equal
        })
    }

    /// Picks one candidate: best rank if unique, else smallest distance,
    /// else smallest labels.
    fn best_of(
        &self,
        candidates: &[BTreeSet<RuleId>],
        unique_step: Step,
    ) -> (BTreeSet<RuleId>, Step, Option<f64>) {
        let best = candidates
            .iter()
            .min_by(|a, b| self.rank(a, b))
            .expect("candidates are nonempty");
        let tied: Vec<&BTreeSet<RuleId>> = candidates
            .iter()
            .filter(|c| self.rank(c, best) == Ordering::Equal)
            .collect();
        if tied.len() == 1 {
            return (best.clone(), unique_step, None);
        }
        let scored: Vec<(f64, &BTreeSet<RuleId>)> = tied
            .into_iter()
            .map(|c| (self.distance_after(c), c))
            .collect();
        let min = scored.iter().map(|(d, _)| *d).fold(f64::INFINITY, f64::min);
        let (d, chosen) = scored
            .into_iter()
            .filter(|(d, _)| *d <= min + self.eps())
            .min_by(|(_, a), (_, b)| a.iter().cmp(b.iter()))
            .expect("at least one candidate attains the minimum");
        (chosen.clone(), Step::ClosestModels, Some(d))
    }

    /// Per-cluster selection over atoms whose candidate rules overlap.
    fn strategy(&self, prs: &BTreeMap<Atom, PotentialRemovedSets>) -> RemovedSet {
        let atoms: Vec<&Atom> = prs.keys().collect();
        let rules_of = |a: &Atom| -> BTreeSet<RuleId> {
            prs[a].candidates.iter().flatten().cloned().collect()
        };
        let mut cluster: Vec<usize> = (0..atoms.len()).collect();
        fn find(c: &mut [usize], i: usize) -> usize {
            if c[i] != i {
                let r = find(c, c[i]);
                c[i] = r;
            }
            c[i]
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if !rules_of(atoms[i]).is_disjoint(&rules_of(atoms[j])) {
                    let (ri, rj) = (find(&mut cluster, i), find(&mut cluster, j));
                    cluster[rj.max(ri)] = ri.min(rj);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<&Atom>> = BTreeMap::new();
        for (i, a) in atoms.iter().enumerate() {
            let r = find(&mut cluster, i);
            groups.entry(r).or_default().push(*a);
        }

        let mut out = RemovedSet::default();
        let mut used_distance = false;
        for members in groups.values() {
            let (candidates, step) = if members.len() == 1 {
                (prs[members[0]].candidates.clone(), Step::LeastCertain)
            } else {
                let first = &prs[members[0]].candidates;
                let common: Vec<BTreeSet<RuleId>> = first
                    .iter()
                    .filter(|c| members.iter().all(|a| prs[*a].candidates.contains(c)))
                    .cloned()
                    .collect();
                if common.is_empty() {
                    (self.minimal_unions(members, prs), Step::SharedLeastCertain)
                } else {
                    (common, Step::SharedLeastCertain)
                }
            };
            let (chosen, step, d) = self.best_of(&candidates, step);
            used_distance |= d.is_some();
            for r in &chosen {
                out.justification.insert(r.clone(), step);
            }
            out.rules.extend(chosen);
        }
        if used_distance {
            out.distance = Some(self.distance_after(&out.rules));
        }
        out
    }

    /// Subset-minimal unions picking one candidate per atom.
    fn minimal_unions(
        &self,
        members: &[&Atom],
        prs: &BTreeMap<Atom, PotentialRemovedSets>,
    ) -> Vec<BTreeSet<RuleId>> {
        let mut acc: Vec<BTreeSet<RuleId>> = vec![BTreeSet::new()];
        for a in members {
            let mut next: Vec<BTreeSet<RuleId>> = Vec::new();
            for base in &acc {
                for c in &prs[*a].candidates {
                    let u: BTreeSet<RuleId> = base.union(c).cloned().collect();
                    if !next.contains(&u) {
                        next.push(u);
                    }
                }
            }
            acc = next;
        }
        let minimal: Vec<BTreeSet<RuleId>> = acc
            .iter()
            .filter(|s| !acc.iter().any(|t| t != *s && t.is_subset(s)))
            .cloned()
            .collect();
        minimal
    }

    /// Drops redundant rules from a combined removed set.
    fn shrink(&self, removed: RemovedSet) -> RemovedSet {
        let items: Vec<RuleId> = removed.rules.iter().cloned().collect();
        for k in 1..items.len() {
            let ok: Vec<BTreeSet<RuleId>> = combinations(items.len(), k)
                .into_iter()
                .map(|c| c.iter().map(|&i| items[i].clone()).collect())
                .filter(|s| self.solve(s).consistent())
                .collect();
            if !ok.is_empty() {
                let (chosen, _, d) = self.best_of(&ok, Step::Shrunk);
                let justification = chosen.iter().map(|r| (r.clone(), Step::Shrunk)).collect();
                return RemovedSet {
                    rules: chosen,
                    justification,
                    distance: d,
                };
            }
        }
        removed
    }

    /// Smallest removed sets over the whole base, up to the cap.
    fn global(&self, targets: &BTreeSet<Atom>) -> Result<RemovedSet, EmptyPrs> {
        let all: Vec<RuleId> = self.p.ids().cloned().collect();
        for k in 1..=self.cfg.cap.min(all.len()) {
            let ok: Vec<BTreeSet<RuleId>> = combinations(all.len(), k)
                .into_iter()
                .map(|c| c.iter().map(|&i| all[i].clone()).collect())
                .filter(|s| self.solve(s).consistent())
                .collect();
            if !ok.is_empty() {
                let (chosen, _, d) = self.best_of(&ok, Step::GlobalSearch);
                return Ok(RemovedSet::tagged(chosen, Step::GlobalSearch, d));
            }
        }
        Err(EmptyPrs {
            atoms: targets.iter().cloned().collect(),
            cap: self.cfg.cap,
        })
    }

    fn targets(&self, union: &Solved) -> BTreeSet<Atom> {
        match &union.answer {
            Ok(a) => a.contradiction_atoms.clone(),
            Err(_) => BTreeSet::new(),
        }
    }

    fn all_prs(
        &self,
        union: &Solved,
        targets: &BTreeSet<Atom>,
    ) -> BTreeMap<Atom, PotentialRemovedSets> {
        let (tp, table) = transform(&union.merged.program);
        targets
            .iter()
            .map(|a| (a.clone(), self.prs_for(&tp, &table, a)))
            .collect()
    }

    fn run(&self) -> Result<Chosen, RevisionError> {
        let union = self.solve(&BTreeSet::new());
        if union.consistent() {
            return Ok((RemovedSet::default(), BTreeSet::new(), BTreeMap::new()));
        }
        let targets = self.targets(&union);
        let prs = self.all_prs(&union, &targets);
        let assembled = if union.answer.is_ok() && prs.values().all(|s| !s.candidates.is_empty()) {
            let x = self.strategy(&prs);
            if self.solve(&x.rules).consistent() {
                Some(self.shrink(x))
            } else {
                None
            }
        } else {
            None
        };
        let removed = match assembled {
            Some(x) => x,
            None => self.global(&targets)?,
        };
        Ok((removed, targets, prs))
    }
}

fn base_atoms(m: &MergedProgram, origin: Origin) -> BTreeSet<Atom> {
    m.program
        .rules()
        .iter()
        .filter(|r| m.origin.get(&r.id) == Some(&origin))
        .flat_map(|r| r.atoms().cloned())
        .collect()
}

/// Contradicted atoms of the union's answer set shared by both bases.
pub fn contradiction_set(
    union: &MergedProgram,
    cfg: &RevisionConfig,
) -> Result<BTreeSet<Atom>, SemanticsError> {
    let answer = answer_set_with(&union.program, &cfg.solver)?;
    let shared: BTreeSet<Atom> = base_atoms(union, Origin::Base)
        .intersection(&base_atoms(union, Origin::New))
        .cloned()
        .collect();
    Ok(answer
        .contradiction_atoms
        .intersection(&shared)
        .cloned()
        .collect())
}

/// Potential removed sets of every contradicted atom of `p ∪* q`. Labels of
/// `p` that clash with `q` are renamed first.
pub fn potential_removed_sets(
    p: &Program,
    q: &Program,
    cfg: &RevisionConfig,
) -> Result<BTreeMap<Atom, PotentialRemovedSets>, RevisionError> {
    let (p, _) = p.relabeled_apart(q);
    let r = Reviser::new(&p, q, cfg);
    let union = r.solve(&BTreeSet::new());
    let targets = r.targets(&union);
    let prs = r.all_prs(&union, &targets);
    let empty: Vec<Atom> = prs
        .values()
        .filter(|s| s.candidates.is_empty())
        .map(|s| s.atom.clone())
        .collect();
    if !empty.is_empty() {
        return Err(EmptyPrs {
            atoms: empty,
            cap: cfg.cap,
        }
        .into());
    }
    Ok(prs)
}

/// Applies the selection strategy to precomputed potential removed sets.
pub fn choose_removed_set(
    prs: &BTreeMap<Atom, PotentialRemovedSets>,
    p: &Program,
    q: &Program,
    cfg: &RevisionConfig,
) -> Result<RemovedSet, RevisionError> {
    let empty: Vec<Atom> = prs
        .values()
        .filter(|s| s.candidates.is_empty())
        .map(|s| s.atom.clone())
        .collect();
    if !empty.is_empty() {
        return Err(EmptyPrs {
            atoms: empty,
            cap: cfg.cap,
        }
        .into());
    }
    let (p, _) = p.relabeled_apart(q);
    let r = Reviser::new(&p, q, cfg);
    Ok(r.shrink(r.strategy(prs)))
}

/// Revises `p` by `q`.
pub fn revise(p: &Program, q: &Program, cfg: &RevisionConfig) -> Result<Revision, RevisionError> {
    let (base, relabeled) = p.relabeled_apart(q);
    let r = Reviser::new(&base, q, cfg);
    let (removed, _targets, prs) = r.run()?;
    let union = r.solve(&BTreeSet::new());
    let result = r.solve(&removed.rules);
    debug_assert!(result.consistent());
    let contradiction_set = contradiction_set(&union.merged, cfg).unwrap_or_default();
    Ok(Revision {
        union: union.merged.clone(),
        result: result.merged.clone(),
        base: base.clone(),
        new: q.clone(),
        relabeled,
        removed,
        contradiction_set,
        prs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    fn ids(xs: &[&str]) -> BTreeSet<RuleId> {
        xs.iter().map(|x| RuleId::from(*x)).collect()
    }

    #[test]
    fn combinations_enumerate_in_order() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn consistent_union_removes_nothing() {
        let p = parse_program("a: x @ [0.5,0.6].").unwrap();
        let q = parse_program("b: y :- x.").unwrap();
        let rev = revise(&p, &q, &RevisionConfig::default()).unwrap();
        assert!(rev.removed.rules.is_empty());
        assert_eq!(rev.program(), &p.union(&q).unwrap());
    }

    #[test]
    fn direct_conflict_removes_the_base_fact() {
        let p = parse_program("a: x @ [1,1]. b: y @ [0.5,0.5].").unwrap();
        let q = parse_program("c: -x @ [1,1].").unwrap();
        let rev = revise(&p, &q, &RevisionConfig::default()).unwrap();
        assert_eq!(rev.removed.rules, ids(&["a"]));
        assert_eq!(
            rev.contradiction_set,
            [Atom::prop("x")].into_iter().collect()
        );
        assert_eq!(
            rev.removed.justification[&RuleId::from("a")],
            Step::LeastCertain
        );
    }

    #[test]
    fn conflicts_inside_the_new_base_alone_cannot_be_repaired() {
        let p = parse_program("pa: a @ [0.5,0.5].").unwrap();
        let q = parse_program("a @ [1,1]. -a @ [1,1].").unwrap();
        let cfg = RevisionConfig::default();
        assert!(matches!(
            revise(&p, &q, &cfg),
            Err(RevisionError::Failure(_))
        ));
        assert!(matches!(
            potential_removed_sets(&p, &q, &cfg),
            Err(RevisionError::Failure(EmptyPrs { .. }))
        ));
    }

    #[test]
    fn colliding_labels_are_renamed_in_the_base() {
        let p = parse_program("r1: x @ [1,1].").unwrap();
        let q = parse_program("r1: -x @ [1,1].").unwrap();
        let rev = revise(&p, &q, &RevisionConfig::default()).unwrap();
        assert_eq!(rev.removed.rules, ids(&["r1_p1"]));
        assert_eq!(rev.removed_original_ids(), ids(&["r1"]));
        assert!(rev.retained_base_ids().is_empty());
    }

    #[test]
    fn equally_certain_candidates_are_separated_by_distance() {
        // Removing `a` also loses `z`, removing `b` only loses `y`.
        let p = parse_program(
            "a: x @ [0.6,0.6]. b: y @ [0.6,0.6]. c: z :- x @ [1,1]. d: w @ [0.2,0.2].",
        )
        .unwrap();
        let q = parse_program("n: -x :- y @ [1,1].").unwrap();
        let rev = revise(&p, &q, &RevisionConfig::default()).unwrap();
        assert_eq!(rev.removed.rules, ids(&["b"]));
        assert_eq!(
            rev.removed.justification[&RuleId::from("b")],
            Step::ClosestModels
        );
        assert!(rev.removed.distance.is_some());
    }
}
