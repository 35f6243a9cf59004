//! Belief base revision by removed sets.
//!
//! Revising a base `P` by a new base `Q` first forms the modified union
//! `P ∪* Q`. When that union is contradictory, a set `X ⊆ P` is removed so
//! that `(P ∖ X) ∪* Q` becomes consistent; rules of `Q` are never removed.
//! `X` is picked from the potential removed sets of the contradicted atoms:
//! fewest rules first, then the least certain (widest) weights, then the
//! removal whose answer set stays closest to that of `P`, then the
//! lexicographically smallest labels.

mod removal;
mod union;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::interval::{interval_distance, DistanceVariant, IntervalError};
use crate::program::{Atom, Program, RuleId};
use crate::semantics::{Interpretation, SolverConfig};

pub use removal::{
    choose_removed_set, contradiction_set, potential_removed_sets, revise, PotentialRemovedSets,
    RemovedSet, Revision, Step,
};
pub use union::{
    find_disposition_links, modified_union, update_weight, DispositionLink, MergedProgram, Origin,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RevisionConfig {
    /// Widening applied to a disposition weight per new exception.
    pub delta: f64,
    pub distance: DistanceVariant,
    /// Largest removed set considered.
    pub cap: usize,
    pub solver: SolverConfig,
}

impl Default for RevisionConfig {
    fn default() -> Self {
        RevisionConfig {
            delta: 0.1,
            distance: DistanceVariant::Corrected,
            cap: 3,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("no removed set of at most {cap} rules restores consistency{}", atoms_suffix(.atoms))]
pub struct EmptyPrs {
    pub atoms: Vec<Atom>,
    pub cap: usize,
}

fn atoms_suffix(atoms: &[Atom]) -> String {
    if atoms.is_empty() {
        String::new()
    } else {
        let names: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
        format!(" for {}", names.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RevisionError {
    #[error("revision failed: {0}")]
    Failure(#[from] EmptyPrs),
}

/// Sum of atom distances over `base`.
pub fn interpretation_distance(
    i: &Interpretation,
    j: &Interpretation,
    base: &BTreeSet<Atom>,
    variant: DistanceVariant,
) -> Result<f64, IntervalError> {
    base.iter()
        .map(|a| interval_distance(i.atom(a), j.atom(a), variant))
        .sum()
}

/// Largest pairwise distance. Two empty sets are at distance 0; an empty
/// set is at the maximal distance `|base|` from a nonempty one.
pub fn set_distance(
    is: &[Interpretation],
    js: &[Interpretation],
    base: &BTreeSet<Atom>,
    variant: DistanceVariant,
) -> Result<f64, IntervalError> {
    match (is.is_empty(), js.is_empty()) {
        (true, true) => Ok(0.0),
        (true, false) | (false, true) => Ok(base.len() as f64),
        (false, false) => {
            let mut best = 0.0f64;
            for i in is {
                for j in js {
                    best = best.max(interpretation_distance(i, j, base, variant)?);
                }
            }
            Ok(best)
        }
    }
}

/// Machine-readable summary of a revision.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RevisionReport {
    pub removed: Vec<String>,
    pub contradiction_set: Vec<String>,
    pub prs: BTreeMap<String, Vec<Vec<String>>>,
    pub distance: Option<f64>,
    pub program: String,
}

impl RevisionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Text form of a program, as embedded in reports.
pub fn program_text(p: &Program) -> String {
    p.to_string()
}

pub(crate) fn ids_sorted(ids: &BTreeSet<RuleId>) -> Vec<String> {
    ids.iter().map(|i| i.to_string()).collect()
}
