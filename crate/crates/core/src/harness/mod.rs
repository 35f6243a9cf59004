//! Postulate checks and a seeded fuzzer over generated program pairs.

mod generator;
mod postulates;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::program::Program;
use crate::revision::{revise, RevisionConfig};

pub use generator::{generate_pair, generate_program, rename_apart, GeneratorSpec};
pub use postulates::{
    check_fullness, check_inclusion, check_nm_consistency, check_success, check_uniformity,
    check_weak_disjunction, check_weak_parallelism, Outcome, Postulate, Status, Witness,
    EXHAUSTIVE_LIMIT, SAMPLE_COUNT,
};

/// Pair draws per case before giving up on finding a revisable pair.
pub const MAX_RESAMPLES: u64 = 100;

/// Splits a program by atom-connected components: rules of the component
/// holding the first rule, and the rest.
pub fn split_first_component(p: &Program) -> (Program, Program) {
    let Some(first) = p.rules().first() else {
        return (Program::empty(), Program::empty());
    };
    let mut atoms: std::collections::BTreeSet<_> = first.atoms().cloned().collect();
    loop {
        let before = atoms.len();
        for r in p.rules() {
            if r.atoms().any(|a| atoms.contains(a)) {
                atoms.extend(r.atoms().cloned());
            }
        }
        if atoms.len() == before {
            break;
        }
    }
    let ids = p
        .rules()
        .iter()
        .filter(|r| r.atoms().any(|a| atoms.contains(a)))
        .map(|r| r.id.clone())
        .collect();
    (p.restricted_to(&ids), p.without(&ids))
}

/// Runs every postulate applicable to a single pair. Uniformity compares
/// `q` with `r`; the block postulates split the pair by components.
pub fn check_all(p: &Program, q: &Program, r: &Program, cfg: &RevisionConfig) -> Vec<Outcome> {
    let (p1, p2) = split_first_component(p);
    let (q1, q2) = split_first_component(q);
    vec![
        check_success(p, q, cfg),
        check_inclusion(p, q, cfg),
        check_nm_consistency(p, q, cfg),
        check_fullness(p, q, cfg),
        check_uniformity(p, q, r, cfg),
        check_weak_disjunction(&p1, &p2, q, cfg),
        check_weak_parallelism(p, &q1, &q2, cfg),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub cases: usize,
    pub atoms: usize,
    pub rules: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            cases: 200,
            atoms: 5,
            rules: 6,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub cases: usize,
    /// Draws skipped because their revision was undefined.
    pub resampled: u64,
    pub counts: BTreeMap<Postulate, BTreeMap<Status, usize>>,
    pub violations: Vec<(u64, Outcome)>,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, seed: u64, out: Outcome) {
        *self
            .counts
            .entry(out.postulate)
            .or_default()
            .entry(out.status)
            .or_default() += 1;
        if out.status == Status::Violated {
            self.violations.push((seed, out));
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries serialize")
    }
}

impl std::fmt::Display for FuzzSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "cases: {}  resampled: {}", self.cases, self.resampled)?;
        for (post, by_status) in &self.counts {
            let parts: Vec<String> = by_status.iter().map(|(s, n)| format!("{s}={n}")).collect();
            writeln!(f, "{post:<12} {}", parts.join(" "))?;
        }
        for (seed, out) in &self.violations {
            writeln!(f, "seed {seed}: {out}")?;
        }
        Ok(())
    }
}

fn spec(fc: &FuzzConfig, seed: u64, prefix: &str, ids: (&str, &str)) -> GeneratorSpec {
    GeneratorSpec {
        atoms: fc.atoms,
        rules: fc.rules,
        seed,
        atom_prefix: prefix.into(),
        id_prefixes: (ids.0.into(), ids.1.into()),
        ..GeneratorSpec::default()
    }
}

/// Checks every postulate on `cases` generated pairs. Pairs whose revision
/// is undefined are replaced by the next draw and counted as resampled.
/// The removal cap is the size of the base, so every removal is reachable.
pub fn run_fuzz(fc: &FuzzConfig) -> FuzzSummary {
    let mut summary = FuzzSummary::default();
    let mut draw = fc.seed;
    for _ in 0..fc.cases {
        let mut tries = 0;
        let (seed, p, q, cfg) = loop {
            let seed = draw;
            draw = draw.wrapping_add(1);
            let (p, q) = generate_pair(&spec(fc, seed, "a", ("p", "q")));
            let cfg = RevisionConfig {
                cap: p.len().max(1),
                ..RevisionConfig::default()
            };
            tries += 1;
            if revise(&p, &q, &cfg).is_ok() || tries >= MAX_RESAMPLES {
                break (seed, p, q, cfg);
            }
            summary.resampled += 1;
        };
        summary.cases += 1;
        let r = rename_apart(&p, &q, "_r", "s");
        summary.record(seed, check_success(&p, &q, &cfg));
        summary.record(seed, check_inclusion(&p, &q, &cfg));
        summary.record(seed, check_nm_consistency(&p, &q, &cfg));
        summary.record(seed, check_fullness(&p, &q, &cfg));
        summary.record(seed, check_uniformity(&p, &q, &r, &cfg));

        let (p2, q2) = generate_pair(&spec(fc, seed ^ 0x9e37_79b9, "b", ("pb", "qb")));
        let joint = p.union(&p2).expect("block labels are disjoint");
        let cfg2 = RevisionConfig {
            cap: joint.len().max(1),
            ..cfg
        };
        summary.record(seed, check_weak_disjunction(&p, &p2, &q, &cfg2));
        summary.record(seed, check_weak_parallelism(&joint, &q, &q2, &cfg2));
    }
    summary
}
