//! Seeded random program pairs.
//!
//! Atoms are numbered and every body only mentions atoms with a smaller
//! number than the head, so generated programs have no cycles.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::interval::TruthInterval;
use crate::program::{Atom, BodyElement, Literal, Program, Rule, RuleId};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub atoms: usize,
    pub rules: usize,
    /// Probability that a weight is an exact (width 0) value.
    pub exact_weight_prob: f64,
    /// Largest weight width for non-exact weights, in tenths.
    pub max_width_tenths: u32,
    pub naf_prob: f64,
    pub negation_prob: f64,
    pub max_body: usize,
    pub seed: u64,
    /// Atom names are this prefix followed by a number.
    pub atom_prefix: String,
    /// Label prefixes for the first and second program.
    pub id_prefixes: (String, String),
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            atoms: 5,
            rules: 6,
            exact_weight_prob: 0.5,
            max_width_tenths: 4,
            naf_prob: 0.15,
            negation_prob: 0.3,
            max_body: 2,
            seed: 0,
            atom_prefix: "a".into(),
            id_prefixes: ("p".into(), "q".into()),
        }
    }
}

fn tenth(n: u32) -> f64 {
    f64::from(n) / 10.0
}

fn weight(rng: &mut ChaCha8Rng, spec: &GeneratorSpec) -> TruthInterval {
    if rng.gen_bool(spec.exact_weight_prob) {
        // Full certainty is the most common exact weight.
        let v = if rng.gen_bool(0.4) {
            10
        } else {
            rng.gen_range(0..=10)
        };
        TruthInterval::exact(tenth(v)).expect("grid values are in range")
    } else {
        let width = rng.gen_range(1..=spec.max_width_tenths.clamp(1, 10));
        let lo = rng.gen_range(0..=10 - width);
        TruthInterval::new(tenth(lo), tenth(lo + width)).expect("grid values are in range")
    }
}

fn program(rng: &mut ChaCha8Rng, spec: &GeneratorSpec, id_prefix: &str) -> Program {
    let atom = |i: usize| Atom::prop(format!("{}{}", spec.atom_prefix, i));
    let mut rules = Vec::with_capacity(spec.rules);
    for n in 0..spec.rules {
        if spec.atoms == 0 {
            break;
        }
        let h = rng.gen_range(0..spec.atoms);
        let head = Literal {
            atom: atom(h),
            negated: rng.gen_bool(spec.negation_prob),
        };
        let len = rng.gen_range(0..=spec.max_body.min(h));
        let mut chosen: Vec<usize> = Vec::with_capacity(len);
        while chosen.len() < len {
            let b = rng.gen_range(0..h);
            if !chosen.contains(&b) {
                chosen.push(b);
            }
        }
        let body = chosen
            .into_iter()
            .map(|b| {
                let l = Literal {
                    atom: atom(b),
                    negated: rng.gen_bool(spec.negation_prob),
                };
                if rng.gen_bool(spec.naf_prob) {
                    BodyElement::Naf(l)
                } else {
                    BodyElement::Lit(l)
                }
            })
            .collect();
        rules.push(Rule {
            id: RuleId(format!("{id_prefix}{}", n + 1)),
            head,
            body,
            weight: weight(rng, spec),
        });
    }
    Program::new(rules).expect("generated labels are unique")
}

/// Two programs over the same atoms, fully determined by the spec.
pub fn generate_pair(spec: &GeneratorSpec) -> (Program, Program) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let p = program(&mut rng, spec, &spec.id_prefixes.0);
    let q = program(&mut rng, spec, &spec.id_prefixes.1);
    (p, q)
}

/// A single program, as the first half of a pair.
pub fn generate_program(spec: &GeneratorSpec) -> Program {
    generate_pair(spec).0
}

/// Copy of `q` in which atoms absent from `p` and all labels are renamed.
/// The copy clashes with `p` exactly as `q` does.
pub fn rename_apart(p: &Program, q: &Program, atom_suffix: &str, id_prefix: &str) -> Program {
    let shared = p.atom_base();
    let mut names: BTreeMap<Atom, Atom> = BTreeMap::new();
    let mut rename = |a: &Atom| -> Atom {
        if shared.contains(a) {
            return a.clone();
        }
        names
            .entry(a.clone())
            .or_insert_with(|| Atom {
                predicate: format!("{}{}", a.predicate, atom_suffix),
                args: a.args.clone(),
            })
            .clone()
    };
    let rules = q
        .rules()
        .iter()
        .enumerate()
        .map(|(i, r)| Rule {
            id: RuleId(format!("{id_prefix}{}", i + 1)),
            head: Literal {
                atom: rename(&r.head.atom),
                negated: r.head.negated,
            },
            body: r
                .body
                .iter()
                .map(|b| match b {
                    BodyElement::Lit(l) => BodyElement::Lit(Literal {
                        atom: rename(&l.atom),
                        negated: l.negated,
                    }),
                    BodyElement::Naf(l) => BodyElement::Naf(Literal {
                        atom: rename(&l.atom),
                        negated: l.negated,
                    }),
                    BodyElement::Const(c) => BodyElement::Const(*c),
                })
                .collect(),
            weight: r.weight,
        })
        .collect();
    Program::new(rules).expect("renamed labels are unique")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_pair() {
        let spec = GeneratorSpec {
            seed: 42,
            ..GeneratorSpec::default()
        };
        assert_eq!(generate_pair(&spec), generate_pair(&spec));
        let other = GeneratorSpec {
            seed: 43,
            ..GeneratorSpec::default()
        };
        assert_ne!(generate_pair(&spec), generate_pair(&other));
    }

    #[test]
    fn zero_naf_probability_gives_positive_programs() {
        for seed in 0..50 {
            let spec = GeneratorSpec {
                seed,
                naf_prob: 0.0,
                ..GeneratorSpec::default()
            };
            let (p, q) = generate_pair(&spec);
            assert!(p.is_positive() && q.is_positive());
        }
    }

    #[test]
    fn zero_rules_gives_empty_programs() {
        let spec = GeneratorSpec {
            rules: 0,
            ..GeneratorSpec::default()
        };
        let (p, q) = generate_pair(&spec);
        assert!(p.is_empty() && q.is_empty());
    }

    #[test]
    fn bodies_only_use_lower_atoms() {
        let spec = GeneratorSpec {
            atoms: 8,
            rules: 20,
            max_body: 4,
            seed: 3,
            ..GeneratorSpec::default()
        };
        let index = |a: &Atom| a.predicate[1..].parse::<usize>().unwrap();
        for r in generate_program(&spec).rules() {
            for l in r.body.iter().filter_map(BodyElement::literal) {
                assert!(index(&l.atom) < index(&r.head.atom));
            }
        }
    }

    #[test]
    fn renaming_keeps_shared_atoms() {
        let p = crate::program::parse_program("x :- y.").unwrap();
        let q = crate::program::parse_program("-x :- z. z.").unwrap();
        let r = rename_apart(&p, &q, "_r", "s");
        assert_eq!(r.to_string(), "s1: -x :- z_r @ [1,1].\ns2: z_r @ [1,1].\n");
    }
}
