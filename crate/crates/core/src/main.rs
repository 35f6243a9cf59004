//! Command line front end: solve, revise, explain, check and fuzz.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use unasp::harness::{
    check_all, check_fullness, check_inclusion, check_nm_consistency, check_success,
    check_uniformity, check_weak_disjunction, check_weak_parallelism, run_fuzz,
    split_first_component, FuzzConfig, Outcome, Postulate, Status,
};
use unasp::program::{ground, Literal};
use unasp::revision::{revise, RevisionConfig};
use unasp::semantics::answer_set_with;
use unasp::transform::{resolution_tree, rules_in_derivation, transform};
use unasp::{parse_program, DistanceVariant, Program};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_REVISION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "unasp",
    version,
    about = "Interval-valued answer sets and belief base revision"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct RevisionArgs {
    /// Widening per exception applied to disposition weights.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Interval distance used to break ties: corrected or paper-literal.
    #[arg(long, default_value = "corrected")]
    distance: DistanceVariant,
    /// Largest removed set considered.
    #[arg(long, default_value_t = 3)]
    cap: usize,
}

impl RevisionArgs {
    fn config(self) -> RevisionConfig {
        RevisionConfig {
            delta: self.delta,
            distance: self.distance,
            cap: self.cap,
            ..RevisionConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the answer set of a program.
    Solve {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Revise a base by a new base.
    Revise {
        base: PathBuf,
        new: PathBuf,
        #[command(flatten)]
        rev: RevisionArgs,
        #[arg(long)]
        json: bool,
    },
    /// Print the resolution tree of a literal.
    Explain {
        file: PathBuf,
        /// Literal to explain, e.g. `p` or `-p`.
        #[arg(long)]
        atom: String,
        #[arg(long)]
        json: bool,
    },
    /// Check revision postulates on a pair of bases.
    Check {
        base: PathBuf,
        new: PathBuf,
        /// Second new base compared by uniformity; defaults to the first.
        #[arg(long)]
        third: Option<PathBuf>,
        /// `all` or a comma-separated list of postulate names.
        #[arg(long, default_value = "all")]
        postulates: String,
        #[command(flatten)]
        rev: RevisionArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check every postulate on seeded random program pairs.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 5)]
        atoms: usize,
        #[arg(long, default_value_t = 6)]
        rules: usize,
        #[arg(long)]
        json: bool,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
}

fn read_program(path: &Path) -> Result<Program, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_program(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Grounds every program over the constants they mention together.
fn ground_all(programs: Vec<Program>) -> Result<Vec<Program>, Failure> {
    if programs.iter().all(Program::is_ground) {
        return Ok(programs);
    }
    let constants: BTreeSet<String> = programs.iter().flat_map(Program::constants).collect();
    programs
        .iter()
        .map(|p| ground(p, &constants).map_err(|e| Failure::usage(e.to_string())))
        .collect()
}

fn read_ground(paths: &[&Path]) -> Result<Vec<Program>, Failure> {
    ground_all(
        paths
            .iter()
            .map(|p| read_program(p))
            .collect::<Result<_, _>>()?,
    )
}

fn parse_literal(text: &str) -> Result<Literal, Failure> {
    let p = parse_program(&format!("{text}."))
        .map_err(|e| Failure::usage(format!("bad literal `{text}`: {e}")))?;
    match p.rules() {
        [r] if r.body.is_empty() => Ok(r.head.clone()),
        _ => Err(Failure::usage(format!("bad literal `{text}`"))),
    }
}

fn solve(file: &Path, json: bool) -> Result<u8, Failure> {
    let p = read_ground(&[file])?.remove(0);
    match answer_set_with(&p, &RevisionConfig::default().solver) {
        Ok(a) if json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&a.to_json()).expect("json")
            );
            Ok(0)
        }
        Ok(a) => {
            print!("{}", a.interpretation);
            if !a.consistent {
                let names: Vec<String> = a
                    .contradiction_atoms
                    .iter()
                    .map(|x| x.to_string())
                    .collect();
                println!("inconsistent: {}", names.join(", "));
            }
            Ok(0)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(EXIT_VIOLATION)
        }
    }
}

fn revise_cmd(base: &Path, new: &Path, cfg: RevisionConfig, json: bool) -> Result<u8, Failure> {
    let ps = read_ground(&[base, new])?;
    let rev = revise(&ps[0], &ps[1], &cfg).map_err(|e| Failure {
        code: EXIT_REVISION,
        msg: e.to_string(),
    })?;
    let report = rev.report();
    if json {
        println!("{}", report.to_json());
    } else {
        println!("removed: {{{}}}", report.removed.join(", "));
        println!(
            "contradiction set: {{{}}}",
            report.contradiction_set.join(", ")
        );
        for (atom, sets) in &report.prs {
            let sets: Vec<String> = sets
                .iter()
                .map(|s| format!("{{{}}}", s.join(", ")))
                .collect();
            println!("prs {atom}: {}", sets.join(" "));
        }
        if let Some(d) = report.distance {
            println!("distance: {d}");
        }
        print!("{}", report.program);
    }
    Ok(0)
}

fn explain(file: &Path, atom: &str, json: bool) -> Result<u8, Failure> {
    let p = read_ground(&[file])?.remove(0);
    let target = parse_literal(atom)?;
    let (tp, table) = transform(&p);
    let tree = resolution_tree(&tp, &target);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&tree.root).expect("json")
        );
    } else {
        print!("{}", tree.root.render());
        let rules: Vec<String> = rules_in_derivation(&tree, &table)
            .iter()
            .map(|r| r.to_string())
            .collect();
        println!("rules: {{{}}}", rules.join(", "));
    }
    Ok(0)
}

fn selected(spec: &str) -> Result<Vec<Postulate>, Failure> {
    if spec == "all" {
        return Ok(Postulate::ALL.to_vec());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<Postulate>().map_err(Failure::usage))
        .collect()
}

fn check(
    base: &Path,
    new: &Path,
    third: Option<&Path>,
    postulates: &str,
    cfg: RevisionConfig,
    json: bool,
) -> Result<u8, Failure> {
    let wanted = selected(postulates)?;
    let mut paths = vec![base, new];
    paths.extend(third);
    let ps = read_ground(&paths)?;
    let (p, q) = (&ps[0], &ps[1]);
    let r = ps.get(2).unwrap_or(q);
    let outcomes: Vec<Outcome> = if wanted.len() == Postulate::ALL.len() {
        check_all(p, q, r, &cfg)
    } else {
        wanted
            .iter()
            .map(|post| match post {
                Postulate::Success => check_success(p, q, &cfg),
                Postulate::Inclusion => check_inclusion(p, q, &cfg),
                Postulate::NmConsistency => check_nm_consistency(p, q, &cfg),
                Postulate::Fullness => check_fullness(p, q, &cfg),
                Postulate::Uniformity => check_uniformity(p, q, r, &cfg),
                Postulate::WeakDisjunction => {
                    let (p1, p2) = split_first_component(p);
                    check_weak_disjunction(&p1, &p2, q, &cfg)
                }
                Postulate::WeakParallelism => {
                    let (q1, q2) = split_first_component(q);
                    check_weak_parallelism(p, &q1, &q2, &cfg)
                }
            })
            .collect()
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&outcomes).expect("json"));
    } else {
        for o in &outcomes {
            println!("{o}");
        }
    }
    let violated = outcomes.iter().any(|o| o.status == Status::Violated);
    Ok(if violated { EXIT_VIOLATION } else { 0 })
}

fn fuzz(fc: FuzzConfig, json: bool) -> Result<u8, Failure> {
    let start = std::time::Instant::now();
    let summary = run_fuzz(&fc);
    if json {
        println!("{}", summary.to_json());
    } else {
        print!("{summary}");
        println!("elapsed: {:.2}s", start.elapsed().as_secs_f64());
    }
    Ok(if summary.passed() { 0 } else { EXIT_VIOLATION })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve { file, json } => solve(&file, json),
        Command::Revise {
            base,
            new,
            rev,
            json,
        } => revise_cmd(&base, &new, rev.config(), json),
        Command::Explain { file, atom, json } => explain(&file, &atom, json),
        Command::Check {
            base,
            new,
            third,
            postulates,
            rev,
            json,
        } => check(
            &base,
            &new,
            third.as_deref(),
            &postulates,
            rev.config(),
            json,
        ),
        Command::Fuzz {
            seed,
            cases,
            atoms,
            rules,
            json,
        } => fuzz(
            FuzzConfig {
                seed,
                cases,
                atoms,
                rules,
            },
            json,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
