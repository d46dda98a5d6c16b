use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cyclid::fixtures;
use cyclid::indexing::IndexPreds;
use cyclid::prooftree::NodeAddr;
use cyclid::report::{self, GtcMode, LoadedProof};
use cyclid::rules::System;
use cyclid::search::{SearchBudget, Strategy};
use cyclid::syntax::{parse_defs, parse_sequent, parse_term, IndDefSet};

const OK: u8 = 0;
const INPUT_ERROR: u8 = 1;
const INVALID: u8 = 2;
const EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "cyclid", version, about = "Checker, normalizer and bounded prover for cyclic proofs with inductive definitions")]
struct Cli {
    /// Inductive definitions file; defaults to the bundled Add1/Add2.
    #[arg(long, global = true)]
    defs: Option<PathBuf>,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Proof system used for rule checking.
    #[arg(long, global = true, default_value = "clkid")]
    system: System,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof script: local rules, cycle normality, trace condition.
    Check {
        file: PathBuf,
        /// `closure`, or `oracle:N` for bounded walk enumeration.
        #[arg(long, default_value = "closure")]
        gtc: GtcMode,
        /// Cycle-normalize before checking.
        #[arg(long)]
        normalize: bool,
    },
    /// Rewrite a proof script into cycle-normal form.
    Normalize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for a cut-free cyclic proof of a sequent.
    Search {
        sequent: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Index diagnostics at one node of a proof.
    Index {
        file: PathBuf,
        /// Node address such as `1.0.0`; `root` for the root.
        #[arg(long, default_value = "root")]
        node: NodeAddr,
        /// Only the K-th indexed antecedent atom (0-based).
        #[arg(long)]
        atom: Option<usize>,
    },
    /// Relate two terms under a set of equations.
    Eq {
        /// Comma-separated equations, e.g. "x = s(y), y = z".
        equations: String,
        left: String,
        right: String,
    },
    /// Evaluate a ground atom or a sequent in the standard model.
    Eval {
        input: String,
        /// Largest value assigned to free variables.
        #[arg(long, default_value_t = 5)]
        bound: u64,
    },
    /// Check the proof with cut and search for a cut-free proof of its conclusion.
    Report {
        /// Proof with cut; defaults to the bundled one.
        #[arg(long)]
        proof: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = SearchBudget::default().max_nodes)]
    max_nodes: usize,
    #[arg(long, default_value_t = SearchBudget::default().max_term_height)]
    max_height: u32,
    #[arg(long, default_value_t = SearchBudget::default().max_branch_depth)]
    max_depth: usize,
    #[arg(long, default_value_t = Strategy::default())]
    strategy: Strategy,
}

impl From<BudgetArgs> for SearchBudget {
    fn from(b: BudgetArgs) -> Self {
        SearchBudget { max_nodes: b.max_nodes, max_term_height: b.max_height, max_branch_depth: b.max_depth, strategy: b.strategy }
    }
}

struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

/// Writes to stdout; a closed pipe downstream is not an error.
fn out(text: &str) -> Result<(), Failure> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit<T: Serialize + Display>(json: bool, r: &T) -> Result<(), Failure> {
    if json {
        out(&serde_json::to_string_pretty(r)?)
    } else {
        out(&r.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load(path: &Path, defs: Option<&IndDefSet>, system: System) -> Result<LoadedProof, Failure> {
    report::load_proof(&read(path)?, defs, system).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let explicit = cli
        .defs
        .as_deref()
        .map(|p| read(p).and_then(|t| parse_defs(&t).map_err(|e| Failure(format!("{}: {e}", p.display())))))
        .transpose()?;
    let defs = explicit.clone().unwrap_or_else(fixtures::add_defs);
    let json = cli.json;
    match cli.command {
        Command::Check { file, gtc, normalize } => {
            let l = load(&file, explicit.as_ref(), cli.system)?;
            let r = report::check_proof(&l.name, &l.proof, &l.defs, cli.system, gtc, normalize);
            emit(json, &r)?;
            Ok(if r.ok { OK } else { INVALID })
        }
        Command::Normalize { file, output } => {
            let l = load(&file, explicit.as_ref(), cli.system)?;
            let r = report::normalize_proof(&l);
            match output {
                Some(out) => fs::write(&out, &r.script).map_err(|e| Failure(format!("{}: {e}", out.display())))?,
                None if !json => out(r.script.trim_end())?,
                None => {}
            }
            if json {
                out(&serde_json::to_string_pretty(&r)?)?;
            }
            Ok(OK)
        }
        Command::Search { sequent, budget } => {
            let goal = parse_sequent(&sequent, &defs)?;
            let r = report::search_goal(&defs, &goal, budget.into())?;
            emit(json, &r)?;
            Ok(if r.proof.is_some() { OK } else { EXHAUSTED })
        }
        Command::Index { file, node, atom } => {
            let l = load(&file, explicit.as_ref(), cli.system)?;
            let r = report::index_at(&IndexPreds::default(), &l.proof, &node, atom)?;
            emit(json, &r)?;
            Ok(OK)
        }
        Command::Eq { equations, left, right } => {
            let gamma: Vec<_> = parse_sequent(&format!("{equations} |-"), &defs)?.left.into_iter().collect();
            let r = report::eq_query(&gamma, &parse_term(&left, &defs)?, &parse_term(&right, &defs)?)?;
            emit(json, &r)?;
            Ok(OK)
        }
        Command::Eval { input, bound } => {
            emit(json, &report::eval_input(&defs, &input, bound)?)?;
            Ok(OK)
        }
        Command::Report { proof, budget } => {
            let l = match proof {
                Some(p) => load(&p, explicit.as_ref(), System::Clkid)?,
                None => report::load_proof(fixtures::FIG2, explicit.as_ref(), System::Clkid)?,
            };
            let r = report::counterexample_report(&l, budget.into())?;
            emit(json, &r)?;
            Ok(if r.with_cut.ok { OK } else { INVALID })
        }
    }
}
