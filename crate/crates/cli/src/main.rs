//! `elho`: command-line front end to the query answering pipeline.
//!
//! Exit codes: 0 success, 1 unsatisfiable KB (`sat` only), 2 usage or
//! input error, 3 fact budget exhausted.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use elho::engine::{materialize, Budget, DEFAULT_MAX_FACTS};
use elho::kb::{normalize, parse_kb, KnowledgeBase};
use elho::query::{parse_query, CertainAnswers, Reasoner, Satisfiability};
use elho::rewrite::{dat_translate, xi_translate};
use elho::workbench::{compute_answer_stats, compute_stats, generate_kb_with_tbox, DEFAULT_TBOX};

#[derive(Parser)]
#[command(
    name = "elho",
    version,
    about = "Conjunctive query answering over ELHO knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a KB into its datalog program (or the function-symbol program with --xi).
    Rewrite {
        #[arg(long)]
        kb: PathBuf,
        /// Emit the program with function terms instead of auxiliary constants.
        #[arg(long)]
        xi: bool,
        /// Append the equality axioms.
        #[arg(long)]
        equality: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Materialise the datalog program and dump the minimal model.
    Materialize {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_FACTS)]
        max_facts: usize,
    },
    /// Check satisfiability.
    Sat {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_FACTS)]
        max_facts: usize,
    },
    /// Compute the certain answers of a conjunctive query.
    Query {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Also print every match with its verdict.
        #[arg(long)]
        explain: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_FACTS)]
        max_facts: usize,
    },
    /// Print materialisation statistics, and answer statistics for --query.
    Stats {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        query: Option<PathBuf>,
        /// Flat key=value output.
        #[arg(long)]
        machine: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_FACTS)]
        max_facts: usize,
    },
    /// Generate a synthetic university KB.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        scale: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Schema to use instead of the built-in one.
        #[arg(long)]
        tbox: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
}

impl From<elho::Error> for Failure {
    fn from(e: elho::Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    parse_kb(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn reasoner(kb: &Path, max_facts: usize) -> Result<Reasoner, Failure> {
    let kb = load_kb(kb)?;
    Ok(Reasoner::new(&kb, &Budget { max_facts }).map_err(elho::Error::from)?)
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Rewrite {
            kb,
            xi,
            equality,
            out,
        } => {
            let kb = normalize(&load_kb(&kb)?);
            let mut program = if xi {
                xi_translate(&kb)
            } else {
                dat_translate(&kb)
            };
            if equality {
                program = program.with_equality();
            }
            emit(out.as_deref(), &program.to_text())?;
        }
        Command::Materialize { kb, out, max_facts } => {
            let kb = normalize(&load_kb(&kb)?);
            let model = materialize(&dat_translate(&kb), &Budget { max_facts })
                .map_err(elho::Error::from)?;
            emit(out.as_deref(), &model.dump())?;
        }
        Command::Sat { kb, max_facts } => {
            let r = reasoner(&kb, max_facts)?;
            return Ok(match r.satisfiability() {
                Satisfiability::Sat => {
                    emit(None, "SATISFIABLE\n")?;
                    0
                }
                Satisfiability::Unsat => {
                    emit(None, "UNSATISFIABLE\n")?;
                    1
                }
            });
        }
        Command::Query {
            kb,
            query,
            explain,
            max_facts,
        } => {
            let r = reasoner(&kb, max_facts)?;
            let q = parse_query(&read(&query)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", query.display())))?;
            let mut text = String::new();
            match r.certain_answers(&q).map_err(elho::Error::from)? {
                CertainAnswers::Unsatisfiable => text.push_str("UNSATISFIABLE\n"),
                answers @ CertainAnswers::Answers(_) if q.is_boolean() => {
                    text.push_str(if answers.holds() { "true\n" } else { "false\n" });
                }
                CertainAnswers::Answers(tuples) => {
                    for t in tuples {
                        let names: Vec<&str> = t.iter().map(|i| i.as_str()).collect();
                        text.push_str(&format!("({})\n", names.join(", ")));
                    }
                }
            }
            if explain && r.satisfiability() == Satisfiability::Sat {
                for (tau, verdict) in r.explain(&q).map_err(elho::Error::from)? {
                    text.push_str(&format!("match {tau} {verdict}\n"));
                }
            }
            emit(None, &text)?;
        }
        Command::Stats {
            kb,
            query,
            machine,
            max_facts,
        } => {
            let r = reasoner(&kb, max_facts)?;
            let Some(stats) = compute_stats(&r) else {
                emit(None, "UNSATISFIABLE\n")?;
                return Ok(0);
            };
            let mut text = if machine {
                stats.to_machine()
            } else {
                stats.to_text()
            };
            if let Some(path) = query {
                let q = parse_query(&read(&path)?)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                let answers = compute_answer_stats(&r, &q).map_err(elho::Error::from)?;
                if !machine {
                    text.push('\n');
                }
                text.push_str(&if machine {
                    answers.to_machine()
                } else {
                    answers.to_text()
                });
            }
            emit(None, &text)?;
        }
        Command::Gen {
            scale,
            seed,
            out,
            tbox,
        } => {
            let tbox = match tbox {
                Some(p) => read(&p)?,
                None => DEFAULT_TBOX.to_string(),
            };
            let text = generate_kb_with_tbox(scale as usize, seed, &tbox)
                .map_err(|e| Failure::Input(format!("schema: {e}")))?;
            emit(out.as_deref(), &text)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
