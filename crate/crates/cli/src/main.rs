//! `k4norm`: normality certificates, holes, facets, minors and marginals
//! from the command line.

mod render;

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use k4norm::graph::{find_k4_branch_sets, is_k4_minor_free, minor_sequence_to_k4};
use k4norm::json;
use k4norm::model::{marginalize, reduce_coords};
use k4norm::normality::{classify_model, find_holes, Verdict};
use k4norm::polyhedra::{certify_facets, graph_system, reduced_generators};
use k4norm::Error;

const EXIT_NOT_NORMAL: u8 = 10;
const EXIT_UNKNOWN: u8 = 20;
const EXIT_INPUT: u8 = 2;
const EXIT_TOO_LARGE: u8 = 3;
const EXIT_INTERNAL: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "k4norm", version, about = "Normality of marginal semigroups of hierarchical table models")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Largest sample size searched for holes.
    #[arg(long, global = true, default_value_t = 4)]
    max_n: u32,

    /// Right-hand-side bound for the brute-force integrality check.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    beta: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide normality and print the certificate.
    Check {
        /// Model JSON or graph text; `-` reads standard input.
        model: String,
    },
    /// List every hole with sample size up to --max-n.
    Holes { model: String },
    /// Box and cycle inequalities of a binary graph model, certified.
    Facets { graph: String },
    /// K4-minor test: elimination order or branch sets with a minor sequence.
    Minor { graph: String },
    /// Full and reduced marginal coordinates of a table.
    Margin { table: String, model: String },
}

enum Failure {
    Input(String),
    TooLarge(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TooLarge { .. } => Failure::TooLarge(e.to_string()),
            Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }
}

fn emit(cli: &Cli, value: serde_json::Value, text: String) {
    let out = match cli.format {
        Format::Json => serde_json::to_string_pretty(&value).expect("JSON values serialize") + "\n",
        Format::Text => text,
    };
    let _ = io::stdout().write_all(out.as_bytes());
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Check { model } => {
            let m = json::parse_model_or_graph(&read_input(model)?)?;
            let cert = classify_model(&m, cli.max_n, cli.beta)?;
            if !cert.verify()? {
                return Err(Failure::Internal("certificate failed re-verification".into()));
            }
            emit(cli, json::certificate_json(&cert), render::certificate(&cert));
            Ok(match cert.verdict() {
                Verdict::Normal => 0,
                Verdict::NotNormal => EXIT_NOT_NORMAL,
                Verdict::Unknown => EXIT_UNKNOWN,
            })
        }
        Command::Holes { model } => {
            let m = json::parse_model_or_graph(&read_input(model)?)?;
            let holes = find_holes(&m, cli.max_n);
            let value = serde_json::Value::Array(holes.iter().map(json::hole_json).collect());
            emit(cli, value, render::holes(&holes, cli.max_n));
            Ok(0)
        }
        Command::Facets { graph } => {
            let g = json::parse_graph(&read_input(graph)?)?;
            let m = g.binary_model();
            let sys = graph_system(&m)?;
            let minor_free = is_k4_minor_free(&g).is_some();
            if !minor_free {
                eprintln!("warning: graph has a K4 minor; these inequalities need not describe the cone");
            }
            let dim = m.reduced_dim();
            let checks = certify_facets(&sys, &reduced_generators(&m), dim)?;
            let rows: Vec<serde_json::Value> = (0..sys.len())
                .map(|k| {
                    let mut v = json::inequality_json(&sys, k);
                    v["certificate"] = json::facet_check_json(&checks[k]);
                    v
                })
                .collect();
            let value = serde_json::json!({
                "model": json::model_json(&m),
                "k4_minor_free": minor_free,
                "dimension": dim,
                "inequalities": rows,
            });
            emit(cli, value, render::facets(&sys, &checks, minor_free));
            Ok(0)
        }
        Command::Minor { graph } => {
            let g = json::parse_graph(&read_input(graph)?)?;
            let (value, text) = match find_k4_branch_sets(&g)? {
                None => {
                    let elim = is_k4_minor_free(&g)
                        .ok_or_else(|| Failure::Internal("elimination and branch search disagree".into()))?;
                    (
                        serde_json::json!({
                            "k4_minor_free": true,
                            "elimination": json::elimination_json(&elim),
                        }),
                        render::elimination(&elim),
                    )
                }
                Some(b) => {
                    let ops = minor_sequence_to_k4(&g, &b)?;
                    (
                        serde_json::json!({
                            "k4_minor_free": false,
                            "branch_sets": json::branch_sets_json(&b),
                            "ops": ops.iter().map(json::op_json).collect::<Vec<_>>(),
                        }),
                        render::minor(&b, &ops),
                    )
                }
            };
            emit(cli, value, text);
            Ok(0)
        }
        Command::Margin { table, model } => {
            let t = json::parse_table(&read_input(table)?)?;
            let m = json::parse_model_or_graph(&read_input(model)?)?;
            let full = marginalize(&t, &m)?;
            let reduced = reduce_coords(&full);
            let value = serde_json::json!({
                "full": json::full_vector_json(&full),
                "reduced": json::reduced_vector_json(&reduced),
            });
            emit(cli, value, render::margin(&full, &reduced));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::TooLarge(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_TOO_LARGE)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
