//! The `causid` command line.
//!
//! Exit status: 0 on success, 1 for usage, input or parse errors, 2 when the
//! queried effect is not identifiable, 3 when `verify` finds a mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use causid_core::{
    c_components, d_separated, identify, rule_applicable, CausalDiagram, DsepError, GraphError,
    IdOptions, IdentError, IdentResult, NodeSet, Query, Rule, RuleQuery,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::io::{
    parse_dsl, parse_graphml, render, DslError, Format, GraphmlError, NameOptions, Notation,
};
use crate::oracle::{verify_query, OracleError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_NOT_IDENTIFIABLE: u8 = 2;
pub const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("{0}")]
    Dsl(#[from] DslError),
    #[error("{0}")]
    Graphml(#[from] GraphmlError),
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Ident(#[from] IdentError),
    #[error("{0}")]
    Dsep(#[from] DsepError),
    #[error("{0}")]
    Oracle(#[from] OracleError),
    #[error("cannot infer the notation of {0}; pass --notation")]
    UnknownNotation(String),
    #[error("output error: {0}")]
    Output(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "causid",
    version,
    about = "Identify causal effects in semi-Markovian causal diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Express P_x(y | z) in terms of the observational distribution.
    Identify {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value_t = FormatArg::Latex)]
        format: FormatArg,
        /// Drop conditioning variables that are d-separated from a factor.
        #[arg(long, value_enum, default_value_t = Switch::On)]
        prune: Switch,
        /// Apply the algebraic simplifier to the result.
        #[arg(long)]
        simplify: bool,
    },
    /// Test whether x and y are d-separated given z.
    CheckDsep {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        z: Vec<String>,
    },
    /// Test the graphical condition of a do-calculus rule.
    CheckRule {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        rule: u8,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        x: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        w: Vec<String>,
    },
    /// List the C-components of the diagram.
    Decompose {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Identify a query and check the answer against random discrete models.
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 20)]
        models: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        prune: Switch,
    },
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Diagram file (.dsl, .txt, .graphml or .xml).
    #[arg(long)]
    graph: PathBuf,
    /// Input notation; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    notation: Option<NotationArg>,
    /// Node names in document order, for GraphML files.
    #[arg(long, value_delimiter = ',')]
    names: Option<Vec<String>>,
    /// Replace the names found in a GraphML file with --names.
    #[arg(long)]
    ignore_file_names: bool,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Outcome variables y.
    #[arg(long = "on", value_delimiter = ',', required = true)]
    on: Vec<String>,
    /// Intervened variables x.
    #[arg(long = "do", value_delimiter = ',', required = true)]
    intervene: Vec<String>,
    /// Conditioning variables z.
    #[arg(long, value_delimiter = ',')]
    given: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NotationArg {
    Dsl,
    Standard,
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Latex,
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Latex => Format::Latex,
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

/// Loads a diagram from disk in the given or inferred notation.
fn load(args: &GraphArgs) -> Result<CausalDiagram, CliError> {
    let text = std::fs::read_to_string(&args.graph).map_err(|e| CliError::Read {
        path: args.graph.display().to_string(),
        message: e.to_string(),
    })?;
    let notation = match args.notation {
        Some(n) => n,
        None => infer_notation(&args.graph)?,
    };
    let naming = NameOptions {
        names: args.names.clone(),
        ignore_file_names: args.ignore_file_names,
    };
    Ok(match notation {
        NotationArg::Dsl => parse_dsl(&text)?,
        NotationArg::Standard => parse_graphml(&text, Notation::Standard, &naming)?,
        NotationArg::Internal => parse_graphml(&text, Notation::Internal, &naming)?,
    })
}

fn infer_notation(path: &Path) -> Result<NotationArg, CliError> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("dsl" | "txt") => Ok(NotationArg::Dsl),
        Some("graphml" | "xml") => Ok(NotationArg::Standard),
        _ => Err(CliError::UnknownNotation(path.display().to_string())),
    }
}

/// Names from a comma-separated flag; empty entries are ignored so that
/// `--z ''` means the empty set.
fn listed(names: &[String]) -> impl Iterator<Item = &str> {
    names.iter().map(|n| n.trim()).filter(|n| !n.is_empty())
}

fn nodes(g: &CausalDiagram, names: &[String]) -> Result<NodeSet, CliError> {
    Ok(g.node_set(listed(names))?)
}

fn parse_query(g: &CausalDiagram, args: &QueryArgs) -> Result<Query, CliError> {
    Ok(Query::from_names(
        g,
        listed(&args.on),
        listed(&args.intervene),
        listed(&args.given),
    )?)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|e| CliError::Output(e.to_string()))
}

#[derive(Serialize)]
struct HedgeReport<'a> {
    message: String,
    hedge: &'a causid_core::Hedge,
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Identify {
            graph,
            query,
            format,
            prune,
            simplify,
        } => {
            let g = load(&graph)?;
            let q = parse_query(&g, &query)?;
            let opts = IdOptions {
                prune: prune == Switch::On,
                simplify,
            };
            match identify(&g, &q, opts)? {
                IdentResult::Identified(e) => {
                    emit(stdout, &render(&e, format.into()))?;
                    Ok(EXIT_OK)
                }
                IdentResult::NotIdentifiable(h) => {
                    emit(stderr, &h.to_string())?;
                    if format == FormatArg::Json {
                        let report = HedgeReport {
                            message: h.to_string(),
                            hedge: &h,
                        };
                        emit(
                            stdout,
                            &serde_json::to_string_pretty(&report)
                                .map_err(|e| CliError::Output(e.to_string()))?,
                        )?;
                    }
                    Ok(EXIT_NOT_IDENTIFIABLE)
                }
            }
        }
        Command::CheckDsep { graph, x, y, z } => {
            let g = load(&graph)?;
            let sep = d_separated(&g, &nodes(&g, &x)?, &nodes(&g, &y)?, &nodes(&g, &z)?)?;
            emit(stdout, if sep { "true" } else { "false" })?;
            Ok(EXIT_OK)
        }
        Command::CheckRule {
            graph,
            rule,
            y,
            x,
            z,
            w,
        } => {
            let g = load(&graph)?;
            let rule = match rule {
                1 => Rule::One,
                2 => Rule::Two,
                _ => Rule::Three,
            };
            let q = RuleQuery {
                rule,
                y: nodes(&g, &y)?,
                x: nodes(&g, &x)?,
                z: nodes(&g, &z)?,
                w: nodes(&g, &w)?,
            };
            let ok = rule_applicable(&g, &q)?;
            emit(stdout, if ok { "true" } else { "false" })?;
            Ok(EXIT_OK)
        }
        Command::Decompose { graph, format } => {
            let g = load(&graph)?;
            let parts: Vec<Vec<&str>> = c_components(&g)
                .components()
                .iter()
                .map(|c| g.names(c))
                .collect();
            if format == FormatArg::Json {
                emit(
                    stdout,
                    &serde_json::to_string_pretty(&parts)
                        .map_err(|e| CliError::Output(e.to_string()))?,
                )?;
            } else {
                for part in parts {
                    emit(stdout, &format!("{{{}}}", part.join(",")))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            graph,
            query,
            models,
            seed,
            prune,
        } => {
            let g = load(&graph)?;
            let q = parse_query(&g, &query)?;
            let opts = IdOptions {
                prune: prune == Switch::On,
                simplify: false,
            };
            let report = verify_query(&g, &q, models, seed, opts)?;
            emit(
                stdout,
                &serde_json::to_string_pretty(&report)
                    .map_err(|e| CliError::Output(e.to_string()))?,
            )?;
            Ok(if report.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

/// Runs the command line on `args` (including the program name) and
/// returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("causid").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = run_args(&["identify", "--graph", "g.dsl", "--do", "X"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("--on"));
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_ERROR);
        assert_eq!(run_args(&[]).0, EXIT_ERROR);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("identify"));
    }

    #[test]
    fn missing_file_is_reported() {
        let (code, _, err) = run_args(&["decompose", "--graph", "/nonexistent/g.dsl"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.starts_with("error: cannot read"));
    }

    #[test]
    fn notation_from_extension() {
        assert!(matches!(
            infer_notation(Path::new("a/b.DSL")),
            Ok(NotationArg::Dsl)
        ));
        assert!(matches!(
            infer_notation(Path::new("g.graphml")),
            Ok(NotationArg::Standard)
        ));
        assert!(infer_notation(Path::new("g")).is_err());
    }
}
