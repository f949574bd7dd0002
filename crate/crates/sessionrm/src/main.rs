use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use sessionrm::commands::{cmd_eval, cmd_index, cmd_run, cmd_tune, to_json, EvalConfig, RunOutputs};
use sessionrm::config::{PartialConfig, PartialGrid, DEFAULT_DEPTH, DEFAULT_K};
use sessionrm::formats::write_bytes;
use sessionrm_core::pipeline::Method;

/// Session search: index a corpus, re-rank session queries, evaluate and tune.
#[derive(Parser)]
#[command(name = "sessionrm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index snapshot from a JSON-lines corpus ({"id", "text"} per line).
    Index {
        corpus: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Re-rank every session's current query and evaluate the result.
    Run {
        #[command(flatten)]
        settings: Settings,
        /// Run file to write.
        #[arg(short, long)]
        out: PathBuf,
        /// Report file; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write each session's expansion model as JSON.
        #[arg(long, value_name = "PATH")]
        dump_model: Option<PathBuf>,
        /// Write each session's model-building trace as JSON.
        #[arg(long, value_name = "PATH")]
        dump_trace: Option<PathBuf>,
    },
    /// Grid-search lambda, gamma and m for the highest mean MAP.
    Tune {
        #[command(flatten)]
        settings: Settings,
        #[arg(long, value_delimiter = ',', value_name = "LIST")]
        lambda_grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', value_name = "LIST")]
        gamma_grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', value_name = "LIST")]
        m_grid: Option<Vec<usize>>,
        /// Result file; printed to stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Score an existing run file.
    Eval {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        /// Session file mapping run query ids (session ids) to topics.
        #[arg(long)]
        sessions: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Settings {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long)]
    sessions: Option<PathBuf>,
    #[arg(long)]
    qrels: Option<PathBuf>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    /// Number of terms kept in expansion models.
    #[arg(long)]
    clip: Option<usize>,
    #[arg(long)]
    decay: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Initial retrieval depth.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    run_tag: Option<String>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|_| {
        let all: Vec<&str> = Method::ALL.iter().map(|m| m.as_str()).collect();
        format!("expected one of {}", all.join(", "))
    })
}

impl Settings {
    fn resolve(self, grid: Option<PartialGrid>) -> anyhow::Result<sessionrm::config::RunConfig> {
        let file = match &self.config {
            Some(p) => PartialConfig::read(p)?,
            None => PartialConfig::default(),
        };
        let cli = PartialConfig {
            index: self.index,
            sessions: self.sessions,
            qrels: self.qrels,
            method: self.method,
            lambda: self.lambda,
            gamma: self.gamma,
            m: self.m,
            mu: self.mu,
            clip: self.clip,
            decay: self.decay,
            change_priors: None,
            k: self.k,
            depth: self.depth,
            run_tag: self.run_tag,
            grid,
        };
        Ok(cli.over(file).resolve()?)
    }
}

fn emit(out: Option<&PathBuf>, json: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => write_bytes(p, json.as_bytes())?,
        None => print!("{json}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Index { corpus, out } => {
            let summary = cmd_index(&corpus, &out)?;
            println!(
                "indexed {} documents, {} terms, {} tokens",
                summary.documents, summary.terms, summary.tokens
            );
        }
        Command::Run {
            settings,
            out,
            report,
            dump_model,
            dump_trace,
        } => {
            let cfg = settings.resolve(None)?;
            let outputs = RunOutputs {
                run: out,
                report,
                dump_model,
                dump_trace,
            };
            cmd_run(&cfg, &outputs).context("run failed")?;
        }
        Command::Tune {
            settings,
            lambda_grid,
            gamma_grid,
            m_grid,
            out,
        } => {
            let grid = (lambda_grid.is_some() || gamma_grid.is_some() || m_grid.is_some()).then_some(PartialGrid {
                lambda: lambda_grid,
                gamma: gamma_grid,
                m: m_grid,
            });
            let cfg = settings.resolve(grid)?;
            let report = cmd_tune(&cfg).context("tuning failed")?;
            emit(out.as_ref(), &to_json(&report))?;
        }
        Command::Eval {
            run,
            qrels,
            sessions,
            k,
            depth,
            out,
        } => {
            let report = cmd_eval(EvalConfig {
                run,
                qrels,
                sessions,
                k,
                depth,
            })?;
            emit(out.as_ref(), &to_json(&report))?;
        }
    }
    Ok(())
}
