//! `zerofull`: command-line access to the ball classifier, the zero-full
//! verdicts, dimension predictions and the counting experiments.
//!
//! Exit status: 0 on success (and for Zero/Full verdicts), 3 for an
//! Inconclusive verdict, 4 for Undecided, 1 for runtime failures and
//! failed checks, 2 for invalid input.

mod commands;
mod config;
mod specs;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::RunConfig;
use zerofull::cantor::ENUMERATION_CAP;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] zerofull::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Engine(zerofull::Error::Parse(_) | zerofull::Error::InvalidParams(_)) => 2,
            CliError::Engine(_) | CliError::Failed(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "zerofull", version, about = "Zero-full laws and counting experiments for Cantor-set intersections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumeration and census cap.
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Worker threads for the census.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// A file of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
    Jsonl,
    Plot,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Human => "human",
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
            Format::Plot => "plot",
        }
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        Format::from_str(text, true).map_err(|_| CliError::Usage(format!("unknown format `{text}`")))
    }
}

#[derive(Args, Default)]
struct Cantor {
    /// Cantor base.
    #[arg(short = 'b')]
    b: Option<String>,
    /// Digit set, comma separated.
    #[arg(short = 'D')]
    digits: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Number-theoretic relation between b and t.
    Regime {
        #[arg(value_name = "B")]
        b_pos: Option<String>,
        #[arg(value_name = "T")]
        t_pos: Option<String>,
        #[arg(short = 'b', conflicts_with = "b_pos")]
        b: Option<String>,
        #[arg(short = 't', conflicts_with = "t_pos")]
        t: Option<String>,
    },
    /// Zero-full verdict for H^f(W_t(ψ) ∩ C(b, D)).
    Verdict {
        #[command(flatten)]
        cantor: Cantor,
        /// Denominator base; defaults to b.
        #[arg(short = 't')]
        t: Option<String>,
        /// Approximation function, e.g. `pow:c=1/4,theta=1`.
        #[arg(long)]
        psi: Option<String>,
        /// Dimension function, e.g. `s=gamma/2`.
        #[arg(long = "f")]
        f: Option<String>,
        /// Exponent sequence, e.g. `affine:u=2,v=0`.
        #[arg(long = "A")]
        sequence: Option<String>,
    },
    /// Rewrite B(p/b^n, r) ∩ C(b, D) as recentred balls.
    Classify {
        #[command(flatten)]
        cantor: Cantor,
        #[arg(short = 'p')]
        p: Option<String>,
        #[arg(short = 'n')]
        n: Option<String>,
        /// Radius as `num/den`.
        #[arg(short = 'r')]
        r: Option<String>,
    },
    /// Count the balls B(p/t^n, r) meeting C(b, D).
    Census {
        #[command(flatten)]
        cantor: Cantor,
        #[arg(short = 't')]
        t: Option<String>,
        /// Level or range `lo..hi`.
        #[arg(short = 'n')]
        n: Option<String>,
        /// Radius such as `1/100` or `2^(-6/5)`.
        #[arg(short = 'r')]
        r: Option<String>,
        /// Use the radius t^(-θn) at level n.
        #[arg(long)]
        theta: Option<String>,
        /// exact, brute or both.
        #[arg(long)]
        method: Option<String>,
    },
    /// Hausdorff dimension predictions by regime.
    Predict {
        #[command(flatten)]
        cantor: Cantor,
        #[arg(short = 't')]
        t: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        /// Approximation function to take λ from.
        #[arg(long)]
        psi: Option<String>,
        /// θ of ψ(n) = t^(-θn), for the large-intersection threshold.
        #[arg(long)]
        theta: Option<String>,
    },
    /// Built-in reproducibility checks.
    Check {
        /// example31 or oracles.
        target: Option<String>,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = cli.config.as_deref().map(config::load).transpose()?.unwrap_or_default();
    let from_file = |key: &str| file.get(key).cloned();
    let mut cfg = RunConfig {
        format: cli
            .format
            .map(|f| Ok(f.name().to_string()))
            .or_else(|| from_file("format").map(|f| Format::parse(&f).map(|f| f.name().to_string())))
            .transpose()?
            .unwrap_or_else(|| "human".into()),
        seed: match (cli.seed, from_file("seed")) {
            (Some(s), _) => s,
            (None, Some(s)) => specs::number("seed", &s)?,
            (None, None) => 0,
        },
        cap: match (cli.cap, from_file("cap")) {
            (Some(c), _) => c,
            (None, Some(c)) => specs::number("cap", &c)?,
            (None, None) => ENUMERATION_CAP,
        },
        workers: match (cli.workers, from_file("workers")) {
            (Some(w), _) => Some(w),
            (None, Some(w)) => Some(specs::number("workers", &w)?),
            (None, None) => None,
        },
        ..Default::default()
    };
    match &cli.command {
        Command::Regime { b_pos, t_pos, b, t } => {
            cfg.command = "regime".into();
            cfg.b = b.clone().or(b_pos.clone());
            cfg.t = t.clone().or(t_pos.clone());
        }
        Command::Verdict { cantor, t, psi, f, sequence } => {
            cfg.command = "verdict".into();
            (cfg.b, cfg.digits) = (cantor.b.clone(), cantor.digits.clone());
            (cfg.t, cfg.psi, cfg.f, cfg.sequence) = (t.clone(), psi.clone(), f.clone(), sequence.clone());
        }
        Command::Classify { cantor, p, n, r } => {
            cfg.command = "classify".into();
            (cfg.b, cfg.digits) = (cantor.b.clone(), cantor.digits.clone());
            (cfg.p, cfg.n, cfg.r) = (p.clone(), n.clone(), r.clone());
        }
        Command::Census { cantor, t, n, r, theta, method } => {
            cfg.command = "census".into();
            (cfg.b, cfg.digits) = (cantor.b.clone(), cantor.digits.clone());
            (cfg.t, cfg.n, cfg.r, cfg.theta, cfg.method) = (t.clone(), n.clone(), r.clone(), theta.clone(), method.clone());
        }
        Command::Predict { cantor, t, lambda, psi, theta } => {
            cfg.command = "predict".into();
            (cfg.b, cfg.digits) = (cantor.b.clone(), cantor.digits.clone());
            (cfg.t, cfg.lambda, cfg.psi, cfg.theta) = (t.clone(), lambda.clone(), psi.clone(), theta.clone());
        }
        Command::Check { target } => {
            cfg.command = "check".into();
            cfg.target = target.clone();
        }
    }
    cfg.merge(&file)?;
    Ok(cfg)
}

fn header(cfg: &RunConfig) -> String {
    let mut out = format!("# zerofull {}\n", cfg.command);
    for (k, v) in cfg.echo() {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out
}

fn render(cfg: &RunConfig, report: &commands::Report) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    match cfg.format.as_str() {
        "human" => {
            out.extend(header(cfg).bytes());
            out.extend(report.human.bytes());
        }
        "json" => {
            let doc = json!({ "config": cfg, "result": report.result });
            out.extend(serde_json::to_string_pretty(&doc).expect("json").bytes());
            out.push(b'\n');
        }
        "jsonl" => {
            out.extend(serde_json::to_string(&json!({ "config": cfg })).expect("json").bytes());
            out.push(b'\n');
            match &report.census {
                Some(rows) => commands::census_rows(rows, "jsonl", &mut out)?,
                None => {
                    out.extend(serde_json::to_string(&json!({ "result": report.result })).expect("json").bytes());
                    out.push(b'\n');
                }
            }
        }
        "plot" => {
            let rows = report
                .census
                .as_ref()
                .ok_or_else(|| CliError::Usage("plot output is only available for census".into()))?;
            out.extend(header(cfg).bytes());
            commands::census_rows(rows, "plot", &mut out)?;
        }
        _ => {
            out.extend(header(cfg).bytes());
            let mut w = csv::Writer::from_writer(&mut out);
            let io = |e: csv::Error| CliError::Failed(format!("writing csv: {e}"));
            w.write_record(&report.header).map_err(io)?;
            for row in &report.rows {
                w.write_record(row).map_err(io)?;
            }
            w.flush().map_err(|e| CliError::Failed(format!("writing csv: {e}")))?;
        }
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = build_config(cli)?;
    let report = match cfg.command.as_str() {
        "regime" => commands::regime(&cfg)?,
        "verdict" => commands::verdict_cmd(&cfg, cli.verbose)?,
        "classify" => commands::classify_cmd(&cfg, cli.verbose)?,
        "census" => commands::census_cmd(&cfg)?,
        "predict" => commands::predict_cmd(&cfg)?,
        _ => commands::check_cmd(&cfg)?,
    };
    let bytes = render(&cfg, &report)?;
    std::io::stdout()
        .write_all(&bytes)
        .map_err(|e| CliError::Failed(format!("writing output: {e}")))?;
    Ok(report.exit as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
