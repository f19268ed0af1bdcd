//! `ptolemy`: evaluate, multiply and comb elements of T and T*, decide the
//! word problem, and run the analysis experiments. Reports go to stdout as
//! one JSON object per line with `--json`; timings go to stderr so that the
//! report bytes depend only on the configuration.

mod commands;
mod report;
mod words;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use report::{Budgets, Mode, Outcome, Report, RunConfig};
use words::parse_word;

/// Log verbosity, in `env_logger` filter syntax.
const LOG_ENV: &str = "PTOLEMY_LOG";

#[derive(Parser, Debug)]
#[command(name = "ptolemy", version, about = "Thompson's group T and its braided extension T* as moves on triangulations")]
struct Cli {
    /// Interpret words in T* instead of T.
    #[arg(long, global = true)]
    star: bool,
    /// Emit the report as one JSON line.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical state of a word.
    Eval { word: String },
    /// Product of two words.
    Mult { left: String, right: String },
    /// Inverse of a word, with a word for it.
    Inv { word: String },
    /// Whether a word is trivial.
    Wp {
        word: String,
        #[arg(long)]
        emit_trace: bool,
    },
    /// Combing of the element of a word.
    Comb {
        word: String,
        /// Remove back-and-forth flips.
        #[arg(long)]
        reduced: bool,
        #[arg(long)]
        emit_trace: bool,
    },
    /// Experiments on the Cayley graph and on polygons.
    #[command(subcommand)]
    Analyze(Analyze),
}

#[derive(Args, Debug, Clone)]
struct Sampling {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Largest sampled word length.
    #[arg(long, default_value_t = 8)]
    max_len: usize,
}

#[derive(Subcommand, Debug)]
enum Analyze {
    /// Corridor width between the reduced combings of two words, or of
    /// sampled elements and their neighbours when no words are given.
    Corridor {
        word_a: Option<String>,
        word_b: Option<String>,
        #[arg(long, default_value_t = 30)]
        kmax: usize,
        /// Radius of the balls used for exact distances.
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// Depth of the bidirectional distance search.
        #[arg(long, default_value_t = 6)]
        oracle_depth: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Diameter of the labeled move graph of the n-gon.
    PolygonDiameter { n: usize },
    /// Departure profiles of reduced and unreduced combings of samples.
    Departure {
        #[arg(long, default_value_t = 2)]
        rmax: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Diameter of the unlabeled flip graph of the n-gon.
    Flipdist { n: usize },
}

struct Run {
    command: String,
    config: RunConfig,
    input: Value,
}

fn budgets(radius: usize, oracle_depth: usize, kmax: usize, samples: usize) -> Budgets {
    Budgets { bfs_radius: radius, oracle_depth, kmax, sample_count: samples }
}

fn execute(cli: &Cli) -> Result<(Run, Outcome)> {
    let mode = if cli.star { Mode::Tstar } else { Mode::T };
    let plain = budgets(0, 0, 0, 0);
    let run = |command: &str, seed: u64, budgets: Budgets, input: Value| Run {
        command: command.to_string(),
        config: RunConfig { seed, budgets, mode },
        input,
    };
    Ok(match &cli.command {
        Command::Eval { word } => {
            let w = parse_word(word)?;
            (run("eval", 0, plain, json!({ "word": w.to_string() })), commands::eval(&w, cli.star)?)
        }
        Command::Mult { left, right } => {
            let (x, y) = (parse_word(left)?, parse_word(right)?);
            let input = json!({ "left": x.to_string(), "right": y.to_string() });
            (run("mult", 0, plain, input), commands::mult(&x, &y, cli.star)?)
        }
        Command::Inv { word } => {
            let w = parse_word(word)?;
            (run("inv", 0, plain, json!({ "word": w.to_string() })), commands::inv(&w, cli.star)?)
        }
        Command::Wp { word, emit_trace } => {
            let w = parse_word(word)?;
            let input = json!({ "word": w.to_string(), "emitTrace": emit_trace });
            (run("wp", 0, plain, input), commands::wp(&w, cli.star, *emit_trace)?)
        }
        Command::Comb { word, reduced, emit_trace } => {
            let w = parse_word(word)?;
            let input = json!({ "word": w.to_string(), "reduced": reduced, "emitTrace": emit_trace });
            (run("comb", 0, plain, input), commands::comb(&w, cli.star, *reduced, *emit_trace)?)
        }
        Command::Analyze(a) => {
            if cli.star {
                anyhow::bail!("analysis commands work in T only");
            }
            analyze(a, &run)?
        }
    })
}

fn analyze(a: &Analyze, run: &dyn Fn(&str, u64, Budgets, Value) -> Run) -> Result<(Run, Outcome)> {
    Ok(match a {
        Analyze::Corridor { word_a, word_b, kmax, radius, oracle_depth, sampling } => match (word_a, word_b) {
            (Some(x), Some(y)) => {
                let (x, y) = (parse_word(x)?, parse_word(y)?);
                let b = budgets(*radius, *oracle_depth, *kmax, 1);
                let out = commands::corridor_pair(&x, &y, &b)?;
                (run("analyze corridor", 0, b, json!({ "wordA": x.to_string(), "wordB": y.to_string() })), out)
            }
            (None, None) => {
                let b = budgets(*radius, *oracle_depth, *kmax, sampling.samples);
                let out = commands::corridor_sampled(sampling.seed, sampling.max_len, &b)?;
                (run("analyze corridor", sampling.seed, b, json!({ "maxLen": sampling.max_len })), out)
            }
            _ => anyhow::bail!("give both words or neither"),
        },
        Analyze::PolygonDiameter { n } => {
            (run("analyze polygon-diameter", 0, budgets(0, 0, 0, 0), json!({ "n": n })), commands::polygon_diameter(*n)?)
        }
        Analyze::Departure { rmax, sampling } => {
            let b = budgets(*rmax, 0, 0, sampling.samples);
            let out = commands::departure(sampling.seed, sampling.max_len, *rmax, &b)?;
            (run("analyze departure", sampling.seed, b, json!({ "maxLen": sampling.max_len })), out)
        }
        Analyze::Flipdist { n } => (run("analyze flipdist", 0, budgets(0, 0, 0, 0), json!({ "n": n })), commands::flipdist(*n)?),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let (run, outcome) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let elapsed = start.elapsed();
    let report = Report { command: run.command, config: run.config, input: run.input, output: outcome.output };
    if cli.json {
        println!("{}", report.to_json());
        eprintln!("{}", json!({ "configHash": report.config_hash(), "timings": { "elapsedMs": elapsed.as_secs_f64() * 1e3 } }));
    } else {
        for line in &outcome.summary {
            println!("{line}");
        }
        println!("config hash: {}", report.config_hash());
    }
    if outcome.inconclusive {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
