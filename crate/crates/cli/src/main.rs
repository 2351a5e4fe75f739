//! Thin binary wrapper: flags (or a JSON job file) build a `JobSpec`,
//! the library runs it, the report prints as JSON.
//! Exit codes: 0 success, 2 parse error, 3 precondition violation,
//! 4 resource limit.

use clap::{Args, Parser, Subcommand};
use fgreg_cli::{exit_code, run, Command, JobSpec, MeasureKind, WalkKind};

#[derive(Parser)]
#[command(name = "fgreg", version, about = "Exact computations with regular subsets of free groups")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Rank of the free group (2..=26)
    #[arg(short = 'm', long, default_value_t = 2)]
    rank: usize,
    /// Abort when an intermediate structure exceeds this many states
    #[arg(long)]
    limit: Option<usize>,
    /// Emit JSON (always on; accepted for compatibility)
    #[arg(long, default_value_t = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the subgroup graph of the given generators
    Stallings {
        #[command(flatten)]
        common: Common,
        /// Generator words (lowercase letters, uppercase inverses, 1 = identity)
        generators: Vec<String>,
        /// Also write the graph in DOT format to this file
        #[arg(long)]
        dot: Option<String>,
    },
    /// Enumerate Schreier transversal representatives with flags
    Transversal {
        #[command(flatten)]
        common: Common,
        generators: Vec<String>,
        /// Pick the i-th spanning tree instead of the geodesic one
        #[arg(long)]
        tree_index: Option<usize>,
        /// Maximum representative length
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// Classify a set expression as thick or exponentially negligible
    Classify {
        #[command(flatten)]
        common: Common,
        /// Set expression, e.g. subgroup:abA or diff(transversal:abA, word:1)
        set: String,
        /// Classify relative to this ambient prefix-closed expression
        #[arg(long)]
        relative: Option<String>,
    },
    /// Counting and measure computations on a set expression
    Measure {
        #[command(flatten)]
        common: Common,
        /// One of: fk, mu, mu01, lambda
        which: String,
        set: String,
        /// Relative ambient expression (fk ratios, lambda_L)
        #[arg(long)]
        relative: Option<String>,
        /// Length range A..B
        #[arg(long, default_value = "1..10")]
        k: String,
        /// Comma-separated stopping probabilities, e.g. 0.5,1/3
        #[arg(long, default_value = "")]
        s: String,
    },
    /// Random-walk samplers with histogram and goodness-of-fit output
    Sample {
        #[command(flatten)]
        common: Common,
        /// ws (stopping walk) or w0 (non-stop, truncated)
        walk: String,
        /// Stopping probability for ws
        #[arg(long)]
        s: Option<String>,
        #[arg(short = 'n', long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Truncation length for w0
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Run a JSON job file with the same semantics as the flags
    Job { file: String },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 1..10, got '{s}'"))?;
    let from = a.parse().map_err(|_| format!("bad range start '{a}'"))?;
    let to = b.parse().map_err(|_| format!("bad range end '{b}'"))?;
    if from > to {
        return Err(format!("empty range {from}..{to}"));
    }
    Ok((from, to))
}

fn build_job(cmd: Cmd) -> Result<(JobSpec, Option<String>), String> {
    let job = match cmd {
        Cmd::Stallings {
            common,
            generators,
            dot,
        } => (
            JobSpec {
                rank: common.rank,
                command: Command::Stallings {
                    generators,
                    dot: dot.clone(),
                },
                limit: common.limit,
            },
            dot,
        ),
        Cmd::Transversal {
            common,
            generators,
            tree_index,
            max_len,
        } => (
            JobSpec {
                rank: common.rank,
                command: Command::Transversal {
                    generators,
                    tree_index,
                    max_len,
                },
                limit: common.limit,
            },
            None,
        ),
        Cmd::Classify {
            common,
            set,
            relative,
        } => (
            JobSpec {
                rank: common.rank,
                command: Command::Classify {
                    set,
                    relative_to: relative,
                },
                limit: common.limit,
            },
            None,
        ),
        Cmd::Measure {
            common,
            which,
            set,
            relative,
            k,
            s,
        } => {
            let which = match which.as_str() {
                "fk" => MeasureKind::Fk,
                "mu" => MeasureKind::Mu,
                "mu01" => MeasureKind::Mu01,
                "lambda" => MeasureKind::Lambda,
                other => return Err(format!("unknown measure '{other}'")),
            };
            let (k_from, k_to) = parse_range(&k)?;
            let s = if s.is_empty() {
                Vec::new()
            } else {
                s.split(',').map(|x| x.trim().to_string()).collect()
            };
            (
                JobSpec {
                    rank: common.rank,
                    command: Command::Measure {
                        which,
                        set,
                        relative_to: relative,
                        k_from,
                        k_to,
                        s,
                    },
                    limit: common.limit,
                },
                None,
            )
        }
        Cmd::Sample {
            common,
            walk,
            s,
            samples,
            seed,
            max_len,
        } => {
            let walk = match walk.as_str() {
                "ws" => WalkKind::Ws,
                "w0" => WalkKind::W0,
                other => return Err(format!("unknown walk '{other}'")),
            };
            (
                JobSpec {
                    rank: common.rank,
                    command: Command::Sample {
                        walk,
                        s,
                        samples,
                        seed,
                        max_len,
                    },
                    limit: common.limit,
                },
                None,
            )
        }
        Cmd::Job { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| format!("cannot read {file}: {e}"))?;
            let job: JobSpec =
                serde_json::from_str(&text).map_err(|e| format!("bad job file: {e}"))?;
            (job, None)
        }
    };
    Ok(job)
}

fn main() {
    let cli = Cli::parse();
    let (job, dot_path) = match build_job(cli.command) {
        Ok(j) => j,
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    };
    match run(&job) {
        Ok(report) => {
            if let Some(path) = dot_path {
                if let Some(dot) = report["report"]["dot"].as_str() {
                    if let Err(e) = std::fs::write(&path, dot) {
                        eprintln!("error: cannot write {path}: {e}");
                        std::process::exit(4);
                    }
                }
            }
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
