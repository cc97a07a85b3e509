use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use renewal_ldp_cli::{run, Command, ErrorReport, RunOptions};

/// Large deviations laboratory for renewal-type local times.
#[derive(Debug, Parser)]
#[command(name = "renewal-ldp", version)]
struct Args {
    command: Command,

    #[arg(long)]
    config: Option<PathBuf>,

    /// JSON report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// CSV table path (`simulate` and `ldp` only).
    #[arg(long)]
    csv: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, env = "RENEWAL_LDP_THREADS")]
    threads: Option<usize>,

    /// Config override `dotted.key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.threads {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let opts =
        RunOptions { config: args.config, out: args.out, csv: args.csv, seed: args.seed, overrides: args.overrides };
    match run(args.command, &opts) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            let report = ErrorReport::new(args.command.name(), &e);
            eprintln!("{}", serde_json::to_string(&report).expect("error reports serialize"));
            ExitCode::from(e.exit_code())
        }
    }
}
