use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gyrolim::config::keys_help;
use gyrolim::{execute, output_root, parse_config, Kind};

#[derive(Debug, Parser)]
#[command(name = "gyrolim", version, about = "Mean-field and gyrokinetic limit experiments", after_help = keys_help())]
struct Args {
    /// euler | nbody | sweep | quantize-check | coercivity
    kind: Kind,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    /// Output root; a run writes into `<root>/<kind>`.
    #[arg(long, env = "GYROLIM_OUT")]
    out: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match parse_config(&args.config).and_then(|c| c.resolve(args.kind, args.seed)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let root = output_root(args.out, &cfg);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| execute(&cfg, &root)) {
        Ok(summary) => {
            for n in &summary.report.notes {
                println!("note: {n}");
            }
            println!("wrote {}", summary.dir.display());
            if summary.passed() {
                println!("status: passed");
                ExitCode::SUCCESS
            } else {
                for f in &summary.report.failures {
                    eprintln!("FAIL {}: {}", f.id, f.detail);
                }
                eprintln!("status: failed ({} failures, see failures.json)", summary.report.failures.len());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
