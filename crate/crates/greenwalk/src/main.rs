//! Batch CLI: `greenwalk --config run.json --out reports/`.

use clap::Parser;
use greenwalk::cli::{parse_config, run, validate, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "greenwalk",
    version,
    about = "Random-walk hyperbolicity diagnostics on Cayley graphs"
)]
struct Args {
    /// Path to the JSON run config.
    #[arg(long)]
    config: PathBuf,

    /// Output directory for report files.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (defaults to the number of cores). Outputs are
    /// identical at every thread count.
    #[arg(long)]
    threads: Option<usize>,

    /// Validate the config and print diagnostics without computing.
    #[arg(long)]
    validate_only: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(t) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("greenwalk: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("greenwalk: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("greenwalk: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    let out_dir = config
        .output_dir
        .clone()
        .map(PathBuf::from)
        .unwrap_or_else(|| args.out.clone());

    if args.validate_only {
        let diags = validate(&config);
        println!(
            "{}",
            serde_json::to_string_pretty(&diags).expect("diagnostics serialize")
        );
        return if diags.iter().any(|d| d.severity == "error") {
            ExitCode::from(2)
        } else {
            ExitCode::SUCCESS
        };
    }

    match run(&config, &out_dir) {
        Ok(output) => {
            for f in &output.files {
                eprintln!("greenwalk: wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("greenwalk: {e}");
            let code = e.exit_code() as u8;
            if matches!(e, CliError::Budget(_)) {
                eprintln!("greenwalk: partial outputs (if any) are marked incomplete");
            }
            ExitCode::from(code)
        }
    }
}
