use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ktforge_cli::config::Format;
use ktforge_cli::{exit, parse_config_with, run, validate, Pipeline};

#[derive(Debug, Parser)]
#[command(name = "ktforge", version, about = "Koszul-Tate resolutions in truncation windows")]
struct Args {
    /// koszul, noether, kt, resolve, factorize-demo or homology
    pipeline: Pipeline,
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// override jet_cap
    #[arg(long)]
    jet_cap: Option<u32>,
    /// override poly_deg_cap
    #[arg(long)]
    deg_cap: Option<u32>,
    /// override hdeg_max
    #[arg(long)]
    hdeg_max: Option<u32>,
    /// override max_stages
    #[arg(long)]
    max_stages: Option<u32>,
    /// human or machine
    #[arg(long)]
    format: Option<Format>,
    /// write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    ExitCode::from(drive(args) as u8)
}

fn drive(args: Args) -> i32 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return exit::CONFIG;
        }
    };
    let mut cfg = match parse_config_with(&text, Some(args.pipeline)) {
        Ok(c) => c,
        Err(e) => {
            for d in &e.diagnostics {
                eprintln!("{}: {d}", args.config.display());
            }
            return exit::CONFIG;
        }
    };
    if let Some(v) = args.jet_cap {
        cfg.jet_cap = v;
    }
    if let Some(v) = args.deg_cap {
        cfg.poly_deg_cap = v;
    }
    if let Some(v) = args.hdeg_max {
        cfg.hdeg_max = v;
    }
    if let Some(v) = args.max_stages {
        cfg.max_stages = v;
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    if let Some(p) = args.out {
        cfg.output.path = Some(p);
    }
    if let Err(e) = validate(&cfg) {
        for d in &e.diagnostics {
            eprintln!("{d}");
        }
        return exit::CONFIG;
    }
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match &cfg.output.path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &report.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return exit::INTERNAL;
            }
        }
        None => print!("{}", report.text),
    }
    report.exit_code()
}
