use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use thzcov::io::{self, RunArtifacts};
use thzcov::{MapMode, SeSummary};

/// Sub-THz urban-microcell coverage and spectral-efficiency simulator.
#[derive(Debug, Parser)]
#[command(name = "thzcov", version)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo run, downlink and uplink.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "THZCOV_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Deterministic downlink SNR/SINR grid with mean NLOS-best path loss.
    Map {
        #[arg(long)]
        config: PathBuf,
        /// Grid spacing in meters.
        #[arg(long)]
        grid: f64,
        #[arg(long, value_parser = parse_mode)]
        mode: MapMode,
        #[arg(long, env = "THZCOV_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Recompute summaries from a run directory and check them.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<MapMode, String> {
    s.parse().map_err(|e: thzcov::Error| e.to_string())
}

fn print_summary(s: &SeSummary) {
    println!(
        "{} {}: mean {:.3} / median {:.3} / edge {:.3} bps/Hz, uncovered {:.1}%, outage {:.1}%, mean rate {:.1} Mbps",
        s.scenario,
        s.direction,
        s.mean_se_bps_hz,
        s.median_se_bps_hz,
        s.edge_se_bps_hz,
        100.0 * s.uncovered_fraction,
        100.0 * s.outage_fraction,
        s.mean_rate_bps / 1e6,
    );
}

fn print_artifacts(a: &RunArtifacts) {
    let paths = std::iter::once(&a.config_echo)
        .chain(a.ue_results.iter())
        .chain(a.summary.iter())
        .chain(a.maps.iter());
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, out } => {
            let mut cfg = io::load_config(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let (run, artifacts) = io::run_command(&cfg, &out)?;
            run.summaries.iter().for_each(print_summary);
            print_artifacts(&artifacts);
        }
        Command::Map {
            config,
            grid,
            mode,
            out,
        } => {
            let cfg = io::load_config(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            let (map, artifacts) = io::map_command(&cfg, grid, mode, &out)?;
            let covered = map.values_db.iter().filter(|v| **v > 0.0).count();
            println!(
                "{} x {} grid, {:.1}% of points above 0 dB",
                map.xs.len(),
                map.ys.len(),
                100.0 * covered as f64 / map.values_db.len() as f64
            );
            print_artifacts(&artifacts);
        }
        Command::Report { input } => {
            let summaries = io::report_command(&input)
                .with_context(|| format!("checking {}", input.display()))?;
            summaries.iter().for_each(print_summary);
            println!("summary matches {}", input.join(io::SUMMARY_FILE).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
