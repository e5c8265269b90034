use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::{Config, Format, Quantity};

/// Tunneling delays of a two-state clock crossing a 1D barrier.
#[derive(Parser, Debug)]
#[command(name = "tunclock", version, about)]
struct Cli {
    /// TOML run configuration; built-in defaults otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; scans go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Species preset, overriding the config.
    #[arg(long, global = true)]
    preset: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a quantity on the (eBar, vBar) grid.
    Scan {
        #[arg(long, value_enum)]
        quantity: Option<Quantity>,
    },
    /// Delay, transmission and expansion coefficients at one point.
    WorkingPoint {
        #[arg(long)]
        e_bar: Option<f64>,
        #[arg(long)]
        v_bar: Option<f64>,
        #[arg(long)]
        delta_p_rel: Option<f64>,
    },
    /// Phase budget of both arms, differential phase and run counts.
    Budget {
        #[arg(long)]
        e_bar: Option<f64>,
        #[arg(long)]
        v_bar: Option<f64>,
    },
    /// Run the invariant suite.
    Validate,
}

fn load(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(p) = &cli.preset {
        cfg.species.preset = p.clone();
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let mut cfg = load(&cli)?;
    let out = cli.out.clone().or_else(|| cfg.output.path.clone().map(PathBuf::from));
    let format = cfg.output.format;
    match cli.command {
        Command::Scan { quantity } => {
            let start = Instant::now();
            let table = commands::scan(&cfg, quantity)?;
            table.write(output::sink(out.as_deref())?, format)?;
            eprintln!("{} rows in {:.2} s", table.rows.len(), start.elapsed().as_secs_f64());
        }
        Command::WorkingPoint { e_bar, v_bar, delta_p_rel } => {
            cfg.budget.e_bar = e_bar.unwrap_or(cfg.budget.e_bar);
            cfg.budget.v_bar = v_bar.unwrap_or(cfg.budget.v_bar);
            cfg.packet.delta_p_rel = delta_p_rel.unwrap_or(cfg.packet.delta_p_rel);
            let r = commands::working_point(&cfg)?;
            let pairs = commands::working_point_pairs(&r);
            commands::print_pairs(&format!("working point ({})", r.species), &pairs);
            commands::emit(out.as_deref(), format, &commands::pairs_table(&pairs)?, &r)?;
        }
        Command::Budget { e_bar, v_bar } => {
            cfg.budget.e_bar = e_bar.unwrap_or(cfg.budget.e_bar);
            cfg.budget.v_bar = v_bar.unwrap_or(cfg.budget.v_bar);
            let r = commands::budget(&cfg)?;
            let pairs = commands::budget_pairs(&r);
            commands::print_pairs(&format!("phase budget ({})", r.working_point.species), &pairs);
            commands::emit(out.as_deref(), format, &commands::pairs_table(&pairs)?, &r)?;
        }
        Command::Validate => {
            let report = commands::validate(&cfg.species.preset)?;
            for c in &report.checks {
                println!(
                    "{:<4} {:<40} worst {:.3e} tol {:.1e} ({:.2} s)",
                    if c.passed { "ok" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.tolerance,
                    c.seconds
                );
            }
            if let Some(path) = out.as_deref() {
                let w = output::sink(Some(path))?;
                match format {
                    Format::Json => output::write_json(w, &report)?,
                    Format::Csv => {
                        let mut csv = csv::Writer::from_writer(w);
                        for c in &report.checks {
                            csv.serialize(c)?;
                        }
                        csv.flush()?;
                    }
                }
            }
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
