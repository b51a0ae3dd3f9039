use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use opreg::bench::conc::write_concentration_outputs;
use opreg::bench::config::StudyKind;
use opreg::bench::props::write_property_outputs;
use opreg::bench::rate::write_rate_outputs;
use opreg::bench::{run_concentration_study, run_demo, run_property_suite, run_rate_study, DemoKind, StudyConfig};

#[derive(Parser)]
#[command(name = "opreg", version, about = "Spectral-regularised operator learning studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Study config (TOML, or JSON with a .json extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Convergence-rate study.
    Rate,
    /// Covariance concentration coverage study.
    Conc,
    /// Property suite over all modules.
    Props,
    /// Hilbertian autoregression demo.
    DemoArh,
    /// Kernel regression demo.
    DemoCme,
}

impl Command {
    fn kind(self) -> StudyKind {
        match self {
            Command::Rate => StudyKind::Rate,
            Command::Conc => StudyKind::Concentration,
            Command::Props => StudyKind::Properties,
            Command::DemoArh => StudyKind::DemoArh,
            Command::DemoCme => StudyKind::DemoCme,
        }
    }
}

enum Failure {
    Input(String),
    Check(String),
}

fn run(cli: Cli) -> Result<(), Failure> {
    let input = |e: opreg::Error| Failure::Input(e.to_string());
    let mut cfg = match &cli.config {
        Some(p) => StudyConfig::from_path(p).map_err(input)?,
        None => StudyConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(kind) = cfg.study {
        if kind != cli.command.kind() {
            return Err(Failure::Input(format!("config is for study {kind:?}, not {:?}", cli.command.kind())));
        }
    }
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let written = match cli.command {
        Command::Rate => {
            let report = run_rate_study(&cfg, cli.threads).map_err(input)?;
            let paths = write_rate_outputs(&report, &out, cfg.plots).map_err(input)?;
            for (label, s) in [("s=0", &report.slope_s0), ("s=1/2", &report.slope_s05)] {
                println!(
                    "{label}: slope {:.4} (95% CI [{:.4}, {:.4}]), theoretical {:.4}",
                    s.fit.slope, s.fit.ci_low, s.fit.ci_high, s.theoretical
                );
            }
            if report.degenerate {
                println!("errors at numerical floor: slope fit degenerate");
            }
            println!("note: {}", report.note);
            if !report.passed() {
                return Err(Failure::Check(format!(
                    "primary slope {:.4} outside ±{} of {:.4}",
                    report.primary().fit.slope,
                    report.tolerance,
                    report.primary().theoretical
                )));
            }
            paths
        }
        Command::Conc => {
            let report = run_concentration_study(&cfg, cli.threads).map_err(input)?;
            let paths = write_concentration_outputs(&report, &out, cfg.plots).map_err(input)?;
            println!(
                "coverage {:.4} over {} trials (bound {:.4e}, psi2 {:.4})",
                report.coverage,
                report.trials.len(),
                report.bound,
                report.psi2_x
            );
            if !report.passed() {
                return Err(Failure::Check(format!("coverage {} below 1 - delta", report.coverage)));
            }
            paths
        }
        Command::Props => {
            let report = run_property_suite(&cfg.props, cfg.seed, &cfg.hash());
            let paths = write_property_outputs(&report, &out).map_err(input)?;
            for r in &report.results {
                println!("{:<34} {:?}  seed={}  {}", r.name, r.status, r.seed, r.detail);
            }
            if !report.passed() {
                return Err(Failure::Check("property suite has failures".into()));
            }
            paths
        }
        Command::DemoArh => run_demo(DemoKind::Arh, &cfg, &out).map_err(input)?,
        Command::DemoCme => run_demo(DemoKind::Cme, &cfg, &out).map_err(input)?,
    };
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
