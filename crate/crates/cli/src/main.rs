use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::OnceLock;

use clap::{Args, Parser, Subcommand};
use oswr_core::experiment::checks::{run_checks, DEFAULT_SEED};
use oswr_core::experiment::config::KEYS;
use oswr_core::experiment::{
    parse_config, run_scenario, write_report, ConfigError, ExperimentConfig, Scenario,
};
use oswr_core::Error;

const CONFIG_EXIT: u8 = 1;
const RUNTIME_EXIT: u8 = 2;

fn keys_help() -> &'static str {
    static HELP: OnceLock<String> = OnceLock::new();
    HELP.get_or_init(|| {
        let mut s = String::from("Config keys (key=value, one per line, # comments, comma lists, a/b fractions):\n");
        for (key, default, meaning) in KEYS {
            s.push_str(&format!("  {key:<20} default {default}\n  {:<20} {meaning}\n", ""));
        }
        s.push_str("\nExit codes: 0 success, 1 config error, 2 runtime or divergence error.");
        s
    })
}

#[derive(Parser)]
#[command(name = "oswr", version, about = "Optimized Schwarz waveform relaxation experiments for the 1D heat equation")]
#[command(after_help = keys_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Config file with key=value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. --set ratios=10,100.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Directory for CSV files and plot scripts; nothing is written without it.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Iterations to tolerance for several diffusion ratios.
    RatioSweep(Common),
    /// Iterations for several time steps.
    DtSweep(Common),
    /// Iterations for several mesh sizes.
    DxSweep(Common),
    /// Convergence factor of the optimized parameters over the band.
    RhoCurves(Common),
    /// Scan of the Version III reduced equation.
    V3RootScan(Common),
    /// Three-layer, three-subdomain run.
    TpsThreeLayer(Common),
    /// Layered run with user-given layers and interfaces.
    Custom(Common),
    /// Analytic optimum against a brute-force min-max grid.
    Oracle(Common),
    /// Run the scenario named in a config file.
    Run {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Seeded randomized checks of the optimizers.
    Check {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument { .. } | Error::NotAMeshNode { .. } | Error::BandCollapsed { .. } => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn build_config(scenario: Option<Scenario>, common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match (&common.config, scenario) {
        (Some(path), hint) => parse_config(path, hint)?,
        (None, Some(sc)) => ExperimentConfig::defaults(sc),
        (None, None) => return Err(Failure::Config("a config file is required".into())),
    };
    for item in &common.set {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got `{item}`")))?;
        cfg.apply(key.trim(), value)?;
    }
    if let Some(dir) = &common.out_dir {
        cfg.out_dir = Some(dir.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(scenario: Option<Scenario>, common: &Common) -> Result<(), Failure> {
    let cfg = build_config(scenario, common)?;
    let report = run_scenario(&cfg)?;
    print!("{}", report.summary);
    match &cfg.out_dir {
        Some(dir) => {
            let written = write_report(&report, dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
            for path in written {
                println!("wrote {}", path.display());
            }
        }
        None => println!("no output directory given; nothing written"),
    }
    if report.failures > 0 {
        return Err(Failure::Runtime(format!("{} row(s) failed", report.failures)));
    }
    Ok(())
}

fn check(seed: u64) -> Result<(), Failure> {
    let r = run_checks(seed)?;
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    println!("seed {}", r.seed);
    println!("{} version II endpoint gap {:.3e}", verdict(r.v2_ok()), r.v2_max_gap);
    println!(
        "{} version III spread {:.3e}, product error {:.3e}",
        verdict(r.v3_ok()),
        r.v3_max_spread,
        r.v3_max_product_error
    );
    println!(
        "{} rho < 1: {} violations in {} x {} samples (max rho {:.6})",
        verdict(r.sufficient_ok()),
        r.sufficient.violations,
        r.sufficient.draws,
        r.sufficient.frequencies,
        r.sufficient.max_rho
    );
    if r.all_ok() {
        Ok(())
    } else {
        Err(Failure::Runtime("randomized checks failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { CONFIG_EXIT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::RatioSweep(c) => run(Some(Scenario::RatioSweep), c),
        Command::DtSweep(c) => run(Some(Scenario::DtSweep), c),
        Command::DxSweep(c) => run(Some(Scenario::DxSweep), c),
        Command::RhoCurves(c) => run(Some(Scenario::RhoCurves), c),
        Command::V3RootScan(c) => run(Some(Scenario::V3RootScan), c),
        Command::TpsThreeLayer(c) => run(Some(Scenario::TpsThreeLayer), c),
        Command::Custom(c) => run(Some(Scenario::Custom), c),
        Command::Oracle(c) => run(Some(Scenario::Oracle), c),
        Command::Run { config, set, out_dir } => {
            let common = Common {
                config: Some(config.clone()),
                set: set.clone(),
                out_dir: out_dir.clone(),
            };
            run(None, &common)
        }
        Command::Check { seed } => check(*seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(CONFIG_EXIT)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(RUNTIME_EXIT)
        }
    }
}
