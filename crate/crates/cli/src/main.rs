use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stergm_core::scenario::{
    reproduce_paper, run_scenario, validate_csv, write_atomic, write_curve_csv, Column, DurationModelConfig,
    ReproduceOptions, ScenarioConfig, CURVE_CSV_HEADER, EQUILIBRIUM_TABLE_FILE, HAZARD_CURVES_FILE,
};
use stergm_core::Error;

const DEFAULT_PAPER_DIR: &str = "paper-output";

#[derive(Parser)]
#[command(
    name = "stergm",
    version,
    about = "Discrete-time STERGM simulation and tie-duration analytics"
)]
struct Cli {
    /// Random seed; overrides the seed in a scenario config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (for `pmf` and `hazard`, the CSV goes here instead of stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for replicates; defaults to the number of CPUs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write spells, hazard, stats and manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the four monogamy-bias configurations and write hazard curves and the equilibrium table.
    ReproducePaper {
        #[arg(long, default_value_t = 4)]
        replicates: usize,
    },
    /// Emit the `x,f,F,h` curve of a duration model (hazard view).
    Hazard(CurveArgs),
    /// Emit the `x,f,F,h` curve of a duration model (pmf view).
    Pmf(CurveArgs),
    /// Parse and check a scenario config without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct CurveArgs {
    /// Model file (JSON).
    #[arg(long, conflicts_with = "model_json", required_unless_present = "model_json")]
    model: Option<PathBuf>,
    /// Model given inline as JSON.
    #[arg(long)]
    model_json: Option<String>,
    /// Largest duration to tabulate.
    #[arg(long, default_value_t = 50)]
    x_max: u64,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = read_input(path)?;
    ScenarioConfig::from_json(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn simulate(cli: &Cli, config_path: &Path) -> Result<(), Failure> {
    let mut config = load_config(config_path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| config.outputs.clone())
        .ok_or_else(|| Failure::Config("no output directory: pass --out or set `outputs`".into()))?;
    let (result, written) = run_scenario(&config, &out)?;
    println!("wrote {} ({} replicates)", out.display(), result.replicates.len());
    println!(
        "density {:.4}, degree-1 proportion {:.3}, {} eligible spells",
        result.equilibrium.density_mean, result.equilibrium.prop_degree1_mean, result.hazard.n_spells
    );
    println!("manifest sha256 {}", written.manifest_sha256);
    Ok(())
}

fn reproduce(cli: &Cli, replicates: usize) -> Result<(), Failure> {
    if replicates < 1 {
        return Err(Failure::Config("--replicates must be at least 1".into()));
    }
    let opts = ReproduceOptions {
        seed: cli.seed.unwrap_or(0),
        replicates,
        ..Default::default()
    };
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_PAPER_DIR));
    let report = reproduce_paper(&out, &opts)?;
    println!("configuration,density,prop_degree1");
    for (name, result) in &report.results {
        println!(
            "{name},{:.4},{:.3}",
            result.equilibrium.density_mean, result.equilibrium.prop_degree1_mean
        );
    }
    println!(
        "wrote {} and {} under {}",
        HAZARD_CURVES_FILE,
        EQUILIBRIUM_TABLE_FILE,
        out.display()
    );
    println!("manifest sha256 {}", report.manifest_sha256);
    Ok(())
}

fn curve(cli: &Cli, args: &CurveArgs, file_name: &str) -> Result<(), Failure> {
    let text = match (&args.model, &args.model_json) {
        (Some(path), _) => read_input(path)?,
        (None, Some(json)) => json.clone(),
        (None, None) => return Err(Failure::Config("pass --model or --model-json".into())),
    };
    if args.x_max < 1 {
        return Err(Failure::Config("--x-max must be at least 1".into()));
    }
    let model = DurationModelConfig::from_json(&text)?.build()?;
    let points = model.curve(args.x_max)?;
    let mut csv = Vec::new();
    write_curve_csv(&mut csv, &points).map_err(|e| Failure::Runtime(e.to_string()))?;
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
            let path = write_atomic(dir, file_name, &csv)?;
            validate_csv(
                &path,
                CURVE_CSV_HEADER,
                &[Column::Int, Column::Float, Column::Float, Column::Float],
            )?;
            println!("wrote {}", path.display());
        }
        None => io::stdout()
            .write_all(&csv)
            .map_err(|e| Failure::Runtime(e.to_string()))?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads < 1 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    match &cli.command {
        Command::Simulate { config } => simulate(cli, config),
        Command::ReproducePaper { replicates } => reproduce(cli, *replicates),
        Command::Hazard(args) => curve(cli, args, "hazard_curve.csv"),
        Command::Pmf(args) => curve(cli, args, "pmf_curve.csv"),
        Command::ValidateConfig { config } => {
            let config = load_config(config)?;
            println!(
                "ok: n={}, steps={}, burn_in={}, replicates={}",
                config.n, config.steps, config.burn_in, config.replicates
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
