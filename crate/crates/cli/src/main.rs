//! `epqn` - batch driver for the Euler-Poisson IMEX solver.

use clap::{Args, Parser, Subcommand};
use epqn_cli::commands::{self, cmd_ap_study, cmd_convergence, cmd_run};
use epqn_cli::config::Settings;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "epqn",
    about = "Finite-volume Euler-Poisson solver with penalized IMEX-RK time integration",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write field and metrics CSV files.
    Run(CommonArgs),
    /// Mesh-refinement study against the quasi-neutral limit reference.
    Convergence(SweepArgs),
    /// Asymptotic scaling study across tableaux and Debye lengths.
    ApStudy(ApArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Manifest file with key = value lines and optional [sections].
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scenario: case1 | case2 | maxwellian | aoc | qn2d | general.
    #[arg(long)]
    scenario: Option<String>,
    /// Scheme: penalized | first-order | classical | limit.
    #[arg(long)]
    scheme: Option<String>,
    /// Builtin tableau name or path to a tableau file.
    #[arg(long)]
    tableau: Option<String>,
    /// Cells per direction, e.g. 100 or 64x64.
    #[arg(long)]
    n: Option<String>,
    /// Scaled Debye length.
    #[arg(long)]
    lambda: Option<f64>,
    /// Isentropic exponent.
    #[arg(long)]
    gamma: Option<f64>,
    /// CFL number.
    #[arg(long)]
    cfl: Option<f64>,
    /// Final time.
    #[arg(long, value_name = "T")]
    t_final: Option<f64>,
    /// Fixed step override (disables the CFL rule).
    #[arg(long)]
    dt: Option<f64>,
    /// Step cap used by the CFL rule (and by a fluid at rest).
    #[arg(long)]
    dt_max: Option<f64>,
    /// Potential boundary closure: periodic | dirichlet0.
    #[arg(long)]
    bc_phi: Option<String>,
    /// Record metrics every this many steps.
    #[arg(long)]
    record_every: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Doubling resolution sequence, e.g. 320,640,1280,2560.
    #[arg(long)]
    n_list: Option<String>,
    /// Debye lengths, e.g. 1e-4,1e-5,1e-6.
    #[arg(long)]
    lambda_list: Option<String>,
}

#[derive(Args)]
struct ApArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Debye lengths, e.g. 1e-3,1e-4.
    #[arg(long)]
    lambda_list: Option<String>,
    /// Tableaux to probe, e.g. DP1A242,DP2A242,ARS222.
    #[arg(long)]
    tableau_list: Option<String>,
    /// Use well-prepared initial data instead of the ill-prepared datasets.
    #[arg(long)]
    well_prepared: bool,
}

fn apply_common(
    settings: &mut Settings,
    args: &CommonArgs,
    section: &str,
) -> Result<(), epqn_core::Error> {
    if let Some(path) = &args.config {
        settings.apply_file(path, section)?;
    }
    let mut set = |key: &str, v: Option<String>| -> Result<(), epqn_core::Error> {
        if let Some(v) = v {
            settings.set(key, &v)?;
        }
        Ok(())
    };
    set("scenario", args.scenario.clone())?;
    set("scheme", args.scheme.clone())?;
    set("tableau", args.tableau.clone())?;
    set("n", args.n.clone())?;
    set("lambda", args.lambda.map(|x| x.to_string()))?;
    set("gamma", args.gamma.map(|x| x.to_string()))?;
    set("cfl", args.cfl.map(|x| x.to_string()))?;
    set("t_final", args.t_final.map(|x| x.to_string()))?;
    set("dt", args.dt.map(|x| x.to_string()))?;
    set("dt_max", args.dt_max.map(|x| x.to_string()))?;
    set("bc_phi", args.bc_phi.clone())?;
    set("record_every", args.record_every.map(|x| x.to_string()))?;
    if let Some(out) = &args.out {
        settings.out = out.clone();
    }
    Ok(())
}

fn dispatch() -> Result<i32, epqn_core::Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let mut settings = Settings::default();
            apply_common(&mut settings, &args, "run")?;
            cmd_run(&settings)
        }
        Command::Convergence(args) => {
            let mut settings = Settings::default();
            settings.scenario = "aoc".into();
            apply_common(&mut settings, &args.common, "convergence")?;
            if let Some(v) = &args.n_list {
                settings.set("n_list", v)?;
            }
            if let Some(v) = &args.lambda_list {
                settings.set("lambda_list", v)?;
            }
            cmd_convergence(&settings)
        }
        Command::ApStudy(args) => {
            let mut settings = Settings::default();
            apply_common(&mut settings, &args.common, "ap-study")?;
            if let Some(v) = &args.lambda_list {
                settings.set("lambda_list", v)?;
            }
            if let Some(v) = &args.tableau_list {
                settings.set("tableau_list", v)?;
            }
            if args.well_prepared {
                settings.well_prepared = true;
            }
            cmd_ap_study(&settings)
        }
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code_for(&e) as u8)
        }
    }
}
