//! Command-line driver: scenario runs, configuration summaries, and the
//! property-verification suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use torus_ns::galerkin::{integrate, stability_dt_bound, GalerkinError};
use torus_ns::io::{config_hash, write_run};
use torus_ns::scenarios::{build_problem, RunConfig, ScenarioError};
use torus_ns::spectral::sobolev_norm;
use torus_ns::verify::run_suite;
use torus_ns::viscosity::ViscosityError;

#[derive(Parser)]
#[command(
    name = "torus-ns",
    version,
    about = "Spectral Galerkin solver for anisotropic incompressible Navier-Stokes on the flat torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write diagnostics, manifest and checkpoints.
    Run(RunArgs),
    /// Print the run's certificates and bounds without integrating.
    Describe(DescribeArgs),
    /// Run a property-verification suite; emits machine-readable JSON.
    Verify {
        /// projectors | korn | coercivity | trilinear | basis | isomorphisms | energy
        suite: String,
    },
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// TOML config file; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "K")]
    cutoff: Option<usize>,
    /// Number of Galerkin modes (default: full basis).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// rk4 | imex
    #[arg(long)]
    stepper: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    /// Tensor preset, e.g. "isotropic(0,1)" or "table:coeffs.json".
    #[arg(long)]
    tensor: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    diagnostics_every: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct DescribeArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the basis entries {eta, beta, parity, polarization, lambda}
    /// as JSON to this path.
    #[arg(long)]
    dump_basis: Option<PathBuf>,
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig, String> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("config {}: {e}", path.display()))?;
            toml::from_str::<RunConfig>(&text)
                .map_err(|e| format!("config {}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = &args.scenario {
        config.scenario = v.clone();
    }
    if let Some(v) = args.n {
        config.n = v;
    }
    if let Some(v) = args.cutoff {
        config.cutoff = v;
    }
    if let Some(v) = args.m {
        config.m = Some(v);
    }
    if let Some(v) = args.t_end {
        config.t_end = v;
    }
    if let Some(v) = args.dt {
        config.dt = Some(v);
    }
    if let Some(v) = &args.stepper {
        config.stepper = match v.as_str() {
            "rk4" => torus_ns::galerkin::Stepper::Rk4,
            "imex" => torus_ns::galerkin::Stepper::Imex,
            other => return Err(format!("unknown stepper {other:?} (rk4 | imex)")),
        };
    }
    if let Some(v) = args.nu {
        config.nu = v;
    }
    if let Some(v) = &args.tensor {
        config.tensor = Some(v.clone());
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.diagnostics_every {
        config.diagnostics_every = v;
    }
    Ok(config)
}

fn describe(config: &RunConfig, dump_basis: Option<&PathBuf>) -> Result<(), ScenarioError> {
    let problem = build_problem(config)?;
    if let Some(path) = dump_basis {
        let dump = problem.basis.dump_json();
        std::fs::write(
            path,
            serde_json::to_string_pretty(&dump).expect("basis serializes"),
        )
        .map_err(|e| ScenarioError::BadConfig(format!("{}: {e}", path.display())))?;
        println!("basis dump          {}", path.display());
    }
    let cert = &problem.certificate;
    let u0_sq = sobolev_norm(&problem.initial, 0.0).powi(2);
    let dt0 = match problem.step {
        torus_ns::galerkin::StepControl::Fixed(dt) => dt,
        torus_ns::galerkin::StepControl::Adaptive { dt_init, .. } => dt_init,
    };
    let f_sq = problem.forcing.h_neg1_sq_integral(problem.t_end, dt0);
    let b1 = u0_sq + 4.0 * cert.c_a * f_sq;
    let b2 = 4.0 * cert.c_a * b1;
    let bound = stability_dt_bound(cert, problem.lattice.cutoff());
    println!("scenario            {}", config.scenario);
    println!("dimension n         {}", config.n);
    println!("cutoff K            {}", config.cutoff);
    println!("lattice modes       {}", problem.lattice.mode_count());
    println!("basis size          {}", problem.basis.len());
    println!("galerkin modes m    {}", problem.mode_count);
    println!("tensor              {:?}", problem.tensor);
    println!("certificate C_A     {}", cert.c_a);
    println!("certificate ||A||   {}", cert.tensor_norm);
    println!("certificate samples {}", cert.samples);
    println!("quadrature exact    {}", cert.quadrature_exact);
    println!("||u0||^2            {u0_sq}");
    println!("||f||^2_L2(H^-1)    {f_sq}");
    println!("bound B1            {b1}");
    println!("bound B2            {b2}");
    println!("stability dt bound  {bound}");
    println!("dt                  {dt0}");
    if dt0 > bound {
        eprintln!("warning: dt exceeds the conservative stability bound {bound:.3e}");
    }
    Ok(())
}

fn exit_for_scenario_error(e: &ScenarioError) -> ExitCode {
    match e {
        ScenarioError::Viscosity(ViscosityError::NotElliptic { .. }) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let config = match load_config(&args.config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let problem = match build_problem(&config) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_for_scenario_error(&e);
                }
            };
            match integrate(&problem) {
                Ok(run) => {
                    match write_run(
                        &args.out_dir,
                        &config,
                        &problem,
                        &run,
                        config.checkpoint_every,
                    ) {
                        Ok(manifest) => {
                            println!("config hash {}", config_hash(&config));
                            println!(
                                "completed {} samples to t = {}",
                                run.samples.len(),
                                run.ledger.times.last().unwrap()
                            );
                            println!("wrote {}", manifest.display());
                            ExitCode::SUCCESS
                        }
                        Err(e) => {
                            eprintln!("error: {e}");
                            ExitCode::from(2)
                        }
                    }
                }
                Err(e @ GalerkinError::BlowUp { .. }) => {
                    eprintln!("error: {e}");
                    ExitCode::from(4)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Describe(args) => {
            let config = match load_config(&args.config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match describe(&config, args.dump_basis.as_ref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_for_scenario_error(&e)
                }
            }
        }
        Command::Verify { suite } => match run_suite(&suite) {
            Ok(report) => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
                if report.passed {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
