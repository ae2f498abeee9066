//! `mirror`: command-line front end to `mirror-core`.

mod commands;
mod domain;
mod pipeline;
mod run;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Code, Fail};

#[derive(Parser, Debug)]
#[command(name = "mirror", version, about = "Mirror couplings and Neumann eigenfunctions on convex planar domains")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Base seed of every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Print the machine-readable summary to stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct DomainArg {
    /// Domain JSON file or preset (example1, example2, disk, rect-1x2, square).
    #[arg(long, default_value = "example1")]
    domain: String,
    /// Overrides the angle stored with the domain.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Checks that a domain description is a closed convex curve.
    Validate(DomainArg),
    /// Special boundary points for the angle alpha, and optional hinge scans.
    SpecialPoints(commands::SpecialArgs),
    /// Sampled checks of the five geometric assumptions.
    CheckAssumptions(commands::AssumptionArgs),
    /// Builds the invariant loop in chart coordinates.
    Lyapunov(DomainArg),
    /// Simulates mirror-coupled reflected Brownian motions.
    Simulate(commands::SimulateArgs),
    /// Monte Carlo invariance test of the loop along a time-step ladder.
    Invariance(commands::InvarianceArgs),
    /// Neumann eigenvalues on a ladder of meshes.
    Eigen(commands::EigenArgs),
    /// Monotonicity, sign, cone and hot-spot checks of the second eigenfunction.
    Analyze(commands::EigenArgs),
    /// Finite-element heat solution against its Monte Carlo representation.
    HeatCheck(commands::HeatArgs),
    /// Renders an artifact (JSON or simulation CSV) as SVG.
    Plot(commands::PlotArgs),
    /// Runs every stage and writes a summary table.
    Pipeline(pipeline::PipelineArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(Code::Input as u8);
        }
    }
    let g = &cli.global;
    let result: Result<Code, Fail> = match &cli.command {
        Command::Validate(a) => commands::validate(g, a),
        Command::SpecialPoints(a) => commands::special_points(g, a),
        Command::CheckAssumptions(a) => commands::check_assumptions(g, a),
        Command::Lyapunov(a) => commands::lyapunov(g, a),
        Command::Simulate(a) => commands::simulate(g, a),
        Command::Invariance(a) => commands::invariance(g, a),
        Command::Eigen(a) => commands::eigen(g, a),
        Command::Analyze(a) => commands::analyze(g, a),
        Command::HeatCheck(a) => commands::heat_check(g, a),
        Command::Plot(a) => commands::plot(g, a),
        Command::Pipeline(a) => pipeline::pipeline(g, a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            if g.json {
                println!("{}", serde_json::json!({ "error": f.kind(), "message": format!("{:#}", f.error) }));
            }
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code as u8)
        }
    }
}
