mod analyze;
mod calibrate;
mod cop;
mod design;
mod gait;
mod output;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use treadmill_core::Result;

/// Instrumented-treadmill force analysis: plate design, impact and noise
/// analysis, calibration, centre of pressure, gait averaging and simulation.
#[derive(Debug, Parser)]
#[command(name = "treadmill", version)]
struct Cli {
    /// Worker threads for parallel stages (sweep cells, calibration points).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plate natural-frequency design.
    #[command(subcommand)]
    Design(DesignCommand),
    /// Impact and noise analysis of force recordings.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Force-sensor calibration against a reference sensor.
    #[command(subcommand)]
    Calibrate(CalibrateCommand),
    /// Centre-of-pressure shear offset, error surface and correction.
    #[command(subcommand)]
    Cop(CopCommand),
    /// Stride segmentation and ensemble averaging.
    #[command(subcommand)]
    Gait(GaitCommand),
    /// Generate synthetic recordings with known ground truth.
    Simulate(simulate::SimulateArgs),
}

#[derive(Debug, Subcommand)]
enum DesignCommand {
    /// Natural frequency over a grid of plate lengths and carbon-layer thicknesses.
    Sweep(design::SweepArgs),
    /// Force ranges and resolutions of the amplifier stages.
    Ranges(design::RangesArgs),
}

#[derive(Debug, Subcommand)]
enum AnalyzeCommand {
    /// Natural frequency and damping from an impact recording.
    Impact(analyze::ImpactArgs),
    /// Noise band and spectrum of an unloaded recording.
    Noise(analyze::NoiseArgs),
}

#[derive(Debug, Subcommand)]
enum CalibrateCommand {
    /// Preload/ramp protocol evaluation at every calibration point.
    Iso376(calibrate::Iso376Args),
}

#[derive(Debug, Subcommand)]
enum CopCommand {
    /// Sensor-plane offset from trials pushing through one point.
    Shear(cop::ShearArgs),
    /// Fit the COP error surface from static placements.
    Surface(cop::SurfaceArgs),
    /// Compute corrected COP for a wrench recording.
    Apply(cop::ApplyArgs),
}

#[derive(Debug, Subcommand)]
enum GaitCommand {
    /// Segment strides and average them on a normalized time base.
    Average(gait::AverageArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutDir {
    /// Directory for CSV reports and SVG plots.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Design(DesignCommand::Sweep(a)) => design::sweep(a),
        Command::Design(DesignCommand::Ranges(a)) => design::ranges(a),
        Command::Analyze(AnalyzeCommand::Impact(a)) => analyze::impact(a),
        Command::Analyze(AnalyzeCommand::Noise(a)) => analyze::noise(a),
        Command::Calibrate(CalibrateCommand::Iso376(a)) => calibrate::iso376(a),
        Command::Cop(CopCommand::Shear(a)) => cop::shear(a),
        Command::Cop(CopCommand::Surface(a)) => cop::surface(a),
        Command::Cop(CopCommand::Apply(a)) => cop::apply(a),
        Command::Gait(GaitCommand::Average(a)) => gait::average(a),
        Command::Simulate(a) => simulate::simulate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        pool = pool.num_threads(n.max(1));
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| run(cli.command)),
        Err(e) => Err(treadmill_core::Error::Config(format!("thread pool: {e}"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let category = e.category();
            eprintln!("error[{category}]: {e}");
            ExitCode::from(category.exit_code() as u8)
        }
    }
}
