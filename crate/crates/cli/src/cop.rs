use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use treadmill_core::cop::{self, CopCorrectionModel, DEFAULT_FZ_MIN};
use treadmill_core::plot::{self, Line};
use treadmill_core::series::{Table, TimeSeries};
use treadmill_core::{Error, Result};

use crate::output::{cell, Output, Records};
use crate::OutDir;

#[derive(Debug, Args)]
pub struct ShearArgs {
    /// One wrench recording (Fx, Fy, Fz, Mx, My, Mz) per trial.
    #[arg(long, short, num_args = 1.., required = true)]
    input: Vec<PathBuf>,
    /// Samples with |F_z| at or below this are ignored (N).
    #[arg(long, default_value_t = DEFAULT_FZ_MIN)]
    fz_min: f64,
    #[command(flatten)]
    out: OutDir,
}

pub fn shear(args: ShearArgs) -> Result<()> {
    let trials = args
        .input
        .par_iter()
        .map(|p| cop::wrenches_from_series(&TimeSeries::read_csv(p)?))
        .collect::<Result<Vec<_>>>()?;
    let summary = cop::shear_offset_trials(&trials, args.fz_min)?;

    let mut rec = Records::new(&["trial", "file", "a_z", "spread_x", "spread_y", "cop_x", "cop_y", "samples"]);
    for (k, (fit, path)) in summary.trials.iter().zip(&args.input).enumerate() {
        let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        rec.push(vec![
            cell(k + 1),
            file,
            cell(fit.a_z),
            cell(fit.spread_x),
            cell(fit.spread_y),
            cell(fit.cop.0),
            cell(fit.cop.1),
            cell(fit.samples),
        ]);
    }
    let mut total = Table::with_header(&["trials", "mean_a_z", "ci95_a_z", "mean_spread_x", "mean_spread_y"]);
    total.push(vec![summary.trials.len() as f64, summary.mean_a_z, summary.ci95_a_z, summary.mean_spread_x, summary.mean_spread_y]);

    let out = Output::create(&args.out.out)?;
    out.records("shear_trials.csv", &rec)?;
    out.table("shear_summary.csv", &total)?;
    out.config("shear_model.cfg", &CopCorrectionModel::identity(summary.mean_a_z).to_config())?;
    let idx: Vec<f64> = (1..=summary.trials.len()).map(|k| k as f64).collect();
    let a_z: Vec<f64> = summary.trials.iter().map(|f| f.a_z).collect();
    let svg = plot::line_plot(
        "Sensor offset per trial",
        ("trial", "a_z (m)"),
        &[Line::new("a_z", &idx, &a_z)],
        &[(summary.mean_a_z, "mean")],
    );
    out.text("shear.svg", &svg)?;
    println!(
        "a_z = {:.4} m ± {:.4} m (95% CI), COP spread {:.4} m (x), {:.4} m (y)",
        summary.mean_a_z, summary.ci95_a_z, summary.mean_spread_x, summary.mean_spread_y
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    /// Wrench recording of the weight placed on the grid points.
    #[arg(long)]
    wrench: PathBuf,
    /// Motion-capture recording with the weight's `x` and `y` (m).
    #[arg(long)]
    mocap: PathBuf,
    /// Sensor-plane offset from `cop shear` (m).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a_z: f64,
    /// Samples with |F_z| at or below this are ignored (N).
    #[arg(long, default_value_t = DEFAULT_FZ_MIN)]
    fz_min: f64,
    /// Seconds dropped at both ends of every placement.
    #[arg(long, default_value_t = 0.2)]
    trim: f64,
    /// Shortest placement kept after trimming (s).
    #[arg(long, default_value_t = 0.5)]
    min_duration: f64,
    #[command(flatten)]
    out: OutDir,
}

pub fn surface(args: SurfaceArgs) -> Result<()> {
    let wrench = TimeSeries::read_csv(&args.wrench)?;
    let mocap = TimeSeries::read_csv(&args.mocap)?;
    let samples = cop::static_placements(&wrench, Some(&mocap), args.a_z, args.fz_min, args.trim, args.min_duration)?;
    let model = cop::fit_cop_error_surface(&samples, args.a_z)?;

    let mut table = Table::with_header(&[
        "point", "true_x", "true_y", "raw_x", "raw_y", "raw_error_x", "raw_error_y", "corrected_error_x", "corrected_error_y",
    ]);
    let mut positions = Vec::new();
    let (mut raw_mag, mut corr_mag) = (Vec::new(), Vec::new());
    for (k, s) in samples.iter().enumerate() {
        let truth = s.ground_truth.expect("placements carry motion-capture truth");
        let raw_err = (s.cop.0 - truth.0, s.cop.1 - truth.1);
        let corrected = cop::correct_cop(s.cop, &model, true)?;
        let corr_err = (corrected.0 - truth.0, corrected.1 - truth.1);
        table.push(vec![(k + 1) as f64, truth.0, truth.1, s.cop.0, s.cop.1, raw_err.0, raw_err.1, corr_err.0, corr_err.1]);
        positions.push(truth);
        raw_mag.push(raw_err.0.hypot(raw_err.1));
        corr_mag.push(corr_err.0.hypot(corr_err.1));
    }

    let out = Output::create(&args.out.out)?;
    out.config("cop_model.cfg", &model.to_config())?;
    out.table("cop_surface.csv", &table)?;
    out.text("cop_error_raw.svg", &plot::scatter_map("Raw COP error", "m", &positions, &raw_mag))?;
    out.text("cop_error_corrected.svg", &plot::scatter_map("Corrected COP error", "m", &positions, &corr_mag))?;
    println!("{} placements, R² = {:.5} (x), {:.5} (y)", samples.len(), model.r2_x, model.r2_y);
    Ok(())
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    /// Model written by `cop surface` or `cop shear`.
    #[arg(long)]
    model: PathBuf,
    /// Wrench recording to convert.
    #[arg(long, short)]
    input: PathBuf,
    /// COP is left blank where |F_z| is at or below this (N).
    #[arg(long, default_value_t = DEFAULT_FZ_MIN)]
    fz_min: f64,
    /// Evaluate the correction outside the calibrated area instead of leaving it blank.
    #[arg(long)]
    allow_extrapolation: bool,
    #[command(flatten)]
    out: OutDir,
}

pub fn apply(args: ApplyArgs) -> Result<()> {
    let model = CopCorrectionModel::load(&args.model)?;
    let ts = TimeSeries::read_csv(&args.input)?;
    let ws = cop::wrenches_from_series(&ts)?;
    // Blank cells mark samples without a defined COP.
    let mut rec = Records::new(&["time", "raw_x", "raw_y", "x", "y", "in_bounds"]);
    let blank = String::new;
    let (mut loaded, mut outside) = (0usize, 0usize);
    for (i, w) in ws.iter().enumerate() {
        let t = cell(ts.time(i));
        match cop::cop_from_wrench(w, model.a_z, args.fz_min) {
            Ok(raw) => {
                loaded += 1;
                let inside = cell(u8::from(model.in_bounds(raw.0, raw.1)));
                match cop::correct_cop(raw, &model, args.allow_extrapolation) {
                    Ok(c) => rec.push(vec![t, cell(raw.0), cell(raw.1), cell(c.0), cell(c.1), inside]),
                    Err(Error::OutOfBounds { .. }) => {
                        outside += 1;
                        rec.push(vec![t, cell(raw.0), cell(raw.1), blank(), blank(), inside]);
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(Error::InsufficientLoad { .. }) => rec.push(vec![t, blank(), blank(), blank(), blank(), cell(0)]),
            Err(e) => return Err(e),
        }
    }
    if outside > 0 {
        println!("{outside} loaded samples outside the calibrated area left uncorrected (see --allow-extrapolation)");
    }
    let out = Output::create(&args.out.out)?;
    out.records("cop.csv", &rec)?;
    println!("{loaded} of {} samples loaded above {} N", ws.len(), args.fz_min);
    Ok(())
}
