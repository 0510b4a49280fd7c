use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use treadmill_core::calibration::{self, CalibrationReport, CalibrationRun, EvaluateOptions, HysteresisRamp, SegmentOptions};
use treadmill_core::plot;
use treadmill_core::series::TimeSeries;
use treadmill_core::{Error, Result};

use crate::output::Output;
use crate::OutDir;

#[derive(Debug, Args)]
pub struct Iso376Args {
    /// Directory holding `point<N>_reference.csv`, `point<N>_device.csv` and
    /// `point<N>_pose.csv` for every calibration point.
    #[arg(long, short)]
    input: PathBuf,
    /// Full-scale force used to normalize percentages (N).
    #[arg(long, default_value_t = calibration::DEFAULT_FULL_SCALE)]
    full_scale: f64,
    /// Ramp pair used for hysteresis (1 or 2).
    #[arg(long, default_value = "1")]
    hysteresis_ramp: HysteresisRamp,
    /// Largest clock offset searched when synchronizing (s).
    #[arg(long, default_value_t = 2.0)]
    max_lag: f64,
    /// Shortest preload plateau accepted (s).
    #[arg(long, default_value_t = SegmentOptions::default().plateau_min_duration)]
    plateau_min_duration: f64,
    #[command(flatten)]
    out: OutDir,
}

/// Point ids with a complete file triple, ascending.
fn discover(dir: &Path) -> Result<Vec<usize>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Io { path: dir.display().to_string(), source: e })?;
    let mut ids = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::Io { path: dir.display().to_string(), source: e })?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(id) = name.strip_prefix("point").and_then(|s| s.strip_suffix("_reference.csv")) {
            if let Ok(id) = id.parse::<usize>() {
                ids.push(id);
            }
        }
    }
    ids.sort_unstable();
    for id in &ids {
        for kind in ["device", "pose"] {
            let p = dir.join(format!("point{id}_{kind}.csv"));
            if !p.exists() {
                return Err(Error::Config(format!("missing {}", p.display())));
            }
        }
    }
    if ids.is_empty() {
        return Err(Error::Config(format!("no point<N>_reference.csv files in {}", dir.display())));
    }
    Ok(ids)
}

pub fn iso376(args: Iso376Args) -> Result<()> {
    let ids = discover(&args.input)?;
    let opts = EvaluateOptions {
        full_scale: args.full_scale,
        hysteresis_ramp: args.hysteresis_ramp,
        segment: SegmentOptions { plateau_min_duration: args.plateau_min_duration, ..SegmentOptions::default() },
    };
    let points = ids
        .par_iter()
        .map(|&id| {
            let read = |kind: &str| TimeSeries::read_csv(args.input.join(format!("point{id}_{kind}.csv")));
            let run = CalibrationRun::synchronize(id, &read("reference")?, &read("device")?, &read("pose")?, args.max_lag)?;
            calibration::evaluate_run(&run, &opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = CalibrationReport::new(points)?;

    let out = Output::create(&args.out.out)?;
    out.table("calibration_report.csv", &report.to_table())?;
    if let Some(maps) = &report.error_maps {
        for (map, axis) in maps.iter().zip(["x", "y", "z"]) {
            let svg = plot::error_map(&format!("Max error F{axis}"), "N", map);
            out.text(&format!("error_map_{axis}.svg"), &svg)?;
        }
    }
    println!(
        "{} points: max error {:.3}/{:.3}/{:.3} N, linearity {:.3}%, repeatability {:.3}%, hysteresis {:.3}%",
        report.points.len(),
        report.worst(|p| p.max_error[0]),
        report.worst(|p| p.max_error[1]),
        report.worst(|p| p.max_error[2]),
        report.worst(|p| p.linearity_pct),
        report.worst(|p| p.repeatability_pct),
        report.worst(|p| p.hysteresis_pct),
    );
    Ok(())
}
