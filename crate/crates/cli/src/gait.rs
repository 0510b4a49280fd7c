use std::path::PathBuf;

use clap::Args;
use treadmill_core::gait::{self, AverageOptions, BandKind, StrideOptions};
use treadmill_core::plot::{self, Line};
use treadmill_core::series::{Table, TimeSeries};
use treadmill_core::Result;

use crate::output::Output;
use crate::OutDir;

#[derive(Debug, Args)]
pub struct AverageArgs {
    /// Walking recording with Fx, Fy, Fz (N).
    #[arg(long, short)]
    input: PathBuf,
    /// Subject body weight (N).
    #[arg(long)]
    body_weight: f64,
    /// Points on the normalized stride grid.
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Report forces in body weights.
    #[arg(long)]
    normalize: bool,
    /// Band from the standard error of the mean instead of the stride spread.
    #[arg(long)]
    sem: bool,
    /// Keep strides whose duration is far from the median.
    #[arg(long)]
    include_outliers: bool,
    /// Fraction of body weight at which contact starts.
    #[arg(long, default_value_t = StrideOptions::default().rise_fraction)]
    rise_fraction: f64,
    /// Fraction of body weight below which contact ends.
    #[arg(long, default_value_t = StrideOptions::default().fall_fraction)]
    fall_fraction: f64,
    #[command(flatten)]
    out: OutDir,
}

pub fn average(args: AverageArgs) -> Result<()> {
    let ts = TimeSeries::read_csv(&args.input)?;
    let stride_opts = StrideOptions {
        rise_fraction: args.rise_fraction,
        fall_fraction: args.fall_fraction,
        ..StrideOptions::default()
    };
    let windows = gait::segment_strides(&ts, args.body_weight, &stride_opts)?;
    let opts = AverageOptions {
        points: args.points,
        normalize: args.normalize,
        band: if args.sem { BandKind::StandardError } else { BandKind::Dispersion },
        include_outliers: args.include_outliers,
    };
    let ensemble = gait::average_strides(&ts, &windows, args.body_weight, &opts)?;

    let mut strides = Table::with_header(&["stride", "start", "end", "start_time", "end_time", "outlier"]);
    for (k, w) in windows.iter().enumerate() {
        strides.push(vec![(k + 1) as f64, w.start as f64, w.end as f64, w.start_time, w.end_time, f64::from(u8::from(w.outlier))]);
    }
    let out = Output::create(&args.out.out)?;
    out.table("strides.csv", &strides)?;
    out.table("gait_ensemble.csv", &ensemble.to_table())?;
    if !ensemble.double_stance.is_empty() {
        let mut ds = Table::with_header(&["start_percent", "end_percent"]);
        for (a, b) in &ensemble.double_stance {
            ds.push(vec![100.0 * a, 100.0 * b]);
        }
        out.table("double_stance.csv", &ds)?;
    }
    let lines: Vec<Line> = ensemble
        .channels
        .iter()
        .map(|c| Line::new(&c.name, &ensemble.normalized_time, &c.mean).with_band(&c.band))
        .collect();
    let (unit, bw) = if ensemble.normalized { ("force (BW)", 1.0) } else { ("force (N)", args.body_weight) };
    let svg = plot::line_plot("Stride average", ("stride (%)", unit), &lines, &[(bw, "body weight")]);
    out.text("gait.svg", &svg)?;
    for c in &ensemble.channels {
        println!("{}: mean band {:.3}", c.name, ensemble.mean_band(&c.name).unwrap_or(0.0));
    }
    println!("{} strides averaged of {} detected", ensemble.stride_count, windows.len());
    Ok(())
}
