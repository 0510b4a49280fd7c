use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use treadmill_core::config::Config;
use treadmill_core::plate::{self, FrequencySweep, MassModel, PlateSpec};
use treadmill_core::plot;
use treadmill_core::sensing::{self, AmplifierConfig, Axis, ACCURACY_CLASSES};
use treadmill_core::{Error, Result};

use crate::output::{cell, Output, Records};
use crate::OutDir;

/// Grid given as `lo:hi:n`, a comma list, or a single value.
#[derive(Debug, Clone)]
pub struct Grid(pub Vec<f64>);

fn parse_grid_arg(s: &str) -> std::result::Result<Grid, String> {
    parse_grid(s).map(Grid)
}

pub fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi, n] => {
            let n: usize = n.trim().parse().map_err(|e| format!("`{n}`: {e}"))?;
            if n == 0 {
                return Err("grid needs at least one point".into());
            }
            Ok(plate::linspace(num(lo)?, num(hi)?, n))
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("expected lo:hi:n or a comma list, got `{s}`")),
    }
}

fn parse_point(s: &str) -> std::result::Result<(f64, f64), String> {
    let v = parse_grid(s)?;
    match v.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected `x,y`, got `{s}`")),
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Plate spec (b, l, h_i, h_s, h_c, E_s, E_c, m) plus optional
    /// mass_model = constant|areal with m_fixed, rho_sandwich_areal, rho_carbon.
    #[arg(long)]
    config: PathBuf,
    /// Plate lengths (m) as lo:hi:n or a list; defaults to the plate's l.
    #[arg(long, value_parser = parse_grid_arg)]
    lengths: Option<Grid>,
    /// Carbon-layer thickness per face (m); defaults to (h_c − h_s)/2.
    #[arg(long, value_parser = parse_grid_arg)]
    thicknesses: Option<Grid>,
    /// Design point `length,thickness` to mark; defaults to the base spec.
    #[arg(long, value_parser = parse_point)]
    select: Option<(f64, f64)>,
    #[command(flatten)]
    out: OutDir,
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let cfg = Config::load(&args.config)?;
    let mut allowed = plate::CONFIG_KEYS.to_vec();
    allowed.extend(["mass_model", "m_fixed", "rho_sandwich_areal", "rho_carbon"]);
    cfg.reject_unknown(&allowed)?;
    let base = PlateSpec::from_config(&cfg)?;
    let mass = MassModel::from_config(&cfg)?;
    let lengths = args.lengths.map_or_else(|| vec![base.length], |g| g.0);
    let thicknesses = args.thicknesses.map_or_else(|| vec![base.carbon_layer_thickness()], |g| g.0);

    let rows = lengths
        .par_iter()
        .map(|&l| plate::frequency_sweep(&base, &[l], &thicknesses, mass))
        .collect::<Result<Vec<_>>>()?;
    let sweep = FrequencySweep {
        lengths: lengths.clone(),
        thicknesses: thicknesses.clone(),
        f_n: rows.into_iter().flat_map(|r| r.f_n).collect(),
    };
    if sweep.f_n.iter().all(Option::is_none) {
        return Err(Error::InvalidSpec("every sweep cell violates the plate constraints".into()));
    }

    let out = Output::create(&args.out.out)?;
    out.table("sweep.csv", &sweep.to_table())?;
    let selected = args.select.unwrap_or((base.length, base.carbon_layer_thickness()));
    let svg = plot::heat_map(
        "Natural frequency",
        ("plate length (m)", "carbon layer thickness (m)", "f_n (Hz)"),
        &sweep.lengths,
        &sweep.thicknesses,
        &sweep.f_n,
        Some(selected),
    );
    out.text("sweep.svg", &svg)?;
    let base_f = plate::natural_frequency(&base)?;
    println!("base design: f_n = {base_f:.2} Hz");
    Ok(())
}

#[derive(Debug, Args)]
pub struct RangesArgs {
    /// Amplifier config (charge_range, sensitivity_xy, sensitivity_z,
    /// adc_counts); defaults to all four factory stages.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Natural frequency (Hz) for the usable-bandwidth table.
    #[arg(long)]
    natural_frequency: Option<f64>,
    #[command(flatten)]
    out: OutDir,
}

pub fn ranges(args: RangesArgs) -> Result<()> {
    let amps = match &args.config {
        Some(p) => {
            let cfg = Config::load(p)?;
            cfg.reject_unknown(&["charge_range", "sensitivity_xy", "sensitivity_z", "adc_counts"])?;
            vec![AmplifierConfig::from_config(&cfg)?]
        }
        None => AmplifierConfig::presets().to_vec(),
    };
    let mut rec = Records::new(&["charge_range_pc", "axis", "range_n", "resolution_n"]);
    for amp in &amps {
        for axis in [Axis::X, Axis::Z] {
            let r = sensing::force_range(amp, axis)?;
            let label = if axis == Axis::Z { "z" } else { "xy" };
            rec.push(vec![cell(amp.charge_range), label.into(), cell(r.range), cell(r.resolution)]);
        }
    }
    let out = Output::create(&args.out.out)?;
    out.records("ranges.csv", &rec)?;
    if let Some(f_n) = args.natural_frequency {
        let mut acc = Records::new(&["accuracy_pct", "max_frequency_hz"]);
        for class in ACCURACY_CLASSES {
            acc.push(vec![cell(class.accuracy_pct), cell(sensing::max_frequency_for_accuracy(f_n, class.accuracy_pct)?)]);
        }
        out.records("bandwidth.csv", &acc)?;
    }
    Ok(())
}
