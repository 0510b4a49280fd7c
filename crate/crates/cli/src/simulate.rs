use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use treadmill_core::calibration::TRANSIENT_EXCLUSION;
use treadmill_core::config::Config;
use treadmill_core::cop;
use treadmill_core::sensing::Axis;
use treadmill_core::series::Table;
use treadmill_core::simulator::{
    self, CalibrationDistortion, CalibrationScenario, CopDistortion, CopGridOptions, GaitOptions, GaitProfile,
    ProtocolSpec, ShearOptions, TreadmillModel,
};
use treadmill_core::{Error, Result};

use crate::output::Output;
use crate::OutDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Impact,
    Noise,
    Calibration,
    Shear,
    CopGrid,
    Gait,
}

impl Scenario {
    fn name(self) -> &'static str {
        match self {
            Scenario::Impact => "impact",
            Scenario::Noise => "noise",
            Scenario::Calibration => "calibration",
            Scenario::Shear => "shear",
            Scenario::CopGrid => "cop-grid",
            Scenario::Gait => "gait",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Scenario::Impact => &["axis", "amplitude", "rate", "duration"],
            Scenario::Noise => &["speed", "duration", "rate"],
            Scenario::Calibration => &[
                "points_x", "points_y", "direction", "yaw", "clock_offset", "max_force", "ramp_rate", "hold", "rest",
                "gain", "nonlinearity", "hysteresis_width", "repeat_offset", "device_noise", "reference_rate",
                "device_rate", "mocap_rate",
            ],
            Scenario::Shear => &["point_x", "point_y", "trials", "samples", "max_polar_deg", "min_force", "max_force", "rate"],
            Scenario::CopGrid => &["weight_kg", "hold", "gap", "margin", "rate", "mocap_rate"],
            Scenario::Gait => &[
                "body_weight", "period", "duration", "start", "rate", "peak_ratio", "valley_ratio", "stance_fraction",
                "anterior_ratio", "lateral_ratio",
            ],
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    scenario: Scenario,
    /// RNG seed; required here or as `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Scenario config (key = value); model keys plus scenario keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set nonlinearity=0.01`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(flatten)]
    out: OutDir,
}

fn count(cfg: &Config, key: &str, default: usize) -> Result<usize> {
    Ok(cfg.parsed(key)?.unwrap_or(default))
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::new(),
    };
    for kv in &args.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{kv}` is not KEY=VALUE")))?;
        cfg.set(k.trim(), v.trim());
    }
    if let Some(seed) = args.seed {
        cfg.set("seed", seed);
    }
    let seed: u64 = cfg
        .parsed("seed")?
        .ok_or_else(|| Error::Config("a seed is mandatory (--seed or `seed` in the config)".into()))?;
    let scenario = args.scenario;
    let mut allowed: Vec<&str> = vec!["seed", "scenario"];
    allowed.extend(TreadmillModel::CONFIG_KEYS);
    allowed.extend(scenario.keys());
    cfg.reject_unknown(&allowed)?;
    if let Some(name) = cfg.get("scenario") {
        if name != scenario.name() {
            return Err(Error::Config(format!("config is for scenario `{name}`, not `{}`", scenario.name())));
        }
    }
    cfg.set("scenario", scenario.name());

    let mut model = TreadmillModel::from_config(&cfg)?;
    if scenario == Scenario::CopGrid && !cfg.contains("cop_distortion") {
        model.cop_distortion = CopDistortion::typical();
    }
    let out = Output::create(&args.out.out)?;
    let mut rng = simulator::seeded(seed);
    match scenario {
        Scenario::Impact => {
            let axis: Axis = cfg.parsed("axis")?.unwrap_or(Axis::Z);
            let sim = simulator::simulate_impact(
                &model,
                axis,
                cfg.f64_or("amplitude", 100.0)?,
                cfg.f64_or("rate", 10_000.0)?,
                cfg.f64_or("duration", 1.0)?,
                &mut rng,
            )?;
            out.series("impact.csv", &sim.series)?;
            cfg.set("truth_channel", axis.force_channel());
            cfg.set("truth_f_n", sim.natural_frequency);
            cfg.set("truth_xi", sim.damping);
            cfg.set("truth_f_d", sim.damped_frequency);
        }
        Scenario::Noise => {
            let speed = cfg.f64_or("speed", 0.0)?;
            let ts = simulator::simulate_noise(&model, speed, cfg.f64_or("duration", 10.0)?, cfg.f64_or("rate", 1000.0)?, &mut rng)?;
            out.series("noise.csv", &ts)?;
            for a in Axis::ALL {
                cfg.set(&format!("truth_band_{a}"), model.noise.expected_band(a, speed));
            }
            cfg.set("truth_motor_frequency", model.noise.motor.frequency(speed));
        }
        Scenario::Calibration => calibration(&model, &mut cfg, seed, &out)?,
        Scenario::Shear => {
            let opts = ShearOptions {
                trials: count(&cfg, "trials", 15)?,
                samples_per_trial: count(&cfg, "samples", 200)?,
                max_polar: cfg.f64_or("max_polar_deg", 35.0)?.to_radians(),
                min_force: cfg.f64_or("min_force", 200.0)?,
                max_force: cfg.f64_or("max_force", 600.0)?,
            };
            let point = (cfg.f64_or("point_x", 0.0)?, cfg.f64_or("point_y", 0.0)?);
            let rate = cfg.f64_or("rate", 100.0)?;
            let trials = simulator::simulate_shear_trials(&model, point, &opts, &mut rng)?;
            for (k, t) in trials.iter().enumerate() {
                out.series(&format!("shear_trial{:02}.csv", k + 1), &cop::wrenches_to_series(rate, 0.0, t)?)?;
            }
            cfg.set("truth_a_z", model.surface_height);
        }
        Scenario::CopGrid => {
            let opts = CopGridOptions {
                weight_kg: cfg.f64_or("weight_kg", 15.0)?,
                hold: cfg.f64_or("hold", 2.0)?,
                gap: cfg.f64_or("gap", 0.5)?,
                rate: cfg.f64_or("rate", 1000.0)?,
                mocap_rate: cfg.f64_or("mocap_rate", 200.0)?,
            };
            let d = model.cop_distortion;
            let grid = simulator::cop_calibration_grid(d.half_length, d.half_width, cfg.f64_or("margin", 0.1)?);
            let rec = simulator::simulate_cop_grid(&model, &grid, &opts, &mut rng)?;
            out.series("cop_wrench.csv", &rec.wrench)?;
            out.series("cop_mocap.csv", &rec.mocap)?;
            let mut truth = Table::with_header(&["point", "x", "y", "device_x", "device_y", "error_x", "error_y"]);
            for (k, (t, r)) in rec.truth.iter().zip(&rec.device_positions).enumerate() {
                truth.push(vec![(k + 1) as f64, t.0, t.1, r.0, r.1, r.0 - t.0, r.1 - t.1]);
            }
            out.table("cop_truth.csv", &truth)?;
        }
        Scenario::Gait => {
            let d = GaitProfile::default();
            let profile = GaitProfile {
                peak_ratio: cfg.f64_or("peak_ratio", d.peak_ratio)?,
                valley_ratio: cfg.f64_or("valley_ratio", d.valley_ratio)?,
                stance_fraction: cfg.f64_or("stance_fraction", d.stance_fraction)?,
                anterior_ratio: cfg.f64_or("anterior_ratio", d.anterior_ratio)?,
                lateral_ratio: cfg.f64_or("lateral_ratio", d.lateral_ratio)?,
            };
            let g = GaitOptions::default();
            let opts = GaitOptions {
                body_weight: cfg.f64_or("body_weight", g.body_weight)?,
                period: cfg.f64_or("period", g.period)?,
                duration: cfg.f64_or("duration", g.duration)?,
                start: cfg.f64_or("start", g.start)?,
                rate: cfg.f64_or("rate", g.rate)?,
            };
            let sim = simulator::simulate_gait(&model, &profile, &opts, &mut rng)?;
            out.series("gait.csv", &sim.series)?;
            let mut td = Table::with_header(&["touchdown", "index", "time"]);
            for (k, (&i, t)) in sim.touchdowns.iter().zip(sim.touchdown_times()).enumerate() {
                td.push(vec![(k + 1) as f64, i as f64, t]);
            }
            out.table("gait_touchdowns.csv", &td)?;
            cfg.set("truth_strides", sim.touchdowns.len().saturating_sub(1));
        }
    }
    out.config("scenario.cfg", &cfg)
}

fn direction(cfg: &Config) -> Result<[f64; 3]> {
    match cfg.get("direction") {
        None => Ok([0.0, 0.0, 1.0]),
        Some(s) => {
            if let Ok(axis) = s.parse::<Axis>() {
                let mut d = [0.0; 3];
                d[axis.index()] = 1.0;
                return Ok(d);
            }
            match cfg.f64_list("direction")?.as_deref() {
                Some(&[x, y, z]) => Ok([x, y, z]),
                _ => Err(Error::Config(format!("direction must be x, y, z or three numbers, got `{s}`"))),
            }
        }
    }
}

fn calibration(model: &TreadmillModel, cfg: &mut Config, seed: u64, out: &Output) -> Result<()> {
    let p = ProtocolSpec::default();
    let protocol = ProtocolSpec {
        max_force: cfg.f64_or("max_force", p.max_force)?,
        ramp_rate: cfg.f64_or("ramp_rate", p.ramp_rate)?,
        hold: cfg.f64_or("hold", p.hold)?,
        rest: cfg.f64_or("rest", p.rest)?,
        ..p
    };
    let distortion = CalibrationDistortion {
        gain: cfg.f64_or("gain", 1.0)?,
        nonlinearity: cfg.f64_or("nonlinearity", 0.0)?,
        hysteresis_width: cfg.f64_or("hysteresis_width", 0.0)?,
        repeat_offset: cfg.f64_or("repeat_offset", 0.0)?,
        noise: cfg.f64_or("device_noise", 0.0)?,
    };
    let d = CalibrationScenario::default();
    let base = CalibrationScenario {
        direction: direction(cfg)?,
        sensor_yaw: cfg.f64_or("yaw", 0.0)?,
        clock_offset: cfg.f64_or("clock_offset", 0.0)?,
        protocol,
        distortion,
        reference_rate: cfg.f64_or("reference_rate", d.reference_rate)?,
        device_rate: cfg.f64_or("device_rate", d.device_rate)?,
        mocap_rate: cfg.f64_or("mocap_rate", d.mocap_rate)?,
        ..d
    };
    let points: Vec<(f64, f64)> = match (cfg.f64_list("points_x")?, cfg.f64_list("points_y")?) {
        (Some(xs), Some(ys)) if xs.len() == ys.len() && !xs.is_empty() => xs.into_iter().zip(ys).collect(),
        (None, None) => simulator::calibration_grid(model.cop_distortion.half_length, model.cop_distortion.half_width, 2, 2, 0.5),
        _ => return Err(Error::Config("points_x and points_y must be non-empty lists of equal length".into())),
    };
    let runs = points
        .par_iter()
        .enumerate()
        .map(|(k, &point)| {
            let mut rng = simulator::seeded(seed);
            rng.set_stream(k as u64);
            simulator::simulate_calibration_run(model, &CalibrationScenario { point, ..base }, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    for (k, sim) in runs.iter().enumerate() {
        out.series(&format!("point{}_reference.csv", k + 1), &sim.reference)?;
        out.series(&format!("point{}_device.csv", k + 1), &sim.device)?;
        out.series(&format!("point{}_pose.csv", k + 1), &sim.pose)?;
    }
    let expected = base.expected_metrics(protocol.max_force, TRANSIENT_EXCLUSION);
    for a in Axis::ALL {
        cfg.set(&format!("expected_max_error_{a}"), expected.max_error[a.index()]);
    }
    cfg.set("expected_linearity_pct", expected.linearity_pct);
    cfg.set("expected_repeatability_pct", expected.repeatability_pct);
    cfg.set("expected_hysteresis_pct", expected.hysteresis_pct);
    cfg.set("expected_points", points.len());
    Ok(())
}
