//! Seeded synthetic treadmill: impact transients, calibration runs, shear
//! trials, COP placements, walking and belt noise, each with its ground truth.
//!
//! All randomness is drawn from a caller-supplied [`SimRng`]; the same seed
//! and inputs give bit-identical output on every platform.

use std::f64::consts::PI;

use nalgebra::{UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::calibration::{Interval, ProtocolPhases};
use crate::config::Config;
use crate::cop::{cross, wrench_from_sensor_array, SurfacePolynomial, Wrench, WRENCH_CHANNELS};
use crate::error::{Error, Result};
use crate::sensing::{force_range, AmplifierConfig, Axis};
use crate::series::TimeSeries;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const GRAVITY: f64 = 9.81;

fn gauss(rng: &mut SimRng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let z: f64 = StandardNormal.sample(rng);
    sigma * z
}

fn quantize(v: f64, step: f64) -> f64 {
    (v / step).round() * step
}

/// Belt-motor vibration: a line at `rpm/60 · teeth`, growing with belt speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorModel {
    /// Motor speed per unit belt speed (rpm per m/s).
    pub rpm_per_speed: f64,
    pub teeth: f64,
    /// Harmonic amplitude per axis at 1 m/s (N).
    pub harmonic: [f64; 3],
}

impl MotorModel {
    pub fn frequency(&self, belt_speed: f64) -> f64 {
        self.rpm_per_speed * belt_speed / 60.0 * self.teeth
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// White-noise σ per axis on the summed force (N).
    pub white: [f64; 3],
    /// Mains line amplitude (N).
    pub line_amplitude: f64,
    pub line_frequency: f64,
    pub motor: MotorModel,
}

const AXIS_PHASE: [f64; 3] = [0.0, 2.1, 4.2];

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            white: [0.8, 0.8, 1.2],
            line_amplitude: 0.5,
            line_frequency: 50.0,
            motor: MotorModel { rpm_per_speed: 600.0, teeth: 12.0, harmonic: [2.5, 2.0, 0.8] },
        }
    }
}

impl NoiseModel {
    pub fn silent() -> Self {
        Self {
            white: [0.0; 3],
            line_amplitude: 0.0,
            motor: MotorModel { harmonic: [0.0; 3], ..Self::default().motor },
            ..Self::default()
        }
    }

    pub fn white_only(white: [f64; 3]) -> Self {
        Self { white, ..Self::silent() }
    }

    pub fn sample(&self, axis: Axis, t: f64, belt_speed: f64, rng: &mut SimRng) -> f64 {
        let k = axis.index();
        let line = self.line_amplitude * (2.0 * PI * self.line_frequency * t + AXIS_PHASE[k]).sin();
        let motor = belt_speed * self.motor.harmonic[k] * (2.0 * PI * self.motor.frequency(belt_speed) * t + AXIS_PHASE[k]).sin();
        gauss(rng, self.white[k]) + line + motor
    }

    /// Expected noise band (2σ) of an axis at the given speed.
    pub fn expected_band(&self, axis: Axis, belt_speed: f64) -> f64 {
        let k = axis.index();
        let harmonic = belt_speed * self.motor.harmonic[k];
        2.0 * (self.white[k].powi(2) + 0.5 * self.line_amplitude.powi(2) + 0.5 * harmonic.powi(2)).sqrt()
    }
}

/// Ground-truth COP error as a function of the device COP, in coordinates
/// normalized by the surface half-dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopDistortion {
    pub half_length: f64,
    pub half_width: f64,
    pub x: SurfacePolynomial,
    pub y: SurfacePolynomial,
}

impl Default for CopDistortion {
    fn default() -> Self {
        Self { half_length: 0.7, half_width: 0.25, x: SurfacePolynomial::ZERO, y: SurfacePolynomial::ZERO }
    }
}

impl CopDistortion {
    /// Quartic field peaking at 20 mm in x and 12 mm in y. Every term has
    /// the sign of its basis at the `(−l/2, −b/2)` corner, so that corner
    /// reaches the sum of the coefficient magnitudes.
    pub fn typical() -> Self {
        Self {
            x: SurfacePolynomial { coeffs: [-0.002, 0.008, -0.004, 0.003, -0.0015, 0.001, -0.0005, 0.0, 0.0] },
            y: SurfacePolynomial { coeffs: [-0.001, 0.002, -0.0015, 0.0, 0.0, 0.004, -0.0015, 0.001, -0.001] },
            ..Self::default()
        }
    }

    /// Error `(e_x, e_y)` seen at device COP `(x, y)`.
    pub fn error_at(&self, x: f64, y: f64) -> (f64, f64) {
        let (u, v) = (x / self.half_length, y / self.half_width);
        (self.x.eval_normalized(u, v), self.y.eval_normalized(u, v))
    }

    /// Device COP `r` with `r − error_at(r) = truth`, by fixed-point iteration.
    pub fn device_position(&self, truth: (f64, f64)) -> (f64, f64) {
        let mut r = truth;
        for _ in 0..200 {
            let (ex, ey) = self.error_at(r.0, r.1);
            let next = (truth.0 + ex, truth.1 + ey);
            let done = (next.0 - r.0).abs() < 1e-16 && (next.1 - r.1).abs() < 1e-16;
            r = next;
            if done {
                break;
            }
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreadmillModel {
    /// Natural frequency per axis (Hz).
    pub natural_frequency: [f64; 3],
    pub damping: [f64; 3],
    /// Sensor positions in the sensor plane (m).
    pub sensor_positions: [[f64; 2]; 4],
    /// Running surface above the sensor plane (m).
    pub surface_height: f64,
    pub amplifier: AmplifierConfig,
    pub noise: NoiseModel,
    pub cop_distortion: CopDistortion,
    /// Round force channels to the amplifier resolution.
    pub quantize: bool,
}

impl Default for TreadmillModel {
    fn default() -> Self {
        Self {
            natural_frequency: [385.0, 203.0, 169.0],
            damping: [0.0148, 0.033, 0.0093],
            sensor_positions: [[0.7, 0.25], [-0.7, 0.25], [-0.7, -0.25], [0.7, -0.25]],
            surface_height: 0.078,
            amplifier: AmplifierConfig::default(),
            noise: NoiseModel::default(),
            cop_distortion: CopDistortion::default(),
            quantize: true,
        }
    }
}

impl TreadmillModel {
    /// No noise, no quantization, no COP distortion.
    pub fn ideal() -> Self {
        Self { noise: NoiseModel::silent(), quantize: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..3 {
            let (f, xi) = (self.natural_frequency[k], self.damping[k]);
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Config(format!("natural frequency must be > 0, got {f}")));
            }
            if !(xi > 0.0 && xi < 1.0) {
                return Err(Error::Config(format!("damping ratio must be in (0, 1), got {xi}")));
            }
            if !(self.noise.white[k] >= 0.0) {
                return Err(Error::Config("noise sigma must be >= 0".into()));
            }
        }
        let [a, b, c, d] = self.sensor_positions;
        let mid = |p: [f64; 2], q: [f64; 2]| [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
        let len = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        let (m1, m2) = (mid(a, c), mid(b, d));
        let area = 0.5 * ((a[0] * b[1] - b[0] * a[1]) + (b[0] * c[1] - c[0] * b[1]) + (c[0] * d[1] - d[0] * c[1]) + (d[0] * a[1] - a[0] * d[1]));
        let rectangle = (m1[0] - m2[0]).abs() < 1e-9 && (m1[1] - m2[1]).abs() < 1e-9 && (len(a, c) - len(b, d)).abs() < 1e-9;
        if !rectangle || area.abs() < 1e-9 {
            return Err(Error::Config("sensor positions must form a non-degenerate rectangle".into()));
        }
        self.amplifier.validate()
    }

    pub fn resolution(&self, axis: Axis) -> Result<f64> {
        Ok(force_range(&self.amplifier, axis)?.resolution)
    }

    fn quantizer(&self) -> Result<[Option<f64>; 3]> {
        if !self.quantize {
            return Ok([None; 3]);
        }
        Ok([Some(self.resolution(Axis::X)?), Some(self.resolution(Axis::Y)?), Some(self.resolution(Axis::Z)?)])
    }

    /// Reads optional overrides: `f_x f_y f_z xi_x xi_y xi_z z_s noise_x
    /// noise_y noise_z line_amplitude motor_rpm_per_speed motor_teeth motor_x
    /// motor_y motor_z quantize cop_distortion` (none|typical) plus amplifier keys.
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let d = Self::default();
        let axes = |prefix: &str, base: [f64; 3]| -> Result<[f64; 3]> {
            Ok([
                cfg.f64_or(&format!("{prefix}_x"), base[0])?,
                cfg.f64_or(&format!("{prefix}_y"), base[1])?,
                cfg.f64_or(&format!("{prefix}_z"), base[2])?,
            ])
        };
        let cop_distortion = match cfg.get("cop_distortion").unwrap_or("none") {
            "none" => CopDistortion::default(),
            "typical" => CopDistortion::typical(),
            other => return Err(Error::Config(format!("cop_distortion must be none or typical, got `{other}`"))),
        };
        let model = Self {
            natural_frequency: axes("f", d.natural_frequency)?,
            damping: axes("xi", d.damping)?,
            sensor_positions: d.sensor_positions,
            surface_height: cfg.f64_or("z_s", d.surface_height)?,
            amplifier: AmplifierConfig::from_config(cfg)?,
            noise: NoiseModel {
                white: axes("noise", d.noise.white)?,
                line_amplitude: cfg.f64_or("line_amplitude", d.noise.line_amplitude)?,
                line_frequency: d.noise.line_frequency,
                motor: MotorModel {
                    rpm_per_speed: cfg.f64_or("motor_rpm_per_speed", d.noise.motor.rpm_per_speed)?,
                    teeth: cfg.f64_or("motor_teeth", d.noise.motor.teeth)?,
                    harmonic: axes("motor", d.noise.motor.harmonic)?,
                },
            },
            cop_distortion,
            quantize: cfg.parsed("quantize")?.unwrap_or(d.quantize),
        };
        model.validate()?;
        Ok(model)
    }

    pub const CONFIG_KEYS: [&'static str; 22] = [
        "f_x", "f_y", "f_z", "xi_x", "xi_y", "xi_z", "z_s", "noise_x", "noise_y", "noise_z", "line_amplitude",
        "motor_rpm_per_speed", "motor_teeth", "motor_x", "motor_y", "motor_z", "quantize", "cop_distortion",
        "charge_range", "sensitivity_xy", "sensitivity_z", "adc_counts",
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedImpact {
    pub series: TimeSeries,
    pub axis: Axis,
    pub natural_frequency: f64,
    pub damping: f64,
    /// `f_n·sqrt(1 − ξ²)` (Hz).
    pub damped_frequency: f64,
}

/// Hammer tap along `axis`: `A·e^(−λt)·cos(2π f_d t)` with `λ = ξ·2π·f_n`.
pub fn simulate_impact(
    model: &TreadmillModel,
    axis: Axis,
    amplitude: f64,
    rate: f64,
    duration: f64,
    rng: &mut SimRng,
) -> Result<SimulatedImpact> {
    model.validate()?;
    let (f_n, xi) = (model.natural_frequency[axis.index()], model.damping[axis.index()]);
    let lambda = xi * 2.0 * PI * f_n;
    let f_d = f_n * (1.0 - xi * xi).sqrt();
    let n = (duration * rate).round() as usize;
    let q = model.quantizer()?;
    let mut channels: Vec<(&str, Vec<f64>)> = Axis::ALL.iter().map(|a| (a.force_channel(), Vec::with_capacity(n))).collect();
    for i in 0..n {
        let t = i as f64 / rate;
        for a in Axis::ALL {
            let mut v = model.noise.sample(a, t, 0.0, rng);
            if a == axis {
                v += amplitude * (-lambda * t).exp() * (2.0 * PI * f_d * t).cos();
            }
            if let Some(step) = q[a.index()] {
                v = quantize(v, step);
            }
            channels[a.index()].1.push(v);
        }
    }
    Ok(SimulatedImpact {
        series: TimeSeries::from_channels(rate, 0.0, channels)?,
        axis,
        natural_frequency: f_n,
        damping: xi,
        damped_frequency: f_d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSpec {
    pub max_force: f64,
    /// N/s.
    pub ramp_rate: f64,
    pub hold: f64,
    pub rest: f64,
    pub lead: f64,
    /// Rise and fall time of the preload steps (s).
    pub step: f64,
    pub tail: f64,
}

impl Default for ProtocolSpec {
    fn default() -> Self {
        Self { max_force: 200.0, ramp_rate: 6.0, hold: 30.0, rest: 5.0, lead: 2.0, step: 0.2, tail: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolSegment {
    Idle,
    /// Preload `k` (0 or 1): rising edge, hold or falling edge.
    Preload { index: usize, rising: bool, falling: bool },
    RampUp,
    RampDown,
}

impl ProtocolSpec {
    fn preload_start(&self, k: usize) -> f64 {
        self.lead + k as f64 * (2.0 * self.step + self.hold + self.rest)
    }

    fn ramp_start(&self) -> f64 {
        self.preload_start(2)
    }

    fn ramp_time(&self) -> f64 {
        self.max_force / self.ramp_rate
    }

    pub fn duration(&self) -> f64 {
        self.ramp_start() + 4.0 * self.ramp_time() + self.tail
    }

    pub fn force(&self, t: f64) -> (f64, ProtocolSegment) {
        let fmax = self.max_force;
        for k in 0..2 {
            let s = self.preload_start(k);
            let rel = t - s;
            if rel >= 0.0 && rel < 2.0 * self.step + self.hold {
                return if rel < self.step {
                    (fmax * rel / self.step, ProtocolSegment::Preload { index: k, rising: true, falling: false })
                } else if rel < self.step + self.hold {
                    (fmax, ProtocolSegment::Preload { index: k, rising: false, falling: false })
                } else {
                    let f = fmax * (1.0 - (rel - self.step - self.hold) / self.step);
                    (f, ProtocolSegment::Preload { index: k, rising: false, falling: true })
                };
            }
        }
        let rel = t - self.ramp_start();
        let tr = self.ramp_time();
        if rel >= 0.0 && rel < 4.0 * tr {
            let p = rel % (2.0 * tr);
            return if p < tr {
                (self.ramp_rate * p, ProtocolSegment::RampUp)
            } else {
                (fmax - self.ramp_rate * (p - tr), ProtocolSegment::RampDown)
            };
        }
        (0.0, ProtocolSegment::Idle)
    }

    /// Phase boundaries as generated.
    pub fn phases(&self) -> ProtocolPhases {
        let pre = |k: usize| {
            let s = self.preload_start(k) + self.step;
            Interval::new(s, s + self.hold)
        };
        let r0 = self.ramp_start();
        let tr = self.ramp_time();
        ProtocolPhases {
            preloads: [pre(0), pre(1)],
            ramps_up: [Interval::new(r0, r0 + tr), Interval::new(r0 + 2.0 * tr, r0 + 3.0 * tr)],
            ramps_down: [Interval::new(r0 + tr, r0 + 2.0 * tr), Interval::new(r0 + 3.0 * tr, r0 + 4.0 * tr)],
        }
    }
}

/// Device-side errors injected into a calibration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationDistortion {
    pub gain: f64,
    /// Quadratic term `ε·F²/F_max`.
    pub nonlinearity: f64,
    /// Separation of the up and down branches at mid-range (N).
    pub hysteresis_width: f64,
    /// Extra device offset on the second preload plateau (N).
    pub repeat_offset: f64,
    /// White noise on each device force channel (N).
    pub noise: f64,
}

impl Default for CalibrationDistortion {
    fn default() -> Self {
        Self { gain: 1.0, nonlinearity: 0.0, hysteresis_width: 0.0, repeat_offset: 0.0, noise: 0.0 }
    }
}

impl CalibrationDistortion {
    pub fn apply(&self, f: f64, segment: ProtocolSegment, fmax: f64) -> f64 {
        let loop_shape = 4.0 * f * (fmax - f) / (fmax * fmax);
        let branch = match segment {
            ProtocolSegment::RampUp | ProtocolSegment::Preload { rising: true, .. } => -1.0,
            ProtocolSegment::RampDown | ProtocolSegment::Preload { falling: true, .. } => 1.0,
            _ => 0.0,
        };
        let offset = match segment {
            ProtocolSegment::Preload { index: 1, .. } => self.repeat_offset * f / fmax,
            _ => 0.0,
        };
        self.gain * f + self.nonlinearity * f * f / fmax + branch * 0.5 * self.hysteresis_width * loop_shape + offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationScenario {
    pub point: (f64, f64),
    /// Unit direction of the applied force in treadmill coordinates.
    pub direction: [f64; 3],
    /// Rotation of the reference sensor about the vertical (rad).
    pub sensor_yaw: f64,
    /// Reference clock minus device clock (s).
    pub clock_offset: f64,
    pub protocol: ProtocolSpec,
    pub distortion: CalibrationDistortion,
    pub reference_rate: f64,
    pub device_rate: f64,
    pub mocap_rate: f64,
}

impl Default for CalibrationScenario {
    fn default() -> Self {
        Self {
            point: (0.0, 0.0),
            direction: [0.0, 0.0, 1.0],
            sensor_yaw: 0.0,
            clock_offset: 0.0,
            protocol: ProtocolSpec::default(),
            distortion: CalibrationDistortion::default(),
            reference_rate: 1600.0,
            device_rate: 1000.0,
            mocap_rate: 200.0,
        }
    }
}

/// Calibration metrics implied by a scenario's distortion chain, computed
/// directly from the generator without noise, quantization or segmentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedCalibration {
    pub max_error: [f64; 3],
    pub linearity_pct: f64,
    pub repeatability_pct: f64,
    pub hysteresis_pct: f64,
}

impl CalibrationScenario {
    pub fn expected_metrics(&self, full_scale: f64, exclusion: f64) -> ExpectedCalibration {
        let p = &self.protocol;
        let d = &self.distortion;
        let norm = Vector3::from(self.direction).norm();
        let u: [f64; 3] = std::array::from_fn(|k| (self.direction[k] / norm).abs());
        let loaded = (0..3).fold(0, |best, k| if u[k] > u[best] { k } else { best });

        let mut max_error = [0.0; 3];
        for w in p.phases().evaluation_windows(exclusion) {
            let n = (w.duration() * 1000.0).ceil() as usize;
            for i in 0..=n {
                let t = w.start + w.duration() * i as f64 / n as f64;
                let (f, seg) = p.force(t);
                let e = (d.apply(f, seg, p.max_force) - f).abs();
                for k in 0..3 {
                    max_error[k] = f64::max(max_error[k], u[k] * e);
                }
            }
        }

        let grid: Vec<f64> = (0..=2000).map(|i| p.max_force * i as f64 / 2000.0).collect();
        let up: Vec<f64> = grid.iter().map(|&f| d.apply(f, ProtocolSegment::RampUp, p.max_force)).collect();
        let down: Vec<f64> = grid.iter().map(|&f| d.apply(f, ProtocolSegment::RampDown, p.max_force)).collect();
        let slope = (up[up.len() - 1] - up[0]) / p.max_force;
        let linearity = grid.iter().zip(&up).fold(0.0f64, |m, (f, o)| m.max((o - up[0] - slope * f).abs()));
        let hysteresis = up.iter().zip(&down).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = u[loaded] * 100.0 / full_scale;
        ExpectedCalibration {
            max_error,
            linearity_pct: scale * linearity,
            repeatability_pct: scale * d.repeat_offset.abs(),
            hysteresis_pct: scale * hysteresis,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedCalibration {
    /// Reference sensor readings in its own frame, on its own clock.
    pub reference: TimeSeries,
    /// Treadmill wrench.
    pub device: TimeSeries,
    /// Reference sensor pose: `x, y, z, qw, qx, qy, qz`.
    pub pose: TimeSeries,
    /// Generated phase boundaries on the device clock.
    pub phases: ProtocolPhases,
}

/// Calibration (grid) positions with a margin from the surface edges.
pub fn calibration_grid(half_length: f64, half_width: f64, columns: usize, rows: usize, margin: f64) -> Vec<(f64, f64)> {
    let (lx, ly) = (half_length * (1.0 - margin), half_width * (1.0 - margin));
    let at = |k: usize, n: usize, half: f64| if n == 1 { 0.0 } else { -half + 2.0 * half * k as f64 / (n - 1) as f64 };
    let mut out = Vec::with_capacity(columns * rows);
    for j in 0..rows {
        for i in 0..columns {
            out.push((at(i, columns, lx), at(j, rows, ly)));
        }
    }
    out
}

pub fn simulate_calibration_run(
    model: &TreadmillModel,
    scenario: &CalibrationScenario,
    rng: &mut SimRng,
) -> Result<SimulatedCalibration> {
    model.validate()?;
    let u = Vector3::from(scenario.direction);
    if !(u.norm() > 0.0) {
        return Err(Error::Config("force direction must be non-zero".into()));
    }
    let u = u.normalize();
    let p = &scenario.protocol;
    let duration = p.duration();
    let rot = UnitQuaternion::from_euler_angles(0.0, 0.0, scenario.sensor_yaw);

    let n_ref = (duration * scenario.reference_rate).round() as usize;
    let mut reference = [Vec::with_capacity(n_ref), Vec::with_capacity(n_ref), Vec::with_capacity(n_ref)];
    for k in 0..n_ref {
        let t = k as f64 / scenario.reference_rate - scenario.clock_offset;
        let (f, _) = p.force(t);
        let local = rot.inverse() * (u * f);
        for a in 0..3 {
            reference[a].push(local[a]);
        }
    }

    let q = model.quantizer()?;
    let n_dev = (duration * scenario.device_rate).round() as usize;
    let mut device: Vec<Vec<f64>> = vec![Vec::with_capacity(n_dev); 6];
    let r = [scenario.point.0, scenario.point.1, model.surface_height];
    for i in 0..n_dev {
        let t = i as f64 / scenario.device_rate;
        let (f, seg) = p.force(t);
        let fd = scenario.distortion.apply(f, seg, p.max_force);
        let mut force = [0.0; 3];
        for a in 0..3 {
            let mut v = u[a] * fd + gauss(rng, scenario.distortion.noise);
            if let Some(step) = q[a] {
                v = quantize(v, step);
            }
            force[a] = v;
        }
        let m = cross(r, force);
        for a in 0..3 {
            device[a].push(force[a]);
            device[3 + a].push(m[a]);
        }
    }

    let n_pose = (duration * scenario.mocap_rate).round() as usize;
    let qc = rot.quaternion();
    let pose_values = [r[0], r[1], r[2], qc.w, qc.i, qc.j, qc.k];
    let pose = TimeSeries::from_channels(
        scenario.mocap_rate,
        0.0,
        crate::calibration::POSE_CHANNELS.iter().zip(pose_values).map(|(c, v)| (*c, vec![v; n_pose])).collect(),
    )?;
    let [rx, ry, rz] = reference;
    Ok(SimulatedCalibration {
        reference: TimeSeries::from_channels(scenario.reference_rate, 0.0, vec![("Fx", rx), ("Fy", ry), ("Fz", rz)])?,
        device: TimeSeries::from_channels(scenario.device_rate, 0.0, WRENCH_CHANNELS.iter().copied().zip(device).collect())?,
        pose,
        phases: p.phases(),
    })
}

/// Sensor-level noise summed into a wrench: each sensor contributes
/// independent noise with half the per-axis σ, so the summed force carries
/// the model's σ and the moments carry the lever-arm weighted sum.
fn noise_wrench(model: &TreadmillModel, rng: &mut SimRng) -> Result<Wrench> {
    let mut readings = [[0.0; 3]; 4];
    for r in readings.iter_mut() {
        for (a, v) in r.iter_mut().enumerate() {
            *v = gauss(rng, 0.5 * model.noise.white[a]);
        }
    }
    wrench_from_sensor_array(&readings, &model.sensor_positions)
}

fn add_and_quantize(w: Wrench, n: Wrench, q: &[Option<f64>; 3]) -> Wrench {
    let mut out = Wrench::new(
        std::array::from_fn(|k| w.force[k] + n.force[k]),
        std::array::from_fn(|k| w.moment[k] + n.moment[k]),
    );
    for (v, step) in out.force.iter_mut().zip(q) {
        if let Some(s) = step {
            *v = quantize(*v, *s);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearOptions {
    pub trials: usize,
    pub samples_per_trial: usize,
    /// Largest angle between the force and the vertical (rad).
    pub max_polar: f64,
    pub min_force: f64,
    pub max_force: f64,
}

impl Default for ShearOptions {
    fn default() -> Self {
        Self { trials: 15, samples_per_trial: 200, max_polar: 35f64.to_radians(), min_force: 200.0, max_force: 600.0 }
    }
}

/// Pushes through `(x, y, z_s)` in random directions; one wrench list per trial.
pub fn simulate_shear_trials(
    model: &TreadmillModel,
    point: (f64, f64),
    opts: &ShearOptions,
    rng: &mut SimRng,
) -> Result<Vec<Vec<Wrench>>> {
    model.validate()?;
    if !(model.surface_height > 0.0) {
        return Err(Error::Config("shear trials need a surface height > 0".into()));
    }
    let q = model.quantizer()?;
    let contact = [point.0, point.1, model.surface_height];
    let mut trials = Vec::with_capacity(opts.trials);
    for _ in 0..opts.trials {
        let mut samples = Vec::with_capacity(opts.samples_per_trial);
        for _ in 0..opts.samples_per_trial {
            let polar = rng.random_range(0.0..=opts.max_polar);
            let azimuth = rng.random_range(0.0..2.0 * PI);
            let mag = rng.random_range(opts.min_force..=opts.max_force);
            let f = [
                mag * polar.sin() * azimuth.cos(),
                mag * polar.sin() * azimuth.sin(),
                -mag * polar.cos(),
            ];
            let w = Wrench::from_point_force(contact, f);
            samples.push(add_and_quantize(w, noise_wrench(model, rng)?, &q));
        }
        trials.push(samples);
    }
    Ok(trials)
}

/// 28 evenly spaced placements: seven columns of four, alternate columns
/// offset by half a row so that eight distinct rows are covered.
pub fn cop_calibration_grid(half_length: f64, half_width: f64, margin: f64) -> Vec<(f64, f64)> {
    let (lx, ly) = (half_length * (1.0 - margin), half_width * (1.0 - margin));
    let mut out = Vec::with_capacity(28);
    for i in 0..7 {
        let x = -lx + 2.0 * lx * i as f64 / 6.0;
        for j in 0..4 {
            let m = 2 * j + i % 2;
            out.push((x, -ly + 2.0 * ly * m as f64 / 7.0));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopGridOptions {
    pub weight_kg: f64,
    /// Time the weight rests on each point (s).
    pub hold: f64,
    /// Unloaded time before each placement (s).
    pub gap: f64,
    pub rate: f64,
    pub mocap_rate: f64,
}

impl Default for CopGridOptions {
    fn default() -> Self {
        Self { weight_kg: 15.0, hold: 2.0, gap: 0.5, rate: 1000.0, mocap_rate: 200.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopGridRecording {
    /// `Fx, Fy, Fz, Mx, My, Mz`.
    pub wrench: TimeSeries,
    /// Weight marker `x, y, z`.
    pub mocap: TimeSeries,
    pub truth: Vec<(f64, f64)>,
    /// Device COP each placement produces before noise.
    pub device_positions: Vec<(f64, f64)>,
}

pub fn simulate_cop_grid(
    model: &TreadmillModel,
    points: &[(f64, f64)],
    opts: &CopGridOptions,
    rng: &mut SimRng,
) -> Result<CopGridRecording> {
    model.validate()?;
    if points.is_empty() {
        return Err(Error::Config("COP grid needs at least one point".into()));
    }
    let q = model.quantizer()?;
    let (gap_n, hold_n) = ((opts.gap * opts.rate).round() as usize, (opts.hold * opts.rate).round() as usize);
    let load = [0.0, 0.0, -opts.weight_kg * GRAVITY];
    let device_positions: Vec<(f64, f64)> = points.iter().map(|&p| model.cop_distortion.device_position(p)).collect();
    let mut ws = Vec::with_capacity(points.len() * (gap_n + hold_n) + gap_n);
    for d in &device_positions {
        for _ in 0..gap_n {
            ws.push(add_and_quantize(Wrench::default(), noise_wrench(model, rng)?, &q));
        }
        let loaded = Wrench::from_point_force([d.0, d.1, 0.0], load);
        for _ in 0..hold_n {
            ws.push(add_and_quantize(loaded, noise_wrench(model, rng)?, &q));
        }
    }
    for _ in 0..gap_n {
        ws.push(add_and_quantize(Wrench::default(), noise_wrench(model, rng)?, &q));
    }
    let wrench = crate::cop::wrenches_to_series(opts.rate, 0.0, &ws)?;

    let block = opts.gap + opts.hold;
    let n_mocap = (wrench.duration() * opts.mocap_rate).floor() as usize + 1;
    let mut mx = Vec::with_capacity(n_mocap);
    let mut my = Vec::with_capacity(n_mocap);
    for k in 0..n_mocap {
        let t = k as f64 / opts.mocap_rate;
        let idx = ((t / block).floor() as usize).min(points.len() - 1);
        mx.push(points[idx].0);
        my.push(points[idx].1);
    }
    let mocap = TimeSeries::from_channels(opts.mocap_rate, 0.0, vec![("x", mx), ("y", my), ("z", vec![0.0; n_mocap])])?;
    Ok(CopGridRecording { wrench, mocap, truth: points.to_vec(), device_positions })
}

/// Double-bump vertical profile and the shear components of one stance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitProfile {
    /// Approximate height of both peaks in body weights.
    pub peak_ratio: f64,
    /// Mid-stance valley in body weights.
    pub valley_ratio: f64,
    /// Stance share of the stride.
    pub stance_fraction: f64,
    /// Braking/propulsion amplitude in body weights.
    pub anterior_ratio: f64,
    pub lateral_ratio: f64,
}

impl Default for GaitProfile {
    fn default() -> Self {
        Self { peak_ratio: 1.2, valley_ratio: 0.75, stance_fraction: 0.6, anterior_ratio: 0.2, lateral_ratio: 0.05 }
    }
}

impl GaitProfile {
    /// `(F_x, F_y, F_z)` in body weights at stance fraction `s ∈ [0, 1)`.
    ///
    /// `F_z = sqrt(sin πs)·(a − b·cos 4πs)`: steep loading and unloading,
    /// peaks near 25% and 75%, valley `a − b` at 50%.
    pub fn stance(&self, s: f64) -> [f64; 3] {
        let root = (PI / 4.0).sin().sqrt();
        let a = 0.5 * (self.peak_ratio / root + self.valley_ratio);
        let b = 0.5 * (self.peak_ratio / root - self.valley_ratio);
        let fz = (PI * s).sin().max(0.0).sqrt() * (a - b * (4.0 * PI * s).cos());
        [-self.anterior_ratio * (2.0 * PI * s).sin(), self.lateral_ratio * (PI * s).sin(), fz]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitOptions {
    pub body_weight: f64,
    /// Stride period (s).
    pub period: f64,
    pub duration: f64,
    /// First touchdown (s).
    pub start: f64,
    pub rate: f64,
}

impl Default for GaitOptions {
    fn default() -> Self {
        Self { body_weight: 90.0 * GRAVITY, period: 0.65, duration: 20.0, start: 0.1, rate: 1000.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedGait {
    pub series: TimeSeries,
    /// Sample index of every generated touchdown.
    pub touchdowns: Vec<usize>,
}

impl SimulatedGait {
    pub fn touchdown_times(&self) -> Vec<f64> {
        self.touchdowns.iter().map(|&i| self.series.time(i)).collect()
    }
}

/// Identical strides on whole-sample boundaries plus the model's white noise.
pub fn simulate_gait(
    model: &TreadmillModel,
    profile: &GaitProfile,
    opts: &GaitOptions,
    rng: &mut SimRng,
) -> Result<SimulatedGait> {
    model.validate()?;
    if !(opts.period > 0.0 && opts.duration > 0.0 && opts.rate > 0.0 && opts.body_weight >= 0.0) {
        return Err(Error::Config("gait period, duration and rate must be > 0, body weight >= 0".into()));
    }
    if !(profile.stance_fraction > 0.0 && profile.stance_fraction < 1.0) {
        return Err(Error::Config("stance fraction must be in (0, 1)".into()));
    }
    let q = model.quantizer()?;
    let n = (opts.duration * opts.rate).round() as usize;
    let period = (opts.period * opts.rate).round() as usize;
    let stance = (profile.stance_fraction * period as f64).round() as usize;
    let offset = (opts.start * opts.rate).round() as usize;
    let mut channels: Vec<Vec<f64>> = vec![Vec::with_capacity(n); 3];
    for i in 0..n {
        let shape = if i >= offset && (i - offset) % period < stance {
            profile.stance(((i - offset) % period) as f64 / stance as f64)
        } else {
            [0.0; 3]
        };
        for a in Axis::ALL {
            let k = a.index();
            let mut v = opts.body_weight * shape[k] + gauss(rng, model.noise.white[k]);
            if let Some(step) = q[k] {
                v = quantize(v, step);
            }
            channels[k].push(v);
        }
    }
    let touchdowns = if opts.body_weight > 0.0 { (offset..n).step_by(period).collect() } else { Vec::new() };
    let [fx, fy, fz]: [Vec<f64>; 3] = channels.try_into().expect("three axes");
    Ok(SimulatedGait {
        series: TimeSeries::from_channels(opts.rate, 0.0, vec![("Fx", fx), ("Fy", fy), ("Fz", fz)])?,
        touchdowns,
    })
}

/// Unloaded treadmill with the belt running at `belt_speed`.
pub fn simulate_noise(
    model: &TreadmillModel,
    belt_speed: f64,
    duration: f64,
    rate: f64,
    rng: &mut SimRng,
) -> Result<TimeSeries> {
    model.validate()?;
    if !(belt_speed >= 0.0) {
        return Err(Error::Config("belt speed must be >= 0".into()));
    }
    let q = model.quantizer()?;
    let n = (duration * rate).round() as usize;
    let mut channels: Vec<(&str, Vec<f64>)> = Axis::ALL.iter().map(|a| (a.force_channel(), Vec::with_capacity(n))).collect();
    for i in 0..n {
        let t = i as f64 / rate;
        for a in Axis::ALL {
            let mut v = model.noise.sample(a, t, belt_speed, rng);
            if let Some(step) = q[a.index()] {
                v = quantize(v, step);
            }
            channels[a.index()].1.push(v);
        }
    }
    TimeSeries::from_channels(rate, 0.0, channels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::{self, CalibrationRun, EvaluateOptions, SegmentOptions};
    use crate::cop::{self, CopSample, DEFAULT_FZ_MIN};
    use crate::gait::{self, AverageOptions, StrideOptions};
    use crate::signal::{self, DampingOptions, SpectrumOptions};

    #[test]
    fn same_seed_same_output() {
        let m = TreadmillModel::default();
        let a = simulate_noise(&m, 1.0, 2.0, 1000.0, &mut seeded(3)).unwrap();
        let b = simulate_noise(&m, 1.0, 2.0, 1000.0, &mut seeded(3)).unwrap();
        let c = simulate_noise(&m, 1.0, 2.0, 1000.0, &mut seeded(4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn quantization_matches_amplifier() {
        let m = TreadmillModel::default();
        let ts = simulate_noise(&m, 0.5, 1.0, 1000.0, &mut seeded(1)).unwrap();
        let step = m.resolution(Axis::Z).unwrap();
        for v in ts.channel("Fz").unwrap() {
            let k = v / step;
            assert!((k - k.round()).abs() < 1e-6);
        }
    }

    #[test]
    fn invalid_models_rejected() {
        let mut m = TreadmillModel::default();
        m.damping[1] = 1.0;
        assert!(m.validate().is_err());
        let mut m = TreadmillModel::default();
        m.sensor_positions[0] = [0.7, 0.3];
        assert!(m.validate().is_err());
    }

    #[test]
    fn impact_round_trip() {
        let mut m = TreadmillModel::ideal();
        m.natural_frequency[2] = 169.0;
        m.damping[2] = 0.0093;
        let sim = simulate_impact(&m, Axis::Z, 100.0, 10_000.0, 1.0, &mut seeded(1)).unwrap();
        let peak = signal::estimate_natural_frequency(&sim.series, "Fz", &SpectrumOptions::default()).unwrap();
        assert!((peak.f0 - 169.0).abs() <= 1.0, "{}", peak.f0);
        let fit = signal::fit_damping(&sim.series, "Fz", peak.f0, &DampingOptions::default()).unwrap();
        assert!((fit.xi - 0.0093).abs() / 0.0093 < 0.05, "{}", fit.xi);
    }

    #[test]
    fn heavy_damping_lowers_damped_frequency() {
        let mut m = TreadmillModel::ideal();
        m.damping[2] = 0.5;
        let sim = simulate_impact(&m, Axis::Z, 100.0, 10_000.0, 1.0, &mut seeded(1)).unwrap();
        assert!((sim.damped_frequency / sim.natural_frequency - 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_amplitude_impact_has_no_peak() {
        let m = TreadmillModel { noise: NoiseModel::white_only([1.0; 3]), ..TreadmillModel::default() };
        let sim = simulate_impact(&m, Axis::Z, 0.0, 10_000.0, 1.0, &mut seeded(1)).unwrap();
        assert!(matches!(
            signal::estimate_natural_frequency(&sim.series, "Fz", &SpectrumOptions::default()),
            Err(Error::NoPeak { .. })
        ));
    }

    #[test]
    fn protocol_phases_are_generator_truth() {
        let sim = simulate_calibration_run(&TreadmillModel::ideal(), &CalibrationScenario::default(), &mut seeded(1)).unwrap();
        let run = CalibrationRun::synchronize(1, &sim.reference, &sim.device, &sim.pose, 2.0).unwrap();
        let found = calibration::segment_protocol(&run.reference, &SegmentOptions::default()).unwrap();
        let pairs = found
            .preloads
            .iter()
            .zip(&sim.phases.preloads)
            .chain(found.ramps_up.iter().zip(&sim.phases.ramps_up))
            .chain(found.ramps_down.iter().zip(&sim.phases.ramps_down));
        for (a, b) in pairs {
            assert!((a.start - b.start).abs() < 0.2 && (a.end - b.end).abs() < 0.2, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn undistorted_run_is_within_one_step() {
        let model = TreadmillModel { noise: NoiseModel::silent(), ..TreadmillModel::default() };
        let scenario = CalibrationScenario { sensor_yaw: 0.4, clock_offset: 0.25, point: (0.3, -0.1), ..Default::default() };
        let sim = simulate_calibration_run(&model, &scenario, &mut seeded(1)).unwrap();
        let run = CalibrationRun::synchronize(1, &sim.reference, &sim.device, &sim.pose, 2.0).unwrap();
        assert!((run.position.0 - 0.3).abs() < 1e-12);
        let res = calibration::evaluate_run(&run, &EvaluateOptions::default()).unwrap();
        let step = model.resolution(Axis::Z).unwrap();
        assert!(res.max_error[2] <= step + 1e-3, "{:?} step {step}", res.max_error);
    }

    #[test]
    fn injected_distortions_match_expected_metrics() {
        let model = TreadmillModel { noise: NoiseModel::silent(), ..TreadmillModel::default() };
        let cases = [
            CalibrationDistortion { gain: 1.01, ..Default::default() },
            CalibrationDistortion { nonlinearity: 0.01, ..Default::default() },
            CalibrationDistortion { hysteresis_width: 0.5, ..Default::default() },
            CalibrationDistortion { repeat_offset: 0.8, ..Default::default() },
        ];
        for d in cases {
            let scenario = CalibrationScenario { distortion: d, clock_offset: 0.1, ..Default::default() };
            let sim = simulate_calibration_run(&model, &scenario, &mut seeded(1)).unwrap();
            let run = CalibrationRun::synchronize(1, &sim.reference, &sim.device, &sim.pose, 2.0).unwrap();
            let got = calibration::evaluate_run(&run, &EvaluateOptions::default()).unwrap();
            let want = scenario.expected_metrics(200.0, 1.0);
            assert!((got.max_error[2] - want.max_error[2]).abs() < 0.05, "{d:?}: {:?} vs {:?}", got.max_error, want.max_error);
            assert!((got.linearity_pct - want.linearity_pct).abs() < 0.01, "{d:?}: {got:?} vs {want:?}");
            assert!((got.hysteresis_pct - want.hysteresis_pct).abs() < 0.01, "{d:?}: {got:?} vs {want:?}");
            assert!((got.repeatability_pct - want.repeatability_pct).abs() < 0.01, "{d:?}: {got:?} vs {want:?}");
        }
    }

    #[test]
    fn shear_offset_recovered_noise_free() {
        let trials = simulate_shear_trials(&TreadmillModel::ideal(), (0.2, 0.1), &ShearOptions::default(), &mut seeded(5)).unwrap();
        let fit = cop::optimize_shear_offset(&trials[0], DEFAULT_FZ_MIN).unwrap();
        assert!((fit.a_z - 0.078).abs() < 1e-9);
        assert!(fit.spread_x < 1e-9 && fit.spread_y < 1e-9);
    }

    #[test]
    fn cop_grid_layout() {
        let g = cop_calibration_grid(0.7, 0.25, 0.1);
        assert_eq!(g.len(), 28);
        let mut ys: Vec<f64> = g.iter().map(|p| p.1).collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert_eq!(ys.len(), 8);
        assert!(g.iter().all(|p| p.0.abs() <= 0.63 + 1e-12 && p.1.abs() <= 0.225 + 1e-12));
    }

    #[test]
    fn undistorted_grid_has_zero_raw_error() {
        let model = TreadmillModel::ideal();
        let rec = simulate_cop_grid(&model, &cop_calibration_grid(0.7, 0.25, 0.1), &CopGridOptions::default(), &mut seeded(1)).unwrap();
        let samples = cop::static_placements(&rec.wrench, Some(&rec.mocap), 0.0, DEFAULT_FZ_MIN, 0.2, 0.5).unwrap();
        assert_eq!(samples.len(), 28);
        for s in &samples {
            let (ex, ey) = s.error().unwrap();
            assert!(ex.abs() < 1e-12 && ey.abs() < 1e-12);
        }
    }

    #[test]
    fn distortion_inverse_is_consistent() {
        let d = CopDistortion::typical();
        for &(x, y) in &cop_calibration_grid(0.7, 0.25, 0.1) {
            let r = d.device_position((x, y));
            let (ex, ey) = d.error_at(r.0, r.1);
            assert!((r.0 - ex - x).abs() < 1e-15 && (r.1 - ey - y).abs() < 1e-15);
            assert!(ex.abs() <= 0.02 && ey.abs() <= 0.012);
        }
    }

    #[test]
    fn quartic_distortion_coefficients_recovered() {
        let model = TreadmillModel { cop_distortion: CopDistortion::typical(), ..TreadmillModel::ideal() };
        let rec = simulate_cop_grid(&model, &cop_calibration_grid(0.7, 0.25, 0.1), &CopGridOptions::default(), &mut seeded(1)).unwrap();
        let samples: Vec<CopSample> = cop::static_placements(&rec.wrench, Some(&rec.mocap), 0.0, DEFAULT_FZ_MIN, 0.2, 0.5).unwrap();
        let fit = cop::fit_cop_error_surface(&samples, 0.0).unwrap();
        for &(x, y) in &rec.device_positions {
            let truth = model.cop_distortion.error_at(x, y);
            let got = fit.error_at(x, y);
            assert!((truth.0 - got.0).abs() < 1e-12 && (truth.1 - got.1).abs() < 1e-12);
        }
    }

    #[test]
    fn gait_touchdowns_found() {
        let model = TreadmillModel::ideal();
        let opts = GaitOptions { period: 1.1, duration: 20.0, ..Default::default() };
        let sim = simulate_gait(&model, &GaitProfile::default(), &opts, &mut seeded(1)).unwrap();
        let w = gait::segment_strides(&sim.series, opts.body_weight, &StrideOptions::default()).unwrap();
        assert_eq!(w.len(), 18);
        for (s, truth) in w.iter().zip(&sim.touchdowns) {
            assert!(s.start.abs_diff(*truth) <= 2);
        }
        let peak = sim.series.channel("Fz").unwrap().iter().cloned().fold(0.0, f64::max);
        assert!(peak > opts.body_weight * 1.15 && peak < opts.body_weight * 1.3, "{}", peak / opts.body_weight);
    }

    #[test]
    fn zero_body_weight_walk_has_no_strides() {
        let opts = GaitOptions { body_weight: 0.0, ..Default::default() };
        let sim = simulate_gait(&TreadmillModel::default(), &GaitProfile::default(), &opts, &mut seeded(2)).unwrap();
        assert!(matches!(
            gait::segment_strides(&sim.series, 700.0, &StrideOptions::default()),
            Err(Error::NoStridesDetected)
        ));
        let _ = AverageOptions::default();
    }

    #[test]
    fn idle_noise_band_matches_configuration() {
        let m = TreadmillModel { quantize: false, ..TreadmillModel::default() };
        let ts = simulate_noise(&m, 0.0, 10.0, 1000.0, &mut seeded(9)).unwrap();
        let rep = signal::noise_stats(&ts, 0.0, &SpectrumOptions::default()).unwrap();
        for a in Axis::ALL {
            let band = rep.channel(a.force_channel()).unwrap().band;
            let expected = m.noise.expected_band(a, 0.0);
            assert!((band - expected).abs() / expected < 0.05, "{a}: {band} vs {expected}");
        }
    }

    #[test]
    fn noise_band_grows_with_speed() {
        let m = TreadmillModel::default();
        let band = |speed: f64, ch: &str| {
            let ts = simulate_noise(&m, speed, 5.0, 1000.0, &mut seeded(11)).unwrap();
            signal::noise_stats(&ts, speed, &SpectrumOptions::default()).unwrap().channel(ch).unwrap().band
        };
        for ch in ["Fx", "Fy"] {
            let b: Vec<f64> = [0.0, 0.5, 1.0, 1.3].iter().map(|&s| band(s, ch)).collect();
            assert!(b.windows(2).all(|w| w[1] > w[0]), "{ch}: {b:?}");
            assert!(b[3] <= 8.0);
        }
        assert!(band(1.3, "Fz") <= 4.0);
    }

    #[test]
    fn mains_line_stands_out() {
        let m = TreadmillModel { noise: NoiseModel { line_amplitude: 2.0, ..NoiseModel::default() }, ..TreadmillModel::default() };
        let ts = simulate_noise(&m, 0.0, 10.0, 1000.0, &mut seeded(2)).unwrap();
        let spec = signal::amplitude_spectrum(ts.channel("Fz").unwrap(), 1000.0, &SpectrumOptions::default());
        let med = crate::numeric::median(&spec.values);
        assert!(spec.max_near(50.0, 0.5) >= 3.0 * med);
    }
}
