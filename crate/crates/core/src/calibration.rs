//! ISO 376 style evaluation of calibration runs.
//!
//! A run pairs an external 3-axis reference sensor with the treadmill's own
//! wrench output while a servo drives the protocol: two preload plateaus at
//! full force, then two continuous up/down ramps. Metrics are expressed as a
//! percentage of the protocol's full-scale force.

use delaunator::{triangulate, Point};
use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::numeric::{mean, next_pow2, polyfit};
use crate::sensing::Axis;
use crate::series::{interp_uniform, Table, TimeSeries};

/// Full scale used to normalize percentages (N).
pub const DEFAULT_FULL_SCALE: f64 = 200.0;
/// Time excluded at each end of every evaluation window (s).
pub const TRANSIENT_EXCLUSION: f64 = 1.0;
pub const HYSTERESIS_DEGREE: usize = 6;

pub const FORCE_CHANNELS: [&str; 3] = ["Fx", "Fy", "Fz"];
pub const POSE_CHANNELS: [&str; 7] = ["x", "y", "z", "qw", "qx", "qy", "qz"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }

    /// Shrinks both ends by `margin`; `None` if nothing is left.
    pub fn shrink(&self, margin: f64) -> Option<Interval> {
        let (s, e) = (self.start + margin, self.end - margin);
        (e > s).then_some(Interval::new(s, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolPhases {
    pub preloads: [Interval; 2],
    pub ramps_up: [Interval; 2],
    pub ramps_down: [Interval; 2],
}

impl ProtocolPhases {
    /// Steady-state windows used for the accuracy check.
    pub fn evaluation_windows(&self, exclusion: f64) -> Vec<Interval> {
        self.preloads
            .iter()
            .chain(&self.ramps_up)
            .chain(&self.ramps_down)
            .filter_map(|w| w.shrink(exclusion))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentOptions {
    /// A plateau holds `|dF/dt|` below this (N/s).
    pub plateau_slope: f64,
    pub plateau_min_duration: f64,
    /// Plateaus sit at or above this fraction of the maximum force.
    pub plateau_level: f64,
    /// Width of the moving average applied before differentiation (s).
    pub smoothing: f64,
    /// Level crossings faster than this are steps, not ramps (s).
    pub min_ramp_duration: f64,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        Self {
            plateau_slope: 1.0,
            plateau_min_duration: 5.0,
            plateau_level: 0.8,
            smoothing: 0.1,
            min_ramp_duration: 1.0,
        }
    }
}

fn force_magnitude(ts: &TimeSeries) -> Result<Vec<f64>> {
    let (x, y, z) = (ts.channel("Fx")?, ts.channel("Fy")?, ts.channel("Fz")?);
    Ok((0..ts.len()).map(|i| (x[i] * x[i] + y[i] * y[i] + z[i] * z[i]).sqrt()).collect())
}

fn moving_average(x: &[f64], half: usize) -> Vec<f64> {
    let mut prefix = vec![0.0; x.len() + 1];
    for (i, v) in x.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(x.len());
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Finds the preload plateaus and the up/down ramps in a reference recording.
///
/// Ramp boundaries come from a straight-line fit between the 10% and 90%
/// crossings, extrapolated to zero and to the plateau level, so they do not
/// depend on where the noise floor happens to sit.
pub fn segment_protocol(reference: &TimeSeries, opts: &SegmentOptions) -> Result<ProtocolPhases> {
    let raw = force_magnitude(reference)?;
    let dt = reference.dt();
    let smooth = moving_average(&raw, ((opts.smoothing / dt / 2.0).round() as usize).max(1));
    let peak = smooth.iter().cloned().fold(0.0, f64::max);
    let mismatch = |p: usize, u: usize, d: usize| Error::ProtocolMismatch { preloads: p, ramps_up: u, ramps_down: d };
    if !(peak > 0.0) {
        return Err(mismatch(0, 0, 0));
    }

    let h = ((0.05 / dt).round() as usize).max(1);
    let mut plateaus = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..=smooth.len() {
        let flat = i >= h && i + h < smooth.len() && {
            let slope = (smooth[i + h] - smooth[i - h]) / (2.0 * h as f64 * dt);
            slope.abs() < opts.plateau_slope && smooth[i] >= opts.plateau_level * peak
        };
        match (flat, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                if (i - 1 - s) as f64 * dt >= opts.plateau_min_duration {
                    plateaus.push((s, i - 1));
                }
                run_start = None;
            }
            _ => {}
        }
    }
    let level = if plateaus.is_empty() {
        peak
    } else {
        mean(&plateaus.iter().flat_map(|&(s, e)| raw[s..=e].iter().cloned()).collect::<Vec<_>>())
    };

    let (lo, hi) = (0.1 * level, 0.9 * level);
    let mut ups = Vec::new();
    let mut downs = Vec::new();
    let mut high = smooth[0] >= hi;
    let mut last_lo = 0usize;
    let mut last_hi = 0usize;
    for (i, &v) in smooth.iter().enumerate() {
        if v <= lo {
            last_lo = i;
            if high {
                high = false;
                downs.push((last_hi, i));
            }
        }
        if v >= hi {
            last_hi = i;
            if !high {
                high = true;
                ups.push((last_lo, i));
            }
        }
    }

    let fit_ramp = |(a, b): (usize, usize), rising: bool| -> Option<Interval> {
        if ((b - a) as f64) * dt < opts.min_ramp_duration {
            return None;
        }
        let idx: Vec<usize> = (a..=b).filter(|&i| raw[i] > lo && raw[i] < hi).collect();
        if idx.len() < 2 {
            return None;
        }
        let t: Vec<f64> = idx.iter().map(|&i| reference.time(i)).collect();
        let f: Vec<f64> = idx.iter().map(|&i| raw[i]).collect();
        let line = crate::numeric::fit_line(&t, &f);
        let at = |force: f64| (force - line.intercept) / line.slope;
        Some(if rising {
            Interval::new(at(0.0), at(level))
        } else {
            Interval::new(at(level), at(0.0))
        })
    };
    let ramps_up: Vec<Interval> = ups.into_iter().filter_map(|r| fit_ramp(r, true)).collect();
    let ramps_down: Vec<Interval> = downs.into_iter().filter_map(|r| fit_ramp(r, false)).collect();
    let preloads: Vec<Interval> = plateaus
        .iter()
        .map(|&(s, e)| Interval::new(reference.time(s), reference.time(e)))
        .collect();

    match (preloads.as_slice(), ramps_up.as_slice(), ramps_down.as_slice()) {
        ([p0, p1], [u0, u1], [d0, d1]) => Ok(ProtocolPhases {
            preloads: [*p0, *p1],
            ramps_up: [*u0, *u1],
            ramps_down: [*d0, *d1],
        }),
        _ => Err(mismatch(preloads.len(), ramps_up.len(), ramps_down.len())),
    }
}

/// Rotates reference-sensor readings into the treadmill frame using the
/// motion-capture pose, interpolated onto each reference sample.
pub fn rotate_reference(reference: &TimeSeries, pose: &TimeSeries) -> Result<TimeSeries> {
    let q = [pose.channel("qw")?, pose.channel("qx")?, pose.channel("qy")?, pose.channel("qz")?];
    let f = [reference.channel("Fx")?, reference.channel("Fy")?, reference.channel("Fz")?];
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for i in 0..reference.len() {
        let t = reference.time(i);
        let c = q.map(|ch| interp_uniform(ch, pose.start(), pose.rate(), t));
        let quat = Quaternion::new(c[0], c[1], c[2], c[3]);
        if !(quat.norm() > 1e-9) {
            return Err(Error::InvalidInput(format!("degenerate pose quaternion at t = {t}")));
        }
        let r = UnitQuaternion::from_quaternion(quat) * Vector3::new(f[0][i], f[1][i], f[2][i]);
        for k in 0..3 {
            out[k].push(r[k]);
        }
    }
    let [x, y, z] = out;
    TimeSeries::from_channels(reference.rate(), reference.start(), vec![("Fx", x), ("Fy", y), ("Fz", z)])
}

/// Offset `L` such that `reference(t + L) ≈ device(t)`, from the
/// cross-correlation of force-magnitude increments on the device clock, searched
/// within `±max_lag` seconds and refined by parabolic interpolation.
pub fn estimate_clock_offset(reference: &TimeSeries, device: &TimeSeries, max_lag: f64) -> Result<f64> {
    let diff = |v: Vec<f64>| -> Vec<f64> { v.windows(2).map(|w| w[1] - w[0]).collect() };
    let r_mag = force_magnitude(reference)?;
    let d_mag = diff(force_magnitude(device)?);
    let r = diff(
        (0..device.len())
            .map(|i| interp_uniform(&r_mag, reference.start(), reference.rate(), device.time(i)))
            .collect(),
    );
    let n = d_mag.len();
    let (rm, dm) = (mean(&r), mean(&d_mag));
    let size = next_pow2(2 * n);
    let mut a: Vec<Complex<f64>> = (0..size).map(|i| Complex::new(if i < n { d_mag[i] - dm } else { 0.0 }, 0.0)).collect();
    let mut b: Vec<Complex<f64>> = (0..size).map(|i| Complex::new(if i < n { r[i] - rm } else { 0.0 }, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    fwd.process(&mut a);
    fwd.process(&mut b);
    // corr[k] = Σ d[i]·r[i + k]
    let mut c: Vec<Complex<f64>> = a.iter().zip(&b).map(|(x, y)| x.conj() * y).collect();
    planner.plan_fft_inverse(size).process(&mut c);
    let corr = |k: isize| c[k.rem_euclid(size as isize) as usize].re;

    let max_k = ((max_lag * device.rate()).round() as isize).min(n as isize - 1);
    let best = (-max_k..=max_k)
        .max_by(|&x, &y| corr(x).total_cmp(&corr(y)).then(y.abs().cmp(&x.abs())))
        .ok_or_else(|| Error::Sync("empty lag range".into()))?;
    if !(corr(best) > 0.0) {
        return Err(Error::Sync("reference and device are uncorrelated".into()));
    }
    let mut shift = best as f64;
    if best.abs() < max_k {
        let (y0, y1, y2) = (corr(best - 1), corr(best), corr(best + 1));
        let denom = y0 - 2.0 * y1 + y2;
        if denom < 0.0 {
            shift += 0.5 * (y0 - y2) / denom;
        }
    }
    Ok(shift / device.rate())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRun {
    /// Reference force in treadmill coordinates on the device clock.
    pub reference: TimeSeries,
    pub device: TimeSeries,
    pub point_id: usize,
    pub position: (f64, f64),
}

impl CalibrationRun {
    /// Rotates, aligns and resamples a raw reference recording onto the
    /// device clock. Only the overlapping span is kept.
    pub fn synchronize(
        point_id: usize,
        reference: &TimeSeries,
        device: &TimeSeries,
        pose: &TimeSeries,
        max_lag: f64,
    ) -> Result<Self> {
        let world = rotate_reference(reference, pose)?;
        let lag = estimate_clock_offset(&world, device, max_lag)?;
        let (r0, r1) = (world.start(), world.time(world.len() - 1));
        let keep: Vec<usize> = (0..device.len())
            .filter(|&i| {
                let t = device.time(i) + lag;
                t >= r0 && t <= r1
            })
            .collect();
        if keep.len() < 2 {
            return Err(Error::Sync("reference and device do not overlap".into()));
        }
        let (i0, i1) = (keep[0], keep[keep.len() - 1]);
        let start = device.time(i0);
        let mut ref_channels = Vec::new();
        for c in FORCE_CHANNELS {
            let src = world.channel(c)?;
            let v = (i0..=i1)
                .map(|i| interp_uniform(src, world.start(), world.rate(), device.time(i) + lag))
                .collect();
            ref_channels.push((c.to_string(), v));
        }
        let dev_channels = device
            .channels()
            .map(|(name, data)| (name.to_string(), data[i0..=i1].to_vec()))
            .collect();
        let position = (mean(pose.channel("x")?), mean(pose.channel("y")?));
        Ok(Self {
            reference: TimeSeries::from_channels(device.rate(), start, ref_channels)?,
            device: TimeSeries::from_channels(device.rate(), start, dev_channels)?,
            point_id,
            position,
        })
    }

    /// Builds a run from series that already share one clock.
    pub fn aligned(point_id: usize, position: (f64, f64), reference: TimeSeries, device: TimeSeries) -> Result<Self> {
        if reference.len() != device.len() || reference.rate() != device.rate() || reference.start() != device.start() {
            return Err(Error::Sync("aligned series must share rate, start and length".into()));
        }
        Ok(Self { reference, device, point_id, position })
    }

    /// Axis that carries the largest reference force.
    pub fn loaded_axis(&self) -> Result<Axis> {
        let mut best = (Axis::X, -1.0);
        for axis in Axis::ALL {
            let peak = self.reference.channel(axis.force_channel())?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak > best.1 {
                best = (axis, peak);
            }
        }
        Ok(best.0)
    }

    fn pairs(&self, axis: Axis, windows: &[Interval]) -> Result<(Vec<f64>, Vec<f64>)> {
        let r = self.reference.channel(axis.force_channel())?;
        let d = self.device.channel(axis.force_channel())?;
        let mut out = (Vec::new(), Vec::new());
        for i in 0..self.device.len() {
            let t = self.device.time(i);
            if windows.iter().any(|w| w.contains(t)) {
                out.0.push(r[i]);
                out.1.push(d[i]);
            }
        }
        Ok(out)
    }
}

/// Largest `|device − reference|` per axis inside the steady-state windows.
pub fn max_error(run: &CalibrationRun, phases: &ProtocolPhases) -> Result<[f64; 3]> {
    let windows = phases.evaluation_windows(TRANSIENT_EXCLUSION);
    let mut out = [0.0; 3];
    for axis in Axis::ALL {
        let (r, d) = run.pairs(axis, &windows)?;
        out[axis.index()] = r.iter().zip(&d).fold(0.0f64, |m, (a, b)| m.max((b - a).abs()));
    }
    Ok(out)
}

/// Max deviation of the device-vs-reference ramp from its terminal line
/// (through the ramp's end points), in % of full scale. Worst of the up-ramps.
pub fn linearity(run: &CalibrationRun, phases: &ProtocolPhases, full_scale: f64) -> Result<f64> {
    let axis = run.loaded_axis()?;
    let mut worst: f64 = 0.0;
    for w in &phases.ramps_up {
        let (r, d) = run.pairs(axis, std::slice::from_ref(w))?;
        worst = worst.max(terminal_deviation(&r, &d));
    }
    Ok(100.0 * worst / full_scale)
}

/// Largest distance of `(x, y)` from the line through the first and last points.
pub fn terminal_deviation(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let (x0, y0, x1, y1) = (x[0], y[0], x[x.len() - 1], y[y.len() - 1]);
    if x1 == x0 {
        return 0.0;
    }
    let slope = (y1 - y0) / (x1 - x0);
    x.iter().zip(y).fold(0.0f64, |m, (a, b)| m.max((b - (y0 + slope * (a - x0))).abs()))
}

/// `|mean(device − reference)|` difference between the two preload plateaus.
pub fn repeatability(run: &CalibrationRun, phases: &ProtocolPhases, full_scale: f64) -> Result<f64> {
    let axis = run.loaded_axis()?;
    let mut means = Vec::with_capacity(2);
    for w in &phases.preloads {
        let win = w.shrink(TRANSIENT_EXCLUSION).unwrap_or(*w);
        let (r, d) = run.pairs(axis, &[win])?;
        if r.is_empty() {
            return Err(Error::InvalidInput("preload plateau has no samples".into()));
        }
        means.push(mean(&d.iter().zip(&r).map(|(a, b)| a - b).collect::<Vec<_>>()));
    }
    Ok(100.0 * (means[0] - means[1]).abs() / full_scale)
}

/// Which ramp pair the hysteresis polynomial is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HysteresisRamp {
    #[default]
    First,
    Second,
}

impl HysteresisRamp {
    fn index(self) -> usize {
        match self {
            HysteresisRamp::First => 0,
            HysteresisRamp::Second => 1,
        }
    }
}

impl std::str::FromStr for HysteresisRamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "first" => Ok(HysteresisRamp::First),
            "2" | "second" => Ok(HysteresisRamp::Second),
            _ => Err(Error::Config(format!("hysteresis ramp must be 1 or 2, got `{s}`"))),
        }
    }
}

pub fn hysteresis(run: &CalibrationRun, phases: &ProtocolPhases, ramp: HysteresisRamp, full_scale: f64) -> Result<f64> {
    let axis = run.loaded_axis()?;
    let k = ramp.index();
    let up = run.pairs(axis, &[phases.ramps_up[k]])?;
    let down = run.pairs(axis, &[phases.ramps_down[k]])?;
    Ok(100.0 * hysteresis_between(&up, &down)? / full_scale)
}

/// Hysteresis between an up branch and a down branch, both `(input, output)`.
///
/// Forward: fit `output = p(input)` on the up branch and take the largest
/// `|output_down − p(input_down)|`. Inverse: solve `p(i*) = output_down` and
/// take `|input_down − i*|`, converted to output units by the up branch's
/// terminal slope. The larger of the two is returned, in output units.
pub fn hysteresis_between(up: &(Vec<f64>, Vec<f64>), down: &(Vec<f64>, Vec<f64>)) -> Result<f64> {
    let (ui, uo) = up;
    let (di, dout) = down;
    if ui.len() < 2 || di.is_empty() {
        return Err(Error::InvalidInput("hysteresis needs samples on both ramp branches".into()));
    }
    let p = polyfit(ui, uo, HYSTERESIS_DEGREE)?;
    let ilo = ui.iter().cloned().fold(f64::INFINITY, f64::min);
    let ihi = ui.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let slope = (uo[uo.len() - 1] - uo[0]) / (ui[ui.len() - 1] - ui[0]);
    let (plo, phi) = (p.eval(ilo), p.eval(ihi));
    let invert = |o: f64| -> Option<f64> {
        let (mut a, mut b) = (ilo, ihi);
        let (mut fa, fb) = (plo - o, phi - o);
        if fa * fb > 0.0 {
            return None;
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            let fm = p.eval(m) - o;
            if fm == 0.0 {
                return Some(m);
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    };
    let mut worst: f64 = 0.0;
    for (i, o) in di.iter().zip(dout) {
        if *i >= ilo && *i <= ihi {
            worst = worst.max((o - p.eval(*i)).abs());
        }
        if let Some(root) = invert(*o).filter(|_| slope.is_finite()) {
            worst = worst.max(((i - root) * slope).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub point_id: usize,
    pub position: (f64, f64),
    pub loaded_axis: Axis,
    pub max_error: [f64; 3],
    pub linearity_pct: f64,
    pub repeatability_pct: f64,
    pub hysteresis_pct: f64,
    pub phases: ProtocolPhases,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluateOptions {
    pub full_scale: f64,
    pub hysteresis_ramp: HysteresisRamp,
    pub segment: SegmentOptions,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        Self {
            full_scale: DEFAULT_FULL_SCALE,
            hysteresis_ramp: HysteresisRamp::First,
            segment: SegmentOptions::default(),
        }
    }
}

pub fn evaluate_run(run: &CalibrationRun, opts: &EvaluateOptions) -> Result<PointResult> {
    let phases = segment_protocol(&run.reference, &opts.segment)?;
    Ok(PointResult {
        point_id: run.point_id,
        position: run.position,
        loaded_axis: run.loaded_axis()?,
        max_error: max_error(run, &phases)?,
        linearity_pct: linearity(run, &phases, opts.full_scale)?,
        repeatability_pct: repeatability(run, &phases, opts.full_scale)?,
        hysteresis_pct: hysteresis(run, &phases, opts.hysteresis_ramp, opts.full_scale)?,
        phases,
    })
}

/// Piecewise-linear interpolant over a Delaunay triangulation of the points.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMap {
    points: Vec<(f64, f64)>,
    values: Vec<f64>,
    triangles: Vec<[usize; 3]>,
}

pub fn build_error_map(samples: &[((f64, f64), f64)]) -> Result<ErrorMap> {
    if samples.len() < 4 {
        return Err(Error::InsufficientPoints(format!("error map needs at least 4 points, got {}", samples.len())));
    }
    let pts: Vec<Point> = samples.iter().map(|((x, y), _)| Point { x: *x, y: *y }).collect();
    let tri = triangulate(&pts);
    if tri.triangles.is_empty() {
        return Err(Error::InsufficientPoints("error map points are collinear".into()));
    }
    Ok(ErrorMap {
        points: samples.iter().map(|s| s.0).collect(),
        values: samples.iter().map(|s| s.1).collect(),
        triangles: tri.triangles.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
    })
}

impl ErrorMap {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn query(&self, x: f64, y: f64) -> Result<f64> {
        const EPS: f64 = 1e-12;
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| self.points[i]);
            let det = (b.1 - c.1) * (a.0 - c.0) + (c.0 - b.0) * (a.1 - c.1);
            if det.abs() < f64::MIN_POSITIVE {
                continue;
            }
            let l1 = ((b.1 - c.1) * (x - c.0) + (c.0 - b.0) * (y - c.1)) / det;
            let l2 = ((c.1 - a.1) * (x - c.0) + (a.0 - c.0) * (y - c.1)) / det;
            let l3 = 1.0 - l1 - l2;
            if l1 >= -EPS && l2 >= -EPS && l3 >= -EPS {
                return Ok(l1 * self.values[t[0]] + l2 * self.values[t[1]] + l3 * self.values[t[2]]);
            }
        }
        Err(Error::QueryOutsideHull { x, y })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub points: Vec<PointResult>,
    /// Max-error maps for x, y and z; absent with fewer than 4 usable points.
    pub error_maps: Option<[ErrorMap; 3]>,
}

impl CalibrationReport {
    pub fn new(mut points: Vec<PointResult>) -> Result<Self> {
        points.sort_by_key(|p| p.point_id);
        let error_maps = if points.len() >= 4 {
            let map = |k: usize| build_error_map(&points.iter().map(|p| (p.position, p.max_error[k])).collect::<Vec<_>>());
            Some([map(0)?, map(1)?, map(2)?])
        } else {
            None
        };
        Ok(Self { points, error_maps })
    }

    pub fn worst(&self, f: impl Fn(&PointResult) -> f64) -> f64 {
        self.points.iter().map(f).fold(0.0, f64::max)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::with_header(&[
            "point", "x", "y", "max_error_x", "max_error_y", "max_error_z", "linearity_pct", "repeatability_pct",
            "hysteresis_pct",
        ]);
        for p in &self.points {
            t.push(vec![
                p.point_id as f64,
                p.position.0,
                p.position.1,
                p.max_error[0],
                p.max_error[1],
                p.max_error[2],
                p.linearity_pct,
                p.repeatability_pct,
                p.hysteresis_pct,
            ]);
        }
        t
    }
}
