//! Stride segmentation and ensemble averaging of ground reaction forces.

use crate::error::{Error, Result};
use crate::numeric::{mean, median, std_sample};
use crate::series::{Table, TimeSeries};

/// Touchdown detection on the vertical force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrideOptions {
    /// Contact starts when `F_z` rises through this fraction of body weight.
    pub rise_fraction: f64,
    /// Contact ends when `F_z` falls below this fraction.
    pub fall_fraction: f64,
    /// A touchdown counts only if contact then lasts this long (s).
    pub debounce: f64,
    /// Strides whose duration differs from the median by more than this
    /// fraction are flagged as outliers.
    pub duration_tolerance: f64,
    pub channel: &'static str,
}

impl Default for StrideOptions {
    fn default() -> Self {
        Self {
            rise_fraction: 0.05,
            fall_fraction: 0.03,
            debounce: 0.05,
            duration_tolerance: 0.3,
            channel: "Fz",
        }
    }
}

/// Touchdown-to-touchdown sample range, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrideWindow {
    pub start: usize,
    pub end: usize,
    pub start_time: f64,
    pub end_time: f64,
    pub outlier: bool,
}

impl StrideWindow {
    pub fn duration(&self) -> f64 {
        self.end_time - self.start_time
    }
}

/// Sample indices at which contact begins.
pub fn touchdowns(fz: &[f64], rate: f64, bw: f64, opts: &StrideOptions) -> Vec<usize> {
    let rise = opts.rise_fraction * bw;
    let fall = opts.fall_fraction * bw;
    let hold = (opts.debounce * rate).round() as usize;
    let mut out = Vec::new();
    let mut contact = fz.first().is_some_and(|&v| v >= fall);
    for (i, &v) in fz.iter().enumerate() {
        if contact {
            if v < fall {
                contact = false;
            }
        } else if v >= rise {
            let end = (i + hold).min(fz.len() - 1);
            if fz[i..=end].iter().all(|&w| w >= fall) {
                out.push(i);
                contact = true;
            }
        }
    }
    out
}

pub fn segment_strides(ts: &TimeSeries, bw: f64, opts: &StrideOptions) -> Result<Vec<StrideWindow>> {
    if !(bw.is_finite() && bw > 0.0) {
        return Err(Error::InvalidInput(format!("body weight must be > 0 N, got {bw}")));
    }
    let fz = ts.channel(opts.channel)?;
    let events = touchdowns(fz, ts.rate(), bw, opts);
    if events.len() < 2 {
        return Err(Error::NoStridesDetected);
    }
    let mut windows: Vec<StrideWindow> = events
        .windows(2)
        .map(|w| StrideWindow {
            start: w[0],
            end: w[1],
            start_time: ts.time(w[0]),
            end_time: ts.time(w[1]),
            outlier: false,
        })
        .collect();
    let typical = median(&windows.iter().map(|w| w.duration()).collect::<Vec<_>>());
    for w in &mut windows {
        w.outlier = (w.duration() - typical).abs() > opts.duration_tolerance * typical;
    }
    Ok(windows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandKind {
    /// 1.96 × sample standard deviation across strides.
    #[default]
    Dispersion,
    /// 1.96 × standard error of the mean.
    StandardError,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageOptions {
    pub points: usize,
    pub normalize: bool,
    pub band: BandKind,
    pub include_outliers: bool,
}

impl Default for AverageOptions {
    fn default() -> Self {
        Self {
            points: 101,
            normalize: false,
            band: BandKind::Dispersion,
            include_outliers: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleChannel {
    pub name: String,
    pub mean: Vec<f64>,
    /// Half-width of the 95% band.
    pub band: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrideEnsemble {
    /// Percent of stride, 0 to 100.
    pub normalized_time: Vec<f64>,
    pub channels: Vec<EnsembleChannel>,
    pub stride_count: usize,
    /// Means and bands are in body weights rather than N.
    pub normalized: bool,
    /// Stride-fraction intervals with both feet loaded; empty without
    /// separate left and right vertical channels.
    pub double_stance: Vec<(f64, f64)>,
}

impl StrideEnsemble {
    pub fn channel(&self, name: &str) -> Option<&EnsembleChannel> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn mean_band(&self, name: &str) -> Option<f64> {
        self.channel(name).map(|c| mean(&c.band))
    }

    pub fn to_table(&self) -> Table {
        let mut header = vec!["percent".to_string()];
        for c in &self.channels {
            header.push(format!("{}_mean", c.name));
            header.push(format!("{}_band", c.name));
        }
        let mut t = Table::new(header);
        for (k, p) in self.normalized_time.iter().enumerate() {
            let mut row = vec![*p];
            for c in &self.channels {
                row.push(c.mean[k]);
                row.push(c.band[k]);
            }
            t.push(row);
        }
        t
    }
}

/// Linear resampling of `x` onto `points` evenly spaced fractions.
pub fn resample_stride(x: &[f64], points: usize) -> Vec<f64> {
    let n = x.len() - 1;
    (0..points)
        .map(|k| {
            let pos = k as f64 * n as f64 / (points - 1) as f64;
            let i = (pos.floor() as usize).min(n.saturating_sub(1));
            let frac = pos - i as f64;
            if n == 0 {
                x[0]
            } else if frac == 0.0 {
                x[i]
            } else {
                x[i] + frac * (x[i + 1] - x[i])
            }
        })
        .collect()
}

const GAIT_CHANNELS: [&str; 3] = ["Fx", "Fy", "Fz"];

pub fn average_strides(
    ts: &TimeSeries,
    windows: &[StrideWindow],
    bw: f64,
    opts: &AverageOptions,
) -> Result<StrideEnsemble> {
    if opts.points < 2 {
        return Err(Error::InvalidInput("stride grid needs at least 2 points".into()));
    }
    if opts.normalize && !(bw.is_finite() && bw > 0.0) {
        return Err(Error::InvalidInput(format!("body weight must be > 0 N, got {bw}")));
    }
    let used: Vec<&StrideWindow> = windows
        .iter()
        .filter(|w| opts.include_outliers || !w.outlier)
        .filter(|w| w.end > w.start && w.end < ts.len())
        .collect();
    if used.is_empty() {
        return Err(Error::NoStridesDetected);
    }
    let scale = if opts.normalize { bw } else { 1.0 };
    let names: Vec<&str> = GAIT_CHANNELS.iter().copied().filter(|c| ts.has_channel(c)).collect();
    if names.is_empty() {
        return Err(Error::ChannelMissing("Fz".into()));
    }

    let ensemble = |name: &str| -> Result<(Vec<f64>, Vec<f64>)> {
        let data = ts.channel(name)?;
        let strides: Vec<Vec<f64>> = used
            .iter()
            .map(|w| resample_stride(&data[w.start..=w.end], opts.points).iter().map(|v| v / scale).collect())
            .collect();
        let mut m = Vec::with_capacity(opts.points);
        let mut b = Vec::with_capacity(opts.points);
        for k in 0..opts.points {
            let col: Vec<f64> = strides.iter().map(|s| s[k]).collect();
            m.push(mean(&col));
            let identical = col.iter().all(|v| *v == col[0]);
            let spread = if col.len() < 2 || identical { 0.0 } else { 1.96 * std_sample(&col) };
            b.push(match opts.band {
                BandKind::Dispersion => spread,
                BandKind::StandardError => spread / (col.len() as f64).sqrt(),
            });
        }
        Ok((m, b))
    };

    let mut channels = Vec::new();
    for name in names {
        let (mean, band) = ensemble(name)?;
        channels.push(EnsembleChannel { name: name.to_string(), mean, band });
    }
    let double_stance = if ts.has_channel("Fz_left") && ts.has_channel("Fz_right") {
        let threshold = StrideOptions::default().fall_fraction * bw / scale;
        let (l, _) = ensemble("Fz_left")?;
        let (r, _) = ensemble("Fz_right")?;
        both_loaded(&l, &r, threshold)
    } else {
        Vec::new()
    };
    Ok(StrideEnsemble {
        normalized_time: (0..opts.points).map(|k| 100.0 * k as f64 / (opts.points - 1) as f64).collect(),
        channels,
        stride_count: used.len(),
        normalized: opts.normalize,
        double_stance,
    })
}

/// Fraction-of-stride intervals where both traces exceed `threshold`.
fn both_loaded(left: &[f64], right: &[f64], threshold: f64) -> Vec<(f64, f64)> {
    let n = left.len() - 1;
    let mut out = Vec::new();
    let mut start = None;
    for k in 0..=n {
        let both = left[k] > threshold && right[k] > threshold;
        match (both, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                out.push((s as f64 / n as f64, (k - 1) as f64 / n as f64));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s as f64 / n as f64, 1.0));
    }
    out
}
