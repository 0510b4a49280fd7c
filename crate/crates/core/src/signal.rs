//! Spectral peak picking, damping-envelope fitting and noise statistics.
//!
//! Impact responses are modelled as `A·e^(−λt)·cos(ωt)`. The natural
//! frequency comes from the largest FFT bin above a DC floor; the decay
//! constant from a straight-line fit of the log envelope sampled at the
//! peaks of `|y|`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::numeric::{fit_line, mean, median, next_pow2, std_population};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rect" | "rectangular" | "none" => Ok(Window::Rectangular),
            "hann" => Ok(Window::Hann),
            _ => Err(Error::Config(format!("unknown window `{s}` (rect|hann)"))),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Window::Rectangular => "rect",
            Window::Hann => "hann",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Bins below this frequency are ignored when picking peaks (Hz).
    pub dc_floor: f64,
    pub window: Window,
    /// Zero-pad to the next power of two.
    pub zero_pad: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            dc_floor: 5.0,
            window: Window::Rectangular,
            zero_pad: true,
        }
    }
}

/// One-sided spectrum on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn resolution(&self) -> f64 {
        self.freqs.get(1).copied().unwrap_or(0.0)
    }

    /// Largest value within `tol` Hz of `f`.
    pub fn max_near(&self, f: f64, tol: f64) -> f64 {
        self.freqs
            .iter()
            .zip(&self.values)
            .filter(|(fr, _)| (**fr - f).abs() <= tol)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    }
}

fn windowed_fft(x: &[f64], opts: &SpectrumOptions) -> (Vec<Complex<f64>>, f64) {
    let n = x.len();
    let len = if opts.zero_pad { next_pow2(n) } else { n };
    let m = mean(x);
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); len];
    let mut wsum = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let w = match opts.window {
            Window::Rectangular => 1.0,
            Window::Hann => 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos(),
        };
        wsum += w;
        buf[i] = Complex::new((v - m) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    (buf, wsum)
}

/// Single-sided amplitude spectrum of the mean-removed signal. A sinusoid of
/// amplitude `a` centred on a bin reads `a`.
pub fn amplitude_spectrum(x: &[f64], rate: f64, opts: &SpectrumOptions) -> Spectrum {
    let (buf, wsum) = windowed_fft(x, opts);
    let len = buf.len();
    let half = len / 2;
    let freqs = (0..=half).map(|k| k as f64 * rate / len as f64).collect();
    let values = (0..=half)
        .map(|k| {
            let scale = if k == 0 || (len % 2 == 0 && k == half) { 1.0 } else { 2.0 };
            scale * buf[k].norm() / wsum
        })
        .collect();
    Spectrum { freqs, values }
}

/// Single-sided power spectrum of the mean-removed signal, scaled so the bins
/// sum to the population variance when the rectangular window is used.
pub fn power_spectrum(x: &[f64], rate: f64, opts: &SpectrumOptions) -> Spectrum {
    let (buf, _) = windowed_fft(x, opts);
    let len = buf.len();
    let half = len / 2;
    let norm = (x.len() * len) as f64;
    let freqs = (0..=half).map(|k| k as f64 * rate / len as f64).collect();
    let values = (0..=half)
        .map(|k| {
            let fold = if k == 0 || (len % 2 == 0 && k == half) { 1.0 } else { 2.0 };
            fold * buf[k].norm_sqr() / norm
        })
        .collect();
    Spectrum { freqs, values }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPeak {
    /// Frequency of the dominant bin (Hz).
    pub f0: f64,
    pub amplitude: f64,
    /// Other local maxima of at least 10% of the main peak, largest first.
    pub secondary_peaks: Vec<(f64, f64)>,
    /// Bin spacing of the (possibly padded) spectrum.
    pub resolution: f64,
    pub spectrum: Spectrum,
}

/// Peak must stand this far above the median level.
pub const MIN_PEAK_RATIO: f64 = 3.0;
/// Secondary peaks relative to the main one.
pub const SECONDARY_PEAK_FRACTION: f64 = 0.1;
/// Moving-average width used only for the flatness test.
const FLATNESS_SMOOTHING_BINS: usize = 9;

fn moving_average(v: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    (0..v.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(v.len());
            mean(&v[lo..hi])
        })
        .collect()
}

pub fn estimate_natural_frequency(ts: &TimeSeries, channel: &str, opts: &SpectrumOptions) -> Result<SpectralPeak> {
    let x = ts.channel(channel)?;
    if (x.len() as f64) / ts.rate() < 0.1 {
        return Err(Error::InvalidInput(format!(
            "need at least 0.1 s of data, got {:.4} s",
            x.len() as f64 / ts.rate()
        )));
    }
    let spectrum = amplitude_spectrum(x, ts.rate(), opts);
    let nyquist = ts.rate() / 2.0;
    let band: Vec<usize> = (0..spectrum.freqs.len())
        .filter(|&k| spectrum.freqs[k] >= opts.dc_floor && spectrum.freqs[k] < nyquist)
        .collect();
    if band.len() < 3 {
        return Err(Error::NoPeak { ratio: 0.0, required: MIN_PEAK_RATIO });
    }
    let mags: Vec<f64> = band.iter().map(|&k| spectrum.values[k]).collect();
    let (imax, &amax) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("non-empty band");

    let smoothed = moving_average(&mags, FLATNESS_SMOOTHING_BINS);
    let med = median(&smoothed);
    let top = smoothed.iter().cloned().fold(0.0, f64::max);
    let ratio = if med > 0.0 { top / med } else if top > 0.0 { f64::INFINITY } else { 0.0 };
    if !(ratio >= MIN_PEAK_RATIO) {
        return Err(Error::NoPeak { ratio, required: MIN_PEAK_RATIO });
    }

    let mut secondary: Vec<(f64, f64)> = (1..mags.len() - 1)
        .filter(|&i| i != imax && mags[i] > mags[i - 1] && mags[i] >= mags[i + 1])
        .filter(|&i| mags[i] >= SECONDARY_PEAK_FRACTION * amax)
        .map(|i| (spectrum.freqs[band[i]], mags[i]))
        .collect();
    secondary.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.total_cmp(&b.0)));

    Ok(SpectralPeak {
        f0: spectrum.freqs[band[imax]],
        amplitude: amax,
        secondary_peaks: secondary,
        resolution: spectrum.resolution(),
        spectrum,
    })
}

/// Damping ratio from decay constant and angular frequency.
pub fn damping_ratio(lambda: f64, omega: f64) -> f64 {
    lambda / (lambda * lambda + omega * omega).sqrt()
}

pub fn q_factor(xi: f64) -> f64 {
    1.0 / (2.0 * xi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DampingFit {
    /// Envelope amplitude at the first sample (signal units).
    pub amplitude: f64,
    /// Decay constant (1/s).
    pub lambda: f64,
    /// Angular oscillation frequency (rad/s).
    pub omega: f64,
    pub xi: f64,
    pub q: f64,
    /// RMS residual of the log-envelope line fit.
    pub log_residual_rms: f64,
    /// (time since first sample, envelope amplitude) of the peaks used.
    pub peaks: Vec<(f64, f64)>,
}

impl DampingFit {
    pub fn new(amplitude: f64, lambda: f64, omega: f64) -> Self {
        let xi = damping_ratio(lambda, omega);
        Self {
            amplitude,
            lambda,
            omega,
            xi,
            q: q_factor(xi),
            log_residual_rms: 0.0,
            peaks: Vec::new(),
        }
    }

    /// Model response `A·e^(−λt)·cos(ωt)` at `t` seconds after the first sample.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.amplitude * (-self.lambda * t).exp() * (self.omega * t).cos()
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.amplitude * (-self.lambda * t).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingOptions {
    pub min_peaks: usize,
    /// Peaks are used until the envelope drops below this multiple of the
    /// estimated noise level.
    pub noise_factor: f64,
}

impl Default for DampingOptions {
    fn default() -> Self {
        Self { min_peaks: 5, noise_factor: 10.0 }
    }
}

struct PeakEstimate {
    t: f64,
    amplitude: f64,
    residual_rms: f64,
}

/// Envelope amplitude at each `|y|` peak from a local least-squares fit of
/// `c + e^(−λ₀τ)·(a·cos ωt + b·sin ωt)` over one period centred on the peak.
/// With `λ₀` equal to the true decay the model is exact, so the outer loop
/// iterates `λ₀` to a fixed point.
fn envelope_at_peaks(x: &[f64], rate: f64, omega: f64, lambda0: f64, peaks: &[usize], half: usize) -> Vec<PeakEstimate> {
    peaks
        .iter()
        .filter_map(|&p| {
            let lo = p.saturating_sub(half);
            let hi = (p + half).min(x.len() - 1);
            if hi - lo + 1 < 5 {
                return None;
            }
            let mut ata = Matrix3::<f64>::zeros();
            let mut atb = Vector3::<f64>::zeros();
            let rows: Vec<(Vector3<f64>, f64)> = (lo..=hi)
                .map(|j| {
                    let t = j as f64 / rate;
                    let decay = (-lambda0 * (j as f64 - p as f64) / rate).exp();
                    let phase = omega * t;
                    (Vector3::new(1.0, decay * phase.cos(), decay * phase.sin()), x[j])
                })
                .collect();
            for (row, y) in &rows {
                ata += row * row.transpose();
                atb += row * *y;
            }
            let coef = ata.lu().solve(&atb)?;
            let ss: f64 = rows.iter().map(|(row, y)| (y - row.dot(&coef)).powi(2)).sum();
            Some(PeakEstimate {
                t: p as f64 / rate,
                amplitude: coef[1].hypot(coef[2]),
                residual_rms: (ss / rows.len() as f64).sqrt(),
            })
        })
        .collect()
}

/// Samples of `|y|` maxima, starting at the global maximum and stepping
/// roughly half a period each time.
fn locate_abs_peaks(x: &[f64], period_samples: f64) -> Vec<usize> {
    let start = x
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lo_step = (0.25 * period_samples).round().max(1.0) as usize;
    let hi_step = (0.75 * period_samples).round().max(lo_step as f64 + 1.0) as usize;
    let mut peaks = vec![start];
    let mut p = start;
    while p + lo_step < x.len() {
        let hi = (p + hi_step).min(x.len() - 1);
        let next = (p + lo_step..=hi)
            .max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()).then(b.cmp(&a)))
            .expect("non-empty range");
        peaks.push(next);
        p = next;
    }
    peaks
}

fn select_above_noise(est: &[PeakEstimate], factor: f64) -> usize {
    let noise = median(&est.iter().map(|e| e.residual_rms).collect::<Vec<_>>());
    let floor = factor * noise;
    est.iter().take_while(|e| e.amplitude > floor && e.amplitude > 0.0).count()
}

pub fn fit_damping(ts: &TimeSeries, channel: &str, f0: f64, opts: &DampingOptions) -> Result<DampingFit> {
    let x = ts.channel(channel)?;
    let rate = ts.rate();
    if !(f0.is_finite() && f0 > 0.0 && rate / f0 >= 4.0) {
        return Err(Error::InvalidInput(format!(
            "oscillation frequency {f0} Hz needs at least 4 samples per period at {rate} Hz"
        )));
    }
    let omega = 2.0 * PI * f0;
    let period = rate / f0;
    let half = (0.5 * period).round() as usize;
    let peaks = locate_abs_peaks(x, period);

    let too_few = |found| Error::TooFewPeaks { found, required: opts.min_peaks };
    let line_through = |est: &[PeakEstimate]| {
        let t: Vec<f64> = est.iter().map(|e| e.t).collect();
        let ln: Vec<f64> = est.iter().map(|e| e.amplitude.ln()).collect();
        fit_line(&t, &ln)
    };

    // settle the peak selection, then iterate the decay constant alone
    let mut lambda = 0.0;
    let mut used = 0;
    for _ in 0..4 {
        let est = envelope_at_peaks(x, rate, omega, lambda, &peaks, half);
        used = select_above_noise(&est, opts.noise_factor);
        if used < opts.min_peaks.max(2) {
            return Err(too_few(used));
        }
        lambda = -line_through(&est[..used]).slope;
    }
    let chosen = &peaks[..used];
    let mut line = None;
    for _ in 0..200 {
        let est = envelope_at_peaks(x, rate, omega, lambda, chosen, half);
        if est.len() < opts.min_peaks {
            return Err(too_few(est.len()));
        }
        let fit = line_through(&est);
        let next = -fit.slope;
        let done = (next - lambda).abs() <= 1e-14 * next.abs().max(1e-300);
        lambda = next;
        line = Some((fit, est));
        if done {
            break;
        }
    }
    let (fit, est) = line.expect("loop ran at least once");

    let span = est.last().map(|e| e.t).unwrap_or(0.0) - est[0].t;
    if !(lambda > 0.0) || lambda <= 2.0 * fit.slope_se || lambda * span < 1e-9 {
        return Err(Error::NonDecayingEnvelope { lambda });
    }
    let mut out = DampingFit::new(fit.intercept.exp(), lambda, omega);
    out.log_residual_rms = fit.rms_residual;
    out.peaks = est.iter().map(|e| (e.t, e.amplitude)).collect();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelNoise {
    pub channel: String,
    pub mean: f64,
    /// Two population standard deviations (N).
    pub band: f64,
    /// Largest deviation from the mean, with its sign.
    pub extreme: f64,
    /// Single-sided amplitude spectrum of the mean-removed signal.
    pub spectrum: Spectrum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReport {
    pub belt_speed: f64,
    pub channels: Vec<ChannelNoise>,
}

impl NoiseReport {
    pub fn channel(&self, name: &str) -> Option<&ChannelNoise> {
        self.channels.iter().find(|c| c.channel == name)
    }
}

pub fn noise_stats(ts: &TimeSeries, belt_speed: f64, opts: &SpectrumOptions) -> Result<NoiseReport> {
    if (ts.len() as f64) / ts.rate() < 1.0 - 1e-9 {
        return Err(Error::InvalidInput(format!(
            "noise statistics need at least 1 s of data, got {:.4} s",
            ts.len() as f64 / ts.rate()
        )));
    }
    let channels = ts
        .channels()
        .map(|(name, x)| {
            let m = mean(x);
            let extreme = x
                .iter()
                .map(|v| v - m)
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(0.0);
            ChannelNoise {
                channel: name.to_string(),
                mean: m,
                band: 2.0 * std_population(x),
                extreme,
                spectrum: amplitude_spectrum(x, ts.rate(), opts),
            }
        })
        .collect();
    Ok(NoiseReport { belt_speed, channels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn decay(rate: f64, secs: f64, f: f64, lambda: f64, amp: f64) -> TimeSeries {
        let n = (rate * secs) as usize;
        let y = (0..n)
            .map(|i| {
                let t = i as f64 / rate;
                amp * (-lambda * t).exp() * (2.0 * PI * f * t).cos()
            })
            .collect();
        TimeSeries::from_channels(rate, 0.0, vec![("Fz", y)]).unwrap()
    }

    fn add_noise(ts: &TimeSeries, sigma: f64, seed: u64) -> TimeSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).unwrap();
        let y = ts.channel("Fz").unwrap().iter().map(|v| v + normal.sample(&mut rng)).collect();
        TimeSeries::from_channels(ts.rate(), 0.0, vec![("Fz", y)]).unwrap()
    }

    #[test]
    fn peak_of_decaying_cosine() {
        let ts = decay(10_000.0, 1.0, 169.0, 10.0, 50.0);
        let peak = estimate_natural_frequency(&ts, "Fz", &SpectrumOptions::default()).unwrap();
        assert!((peak.f0 - 169.0).abs() <= 1.0, "{}", peak.f0);
        assert!(peak.secondary_peaks.iter().all(|p| p.1 <= peak.amplitude));
        assert!(peak.f0 > 0.0 && peak.f0 < 5000.0);
    }

    #[test]
    fn flat_and_constant_signals_have_no_peak() {
        let ts = TimeSeries::from_channels(1000.0, 0.0, vec![("Fz", vec![3.0; 1000])]).unwrap();
        assert!(matches!(
            estimate_natural_frequency(&ts, "Fz", &SpectrumOptions::default()),
            Err(Error::NoPeak { .. })
        ));
        let zeros = TimeSeries::from_channels(10_000.0, 0.0, vec![("Fz", vec![0.0; 10_000])]).unwrap();
        let white = add_noise(&zeros, 1.0, 3);
        assert!(matches!(
            estimate_natural_frequency(&white, "Fz", &SpectrumOptions::default()),
            Err(Error::NoPeak { .. })
        ));
    }

    #[test]
    fn missing_channel_and_short_record() {
        let ts = decay(10_000.0, 1.0, 169.0, 10.0, 1.0);
        assert!(matches!(
            estimate_natural_frequency(&ts, "Fx", &SpectrumOptions::default()),
            Err(Error::ChannelMissing(_))
        ));
        let short = decay(10_000.0, 0.05, 169.0, 10.0, 1.0);
        assert!(estimate_natural_frequency(&short, "Fz", &SpectrumOptions::default()).is_err());
    }

    #[test]
    fn peak_invariant_under_scaling() {
        let ts = add_noise(&decay(10_000.0, 1.0, 231.0, 20.0, 5.0), 0.05, 9);
        let scaled = TimeSeries::from_channels(
            ts.rate(),
            0.0,
            vec![("Fz", ts.channel("Fz").unwrap().iter().map(|v| v * 37.5).collect())],
        )
        .unwrap();
        let a = estimate_natural_frequency(&ts, "Fz", &SpectrumOptions::default()).unwrap();
        let b = estimate_natural_frequency(&scaled, "Fz", &SpectrumOptions::default()).unwrap();
        assert_eq!(a.f0, b.f0);
    }

    #[test]
    fn parseval_holds_without_window() {
        let ts = add_noise(&decay(1000.0, 2.0, 50.0, 1.0, 3.0), 0.7, 11);
        let x = ts.channel("Fz").unwrap();
        let var = crate::numeric::variance(x);
        for zero_pad in [false, true] {
            let p = power_spectrum(x, ts.rate(), &SpectrumOptions { zero_pad, ..Default::default() });
            let total: f64 = p.values.iter().sum();
            assert!(((total - var) / var).abs() < 1e-6, "pad={zero_pad}: {total} vs {var}");
        }
    }

    #[test]
    fn q_from_damping_ratio() {
        assert!((q_factor(0.0148) - 33.78).abs() < 0.05);
        assert!((q_factor(0.0093) - 53.76).abs() < 0.01);
        let fit = DampingFit::new(1.0, 12.0, 2.0 * PI * 169.0);
        assert!((fit.q * 2.0 * fit.xi - 1.0).abs() <= 2.0 * f64::EPSILON);
        assert!((damping_ratio(fit.lambda, fit.omega) - fit.xi).abs() < 1e-12);
    }

    #[test]
    fn recovers_decay_constant() {
        let clean = decay(10_000.0, 1.0, 200.0, 50.0, 100.0);
        let fit = fit_damping(&clean, "Fz", 200.0, &DampingOptions::default()).unwrap();
        assert!(((fit.lambda - 50.0) / 50.0).abs() < 0.01, "{}", fit.lambda);
        assert!(((fit.amplitude - 100.0) / 100.0).abs() < 0.01);

        let noisy = add_noise(&clean, 1.0, 5);
        let fit = fit_damping(&noisy, "Fz", 200.0, &DampingOptions::default()).unwrap();
        assert!(((fit.lambda - 50.0) / 50.0).abs() < 0.05, "{}", fit.lambda);
    }

    #[test]
    fn refit_of_regenerated_model_is_idempotent() {
        let noisy = add_noise(&decay(10_000.0, 1.0, 143.0, 17.0, 20.0), 0.2, 21);
        let first = fit_damping(&noisy, "Fz", 143.0, &DampingOptions::default()).unwrap();
        let regen: Vec<f64> = (0..noisy.len()).map(|i| first.evaluate(i as f64 / noisy.rate())).collect();
        let ts = TimeSeries::from_channels(noisy.rate(), 0.0, vec![("Fz", regen)]).unwrap();
        let second = fit_damping(&ts, "Fz", first.omega / (2.0 * PI), &DampingOptions::default()).unwrap();
        assert!(((second.lambda - first.lambda) / first.lambda).abs() < 1e-9);
        assert!(((second.amplitude - first.amplitude) / first.amplitude).abs() < 1e-9);
        assert!((second.omega - first.omega).abs() < 1e-9 * first.omega);
    }

    #[test]
    fn undamped_cosine_is_rejected() {
        let ts = decay(10_000.0, 1.0, 120.0, 0.0, 4.0);
        assert!(matches!(
            fit_damping(&ts, "Fz", 120.0, &DampingOptions::default()),
            Err(Error::NonDecayingEnvelope { .. })
        ));
    }

    #[test]
    fn too_few_peaks() {
        // decays into the noise within two periods
        let ts = add_noise(&decay(10_000.0, 1.0, 100.0, 2000.0, 1.0), 0.01, 1);
        assert!(matches!(
            fit_damping(&ts, "Fz", 100.0, &DampingOptions::default()),
            Err(Error::TooFewPeaks { .. })
        ));
    }

    #[test]
    fn noise_band_of_constant_is_zero() {
        let ts = TimeSeries::from_channels(
            1000.0,
            0.0,
            vec![("Fx", vec![1.5; 2000]), ("Fz", vec![-700.0; 2000])],
        )
        .unwrap();
        let rep = noise_stats(&ts, 0.0, &SpectrumOptions::default()).unwrap();
        for c in &rep.channels {
            assert_eq!(c.band, 0.0);
        }
        assert_eq!(rep.channel("Fz").unwrap().mean, -700.0);
    }

    #[test]
    fn white_noise_band() {
        // 10 s at 1 kHz: σ of the σ estimate is about 1/sqrt(2n) ≈ 0.7%
        let zeros = TimeSeries::from_channels(1000.0, 0.0, vec![("Fz", vec![0.0; 10_000])]).unwrap();
        let ts = add_noise(&zeros, 1.0, 42);
        let rep = noise_stats(&ts, 0.5, &SpectrumOptions::default()).unwrap();
        assert!((rep.channels[0].band - 2.0).abs() < 0.1);
    }

    #[test]
    fn extremes_are_signed() {
        let mut x = vec![0.0; 1000];
        x[10] = -1.8;
        x[20] = 0.77;
        let ts = TimeSeries::from_channels(1000.0, 0.0, vec![("Fz", x)]).unwrap();
        let rep = noise_stats(&ts, 0.0, &SpectrumOptions::default()).unwrap();
        let m = mean(ts.channel("Fz").unwrap());
        assert!((rep.channels[0].extreme - (-1.8 - m)).abs() < 1e-12);
    }

    #[test]
    fn line_shows_in_spectrum() {
        let rate = 1000.0;
        let x: Vec<f64> = (0..1000).map(|i| 0.4 * (2.0 * PI * 50.0 * i as f64 / rate).sin()).collect();
        let s = amplitude_spectrum(&x, rate, &SpectrumOptions { zero_pad: false, ..Default::default() });
        assert!((s.max_near(50.0, 1.0) - 0.4).abs() < 0.05);
    }
}
