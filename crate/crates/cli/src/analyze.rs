use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use treadmill_core::plot::{self, Line};
use treadmill_core::series::{Table, TimeSeries};
use treadmill_core::signal::{self, DampingFit, DampingOptions, SpectralPeak, SpectrumOptions, Window};
use treadmill_core::{Error, Result};

use crate::output::{cell, Output, Records};
use crate::OutDir;

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Bins below this frequency are ignored when picking peaks (Hz).
    #[arg(long, default_value_t = 5.0)]
    dc_floor: f64,
    /// Window applied before the FFT (rect or hann).
    #[arg(long, default_value_t = Window::Rectangular)]
    window: Window,
    /// Do not zero-pad to the next power of two.
    #[arg(long)]
    no_zero_pad: bool,
}

impl SpectrumArgs {
    fn options(&self) -> SpectrumOptions {
        SpectrumOptions { dc_floor: self.dc_floor, window: self.window, zero_pad: !self.no_zero_pad }
    }
}

#[derive(Debug, Args)]
pub struct ImpactArgs {
    /// Impact recording (CSV with a time column).
    #[arg(long, short)]
    input: PathBuf,
    /// Channels to analyse; defaults to every force channel present, skipping
    /// those without a resonance.
    #[arg(long, value_delimiter = ',')]
    channel: Vec<String>,
    /// Minimum envelope peaks for the damping fit.
    #[arg(long, default_value_t = 5)]
    min_peaks: usize,
    #[command(flatten)]
    spectrum: SpectrumArgs,
    #[command(flatten)]
    out: OutDir,
}

fn analyze_channel(ts: &TimeSeries, ch: &str, spec: &SpectrumOptions, damp: &DampingOptions) -> Result<(SpectralPeak, DampingFit)> {
    let peak = signal::estimate_natural_frequency(ts, ch, spec)?;
    let fit = signal::fit_damping(ts, ch, peak.f0, damp)?;
    Ok((peak, fit))
}

pub fn impact(args: ImpactArgs) -> Result<()> {
    let ts = TimeSeries::read_csv(&args.input)?;
    let spec = args.spectrum.options();
    let damp = DampingOptions { min_peaks: args.min_peaks, ..DampingOptions::default() };
    let explicit = !args.channel.is_empty();
    let channels: Vec<String> = if explicit {
        args.channel.clone()
    } else {
        ["Fx", "Fy", "Fz"].iter().filter(|c| ts.has_channel(c)).map(|c| c.to_string()).collect()
    };
    if channels.is_empty() {
        return Err(Error::ChannelMissing("Fx/Fy/Fz".into()));
    }
    let results: Vec<(String, Result<(SpectralPeak, DampingFit)>)> = channels
        .par_iter()
        .map(|ch| (ch.clone(), analyze_channel(&ts, ch, &spec, &damp)))
        .collect();

    let mut rec = Records::new(&[
        "channel", "f0_hz", "peak_amplitude", "secondary_peaks", "amplitude", "lambda", "omega", "xi", "q",
        "log_residual_rms",
    ]);
    let mut ok = Vec::new();
    let mut first_error = None;
    for (ch, r) in results {
        match r {
            Ok((peak, fit)) => {
                let secondary: Vec<String> = peak.secondary_peaks.iter().map(|(f, _)| f.to_string()).collect();
                rec.push(vec![
                    ch.clone(),
                    cell(peak.f0),
                    cell(peak.amplitude),
                    secondary.join(";"),
                    cell(fit.amplitude),
                    cell(fit.lambda),
                    cell(fit.omega),
                    cell(fit.xi),
                    cell(fit.q),
                    cell(fit.log_residual_rms),
                ]);
                println!("{ch}: f0 = {:.2} Hz, xi = {:.5}, Q = {:.2}", peak.f0, fit.xi, fit.q);
                ok.push((ch, peak, fit));
            }
            Err(e) if explicit => return Err(e),
            Err(e) => {
                println!("{ch}: skipped ({e})");
                first_error.get_or_insert(e);
            }
        }
    }
    if ok.is_empty() {
        return Err(first_error.expect("every channel failed"));
    }

    let out = Output::create(&args.out.out)?;
    out.records("impact_report.csv", &rec)?;
    let freqs = &ok[0].1.spectrum.freqs;
    let mut header = vec!["frequency".to_string()];
    header.extend(ok.iter().map(|(ch, ..)| ch.clone()));
    let mut table = Table::new(header);
    for (k, f) in freqs.iter().enumerate() {
        let mut row = vec![*f];
        row.extend(ok.iter().map(|(_, p, _)| p.spectrum.values[k]));
        table.push(row);
    }
    out.table("impact_spectrum.csv", &table)?;
    let lines: Vec<Line> = ok.iter().map(|(ch, p, _)| Line::new(ch, &p.spectrum.freqs, &p.spectrum.values)).collect();
    out.text("impact_spectrum.svg", &plot::line_plot("Impact spectrum", ("frequency (Hz)", "amplitude (N)"), &lines, &[]))?;

    for (ch, _, fit) in &ok {
        let (t, a): (Vec<f64>, Vec<f64>) = fit.peaks.iter().copied().unzip();
        let model: Vec<f64> = t.iter().map(|&s| fit.envelope(s)).collect();
        let svg = plot::line_plot(
            &format!("{ch} decay envelope"),
            ("time (s)", "amplitude (N)"),
            &[Line::new("peaks", &t, &a), Line::new("fit", &t, &model)],
            &[],
        );
        out.text(&format!("impact_envelope_{ch}.svg"), &svg)?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Unloaded recording (CSV with a time column).
    #[arg(long, short)]
    input: PathBuf,
    /// Belt speed during the recording (m/s); stored as metadata.
    #[arg(long, default_value_t = 0.0)]
    speed: f64,
    #[command(flatten)]
    spectrum: SpectrumArgs,
    #[command(flatten)]
    out: OutDir,
}

pub fn noise(args: NoiseArgs) -> Result<()> {
    let ts = TimeSeries::read_csv(&args.input)?;
    let report = signal::noise_stats(&ts, args.speed, &args.spectrum.options())?;
    let mut rec = Records::new(&["channel", "belt_speed", "mean", "band", "extreme"]);
    for c in &report.channels {
        rec.push(vec![c.channel.clone(), cell(report.belt_speed), cell(c.mean), cell(c.band), cell(c.extreme)]);
        println!("{}: band = {:.3} N, extreme = {:.3} N", c.channel, c.band, c.extreme);
    }
    let out = Output::create(&args.out.out)?;
    out.records("noise_report.csv", &rec)?;
    if let Some(first) = report.channels.first() {
        let mut header = vec!["frequency".to_string()];
        header.extend(report.channels.iter().map(|c| c.channel.clone()));
        let mut table = Table::new(header);
        for (k, f) in first.spectrum.freqs.iter().enumerate() {
            let mut row = vec![*f];
            row.extend(report.channels.iter().map(|c| c.spectrum.values[k]));
            table.push(row);
        }
        out.table("noise_spectrum.csv", &table)?;
        let lines: Vec<Line> = report.channels.iter().map(|c| Line::new(&c.channel, &c.spectrum.freqs, &c.spectrum.values)).collect();
        let title = format!("Noise spectrum at {} m/s", args.speed);
        out.text("noise_spectrum.svg", &plot::line_plot(&title, ("frequency (Hz)", "amplitude (N)"), &lines, &[]))?;
    }
    Ok(())
}
