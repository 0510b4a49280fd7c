//! Uniformly sampled multi-channel signals and their CSV representation.
//!
//! Files use a mandatory header `time,<channel>...`, comma separators, `.`
//! decimals and LF line endings. The sample rate is inferred from the time
//! column, which must be strictly increasing with jitter below 1 µs.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Maximum deviation of any time stamp from the uniform grid.
pub const MAX_JITTER_S: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    rate: f64,
    start: f64,
    names: Vec<String>,
    data: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(rate: f64, start: f64, names: Vec<String>, data: Vec<Vec<f64>>) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidSeries(format!("sample rate must be > 0, got {rate}")));
        }
        if !start.is_finite() {
            return Err(Error::InvalidSeries("start time must be finite".into()));
        }
        if names.len() != data.len() || names.is_empty() {
            return Err(Error::InvalidSeries(format!(
                "{} channel names for {} data columns",
                names.len(),
                data.len()
            )));
        }
        let len = data[0].len();
        if len < 2 {
            return Err(Error::InvalidSeries(format!("need at least 2 samples, got {len}")));
        }
        if let Some((i, c)) = data.iter().enumerate().find(|(_, c)| c.len() != len) {
            return Err(Error::InvalidSeries(format!(
                "channel `{}` has {} samples, expected {len}",
                names[i],
                c.len()
            )));
        }
        for (i, a) in names.iter().enumerate() {
            if a == "time" || names[..i].contains(a) {
                return Err(Error::InvalidSeries(format!("duplicate or reserved channel name `{a}`")));
            }
        }
        Ok(Self { rate, start, names, data })
    }

    /// Convenience constructor from `(name, samples)` pairs.
    pub fn from_channels<S: Into<String>>(rate: f64, start: f64, channels: Vec<(S, Vec<f64>)>) -> Result<Self> {
        let (names, data) = channels.into_iter().map(|(n, d)| (n.into(), d)).unzip();
        Self::new(rate, start, names, data)
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.data[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Time span covered by the samples, `(len - 1) / rate`.
    pub fn duration(&self) -> f64 {
        (self.len() - 1) as f64 / self.rate
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.rate
    }

    pub fn time(&self, index: usize) -> f64 {
        self.start + index as f64 / self.rate
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has_channel(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn channel(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.data[i].as_slice())
            .ok_or_else(|| Error::ChannelMissing(name.to_string()))
    }

    pub fn channels(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names.iter().map(String::as_str).zip(self.data.iter().map(Vec::as_slice))
    }

    pub fn push_channel(&mut self, name: impl Into<String>, samples: Vec<f64>) -> Result<()> {
        let name = name.into();
        if samples.len() != self.len() {
            return Err(Error::InvalidSeries(format!(
                "channel `{name}` has {} samples, expected {}",
                samples.len(),
                self.len()
            )));
        }
        if name == "time" || self.has_channel(&name) {
            return Err(Error::InvalidSeries(format!("duplicate or reserved channel name `{name}`")));
        }
        self.names.push(name);
        self.data.push(samples);
        Ok(())
    }

    /// Same samples with the time axis moved by `offset` seconds.
    pub fn shifted(&self, offset: f64) -> Self {
        Self { start: self.start + offset, ..self.clone() }
    }

    /// Linear interpolation of `name` at absolute time `t`, clamped at the ends.
    pub fn sample_at(&self, name: &str, t: f64) -> Result<f64> {
        let ch = self.channel(name)?;
        Ok(interp_uniform(ch, self.start, self.rate, t))
    }

    pub fn parse_csv(text: &str, source_name: &str) -> Result<Self> {
        let table = Table::parse(text, source_name)?;
        if table.header.first().map(String::as_str) != Some("time") {
            return Err(Error::parse(source_name, 1, 1, "first column must be `time`"));
        }
        if table.header.len() < 2 {
            return Err(Error::parse(source_name, 1, 2, "need at least one data channel"));
        }
        let n = table.rows.len();
        if n < 2 {
            return Err(Error::parse(source_name, n + 1, 1, "need at least 2 samples"));
        }
        let time: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
        for i in 1..n {
            if time[i] <= time[i - 1] {
                return Err(Error::parse(source_name, i + 2, 1, "time column must be strictly increasing"));
            }
        }
        let start = time[0];
        let rate = (n - 1) as f64 / (time[n - 1] - start);
        for (i, &t) in time.iter().enumerate() {
            let expected = start + i as f64 / rate;
            if (t - expected).abs() >= MAX_JITTER_S {
                return Err(Error::parse(
                    source_name,
                    i + 2,
                    1,
                    format!("sampling jitter {:.3e} s exceeds {MAX_JITTER_S:e} s", (t - expected).abs()),
                ));
            }
        }
        let names = table.header[1..].to_vec();
        let data = (1..table.header.len())
            .map(|c| table.rows.iter().map(|r| r[c]).collect())
            .collect();
        Self::new(rate, start, names, data).map_err(|e| Error::parse(source_name, 1, 1, e.to_string()))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::parse(&path.display().to_string(), 0, 0, format!("not UTF-8: {e}")))?;
        Self::parse_csv(&text, &path.display().to_string())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.len() * 16 * (self.names.len() + 1));
        out.push_str("time");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{}", self.time(i));
            for c in &self.data {
                let _ = write!(out, ",{}", c[i]);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

/// Linear interpolation into uniformly spaced samples; clamps outside the range.
pub fn interp_uniform(samples: &[f64], start: f64, rate: f64, t: f64) -> f64 {
    let pos = (t - start) * rate;
    if pos <= 0.0 {
        return samples[0];
    }
    let last = samples.len() - 1;
    if pos >= last as f64 {
        return samples[last];
    }
    let i = pos.floor() as usize;
    let w = pos - i as f64;
    samples[i] + w * (samples[i + 1] - samples[i])
}

/// A numeric CSV table with a mandatory header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn with_header(header: &[&str]) -> Self {
        Self::new(header.iter().map(|s| s.to_string()).collect())
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        if let Some(pos) = text.find('\r') {
            let row = text[..pos].matches('\n').count() + 1;
            return Err(Error::parse(source_name, row, 0, "CR line endings are not accepted (use LF)"));
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .delimiter(b',')
            .flexible(false)
            .trim(csv::Trim::None)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| Error::parse(source_name, 1, 0, e.to_string()))?
            .iter()
            .map(|h| h.to_string())
            .collect();
        if header.is_empty() || header.iter().any(|h| h.is_empty()) {
            return Err(Error::parse(source_name, 1, 0, "missing or empty header"));
        }
        if header.iter().all(|h| h.parse::<f64>().is_ok()) {
            return Err(Error::parse(source_name, 1, 1, "header row is mandatory"));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 2;
            let record = record.map_err(|e| Error::parse(source_name, row, 0, e.to_string()))?;
            let values = record
                .iter()
                .enumerate()
                .map(|(c, field)| {
                    field
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::parse(source_name, row, c + 1, format!("not a finite number: `{field}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(values);
        }
        Ok(Self { header, rows })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::parse(&path.display().to_string(), 0, 0, format!("not UTF-8: {e}")))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TimeSeries {
        TimeSeries::from_channels(
            1000.0,
            0.5,
            vec![("Fx", vec![0.0, 1.0, 2.0]), ("Fz", vec![-1.5, 0.25, 3.0])],
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ts = sample();
        let text = ts.to_csv_string();
        assert!(text.starts_with("time,Fx,Fz\n"));
        let back = TimeSeries::parse_csv(&text, "mem").unwrap();
        assert_eq!(back.names(), ts.names());
        assert_eq!(back.channel("Fz").unwrap(), ts.channel("Fz").unwrap());
        assert!((back.rate() - 1000.0).abs() < 1e-6);
        assert_eq!(back.start(), 0.5);
    }

    #[test]
    fn rejects_bad_values_with_position() {
        let err = TimeSeries::parse_csv("time,Fz\n0,1\n0.001,abc\n", "f.csv").unwrap_err();
        match err {
            Error::Parse { row, column, .. } => assert_eq!((row, column), (3, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_non_monotone_and_jittery_time() {
        assert!(TimeSeries::parse_csv("time,a\n0,1\n0,2\n", "f").is_err());
        let err = TimeSeries::parse_csv("time,a\n0,1\n0.001,2\n0.00201,3\n0.003,4\n", "f").unwrap_err();
        assert!(err.to_string().contains("jitter"), "{err}");
    }

    #[test]
    fn rejects_crlf_and_missing_header() {
        assert!(matches!(
            TimeSeries::parse_csv("time,a\r\n0,1\r\n1,2\r\n", "f"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(Table::parse("0,1\n1,2\n", "f"), Err(Error::Parse { row: 1, .. })));
        assert!(TimeSeries::parse_csv("t,a\n0,1\n1,2\n", "f").is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(Table::parse("a,b\n1,2\n3\n", "f"), Err(Error::Parse { row: 3, .. })));
    }

    #[test]
    fn channel_lookup_and_interpolation() {
        let ts = sample();
        assert!(matches!(ts.channel("My"), Err(Error::ChannelMissing(_))));
        assert!((ts.sample_at("Fx", 0.5015).unwrap() - 1.5).abs() < 1e-9);
        assert_eq!(ts.sample_at("Fx", 10.0).unwrap(), 2.0);
        assert_eq!(ts.duration(), 0.002);
    }

    #[test]
    fn invariants_enforced() {
        assert!(TimeSeries::from_channels(0.0, 0.0, vec![("a", vec![1.0, 2.0])]).is_err());
        assert!(TimeSeries::from_channels(1.0, 0.0, vec![("a", vec![1.0])]).is_err());
        assert!(TimeSeries::from_channels(1.0, 0.0, vec![("a", vec![1.0, 2.0]), ("b", vec![1.0])]).is_err());
        assert!(TimeSeries::from_channels(1.0, 0.0, vec![("a", vec![1.0, 2.0]), ("a", vec![1.0, 2.0])]).is_err());
    }
}
