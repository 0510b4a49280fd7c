//! Charge-amplifier range and resolution, and usable bandwidth per accuracy class.

use std::fmt;
use std::str::FromStr;

use crate::config::Config;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn force_channel(self) -> &'static str {
        ["Fx", "Fy", "Fz"][self.index()]
    }

    pub fn moment_channel(self) -> &'static str {
        ["Mx", "My", "Mz"][self.index()]
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["x", "y", "z"][self.index()])
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(Error::Config(format!("unknown axis `{s}` (x|y|z)"))),
        }
    }
}

/// Charge ranges of the amplifier's switchable stages (pC).
pub const PRESET_CHARGE_RANGES: [f64; 4] = [1000.0, 5000.0, 10_000.0, 50_000.0];
/// Shear sensitivity of the sensor stack (pC/N).
pub const SENSITIVITY_XY: f64 = 7.7;
/// Vertical sensitivity of the sensor stack (pC/N).
pub const SENSITIVITY_Z: f64 = 3.9;
/// 16-bit quantizer.
pub const DEFAULT_ADC_COUNTS: f64 = 65_536.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierConfig {
    /// Full charge range (pC).
    pub charge_range: f64,
    /// pC/N in x and y.
    pub sensitivity_xy: f64,
    /// pC/N in z.
    pub sensitivity_z: f64,
    pub adc_counts: f64,
}

impl Default for AmplifierConfig {
    fn default() -> Self {
        Self::preset(PRESET_CHARGE_RANGES[0])
    }
}

impl AmplifierConfig {
    /// Factory sensitivities at the given charge range.
    pub fn preset(charge_range: f64) -> Self {
        Self {
            charge_range,
            sensitivity_xy: SENSITIVITY_XY,
            sensitivity_z: SENSITIVITY_Z,
            adc_counts: DEFAULT_ADC_COUNTS,
        }
    }

    /// The four shipped amplifier stages.
    pub fn presets() -> [Self; 4] {
        PRESET_CHARGE_RANGES.map(Self::preset)
    }

    pub fn is_preset_range(&self) -> bool {
        PRESET_CHARGE_RANGES.contains(&self.charge_range)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("charge_range", self.charge_range),
            ("sensitivity_xy", self.sensitivity_xy),
            ("sensitivity_z", self.sensitivity_z),
            ("adc_counts", self.adc_counts),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidAmplifier(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn sensitivity(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X | Axis::Y => self.sensitivity_xy,
            Axis::Z => self.sensitivity_z,
        }
    }

    /// Reads the optional keys `charge_range`, `sensitivity_xy`,
    /// `sensitivity_z` and `adc_counts`, falling back to the factory preset.
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let d = Self::default();
        let amp = Self {
            charge_range: cfg.f64_or("charge_range", d.charge_range)?,
            sensitivity_xy: cfg.f64_or("sensitivity_xy", d.sensitivity_xy)?,
            sensitivity_z: cfg.f64_or("sensitivity_z", d.sensitivity_z)?,
            adc_counts: cfg.f64_or("adc_counts", d.adc_counts)?,
        };
        amp.validate()?;
        Ok(amp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceRange {
    /// Full-scale force (N).
    pub range: f64,
    /// One quantizer step (N).
    pub resolution: f64,
}

pub fn force_range(cfg: &AmplifierConfig, axis: Axis) -> Result<ForceRange> {
    cfg.validate()?;
    let range = cfg.charge_range / cfg.sensitivity(axis);
    Ok(ForceRange { range, resolution: range / cfg.adc_counts })
}

/// Accuracy bands of the piezo sensor and the fraction of the natural
/// frequency up to which each holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyClass {
    pub accuracy_pct: f64,
    pub factor: f64,
}

pub const ACCURACY_CLASSES: [AccuracyClass; 3] = [
    AccuracyClass { accuracy_pct: 10.0, factor: 0.3 },
    AccuracyClass { accuracy_pct: 5.0, factor: 0.2 },
    AccuracyClass { accuracy_pct: 1.0, factor: 0.1 },
];

pub fn accuracy_class(accuracy_pct: f64) -> Result<AccuracyClass> {
    ACCURACY_CLASSES
        .iter()
        .find(|c| c.accuracy_pct == accuracy_pct)
        .copied()
        .ok_or(Error::UnknownAccuracyClass(accuracy_pct))
}

pub fn max_frequency_for_accuracy(f_n: f64, accuracy_pct: f64) -> Result<f64> {
    if !(f_n.is_finite() && f_n >= 0.0) {
        return Err(Error::InvalidInput(format!("natural frequency must be >= 0, got {f_n}")));
    }
    Ok(accuracy_class(accuracy_pct)?.factor * f_n)
}
