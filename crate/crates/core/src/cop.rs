//! Center of pressure from force-plate wrenches.
//!
//! Frame: right-handed, `z` up, origin in the sensor plane at the centre of
//! the running surface. Moments are taken about that origin, so a vertical
//! load `F_z` at `(x, y)` produces `M_x = y·F_z` and `M_y = −x·F_z`.
//!
//! Because the contact surface sits above the sensor plane, horizontal force
//! components shift the naive COP. The offset `a_z` (the height of the
//! contact plane in this frame) compensates for that; it is found from trials
//! that push through a single fixed point in varying directions.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::numeric::{covariance, lstsq, mean, std_population, std_sample, variance, Normalizer, MAX_CONDITION};
use crate::series::TimeSeries;

/// COP is undefined below this vertical load (N).
pub const DEFAULT_FZ_MIN: f64 = 10.0;

pub const WRENCH_CHANNELS: [&str; 6] = ["Fx", "Fy", "Fz", "Mx", "My", "Mz"];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wrench {
    /// `(F_x, F_y, F_z)` in N.
    pub force: [f64; 3],
    /// `(M_x, M_y, M_z)` in N·m about the sensor-plane origin.
    pub moment: [f64; 3],
}

impl Wrench {
    pub fn new(force: [f64; 3], moment: [f64; 3]) -> Self {
        Self { force, moment }
    }

    /// Force `f` acting at `point`, with its moment transported to the origin.
    pub fn from_point_force(point: [f64; 3], f: [f64; 3]) -> Self {
        Self { force: f, moment: cross(point, f) }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            force: self.force.map(|v| v * k),
            moment: self.moment.map(|v| v * k),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(&self.moment).all(|v| v.is_finite())
    }

    pub fn as_array(&self) -> [f64; 6] {
        let [fx, fy, fz] = self.force;
        let [mx, my, mz] = self.moment;
        [fx, fy, fz, mx, my, mz]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self { force: [v[0], v[1], v[2]], moment: [v[3], v[4], v[5]] }
    }

    /// Component-wise mean of several wrenches.
    pub fn mean(ws: &[Wrench]) -> Wrench {
        let mut acc = [0.0; 6];
        for w in ws {
            for (a, v) in acc.iter_mut().zip(w.as_array()) {
                *a += v;
            }
        }
        Wrench::from_array(acc.map(|a| a / ws.len() as f64))
    }
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Reads `Fx,Fy,Fz,Mx,My,Mz` channels into one wrench per sample.
pub fn wrenches_from_series(ts: &TimeSeries) -> Result<Vec<Wrench>> {
    let cols = WRENCH_CHANNELS
        .iter()
        .map(|c| ts.channel(c))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..ts.len())
        .map(|i| Wrench::from_array([cols[0][i], cols[1][i], cols[2][i], cols[3][i], cols[4][i], cols[5][i]]))
        .collect())
}

pub fn wrenches_to_series(rate: f64, start: f64, ws: &[Wrench]) -> Result<TimeSeries> {
    let channels = WRENCH_CHANNELS
        .iter()
        .enumerate()
        .map(|(k, name)| (*name, ws.iter().map(|w| w.as_array()[k]).collect()))
        .collect();
    TimeSeries::from_channels(rate, start, channels)
}

/// `a_x = (F_x·a_z − M_y)/F_z`, `a_y = (F_y·a_z + M_x)/F_z`.
pub fn cop_from_wrench(w: &Wrench, a_z: f64, fz_min: f64) -> Result<(f64, f64)> {
    let [fx, fy, fz] = w.force;
    let [mx, my, _] = w.moment;
    if !(fz.abs() > fz_min) {
        return Err(Error::InsufficientLoad { fz: fz.abs(), min: fz_min });
    }
    Ok(((fx * a_z - my) / fz, (fy * a_z + mx) / fz))
}

/// Sums four sensor force triplets at `(x_i, y_i, 0)` into one wrench.
pub fn wrench_from_sensor_array(readings: &[[f64; 3]; 4], positions: &[[f64; 2]; 4]) -> Result<Wrench> {
    let collinear = {
        let [p0, p1, ..] = *positions;
        positions[2..].iter().all(|p| {
            let area = (p1[0] - p0[0]) * (p[1] - p0[1]) - (p1[1] - p0[1]) * (p[0] - p0[0]);
            area.abs() < 1e-12
        })
    };
    if collinear {
        return Err(Error::InvalidInput("sensor positions are collinear".into()));
    }
    let mut w = Wrench::default();
    for (f, p) in readings.iter().zip(positions) {
        let m = cross([p[0], p[1], 0.0], *f);
        for k in 0..3 {
            w.force[k] += f[k];
            w.moment[k] += m[k];
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearFit {
    /// Offset minimising COP scatter across force directions (m).
    pub a_z: f64,
    /// Population standard deviation of `a_x` at the optimum (m).
    pub spread_x: f64,
    pub spread_y: f64,
    /// COP at the optimum, averaged over samples.
    pub cop: (f64, f64),
    pub samples: usize,
}

/// Closed-form minimiser of `Var(a_x) + Var(a_y)` over `a_z`.
///
/// Each sample's COP is affine in `a_z`: `a_x = α·a_z + β` with
/// `α = F_x/F_z`, `β = −M_y/F_z` (and `α = F_y/F_z`, `β = M_x/F_z` for y), so
/// the objective is an exact quadratic. Samples at or below `fz_min` are skipped.
pub fn optimize_shear_offset(samples: &[Wrench], fz_min: f64) -> Result<ShearFit> {
    let loaded: Vec<&Wrench> = samples.iter().filter(|w| w.force[2].abs() > fz_min).collect();
    if loaded.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "shear offset needs at least 3 loaded samples, got {}",
            loaded.len()
        )));
    }
    let ax: Vec<f64> = loaded.iter().map(|w| w.force[0] / w.force[2]).collect();
    let bx: Vec<f64> = loaded.iter().map(|w| -w.moment[1] / w.force[2]).collect();
    let ay: Vec<f64> = loaded.iter().map(|w| w.force[1] / w.force[2]).collect();
    let by: Vec<f64> = loaded.iter().map(|w| w.moment[0] / w.force[2]).collect();

    let (vx, vy) = (variance(&ax), variance(&ay));
    if vx < 1e-8 && vy < 1e-8 {
        return Err(Error::DegenerateDirections { variance: vx.max(vy) });
    }
    let a_z = -(covariance(&ax, &bx) + covariance(&ay, &by)) / (vx + vy);
    let cop_x: Vec<f64> = ax.iter().zip(&bx).map(|(a, b)| a * a_z + b).collect();
    let cop_y: Vec<f64> = ay.iter().zip(&by).map(|(a, b)| a * a_z + b).collect();
    Ok(ShearFit {
        a_z,
        spread_x: std_population(&cop_x),
        spread_y: std_population(&cop_y),
        cop: (mean(&cop_x), mean(&cop_y)),
        samples: loaded.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShearSummary {
    pub trials: Vec<ShearFit>,
    pub mean_a_z: f64,
    /// Half-width of the 95% confidence interval of the mean offset.
    pub ci95_a_z: f64,
    pub mean_spread_x: f64,
    pub mean_spread_y: f64,
}

/// Fits every trial on its own and aggregates the offsets.
pub fn shear_offset_trials(trials: &[Vec<Wrench>], fz_min: f64) -> Result<ShearSummary> {
    if trials.is_empty() {
        return Err(Error::InvalidInput("no shear trials".into()));
    }
    let fits = trials
        .iter()
        .map(|t| optimize_shear_offset(t, fz_min))
        .collect::<Result<Vec<_>>>()?;
    let offsets: Vec<f64> = fits.iter().map(|f| f.a_z).collect();
    Ok(ShearSummary {
        mean_a_z: mean(&offsets),
        ci95_a_z: 1.96 * std_sample(&offsets) / (offsets.len() as f64).sqrt(),
        mean_spread_x: mean(&fits.iter().map(|f| f.spread_x).collect::<Vec<_>>()),
        mean_spread_y: mean(&fits.iter().map(|f| f.spread_y).collect::<Vec<_>>()),
        trials: fits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopSample {
    pub wrench: Wrench,
    /// Device COP (m).
    pub cop: (f64, f64),
    /// Reference position, e.g. from motion capture (m).
    pub ground_truth: Option<(f64, f64)>,
}

impl CopSample {
    pub fn error(&self) -> Option<(f64, f64)> {
        self.ground_truth.map(|(x, y)| (self.cop.0 - x, self.cop.1 - y))
    }
}

pub const SURFACE_TERMS: usize = 9;

/// Separable quartic `c₀ + Σ aₙ·uⁿ + Σ bₙ·vⁿ` (n = 1..4) in normalized
/// coordinates `u, v ∈ [−1, 1]`. Coefficient order: `c₀, a₁..a₄, b₁..b₄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePolynomial {
    pub coeffs: [f64; SURFACE_TERMS],
}

impl SurfacePolynomial {
    pub const ZERO: Self = Self { coeffs: [0.0; SURFACE_TERMS] };

    pub fn basis(u: f64, v: f64) -> [f64; SURFACE_TERMS] {
        [1.0, u, u * u, u.powi(3), u.powi(4), v, v * v, v.powi(3), v.powi(4)]
    }

    pub fn eval_normalized(&self, u: f64, v: f64) -> f64 {
        Self::basis(u, v).iter().zip(&self.coeffs).map(|(b, c)| b * c).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopCorrectionModel {
    /// Shear offset used when computing raw COP (m).
    pub a_z: f64,
    pub norm_x: Normalizer,
    pub norm_y: Normalizer,
    /// Error surface of the x coordinate.
    pub surface_x: SurfacePolynomial,
    pub surface_y: SurfacePolynomial,
    pub r2_x: f64,
    pub r2_y: f64,
}

const MODEL_FORMAT: &str = "treadmill-cop-model";
const MODEL_VERSION: u32 = 1;
/// Slack on the calibrated rectangle in normalized units.
const BOUNDS_TOLERANCE: f64 = 1e-9;

impl CopCorrectionModel {
    /// Model that applies `a_z` and no surface correction.
    pub fn identity(a_z: f64) -> Self {
        Self {
            a_z,
            norm_x: Normalizer { center: 0.0, half_range: 1.0 },
            norm_y: Normalizer { center: 0.0, half_range: 1.0 },
            surface_x: SurfacePolynomial::ZERO,
            surface_y: SurfacePolynomial::ZERO,
            r2_x: 1.0,
            r2_y: 1.0,
        }
    }

    fn normalize(&self, x: f64, y: f64) -> (f64, f64) {
        (self.norm_x.apply(x), self.norm_y.apply(y))
    }

    /// `(S_x(x, y), S_y(x, y))` without any bounds check.
    pub fn error_at(&self, x: f64, y: f64) -> (f64, f64) {
        let (u, v) = self.normalize(x, y);
        (self.surface_x.eval_normalized(u, v), self.surface_y.eval_normalized(u, v))
    }

    pub fn in_bounds(&self, x: f64, y: f64) -> bool {
        let (u, v) = self.normalize(x, y);
        u.abs() <= 1.0 + BOUNDS_TOLERANCE && v.abs() <= 1.0 + BOUNDS_TOLERANCE
    }

    pub fn to_config(&self) -> Config {
        let list = |s: &SurfacePolynomial| s.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
        let mut cfg = Config::new();
        cfg.set("format", MODEL_FORMAT);
        cfg.set("version", MODEL_VERSION);
        cfg.set("a_z", self.a_z);
        cfg.set("x_center", self.norm_x.center);
        cfg.set("x_half_range", self.norm_x.half_range);
        cfg.set("y_center", self.norm_y.center);
        cfg.set("y_half_range", self.norm_y.half_range);
        cfg.set("surface_x", list(&self.surface_x));
        cfg.set("surface_y", list(&self.surface_y));
        cfg.set("r2_x", self.r2_x);
        cfg.set("r2_y", self.r2_y);
        cfg
    }

    pub fn from_config(cfg: &Config) -> Result<Self> {
        if cfg.get("format") != Some(MODEL_FORMAT) {
            return Err(Error::Config(format!("not a COP model file (format must be `{MODEL_FORMAT}`)")));
        }
        let version: u32 = cfg.require("version")?;
        if version != MODEL_VERSION {
            return Err(Error::Config(format!("unsupported COP model version {version}")));
        }
        let surface = |key: &str| -> Result<SurfacePolynomial> {
            let v = cfg
                .f64_list(key)?
                .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))?;
            let coeffs: [f64; SURFACE_TERMS] = v
                .try_into()
                .map_err(|_| Error::Config(format!("`{key}` needs {SURFACE_TERMS} coefficients")))?;
            Ok(SurfacePolynomial { coeffs })
        };
        let half = |key: &str| -> Result<f64> {
            let v: f64 = cfg.require(key)?;
            if !(v > 0.0) {
                return Err(Error::Config(format!("`{key}` must be > 0")));
            }
            Ok(v)
        };
        Ok(Self {
            a_z: cfg.require("a_z")?,
            norm_x: Normalizer { center: cfg.require("x_center")?, half_range: half("x_half_range")? },
            norm_y: Normalizer { center: cfg.require("y_center")?, half_range: half("y_half_range")? },
            surface_x: surface("surface_x")?,
            surface_y: surface("surface_y")?,
            r2_x: cfg.require("r2_x")?,
            r2_y: cfg.require("r2_y")?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_config().save(path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_config(&Config::load(path)?)
    }
}

fn r_squared(observed: &[f64], fitted: &[f64]) -> f64 {
    let m = mean(observed);
    let ss_tot: f64 = observed.iter().map(|o| (o - m).powi(2)).sum();
    let ss_res: f64 = observed.iter().zip(fitted).map(|(o, f)| (o - f).powi(2)).sum();
    let scale = observed.iter().map(|o| o * o).sum::<f64>().max(f64::MIN_POSITIVE);
    if ss_tot <= 1e-24 * scale || ss_tot == 0.0 {
        // constant data: perfect if the residual vanishes as well
        return if ss_res <= 1e-24 * scale { 1.0 } else { 0.0 };
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Fits the x and y COP error surfaces over the raw device COP positions.
pub fn fit_cop_error_surface(samples: &[CopSample], a_z: f64) -> Result<CopCorrectionModel> {
    let mut pts = Vec::with_capacity(samples.len());
    for s in samples {
        let (ex, ey) = s
            .error()
            .ok_or_else(|| Error::InvalidInput("every COP sample needs a ground-truth position".into()))?;
        pts.push((s.cop.0, s.cop.1, ex, ey));
    }
    let mut distinct: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, p.1)).collect();
    distinct.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    distinct.dedup();
    if distinct.len() < SURFACE_TERMS {
        return Err(Error::InvalidInput(format!(
            "surface fit needs at least {SURFACE_TERMS} distinct positions, got {}",
            distinct.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let norm_x = Normalizer::spanning(&xs);
    let norm_y = Normalizer::spanning(&ys);
    let design = DMatrix::from_fn(pts.len(), SURFACE_TERMS, |r, c| {
        SurfacePolynomial::basis(norm_x.apply(pts[r].0), norm_y.apply(pts[r].1))[c]
    });

    let solve = |target: Vec<f64>| -> Result<(SurfacePolynomial, f64)> {
        let (coef, condition) = lstsq(&design, &DVector::from_vec(target.clone()));
        if !(condition <= MAX_CONDITION) {
            return Err(Error::RankDeficient { condition });
        }
        let surface = SurfacePolynomial {
            coeffs: std::array::from_fn(|i| coef[i]),
        };
        let fitted: Vec<f64> = (&design * &coef).iter().cloned().collect();
        Ok((surface, r_squared(&target, &fitted)))
    };
    let (surface_x, r2_x) = solve(pts.iter().map(|p| p.2).collect())?;
    let (surface_y, r2_y) = solve(pts.iter().map(|p| p.3).collect())?;
    Ok(CopCorrectionModel { a_z, norm_x, norm_y, surface_x, surface_y, r2_x, r2_y })
}

/// `raw − S(raw)`. Positions outside the calibrated rectangle are refused
/// unless `allow_extrapolation` is set.
pub fn correct_cop(raw: (f64, f64), model: &CopCorrectionModel, allow_extrapolation: bool) -> Result<(f64, f64)> {
    if !allow_extrapolation && !model.in_bounds(raw.0, raw.1) {
        return Err(Error::OutOfBounds { x: raw.0, y: raw.1 });
    }
    let (ex, ey) = model.error_at(raw.0, raw.1);
    Ok((raw.0 - ex, raw.1 - ey))
}

/// Groups a continuous recording into static placements: contiguous runs with
/// `|F_z| > fz_min` lasting at least `min_duration`, trimmed by `trim` seconds
/// at both ends. Each placement yields one sample with averaged wrench and,
/// when `mocap` is given, the mean marker `x, y` over the same interval.
pub fn static_placements(
    wrench: &TimeSeries,
    mocap: Option<&TimeSeries>,
    a_z: f64,
    fz_min: f64,
    trim: f64,
    min_duration: f64,
) -> Result<Vec<CopSample>> {
    let ws = wrenches_from_series(wrench)?;
    let loaded: Vec<bool> = ws.iter().map(|w| w.force[2].abs() > fz_min).collect();
    let trim_n = (trim * wrench.rate()).round() as usize;
    let mut out = Vec::new();
    let mut i = 0;
    while i < ws.len() {
        if !loaded[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < ws.len() && loaded[i] {
            i += 1;
        }
        let (lo, hi) = (start + trim_n, i.saturating_sub(trim_n));
        if hi <= lo || ((hi - lo) as f64) / wrench.rate() < min_duration {
            continue;
        }
        let w = Wrench::mean(&ws[lo..hi]);
        let cop = cop_from_wrench(&w, a_z, fz_min)?;
        let ground_truth = match mocap {
            Some(m) => {
                let (t0, t1) = (wrench.time(lo), wrench.time(hi - 1));
                let idx: Vec<usize> = (0..m.len()).filter(|&k| m.time(k) >= t0 && m.time(k) <= t1).collect();
                if idx.is_empty() {
                    return Err(Error::InvalidInput(format!(
                        "no motion-capture samples between {t0:.3} s and {t1:.3} s"
                    )));
                }
                let (mx, my) = (m.channel("x")?, m.channel("y")?);
                Some((
                    idx.iter().map(|&k| mx[k]).sum::<f64>() / idx.len() as f64,
                    idx.iter().map(|&k| my[k]).sum::<f64>() / idx.len() as f64,
                ))
            }
            None => None,
        };
        out.push(CopSample { wrench: w, cop, ground_truth });
    }
    Ok(out)
}
