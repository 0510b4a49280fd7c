//! Closed-form natural-frequency model of the compound running plate.
//!
//! The plate is a honeycomb sandwich (outer thickness `h_s`, cavity `h_i`)
//! with a carbon-fibre layer bonded on both faces, giving a total stack of
//! `h_c`. It is treated as a simply supported beam of length `l` loaded at
//! mid-span, whose bending stiffness together with the floating mass sets the
//! first vertical mode.

use std::f64::consts::PI;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::series::Table;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateSpec {
    /// Plate width `b` (m).
    pub width: f64,
    /// Free length `l` (m).
    pub length: f64,
    /// Sandwich cavity thickness `h_i` (m).
    pub inner_thickness: f64,
    /// Sandwich outer thickness `h_s` (m).
    pub sandwich_thickness: f64,
    /// Total stack thickness including carbon layers `h_c` (m).
    pub compound_thickness: f64,
    /// Sandwich face modulus `E_s` (Pa).
    pub sandwich_modulus: f64,
    /// Carbon-fibre modulus `E_c` (Pa).
    pub carbon_modulus: f64,
    /// Floating mass taking part in the oscillation (kg).
    pub mass: f64,
}

pub const CONFIG_KEYS: [&str; 8] = ["b", "l", "h_i", "h_s", "h_c", "E_s", "E_c", "m"];

impl PlateSpec {
    /// Checks layer nesting `0 < h_i < h_s <= h_c` and positivity.
    ///
    /// A zero-thickness carbon layer (`h_c == h_s`) is accepted so the bare
    /// sandwich can be modelled.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("b", self.width),
            ("l", self.length),
            ("m", self.mass),
            ("E_s", self.sandwich_modulus),
            ("E_c", self.carbon_modulus),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSpec(format!("{name} must be > 0, got {v}")));
            }
        }
        let (hi, hs, hc) = (self.inner_thickness, self.sandwich_thickness, self.compound_thickness);
        if !(hi.is_finite() && hs.is_finite() && hc.is_finite()) {
            return Err(Error::InvalidSpec("layer thicknesses must be finite".into()));
        }
        if !(0.0 < hi && hi < hs && hs <= hc) {
            return Err(Error::InvalidSpec(format!(
                "layer nesting violated: need 0 < h_i < h_s <= h_c, got h_i={hi}, h_s={hs}, h_c={hc}"
            )));
        }
        Ok(())
    }

    pub fn carbon_layer_thickness(&self) -> f64 {
        0.5 * (self.compound_thickness - self.sandwich_thickness)
    }

    /// Copy with a carbon layer of thickness `t` on each face.
    pub fn with_carbon_layer(&self, t: f64) -> Self {
        Self { compound_thickness: self.sandwich_thickness + 2.0 * t, ..*self }
    }

    pub fn from_config(cfg: &Config) -> Result<Self> {
        let spec = Self {
            width: cfg.require("b")?,
            length: cfg.require("l")?,
            inner_thickness: cfg.require("h_i")?,
            sandwich_thickness: cfg.require("h_s")?,
            compound_thickness: cfg.require("h_c")?,
            sandwich_modulus: cfg.require("E_s")?,
            carbon_modulus: cfg.require("E_c")?,
            mass: cfg.require("m")?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_config(&self) -> Config {
        let mut cfg = Config::new();
        cfg.set("b", self.width);
        cfg.set("l", self.length);
        cfg.set("h_i", self.inner_thickness);
        cfg.set("h_s", self.sandwich_thickness);
        cfg.set("h_c", self.compound_thickness);
        cfg.set("E_s", self.sandwich_modulus);
        cfg.set("E_c", self.carbon_modulus);
        cfg.set("m", self.mass);
        cfg
    }
}

/// First bending natural frequency (Hz):
/// `sqrt(b·(E_s·(h_s³−h_i³) + E_c·(h_c³−h_s³)) / (π²·m·l³))`.
pub fn natural_frequency(spec: &PlateSpec) -> Result<f64> {
    spec.validate()?;
    let PlateSpec {
        width: b,
        length: l,
        inner_thickness: hi,
        sandwich_thickness: hs,
        compound_thickness: hc,
        sandwich_modulus: es,
        carbon_modulus: ec,
        mass: m,
    } = *spec;
    let bending = b * (es * (hs.powi(3) - hi.powi(3)) + ec * (hc.powi(3) - hs.powi(3)));
    Ok((bending / (PI * PI * m * l.powi(3))).sqrt())
}

/// How the floating mass changes across a design sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassModel {
    /// Mass fixed at the base spec's value.
    Constant,
    /// `m = fixed_mass + b·l·(sandwich_areal_density + 2·t·carbon_density)`.
    Areal {
        /// Mass not scaling with plate area (kg).
        fixed_mass: f64,
        /// Sandwich plate mass per area (kg/m²).
        sandwich_areal_density: f64,
        /// Carbon-fibre volumetric density (kg/m³).
        carbon_density: f64,
    },
}

impl MassModel {
    pub fn mass(&self, base: &PlateSpec, length: f64, carbon_thickness: f64) -> f64 {
        match *self {
            MassModel::Constant => base.mass,
            MassModel::Areal {
                fixed_mass,
                sandwich_areal_density,
                carbon_density,
            } => fixed_mass + base.width * length * (sandwich_areal_density + 2.0 * carbon_thickness * carbon_density),
        }
    }

    /// Reads `mass_model = constant|areal` plus, for `areal`, the keys
    /// `m_fixed`, `rho_sandwich_areal` and `rho_carbon`.
    pub fn from_config(cfg: &Config) -> Result<Self> {
        match cfg.get("mass_model").unwrap_or("constant") {
            "constant" => Ok(MassModel::Constant),
            "areal" => Ok(MassModel::Areal {
                fixed_mass: cfg.require("m_fixed")?,
                sandwich_areal_density: cfg.require("rho_sandwich_areal")?,
                carbon_density: cfg.require("rho_carbon")?,
            }),
            other => Err(Error::Config(format!("unknown mass_model `{other}` (constant|areal)"))),
        }
    }
}

/// Natural frequency over a (length × carbon-thickness) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySweep {
    pub lengths: Vec<f64>,
    pub thicknesses: Vec<f64>,
    /// Row-major over (length, thickness). `None` flags a cell whose
    /// derived spec was invalid.
    pub f_n: Vec<Option<f64>>,
}

impl FrequencySweep {
    pub fn get(&self, length_idx: usize, thickness_idx: usize) -> Option<f64> {
        self.f_n[length_idx * self.thicknesses.len() + thickness_idx]
    }

    pub fn row(&self, length_idx: usize) -> &[Option<f64>] {
        let n = self.thicknesses.len();
        &self.f_n[length_idx * n..(length_idx + 1) * n]
    }

    /// `length,thickness,f_n` rows; invalid cells are written as NaN.
    pub fn to_table(&self) -> Table {
        let mut t = Table::with_header(&["length", "thickness", "f_n"]);
        for (i, &l) in self.lengths.iter().enumerate() {
            for (j, &th) in self.thicknesses.iter().enumerate() {
                t.push(vec![l, th, self.get(i, j).unwrap_or(f64::NAN)]);
            }
        }
        t
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!("{name} grid must be finite and strictly increasing")));
    }
    Ok(())
}

pub fn frequency_sweep(
    base: &PlateSpec,
    lengths: &[f64],
    carbon_thicknesses: &[f64],
    mass_model: MassModel,
) -> Result<FrequencySweep> {
    check_grid("length", lengths)?;
    check_grid("thickness", carbon_thicknesses)?;
    let mut f_n = Vec::with_capacity(lengths.len() * carbon_thicknesses.len());
    for &l in lengths {
        for &t in carbon_thicknesses {
            let spec = PlateSpec {
                length: l,
                mass: mass_model.mass(base, l, t),
                ..base.with_carbon_layer(t)
            };
            f_n.push(natural_frequency(&spec).ok());
        }
    }
    Ok(FrequencySweep {
        lengths: lengths.to_vec(),
        thicknesses: carbon_thicknesses.to_vec(),
        f_n,
    })
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Beam deflection, Hooke's law and the layer inertias composed step by
    /// step, kept apart from the closed form above.
    fn composed_frequency(s: &PlateSpec) -> f64 {
        let i_sandwich = s.width * (s.sandwich_thickness.powi(3) - s.inner_thickness.powi(3)) / 12.0;
        let i_carbon = s.width * (s.compound_thickness.powi(3) - s.sandwich_thickness.powi(3)) / 12.0;
        let ei = s.sandwich_modulus * i_sandwich + s.carbon_modulus * i_carbon;
        // deflection under unit force, then stiffness
        let deflection = s.length.powi(3) / (48.0 * ei);
        let stiffness = 1.0 / deflection;
        (stiffness / s.mass).sqrt() / (2.0 * PI)
    }

    fn reference() -> PlateSpec {
        PlateSpec {
            width: 0.5,
            length: 1.5,
            inner_thickness: 0.009,
            sandwich_thickness: 0.010,
            compound_thickness: 0.014,
            sandwich_modulus: 7.0e10,
            carbon_modulus: 7.0e10,
            mass: 45.0,
        }
    }

    #[test]
    fn matches_composed_equations() {
        let s = reference();
        let f = natural_frequency(&s).unwrap();
        // equal moduli: single inertia over the whole stack
        let i_total = s.width * (s.compound_thickness.powi(3) - s.inner_thickness.powi(3)) / 12.0;
        let oracle = (48.0 * s.sandwich_modulus * i_total / (s.mass * s.length.powi(3))).sqrt() / (2.0 * PI);
        assert!(((f - oracle) / oracle).abs() < 1e-12, "{f} vs {oracle}");
    }

    #[test]
    fn quadrupled_mass_halves_frequency() {
        let s = reference();
        let heavy = PlateSpec { mass: 4.0 * s.mass, ..s };
        let ratio = natural_frequency(&heavy).unwrap() / natural_frequency(&s).unwrap();
        assert!((ratio - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_carbon_layer_is_bare_sandwich() {
        let s = PlateSpec { compound_thickness: 0.010, carbon_modulus: 2.3e11, ..reference() };
        let f = natural_frequency(&s).unwrap();
        let bare = (s.width * s.sandwich_modulus * (s.sandwich_thickness.powi(3) - s.inner_thickness.powi(3))
            / (PI * PI * s.mass * s.length.powi(3)))
        .sqrt();
        assert!(((f - bare) / bare).abs() < 1e-14);
    }

    #[test]
    fn invalid_specs_rejected() {
        let s = reference();
        for bad in [
            PlateSpec { inner_thickness: 0.0, ..s },
            PlateSpec { inner_thickness: 0.011, ..s },
            PlateSpec { compound_thickness: 0.009, ..s },
            PlateSpec { mass: 0.0, ..s },
            PlateSpec { width: -1.0, ..s },
            PlateSpec { carbon_modulus: f64::NAN, ..s },
        ] {
            assert!(matches!(natural_frequency(&bad), Err(Error::InvalidSpec(_))), "{bad:?}");
        }
    }

    #[test]
    fn identity_sweep() {
        let s = reference();
        let t = s.carbon_layer_thickness();
        let sweep = frequency_sweep(&s, &[s.length], &[t], MassModel::Constant).unwrap();
        assert_eq!(sweep.f_n.len(), 1);
        let expect = natural_frequency(&s).unwrap();
        assert!((sweep.get(0, 0).unwrap() - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn sweep_matches_brute_force() {
        let s = reference();
        let lengths = linspace(1.0, 2.0, 11);
        let ts = linspace(0.001, 0.004, 7);
        let sweep = frequency_sweep(&s, &lengths, &ts, MassModel::Constant).unwrap();
        for (i, &l) in lengths.iter().enumerate() {
            for (j, &t) in ts.iter().enumerate() {
                let cell = composed_frequency(&PlateSpec { length: l, compound_thickness: s.sandwich_thickness + 2.0 * t, ..s });
                let got = sweep.get(i, j).unwrap();
                assert!(((got - cell) / cell).abs() < 1e-12);
            }
            let row: Vec<f64> = sweep.row(i).iter().map(|v| v.unwrap()).collect();
            assert!(row.windows(2).all(|w| w[1] > w[0]), "increasing in thickness");
        }
        for j in 0..ts.len() {
            let col: Vec<f64> = (0..lengths.len()).map(|i| sweep.get(i, j).unwrap()).collect();
            assert!(col.windows(2).all(|w| w[1] < w[0]), "decreasing in length");
        }
    }

    #[test]
    fn areal_mass_model_adds_mass() {
        let s = reference();
        let model = MassModel::Areal { fixed_mass: 30.0, sandwich_areal_density: 9.0, carbon_density: 1600.0 };
        let m = model.mass(&s, 1.5, 0.002);
        assert!((m - (30.0 + 0.5 * 1.5 * (9.0 + 2.0 * 0.002 * 1600.0))).abs() < 1e-12);
        let sweep = frequency_sweep(&s, &[1.5], &[0.002], model).unwrap();
        let direct = natural_frequency(&PlateSpec { mass: m, ..s.with_carbon_layer(0.002) }).unwrap();
        assert_eq!(sweep.get(0, 0).unwrap(), direct);
    }

    #[test]
    fn invalid_cells_are_flagged() {
        // a negative thickness collapses h_c below h_s
        let s = reference();
        let sweep = frequency_sweep(&s, &[1.5], &[-0.001, 0.002], MassModel::Constant).unwrap();
        assert_eq!(sweep.get(0, 0), None);
        assert!(sweep.get(0, 1).is_some());
    }

    #[test]
    fn bad_grids_rejected() {
        let s = reference();
        assert!(frequency_sweep(&s, &[], &[0.001], MassModel::Constant).is_err());
        assert!(frequency_sweep(&s, &[2.0, 1.0], &[0.001], MassModel::Constant).is_err());
    }

    #[test]
    fn config_round_trip() {
        let s = reference();
        assert_eq!(PlateSpec::from_config(&s.to_config()).unwrap(), s);
    }

    prop_compose! {
        fn valid_spec()(
            width in 0.1f64..2.0,
            length in 0.3f64..3.0,
            hi in 0.001f64..0.02,
            ds in 0.0002f64..0.005,
            dc in 0.0f64..0.01,
            es in 1e9f64..3e11,
            ec in 1e9f64..3e11,
            mass in 1.0f64..500.0,
        ) -> PlateSpec {
            PlateSpec {
                width, length,
                inner_thickness: hi,
                sandwich_thickness: hi + ds,
                compound_thickness: hi + ds + dc,
                sandwich_modulus: es,
                carbon_modulus: ec,
                mass,
            }
        }
    }

    proptest! {
        #[test]
        fn closed_form_equals_composition(s in valid_spec()) {
            let f = natural_frequency(&s).unwrap();
            let oracle = composed_frequency(&s);
            prop_assert!(((f - oracle) / oracle).abs() < 1e-12);
        }

        #[test]
        fn scaling_laws(s in valid_spec()) {
            let f = natural_frequency(&s).unwrap();
            let long = natural_frequency(&PlateSpec { length: 2.0 * s.length, ..s }).unwrap();
            prop_assert!((long / f - 2f64.powf(-1.5)).abs() < 1e-12);
            let heavy = natural_frequency(&PlateSpec { mass: 4.0 * s.mass, ..s }).unwrap();
            prop_assert!((heavy / f - 0.5).abs() < 1e-12);
            let thicker = natural_frequency(&PlateSpec { compound_thickness: s.compound_thickness + 1e-4, ..s }).unwrap();
            prop_assert!(thicker > f);
        }

        #[test]
        fn modulus_exchange_symmetry(s in valid_spec(), es in 1e9f64..3e11, ec in 1e9f64..3e11) {
            // give both layers the same cubic thickness term, then swap moduli
            let hs3 = s.sandwich_thickness.powi(3);
            let hi = s.inner_thickness;
            let hc = (2.0 * hs3 - hi.powi(3)).cbrt();
            let a = PlateSpec { sandwich_modulus: es, carbon_modulus: ec, compound_thickness: hc, ..s };
            let b = PlateSpec { sandwich_modulus: ec, carbon_modulus: es, ..a };
            let (fa, fb) = (natural_frequency(&a).unwrap(), natural_frequency(&b).unwrap());
            prop_assert!(((fa - fb) / fa).abs() < 1e-12);
        }
    }
}
