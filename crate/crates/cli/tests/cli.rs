use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use treadmill_core::config::Config;
use treadmill_core::plate::{self, PlateSpec};
use treadmill_core::series::Table;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treadmill"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    if !out.status.success() {
        panic!(
            "treadmill {args:?} failed ({:?}):\n{}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
    }
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn scenario(dir: &Path) -> Config {
    Config::load(dir.join("scenario.cfg")).unwrap()
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "cfg"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn impact_round_trip_through_files() {
    let tmp = TempDir::new().unwrap();
    let sim = tmp.path().join("sim");
    let rep = tmp.path().join("rep");
    run(&["simulate", "impact", "--seed", "7", "-o", p(&sim)]);
    run(&["analyze", "impact", "-i", p(&sim.join("impact.csv")), "-o", p(&rep)]);
    let truth: f64 = scenario(&sim).require("truth_f_n").unwrap();
    let text = std::fs::read_to_string(rep.join("impact_report.csv")).unwrap();
    let row = text.lines().find(|l| l.starts_with("Fz,")).expect("Fz analysed");
    let f0: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    let bin_width = 10_000.0 / 16_384.0;
    assert!((f0 - truth).abs() <= bin_width, "{f0} vs {truth}");
    assert!(rep.join("impact_spectrum.svg").exists());
}

#[test]
fn single_cell_sweep_equals_natural_frequency() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("plate.cfg");
    std::fs::write(&cfg, "b = 0.5\nl = 1.5\nh_i = 0.009\nh_s = 0.010\nh_c = 0.014\nE_s = 7e10\nE_c = 7e10\nm = 45\n").unwrap();
    run(&["design", "sweep", "--config", p(&cfg), "-o", p(tmp.path())]);
    let table = Table::read(tmp.path().join("sweep.csv")).unwrap();
    let f = table.column("f_n").unwrap();
    assert_eq!(f.len(), 1);
    let spec = PlateSpec::from_config(&Config::load(&cfg).unwrap()).unwrap();
    assert_eq!(f[0], plate::natural_frequency(&spec).unwrap());
    assert!(std::fs::read_to_string(tmp.path().join("sweep.svg")).unwrap().contains("<circle"));
}

#[test]
fn sweep_grid_dimensions() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("plate.cfg");
    std::fs::write(&cfg, "b = 0.5\nl = 1.5\nh_i = 0.009\nh_s = 0.010\nh_c = 0.014\nE_s = 7e10\nE_c = 7e10\nm = 45\n").unwrap();
    run(&[
        "design", "sweep", "--config", p(&cfg), "--lengths", "1.0:2.0:5", "--thicknesses", "0.001:0.004:4", "-o",
        p(tmp.path()),
    ]);
    let table = Table::read(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(table.column("f_n").unwrap().len(), 20);
}

#[test]
fn calibration_fixture_matches_embedded_expectations() {
    let tmp = TempDir::new().unwrap();
    let sim = tmp.path().join("sim");
    let rep = tmp.path().join("rep");
    run(&["simulate", "calibration", "--config", p(&fixture("calibration.cfg")), "-o", p(&sim)]);
    run(&["calibrate", "iso376", "-i", p(&sim), "-o", p(&rep)]);
    let truth = scenario(&sim);
    let table = Table::read(rep.join("calibration_report.csv")).unwrap();
    let n: usize = truth.require("expected_points").unwrap();
    for (col, key, tol) in [
        ("max_error_z", "expected_max_error_z", 0.05),
        ("linearity_pct", "expected_linearity_pct", 0.01),
        ("repeatability_pct", "expected_repeatability_pct", 0.01),
        ("hysteresis_pct", "expected_hysteresis_pct", 0.01),
    ] {
        let want: f64 = truth.require(key).unwrap();
        let got = table.column(col).unwrap();
        assert_eq!(got.len(), n);
        for g in got {
            assert!((g - want).abs() <= tol, "{col}: {g} vs {want}");
        }
    }
    for axis in ["x", "y", "z"] {
        assert!(rep.join(format!("error_map_{axis}.svg")).exists());
    }
}

#[test]
fn cop_pipeline_shear_surface_apply() {
    let tmp = TempDir::new().unwrap();
    let shear = tmp.path().join("shear");
    run(&["simulate", "shear", "--config", p(&fixture("shear.cfg")), "-o", p(&shear)]);
    let trials: Vec<String> = (1..=15).map(|k| p(&shear.join(format!("shear_trial{k:02}.csv"))).to_string()).collect();
    let mut args = vec!["cop", "shear", "-o"];
    let shear_out = tmp.path().join("shear_out");
    args.push(p(&shear_out));
    args.push("-i");
    args.extend(trials.iter().map(String::as_str));
    run(&args);
    let summary = Table::read(shear_out.join("shear_summary.csv")).unwrap();
    let a_z = summary.column("mean_a_z").unwrap()[0];
    assert!((a_z - 0.078).abs() < 0.005, "{a_z}");

    let grid = tmp.path().join("grid");
    let fit = tmp.path().join("fit");
    run(&["simulate", "cop-grid", "--config", p(&fixture("cop_grid.cfg")), "-o", p(&grid)]);
    run(&[
        "cop", "surface", "--wrench", p(&grid.join("cop_wrench.csv")), "--mocap", p(&grid.join("cop_mocap.csv")), "-o",
        p(&fit),
    ]);
    let model = Config::load(fit.join("cop_model.cfg")).unwrap();
    assert!(model.require::<f64>("r2_x").unwrap() >= 0.999);
    assert!(model.require::<f64>("r2_y").unwrap() >= 0.999);
    let surface = Table::read(fit.join("cop_surface.csv")).unwrap();
    assert_eq!(surface.column("point").unwrap().len(), 28);
    assert!(surface.column("corrected_error_x").unwrap().iter().all(|e| e.abs() <= 1e-3));
    assert!(surface.column("corrected_error_y").unwrap().iter().all(|e| e.abs() <= 5e-4));

    let applied = tmp.path().join("applied");
    run(&["cop", "apply", "--model", p(&fit.join("cop_model.cfg")), "-i", p(&grid.join("cop_wrench.csv")), "-o", p(&applied)]);
    let text = std::fs::read_to_string(applied.join("cop.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,raw_x,raw_y,x,y,in_bounds"));
    let corrected: Vec<f64> = lines.filter_map(|l| l.split(',').nth(3)?.parse().ok()).collect();
    assert!(corrected.len() > 1000);
    assert!(corrected.iter().all(|x| x.abs() < 0.7));
}

#[test]
fn gait_fixture_has_thirty_strides() {
    let tmp = TempDir::new().unwrap();
    let sim = tmp.path().join("sim");
    let rep = tmp.path().join("rep");
    run(&["simulate", "gait", "--config", p(&fixture("gait.cfg")), "-o", p(&sim)]);
    run(&["gait", "average", "-i", p(&sim.join("gait.csv")), "--body-weight", "882.9", "-o", p(&rep)]);
    let strides = Table::read(rep.join("strides.csv")).unwrap();
    assert_eq!(strides.column("stride").unwrap().len(), 30);
    assert_eq!(scenario(&sim).require::<usize>("truth_strides").unwrap(), 30);
    let ens = Table::read(rep.join("gait_ensemble.csv")).unwrap();
    assert_eq!(ens.column("percent").unwrap().len(), 101);
    assert!(std::fs::read_to_string(rep.join("gait.svg")).unwrap().contains("body weight"));
}

#[test]
fn noise_fixture_band_matches_truth() {
    let tmp = TempDir::new().unwrap();
    let sim = tmp.path().join("sim");
    let rep = tmp.path().join("rep");
    run(&["simulate", "noise", "--config", p(&fixture("noise_idle.cfg")), "-o", p(&sim)]);
    run(&["analyze", "noise", "-i", p(&sim.join("noise.csv")), "-o", p(&rep)]);
    let truth = scenario(&sim);
    let text = std::fs::read_to_string(rep.join("noise_report.csv")).unwrap();
    for (line, axis) in text.lines().skip(1).zip(["x", "y", "z"]) {
        let band: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        let want: f64 = truth.require(&format!("truth_band_{axis}")).unwrap();
        assert!((band - want).abs() / want < 0.05, "{axis}: {band} vs {want}");
    }
}

#[test]
fn same_seed_gives_identical_csv() {
    let tmp = TempDir::new().unwrap();
    for fx in ["impact_z.cfg", "noise_walking.cfg", "shear.cfg", "cop_grid.cfg", "gait.cfg", "calibration.cfg"] {
        let a = tmp.path().join(format!("{fx}.a"));
        let b = tmp.path().join(format!("{fx}.b"));
        let name = Config::load(fixture(fx)).unwrap().get("scenario").unwrap().to_string();
        run(&["simulate", &name, "--config", p(&fixture(fx)), "-o", p(&a)]);
        run(&["--jobs", "3", "simulate", &name, "--config", p(&fixture(fx)), "-o", p(&b)]);
        assert_eq!(csv_files(&a), csv_files(&b), "{fx}");
    }
}

#[test]
fn analysis_outputs_repeat_byte_for_byte() {
    let tmp = TempDir::new().unwrap();
    let sim = tmp.path().join("sim");
    run(&["simulate", "calibration", "--config", p(&fixture("calibration.cfg")), "-o", p(&sim)]);
    let before = csv_files(&sim);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&["--jobs", "1", "calibrate", "iso376", "-i", p(&sim), "-o", p(&a)]);
    run(&["--jobs", "4", "calibrate", "iso376", "-i", p(&sim), "-o", p(&b)]);
    assert_eq!(csv_files(&a), csv_files(&b));
    assert_eq!(before, csv_files(&sim), "inputs must not change");
}

#[test]
fn missing_seed_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let out = bin().args(["simulate", "impact", "-o", p(tmp.path())]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[config]"));
}

#[test]
fn malformed_csv_is_a_parse_error_with_location() {
    let tmp = TempDir::new().unwrap();
    let f = tmp.path().join("bad.csv");
    std::fs::write(&f, "time,Fz\n0,1\n0.001,abc\n0.002,3\n").unwrap();
    let out = bin().args(["analyze", "noise", "-i", p(&f), "-o", p(tmp.path())]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error[parse]") && err.contains("row") && err.contains("column"), "{err}");
}

#[test]
fn flat_impact_is_an_analysis_error() {
    let tmp = TempDir::new().unwrap();
    let f = tmp.path().join("flat.csv");
    let mut text = String::from("time,Fz\n");
    for i in 0..2000 {
        text.push_str(&format!("{},1\n", i as f64 / 10_000.0));
    }
    std::fs::write(&f, text).unwrap();
    let out = bin().args(["analyze", "impact", "-i", p(&f), "--channel", "Fz", "-o", p(tmp.path())]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[analysis]"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let out = bin()
        .args(["simulate", "gait", "--seed", "1", "--set", "bodyweight=700", "-o", p(tmp.path())])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_input_file_is_reported() {
    let tmp = TempDir::new().unwrap();
    let out = bin().args(["analyze", "noise", "-i", p(&tmp.path().join("nope.csv"))]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ranges_table_lists_every_stage() {
    let tmp = TempDir::new().unwrap();
    run(&["design", "ranges", "--natural-frequency", "169", "-o", p(tmp.path())]);
    let text = std::fs::read_to_string(tmp.path().join("ranges.csv")).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(tmp.path().join("bandwidth.csv").exists());
}
