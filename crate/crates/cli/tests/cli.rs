//! End-to-end tests of the `wgspec` binary: file schemas, determinism,
//! exit codes, and the scenario-level behaviors of each subcommand.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wgspec"))
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn wgspec")
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"))
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    read(path)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const TAU: f64 = std::f64::consts::TAU;
const C: f64 = 2.99792458e8;

/// Config with the vibrational branch tuned onto the beat of two modes
/// nine grid steps apart, so the two-field resonance lands on-grid.
fn resonant_config(dir: &Path, n1: f64, n2: f64) -> PathBuf {
    let vg = C / 5.0;
    let length = 1e-2;
    let spacing = TAU / length;
    let omega_v_hz = vg * spacing * 9.0 / TAU;
    let a = 250e-9;
    let k1_a = 12732.0 * spacing * a;
    let k2_a = (12732.0 - 9.0) * spacing * a;
    let cfg = serde_json::json!({
        "waveguide": {"radius_m": a, "length_m": length, "temperature_k": 4.0},
        "photon": {"omega0_hz": 1e14, "group_velocity_mps": vg, "gamma_hz": 0.1e6, "branch_id": "mu0"},
        "phonons": [
            {"kind": "acoustic", "velocity_mps": 8433.0, "Gamma_hz": 10e6, "f_hz": 1e6, "branch_id": "a"},
            {"kind": "vibrational", "omega_v_hz": omega_v_hz, "Gamma_hz": 1e6, "f_hz": 1e6, "branch_id": "v"}
        ],
        "scenario": {"type": "two_fields", "k1_a": k1_a, "n1": n1, "k2_a": k2_a, "n2": n2}
    });
    let path = dir.join("resonant.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

/// Wide-mode-spacing config that keeps the time-domain check cheap.
fn oracle_config(dir: &Path) -> PathBuf {
    let vg = C / 5.0;
    let length = 0.6;
    let spacing = TAU / length;
    let omega_v_hz = vg * spacing * 5.0 / TAU;
    let a = 250e-9;
    let cfg = serde_json::json!({
        "waveguide": {"radius_m": a, "length_m": length, "temperature_k": 0.4},
        "photon": {"omega0_hz": 1e14, "group_velocity_mps": vg, "gamma_hz": 10e6, "branch_id": "mu0"},
        "phonons": [
            {"kind": "acoustic", "velocity_mps": 8433.0, "Gamma_hz": 10e6, "f_hz": 0.3e6, "branch_id": "a"},
            {"kind": "vibrational", "omega_v_hz": omega_v_hz, "Gamma_hz": 10e6, "f_hz": 1e6, "branch_id": "v"}
        ],
        "scenario": {"type": "single_field", "k0_a": 3.0 * spacing * a, "n0": 1e4}
    });
    let path = dir.join("oracle.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

#[test]
fn empty_emits_schema_and_multiple_peaks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("empty");
    let res = run(
        &[
            "empty",
            "--ka",
            "2",
            "--out",
            out.to_str().unwrap(),
            "--grid-points",
            "260001",
            "--grid-halfwidth-hz",
            "13e9",
        ],
        &[],
    );
    assert_exit(&res, 0);

    let sf = read(&out.join("photon_sf.csv"));
    assert!(sf.starts_with(
        "omega_rad_s,detuning_rad_s,delta_rad_s,lambda_rad_s,sf_s,channel_id\n"
    ));
    let first = sf.lines().nth(1).unwrap();
    assert_eq!(first.split(',').count(), 6);
    // sf rows populate omega/detuning/sf and leave delta/lambda empty
    let cols: Vec<&str> = first.split(',').collect();
    assert!(!cols[0].is_empty() && cols[2].is_empty() && cols[3].is_empty());
    assert!(!cols[4].is_empty());

    let se = read(&out.join("selfenergy_m.csv"));
    let cols: Vec<&str> = se.lines().nth(1).unwrap().split(',').collect();
    assert!(!cols[2].is_empty() && !cols[3].is_empty() && cols[4].is_empty());

    // photon line plus thermal side resonances: at least 4 identified peaks
    let peaks = csv_rows(&out.join("peaks.csv"));
    let sf_peaks: Vec<_> = peaks.iter().filter(|r| r[0] == "photon_sf").collect();
    assert!(sf_peaks.len() >= 4, "found {} sf peaks", sf_peaks.len());

    // every curve row count is invariant per file
    assert_eq!(sf.lines().count() - 1, 260001);
    assert!(out.join("manifest.json").exists());
    assert!(out.join("channels_detuning.csv").exists());
}

#[test]
fn empty_at_zero_temperature_has_no_anti_stokes_weight() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value = serde_json::json!({
        "waveguide": {"radius_m": 250e-9, "length_m": 1e-2, "temperature_k": 0.0},
        "photon": {"omega0_hz": 1e14, "group_velocity_mps": C/5.0, "gamma_hz": 0.1e6, "branch_id": "mu0"},
        "phonons": [
            {"kind": "acoustic", "velocity_mps": 8433.0, "Gamma_hz": 10e6, "f_hz": 1e6, "branch_id": "a"},
            {"kind": "vibrational", "omega_v_hz": 1e10, "Gamma_hz": 1e6, "f_hz": 1e6, "branch_id": "v"}
        ]
    });
    cfg["scenario"] = serde_json::json!({"type": "empty", "k_a": 2.0});
    let cfg_path = tmp.path().join("t0.json");
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = tmp.path().join("t0");
    let res = run(
        &[
            "empty",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--grid-points",
            "20001",
            "--grid-halfwidth-hz",
            "13e9",
        ],
        &[],
    );
    assert_exit(&res, 0);
    // anti-Stokes channels carry weight n = 0: their lambda columns are 0
    let mut saw_anti = false;
    for row in csv_rows(&out.join("channels_detuning.csv")) {
        if row[5].contains("anti-stokes") {
            saw_anti = true;
            assert_eq!(row[3], "0", "anti-Stokes lambda nonzero: {row:?}");
        }
    }
    assert!(saw_anti);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let res = run(
            &[
                "empty",
                "--ka",
                "2",
                "--out",
                out.to_str().unwrap(),
                "--grid-points",
                "5001",
                "--grid-halfwidth-hz",
                "13e9",
            ],
            &[],
        );
        assert_exit(&res, 0);
    }
    for name in [
        "photon_sf.csv",
        "selfenergy_m.csv",
        "channels_detuning.csv",
        "peaks.csv",
    ] {
        assert_eq!(
            read(&a.join(name)),
            read(&b.join(name)),
            "{name} differs between reruns"
        );
    }
}

#[test]
fn single_field_records_pump_derivation_and_odd_lambda() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sf");
    let res = run(
        &[
            "single-field",
            "--k0-a",
            "2",
            "--power-w",
            "1e-3",
            "--out",
            out.to_str().unwrap(),
            "--grid-points",
            "40001",
        ],
        &[],
    );
    assert_exit(&res, 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    let n0 = manifest["notes"]["n0_derivation"]["n0"].as_f64().unwrap();
    assert!((n0 - 2.517058285313605e6).abs() < 1.0, "n0 = {n0}");
    let flux = manifest["notes"]["n0_derivation"]["photon_flux_per_s"]
        .as_f64()
        .unwrap();
    assert!((1.0e16..=2.0e16).contains(&flux));

    // Λ^EM crosses zero at the pump line (detuning 0); the grid center is
    // canonicalized through Hz, so allow an ulp-scale residue
    let rows = csv_rows(&out.join("selfenergy_em.csv"));
    let mid = rows
        .iter()
        .find(|r| r[1] == "0")
        .expect("detuning-zero row");
    assert!(mid[3].parse::<f64>().unwrap().abs() <= 1e-6, "mid: {mid:?}");

    // and its peak dwarfs the vibrational damping rate
    let peaks = csv_rows(&out.join("peaks.csv"));
    let lam_peak = peaks
        .iter()
        .filter(|r| r[0] == "lambda_em")
        .map(|r| r[3].parse::<f64>().unwrap())
        .fold(0.0_f64, f64::max);
    assert!(lam_peak > 10.0 * TAU * 1e6, "lambda_em peak {lam_peak:e}");
}

#[test]
fn two_field_resonant_classifies_cooling_and_heating() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = resonant_config(tmp.path(), 2.0, 12.0);
    let out = tmp.path().join("cool");
    let res = run(
        &["two-field", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
        &[],
    );
    assert_exit(&res, 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(manifest["args"]["resonant"], serde_json::json!(true));
    assert_eq!(manifest["notes"]["classification"], "cooling");
    let lam_hz = manifest["notes"]["lambda_resonant_hz"].as_f64().unwrap();
    assert!((lam_hz - 2e8).abs() < 1e2, "lambda_res {lam_hz}");
    assert!(out.join("phonon_selfenergy_resonant.csv").exists());
    assert!(out.join("phonon_sf_resonant.csv").exists());
    let peaks = read(&out.join("peaks.csv"));
    assert!(peaks.lines().skip(1).all(|l| l.ends_with(",cooling")));

    // swapped occupations heat instead
    let cfg = resonant_config(tmp.path(), 12.0, 2.0);
    let out = tmp.path().join("heat");
    let res = run(
        &["two-field", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
        &[],
    );
    assert_exit(&res, 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(manifest["notes"]["classification"], "heating");

    // equal occupations: flat zero resonant curves
    let cfg = resonant_config(tmp.path(), 5.0, 5.0);
    let out = tmp.path().join("flat");
    let res = run(
        &["two-field", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
        &[],
    );
    assert_exit(&res, 0);
    for row in csv_rows(&out.join("phonon_selfenergy_resonant.csv")) {
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn manifest_config_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = resonant_config(tmp.path(), 2.0, 12.0);
    let first = tmp.path().join("first");
    let res = run(
        &["two-field", "--config", cfg.to_str().unwrap(), "--out", first.to_str().unwrap()],
        &[],
    );
    assert_exit(&res, 0);

    // feed the manifest's resolved config back in, flags-free
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&first.join("manifest.json"))).unwrap();
    let rerun_cfg = tmp.path().join("rerun.json");
    std::fs::write(&rerun_cfg, manifest["config"].to_string()).unwrap();
    let second = tmp.path().join("second");
    let res = run(
        &["two-field", "--config", rerun_cfg.to_str().unwrap(), "--out", second.to_str().unwrap()],
        &[],
    );
    assert_exit(&res, 0);
    for name in [
        "phonon_selfenergy_general.csv",
        "phonon_sf_general.csv",
        "phonon_selfenergy_resonant.csv",
        "phonon_sf_resonant.csv",
        "peaks.csv",
    ] {
        assert_eq!(
            read(&first.join(name)),
            read(&second.join(name)),
            "{name} differs on manifest re-run"
        );
    }
}

#[test]
fn two_field_off_resonance_reports_nearest_q() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("offres");
    // default model: the beat never lands on the vibrational line
    let res = run(
        &[
            "two-field",
            "--k1-a",
            "2.0",
            "--n1",
            "1",
            "--k2-a",
            "1.999",
            "--n2",
            "5",
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_exit(&res, 0);
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("nearest achievable q"), "stderr: {stderr}");
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(manifest["args"]["resonant"], serde_json::json!(false));
    assert!(manifest["notes"]["nearest_resonant_q_v"].is_i64());
    assert!(out.join("phonon_selfenergy_general.csv").exists());
    assert!(!out.join("phonon_selfenergy_resonant.csv").exists());
}

#[test]
fn oracle_check_passes_and_detects_coarse_steps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = oracle_config(tmp.path());
    let out = tmp.path().join("oc");
    let res = run(
        &[
            "oracle-check",
            "--config",
            cfg.to_str().unwrap(),
            "--scenario",
            "single-field",
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_exit(&res, 0);
    assert!(String::from_utf8_lossy(&res.stdout).contains("PASS"));
    let report: serde_json::Value =
        serde_json::from_str(&read(&out.join("oracle_report.json"))).unwrap();
    let l2_fine = report["l2_relative_error"].as_f64().unwrap();
    assert!(l2_fine <= 1e-2);
    assert!(out.join("sf_closed.csv").exists() && out.join("sf_oracle.csv").exists());

    // coarser stepping degrades the match monotonically...
    let out8 = tmp.path().join("oc8");
    let res = run(
        &[
            "oracle-check",
            "--config",
            cfg.to_str().unwrap(),
            "--scenario",
            "single-field",
            "--dt-scale",
            "8",
            "--out",
            out8.to_str().unwrap(),
        ],
        &[],
    );
    assert_exit(&res, 0);
    let report8: serde_json::Value =
        serde_json::from_str(&read(&out8.join("oracle_report.json"))).unwrap();
    let l2_8 = report8["l2_relative_error"].as_f64().unwrap();
    assert!(
        l2_8 > 10.0 * l2_fine,
        "x8 coarsening barely moved the error: {l2_fine:e} -> {l2_8:e}"
    );

    // ...and far past the sampling limit the check fails with exit code 2
    let out64 = tmp.path().join("oc64");
    let res = run(
        &[
            "oracle-check",
            "--config",
            cfg.to_str().unwrap(),
            "--scenario",
            "single-field",
            "--dt-scale",
            "64",
            "--out",
            out64.to_str().unwrap(),
        ],
        &[],
    );
    assert_exit(&res, 2);
    assert!(String::from_utf8_lossy(&res.stdout).contains("FAIL"));
    let report64: serde_json::Value =
        serde_json::from_str(&read(&out64.join("oracle_report.json"))).unwrap();
    assert_eq!(report64["pass"], serde_json::json!(false));
}

#[test]
fn oracle_check_rejects_oversized_windows() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = oracle_config(tmp.path());
    let res = run(
        &[
            "oracle-check",
            "--config",
            cfg.to_str().unwrap(),
            "--n-max",
            "40",
            "--out",
            tmp.path().join("big").to_str().unwrap(),
        ],
        &[],
    );
    assert_exit(&res, 1);
}

#[test]
fn sweep_over_occupation_crosses_zero_linearly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = resonant_config(tmp.path(), 10.0, 0.0); // n2 swept below
    let out = tmp.path().join("sweep");
    let res = run(
        &[
            "sweep",
            "--axis",
            "N2",
            "--values",
            "0,10,20",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        &[("WGSPEC_THREADS", "3")],
    );
    assert_exit(&res, 0);
    let lam = |sub: &str| -> f64 {
        let m: serde_json::Value =
            serde_json::from_str(&read(&out.join(sub).join("manifest.json"))).unwrap();
        m["notes"]["lambda_resonant_hz"].as_f64().unwrap()
    };
    let (l0, l10, l20) = (lam("N2=0"), lam("N2=10"), lam("N2=20"));
    assert!(l0 < 0.0 && l20 > 0.0);
    assert!(l10.abs() <= 1e-9 * l20.abs());
    // linear in N2 − N1
    assert!(((l20 - l10) - (l10 - l0)).abs() <= 1e-6 * (l20 - l0).abs());
    let summary = read(&out.join("sweep_summary.csv"));
    assert!(summary.starts_with("axis_value,curve,"));
    assert!(summary.contains("cooling") && summary.contains("heating"));
}

#[test]
fn temperature_sweep_tracks_thermal_occupation() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("tsweep");
    let res = run(
        &[
            "sweep",
            "--axis",
            "T",
            "--values",
            "0.4,4,40",
            "--out",
            out.to_str().unwrap(),
            "--grid-points",
            "20001",
            "--grid-halfwidth-hz",
            "13e9",
        ],
        &[("WGSPEC_THREADS", "2")],
    );
    assert_exit(&res, 0);
    // anti-Stokes channel height follows the Bose-Einstein occupation
    let rows = csv_rows(&out.join("sweep_summary.csv"));
    let height = |t: &str| -> f64 {
        rows.iter()
            .filter(|r| r[0] == t && r[1] == "lambda_m" && r[6] == "v:anti-stokes")
            .map(|r| r[4].parse::<f64>().unwrap())
            .fold(0.0, f64::max)
    };
    let (h1, h2, h3) = (height("0.4"), height("4"), height("40"));
    assert!(
        h1 < h2 && h2 < h3,
        "anti-Stokes heights not monotone in T: {h1:e}, {h2:e}, {h3:e}"
    );
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = resonant_config(tmp.path(), 2.0, 12.0);
    let (a, b) = (tmp.path().join("s1"), tmp.path().join("s3"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let res = run(
            &[
                "sweep",
                "--axis",
                "N2",
                "--values",
                "4,8,12",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ],
            &[("WGSPEC_THREADS", threads)],
        );
        assert_exit(&res, 0);
    }
    assert_eq!(read(&a.join("sweep_summary.csv")), read(&b.join("sweep_summary.csv")));
}

#[test]
fn exit_codes_for_bad_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    // invalid physical quantity
    let bad = tmp.path().join("bad.json");
    let mut cfg: serde_json::Value = serde_json::from_str(&read(&oracle_config(tmp.path()))).unwrap();
    cfg["photon"]["gamma_hz"] = serde_json::json!(-1.0);
    std::fs::write(&bad, cfg.to_string()).unwrap();
    let res = run(
        &["empty", "--config", bad.to_str().unwrap(), "--out", tmp.path().join("x1").to_str().unwrap()],
        &[],
    );
    assert_exit(&res, 1);

    // empty sweep value list
    let res = run(
        &["sweep", "--axis", "T", "--values", "", "--out", tmp.path().join("x2").to_str().unwrap()],
        &[],
    );
    assert_exit(&res, 1);

    // unknown key in the document
    let res = run(
        &["empty", "--config", {
            let p = tmp.path().join("junk.json");
            std::fs::write(&p, r#"{"waveguide": {"radius_m": 1e-7, "length_m": 1e-2, "temperature_k": 1.0, "bogus": 3}}"#).unwrap();
            Box::leak(p.into_os_string().into_string().unwrap().into_boxed_str())
        }, "--out", tmp.path().join("x3").to_str().unwrap()],
        &[],
    );
    assert_exit(&res, 1);

    // output path collides with an existing file -> io error
    let blocker = tmp.path().join("blocked");
    std::fs::write(&blocker, "file").unwrap();
    let res = run(
        &["empty", "--out", blocker.to_str().unwrap(), "--grid-points", "101", "--grid-halfwidth-hz", "1e9"],
        &[],
    );
    assert_exit(&res, 3);
}
