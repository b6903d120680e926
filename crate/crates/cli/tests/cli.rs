use std::fs;
use std::path::Path;
use std::process::Command;

use circint::circular::FadingLaw;
use circint::deployment::{sample_ppp, Annulus, PppTierConfig};

fn circint(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_circint")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ok(out: &std::process::Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn papr_writes_csv_and_sidecar_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    fs::write(&config, "id = \"small\"\n[papr]\nexpected_interferers = [100.0]\n").unwrap();
    let cfg = config.to_str().unwrap();
    for stem in ["a", "b"] {
        ok(&circint(&["papr", "--config", cfg, "--snapshots", "5", "--seed", "3", "--out", stem], dir.path()));
    }
    let a = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert!(a.lines().any(|l| l.contains("papr_median")));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(meta["meta"]["seed"], 3);
    assert_eq!(meta["meta"]["experiment"], "small");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "snapshotz = 4\n").unwrap();
    let out = circint(&["papr", "--config", config.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("snapshotz"));
}

#[test]
fn collab_emits_table_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    ok(&circint(&["collab", "--out", "out/collab"], dir.path()));
    let table = fs::read_to_string(dir.path().join("out/collab.csv")).unwrap();
    assert!(table.contains("cooperation_gain_db"));
    let curves = fs::read_dir(dir.path().join("out")).unwrap().count();
    // table + sidecar + 2 positions × 3 schemes × (SIR, rate)
    assert_eq!(curves, 14);
    let sir = fs::read_to_string(dir.path().join("out/collab.sir_cooperation_r1.csv")).unwrap();
    assert!(sir.starts_with('#'));
    assert!(sir.contains("scheme"));
}

#[test]
fn decompose_with_reduced_samples() {
    let dir = tempfile::tempdir().unwrap();
    ok(&circint(&["decompose", "--samples", "20000", "--out", "d"], dir.path()));
    let table = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert!(table.contains("l1_to_full"));
    assert!(dir.path().join("d.decomposition_r1.csv").exists());
}

#[test]
fn map_round_trips_a_deployment() {
    let dir = tempfile::tempdir().unwrap();
    let tier = PppTierConfig {
        intensity: 0.1,
        annulus: Annulus::for_expected_count(2.0, 100.0, 0.1).unwrap(),
        tx_power: 1.0,
        fading: FadingLaw::default(),
    };
    let dep = sample_ppp(&tier, 11).unwrap();
    fs::write(dir.path().join("dep.txt"), dep.to_text().unwrap()).unwrap();
    ok(&circint(&["map", "dep.txt", "--circles", "2", "--nodes", "10", "--out", "m"], dir.path()));
    let scenario =
        circint::circular::CircularScenario::from_toml(&fs::read_to_string(dir.path().join("m.toml")).unwrap())
            .unwrap();
    assert_eq!(scenario.circles.len(), 2);
    let profile = fs::read_to_string(dir.path().join("m.profile.csv")).unwrap();
    assert_eq!(profile.lines().count(), 1 + 20);

    let out = circint(&["map", "missing.txt"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn pdf_of_exponential_sum() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.txt"), "1 1.0\n1 2.0\n").unwrap();
    let out = circint(&["pdf", "t.txt", "--points", "11", "--x-max", "5"], dir.path());
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(2).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    for r in &rows {
        let y = r[0];
        let pdf = (-y / 2.0).exp() - (-y).exp();
        assert!((r[1] - pdf).abs() < 1e-12);
    }
    let precise = circint(&["pdf", "t.txt", "--points", "11", "--x-max", "5", "--precise"], dir.path());
    ok(&precise);

    fs::write(dir.path().join("bad.txt"), "1 -1.0\n").unwrap();
    let out = circint(&["pdf", "bad.txt"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}
