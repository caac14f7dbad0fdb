use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dtqw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtqw")).args(args).output().unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn walk_prints_csv_with_one_row_per_step() {
    let out = stdout(&dtqw(&["walk", "--config", &config("walk-spreading.json")]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[0].starts_with("step,p(-9)"));
    assert!(lines[0].ends_with(",diffusion_distance"));
}

#[test]
fn walk_runs_are_byte_identical() {
    let args = ["walk", "--config", &config("walk-chain-noisy.json"), "--format", "json"];
    let a = stdout(&dtqw(&args));
    assert_eq!(a, stdout(&dtqw(&args)));
    assert!(!a.contains("wall_clock_s"));
}

#[test]
fn seed_flag_overrides_config() {
    let base = ["walk", "--config", &config("walk-chain-noisy.json"), "--format", "json"];
    let a: serde_json::Value = serde_json::from_str(&stdout(&dtqw(&base))).unwrap();
    let mut with_seed = base.to_vec();
    with_seed.extend(["--seed", "99"]);
    let b: serde_json::Value = serde_json::from_str(&stdout(&dtqw(&with_seed))).unwrap();
    assert_eq!(b["config"]["seed"], 99);
    assert_ne!(a["shots"], b["shots"]);
}

#[test]
fn timing_is_opt_in() {
    let out = stdout(&dtqw(&["walk", "--config", &config("walk-spreading.json"), "--format", "json", "--timing"]));
    assert!(out.contains("wall_clock_s"));
}

#[test]
fn raw_coordinates_flag() {
    let out = stdout(&dtqw(&["walk", "--config", &config("walk-chain-ideal.json"), "--raw-coordinates", "--format", "csv"]));
    assert!(out.lines().next().unwrap().starts_with("step,p(0),p(1)"));
}

#[test]
fn compare_noisy_against_ideal() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = dir.path().join("ideal.json");
    let noisy = dir.path().join("noisy.json");
    let (ideal_s, noisy_s) = (ideal.to_str().unwrap(), noisy.to_str().unwrap());
    stdout(&dtqw(&["walk", "--config", &config("walk-chain-ideal.json"), "--out", ideal_s]));
    stdout(&dtqw(&["walk", "--config", &config("walk-chain-noisy.json"), "--out", noisy_s]));

    let out = stdout(&dtqw(&["compare", ideal_s, noisy_s]));
    let sims: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(out.lines().next(), Some("step,similarity"));
    assert_eq!(sims.len(), 10);
    assert!(sims.windows(2).all(|w| w[1] <= w[0]));

    let same = stdout(&dtqw(&["compare", ideal_s, ideal_s, "--format", "json"]));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&same).unwrap();
    assert!(rows.iter().all(|r| (r["similarity"].as_f64().unwrap() - 1.0).abs() < 1e-12));
}

#[test]
fn sweep_and_heatmap_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    stdout(&dtqw(&["sweep", "--config", &config("sweep-interface-contrast.json"), "--out", csv.to_str().unwrap()]));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("theta_swept_rad,steps,p_edge\n"));
    assert_eq!(text.lines().count(), 1 + 21 * 2);

    let svg = dir.path().join("map.svg");
    stdout(&dtqw(&["heatmap", "--config", &config("walk-edge-trapping.json"), "--out", svg.to_str().unwrap()]));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn circuit_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("circuit.json");
    stdout(&dtqw(&["walk", "--config", &config("walk-chain-ideal.json"), "--dump-circuit", path.to_str().unwrap()]));
    let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(c["steps"], 9);
    assert_eq!(c["layers"][0]["gates"][0]["gate"], "pi-ge");
}

#[test]
fn bad_config_reports_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"engine": "ideal-bi", "steps": 3, "profile": {"kind": "two-domain", "theta_minus": "-pi/4", "theta_plus": "quarter"}, "initial": "phi_co"}"#,
    )
    .unwrap();
    let o = dtqw(&["walk", "--config", path.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("profile.theta_plus"), "{err}");
}

#[test]
fn chain_too_short_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("long.json");
    let text = std::fs::read_to_string(configs().join("walk-chain-ideal.json")).unwrap().replace("\"steps\": 9", "\"steps\": 12");
    std::fs::write(&path, text).unwrap();
    let o = dtqw(&["walk", "--config", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("chain too short"));
}
