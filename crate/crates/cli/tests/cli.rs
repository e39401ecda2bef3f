use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use xxz_floquet_cli::Config;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xxz-floquet"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = run(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// `(t, site, sz)` rows after checking the header.
fn profile(path: &Path) -> Vec<(f64, usize, f64)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,site,sz"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 3);
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn classify_library_states() {
    let dir = TempDir::new().unwrap();
    let a0: Value = serde_json::from_str(&ok(dir.path(), &["classify", "--state", "A0", "--length", "16"])).unwrap();
    assert_eq!(a0["state"]["class"], "localized");
    assert_eq!(a0["state"]["witness"], serde_json::json!([]));
    assert_eq!(a0["state"]["spins"], "dddddddduuuuuuuu");

    let a1: Value = serde_json::from_str(&ok(dir.path(), &["classify", "--state", "A1", "--length", "16"])).unwrap();
    assert_eq!(a1["state"]["class"], "non-localized");
    assert_eq!(a1["state"]["witness"], serde_json::json!([[7, 8], [9, 10]]));

    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["subcommand"], "classify");
    assert_eq!(m["outputs"], serde_json::json!(["classify.json"]));
    assert_eq!(json(&dir.path().join("classify.json")), a1);
}

#[test]
fn classify_enumeration_partitions_the_basis() {
    let dir = TempDir::new().unwrap();
    let r: Value = serde_json::from_str(&ok(dir.path(), &["classify", "--enumerate", "--length", "8"])).unwrap();
    let e = &r["enumeration"];
    let (loc, non) = (e["localized"].as_u64().unwrap(), e["non_localized"].as_u64().unwrap());
    assert_eq!(loc + non, 256);
    assert_eq!(e["total"], 256);
    let states = e["localized_states"].as_array().unwrap();
    assert_eq!(states.len() as u64, loc);
    // a state is localized iff no periodic four-site window is one of the
    // isolated-flip patterns
    let bad = ["uudu", "uduu", "ddud", "dudd"];
    for n in 0..256u32 {
        let s: String = (0..8).map(|k| if (n >> k) & 1 == 1 { 'u' } else { 'd' }).collect();
        let doubled = format!("{s}{s}");
        let localized = (0..8).all(|i| !bad.contains(&&doubled[i..i + 4]));
        assert_eq!(states.iter().any(|x| x == &s), localized, "{s}");
    }
}

#[test]
fn classify_rejects_unsupported_input() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["classify", "--state", "A1", "--length", "16", "--open"],
        vec!["classify", "--state", "uudd", "--length", "6"],
        vec!["classify", "--length", "8"],
        vec!["classify", "--state", "A0", "--length", "8", "--spin", "1"],
    ] {
        let o = run(dir.path(), &args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = run(dir.path(), &["classify", "--enumerate", "--length", "22"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn table1_rows() {
    let dir = TempDir::new().unwrap();
    let text = ok(dir.path(), &["table1"]);
    assert_eq!(text.lines().count(), 17);
    let t = json(&dir.path().join("table1.json"));
    let rows = t["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    let row = |c: &str| rows.iter().find(|r| r["cluster"] == c).unwrap().clone();
    assert_eq!(row("↑↓↑↓")["class"], "h0");
    assert_eq!(row("↑↓↑↓")["coefficient"], "J0(A)");
    assert_eq!(row("↑↑↓↑")["class"], "h1");
    assert_eq!(row("↑↑↓↑")["coefficient_value"], 1.0);
    let count = |class: &str| rows.iter().filter(|r| r["class"] == class).count();
    assert_eq!((count("h0"), count("h1"), count("hx")), (4, 4, 8));
    for r in rows {
        assert_eq!(r["annihilated_at_zero"].as_bool().unwrap(), r["class"] != "h1", "{r}");
        if r["class"] == "hx" {
            assert!(r["coefficient_value"].is_null());
        }
    }
    let j0: f64 = row("↑↑↓↓")["coefficient_value"].as_f64().unwrap();
    // J0(2.4048) is just past the first zero
    assert!(j0 > 0.0 && j0 < 2e-5);
}

#[test]
fn effcheck_examples() {
    let dir = TempDir::new().unwrap();
    let r: Value = serde_json::from_str(&ok(
        dir.path(),
        &["effcheck", "--length", "6", "--a", "0,2.404825557695773"],
    ))
    .unwrap();
    let checks = r["checks"].as_array().unwrap();
    assert!(checks[0]["max_abs_deviation"].as_f64().unwrap() <= 1e-13);
    assert!(checks[1]["max_abs_deviation"].as_f64().unwrap() <= 1e-10);

    let r: Value =
        serde_json::from_str(&ok(dir.path(), &["effcheck", "--length", "4", "--spin", "1", "--a", "1.0"])).unwrap();
    assert_eq!(r["dim"], 81);
    assert!(r["max_abs_deviation"].as_f64().unwrap() <= 1e-10);

    let o = run(dir.path(), &["effcheck", "--length", "12"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension"));
}

#[test]
fn effective_driver_keeps_a0_frozen() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["evolve", "--driver", "effective", "--state", "A0", "--length", "12", "--t-max", "5"],
    );
    let rows = profile(&dir.path().join("sz_profile.csv"));
    assert_eq!(rows.len(), 11 * 12);
    for (t, site, sz) in rows {
        let expected = if site <= 6 { -0.5 } else { 0.5 };
        assert!((sz - expected).abs() <= 1e-8, "t={t} site={site}: {sz}");
    }
    let entropy = fs::read_to_string(dir.path().join("entropy.csv")).unwrap();
    assert!(entropy.starts_with("t,sigma\n"));
    assert_eq!(entropy.lines().count(), 12);
    let m = json(&dir.path().join("manifest.json"));
    assert!(m["norm_drift"].as_f64().unwrap() < 1e-10);
    assert_eq!(m["warnings"], serde_json::json!([]));
}

#[test]
fn periodic_driver_moves_a1() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["evolve", "--state", "A1", "--length", "12", "--t-max", "3", "--snapshots", "0,3"]);
    let rows = profile(&dir.path().join("sz_profile.csv"));
    assert_eq!(rows.len(), 24);
    let at = |t: f64, site: usize| rows.iter().find(|r| r.0 == t && r.1 == site).unwrap().2;
    // sites 6 and 7 (1-based) hold the swapped pair
    assert_eq!(at(0.0, 6), 0.5);
    assert!((at(3.0, 6) - 0.5).abs() > 0.1);
    let total: f64 = (1..=12).map(|s| at(3.0, s)).sum();
    assert!(total.abs() < 1e-9);
}

#[test]
fn runs_are_deterministic_and_the_manifest_config_reproduces_them() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["evolve", "--state", "B1", "--length", "12", "--t-max", "1", "--every", "0.25"];
    ok(a.path(), &args);
    ok(b.path(), &args);
    for f in ["sz_profile.csv", "entropy.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }

    let manifest = json(&a.path().join("manifest.json"));
    let echoed: Config = serde_json::from_value(manifest["config"].clone()).unwrap();
    let cfg = a.path().join("echo.toml");
    fs::write(&cfg, echoed.to_toml()).unwrap();
    let c = TempDir::new().unwrap();
    ok(c.path(), &["--config", cfg.to_str().unwrap(), "evolve"]);
    assert_eq!(
        fs::read(a.path().join("sz_profile.csv")).unwrap(),
        fs::read(c.path().join("sz_profile.csv")).unwrap()
    );
    assert_eq!(json(&c.path().join("manifest.json"))["config"], manifest["config"]);
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[lattice]\nlength = 6\n\n[effcheck]\na = [0.5]\nnodes = 64\n").unwrap();
    let r: Value = serde_json::from_str(&ok(dir.path(), &["--config", cfg.to_str().unwrap(), "effcheck"])).unwrap();
    assert_eq!(r["sites"], 6);
    assert_eq!(r["nodes"], 64);
    let r: Value = serde_json::from_str(&ok(
        dir.path(),
        &["--config", cfg.to_str().unwrap(), "effcheck", "--length", "4", "--nodes", "32"],
    ))
    .unwrap();
    assert_eq!(r["sites"], 4);
    assert_eq!(r["nodes"], 32);
    assert_eq!(r["checks"][0]["a"], 0.5);
}

#[test]
fn frequency_sweep_writes_one_directory_per_value() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["evolve", "--state", "A0", "--length", "12", "--t-max", "0.5", "--omega", "10,4"]);
    let m = json(&dir.path().join("manifest.json"));
    let outputs: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(
        outputs,
        ["omega_10/sz_profile.csv", "omega_10/entropy.csv", "omega_4/sz_profile.csv", "omega_4/entropy.csv"]
    );
    for o in outputs {
        assert!(dir.path().join(o).is_file(), "{o}");
    }
    let slow = profile(&dir.path().join("omega_4/sz_profile.csv"));
    let fast = profile(&dir.path().join("omega_10/sz_profile.csv"));
    assert_eq!(slow.len(), fast.len());
    assert_ne!(slow, fast);
}

#[test]
fn time_is_measured_in_units_of_the_longitudinal_coupling() {
    // doubling every coupling and halving the clock leaves the effective
    // dynamics unchanged
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let base = ["evolve", "--driver", "effective", "--state", "A1", "--length", "12", "--t-max", "2"];
    ok(a.path(), &base);
    let mut scaled = base.to_vec();
    scaled.extend(["--j-par-bar", "-2", "--j-perp", "-1.5"]);
    ok(b.path(), &scaled);
    let (pa, pb) = (profile(&a.path().join("sz_profile.csv")), profile(&b.path().join("sz_profile.csv")));
    assert_eq!(pa.len(), pb.len());
    for (x, y) in pa.iter().zip(&pb) {
        assert_eq!((x.0, x.1), (y.0, y.1));
        assert!((x.2 - y.2).abs() < 1e-9, "{x:?} {y:?}");
    }
}

#[test]
fn odd_chains_skip_the_entropy_file() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["evolve", "--state", "uuddudu", "--length", "7", "--t-max", "0.5"]);
    assert!(!dir.path().join("entropy.csv").exists());
    let m = json(&dir.path().join("manifest.json"));
    assert!(m["warnings"][0].as_str().unwrap().contains("entropy.csv"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[model]\nomgea = 3\n").unwrap();
    let o = run(dir.path(), &["--config", cfg.to_str().unwrap(), "table1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("omgea"));

    let o = run(dir.path(), &["evolve", "--length", "12", "--snapshots", "1,0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("evolve.snapshots"));

    let o = run(dir.path(), &["evolve", "--length", "12", "--steps-per-period", "4"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(dir.path(), &["evolve", "--state", "A2", "--length", "12"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("evolve.state"));

    // an unreachable tolerance is an accuracy failure with a remediation hint
    let o = run(
        dir.path(),
        &["evolve", "--length", "12", "--t-max", "0.5", "--krylov-dim", "2", "--tolerance", "1e-300"],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("steps_per_period"));
}

#[test]
fn custom_lattice_from_the_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("triangle.toml");
    fs::write(
        &cfg,
        "[lattice]\nkind = \"custom\"\nedges = [[1, 2], [2, 3], [3, 1], [3, 4]]\n\n[effcheck]\na = [1.3]\n",
    )
    .unwrap();
    let r: Value = serde_json::from_str(&ok(dir.path(), &["--config", cfg.to_str().unwrap(), "effcheck"])).unwrap();
    assert_eq!(r["sites"], 4);
    assert!(r["max_abs_deviation"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn delta_j_fixes_the_drive_strength_across_a_sweep() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("dj.toml");
    fs::write(&cfg, "[model]\ndelta_j = 24.0\nomega = 8.0\n").unwrap();
    ok(dir.path(), &["--config", cfg.to_str().unwrap(), "table1"]);
    let t = json(&dir.path().join("table1.json"));
    assert_eq!(t["amplitude"], 3.0);
    // the flag replaces the file's amplitude source
    ok(dir.path(), &["--config", cfg.to_str().unwrap(), "table1", "--amplitude-a", "0.5"]);
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["config"]["model"]["amplitude_a"], 0.5);
    assert!(m["config"]["model"].get("delta_j").is_none());
}
