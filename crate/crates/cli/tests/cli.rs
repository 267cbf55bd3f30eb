use serde_json::Value;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exciplex-cool"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn digests(m: &Value) -> BTreeMap<String, String> {
    m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o["file"].as_str().unwrap().to_string(), o["sha256"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn list_is_stable_and_complete() {
    let a = run(&["list"]);
    assert!(a.status.success());
    let text = String::from_utf8(a.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert!(names.contains(&"table1"));
    assert!(names.contains(&"gas_cell_weitz"));
    assert!(names.len() >= 8);
    for l in text.lines() {
        assert!(l.split_whitespace().count() > 1, "missing description: {l}");
    }
    let b = String::from_utf8(run(&["list"]).stdout).unwrap();
    assert_eq!(text, b);
}

#[test]
fn empty_sweep_is_a_config_error_with_no_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sweep.toml");
    fs::write(
        &cfg,
        "scenario = \"fig4a\"\n[sweep]\nparameter = \"buffer_pressure_bar\"\nstart = 10\nstop = 1\npoints = 5\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let r = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("sweep"));
    assert!(!out.exists());

    fs::write(&cfg, "scenario = \"fig4a\"\n[sweep]\nparameter = \"buffer_pressure_bar\"\nstart = 1\nstop = 10\npoints = 0\n").unwrap();
    let r = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unknown_keys_and_bad_values_name_the_culprit() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "scenario = \"table1\"\n\n[gas]\nbuffer_pressure = 10\n").unwrap();
    let out = tmp.path().join("out");
    let r = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr).to_string();
    assert!(err.contains("buffer_pressure") && err.contains("line 4"), "{err}");
    assert!(!out.exists());

    let r = run(&["run", "table1", "--out", out.to_str().unwrap(), "--override", "fibre.inner_radius_um=-3"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("fibre.inner_radius_um"));

    let r = run(&["run", "no_such_scenario", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    let r = run(&["run", "table1", "--out", out.to_str().unwrap(), "--override", "nope.key=1"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn solver_failure_exits_with_numerical_status() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let r = run(&["run", "fig5_bundle", "--out", out.to_str().unwrap(), "--override", "bundle.max_iterations=2"]);
    assert_eq!(r.status.code(), Some(3), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn outputs_are_deterministic_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let small = ["--override", "bloch.trajectories=3000", "--override", "bloch.samples=8"];
    let mut seen = Vec::new();
    for (i, threads) in ["1", "4", "1"].iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let mut args = vec!["run", "fig3_bloch", "--seed", "7", "--threads", threads, "--out", out.to_str().unwrap()];
        args.extend_from_slice(&small);
        let r = run(&args);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        seen.push(digests(&manifest(&out)));
    }
    assert_eq!(seen[0], seen[1]);
    assert_eq!(seen[0], seen[2]);

    // a different seed changes the Monte-Carlo output
    let out = tmp.path().join("other");
    let mut args = vec!["run", "fig3_bloch", "--seed", "8", "--out", out.to_str().unwrap()];
    args.extend_from_slice(&small);
    assert!(run(&args).status.success());
    assert_ne!(digests(&manifest(&out))["bloch_dynamics.csv"], seen[0]["bloch_dynamics.csv"]);

    // sweeps fan out over threads; files must not depend on scheduling
    let a = tmp.path().join("sweep1");
    let b = tmp.path().join("sweep4");
    for (dir, t) in [(&a, "1"), (&b, "4")] {
        assert!(run(&["run", "fig4a", "--threads", t, "--out", dir.to_str().unwrap()]).status.success());
    }
    assert_eq!(digests(&manifest(&a)), digests(&manifest(&b)));
}

#[test]
fn overrides_reach_the_outputs_and_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let base = tmp.path().join("base");
    let twice = tmp.path().join("twice");
    assert!(run(&["run", "table1", "--out", base.to_str().unwrap()]).status.success());
    assert!(run(&["run", "table1", "--out", twice.to_str().unwrap(), "--override", "gas.buffer_pressure_bar=20"])
        .status
        .success());
    let kappa = |dir: &Path| -> f64 {
        let text = fs::read_to_string(dir.join("table1.csv")).unwrap();
        let row = text.lines().find(|l| l.starts_with("kappa,")).unwrap();
        row.split(',').nth(2).unwrap().parse().unwrap()
    };
    // κ = n_X σ v is linear in the buffer density
    let ratio = kappa(&twice) / kappa(&base);
    assert!((ratio - 2.0).abs() < 1e-12, "{ratio}");
    assert_eq!(manifest(&twice)["config"]["gas"]["buffer_pressure_bar"], 20.0);
}

#[test]
fn manifest_lists_every_output_with_its_digest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("radial.toml");
    fs::write(&cfg, "scenario = \"fig7_radial\"\nseed = 5\n[radial]\npoints = 50\n[fibre]\ninner_radius_um = 15\n").unwrap();
    let out = tmp.path().join("out");
    let r = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(r.status.success());
    let m = manifest(&out);
    assert_eq!(m["scenario"], "fig7_radial");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["schema_version"], 1);
    assert!(m["library_version"].as_str().is_some());
    assert!(m["wall_clock_s"].as_f64().unwrap() >= 0.0);
    // resolved config carries every section, defaults included
    for section in ["species", "gas", "fibre", "laser", "radial", "bundle", "wavepacket", "xsection", "gas_cell"] {
        assert!(m["config"][section].is_object(), "{section}");
    }
    assert_eq!(m["config"]["fibre"]["inner_radius_um"], 15.0);
    assert_eq!(m["config"]["radial"]["points"], 50);
    assert!(m["derived"]["q_vol_w_per_m3"].as_f64().unwrap() < 0.0);

    let listed = digests(&m);
    let mut on_disk: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    assert_eq!(on_disk, listed.keys().cloned().collect::<Vec<_>>());
    for (file, sha) in &listed {
        let bytes = fs::read(out.join(file)).unwrap();
        assert_eq!(&exciplex_cli::output::sha256_hex(&bytes), sha);
    }
    let profile = fs::read_to_string(out.join("radial_profile.csv")).unwrap();
    assert_eq!(profile.lines().next().unwrap(), "rho_m,temperature_k,region");
    assert_eq!(profile.lines().count(), 52);
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = exciplex_cli::load_config(path.to_str().unwrap(), &[]).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 5);
}
