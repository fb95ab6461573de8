use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn dlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlab")).args(args).env_remove("DLAB_JOBS").output().expect("binary runs")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(cfg: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = dlab(&args);
    o.status.code().unwrap()
}

fn replay(dir: &Path) -> i32 {
    dlab(&["replay", dir.to_str().unwrap()]).status.code().unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

/// A small refined corpus, fast enough for repeated runs.
fn small_refined(tmp: &Path, seed: Option<u64>) -> PathBuf {
    let mut text = String::from("kind = \"refined\"\n");
    if let Some(s) = seed {
        text += &format!("seed = {s}\n");
    }
    text += "[parameters]\nalpha = 3.0\nq = 8.0\nr = 4.0\nbeta = 1.3333333333333333\ns = -0.125\n\
             window = { start = 0.0, end = 0.05, samples = 9 }\ncount = 6\nn = 64\n";
    let path = tmp.join(format!("refined-{seed:?}.toml"));
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn exponents_config_reports_sharp_four_four() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exp");
    assert_eq!(run(&config("exponents.toml"), &out, &[]), 0);
    let rep = report(&out);
    let first = &rep["results"][0];
    assert_eq!(first["q"], "4");
    assert_eq!(first["r"], "4");
    assert_eq!(first["beta"], "4/3");
    assert_eq!(first["class"], "sharp");
    assert_eq!(rep["verdict"], "pass");
    for key in ["claim", "parameters", "seed", "tolerances", "verdict", "environment"] {
        assert!(rep.get(key).is_some(), "report lacks {key}");
    }
    assert_eq!(replay(&out), 0);
}

#[test]
fn oscdecay_kg_k_in_one_dimension_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("osc");
    assert_eq!(run(&config("oscdecay-kg-k.toml"), &out, &[]), 0);
    let rep = report(&out);
    let sigma = rep["results"]["fitted_sigma"].as_f64().unwrap();
    assert!((0.4..=0.6).contains(&sigma), "fitted sigma {sigma}");
    assert_eq!(replay(&out), 0);

    // a 10% change in one magnitude moves the refit
    let csv = fs::read_to_string(out.join("data.csv")).unwrap();
    let mut lines: Vec<String> = csv.lines().map(String::from).collect();
    let mut cells: Vec<String> = lines[5].split(',').map(String::from).collect();
    let m: f64 = cells[3].parse().unwrap();
    cells[3] = format!("{:e}", 1.1 * m);
    lines[5] = cells.join(",");
    fs::write(out.join("data.csv"), lines.join("\n") + "\n").unwrap();
    assert_eq!(replay(&out), 1);
}

#[test]
fn malformed_config_exits_two_without_files() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = [
        "kind = \"exponents\"\n[parameters]\nd = 2\npairs = [[\"4\"]]\n",
        "kind = \"exponents\"\n[parameters]\nd = 2\npairs = [[\"4\", \"x\"]]\n",
        "kind = \"oscdecay\"\n[parameters]\nkernel = \"kg-K\"\nd = 1\n",
        "kind = \"sharpness\"\nbogus = 3\n",
        "this is not toml",
        "kind = \"duality\"\n[parameters]\nbeta = 1.5\nq = 4.0\nr = 4.0\n",
        "kind = \"exponents\"\n[parameters]\nd = 2\npairs = [[\"4\", \"4\"]]\nunknown = 1\n",
    ];
    for (i, text) in bad.iter().enumerate() {
        let cfg = tmp.path().join(format!("bad{i}.toml"));
        fs::write(&cfg, text).unwrap();
        let out = tmp.path().join(format!("out{i}"));
        assert_eq!(run(&cfg, &out, &[]), 2, "config {i}");
        assert!(!out.exists(), "config {i} left files behind");
    }
    assert_eq!(run(&tmp.path().join("missing.toml"), &tmp.path().join("m"), &[]), 2);
}

#[test]
fn missing_output_dir_is_a_parse_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "kind = \"exponents\"\n[parameters]\nd = 2\npairs = [[\"4\", \"4\"]]\n").unwrap();
    assert_eq!(dlab(&["run", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn replay_detects_perturbation_and_truncation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_refined(tmp.path(), Some(11));
    let out = tmp.path().join("r");
    assert_eq!(run(&cfg, &out, &[]), 0);
    assert_eq!(replay(&out), 0);
    let csv = fs::read_to_string(out.join("data.csv")).unwrap();

    let mut lines: Vec<String> = csv.lines().map(String::from).collect();
    let mut cells: Vec<String> = lines[2].split(',').map(String::from).collect();
    let v: f64 = cells[1].parse().unwrap();
    cells[1] = format!("{:e}", 1.1 * v);
    lines[2] = cells.join(",");
    fs::write(out.join("data.csv"), lines.join("\n") + "\n").unwrap();
    assert_eq!(replay(&out), 1);

    let short: Vec<&str> = csv.lines().take(3).collect();
    fs::write(out.join("data.csv"), short.join("\n") + "\n").unwrap();
    assert_eq!(replay(&out), 2);

    let cut = &csv[..csv.len() - 20];
    fs::write(out.join("data.csv"), cut).unwrap();
    assert_eq!(replay(&out), 2);

    fs::remove_file(out.join("data.csv")).unwrap();
    assert_eq!(replay(&out), 2);
}

#[test]
fn same_seed_gives_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_refined(tmp.path(), Some(5));
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert_eq!(run(&cfg, &a, &[]), 0);
    assert_eq!(run(&cfg, &b, &["--jobs", "1"]), 0);
    assert_eq!(run(&cfg, &c, &["--seed", "6"]), 0);
    let read = |d: &Path| fs::read(d.join("data.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(report(&c)["seed"], 6);
}

#[test]
fn randomized_kind_requires_a_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_refined(tmp.path(), None);
    let out = tmp.path().join("x");
    assert_eq!(run(&cfg, &out, &[]), 2);
    assert!(!out.exists());
    assert_eq!(run(&cfg, &out, &["--seed", "3"]), 0);
}

#[test]
fn failing_tolerance_exits_one_and_still_writes() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(config("sharpness-translates.toml")).unwrap().replace("max_mass_spread = 3.0", "max_mass_spread = 1.01");
    let cfg = tmp.path().join("tight.toml");
    fs::write(&cfg, text).unwrap();
    let out = tmp.path().join("t");
    assert_eq!(run(&cfg, &out, &[]), 1);
    assert_eq!(report(&out)["verdict"], "fail");
    assert_eq!(replay(&out), 0);
}

#[test]
fn jobs_environment_variable_is_honoured() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("e");
    let o = Command::new(env!("CARGO_BIN_EXE_dlab"))
        .args(["run", config("exponents.toml").to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("DLAB_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&out)["environment"]["threads"], 1);
    assert_eq!(dlab(&["--jobs", "0", "replay", out.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn query_prints_one_record_per_pair() {
    let o = dlab(&["query", "--d", "2", "--pair", "4,4", "--pair", "inf,2", "--equation", "wave"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["beta"], "4/3");
    assert_eq!(recs[0]["class"], "sharp");
    for key in ["d", "sigma", "q", "r", "class", "s", "beta", "region", "beta_bounds"] {
        assert!(recs[1].get(key).is_some(), "record lacks {key}");
    }
    assert_eq!(dlab(&["query", "--d", "2", "--pair", "4"]).status.code(), Some(2));
}
