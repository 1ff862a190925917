use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn longtail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_longtail"))
        .args(args)
        .env_remove("LONGTAIL_SEED")
        .output()
        .expect("spawn longtail")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const CONFIG: &str = r#"
targets = ["heavy_det_count", "partial_sum"]
n_grid = [64, 128, 256]
replications = 4
base_seed = 11

[process]
d = 0.2
family = "stable"
tail_index = 1.5
"#;

fn write_config(dir: &Path) -> String {
    let path = dir.join("exp.toml");
    fs::write(&path, CONFIG).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn theory_prints_report() {
    let o = longtail(&["theory", "--alpha", "1.5", "--d", "0.2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("regime = B"));
    assert!(text.contains("eta_or_sigma2 = 5.997369973"));
    assert!(text.contains("limit_kind = stable"));
    let o = longtail(&["theory", "--alpha", "2", "--d", "0.25"]);
    assert!(stdout(&o).contains("eta_or_sigma2 = 13.984306956"));
}

#[test]
fn theory_rejects_bad_memory() {
    let o = longtail(&["theory", "--alpha", "1.5", "--d", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = longtail(&["theory", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = longtail(&["simulate", "--config", &cfg, "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 257);
    let c = dir.path().join("c.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_longtail"))
        .args(["simulate", "--config", &cfg, "--out", c.to_str().unwrap()])
        .env("LONGTAIL_SEED", "12")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_ne!(text, fs::read_to_string(&c).unwrap());
}

#[test]
fn experiment_writes_identical_csv_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("out{workers}"));
        let o = longtail(&["experiment", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", workers]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("rate_fit partial_sum slope"));
        let rows = fs::read_to_string(out.join("rows.csv")).unwrap();
        assert!(rows.starts_with("corollary_id,n,rep,raw,centered_scaled,u_or_k,status\n"));
        assert_eq!(rows.lines().count(), 1 + 3 * 4 * 2);
        let agg = fs::read_to_string(out.join("aggregate_heavy_det_count.csv")).unwrap();
        assert!(agg.starts_with("n,ks,empirical_scale,lr_norm,count_ok\n"));
        outputs.push((rows, agg));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, CONFIG.replace("n_grid = [64, 128, 256]", "n_grid = [256, 64]")).unwrap();
    let o = longtail(&["experiment", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = longtail(&["simulate", "--config", "/nonexistent.toml", "--out", "/tmp/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn kscheck_against_limits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    // Normal quantiles at midpoints: KS is exactly 1/(2m).
    let m = 200;
    let mut text = String::from("x\n");
    for i in 0..m {
        let p = (i as f64 + 0.5) / m as f64;
        text.push_str(&format!("{}\n", longtail_core::stable_numerics::normal_quantile(p).unwrap()));
    }
    fs::write(&path, text).unwrap();
    let o = longtail(&["kscheck", "--samples", path.to_str().unwrap(), "--limit", "normal:1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ks = 0.002500"), "{}", stdout(&o));
    let o = longtail(&["kscheck", "--samples", path.to_str().unwrap(), "--limit", "stable:1.5:1"]);
    assert!(o.status.success());
    let o = longtail(&["kscheck", "--samples", path.to_str().unwrap(), "--limit", "cauchy:1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = longtail(&["kscheck", "--samples", path.to_str().unwrap(), "--limit", "stable:0.5:1"]);
    assert_eq!(o.status.code(), Some(2));
}
