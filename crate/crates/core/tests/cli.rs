use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn lamtrans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamtrans")).args(args).env("LAMTRANS_LOG", "error").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL_SOLVE: &str = r#"
interfaces = [0.0]
layers = [{ lame_lambda = 1.0, lame_mu = 1.0, c1 = 1.7320508075688772, c2 = 1.0 }]
load = { type = "pulse", amplitude = 1.0, center = 0.0, width = 1.0, duration = 3.0 }

[grid]
x = { from = 0.0, to = 0.8, count = 5 }
y = { from = -1.0, to = 1.0, count = 5 }
t = [0.0, 0.6]

[quadrature]
lambda_max = 40.0
xi_level = 1e-6
"#;

#[test]
fn validate_distinguishes_parse_and_invariant_failures() {
    let ok = lamtrans(&["validate", "--config", config("two_layer.toml").to_str().unwrap()]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert!(stdout(&ok).contains("PASS invertibility"));

    let bad = lamtrans(&["validate", "--config", config("decreasing_interfaces.toml").to_str().unwrap()]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("strictly increasing"));

    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.toml", "layers = [\n");
    assert_eq!(code(&lamtrans(&["validate", "--config", broken.to_str().unwrap()])), 2);
    assert_eq!(code(&lamtrans(&["validate"])), 2);
    assert_eq!(code(&lamtrans(&["validate", "--threads", "many"])), 2);
}

#[test]
fn roundtrip_reports_error_and_tail_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rt");
    let run = lamtrans(&["roundtrip", "--config", config("dirichlet_roundtrip.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", stdout(&run));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("roundtrip.json")).unwrap()).unwrap();
    assert!(summary["max_rel_error"].as_f64().unwrap() <= 1e-3);
    let csv = std::fs::read_to_string(out.join("roundtrip.csv")).unwrap();
    assert!(csv.starts_with("x,component,f,reconstructed,abs_error"));
    assert_eq!(csv.lines().count(), 1 + 2 * summary["samples"].as_u64().unwrap() as usize);

    let tail = lamtrans(&["roundtrip", "--config", config("slow_tail.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&tail), 1);
    assert!(String::from_utf8_lossy(&tail.stderr).contains("tail"));

    let zero = std::fs::read_to_string(config("dirichlet_roundtrip.toml")).unwrap().replace("weights = [1.0, 1.0]", "weights = [0.0, 0.0]");
    let zero = write(dir.path(), "zero.toml", &zero);
    let run = lamtrans(&["roundtrip", "--config", zero.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("roundtrip.json")).unwrap()).unwrap();
    assert_eq!(summary["max_abs_error"].as_f64(), Some(0.0));
}

#[test]
fn solve_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL_SOLVE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let one = lamtrans(&["solve", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap(), "--threads", "1"]);
    let two = lamtrans(&["solve", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "--threads", "3"]);
    assert_eq!(code(&one), 0, "{}", stdout(&one));
    assert_eq!(code(&two), 0);
    for name in ["fields_t000.csv", "fields_t001.csv"] {
        let x = std::fs::read(a.join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.join(name)).unwrap(), "{name} differs");
        assert_eq!(String::from_utf8(x).unwrap().lines().next(), Some("x,y,u,v,sigma_x,sigma_y,tau_xy,layer_index"));
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], serde_json::Value::Bool(true));
    assert!(summary["timings"]["tension_secs"].as_f64().is_some());
    assert_eq!(summary["manifest"]["quadrature"]["lambda_max"].as_f64(), Some(40.0));
}

#[test]
fn zero_load_writes_zero_fields() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_SOLVE.replace(r#"load = { type = "pulse", amplitude = 1.0, center = 0.0, width = 1.0, duration = 3.0 }"#, "");
    let cfg = write(dir.path(), "zero.toml", &text);
    let out = dir.path().join("z");
    assert_eq!(code(&lamtrans(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 0);
    let csv = std::fs::read_to_string(out.join("fields_t001.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(cols[2..7].iter().all(|&v| v == 0.0), "{line}");
    }
}

#[test]
fn verify_writes_a_machine_readable_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let run = lamtrans(&["verify", "--criteria", "1,5", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", stdout(&run));
    assert!(stdout(&run).contains("criterion 5 PASS"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["outcomes"].as_array().unwrap().len(), 2);
    assert_eq!(report["manifest"]["seed"].as_u64(), Some(3));

    let broken = write(dir.path(), "broken.toml", "interfaces = 3");
    assert_eq!(code(&lamtrans(&["verify", "--config", broken.to_str().unwrap(), "--out", out.to_str().unwrap()])), 2);
    assert_eq!(code(&lamtrans(&["verify", "--criteria", "0", "--out", out.to_str().unwrap()])), 2);
}

#[test]
fn spectrum_dumps_every_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let run = lamtrans(&["spectrum", "--config", config("two_layer.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 21);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 3 + 16);

    let none = lamtrans(&["spectrum", "--config", config("half_space.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&none), 2);
}
