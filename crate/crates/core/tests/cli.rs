use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_decay-predict"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap();
    (
        output.status.code().unwrap(),
        String::from_utf8(output.stdout).unwrap(),
        String::from_utf8(output.stderr).unwrap(),
    )
}

fn field(stdout: &str, key: &str) -> f64 {
    stdout
        .split_whitespace()
        .find_map(|w| w.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from {stdout}"))
        .parse()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn constant_signal_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("constant.toml");
    let (code, out, err) = run(dir.path(), &["--config", cfg.to_str().unwrap(), "predict"]);
    assert_eq!(code, 0, "{err}");
    assert!((field(&out, "linf_error") - (-1.0f64).exp()).abs() < 1e-8, "{out}");
    let text = fs::read_to_string(dir.path().join("predict.prediction.txt")).unwrap();
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert!(rows > 400);
}

#[test]
fn kernel_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("constant.toml");
    let cfg = cfg.to_str().unwrap();
    let (code, out, _) = run(dir.path(), &["--config", cfg, "kernel"]);
    assert_eq!(code, 0);
    assert!((field(&out, "k0") - 1.0).abs() < 1e-14);
    assert_eq!(field(&out, "T") as usize, 13);

    let kernel_path = dir.path().join("kernel.kernel.json");
    let (code, direct, _) = run(dir.path(), &["--config", cfg, "predict"]);
    assert_eq!(code, 0);
    let body = fs::read_to_string(cfg).unwrap()
        + &format!("\n[kernel]\npath = {:?}\n", kernel_path.to_str().unwrap());
    let cfg2 = write_config(dir.path(), &body);
    let (code, loaded, err) = run(dir.path(), &["--config", cfg2.to_str().unwrap(), "predict"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(field(&direct, "linf_error"), field(&loaded, "linf_error"));
}

#[test]
fn gen_is_reproducible_and_readable() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(dir.path(), &["gen", "--seed", "9"]);
    assert_eq!(code, 0);
    let path = dir.path().join("gen.series.txt");
    let first = fs::read(&path).unwrap();
    let (code, _, _) = run(dir.path(), &["gen", "--seed", "9"]);
    assert_eq!(code, 0);
    assert_eq!(first, fs::read(&path).unwrap());

    // the generated series feeds back in as a file signal
    let body = format!(
        "[signal]\nkind = \"file\"\npath = {:?}\n",
        path.to_str().unwrap()
    );
    let cfg = write_config(dir.path(), &body);
    let (code, out, err) = run(dir.path(), &["--config", cfg.to_str().unwrap(), "predict"]);
    assert_eq!(code, 0, "{err}");
    assert!(field(&out, "linf_error").is_finite());
}

#[test]
fn diagnose_energy_decay_signal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("energy_decay.toml");
    let (code, out, err) = run(dir.path(), &["--config", cfg.to_str().unwrap(), "diagnose"]);
    assert_eq!(code, 0, "{err}");
    let d = field(&out, "membership_estimate");
    assert!(d > 0.0 && d <= 1.1, "{out}");
    assert!(dir.path().join("diagnose.diagnose.json").exists());
}

#[test]
fn sweep_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("sweep.toml");
    let (code, out, err) = run(dir.path(), &["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("rows=4 succeeded=4"), "{out}");
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("# {"));
    assert_eq!(csv.lines().count(), 6);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["metadata"]["timestamp_unix"], 1_700_000_000u64);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write_config(dir.path(), "[predictor]\ngama = 2.0\n");
    let (code, _, err) = run(dir.path(), &["--config", bad_key.to_str().unwrap(), "kernel"]);
    assert_eq!(code, 2, "{err}");

    let (code, _, _) = run(dir.path(), &["kernel", "--gamma", "0.5"]);
    assert_eq!(code, 2);

    let (code, _, err) = run(dir.path(), &["kernel", "--gamma", "6"]);
    assert_eq!(code, 3, "{err}");

    let hopeless = write_config(
        dir.path(),
        "[predictor]\ngamma_list = [2.5]\n\n[kernel]\nfft_size = 128\n\n[run]\nwindow = 256\n",
    );
    let (code, out, err) = run(dir.path(), &["--config", hopeless.to_str().unwrap(), "sweep"]);
    assert_eq!(code, 4, "{out}{err}");

    let missing = dir.path().join("nope.toml");
    let (code, _, _) = run(dir.path(), &["--config", missing.to_str().unwrap(), "kernel"]);
    assert_eq!(code, 1);
}
