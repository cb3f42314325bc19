use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use learncap::fourier::parse_series_set;
use learncap_cli::{load_config, ConfigError, ExperimentConfig, ExperimentKind};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_learncap"));
    c.env_remove("LEARNCAP_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SMALL_CAPABILITY: &str = r#"
kind = "capability"
degree = 2
seed = 4

[ansatz]
type = "layered"
num_qubits = 2
num_layers = 1
zero_layer = true
u1 = "RY"
ent_gate = "CNOT"

[functions]
count = 6

[train]
schedule = [{ epochs = 5, learning_rate = 0.2 }]
"#;

#[test]
fn shipped_configs_round_trip() {
    let mut seen = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap().resolve().unwrap();
        assert_eq!(again, cfg, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 8);
}

#[test]
fn defaults_are_filled() {
    let cfg = ExperimentConfig::from_toml(SMALL_CAPABILITY)
        .unwrap()
        .resolve()
        .unwrap();
    let train = cfg.train.as_ref().unwrap();
    assert_eq!(train.batch_size, Some(25));
    assert_eq!(train.seed, 4);
    assert_eq!(train.cutoff, Some(5e-5));
    assert_eq!(cfg.functions.as_ref().unwrap().seed, Some(4));

    let big = SMALL_CAPABILITY.replace("degree = 2", "degree = 12");
    let cfg = ExperimentConfig::from_toml(&big).unwrap().resolve().unwrap();
    assert_eq!(cfg.train.unwrap().batch_size, Some(50));
}

#[test]
fn preset_sets_learning_rates() {
    let text = SMALL_CAPABILITY.replace(
        "[train]\nschedule = [{ epochs = 5, learning_rate = 0.2 }]",
        "[preset]\nname = \"2a\"\nepochs = 80",
    );
    let cfg = ExperimentConfig::from_toml(&text).unwrap().resolve().unwrap();
    assert!(cfg.preset.is_none());
    let rates: Vec<f64> = cfg
        .train
        .as_ref()
        .unwrap()
        .schedule
        .iter()
        .map(|s| s.learning_rate)
        .collect();
    assert_eq!(rates, vec![0.1, 0.05, 0.01]);
    assert!(cfg.train.unwrap().schedule.iter().all(|s| s.epochs == 80));
}

#[test]
fn infinite_cutoff_disables_early_stopping() {
    let text = SMALL_CAPABILITY.replace("[train]\n", "[train]\ncutoff = inf\n");
    let cfg = ExperimentConfig::from_toml(&text).unwrap().resolve().unwrap();
    assert_eq!(cfg.train.as_ref().unwrap().cutoff, None);
    assert!(cfg.to_toml().contains("cutoff = inf"));
}

#[test]
fn config_errors_are_distinct() {
    let parse = ExperimentConfig::from_toml("kind = \"capability\"\ndegree = [\n").unwrap_err();
    assert!(
        matches!(parse, ConfigError::Parse(ref m) if m.contains("line")),
        "{parse}"
    );

    let unknown = ExperimentConfig::from_toml(&SMALL_CAPABILITY.replace("seed = 4", "sede = 4")).unwrap_err();
    assert!(matches!(unknown, ConfigError::Parse(_)));

    let preset = SMALL_CAPABILITY.replace(
        "[train]\nschedule = [{ epochs = 5, learning_rate = 0.2 }]",
        "[preset]\nname = \"9z\"\nepochs = 40",
    );
    let e = ExperimentConfig::from_toml(&preset).unwrap().resolve().unwrap_err();
    assert!(e.to_string().contains("preset"), "{e}");

    let strong = SMALL_CAPABILITY.replace(
        "ent_gate = \"CNOT\"",
        "ent_gate = \"CNOT\"\nent_structure = \"strongc14\"",
    );
    let e = ExperimentConfig::from_toml(&strong).unwrap().resolve().unwrap_err();
    assert!(e.to_string().contains("strongc14"), "{e}");

    let mut no_functions = ExperimentConfig::from_toml(SMALL_CAPABILITY).unwrap();
    no_functions.functions = None;
    assert!(no_functions.resolve().unwrap_err().to_string().contains("[functions]"));

    let mut shots = ExperimentConfig::from_toml(SMALL_CAPABILITY).unwrap();
    shots.kind = ExperimentKind::ShotCapability;
    assert!(shots.resolve().unwrap_err().to_string().contains("shots"));

    let missing = load_config(Path::new("/nonexistent/config.toml")).unwrap_err();
    assert!(matches!(missing, ConfigError::Io { .. }));
}

#[test]
fn qubit_caps_apply_to_sampled_and_noisy_runs() {
    let wide = SMALL_CAPABILITY.replace("num_qubits = 2", "num_qubits = 5");
    let mut noisy = ExperimentConfig::from_toml(&wide).unwrap();
    noisy.kind = ExperimentKind::NoisyCapability;
    assert!(noisy.clone().resolve().unwrap_err().to_string().contains("capped at 4"));
    noisy.max_qubits = Some(5);
    let cfg = noisy.resolve().unwrap();
    assert_eq!(cfg.mapping, Some(vec![0, 1, 2, 3, 4]));
    assert_eq!(cfg.target_scale, Some(0.75));

    let mut shots = ExperimentConfig::from_toml(&SMALL_CAPABILITY.replace("num_qubits = 2", "num_qubits = 7")).unwrap();
    shots.kind = ExperimentKind::ShotCapability;
    shots.shots = Some(100);
    assert!(shots.resolve().unwrap_err().to_string().contains("capped at 6"));
}

#[test]
fn counts_and_dla_print_their_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "counts",
        "--config",
        configs_dir().join("counts.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "s=108 t=36 p=96");
    assert!(fs::read_to_string(dir.path().join("counts.csv"))
        .unwrap()
        .starts_with("single_qubit_gates,"));

    let out = run(&[
        "dla",
        "--config",
        configs_dir().join("dla.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("dimension 15"));
}

#[test]
fn fourier_gen_writes_normalized_functions() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "fourier-gen",
        "--config",
        configs_dir().join("fourier-gen.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let set = parse_series_set(&fs::read_to_string(dir.path().join("functions.txt")).unwrap()).unwrap();
    assert_eq!(set.len(), 100);
    for s in &set {
        assert_eq!(s.degree(), 12);
        let dense = (0..100_000)
            .map(|j| s.evaluate(std::f64::consts::TAU * j as f64 / 100_000.0).abs())
            .fold(0.0, f64::max);
        assert!((dense - 1.0).abs() < 1e-6, "{dense}");
    }
    let hist = fs::read_to_string(dir.path().join("fourier-gen.csv")).unwrap();
    let pairs: usize = hist
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(pairs, 100 * 99 / 2);
}

#[test]
fn capability_tables_are_reproducible_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cap.toml", SMALL_CAPABILITY);
    let mut tables = Vec::new();
    for (workers, sub) in [("1", "a"), ("3", "b"), ("3", "c")] {
        let out_dir = dir.path().join(sub);
        let out = run(&[
            "capability",
            "--config",
            cfg.to_str().unwrap(),
            "--workers",
            workers,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("mu_2 = "));
        let progress = String::from_utf8_lossy(&out.stderr);
        assert_eq!(progress.lines().filter(|l| l.starts_with("function ")).count(), 6);
        tables.push((
            fs::read(out_dir.join("capability.csv")).unwrap(),
            fs::read(out_dir.join("capability.json")).unwrap(),
        ));
    }
    assert_eq!(tables[0], tables[1]);
    assert_eq!(tables[1], tables[2]);
    assert_eq!(String::from_utf8_lossy(&tables[0].0).lines().count(), 7);
}

#[test]
fn seed_flag_and_worker_env_are_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cap.toml", SMALL_CAPABILITY);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = run(&[
        "capability",
        "--config",
        cfg.to_str().unwrap(),
        "--quiet",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).contains("function "));
    let out = bin()
        .env("LEARNCAP_WORKERS", "2")
        .args([
            "capability",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "99",
            "--out",
            b.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(b.join("capability.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("0,99,"));
    assert_ne!(fs::read(a.join("capability.csv")).unwrap(), csv.into_bytes());
}

#[test]
fn exit_codes_separate_config_and_runtime_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "kind = \"counts\"\n[ansatz\n");
    assert_eq!(
        run(&["counts", "--config", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let counts = configs_dir().join("counts.toml");
    assert_eq!(
        run(&["dla", "--config", counts.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["counts"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    // Output path occupied by a file: fails only when writing.
    let blocker = write(dir.path(), "blocker", "");
    let out = run(&[
        "counts",
        "--config",
        counts.to_str().unwrap(),
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
