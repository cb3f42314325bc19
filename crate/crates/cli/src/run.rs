use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use learncap::ansatz::{count_resources, max_degree};
use learncap::fourier::{cross_correlation_report, parse_series_set, random_series, write_series_set, FourierSeries};
use learncap::harness::{
    barren_variance, coefficient_study, learning_capability_observed, CapabilityResult, RunRecord,
};
use learncap::lie::{generators_for, lie_closure};
use learncap::training::Backend;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::config::{ExperimentConfig, ExperimentKind};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] learncap::Error),
    #[error("cannot write {path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
}

/// Where results go and how loudly to report progress.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub workers: usize,
    pub out_dir: PathBuf,
    pub progress: bool,
}

/// Files written and the summary printed for one experiment.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| RunError::Io {
            path: path.clone(),
            msg: e.to_string(),
        })?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        let mut text = serde_json::to_string_pretty(value).expect("results serialize");
        text.push('\n');
        self.put(name, &text)
    }
}

fn functions(cfg: &ExperimentConfig) -> Result<Vec<FourierSeries>, RunError> {
    let src = cfg.functions.as_ref().expect("resolved config has functions");
    if let Some(path) = &src.file {
        let text = fs::read_to_string(path).map_err(|e| RunError::Io {
            path: path.clone(),
            msg: e.to_string(),
        })?;
        return Ok(parse_series_set(&text)?);
    }
    let d = cfg.degree.expect("resolved config has a degree");
    let mut rng = ChaCha8Rng::seed_from_u64(src.seed.expect("resolved config has a function seed"));
    Ok((0..src.count.expect("count or file"))
        .map(|_| random_series(d, &mut rng))
        .collect())
}

fn backend(cfg: &ExperimentConfig) -> Result<Backend, RunError> {
    let scale = cfg.target_scale.unwrap_or(1.0);
    Ok(match cfg.kind {
        ExperimentKind::ShotCapability => Backend::Shots {
            shots: cfg.shots.expect("checked"),
            target_scale: scale,
        },
        ExperimentKind::NoisyCapability => Backend::Noisy {
            noise: cfg.noise()?,
            mapping: cfg.mapping.clone().expect("resolved"),
            shots: cfg.shots,
            target_scale: scale,
        },
        _ => Backend::Analytic,
    })
}

/// Runs a resolved config and writes `<kind>.json` plus `<kind>.csv` into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    fs::create_dir_all(&opts.out_dir).map_err(|e| RunError::Io {
        path: opts.out_dir.clone(),
        msg: e.to_string(),
    })?;
    let mut w = Writer {
        dir: &opts.out_dir,
        files: Vec::new(),
    };
    let kind = cfg.kind.name();
    let mut summary = String::new();

    match cfg.kind {
        ExperimentKind::Capability | ExperimentKind::ShotCapability | ExperimentKind::NoisyCapability => {
            let spec = cfg.ansatz.as_ref().expect("resolved");
            let train = cfg.train.as_ref().expect("resolved");
            let fs = functions(cfg)?;
            let total = fs.len();
            let report = |r: &RunRecord| {
                if opts.progress {
                    let line = format!(
                        "function {}/{total}: loss {:.4e} after {} epochs\n",
                        r.index + 1,
                        r.final_loss,
                        r.epochs_run
                    );
                    let _ = std::io::stderr().write_all(line.as_bytes());
                }
            };
            let result: CapabilityResult =
                learning_capability_observed(spec, &fs, train, &backend(cfg)?, opts.workers, &report)?;
            w.json(&format!("{kind}.json"), &result)?;
            w.put(&format!("{kind}.csv"), &result.runs_csv())?;
            write!(summary, "mu_{} = {:.4e}", result.degree, result.mu).unwrap();
            if result.ci.defined {
                write!(
                    summary,
                    " ± {:.4e} (95% CI, {} functions)",
                    result.ci.half_width,
                    result.losses.len()
                )
                .unwrap();
            }
        }
        ExperimentKind::Coeffs => {
            let spec = cfg.ansatz.as_ref().expect("resolved");
            let d = cfg.degree.expect("resolved");
            let study = coefficient_study(spec, d, cfg.samples.expect("resolved"), cfg.seed.expect("resolved"))?;
            w.json("coeffs.json", &study)?;
            let mut csv = String::from("sample,omega,re,im\n");
            for (i, s) in study.samples.iter().enumerate() {
                for (omega, [re, im]) in s.iter().enumerate() {
                    writeln!(csv, "{i},{omega},{re:e},{im:e}").unwrap();
                }
            }
            w.put("coeffs.csv", &csv)?;
            for f in &study.summary {
                writeln!(
                    summary,
                    "omega {}: max|Re| {:.3e} max|Im| {:.3e} significant {:.0}%",
                    f.omega,
                    f.max_abs_re,
                    f.max_abs_im,
                    100.0 * f.fraction_significant
                )
                .unwrap();
            }
            summary.pop();
        }
        ExperimentKind::Barren => {
            let spec = cfg.ansatz.as_ref().expect("resolved");
            let fs = functions(cfg)?;
            let r = barren_variance(
                spec,
                &fs,
                cfg.samples.expect("resolved"),
                cfg.seed.expect("resolved"),
                cfg.all_params,
                opts.workers,
            )?;
            w.json(
                "barren.json",
                &json!({ "ansatz": spec, "degree": cfg.degree, "all_params": cfg.all_params, "result": r }),
            )?;
            w.put(
                "barren.csv",
                &format!(
                    "probe_param,sample_count,variance_of_gradient\n{},{},{:e}\n",
                    r.probe_param, r.sample_count, r.variance_of_gradient
                ),
            )?;
            write!(
                summary,
                "Var[dL/dtheta_{}] = {:.4e} over {} samples",
                r.probe_param, r.variance_of_gradient, r.sample_count
            )
            .unwrap();
        }
        ExperimentKind::Counts => {
            let spec = cfg.ansatz.as_ref().expect("resolved");
            let c = spec.build()?;
            let r = count_resources(&c);
            let k = max_degree(&c);
            w.json("counts.json", &json!({ "ansatz": spec, "counts": r, "max_degree": k }))?;
            w.put(
                "counts.csv",
                &format!(
                    "single_qubit_gates,two_qubit_gates,trainable_params,max_degree\n{},{},{},{k}\n",
                    r.single_qubit_gates, r.two_qubit_gates, r.trainable_params
                ),
            )?;
            write!(
                summary,
                "s={} t={} p={}",
                r.single_qubit_gates, r.two_qubit_gates, r.trainable_params
            )
            .unwrap();
        }
        ExperimentKind::FourierGen => {
            let fs = functions(cfg)?;
            let report = cross_correlation_report(&fs);
            let max_abs: Vec<f64> = fs.iter().map(|f| f.max_abs()).collect();
            w.put("functions.txt", &write_series_set(&fs))?;
            w.json(
                "fourier-gen.json",
                &json!({ "degree": cfg.degree, "count": fs.len(), "max_abs": max_abs, "correlation": report }),
            )?;
            let mut csv = String::from("bin_low,bin_high,pairs\n");
            for (i, c) in report.histogram.iter().enumerate() {
                writeln!(csv, "{:.1},{:.1},{c}", i as f64 / 10.0, (i + 1) as f64 / 10.0).unwrap();
            }
            w.put("fourier-gen.csv", &csv)?;
            write!(
                summary,
                "{} functions of degree {}; correlation histogram {:?}",
                fs.len(),
                cfg.degree.unwrap_or(0),
                report.histogram
            )
            .unwrap();
        }
        ExperimentKind::Dla => {
            let spec = cfg.ansatz.as_ref().expect("resolved");
            let c = spec.build()?;
            let gens = generators_for(&c);
            let dim = lie_closure(&gens, usize::MAX)?;
            let full = (1usize << (2 * c.num_qubits())) - 1;
            w.json(
                "dla.json",
                &json!({ "ansatz": spec, "generators": gens.len(), "dimension": dim, "full_dimension": full }),
            )?;
            w.put(
                "dla.csv",
                &format!("generators,dimension,full_dimension\n{},{dim},{full}\n", gens.len()),
            )?;
            write!(summary, "dimension {dim} (full algebra {full})").unwrap();
        }
    }
    Ok(RunOutcome {
        files: w.files,
        summary,
    })
}
