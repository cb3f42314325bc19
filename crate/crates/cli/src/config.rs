use std::fs;
use std::path::{Path, PathBuf};

use learncap::ansatz::AnsatzSpec;
use learncap::fourier::parse_series_set;
use learncap::lie::MAX_LIE_QUBITS;
use learncap::stochastic::{default_mapping, DensityMatrix, NoiseModel, NoisyCircuit};
use learncap::training::{dataset_size, TrainConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Capability,
    Coeffs,
    Barren,
    Counts,
    FourierGen,
    Dla,
    NoisyCapability,
    ShotCapability,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Capability => "capability",
            ExperimentKind::Coeffs => "coeffs",
            ExperimentKind::Barren => "barren",
            ExperimentKind::Counts => "counts",
            ExperimentKind::FourierGen => "fourier-gen",
            ExperimentKind::Dla => "dla",
            ExperimentKind::NoisyCapability => "noisy-capability",
            ExperimentKind::ShotCapability => "shot-capability",
        }
    }

    fn trains(self) -> bool {
        matches!(
            self,
            ExperimentKind::Capability | ExperimentKind::NoisyCapability | ExperimentKind::ShotCapability
        )
    }

    fn needs_ansatz(self) -> bool {
        self != ExperimentKind::FourierGen
    }

    fn needs_degree(self) -> bool {
        !matches!(self, ExperimentKind::Counts | ExperimentKind::Dla)
    }

    fn needs_functions(self) -> bool {
        self.trains() || matches!(self, ExperimentKind::Barren | ExperimentKind::FourierGen)
    }
}

/// Target functions: `count` fresh series from `seed`, or a series file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetChoice {
    pub name: String,
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Coefficient draws (`coeffs`) or trials per function (`barren`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// `barren`: average the variance over every parameter instead of the probe.
    #[serde(default)]
    pub all_params: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    /// Calibration file; the built-in device when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_model: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mapping: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<AnsatzSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<FunctionSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<TrainConfig>,
}

const DEFAULT_COEFF_SAMPLES: usize = 100;
const DEFAULT_BARREN_TRIALS: usize = 10;
const DEFAULT_SHOT_QUBITS: usize = 6;
const DEFAULT_NOISY_QUBITS: usize = 4;
const DEFAULT_NOISY_SCALE: f64 = 0.75;

impl ExperimentConfig {
    /// Minimal config of the given kind; everything else is filled by [`Self::resolve`].
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            seed: None,
            degree: None,
            workers: None,
            output: None,
            samples: None,
            all_params: false,
            shots: None,
            noise_model: None,
            mapping: None,
            target_scale: None,
            max_qubits: None,
            preset: None,
            ansatz: None,
            functions: None,
            train: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// Checks kind-specific fields and fills every default, so that resolving
    /// twice gives the same config.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        let kind = self.kind;
        let circuit = match (&self.ansatz, kind.needs_ansatz()) {
            (Some(spec), _) => Some(spec.build().map_err(|e| invalid(e.to_string()))?),
            (None, true) => return Err(invalid(format!("`{}` needs an [ansatz] table", kind.name()))),
            (None, false) => None,
        };
        let n = circuit.as_ref().map_or(0, |c| c.num_qubits());

        if kind.needs_functions() {
            let src = self
                .functions
                .as_mut()
                .ok_or_else(|| invalid(format!("`{}` needs a [functions] table", kind.name())))?;
            match (&src.count, &src.file) {
                (Some(_), Some(_)) => return Err(invalid("[functions] takes either `count` or `file`, not both")),
                (None, None) => return Err(invalid("[functions] needs `count` or `file`")),
                (Some(0), None) => return Err(invalid("[functions] count must be at least 1")),
                (Some(_), None) => {
                    src.seed.get_or_insert(self.seed.unwrap_or(0));
                }
                (None, Some(path)) => {
                    if kind == ExperimentKind::FourierGen {
                        return Err(invalid("`fourier-gen` generates functions; give `count`, not `file`"));
                    }
                    let set =
                        parse_series_set(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                    let first = set
                        .first()
                        .ok_or_else(|| invalid(format!("{} holds no functions", path.display())))?;
                    if let Some(s) = set.iter().find(|s| s.degree() != first.degree()) {
                        return Err(invalid(format!(
                            "{} mixes degrees {} and {}",
                            path.display(),
                            first.degree(),
                            s.degree()
                        )));
                    }
                    match self.degree {
                        Some(d) if d != first.degree() => {
                            return Err(invalid(format!(
                                "degree = {d} but {} holds degree {}",
                                path.display(),
                                first.degree()
                            )))
                        }
                        _ => self.degree = Some(first.degree()),
                    }
                }
            }
        } else if self.functions.is_some() {
            return Err(invalid(format!("`{}` does not use [functions]", kind.name())));
        }

        if kind.needs_degree() && self.degree.is_none() {
            return Err(invalid(format!("`{}` needs `degree`", kind.name())));
        }

        if kind.trains() {
            let mut train = match (&self.preset, self.train.take()) {
                (Some(p), train) => {
                    let preset = TrainConfig::preset(&p.name, p.epochs).map_err(|e| invalid(e.to_string()))?;
                    TrainConfig {
                        schedule: preset.schedule,
                        ..train.unwrap_or_default()
                    }
                }
                (None, train) => train.unwrap_or_default(),
            };
            let seed = *self.seed.get_or_insert(train.seed);
            train.seed = seed;
            if train.batch_size.is_none() {
                train.batch_size = Some(dataset_size(self.degree.expect("checked above")) / 2);
            }
            train.validate().map_err(|e| invalid(e.to_string()))?;
            self.train = Some(train);
            self.preset = None;
        } else if self.train.is_some() || self.preset.is_some() {
            return Err(invalid(format!(
                "`{}` does not train; drop [train] and [preset]",
                kind.name()
            )));
        } else if matches!(kind, ExperimentKind::Coeffs | ExperimentKind::Barren) {
            self.seed.get_or_insert(0);
        }

        match kind {
            ExperimentKind::Coeffs => {
                self.samples.get_or_insert(DEFAULT_COEFF_SAMPLES);
            }
            ExperimentKind::Barren => {
                self.samples.get_or_insert(DEFAULT_BARREN_TRIALS);
            }
            _ => {}
        }
        if self.samples == Some(0) {
            return Err(invalid("`samples` must be at least 1"));
        }

        if kind == ExperimentKind::Dla && n > MAX_LIE_QUBITS {
            return Err(invalid(format!(
                "`dla` supports at most {MAX_LIE_QUBITS} qubits, ansatz has {n}"
            )));
        }

        match kind {
            ExperimentKind::ShotCapability => {
                match self.shots {
                    None => return Err(invalid("`shot-capability` needs `shots`")),
                    Some(0) => return Err(invalid("`shots` must be at least 1")),
                    _ => {}
                }
                self.target_scale.get_or_insert(1.0);
                let cap = *self.max_qubits.get_or_insert(DEFAULT_SHOT_QUBITS);
                if n > cap {
                    return Err(invalid(format!(
                        "shot runs are capped at {cap} qubits (raise `max_qubits`), ansatz has {n}"
                    )));
                }
            }
            ExperimentKind::NoisyCapability => {
                if self.shots == Some(0) {
                    return Err(invalid("`shots` must be at least 1"));
                }
                self.target_scale.get_or_insert(DEFAULT_NOISY_SCALE);
                let cap = (*self.max_qubits.get_or_insert(DEFAULT_NOISY_QUBITS)).min(DensityMatrix::MAX_QUBITS);
                if n > cap {
                    return Err(invalid(format!(
                        "noisy runs are capped at {cap} qubits (raise `max_qubits`), ansatz has {n}"
                    )));
                }
                let model = self.noise()?;
                let mapping = self.mapping.get_or_insert_with(|| default_mapping(n));
                NoisyCircuit::new(circuit.as_ref().expect("noisy runs need an ansatz"), &model, mapping)
                    .map_err(|e| invalid(e.to_string()))?;
            }
            _ => {
                if self.shots.is_some() || self.noise_model.is_some() || self.mapping.is_some() {
                    return Err(invalid(format!("`{}` takes no shot or noise settings", kind.name())));
                }
            }
        }
        if let Some(s) = self.target_scale {
            if !(s > 0.0 && s <= 1.0) {
                return Err(invalid(format!("target_scale must lie in (0, 1], got {s}")));
            }
        }
        if self.workers == Some(0) {
            return Err(invalid("`workers` must be at least 1"));
        }
        Ok(self)
    }

    /// The calibration to simulate against.
    pub fn noise(&self) -> Result<NoiseModel, ConfigError> {
        match &self.noise_model {
            None => Ok(NoiseModel::builtin()),
            Some(path) => NoiseModel::parse(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display()))),
        }
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// Reads a config file without validating it.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    ExperimentConfig::from_toml(&read(path)?)
}

/// Reads, validates and default-fills a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    parse_config(path)?.resolve()
}
