//! Adam training against a Fourier-series target with a piecewise-constant
//! learning-rate schedule, mini-batches and an early-stopping cutoff.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{check_dataset, dataset_loss, dataset_loss_and_gradient, parameter_shift_gradient};
use crate::circuit::{model_value, Circuit};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::stochastic::{sample_from_expectation, NoiseModel, NoisyCircuit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub epochs: usize,
    pub learning_rate: f64,
}

/// Uniform initial parameter range `[low, high)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitRange {
    pub low: f64,
    pub high: f64,
}

impl Default for InitRange {
    fn default() -> Self {
        Self { low: 0.0, high: TAU }
    }
}

fn default_schedule() -> Vec<Segment> {
    [(120, 0.5), (120, 0.1), (120, 0.05)]
        .into_iter()
        .map(|(epochs, learning_rate)| Segment { epochs, learning_rate })
        .collect()
}

fn default_cutoff() -> Option<f64> {
    Some(5e-5)
}

/// A disabled cutoff is stored as infinity (or null, which JSON produces for it).
mod cutoff_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(v.unwrap_or(f64::INFINITY))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.filter(|c| *c != f64::INFINITY))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    #[serde(default = "default_schedule")]
    pub schedule: Vec<Segment>,
    /// `None` picks half the training set (25 or 50).
    #[serde(default)]
    pub batch_size: Option<usize>,
    /// Stop once the validation loss drops below this; `None` trains the full schedule.
    /// Written as `inf` in config files.
    #[serde(default = "default_cutoff", with = "cutoff_repr")]
    pub cutoff: Option<f64>,
    #[serde(default = "TrainConfig::default_beta1")]
    pub adam_beta1: f64,
    #[serde(default = "TrainConfig::default_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "TrainConfig::default_epsilon")]
    pub adam_epsilon: f64,
    #[serde(default)]
    pub init: InitRange,
    #[serde(default)]
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            schedule: default_schedule(),
            batch_size: None,
            cutoff: default_cutoff(),
            adam_beta1: Self::default_beta1(),
            adam_beta2: Self::default_beta2(),
            adam_epsilon: Self::default_epsilon(),
            init: InitRange::default(),
            seed: 0,
        }
    }
}

/// Named learning-rate presets for the hyperparameter grid.
pub const PRESETS: [(&str, [f64; 3]); 7] = [
    ("0", [0.3, 0.3, 0.3]),
    ("1a", [0.5, 0.1, 0.05]),
    ("1b", [0.5, 0.1, 0.1]),
    ("1c", [0.5, 0.5, 0.1]),
    ("2a", [0.1, 0.05, 0.01]),
    ("2b", [0.1, 0.05, 0.05]),
    ("2c", [0.1, 0.1, 0.05]),
];

/// Allowed per-segment epoch counts for presets.
pub const PRESET_EPOCHS: [usize; 3] = [40, 80, 120];

impl TrainConfig {
    fn default_beta1() -> f64 {
        0.9
    }

    fn default_beta2() -> f64 {
        0.999
    }

    fn default_epsilon() -> f64 {
        1e-7
    }

    /// Default config with the learning rates of preset `name` and `epochs` per segment.
    pub fn preset(name: &str, epochs: usize) -> Result<Self> {
        let (_, rates) = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown learning-rate preset `{name}`")))?;
        if !PRESET_EPOCHS.contains(&epochs) {
            return Err(Error::InvalidSpec(format!(
                "preset epochs per segment must be one of {PRESET_EPOCHS:?}, got {epochs}"
            )));
        }
        let schedule = rates
            .iter()
            .map(|&learning_rate| Segment { epochs, learning_rate })
            .collect();
        Ok(Self {
            schedule,
            ..Self::default()
        })
    }

    pub fn total_epochs(&self) -> usize {
        self.schedule.iter().map(|s| s.epochs).sum()
    }

    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.schedule.is_empty() {
            return bad("schedule must contain at least one segment");
        }
        if self.schedule.iter().any(|s| s.epochs == 0 || !(s.learning_rate > 0.0)) {
            return bad("every schedule segment needs epochs > 0 and learning_rate > 0");
        }
        if self.batch_size == Some(0) {
            return bad("batch_size must be at least 1");
        }
        if let Some(c) = self.cutoff {
            if !(c > 0.0) {
                return bad("cutoff must be positive");
            }
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam betas must lie in [0, 1)");
        }
        if !(self.adam_epsilon > 0.0) {
            return bad("Adam epsilon must be positive");
        }
        if !(self.init.high > self.init.low) {
            return bad("init range must satisfy low < high");
        }
        Ok(())
    }

    fn batch_for(&self, n: usize) -> usize {
        self.batch_size.unwrap_or(n / 2).clamp(1, n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    fn scaled(mut self, s: f64) -> Self {
        self.ys.iter_mut().for_each(|y| *y *= s);
        self
    }
}

/// Number of grid points used for a target of degree `d`.
pub fn dataset_size(d: usize) -> usize {
    if d < 10 {
        50
    } else {
        100
    }
}

/// Training grid on `[0, 2π]` (both ends) and validation grid on `[0, 2π)`.
pub fn make_datasets(target: &FourierSeries) -> (Dataset, Dataset) {
    let n = dataset_size(target.degree());
    let train_xs: Vec<f64> = (0..n).map(|j| TAU * j as f64 / (n - 1) as f64).collect();
    let val_xs: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let fill = |xs: Vec<f64>| Dataset {
        ys: xs.iter().map(|&x| target.evaluate(x)).collect(),
        xs,
    };
    (fill(train_xs), fill(val_xs))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(num_params: usize) -> Self {
        Self {
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            t: 0,
        }
    }
}

/// One bias-corrected Adam update in place.
pub fn adam_step(params: &mut [f64], grad: &[f64], state: &mut AdamState, lr: f64, beta1: f64, beta2: f64, eps: f64) {
    state.t += 1;
    let b1t = 1.0 - beta1.powi(state.t as i32);
    let b2t = 1.0 - beta2.powi(state.t as i32);
    for i in 0..params.len() {
        let g = grad[i];
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
        let m_hat = state.m[i] / b1t;
        let v_hat = state.v[i] / b2t;
        params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub final_validation_loss: f64,
    pub epochs_run: usize,
    pub final_params: Vec<f64>,
    pub loss_history: Vec<f64>,
}

/// How model values and gradients are obtained during training.
#[derive(Debug, Clone, Default)]
pub enum Backend {
    /// Exact statevector values, adjoint gradients.
    #[default]
    Analytic,
    /// Binomially sampled values, parameter-shift gradients; validation is sampled too.
    Shots { shots: u64, target_scale: f64 },
    /// Density-matrix values under `noise`, parameter-shift gradients.
    /// With `shots` set, every expectation is additionally sampled.
    Noisy {
        noise: NoiseModel,
        mapping: Vec<usize>,
        shots: Option<u64>,
        target_scale: f64,
    },
}

impl Backend {
    pub fn target_scale(&self) -> f64 {
        match self {
            Backend::Analytic => 1.0,
            Backend::Shots { target_scale, .. } | Backend::Noisy { target_scale, .. } => *target_scale,
        }
    }
}

/// Per-run evaluator compiled from a backend.
enum Evaluator<'a> {
    Analytic,
    Shots {
        shots: u64,
    },
    Noisy {
        circuit: Box<NoisyCircuit<'a>>,
        shots: Option<u64>,
    },
}

impl Evaluator<'_> {
    fn value(&self, circuit: &Circuit, params: &[f64], x: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
        match self {
            Evaluator::Analytic => model_value(circuit, params, x),
            Evaluator::Shots { shots } => Ok(sample_from_expectation(model_value(circuit, params, x)?, *shots, rng)),
            Evaluator::Noisy { circuit: nc, shots } => {
                let z = nc.expectation(params, x)?;
                Ok(match shots {
                    Some(s) => sample_from_expectation(z, *s, rng),
                    None => z,
                })
            }
        }
    }

    fn loss(&self, circuit: &Circuit, params: &[f64], data: &Dataset, rng: &mut ChaCha8Rng) -> Result<f64> {
        if let Evaluator::Analytic = self {
            return dataset_loss(circuit, params, &data.xs, &data.ys);
        }
        check_dataset(&data.xs, &data.ys)?;
        let mut acc = 0.0;
        for (&x, &y) in data.xs.iter().zip(&data.ys) {
            let r = self.value(circuit, params, x, rng)? - y;
            acc += r * r;
        }
        Ok(acc / data.len() as f64)
    }

    fn loss_and_gradient(
        &self,
        circuit: &Circuit,
        params: &[f64],
        xs: &[f64],
        ys: &[f64],
        rng: &mut ChaCha8Rng,
    ) -> Result<(f64, Vec<f64>)> {
        if let Evaluator::Analytic = self {
            return dataset_loss_and_gradient(circuit, params, xs, ys);
        }
        check_dataset(xs, ys)?;
        let n = xs.len() as f64;
        let mut loss = 0.0;
        let mut grad = vec![0.0; params.len()];
        for (&x, &y) in xs.iter().zip(ys) {
            let r = self.value(circuit, params, x, rng)? - y;
            loss += r * r;
            let g = parameter_shift_gradient(circuit, params, |p| self.value(circuit, p, x, rng))?;
            for (acc, gi) in grad.iter_mut().zip(g) {
                *acc += 2.0 * r * gi;
            }
        }
        grad.iter_mut().for_each(|g| *g /= n);
        Ok((loss / n, grad))
    }
}

/// Train with exact expectation values and adjoint gradients.
pub fn train(circuit: &Circuit, target: &FourierSeries, config: &TrainConfig) -> Result<TrainResult> {
    train_with(circuit, target, config, &Backend::Analytic)
}

/// Train with the given backend; `config.seed` drives initialization, shuffling and sampling.
pub fn train_with(
    circuit: &Circuit,
    target: &FourierSeries,
    config: &TrainConfig,
    backend: &Backend,
) -> Result<TrainResult> {
    config.validate()?;
    circuit.validate()?;
    let evaluator = match backend {
        Backend::Analytic => Evaluator::Analytic,
        Backend::Shots { shots, .. } => {
            if *shots == 0 {
                return Err(Error::InvalidSpec("shots must be at least 1".into()));
            }
            Evaluator::Shots { shots: *shots }
        }
        Backend::Noisy {
            noise, mapping, shots, ..
        } => Evaluator::Noisy {
            circuit: Box::new(NoisyCircuit::new(circuit, noise, mapping)?),
            shots: *shots,
        },
    };
    let (train_set, val_set) = make_datasets(target);
    let scale = backend.target_scale();
    let (train_set, val_set) = (train_set.scaled(scale), val_set.scaled(scale));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // Measurement sampling gets its own stream so initialization and shuffles
    // match the analytic run with the same seed.
    let mut sample_rng = ChaCha8Rng::seed_from_u64(config.seed);
    sample_rng.set_stream(1);

    let mut params: Vec<f64> = (0..circuit.num_params())
        .map(|_| rng.random_range(config.init.low..config.init.high))
        .collect();
    let mut adam = AdamState::new(params.len());
    let batch = config.batch_for(train_set.len());
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = Vec::with_capacity(config.total_epochs());
    let (mut bx, mut by) = (Vec::with_capacity(batch), Vec::with_capacity(batch));

    'schedule: for seg in &config.schedule {
        for _ in 0..seg.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(batch) {
                bx.clear();
                by.clear();
                bx.extend(chunk.iter().map(|&i| train_set.xs[i]));
                by.extend(chunk.iter().map(|&i| train_set.ys[i]));
                let (_, grad) = evaluator.loss_and_gradient(circuit, &params, &bx, &by, &mut sample_rng)?;
                adam_step(
                    &mut params,
                    &grad,
                    &mut adam,
                    seg.learning_rate,
                    config.adam_beta1,
                    config.adam_beta2,
                    config.adam_epsilon,
                );
            }
            let val = evaluator.loss(circuit, &params, &val_set, &mut sample_rng)?;
            history.push(val);
            if config.cutoff.is_some_and(|c| val < c) {
                break 'schedule;
            }
        }
    }

    Ok(TrainResult {
        final_validation_loss: *history.last().expect("schedule has at least one epoch"),
        epochs_run: history.len(),
        final_params: params,
        loss_history: history,
    })
}
