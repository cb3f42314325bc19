//! Learning-capability experiments over function sets, with confidence
//! intervals, loss histograms, barren-plateau probes and coefficient studies.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::ansatz::AnsatzSpec;
use crate::autodiff::dataset_loss_and_gradient;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::fourier::{sample_circuit_coefficients, FourierSeries};
use crate::training::{make_datasets, train_with, Backend, TrainConfig};

/// Number of equal-width bins in the loss histogram.
pub const LOSS_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub final_loss: f64,
    pub epochs_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossHistogram {
    pub min: f64,
    pub max: f64,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub mean: f64,
    pub half_width: f64,
    /// False when fewer than two samples make the interval undefined (half-width reported as 0).
    pub defined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityResult {
    pub ansatz: AnsatzSpec,
    pub degree: usize,
    pub config: TrainConfig,
    pub losses: Vec<f64>,
    pub mu: f64,
    pub ci: ConfidenceInterval,
    pub histogram: LossHistogram,
    pub runs: Vec<RunRecord>,
}

impl CapabilityResult {
    /// `index,seed,final_loss,epochs_run` table.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("index,seed,final_loss,epochs_run\n");
        for r in &self.runs {
            writeln!(out, "{},{},{:e},{}", r.index, r.seed, r.final_loss, r.epochs_run).unwrap();
        }
        out
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot start worker pool: {e}")))
}

fn common_degree(functions: &[FourierSeries]) -> Result<usize> {
    let first = functions
        .first()
        .ok_or_else(|| Error::InvalidSpec("function set is empty".into()))?
        .degree();
    match functions.iter().find(|f| f.degree() != first) {
        Some(f) => Err(Error::MixedDegrees(first, f.degree())),
        None => Ok(first),
    }
}

/// Seed of function `index` for a base seed.
pub fn function_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// Mean final validation loss over `functions` with exact simulation.
pub fn learning_capability(
    spec: &AnsatzSpec,
    functions: &[FourierSeries],
    config: &TrainConfig,
    workers: usize,
) -> Result<CapabilityResult> {
    learning_capability_with(spec, functions, config, &Backend::Analytic, workers)
}

pub fn learning_capability_with(
    spec: &AnsatzSpec,
    functions: &[FourierSeries],
    config: &TrainConfig,
    backend: &Backend,
    workers: usize,
) -> Result<CapabilityResult> {
    learning_capability_observed(spec, functions, config, backend, workers, &|_| {})
}

/// Like [`learning_capability_with`], calling `on_done` from the worker thread as each run finishes.
pub fn learning_capability_observed(
    spec: &AnsatzSpec,
    functions: &[FourierSeries],
    config: &TrainConfig,
    backend: &Backend,
    workers: usize,
    on_done: &(dyn Fn(&RunRecord) + Sync),
) -> Result<CapabilityResult> {
    let degree = common_degree(functions)?;
    config.validate()?;
    spec.build()?;
    let runs = pool(workers)?.install(|| {
        functions
            .par_iter()
            .enumerate()
            .map(|(index, target)| {
                let circuit = spec.build()?;
                let seed = function_seed(config.seed, index);
                let cfg = TrainConfig { seed, ..config.clone() };
                let r = train_with(&circuit, target, &cfg, backend)?;
                let record = RunRecord {
                    index,
                    seed,
                    final_loss: r.final_validation_loss,
                    epochs_run: r.epochs_run,
                };
                on_done(&record);
                Ok(record)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let losses: Vec<f64> = runs.iter().map(|r| r.final_loss).collect();
    let ci = confidence_interval(&losses, 0.95);
    Ok(CapabilityResult {
        ansatz: spec.clone(),
        degree,
        config: config.clone(),
        mu: ci.mean,
        ci,
        histogram: loss_histogram(&losses, LOSS_BINS),
        losses,
        runs,
    })
}

/// Student-t interval `t(level, N-1)·s/√N` with the corrected sample deviation.
pub fn confidence_interval(losses: &[f64], level: f64) -> ConfidenceInterval {
    let n = losses.len();
    let mean = losses.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return ConfidenceInterval {
            mean,
            half_width: 0.0,
            defined: false,
        };
    }
    let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("degrees of freedom positive")
        .inverse_cdf(0.5 + level / 2.0);
    ConfidenceInterval {
        mean,
        half_width: t * var.sqrt() / (n as f64).sqrt(),
        defined: true,
    }
}

/// `bins` equal-width bins over `[min, max]`; the maximum falls into the last bin.
pub fn loss_histogram(losses: &[f64], bins: usize) -> LossHistogram {
    let min = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let max = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0; bins];
    let width = (max - min) / bins as f64;
    for &l in losses {
        let b = if width > 0.0 { ((l - min) / width) as usize } else { 0 };
        counts[b.min(bins - 1)] += 1;
    }
    if losses.is_empty() {
        return LossHistogram {
            min: 0.0,
            max: 0.0,
            counts,
        };
    }
    LossHistogram { min, max, counts }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrenProbeResult {
    /// Variance of the probe parameter's gradient, or the mean per-parameter
    /// variance when every parameter was probed.
    pub variance_of_gradient: f64,
    pub sample_count: usize,
    pub probe_param: usize,
}

/// Index of the first trainable parameter of a gate touching qubit 0.
pub fn probe_parameter(circuit: &Circuit) -> Option<usize> {
    circuit
        .ops()
        .iter()
        .find(|op| op.qubits().contains(&0) && op.trainable_index().is_some())
        .and_then(|op| op.trainable_index())
}

fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

/// Gradient variance of the full-training-set MSE at random parameters, with
/// the probe parameter pinned at 0.
pub fn barren_variance(
    spec: &AnsatzSpec,
    functions: &[FourierSeries],
    trials_per_function: usize,
    seed: u64,
    all_params: bool,
    workers: usize,
) -> Result<BarrenProbeResult> {
    common_degree(functions)?;
    if trials_per_function == 0 {
        return Err(Error::InvalidSpec("trials_per_function must be at least 1".into()));
    }
    let circuit = spec.build()?;
    let probe = probe_parameter(&circuit)
        .ok_or_else(|| Error::InvalidSpec("circuit has no trainable gate on qubit 0".into()))?;
    let grads: Vec<Vec<f64>> = pool(workers)?.install(|| {
        functions
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let mut rng = ChaCha8Rng::seed_from_u64(function_seed(seed, i));
                let (train, _) = make_datasets(f);
                let mut out = Vec::with_capacity(trials_per_function);
                for _ in 0..trials_per_function {
                    let mut params: Vec<f64> = (0..circuit.num_params()).map(|_| rng.random_range(0.0..TAU)).collect();
                    params[probe] = 0.0;
                    let (_, g) = dataset_loss_and_gradient(&circuit, &params, &train.xs, &train.ys)?;
                    out.push(g);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().flatten().collect())
    })?;
    let column = |k: usize| grads.iter().map(|g| g[k]).collect::<Vec<_>>();
    let variance_of_gradient = if all_params {
        let p = circuit.num_params();
        (0..p).map(|k| variance(&column(k))).sum::<f64>() / p as f64
    } else {
        variance(&column(probe))
    };
    Ok(BarrenProbeResult {
        variance_of_gradient,
        sample_count: grads.len(),
        probe_param: probe,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySummary {
    pub omega: usize,
    pub max_abs_re: f64,
    pub max_abs_im: f64,
    /// Share of samples with `|c_ω|` above [`COEFFICIENT_THRESHOLD`].
    pub fraction_significant: f64,
}

pub const COEFFICIENT_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientStudy {
    pub degree: usize,
    /// Per sample, `(Re, Im)` of `c_0..c_d`.
    pub samples: Vec<Vec<[f64; 2]>>,
    pub summary: Vec<FrequencySummary>,
}

/// Fourier coefficients of the model at `num_samples` random parameter draws.
pub fn coefficient_study(spec: &AnsatzSpec, d: usize, num_samples: usize, seed: u64) -> Result<CoefficientStudy> {
    let circuit = spec.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = sample_circuit_coefficients(&circuit, d, num_samples, &mut rng)?;
    let summary = (0..=d)
        .map(|w| {
            let col = raw.iter().map(|s| s[w]);
            FrequencySummary {
                omega: w,
                max_abs_re: col.clone().map(|c| c.re.abs()).fold(0.0, f64::max),
                max_abs_im: col.clone().map(|c| c.im.abs()).fold(0.0, f64::max),
                fraction_significant: col.filter(|c| c.norm() > COEFFICIENT_THRESHOLD).count() as f64
                    / num_samples.max(1) as f64,
            }
        })
        .collect();
    let samples = raw.iter().map(|s| s.iter().map(|c| [c.re, c.im]).collect()).collect();
    Ok(CoefficientStudy {
        degree: d,
        samples,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{EntanglementGate, LayeredSpec, SingleQubitUnitary};
    use crate::fourier::random_series;
    use crate::training::Segment;

    fn small_spec() -> AnsatzSpec {
        LayeredSpec::new(1, 1, SingleQubitUnitary::RY, EntanglementGate::CNOT, 1).into()
    }

    fn short_config() -> TrainConfig {
        TrainConfig {
            schedule: vec![Segment {
                epochs: 3,
                learning_rate: 0.1,
            }],
            seed: 5,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn ci_examples() {
        let ci = confidence_interval(&[0.0, 2.0], 0.95);
        assert_eq!(ci.mean, 1.0);
        // t(0.975, 1) = tan(0.475π).
        let t1 = (0.475 * std::f64::consts::PI).tan();
        assert!((ci.half_width - t1).abs() < 1e-6 * t1);
        let c = confidence_interval(&[0.3; 5], 0.95);
        assert_eq!(c.half_width, 0.0);
        let single = confidence_interval(&[0.4], 0.95);
        assert!(!single.defined && single.half_width == 0.0 && single.mean == 0.4);
    }

    #[test]
    fn histogram_counts_everything() {
        let l: Vec<f64> = (0..37).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let h = loss_histogram(&l, LOSS_BINS);
        assert_eq!(h.counts.iter().sum::<usize>(), 37);
        assert_eq!(h.counts.len(), 20);
        assert_eq!(loss_histogram(&[0.2; 4], 20).counts[0], 4);
    }

    #[test]
    fn capability_single_function_and_mixed_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_series(1, &mut rng);
        let r = learning_capability(&small_spec(), std::slice::from_ref(&f), &short_config(), 1).unwrap();
        assert_eq!(r.mu, r.losses[0]);
        assert!(!r.ci.defined);
        let g = random_series(2, &mut rng);
        assert_eq!(
            learning_capability(&small_spec(), &[f, g], &short_config(), 1),
            Err(Error::MixedDegrees(1, 2))
        );
    }

    #[test]
    fn capability_is_worker_count_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let fs: Vec<_> = (0..5).map(|_| random_series(1, &mut rng)).collect();
        let a = learning_capability(&small_spec(), &fs, &short_config(), 1).unwrap();
        let b = learning_capability(&small_spec(), &fs, &short_config(), 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.runs[3].seed, 5 + 3);
        let mean = a.losses.iter().sum::<f64>() / 5.0;
        assert_eq!(a.mu, mean);
        assert!(a.runs_csv().lines().count() == 6);
    }

    #[test]
    fn barren_probe_tiny_circuit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fs: Vec<_> = (0..10).map(|_| random_series(1, &mut rng)).collect();
        let r = barren_variance(&small_spec(), &fs, 5, 17, false, 2).unwrap();
        assert!(r.variance_of_gradient > 1e-3, "{}", r.variance_of_gradient);
        assert_eq!(r.sample_count, 50);
        assert_eq!(r.probe_param, 0);
        let again = barren_variance(&small_spec(), &fs, 5, 17, false, 1).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn coefficient_study_summary_shape() {
        let s = coefficient_study(&small_spec(), 1, 20, 3).unwrap();
        assert_eq!(s.summary.len(), 2);
        assert_eq!(s.samples.len(), 20);
        assert!(s.samples.iter().flatten().all(|c| c[0].hypot(c[1]) <= 1.0));
    }
}
