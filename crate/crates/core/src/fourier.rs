//! Truncated real Fourier series: random targets, normalization, coefficient
//! extraction from sampled values and cross-correlation statistics.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{model_value, Circuit};
use crate::error::{Error, Result};

/// Points used to locate the maximum of `|g|` before refinement.
pub const NORMALIZATION_GRID: usize = 1024;
/// Grid and lag count for cross-correlation.
pub const CORRELATION_GRID: usize = 100;

/// `g(x) = c0 + Σ_{ω=1}^{d} (c_ω e^{iωx} + conj(c_ω) e^{-iωx})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub c0: f64,
    pub coeffs: Vec<Complex64>,
}

impl FourierSeries {
    pub fn new(c0: f64, coeffs: Vec<Complex64>) -> Self {
        Self { c0, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of frequency `omega` (0 gives `c0`, beyond the degree gives 0).
    pub fn coefficient(&self, omega: usize) -> Complex64 {
        match omega {
            0 => Complex64::new(self.c0, 0.0),
            w => self.coeffs.get(w - 1).copied().unwrap_or_default(),
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.c0
            + self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let w = (i + 1) as f64 * x;
                    2.0 * (c.re * w.cos() - c.im * w.sin())
                })
                .sum::<f64>()
    }

    fn derivatives(&self, x: f64) -> (f64, f64) {
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let w = (i + 1) as f64;
            let (s, co) = (w * x).sin_cos();
            d1 += 2.0 * w * (-c.re * s - c.im * co);
            d2 += 2.0 * w * w * (-c.re * co + c.im * s);
        }
        (d1, d2)
    }

    /// Largest `|g(x)|` on the normalization grid, refined by Newton steps.
    pub fn max_abs(&self) -> f64 {
        let (mut best_x, mut best) = (0.0, f64::NEG_INFINITY);
        for j in 0..NORMALIZATION_GRID {
            let x = TAU * j as f64 / NORMALIZATION_GRID as f64;
            let v = self.evaluate(x).abs();
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let mut x = best_x;
        for _ in 0..4 {
            let (d1, d2) = self.derivatives(x);
            if d2 == 0.0 {
                break;
            }
            let next = x - d1 / d2;
            let v = self.evaluate(next).abs();
            if v.is_nan() || v <= best {
                break;
            }
            best = v;
            x = next;
        }
        best
    }

    /// Rescale every coefficient so that `max |g| = 1`; the zero series is left alone.
    pub fn normalize(&mut self) {
        let m = self.max_abs();
        if m > 0.0 {
            self.scale(1.0 / m);
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.c0 *= s;
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    /// Values on `x_j = 2πj/n`, `j = 0..n`.
    pub fn sample_grid(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.evaluate(TAU * j as f64 / n as f64)).collect()
    }
}

/// Random normalized series of degree `d`: `Re`, `Im` and `c0` uniform in (-0.5, 0.5).
pub fn random_series<R: Rng + ?Sized>(d: usize, rng: &mut R) -> FourierSeries {
    let c0 = rng.random_range(-0.5..0.5);
    let coeffs = (0..d)
        .map(|_| Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)))
        .collect();
    let mut s = FourierSeries::new(c0, coeffs);
    s.normalize();
    s
}

/// `c_ω = (1/N) Σ_j v_j e^{-iωx_j}` for `ω = 0..=d` from values on the `2πj/N` grid.
pub fn extract_coefficients(values: &[f64], d: usize) -> Result<Vec<Complex64>> {
    let n = values.len();
    if n < 2 * d + 1 {
        return Err(Error::TooFewSamples {
            needed: 2 * d + 1,
            got: n,
            degree: d,
        });
    }
    Ok((0..=d)
        .map(|w| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    // Reduce ω·j mod N first so the phase stays exact for large grids.
                    let k = (w * j) % n;
                    v * Complex64::from_polar(1.0, -TAU * k as f64 / n as f64)
                })
                .sum();
            sum / n as f64
        })
        .collect())
}

/// Coefficients `c_0..c_d` of the circuit model for `num_samples` random parameter draws.
pub fn sample_circuit_coefficients<R: Rng + ?Sized>(
    circuit: &Circuit,
    d: usize,
    num_samples: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Complex64>>> {
    let n = 2 * d + 1;
    let xs: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let mut out = Vec::with_capacity(num_samples);
    for _ in 0..num_samples {
        let params: Vec<f64> = (0..circuit.num_params()).map(|_| rng.random_range(0.0..TAU)).collect();
        let values = xs
            .iter()
            .map(|&x| model_value(circuit, &params, x))
            .collect::<Result<Vec<_>>>()?;
        out.push(extract_coefficients(&values, d)?);
    }
    Ok(out)
}

fn correlation_at_lags(f: &[f64], g: &[f64]) -> Vec<f64> {
    let n = f.len();
    (0..n).map(|k| (0..n).map(|j| f[j] * g[(j + k) % n]).sum()).collect()
}

/// Maximum over grid lags of the normalized absolute cross-correlation, in `[0, 1]`.
pub fn cross_correlation_max(f: &FourierSeries, g: &FourierSeries) -> f64 {
    let fv = f.sample_grid(CORRELATION_GRID);
    let gv = g.sample_grid(CORRELATION_GRID);
    let ff: f64 = fv.iter().map(|v| v * v).sum();
    let gg: f64 = gv.iter().map(|v| v * v).sum();
    let norm = (ff * gg).sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    correlation_at_lags(&fv, &gv)
        .into_iter()
        .map(|c| (c / norm).abs())
        .fold(0.0, f64::max)
        .min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCorrelationReport {
    /// Row `i` holds the values for pairs `(i, j)`, `j > i`.
    pub upper_triangle: Vec<Vec<f64>>,
    /// Ten bins `[0, 0.1), …, [0.9, 1.0]`.
    pub histogram: [usize; 10],
}

pub fn cross_correlation_report(set: &[FourierSeries]) -> CrossCorrelationReport {
    let mut histogram = [0usize; 10];
    let upper_triangle = (0..set.len())
        .map(|i| {
            ((i + 1)..set.len())
                .map(|j| {
                    let c = cross_correlation_max(&set[i], &set[j]);
                    histogram[((c * 10.0) as usize).min(9)] += 1;
                    c
                })
                .collect()
        })
        .collect();
    CrossCorrelationReport {
        upper_triangle,
        histogram,
    }
}

/// One line per series: degree, then `(Re, Im)` for `c0..c_d`.
pub fn write_series_set(set: &[FourierSeries]) -> String {
    let mut out = String::new();
    for s in set {
        write!(out, "{}", s.degree()).unwrap();
        for w in 0..=s.degree() {
            let c = s.coefficient(w);
            write!(out, " {:.16e} {:.16e}", c.re, c.im).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_series_set(text: &str) -> Result<Vec<FourierSeries>> {
    let mut set = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        let mut fields = line.split_whitespace();
        let degree: usize = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| err(format!("bad degree: {e}")))?;
        let nums = fields
            .map(|f| f.parse::<f64>().map_err(|e| err(format!("bad number `{f}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if nums.len() != 2 * (degree + 1) {
            return Err(err(format!(
                "degree {degree} needs {} numbers, found {}",
                2 * (degree + 1),
                nums.len()
            )));
        }
        if nums[1] != 0.0 {
            return Err(err("constant term must be real".into()));
        }
        let coeffs = nums[2..].chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
        set.push(FourierSeries::new(nums[0], coeffs));
    }
    Ok(set)
}
