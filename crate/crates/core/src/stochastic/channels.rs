use num_complex::Complex64;

use crate::circuit::gates::kron;
use crate::circuit::kernel::{conj2, Mat2, Mat4};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Probability(p))
    }
}

/// Single-qubit channel in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<Mat2>,
}

impl KrausChannel {
    pub fn new(ops: Vec<Mat2>) -> Self {
        Self { ops }
    }

    pub fn identity() -> Self {
        Self::new(vec![[[re(1.0), ZERO], [ZERO, re(1.0)]]])
    }

    pub fn operators(&self) -> &[Mat2] {
        &self.ops
    }

    /// Max-abs deviation of `Σ K†K` from the identity.
    pub fn completeness_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for k in &self.ops {
                    acc += k[0][i].conj() * k[0][j] + k[1][i].conj() * k[1][j];
                }
                let expect = if i == j { re(1.0) } else { ZERO };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }

    /// Channel applying `self` first, then `after`.
    pub fn then(&self, after: &KrausChannel) -> KrausChannel {
        let mut ops = Vec::with_capacity(self.ops.len() * after.ops.len());
        for a in &after.ops {
            for b in &self.ops {
                ops.push(matmul2(a, b));
            }
        }
        ops.retain(|m| m.iter().flatten().any(|v| v.norm() > 0.0));
        if ops.is_empty() {
            ops.push([[ZERO; 2]; 2]);
        }
        KrausChannel::new(ops)
    }

    /// `ρ ↦ Σ K ρ K†` on a 2×2 matrix.
    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        let mut out = [[ZERO; 2]; 2];
        for k in &self.ops {
            let kr = matmul2(k, rho);
            for (i, row) in out.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v += kr[i][0] * k[j][0].conj() + kr[i][1] * k[j][1].conj();
                }
            }
        }
        out
    }

    /// `Σ K ⊗ conj(K)`, acting on the (row, column) bit pair of a vectorised density matrix.
    pub fn superoperator(&self) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for k in &self.ops {
            let s = kron(k, &conj2(k));
            for i in 0..4 {
                for j in 0..4 {
                    out[i][j] += s[i][j];
                }
            }
        }
        out
    }

    /// Average gate fidelity `(2 + Σ|tr K|²)/6` against the identity.
    pub fn average_fidelity(&self) -> f64 {
        let s: f64 = self.ops.iter().map(|k| (k[0][0] + k[1][1]).norm_sqr()).sum();
        (2.0 + s) / 6.0
    }
}

fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    check_probability(gamma)?;
    Ok(KrausChannel::new(vec![
        [[re(1.0), ZERO], [ZERO, re((1.0 - gamma).sqrt())]],
        [[ZERO, re(gamma.sqrt())], [ZERO, ZERO]],
    ]))
}

pub fn phase_damping(gamma: f64) -> Result<KrausChannel> {
    check_probability(gamma)?;
    Ok(KrausChannel::new(vec![
        [[re(1.0), ZERO], [ZERO, re((1.0 - gamma).sqrt())]],
        [[ZERO, ZERO], [ZERO, re(gamma.sqrt())]],
    ]))
}

fn check_times(t_ns: f64, t1_us: f64, t2_us: f64) -> Result<()> {
    if t_ns >= 0.0 && t1_us > 0.0 && t2_us > 0.0 {
        Ok(())
    } else {
        Err(Error::NoiseModel(format!(
            "invalid relaxation parameters t={t_ns} ns, T1={t1_us} us, T2={t2_us} us"
        )))
    }
}

/// `1 - e^{-t/T1}` with `t` in ns and `T1` in µs.
pub fn amplitude_damping_gamma(t_ns: f64, t1_us: f64) -> f64 {
    -(-t_ns * 1e-3 / t1_us).exp_m1()
}

/// Dephasing strength that, after amplitude damping, leaves coherences decayed by exactly `e^{-t/T2}`.
pub fn phase_damping_gamma(t_ns: f64, t1_us: f64, t2_us: f64) -> f64 {
    let t = t_ns * 1e-3;
    (-(t / t1_us - 2.0 * t / t2_us).exp_m1()).clamp(0.0, 1.0)
}

/// Phase damping applied after amplitude damping for a gate of duration `t_ns`.
pub fn thermal_relaxation(t_ns: f64, t1_us: f64, t2_us: f64) -> Result<KrausChannel> {
    check_times(t_ns, t1_us, t2_us)?;
    let ad = amplitude_damping(amplitude_damping_gamma(t_ns, t1_us))?;
    let pd = phase_damping(phase_damping_gamma(t_ns, t1_us, t2_us))?;
    Ok(ad.then(&pd))
}

/// `1/2 + e^{-t/T1}/6 + e^{-t/T2}/3`.
pub fn average_fidelity_tr(t_ns: f64, t1_us: f64, t2_us: f64) -> f64 {
    let t = t_ns * 1e-3;
    0.5 + (-t / t1_us).exp() / 6.0 + (-t / t2_us).exp() / 3.0
}

/// Weight of the fully mixing channel needed so that thermal relaxation plus
/// mixing has average fidelity `1 - gate_error` (single-qubit form).
pub fn depolarization_probability(fid_tr: f64, gate_error: f64) -> Result<f64> {
    check_probability(gate_error)?;
    if !(fid_tr > 0.5 && fid_tr <= 1.0) {
        return Err(Error::NoiseModel(format!("thermal fidelity {fid_tr} outside (1/2, 1]")));
    }
    if 1.0 - fid_tr >= gate_error {
        return Ok(0.0);
    }
    Ok(((fid_tr - (1.0 - gate_error)) / (fid_tr - 0.5)).min(1.0))
}

/// `(1-p)ρ + p/3 (XρX + YρY + ZρZ)`; `p = 3/4` is fully mixing.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    let a = re((1.0 - p).sqrt());
    let b = (p / 3.0).sqrt();
    let i = Complex64::i();
    Ok(KrausChannel::new(vec![
        [[a, ZERO], [ZERO, a]],
        [[ZERO, re(b)], [re(b), ZERO]],
        [[ZERO, -i * b], [i * b, ZERO]],
        [[re(b), ZERO], [ZERO, re(-b)]],
    ]))
}

pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    let a = re((1.0 - p).sqrt());
    let b = re(p.sqrt());
    Ok(KrausChannel::new(vec![[[a, ZERO], [ZERO, a]], [[ZERO, b], [b, ZERO]]]))
}
