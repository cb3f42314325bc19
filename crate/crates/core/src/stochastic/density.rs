use num_complex::Complex64;

use super::calibration::NoiseModel;
use super::channels::{
    average_fidelity_tr, bit_flip, depolarization_probability, depolarizing, thermal_relaxation, KrausChannel,
};
use crate::circuit::kernel::{conj2, conj4, Mat4};
use crate::circuit::{Circuit, GateMatrix, StateVector};
use crate::error::{Error, Result};

/// Density matrix stored column-major as a vector over `2n` bits: entry
/// `(r, c)` sits at `r + c·2ⁿ`, so row bits are `0..n` and column bits `n..2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    vec: StateVector,
}

impl DensityMatrix {
    pub const MAX_QUBITS: usize = 8;

    /// `|0…0⟩⟨0…0|`
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > Self::MAX_QUBITS {
            return Err(Error::TooManyQubits {
                what: "density-matrix simulation",
                max: Self::MAX_QUBITS,
                got: num_qubits,
            });
        }
        Ok(Self {
            num_qubits,
            vec: StateVector::zero(2 * num_qubits),
        })
    }

    /// `|ψ⟩⟨ψ|`
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        let mut rho = Self::zero(state.num_qubits())?;
        let a = state.amplitudes();
        let dim = a.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for c in 0..dim {
            for r in 0..dim {
                entries[r + c * dim] = a[r] * a[c].conj();
            }
        }
        rho.vec = StateVector::from_amplitudes(2 * state.num_qubits(), entries)?;
        Ok(rho)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.vec.amplitudes()[r + c * self.dim()]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Max-abs deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `ρ ↦ UρU†` for a 1- or 2-qubit unitary.
    pub fn apply_unitary(&mut self, qubits: &[usize], m: &GateMatrix) {
        let n = self.num_qubits;
        self.vec.apply_matrix(qubits, m);
        let shifted: Vec<usize> = qubits.iter().map(|q| q + n).collect();
        let conj = match m {
            GateMatrix::Single(u) => GateMatrix::Single(conj2(u)),
            GateMatrix::Double(u) => GateMatrix::Double(conj4(u)),
        };
        self.vec.apply_matrix(&shifted, &conj);
    }

    /// Apply a single-qubit superoperator (see [`KrausChannel::superoperator`]).
    pub fn apply_superoperator(&mut self, qubit: usize, s: &Mat4) {
        self.vec
            .apply_matrix(&[qubit, qubit + self.num_qubits], &GateMatrix::Double(*s));
    }

    pub fn apply_channel(&mut self, qubit: usize, ch: &KrausChannel) {
        self.apply_superoperator(qubit, &ch.superoperator());
    }

    /// `tr(ρ Z_q)`, clamped to `[-1, 1]`.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        let mask = 1usize << qubit;
        let v: f64 = (0..self.dim())
            .map(|i| {
                let p = self.get(i, i).re;
                if i & mask == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum();
        Ok(v.clamp(-1.0, 1.0))
    }

    fn debug_check(&self) {
        if cfg!(debug_assertions) && self.num_qubits <= 4 {
            let t = self.trace();
            debug_assert!((t - 1.0).norm() < 1e-9, "trace drifted to {t}");
            debug_assert!(self.hermiticity_error() < 1e-9, "lost Hermiticity");
        }
    }
}

/// Circuit compiled against a noise model: every op carries the superoperators
/// of its per-qubit error channels.
#[derive(Debug, Clone)]
pub struct NoisyCircuit<'a> {
    circuit: &'a Circuit,
    /// Per op: `(logical qubit, superoperator)` applied after the gate.
    noise: Vec<Vec<(usize, Mat4)>>,
    readout: Mat4,
}

fn gate_noise(t_ns: f64, t1: f64, t2: f64, error: f64) -> Result<KrausChannel> {
    let tr = thermal_relaxation(t_ns, t1, t2)?;
    let p_mix = depolarization_probability(average_fidelity_tr(t_ns, t1, t2), error)?;
    // Pauli-form weight equivalent to mixing with probability p_mix.
    Ok(tr.then(&depolarizing(0.75 * p_mix)?))
}

impl<'a> NoisyCircuit<'a> {
    pub fn new(circuit: &'a Circuit, noise: &NoiseModel, mapping: &[usize]) -> Result<Self> {
        let n = circuit.num_qubits();
        if n > DensityMatrix::MAX_QUBITS {
            return Err(Error::TooManyQubits {
                what: "density-matrix simulation",
                max: DensityMatrix::MAX_QUBITS,
                got: n,
            });
        }
        if mapping.len() != n {
            return Err(Error::NoiseModel(format!(
                "mapping lists {} physical qubits for a {n}-qubit circuit",
                mapping.len()
            )));
        }
        for (i, p) in mapping.iter().enumerate() {
            if noise.qubit(*p).is_none() {
                return Err(Error::NoiseModel(format!("physical qubit {p} has no calibration")));
            }
            if mapping[..i].contains(p) {
                return Err(Error::NoiseModel(format!("physical qubit {p} mapped twice")));
            }
        }
        let cal = |q: usize| *noise.qubit(mapping[q]).expect("checked above");

        let mut per_op = Vec::with_capacity(circuit.ops().len());
        for op in circuit.ops() {
            let qs = op.qubits();
            let mut chans = Vec::with_capacity(qs.len());
            if let [q] = *qs {
                let c = cal(q);
                let ch = gate_noise(c.gate_time_ns, c.t1_us, c.t2_us, c.gate_error)?;
                chans.push((q, ch.superoperator()));
            } else {
                let coupling = noise.coupling(mapping[qs[0]], mapping[qs[1]]);
                for &q in qs {
                    let c = cal(q);
                    let ch = gate_noise(coupling.gate_time_ns, c.t1_us, c.t2_us, coupling.gate_error / 2.0)?;
                    chans.push((q, ch.superoperator()));
                }
            }
            per_op.push(chans);
        }
        let readout = bit_flip(cal(circuit.measured_qubit()).readout_error)?.superoperator();
        Ok(Self {
            circuit,
            noise: per_op,
            readout,
        })
    }

    /// Final density matrix before readout.
    pub fn evolve(&self, params: &[f64], x: f64) -> Result<DensityMatrix> {
        self.circuit.check_param_len(params)?;
        let mut rho = DensityMatrix::zero(self.circuit.num_qubits())?;
        for (op, chans) in self.circuit.ops().iter().zip(&self.noise) {
            rho.apply_unitary(op.qubits(), &op.matrix(params, x)?);
            for (q, s) in chans {
                if !is_identity(s) {
                    rho.apply_superoperator(*q, s);
                }
            }
            rho.debug_check();
        }
        Ok(rho)
    }

    /// Noisy `⟨Z⟩` on the measured qubit, readout error included.
    pub fn expectation(&self, params: &[f64], x: f64) -> Result<f64> {
        let mut rho = self.evolve(params, x)?;
        let m = self.circuit.measured_qubit();
        rho.apply_superoperator(m, &self.readout);
        rho.expectation_z(m)
    }
}

fn is_identity(s: &Mat4) -> bool {
    (0..4).all(|r| {
        (0..4).all(|c| {
            s[r][c]
                == if r == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
        })
    })
}

/// One noisy evaluation; compile a [`NoisyCircuit`] instead when evaluating repeatedly.
pub fn run_noisy(circuit: &Circuit, params: &[f64], x: f64, noise: &NoiseModel, mapping: &[usize]) -> Result<f64> {
    NoisyCircuit::new(circuit, noise, mapping)?.expectation(params, x)
}
