use num_complex::Complex64;

use super::gates::GateMatrix;
use super::kernel;
use crate::error::{Error, Result};

/// Dense pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub const MAX_QUBITS: usize = 16;

    /// `|0…0⟩`
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amps }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if index >= 1 << num_qubits {
            return Err(Error::InvalidGate(format!("basis index {index} out of range")));
        }
        let mut s = Self::zero(num_qubits);
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << num_qubits {
            return Err(Error::InvalidGate(format!(
                "{} amplitudes do not describe {num_qubits} qubits",
                amps.len()
            )));
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        let mask = 1usize << qubit;
        let value: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum();
        Ok(value.clamp(-1.0, 1.0))
    }

    /// Overwrite amplitudes with those of `other` (same width).
    pub(crate) fn copy_from(&mut self, other: &StateVector) {
        self.amps.copy_from_slice(&other.amps);
    }

    /// Apply `Z` on `qubit` in place.
    pub(crate) fn apply_z(&mut self, qubit: usize) {
        let mask = 1usize << qubit;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *a = -*a;
            }
        }
    }

    /// Apply a gate-sized matrix (unitary or not) to the listed qubits.
    pub(crate) fn apply_matrix(&mut self, qubits: &[usize], m: &GateMatrix) {
        match m {
            GateMatrix::Single(m) if kernel::is_diag2(m) => {
                kernel::apply_1q_diag(&mut self.amps, qubits[0], [m[0][0], m[1][1]])
            }
            GateMatrix::Single(m) => kernel::apply_1q(&mut self.amps, qubits[0], m),
            GateMatrix::Double(m) if kernel::is_diag4(m) => kernel::apply_2q_diag(
                &mut self.amps,
                qubits[0],
                qubits[1],
                [m[0][0], m[1][1], m[2][2], m[3][3]],
            ),
            GateMatrix::Double(m) => kernel::apply_2q(&mut self.amps, qubits[0], qubits[1], m),
        }
    }
}
