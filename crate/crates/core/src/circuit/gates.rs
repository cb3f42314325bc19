use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::{Mat2, Mat4};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Gate menu. Rotations follow `R_P(θ) = exp(-i θ/2 P)`; two-qubit rotations
/// `R_PP(θ) = exp(-i θ/2 P⊗P)`; `CRX(θ)` is `diag(I, RX(θ))` with the control first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    RX,
    RY,
    RZ,
    H,
    CZ,
    CNOT,
    CRX,
    RXX,
    RYY,
    RZZ,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::H,
        GateKind::CZ,
        GateKind::CNOT,
        GateKind::CRX,
        GateKind::RXX,
        GateKind::RYY,
        GateKind::RZZ,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::H => 1,
            _ => 2,
        }
    }

    pub fn is_parametrized(self) -> bool {
        !matches!(self, GateKind::H | GateKind::CZ | GateKind::CNOT)
    }

    /// Generator `G` such that the gate is `exp(-i θ/2 G)`.
    pub fn generator(self) -> Option<GateMatrix> {
        let x = [[ZERO, ONE], [ONE, ZERO]];
        let y = [[ZERO, -Complex64::i()], [Complex64::i(), ZERO]];
        let z = [[ONE, ZERO], [ZERO, -ONE]];
        let m = match self {
            GateKind::RX => GateMatrix::Single(x),
            GateKind::RY => GateMatrix::Single(y),
            GateKind::RZ => GateMatrix::Single(z),
            GateKind::RXX => GateMatrix::Double(kron(&x, &x)),
            GateKind::RYY => GateMatrix::Double(kron(&y, &y)),
            GateKind::RZZ => GateMatrix::Double(kron(&z, &z)),
            GateKind::CRX => {
                let proj1 = [[ZERO, ZERO], [ZERO, ONE]];
                GateMatrix::Double(kron(&proj1, &x))
            }
            GateKind::H | GateKind::CZ | GateKind::CNOT => return None,
        };
        Some(m)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Dense unitary of a 1- or 2-qubit gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    Single(Mat2),
    Double(Mat4),
}

impl GateMatrix {
    pub fn dim(&self) -> usize {
        match self {
            GateMatrix::Single(_) => 2,
            GateMatrix::Double(_) => 4,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        match self {
            GateMatrix::Single(m) => m[r][c],
            GateMatrix::Double(m) => m[r][c],
        }
    }

    pub fn scaled(&self, s: Complex64) -> GateMatrix {
        match self {
            GateMatrix::Single(m) => GateMatrix::Single(m.map(|row| row.map(|v| v * s))),
            GateMatrix::Double(m) => GateMatrix::Double(m.map(|row| row.map(|v| v * s))),
        }
    }

    /// Max-abs deviation of `M†M` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let expect = if i == j { ONE } else { ZERO };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }
}

pub(crate) fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i >> 1][j >> 1] * b[i & 1][j & 1];
        }
    }
    out
}

/// Unitary for `kind`; `angle` must be present exactly when the gate is parametrized.
pub fn gate_matrix(kind: GateKind, angle: Option<f64>) -> Result<GateMatrix> {
    let theta = match (kind.is_parametrized(), angle) {
        (true, Some(t)) => t,
        (false, None) => 0.0,
        (true, None) => {
            return Err(Error::InvalidGate(format!("{kind} requires an angle")));
        }
        (false, Some(_)) => {
            return Err(Error::InvalidGate(format!("{kind} takes no angle")));
        }
    };
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let s = (theta / 2.0).sin();
    let mis = Complex64::new(0.0, -s);
    let em = Complex64::from_polar(1.0, -theta / 2.0);
    let ep = Complex64::from_polar(1.0, theta / 2.0);
    let m = match kind {
        GateKind::RX => GateMatrix::Single([[c, mis], [mis, c]]),
        GateKind::RY => GateMatrix::Single([[c, Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), c]]),
        GateKind::RZ => GateMatrix::Single([[em, ZERO], [ZERO, ep]]),
        GateKind::H => {
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            GateMatrix::Single([[h, h], [h, -h]])
        }
        GateKind::CZ => GateMatrix::Double(diag4([ONE, ONE, ONE, -ONE])),
        GateKind::CNOT => GateMatrix::Double([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
        ]),
        GateKind::CRX => GateMatrix::Double([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, c, mis],
            [ZERO, ZERO, mis, c],
        ]),
        GateKind::RXX => GateMatrix::Double([
            [c, ZERO, ZERO, mis],
            [ZERO, c, mis, ZERO],
            [ZERO, mis, c, ZERO],
            [mis, ZERO, ZERO, c],
        ]),
        GateKind::RYY => {
            let pis = Complex64::new(0.0, s);
            GateMatrix::Double([
                [c, ZERO, ZERO, pis],
                [ZERO, c, mis, ZERO],
                [ZERO, mis, c, ZERO],
                [pis, ZERO, ZERO, c],
            ])
        }
        GateKind::RZZ => GateMatrix::Double(diag4([em, ep, ep, em])),
    };
    Ok(m)
}

fn diag4(d: [Complex64; 4]) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, v) in d.into_iter().enumerate() {
        m[i][i] = v;
    }
    m
}
