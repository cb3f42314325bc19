//! Dynamical Lie algebra of a circuit's generators over the Pauli-string basis.
//!
//! An [`AlgebraElement`] stores real coefficients `c_P` of the Hermitian
//! operator `Σ c_P P`; the corresponding anti-Hermitian algebra element is
//! `i Σ c_P P`. The bracket used is `-i[A, B]`, which stays Hermitian.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};

/// Largest register for which closures are computed.
pub const MAX_LIE_QUBITS: usize = 5;
const PIVOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn code(self) -> usize {
        self as usize
    }

    fn from_code(c: usize) -> Self {
        [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][c]
    }
}

/// Single-letter product `a·b = i^k · c`, returned as `(c, k)`.
fn letter_product(a: usize, b: usize) -> (usize, u8) {
    match (a, b) {
        (0, b) => (b, 0),
        (a, 0) => (a, 0),
        (a, b) if a == b => (0, 0),
        // Cyclic X→Y→Z gives +i, anti-cyclic gives -i.
        (a, b) => {
            let c = 6 - a - b;
            if (a % 3) + 1 == b {
                (c, 1)
            } else {
                (c, 3)
            }
        }
    }
}

/// Word over `{I, X, Y, Z}`; letter `q` acts on qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n],
        }
    }

    /// Identity except for the listed `(qubit, letter)` pairs.
    pub fn from_sparse(n: usize, entries: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(q, p) in entries {
            s.letters[q] = p;
        }
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Base-4 index with qubit 0 as the least significant digit.
    pub fn index(&self) -> usize {
        self.letters.iter().rev().fold(0, |acc, p| acc * 4 + p.code())
    }

    pub fn from_index(n: usize, mut idx: usize) -> Self {
        let letters = (0..n)
            .map(|_| {
                let p = Pauli::from_code(idx % 4);
                idx /= 4;
                p
            })
            .collect();
        Self { letters }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}

/// `P·Q = i^k R` on base-4 indices, returned as `(R, k mod 4)`.
fn product_index(n: usize, mut p: usize, mut q: usize) -> (usize, u8) {
    let (mut r, mut k, mut place) = (0usize, 0u8, 1usize);
    for _ in 0..n {
        let (c, phase) = letter_product(p % 4, q % 4);
        r += c * place;
        k = (k + phase) % 4;
        p /= 4;
        q /= 4;
        place *= 4;
    }
    (r, k)
}

/// `[P, Q] = i·coef·R` with `coef ∈ {0, ±2}`; `None` when they commute.
fn commutator_index(n: usize, p: usize, q: usize) -> Option<(usize, f64)> {
    let (r, k) = product_index(n, p, q);
    // Anticommuting strings multiply to ±i·R; commuting ones to ±R.
    match k {
        1 => Some((r, 2.0)),
        3 => Some((r, -2.0)),
        _ => None,
    }
}

/// Real combination of Pauli strings, read as the Hermitian operator `Σ c_P P`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    num_qubits: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl AlgebraElement {
    pub fn new(num_qubits: usize, terms: impl IntoIterator<Item = (PauliString, f64)>) -> Self {
        let mut e = Self {
            num_qubits,
            terms: BTreeMap::new(),
        };
        for (p, c) in terms {
            debug_assert_eq!(p.num_qubits(), num_qubits);
            *e.terms.entry(p).or_insert(0.0) += c;
        }
        e.terms.retain(|_, c| *c != 0.0);
        e
    }

    pub fn single(p: PauliString) -> Self {
        Self::new(p.num_qubits(), [(p, 1.0)])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &BTreeMap<PauliString, f64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; 1 << (2 * self.num_qubits)];
        for (p, c) in &self.terms {
            v[p.index()] = *c;
        }
        v
    }

    fn from_dense(n: usize, v: &[f64]) -> Self {
        Self::new(
            n,
            v.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, c)| (PauliString::from_index(n, i), *c)),
        )
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c:+}·{p}")?;
        }
        Ok(())
    }
}

/// `-i[P, Q]` as an element (zero when the strings commute).
pub fn pauli_commutator(p: &PauliString, q: &PauliString) -> AlgebraElement {
    let n = p.num_qubits();
    match commutator_index(n, p.index(), q.index()) {
        Some((r, coef)) => AlgebraElement::new(n, [(PauliString::from_index(n, r), coef)]),
        None => AlgebraElement::new(n, []),
    }
}

/// `-i[A, B]`.
pub fn bracket(a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
    let n = a.num_qubits;
    let mut acc = vec![0.0; 1 << (2 * n)];
    dense_bracket_into(n, &sparse(&a.to_dense()), &sparse(&b.to_dense()), &mut acc);
    AlgebraElement::from_dense(n, &acc)
}

fn sparse(v: &[f64]) -> Vec<(usize, f64)> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| (i, *c))
        .collect()
}

fn dense_bracket_into(n: usize, a: &[(usize, f64)], b: &[(usize, f64)], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for &(p, ca) in a {
        for &(q, cb) in b {
            if let Some((r, coef)) = commutator_index(n, p, q) {
                out[r] += ca * cb * coef;
            }
        }
    }
}

fn two_term(n: usize, c: usize, t: usize, u: Pauli) -> AlgebraElement {
    AlgebraElement::new(
        n,
        [
            (PauliString::from_sparse(n, &[(t, u)]), 1.0),
            (PauliString::from_sparse(n, &[(c, Pauli::Z), (t, u)]), -1.0),
        ],
    )
}

/// Generator elements of every gate in the circuit, duplicates removed.
pub fn generators_for(circuit: &Circuit) -> Vec<AlgebraElement> {
    let n = circuit.num_qubits();
    let one = |q: usize, p: Pauli| AlgebraElement::single(PauliString::from_sparse(n, &[(q, p)]));
    let pair = |a: usize, b: usize, p: Pauli| AlgebraElement::single(PauliString::from_sparse(n, &[(a, p), (b, p)]));
    let mut out: Vec<AlgebraElement> = Vec::new();
    for op in circuit.ops() {
        let q = op.qubits();
        let g = match op.kind() {
            GateKind::RX => one(q[0], Pauli::X),
            GateKind::RY => one(q[0], Pauli::Y),
            GateKind::RZ => one(q[0], Pauli::Z),
            GateKind::H => AlgebraElement::new(
                n,
                [
                    (PauliString::from_sparse(n, &[(q[0], Pauli::X)]), FRAC_1_SQRT_2),
                    (PauliString::from_sparse(n, &[(q[0], Pauli::Z)]), FRAC_1_SQRT_2),
                ],
            ),
            GateKind::CNOT | GateKind::CRX => two_term(n, q[0], q[1], Pauli::X),
            GateKind::CZ => two_term(n, q[0], q[1], Pauli::Z),
            GateKind::RXX => pair(q[0], q[1], Pauli::X),
            GateKind::RYY => pair(q[0], q[1], Pauli::Y),
            GateKind::RZZ => pair(q[0], q[1], Pauli::Z),
        };
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// Incrementally reduced row-echelon basis over dense Pauli coefficients.
struct EchelonBasis {
    rows: Vec<(Vec<f64>, usize)>,
}

impl EchelonBasis {
    /// Adds `v` if independent; returns the reduced, pivot-normalized row.
    fn insert(&mut self, mut v: Vec<f64>) -> Option<Vec<f64>> {
        for (row, pivot) in &self.rows {
            let f = v[*pivot];
            if f != 0.0 {
                v.iter_mut().zip(row).for_each(|(a, b)| *a -= f * b);
            }
        }
        let (pivot, &max) = v.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
        if max.abs() < PIVOT_TOLERANCE {
            return None;
        }
        v.iter_mut().for_each(|a| {
            *a /= max;
            if a.abs() < PIVOT_TOLERANCE * 1e-3 {
                *a = 0.0;
            }
        });
        self.rows.push((v.clone(), pivot));
        Some(v)
    }
}

/// Dimension of the real Lie algebra generated by `generators`, stopping early at `max_dim`.
pub fn lie_closure(generators: &[AlgebraElement], max_dim: usize) -> Result<usize> {
    let Some(first) = generators.first() else { return Ok(0) };
    let n = first.num_qubits();
    if n > MAX_LIE_QUBITS {
        return Err(Error::TooManyQubits {
            what: "Lie closure",
            max: MAX_LIE_QUBITS,
            got: n,
        });
    }
    if let Some(g) = generators.iter().find(|g| g.num_qubits() != n) {
        return Err(Error::InvalidSpec(format!(
            "generators mix {n} and {} qubits",
            g.num_qubits()
        )));
    }
    let limit = max_dim.min((1 << (2 * n)) - 1);
    let mut basis = EchelonBasis { rows: Vec::new() };
    let mut elems: Vec<Vec<(usize, f64)>> = Vec::new();
    for g in generators {
        if elems.len() >= limit {
            break;
        }
        if let Some(row) = basis.insert(g.to_dense()) {
            elems.push(sparse(&row));
        }
    }
    let mut scratch = vec![0.0; 1 << (2 * n)];
    let mut k = 0;
    while k < elems.len() && elems.len() < limit {
        for j in 0..k {
            dense_bracket_into(n, &elems[k], &elems[j], &mut scratch);
            if let Some(row) = basis.insert(scratch.clone()) {
                elems.push(sparse(&row));
                if elems.len() >= limit {
                    break;
                }
            }
        }
        k += 1;
    }
    Ok(elems.len())
}
