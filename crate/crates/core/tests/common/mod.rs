#![allow(dead_code)]

use std::f64::consts::TAU;

use learncap::circuit::{Circuit, GateKind, GateOp, ParamBinding};
use rand::Rng;

/// Random circuit on `n` qubits touching every gate kind that fits, with
/// unique trainable indices, data inputs and fixed angles mixed in.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, num_ops: usize) -> Circuit {
    let mut c = Circuit::new(n).unwrap();
    let kinds: Vec<GateKind> = GateKind::ALL.into_iter().filter(|k| k.arity() <= n).collect();
    for i in 0..num_ops {
        // Walk the menu first so every kind appears, then pick at random.
        let kind = if i < kinds.len() {
            kinds[i]
        } else {
            kinds[rng.random_range(0..kinds.len())]
        };
        let a = rng.random_range(0..n);
        let qubits: Vec<usize> = if kind.arity() == 1 {
            vec![a]
        } else {
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            vec![a, b]
        };
        if !kind.is_parametrized() {
            c.push_fixed(kind, &qubits).unwrap();
            continue;
        }
        match rng.random_range(0..6) {
            0 if kind == GateKind::RX => c.push_data(kind, a).unwrap(),
            1 => c
                .push(GateOp::new(kind, &qubits, Some(ParamBinding::Fixed(rng.random_range(0.0..TAU)))).unwrap())
                .unwrap(),
            _ => {
                c.push_trainable(kind, &qubits).unwrap();
            }
        }
    }
    c.set_measured_qubit(rng.random_range(0..n)).unwrap();
    c
}

pub fn random_params<R: Rng>(rng: &mut R, c: &Circuit) -> Vec<f64> {
    (0..c.num_params()).map(|_| rng.random_range(0.0..TAU)).collect()
}

/// Central differences of `f` at `params`, step `h`.
pub fn finite_difference<F: Fn(&[f64]) -> f64>(f: F, params: &[f64], h: f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..params.len())
        .map(|k| {
            p[k] = params[k] + h;
            let plus = f(&p);
            p[k] = params[k] - h;
            let minus = f(&p);
            p[k] = params[k];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// `|a - b| <= rel·max(|a|, |b|) + floor`
pub fn close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + floor
}
