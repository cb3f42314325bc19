//! Analytic gradients of the model output and of MSE losses.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use num_complex::Complex64;

use crate::circuit::{model_value, run, Circuit, GateKind, GateOp, StateVector};
use crate::error::{Error, Result};

/// `(-i/2) G |ψ⟩` for the generator `G` of a parametrized op.
pub fn generator_action(op: &GateOp, state: &StateVector) -> Option<StateVector> {
    let g = op.kind().generator()?;
    let mut out = state.clone();
    out.apply_matrix(op.qubits(), &g.scaled(Complex64::new(0.0, -0.5)));
    Some(out)
}

/// Model value and `∂f/∂θ` in one forward and one reverse sweep.
pub fn adjoint_gradient(circuit: &Circuit, params: &[f64], x: f64) -> Result<(f64, Vec<f64>)> {
    let mut psi = run(circuit, params, x)?;
    let m = circuit.measured_qubit();
    let value = psi.expectation_z(m)?;
    let mut grad = vec![0.0; circuit.num_params()];
    if grad.is_empty() {
        return Ok((value, grad));
    }

    let mut lambda = psi.clone();
    lambda.apply_z(m);
    let mut scratch = psi.clone();
    let half_i = Complex64::new(0.0, -0.5);

    for op in circuit.ops().iter().rev() {
        if let Some(k) = op.trainable_index() {
            let g = op.kind().generator().expect("trainable ops are parametrized");
            scratch.copy_from(&psi);
            scratch.apply_matrix(op.qubits(), &g.scaled(half_i));
            grad[k] += 2.0 * lambda.inner(&scratch).re;
        }
        let inv = op.inverse_matrix(params, x)?;
        psi.apply_matrix(op.qubits(), &inv);
        lambda.apply_matrix(op.qubits(), &inv);
    }
    Ok((value, grad))
}

// Four-term rule for generators with spectrum {0, ±1/2} on the half-angle scale.
const CRX_C1: f64 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
const CRX_C2: f64 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);

/// Shift-rule gradient, evaluating the model through `eval` at shifted parameters.
///
/// Assumes every trainable index drives exactly one gate.
pub fn parameter_shift_gradient<F>(circuit: &Circuit, params: &[f64], mut eval: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    circuit.check_param_len(params)?;
    let mut grad = vec![0.0; params.len()];
    let mut shifted = params.to_vec();
    let mut at = |k: usize, delta: f64, shifted: &mut Vec<f64>| -> Result<f64> {
        shifted[k] = params[k] + delta;
        let v = eval(shifted);
        shifted[k] = params[k];
        v
    };
    for op in circuit.ops() {
        let Some(k) = op.trainable_index() else { continue };
        let plus = at(k, FRAC_PI_2, &mut shifted)?;
        let minus = at(k, -FRAC_PI_2, &mut shifted)?;
        grad[k] = if op.kind() == GateKind::CRX {
            let plus3 = at(k, 3.0 * FRAC_PI_2, &mut shifted)?;
            let minus3 = at(k, -3.0 * FRAC_PI_2, &mut shifted)?;
            CRX_C1 * (plus - minus) - CRX_C2 * (plus3 - minus3)
        } else {
            0.5 * (plus - minus)
        };
    }
    Ok(grad)
}

/// Shift-rule gradient with the exact statevector model as evaluator.
pub fn parameter_shift_analytic(circuit: &Circuit, params: &[f64], x: f64) -> Result<Vec<f64>> {
    parameter_shift_gradient(circuit, params, |p| model_value(circuit, p, x))
}

pub(crate) fn check_dataset(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

/// Mean squared error over `(xs, ys)` and its gradient, via the adjoint sweep.
pub fn dataset_loss_and_gradient(circuit: &Circuit, params: &[f64], xs: &[f64], ys: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dataset(xs, ys)?;
    let n = xs.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; circuit.num_params()];
    for (&x, &y) in xs.iter().zip(ys) {
        let (f, g) = adjoint_gradient(circuit, params, x)?;
        let r = f - y;
        loss += r * r;
        for (acc, gi) in grad.iter_mut().zip(g) {
            *acc += 2.0 * r * gi;
        }
    }
    grad.iter_mut().for_each(|g| *g /= n);
    Ok((loss / n, grad))
}

/// Mean squared error of the model on `(xs, ys)`.
pub fn dataset_loss(circuit: &Circuit, params: &[f64], xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_dataset(xs, ys)?;
    let mut loss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = model_value(circuit, params, x)? - y;
        loss += r * r;
    }
    Ok(loss / xs.len() as f64)
}
