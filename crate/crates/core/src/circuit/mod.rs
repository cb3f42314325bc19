//! Circuit representation and exact statevector simulation.

pub(crate) mod gates;
pub(crate) mod kernel;
mod state;

pub use gates::{gate_matrix, GateKind, GateMatrix};
pub use state::StateVector;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a gate's angle comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ParamBinding {
    Fixed(f64),
    Trainable(usize),
    /// The classical input `x` substituted at evaluation time.
    DataInput,
}

/// A single placed gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    kind: GateKind,
    qubits: [usize; 2],
    binding: Option<ParamBinding>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: &[usize], binding: Option<ParamBinding>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{kind} acts on {} qubit(s), got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidGate(format!("{kind} needs distinct qubits")));
        }
        if kind.is_parametrized() != binding.is_some() {
            return Err(Error::InvalidGate(format!(
                "{kind} {} a parameter binding",
                if kind.is_parametrized() {
                    "requires"
                } else {
                    "does not take"
                }
            )));
        }
        let mut q = [0; 2];
        q[..qubits.len()].copy_from_slice(qubits);
        Ok(Self {
            kind,
            qubits: q,
            binding,
        })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn binding(&self) -> Option<ParamBinding> {
        self.binding
    }

    pub fn trainable_index(&self) -> Option<usize> {
        match self.binding {
            Some(ParamBinding::Trainable(i)) => Some(i),
            _ => None,
        }
    }

    pub fn is_data_input(&self) -> bool {
        matches!(self.binding, Some(ParamBinding::DataInput))
    }

    /// Concrete angle for this op given trainable parameters and input.
    pub fn angle(&self, params: &[f64], x: f64) -> Result<Option<f64>> {
        Ok(match self.binding {
            None => None,
            Some(ParamBinding::Fixed(a)) => Some(a),
            Some(ParamBinding::DataInput) => Some(x),
            Some(ParamBinding::Trainable(i)) => Some(*params.get(i).ok_or(Error::Binding {
                index: i,
                available: params.len(),
            })?),
        })
    }

    pub fn matrix(&self, params: &[f64], x: f64) -> Result<GateMatrix> {
        gate_matrix(self.kind, self.angle(params, x)?)
    }

    /// Matrix of the inverse gate.
    pub fn inverse_matrix(&self, params: &[f64], x: f64) -> Result<GateMatrix> {
        // Every parametrized gate is exp(-iθ/2 G); the rest are self-inverse.
        gate_matrix(self.kind, self.angle(params, x)?.map(|a| -a))
    }
}

/// Ordered gate list over `num_qubits` wires with a designated measured qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
    num_params: usize,
    measured_qubit: usize,
}

impl Circuit {
    /// Empty circuit measuring the last wire.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > StateVector::MAX_QUBITS {
            return Err(Error::TooManyQubits {
                what: "statevector simulation",
                max: StateVector::MAX_QUBITS,
                got: num_qubits,
            });
        }
        Ok(Self {
            num_qubits,
            ops: Vec::new(),
            num_params: 0,
            measured_qubit: num_qubits - 1,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn measured_qubit(&self) -> usize {
        self.measured_qubit
    }

    pub fn set_measured_qubit(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        self.measured_qubit = q;
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        for &q in op.qubits() {
            self.check_qubit(q)?;
        }
        if let Some(i) = op.trainable_index() {
            self.num_params = self.num_params.max(i + 1);
        }
        self.ops.push(op);
        Ok(())
    }

    /// Append a gate bound to a fresh trainable parameter; returns its index.
    pub fn push_trainable(&mut self, kind: GateKind, qubits: &[usize]) -> Result<usize> {
        let index = self.num_params;
        self.push(GateOp::new(kind, qubits, Some(ParamBinding::Trainable(index)))?)?;
        Ok(index)
    }

    pub fn push_data(&mut self, kind: GateKind, qubit: usize) -> Result<()> {
        self.push(GateOp::new(kind, &[qubit], Some(ParamBinding::DataInput))?)
    }

    pub fn push_fixed(&mut self, kind: GateKind, qubits: &[usize]) -> Result<()> {
        self.push(GateOp::new(kind, qubits, None)?)
    }

    /// Checks that trainable indices are exactly `0..num_params`.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.num_params];
        for op in &self.ops {
            if let Some(i) = op.trainable_index() {
                seen[i] = true;
            }
        }
        match seen.iter().position(|s| !s) {
            Some(missing) => Err(Error::InvalidSpec(format!(
                "trainable indices not contiguous: index {missing} unused"
            ))),
            None => Ok(()),
        }
    }

    pub(crate) fn check_param_len(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::ParamCount {
                expected: self.num_params,
                got: params.len(),
            });
        }
        Ok(())
    }
}

/// Apply `op` to `state` in place.
pub fn apply_gate(state: &mut StateVector, op: &GateOp, params: &[f64], x: f64) -> Result<()> {
    for &q in op.qubits() {
        if q >= state.num_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: state.num_qubits(),
            });
        }
    }
    let m = op.matrix(params, x)?;
    state.apply_matrix(op.qubits(), &m);
    Ok(())
}

/// Evolve `|0…0⟩` through every op of the circuit.
pub fn run(circuit: &Circuit, params: &[f64], x: f64) -> Result<StateVector> {
    circuit.check_param_len(params)?;
    let mut state = StateVector::zero(circuit.num_qubits);
    for op in &circuit.ops {
        apply_gate(&mut state, op, params, x)?;
    }
    Ok(state)
}

/// `⟨σ_z⟩` of `qubit`.
pub fn expectation_z(state: &StateVector, qubit: usize) -> Result<f64> {
    state.expectation_z(qubit)
}

/// Model output `f(x) = ⟨0|U†(x,θ) Z_m U(x,θ)|0⟩`.
pub fn model_value(circuit: &Circuit, params: &[f64], x: f64) -> Result<f64> {
    run(circuit, params, x)?.expectation_z(circuit.measured_qubit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn assert_amps(state: &StateVector, expected: &[Complex64]) {
        for (i, (a, e)) in state.amplitudes().iter().zip(expected).enumerate() {
            assert!((a - e).norm() < 1e-12, "amp {i}: {a} vs {e}");
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cnot_truth_table_on_10() {
        // |10⟩ with qubit 0 = 1 (control) → index 1.
        let mut s = StateVector::basis(2, 0b01).unwrap();
        let op = GateOp::new(GateKind::CNOT, &[0, 1], None).unwrap();
        apply_gate(&mut s, &op, &[], 0.0).unwrap();
        assert_amps(&s, &[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
    }

    #[test]
    fn data_rx_pi_flips_with_phase() {
        let mut s = StateVector::zero(1);
        let op = GateOp::new(GateKind::RX, &[0], Some(ParamBinding::DataInput)).unwrap();
        apply_gate(&mut s, &op, &[], PI).unwrap();
        assert_amps(&s, &[c(0., 0.), c(0., -1.)]);
    }

    #[test]
    fn cz_on_bell_state() {
        let h = FRAC_1_SQRT_2;
        let mut s = StateVector::from_amplitudes(2, vec![c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)]).unwrap();
        let op = GateOp::new(GateKind::CZ, &[0, 1], None).unwrap();
        apply_gate(&mut s, &op, &[], 0.0).unwrap();
        assert_amps(&s, &[c(h, 0.), c(0., 0.), c(0., 0.), c(-h, 0.)]);
    }

    #[test]
    fn out_of_range_trainable_is_binding_error() {
        let mut s = StateVector::zero(1);
        let op = GateOp::new(GateKind::RY, &[0], Some(ParamBinding::Trainable(3))).unwrap();
        assert_eq!(
            apply_gate(&mut s, &op, &[0.1], 0.0),
            Err(Error::Binding { index: 3, available: 1 })
        );
    }

    #[test]
    fn run_examples() {
        let mut circ = Circuit::new(1).unwrap();
        circ.push_data(GateKind::RX, 0).unwrap();
        let s = run(&circ, &[], FRAC_PI_2).unwrap();
        assert_amps(&s, &[c(FRAC_PI_4.cos(), 0.), c(0., -FRAC_PI_4.sin())]);

        let empty = Circuit::new(3).unwrap();
        let s = run(&empty, &[], 1.0).unwrap();
        assert_eq!(s.amplitudes()[0], c(1., 0.));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));

        let mut ry = Circuit::new(1).unwrap();
        ry.push_trainable(GateKind::RY, &[0]).unwrap();
        let s = run(&ry, &[FRAC_PI_2], 0.0).unwrap();
        assert_amps(&s, &[c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.)]);
    }

    #[test]
    fn model_value_of_data_rx_is_cos() {
        let mut circ = Circuit::new(1).unwrap();
        circ.push_data(GateKind::RX, 0).unwrap();
        assert!((model_value(&circ, &[], 0.0).unwrap() - 1.0).abs() < 1e-15);
        for &x in &[0.3, 1.1, 2.5, -4.0] {
            assert!((model_value(&circ, &[], x).unwrap() - x.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn wsw_rx_is_shifted_cosine() {
        let mut circ = Circuit::new(1).unwrap();
        circ.push_trainable(GateKind::RX, &[0]).unwrap();
        circ.push_data(GateKind::RX, 0).unwrap();
        circ.push_trainable(GateKind::RX, &[0]).unwrap();
        let p = [0.4, 1.3];
        for &x in &[0.0, 0.9, 3.3] {
            let f = model_value(&circ, &p, x).unwrap();
            assert!((f - (x + p[0] + p[1]).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn op_validation() {
        assert!(GateOp::new(GateKind::CNOT, &[1, 1], None).is_err());
        assert!(GateOp::new(GateKind::RX, &[0, 1], Some(ParamBinding::DataInput)).is_err());
        assert!(GateOp::new(GateKind::H, &[0], Some(ParamBinding::Fixed(1.0))).is_err());
        let mut circ = Circuit::new(2).unwrap();
        assert!(circ.push_fixed(GateKind::CZ, &[0, 2]).is_err());
        assert!(circ.set_measured_qubit(2).is_err());
    }

    #[test]
    fn param_count_tracks_max_index() {
        let mut circ = Circuit::new(2).unwrap();
        circ.push(GateOp::new(GateKind::RY, &[0], Some(ParamBinding::Trainable(2))).unwrap())
            .unwrap();
        assert_eq!(circ.num_params(), 3);
        assert!(circ.validate().is_err());
        assert!(run(&circ, &[0.0; 2], 0.0).is_err());
    }
}
