//! Builders for the layered and dissipative-QNN circuit families, plus
//! resource counting.
//!
//! Layered circuits have the shape `W_L S(x) … W_1 S(x) [W_0]` where `S(x)`
//! applies `RX(x)` to every wire. Each trainable block `W` is split into
//! entanglement sub-blocks: single-qubit rotations on every wire followed by
//! two-qubit gates placed according to the entanglement structure and style.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};

/// Single-qubit trainable unitary, listed in circuit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SingleQubitUnitary {
    RY,
    RYRZ,
    RYRZRY,
}

impl SingleQubitUnitary {
    pub fn gates(self) -> &'static [GateKind] {
        match self {
            SingleQubitUnitary::RY => &[GateKind::RY],
            SingleQubitUnitary::RYRZ => &[GateKind::RY, GateKind::RZ],
            SingleQubitUnitary::RYRZRY => &[GateKind::RY, GateKind::RZ, GateKind::RY],
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        self.gates().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntanglementGate {
    CZ,
    CNOT,
    CRX,
    /// `RXX(θ₀) RYY(θ₁) RZZ(θ₂)`, emitted as three two-qubit rotations.
    CAN,
}

impl EntanglementGate {
    pub fn params_per_placement(self) -> usize {
        match self {
            EntanglementGate::CZ | EntanglementGate::CNOT => 0,
            EntanglementGate::CRX => 1,
            EntanglementGate::CAN => 3,
        }
    }

    pub fn ops_per_placement(self) -> usize {
        if self == EntanglementGate::CAN {
            3
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntanglementStyle {
    #[default]
    Linear,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntanglementStructure {
    #[default]
    Simple,
    Strong,
    Alternating,
    /// Accepted by the parser so it can be rejected with a dedicated error;
    /// the builder does not implement it.
    StrongC14,
}

fn default_one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredSpec {
    pub num_qubits: usize,
    pub num_layers: usize,
    /// `WSW` when true, `SW` otherwise.
    pub zero_layer: bool,
    pub u1: SingleQubitUnitary,
    pub ent_gate: EntanglementGate,
    #[serde(default = "default_one")]
    pub ent_layers: usize,
    #[serde(default)]
    pub ent_style: EntanglementStyle,
    #[serde(default)]
    pub ent_structure: EntanglementStructure,
}

impl LayeredSpec {
    /// Simple, linear entanglement with a zero layer.
    pub fn new(
        num_qubits: usize,
        num_layers: usize,
        u1: SingleQubitUnitary,
        ent_gate: EntanglementGate,
        ent_layers: usize,
    ) -> Self {
        Self {
            num_qubits,
            num_layers,
            zero_layer: true,
            u1,
            ent_gate,
            ent_layers,
            ent_style: EntanglementStyle::Linear,
            ent_structure: EntanglementStructure::Simple,
        }
    }

    pub fn with_zero_layer(mut self, zero_layer: bool) -> Self {
        self.zero_layer = zero_layer;
        self
    }

    pub fn with_style(mut self, style: EntanglementStyle) -> Self {
        self.ent_style = style;
        self
    }

    pub fn with_structure(mut self, structure: EntanglementStructure) -> Self {
        self.ent_structure = structure;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 || self.num_layers == 0 || self.ent_layers == 0 {
            return Err(Error::InvalidSpec(
                "num_qubits, num_layers and ent_layers must all be at least 1".into(),
            ));
        }
        if self.ent_structure == EntanglementStructure::StrongC14 {
            return Err(Error::UnsupportedStructure("strongc14".into()));
        }
        Ok(())
    }

    /// Control/target pairs of entanglement sub-block `block` (1-based).
    pub fn entangling_pairs(&self, block: usize) -> Vec<(usize, usize)> {
        let n = self.num_qubits;
        if n < 2 {
            return Vec::new();
        }
        let cyclic = self.ent_style == EntanglementStyle::Cyclic;
        match self.ent_structure {
            EntanglementStructure::Simple | EntanglementStructure::StrongC14 => ranged_pairs(n, 1, cyclic),
            EntanglementStructure::Strong => {
                // Ranges beyond n-1 wrap back to 1.
                let range = (block - 1) % (n - 1) + 1;
                ranged_pairs(n, range, cyclic)
            }
            EntanglementStructure::Alternating => {
                let start = if block % 2 == 1 { 0 } else { 1 };
                let mut pairs: Vec<_> = (start..n - 1).step_by(2).map(|q| (q, q + 1)).collect();
                // The wrap pair only fits the odd-start pattern on an even ring.
                if cyclic && n >= 3 && n.is_multiple_of(2) && start == 1 {
                    pairs.push((n - 1, 0));
                }
                pairs
            }
        }
    }
}

fn ranged_pairs(n: usize, range: usize, cyclic: bool) -> Vec<(usize, usize)> {
    if cyclic && n > 2 {
        (0..n).map(|q| (q, (q + range) % n)).collect()
    } else {
        (0..n).filter(|q| q + range < n).map(|q| (q, q + range)).collect()
    }
}

impl fmt::Display for LayeredSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "layered(n={}, L={}, {}, {:?}, {:?}, el={}, {:?}, {:?})",
            self.num_qubits,
            self.num_layers,
            if self.zero_layer { "WSW" } else { "SW" },
            self.u1,
            self.ent_gate,
            self.ent_layers,
            self.ent_style,
            self.ent_structure
        )
    }
}

/// Dissipative QNN with widths `[i, h₁, …, h_H, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DqnnSpec {
    pub widths: Vec<usize>,
    pub data_reupload: bool,
    pub zero_layer: bool,
    pub u1: SingleQubitUnitary,
}

impl DqnnSpec {
    fn validate(&self) -> Result<()> {
        if self.widths.len() < 2 {
            return Err(Error::InvalidSpec(
                "dQNN needs at least an input and an output layer".into(),
            ));
        }
        if self.widths.contains(&0) {
            return Err(Error::InvalidSpec("dQNN layer widths must be at least 1".into()));
        }
        if *self.widths.last().unwrap() != 1 {
            return Err(Error::InvalidSpec(
                "dQNN output layer must have exactly one qubit".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for DqnnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dqnn({:?}, {:?}, reupload={}, zl={})",
            self.widths, self.u1, self.data_reupload, self.zero_layer
        )
    }
}

/// Either ansatz family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum AnsatzSpec {
    Layered(LayeredSpec),
    Dqnn(DqnnSpec),
}

impl AnsatzSpec {
    pub fn build(&self) -> Result<Circuit> {
        match self {
            AnsatzSpec::Layered(s) => build_layered(s),
            AnsatzSpec::Dqnn(s) => build_dqnn(s),
        }
    }
}

impl fmt::Display for AnsatzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnsatzSpec::Layered(s) => s.fmt(f),
            AnsatzSpec::Dqnn(s) => s.fmt(f),
        }
    }
}

impl From<LayeredSpec> for AnsatzSpec {
    fn from(s: LayeredSpec) -> Self {
        AnsatzSpec::Layered(s)
    }
}

impl From<DqnnSpec> for AnsatzSpec {
    fn from(s: DqnnSpec) -> Self {
        AnsatzSpec::Dqnn(s)
    }
}

fn push_u1(circuit: &mut Circuit, u1: SingleQubitUnitary, qubit: usize) -> Result<()> {
    for &g in u1.gates() {
        circuit.push_trainable(g, &[qubit])?;
    }
    Ok(())
}

fn push_entangler(circuit: &mut Circuit, gate: EntanglementGate, control: usize, target: usize) -> Result<()> {
    let q = [control, target];
    match gate {
        EntanglementGate::CZ => circuit.push_fixed(GateKind::CZ, &q),
        EntanglementGate::CNOT => circuit.push_fixed(GateKind::CNOT, &q),
        EntanglementGate::CRX => circuit.push_trainable(GateKind::CRX, &q).map(drop),
        EntanglementGate::CAN => {
            for kind in [GateKind::RXX, GateKind::RYY, GateKind::RZZ] {
                circuit.push_trainable(kind, &q)?;
            }
            Ok(())
        }
    }
}

fn push_trainable_block(circuit: &mut Circuit, spec: &LayeredSpec) -> Result<()> {
    for block in 1..=spec.ent_layers {
        for q in 0..spec.num_qubits {
            push_u1(circuit, spec.u1, q)?;
        }
        for (c, t) in spec.entangling_pairs(block) {
            push_entangler(circuit, spec.ent_gate, c, t)?;
        }
    }
    Ok(())
}

/// Layered `W_L S … W_1 S [W_0]` circuit measured on the last wire.
pub fn build_layered(spec: &LayeredSpec) -> Result<Circuit> {
    spec.validate()?;
    let mut circuit = Circuit::new(spec.num_qubits)?;
    if spec.zero_layer {
        push_trainable_block(&mut circuit, spec)?;
    }
    for _ in 0..spec.num_layers {
        for q in 0..spec.num_qubits {
            circuit.push_data(GateKind::RX, q)?;
        }
        push_trainable_block(&mut circuit, spec)?;
    }
    Ok(circuit)
}

/// dQNN with CAN couplings between consecutive layers, measured on the output qubit.
pub fn build_dqnn(spec: &DqnnSpec) -> Result<Circuit> {
    spec.validate()?;
    let total: usize = spec.widths.iter().sum();
    let mut circuit = Circuit::new(total)?;
    let mut offsets = Vec::with_capacity(spec.widths.len());
    let mut acc = 0;
    for &w in &spec.widths {
        offsets.push(acc);
        acc += w;
    }
    let last = spec.widths.len() - 1;
    for layer in 0..last {
        let qubits = offsets[layer]..offsets[layer] + spec.widths[layer];
        if spec.zero_layer {
            for q in qubits.clone() {
                push_u1(&mut circuit, spec.u1, q)?;
            }
        }
        if layer == 0 || spec.data_reupload {
            for q in qubits.clone() {
                circuit.push_data(GateKind::RX, q)?;
            }
        }
        for q in qubits.clone() {
            push_u1(&mut circuit, spec.u1, q)?;
        }
        let next = offsets[layer + 1]..offsets[layer + 1] + spec.widths[layer + 1];
        for src in qubits {
            for dst in next.clone() {
                push_entangler(&mut circuit, EntanglementGate::CAN, src, dst)?;
            }
        }
    }
    let output = offsets[last];
    let output_blocks = if spec.zero_layer { 2 } else { 1 };
    for _ in 0..output_blocks {
        push_u1(&mut circuit, spec.u1, output)?;
    }
    circuit.set_measured_qubit(output)?;
    Ok(circuit)
}

/// Gate and parameter counts of a built circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCount {
    pub single_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub trainable_params: usize,
}

/// Counts 1- and 2-qubit ops (data encodings included; a CAN is already three ops).
pub fn count_resources(circuit: &Circuit) -> ResourceCount {
    let single = circuit.ops().iter().filter(|op| op.kind().arity() == 1).count();
    ResourceCount {
        single_qubit_gates: single,
        two_qubit_gates: circuit.ops().len() - single,
        trainable_params: circuit.num_params(),
    }
}

/// Highest frequency the circuit can express: the number of data-encoding gates.
pub fn max_degree(circuit: &Circuit) -> usize {
    circuit.ops().iter().filter(|op| op.is_data_input()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ParamBinding;
    use EntanglementGate::*;
    use SingleQubitUnitary::*;

    fn kinds(c: &Circuit) -> Vec<(GateKind, Vec<usize>)> {
        c.ops().iter().map(|op| (op.kind(), op.qubits().to_vec())).collect()
    }

    #[test]
    fn single_qubit_wsw_ryrz_matches_reference_circuit() {
        let c = build_layered(&LayeredSpec::new(1, 1, RYRZ, CNOT, 1)).unwrap();
        let ks: Vec<_> = kinds(&c).into_iter().map(|(k, _)| k).collect();
        assert_eq!(
            ks,
            vec![GateKind::RY, GateKind::RZ, GateKind::RX, GateKind::RY, GateKind::RZ]
        );
        assert_eq!(c.num_params(), 4);
        assert_eq!(c.ops()[2].binding(), Some(ParamBinding::DataInput));
        assert_eq!(c.measured_qubit(), 0);
    }

    #[test]
    fn three_qubit_two_layer_cz_circuit_layout() {
        let c = build_layered(&LayeredSpec::new(3, 2, RY, CZ, 1)).unwrap();
        let mut expected = Vec::new();
        let block = |e: &mut Vec<(GateKind, Vec<usize>)>| {
            for q in 0..3 {
                e.push((GateKind::RY, vec![q]));
            }
            e.push((GateKind::CZ, vec![0, 1]));
            e.push((GateKind::CZ, vec![1, 2]));
        };
        block(&mut expected);
        for _ in 0..2 {
            for q in 0..3 {
                expected.push((GateKind::RX, vec![q]));
            }
            block(&mut expected);
        }
        assert_eq!(kinds(&c), expected);
        assert_eq!(c.num_params(), 9);
        assert_eq!(c.measured_qubit(), 2);
    }

    #[test]
    fn two_qubit_simple_linear_has_one_gate_per_ent_layer() {
        let spec = LayeredSpec::new(2, 1, RY, CNOT, 1).with_zero_layer(false);
        assert_eq!(count_resources(&build_layered(&spec).unwrap()).two_qubit_gates, 1);
        let cyclic = spec.with_style(EntanglementStyle::Cyclic);
        assert_eq!(count_resources(&build_layered(&cyclic).unwrap()).two_qubit_gates, 1);
    }

    #[test]
    fn strong_structure_uses_block_range() {
        let spec = LayeredSpec::new(4, 1, RY, CNOT, 3).with_structure(EntanglementStructure::Strong);
        assert_eq!(spec.entangling_pairs(1), vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(spec.entangling_pairs(2), vec![(0, 2), (1, 3)]);
        assert_eq!(spec.entangling_pairs(3), vec![(0, 3)]);
        assert_eq!(spec.entangling_pairs(4), vec![(0, 1), (1, 2), (2, 3)]);
        let cyc = spec.with_style(EntanglementStyle::Cyclic);
        assert_eq!(cyc.entangling_pairs(2), vec![(0, 2), (1, 3), (2, 0), (3, 1)]);
    }

    #[test]
    fn alternating_structure_switches_parity() {
        let spec = LayeredSpec::new(5, 1, RY, CZ, 2).with_structure(EntanglementStructure::Alternating);
        assert_eq!(spec.entangling_pairs(1), vec![(0, 1), (2, 3)]);
        assert_eq!(spec.entangling_pairs(2), vec![(1, 2), (3, 4)]);
        let even = LayeredSpec::new(4, 1, RY, CZ, 2)
            .with_structure(EntanglementStructure::Alternating)
            .with_style(EntanglementStyle::Cyclic);
        assert_eq!(even.entangling_pairs(2), vec![(1, 2), (3, 0)]);
    }

    #[test]
    fn simple_cyclic_adds_wrap_pair() {
        let spec = LayeredSpec::new(3, 1, RY, CNOT, 1).with_style(EntanglementStyle::Cyclic);
        assert_eq!(spec.entangling_pairs(1), vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn strongc14_is_rejected() {
        let spec = LayeredSpec::new(4, 3, RYRZ, CRX, 3).with_structure(EntanglementStructure::StrongC14);
        assert_eq!(
            build_layered(&spec),
            Err(Error::UnsupportedStructure("strongc14".into()))
        );
    }

    #[test]
    fn invalid_layered_specs() {
        assert!(build_layered(&LayeredSpec::new(0, 1, RY, CZ, 1)).is_err());
        assert!(build_layered(&LayeredSpec::new(2, 0, RY, CZ, 1)).is_err());
        assert!(build_layered(&LayeredSpec::new(2, 1, RY, CZ, 0)).is_err());
    }

    #[test]
    fn dqnn_counts_and_encodings() {
        let spec = DqnnSpec {
            widths: vec![2, 2, 2, 1],
            data_reupload: true,
            zero_layer: true,
            u1: RY,
        };
        let c = build_dqnn(&spec).unwrap();
        assert_eq!(count_resources(&c).two_qubit_gates, 30);
        assert_eq!(max_degree(&c), 6);
        assert_eq!(c.measured_qubit(), 6);

        let plain = DqnnSpec {
            widths: vec![6, 1],
            data_reupload: false,
            zero_layer: false,
            u1: RYRZ,
        };
        let c = build_dqnn(&plain).unwrap();
        let data: Vec<_> = c
            .ops()
            .iter()
            .filter(|o| o.is_data_input())
            .map(|o| o.qubits()[0])
            .collect();
        assert_eq!(data, vec![0, 1, 2, 3, 4, 5]);

        let tiny = DqnnSpec {
            widths: vec![1, 1],
            data_reupload: true,
            zero_layer: false,
            u1: RY,
        };
        let c = build_dqnn(&tiny).unwrap();
        assert_eq!(max_degree(&c), 1);
        assert_eq!(count_resources(&c).two_qubit_gates, 3);
    }

    #[test]
    fn dqnn_hidden_layers_encode_only_with_reupload() {
        let spec = DqnnSpec {
            widths: vec![6, 4, 1],
            data_reupload: false,
            zero_layer: true,
            u1: RY,
        };
        assert_eq!(max_degree(&build_dqnn(&spec).unwrap()), 6);
        let re = DqnnSpec {
            data_reupload: true,
            ..spec
        };
        assert_eq!(max_degree(&build_dqnn(&re).unwrap()), 10);
    }

    #[test]
    fn dqnn_output_rotation_blocks_follow_zero_layer() {
        for (zl, expected) in [(false, 1), (true, 2)] {
            let spec = DqnnSpec {
                widths: vec![1, 1],
                data_reupload: true,
                zero_layer: zl,
                u1: RYRZ,
            };
            let c = build_dqnn(&spec).unwrap();
            let on_output = c.ops().iter().filter(|o| o.qubits() == [1]).count();
            assert_eq!(on_output, 2 * expected);
        }
    }

    #[test]
    fn invalid_dqnn_specs() {
        let bad = |w: Vec<usize>| DqnnSpec {
            widths: w,
            data_reupload: true,
            zero_layer: true,
            u1: RY,
        };
        assert!(build_dqnn(&bad(vec![3])).is_err());
        assert!(build_dqnn(&bad(vec![2, 0, 1])).is_err());
        assert!(build_dqnn(&bad(vec![2, 2])).is_err());
    }

    #[test]
    fn max_degree_of_layered_is_n_times_l() {
        let c = build_layered(&LayeredSpec::new(4, 3, RYRZ, CNOT, 3)).unwrap();
        assert_eq!(max_degree(&c), 12);
    }

    #[test]
    fn display_names_the_family() {
        let spec: AnsatzSpec = LayeredSpec::new(3, 2, RYRZ, CRX, 2).into();
        assert!(spec.to_string().starts_with("layered(n=3, L=2, WSW"));
        let d: AnsatzSpec = DqnnSpec {
            widths: vec![2, 1],
            data_reupload: true,
            zero_layer: false,
            u1: RY,
        }
        .into();
        assert!(d.to_string().starts_with("dqnn("));
    }
}
