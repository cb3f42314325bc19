use learncap::ansatz::{
    build_dqnn, build_layered, count_resources, max_degree, DqnnSpec, EntanglementGate, EntanglementStructure,
    EntanglementStyle, LayeredSpec, SingleQubitUnitary,
};
use learncap::fourier::sample_circuit_coefficients;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn u1_strategy() -> impl Strategy<Value = SingleQubitUnitary> {
    prop_oneof![
        Just(SingleQubitUnitary::RY),
        Just(SingleQubitUnitary::RYRZ),
        Just(SingleQubitUnitary::RYRZRY)
    ]
}

fn gate_strategy() -> impl Strategy<Value = EntanglementGate> {
    prop_oneof![
        Just(EntanglementGate::CZ),
        Just(EntanglementGate::CNOT),
        Just(EntanglementGate::CRX),
        Just(EntanglementGate::CAN)
    ]
}

fn structure_strategy() -> impl Strategy<Value = EntanglementStructure> {
    prop_oneof![
        Just(EntanglementStructure::Simple),
        Just(EntanglementStructure::Strong),
        Just(EntanglementStructure::Alternating)
    ]
}

fn style_strategy() -> impl Strategy<Value = EntanglementStyle> {
    prop_oneof![Just(EntanglementStyle::Linear), Just(EntanglementStyle::Cyclic)]
}

proptest! {
    #[test]
    fn simple_linear_counts_follow_closed_form(
        n in 1usize..=8, l in 1usize..=4, el in 1usize..=3, zl in any::<bool>(),
        u1 in u1_strategy(), gate in gate_strategy(),
    ) {
        let spec = LayeredSpec::new(n, l, u1, gate, el).with_zero_layer(zl);
        let c = build_layered(&spec).unwrap();
        let blocks = l + usize::from(zl);
        let placements = blocks * el * (n - 1);
        let rot = blocks * el * n * u1.len();
        let r = count_resources(&c);
        prop_assert_eq!(r.single_qubit_gates, n * l + rot);
        prop_assert_eq!(r.two_qubit_gates, placements * gate.ops_per_placement());
        prop_assert_eq!(r.trainable_params, rot + placements * gate.params_per_placement());
        prop_assert_eq!(max_degree(&c), n * l);
        prop_assert!(c.validate().is_ok());
        prop_assert_eq!(c.measured_qubit(), n - 1);
    }

    #[test]
    fn cyclic_adds_one_wrap_per_sub_block(
        n in 1usize..=8, l in 1usize..=4, el in 1usize..=3, zl in any::<bool>(), gate in gate_strategy(),
    ) {
        let lin = LayeredSpec::new(n, l, SingleQubitUnitary::RY, gate, el).with_zero_layer(zl);
        let cyc = lin.clone().with_style(EntanglementStyle::Cyclic);
        let t_lin = count_resources(&build_layered(&lin).unwrap()).two_qubit_gates;
        let t_cyc = count_resources(&build_layered(&cyc).unwrap()).two_qubit_gates;
        let expected = if n >= 3 { (l + usize::from(zl)) * el * gate.ops_per_placement() } else { 0 };
        prop_assert_eq!(t_cyc - t_lin, expected);
    }

    #[test]
    fn every_structure_uses_valid_disjoint_pairs(
        n in 1usize..=8, el in 1usize..=6, s in structure_strategy(), style in style_strategy(),
    ) {
        let spec = LayeredSpec::new(n, 1, SingleQubitUnitary::RY, EntanglementGate::CZ, el)
            .with_structure(s)
            .with_style(style);
        for b in 1..=el {
            let pairs = spec.entangling_pairs(b);
            for &(c, t) in &pairs {
                prop_assert!(c < n && t < n && c != t);
            }
            if s == EntanglementStructure::Alternating {
                let mut used: Vec<usize> = pairs.iter().flat_map(|&(c, t)| [c, t]).collect();
                used.sort();
                used.dedup();
                prop_assert_eq!(used.len(), 2 * pairs.len());
            }
        }
        prop_assert!(build_layered(&spec).unwrap().validate().is_ok());
    }

    #[test]
    fn dqnn_counts(widths in proptest::collection::vec(1usize..=3, 1..=3), reupload in any::<bool>(), zl in any::<bool>()) {
        let mut w = widths.clone();
        w.push(1);
        let spec = DqnnSpec { widths: w.clone(), data_reupload: reupload, zero_layer: zl, u1: SingleQubitUnitary::RY };
        let c = build_dqnn(&spec).unwrap();
        let couplings: usize = w.windows(2).map(|p| p[0] * p[1]).sum();
        prop_assert_eq!(count_resources(&c).two_qubit_gates, 3 * couplings);
        let hidden: usize = w[1..w.len() - 1].iter().sum();
        prop_assert_eq!(max_degree(&c), w[0] + if reupload { hidden } else { 0 });
        prop_assert_eq!(c.num_qubits(), w.iter().sum::<usize>());
        prop_assert!(c.validate().is_ok());
    }
}

#[test]
fn coefficients_vanish_above_max_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let specs = [
        LayeredSpec::new(2, 1, SingleQubitUnitary::RYRZ, EntanglementGate::CRX, 2),
        LayeredSpec::new(1, 3, SingleQubitUnitary::RY, EntanglementGate::CZ, 1).with_zero_layer(false),
    ];
    for spec in specs {
        let c = build_layered(&spec).unwrap();
        let k = max_degree(&c);
        for sample in sample_circuit_coefficients(&c, k + 3, 5, &mut rng).unwrap() {
            assert!(sample[k + 1..].iter().all(|v| v.norm() < 1e-9));
        }
    }
}
