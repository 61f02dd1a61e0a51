use proptest::prelude::*;
use transim::circuit::{
    generate_bristlecone_circuit, generate_chain_circuit, generate_grid_circuit, hadamard,
    Circuit, Gate, Outcome, QubitLayout, IDENTITY, ONE, ZERO,
};
use transim::network::{circuit_to_network, NodeKind};
use transim::rewrite::{
    build_slice_gate, build_slice_plan, plan_logical_qubits, plan_to_circuit, renormalize,
    teleport_circuit, teleport_rewrite, GateMatrix, LogicalCircuit, RewriteConfig,
};
use transim::statevector::{amplitude_direct, amplitude_transversal, MemoryCap};
use transim::{Error, C64, DEFAULT_MAX_ARITY};

fn cap() -> MemoryCap {
    MemoryCap::qubits(24)
}

fn config() -> RewriteConfig {
    RewriteConfig {
        memory_cap: cap(),
        ..RewriteConfig::default()
    }
}

fn full_contraction(c: &Circuit, outcome: &Outcome) -> C64 {
    let net = circuit_to_network(c, outcome).unwrap();
    let t = net.contract_in_order(&net.node_ids()).unwrap();
    t.tensor.data()[0]
}

#[test]
fn planner_large_configurations() {
    let layout = QubitLayout::chain(1000).unwrap();
    assert_eq!(plan_logical_qubits(&layout, 42), (42, 1000));
    let layout = QubitLayout::grid(125, 8).unwrap();
    assert_eq!(plan_logical_qubits(&layout, 42), (40, 125));
    let layout = QubitLayout::bristlecone(12, 6).unwrap();
    assert_eq!(plan_logical_qubits(&layout, 32), (44, 12));
}

#[test]
fn trailing_horizontal_layers_add_no_block() {
    let layout = QubitLayout::grid(4, 4).unwrap();
    assert_eq!(plan_logical_qubits(&layout, 2).0, 0);
    assert_eq!(plan_logical_qubits(&layout, 3).0, 4);
    assert_eq!(plan_logical_qubits(&layout, 8).0, 4);
    assert_eq!(plan_logical_qubits(&layout, 10).0, 4);
    assert_eq!(plan_logical_qubits(&layout, 11).0, 8);
}

#[test]
fn chain_slice_plan_example() {
    let c = generate_chain_circuit(4, 2, 1).unwrap();
    let net = circuit_to_network(&c, &Outcome::zeros(4)).unwrap();
    let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY).unwrap();
    assert_eq!(plan.num_slices(), 4);
    assert_eq!(plan.k, 2);
    for b in &plan.boundaries {
        let mut seen: Vec<usize> = b.iter().map(|w| w.logical).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), b.len(), "a logical wire crosses a boundary twice");
        assert!(b.len() <= 2);
    }
}

#[test]
fn grid_slice_plan_example() {
    let c = generate_grid_circuit(4, 4, 8, 2).unwrap();
    let net = circuit_to_network(&c, &Outcome::zeros(16)).unwrap();
    let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY).unwrap();
    assert_eq!((plan.num_slices(), plan.k), (4, 4));
    // Boundary-edge enumeration: one vertical bond per column between rows.
    let layout = &c.layout;
    for (r, b) in plan.boundaries.iter().enumerate() {
        let crossing = layout
            .edges()
            .into_iter()
            .filter(|&(a, q)| layout.slice_of(a) == r && layout.slice_of(q) == r + 1)
            .count();
        assert_eq!(b.len(), crossing);
        assert!(b.iter().all(|w| w.wire.is_some()));
    }
}

#[test]
fn bristlecone_slice_plan_example() {
    let c = generate_bristlecone_circuit(3, 2, 8, 3).unwrap();
    let net = circuit_to_network(&c, &Outcome::zeros(6)).unwrap();
    let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY).unwrap();
    assert_eq!((plan.num_slices(), plan.k), (3, 3));
    for b in &plan.boundaries {
        assert_eq!(b.len(), 3);
    }
}

#[test]
fn every_node_in_one_slice() {
    let c = generate_grid_circuit(3, 3, 9, 4).unwrap();
    let net = circuit_to_network(&c, &Outcome::zeros(9)).unwrap();
    let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY).unwrap();
    let mut all: Vec<usize> = plan.slices.iter().flat_map(|s| s.nodes.clone()).collect();
    all.sort_unstable();
    assert_eq!(all, net.node_ids());
}

#[test]
fn planner_consistency_small_families() {
    for depth in 1..=16 {
        for n in 2..=8 {
            let c = generate_chain_circuit(n, depth, depth as u64).unwrap();
            let net = circuit_to_network(&c, &Outcome::zeros(n)).unwrap();
            let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY).unwrap();
            assert_eq!(plan.k, plan_logical_qubits(&c.layout, depth).0);
        }
        for m in 2..=8 {
            for n in 2..=m {
                for c in [
                    generate_grid_circuit(m, n, depth, 7).unwrap(),
                    generate_bristlecone_circuit(m, n, depth, 7).unwrap(),
                ] {
                    let nq = c.num_qubits();
                    let net = circuit_to_network(&c, &Outcome::zeros(nq)).unwrap();
                    let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY)
                        .unwrap_or_else(|e| panic!("{:?} depth {depth}: {e}", c.layout));
                    let k = plan_logical_qubits(&c.layout, depth).0;
                    assert_eq!(plan.k, k, "{:?} depth {depth}", c.layout);
                    for b in &plan.boundaries {
                        assert_eq!(b.len(), k);
                    }
                }
            }
        }
    }
}

#[test]
fn non_adjacent_cz_is_a_plan_failure() {
    let mut c = generate_chain_circuit(4, 1, 5).unwrap();
    let at = c.gates.iter().position(|g| g.depth() == 1).unwrap();
    c.gates.insert(
        at,
        Gate::Cz {
            control: 1,
            target: 3,
            depth: 0,
        },
    );
    let net = circuit_to_network(&c, &Outcome::zeros(4)).unwrap();
    let phase = net
        .nodes()
        .filter(|(_, n)| n.kind == NodeKind::Phase)
        .map(|(id, _)| id)
        .last()
        .unwrap();
    match build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY) {
        Err(Error::PlanFailure { node, .. }) => assert_eq!(node, phase),
        other => panic!("expected plan failure, got {other:?}"),
    }
}

#[test]
fn cz_free_slice_is_a_scalar() {
    // Chain(3) at depth 1 has a single CZ on qubits 0 and 1; qubit 2 is idle.
    let c = generate_chain_circuit(3, 1, 6).unwrap();
    let outcome: Outcome = "011".parse().unwrap();
    let net = circuit_to_network(&c, &outcome).unwrap();
    let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY).unwrap();
    let sg = build_slice_gate(&plan, 2).unwrap();
    assert!(sg.gates.is_empty());
    let u: Vec<_> = c
        .gates
        .iter()
        .filter_map(|g| match g {
            Gate::Single { target: 2, matrix, .. } => Some(*matrix),
            _ => None,
        })
        .collect();
    // <1| U1 U0 |0>
    let expect = u[1][1][0] * u[0][0][0] + u[1][1][1] * u[0][1][0];
    assert!((sg.scalar - expect).norm() < 1e-14);
}

#[test]
fn one_qubit_slice_between_two_layers_is_a_diagonal() {
    // Qubit 1 of Chain(3) at depth 2 sits on CZ layers 0 and 1.
    let mut c = generate_chain_circuit(3, 2, 8).unwrap();
    for g in c.gates.iter_mut() {
        if let Gate::Single { matrix, .. } = g {
            *matrix = IDENTITY;
        }
    }
    let net = circuit_to_network(&c, &Outcome::zeros(3)).unwrap();
    let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY).unwrap();
    let sg = build_slice_gate(&plan, 1).unwrap();
    let two: Vec<_> = sg.gates.iter().filter(|g| g.arity() == 2).collect();
    assert_eq!(two.len(), 1);
    assert!(two[0].diagonal);
    let GateMatrix::Diagonal(d) = &two[0].matrix else {
        panic!("expected a diagonal")
    };
    // Oracle: the world line of qubit 1 between its two copy tensors,
    // evaluated with both ends pinned to (x, y).
    let copies: Vec<usize> = net
        .nodes()
        .filter(|(_, n)| n.kind == NodeKind::Copy && n.qubit == Some(1))
        .map(|(id, _)| id)
        .collect();
    let between: Vec<usize> = net
        .nodes()
        .filter(|(_, n)| n.kind == NodeKind::Gate && n.qubit == Some(1) && n.depth == Some(1))
        .map(|(id, _)| id)
        .collect();
    let t = net
        .contract_in_order(&[copies[0], between[0], copies[1]])
        .unwrap();
    let lower = net.node(copies[0]).unwrap();
    let upper = net.node(copies[1]).unwrap();
    let label = |w| t.labels.iter().position(|&l| l == w).unwrap();
    let (li, lo) = (label(lower.legs[0]), label(upper.legs[1]));
    let (le0, le1) = (label(lower.legs[2]), label(upper.legs[2]));
    for x in 0..2 {
        for y in 0..2 {
            let mut idx = vec![0; 6];
            idx[li] = x;
            idx[le0] = x;
            idx[lo] = y;
            idx[le1] = y;
            let slot = |e: usize| two[0].targets.iter().position(|&t| t == e).unwrap();
            let (sx, sy) = (slot(0), slot(1));
            let local = (x << sx) | (y << sy);
            assert!((d[local] - t.tensor.get(&idx)).norm() < 1e-12);
        }
    }
}

#[test]
fn slice_gates_reproduce_the_network() {
    for c in [
        generate_chain_circuit(5, 4, 9).unwrap(),
        generate_grid_circuit(3, 3, 9, 9).unwrap(),
        generate_bristlecone_circuit(3, 2, 10, 9).unwrap(),
    ] {
        let n = c.num_qubits();
        let outcome = Outcome::from_index(5, n);
        let net = circuit_to_network(&c, &outcome).unwrap();
        let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY).unwrap();
        let lc = plan_to_circuit(&plan, false).unwrap();
        for g in &lc.gates {
            if let GateMatrix::Dense(m) = &g.matrix {
                let dim = 1 << g.arity();
                if g.diagonal {
                    assert!((0..dim * dim).all(|i| i / dim == i % dim || m[i] == ZERO));
                }
            }
        }
        let a = amplitude_transversal(&lc, cap()).unwrap().value;
        let b = full_contraction(&c, &outcome);
        assert!((a - b).norm() < 1e-12, "{:?}: {a} vs {b}", c.layout);
    }
}

#[test]
fn logical_gates_are_mostly_diagonal() {
    let c = generate_chain_circuit(12, 10, 10).unwrap();
    let net = circuit_to_network(&c, &Outcome::zeros(12)).unwrap();
    let plan = build_slice_plan(&net, &c.layout, DEFAULT_MAX_ARITY).unwrap();
    let lc = plan_to_circuit(&plan, false).unwrap();
    assert!(lc.diagonal_fraction() > 0.5, "{}", lc.diagonal_fraction());
    assert!(lc.gates.iter().any(|g| g.diagonal && !g.unitary));
}

#[test]
fn renormalize_examples() {
    let c = generate_chain_circuit(8, 4, 11).unwrap();
    let o = Outcome::from_index(77, 8);
    let lc = renormalize(&c, &o, &config()).unwrap();
    assert_eq!(lc.k, 4);
    let a = amplitude_transversal(&lc, cap()).unwrap().value;
    let b = amplitude_direct(&c, &o, cap()).unwrap().value;
    assert!((a - b).norm() < 1e-10);

    let c = generate_grid_circuit(4, 4, 8, 12).unwrap();
    let o = Outcome::from_index(4321, 16);
    let lc = renormalize(&c, &o, &config()).unwrap();
    assert_eq!(lc.k, 4);
    let a = amplitude_transversal(&lc, cap()).unwrap().value;
    let b = amplitude_direct(&c, &o, cap()).unwrap().value;
    assert!((a - b).norm() < 1e-10);
}

#[test]
fn renormalize_respects_the_cap() {
    let c = generate_chain_circuit(1000, 50, 13).unwrap();
    let cfg = RewriteConfig {
        memory_cap: MemoryCap::qubits(48),
        ..RewriteConfig::default()
    };
    match renormalize(&c, &Outcome::zeros(1000), &cfg) {
        Err(Error::ResourceLimit { required, cap, .. }) => assert_eq!((required, cap), (50, 48)),
        other => panic!("expected resource limit, got {other:?}"),
    }
}

#[test]
fn large_slot_count_needs_wide_enough_gates() {
    let c = generate_grid_circuit(3, 3, 12, 14).unwrap();
    let cfg = RewriteConfig {
        max_arity: 1,
        ..config()
    };
    assert!(matches!(
        renormalize(&c, &Outcome::zeros(9), &cfg),
        Err(Error::ArityOverflow { max: 1, .. })
    ));
}

#[test]
fn logical_circuit_json_round_trip() {
    let c = generate_bristlecone_circuit(3, 2, 9, 15).unwrap();
    let lc = renormalize(&c, &Outcome::from_index(9, 6), &config()).unwrap();
    let s = lc.to_json();
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    for key in ["k", "scalar", "boundaries", "gates"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let back = LogicalCircuit::from_json(&s).unwrap();
    assert_eq!(back, lc);
    assert_eq!(back.to_json(), s);
}

fn teleport_amplitudes(input: [[C64; 2]; 2], middle: [[C64; 2]; 2], fix: [[[C64; 2]; 2]; 3]) {
    let c = teleport_circuit(&input, &middle, &fix);
    for i in 0..8 {
        let o = Outcome::from_index(i, 3);
        let net = circuit_to_network(&c, &o).unwrap();
        let lc = teleport_rewrite(&net, true).unwrap();
        assert_eq!(lc.k, 1);
        let a = amplitude_transversal(&lc, cap()).unwrap().value;
        let b = amplitude_direct(&c, &o, cap()).unwrap().value;
        assert!((a - b).norm() < 1e-12, "outcome {o}: {a} vs {b}");
    }
}

#[test]
fn teleport_with_zero_input() {
    let h = hadamard();
    teleport_amplitudes(IDENTITY, h, [h, h, IDENTITY]);
}

#[test]
fn teleport_with_plus_input() {
    let h = hadamard();
    let s = [[ONE, ZERO], [ZERO, C64::new(0.0, 1.0)]];
    teleport_amplitudes(h, h, [h, s, h]);
}

#[test]
fn teleport_identity_corrections_relabel() {
    let c = teleport_circuit(&IDENTITY, &IDENTITY, &[IDENTITY; 3]);
    let net = circuit_to_network(&c, &Outcome::zeros(3)).unwrap();
    let lc = teleport_rewrite(&net, false).unwrap();
    let p = [ONE, ONE, ONE, -ONE];
    let id = [ONE, ZERO, ZERO, ONE];
    let transfers: Vec<_> = lc
        .gates
        .iter()
        .filter_map(|g| match &g.matrix {
            GateMatrix::Dense(m) => Some(m.clone()),
            _ => None,
        })
        .collect();
    assert_eq!(transfers.len(), 3);
    assert_eq!(transfers[0], p);
    assert_eq!(transfers[1], id);
    assert_eq!(transfers[2], p);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transversal_equals_direct(family in 0usize..3, a in 2usize..5, b in 2usize..5,
                                 depth in 1usize..12, seed in any::<u64>(), idx in any::<u64>()) {
        let (m, n) = (a.max(b), a.min(b));
        let c = match family {
            0 => generate_chain_circuit(m + n, depth.min(10), seed).unwrap(),
            1 => generate_grid_circuit(m, n.min(4), depth, seed).unwrap(),
            _ => generate_bristlecone_circuit(m, n.min(3), depth, seed).unwrap(),
        };
        prop_assume!(c.num_qubits() <= 16);
        let nq = c.num_qubits();
        let o = Outcome::from_index(idx % (1 << nq), nq);
        let lc = renormalize(&c, &o, &config()).unwrap();
        let x = amplitude_transversal(&lc, cap()).unwrap().value;
        let y = amplitude_direct(&c, &o, cap()).unwrap().value;
        prop_assert!((x - y).norm() < 1e-10);
    }
}
