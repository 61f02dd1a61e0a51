use transim::circuit::{
    generate_bristlecone_circuit, generate_chain_circuit, generate_grid_circuit, Circuit, Outcome,
};
use transim::rewrite::{plan_logical_qubits, renormalize, RewriteConfig};
use transim::statevector::{amplitude_direct, amplitude_transversal, MemoryCap};

fn config(fuse: bool) -> RewriteConfig {
    RewriteConfig {
        memory_cap: MemoryCap::qubits(24),
        fuse,
        ..RewriteConfig::default()
    }
}

fn check(c: &Circuit, outcome_index: u64, fuse: bool) {
    let n = c.num_qubits();
    let outcome = Outcome::from_index(outcome_index % (1 << n), n);
    let lc = renormalize(c, &outcome, &config(fuse)).unwrap();
    assert_eq!(lc.k, plan_logical_qubits(&c.layout, c.depth).0);
    let a = amplitude_transversal(&lc, MemoryCap::qubits(24)).unwrap().value;
    let b = amplitude_direct(c, &outcome, MemoryCap::qubits(24)).unwrap().value;
    assert!(
        (a - b).norm() < 1e-10,
        "{:?} depth {} seed {}: {a} vs {b}",
        c.layout,
        c.depth,
        c.seed
    );
}

#[test]
fn chain_matches_direct() {
    for (i, (n, d)) in [(2, 1), (3, 1), (3, 2), (4, 2), (5, 3), (8, 4), (12, 10), (9, 7)]
        .into_iter()
        .enumerate()
    {
        let c = generate_chain_circuit(n, d, 100 + i as u64).unwrap();
        check(&c, 37 * i as u64 + 5, true);
        check(&c, 11 * i as u64, false);
    }
}

#[test]
fn grid_matches_direct() {
    for (i, (m, n, d)) in [(2, 2, 1), (2, 2, 3), (3, 2, 8), (4, 4, 8), (3, 3, 10), (4, 3, 16), (4, 4, 16), (4, 4, 11)]
        .into_iter()
        .enumerate()
    {
        let c = generate_grid_circuit(m, n, d, 200 + i as u64).unwrap();
        check(&c, 91 * i as u64 + 3, true);
        check(&c, 7 * i as u64, false);
    }
}

#[test]
fn bristlecone_matches_direct() {
    for (i, (m, n, d)) in [(2, 2, 1), (3, 2, 8), (3, 2, 5), (4, 2, 16), (3, 3, 12), (4, 3, 9), (4, 4, 8)]
        .into_iter()
        .enumerate()
    {
        let c = generate_bristlecone_circuit(m, n, d, 300 + i as u64).unwrap();
        check(&c, 13 * i as u64 + 1, true);
        check(&c, 3 * i as u64, false);
    }
}
