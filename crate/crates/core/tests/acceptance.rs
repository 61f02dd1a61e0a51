//! End-to-end acceptance checks. Runs without the test harness and prints
//! one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use transim::circuit::{generate_chain_circuit, QubitLayout};
use transim::network::{cz_decompose, LabeledTensor, NodeKind, Tensor, TensorNetwork, WireKind};
use transim::rewrite::{plan_logical_qubits, renormalize, RewriteConfig};
use transim::sampler::{
    cross_entropy_of_probabilities, cross_entropy_fidelity, porter_thomas_check, sampling_efficiency,
    sampling_efficiency_summed, threshold_reject_run, SamplerOptions, StopRule, TableSource,
    ThresholdConfig,
};
use transim::statevector::{amplitude_transversal, MemoryCap};
use transim::verify::{brute_force_contract, fuzz_equivalence, Family, FuzzBounds, FuzzConfig, DEFAULT_COST_BOUND};
use transim::C64;

struct Line {
    id: u32,
    passed: bool,
    detail: String,
    seconds: f64,
}

fn criterion(id: u32, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (passed, detail) = f();
    Line {
        id,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Seed of the n = 12 chain circuit shared by criteria 4 and 5.
const CHAIN_SEED: u64 = 2024;
const CHAIN_DEPTH: usize = 24;

fn equivalence_suite() -> (bool, String) {
    let bounds = FuzzBounds {
        chain_max_n: 12,
        chain_max_depth: 10,
        grid_max_side: 4,
        grid_max_depth: 16,
        bristlecone_max_side: 4,
        bristlecone_max_depth: 16,
    };
    let mut parts = Vec::new();
    let mut passed = true;
    for (family, seed) in [(Family::Chain, 101), (Family::Grid, 102), (Family::Bristlecone, 103)] {
        let cfg = FuzzConfig::new(100, seed).families(&[family]).bounds(bounds);
        match fuzz_equivalence(&cfg) {
            Ok(r) => {
                passed &= r.failure_count() == 0 && r.cases.len() >= 100;
                parts.push(format!(
                    "{family:?}: {} cases, {} failures, max |diff| {:.1e}",
                    r.cases.len(),
                    r.failure_count(),
                    r.max_error
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{family:?}: {e}"));
            }
        }
    }
    (passed, parts.join("; "))
}

fn planner() -> (bool, String) {
    let cases = [
        (QubitLayout::Chain { n: 1000 }, 42, 42),
        (QubitLayout::Grid { m: 125, n: 8 }, 42, 40),
        (QubitLayout::Bristlecone { m: 12, n: 6 }, 32, 44),
    ];
    let start = Instant::now();
    let ks: Vec<usize> = cases.iter().map(|(l, d, _)| plan_logical_qubits(l, *d).0).collect();
    let secs = start.elapsed().as_secs_f64();
    let passed = ks.iter().zip(&cases).all(|(k, c)| *k == c.2) && secs < 1.0;
    (passed, format!("k = {ks:?} (expected [42, 40, 44]) in {secs:.3}s"))
}

fn sweet_spot() -> (bool, String) {
    let eta = sampling_efficiency(2.4).unwrap();
    let f = cross_entropy_fidelity(2.4).unwrap();
    let summed = sampling_efficiency_summed(&ThresholdConfig::new(2.4, 16).unwrap());
    let passed = (0.375..=0.385).contains(&eta) && (0.89..=0.91).contains(&f) && (eta - summed).abs() < 1e-6;
    (
        passed,
        format!("eta {eta:.5}, f_ce {f:.5}, |eta - summed(n=16)| {:.1e}", (eta - summed).abs()),
    )
}

fn sampling_experiment(table: &TableSource) -> (bool, String) {
    let proposals = 100_000u64;
    let cfg = ThresholdConfig::new(2.4, 12).unwrap();
    let run = threshold_reject_run(table, &cfg, &SamplerOptions::default(), StopRule::Proposals(proposals)).unwrap();
    let ratio = run.acceptance_ratio();
    let sigma = (0.379f64 * (1.0 - 0.379) / proposals as f64).sqrt();
    let f = cross_entropy_of_probabilities(&run.samples, &run.probabilities, 12).unwrap();
    let passed = (ratio - 0.379).abs() <= 3.0 * sigma && (f - 0.90).abs() <= 0.03;
    (
        passed,
        format!(
            "{proposals} proposals, ratio {ratio:.4} ({:+.2} sigma from 0.379), f_ce {f:.4}",
            (ratio - 0.379) / sigma
        ),
    )
}

fn porter_thomas(table: &TableSource) -> (bool, String) {
    let ks = porter_thomas_check(table.probabilities(), 12);
    (ks < 0.03, format!("KS distance {ks:.4}"))
}

fn basis(bit: usize) -> Tensor {
    let mut v = [C64::new(0.0, 0.0); 2];
    v[bit] = C64::new(1.0, 0.0);
    Tensor::vector(&v)
}

fn widgets() -> (bool, String) {
    let (left, p, right) = cz_decompose();
    let p = Tensor::from_mat2(&p);

    // Closed networks <c d| copy-P-copy |a b>, summed by the brute-force oracle.
    let mut worst: f64 = 0.0;
    for i in 0..16usize {
        let (a, b, c, d) = (i & 1, (i >> 1) & 1, (i >> 2) & 1, (i >> 3) & 1);
        let mut net = TensorNetwork::new();
        let w: Vec<_> = (0..6).map(|_| net.add_wire(WireKind::WorldLine, 2)).collect();
        net.add_node(NodeKind::Input, basis(a), vec![w[0]], None, None).unwrap();
        net.add_node(NodeKind::Input, basis(b), vec![w[1]], None, None).unwrap();
        net.add_node(NodeKind::Copy, left.clone(), vec![w[0], w[2], w[4]], None, None).unwrap();
        net.add_node(NodeKind::Copy, right.clone(), vec![w[1], w[3], w[5]], None, None).unwrap();
        net.add_node(NodeKind::Phase, p.clone(), vec![w[4], w[5]], None, None).unwrap();
        net.add_node(NodeKind::Output, basis(c), vec![w[2]], None, None).unwrap();
        net.add_node(NodeKind::Output, basis(d), vec![w[3]], None, None).unwrap();
        let v = brute_force_contract(&net, DEFAULT_COST_BOUND).unwrap();
        let expected = match ((a, b) == (c, d), a & b) {
            (false, _) => 0.0,
            (true, 1) => -1.0,
            (true, _) => 1.0,
        };
        worst = worst.max((v - C64::new(expected, 0.0)).norm());
    }

    // Copy tensor with (1, 1) on its third leg.
    let copy = LabeledTensor { labels: vec![0, 1, 2], tensor: Tensor::copy(3) };
    let ones = LabeledTensor { labels: vec![2], tensor: Tensor::vector(&[C64::new(1.0, 0.0); 2]) };
    let id = copy.contract(&ones).tensor;
    let id_err = id.max_abs_diff(&Tensor::identity(2));

    (
        worst < 1e-12 && id_err < 1e-12,
        format!("max CZ entry error {worst:.1e} over 16 assignments, identity error {id_err:.1e}"),
    )
}

fn linear_fit_r2(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

fn timing_linearity() -> (bool, String) {
    let ns = [100usize, 200, 400];
    let config = RewriteConfig::default();
    let cases: Vec<_> = ns
        .iter()
        .map(|&n| (generate_chain_circuit(n, 16, 5).unwrap(), transim::circuit::Outcome::zeros(n)))
        .collect();
    // Repeats cycle through the sizes so slow stretches hit all of them.
    let mut times = vec![f64::INFINITY; ns.len()];
    for round in 0..10 {
        for (best, (c, outcome)) in times.iter_mut().zip(&cases) {
            let start = Instant::now();
            let lc = renormalize(c, outcome, &config).unwrap();
            assert_eq!(lc.k, 16);
            amplitude_transversal(&lc, MemoryCap::default()).unwrap();
            if round > 0 {
                *best = best.min(start.elapsed().as_secs_f64());
            }
        }
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let r2 = linear_fit_r2(&xs, &times);
    (
        r2 > 0.99,
        format!("k = 16, wall time {times:.3?}s for n = {ns:?}, R^2 {r2:.4}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let circuit = generate_chain_circuit(12, CHAIN_DEPTH, CHAIN_SEED).unwrap();
    let table = TableSource::from_circuit(&circuit, MemoryCap::default()).unwrap();

    let lines = vec![
        criterion(1, equivalence_suite),
        criterion(2, planner),
        criterion(3, sweet_spot),
        criterion(4, || sampling_experiment(&table)),
        criterion(5, || porter_thomas(&table)),
        criterion(6, widgets),
        criterion(7, timing_linearity),
    ];
    for l in &lines {
        println!(
            "{} criterion {}: {} [{:.1}s]",
            if l.passed { "PASS" } else { "FAIL" },
            l.id,
            l.detail,
            l.seconds
        );
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        lines.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
