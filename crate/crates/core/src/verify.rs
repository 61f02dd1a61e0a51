//! Brute-force oracles and randomized equivalence fuzzing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitGenerator, GateSet, Outcome, QubitLayout};
use crate::error::{invalid, Error, Result};
use crate::network::{NodeId, TensorNetwork};
use crate::rewrite::{plan_logical_qubits, renormalize, GateMatrix, LogicalCircuit, RewriteConfig};
use crate::statevector::{amplitude_direct, amplitude_transversal};
use crate::C64;

pub const DEFAULT_COST_BOUND: u64 = 1 << 26;
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
pub const AMPLITUDE_TOLERANCE: f64 = 1e-10;

/// Sums a closed network over every assignment of its wires, taken in wire
/// id order. A node is evaluated once its last leg is fixed and zero partial
/// products are pruned, so `cost_bound` caps the number of visited partial
/// assignments rather than the full index space.
pub fn brute_force_contract(net: &TensorNetwork, cost_bound: u64) -> Result<C64> {
    let wires = net.live_wires();
    if let Some(&w) = wires.iter().find(|&&w| net.wire(w).ends.len() != 2) {
        return invalid(format!("wire {w} is open; the network must be closed"));
    }
    let mut pos = vec![usize::MAX; net.num_wires()];
    for (i, &w) in wires.iter().enumerate() {
        pos[w] = i;
    }

    let mut scalar = C64::new(1.0, 0.0);
    let mut completes: Vec<Vec<NodeId>> = vec![Vec::new(); wires.len()];
    for (id, node) in net.nodes() {
        match node.legs.iter().map(|&w| pos[w]).max() {
            Some(p) => completes[p].push(id),
            None => scalar *= node.tensor.data()[0],
        }
    }

    let mut search = Search {
        net,
        wires: &wires,
        completes: &completes,
        assignment: vec![0; net.num_wires()],
        visits: 0,
        bound: cost_bound,
    };
    if wires.is_empty() {
        return Ok(scalar);
    }
    let sum = search.descend(0, scalar)?;
    Ok(sum)
}

struct Search<'a> {
    net: &'a TensorNetwork,
    wires: &'a [usize],
    completes: &'a [Vec<NodeId>],
    assignment: Vec<usize>,
    visits: u64,
    bound: u64,
}

impl Search<'_> {
    fn descend(&mut self, p: usize, partial: C64) -> Result<C64> {
        let w = self.wires[p];
        let mut sum = C64::new(0.0, 0.0);
        for v in 0..self.net.wire(w).dim {
            self.visits += 1;
            if self.visits > self.bound {
                return Err(Error::ResourceLimit {
                    what: "brute-force contraction visits".into(),
                    required: self.visits as usize,
                    cap: self.bound as usize,
                });
            }
            self.assignment[w] = v;
            let mut z = partial;
            for &id in &self.completes[p] {
                let node = self.net.node(id).expect("live node");
                let index: Vec<usize> = node.legs.iter().map(|&l| self.assignment[l]).collect();
                z *= node.tensor.get(&index);
                if z == C64::new(0.0, 0.0) {
                    break;
                }
            }
            if z == C64::new(0.0, 0.0) {
                continue;
            }
            sum += if p + 1 == self.wires.len() {
                z
            } else {
                self.descend(p + 1, z)?
            };
        }
        Ok(sum)
    }
}

/// A closed network paired with its brute-force value.
#[derive(Clone, Debug)]
pub struct ContractionOracle {
    pub network: TensorNetwork,
    pub result: C64,
}

impl ContractionOracle {
    pub fn new(network: TensorNetwork, cost_bound: u64) -> Result<Self> {
        let result = brute_force_contract(&network, cost_bound)?;
        Ok(Self { network, result })
    }

    /// Largest deviation between the brute-force value and pairwise folds in
    /// forward and reverse node order.
    pub fn order_deviation(&self) -> Result<f64> {
        let mut ids = self.network.node_ids();
        let forward = closed_value(&self.network, &ids)?;
        ids.reverse();
        let reverse = closed_value(&self.network, &ids)?;
        Ok((forward - self.result).norm().max((reverse - self.result).norm()))
    }
}

fn closed_value(net: &TensorNetwork, order: &[NodeId]) -> Result<C64> {
    let t = net.contract_in_order(order)?;
    if !t.labels.is_empty() {
        return invalid(format!("{} open legs remain after contraction", t.labels.len()));
    }
    Ok(t.tensor.data()[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Chain,
    Grid,
    Bristlecone,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Chain, Family::Grid, Family::Bristlecone];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzBounds {
    pub chain_max_n: usize,
    pub chain_max_depth: usize,
    pub grid_max_side: usize,
    pub grid_max_depth: usize,
    pub bristlecone_max_side: usize,
    pub bristlecone_max_depth: usize,
}

impl Default for FuzzBounds {
    fn default() -> Self {
        Self {
            chain_max_n: 12,
            chain_max_depth: 8,
            grid_max_side: 4,
            grid_max_depth: 16,
            bristlecone_max_side: 4,
            bristlecone_max_depth: 12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub trials: usize,
    pub families: Vec<Family>,
    pub bounds: FuzzBounds,
    pub seed: u64,
    pub rewrite: RewriteConfig,
    pub tolerance: f64,
}

impl FuzzConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            families: Family::ALL.to_vec(),
            bounds: FuzzBounds::default(),
            seed,
            rewrite: RewriteConfig::default(),
            tolerance: AMPLITUDE_TOLERANCE,
        }
    }

    pub fn families(mut self, families: &[Family]) -> Self {
        self.families = families.to_vec();
        self
    }

    pub fn bounds(mut self, bounds: FuzzBounds) -> Self {
        self.bounds = bounds;
        self
    }
}

/// One trial: everything needed to rerun it, plus both amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzCase {
    pub trial: usize,
    pub layout: QubitLayout,
    pub depth: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub expected: Option<C64>,
    pub actual: Option<C64>,
    pub abs_error: Option<f64>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl FuzzCase {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("fuzz case serializes")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub trials: usize,
    pub max_error: f64,
    pub cases: Vec<FuzzCase>,
}

impl FuzzReport {
    pub fn failures(&self) -> impl Iterator<Item = &FuzzCase> {
        self.cases.iter().filter(|c| !c.passed)
    }

    pub fn failure_count(&self) -> usize {
        self.failures().count()
    }

    /// Failed cases, one JSON object per line.
    pub fn failure_lines(&self) -> String {
        self.failures().map(|c| c.to_json_line() + "\n").collect()
    }

    pub fn case_lines(&self) -> String {
        self.cases.iter().map(|c| c.to_json_line() + "\n").collect()
    }
}

/// Checks that the largest case the bounds allow fits the memory cap on both
/// the direct and the transversal path.
pub fn check_bounds(cfg: &FuzzConfig) -> Result<()> {
    let b = &cfg.bounds;
    let cap = cfg.rewrite.memory_cap;
    for family in &cfg.families {
        let (layout, depth) = match family {
            Family::Chain => (QubitLayout::chain(b.chain_max_n)?, b.chain_max_depth),
            Family::Grid => (QubitLayout::grid(b.grid_max_side, b.grid_max_side)?, b.grid_max_depth),
            Family::Bristlecone => (
                QubitLayout::bristlecone(b.bristlecone_max_side, b.bristlecone_max_side)?,
                b.bristlecone_max_depth,
            ),
        };
        cap.check("direct simulation", layout.num_qubits())?;
        cap.check("logical qubits", plan_logical_qubits(&layout, depth).0)?;
    }
    Ok(())
}

pub fn fuzz_equivalence(cfg: &FuzzConfig) -> Result<FuzzReport> {
    fuzz_equivalence_with(cfg, |_, _| {})
}

/// Like [`fuzz_equivalence`], with `corrupt` applied to every logical circuit
/// before it is evaluated.
pub fn fuzz_equivalence_with<F>(cfg: &FuzzConfig, corrupt: F) -> Result<FuzzReport>
where
    F: Fn(usize, &mut LogicalCircuit) + Sync,
{
    if cfg.families.is_empty() {
        return invalid("no layout families to fuzz");
    }
    let cases: Vec<FuzzCase> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, trial, &corrupt))
        .collect::<Result<_>>()?;
    let max_error = cases
        .iter()
        .filter_map(|c| c.abs_error)
        .fold(0.0, f64::max);
    Ok(FuzzReport {
        trials: cfg.trials,
        max_error,
        cases,
    })
}

fn draw_case(cfg: &FuzzConfig, trial: usize) -> Result<(QubitLayout, usize, u64, Outcome)> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let b = &cfg.bounds;
    let family = cfg.families[trial % cfg.families.len()];
    let rect = |rng: &mut ChaCha20Rng, side: usize| -> Result<(usize, usize)> {
        if side < 2 {
            return invalid("rectangular layouts need a side bound of at least 2");
        }
        let n = rng.gen_range(2..=side);
        Ok((rng.gen_range(n..=side), n))
    };
    let (layout, max_depth) = match family {
        Family::Chain => {
            if b.chain_max_n < 2 {
                return invalid("chain bound needs at least 2 qubits");
            }
            (QubitLayout::chain(rng.gen_range(2..=b.chain_max_n))?, b.chain_max_depth)
        }
        Family::Grid => {
            let (m, n) = rect(&mut rng, b.grid_max_side)?;
            (QubitLayout::grid(m, n)?, b.grid_max_depth)
        }
        Family::Bristlecone => {
            let (m, n) = rect(&mut rng, b.bristlecone_max_side)?;
            (QubitLayout::bristlecone(m, n)?, b.bristlecone_max_depth)
        }
    };
    if max_depth == 0 {
        return invalid("depth bound must be positive");
    }
    let depth = rng.gen_range(1..=max_depth);
    let seed = rng.gen();
    let bits = (0..layout.num_qubits()).map(|_| rng.gen()).collect();
    Ok((layout, depth, seed, Outcome::from_bits(bits)))
}

fn run_trial<F>(cfg: &FuzzConfig, trial: usize, corrupt: &F) -> Result<FuzzCase>
where
    F: Fn(usize, &mut LogicalCircuit),
{
    let (layout, depth, seed, outcome) = draw_case(cfg, trial)?;
    let mut case = FuzzCase {
        trial,
        layout,
        depth,
        seed,
        outcome: outcome.clone(),
        expected: None,
        actual: None,
        abs_error: None,
        passed: false,
        error: None,
    };
    let circuit = CircuitGenerator::new(GateSet::default()).generate(layout, depth, seed)?;
    let cap = cfg.rewrite.memory_cap;
    match amplitude_direct(&circuit, &outcome, cap) {
        Ok(r) => case.expected = Some(r.value),
        Err(e) => case.error = Some(format!("direct: {e}")),
    }
    let actual = renormalize(&circuit, &outcome, &cfg.rewrite).and_then(|mut lc| {
        corrupt(trial, &mut lc);
        amplitude_transversal(&lc, cap)
    });
    match actual {
        Ok(r) => case.actual = Some(r.value),
        Err(e) => {
            case.error.get_or_insert_with(String::new);
            let msg = case.error.as_mut().expect("set above");
            if !msg.is_empty() {
                msg.push_str("; ");
            }
            msg.push_str(&format!("transversal: {e}"));
        }
    }
    if let (Some(x), Some(y)) = (case.expected, case.actual) {
        let err = (x - y).norm();
        case.abs_error = Some(err);
        case.passed = err < cfg.tolerance;
    }
    Ok(case)
}

/// Fault injection: rescales the first logical gate, or the scalar when the
/// circuit has no gates.
pub fn corrupt_first_gate(lc: &mut LogicalCircuit) {
    let z = C64::from_polar(1.1, 0.3);
    match lc.gates.first_mut().map(|g| &mut g.matrix) {
        Some(GateMatrix::Dense(m)) | Some(GateMatrix::Diagonal(m)) => m.iter_mut().for_each(|x| *x *= z),
        None => lc.scalar *= z,
    }
}
