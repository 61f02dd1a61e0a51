//! Renormalization of a circuit into a circuit over logical qubits.
//!
//! The physical circuit is read as a tensor network and cut into slices
//! (chain qubits or layout rows). Logical qubits run across the slices along
//! entangling lines; the sub-network of each slice becomes a short list of
//! mostly diagonal, mostly non-unitary gates on them. Contracting the
//! resulting [`LogicalCircuit`] from the all-ones boundary to the all-ones
//! boundary and multiplying by its scalar gives `<outcome|U|0>`.

mod events;
mod plan;
mod routing;

use serde::{Deserialize, Serialize};

use crate::circuit::{hadamard, Circuit, Gate, Mat2, Outcome, QubitLayout, IDENTITY, ONE, ZERO};
use crate::error::{invalid, Error, Result};
use crate::network::{circuit_to_network, TensorNetwork};
use crate::statevector::MemoryCap;
use crate::{C64, DEFAULT_MAX_ARITY};

pub use events::{Event, EventGraph, EventId, Factor};
pub use plan::{build_slice_gate, build_slice_plan, BoundaryWire, Slice, SliceGates, SlicePlan};
pub use routing::{active_blocks, plan_logical_qubits};

/// Tolerance for the unitary flag.
const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum GateMatrix {
    /// Row-major `2^j x 2^j`.
    Dense(Vec<C64>),
    /// The `2^j` diagonal entries.
    Diagonal(Vec<C64>),
}

/// Gate on logical qubits; `targets[0]` is the low bit of the local index.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalGate {
    pub targets: Vec<usize>,
    pub matrix: GateMatrix,
    pub diagonal: bool,
    pub unitary: bool,
}

impl LogicalGate {
    pub fn dense(targets: Vec<usize>, m: Vec<C64>) -> Result<Self> {
        let dim = 1usize << targets.len();
        if m.len() != dim * dim {
            return invalid(format!("{} entries for a {}-qubit gate", m.len(), targets.len()));
        }
        let diagonal = (0..dim * dim).all(|i| i / dim == i % dim || m[i] == ZERO);
        let unitary = is_unitary(&m, dim);
        Ok(Self {
            targets,
            matrix: GateMatrix::Dense(m),
            diagonal,
            unitary,
        })
    }

    pub fn diagonal(targets: Vec<usize>, d: Vec<C64>) -> Result<Self> {
        if d.len() != 1 << targets.len() {
            return invalid(format!("{} entries for a {}-qubit diagonal", d.len(), targets.len()));
        }
        let unitary = d.iter().all(|z| (z.norm() - 1.0).abs() < UNITARY_TOL);
        Ok(Self {
            targets,
            matrix: GateMatrix::Diagonal(d),
            diagonal: true,
            unitary,
        })
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    pub fn to_dense(&self) -> Vec<C64> {
        match &self.matrix {
            GateMatrix::Dense(m) => m.clone(),
            GateMatrix::Diagonal(d) => {
                let dim = d.len();
                let mut m = vec![ZERO; dim * dim];
                for (i, &z) in d.iter().enumerate() {
                    m[i * dim + i] = z;
                }
                m
            }
        }
    }
}

fn is_unitary(m: &[C64], dim: usize) -> bool {
    (0..dim).all(|i| {
        (0..dim).all(|j| {
            let z: C64 = (0..dim).map(|r| m[r * dim + i].conj() * m[r * dim + j]).sum();
            let expect = if i == j { ONE } else { ZERO };
            (z - expect).norm() < UNITARY_TOL
        })
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalCircuit {
    pub k: usize,
    pub gates: Vec<LogicalGate>,
    pub input_boundary: Vec<[C64; 2]>,
    pub output_boundary: Vec<[C64; 2]>,
    pub scalar: C64,
}

#[derive(Serialize, Deserialize)]
struct BoundariesRepr {
    input: Vec<[C64; 2]>,
    output: Vec<[C64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct LogicalGateRepr {
    targets: Vec<usize>,
    diagonal: bool,
    unitary: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    diag: Option<Vec<C64>>,
}

#[derive(Serialize, Deserialize)]
struct LogicalCircuitRepr {
    k: usize,
    scalar: C64,
    boundaries: BoundariesRepr,
    gates: Vec<LogicalGateRepr>,
}

impl LogicalCircuit {
    pub fn diagonal_fraction(&self) -> f64 {
        if self.gates.is_empty() {
            return 0.0;
        }
        self.gates.iter().filter(|g| g.diagonal).count() as f64 / self.gates.len() as f64
    }

    fn to_repr(&self) -> LogicalCircuitRepr {
        LogicalCircuitRepr {
            k: self.k,
            scalar: self.scalar,
            boundaries: BoundariesRepr {
                input: self.input_boundary.clone(),
                output: self.output_boundary.clone(),
            },
            gates: self
                .gates
                .iter()
                .map(|g| {
                    let (matrix, diag) = match &g.matrix {
                        GateMatrix::Dense(m) => (Some(m.clone()), None),
                        GateMatrix::Diagonal(d) => (None, Some(d.clone())),
                    };
                    LogicalGateRepr {
                        targets: g.targets.clone(),
                        diagonal: g.diagonal,
                        unitary: g.unitary,
                        matrix,
                        diag,
                    }
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_repr()).expect("logical circuit serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_repr()).expect("logical circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: LogicalCircuitRepr = serde_json::from_str(s)?;
        if r.boundaries.input.len() != r.k || r.boundaries.output.len() != r.k {
            return invalid("boundary length differs from k");
        }
        let gates = r
            .gates
            .into_iter()
            .map(|g| {
                if g.targets.iter().any(|&t| t >= r.k) {
                    return invalid(format!("gate target out of range in {:?}", g.targets));
                }
                let mut gate = match (g.matrix, g.diag) {
                    (Some(m), None) => LogicalGate::dense(g.targets, m)?,
                    (None, Some(d)) => LogicalGate::diagonal(g.targets, d)?,
                    _ => return invalid("gate needs exactly one of matrix or diag"),
                };
                gate.unitary = g.unitary;
                Ok(gate)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k: r.k,
            gates,
            input_boundary: r.boundaries.input,
            output_boundary: r.boundaries.output,
            scalar: r.scalar,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewriteConfig {
    pub max_arity: usize,
    pub memory_cap: MemoryCap,
    /// Merge runs of one-qubit logical gates.
    pub fuse: bool,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        Self {
            max_arity: DEFAULT_MAX_ARITY,
            memory_cap: MemoryCap::default(),
            fuse: true,
        }
    }
}

/// Logical circuit of a slice plan: every slice's gates in order.
pub fn plan_to_circuit(plan: &SlicePlan, fuse: bool) -> Result<LogicalCircuit> {
    let mut gates = Vec::new();
    let mut scalar = ONE;
    for r in 0..plan.num_slices() {
        let sg = build_slice_gate(plan, r)?;
        gates.extend(sg.gates);
        scalar *= sg.scalar;
    }
    if fuse {
        gates = fuse_single_qubit_runs(gates)?;
    }
    Ok(LogicalCircuit {
        k: plan.k,
        gates,
        input_boundary: vec![[ONE, ONE]; plan.k],
        output_boundary: vec![[ONE, ONE]; plan.k],
        scalar,
    })
}

fn mul2(a: &[C64], b: &[C64]) -> Vec<C64> {
    vec![
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Multiplies consecutive one-qubit gates on the same target into one and
/// folds pending one-qubit diagonals into the next diagonal gate on them.
pub fn fuse_single_qubit_runs(gates: Vec<LogicalGate>) -> Result<Vec<LogicalGate>> {
    let mut pending: std::collections::BTreeMap<usize, LogicalGate> = Default::default();
    let mut out = Vec::with_capacity(gates.len());
    for g in gates {
        if g.arity() == 1 {
            let t = g.targets[0];
            let merged = match pending.remove(&t) {
                None => g,
                Some(p) => match (&g.matrix, &p.matrix) {
                    (GateMatrix::Diagonal(a), GateMatrix::Diagonal(b)) => {
                        LogicalGate::diagonal(vec![t], vec![a[0] * b[0], a[1] * b[1]])?
                    }
                    _ => LogicalGate::dense(vec![t], mul2(&g.to_dense(), &p.to_dense()))?,
                },
            };
            pending.insert(t, merged);
            continue;
        }
        let mut g = g;
        for (i, &t) in g.targets.clone().iter().enumerate() {
            let Some(p) = pending.remove(&t) else { continue };
            match (&mut g.matrix, &p.matrix) {
                (GateMatrix::Diagonal(d), GateMatrix::Diagonal(pd)) => {
                    for (l, z) in d.iter_mut().enumerate() {
                        *z *= pd[(l >> i) & 1];
                    }
                }
                _ => out.push(p),
            }
        }
        if let GateMatrix::Diagonal(d) = &g.matrix {
            g = LogicalGate::diagonal(g.targets, d.clone())?;
        }
        out.push(g);
    }
    out.extend(pending.into_values());
    Ok(out)
}

/// Rewrites `c` for `outcome` into a logical circuit with the same amplitude.
pub fn renormalize(c: &Circuit, outcome: &Outcome, config: &RewriteConfig) -> Result<LogicalCircuit> {
    let (k, _) = plan_logical_qubits(&c.layout, c.depth);
    config.memory_cap.check("logical qubits", k)?;
    let net = circuit_to_network(c, outcome)?;
    let plan = build_slice_plan(&net, &c.layout, config.max_arity)?;
    if plan.k != k {
        return Err(Error::PlanFailure {
            node: 0,
            reason: format!("routed {} logical qubits, expected {k}", plan.k),
        });
    }
    plan_to_circuit(&plan, config.fuse)
}

/// Three-qubit circuit: qubits 0 and 1 become a Bell pair through the first
/// CZ, qubit 2 is prepared by `input`, and the second CZ links qubits 1
/// and 2. `middle` acts on qubit 1 between the two CZs and `corrections`
/// are the final single-qubit gates.
pub fn teleport_circuit(input: &Mat2, middle: &Mat2, corrections: &[Mat2; 3]) -> Circuit {
    let h = hadamard();
    let single = |target, matrix, depth| Gate::Single {
        target,
        matrix,
        depth,
    };
    let mut gates = vec![
        single(0, h, 0),
        single(1, h, 0),
        single(2, *input, 0),
        Gate::Cz {
            control: 0,
            target: 1,
            depth: 0,
        },
        single(0, IDENTITY, 1),
        single(1, *middle, 1),
        single(2, IDENTITY, 1),
        Gate::Cz {
            control: 1,
            target: 2,
            depth: 1,
        },
    ];
    for (q, m) in corrections.iter().enumerate() {
        gates.push(single(q, *m, 2));
    }
    Circuit {
        layout: QubitLayout::Chain { n: 3 },
        gates,
        depth: 2,
        seed: 0,
    }
}

/// One logical qubit following the path qubit 0 -> qubit 1 -> qubit 2
/// through both CZs.
pub fn teleport_rewrite(net: &TensorNetwork, fuse: bool) -> Result<LogicalCircuit> {
    let g = EventGraph::from_network(net)?;
    let path = vec![(0, 0), (1, 0), (1, 1), (2, 1)];
    if g.num_qubits() != 3 || path.iter().any(|&(q, t)| g.event_at(q, t).is_none()) {
        return invalid("not a three-qubit teleportation network");
    }
    let plan = plan::build_path_plan(net, &QubitLayout::Chain { n: 3 }, &[path], DEFAULT_MAX_ARITY)?;
    plan_to_circuit(&plan, fuse)
}
