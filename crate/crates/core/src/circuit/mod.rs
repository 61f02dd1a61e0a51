//! Circuit representation and the random circuit families.
//!
//! A circuit is a list of gates tagged with a depth index. Depth counts CZ
//! layers: cycle `d` is a sub-layer of single-qubit gates followed by the CZ
//! layer `d`. A final single-qubit sub-layer carries index `depth`.

mod gates;
mod layout;
mod outcome;
pub mod schedule;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::C64;

pub use gates::{
    hadamard, mat2_dagger, mat2_mul, mat2_transpose, random_single_qubit_gate, sqrt_x, sqrt_y,
    su2_from_angles, t_gate, unitarity_error, GateSet, Mat2, IDENTITY, ONE, ZERO,
};
pub use layout::QubitLayout;
pub use outcome::Outcome;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Single {
        target: usize,
        matrix: Mat2,
        depth: usize,
    },
    Cz {
        control: usize,
        target: usize,
        depth: usize,
    },
}

impl Gate {
    pub fn depth(&self) -> usize {
        match *self {
            Gate::Single { depth, .. } | Gate::Cz { depth, .. } => depth,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Single { target, .. } => vec![target],
            Gate::Cz {
                control, target, ..
            } => vec![control, target],
        }
    }

    pub fn is_cz(&self) -> bool {
        matches!(self, Gate::Cz { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub layout: QubitLayout,
    pub gates: Vec<Gate>,
    /// Number of CZ layers.
    pub depth: usize,
    pub seed: u64,
}

impl Circuit {
    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn cz_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cz()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CircuitRepr::from(self)).expect("circuit serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&CircuitRepr::from(self)).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: CircuitRepr = serde_json::from_str(s)?;
        repr.try_into()
    }
}

/// Random circuit generator for the three layout families.
#[derive(Clone, Copy, Debug, Default)]
pub struct CircuitGenerator {
    pub gate_set: GateSet,
}

impl CircuitGenerator {
    pub fn new(gate_set: GateSet) -> Self {
        Self { gate_set }
    }

    /// Builds `depth` cycles on `layout`. Every qubit gets a fresh random gate
    /// before every CZ layer and once more at the end; CZ layers follow the
    /// layout's schedule. The RNG is ChaCha20 seeded from `seed`.
    pub fn generate(&self, layout: QubitLayout, depth: usize, seed: u64) -> Result<Circuit> {
        if depth < 1 {
            return invalid("depth must be at least 1");
        }
        let nq = layout.num_qubits();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut gates = Vec::with_capacity((depth + 1) * nq + depth * nq / 2);
        for d in 0..=depth {
            for q in 0..nq {
                gates.push(Gate::Single {
                    target: q,
                    matrix: random_single_qubit_gate(&mut rng, self.gate_set),
                    depth: d,
                });
            }
            if d < depth {
                for (a, b) in schedule::cz_layer(&layout, d) {
                    gates.push(Gate::Cz {
                        control: a,
                        target: b,
                        depth: d,
                    });
                }
            }
        }
        Ok(Circuit {
            layout,
            gates,
            depth,
            seed,
        })
    }
}

pub fn generate_chain_circuit(n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    CircuitGenerator::default().generate(QubitLayout::chain(n)?, depth, seed)
}

pub fn generate_grid_circuit(m: usize, n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    CircuitGenerator::default().generate(QubitLayout::grid(m, n)?, depth, seed)
}

pub fn generate_bristlecone_circuit(m: usize, n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    CircuitGenerator::default().generate(QubitLayout::bristlecone(m, n)?, depth, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Range,
    Adjacency,
    Disjointness,
    Order,
    Depth,
    Unitarity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub gate: usize,
    pub rule: Rule,
    pub detail: String,
}

/// Unitarity tolerance used by [`validate_circuit`].
pub const UNITARITY_TOL: f64 = 1e-10;

/// Checks the structural invariants of `c`. Disjointness is checked per
/// sub-layer: within one depth index no qubit carries two single-qubit gates
/// or two CZs, and single-qubit gates precede the CZs of their cycle.
pub fn validate_circuit(c: &Circuit) -> Vec<Violation> {
    let nq = c.num_qubits();
    let mut out = Vec::new();
    let mut push = |gate: usize, rule: Rule, detail: String| {
        out.push(Violation { gate, rule, detail })
    };
    // (depth, qubit) -> index of last single / cz gate seen
    let mut single_seen = std::collections::HashMap::new();
    let mut cz_seen = std::collections::HashMap::new();
    let mut last_depth = 0;
    let mut cz_started_at = None;
    for (i, g) in c.gates.iter().enumerate() {
        let d = g.depth();
        if d < last_depth {
            push(i, Rule::Order, format!("depth {d} after depth {last_depth}"));
        }
        if d > last_depth {
            cz_started_at = None;
        }
        last_depth = last_depth.max(d);
        if g.qubits().iter().any(|&q| q >= nq) {
            push(i, Rule::Range, format!("qubit out of range for {nq} qubits"));
            continue;
        }
        match g {
            Gate::Single { target, matrix, .. } => {
                if d > c.depth {
                    push(i, Rule::Depth, format!("single-qubit gate at depth {d} > {}", c.depth));
                }
                if cz_started_at == Some(d) {
                    push(i, Rule::Order, format!("single-qubit gate after CZs of cycle {d}"));
                }
                if let Some(j) = single_seen.insert((d, *target), i) {
                    push(i, Rule::Disjointness, format!("qubit {target} already used by gate {j}"));
                }
                let err = unitarity_error(matrix);
                if err > UNITARITY_TOL {
                    push(i, Rule::Unitarity, format!("|U^dag U - I| = {err:e}"));
                }
            }
            Gate::Cz {
                control, target, ..
            } => {
                cz_started_at = Some(d);
                if d >= c.depth {
                    push(i, Rule::Depth, format!("CZ at depth {d} >= {}", c.depth));
                }
                if !c.layout.are_neighbors(*control, *target) {
                    push(i, Rule::Adjacency, format!("qubits {control} and {target} are not coupled"));
                }
                for q in [*control, *target] {
                    if let Some(j) = cz_seen.insert((d, q), i) {
                        push(i, Rule::Disjointness, format!("qubit {q} already used by gate {j}"));
                    }
                }
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    layout: QubitLayout,
    depth: usize,
    seed: u64,
    gates: Vec<GateRepr>,
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    kind: String,
    targets: Vec<usize>,
    depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<[f64; 2]>>,
}

impl From<&Circuit> for CircuitRepr {
    fn from(c: &Circuit) -> Self {
        let gates = c
            .gates
            .iter()
            .map(|g| match g {
                Gate::Single {
                    target,
                    matrix,
                    depth,
                } => GateRepr {
                    kind: "u".into(),
                    targets: vec![*target],
                    depth: *depth,
                    matrix: Some(matrix.iter().flatten().map(|z| [z.re, z.im]).collect()),
                },
                Gate::Cz {
                    control,
                    target,
                    depth,
                } => GateRepr {
                    kind: "cz".into(),
                    targets: vec![*control, *target],
                    depth: *depth,
                    matrix: None,
                },
            })
            .collect();
        Self {
            layout: c.layout,
            depth: c.depth,
            seed: c.seed,
            gates,
        }
    }
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = Error;

    fn try_from(r: CircuitRepr) -> Result<Self> {
        let layout = match r.layout {
            QubitLayout::Chain { n } => QubitLayout::chain(n)?,
            QubitLayout::Grid { m, n } => QubitLayout::grid(m, n)?,
            QubitLayout::Bristlecone { m, n } => QubitLayout::bristlecone(m, n)?,
        };
        let gates = r
            .gates
            .into_iter()
            .enumerate()
            .map(|(i, g)| match (g.kind.as_str(), g.targets.as_slice()) {
                ("u", &[target]) => {
                    let m = g
                        .matrix
                        .ok_or_else(|| Error::InvalidArgument(format!("gate {i}: missing matrix")))?;
                    if m.len() != 4 {
                        return invalid(format!("gate {i}: matrix needs 4 entries"));
                    }
                    let z = |k: usize| C64::new(m[k][0], m[k][1]);
                    Ok(Gate::Single {
                        target,
                        matrix: [[z(0), z(1)], [z(2), z(3)]],
                        depth: g.depth,
                    })
                }
                ("cz", &[control, target]) => Ok(Gate::Cz {
                    control,
                    target,
                    depth: g.depth,
                }),
                (kind, t) => invalid(format!("gate {i}: bad kind {kind:?} with {} targets", t.len())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            layout,
            gates,
            depth: r.depth,
            seed: r.seed,
        })
    }
}
