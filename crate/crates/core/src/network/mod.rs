//! Tensor-network view of a circuit.
//!
//! Every gate becomes a node; each CZ is written as copy - P - copy so the
//! bond between two world lines is an explicit entangling line. Inputs are
//! closed with `|0>` and outputs with `<bit|`, so the full contraction of the
//! network of a circuit is the amplitude `<outcome|U|0>`.

mod tensor;
pub mod widgets;

use serde::Serialize;

use crate::circuit::{Circuit, Gate, Outcome, IDENTITY, ONE, ZERO};
use crate::error::{invalid, Result};

pub use tensor::{LabeledTensor, Tensor};
pub use widgets::{connect_nodes, cz_decompose, merge_nodes, phase_matrix, split_node};

pub type NodeId = usize;
pub type WireId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WireKind {
    WorldLine,
    EntanglingLine,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    /// `|0>` on a qubit input; legs `[out]`.
    Input,
    /// `<bit|` on a qubit output; legs `[in]`.
    Output,
    /// Single-qubit gate `M[out][in]`; legs `[out, in]`.
    Gate,
    /// Copy tensor on a world line; legs `[in, out, entangling]`.
    Copy,
    /// Phase matrix `P[a][b] = (-1)^{ab}` joining two copy tensors.
    Phase,
    /// Matrix inserted by [`connect_nodes`].
    Bridge,
    /// Result of a split or merge.
    Generic,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub kind: NodeKind,
    pub tensor: Tensor,
    pub legs: Vec<WireId>,
    pub qubit: Option<usize>,
    pub depth: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Wire {
    pub kind: WireKind,
    pub dim: usize,
    /// One entry for an open wire, two for a bond.
    pub ends: Vec<(NodeId, usize)>,
}

#[derive(Clone, Debug, Default)]
pub struct TensorNetwork {
    nodes: Vec<Option<Node>>,
    wires: Vec<Wire>,
    num_qubits: usize,
}

impl TensorNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn add_wire(&mut self, kind: WireKind, dim: usize) -> WireId {
        self.wires.push(Wire {
            kind,
            dim,
            ends: Vec::with_capacity(2),
        });
        self.wires.len() - 1
    }

    /// Adds a node whose leg `i` attaches to `legs[i]`.
    pub fn add_node(
        &mut self,
        kind: NodeKind,
        tensor: Tensor,
        legs: Vec<WireId>,
        qubit: Option<usize>,
        depth: Option<usize>,
    ) -> Result<NodeId> {
        if tensor.rank() != legs.len() {
            return invalid(format!(
                "tensor of rank {} attached to {} wires",
                tensor.rank(),
                legs.len()
            ));
        }
        let id = self.nodes.len();
        for (leg, &w) in legs.iter().enumerate() {
            let wire = self
                .wires
                .get(w)
                .ok_or_else(|| crate::Error::InvalidArgument(format!("no wire {w}")))?;
            if wire.ends.len() >= 2 {
                return invalid(format!("wire {w} already has two ends"));
            }
            if wire.dim != tensor.dims()[leg] {
                return invalid(format!(
                    "leg {leg} has dimension {} but wire {w} has {}",
                    tensor.dims()[leg],
                    wire.dim
                ));
            }
        }
        for (leg, &w) in legs.iter().enumerate() {
            self.wires[w].ends.push((id, leg));
        }
        self.nodes.push(Some(Node {
            kind,
            tensor,
            legs,
            qubit,
            depth,
        }));
        Ok(id)
    }

    pub(crate) fn remove_node(&mut self, id: NodeId) -> Option<Node> {
        let node = self.nodes.get_mut(id)?.take()?;
        for &w in &node.legs {
            self.wires[w].ends.retain(|&(n, _)| n != id);
        }
        Some(node)
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id).and_then(Option::as_ref)
    }

    pub fn wire(&self, id: WireId) -> &Wire {
        &self.wires[id]
    }

    pub fn num_wires(&self) -> usize {
        self.wires.len()
    }

    /// Live nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|n| (i, n)))
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        self.nodes().map(|(i, _)| i).collect()
    }

    /// Wires with a single attached leg.
    pub fn open_wires(&self) -> Vec<WireId> {
        (0..self.wires.len())
            .filter(|&w| self.wires[w].ends.len() == 1)
            .collect()
    }

    /// Wires attached to at least one live node.
    pub fn live_wires(&self) -> Vec<WireId> {
        (0..self.wires.len())
            .filter(|&w| !self.wires[w].ends.is_empty())
            .collect()
    }

    /// The node on the other end of `wire` from `from`.
    pub fn other_end(&self, wire: WireId, from: NodeId) -> Option<(NodeId, usize)> {
        self.wires[wire].ends.iter().copied().find(|&(n, _)| n != from)
    }

    pub fn labeled(&self, id: NodeId) -> Option<LabeledTensor> {
        self.node(id).map(|n| LabeledTensor {
            labels: n.legs.clone(),
            tensor: n.tensor.clone(),
        })
    }

    /// Contracts nodes pairwise in the given order, folding left. Open wires
    /// remain as legs of the result in first-seen order.
    pub fn contract_in_order(&self, order: &[NodeId]) -> Result<LabeledTensor> {
        let mut acc = LabeledTensor {
            labels: Vec::new(),
            tensor: Tensor::scalar(ONE),
        };
        for &id in order {
            let t = self
                .labeled(id)
                .ok_or_else(|| crate::Error::InvalidArgument(format!("no node {id}")))?;
            acc = acc.contract(&t);
        }
        Ok(acc)
    }
}

/// Builds the closed network whose contraction is `<outcome|U_C|0>`.
pub fn circuit_to_network(c: &Circuit, outcome: &Outcome) -> Result<TensorNetwork> {
    let nq = c.num_qubits();
    if outcome.len() != nq {
        return invalid(format!(
            "outcome has {} bits but the circuit has {nq} qubits",
            outcome.len()
        ));
    }
    let mut net = TensorNetwork::new();
    net.num_qubits = nq;
    let zero = Tensor::vector(&[ONE, ZERO]);
    let mut open = Vec::with_capacity(nq);
    for q in 0..nq {
        let w = net.add_wire(WireKind::Boundary, 2);
        net.add_node(NodeKind::Input, zero.clone(), vec![w], Some(q), None)?;
        open.push(w);
    }
    let phase = Tensor::from_mat2(&phase_matrix());
    for g in &c.gates {
        match *g {
            Gate::Single {
                target,
                ref matrix,
                depth,
            } => {
                if target >= nq {
                    return invalid(format!("gate target {target} out of range"));
                }
                let out = net.add_wire(WireKind::WorldLine, 2);
                net.add_node(
                    NodeKind::Gate,
                    Tensor::from_mat2(matrix),
                    vec![out, open[target]],
                    Some(target),
                    Some(depth),
                )?;
                open[target] = out;
            }
            Gate::Cz {
                control,
                target,
                depth,
            } => {
                if control >= nq || target >= nq || control == target {
                    return invalid(format!("bad CZ targets ({control}, {target})"));
                }
                let ea = net.add_wire(WireKind::EntanglingLine, 2);
                let eb = net.add_wire(WireKind::EntanglingLine, 2);
                for (q, e) in [(control, ea), (target, eb)] {
                    let out = net.add_wire(WireKind::WorldLine, 2);
                    net.add_node(
                        NodeKind::Copy,
                        Tensor::copy(3),
                        vec![open[q], out, e],
                        Some(q),
                        Some(depth),
                    )?;
                    open[q] = out;
                }
                net.add_node(NodeKind::Phase, phase.clone(), vec![ea, eb], None, Some(depth))?;
            }
        }
    }
    for (q, &w) in open.iter().enumerate() {
        let v = if outcome.bit(q) { [ZERO, ONE] } else { [ONE, ZERO] };
        net.add_node(NodeKind::Output, Tensor::vector(&v), vec![w], Some(q), None)?;
    }
    // World-line wires that touch a boundary node are boundary wires.
    for w in 0..net.wires.len() {
        let touches_boundary = net.wires[w].ends.iter().any(|&(n, _)| {
            matches!(
                net.node(n).map(|x| x.kind),
                Some(NodeKind::Input | NodeKind::Output)
            )
        });
        if touches_boundary {
            net.wires[w].kind = WireKind::Boundary;
        }
    }
    Ok(net)
}

/// Identity gate in tensor form, handy in tests.
pub fn identity_gate() -> Tensor {
    Tensor::from_mat2(&IDENTITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::QubitLayout;

    fn empty(n: usize) -> Circuit {
        Circuit {
            layout: QubitLayout::Chain { n },
            gates: Vec::new(),
            depth: 0,
            seed: 0,
        }
    }

    #[test]
    fn empty_circuit_contracts_to_one() {
        let net = circuit_to_network(&empty(1), &"0".parse().unwrap()).unwrap();
        let r = net.contract_in_order(&net.node_ids()).unwrap();
        assert!(r.labels.is_empty());
        assert_eq!(r.tensor.data()[0], ONE);
        let net = circuit_to_network(&empty(1), &"1".parse().unwrap()).unwrap();
        let r = net.contract_in_order(&net.node_ids()).unwrap();
        assert_eq!(r.tensor.data()[0], ZERO);
    }

    #[test]
    fn single_cz_on_zeros() {
        let mut c = empty(2);
        c.depth = 1;
        c.gates.push(Gate::Cz {
            control: 0,
            target: 1,
            depth: 0,
        });
        let net = circuit_to_network(&c, &"00".parse().unwrap()).unwrap();
        assert!(net.open_wires().is_empty());
        let r = net.contract_in_order(&net.node_ids()).unwrap();
        assert!((r.tensor.data()[0] - ONE).norm() < 1e-15);
        let kinds: Vec<_> = net.nodes().map(|(_, n)| n.kind).collect();
        assert_eq!(kinds.iter().filter(|k| **k == NodeKind::Copy).count(), 2);
        assert_eq!(kinds.iter().filter(|k| **k == NodeKind::Phase).count(), 1);
    }

    #[test]
    fn outcome_length_checked() {
        assert!(circuit_to_network(&empty(2), &"0".parse().unwrap()).is_err());
    }
}
