//! Slice plans: slot trajectories turned into an ordered list of logical
//! operations, grouped by slice.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;

use super::events::{EventGraph, EventId, Factor};
use super::routing;
use super::LogicalGate;
use crate::circuit::{QubitLayout, ONE};
use crate::error::{Error, Result};
use crate::network::{NodeId, NodeKind, TensorNetwork, WireId};
use crate::C64;

/// Most summed variables allowed inside one local contraction.
const MAX_INNER_VARS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Slice {
    pub index: usize,
    /// Network nodes owned by the slice, in id order.
    pub nodes: Vec<NodeId>,
}

/// A logical qubit crossing a slice boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryWire {
    pub logical: usize,
    /// Entangling line carrying it, if the crossing is a real CZ.
    pub wire: Option<WireId>,
}

#[derive(Clone, Debug)]
enum Op {
    /// Moves `slot` to its next event; `matrix[new][old]`, row-major.
    Transfer { slot: usize, matrix: [C64; 4] },
    /// Diagonal gate on the slots holding `targets`, summing `inner`.
    Local {
        targets: Vec<(usize, EventId)>,
        inner: Vec<EventId>,
        factors: Vec<usize>,
    },
}

#[derive(Clone, Debug)]
pub struct SlicePlan {
    pub k: usize,
    pub slices: Vec<Slice>,
    /// `boundaries[r]` lists the logical qubits crossing from slice `r` to
    /// `r + 1`, by logical index.
    pub boundaries: Vec<Vec<BoundaryWire>>,
    trajectories: Vec<Vec<EventId>>,
    graph: EventGraph,
    factors: Vec<Factor>,
    ops: Vec<Op>,
    schedule: Vec<Vec<usize>>,
    slice_scalars: Vec<C64>,
}

/// Gates of one slice and the scalar of its fully internal parts.
#[derive(Clone, Debug)]
pub struct SliceGates {
    pub gates: Vec<LogicalGate>,
    pub scalar: C64,
}

fn failure<T>(node: NodeId, reason: impl Into<String>) -> Result<T> {
    Err(Error::PlanFailure {
        node,
        reason: reason.into(),
    })
}

/// Layer count of a network: one past the last CZ layer, or the last gate
/// depth if that is larger.
fn network_depth(net: &TensorNetwork) -> usize {
    net.nodes()
        .filter_map(|(_, n)| match n.kind {
            NodeKind::Gate => n.depth,
            NodeKind::Copy => n.depth.map(|d| d + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// Slices along the layout and routes one slot per logical qubit.
pub fn build_slice_plan(
    net: &TensorNetwork,
    layout: &QubitLayout,
    max_arity: usize,
) -> Result<SlicePlan> {
    let slices = assign_slices(net, layout)?;
    let mut graph = EventGraph::from_network(net)?;
    let depth = network_depth(net);
    let trajectories = routing::route(layout, depth, &mut graph)?;
    assemble(net, layout, slices, graph, trajectories, max_arity)
}

/// Plan with caller-supplied trajectories of `(qubit, layer)` events.
pub(crate) fn build_path_plan(
    net: &TensorNetwork,
    layout: &QubitLayout,
    paths: &[Vec<(usize, usize)>],
    max_arity: usize,
) -> Result<SlicePlan> {
    let slices = assign_slices(net, layout)?;
    let mut graph = EventGraph::from_network(net)?;
    let trajectories = paths
        .iter()
        .map(|p| p.iter().map(|&(q, t)| graph.ensure(q, t)).collect())
        .collect::<Result<Vec<_>>>()?;
    assemble(net, layout, slices, graph, trajectories, max_arity)
}

fn assign_slices(net: &TensorNetwork, layout: &QubitLayout) -> Result<Vec<Slice>> {
    if net.num_qubits() != layout.num_qubits() {
        return failure(
            0,
            format!(
                "network has {} qubits, layout has {}",
                net.num_qubits(),
                layout.num_qubits()
            ),
        );
    }
    let mut slices: Vec<Slice> = (0..layout.num_slices())
        .map(|index| Slice {
            index,
            nodes: Vec::new(),
        })
        .collect();
    for (id, node) in net.nodes() {
        let s = match (node.kind, node.qubit) {
            (NodeKind::Phase, _) => {
                let ends: Vec<usize> = node
                    .legs
                    .iter()
                    .filter_map(|&w| net.other_end(w, id))
                    .filter_map(|(n, _)| net.node(n).and_then(|x| x.qubit))
                    .map(|q| layout.slice_of(q))
                    .collect();
                if ends.len() != 2 {
                    return failure(id, "phase node must join two world lines");
                }
                if ends[0].abs_diff(ends[1]) > 1 {
                    return failure(id, "CZ spans non-adjacent slices");
                }
                ends[0].min(ends[1])
            }
            (_, Some(q)) if q < layout.num_qubits() => layout.slice_of(q),
            _ => return failure(id, format!("{:?} node has no slice", node.kind)),
        };
        slices[s].nodes.push(id);
    }
    Ok(slices)
}

fn assemble(
    net: &TensorNetwork,
    layout: &QubitLayout,
    slices: Vec<Slice>,
    graph: EventGraph,
    trajectories: Vec<Vec<EventId>>,
    max_arity: usize,
) -> Result<SlicePlan> {
    let ns = slices.len();
    let ne = graph.events.len();
    let ev_slice = |e: EventId| layout.slice_of(graph.events[e].qubit);
    let ev_node = |e: EventId| graph.events[e].node.unwrap_or(0);

    let mut pos: Vec<Option<(usize, usize)>> = vec![None; ne];
    for (s, traj) in trajectories.iter().enumerate() {
        for (p, &e) in traj.iter().enumerate() {
            if pos[e].is_some() {
                return failure(ev_node(e), format!("event on two slot positions (slot {s})"));
            }
            pos[e] = Some((s, p));
        }
    }

    let (factors, line_scalars) = graph.factors();
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); ne];
    for (f, fac) in factors.iter().enumerate() {
        for &v in &fac.vars {
            touching[v].push(f);
        }
    }
    let mut consumed = vec![false; factors.len()];
    let mut ops = Vec::new();
    let mut op_slice = Vec::new();
    let mut boundaries: Vec<Vec<BoundaryWire>> = vec![Vec::new(); ns.saturating_sub(1)];
    let mut tid: Vec<Vec<usize>> = Vec::with_capacity(trajectories.len());

    for (s, traj) in trajectories.iter().enumerate() {
        let mut ids = vec![usize::MAX];
        for p in 1..traj.len() {
            let (a, b) = (traj[p - 1], traj[p]);
            let found = touching[a].iter().copied().find(|&f| {
                !consumed[f] && factors[f].vars.len() == 2 && factors[f].vars.contains(&b)
            });
            let matrix = match found {
                Some(f) => {
                    consumed[f] = true;
                    let fac = &factors[f];
                    let a_first = fac.vars[0] == a;
                    let mut m = [ONE; 4];
                    for y in 0..2 {
                        for x in 0..2 {
                            let idx = if a_first { x + 2 * y } else { y + 2 * x };
                            m[2 * y + x] = fac.table[idx];
                        }
                    }
                    m
                }
                None => [ONE; 4],
            };
            let (sa, sb) = (ev_slice(a), ev_slice(b));
            if sa != sb {
                if sa.abs_diff(sb) > 1 {
                    return failure(ev_node(b), "slot jumps over a slice");
                }
                let wire = match (graph.events[a].partner, graph.events[a].node) {
                    (Some(pb), Some(node)) if pb == b => net.node(node).map(|n| n.legs[2]),
                    _ => None,
                };
                boundaries[sa.min(sb)].push(BoundaryWire { logical: s, wire });
            }
            ids.push(ops.len());
            ops.push(Op::Transfer { slot: s, matrix });
            op_slice.push(sb);
        }
        tid.push(ids);
    }

    // Events outside every trajectory are summed inside local gates; each
    // connected group of them becomes one gate.
    let mut parent: Vec<usize> = (0..ne).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (f, fac) in factors.iter().enumerate() {
        if consumed[f] {
            continue;
        }
        let dangling: Vec<_> = fac.vars.iter().copied().filter(|&v| pos[v].is_none()).collect();
        for w in dangling.windows(2) {
            let (ra, rb) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: HashMap<usize, usize> = HashMap::new();
    // (inner events, factors)
    let mut locals: Vec<(Vec<EventId>, Vec<usize>)> = Vec::new();
    for e in 0..ne {
        if pos[e].is_none() {
            let root = find(&mut parent, e);
            let g = *groups.entry(root).or_insert_with(|| {
                locals.push((Vec::new(), Vec::new()));
                locals.len() - 1
            });
            locals[g].0.push(e);
        }
    }
    for (f, fac) in factors.iter().enumerate() {
        if consumed[f] {
            continue;
        }
        match fac.vars.iter().find(|&&v| pos[v].is_none()) {
            Some(&v) => {
                let root = find(&mut parent, v);
                locals[groups[&root]].1.push(f);
            }
            None => locals.push((Vec::new(), vec![f])),
        }
    }

    let mut slice_scalars = vec![ONE; ns];
    for (q, z) in line_scalars.iter().enumerate() {
        slice_scalars[layout.slice_of(q)] *= z;
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (inner, fs) in locals {
        let mut targets: Vec<(usize, EventId)> = Vec::new();
        for &f in &fs {
            for &v in &factors[f].vars {
                if let Some((s, _)) = pos[v] {
                    if !targets.iter().any(|&(_, e)| e == v) {
                        if targets.iter().any(|&(t, _)| t == s) {
                            return failure(
                                ev_node(v),
                                format!("gate needs two positions of logical qubit {s}"),
                            );
                        }
                        targets.push((s, v));
                    }
                }
            }
        }
        if targets.len() > max_arity {
            return Err(Error::ArityOverflow {
                arity: targets.len(),
                max: max_arity,
            });
        }
        if inner.len() > MAX_INNER_VARS {
            return failure(ev_node(inner[0]), format!("{} events in one local gate", inner.len()));
        }
        targets.sort_unstable();
        let slice = targets
            .iter()
            .map(|&(_, e)| e)
            .chain(inner.iter().copied())
            .map(ev_slice)
            .max()
            .unwrap_or(0);
        if targets.is_empty() {
            slice_scalars[slice] *= contract_local(&factors, &fs, &[], &inner)[0];
            continue;
        }
        let id = ops.len();
        for &(s, e) in &targets {
            let p = pos[e].unwrap().1;
            if p >= 1 {
                edges.push((tid[s][p], id));
            }
            if p + 1 < trajectories[s].len() {
                edges.push((id, tid[s][p + 1]));
            }
        }
        ops.push(Op::Local {
            targets,
            inner,
            factors: fs,
        });
        op_slice.push(slice);
    }
    for ids in &tid {
        for w in ids[1..].windows(2) {
            edges.push((w[0], w[1]));
        }
    }

    let order = topological_order(ops.len(), &edges, &op_slice)?;
    let mut schedule = vec![Vec::new(); ns];
    let mut last = 0;
    for id in order {
        if op_slice[id] < last {
            return failure(0, "operation order runs against the slice order");
        }
        last = op_slice[id];
        schedule[last].push(id);
    }
    Ok(SlicePlan {
        k: trajectories.len(),
        slices,
        boundaries,
        trajectories,
        graph,
        factors,
        ops,
        schedule,
        slice_scalars,
    })
}

/// Kahn's algorithm, taking the lowest `(slice, id)` among ready operations.
fn topological_order(n: usize, edges: &[(usize, usize)], slice: &[usize]) -> Result<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        indeg[b] += 1;
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n)
        .filter(|&i| indeg[i] == 0)
        .map(|i| Reverse((slice[i], i)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, i))) = heap.pop() {
        order.push(i);
        for &j in &adj[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                heap.push(Reverse((slice[j], j)));
            }
        }
    }
    if order.len() != n {
        return failure(0, "cyclic dependency between logical operations");
    }
    Ok(order)
}

/// Diagonal over `targets` (bit `i` = `targets[i]`) of the product of the
/// given factors, summed over `inner`.
fn contract_local(
    factors: &[Factor],
    fs: &[usize],
    targets: &[EventId],
    inner: &[EventId],
) -> Vec<C64> {
    let bit: HashMap<EventId, usize> = targets
        .iter()
        .chain(inner)
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    let shifts: Vec<Vec<usize>> = fs
        .iter()
        .map(|&f| factors[f].vars.iter().map(|v| bit[v]).collect())
        .collect();
    let nb = targets.len();
    (0..1usize << nb)
        .map(|zt| {
            (0..1usize << inner.len())
                .map(|zi| {
                    let z = zt | (zi << nb);
                    fs.iter().zip(&shifts).fold(ONE, |acc, (&f, sh)| {
                        let idx = sh
                            .iter()
                            .enumerate()
                            .fold(0, |i, (j, &b)| i | (((z >> b) & 1) << j));
                        acc * factors[f].table[idx]
                    })
                })
                .sum()
        })
        .collect()
}

impl SlicePlan {
    pub fn num_slices(&self) -> usize {
        self.slices.len()
    }

    /// Event trajectory of each logical qubit.
    pub fn trajectories(&self) -> &[Vec<EventId>] {
        &self.trajectories
    }

    pub fn graph(&self) -> &EventGraph {
        &self.graph
    }

    /// Number of operations scheduled in slice `r`.
    pub fn slice_op_count(&self, r: usize) -> usize {
        self.schedule.get(r).map_or(0, Vec::len)
    }
}

/// Contracts slice `r` into logical gates on the slots it touches.
pub fn build_slice_gate(plan: &SlicePlan, r: usize) -> Result<SliceGates> {
    if r >= plan.slices.len() {
        return crate::error::invalid(format!("slice {r} out of range"));
    }
    let gates = plan.schedule[r]
        .iter()
        .map(|&id| match &plan.ops[id] {
            Op::Transfer { slot, matrix } => LogicalGate::dense(vec![*slot], matrix.to_vec()),
            Op::Local {
                targets,
                inner,
                factors,
            } => {
                let events: Vec<EventId> = targets.iter().map(|&(_, e)| e).collect();
                let d = contract_local(&plan.factors, factors, &events, inner);
                LogicalGate::diagonal(targets.iter().map(|&(s, _)| s).collect(), d)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SliceGates {
        gates,
        scalar: plan.slice_scalars[r],
    })
}
