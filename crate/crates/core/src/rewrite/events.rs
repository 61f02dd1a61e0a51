//! World-line events of a circuit network.
//!
//! Copy tensors hold a world line's value fixed across an entangling line, so
//! the network contracts to a sum over one binary variable per CZ endpoint
//! (an *event*) of a product of small factors: input and output vectors,
//! the single-qubit gate products between consecutive events, and the phase
//! matrices between CZ partners. Virtual events are identity insertions at a
//! nominal layer on a world line that has no CZ there.

use std::collections::HashMap;

use crate::circuit::{mat2_mul, Mat2, IDENTITY, ONE};
use crate::error::{Error, Result};
use crate::network::{NodeId, NodeKind, TensorNetwork};
use crate::C64;

pub type EventId = usize;

#[derive(Clone, Debug)]
pub struct Event {
    pub qubit: usize,
    /// CZ layer of the event.
    pub time: usize,
    /// Copy node of a real event.
    pub node: Option<NodeId>,
    pub partner: Option<EventId>,
}

impl Event {
    pub fn is_virtual(&self) -> bool {
        self.node.is_none()
    }
}

#[derive(Clone, Debug)]
enum Item {
    Gate { depth: usize, m: Mat2 },
    Event(EventId),
}

#[derive(Clone, Debug)]
struct WorldLine {
    input: [C64; 2],
    output: [C64; 2],
    items: Vec<Item>,
}

/// Function of up to a few event values; variable `i` is bit `i` of the
/// table index.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub vars: Vec<EventId>,
    pub table: Vec<C64>,
}

impl Factor {
    pub fn eval(&self, value: impl Fn(EventId) -> usize) -> C64 {
        let idx = self
            .vars
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &v)| acc | (value(v) << i));
        self.table[idx]
    }
}

#[derive(Clone, Debug)]
pub struct EventGraph {
    pub events: Vec<Event>,
    lines: Vec<WorldLine>,
    index: HashMap<(usize, usize), EventId>,
    /// Phase tensor of each real CZ, keyed by its lower event id.
    phases: HashMap<EventId, [C64; 4]>,
}

fn plan_failure<T>(node: NodeId, reason: impl Into<String>) -> Result<T> {
    Err(Error::PlanFailure {
        node,
        reason: reason.into(),
    })
}

fn vec2(data: &[C64]) -> [C64; 2] {
    [data[0], data[1]]
}

impl EventGraph {
    /// Reads the world lines of a network built by
    /// [`circuit_to_network`](crate::network::circuit_to_network).
    pub fn from_network(net: &TensorNetwork) -> Result<Self> {
        let nq = net.num_qubits();
        let mut g = EventGraph {
            events: Vec::new(),
            lines: Vec::with_capacity(nq),
            index: HashMap::new(),
            phases: HashMap::new(),
        };
        let mut inputs = vec![None; nq];
        for (id, node) in net.nodes() {
            if node.kind == NodeKind::Input {
                match node.qubit {
                    Some(q) if q < nq && inputs[q].is_none() => inputs[q] = Some(id),
                    _ => return plan_failure(id, "input node without a unique qubit"),
                }
            }
        }
        let mut copy_event: HashMap<NodeId, EventId> = HashMap::new();
        for (q, input) in inputs.iter().enumerate() {
            let Some(input) = *input else {
                return plan_failure(0, format!("qubit {q} has no input node"));
            };
            let in_node = net.node(input).unwrap();
            let mut line = WorldLine {
                input: vec2(in_node.tensor.data()),
                output: [ONE, ONE],
                items: Vec::new(),
            };
            let (mut cur, mut wire) = (input, in_node.legs[0]);
            loop {
                let Some((next, leg)) = net.other_end(wire, cur) else {
                    return plan_failure(cur, "world line ends on an open wire");
                };
                let node = net.node(next).unwrap();
                match (node.kind, leg) {
                    (NodeKind::Gate, 1) => {
                        let d = node.tensor.data();
                        line.items.push(Item::Gate {
                            depth: node.depth.unwrap_or(0),
                            m: [[d[0], d[1]], [d[2], d[3]]],
                        });
                        wire = node.legs[0];
                    }
                    (NodeKind::Copy, 0) => {
                        let Some(time) = node.depth else {
                            return plan_failure(next, "copy node without a layer");
                        };
                        if g.index.contains_key(&(q, time)) {
                            return plan_failure(next, "two CZ on one qubit in one layer");
                        }
                        let e = g.events.len();
                        g.events.push(Event {
                            qubit: q,
                            time,
                            node: Some(next),
                            partner: None,
                        });
                        g.index.insert((q, time), e);
                        copy_event.insert(next, e);
                        line.items.push(Item::Event(e));
                        wire = node.legs[1];
                    }
                    (NodeKind::Output, 0) => {
                        line.output = vec2(node.tensor.data());
                        break;
                    }
                    _ => return plan_failure(next, format!("unexpected {:?} node on a world line", node.kind)),
                }
                cur = next;
            }
            g.lines.push(line);
        }
        // Pair CZ partners through their phase nodes.
        for (id, node) in net.nodes() {
            if node.kind != NodeKind::Phase {
                continue;
            }
            let ends: Vec<_> = node
                .legs
                .iter()
                .map(|&w| net.other_end(w, id).and_then(|(n, _)| copy_event.get(&n).copied()))
                .collect();
            let (Some(a), Some(b)) = (ends[0], ends[1]) else {
                return plan_failure(id, "phase node not between two copy nodes");
            };
            if g.events[a].time != g.events[b].time || g.events[a].qubit == g.events[b].qubit {
                return plan_failure(id, "phase node joins events of different layers");
            }
            let d = node.tensor.data();
            // Table over (lower id, higher id) with the lower id as bit 0.
            let table = if a < b {
                [d[0], d[2], d[1], d[3]]
            } else {
                [d[0], d[1], d[2], d[3]]
            };
            g.events[a].partner = Some(b);
            g.events[b].partner = Some(a);
            g.phases.insert(a.min(b), table);
        }
        for (node, &e) in &copy_event {
            if g.events[e].partner.is_none() {
                return plan_failure(*node, "copy node without a CZ partner");
            }
        }
        Ok(g)
    }

    pub fn num_qubits(&self) -> usize {
        self.lines.len()
    }

    pub fn event_at(&self, qubit: usize, time: usize) -> Option<EventId> {
        self.index.get(&(qubit, time)).copied()
    }

    /// Events of `qubit` in world-line order.
    pub fn qubit_events(&self, qubit: usize) -> Vec<EventId> {
        self.lines[qubit]
            .items
            .iter()
            .filter_map(|it| match it {
                Item::Event(e) => Some(*e),
                Item::Gate { .. } => None,
            })
            .collect()
    }

    /// Inserts a virtual event at layer `time` on `qubit`: after every gate
    /// of depth `<= time` and every event of an earlier layer.
    pub fn add_virtual(&mut self, qubit: usize, time: usize) -> Result<EventId> {
        if let Some(&e) = self.index.get(&(qubit, time)) {
            return Err(Error::PlanFailure {
                node: self.events[e].node.unwrap_or(0),
                reason: format!("event ({qubit}, {time}) already exists"),
            });
        }
        let e = self.events.len();
        let events = &self.events;
        let items = &mut self.lines[qubit].items;
        let pos = items
            .iter()
            .position(|it| match *it {
                Item::Gate { depth, .. } => depth > time,
                Item::Event(other) => events[other].time > time,
            })
            .unwrap_or(items.len());
        items.insert(pos, Item::Event(e));
        self.events.push(Event {
            qubit,
            time,
            node: None,
            partner: None,
        });
        self.index.insert((qubit, time), e);
        Ok(e)
    }

    /// Event id for `(qubit, time)`, creating a virtual event if needed.
    pub fn ensure(&mut self, qubit: usize, time: usize) -> Result<EventId> {
        match self.event_at(qubit, time) {
            Some(e) => Ok(e),
            None => self.add_virtual(qubit, time),
        }
    }

    /// All factors of the network, and per qubit the value of its world line
    /// if it carries no event (one otherwise).
    pub fn factors(&self) -> (Vec<Factor>, Vec<C64>) {
        let mut out = Vec::new();
        let mut scalars = vec![ONE; self.lines.len()];
        for (q, line) in self.lines.iter().enumerate() {
            let mut s = IDENTITY;
            let mut prev: Option<EventId> = None;
            for it in &line.items {
                match *it {
                    Item::Gate { ref m, .. } => s = mat2_mul(m, &s),
                    Item::Event(e) => {
                        match prev {
                            None => {
                                let v = line.input;
                                out.push(Factor {
                                    vars: vec![e],
                                    table: vec![
                                        s[0][0] * v[0] + s[0][1] * v[1],
                                        s[1][0] * v[0] + s[1][1] * v[1],
                                    ],
                                });
                            }
                            Some(p) => out.push(Factor {
                                vars: vec![p, e],
                                table: vec![s[0][0], s[0][1], s[1][0], s[1][1]],
                            }),
                        }
                        s = IDENTITY;
                        prev = Some(e);
                    }
                }
            }
            let o = line.output;
            match prev {
                None => {
                    let v = line.input;
                    let sv = [s[0][0] * v[0] + s[0][1] * v[1], s[1][0] * v[0] + s[1][1] * v[1]];
                    scalars[q] = o[0] * sv[0] + o[1] * sv[1];
                }
                Some(p) => out.push(Factor {
                    vars: vec![p],
                    table: vec![
                        o[0] * s[0][0] + o[1] * s[1][0],
                        o[0] * s[0][1] + o[1] * s[1][1],
                    ],
                }),
            }
        }
        let mut lows: Vec<_> = self.phases.iter().collect();
        lows.sort_unstable_by_key(|(&a, _)| a);
        for (&a, table) in lows {
            let b = self.events[a].partner.unwrap();
            out.push(Factor {
                vars: vec![a, b],
                table: table.to_vec(),
            });
        }
        (out, scalars)
    }
}
