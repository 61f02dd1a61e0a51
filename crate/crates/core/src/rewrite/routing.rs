//! Logical-qubit counts and slot trajectories for each layout.
//!
//! A slot is one logical qubit. Its trajectory is the ordered list of events
//! whose values it carries, slice by slice; consecutive events are joined by
//! the factor between them (a world-line segment or a CZ phase) or by no
//! factor at all.

use std::collections::{HashMap, HashSet};

use super::events::{EventGraph, EventId};
use crate::circuit::schedule::{
    bond_layer, bond_pattern, cycle_len, Orientation, GRID_PATTERNS, PATTERNS_PER_CYCLE,
};
use crate::circuit::QubitLayout;
use crate::error::{Error, Result};

/// Number of schedule blocks whose layers below `depth` contain a bond
/// between two slices.
pub fn active_blocks(layout: &QubitLayout, depth: usize) -> usize {
    active_block_list(layout, depth).len()
}

pub(crate) fn active_block_list(layout: &QubitLayout, depth: usize) -> Vec<usize> {
    let cyc = cycle_len(layout);
    let mut crossing = vec![false; cyc];
    for (a, b) in layout.edges() {
        if layout.slice_of(a) != layout.slice_of(b) {
            if let Some(p) = bond_pattern(layout, a, b) {
                crossing[p] = true;
            }
        }
    }
    (0..depth.div_ceil(cyc))
        .filter(|&b| (0..cyc).any(|p| b * cyc + p < depth && crossing[p]))
        .collect()
}

/// Logical qubit count `k` and slice count for a circuit of `depth` CZ
/// layers on `layout`.
pub fn plan_logical_qubits(layout: &QubitLayout, depth: usize) -> (usize, usize) {
    let slices = layout.num_slices();
    let k = match *layout {
        QubitLayout::Chain { .. } => depth,
        QubitLayout::Grid { n, .. } => n * active_blocks(layout, depth),
        QubitLayout::Bristlecone { n, .. } => (2 * n - 1) * active_blocks(layout, depth),
    };
    (k, slices)
}

fn route_failure<T>(reason: String) -> Result<T> {
    Err(Error::PlanFailure { node: 0, reason })
}

/// Trajectories for a generated circuit of `depth` layers, creating the
/// virtual events they pass through.
pub(crate) fn route(
    layout: &QubitLayout,
    depth: usize,
    g: &mut EventGraph,
) -> Result<Vec<Vec<EventId>>> {
    if g.num_qubits() != layout.num_qubits() {
        return route_failure(format!(
            "network has {} qubits, layout has {}",
            g.num_qubits(),
            layout.num_qubits()
        ));
    }
    match *layout {
        QubitLayout::Chain { n } => route_chain(n, depth, g),
        QubitLayout::Grid { m, n } => route_grid(layout, m, n, depth, g),
        QubitLayout::Bristlecone { m, n } => route_bristlecone(layout, m, n, depth, g),
    }
}

/// Slot `d` crosses every qubit at layer `d`. Qubits without any CZ are
/// skipped; their world lines close on their own.
fn route_chain(n: usize, depth: usize, g: &mut EventGraph) -> Result<Vec<Vec<EventId>>> {
    let touched: Vec<bool> = (0..n).map(|q| !g.qubit_events(q).is_empty()).collect();
    (0..depth)
        .map(|d| {
            (0..n)
                .filter(|&q| touched[q])
                .map(|q| g.ensure(q, d))
                .collect()
        })
        .collect()
}

fn vertical_pattern(row_parity: usize, col_parity: usize) -> usize {
    GRID_PATTERNS
        .iter()
        .position(|p| {
            p.orientation == Orientation::Vertical
                && p.row_parity == row_parity
                && p.col_parity == col_parity
        })
        .expect("every parity pair has a vertical pattern")
}

/// Slot `(b, c)` runs down column `c`. In row `r` it enters on the bond from
/// row `r - 1` and walks the world line of `(r, c)`, through any events in
/// between, to the bond with row `r + 1`. The top and bottom rows use
/// virtual events at the times those bonds would have.
fn route_grid(
    layout: &QubitLayout,
    m: usize,
    n: usize,
    depth: usize,
    g: &mut EventGraph,
) -> Result<Vec<Vec<EventId>>> {
    let mut out = Vec::new();
    for b in active_block_list(layout, depth) {
        let base = b * PATTERNS_PER_CYCLE;
        for c in 0..n {
            let mut traj = Vec::new();
            for r in 0..m {
                let q = r * n + c;
                let t_up = base + vertical_pattern((r + 1) % 2, c % 2);
                let t_down = base + vertical_pattern(r % 2, c % 2);
                let (lo, hi) = (t_up.min(t_down), t_up.max(t_down));
                let mut inner: Vec<EventId> = g
                    .qubit_events(q)
                    .into_iter()
                    .filter(|&e| {
                        let ev = &g.events[e];
                        !ev.is_virtual() && ev.time > lo && ev.time < hi
                    })
                    .collect();
                if t_up > t_down {
                    inner.reverse();
                }
                traj.push(g.ensure(q, t_up)?);
                traj.extend(inner);
                traj.push(g.ensure(q, t_down)?);
            }
            out.push(traj);
        }
    }
    Ok(out)
}

/// One slot per bond between the first two rows. A slot leaves each row on
/// a bond to the row below; in even rows it arrives on the bond just after
/// that one on the same world line, in odd rows on the bond just before.
fn route_bristlecone(
    layout: &QubitLayout,
    m: usize,
    n: usize,
    depth: usize,
    g: &mut EventGraph,
) -> Result<Vec<Vec<EventId>>> {
    let mut below: Vec<Vec<usize>> = vec![Vec::new(); m * n];
    for (a, b) in layout.edges() {
        below[a.min(b)].push(a.max(b));
    }
    let mut out = Vec::new();
    for blk in active_block_list(layout, depth) {
        // (qubit, up-bond time) -> (down-bond time, qubit below)
        let mut next_down: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut starts = Vec::new();
        for q in 0..m * n {
            let r = q / n;
            // (time, is_down, other qubit)
            let mut bonds: Vec<(usize, bool, usize)> = Vec::new();
            for &o in &below[q] {
                bonds.push((bond_layer(layout, q, o, blk).unwrap(), true, o));
            }
            if r > 0 {
                for p in (r - 1) * n..r * n {
                    if below[p].contains(&q) {
                        bonds.push((bond_layer(layout, p, q, blk).unwrap(), false, p));
                    }
                }
            }
            bonds.sort_unstable();
            if r == 0 {
                starts.extend(bonds.iter().map(|&(t, _, o)| (t, q, o)));
                continue;
            }
            if r == m - 1 {
                continue;
            }
            for (i, &(t, is_down, _)) in bonds.iter().enumerate() {
                if is_down {
                    continue;
                }
                let j = if r % 2 == 0 { i.checked_sub(1) } else { Some(i + 1) };
                match j.and_then(|j| bonds.get(j)) {
                    Some(&(td, true, od)) => {
                        next_down.insert((q, t), (td, od));
                    }
                    _ => {
                        return route_failure(format!(
                            "qubit {q}: bond at layer {t} has no adjacent bond to the row below"
                        ))
                    }
                }
            }
        }
        starts.sort_unstable();
        let mut used = HashSet::new();
        for (t0, q0, o0) in starts {
            let mut traj = vec![g.ensure(q0, t0)?];
            let (mut t, mut q) = (t0, o0);
            loop {
                traj.push(g.ensure(q, t)?);
                if q / n == m - 1 {
                    break;
                }
                let Some(&(td, od)) = next_down.get(&(q, t)) else {
                    return route_failure(format!("qubit {q}: no exit from layer {t}"));
                };
                if !used.insert((q, td)) {
                    return route_failure(format!("qubit {q}: bond at layer {td} reused"));
                }
                traj.push(g.ensure(q, td)?);
                t = td;
                q = od;
            }
            out.push(traj);
        }
    }
    Ok(out)
}
