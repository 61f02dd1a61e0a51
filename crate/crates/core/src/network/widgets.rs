//! Local rewrites that leave the contraction of a network unchanged.

use super::{NodeId, NodeKind, Tensor, TensorNetwork, WireId, WireKind};
use crate::circuit::{Mat2, ONE, ZERO};
use crate::error::{invalid, Error, Result};
use crate::C64;

/// `P[a][b] = (-1)^{ab}`. Not unitary: `P^dagger P = 2 I`.
pub fn phase_matrix() -> Mat2 {
    [[ONE, ONE], [ONE, -ONE]]
}

/// CZ as two rank-3 copy tensors joined through `P` on their third legs.
pub fn cz_decompose() -> (Tensor, Mat2, Tensor) {
    (Tensor::copy(3), phase_matrix(), Tensor::copy(3))
}

/// Splits `node` into two nodes joined by a new wire. `left_legs` lists the
/// leg positions kept by the first node; the second takes the rest. The
/// factorization is exact: identity on one side when the unfolding has full
/// rank, otherwise a column-row factorization on pivot columns.
pub fn split_node(
    net: &mut TensorNetwork,
    node: NodeId,
    left_legs: &[usize],
) -> Result<(NodeId, NodeId, WireId)> {
    let n = net
        .node(node)
        .ok_or_else(|| Error::InvalidArgument(format!("no node {node}")))?
        .clone();
    let rank = n.tensor.rank();
    if left_legs.is_empty() || left_legs.len() >= rank || left_legs.iter().any(|&l| l >= rank) {
        return invalid("both sides of a split must be nonempty");
    }
    let right_legs: Vec<usize> = (0..rank).filter(|l| !left_legs.contains(l)).collect();
    let perm: Vec<usize> = left_legs.iter().chain(&right_legs).copied().collect();
    let t = n.tensor.permute(&perm);
    let rows: usize = left_legs.iter().map(|&l| n.tensor.dims()[l]).product();
    let cols = t.numel() / rows;
    let (a, b, bond) = exact_factor(t.data(), rows, cols);

    net.remove_node(node);
    let w = net.add_wire(WireKind::WorldLine, bond);
    let mut left_dims: Vec<usize> = left_legs.iter().map(|&l| n.tensor.dims()[l]).collect();
    left_dims.push(bond);
    let mut right_dims = vec![bond];
    right_dims.extend(right_legs.iter().map(|&l| n.tensor.dims()[l]));
    let mut left_wires: Vec<WireId> = left_legs.iter().map(|&l| n.legs[l]).collect();
    left_wires.push(w);
    let mut right_wires = vec![w];
    right_wires.extend(right_legs.iter().map(|&l| n.legs[l]));

    let l = net.add_node(
        NodeKind::Generic,
        Tensor::new(left_dims, a)?,
        left_wires,
        n.qubit,
        n.depth,
    )?;
    let r = net.add_node(
        NodeKind::Generic,
        Tensor::new(right_dims, b)?,
        right_wires,
        n.qubit,
        n.depth,
    )?;
    Ok((l, r, w))
}

/// Contracts `a` and `b` over their shared wires into one node.
pub fn merge_nodes(net: &mut TensorNetwork, a: NodeId, b: NodeId) -> Result<NodeId> {
    let (ta, tb) = match (net.labeled(a), net.labeled(b)) {
        (Some(x), Some(y)) => (x, y),
        _ => return invalid(format!("cannot merge {a} and {b}")),
    };
    let (qubit, depth) = {
        let na = net.node(a).unwrap();
        (na.qubit, na.depth)
    };
    let merged = ta.contract(&tb);
    net.remove_node(a);
    net.remove_node(b);
    net.add_node(NodeKind::Generic, merged.tensor, merged.labels, qubit, depth)
}

/// Joins the single open leg of `a` and of `b` through `bridge`.
pub fn connect_nodes(
    net: &mut TensorNetwork,
    a: NodeId,
    b: NodeId,
    bridge: &Tensor,
) -> Result<NodeId> {
    let wa = single_open_leg(net, a)?;
    let wb = single_open_leg(net, b)?;
    if bridge.rank() != 2 {
        return invalid("bridge must be a matrix");
    }
    let (da, db) = (net.wire(wa).dim, net.wire(wb).dim);
    if bridge.dims() != [da, db] {
        return invalid(format!(
            "bridge of shape {:?} does not fit legs of dimension {da} and {db}",
            bridge.dims()
        ));
    }
    net.add_node(NodeKind::Bridge, bridge.clone(), vec![wa, wb], None, None)
}

fn single_open_leg(net: &TensorNetwork, id: NodeId) -> Result<WireId> {
    let node = net
        .node(id)
        .ok_or_else(|| Error::InvalidArgument(format!("no node {id}")))?;
    let open: Vec<WireId> = node
        .legs
        .iter()
        .copied()
        .filter(|&w| net.wire(w).ends.len() == 1)
        .collect();
    match open.as_slice() {
        [w] => Ok(*w),
        _ => invalid(format!("node {id} has {} open legs, need exactly one", open.len())),
    }
}

/// Exact factorization `M = A B` of a row-major `rows x cols` matrix.
/// Returns `(A, B, inner dimension)`.
fn exact_factor(m: &[C64], rows: usize, cols: usize) -> (Vec<C64>, Vec<C64>, usize) {
    let (pivot_rows, pivot_cols) = pivots(m, rows, cols);
    let r = pivot_rows.len();
    if r == rows {
        return (identity(rows), m.to_vec(), rows);
    }
    if r == cols {
        return (m.to_vec(), identity(cols), cols);
    }
    if r == 0 {
        return (vec![ZERO; rows], vec![ZERO; cols], 1);
    }
    // A = M[:, J]
    let mut a = vec![ZERO; rows * r];
    for i in 0..rows {
        for (k, &j) in pivot_cols.iter().enumerate() {
            a[i * r + k] = m[i * cols + j];
        }
    }
    // Solve M[I, J] B = M[I, :]
    let mut sys: Vec<C64> = Vec::with_capacity(r * r);
    let mut rhs: Vec<C64> = Vec::with_capacity(r * cols);
    for &i in &pivot_rows {
        sys.extend(pivot_cols.iter().map(|&j| m[i * cols + j]));
        rhs.extend_from_slice(&m[i * cols..(i + 1) * cols]);
    }
    let b = solve(sys, rhs, r, cols);
    (a, b, r)
}

fn identity(d: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = ONE;
    }
    v
}

/// Pivot rows and columns of Gaussian elimination with full pivoting.
fn pivots(m: &[C64], rows: usize, cols: usize) -> (Vec<usize>, Vec<usize>) {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = 1e-12 * scale.max(1.0);
    let mut w = m.to_vec();
    let mut row_used = vec![false; rows];
    let mut col_used = vec![false; cols];
    let (mut pr, mut pc) = (Vec::new(), Vec::new());
    loop {
        let mut best = (0.0, 0, 0);
        for i in (0..rows).filter(|&i| !row_used[i]) {
            for j in (0..cols).filter(|&j| !col_used[j]) {
                let v = w[i * cols + j].norm();
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        let (v, pi, pj) = best;
        if v <= tol {
            break;
        }
        row_used[pi] = true;
        col_used[pj] = true;
        pr.push(pi);
        pc.push(pj);
        let piv = w[pi * cols + pj];
        for i in (0..rows).filter(|&i| !row_used[i]) {
            let f = w[i * cols + pj] / piv;
            if f == ZERO {
                continue;
            }
            for j in 0..cols {
                let sub = f * w[pi * cols + j];
                w[i * cols + j] -= sub;
            }
        }
    }
    (pr, pc)
}

/// Solves `A X = B` for square `A` (`n x n`) and `B` (`n x k`), partial pivoting.
fn solve(mut a: Vec<C64>, mut b: Vec<C64>, n: usize, k: usize) -> Vec<C64> {
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
            .unwrap();
        if p != col {
            for j in 0..n {
                a.swap(col * n + j, p * n + j);
            }
            for j in 0..k {
                b.swap(col * k + j, p * k + j);
            }
        }
        let piv = a[col * n + col];
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[i * n + col] / piv;
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let sub = f * a[col * n + j];
                a[i * n + j] -= sub;
            }
            for j in 0..k {
                let sub = f * b[col * k + j];
                b[i * k + j] -= sub;
            }
        }
    }
    for i in 0..n {
        let piv = a[i * n + i];
        for j in 0..k {
            b[i * k + j] /= piv;
        }
    }
    b
}
