use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Arrangement of physical qubits and their coupling graph.
///
/// Qubits are numbered row-major. For [`QubitLayout::Bristlecone`] each row
/// holds `n` qubits and odd rows are offset by one lattice step, so the stored
/// coordinates `(row, 2 * col + row % 2)` lie on the diagonal sublattice of a
/// square lattice rotated by 45 degrees. Neighbors are then diagonal steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QubitLayout {
    Chain { n: usize },
    Grid { m: usize, n: usize },
    Bristlecone { m: usize, n: usize },
}

impl QubitLayout {
    pub fn chain(n: usize) -> Result<Self> {
        if n < 2 {
            return invalid(format!("chain needs at least 2 qubits, got {n}"));
        }
        Ok(Self::Chain { n })
    }

    pub fn grid(m: usize, n: usize) -> Result<Self> {
        check_rect("grid", m, n)?;
        Ok(Self::Grid { m, n })
    }

    pub fn bristlecone(m: usize, n: usize) -> Result<Self> {
        check_rect("bristlecone", m, n)?;
        Ok(Self::Bristlecone { m, n })
    }

    pub fn num_qubits(&self) -> usize {
        match *self {
            Self::Chain { n } => n,
            Self::Grid { m, n } | Self::Bristlecone { m, n } => m * n,
        }
    }

    /// Number of transversal slices: one per chain qubit or per row.
    pub fn num_slices(&self) -> usize {
        match *self {
            Self::Chain { n } => n,
            Self::Grid { m, .. } | Self::Bristlecone { m, .. } => m,
        }
    }

    /// Slice that owns qubit `q`.
    pub fn slice_of(&self, q: usize) -> usize {
        match *self {
            Self::Chain { .. } => q,
            Self::Grid { n, .. } | Self::Bristlecone { n, .. } => q / n,
        }
    }

    /// Qubits of slice `s` in increasing index order.
    pub fn slice_qubits(&self, s: usize) -> Vec<usize> {
        match *self {
            Self::Chain { .. } => vec![s],
            Self::Grid { n, .. } | Self::Bristlecone { n, .. } => (s * n..(s + 1) * n).collect(),
        }
    }

    /// `(row, col)` of qubit `q` in the index grid (row is always the slice).
    pub fn row_col(&self, q: usize) -> (usize, usize) {
        match *self {
            Self::Chain { .. } => (q, 0),
            Self::Grid { n, .. } | Self::Bristlecone { n, .. } => (q / n, q % n),
        }
    }

    pub fn qubit_at(&self, row: usize, col: usize) -> Option<usize> {
        match *self {
            Self::Chain { n } => (col == 0 && row < n).then_some(row),
            Self::Grid { m, n } | Self::Bristlecone { m, n } => {
                (row < m && col < n).then_some(row * n + col)
            }
        }
    }

    /// Integer lattice position of qubit `q`.
    pub fn coords(&self, q: usize) -> (i64, i64) {
        match *self {
            Self::Chain { .. } => (q as i64, 0),
            Self::Grid { n, .. } => ((q / n) as i64, (q % n) as i64),
            Self::Bristlecone { n, .. } => {
                let (r, c) = (q / n, q % n);
                (r as i64, (2 * c + r % 2) as i64)
            }
        }
    }

    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        let nq = self.num_qubits();
        if a >= nq || b >= nq || a == b {
            return false;
        }
        let (ya, xa) = self.coords(a);
        let (yb, xb) = self.coords(b);
        let (dy, dx) = ((ya - yb).abs(), (xa - xb).abs());
        match self {
            Self::Chain { .. } | Self::Grid { .. } => dy + dx == 1,
            Self::Bristlecone { .. } => dy == 1 && dx == 1,
        }
    }

    /// All nearest-neighbor pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let nq = self.num_qubits();
        let mut out = Vec::new();
        for a in 0..nq {
            for b in self.forward_neighbors(a) {
                out.push((a, b));
            }
        }
        out.sort_unstable();
        out
    }

    /// Neighbors of `a` with a larger index.
    fn forward_neighbors(&self, a: usize) -> Vec<usize> {
        match *self {
            Self::Chain { n } => (a + 1 < n).then_some(a + 1).into_iter().collect(),
            Self::Grid { m, n } => {
                let (r, c) = (a / n, a % n);
                let mut v = Vec::with_capacity(2);
                if c + 1 < n {
                    v.push(a + 1);
                }
                if r + 1 < m {
                    v.push(a + n);
                }
                v
            }
            Self::Bristlecone { m, n } => {
                let (r, c) = (a / n, a % n);
                if r + 1 >= m {
                    return Vec::new();
                }
                // Lower-row columns whose x is one step away.
                let cols: [Option<usize>; 2] = if r % 2 == 0 {
                    [c.checked_sub(1), Some(c)]
                } else {
                    [Some(c), (c + 1 < n).then_some(c + 1)]
                };
                cols.into_iter().flatten().map(|c2| (r + 1) * n + c2).collect()
            }
        }
    }
}

fn check_rect(name: &str, m: usize, n: usize) -> Result<()> {
    if n < 2 {
        return invalid(format!("{name} needs at least 2 columns, got {n}"));
    }
    if m < n {
        return invalid(format!("{name} requires m >= n, got m={m}, n={n}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_counts() {
        assert_eq!(QubitLayout::chain(5).unwrap().edges().len(), 4);
        // 4x4 grid: 2 * 4 * 3 edges.
        assert_eq!(QubitLayout::grid(4, 4).unwrap().edges().len(), 24);
        // Each Bristlecone row pair has 2n - 1 edges.
        let b = QubitLayout::bristlecone(12, 6).unwrap();
        assert_eq!(b.edges().len(), 11 * 11);
        assert_eq!(b.num_qubits(), 72);
    }

    #[test]
    fn bristlecone_is_diagonal_lattice() {
        let b = QubitLayout::bristlecone(5, 3).unwrap();
        for q in 0..b.num_qubits() {
            let (y, x) = b.coords(q);
            assert_eq!((x + y) % 2, 0);
        }
        for (a, c) in b.edges() {
            assert!(b.are_neighbors(a, c));
            let ((ya, xa), (yc, xc)) = (b.coords(a), b.coords(c));
            assert_eq!(((ya - yc).abs(), (xa - xc).abs()), (1, 1));
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(QubitLayout::chain(1).is_err());
        assert!(QubitLayout::grid(2, 4).is_err());
        assert!(QubitLayout::bristlecone(3, 1).is_err());
    }

    #[test]
    fn grid_adjacency() {
        let g = QubitLayout::grid(3, 3).unwrap();
        assert!(g.are_neighbors(0, 1));
        assert!(g.are_neighbors(0, 3));
        assert!(!g.are_neighbors(0, 2));
        assert!(!g.are_neighbors(0, 4));
    }
}
