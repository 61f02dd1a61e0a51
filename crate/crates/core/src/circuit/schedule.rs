//! CZ layer schedules.
//!
//! Chains alternate between even and odd bonds. Grid and Bristlecone circuits
//! cycle through eight patterns; within any aligned window of eight layers
//! every coupled pair receives exactly one CZ. The pattern tables below are
//! the single source for both the generators and the slice planner.

use super::layout::QubitLayout;

/// Layers per repetition of the 2D schedules.
pub const PATTERNS_PER_CYCLE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Within a row: `(r, c) - (r, c + 1)`.
    Horizontal,
    /// Between rows: `(r, c) - (r + 1, c)`.
    Vertical,
}

/// One grid pattern: bonds of one orientation selected by the parity of the
/// bond's first qubit `(row, col)`.
#[derive(Clone, Copy, Debug)]
pub struct GridPattern {
    pub orientation: Orientation,
    pub row_parity: usize,
    pub col_parity: usize,
}

const fn gp(orientation: Orientation, row_parity: usize, col_parity: usize) -> GridPattern {
    GridPattern {
        orientation,
        row_parity,
        col_parity,
    }
}

pub const GRID_PATTERNS: [GridPattern; PATTERNS_PER_CYCLE] = [
    gp(Orientation::Horizontal, 0, 0),
    gp(Orientation::Horizontal, 1, 1),
    gp(Orientation::Vertical, 0, 0),
    gp(Orientation::Vertical, 0, 1),
    gp(Orientation::Horizontal, 0, 1),
    gp(Orientation::Horizontal, 1, 0),
    gp(Orientation::Vertical, 1, 0),
    gp(Orientation::Vertical, 1, 1),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slant {
    /// Lower qubit sits one lattice step to the right of the upper one.
    Right,
    Left,
}

/// One Bristlecone pattern: bonds between row `r` and `r + 1` with the given
/// parity of `r`, slant, and column parity of the upper qubit.
#[derive(Clone, Copy, Debug)]
pub struct BristleconePattern {
    pub row_parity: usize,
    pub slant: Slant,
    pub col_parity: usize,
}

const fn bp(row_parity: usize, slant: Slant, col_parity: usize) -> BristleconePattern {
    BristleconePattern {
        row_parity,
        slant,
        col_parity,
    }
}

pub const BRISTLECONE_PATTERNS: [BristleconePattern; PATTERNS_PER_CYCLE] = [
    bp(0, Slant::Right, 0),
    bp(0, Slant::Right, 1),
    bp(1, Slant::Right, 0),
    bp(1, Slant::Right, 1),
    bp(0, Slant::Left, 0),
    bp(0, Slant::Left, 1),
    bp(1, Slant::Left, 0),
    bp(1, Slant::Left, 1),
];

/// Position of the bond `(a, b)` within its schedule cycle: the layer modulo 2
/// for chains, modulo [`PATTERNS_PER_CYCLE`] otherwise. `None` if not a bond.
pub fn bond_pattern(layout: &QubitLayout, a: usize, b: usize) -> Option<usize> {
    if !layout.are_neighbors(a, b) {
        return None;
    }
    let (a, b) = (a.min(b), a.max(b));
    match *layout {
        QubitLayout::Chain { .. } => Some(a % 2),
        QubitLayout::Grid { n, .. } => {
            let (r, c) = (a / n, a % n);
            let orientation = if b == a + 1 {
                Orientation::Horizontal
            } else {
                Orientation::Vertical
            };
            GRID_PATTERNS.iter().position(|p| {
                p.orientation == orientation && p.row_parity == r % 2 && p.col_parity == c % 2
            })
        }
        QubitLayout::Bristlecone { .. } => {
            let (r, xa) = layout.coords(a);
            let (_, xb) = layout.coords(b);
            let c = a % layout_cols(layout);
            let slant = if xb > xa { Slant::Right } else { Slant::Left };
            BRISTLECONE_PATTERNS.iter().position(|p| {
                p.row_parity == (r as usize) % 2 && p.slant == slant && p.col_parity == c % 2
            })
        }
    }
}

fn layout_cols(layout: &QubitLayout) -> usize {
    match *layout {
        QubitLayout::Chain { .. } => 1,
        QubitLayout::Grid { n, .. } | QubitLayout::Bristlecone { n, .. } => n,
    }
}

/// Schedule period of the layout.
pub fn cycle_len(layout: &QubitLayout) -> usize {
    match layout {
        QubitLayout::Chain { .. } => 2,
        _ => PATTERNS_PER_CYCLE,
    }
}

/// CZ pairs `(a, b)`, `a < b`, of layer `layer`, sorted.
pub fn cz_layer(layout: &QubitLayout, layer: usize) -> Vec<(usize, usize)> {
    let phase = layer % cycle_len(layout);
    layout
        .edges()
        .into_iter()
        .filter(|&(a, b)| bond_pattern(layout, a, b) == Some(phase))
        .collect()
}

/// Layer at which bond `(a, b)` fires within cycle `block`.
pub fn bond_layer(layout: &QubitLayout, a: usize, b: usize, block: usize) -> Option<usize> {
    bond_pattern(layout, a, b).map(|p| block * cycle_len(layout) + p)
}

/// True if the bond crosses a slice boundary.
pub fn crosses_slices(layout: &QubitLayout, a: usize, b: usize) -> bool {
    layout.slice_of(a) != layout.slice_of(b)
}
