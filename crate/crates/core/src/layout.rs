//! Row order and palette colors.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compress::RowAssignment;
use crate::setmodel::{active_ranges, build_membership_matrix, ColumnOrder, SetSystem};
use crate::Style;

/// Tableau10.
pub const DEFAULT_PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

/// Everything the renderer needs besides the set system itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramLayout {
    pub column_order: ColumnOrder,
    pub assignment: RowAssignment,
    /// `row_order[display position] = row index`.
    pub row_order: Vec<usize>,
    /// Palette index per set.
    pub color_of: Vec<usize>,
    pub style: Style,
    /// Some row holds more sets than there are palette colors.
    pub colors_repeat_in_row: bool,
}

impl DiagramLayout {
    pub fn build(
        sys: &SetSystem,
        column_order: ColumnOrder,
        assignment: RowAssignment,
        style: Style,
        seed: u64,
        palette_size: usize,
    ) -> Self {
        let row_order = order_rows(&assignment, seed);
        let starts: Vec<usize> = active_ranges(&build_membership_matrix(sys), &column_order)
            .iter()
            .map(|r| r.start)
            .collect();
        let colors = assign_colors_circular(&assignment, &row_order, &starts, palette_size);
        DiagramLayout {
            column_order,
            assignment,
            row_order,
            color_of: colors.color_of,
            style,
            colors_repeat_in_row: colors.repeats_in_row,
        }
    }

    pub fn row_count(&self) -> usize {
        self.assignment.row_count
    }
}

/// Uniformly random row permutation, fixed by `seed`.
pub fn order_rows(assignment: &RowAssignment, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..assignment.row_count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircularColors {
    pub color_of: Vec<usize>,
    /// Some row has more sets than the palette has colors, so a color
    /// repeats inside it.
    pub repeats_in_row: bool,
}

/// Walks rows in display order and, within a row, sets by the position of
/// their first block, handing out palette indices from one running counter
/// modulo `palette_size`. The counter is never reset, so any row with at most
/// `palette_size` sets gets pairwise distinct colors.
pub fn assign_colors_circular(
    assignment: &RowAssignment,
    row_order: &[usize],
    block_starts: &[usize],
    palette_size: usize,
) -> CircularColors {
    assert!(palette_size > 0, "palette must not be empty");
    let rows = assignment.rows();
    let mut color_of = vec![0; assignment.row_of.len()];
    let mut counter = 0usize;
    let mut repeats_in_row = false;
    for &r in row_order {
        let mut sets = rows[r].clone();
        sets.sort_by_key(|&s| (block_starts[s], s));
        repeats_in_row |= sets.len() > palette_size;
        for s in sets {
            color_of[s] = counter % palette_size;
            counter += 1;
        }
    }
    CircularColors {
        color_of,
        repeats_in_row,
    }
}
