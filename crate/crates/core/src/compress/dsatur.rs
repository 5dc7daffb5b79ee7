use super::{ConflictGraph, PartialColoring, RowAssignment, TSets};
use crate::{Bound, SolveStatus};

/// Greedy DSATUR coloring.
///
/// A color counts toward a vertex's saturation when a neighbor uses it,
/// when it is full under `bound`, or when two other members of a T-set
/// containing the vertex already use it. Ties go to the larger
/// `degree + conflicting triples`, then to the lower index. Each vertex takes
/// the first color outside its saturation set.
pub fn dsatur(g: &ConflictGraph, bound: Bound, tsets: Option<&TSets>) -> RowAssignment {
    let mut state = PartialColoring::new(g, bound, tsets);
    let weights: Vec<u64> = (0..g.vertex_count()).map(|v| state.weight(v)).collect();
    while let Some(v) = state.select(&weights) {
        let c = state.first_free(v);
        state.assign(v, c);
    }
    RowAssignment::from_colors(&state.colors(), bound, SolveStatus::HeuristicOnly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::tests::arb_instance;
    use crate::compress::{build_conflict_graph, validate_assignment};
    use crate::Style;
    use proptest::prelude::*;

    #[test]
    fn path_uses_two_rows_middle_first() {
        let g = ConflictGraph::from_edges(3, [(0, 1), (1, 2)]);
        let a = dsatur(&g, Bound::Unbounded, None);
        assert_eq!(a.row_count, 2);
        assert_eq!(a.row_of[0], a.row_of[2]);
        assert_ne!(a.row_of[0], a.row_of[1]);
        assert_eq!(a.status, SolveStatus::HeuristicOnly);
    }

    #[test]
    fn bounded_edgeless_rows_fill_up() {
        let g = ConflictGraph::new(7);
        let a = dsatur(&g, Bound::AtMost(3), None);
        let mut sizes: Vec<usize> = a.rows().iter().map(Vec::len).collect();
        sizes.sort_unstable_by(|x, y| y.cmp(x));
        assert_eq!(sizes, vec![3, 3, 1]);
    }

    #[test]
    fn complete_graph_needs_every_row() {
        let g = ConflictGraph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(dsatur(&g, Bound::Unbounded, None).row_count, 4);
    }

    proptest! {
        #[test]
        fn assignments_are_valid_for_every_variant(
            (sys, ord) in arb_instance(12, 14),
            b in prop::option::of(2usize..5),
        ) {
            let bound = b.map_or(Bound::Unbounded, Bound::AtMost);
            for style in Style::COMPRESSED {
                let (g, t) = build_conflict_graph(&sys, style, &ord);
                let a = dsatur(&g, bound, t.as_ref());
                prop_assert_eq!(validate_assignment(&sys, style, &ord, &a.row_of, bound), Ok(()));
                prop_assert_eq!(&a, &dsatur(&g, bound, t.as_ref()));
            }
        }
    }
}
