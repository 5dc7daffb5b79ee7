use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};

use super::{ConflictGraph, RowAssignment};
use crate::{Bound, SolveStatus};

/// Optimal rows for at most two sets per row: a maximum matching in the
/// complement of the conflict graph pairs up compatible sets, giving
/// `|V| - |M|` rows.
pub fn match_pairs_b2(g: &ConflictGraph) -> RowAssignment {
    let n = g.vertex_count();
    let comp = g.complement();
    let mut graph = UnGraph::<(), ()>::with_capacity(n, comp.edge_count());
    for _ in 0..n {
        graph.add_node(());
    }
    for (u, v) in comp.edges() {
        graph.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
    }
    let matching = maximum_matching(&graph);

    let mut row_of = vec![usize::MAX; n];
    let mut rows = 0;
    for v in 0..n {
        if row_of[v] != usize::MAX {
            continue;
        }
        row_of[v] = rows;
        if let Some(m) = matching.mate(NodeIndex::new(v)) {
            row_of[m.index()] = rows;
        }
        rows += 1;
    }
    debug_assert_eq!(rows, n - matching.len());
    RowAssignment {
        row_of,
        row_count: rows,
        bound: Bound::AtMost(2),
        status: SolveStatus::Optimal,
    }
}
