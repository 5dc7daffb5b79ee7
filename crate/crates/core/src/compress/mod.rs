//! Row compression: decide which sets share a row.
//!
//! Each compatibility model becomes a conflict graph whose vertices are sets
//! and whose edges forbid sharing a row; pair-alternation additionally
//! carries [`TSets`], groups of sets whose active ranges all contain a
//! common column and of which at most two may share a row. A row
//! assignment is then a (bounded) vertex coloring.

mod dsatur;
mod exact;
mod matching;

pub use dsatur::dsatur;
pub use exact::{exact_min_rows, ExactSolveState};
pub use matching::match_pairs_b2;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::setmodel::{active_ranges, build_membership_matrix, ActiveRange, ColumnOrder, SetSystem};
use crate::{Bound, SolveStatus, Style};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    n: usize,
    adj: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
}

impl ConflictGraph {
    pub fn new(n: usize) -> Self {
        ConflictGraph {
            n,
            adj: vec![false; n * n],
            neighbors: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds `{u, v}`; self-loops and repeated edges are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v || self.adj[u * self.n + v] {
            return;
        }
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
        self.neighbors[u].push(v);
        self.neighbors[v].push(u);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| ((u + 1)..self.n).filter(move |&v| self.adjacent(u, v)).map(move |v| (u, v)))
            .collect()
    }

    pub fn complement(&self) -> ConflictGraph {
        let mut g = ConflictGraph::new(self.n);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.adjacent(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&v| self.adjacent(u, v)))
    }
}

/// For every set `S`, the sets whose active range contains the start of
/// `S`'s range (including `S`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TSets {
    members: Vec<Vec<usize>>,
    /// Distinct `T_S` with at least three members; each yields one
    /// "at most two per row" constraint.
    groups: Vec<Vec<usize>>,
    groups_of: Vec<Vec<usize>>,
    triple_count: Vec<u64>,
}

impl TSets {
    pub fn of(&self, set: usize) -> &[usize] {
        &self.members[set]
    }

    pub fn constraint_groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Indices into [`constraint_groups`](Self::constraint_groups) that
    /// contain `set`.
    pub fn groups_containing(&self, set: usize) -> &[usize] {
        &self.groups_of[set]
    }

    /// Number of conflicting triples (three sets with a common column in
    /// their active ranges) that contain `set`.
    pub fn triple_count(&self, set: usize) -> u64 {
        self.triple_count[set]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn compute_t_sets(ranges: &[ActiveRange]) -> TSets {
    let n = ranges.len();
    let members: Vec<Vec<usize>> = ranges
        .iter()
        .map(|r| (0..n).filter(|&j| ranges[j].contains(r.start)).collect())
        .collect();

    // Each conflicting triple is counted once, at its member with the
    // largest (start, index): that member's start lies in all three ranges,
    // and the other two precede it.
    let key = |i: usize| (ranges[i].start, i);
    let mut triple_count = vec![0u64; n];
    for s in 0..n {
        let earlier: Vec<usize> = members[s].iter().copied().filter(|&j| key(j) < key(s)).collect();
        let k = earlier.len() as u64;
        if k < 2 {
            continue;
        }
        triple_count[s] += k * (k - 1) / 2;
        for &j in &earlier {
            triple_count[j] += k - 1;
        }
    }

    let mut groups: Vec<Vec<usize>> = members.iter().filter(|m| m.len() >= 3).cloned().collect();
    groups.sort();
    groups.dedup();
    let mut groups_of = vec![Vec::new(); n];
    for (g, grp) in groups.iter().enumerate() {
        for &v in grp {
            groups_of[v].push(g);
        }
    }
    TSets {
        members,
        groups,
        groups_of,
        triple_count,
    }
}

/// Conflict graph for `style` under `ord`, plus T-sets for pair-alternation.
///
/// `Linear` yields the complete graph (every set in its own row); `Disjoint`
/// ignores the order.
pub fn build_conflict_graph(sys: &SetSystem, style: Style, ord: &ColumnOrder) -> (ConflictGraph, Option<TSets>) {
    let n = sys.set_count();
    let mut g = ConflictGraph::new(n);
    if style == Style::Linear {
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v);
            }
        }
        return (g, None);
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if sys.intersects(u, v) {
                g.add_edge(u, v);
            }
        }
    }
    match style {
        Style::NonAlternating => {
            let ranges = active_ranges(&build_membership_matrix(sys), ord);
            for u in 0..n {
                for v in (u + 1)..n {
                    if ranges[u].overlaps(&ranges[v]) {
                        g.add_edge(u, v);
                    }
                }
            }
            (g, None)
        }
        Style::PairAlternating => {
            let ranges = active_ranges(&build_membership_matrix(sys), ord);
            (g, Some(compute_t_sets(&ranges)))
        }
        _ => (g, None),
    }
}

/// Greedy clique: repeatedly take the highest-degree vertex adjacent to
/// everything chosen so far (ties to the lowest index).
pub fn greedy_clique(g: &ConflictGraph) -> Vec<usize> {
    let mut candidates: Vec<usize> = (0..g.vertex_count()).collect();
    let mut clique = Vec::new();
    while let Some(&v) = candidates
        .iter()
        .max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v)))
    {
        clique.push(v);
        candidates.retain(|&u| u != v && g.adjacent(u, v));
    }
    clique
}

/// Sets-to-rows mapping produced by the compression stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowAssignment {
    pub row_of: Vec<usize>,
    pub row_count: usize,
    pub bound: Bound,
    pub status: SolveStatus,
}

impl RowAssignment {
    /// Builds an assignment from arbitrary color labels, renumbering rows by
    /// first appearance in set order.
    pub fn from_colors(colors: &[usize], bound: Bound, status: SolveStatus) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let row_of: Vec<usize> = colors
            .iter()
            .map(|&c| {
                let next = relabel.len();
                *relabel.entry(c).or_insert(next)
            })
            .collect();
        RowAssignment {
            row_count: relabel.len(),
            row_of,
            bound,
            status,
        }
    }

    /// One set per row, in set order.
    pub fn identity(n: usize) -> Self {
        RowAssignment {
            row_of: (0..n).collect(),
            row_count: n,
            bound: Bound::Unbounded,
            status: SolveStatus::Optimal,
        }
    }

    pub fn with_status(mut self, status: SolveStatus) -> Self {
        self.status = status;
        self
    }

    /// Set indices per row, ascending.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.row_count];
        for (s, &r) in self.row_of.iter().enumerate() {
            rows[r].push(s);
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RowCount { expected: usize, found: usize },
    SharedRow { row: usize, sets: Vec<usize> },
    Intersecting { a: usize, b: usize },
    OverlappingRanges { a: usize, b: usize },
    OverBound { row: usize, size: usize, bound: usize },
    ThreeRangesAtColumn { row: usize, position: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowCount { expected, found } => {
                write!(f, "assignment covers {found} sets, expected {expected}")
            }
            Violation::SharedRow { row, sets } => write!(f, "linear style puts sets {sets:?} in row {row}"),
            Violation::Intersecting { a, b } => write!(f, "intersecting sets {a} and {b} share a row"),
            Violation::OverlappingRanges { a, b } => {
                write!(f, "sets {a} and {b} share a row with overlapping active ranges")
            }
            Violation::OverBound { row, size, bound } => write!(f, "row {row} holds {size} sets, bound is {bound}"),
            Violation::ThreeRangesAtColumn { row, position } => {
                write!(f, "more than two active ranges cover position {position} in row {row}")
            }
        }
    }
}

impl std::error::Error for Violation {}

/// Checks `row_of` against `style` and `bound` directly from the set
/// system and column order, without going through the conflict graph.
pub fn validate_assignment(
    sys: &SetSystem,
    style: Style,
    ord: &ColumnOrder,
    row_of: &[usize],
    bound: Bound,
) -> Result<(), Violation> {
    if row_of.len() != sys.set_count() {
        return Err(Violation::RowCount {
            expected: sys.set_count(),
            found: row_of.len(),
        });
    }
    let row_count = row_of.iter().max().map_or(0, |m| m + 1);
    let mut rows = vec![Vec::new(); row_count];
    for (s, &r) in row_of.iter().enumerate() {
        rows[r].push(s);
    }
    let pos = ord.positions();
    let span = |s: usize| {
        let ps = sys.sets()[s].members.iter().map(|&e| pos[e]);
        (ps.clone().min().unwrap(), ps.max().unwrap())
    };
    for (r, sets) in rows.iter().enumerate() {
        if let Some(b) = bound.limit() {
            if sets.len() > b && style != Style::Linear {
                return Err(Violation::OverBound {
                    row: r,
                    size: sets.len(),
                    bound: b,
                });
            }
        }
        if style == Style::Linear {
            if sets.len() > 1 {
                return Err(Violation::SharedRow {
                    row: r,
                    sets: sets.clone(),
                });
            }
            continue;
        }
        for (i, &a) in sets.iter().enumerate() {
            for &b in &sets[i + 1..] {
                if sys.intersects(a, b) {
                    return Err(Violation::Intersecting { a, b });
                }
                if style == Style::NonAlternating {
                    let (sa, ea) = span(a);
                    let (sb, eb) = span(b);
                    if sa <= eb && sb <= ea {
                        return Err(Violation::OverlappingRanges { a, b });
                    }
                }
            }
        }
        if style == Style::PairAlternating {
            let mut cover = vec![0usize; ord.len()];
            for &s in sets {
                let (lo, hi) = span(s);
                for c in &mut cover[lo..=hi] {
                    *c += 1;
                }
            }
            if let Some(p) = cover.iter().position(|&c| c > 2) {
                return Err(Violation::ThreeRangesAtColumn { row: r, position: p + 1 });
            }
        }
    }
    Ok(())
}

/// Bookkeeping for a partial coloring under adjacency, per-row capacity
/// and "at most two per group" constraints. Shared by the greedy and the
/// exact solver.
pub(crate) struct PartialColoring<'a> {
    graph: &'a ConflictGraph,
    tsets: Option<&'a TSets>,
    cap: Option<usize>,
    pub(crate) color_of: Vec<Option<usize>>,
    pub(crate) sizes: Vec<usize>,
    neighbor_colors: Vec<u32>,
    group_colors: Vec<u32>,
    n: usize,
}

impl<'a> PartialColoring<'a> {
    pub(crate) fn new(graph: &'a ConflictGraph, bound: Bound, tsets: Option<&'a TSets>) -> Self {
        let n = graph.vertex_count();
        let group_count = tsets.map_or(0, |t| t.constraint_groups().len());
        PartialColoring {
            graph,
            tsets,
            cap: bound.limit(),
            color_of: vec![None; n],
            sizes: Vec::new(),
            neighbor_colors: vec![0; n * n.max(1)],
            group_colors: vec![0; group_count * n.max(1)],
            n,
        }
    }

    pub(crate) fn used(&self) -> usize {
        self.sizes.len()
    }

    /// Whether `v` may not take color `c` (for `c < used()`).
    pub(crate) fn forbidden(&self, v: usize, c: usize) -> bool {
        if self.neighbor_colors[v * self.n + c] > 0 {
            return true;
        }
        if self.cap.is_some_and(|b| self.sizes[c] >= b) {
            return true;
        }
        if let Some(t) = self.tsets {
            for &g in t.groups_containing(v) {
                if self.group_colors[g * self.n + c] >= 2 {
                    return true;
                }
            }
        }
        false
    }

    pub(crate) fn saturation(&self, v: usize) -> usize {
        (0..self.used()).filter(|&c| self.forbidden(v, c)).count()
    }

    pub(crate) fn first_free(&self, v: usize) -> usize {
        (0..self.used()).find(|&c| !self.forbidden(v, c)).unwrap_or(self.used())
    }

    pub(crate) fn assign(&mut self, v: usize, c: usize) {
        debug_assert!(self.color_of[v].is_none());
        if c == self.sizes.len() {
            self.sizes.push(0);
        }
        self.color_of[v] = Some(c);
        self.sizes[c] += 1;
        for &u in self.graph.neighbors(v) {
            self.neighbor_colors[u * self.n + c] += 1;
        }
        if let Some(t) = self.tsets {
            for &g in t.groups_containing(v) {
                self.group_colors[g * self.n + c] += 1;
            }
        }
    }

    pub(crate) fn unassign(&mut self, v: usize) {
        let c = self.color_of[v].take().expect("vertex is not colored");
        self.sizes[c] -= 1;
        for &u in self.graph.neighbors(v) {
            self.neighbor_colors[u * self.n + c] -= 1;
        }
        if let Some(t) = self.tsets {
            for &g in t.groups_containing(v) {
                self.group_colors[g * self.n + c] -= 1;
            }
        }
        if c + 1 == self.sizes.len() && self.sizes[c] == 0 {
            self.sizes.pop();
        }
    }

    /// Static tie-break weight: degree plus conflicting triples.
    pub(crate) fn weight(&self, v: usize) -> u64 {
        self.graph.degree(v) as u64 + self.tsets.map_or(0, |t| t.triple_count(v))
    }

    /// Uncolored vertex of maximum saturation, then maximum weight, then
    /// lowest index.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn select(&self, weights: &[u64]) -> Option<usize> {
        let mut best: Option<(usize, u64, usize)> = None;
        for v in 0..self.n {
            if self.color_of[v].is_some() {
                continue;
            }
            let s = self.saturation(v);
            let better = match best {
                None => true,
                Some((bs, bw, _)) => s > bs || (s == bs && weights[v] > bw),
            };
            if better {
                best = Some((s, weights[v], v));
            }
        }
        best.map(|(_, _, v)| v)
    }

    pub(crate) fn colors(&self) -> Vec<usize> {
        self.color_of.iter().map(|c| c.expect("incomplete coloring")).collect()
    }
}
