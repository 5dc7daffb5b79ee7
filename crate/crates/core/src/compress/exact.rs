//! Minimum-row coloring by branch-and-bound.
//!
//! The search mirrors the 0/1 model with assignment variables `x[v][c]`
//! and usage variables `y[c]`: minimize the number of used colors, each
//! vertex takes exactly one color, adjacent vertices differ, a color holds
//! at most `B` vertices, and at most two members of any T-set share a
//! color. Colors are opened strictly in index order, which is the
//! `y[c+1] <= y[c]` symmetry cut, and the clique is fixed to the first
//! `|K|` colors before branching.

use std::time::{Duration, Instant};

use super::{ConflictGraph, PartialColoring, RowAssignment, TSets};
use crate::{Bound, SolveStatus};

/// Initial state of the exact search: clique vertices fixed to colors
/// `0..|K|`, everything else open, at most `budget` colors available.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolveState {
    /// `row_of[v] = Some(c)` iff `x[v][c] = 1`.
    pub row_of: Vec<Option<usize>>,
    /// `used[c]` is `y[c]`.
    pub used: Vec<bool>,
    pub clique: Vec<usize>,
    pub budget: usize,
}

impl ExactSolveState {
    pub fn initial(vertex_count: usize, clique: &[usize], budget: usize) -> Self {
        let mut row_of = vec![None; vertex_count];
        for (c, &v) in clique.iter().enumerate() {
            row_of[v] = Some(c);
        }
        let mut used = vec![false; budget.max(clique.len())];
        for u in used.iter_mut().take(clique.len()) {
            *u = true;
        }
        ExactSolveState {
            row_of,
            used,
            clique: clique.to_vec(),
            budget,
        }
    }

    /// `y` is non-increasing in the color index and every assigned color is
    /// marked used.
    pub fn is_consistent(&self) -> bool {
        let monotone = self.used.windows(2).all(|w| w[0] || !w[1]);
        let covered = self.row_of.iter().flatten().all(|&c| self.used.get(c) == Some(&true));
        monotone && covered && self.clique.len() <= self.budget.max(self.clique.len())
    }
}

struct Search<'a> {
    state: PartialColoring<'a>,
    weights: Vec<u64>,
    cap: Option<usize>,
    lower: usize,
    best: usize,
    best_colors: Option<Vec<usize>>,
    remaining: usize,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
}

impl Search<'_> {
    fn prune(&self) -> bool {
        let used = self.state.used();
        if used >= self.best {
            return true;
        }
        if let Some(b) = self.cap {
            let spare: usize = self.state.sizes.iter().map(|&s| b - s).sum();
            if self.remaining > spare {
                let extra = (self.remaining - spare).div_ceil(b);
                if used + extra >= self.best {
                    return true;
                }
            }
        }
        false
    }

    fn run(&mut self) {
        if self.timed_out || self.best <= self.lower {
            return;
        }
        self.nodes += 1;
        if self.nodes & 0x3ff == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
            return;
        }
        let Some(v) = self.state.select(&self.weights) else {
            if self.state.used() < self.best {
                self.best = self.state.used();
                self.best_colors = Some(self.state.colors());
            }
            return;
        };
        if self.prune() {
            return;
        }
        // Neighborless vertices need no special casing here: they can only
        // take colors that are already open or the next one, which keeps
        // `x[v][c] <= y[c]`.
        let used = self.state.used();
        let mut options: Vec<usize> = (0..used).filter(|&c| !self.state.forbidden(v, c)).collect();
        if used + 1 < self.best {
            options.push(used);
        }
        self.remaining -= 1;
        for c in options {
            self.state.assign(v, c);
            self.run();
            self.state.unassign(v);
            if self.timed_out || self.best <= self.lower {
                break;
            }
        }
        self.remaining += 1;
    }
}

/// Minimum number of rows for the given constraints.
///
/// `heuristic` is the greedy solution; its row count is the color budget
/// and it is returned, flagged `TimeoutFallback`, if the search does not
/// finish within `timeout`. Any clique gives a lower bound, as does
/// `ceil(n / B)`.
pub fn exact_min_rows(
    g: &ConflictGraph,
    bound: Bound,
    tsets: Option<&TSets>,
    clique: &[usize],
    heuristic: &RowAssignment,
    timeout: Duration,
) -> RowAssignment {
    let n = g.vertex_count();
    let fallback = || heuristic.clone().with_status(SolveStatus::TimeoutFallback);
    if timeout.is_zero() {
        return fallback();
    }
    debug_assert!(g.is_clique(clique));
    let budget = heuristic.row_count;
    let lower = clique
        .len()
        .max(bound.limit().map_or(0, |b| n.div_ceil(b)))
        .max(usize::from(n > 0));
    if budget <= lower {
        return heuristic.clone().with_status(SolveStatus::Optimal);
    }

    let init = ExactSolveState::initial(n, clique, budget);
    let mut state = PartialColoring::new(g, bound, tsets);
    for &v in &init.clique {
        state.assign(v, init.row_of[v].expect("clique vertex is fixed"));
    }
    let weights: Vec<u64> = (0..n).map(|v| state.weight(v)).collect();
    let mut search = Search {
        state,
        weights,
        cap: bound.limit(),
        lower,
        best: budget,
        best_colors: None,
        remaining: n - clique.len(),
        deadline: Instant::now() + timeout,
        nodes: 0,
        timed_out: false,
    };
    search.run();
    if search.timed_out {
        return fallback();
    }
    match search.best_colors {
        Some(colors) => RowAssignment::from_colors(&colors, bound, SolveStatus::Optimal),
        None => heuristic.clone().with_status(SolveStatus::Optimal),
    }
}
