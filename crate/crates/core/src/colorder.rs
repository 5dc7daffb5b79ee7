//! Column ordering: minimize the total number of blocks by solving a
//! traveling-salesman tour over the matrix columns.
//!
//! Each unique column is a tour node and edge weights are Hamming
//! distances. One auxiliary all-zeros column closes the cycle, so every
//! block contributes exactly one 0->1 and one 1->0 transition and a tour of
//! cost `c` induces a column order with `c / 2` blocks.
//!
//! The exact solver first splits the columns into components (columns are
//! linked when they share a row). Going from the last column of one
//! component to the first of the next costs the same as passing through
//! the auxiliary column, so concatenating optimal component tours is
//! optimal for the whole matrix.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::setmodel::{collapse_duplicate_columns, ColumnMultiplicity, ColumnOrder, MembershipMatrix};
use crate::SolveStatus;

/// Largest component, in unique columns, solved with Held-Karp; larger
/// ones go to branch-and-bound.
pub const HELD_KARP_LIMIT: usize = 20;

#[derive(Debug, Clone)]
pub struct TspInstance {
    node_count: usize,
    dist: Vec<u32>,
    aux_index: usize,
    multiplicity: ColumnMultiplicity,
    /// Rows holding a one, per node; empty for the auxiliary node.
    ones: Vec<Vec<usize>>,
    rows: usize,
}

impl TspInstance {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn aux_index(&self) -> usize {
        self.aux_index
    }

    pub fn multiplicity(&self) -> &ColumnMultiplicity {
        &self.multiplicity
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.node_count + j]
    }

    /// Real nodes grouped by shared rows, each group sorted, groups ordered
    /// by their smallest node.
    fn components(&self) -> Vec<Vec<usize>> {
        let real = self.node_count - 1;
        let mut comp_of_row = vec![usize::MAX; self.rows];
        let mut parent: Vec<usize> = (0..real).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for v in 0..real {
            for &r in &self.ones[v] {
                if comp_of_row[r] == usize::MAX {
                    comp_of_row[r] = v;
                } else {
                    let (a, b) = (find(&mut parent, v), find(&mut parent, comp_of_row[r]));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut index_of_root = vec![usize::MAX; real];
        for v in 0..real {
            let root = find(&mut parent, v);
            if index_of_root[root] == usize::MAX {
                index_of_root[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[index_of_root[root]].push(v);
        }
        groups
    }

    /// The instance over `nodes` plus the auxiliary node, which becomes the
    /// last index again.
    fn restrict(&self, nodes: &[usize]) -> TspInstance {
        let map: Vec<usize> = nodes.iter().copied().chain([self.aux_index]).collect();
        let n = map.len();
        let mut dist = vec![0u32; n * n];
        for (i, &a) in map.iter().enumerate() {
            for (j, &b) in map.iter().enumerate() {
                dist[i * n + j] = self.dist(a, b);
            }
        }
        TspInstance {
            node_count: n,
            dist,
            aux_index: n - 1,
            multiplicity: ColumnMultiplicity::default(),
            ones: map.iter().map(|&v| self.ones[v].clone()).collect(),
            rows: self.rows,
        }
    }

    /// Cost of the closed tour visiting `tour` in order.
    pub fn tour_cost(&self, tour: &[usize]) -> u64 {
        if tour.len() < 2 {
            return 0;
        }
        tour.windows(2)
            .map(|w| self.dist(w[0], w[1]) as u64)
            .sum::<u64>()
            + self.dist(tour[tour.len() - 1], tour[0]) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TourResult {
    /// Column order over the original (uncollapsed) columns.
    pub order: ColumnOrder,
    /// Node sequence starting at the auxiliary node.
    pub tour: Vec<usize>,
    pub tour_cost: u64,
    pub status: SolveStatus,
}

/// Collapses duplicate columns and builds the Hamming-distance instance.
/// The auxiliary node is the last index.
pub fn build_tsp_instance(mat: &MembershipMatrix) -> TspInstance {
    let (reduced, multiplicity) = collapse_duplicate_columns(mat);
    let unique = reduced.cols();
    let n = unique + 1;
    let aux = unique;
    let mut dist = vec![0u32; n * n];
    for i in 0..unique {
        for j in (i + 1)..unique {
            let d = reduced.column_distance(i, j);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
        let ones = (0..reduced.rows()).filter(|&r| reduced.get(r, i)).count() as u32;
        dist[i * n + aux] = ones;
        dist[aux * n + i] = ones;
    }
    let ones = (0..n)
        .map(|i| if i == aux { Vec::new() } else { (0..reduced.rows()).filter(|&r| reduced.get(r, i)).collect() })
        .collect();
    TspInstance {
        node_count: n,
        dist,
        aux_index: aux,
        multiplicity,
        ones,
        rows: reduced.rows(),
    }
}

/// Rotates `tour` so the auxiliary node is last, drops it and expands merged
/// duplicate columns in place.
pub fn tour_to_column_order(tour: &[usize], aux_index: usize, mult: &ColumnMultiplicity) -> ColumnOrder {
    let p = tour
        .iter()
        .position(|&v| v == aux_index)
        .expect("tour must contain the auxiliary node");
    let reduced: Vec<usize> = tour[p + 1..].iter().chain(&tour[..p]).copied().collect();
    let reduced = ColumnOrder::new(reduced).expect("tour must visit every column once");
    mult.expand(&reduced)
}

fn finish(inst: &TspInstance, tour: Vec<usize>, status: SolveStatus) -> TourResult {
    let tour_cost = inst.tour_cost(&tour);
    let order = tour_to_column_order(&tour, inst.aux_index, &inst.multiplicity);
    TourResult {
        order,
        tour,
        tour_cost,
        status,
    }
}

/// Nearest-neighbor construction, local search, a seeded annealing pass and
/// a final descent. Deterministic for a fixed `(inst, seed)`.
pub fn solve_tour_heuristic(inst: &TspInstance, seed: u64) -> TourResult {
    let tour = heuristic_tour(inst, seed);
    finish(inst, tour, SolveStatus::HeuristicOnly)
}

/// Minimum-cost tour, or the heuristic tour flagged `TimeoutFallback` if the
/// search does not finish within `timeout`.
pub fn solve_tour_exact(inst: &TspInstance, timeout: Duration, seed: u64) -> TourResult {
    let deadline = Instant::now() + timeout;
    let fallback = |inst: &TspInstance| finish(inst, heuristic_tour(inst, seed), SolveStatus::TimeoutFallback);
    if timeout.is_zero() {
        return fallback(inst);
    }
    let mut tour = vec![inst.aux_index];
    for nodes in inst.components() {
        let sub = inst.restrict(&nodes);
        let Some(sub_tour) = solve_component(&sub, deadline, seed) else {
            return fallback(inst);
        };
        // Drop the sub-instance's auxiliary node, which is always first.
        tour.extend(sub_tour[1..].iter().map(|&v| nodes[v]));
    }
    finish(inst, tour, SolveStatus::Optimal)
}

/// Optimal tour starting at the auxiliary node, or `None` on timeout.
fn solve_component(inst: &TspInstance, deadline: Instant, seed: u64) -> Option<Vec<usize>> {
    let unique = inst.node_count - 1;
    if unique <= 2 {
        // With at most two real nodes there is only one cycle.
        Some(nearest_neighbor(inst))
    } else if unique <= HELD_KARP_LIMIT && inst.dist.iter().map(|&d| d as u64).sum::<u64>() < u16::MAX as u64 {
        held_karp(inst, deadline)
    } else {
        let upper = heuristic_tour(inst, seed);
        let upper = rotate_to_aux(&upper, inst.aux_index);
        branch_and_bound(inst, upper, deadline)
    }
}

fn rotate_to_aux(tour: &[usize], aux: usize) -> Vec<usize> {
    let p = tour.iter().position(|&v| v == aux).expect("tour contains aux");
    tour[p..].iter().chain(&tour[..p]).copied().collect()
}

fn nearest_neighbor(inst: &TspInstance) -> Vec<usize> {
    let n = inst.node_count;
    let mut tour = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut cur = inst.aux_index;
    visited[cur] = true;
    tour.push(cur);
    for _ in 1..n {
        let next = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| (inst.dist(cur, v), v))
            .unwrap();
        visited[next] = true;
        tour.push(next);
        cur = next;
    }
    tour
}

fn heuristic_tour(inst: &TspInstance, seed: u64) -> Vec<usize> {
    let mut tour = nearest_neighbor(inst);
    if inst.node_count <= 3 {
        return tour;
    }
    local_search(inst, &mut tour);
    let annealed = anneal(inst, &tour, seed);
    if inst.tour_cost(&annealed) < inst.tour_cost(&tour) {
        tour = annealed;
        local_search(inst, &mut tour);
    }
    tour
}

/// Change in cost from reversing `tour[i..=j]` (with `1 <= i < j`).
#[inline]
fn two_opt_delta(inst: &TspInstance, tour: &[usize], i: usize, j: usize) -> i64 {
    let n = tour.len();
    let a = tour[i - 1];
    let b = tour[i];
    let c = tour[j];
    let d = tour[(j + 1) % n];
    inst.dist(a, c) as i64 + inst.dist(b, d) as i64 - inst.dist(a, b) as i64 - inst.dist(c, d) as i64
}

/// First-improvement 2-opt and or-opt (segments of 1..=3 nodes) until
/// neither finds an improving move. `tour[0]` stays fixed.
fn local_search(inst: &TspInstance, tour: &mut Vec<usize>) {
    let n = tour.len();
    loop {
        let mut improved = false;
        for i in 1..n - 1 {
            for j in (i + 1)..n {
                if two_opt_delta(inst, tour, i, j) < 0 {
                    tour[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if or_opt_pass(inst, tour) {
            improved = true;
        }
        if !improved {
            break;
        }
    }
}

fn or_opt_pass(inst: &TspInstance, tour: &mut Vec<usize>) -> bool {
    let n = tour.len();
    let mut improved = false;
    for len in 1..=3usize {
        let mut i = 1;
        while i + len <= n {
            let prev = tour[i - 1];
            let first = tour[i];
            let last = tour[i + len - 1];
            let next = tour[(i + len) % n];
            let removal = inst.dist(prev, first) as i64 + inst.dist(last, next) as i64
                - inst.dist(prev, next) as i64;
            let mut best: Option<(i64, usize, bool)> = None;
            for k in 0..n {
                // insert between tour[k] and tour[k+1], outside the segment
                if k + 1 >= i && k < i + len {
                    continue;
                }
                let u = tour[k];
                let v = tour[(k + 1) % n];
                let fwd = inst.dist(u, first) as i64 + inst.dist(last, v) as i64 - inst.dist(u, v) as i64;
                let rev = inst.dist(u, last) as i64 + inst.dist(first, v) as i64 - inst.dist(u, v) as i64;
                for (cost, reversed) in [(fwd, false), (rev, true)] {
                    let gain = cost - removal;
                    if gain < 0 && best.is_none_or(|(g, _, _)| gain < g) {
                        best = Some((gain, k, reversed));
                    }
                }
            }
            if let Some((_, k, reversed)) = best {
                let mut seg: Vec<usize> = tour.drain(i..i + len).collect();
                if reversed {
                    seg.reverse();
                }
                let at = if k < i { k + 1 } else { k + 1 - len };
                tour.splice(at..at, seg);
                improved = true;
            }
            i += 1;
        }
    }
    improved
}

/// Simulated annealing over random segment reversals with a geometric
/// schedule: the start temperature is half the mean edge weight, it cools
/// to 1% of that, and the move budget is `100 * n^2` capped at 100 000.
fn anneal(inst: &TspInstance, start: &[usize], seed: u64) -> Vec<usize> {
    let n = start.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tour = start.to_vec();
    let mut cost = inst.tour_cost(&tour) as i64;
    let mut best = tour.clone();
    let mut best_cost = cost;

    let mean = inst.dist.iter().map(|&d| d as f64).sum::<f64>() / (n * n) as f64;
    let t0 = (mean * 0.5).max(0.5);
    let t_end = t0 * 0.01;
    let iters = (100 * n * n).clamp(1_000, 100_000);
    let alpha = (t_end / t0).powf(1.0 / iters as f64);
    let mut temp = t0;
    for _ in 0..iters {
        let mut i = rng.gen_range(1..n);
        let mut j = rng.gen_range(1..n);
        if i == j {
            temp *= alpha;
            continue;
        }
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let delta = two_opt_delta(inst, &tour, i, j);
        if delta <= 0 || rng.gen::<f64>() < (-(delta as f64) / temp).exp() {
            tour[i..=j].reverse();
            cost += delta;
            if cost < best_cost {
                best_cost = cost;
                best.copy_from_slice(&tour);
            }
        }
        temp *= alpha;
    }
    best
}

/// Held-Karp over the real nodes with the auxiliary node as fixed start.
fn held_karp(inst: &TspInstance, deadline: Instant) -> Option<Vec<usize>> {
    let k = inst.node_count - 1;
    let aux = inst.aux_index;
    let full = (1usize << k) - 1;
    // Callers guarantee every tour costs less than u16::MAX.
    const INF: u16 = u16::MAX;
    let mut cost = vec![INF; (1 << k) * k];
    let mut parent = vec![u8::MAX; (1 << k) * k];
    for j in 0..k {
        cost[(1 << j) * k + j] = inst.dist(aux, j) as u16;
    }
    for mask in 1..=full {
        if mask & 0xfff == 0 && Instant::now() >= deadline {
            return None;
        }
        for j in 0..k {
            if mask & (1 << j) == 0 {
                continue;
            }
            let cur = cost[mask * k + j];
            if cur == INF {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let nm = mask | (1 << t);
                let c = cur + inst.dist(j, t) as u16;
                if c < cost[nm * k + t] {
                    cost[nm * k + t] = c;
                    parent[nm * k + t] = j as u8;
                }
            }
        }
    }
    let last = (0..k)
        .min_by_key(|&j| (cost[full * k + j] as u32 + inst.dist(j, aux), j))
        .unwrap();
    let mut path = Vec::with_capacity(k);
    let (mut mask, mut j) = (full, last);
    loop {
        path.push(j);
        let p = parent[mask * k + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    path.push(aux);
    path.reverse();
    Some(path)
}

struct BranchAndBound<'a> {
    inst: &'a TspInstance,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
    best_cost: u64,
    best: Vec<usize>,
    path: Vec<usize>,
    visited: Vec<bool>,
    /// Node penalties from the root subgradient ascent.
    pi: Vec<f64>,
    // Prim scratch
    members: Vec<usize>,
    key: Vec<f64>,
    in_tree: Vec<bool>,
    /// Unvisited ones per row.
    pending: Vec<u32>,
    open: Vec<bool>,
}

impl BranchAndBound<'_> {
    /// Lower bound on the rest of the tour from `last` back to the
    /// auxiliary node: with penalized weights `d(u, v) + pi[u] + pi[v]` that
    /// path is a spanning tree of `last`, the unvisited nodes and the
    /// auxiliary node, so its cost is at least the penalized MST minus the
    /// penalties it picks up (twice per inner node, once per end).
    fn remaining_bound(&mut self, last: usize) -> f64 {
        let n = self.inst.node_count;
        let aux = self.inst.aux_index;
        self.members.clear();
        self.members.extend((0..n).filter(|&v| v == last || v == aux || !self.visited[v]));
        if self.members.len() <= 1 {
            return 0.0;
        }
        let tree = prim(self.inst, &self.pi, &self.members, &mut self.key, &mut self.in_tree, None);
        let penalties: f64 = self.members.iter().map(|&v| 2.0 * self.pi[v]).sum();
        let ends = if last == aux { 0.0 } else { self.pi[last] + self.pi[aux] };
        tree - penalties + ends
    }

    /// Every row with pending ones must still be entered and left; a row
    /// that is one at `last` must at least be left.
    fn row_bound(&mut self, last: usize) -> u64 {
        for &r in &self.inst.ones[last] {
            self.open[r] = true;
        }
        let total = (0..self.inst.rows)
            .map(|r| match (self.open[r], self.pending[r] > 0) {
                (true, _) => 1,
                (false, true) => 2,
                (false, false) => 0,
            })
            .sum();
        for &r in &self.inst.ones[last] {
            self.open[r] = false;
        }
        total
    }

    fn visit(&mut self, v: usize) {
        self.visited[v] = true;
        self.path.push(v);
        for &r in &self.inst.ones[v] {
            self.pending[r] -= 1;
        }
    }

    fn leave(&mut self, v: usize) {
        self.visited[v] = false;
        self.path.pop();
        for &r in &self.inst.ones[v] {
            self.pending[r] += 1;
        }
    }

    fn search(&mut self, cost: u64) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes & 0xff == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
            return;
        }
        let n = self.inst.node_count;
        let last = *self.path.last().unwrap();
        if self.path.len() == n {
            let total = cost + self.inst.dist(last, self.inst.aux_index) as u64;
            if total < self.best_cost {
                self.best_cost = total;
                self.best = self.path.clone();
            }
            return;
        }
        if cost + self.row_bound(last) >= self.best_cost {
            return;
        }
        // Tour costs are integers, so the bound can be rounded up.
        let bound = (self.remaining_bound(last) - 1e-6).ceil().max(0.0) as u64;
        if cost + bound >= self.best_cost {
            return;
        }
        let mut children: Vec<usize> = (0..n).filter(|&v| !self.visited[v]).collect();
        children.sort_by_key(|&v| (self.inst.dist(last, v), v));
        for v in children {
            let c = cost + self.inst.dist(last, v) as u64;
            if c >= self.best_cost {
                continue;
            }
            self.visit(v);
            self.search(c);
            self.leave(v);
            if self.timed_out {
                return;
            }
        }
    }
}

/// Weight of a minimum spanning tree over `members` under penalized weights.
/// With `degree` given, also records each member's tree degree.
fn prim(
    inst: &TspInstance,
    pi: &[f64],
    members: &[usize],
    key: &mut [f64],
    in_tree: &mut [bool],
    mut degree: Option<&mut [u32]>,
) -> f64 {
    let mut parent = vec![usize::MAX; if degree.is_some() { inst.node_count } else { 0 }];
    for &v in members {
        key[v] = f64::INFINITY;
        in_tree[v] = false;
    }
    key[members[0]] = 0.0;
    let mut total = 0.0;
    for _ in 0..members.len() {
        let mut u = usize::MAX;
        for &v in members {
            if !in_tree[v] && (u == usize::MAX || key[v] < key[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        total += key[u];
        if let Some(deg) = degree.as_deref_mut() {
            if parent[u] != usize::MAX {
                deg[u] += 1;
                deg[parent[u]] += 1;
            }
        }
        for &v in members {
            if !in_tree[v] {
                let w = inst.dist(u, v) as f64 + pi[u] + pi[v];
                if w < key[v] {
                    key[v] = w;
                    if !parent.is_empty() {
                        parent[v] = u;
                    }
                }
            }
        }
    }
    total
}

/// Subgradient ascent on the 1-tree bound with the auxiliary node as the
/// special node. Returns the penalties of the best bound found.
fn ascent(inst: &TspInstance, upper: u64) -> Vec<f64> {
    let n = inst.node_count;
    let aux = inst.aux_index;
    let others: Vec<usize> = (0..n).filter(|&v| v != aux).collect();
    let mut pi = vec![0.0; n];
    let mut best_pi = pi.clone();
    let mut best = f64::NEG_INFINITY;
    let mut key = vec![0.0; n];
    let mut in_tree = vec![false; n];
    let mut degree = vec![0u32; n];
    let mut step_scale = 2.0;
    let mut stale = 0;
    for _ in 0..(10 * n).clamp(100, 1000) {
        degree.iter_mut().for_each(|d| *d = 0);
        let mut tree = prim(inst, &pi, &others, &mut key, &mut in_tree, Some(&mut degree));
        let mut aux_edges: Vec<(f64, usize)> = others
            .iter()
            .map(|&v| (inst.dist(aux, v) as f64 + pi[aux] + pi[v], v))
            .collect();
        aux_edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(w, v) in aux_edges.iter().take(2) {
            tree += w;
            degree[v] += 1;
        }
        degree[aux] = 2;
        let bound = tree - 2.0 * pi.iter().sum::<f64>();
        if bound > best + 1e-9 {
            best = bound;
            best_pi.copy_from_slice(&pi);
            stale = 0;
        } else {
            stale += 1;
            if stale >= 10 {
                step_scale /= 2.0;
                stale = 0;
            }
        }
        let norm: f64 = degree.iter().map(|&d| (d as f64 - 2.0).powi(2)).sum();
        if norm == 0.0 || best > upper as f64 - 1.0 + 1e-9 || step_scale < 1e-4 {
            break;
        }
        let step = step_scale * (upper as f64 - bound).max(1.0) / norm;
        for v in 0..n {
            pi[v] += step * (degree[v] as f64 - 2.0);
        }
    }
    best_pi
}

fn branch_and_bound(inst: &TspInstance, upper: Vec<usize>, deadline: Instant) -> Option<Vec<usize>> {
    let n = inst.node_count;
    let aux = inst.aux_index;
    let mut visited = vec![false; n];
    visited[aux] = true;
    let best_cost = inst.tour_cost(&upper);
    let mut pending = vec![0u32; inst.rows];
    for r in inst.ones.iter().flatten() {
        pending[*r] += 1;
    }
    let mut bb = BranchAndBound {
        inst,
        deadline,
        nodes: 0,
        timed_out: false,
        best_cost,
        best: upper,
        path: vec![aux],
        visited,
        pi: ascent(inst, best_cost),
        members: Vec::with_capacity(n),
        key: vec![0.0; n],
        in_tree: vec![false; n],
        pending,
        open: vec![false; inst.rows],
    };
    bb.search(0);
    (!bb.timed_out).then_some(bb.best)
}
