//! Set systems, membership matrices, column orders and the block structure
//! they induce.
//!
//! Column positions are stored 0-based. [`ActiveRange`] reports 1-based
//! positions so that `start`/`end` read the same as the usual
//! `min { i | order(i) in S }` formulation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate element identifier `{0}`")]
    DuplicateElement(String),
    #[error("duplicate set name `{0}`")]
    DuplicateSet(String),
    #[error("set `{0}` is empty")]
    EmptySet(String),
    #[error("set `{set}` references unknown element `{element}`")]
    UnknownMember { set: String, element: String },
    #[error("set `{set}` lists element `{element}` more than once")]
    RepeatedMember { set: String, element: String },
    #[error("set system has no sets")]
    NoSets,
    #[error("invalid column order: {0}")]
    InvalidOrder(String),
}

/// A named set; `members` are indices into [`SetSystem::elements`], sorted
/// ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedSet {
    pub name: String,
    pub members: Vec<usize>,
}

/// The hypergraph being visualized: elements are columns, sets are rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSystem {
    elements: Vec<String>,
    sets: Vec<NamedSet>,
}

impl SetSystem {
    /// Validates and builds a set system from element names and
    /// `(set name, member names)` pairs.
    ///
    /// Elements that belong to no set are dropped; their names are returned
    /// alongside the system so callers can warn about them.
    pub fn new<E, S, M>(elements: E, sets: S) -> Result<(Self, Vec<String>), ModelError>
    where
        E: IntoIterator,
        E::Item: Into<String>,
        S: IntoIterator<Item = (String, M)>,
        M: IntoIterator,
        M::Item: AsRef<str>,
    {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.as_str(), i).is_some() {
                return Err(ModelError::DuplicateElement(e.clone()));
            }
        }

        let mut names = HashSet::new();
        let mut raw_sets = Vec::new();
        for (name, members) in sets {
            if !names.insert(name.clone()) {
                return Err(ModelError::DuplicateSet(name));
            }
            let mut idx = Vec::new();
            let mut seen = HashSet::new();
            for m in members {
                let m = m.as_ref();
                let Some(&i) = index.get(m) else {
                    return Err(ModelError::UnknownMember {
                        set: name,
                        element: m.to_string(),
                    });
                };
                if !seen.insert(i) {
                    return Err(ModelError::RepeatedMember {
                        set: name,
                        element: m.to_string(),
                    });
                }
                idx.push(i);
            }
            if idx.is_empty() {
                return Err(ModelError::EmptySet(name));
            }
            raw_sets.push((name, idx));
        }
        if raw_sets.is_empty() {
            return Err(ModelError::NoSets);
        }

        let mut used = vec![false; elements.len()];
        for (_, idx) in &raw_sets {
            for &i in idx {
                used[i] = true;
            }
        }
        let mut remap = vec![usize::MAX; elements.len()];
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for (i, e) in elements.into_iter().enumerate() {
            if used[i] {
                remap[i] = kept.len();
                kept.push(e);
            } else {
                dropped.push(e);
            }
        }
        let sets = raw_sets
            .into_iter()
            .map(|(name, idx)| {
                let mut members: Vec<usize> = idx.into_iter().map(|i| remap[i]).collect();
                members.sort_unstable();
                NamedSet { name, members }
            })
            .collect();
        Ok((
            SetSystem {
                elements: kept,
                sets,
            },
            dropped,
        ))
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn sets(&self) -> &[NamedSet] {
        &self.sets
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn set_name(&self, i: usize) -> &str {
        &self.sets[i].name
    }

    /// True if sets `i` and `j` share at least one element.
    pub fn intersects(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.sets[i].members, &self.sets[j].members);
        let (mut p, mut q) = (0, 0);
        while p < a.len() && q < b.len() {
            match a[p].cmp(&b[q]) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// Binary `sets x elements` incidence matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl MembershipMatrix {
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Self {
        let n_rows = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "ragged membership matrix"
        );
        let bits = rows.into_iter().flatten().collect();
        MembershipMatrix {
            rows: n_rows,
            cols,
            bits,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[bool] {
        &self.bits[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<bool> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    /// Hamming distance between two columns.
    pub fn column_distance(&self, a: usize, b: usize) -> u32 {
        (0..self.rows)
            .filter(|&r| self.get(r, a) != self.get(r, b))
            .count() as u32
    }

    pub fn row_sum(&self, row: usize) -> usize {
        self.row(row).iter().filter(|&&b| b).count()
    }
}

/// A permutation of column indices: `perm[position] = column`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnOrder {
    perm: Vec<usize>,
}

impl ColumnOrder {
    pub fn new(perm: Vec<usize>) -> Result<Self, ModelError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &c in &perm {
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(ModelError::InvalidOrder(format!(
                    "{perm:?} is not a permutation of 0..{n}"
                )));
            }
        }
        Ok(ColumnOrder { perm })
    }

    pub fn identity(n: usize) -> Self {
        ColumnOrder {
            perm: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn column_at(&self, position: usize) -> usize {
        self.perm[position]
    }

    /// Inverse permutation: `positions()[column] = position`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.perm.len()];
        for (p, &c) in self.perm.iter().enumerate() {
            pos[c] = p;
        }
        pos
    }

    pub fn reversed(&self) -> Self {
        let mut perm = self.perm.clone();
        perm.reverse();
        ColumnOrder { perm }
    }
}

/// Span of a set's block link, as 1-based column positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActiveRange {
    pub start: usize,
    pub end: usize,
}

impl ActiveRange {
    pub fn contains(&self, position: usize) -> bool {
        self.start <= position && position <= self.end
    }

    pub fn overlaps(&self, other: &ActiveRange) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

impl fmt::Display for ActiveRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// A maximal run of one set's elements under a column order, as 0-based
/// inclusive positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub start: usize,
    pub end: usize,
}

impl Block {
    pub fn width(&self) -> usize {
        self.end - self.start + 1
    }
}

pub fn build_membership_matrix(sys: &SetSystem) -> MembershipMatrix {
    let cols = sys.element_count();
    let mut bits = vec![false; sys.set_count() * cols];
    for (i, set) in sys.sets().iter().enumerate() {
        for &j in &set.members {
            bits[i * cols + j] = true;
        }
    }
    MembershipMatrix {
        rows: sys.set_count(),
        cols,
        bits,
    }
}

/// Blocks of one matrix row under `ord`, left to right.
pub fn blocks(mat: &MembershipMatrix, row: usize, ord: &ColumnOrder) -> Vec<Block> {
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for (p, &c) in ord.as_slice().iter().enumerate() {
        match (mat.get(row, c), open) {
            (true, None) => open = Some(p),
            (false, Some(s)) => {
                out.push(Block { start: s, end: p - 1 });
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        out.push(Block {
            start: s,
            end: ord.len() - 1,
        });
    }
    out
}

/// Per-set block counts and their total.
pub fn count_blocks(mat: &MembershipMatrix, ord: &ColumnOrder) -> (Vec<usize>, usize) {
    debug_assert_eq!(mat.cols(), ord.len());
    let per_set: Vec<usize> = (0..mat.rows())
        .map(|r| {
            let mut count = 0;
            let mut prev = false;
            for &c in ord.as_slice() {
                let cur = mat.get(r, c);
                if cur && !prev {
                    count += 1;
                }
                prev = cur;
            }
            count
        })
        .collect();
    let total = per_set.iter().sum();
    (per_set, total)
}

pub fn active_range(set_index: usize, mat: &MembershipMatrix, ord: &ColumnOrder) -> ActiveRange {
    let mut first = None;
    let mut last = 0;
    for (p, &c) in ord.as_slice().iter().enumerate() {
        if mat.get(set_index, c) {
            first.get_or_insert(p);
            last = p;
        }
    }
    let start = first.expect("active range of an empty set");
    ActiveRange {
        start: start + 1,
        end: last + 1,
    }
}

pub fn active_ranges(mat: &MembershipMatrix, ord: &ColumnOrder) -> Vec<ActiveRange> {
    (0..mat.rows()).map(|i| active_range(i, mat, ord)).collect()
}

/// Whether the blocks of two sets alternate (X, Y, X in block-start order).
///
/// Only meaningful for disjoint sets; for those it coincides with
/// overlapping active ranges.
pub fn alternates(set_i: usize, set_j: usize, mat: &MembershipMatrix, ord: &ColumnOrder) -> bool {
    let mut starts: Vec<(usize, usize)> = blocks(mat, set_i, ord)
        .into_iter()
        .map(|b| (b.start, set_i))
        .chain(blocks(mat, set_j, ord).into_iter().map(|b| (b.start, set_j)))
        .collect();
    starts.sort_unstable();
    // The owner sequence contains X,Y,X as a subsequence exactly when it has
    // at least three runs.
    let mut runs = 0;
    let mut prev = None;
    for (_, owner) in starts {
        if prev != Some(owner) {
            runs += 1;
            prev = Some(owner);
        }
    }
    runs >= 3
}

/// Columns of the original matrix grouped by identical bit-vectors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnMultiplicity {
    /// `groups[k]` lists the original columns merged into reduced column
    /// `k`, ascending.
    groups: Vec<Vec<usize>>,
}

impl ColumnMultiplicity {
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn multiplicity(&self, reduced: usize) -> usize {
        self.groups[reduced].len()
    }

    pub fn original_len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Expands an order on reduced columns to an order on the original ones,
    /// keeping merged duplicates adjacent.
    pub fn expand(&self, reduced: &ColumnOrder) -> ColumnOrder {
        let perm = reduced
            .as_slice()
            .iter()
            .flat_map(|&k| self.groups[k].iter().copied())
            .collect();
        ColumnOrder { perm }
    }
}

pub fn collapse_duplicate_columns(mat: &MembershipMatrix) -> (MembershipMatrix, ColumnMultiplicity) {
    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for c in 0..mat.cols() {
        let col = mat.column(c);
        match seen.get(&col) {
            Some(&k) => groups[k].push(c),
            None => {
                seen.insert(col, groups.len());
                groups.push(vec![c]);
            }
        }
    }
    let rows = (0..mat.rows())
        .map(|r| groups.iter().map(|g| mat.get(r, g[0])).collect())
        .collect();
    let reduced = if groups.is_empty() {
        MembershipMatrix {
            rows: mat.rows(),
            cols: 0,
            bits: Vec::new(),
        }
    } else {
        MembershipMatrix::from_rows(rows)
    };
    (reduced, ColumnMultiplicity { groups })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn toy() -> SetSystem {
        SetSystem::new(
            ["a", "b", "c", "d"],
            [
                ("S1".to_string(), vec!["a", "c"]),
                ("S2".to_string(), vec!["b"]),
                ("S3".to_string(), vec!["d"]),
            ],
        )
        .unwrap()
        .0
    }

    pub(crate) fn system_from_rows(rows: &[Vec<bool>]) -> SetSystem {
        let cols = rows[0].len();
        let elements: Vec<String> = (0..cols).map(|j| format!("e{j}")).collect();
        let sets = rows.iter().enumerate().map(|(i, r)| {
            let members: Vec<String> = (0..cols).filter(|&j| r[j]).map(|j| format!("e{j}")).collect();
            (format!("S{i}"), members)
        });
        SetSystem::new(elements, sets).unwrap().0
    }

    /// Random matrix with nonempty rows and no all-zero columns.
    pub(crate) fn arb_rows(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(any::<bool>(), c), r).prop_map(move |mut rows| {
                for (i, row) in rows.iter_mut().enumerate() {
                    if !row.iter().any(|&b| b) {
                        row[i % c] = true;
                    }
                }
                for j in 0..c {
                    if !rows.iter().any(|row| row[j]) {
                        let r = j % rows.len();
                        rows[r][j] = true;
                    }
                }
                rows
            })
        })
    }

    pub(crate) fn arb_order(n: usize) -> impl Strategy<Value = ColumnOrder> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|p| ColumnOrder::new(p).unwrap())
    }

    fn order_by_names(sys: &SetSystem, names: &[&str]) -> ColumnOrder {
        let perm = names
            .iter()
            .map(|n| sys.elements().iter().position(|e| e == n).unwrap())
            .collect();
        ColumnOrder::new(perm).unwrap()
    }

    #[test]
    fn matrix_of_toy_system() {
        let mat = build_membership_matrix(&toy());
        assert_eq!(mat.row(0), &[true, false, true, false]);
        assert_eq!(mat.row(1), &[false, true, false, false]);
        assert_eq!(mat.row(2), &[false, false, false, true]);
    }

    #[test]
    fn single_cell_matrix() {
        let (sys, _) = SetSystem::new(["a"], [("A".to_string(), vec!["a"])]).unwrap();
        let mat = build_membership_matrix(&sys);
        assert_eq!((mat.rows(), mat.cols()), (1, 1));
        assert!(mat.get(0, 0));
    }

    #[test]
    fn validation_errors() {
        let dup = SetSystem::new(["a", "a"], [("S".to_string(), vec!["a"])]);
        assert_eq!(dup.unwrap_err(), ModelError::DuplicateElement("a".into()));
        let empty = SetSystem::new(["a"], [("S".to_string(), Vec::<&str>::new())]);
        assert_eq!(empty.unwrap_err(), ModelError::EmptySet("S".into()));
        let unknown = SetSystem::new(["a"], [("S".to_string(), vec!["z"])]);
        assert!(matches!(unknown, Err(ModelError::UnknownMember { .. })));
        let dup_set = SetSystem::new(
            ["a"],
            [("S".to_string(), vec!["a"]), ("S".to_string(), vec!["a"])],
        );
        assert_eq!(dup_set.unwrap_err(), ModelError::DuplicateSet("S".into()));
    }

    #[test]
    fn memberless_elements_are_dropped() {
        let (sys, dropped) =
            SetSystem::new(["a", "x", "b"], [("S".to_string(), vec!["b", "a"])]).unwrap();
        assert_eq!(sys.elements(), &["a".to_string(), "b".to_string()]);
        assert_eq!(dropped, vec!["x".to_string()]);
        assert_eq!(sys.sets()[0].members, vec![0, 1]);
    }

    #[test]
    fn blocks_depend_on_order() {
        let (sys, _) = SetSystem::new(
            ["a", "b", "c"],
            [("S1".to_string(), vec!["a", "c"]), ("S2".to_string(), vec!["b"])],
        )
        .unwrap();
        let mat = build_membership_matrix(&sys);
        let abc = order_by_names(&sys, &["a", "b", "c"]);
        let acb = order_by_names(&sys, &["a", "c", "b"]);
        assert_eq!(count_blocks(&mat, &abc).0[0], 2);
        assert_eq!(count_blocks(&mat, &acb).0[0], 1);
    }

    #[test]
    fn all_ones_row_is_one_block() {
        let mat = MembershipMatrix::from_rows(vec![vec![true; 5]]);
        let ord = ColumnOrder::new(vec![3, 1, 4, 0, 2]).unwrap();
        assert_eq!(count_blocks(&mat, &ord), (vec![1], 1));
    }

    #[test]
    fn toy_ranges_and_alternation() {
        let sys = toy();
        let mat = build_membership_matrix(&sys);
        let ord = ColumnOrder::identity(4);
        assert_eq!(active_range(0, &mat, &ord), ActiveRange { start: 1, end: 3 });
        assert_eq!(active_range(2, &mat, &ord), ActiveRange { start: 4, end: 4 });
        assert!(alternates(0, 1, &mat, &ord));
        assert!(alternates(1, 0, &mat, &ord));
        let (sys2, _) = SetSystem::new(
            ["a", "b", "c", "d"],
            [("S1".to_string(), vec!["a", "b"]), ("S3".to_string(), vec!["d"])],
        )
        .unwrap();
        let mat2 = build_membership_matrix(&sys2);
        assert!(!alternates(0, 1, &mat2, &ColumnOrder::identity(sys2.element_count())));
    }

    #[test]
    fn collapse_merges_identical_columns() {
        let mat = MembershipMatrix::from_rows(vec![
            vec![true, false, true],
            vec![false, true, false],
        ]);
        let (reduced, mult) = collapse_duplicate_columns(&mat);
        assert_eq!(reduced.cols(), 2);
        assert_eq!(mult.groups(), &[vec![0, 2], vec![1]]);
        assert_eq!(mult.multiplicity(0), 2);

        let distinct = MembershipMatrix::from_rows(vec![vec![true, false], vec![false, true]]);
        let (same, _) = collapse_duplicate_columns(&distinct);
        assert_eq!(same, distinct);
    }

    /// Independent run counter: counts 0->1 transitions on the permuted row
    /// with a sentinel zero in front.
    fn scan_runs(mat: &MembershipMatrix, ord: &ColumnOrder) -> usize {
        let mut total = 0;
        for r in 0..mat.rows() {
            let seq: Vec<u8> = std::iter::once(0)
                .chain(ord.as_slice().iter().map(|&c| mat.get(r, c) as u8))
                .collect();
            total += seq.windows(2).filter(|w| w == &[0, 1]).count();
        }
        total
    }

    proptest! {
        #[test]
        fn row_sums_match_cardinalities(rows in arb_rows(8, 10)) {
            let sys = system_from_rows(&rows);
            let mat = build_membership_matrix(&sys);
            for (i, set) in sys.sets().iter().enumerate() {
                prop_assert_eq!(mat.row_sum(i), set.members.len());
            }
        }

        #[test]
        fn block_total_matches_scan((rows, ord) in arb_rows(5, 6).prop_flat_map(|r| {
            let c = r[0].len();
            (Just(r), arb_order(c))
        })) {
            let mat = MembershipMatrix::from_rows(rows);
            let (per_set, total) = count_blocks(&mat, &ord);
            prop_assert_eq!(total, scan_runs(&mat, &ord));
            prop_assert_eq!(total, per_set.iter().sum::<usize>());
            for (r, &k) in per_set.iter().enumerate() {
                prop_assert!(k >= 1);
                let range = active_range(r, &mat, &ord);
                let contiguous = range.end - range.start + 1 == mat.row_sum(r);
                prop_assert_eq!(k == 1, contiguous);
            }
            prop_assert_eq!(count_blocks(&mat, &ord.reversed()).1, total);
        }

        #[test]
        fn block_total_ignores_row_permutation((rows, ord, seed) in arb_rows(6, 6).prop_flat_map(|r| {
            let c = r[0].len();
            (Just(r), arb_order(c), any::<u64>())
        })) {
            let mut shuffled = rows.clone();
            let k = (seed as usize) % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
            let a = MembershipMatrix::from_rows(rows);
            let b = MembershipMatrix::from_rows(shuffled);
            prop_assert_eq!(count_blocks(&a, &ord).1, count_blocks(&b, &ord).1);
        }

        #[test]
        fn ranges_match_position_scan((rows, ord) in arb_rows(6, 8).prop_flat_map(|r| {
            let c = r[0].len();
            (Just(r), arb_order(c))
        })) {
            let mat = MembershipMatrix::from_rows(rows);
            let pos = ord.positions();
            for r in 0..mat.rows() {
                let ps: Vec<usize> = (0..mat.cols()).filter(|&c| mat.get(r, c)).map(|c| pos[c] + 1).collect();
                let range = active_range(r, &mat, &ord);
                prop_assert_eq!(range.start, *ps.iter().min().unwrap());
                prop_assert_eq!(range.end, *ps.iter().max().unwrap());
            }
        }

        #[test]
        fn disjoint_sets_alternate_iff_ranges_overlap((rows, ord) in arb_rows(6, 8).prop_flat_map(|r| {
            let c = r[0].len();
            (Just(r), arb_order(c))
        })) {
            let mat = MembershipMatrix::from_rows(rows);
            for i in 0..mat.rows() {
                for j in 0..mat.rows() {
                    let disjoint = (0..mat.cols()).all(|c| !(mat.get(i, c) && mat.get(j, c)));
                    if i == j || !disjoint {
                        continue;
                    }
                    let overlap = active_range(i, &mat, &ord).overlaps(&active_range(j, &mat, &ord));
                    prop_assert_eq!(alternates(i, j, &mat, &ord), overlap);
                }
            }
        }

        #[test]
        fn expansion_preserves_block_count((rows, seed) in (arb_rows(5, 8), any::<u64>())) {
            // Duplicate a few columns so there is something to collapse.
            let mut rows = rows;
            let c = rows[0].len();
            for row in rows.iter_mut() {
                let extra = row[(seed as usize) % c];
                row.push(extra);
                let extra2 = row[0];
                row.push(extra2);
            }
            let mat = MembershipMatrix::from_rows(rows);
            let (reduced, mult) = collapse_duplicate_columns(&mat);
            let mut perm: Vec<usize> = (0..reduced.cols()).collect();
            perm.rotate_left((seed as usize) % reduced.cols());
            let red_ord = ColumnOrder::new(perm).unwrap();
            let full = mult.expand(&red_ord);
            prop_assert_eq!(full.len(), mat.cols());
            prop_assert_eq!(count_blocks(&reduced, &red_ord).1, count_blocks(&mat, &full).1);
        }
    }
}
