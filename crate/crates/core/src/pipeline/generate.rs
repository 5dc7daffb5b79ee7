//! Synthetic co-authorship-style instances.
//!
//! Each set (a "publication") draws a size from 1 to 6 with weights shaped like
//! author counts, then fills each slot independently: with probability
//! `density` it reuses an element already placed in some earlier set,
//! otherwise it takes a fresh element. Enough fresh elements are held back
//! that every later set can still start with one, so at density 0 the sets
//! are pairwise disjoint whenever `n_elements >= n_sets`. Unused elements are
//! not emitted, and the element list is shuffled so the input order carries
//! no hint of the structure.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{derive_seed, PipelineError};
use crate::setmodel::SetSystem;

const SIZE_WEIGHTS: [u32; 6] = [15, 30, 25, 15, 10, 5];

pub fn generate_synthetic(n_sets: usize, n_elements: usize, density: f64, seed: u64) -> Result<SetSystem, PipelineError> {
    if n_sets == 0 || n_elements == 0 {
        return Err(PipelineError::Config("set and element counts must be positive".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(PipelineError::Config(format!("density must lie in [0, 1], got {density}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "generate"));
    let sizes = WeightedIndex::new(SIZE_WEIGHTS).expect("weights are positive");

    let mut fresh = 0usize;
    let mut placed: Vec<usize> = Vec::new();
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(n_sets);
    for i in 0..n_sets {
        let size = sizes.sample(&mut rng) + 1;
        let reserve = (n_sets - i - 1).min(n_elements - fresh.min(n_elements));
        let mut members: Vec<usize> = Vec::with_capacity(size);
        for _ in 0..size {
            let spare_fresh = n_elements.saturating_sub(fresh + reserve);
            let reusable: Vec<usize> = placed.iter().copied().filter(|e| !members.contains(e)).collect();
            let reuse = !reusable.is_empty() && (rng.gen_bool(density) || (spare_fresh == 0 && density > 0.0));
            if reuse {
                members.push(*reusable.choose(&mut rng).expect("non-empty"));
            } else if spare_fresh > 0 || (members.is_empty() && fresh < n_elements) {
                members.push(fresh);
                fresh += 1;
            } else if members.is_empty() {
                // Out of fresh elements: share rather than leave the set empty.
                members.push(*placed.choose(&mut rng).expect("some element was placed"));
            } else {
                break;
            }
        }
        for &e in &members {
            if !placed.contains(&e) {
                placed.push(e);
            }
        }
        sets.push(members);
    }

    let mut elements: Vec<usize> = (0..fresh).collect();
    elements.shuffle(&mut rng);
    let names = elements.iter().map(|e| format!("e{}", e + 1));
    let named_sets = sets.into_iter().enumerate().map(|(i, members)| {
        let m: Vec<String> = members.into_iter().map(|e| format!("e{}", e + 1)).collect();
        (format!("S{}", i + 1), m)
    });
    let (sys, dropped) = SetSystem::new(names, named_sets).expect("generated instance is valid");
    debug_assert!(dropped.is_empty());
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::build_conflict_graph;
    use crate::setmodel::ColumnOrder;
    use crate::Style;

    fn connected(sys: &SetSystem) -> bool {
        let ord = ColumnOrder::identity(sys.element_count());
        let (g, _) = build_conflict_graph(sys, Style::Disjoint, &ord);
        let mut seen = vec![false; g.vertex_count()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    #[test]
    fn density_zero_gives_disjoint_sets() {
        for seed in 0..50 {
            let sys = generate_synthetic(20, 40, 0.0, seed).unwrap();
            for i in 0..sys.set_count() {
                for j in (i + 1)..sys.set_count() {
                    assert!(!sys.intersects(i, j), "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn same_seed_same_instance() {
        assert_eq!(
            generate_synthetic(30, 60, 0.3, 9).unwrap(),
            generate_synthetic(30, 60, 0.3, 9).unwrap()
        );
        assert_ne!(
            generate_synthetic(30, 60, 0.3, 9).unwrap(),
            generate_synthetic(30, 60, 0.3, 10).unwrap()
        );
    }

    #[test]
    fn density_one_is_connected() {
        let hits = (0..100)
            .filter(|&s| connected(&generate_synthetic(20, 40, 1.0, s).unwrap()))
            .count();
        assert!(hits >= 95, "{hits}/100 connected");
    }

    #[test]
    fn sizes_and_counts_stay_in_range() {
        for seed in 0..30 {
            let sys = generate_synthetic(25, 30, 0.4, seed).unwrap();
            assert_eq!(sys.set_count(), 25);
            assert!(sys.element_count() <= 30);
            assert!(sys.sets().iter().all(|s| (1..=6).contains(&s.members.len())));
        }
    }

    #[test]
    fn scarce_elements_still_fill_every_set() {
        let sys = generate_synthetic(10, 3, 0.0, 1).unwrap();
        assert_eq!(sys.set_count(), 10);
        assert!(sys.element_count() <= 3);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(generate_synthetic(0, 5, 0.5, 0).is_err());
        assert!(generate_synthetic(5, 5, 1.5, 0).is_err());
    }
}
