//! Exhaustive structural checks on the two constructions.

mod common;

use treesum::{
    build_fenwick, build_sierpinski, ceil_log2, ceil_log3, encoding_matrix, forest::next_power_of_3,
    weight_report, weight_table, Boundary,
};

#[test]
fn sierpinski_full_trees_have_the_expected_spine() {
    for k in 1..=6usize {
        let n = 3usize.pow(k as u32);
        let f = build_sierpinski(n).unwrap();
        let root = (n - 1) / 2;
        assert_eq!(f.roots(), &[root], "unique root at n={n}");
        let left = (n / 3 - 1) / 2;
        let right = n - 1 - left;
        assert_eq!(f.parent(left), Some(root));
        assert_eq!(f.parent(right), Some(root));
    }
}

#[test]
fn sierpinski_equals_truncated_next_full_tree() {
    let mut full_parents: Vec<Option<usize>> = Vec::new();
    let mut full_size = 0usize;
    for n in 1..=2187usize {
        let next = next_power_of_3(n);
        if next != full_size {
            full_parents = build_sierpinski(next).unwrap().parents().to_vec();
            full_size = next;
        }
        let truncated: Vec<Option<usize>> = full_parents[..n]
            .iter()
            .map(|p| p.filter(|&q| q < n))
            .collect();
        assert_eq!(
            build_sierpinski(n).unwrap().parents(),
            truncated.as_slice(),
            "n={n}"
        );
    }
}

#[test]
fn fenwick_subtrees_are_the_classic_intervals() {
    for n in 1..=2048usize {
        let f = build_fenwick(n).unwrap();
        for j in 0..n {
            let low_bit = (j + 1) & (j + 1).wrapping_neg();
            let expected: Vec<usize> = (j + 1 - low_bit..=j).collect();
            assert_eq!(
                f.subtree_nodes(j).unwrap().as_slice(),
                expected.as_slice(),
                "n={n} j={j}"
            );
        }
    }
}

#[test]
fn ancestor_chains_stay_logarithmic() {
    for n in 1..=2187usize {
        let s = build_sierpinski(n).unwrap();
        let bound = ceil_log3(n);
        for j in 0..n {
            assert!(s.ancestors(j).unwrap().len() <= bound, "sierpinski n={n} j={j}");
        }
    }
    for n in 1..=2048usize {
        let f = build_fenwick(n).unwrap();
        let bound = ceil_log2(n);
        for j in 0..n {
            assert!(f.ancestors(j).unwrap().len() <= bound, "fenwick n={n} j={j}");
        }
    }
}

#[test]
fn constructed_and_pruned_forests_validate() {
    let mut rng = common::seeded_rng(0x5eed_0001);
    for _ in 0..200 {
        let forest = common::random_pruned_forest(&mut rng, 81);
        assert!(forest.validate().is_ok());
    }
}

#[test]
fn encoding_matrices_stay_invertible() {
    for n in 1..=243usize {
        for forest in [build_sierpinski(n).unwrap(), build_fenwick(n).unwrap()] {
            assert!(encoding_matrix(&forest).invert().is_ok(), "n={n}");
        }
    }
    let mut rng = common::seeded_rng(0x5eed_0002);
    for _ in 0..100 {
        let forest = common::random_pruned_forest(&mut rng, 81);
        assert!(encoding_matrix(&forest).invert().is_ok());
    }
}

#[test]
fn crossing_rule_matches_the_oracle_at_729() {
    use treesum::{parity_set, parity_sets_oracle};
    for forest in [build_sierpinski(729).unwrap(), build_fenwick(729).unwrap()] {
        for boundary in [Boundary::Inclusive, Boundary::Exclusive] {
            let oracle = parity_sets_oracle(&forest, boundary).unwrap();
            for (j, expected) in oracle.iter().enumerate() {
                assert_eq!(&parity_set(&forest, j, boundary).unwrap(), expected);
            }
        }
    }
}

#[test]
fn average_weight_never_beats_the_provable_minimum() {
    for n in 1..=729usize {
        let report = weight_report(&build_sierpinski(n).unwrap());
        let avg = *report.avg_weight.numer() as f64 / *report.avg_weight.denom() as f64;
        assert!(avg >= report.min_avg - 1e-9, "n={n} avg={avg}");
    }
}

#[test]
fn greedy_pruning_respects_the_average_lower_bound() {
    use treesum::greedy_prune;
    let expected_final = [
        (27usize, 103i64, 27i64),
        (81, 43, 9),
        (243, 1400, 243),
        (729, 4924, 729),
    ];
    for (n, numer, denom) in expected_final {
        let report = greedy_prune(&build_sierpinski(n).unwrap());
        assert_eq!(
            report.final_avg,
            num_rational::Ratio::new(numer, denom),
            "n={n}"
        );
        let avg = *report.final_avg.numer() as f64 / *report.final_avg.denom() as f64;
        assert!(avg >= (2.0 * n as f64).log(3.0) - 1e-9, "n={n}");
        assert!(report.final_avg < report.initial_avg);
        assert!(report.forest.validate().is_ok());
        assert!(greedy_prune(&report.forest).steps.is_empty(), "n={n}");
    }
}

#[test]
fn greedy_pruned_forests_keep_oracle_equivalence() {
    use treesum::{greedy_prune, parity_set, parity_sets_oracle};
    let report = greedy_prune(&build_sierpinski(27).unwrap());
    for boundary in [Boundary::Inclusive, Boundary::Exclusive] {
        let oracle = parity_sets_oracle(&report.forest, boundary).unwrap();
        for (j, expected) in oracle.iter().enumerate() {
            assert_eq!(&parity_set(&report.forest, j, boundary).unwrap(), expected);
        }
    }
}

#[test]
fn sierpinski_beats_fenwick_on_max_weight_at_powers_of_3() {
    let expected = [(27usize, 4usize, 5usize), (81, 5, 7), (243, 6, 8), (729, 7, 10)];
    for (n, si_max, fen_max) in expected {
        let si = weight_table(&build_sierpinski(n).unwrap(), Boundary::Inclusive);
        let fen = weight_table(&build_fenwick(n).unwrap(), Boundary::Inclusive);
        assert_eq!(si.iter().copied().max(), Some(si_max), "sierpinski n={n}");
        assert_eq!(fen.iter().copied().max(), Some(fen_max), "fenwick n={n}");
        assert!(si_max < fen_max);
    }
}
