//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the checked quantity. Run with
//! `cargo test -p treesum --test acceptance -- --nocapture` to see them.

mod common;

use std::time::Instant;

use num_rational::Ratio;
use rand::Rng;
use treesum::{
    build_fenwick, build_sierpinski, greedy_prune, parity_set, parity_sets_oracle, weight_bound_check,
    weight_table, Boundary, EncodedArray, Mode, NaiveArray,
};

fn ratio_to_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[test]
fn criterion_1_full_tree_weights_are_exact() {
    let start = Instant::now();
    for k in 0..=6u32 {
        let n = 3usize.pow(k);
        let forest = build_sierpinski(n).unwrap();
        let weights = weight_table(&forest, Boundary::Inclusive);
        assert!(
            weights.iter().all(|&w| w == k as usize + 1),
            "N={n}: expected every weight to be {}",
            k + 1
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}, budget 10 s");
    println!(
        "criterion 1: PASS - every node weight equals log3(N)+1 for N in {{1,3,9,27,81,243,729}} ({elapsed:?})"
    );
}

#[test]
fn criterion_2_weight_bound_holds_up_to_729() {
    let start = Instant::now();
    assert_eq!(weight_bound_check(729), Ok(()));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget 60 s");
    println!(
        "criterion 2: PASS - w_N(j) <= ceil(log3 N)+1 for all N <= 729, all j ({elapsed:?})"
    );
}

#[test]
fn criterion_3_weights_grow_with_size() {
    let tables: Vec<Vec<usize>> = (1..=243usize)
        .map(|n| weight_table(&build_sierpinski(n).unwrap(), Boundary::Inclusive))
        .collect();
    for n in 2..=243usize {
        let (before, after) = (&tables[n - 2], &tables[n - 1]);
        for (j, (&b, &a)) in before.iter().zip(after).enumerate() {
            assert!(
                b <= a,
                "w dropped from {b} to {a} at j={j}, N={}->{n}",
                n - 1
            );
        }
    }
    println!("criterion 3: PASS - w_N(j) non-decreasing in N for all j < 243, N <= 243");
}

#[test]
fn criterion_4_seven_node_fenwick_query() {
    let f7 = build_fenwick(7).unwrap();
    let set = parity_set(&f7, 6, Boundary::Inclusive).unwrap();
    assert_eq!(set.as_slice(), &[3, 5, 6]);

    let logical = [1i64, 1, 0, 1, 0, 0, 1];
    let array = EncodedArray::encode(&logical, &f7, Mode::Bit).unwrap();
    let x = array.values();
    assert_eq!(
        array.prefix_sum(6, Boundary::Inclusive).unwrap(),
        x[6] ^ x[5] ^ x[3]
    );
    println!("criterion 4: PASS - Fenwick(7) inclusive parity set at j=6 is {{3,5,6}}");
}

#[test]
fn criterion_5_pruning_example_at_27() {
    let s27 = build_sierpinski(27).unwrap();
    let pruned = s27.delete_edge(22).unwrap();
    // Weights in the optimizer's metric (exclusive prefixes): nodes 14..=17
    // drop from 4 to 3 and no other node moves.
    let before = weight_table(&s27, Boundary::Exclusive);
    let after = weight_table(&pruned, Boundary::Exclusive);
    for j in 0..27 {
        if (14..=17).contains(&j) {
            assert_eq!((before[j], after[j]), (4, 3), "node {j}");
        } else {
            assert_eq!(before[j], after[j], "node {j} changed");
        }
    }

    let report = greedy_prune(&s27);
    assert!(
        report.deleted_edges().contains(&(13, 22)),
        "greedy run must delete edge (13, 22); deleted {:?}",
        report.deleted_edges()
    );
    println!(
        "criterion 5: PASS - deleting (13,22) drops exactly nodes 14-17 from 4 to 3; greedy deletes it"
    );
}

#[test]
fn criterion_6_crossing_rule_matches_gf2_oracle() {
    for n in 1..=243usize {
        for forest in [build_sierpinski(n).unwrap(), build_fenwick(n).unwrap()] {
            for boundary in [Boundary::Inclusive, Boundary::Exclusive] {
                let oracle = parity_sets_oracle(&forest, boundary).unwrap();
                for (j, expected) in oracle.iter().enumerate() {
                    assert_eq!(
                        &parity_set(&forest, j, boundary).unwrap(),
                        expected,
                        "n={n} j={j} {boundary:?}"
                    );
                }
            }
        }
    }
    let mut rng = common::seeded_rng(0xacce_9106);
    for case in 0..100 {
        let forest = common::random_pruned_forest(&mut rng, 81);
        for boundary in [Boundary::Inclusive, Boundary::Exclusive] {
            let oracle = parity_sets_oracle(&forest, boundary).unwrap();
            for (j, expected) in oracle.iter().enumerate() {
                assert_eq!(
                    &parity_set(&forest, j, boundary).unwrap(),
                    expected,
                    "pruned case {case} j={j}"
                );
            }
        }
    }
    println!(
        "criterion 6: PASS - parity sets equal rows of A*G^-1 for all N <= 243 and 100 pruned forests"
    );
}

#[test]
fn criterion_7_behavioral_equivalence_with_naive_arrays() {
    let mut rng = common::seeded_rng(0xacce_9107);
    for n in [27usize, 100, 243] {
        let forest = build_sierpinski(n).unwrap();
        for mode in [Mode::Bit, Mode::Count] {
            let mut array = EncodedArray::zeros(&forest, mode);
            let mut naive = NaiveArray::new(n, mode);
            for _ in 0..10_000 {
                if rng.random_bool(0.5) {
                    let j = rng.random_range(0..n);
                    let delta = match mode {
                        Mode::Bit => 1,
                        Mode::Count => rng.random_range(-100..=100),
                    };
                    array.apply_update(j, delta).unwrap();
                    naive.update(j, delta).unwrap();
                } else {
                    let j = rng.random_range(0..n);
                    for boundary in [Boundary::Inclusive, Boundary::Exclusive] {
                        assert_eq!(
                            array.prefix_sum(j, boundary).unwrap(),
                            naive.prefix(j, boundary).unwrap(),
                            "n={n} j={j} {mode:?} {boundary:?}"
                        );
                    }
                }
            }
            assert_eq!(array.decode(), naive.values());
        }
    }
    println!(
        "criterion 7: PASS - 10^4 random ops match the naive oracle at N in {{27,100,243}}, both modes"
    );
}

#[test]
fn criterion_8_average_weight_bounds() {
    for k in 0..=6u32 {
        let n = 3usize.pow(k);
        let forest = build_sierpinski(n).unwrap();
        for boundary in [Boundary::Inclusive, Boundary::Exclusive] {
            let weights = weight_table(&forest, boundary);
            let total: usize = weights.iter().sum();
            assert_eq!(
                Ratio::new(total as i64, n as i64),
                Ratio::from_integer(k as i64 + 1),
                "full-tree average at N={n}"
            );
        }
    }

    let report = greedy_prune(&build_sierpinski(27).unwrap());
    assert!(
        report.final_avg <= Ratio::new(104, 27),
        "pruned average {} exceeds 4 - 4/27",
        report.final_avg
    );
    let lower = 54f64.log(3.0);
    assert!(
        ratio_to_f64(&report.final_avg) >= lower - 1e-9,
        "pruned average {} beats the provable minimum {lower}",
        report.final_avg
    );
    println!(
        "criterion 8: PASS - full-tree averages exact; pruned N=27 average {} within [log3(54), 4-4/27]",
        report.final_avg
    );
}

#[test]
fn criterion_9_touched_node_counts_scale() {
    for k in 0..=12u32 {
        let n = 3usize.pow(k);
        let sierpinski = build_sierpinski(n).unwrap();
        let counts = weight_table(&sierpinski, Boundary::Inclusive);
        assert!(
            counts.iter().all(|&c| c == k as usize + 1),
            "sierpinski N=3^{k}: some op touches != {} nodes",
            k + 1
        );

        let fenwick = build_fenwick(n).unwrap();
        let fen_bound = if n == 1 { 1 } else { n.ilog2() as usize + 1 };
        let counts = weight_table(&fenwick, Boundary::Inclusive);
        assert!(
            counts.iter().all(|&c| c <= fen_bound),
            "fenwick N=3^{k}: an op touches more than {fen_bound} nodes"
        );
    }
    println!(
        "criterion 9: PASS - per-op touched nodes equal k+1 on Sierpinski and stay within floor(log2 N)+1 on Fenwick up to N=3^12"
    );
}
