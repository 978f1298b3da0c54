//! Node weights and weight statistics.
//!
//! The weight of node `j` is the size of the union of its update set and
//! its parity set: the number of distinct stored values touched when
//! logical element `j` is both updated and queried. On the Sierpinski
//! construction the maximum weight is bounded by `ceil(log3 N) + 1`, with
//! every node meeting the bound exactly when `N` is a power of 3, and for
//! a fixed node the weight never decreases as `N` grows. The provable
//! minimum for the average weight of any such encoding is `log3(2N)`;
//! reports carry it for comparison.

use std::io;

use num_rational::Ratio;

use crate::encoding::{parity_set, update_set, Boundary};
use crate::forest::{build_sierpinski, ceil_log3, Forest};

/// Weight of a single node: `|update_set(j) union parity_set(j)|`.
///
/// Uses the inclusive prefix convention, the default throughout the
/// weight statistics.
pub fn node_weight(forest: &Forest, j: usize) -> usize {
    node_weight_with(forest, j, Boundary::Inclusive)
}

pub fn node_weight_with(forest: &Forest, j: usize, boundary: Boundary) -> usize {
    let b = update_set(forest, j).expect("index in range");
    let p = parity_set(forest, j, boundary).expect("index in range");
    b.union(&p).len()
}

/// All node weights at once.
///
/// Equivalent to calling [`node_weight_with`] for every node, but runs in
/// `O(n + total chain length)` instead of `O(n^2)`: parity-set sizes come
/// from a difference array over the crossing intervals, and the overlap
/// with the update set is counted along each node's ancestor chain.
pub fn weight_table(forest: &Forest, boundary: Boundary) -> Vec<usize> {
    let n = forest.size();
    let pext: Vec<usize> = (0..n).map(|k| forest.parent(k).unwrap_or(n)).collect();

    // parity_size[m] = |parity set at inclusive boundary m|.
    // Node k participates for m in [k, pext[k]) when its parent lies above
    // it, and for m in [pext[k], k) when below.
    let mut diff = vec![0i64; n + 1];
    for (k, &pk) in pext.iter().enumerate() {
        let (lo, hi) = if pk > k { (k, pk) } else { (pk, k) };
        diff[lo] += 1;
        diff[hi] -= 1;
    }
    let mut parity_size = vec![0usize; n];
    let mut acc = 0i64;
    for m in 0..n {
        acc += diff[m];
        parity_size[m] = acc as usize;
    }

    let depth = depths(forest);

    let crosses = |k: usize, m: usize| (k <= m && pext[k] > m) || (k > m && pext[k] <= m);

    (0..n)
        .map(|j| {
            let update_size = depth[j] + 1;
            let m = match boundary {
                Boundary::Inclusive => Some(j),
                Boundary::Exclusive => j.checked_sub(1),
            };
            match m {
                None => update_size,
                Some(m) => {
                    // Overlap of the ancestor chain (plus j) with the parity set.
                    let mut overlap = 0;
                    let mut x = j;
                    loop {
                        if crosses(x, m) {
                            overlap += 1;
                        }
                        match forest.parent(x) {
                            Some(p) => x = p,
                            None => break,
                        }
                    }
                    update_size + parity_size[m] - overlap
                }
            }
        })
        .collect()
}

fn depths(forest: &Forest) -> Vec<usize> {
    let n = forest.size();
    let mut depth = vec![usize::MAX; n];
    for j in 0..n {
        if depth[j] != usize::MAX {
            continue;
        }
        // Walk up until a node with known depth (or a root), collecting the
        // chain, then assign depths back down it.
        let mut chain = Vec::new();
        let mut x = j;
        let base = loop {
            if depth[x] != usize::MAX {
                break depth[x] + 1;
            }
            chain.push(x);
            match forest.parent(x) {
                Some(p) => x = p,
                None => break 0,
            }
        };
        // chain runs child -> ancestor; the last element sits at `base`.
        for (offset, &v) in chain.iter().rev().enumerate() {
            depth[v] = base + offset;
        }
    }
    depth
}

/// Exhaustive weight statistics for one forest.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightReport {
    pub n: usize,
    pub boundary: Boundary,
    /// Per-node weights, indexed by node.
    pub weights: Vec<usize>,
    pub max_weight: usize,
    /// Exact average weight.
    pub avg_weight: Ratio<i64>,
    /// `ceil(log3 n) + 1`, the Sierpinski worst-case bound.
    pub bound: usize,
    /// `log3(2n)`, the provable minimum average for any such encoding.
    pub min_avg: f64,
}

pub fn weight_report(forest: &Forest) -> WeightReport {
    weight_report_with(forest, Boundary::Inclusive)
}

pub fn weight_report_with(forest: &Forest, boundary: Boundary) -> WeightReport {
    let n = forest.size();
    let weights = weight_table(forest, boundary);
    let total: usize = weights.iter().sum();
    WeightReport {
        n,
        boundary,
        max_weight: weights.iter().copied().max().unwrap_or(0),
        avg_weight: Ratio::new(total as i64, n as i64),
        bound: ceil_log3(n) + 1,
        min_avg: (2.0 * n as f64).log(3.0),
        weights,
    }
}

impl WeightReport {
    /// CSV emission: header `N,j,weight,bound`, one row per node.
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "N,j,weight,bound")?;
        for (j, w) in self.weights.iter().enumerate() {
            writeln!(out, "{},{},{},{}", self.n, j, w, self.bound)?;
        }
        Ok(())
    }
}

/// Formats an exact ratio as `numer/denom`, always including the
/// denominator (`4/1`, not `4`).
pub fn format_ratio(r: &Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Weight of a fixed node across growing Sierpinski forests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityScan {
    pub j: usize,
    /// `weights[i]` is the weight of node `j` in the size `j + 1 + i` forest.
    pub weights: Vec<usize>,
    /// Sizes `N` where the weight at `N + 1` dropped below the weight at `N`.
    pub violations: Vec<usize>,
}

/// Tracks `w_N(j)` for `N = j+1 ..= n_max` on Sierpinski forests and
/// records any decrease (none are expected).
pub fn monotonicity_scan(j: usize, n_max: usize) -> MonotonicityScan {
    assert!(j < n_max, "node {j} does not exist below size {n_max}");
    let weights: Vec<usize> = (j + 1..=n_max)
        .map(|n| {
            let f = build_sierpinski(n).expect("n >= 1");
            weight_table(&f, Boundary::Inclusive)[j]
        })
        .collect();
    let violations = weights
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] < w[0])
        .map(|(i, _)| j + 1 + i)
        .collect();
    MonotonicityScan {
        j,
        weights,
        violations,
    }
}

/// First failure of the Sierpinski weight bound, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundViolation {
    pub n: usize,
    pub j: usize,
    pub weight: usize,
    pub bound: usize,
}

/// Checks, for every Sierpinski forest up to `n_max`, that all node
/// weights stay within `ceil(log3 N) + 1`, and that every node meets the
/// bound exactly when `N` is a power of 3.
pub fn weight_bound_check(n_max: usize) -> Result<(), BoundViolation> {
    for n in 1..=n_max {
        let forest = build_sierpinski(n).expect("n >= 1");
        let bound = ceil_log3(n) + 1;
        let exact = is_power_of_3(n);
        for (j, &w) in weight_table(&forest, Boundary::Inclusive).iter().enumerate() {
            if w > bound || (exact && w != bound) {
                return Err(BoundViolation {
                    n,
                    j,
                    weight: w,
                    bound,
                });
            }
        }
    }
    Ok(())
}

pub fn is_power_of_3(n: usize) -> bool {
    let mut p = n;
    if p == 0 {
        return false;
    }
    while p.is_multiple_of(3) {
        p /= 3;
    }
    p == 1
}
