//! The forest-encoded array.
//!
//! A logical array `n_0..n_{N-1}` is stored as `x_j = n_j (+) sum of x over
//! children(j)`, where `(+)` is XOR in bit mode and integer addition in
//! counting mode. Updating logical element `j` touches `x` at `j` and all
//! its ancestors (the update set); a prefix sum is recovered from the
//! parity set, the unique set of stored values that combines to it.
//!
//! The parity set has a closed form on arbitrary forests: treating a root's
//! parent as `+inf`, the stored value `x_k` enters the prefix up to `m`
//! positively when `k <= m < parent(k)` and negatively when
//! `parent(k) <= m < k`. Over bits the signs vanish. This crossing-edge rule
//! is the normative definition here; an ancestor-walk fast path produces the
//! identical sets on forests whose subtrees are contiguous intervals.

use thiserror::Error;

use crate::forest::Forest;
use crate::nodeset::NodeSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("logical array has {got} entries, forest expects {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("node index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("bit mode stores only 0 or 1, found {value} at index {index}")]
    NotABit { index: usize, value: i64 },
    #[error("bit mode updates are flips; delta must be 1, got {delta}")]
    BadDelta { delta: i64 },
}

/// Whether a prefix sum at `j` covers logical elements `0..=j` or `0..j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Inclusive,
    Exclusive,
}

/// Value domain of an encoded array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Bits under XOR.
    Bit,
    /// Integers under addition.
    Count,
}

/// Nodes whose stored values change when logical element `j` changes:
/// `j` plus all of its ancestors.
pub fn update_set(forest: &Forest, j: usize) -> Result<NodeSet, EncodingError> {
    check_index(forest, j)?;
    let mut nodes = vec![j];
    let mut x = j;
    while let Some(p) = forest.parent(x) {
        nodes.push(p);
        x = p;
    }
    Ok(NodeSet::from_unsorted(nodes))
}

/// The parity set for the prefix sum at `j`, by the crossing-edge rule.
pub fn parity_set(forest: &Forest, j: usize, boundary: Boundary) -> Result<NodeSet, EncodingError> {
    check_index(forest, j)?;
    Ok(match prefix_limit(j, boundary) {
        None => NodeSet::new(),
        Some(m) => {
            let (plus, minus) = crossing_scan(forest, m);
            merge_sorted(plus, minus)
        }
    })
}

/// Ancestor-walk fast path for [`parity_set`]; `O(log^2 n)` on the fresh
/// constructions instead of a linear scan.
///
/// Requires [`Forest::subtrees_are_intervals`]; panics otherwise, because
/// the walk can miss crossing nodes on forests with fragmented subtrees.
pub fn parity_set_walk(
    forest: &Forest,
    j: usize,
    boundary: Boundary,
) -> Result<NodeSet, EncodingError> {
    check_index(forest, j)?;
    assert!(
        forest.subtrees_are_intervals(),
        "parity_set_walk requires interval subtrees"
    );
    Ok(match prefix_limit(j, boundary) {
        None => NodeSet::new(),
        Some(m) => {
            let (plus, minus) = crossing_walk(forest, m);
            merge_sorted(plus, minus)
        }
    })
}

/// Coefficients of the stored values in an integer-mode prefix sum:
/// `+1` on nodes at or below the boundary whose parent lies above it,
/// `-1` on nodes above the boundary whose parent lies at or below it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedCoefficients {
    plus: NodeSet,
    minus: NodeSet,
}

impl SignedCoefficients {
    pub fn empty() -> Self {
        SignedCoefficients {
            plus: NodeSet::new(),
            minus: NodeSet::new(),
        }
    }

    pub fn plus(&self) -> &NodeSet {
        &self.plus
    }

    pub fn minus(&self) -> &NodeSet {
        &self.minus
    }

    /// Coefficient of node `k`, if `k` participates at all.
    pub fn get(&self, k: usize) -> Option<i64> {
        if self.plus.contains(k) {
            Some(1)
        } else if self.minus.contains(k) {
            Some(-1)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }

    /// All participating nodes; equals the corresponding parity set.
    pub fn nodes(&self) -> NodeSet {
        self.plus.union(&self.minus)
    }
}

pub fn signed_coefficients(
    forest: &Forest,
    j: usize,
    boundary: Boundary,
) -> Result<SignedCoefficients, EncodingError> {
    check_index(forest, j)?;
    Ok(match prefix_limit(j, boundary) {
        None => SignedCoefficients::empty(),
        Some(m) => {
            let (plus, minus) = crossing_scan(forest, m);
            SignedCoefficients {
                plus: NodeSet::from_sorted(plus),
                minus: NodeSet::from_sorted(minus),
            }
        }
    })
}

/// An array of stored values over a forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedArray {
    forest: Forest,
    values: Vec<i64>,
    mode: Mode,
}

impl EncodedArray {
    /// Encodes a logical array bottom-up: children contribute before parents.
    pub fn encode(logical: &[i64], forest: &Forest, mode: Mode) -> Result<Self, EncodingError> {
        let n = forest.size();
        if logical.len() != n {
            return Err(EncodingError::SizeMismatch {
                expected: n,
                got: logical.len(),
            });
        }
        if mode == Mode::Bit {
            for (index, &value) in logical.iter().enumerate() {
                if value != 0 && value != 1 {
                    return Err(EncodingError::NotABit { index, value });
                }
            }
        }
        let mut values = logical.to_vec();
        for j in forest.post_order() {
            for &c in forest.children(j) {
                values[j] = combine(mode, values[j], values[c]);
            }
        }
        Ok(EncodedArray {
            forest: forest.clone(),
            values,
            mode,
        })
    }

    /// An encoding of the all-zero logical array.
    pub fn zeros(forest: &Forest, mode: Mode) -> Self {
        EncodedArray {
            values: vec![0; forest.size()],
            forest: forest.clone(),
            mode,
        }
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    /// Recovers the logical array: `n_j = x_j (-) combine of children's x`.
    pub fn decode(&self) -> Vec<i64> {
        let mut out = self.values.clone();
        for (j, slot) in out.iter_mut().enumerate() {
            for &c in self.forest.children(j) {
                *slot = uncombine(self.mode, *slot, self.values[c]);
            }
        }
        out
    }

    /// Adds `delta` to logical element `j` by adjusting the update set.
    /// Bit mode only flips, so `delta` must be 1 there.
    pub fn apply_update(&mut self, j: usize, delta: i64) -> Result<(), EncodingError> {
        check_index(&self.forest, j)?;
        if self.mode == Mode::Bit && delta != 1 {
            return Err(EncodingError::BadDelta { delta });
        }
        let mut x = j;
        self.values[x] = combine(self.mode, self.values[x], delta);
        while let Some(p) = self.forest.parent(x) {
            self.values[p] = combine(self.mode, self.values[p], delta);
            x = p;
        }
        Ok(())
    }

    /// Prefix sum of the logical array up to `j`, read off the stored values.
    pub fn prefix_sum(&self, j: usize, boundary: Boundary) -> Result<i64, EncodingError> {
        check_index(&self.forest, j)?;
        let Some(m) = prefix_limit(j, boundary) else {
            return Ok(0);
        };
        let (plus, minus) = if self.forest.subtrees_are_intervals() {
            crossing_walk(&self.forest, m)
        } else {
            crossing_scan(&self.forest, m)
        };
        Ok(match self.mode {
            Mode::Bit => {
                let mut acc = 0;
                for k in plus.iter().chain(minus.iter()) {
                    acc ^= self.values[*k];
                }
                acc
            }
            Mode::Count => {
                let pos: i64 = plus.iter().map(|&k| self.values[k]).sum();
                let neg: i64 = minus.iter().map(|&k| self.values[k]).sum();
                pos - neg
            }
        })
    }
}

fn combine(mode: Mode, a: i64, b: i64) -> i64 {
    match mode {
        Mode::Bit => a ^ b,
        Mode::Count => a + b,
    }
}

fn uncombine(mode: Mode, a: i64, b: i64) -> i64 {
    match mode {
        Mode::Bit => a ^ b,
        Mode::Count => a - b,
    }
}

/// The highest logical index covered by the prefix, or `None` for an
/// empty prefix.
fn prefix_limit(j: usize, boundary: Boundary) -> Option<usize> {
    match boundary {
        Boundary::Inclusive => Some(j),
        Boundary::Exclusive => j.checked_sub(1),
    }
}

/// Positive and negative crossing nodes at boundary `m`, by linear scan.
/// Both vectors come out in ascending order.
fn crossing_scan(forest: &Forest, m: usize) -> (Vec<usize>, Vec<usize>) {
    let n = forest.size();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for k in 0..n {
        let pk = forest.parent(k).unwrap_or(n);
        if k <= m && pk > m {
            plus.push(k);
        } else if k > m && pk <= m {
            minus.push(k);
        }
    }
    (plus, minus)
}

/// Same sets as [`crossing_scan`] via the ancestor walk. Only valid when
/// every subtree is a contiguous interval: then any node crossing the
/// boundary is a root, a node on the chain from `m` to its root, or a
/// child of a chain node.
fn crossing_walk(forest: &Forest, m: usize) -> (Vec<usize>, Vec<usize>) {
    let n = forest.size();
    let mut candidates: Vec<usize> = forest.roots().to_vec();
    let mut x = m;
    loop {
        candidates.push(x);
        candidates.extend_from_slice(forest.children(x));
        match forest.parent(x) {
            Some(p) => x = p,
            None => break,
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for k in candidates {
        let pk = forest.parent(k).unwrap_or(n);
        if k <= m && pk > m {
            plus.push(k);
        } else if k > m && pk <= m {
            minus.push(k);
        }
    }
    (plus, minus)
}

fn merge_sorted(plus: Vec<usize>, minus: Vec<usize>) -> NodeSet {
    NodeSet::from_sorted(plus).union(&NodeSet::from_sorted(minus))
}

fn check_index(forest: &Forest, j: usize) -> Result<(), EncodingError> {
    if j >= forest.size() {
        return Err(EncodingError::IndexOutOfRange {
            index: j,
            size: forest.size(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{build_fenwick, build_sierpinski};

    #[test]
    fn update_set_examples() {
        let s9 = build_sierpinski(9).unwrap();
        assert_eq!(update_set(&s9, 0).unwrap().as_slice(), &[0, 1, 4]);
        assert_eq!(update_set(&s9, 4).unwrap().as_slice(), &[4]);
        let s27 = build_sierpinski(27).unwrap();
        assert_eq!(update_set(&s27, 14).unwrap().as_slice(), &[13, 14]);
        assert!(matches!(
            update_set(&s9, 9),
            Err(EncodingError::IndexOutOfRange { index: 9, size: 9 })
        ));
    }

    #[test]
    fn parity_set_examples() {
        let f7 = build_fenwick(7).unwrap();
        assert_eq!(
            parity_set(&f7, 6, Boundary::Inclusive).unwrap().as_slice(),
            &[3, 5, 6]
        );
        let s9 = build_sierpinski(9).unwrap();
        assert_eq!(
            parity_set(&s9, 4, Boundary::Inclusive).unwrap().as_slice(),
            &[4, 5, 7]
        );
        assert_eq!(
            parity_set(&s9, 8, Boundary::Inclusive).unwrap().as_slice(),
            &[4]
        );
        assert!(parity_set(&s9, 0, Boundary::Exclusive).unwrap().is_empty());
        assert!(parity_set(&f7, 0, Boundary::Exclusive).unwrap().is_empty());
    }

    #[test]
    fn exclusive_shifts_by_one() {
        let s27 = build_sierpinski(27).unwrap();
        for j in 1..27 {
            assert_eq!(
                parity_set(&s27, j, Boundary::Exclusive).unwrap(),
                parity_set(&s27, j - 1, Boundary::Inclusive).unwrap()
            );
        }
    }

    #[test]
    fn walk_matches_scan_on_fresh_forests() {
        for n in 1..=120 {
            for forest in [build_sierpinski(n).unwrap(), build_fenwick(n).unwrap()] {
                for j in 0..n {
                    for b in [Boundary::Inclusive, Boundary::Exclusive] {
                        assert_eq!(
                            parity_set_walk(&forest, j, b).unwrap(),
                            parity_set(&forest, j, b).unwrap(),
                            "n={n} j={j} b={b:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn signed_coefficient_examples() {
        let s9 = build_sierpinski(9).unwrap();
        let c = signed_coefficients(&s9, 4, Boundary::Inclusive).unwrap();
        assert_eq!(c.plus().as_slice(), &[4]);
        assert_eq!(c.minus().as_slice(), &[5, 7]);
        assert_eq!(c.get(4), Some(1));
        assert_eq!(c.get(5), Some(-1));
        assert_eq!(c.get(0), None);

        // Whole-array sum collapses to the unique root.
        let c = signed_coefficients(&s9, 8, Boundary::Inclusive).unwrap();
        assert_eq!(c.plus().as_slice(), &[4]);
        assert!(c.minus().is_empty());

        assert!(signed_coefficients(&s9, 0, Boundary::Exclusive)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn coefficient_keys_equal_parity_set() {
        let s27 = build_sierpinski(27).unwrap();
        for j in 0..27 {
            for b in [Boundary::Inclusive, Boundary::Exclusive] {
                let c = signed_coefficients(&s27, j, b).unwrap();
                assert_eq!(c.nodes(), parity_set(&s27, j, b).unwrap());
            }
        }
    }

    #[test]
    fn encode_examples() {
        let s3 = build_sierpinski(3).unwrap();
        let a = EncodedArray::encode(&[1, 0, 0], &s3, Mode::Bit).unwrap();
        assert_eq!(a.values(), &[1, 1, 0]);

        let s9 = build_sierpinski(9).unwrap();
        let zeros = EncodedArray::encode(&[0; 9], &s9, Mode::Bit).unwrap();
        assert_eq!(zeros.values(), &[0; 9]);
        let mut indicator = [0i64; 9];
        indicator[4] = 1;
        let a = EncodedArray::encode(&indicator, &s9, Mode::Bit).unwrap();
        assert_eq!(a.values(), &indicator);

        assert!(matches!(
            EncodedArray::encode(&[0, 1], &s3, Mode::Bit),
            Err(EncodingError::SizeMismatch {
                expected: 3,
                got: 2
            })
        ));
        assert!(matches!(
            EncodedArray::encode(&[2, 0, 0], &s3, Mode::Bit),
            Err(EncodingError::NotABit { index: 0, value: 2 })
        ));
    }

    #[test]
    fn decode_examples() {
        let f7 = build_fenwick(7).unwrap();
        let all_ones = EncodedArray {
            forest: f7.clone(),
            values: vec![1; 7],
            mode: Mode::Bit,
        };
        assert_eq!(all_ones.decode(), vec![1, 0, 1, 1, 1, 0, 1]);
        let zeros = EncodedArray::zeros(&f7, Mode::Bit);
        assert_eq!(zeros.decode(), vec![0; 7]);
    }

    #[test]
    fn apply_update_examples() {
        let s9 = build_sierpinski(9).unwrap();
        let mut a = EncodedArray::zeros(&s9, Mode::Bit);
        a.apply_update(0, 1).unwrap();
        let mut expected = vec![0i64; 9];
        expected[0] = 1;
        expected[1] = 1;
        expected[4] = 1;
        assert_eq!(a.values(), expected.as_slice());
        a.apply_update(0, 1).unwrap();
        assert_eq!(a.values(), &[0; 9]);

        assert!(matches!(
            a.apply_update(0, 3),
            Err(EncodingError::BadDelta { delta: 3 })
        ));

        let s27 = build_sierpinski(27).unwrap();
        let mut c = EncodedArray::zeros(&s27, Mode::Count);
        c.apply_update(14, 5).unwrap();
        assert_eq!(c.values()[13], 5);
        assert_eq!(c.values()[14], 5);
        assert!(c
            .values()
            .iter()
            .enumerate()
            .all(|(j, &v)| v == 0 || j == 13 || j == 14));
    }

    #[test]
    fn prefix_sum_examples() {
        let f7 = build_fenwick(7).unwrap();
        let a = EncodedArray::encode(&[1, 0, 1, 1, 0, 1, 1], &f7, Mode::Bit).unwrap();
        let x = a.values();
        assert_eq!(
            a.prefix_sum(6, Boundary::Inclusive).unwrap(),
            x[6] ^ x[5] ^ x[3]
        );

        let s9 = build_sierpinski(9).unwrap();
        let zeros = EncodedArray::zeros(&s9, Mode::Bit);
        for j in 0..9 {
            assert_eq!(zeros.prefix_sum(j, Boundary::Inclusive).unwrap(), 0);
        }

        let ones_bit = EncodedArray::encode(&[1; 9], &s9, Mode::Bit).unwrap();
        assert_eq!(ones_bit.prefix_sum(4, Boundary::Inclusive).unwrap(), 1);
        let ones_count = EncodedArray::encode(&[1; 9], &s9, Mode::Count).unwrap();
        assert_eq!(ones_count.prefix_sum(4, Boundary::Inclusive).unwrap(), 5);
        assert_eq!(ones_count.prefix_sum(4, Boundary::Exclusive).unwrap(), 4);
        assert_eq!(ones_count.prefix_sum(0, Boundary::Exclusive).unwrap(), 0);
    }

    #[test]
    fn update_changes_decode_only_at_target() {
        let s27 = build_sierpinski(27).unwrap();
        let logical: Vec<i64> = (0..27).map(|i| (i * 7 + 3) % 11).collect();
        let mut a = EncodedArray::encode(&logical, &s27, Mode::Count).unwrap();
        a.apply_update(14, 5).unwrap();
        let decoded = a.decode();
        for j in 0..27 {
            let expected = logical[j] + if j == 14 { 5 } else { 0 };
            assert_eq!(decoded[j], expected);
        }
    }

    #[test]
    fn thousand_random_round_trips_at_27() {
        let forest = build_sierpinski(27).unwrap();
        let mut state = 0x2468_ace0_1357_9bdfu64;
        let mut next = move || {
            // splitmix64
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        };
        for _ in 0..1000 {
            let bits: Vec<i64> = (0..27).map(|_| (next() & 1) as i64).collect();
            let array = EncodedArray::encode(&bits, &forest, Mode::Bit).unwrap();
            assert_eq!(array.decode(), bits);
        }
    }

    #[test]
    fn prefix_sum_on_pruned_forest_uses_scan() {
        let s9 = build_sierpinski(9).unwrap().delete_edge(5).unwrap();
        assert!(!s9.subtrees_are_intervals());
        let logical = [1i64, 0, 1, 1, 0, 1, 0, 1, 1];
        let a = EncodedArray::encode(&logical, &s9, Mode::Count).unwrap();
        for j in 0..9 {
            let naive: i64 = logical[..=j].iter().sum();
            assert_eq!(a.prefix_sum(j, Boundary::Inclusive).unwrap(), naive);
        }
    }
}
