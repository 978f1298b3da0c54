//! Forest-encoded arrays with logarithmic update and prefix sum.
//!
//! An array of `N` values is stored node-per-node on a forest: each node
//! holds the combination of its own logical value with the stored values of
//! its children. Point updates touch a node and its ancestors; prefix sums
//! are read off a small set of stored values. Two constructions are
//! provided: the classic binary [Fenwick tree](forest::build_fenwick) with
//! `O(log2 N)` operations, and the ternary
//! [Sierpinski tree](forest::build_sierpinski), which brings the combined
//! update-plus-query cost per element down to `ceil(log3 N) + 1` touched
//! nodes.
//!
//! The crate also carries an exact GF(2) oracle ([`f2`]) that defines the
//! query sets by linear algebra, a weight analyzer ([`weights`]) for the
//! touched-node statistics and their bounds, and a greedy edge-pruning
//! optimizer ([`prune`]) that trims the average weight below the full-tree
//! value.

pub mod encoding;
pub mod f2;
pub mod forest;
pub mod naive;
pub mod nodeset;
pub mod prune;
pub mod trace;
pub mod weights;

pub use encoding::{
    parity_set, parity_set_walk, signed_coefficients, update_set, Boundary, EncodedArray,
    EncodingError, Mode, SignedCoefficients,
};
pub use f2::{encoding_matrix, parity_sets_oracle, prefix_matrix, BitMatrix, MatrixError};
pub use forest::{
    build_fenwick, build_sierpinski, ceil_log2, ceil_log3, validate_parents, Forest, ForestError,
};
pub use naive::NaiveArray;
pub use nodeset::NodeSet;
pub use prune::{deletion_gain, greedy_prune, PruneReport, PruneStep};
pub use trace::{parse_trace, run_trace, TraceError, TraceOp};
pub use weights::{
    format_ratio, monotonicity_scan, node_weight, weight_bound_check, weight_report,
    weight_report_with, weight_table, MonotonicityScan, WeightReport,
};
