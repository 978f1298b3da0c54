//! Greedy edge pruning.
//!
//! Deleting an edge removes the child's stored value from every update set
//! that passed through it, at the price of extra parity-set members for
//! later prefixes. Occasionally the trade is favorable and the average node
//! weight drops. The greedy pass sweeps edges in ascending child-index
//! order, deletes any edge whose removal strictly lowers the average
//! weight of the current forest, and repeats until a full sweep deletes
//! nothing. The sweep is strictly sequential, so every recorded step
//! lowers the running average and the result is deterministic.
//!
//! Gains are measured on the exclusive-prefix weights by default: the
//! average being optimized counts, for node `j`, the stored values touched
//! by an update of `j` together with a query of the prefix below `j`.
//! The inclusive variant is available through the `_with` functions.

use num_rational::Ratio;
use serde::Serialize;

use crate::encoding::Boundary;
use crate::forest::{Forest, ForestError};
use crate::weights::weight_table;

/// One accepted deletion: the edge and the exact averages around it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneStep {
    pub parent: usize,
    pub child: usize,
    pub avg_before: Ratio<i64>,
    pub avg_after: Ratio<i64>,
}

/// Full record of a greedy pruning run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneReport {
    pub boundary: Boundary,
    pub initial_avg: Ratio<i64>,
    pub final_avg: Ratio<i64>,
    pub steps: Vec<PruneStep>,
    pub forest: Forest,
}

impl PruneReport {
    /// Deleted edges as `(parent, child)` pairs in deletion order.
    pub fn deleted_edges(&self) -> Vec<(usize, usize)> {
        self.steps.iter().map(|s| (s.parent, s.child)).collect()
    }

    /// JSON form: `{"deleted": [[p, c], ...], "avg_before": "a/b",
    /// "avg_after": "a/b"}` with exact fraction strings.
    pub fn to_json(&self) -> String {
        let doc = PruneReportJson {
            deleted: self.steps.iter().map(|s| [s.parent, s.child]).collect(),
            avg_before: fraction(&self.initial_avg),
            avg_after: fraction(&self.final_avg),
        };
        serde_json::to_string(&doc).expect("prune report serialization cannot fail")
    }
}

#[derive(Serialize)]
struct PruneReportJson {
    deleted: Vec<[usize; 2]>,
    avg_before: String,
    avg_after: String,
}

fn fraction(r: &Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn average_weight(forest: &Forest, boundary: Boundary) -> Ratio<i64> {
    let total: usize = weight_table(forest, boundary).iter().sum();
    Ratio::new(total as i64, forest.size() as i64)
}

/// Exact change in average weight caused by deleting the edge above
/// `child`, under the default (exclusive) weight convention.
pub fn deletion_gain(forest: &Forest, child: usize) -> Result<Ratio<i64>, ForestError> {
    deletion_gain_with(forest, child, Boundary::Exclusive)
}

pub fn deletion_gain_with(
    forest: &Forest,
    child: usize,
    boundary: Boundary,
) -> Result<Ratio<i64>, ForestError> {
    let pruned = forest.delete_edge(child)?;
    Ok(average_weight(&pruned, boundary) - average_weight(forest, boundary))
}

/// Greedy pruning to a fixed point under the default (exclusive) weight
/// convention.
pub fn greedy_prune(forest: &Forest) -> PruneReport {
    greedy_prune_with(forest, Boundary::Exclusive)
}

pub fn greedy_prune_with(forest: &Forest, boundary: Boundary) -> PruneReport {
    let mut current = forest.clone();
    let initial_avg = average_weight(&current, boundary);
    let mut avg = initial_avg;
    let mut steps = Vec::new();
    loop {
        let mut deleted_any = false;
        for child in 0..current.size() {
            let Some(parent) = current.parent(child) else {
                continue;
            };
            let candidate = current
                .delete_edge(child)
                .expect("child has a parent edge");
            let candidate_avg = average_weight(&candidate, boundary);
            if candidate_avg < avg {
                steps.push(PruneStep {
                    parent,
                    child,
                    avg_before: avg,
                    avg_after: candidate_avg,
                });
                current = candidate;
                avg = candidate_avg;
                deleted_any = true;
            }
        }
        if !deleted_any {
            break;
        }
    }
    PruneReport {
        boundary,
        initial_avg,
        final_avg: avg,
        steps,
        forest: current,
    }
}
