//! Python bindings for the treesum crate.
//!
//! Exposes the forest constructions, the encoded array with its update and
//! prefix-sum operations, the query-set functions, the weight analyzer and
//! the greedy pruner as the `treesum_py` extension module.
//!
//! Usage from Python:
//!
//!     import treesum_py as ts
//!     forest = ts.Forest.sierpinski(27)
//!     array = ts.EncodedArray([0] * 27, forest, mode="count")
//!     array.apply_update(14, 5)
//!     assert array.prefix_sum(20) == 5
//!     report = ts.greedy_prune(forest)
//!     print(report.deleted, report.avg_after)

use std::collections::BTreeMap;

use num_rational::Ratio;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;

use treesum::encoding::parity_set_walk;
use treesum::prune::{deletion_gain_with, greedy_prune_with};
use treesum::weights::{node_weight_with, weight_report_with};
use treesum::{
    encoding, f2, monotonicity_scan as core_monotonicity_scan, trace,
    weight_bound_check as core_weight_bound_check, weight_table as core_weight_table, Boundary,
    EncodingError, ForestError, Mode,
};

fn forest_err(e: ForestError) -> PyErr {
    match e {
        ForestError::IndexOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn encoding_err(e: EncodingError) -> PyErr {
    match e {
        EncodingError::IndexOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn boundary(inclusive: bool) -> Boundary {
    if inclusive {
        Boundary::Inclusive
    } else {
        Boundary::Exclusive
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "bit" => Ok(Mode::Bit),
        "count" => Ok(Mode::Count),
        other => Err(PyValueError::new_err(format!(
            "mode must be \"bit\" or \"count\", got {other:?}"
        ))),
    }
}

fn ratio_tuple(r: &Ratio<i64>) -> (i64, i64) {
    (*r.numer(), *r.denom())
}

/// A parent-pointer forest over nodes 0..size.
#[pyclass(name = "Forest", eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyForest {
    inner: treesum::Forest,
}

#[pymethods]
impl PyForest {
    /// Build the ternary Sierpinski forest on n nodes.
    #[staticmethod]
    fn sierpinski(n: usize) -> PyResult<Self> {
        Ok(PyForest {
            inner: treesum::build_sierpinski(n).map_err(forest_err)?,
        })
    }

    /// Build the Fenwick (binary indexed tree) forest on n nodes.
    #[staticmethod]
    fn fenwick(n: usize) -> PyResult<Self> {
        Ok(PyForest {
            inner: treesum::build_fenwick(n).map_err(forest_err)?,
        })
    }

    /// Build a forest from a list of parents (None marks a root).
    #[staticmethod]
    fn from_parents(parents: Vec<Option<usize>>) -> PyResult<Self> {
        Ok(PyForest {
            inner: treesum::Forest::from_parents(parents).map_err(forest_err)?,
        })
    }

    /// Parse the canonical JSON form {"n": ..., "parents": [...]}.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyForest {
            inner: treesum::Forest::from_json(text).map_err(forest_err)?,
        })
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn parents(&self) -> Vec<Option<usize>> {
        self.inner.parents().to_vec()
    }

    fn parent(&self, j: usize) -> PyResult<Option<usize>> {
        if j >= self.inner.size() {
            return Err(PyIndexError::new_err(format!(
                "node index {j} out of range for size {}",
                self.inner.size()
            )));
        }
        Ok(self.inner.parent(j))
    }

    fn children(&self, j: usize) -> PyResult<Vec<usize>> {
        if j >= self.inner.size() {
            return Err(PyIndexError::new_err(format!(
                "node index {j} out of range for size {}",
                self.inner.size()
            )));
        }
        Ok(self.inner.children(j).to_vec())
    }

    fn roots(&self) -> Vec<usize> {
        self.inner.roots().to_vec()
    }

    /// Ancestor chain of j, nearest first, excluding j.
    fn ancestors(&self, j: usize) -> PyResult<Vec<usize>> {
        self.inner.ancestors(j).map_err(forest_err)
    }

    /// j plus all of its descendants, sorted.
    fn subtree(&self, j: usize) -> PyResult<Vec<usize>> {
        Ok(self.inner.subtree_nodes(j).map_err(forest_err)?.into_vec())
    }

    /// All edges as (parent, child) pairs in ascending order.
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    /// A new forest with the edge above `child` removed.
    fn delete_edge(&self, child: usize) -> PyResult<Self> {
        Ok(PyForest {
            inner: self.inner.delete_edge(child).map_err(forest_err)?,
        })
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(forest_err)
    }

    /// True when every subtree is a contiguous index interval.
    fn subtrees_are_intervals(&self) -> bool {
        self.inner.subtrees_are_intervals()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_dot(&self) -> String {
        self.inner.to_dot()
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __repr__(&self) -> String {
        format!(
            "Forest(size={}, roots={:?})",
            self.inner.size(),
            self.inner.roots()
        )
    }
}

/// A logical array stored on a forest; updates and prefix sums both touch
/// only logarithmically many stored values on the fresh constructions.
#[pyclass(name = "EncodedArray")]
struct PyEncodedArray {
    inner: treesum::EncodedArray,
}

#[pymethods]
impl PyEncodedArray {
    /// Encode a logical array. mode is "bit" (XOR) or "count" (addition).
    #[new]
    #[pyo3(signature = (values, forest, mode = "bit"))]
    fn new(values: Vec<i64>, forest: &PyForest, mode: &str) -> PyResult<Self> {
        let mode = parse_mode(mode)?;
        Ok(PyEncodedArray {
            inner: treesum::EncodedArray::encode(&values, &forest.inner, mode)
                .map_err(encoding_err)?,
        })
    }

    /// The encoding of the all-zero array.
    #[staticmethod]
    #[pyo3(signature = (forest, mode = "bit"))]
    fn zeros(forest: &PyForest, mode: &str) -> PyResult<Self> {
        let mode = parse_mode(mode)?;
        Ok(PyEncodedArray {
            inner: treesum::EncodedArray::zeros(&forest.inner, mode),
        })
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        match self.inner.mode() {
            Mode::Bit => "bit",
            Mode::Count => "count",
        }
    }

    #[getter]
    fn forest(&self) -> PyForest {
        PyForest {
            inner: self.inner.forest().clone(),
        }
    }

    /// The stored values x.
    fn values(&self) -> Vec<i64> {
        self.inner.values().to_vec()
    }

    /// Recover the logical array.
    fn decode(&self) -> Vec<i64> {
        self.inner.decode()
    }

    /// Add delta to logical element j (bit mode: delta must be 1).
    #[pyo3(signature = (j, delta = 1))]
    fn apply_update(&mut self, j: usize, delta: i64) -> PyResult<()> {
        self.inner.apply_update(j, delta).map_err(encoding_err)
    }

    /// Prefix sum of the logical array up to j.
    #[pyo3(signature = (j, inclusive = true))]
    fn prefix_sum(&self, j: usize, inclusive: bool) -> PyResult<i64> {
        self.inner
            .prefix_sum(j, boundary(inclusive))
            .map_err(encoding_err)
    }

    /// Replay a trace ("U <j> <delta>" / "P <j> <i|e>" lines); returns one
    /// value per P line.
    fn run_trace(&mut self, text: &str) -> PyResult<Vec<i64>> {
        let ops = trace::parse_trace(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        trace::run_trace(&mut self.inner, &ops).map_err(encoding_err)
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __repr__(&self) -> String {
        format!(
            "EncodedArray(size={}, mode={:?})",
            self.inner.size(),
            self.mode()
        )
    }
}

/// Per-node weight statistics for one forest.
#[pyclass(name = "WeightReport")]
struct PyWeightReport {
    #[pyo3(get)]
    n: usize,
    #[pyo3(get)]
    weights: Vec<usize>,
    #[pyo3(get)]
    max_weight: usize,
    /// Exact average weight as a (numerator, denominator) pair.
    #[pyo3(get)]
    avg_weight: (i64, i64),
    #[pyo3(get)]
    bound: usize,
    #[pyo3(get)]
    min_avg: f64,
}

#[pymethods]
impl PyWeightReport {
    fn __repr__(&self) -> String {
        format!(
            "WeightReport(n={}, max={}, avg={}/{}, bound={})",
            self.n, self.max_weight, self.avg_weight.0, self.avg_weight.1, self.bound
        )
    }
}

/// Record of a greedy pruning run.
#[pyclass(name = "PruneReport")]
struct PyPruneReport {
    /// Deleted edges as (parent, child) pairs in deletion order.
    #[pyo3(get)]
    deleted: Vec<(usize, usize)>,
    #[pyo3(get)]
    avg_before: (i64, i64),
    #[pyo3(get)]
    avg_after: (i64, i64),
    json: String,
    forest: treesum::Forest,
}

#[pymethods]
impl PyPruneReport {
    #[getter]
    fn forest(&self) -> PyForest {
        PyForest {
            inner: self.forest.clone(),
        }
    }

    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "PruneReport(deleted={:?}, avg {} -> {})",
            self.deleted,
            format_args!("{}/{}", self.avg_before.0, self.avg_before.1),
            format_args!("{}/{}", self.avg_after.0, self.avg_after.1),
        )
    }
}

/// Nodes whose stored values change when logical element j changes.
#[pyfunction]
fn update_set(forest: &PyForest, j: usize) -> PyResult<Vec<usize>> {
    Ok(encoding::update_set(&forest.inner, j)
        .map_err(encoding_err)?
        .into_vec())
}

/// The set of stored values that combine to the prefix sum at j.
#[pyfunction]
#[pyo3(signature = (forest, j, inclusive = true))]
fn parity_set(forest: &PyForest, j: usize, inclusive: bool) -> PyResult<Vec<usize>> {
    Ok(encoding::parity_set(&forest.inner, j, boundary(inclusive))
        .map_err(encoding_err)?
        .into_vec())
}

/// Signed stored-value coefficients of the integer prefix sum at j,
/// as a {node: +1/-1} dict.
#[pyfunction]
#[pyo3(signature = (forest, j, inclusive = true))]
fn signed_coefficients(
    forest: &PyForest,
    j: usize,
    inclusive: bool,
) -> PyResult<BTreeMap<usize, i64>> {
    let coeffs = encoding::signed_coefficients(&forest.inner, j, boundary(inclusive))
        .map_err(encoding_err)?;
    let mut out = BTreeMap::new();
    for k in coeffs.plus().iter() {
        out.insert(k, 1);
    }
    for k in coeffs.minus().iter() {
        out.insert(k, -1);
    }
    Ok(out)
}

/// Ground-truth parity sets from exact GF(2) linear algebra.
#[pyfunction]
#[pyo3(signature = (forest, inclusive = true))]
fn parity_sets_oracle(forest: &PyForest, inclusive: bool) -> PyResult<Vec<Vec<usize>>> {
    Ok(f2::parity_sets_oracle(&forest.inner, boundary(inclusive))
        .map_err(|e| PyValueError::new_err(e.to_string()))?
        .into_iter()
        .map(|s| s.into_vec())
        .collect())
}

/// |update_set(j) union parity_set(j)|.
#[pyfunction]
#[pyo3(signature = (forest, j, inclusive = true))]
fn node_weight(forest: &PyForest, j: usize, inclusive: bool) -> PyResult<usize> {
    if j >= forest.inner.size() {
        return Err(PyIndexError::new_err(format!(
            "node index {j} out of range for size {}",
            forest.inner.size()
        )));
    }
    Ok(node_weight_with(&forest.inner, j, boundary(inclusive)))
}

/// All node weights at once.
#[pyfunction]
#[pyo3(signature = (forest, inclusive = true))]
fn weight_table(forest: &PyForest, inclusive: bool) -> Vec<usize> {
    core_weight_table(&forest.inner, boundary(inclusive))
}

/// Weight statistics with exact average and the known bounds.
#[pyfunction]
#[pyo3(signature = (forest, inclusive = true))]
fn weight_report(forest: &PyForest, inclusive: bool) -> PyWeightReport {
    let report = weight_report_with(&forest.inner, boundary(inclusive));
    PyWeightReport {
        n: report.n,
        max_weight: report.max_weight,
        avg_weight: ratio_tuple(&report.avg_weight),
        bound: report.bound,
        min_avg: report.min_avg,
        weights: report.weights,
    }
}

/// Checks w <= ceil(log3 N)+1 for all Sierpinski sizes up to n_max, with
/// equality at powers of 3. Returns None, or the first counterexample as
/// (N, j, weight, bound).
#[pyfunction]
fn weight_bound_check(n_max: usize) -> Option<(usize, usize, usize, usize)> {
    match core_weight_bound_check(n_max) {
        Ok(()) => None,
        Err(v) => Some((v.n, v.j, v.weight, v.bound)),
    }
}

/// Weight of node j across Sierpinski sizes j+1..=n_max; returns
/// (weights, sizes_where_it_decreased).
#[pyfunction]
fn monotonicity_scan(j: usize, n_max: usize) -> PyResult<(Vec<usize>, Vec<usize>)> {
    if j >= n_max {
        return Err(PyValueError::new_err(format!(
            "node {j} does not exist below size {n_max}"
        )));
    }
    let scan = core_monotonicity_scan(j, n_max);
    Ok((scan.weights, scan.violations))
}

/// Exact change of the average weight if the edge above `child` were
/// deleted, as a (numerator, denominator) pair. The average defaults to
/// the exclusive-prefix weights the pruner optimizes.
#[pyfunction]
#[pyo3(signature = (forest, child, inclusive = false))]
fn deletion_gain(forest: &PyForest, child: usize, inclusive: bool) -> PyResult<(i64, i64)> {
    let gain = deletion_gain_with(&forest.inner, child, boundary(inclusive)).map_err(forest_err)?;
    Ok(ratio_tuple(&gain))
}

/// Greedy edge pruning to a fixed point: repeatedly sweeps children in
/// ascending order and deletes any edge whose removal strictly lowers the
/// average weight.
#[pyfunction]
#[pyo3(signature = (forest, inclusive = false))]
fn greedy_prune(forest: &PyForest, inclusive: bool) -> PyPruneReport {
    let report = greedy_prune_with(&forest.inner, boundary(inclusive));
    PyPruneReport {
        deleted: report.deleted_edges(),
        avg_before: ratio_tuple(&report.initial_avg),
        avg_after: ratio_tuple(&report.final_avg),
        json: report.to_json(),
        forest: report.forest,
    }
}

/// Fast parity set via the ancestor walk; requires interval subtrees.
#[pyfunction]
#[pyo3(signature = (forest, j, inclusive = true))]
fn parity_set_fast(forest: &PyForest, j: usize, inclusive: bool) -> PyResult<Vec<usize>> {
    if !forest.inner.subtrees_are_intervals() {
        return Err(PyValueError::new_err(
            "fast parity sets need interval subtrees; use parity_set instead",
        ));
    }
    Ok(parity_set_walk(&forest.inner, j, boundary(inclusive))
        .map_err(encoding_err)?
        .into_vec())
}

#[pymodule]
fn treesum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyForest>()?;
    m.add_class::<PyEncodedArray>()?;
    m.add_class::<PyWeightReport>()?;
    m.add_class::<PyPruneReport>()?;
    m.add_function(wrap_pyfunction!(update_set, m)?)?;
    m.add_function(wrap_pyfunction!(parity_set, m)?)?;
    m.add_function(wrap_pyfunction!(parity_set_fast, m)?)?;
    m.add_function(wrap_pyfunction!(signed_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(parity_sets_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(node_weight, m)?)?;
    m.add_function(wrap_pyfunction!(weight_table, m)?)?;
    m.add_function(wrap_pyfunction!(weight_report, m)?)?;
    m.add_function(wrap_pyfunction!(weight_bound_check, m)?)?;
    m.add_function(wrap_pyfunction!(monotonicity_scan, m)?)?;
    m.add_function(wrap_pyfunction!(deletion_gain, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_prune, m)?)?;
    Ok(())
}
