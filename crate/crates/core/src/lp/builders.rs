//! Linear Assignment and Shortest Path as LPs.

use crate::error::{Error, Result};
use crate::lp::graph::Graph;
use crate::lp::model::{Bounds, LinearProgram, Sense};

/// Assignment LP over a `|A| x |B|` matrix, variables laid out row-major.
///
/// With `doubly_stochastic` every row and column sums to one (requires a
/// square matrix). Otherwise the smaller side is matched exactly and the
/// larger side at most once.
///
/// The second return value maps worker `i` to its cost-vector indices.
pub fn build_assignment_lp(
    cost: &[Vec<f64>],
    sense: Sense,
    doubly_stochastic: bool,
) -> Result<(LinearProgram, Vec<Vec<usize>>)> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::config("assignment matrix must be non-empty"));
    }
    if cost.iter().any(|r| r.len() != cols) {
        return Err(Error::config("assignment matrix rows differ in length"));
    }
    if doubly_stochastic && rows != cols {
        return Err(Error::config(format!("doubly-stochastic constraints need a square matrix, got {rows}x{cols}")));
    }
    let k = rows * cols;
    let mut lp = LinearProgram::new(sense, cost.iter().flatten().copied().collect());
    lp.bounds = vec![Bounds::new(0.0, 1.0); k];
    lp.labels = (0..rows).flat_map(|i| (0..cols).map(move |j| format!("x[worker={i},job={j}]"))).collect();

    let rows_exact = doubly_stochastic || rows <= cols;
    let cols_exact = doubly_stochastic || cols <= rows;
    for i in 0..rows {
        let mut row = vec![0.0; k];
        row[i * cols..(i + 1) * cols].iter_mut().for_each(|v| *v = 1.0);
        if rows_exact {
            lp.add_eq(row, 1.0);
        } else {
            lp.add_le(row, 1.0);
        }
    }
    for j in 0..cols {
        let mut row = vec![0.0; k];
        for i in 0..rows {
            row[i * cols + j] = 1.0;
        }
        if cols_exact {
            lp.add_eq(row, 1.0);
        } else {
            lp.add_le(row, 1.0);
        }
    }
    let table = (0..rows).map(|i| (i * cols..(i + 1) * cols).collect()).collect();
    Ok((lp, table))
}

/// Reshapes a row-major vector into a matrix with `cols` columns.
pub fn to_matrix(v: &[f64], cols: usize) -> Vec<Vec<f64>> {
    v.chunks(cols).map(<[f64]>::to_vec).collect()
}

/// Flow formulation of the s-t shortest path: one conservation row per node
/// (outflow minus inflow equals +1 at `s`, -1 at `t`, 0 elsewhere), `x` in
/// `[0, 1]`, minimize total cost. Edge `e` is variable `e`.
pub fn build_shortest_path_lp(graph: &Graph, s: &str, t: &str) -> Result<(LinearProgram, Vec<usize>)> {
    let si = graph.node(s).ok_or_else(|| Error::config(format!("source `{s}` is not in the graph")))?;
    let ti = graph.node(t).ok_or_else(|| Error::config(format!("target `{t}` is not in the graph")))?;
    if si == ti {
        return Err(Error::config("source and target must differ"));
    }
    if graph.edges.is_empty() {
        return Err(Error::config("graph has no edges"));
    }
    if graph.edges.iter().any(|e| !e.cost.is_finite()) {
        return Err(Error::config("edge costs must be finite"));
    }
    let k = graph.edges.len();
    let mut lp = LinearProgram::new(Sense::Minimize, graph.costs());
    lp.bounds = vec![Bounds::new(0.0, 1.0); k];
    lp.labels = (0..k).map(|e| format!("x[edge={}]", graph.edge_name(e))).collect();
    for node in 0..graph.nodes.len() {
        let mut row = vec![0.0; k];
        for (e, edge) in graph.edges.iter().enumerate() {
            if edge.src == node {
                row[e] += 1.0;
            }
            if edge.dst == node {
                row[e] -= 1.0;
            }
        }
        let rhs = if node == si {
            1.0
        } else if node == ti {
            -1.0
        } else {
            0.0
        };
        lp.add_eq(row, rhs);
    }
    Ok((lp, (0..k).collect()))
}
