//! Exhaustive enumeration oracles for small assignment and shortest-path
//! instances. Slow by design; tests use them to check the simplex.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::lp::graph::Graph;
use crate::lp::model::{Sense, Solution, Status};

pub const MAX_ASSIGNMENT_N: usize = 8;
pub const MAX_PATHS: usize = 1_000_000;

fn better(sense: Sense, a: f64, b: f64) -> bool {
    match sense {
        Sense::Maximize => a > b,
        Sense::Minimize => a < b,
    }
}

/// Optimal permutation of a square cost matrix. Among equal objectives the
/// lexicographically first permutation wins.
pub fn brute_force_assignment(cost: &[Vec<f64>], sense: Sense) -> Result<Solution> {
    let n = cost.len();
    if n == 0 || cost.iter().any(|r| r.len() != n) {
        return Err(Error::config("brute-force assignment needs a non-empty square matrix"));
    }
    if n > MAX_ASSIGNMENT_N {
        return Err(Error::Refused(format!("{n}! permutations exceed the n <= {MAX_ASSIGNMENT_N} guard")));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (0..n).permutations(n) {
        let value: f64 = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        if best.as_ref().is_none_or(|(b, _)| better(sense, value, *b)) {
            best = Some((value, perm));
        }
    }
    let (objective, perm) = best.expect("at least one permutation");
    let mut x = vec![0.0; n * n];
    for (i, &j) in perm.iter().enumerate() {
        x[i * n + j] = 1.0;
    }
    Ok(Solution { status: Status::Optimal, x, objective, reduced_costs: Vec::new(), basis: Vec::new() })
}

/// Cheapest simple s-t path by depth-first enumeration. Ties go to the
/// lexicographically smallest node-name sequence.
pub fn brute_force_paths(graph: &Graph, s: &str, t: &str) -> Result<Solution> {
    let si = graph.node(s).ok_or_else(|| Error::config(format!("source `{s}` is not in the graph")))?;
    let ti = graph.node(t).ok_or_else(|| Error::config(format!("target `{t}` is not in the graph")))?;
    let k = graph.edges.len();
    let adj = graph.adjacency();

    struct Search<'a> {
        graph: &'a Graph,
        adj: Vec<Vec<usize>>,
        target: usize,
        on_path: Vec<bool>,
        edges: Vec<usize>,
        paths: usize,
        best: Option<(f64, Vec<&'a str>, Vec<usize>)>,
    }

    impl<'a> Search<'a> {
        fn visit(&mut self, node: usize, cost: f64) -> Result<()> {
            if node == self.target {
                self.paths += 1;
                if self.paths > MAX_PATHS {
                    return Err(Error::Refused(format!("more than {MAX_PATHS} simple paths")));
                }
                let mut names = vec![self.graph.nodes[self.graph.edges[self.edges[0]].src].as_str()];
                names.extend(self.edges.iter().map(|&e| self.graph.nodes[self.graph.edges[e].dst].as_str()));
                let wins = match &self.best {
                    None => true,
                    Some((b, bn, be)) => cost < *b || (cost == *b && (&names, &self.edges) < (bn, be)),
                };
                if wins {
                    self.best = Some((cost, names, self.edges.clone()));
                }
                return Ok(());
            }
            self.on_path[node] = true;
            for i in 0..self.adj[node].len() {
                let e = self.adj[node][i];
                let next = self.graph.edges[e].dst;
                if !self.on_path[next] {
                    self.edges.push(e);
                    self.visit(next, cost + self.graph.edges[e].cost)?;
                    self.edges.pop();
                }
            }
            self.on_path[node] = false;
            Ok(())
        }
    }

    let mut search = Search {
        graph,
        adj,
        target: ti,
        on_path: vec![false; graph.nodes.len()],
        edges: Vec::new(),
        paths: 0,
        best: None,
    };
    if si != ti {
        search.visit(si, 0.0)?;
    }
    match search.best {
        None => Ok(Solution::non_optimal(Status::Infeasible, k)),
        Some((objective, _, edges)) => {
            let mut x = vec![0.0; k];
            for e in edges {
                x[e] = 1.0;
            }
            Ok(Solution { status: Status::Optimal, x, objective, reduced_costs: Vec::new(), basis: Vec::new() })
        }
    }
}
