use std::collections::{HashSet, VecDeque};

use crate::error::Result;
use crate::lp::model::{LinearProgram, Solution, Status, TAU_OPT};
use crate::lp::simplex::Simplex;

/// Bases visited before the search gives up, per requested vertex.
const BASES_PER_VERTEX: usize = 64;

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(p, q)| (p - q).abs() <= 1e-9)
}

/// Breadth-first walk over optimal bases: from each optimal basis, pivot in
/// every nonbasic column whose reduced cost is zero within `TAU_OPT`, trying
/// every tied leaving row. Returns up to `limit` distinct vertices, `sol`
/// first. A result of length one is not a uniqueness proof once the
/// exploration cap is hit.
pub fn enumerate_alternate_optima(lp: &LinearProgram, sol: &Solution, limit: usize) -> Result<Vec<Solution>> {
    let mut found = vec![sol.clone()];
    if sol.status != Status::Optimal || limit <= 1 {
        return Ok(found);
    }
    let mut start = Simplex::build(lp)?;
    if start.run()? != Status::Optimal {
        return Ok(found);
    }
    let max_bases = BASES_PER_VERTEX * limit;
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut sorted = start.tab.basis().to_vec();
    sorted.sort_unstable();
    seen.insert(sorted);
    let mut queue = VecDeque::from([start]);

    while let Some(cur) = queue.pop_front() {
        let vertex = cur.solution(lp, Status::Optimal);
        if !found.iter().any(|s| same_point(&s.x, &vertex.x)) {
            found.push(vertex);
            if found.len() >= limit {
                break;
            }
        }
        if seen.len() >= max_bases {
            continue;
        }
        for c in 0..cur.tab.num_cols() {
            if cur.tab.is_basic(c) || cur.tab.reduced_cost(c).abs() > TAU_OPT {
                continue;
            }
            for r in cur.tab.ratio_rows(c) {
                let mut next = cur.clone();
                next.tab.pivot(r, c);
                let mut key = next.tab.basis().to_vec();
                key.sort_unstable();
                if seen.insert(key) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(found)
}
