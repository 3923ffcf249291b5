//! Dense two-phase primal simplex with Bland's rule.
//!
//! The LP is brought into standard form `max c'x, A x (<=|=) b, x >= 0` by
//! shifting, reflecting or splitting variables. Finite upper bounds become
//! explicit rows unless a row with non-negative coefficients already implies
//! them (the assignment and transport polytopes are the common case).
//!
//! Entering variable: lowest column index with a negative reduced cost.
//! Leaving variable: minimum ratio, ties broken by the lowest basic column.
//! Both choices are deterministic, so `x*(w)` is a fixed selection from the
//! optimal set.

use crate::error::{Error, Result};
use crate::lp::model::{dot, LinearProgram, Sense, Solution, Status, TAU_FEAS};

const PIVOT_TOL: f64 = 1e-9;
const ENTER_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-13;
/// Largest dense tableau (entries) the solver will allocate.
pub const MAX_TABLEAU_ENTRIES: usize = 250_000_000;

#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `x = lower + x'`
    Shift { col: usize, lower: f64 },
    /// `x = upper - x'`
    Reflect { col: usize, upper: f64 },
    /// `x = x+ - x-`
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

#[derive(Clone, Debug)]
pub(crate) struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major `rows x (cols + 1)`; the last entry of each row is the rhs.
    data: Vec<f64>,
    /// Reduced costs `z_j - c_j` followed by the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    kind: Vec<ColKind>,
    cost: Vec<f64>,
}

impl Tableau {
    #[inline]
    fn width(&self) -> usize {
        self.cols + 1
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width() + self.cols]
    }

    pub(crate) fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub(crate) fn reduced_cost(&self, c: usize) -> f64 {
        self.obj[c]
    }

    pub(crate) fn num_cols(&self) -> usize {
        self.cols
    }

    pub(crate) fn is_basic(&self, c: usize) -> bool {
        self.basis.contains(&c)
    }

    pub(crate) fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let piv = self.at(r, c);
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= piv;
        }
        prow[c] = 1.0;
        let nz: Vec<usize> = (0..w).filter(|&j| prow[j] != 0.0).collect();
        let eliminate = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for &j in &nz {
                    let v = row[j] - f * prow[j];
                    row[j] = if v.abs() < ZERO_TOL { 0.0 } else { v };
                }
                row[c] = 0.0;
            }
        };
        for row in before.chunks_exact_mut(w) {
            eliminate(row);
        }
        for row in after.chunks_exact_mut(w) {
            eliminate(row);
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    fn reset_objective(&mut self) {
        let w = self.width();
        let mut obj = vec![0.0; w];
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = self.cost[b];
            if cb != 0.0 {
                let row = &self.data[r * w..(r + 1) * w];
                for (o, v) in obj.iter_mut().zip(row) {
                    *o += cb * v;
                }
            }
        }
        for (j, o) in obj.iter_mut().take(self.cols).enumerate() {
            *o -= self.cost[j];
        }
        self.obj = obj;
    }

    /// Minimum-ratio rows for entering column `c`; empty when the column is unbounded.
    pub(crate) fn ratio_rows(&self, c: usize) -> Vec<usize> {
        let mut best = f64::INFINITY;
        let mut rows = Vec::new();
        for r in 0..self.rows {
            let a = self.at(r, c);
            if a > PIVOT_TOL {
                let ratio = self.rhs(r).max(0.0) / a;
                if ratio < best - 1e-12 * (1.0 + best.abs().min(1e12)) {
                    best = ratio;
                    rows.clear();
                    rows.push(r);
                } else if (ratio - best).abs() <= 1e-12 * (1.0 + best.abs()) {
                    rows.push(r);
                }
            }
        }
        rows
    }

    fn leaving_row(&self, c: usize) -> Option<usize> {
        self.ratio_rows(c).into_iter().min_by_key(|&r| self.basis[r])
    }

    fn iterate(&mut self, max_iter: usize) -> Result<Status> {
        for _ in 0..max_iter {
            let entering = (0..self.cols).find(|&j| self.kind[j] != ColKind::Artificial && self.obj[j] < -ENTER_TOL);
            let Some(c) = entering else {
                return Ok(Status::Optimal);
            };
            match self.leaving_row(c) {
                Some(r) => self.pivot(r, c),
                None => return Ok(Status::Unbounded),
            }
        }
        Err(Error::Solver(format!("simplex exceeded {max_iter} iterations")))
    }
}

/// Standard-form image of an LP together with its working tableau.
#[derive(Clone, Debug)]
pub(crate) struct Simplex {
    maps: Vec<VarMap>,
    sense: Sense,
    pub(crate) tab: Tableau,
}

struct Row {
    coefs: Vec<f64>,
    rhs: f64,
    equality: bool,
}

impl Simplex {
    pub(crate) fn build(lp: &LinearProgram) -> Result<Self> {
        lp.validate()?;
        let k = lp.num_vars();
        let sign = match lp.sense {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        };

        let mut maps = Vec::with_capacity(k);
        let mut n_struct = 0;
        for b in &lp.bounds {
            let map = match (b.lower, b.upper) {
                (Some(lower), _) => VarMap::Shift { col: n_struct, lower },
                (None, Some(upper)) => VarMap::Reflect { col: n_struct, upper },
                (None, None) => {
                    n_struct += 1;
                    VarMap::Split { pos: n_struct - 1, neg: n_struct }
                }
            };
            n_struct += 1;
            maps.push(map);
        }

        let mut struct_cost = vec![0.0; n_struct];
        for (j, map) in maps.iter().enumerate() {
            let c = sign * lp.w[j];
            match *map {
                VarMap::Shift { col, .. } => struct_cost[col] = c,
                VarMap::Reflect { col, .. } => struct_cost[col] = -c,
                VarMap::Split { pos, neg } => {
                    struct_cost[pos] = c;
                    struct_cost[neg] = -c;
                }
            }
        }

        let transform = |row: &[f64], rhs: f64, equality: bool| {
            let mut coefs = vec![0.0; n_struct];
            let mut rhs = rhs;
            for (j, map) in maps.iter().enumerate() {
                let a = row[j];
                if a == 0.0 {
                    continue;
                }
                match *map {
                    VarMap::Shift { col, lower } => {
                        coefs[col] = a;
                        rhs -= a * lower;
                    }
                    VarMap::Reflect { col, upper } => {
                        coefs[col] = -a;
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        coefs[pos] = a;
                        coefs[neg] = -a;
                    }
                }
            }
            Row { coefs, rhs, equality }
        };

        let mut rows: Vec<Row> = Vec::with_capacity(lp.a_ub.len() + lp.a_eq.len());
        for (row, &b) in lp.a_ub.iter().zip(&lp.b_ub) {
            rows.push(transform(row, b, false));
        }
        for (row, &b) in lp.a_eq.iter().zip(&lp.b_eq) {
            rows.push(transform(row, b, true));
        }

        // Upper bounds of shifted variables, skipping those implied by a row
        // with non-negative coefficients and right-hand side.
        let nonneg: Vec<bool> = rows.iter().map(|r| r.rhs >= 0.0 && r.coefs.iter().all(|&a| a >= 0.0)).collect();
        let mut bound_rows = Vec::new();
        for (j, map) in maps.iter().enumerate() {
            if let (VarMap::Shift { col, lower }, Some(upper)) = (*map, lp.bounds[j].upper) {
                let cap = upper - lower;
                let implied = rows.iter().zip(&nonneg).any(|(r, &ok)| {
                    ok && r.coefs[col] > 0.0 && r.rhs / r.coefs[col] <= cap + 1e-12 * (1.0 + cap.abs())
                });
                if !implied {
                    let mut coefs = vec![0.0; n_struct];
                    coefs[col] = 1.0;
                    bound_rows.push(Row { coefs, rhs: cap, equality: false });
                }
            }
        }
        rows.extend(bound_rows);

        let m = rows.len();
        let n_slack = rows.iter().filter(|r| !r.equality).count();
        let needs_art: Vec<bool> = rows.iter().map(|r| r.equality || r.rhs < 0.0).collect();
        let n_art = needs_art.iter().filter(|&&a| a).count();
        let cols = n_struct + n_slack + n_art;
        let w = cols + 1;
        if m.saturating_mul(w) > MAX_TABLEAU_ENTRIES {
            return Err(Error::Refused(format!("dense tableau of {m} x {w} exceeds {MAX_TABLEAU_ENTRIES} entries")));
        }

        let mut data = vec![0.0; m * w];
        let mut kind = vec![ColKind::Structural; n_struct];
        kind.extend(std::iter::repeat_n(ColKind::Slack, n_slack));
        kind.extend(std::iter::repeat_n(ColKind::Artificial, n_art));
        let mut basis = vec![0; m];
        let mut slack = n_struct;
        let mut art = n_struct + n_slack;
        for (r, row) in rows.iter().enumerate() {
            let flip = if row.rhs < 0.0 { -1.0 } else { 1.0 };
            let line = &mut data[r * w..(r + 1) * w];
            for (dst, &a) in line.iter_mut().zip(&row.coefs) {
                *dst = flip * a;
            }
            line[cols] = flip * row.rhs;
            if !row.equality {
                line[slack] = flip;
                if !needs_art[r] {
                    basis[r] = slack;
                }
                slack += 1;
            }
            if needs_art[r] {
                line[art] = 1.0;
                basis[r] = art;
                art += 1;
            }
        }

        let mut cost = struct_cost;
        cost.resize(cols, 0.0);
        let tab = Tableau { rows: m, cols, data, obj: Vec::new(), basis, kind, cost };
        Ok(Simplex { maps, sense: lp.sense, tab })
    }

    fn max_iter(&self) -> usize {
        200_000 + 50 * (self.tab.rows + self.tab.cols)
    }

    /// Runs both phases. Leaves the tableau at an optimal basis when the
    /// returned status is `Optimal`.
    pub(crate) fn run(&mut self) -> Result<Status> {
        let has_art = self.tab.kind.contains(&ColKind::Artificial);
        if has_art {
            let phase2_cost = std::mem::take(&mut self.tab.cost);
            self.tab.cost = self.tab.kind.iter().map(|k| if *k == ColKind::Artificial { -1.0 } else { 0.0 }).collect();
            self.tab.reset_objective();
            // Artificials start basic and never re-enter.
            let status = self.tab.iterate(self.max_iter())?;
            debug_assert_eq!(status, Status::Optimal);
            let infeasibility = -self.tab.obj[self.tab.cols];
            let scale = 1.0 + (0..self.tab.rows).map(|r| self.tab.rhs(r).abs()).fold(0.0, f64::max);
            if infeasibility > TAU_FEAS * scale {
                return Ok(Status::Infeasible);
            }
            self.tab.cost = phase2_cost;
            self.drop_artificials();
        }
        self.tab.reset_objective();
        self.tab.iterate(self.max_iter())
    }

    /// Pivots remaining basic artificials out (or drops their redundant rows)
    /// and removes the artificial columns.
    fn drop_artificials(&mut self) {
        let mut redundant = Vec::new();
        for r in 0..self.tab.rows {
            if self.tab.kind[self.tab.basis[r]] != ColKind::Artificial {
                continue;
            }
            let replacement = (0..self.tab.cols)
                .find(|&j| self.tab.kind[j] != ColKind::Artificial && self.tab.at(r, j).abs() > PIVOT_TOL);
            match replacement {
                Some(c) => self.tab.pivot(r, c),
                None => redundant.push(r),
            }
        }
        let keep_cols: Vec<usize> = (0..self.tab.cols).filter(|&j| self.tab.kind[j] != ColKind::Artificial).collect();
        let keep_rows: Vec<usize> = (0..self.tab.rows).filter(|r| !redundant.contains(r)).collect();
        let old_w = self.tab.width();
        let cols = keep_cols.len();
        let w = cols + 1;
        let mut data = vec![0.0; keep_rows.len() * w];
        for (nr, &r) in keep_rows.iter().enumerate() {
            let src = &self.tab.data[r * old_w..(r + 1) * old_w];
            let dst = &mut data[nr * w..(nr + 1) * w];
            for (nc, &c) in keep_cols.iter().enumerate() {
                dst[nc] = src[c];
            }
            dst[cols] = src[old_w - 1];
        }
        let mut new_index = vec![usize::MAX; self.tab.cols];
        for (nc, &c) in keep_cols.iter().enumerate() {
            new_index[c] = nc;
        }
        self.tab.basis = keep_rows.iter().map(|&r| new_index[self.tab.basis[r]]).collect();
        self.tab.kind = keep_cols.iter().map(|&c| self.tab.kind[c]).collect();
        self.tab.cost = keep_cols.iter().map(|&c| self.tab.cost[c]).collect();
        self.tab.rows = keep_rows.len();
        self.tab.cols = cols;
        self.tab.data = data;
    }

    /// Values of the standard-form columns at the current basis.
    fn column_values(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.tab.cols];
        for (r, &b) in self.tab.basis.iter().enumerate() {
            let x = self.tab.rhs(r);
            v[b] = if x.abs() < 1e-12 { 0.0 } else { x };
        }
        v
    }

    /// Primal point of the original LP at the current basis.
    pub(crate) fn primal(&self) -> Vec<f64> {
        let v = self.column_values();
        self.maps
            .iter()
            .map(|map| match *map {
                VarMap::Shift { col, lower } => lower + v[col],
                VarMap::Reflect { col, upper } => upper - v[col],
                VarMap::Split { pos, neg } => v[pos] - v[neg],
            })
            .collect()
    }

    fn reduced_costs(&self) -> Vec<f64> {
        let s = match self.sense {
            Sense::Maximize => -1.0,
            Sense::Minimize => 1.0,
        };
        self.maps
            .iter()
            .map(|map| match *map {
                VarMap::Shift { col, .. } => s * self.tab.obj[col],
                VarMap::Reflect { col, .. } => -s * self.tab.obj[col],
                VarMap::Split { pos, .. } => s * self.tab.obj[pos],
            })
            .collect()
    }

    fn basic_originals(&self) -> Vec<usize> {
        let mut basic: Vec<usize> = self
            .maps
            .iter()
            .enumerate()
            .filter(|(_, map)| match **map {
                VarMap::Shift { col, .. } | VarMap::Reflect { col, .. } => self.tab.basis.contains(&col),
                VarMap::Split { pos, neg } => self.tab.basis.contains(&pos) || self.tab.basis.contains(&neg),
            })
            .map(|(j, _)| j)
            .collect();
        basic.sort_unstable();
        basic
    }

    pub(crate) fn solution(&self, lp: &LinearProgram, status: Status) -> Solution {
        if status != Status::Optimal {
            return Solution::non_optimal(status, lp.num_vars());
        }
        let x = self.primal();
        Solution {
            status,
            objective: dot(&lp.w, &x),
            x,
            reduced_costs: self.reduced_costs(),
            basis: self.basic_originals(),
        }
    }
}

/// Solves `lp` to optimality. Infeasibility and unboundedness are reported
/// through [`Solution::status`]; malformed input is an error.
pub fn solve(lp: &LinearProgram) -> Result<Solution> {
    let mut simplex = Simplex::build(lp)?;
    let status = simplex.run()?;
    Ok(simplex.solution(lp, status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::model::Bounds;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_variable_maximum() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0]);
        lp.add_le(vec![1.0], 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.x, vec![1.0]);
        assert_eq!(sol.objective, 1.0);
    }

    #[test]
    fn textbook_two_by_two() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(Sense::Maximize, vec![3.0, 5.0]);
        lp.add_le(vec![1.0, 0.0], 4.0);
        lp.add_le(vec![0.0, 2.0], 12.0);
        lp.add_le(vec![3.0, 2.0], 18.0);
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.x[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.objective, 36.0, epsilon = 1e-12);
        assert!(sol.reduced_costs.iter().all(|&r| r <= 1e-12));
    }

    #[test]
    fn minimization_with_equalities_and_negative_rhs() {
        // min x + 2y s.t. x + y = 3, x - y <= -1 -> y >= 2 -> (1, 2), 5
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, 2.0]);
        lp.add_eq(vec![1.0, 1.0], 3.0);
        lp.add_le(vec![1.0, -1.0], -1.0);
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.objective, 5.0, epsilon = 1e-12);
        assert!(sol.reduced_costs.iter().all(|&r| r >= -1e-12));
    }

    #[test]
    fn infeasible_and_unbounded_are_statuses() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0]);
        lp.add_le(vec![1.0], -1.0);
        assert_eq!(solve(&lp).unwrap().status, Status::Infeasible);

        let lp = LinearProgram::new(Sense::Maximize, vec![1.0, 0.0]);
        assert_eq!(solve(&lp).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn general_bounds() {
        // max -x + y with x in [-2, 5], y free but y <= 3 - x  -> x = -2, y = 5
        let mut lp = LinearProgram::new(Sense::Maximize, vec![-1.0, 1.0]);
        lp.bounds = vec![Bounds::new(-2.0, 5.0), Bounds { lower: None, upper: None }];
        lp.add_le(vec![1.0, 1.0], 3.0);
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.x[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 5.0, epsilon = 1e-12);

        // min x with x <= -1 and no lower bound: unbounded below.
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0]);
        lp.bounds = vec![Bounds { lower: None, upper: Some(-1.0) }];
        assert_eq!(solve(&lp).unwrap().status, Status::Unbounded);

        // max x with x <= -1 and no lower bound.
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0]);
        lp.bounds = vec![Bounds { lower: None, upper: Some(-1.0) }];
        assert_eq!(solve(&lp).unwrap().x, vec![-1.0]);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        // x + y = 1 listed twice.
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 2.0]);
        lp.add_eq(vec![1.0, 1.0], 1.0);
        lp.add_eq(vec![2.0, 2.0], 2.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_abs_diff_eq!(sol.objective, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0]);
        lp.add_le(vec![1.0], 1.0);
        assert!(matches!(solve(&lp), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0, 1.0]);
        lp.add_le(vec![1.0, 1.0, 1.0], 1.0);
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a, b);
        // Lowest-index entering column wins the tie.
        assert_eq!(a.x, vec![1.0, 0.0, 0.0]);
    }
}
