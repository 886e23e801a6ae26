//! Dense bounded-variable primal simplex used for node bounds.
//!
//! Every column has finite bounds; rows are `a·x {<=,=,>=} b`. Rows touching
//! a single column are folded into that column's bounds before the tableau
//! is built. Pricing is Dantzig's rule and switches to Bland's rule after a
//! run of degenerate pivots.

use std::time::Instant;

use crate::formulations::Relation;

/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;
/// Residual above which a claimed optimum is reported as unresolved.
const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub objective: Vec<f64>,
    pub maximize: bool,
}

impl LinearProgram {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let n = lower.len();
        assert_eq!(n, upper.len(), "bound vectors differ in length");
        LinearProgram {
            lower,
            upper,
            rows: Vec::new(),
            objective: vec![0.0; n],
            maximize: false,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.rows.push(LpRow {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Largest row or bound violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let gap = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration cap, deadline or numerical breakdown.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub max_iterations: usize,
    pub deadline: Option<Instant>,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            max_iterations: 200_000,
            deadline: None,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> LpSolution {
    solve_lp_with(lp, &LpOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, options: &LpOptions) -> LpSolution {
    let n = lp.num_vars();
    let fail = |status, iterations| LpSolution {
        status,
        x: Vec::new(),
        value: f64::NAN,
        iterations,
    };
    if lp.lower.iter().chain(&lp.upper).any(|v| !v.is_finite()) {
        return fail(LpStatus::Unresolved, 0);
    }
    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    let mut rows: Vec<&LpRow> = Vec::with_capacity(lp.rows.len());
    for row in &lp.rows {
        let mut nz = row.coeffs.iter().filter(|c| c.1 != 0.0);
        match (nz.next(), nz.next()) {
            (None, _) => {
                let ok = match row.relation {
                    Relation::Le => row.rhs >= -FEAS_TOL,
                    Relation::Ge => row.rhs <= FEAS_TOL,
                    Relation::Eq => row.rhs.abs() <= FEAS_TOL,
                };
                if !ok {
                    return fail(LpStatus::Infeasible, 0);
                }
            }
            (Some(&(j, a)), None) => {
                let bound = row.rhs / a;
                let rel = if a < 0.0 { flip(row.relation) } else { row.relation };
                if matches!(rel, Relation::Le | Relation::Eq) {
                    upper[j] = upper[j].min(bound);
                }
                if matches!(rel, Relation::Ge | Relation::Eq) {
                    lower[j] = lower[j].max(bound);
                }
            }
            _ => rows.push(row),
        }
    }
    for j in 0..n {
        if lower[j] > upper[j] {
            if lower[j] - upper[j] > FEAS_TOL * (1.0 + lower[j].abs()) {
                return fail(LpStatus::Infeasible, 0);
            }
            let mid = 0.5 * (lower[j] + upper[j]);
            lower[j] = mid;
            upper[j] = mid;
        }
    }
    let sign = if lp.maximize { -1.0 } else { 1.0 };
    let cost: Vec<f64> = lp.objective.iter().map(|c| sign * c).collect();
    let mut tab = Tableau::build(&rows, lower, upper);
    let phase1 = tab.run(options);
    if phase1 != RunOutcome::Optimal {
        return fail(LpStatus::Unresolved, tab.iterations);
    }
    let infeasibility: f64 = tab.artificial_sum();
    let scale = 1.0 + rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
    if infeasibility > 1e-7 * scale {
        return fail(LpStatus::Infeasible, tab.iterations);
    }
    tab.fix_artificials();
    tab.set_costs(&cost);
    let phase2 = tab.run(options);
    match phase2 {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => return fail(LpStatus::Unbounded, tab.iterations),
        RunOutcome::Stopped => return fail(LpStatus::Unresolved, tab.iterations),
    }
    let mut x = tab.values(n);
    for j in 0..n {
        x[j] = x[j].clamp(lp.lower[j], lp.upper[j]);
    }
    let resid = lp.max_violation(&x);
    if !(resid <= RESIDUAL_TOL * scale) {
        return fail(LpStatus::Unresolved, tab.iterations);
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpSolution {
        status: LpStatus::Optimal,
        x,
        value,
        iterations: tab.iterations,
    }
}

fn flip(rel: Relation) -> Relation {
    match rel {
        Relation::Le => Relation::Ge,
        Relation::Ge => Relation::Le,
        Relation::Eq => Relation::Eq,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RunOutcome {
    Optimal,
    Unbounded,
    Stopped,
}

/// Columns: structurals, one slack per row, then artificials.
struct Tableau {
    m: usize,
    nc: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<Option<usize>>,
    xb: Vec<f64>,
    value: Vec<f64>,
    at_upper: Vec<bool>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    d: Vec<f64>,
    first_artificial: usize,
    iterations: usize,
}

impl Tableau {
    fn build(rows: &[&LpRow], lower: Vec<f64>, upper: Vec<f64>) -> Tableau {
        let n = lower.len();
        let m = rows.len();
        // Structurals start at the bound nearer zero.
        let mut value = Vec::with_capacity(n + 2 * m);
        let mut at_upper = Vec::with_capacity(n + 2 * m);
        for j in 0..n {
            let up = upper[j].abs() < lower[j].abs();
            value.push(if up { upper[j] } else { lower[j] });
            at_upper.push(up);
        }
        let mut lo = lower;
        let mut hi = upper;
        let mut needs_art = Vec::new();
        let mut slack_values = Vec::with_capacity(m);
        for (i, row) in rows.iter().enumerate() {
            let (slo, shi) = match row.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            lo.push(slo);
            hi.push(shi);
            let ax: f64 = row.coeffs.iter().map(|&(j, a)| a * value[j]).sum();
            let s = row.rhs - ax;
            if s < slo - FEAS_TOL || s > shi + FEAS_TOL {
                needs_art.push(i);
                let clamped = s.clamp(slo, shi);
                slack_values.push(clamped);
                at_upper.push(clamped == shi && shi.is_finite() && slo != shi);
            } else {
                slack_values.push(s);
                at_upper.push(false);
            }
        }
        value.extend_from_slice(&slack_values);
        let first_artificial = n + m;
        let nc = first_artificial + needs_art.len();
        for _ in &needs_art {
            lo.push(0.0);
            hi.push(f64::INFINITY);
            value.push(0.0);
            at_upper.push(false);
        }
        let mut t = vec![0.0; m * nc];
        let mut basis = vec![0; m];
        let mut xb = vec![0.0; m];
        let mut row_of = vec![None; nc];
        let mut art_iter = needs_art.iter().peekable();
        let mut art_col = first_artificial;
        for (i, row) in rows.iter().enumerate() {
            let base = i * nc;
            let is_art = art_iter.peek() == Some(&&i);
            let s = slack_values[i];
            let ax: f64 = row.coeffs.iter().map(|&(j, a)| a * value[j]).sum();
            if is_art {
                art_iter.next();
                // sigma * (a·x + s) + art = sigma * b, art >= 0.
                let resid = row.rhs - ax - s;
                let sigma = if resid >= 0.0 { 1.0 } else { -1.0 };
                for &(j, a) in &row.coeffs {
                    t[base + j] += sigma * a;
                }
                t[base + n + i] = sigma;
                t[base + art_col] = 1.0;
                basis[i] = art_col;
                row_of[art_col] = Some(i);
                xb[i] = sigma * resid;
                art_col += 1;
            } else {
                for &(j, a) in &row.coeffs {
                    t[base + j] += a;
                }
                t[base + n + i] = 1.0;
                basis[i] = n + i;
                row_of[n + i] = Some(i);
                xb[i] = s;
            }
        }
        let mut tab = Tableau {
            m,
            nc,
            t,
            basis,
            row_of,
            xb,
            value,
            at_upper,
            lower: lo,
            upper: hi,
            d: vec![0.0; nc],
            first_artificial,
            iterations: 0,
        };
        let mut phase1 = vec![0.0; nc];
        for c in phase1.iter_mut().skip(first_artificial) {
            *c = 1.0;
        }
        tab.set_costs(&phase1);
        tab
    }

    /// Reduced costs `c_j - c_B^T T_j`; `cost` may be shorter than `nc`.
    fn set_costs(&mut self, cost: &[f64]) {
        let c = |j: usize| cost.get(j).copied().unwrap_or(0.0);
        let mut d: Vec<f64> = (0..self.nc).map(c).collect();
        for i in 0..self.m {
            let cb = c(self.basis[i]);
            if cb != 0.0 {
                let row = &self.t[i * self.nc..(i + 1) * self.nc];
                for (dj, &tij) in d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        self.d = d;
    }

    fn artificial_sum(&self) -> f64 {
        (self.first_artificial..self.nc)
            .map(|j| match self.row_of[j] {
                Some(r) => self.xb[r].max(0.0),
                None => self.value[j],
            })
            .sum()
    }

    fn fix_artificials(&mut self) {
        for j in self.first_artificial..self.nc {
            self.upper[j] = 0.0;
            if self.row_of[j].is_none() {
                self.value[j] = 0.0;
                self.at_upper[j] = false;
            }
        }
    }

    fn values(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| match self.row_of[j] {
                Some(r) => self.xb[r],
                None => self.value[j],
            })
            .collect()
    }

    fn run(&mut self, options: &LpOptions) -> RunOutcome {
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= options.max_iterations {
                return RunOutcome::Stopped;
            }
            if self.iterations % 64 == 0 {
                if let Some(deadline) = options.deadline {
                    if Instant::now() >= deadline {
                        return RunOutcome::Stopped;
                    }
                }
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let Some((q, dir)) = self.entering(bland) else {
                return RunOutcome::Optimal;
            };
            self.iterations += 1;
            let col = |i: usize| self.t[i * self.nc + q];
            let mut best_ratio = self.upper[q] - self.lower[q];
            let mut leave: Option<usize> = None;
            let mut best_alpha = 0.0f64;
            for i in 0..self.m {
                let alpha = col(i) * dir;
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let b = self.basis[i];
                let ratio = if alpha > 0.0 {
                    if self.lower[b] == f64::NEG_INFINITY {
                        continue;
                    }
                    ((self.xb[i] - self.lower[b]) / alpha).max(0.0)
                } else {
                    if self.upper[b] == f64::INFINITY {
                        continue;
                    }
                    ((self.upper[b] - self.xb[i]) / -alpha).max(0.0)
                };
                let better = match leave {
                    _ if ratio < best_ratio - 1e-12 => true,
                    None => false,
                    Some(l) if ratio <= best_ratio + 1e-12 => {
                        if bland {
                            b < self.basis[l]
                        } else {
                            alpha.abs() > best_alpha.abs()
                        }
                    }
                    _ => false,
                };
                if better {
                    best_ratio = ratio.min(best_ratio);
                    leave = Some(i);
                    best_alpha = alpha;
                }
            }
            if best_ratio == f64::INFINITY {
                return RunOutcome::Unbounded;
            }
            let step = best_ratio;
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            if step != 0.0 {
                for i in 0..self.m {
                    let a = self.t[i * self.nc + q];
                    if a != 0.0 {
                        self.xb[i] -= a * dir * step;
                    }
                }
            }
            let entering_value = self.value[q] + dir * step;
            match leave {
                None => {
                    // Bound flip.
                    self.at_upper[q] = dir > 0.0;
                    self.value[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
                Some(r) => {
                    let out = self.basis[r];
                    let to_upper = best_alpha < 0.0;
                    self.at_upper[out] = to_upper;
                    self.value[out] = if to_upper { self.upper[out] } else { self.lower[out] };
                    self.row_of[out] = None;
                    self.pivot(r, q);
                    self.basis[r] = q;
                    self.row_of[q] = Some(r);
                    self.xb[r] = entering_value;
                }
            }
        }
    }

    fn entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.nc {
            if self.row_of[j].is_some() || self.upper[j] - self.lower[j] <= 0.0 {
                continue;
            }
            let dj = self.d[j];
            let dir = if !self.at_upper[j] && dj < -OPT_TOL && self.upper[j] > self.value[j] {
                1.0
            } else if self.at_upper[j] && dj > OPT_TOL {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if dj.abs() > best_score {
                best_score = dj.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.nc;
        let piv = self.t[r * nc + q];
        let mut nz = Vec::new();
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for (j, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v /= piv;
                    if v.abs() < 1e-14 {
                        *v = 0.0;
                    } else {
                        nz.push(j);
                    }
                }
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(r * nc);
        let (prow, after) = rest.split_at_mut(nc);
        let eliminate = |target: &mut [f64]| {
            let f = target[q];
            if f != 0.0 {
                for &j in &nz {
                    target[j] -= f * prow[j];
                }
                target[q] = 0.0;
            }
        };
        for chunk in before.chunks_mut(nc) {
            eliminate(chunk);
        }
        for chunk in after.chunks_mut(nc) {
            eliminate(chunk);
        }
        eliminate(&mut self.d);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp2() -> LinearProgram {
        LinearProgram::new(vec![0.0; 2], vec![10.0; 2])
    }

    #[test]
    fn box_maximum() {
        let mut lp = lp2();
        lp.objective = vec![1.0, 1.0];
        lp.maximize = true;
        lp.add_row(vec![(0, 1.0)], Relation::Le, 1.0);
        lp.add_row(vec![(1, 1.0)], Relation::Le, 1.0);
        let s = solve_lp(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 2.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_bounds() {
        let mut lp = LinearProgram::new(vec![-5.0], vec![5.0]);
        lp.add_row(vec![(0, 1.0)], Relation::Ge, 1.0);
        lp.add_row(vec![(0, 1.0)], Relation::Le, 0.0);
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
        let mut lp = lp2();
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Ge, 3.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 2.0);
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn unit_box_mccormick_range() {
        // w = x*y with x = y = 0.5 fixed: w in [0, 0.5].
        let build = |maximize| {
            let mut lp = LinearProgram::new(vec![0.5, 0.5, 0.0], vec![0.5, 0.5, 1.0]);
            lp.add_row(vec![(2, 1.0)], Relation::Ge, 0.0);
            lp.add_row(vec![(2, 1.0), (0, -1.0), (1, -1.0)], Relation::Ge, -1.0);
            lp.add_row(vec![(2, 1.0), (0, -1.0)], Relation::Le, 0.0);
            lp.add_row(vec![(2, 1.0), (1, -1.0)], Relation::Le, 0.0);
            lp.objective = vec![0.0, 0.0, 1.0];
            lp.maximize = maximize;
            solve_lp(&lp)
        };
        assert!((build(true).value - 0.5).abs() < 1e-12);
        assert!(build(false).value.abs() < 1e-12);
    }

    #[test]
    fn equality_and_mixed_rows() {
        // min x0 + 2 x1 + 3 x2 s.t. x0 + x1 + x2 = 1, x0 <= 0.2, x1 - x2 >= 0.1
        let mut lp = LinearProgram::new(vec![0.0; 3], vec![1.0; 3]);
        lp.objective = vec![1.0, 2.0, 3.0];
        lp.add_row(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Relation::Eq, 1.0);
        lp.add_row(vec![(0, 1.0), (1, 0.0)], Relation::Le, 0.2);
        lp.add_row(vec![(1, 1.0), (2, -1.0)], Relation::Ge, 0.1);
        let s = solve_lp(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.8).abs() < 1e-9, "{}", s.value);
        assert!(lp.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn degenerate_vertex() {
        // Several constraints tight at the optimum.
        let mut lp = LinearProgram::new(vec![0.0; 3], vec![4.0; 3]);
        lp.objective = vec![1.0, 1.0, 1.0];
        lp.maximize = true;
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            lp.add_row(vec![(a, 1.0), (b, 1.0)], Relation::Le, 2.0);
        }
        lp.add_row(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Relation::Le, 3.0);
        let s = solve_lp(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn deadline_in_past_is_unresolved() {
        let mut lp = lp2();
        lp.objective = vec![1.0, 1.0];
        lp.maximize = true;
        lp.add_row(vec![(0, 1.0), (1, 2.0)], Relation::Le, 4.0);
        let opts = LpOptions {
            max_iterations: 100,
            deadline: Some(Instant::now()),
        };
        assert_eq!(solve_lp_with(&lp, &opts).status, LpStatus::Unresolved);
    }
}
