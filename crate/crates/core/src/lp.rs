//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Small problems only: the tableau is a `Vec<Vec<f64>>` and reduced costs are
//! recomputed from scratch on every pivot.

use crate::error::LpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// `lower ≤ x ≤ upper`; either side may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const NON_NEGATIVE: Bounds = Bounds { lower: 0.0, upper: f64::INFINITY };
    pub const FREE: Bounds = Bounds { lower: f64::NEG_INFINITY, upper: f64::INFINITY };

    pub fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub direction: Direction,
    pub objective: Vec<f64>,
    pub constraint_matrix: Vec<Vec<f64>>,
    pub constraint_rhs: Vec<f64>,
    pub constraint_sense: Vec<Sense>,
    pub variable_bounds: Vec<Bounds>,
}

impl LinearProgram {
    /// New program over non-negative variables.
    pub fn new(direction: Direction, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            direction,
            objective,
            constraint_matrix: Vec::new(),
            constraint_rhs: Vec::new(),
            constraint_sense: Vec::new(),
            variable_bounds: vec![Bounds::NON_NEGATIVE; n],
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::new(Direction::Maximize, objective)
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::new(Direction::Minimize, objective)
    }

    pub fn constraint(mut self, row: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        self.add_constraint(row, sense, rhs);
        self
    }

    pub fn add_constraint(&mut self, row: Vec<f64>, sense: Sense, rhs: f64) {
        self.constraint_matrix.push(row);
        self.constraint_sense.push(sense);
        self.constraint_rhs.push(rhs);
    }

    pub fn bounds(mut self, var: usize, bounds: Bounds) -> Self {
        self.variable_bounds[var] = bounds;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let rows = self.constraint_matrix.len();
        if self.constraint_rhs.len() != rows || self.constraint_sense.len() != rows {
            return Err(LpError::Dimensions(format!(
                "{rows} rows, {} right-hand sides, {} senses",
                self.constraint_rhs.len(),
                self.constraint_sense.len()
            )));
        }
        if self.variable_bounds.len() != n {
            return Err(LpError::Dimensions(format!(
                "{n} variables, {} bounds",
                self.variable_bounds.len()
            )));
        }
        if let Some(i) = self.constraint_matrix.iter().position(|r| r.len() != n) {
            return Err(LpError::Dimensions(format!("row {i} does not have {n} coefficients")));
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.constraint_rhs.iter().all(|v| v.is_finite())
            && self.constraint_matrix.iter().flatten().all(|v| v.is_finite());
        let bounds_ok = self
            .variable_bounds
            .iter()
            .all(|b| !b.lower.is_nan() && !b.upper.is_nan() && b.lower != f64::INFINITY && b.upper != f64::NEG_INFINITY);
        if !finite || !bounds_ok {
            return Err(LpError::NonFinite);
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for ((row, sense), rhs) in self.constraint_matrix.iter().zip(&self.constraint_sense).zip(&self.constraint_rhs) {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match sense {
                Sense::Le => lhs - rhs,
                Sense::Ge => rhs - lhs,
                Sense::Eq => (lhs - rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (b, v) in self.variable_bounds.iter().zip(x) {
            worst = worst.max(b.lower - v).max(v - b.upper);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; only meaningful when optimal.
    pub value: f64,
    /// Primal solution; empty unless optimal.
    pub x: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Maximum constraint violation accepted in the returned solution.
    pub feasibility_tol: f64,
    /// Smallest pivot element considered by the ratio test.
    pub pivot_tol: f64,
    /// Reduced costs above this are considered improving.
    pub optimality_tol: f64,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feasibility_tol: 1e-8,
            pivot_tol: 1e-9,
            optimality_tol: 1e-11,
            max_iterations: 100_000,
        }
    }
}

pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    simplex_solve_with(lp, &SimplexOptions::default())
}

/// Sparse constraint row added for upper bounds: (column, coefficient) pairs, sense, rhs.
type ExtraRow = (Vec<(usize, f64)>, Sense, f64);

/// How an original variable is expressed in terms of non-negative columns.
enum VarMap {
    /// `x = offset + y[col]`
    Shifted { offset: f64, col: usize },
    /// `x = offset - y[col]`
    Reflected { offset: f64, col: usize },
    /// `x = y[pos] - y[neg]`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        self.rows[r][c] = 1.0;
        let (prow, prhs) = (self.rows[r].clone(), self.rhs[r]);
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.rows[i][c] = 0.0;
            self.rhs[i] -= f * prhs;
            if self.rhs[i].abs() < 1e-13 {
                self.rhs[i] = 0.0;
            }
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Maximises `cost · y` over the columns flagged in `allowed`, starting
    /// from the current feasible basis.
    fn run(&mut self, cost: &[f64], allowed: &[bool], opts: &SimplexOptions) -> Result<Phase, LpError> {
        let ncols = cost.len();
        loop {
            if self.iterations >= opts.max_iterations {
                return Err(LpError::IterationLimit(opts.max_iterations));
            }
            let mut is_basic = vec![false; ncols];
            for &b in &self.basis {
                is_basic[b] = true;
            }
            // Bland: lowest-index improving column enters.
            let entering = (0..ncols).find(|&j| {
                if !allowed[j] || is_basic[j] {
                    return false;
                }
                let reduced = cost[j]
                    - self.basis.iter().zip(&self.rows).map(|(&b, row)| cost[b] * row[j]).sum::<f64>();
                reduced > opts.optimality_tol
            });
            let Some(c) = entering else {
                return Ok(Phase::Optimal);
            };
            // Bland: among minimum ratios, the row whose basic variable has the lowest index leaves.
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a <= opts.pivot_tol {
                    continue;
                }
                let ratio = self.rhs[i] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-12 || ((ratio - br).abs() <= 1e-12 && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(Phase::Unbounded);
            };
            self.pivot(r, c);
        }
    }
}

pub fn simplex_solve_with(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Map each original variable onto non-negative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut extra_rows: Vec<ExtraRow> = Vec::new();
    for b in &lp.variable_bounds {
        if b.lower.is_finite() {
            maps.push(VarMap::Shifted { offset: b.lower, col: ncols });
            if b.upper.is_finite() {
                extra_rows.push((vec![(ncols, 1.0)], Sense::Le, b.upper - b.lower));
            }
            ncols += 1;
        } else if b.upper.is_finite() {
            maps.push(VarMap::Reflected { offset: b.upper, col: ncols });
            ncols += 1;
        } else {
            maps.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
            ncols += 2;
        }
    }
    let structural = ncols;

    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for ((arow, &sense), &rhs) in lp.constraint_matrix.iter().zip(&lp.constraint_sense).zip(&lp.constraint_rhs) {
        let mut row = vec![0.0; structural];
        let mut b = rhs;
        for (j, &a) in arow.iter().enumerate() {
            match maps[j] {
                VarMap::Shifted { offset, col } => {
                    row[col] += a;
                    b -= a * offset;
                }
                VarMap::Reflected { offset, col } => {
                    row[col] -= a;
                    b -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        rows.push((row, sense, b));
    }
    for (entries, sense, b) in extra_rows {
        let mut row = vec![0.0; structural];
        for (c, v) in entries {
            row[c] = v;
        }
        rows.push((row, sense, b));
    }
    for (row, sense, b) in rows.iter_mut() {
        if *b < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            *b = -*b;
            *sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    let num_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let num_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let total = structural + num_slack + num_art;
    let mut tab = Tableau {
        rows: Vec::with_capacity(rows.len()),
        rhs: Vec::with_capacity(rows.len()),
        basis: Vec::with_capacity(rows.len()),
        iterations: 0,
    };
    let mut next_slack = structural;
    let mut next_art = structural + num_slack;
    for (row, sense, b) in rows {
        let mut full = row;
        full.resize(total, 0.0);
        match sense {
            Sense::Le => {
                full[next_slack] = 1.0;
                tab.basis.push(next_slack);
                next_slack += 1;
            }
            Sense::Ge => {
                full[next_slack] = -1.0;
                next_slack += 1;
                full[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
            }
            Sense::Eq => {
                full[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
            }
        }
        tab.rows.push(full);
        tab.rhs.push(b);
    }
    let is_art = |j: usize| j >= structural + num_slack;

    // Phase 1: drive the artificial variables to zero.
    if num_art > 0 {
        let cost: Vec<f64> = (0..total).map(|j| if is_art(j) { -1.0 } else { 0.0 }).collect();
        let allowed = vec![true; total];
        tab.run(&cost, &allowed, opts)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .zip(&tab.rhs)
            .filter(|(b, _)| is_art(**b))
            .map(|(_, v)| *v)
            .sum();
        if infeasibility > opts.feasibility_tol {
            return Ok(LpSolution { status: LpStatus::Infeasible, value: f64::NAN, x: Vec::new(), iterations: tab.iterations });
        }
        // Pivot zero-level artificials out of the basis where possible; rows
        // where that is impossible are redundant and stay inert.
        for r in 0..tab.rows.len() {
            if !is_art(tab.basis[r]) {
                continue;
            }
            if let Some(c) = (0..structural + num_slack).find(|&j| tab.rows[r][j].abs() > opts.pivot_tol) {
                tab.pivot(r, c);
            }
        }
    }

    // Phase 2.
    let sign = match lp.direction {
        Direction::Maximize => 1.0,
        Direction::Minimize => -1.0,
    };
    let mut cost = vec![0.0; total];
    for (j, &c) in lp.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Shifted { col, .. } => cost[col] += sign * c,
            VarMap::Reflected { col, .. } => cost[col] -= sign * c,
            VarMap::Split { pos, neg } => {
                cost[pos] += sign * c;
                cost[neg] -= sign * c;
            }
        }
    }
    let allowed: Vec<bool> = (0..total).map(|j| !is_art(j)).collect();
    if let Phase::Unbounded = tab.run(&cost, &allowed, opts)? {
        return Ok(LpSolution { status: LpStatus::Unbounded, value: f64::NAN, x: Vec::new(), iterations: tab.iterations });
    }

    let mut y = vec![0.0; total];
    for (&b, &v) in tab.basis.iter().zip(&tab.rhs) {
        y[b] = v;
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shifted { offset, col } => offset + y[col],
            VarMap::Reflected { offset, col } => offset - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let residual = lp.max_violation(&x);
    if residual > opts.feasibility_tol {
        return Err(LpError::SingularBasis { residual });
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { status: LpStatus::Optimal, value, x, iterations: tab.iterations })
}
