//! Bounded revised simplex.
//!
//! Every row `i` gets a logical variable `s_i = a_i·x` (column `-e_i`) whose
//! bounds carry the row sense and rhs, so the working system is
//! `[A  -I] (x, s) = 0` with box bounds on every variable. The slack basis is
//! the starting point. When it is dual feasible (the common case for cost
//! minimization with nonnegative costs) the dual simplex runs directly;
//! otherwise a composite primal simplex (phase 1 minimizes the sum of
//! infeasibilities) is used. Both use Dantzig pricing with a Harris ratio
//! test and fall back to Bland's rule after a run of degenerate pivots.

use super::lu::{factorize, BasisInverse};
use super::{LpError, LpProblem, LpSolver, Sense, Solution, SolverOptions, Status};

const PIVOT_TOL: f64 = 1e-9;
const NOT_BASIC: usize = usize::MAX;

/// The embedded reference solver.
#[derive(Debug, Clone, Default)]
pub struct RevisedSimplex {
    opts: SolverOptions,
}

impl RevisedSimplex {
    pub fn new(opts: SolverOptions) -> Self {
        Self { opts }
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }
}

impl LpSolver for RevisedSimplex {
    fn solve(&self, problem: &LpProblem) -> Result<Solution, LpError> {
        problem.validate()?;
        Engine::new(problem, &self.opts).run()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    Lower,
    Upper,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

struct Engine<'a> {
    problem: &'a LpProblem,
    opts: &'a SolverOptions,
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    col_idx: Vec<usize>,
    col_val: Vec<f64>,
    row_start: Vec<usize>,
    row_col: Vec<usize>,
    row_val: Vec<f64>,
    unit_idx: Vec<usize>,
    unit_val: Vec<f64>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    pos_of: Vec<usize>,
    x: Vec<f64>,
    d: Vec<f64>,
    y: Vec<f64>,
    inv: BasisInverse,
    cost_scale: f64,
    iterations: usize,
    max_iter: usize,
    work_col: Vec<f64>,
    alpha_row: Vec<f64>,
    phase_cost: Vec<f64>,
}

impl<'a> Engine<'a> {
    fn new(problem: &'a LpProblem, opts: &'a SolverOptions) -> Self {
        let n = problem.n_vars();
        let m = problem.n_rows();
        let nt = n + m;

        let mut row_start = Vec::with_capacity(m + 1);
        let mut row_col = Vec::new();
        let mut row_val = Vec::new();
        row_start.push(0);
        let mut counts = vec![0usize; n];
        for row in problem.rows() {
            for &(j, a) in &row.coeffs {
                row_col.push(j);
                row_val.push(a);
                counts[j] += 1;
            }
            row_start.push(row_col.len());
        }
        let mut col_start = vec![0usize; n + 1];
        for j in 0..n {
            col_start[j + 1] = col_start[j] + counts[j];
        }
        let mut fill = col_start.clone();
        let mut col_idx = vec![0usize; row_col.len()];
        let mut col_val = vec![0.0; row_col.len()];
        for (i, row) in problem.rows().iter().enumerate() {
            for &(j, a) in &row.coeffs {
                col_idx[fill[j]] = i;
                col_val[fill[j]] = a;
                fill[j] += 1;
            }
        }

        let mut cost = problem.objective().to_vec();
        cost.resize(nt, 0.0);
        let mut lower = problem.lower().to_vec();
        let mut upper = problem.upper().to_vec();
        for row in problem.rows() {
            let (l, u) = match row.sense {
                Sense::Le => (f64::NEG_INFINITY, row.rhs),
                Sense::Ge => (row.rhs, f64::INFINITY),
                Sense::Eq => (row.rhs, row.rhs),
            };
            lower.push(l);
            upper.push(u);
        }

        let cost_scale = problem
            .objective()
            .iter()
            .fold(0.0f64, |acc, c| acc.max(c.abs()));
        let cost_scale = if cost_scale > 0.0 { cost_scale } else { 1.0 };

        let mut state = vec![VarState::Basic; nt];
        let mut x = vec![0.0; nt];
        for j in 0..n {
            let (l, u, c) = (lower[j], upper[j], cost[j]);
            let (s, v) = if l.is_finite() && (c >= 0.0 || !u.is_finite()) {
                (VarState::Lower, l)
            } else if u.is_finite() {
                (VarState::Upper, u)
            } else {
                (VarState::Free, 0.0)
            };
            state[j] = s;
            x[j] = v;
        }
        let basis: Vec<usize> = (n..nt).collect();
        let mut pos_of = vec![NOT_BASIC; nt];
        for (p, &j) in basis.iter().enumerate() {
            pos_of[j] = p;
        }
        let unit_idx: Vec<usize> = (0..m).collect();
        let unit_val = vec![-1.0; m];
        let max_iter = opts
            .max_iterations
            .unwrap_or_else(|| 50_000 + 40 * (n + m));

        let cols: Vec<(&[usize], &[f64])> = (0..m)
            .map(|i| (&unit_idx[i..i + 1], &unit_val[i..i + 1]))
            .collect();
        let inv = BasisInverse::new(factorize(m, &cols).lu);

        Self {
            problem,
            opts,
            m,
            n,
            col_start,
            col_idx,
            col_val,
            row_start,
            row_col,
            row_val,
            unit_idx,
            unit_val,
            cost,
            lower,
            upper,
            state,
            basis,
            pos_of,
            x,
            d: vec![0.0; nt],
            y: vec![0.0; m],
            inv,
            cost_scale,
            iterations: 0,
            max_iter,
            work_col: vec![0.0; m],
            alpha_row: vec![0.0; nt],
            phase_cost: vec![0.0; nt],
        }
    }

    fn ptol(&self, bound: f64) -> f64 {
        self.opts.feas_tol * (1.0 + bound.abs())
    }

    fn dtol(&self) -> f64 {
        self.opts.opt_tol * self.cost_scale
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lower[j] == self.upper[j]
    }

    /// Positive amount by which basic variable `j` violates a bound, and
    /// whether it lies below its lower bound.
    fn violation(&self, j: usize) -> Option<(f64, bool)> {
        let (v, l, u) = (self.x[j], self.lower[j], self.upper[j]);
        if v < l - self.ptol(l) {
            Some((l - v, true))
        } else if v > u + self.ptol(u) {
            Some((v - u, false))
        } else {
            None
        }
    }

    fn refactor(&mut self) {
        let m = self.m;
        let n = self.n;
        let fact = {
            let cols: Vec<(&[usize], &[f64])> = self
                .basis
                .iter()
                .map(|&j| {
                    if j < n {
                        let (a, b) = (self.col_start[j], self.col_start[j + 1]);
                        (&self.col_idx[a..b], &self.col_val[a..b])
                    } else {
                        let i = j - n;
                        (&self.unit_idx[i..i + 1], &self.unit_val[i..i + 1])
                    }
                })
                .collect();
            factorize(m, &cols)
        };
        for &(pos, row) in &fact.replaced {
            let old = self.basis[pos];
            let (l, u) = (self.lower[old], self.upper[old]);
            let (s, v) = if l.is_finite() {
                (VarState::Lower, l)
            } else if u.is_finite() {
                (VarState::Upper, u)
            } else {
                (VarState::Free, 0.0)
            };
            self.state[old] = s;
            self.x[old] = v;
            self.pos_of[old] = NOT_BASIC;
            let new = n + row;
            self.basis[pos] = new;
            self.state[new] = VarState::Basic;
            self.pos_of[new] = pos;
        }
        self.inv = BasisInverse::new(fact.lu);
        self.compute_xb();
    }

    fn compute_xb(&mut self) {
        let n = self.n;
        let mut rhs = vec![0.0; self.m];
        for j in 0..n + self.m {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let v = self.x[j];
            if v == 0.0 {
                continue;
            }
            if j < n {
                for e in self.col_start[j]..self.col_start[j + 1] {
                    rhs[self.col_idx[e]] -= self.col_val[e] * v;
                }
            } else {
                rhs[j - n] += v;
            }
        }
        self.inv.ftran(&mut rhs);
        for (p, &j) in self.basis.iter().enumerate() {
            self.x[j] = rhs[p];
        }
    }

    /// One step of iterative refinement on the basic values.
    fn refine_xb(&mut self) {
        let n = self.n;
        let mut resid = vec![0.0; self.m];
        for (i, r) in resid.iter_mut().enumerate() {
            let mut acc = self.x[n + i];
            for e in self.row_start[i]..self.row_start[i + 1] {
                acc -= self.row_val[e] * self.x[self.row_col[e]];
            }
            *r = acc;
        }
        self.inv.ftran(&mut resid);
        for (p, &j) in self.basis.iter().enumerate() {
            self.x[j] += resid[p];
        }
    }

    /// Recomputes `y = B^-T c_B` and reduced costs of all nonbasic variables.
    /// With `phase1` the costs are the infeasibility gradient of the basics.
    fn compute_duals(&mut self, phase1: bool) {
        let n = self.n;
        let nt = n + self.m;
        if phase1 {
            self.phase_cost.iter_mut().for_each(|c| *c = 0.0);
            for &j in &self.basis {
                if let Some((_, below)) = self.violation(j) {
                    self.phase_cost[j] = if below { -1.0 } else { 1.0 };
                }
            }
        }
        let costs = if phase1 { &self.phase_cost } else { &self.cost };
        let mut rhs: Vec<f64> = self.basis.iter().map(|&j| costs[j]).collect();
        self.inv.btran(&mut rhs);
        for j in 0..nt {
            self.d[j] = if self.state[j] == VarState::Basic {
                0.0
            } else if j < n {
                let mut acc = costs[j];
                for e in self.col_start[j]..self.col_start[j + 1] {
                    acc -= self.col_val[e] * rhs[self.col_idx[e]];
                }
                acc
            } else {
                costs[j] + rhs[j - n]
            };
        }
        self.y = rhs;
    }

    fn load_column(&mut self, q: usize) {
        self.work_col.iter_mut().for_each(|v| *v = 0.0);
        if q < self.n {
            for e in self.col_start[q]..self.col_start[q + 1] {
                self.work_col[self.col_idx[e]] = self.col_val[e];
            }
        } else {
            self.work_col[q - self.n] = -1.0;
        }
        let mut col = std::mem::take(&mut self.work_col);
        self.inv.ftran(&mut col);
        self.work_col = col;
    }

    /// Fills `alpha_row` with row `p` of `B^-1 [A -I]` (nonbasic entries only
    /// are meaningful).
    fn load_pivot_row(&mut self, p: usize) {
        let n = self.n;
        let mut rho = vec![0.0; self.m];
        rho[p] = 1.0;
        self.inv.btran(&mut rho);
        self.alpha_row.iter_mut().for_each(|v| *v = 0.0);
        for (i, &r) in rho.iter().enumerate() {
            if r == 0.0 {
                continue;
            }
            for e in self.row_start[i]..self.row_start[i + 1] {
                self.alpha_row[self.row_col[e]] += r * self.row_val[e];
            }
            self.alpha_row[n + i] = -r;
        }
    }

    /// Replaces the basic variable at position `p` by `q` (whose FTRAN image
    /// is in `work_col`). Returns true if the basis was refactorized.
    fn pivot(&mut self, p: usize, q: usize, leave_state: VarState, leave_value: f64) -> bool {
        let leave = self.basis[p];
        self.basis[p] = q;
        self.state[q] = VarState::Basic;
        self.pos_of[q] = p;
        self.state[leave] = leave_state;
        self.pos_of[leave] = NOT_BASIC;
        self.x[leave] = leave_value;
        let col = std::mem::take(&mut self.work_col);
        self.inv.update(p, &col);
        self.work_col = col;
        self.iterations += 1;
        if self.inv.n_updates() >= self.opts.refactor_interval {
            self.refactor();
            true
        } else {
            false
        }
    }

    fn check_iterations(&self) -> Result<(), LpError> {
        if self.iterations >= self.max_iter {
            Err(LpError::Stalled {
                iterations: self.iterations,
            })
        } else {
            Ok(())
        }
    }

    fn is_dual_feasible(&self) -> bool {
        let tol = self.dtol();
        (0..self.n + self.m).all(|j| match self.state[j] {
            VarState::Basic => true,
            _ if self.is_fixed(j) => true,
            VarState::Lower => self.d[j] >= -tol,
            VarState::Upper => self.d[j] <= tol,
            VarState::Free => self.d[j].abs() <= tol,
        })
    }

    fn is_primal_feasible(&self) -> bool {
        self.basis.iter().all(|&j| self.violation(j).is_none())
    }

    fn dual_simplex(&mut self) -> Result<Outcome, LpError> {
        self.compute_duals(false);
        let dtol = self.dtol();
        let mut degenerate_run = 0usize;
        let mut retried = false;
        loop {
            self.check_iterations()?;
            let bland = degenerate_run > self.opts.degenerate_limit;

            let mut leaving: Option<(usize, bool)> = None;
            let mut best = 0.0;
            let mut best_var = usize::MAX;
            for p in 0..self.m {
                let j = self.basis[p];
                if let Some((amount, below)) = self.violation(j) {
                    let better = if bland {
                        j < best_var
                    } else {
                        amount > best || (amount == best && j < best_var)
                    };
                    if better {
                        best = amount;
                        best_var = j;
                        leaving = Some((p, below));
                    }
                }
            }
            let Some((p, below)) = leaving else {
                return Ok(Outcome::Optimal);
            };
            let leave = self.basis[p];
            let target = if below {
                self.lower[leave]
            } else {
                self.upper[leave]
            };

            self.load_pivot_row(p);
            let sgn = if below { -1.0 } else { 1.0 };
            let nt = self.n + self.m;

            // Harris pass 1: relaxed bound on the dual step.
            let mut theta_max = f64::INFINITY;
            for j in 0..nt {
                let st = self.state[j];
                if st == VarState::Basic || self.is_fixed(j) {
                    continue;
                }
                let a = sgn * self.alpha_row[j];
                let r = match st {
                    VarState::Lower if a > PIVOT_TOL => (self.d[j] + dtol) / a,
                    VarState::Upper if a < -PIVOT_TOL => (self.d[j] - dtol) / a,
                    VarState::Free if a.abs() > PIVOT_TOL => (self.d[j].abs() + dtol) / a.abs(),
                    _ => continue,
                };
                theta_max = theta_max.min(r);
            }
            // Pass 2: largest pivot among ratios within the bound (or the
            // smallest index among minimum ratios in Bland mode).
            let mut entering = usize::MAX;
            let mut best_a = 0.0;
            let mut best_ratio = f64::INFINITY;
            for j in 0..nt {
                let st = self.state[j];
                if st == VarState::Basic || self.is_fixed(j) {
                    continue;
                }
                let a = sgn * self.alpha_row[j];
                let ratio = match st {
                    VarState::Lower if a > PIVOT_TOL => self.d[j] / a,
                    VarState::Upper if a < -PIVOT_TOL => self.d[j] / a,
                    VarState::Free if a.abs() > PIVOT_TOL => self.d[j].abs() / a.abs(),
                    _ => continue,
                };
                let ratio = ratio.max(0.0);
                if bland {
                    if ratio < best_ratio || (ratio == best_ratio && j < entering) {
                        best_ratio = ratio;
                        entering = j;
                    }
                } else if ratio <= theta_max && a.abs() > best_a {
                    best_a = a.abs();
                    entering = j;
                }
            }
            if entering == usize::MAX {
                if retried {
                    return Ok(Outcome::Infeasible);
                }
                retried = true;
                self.refactor();
                self.compute_duals(false);
                continue;
            }
            let q = entering;
            self.load_column(q);
            let alpha_pq = self.work_col[p];
            let alpha_row_q = self.alpha_row[q];
            if (alpha_pq - alpha_row_q).abs() > 1e-7 * (1.0 + alpha_pq.abs())
                || alpha_pq.abs() <= PIVOT_TOL
            {
                if self.inv.n_updates() == 0 {
                    if retried {
                        return Err(LpError::Stalled {
                            iterations: self.iterations,
                        });
                    }
                    retried = true;
                }
                self.refactor();
                self.compute_duals(false);
                continue;
            }
            retried = false;

            let theta_p = (self.x[leave] - target) / alpha_pq;
            for pos in 0..self.m {
                let a = self.work_col[pos];
                if a != 0.0 {
                    let j = self.basis[pos];
                    self.x[j] -= theta_p * a;
                }
            }
            self.x[q] += theta_p;

            let theta_d = self.d[q] / alpha_pq;
            if theta_d != 0.0 {
                for j in 0..nt {
                    if self.state[j] != VarState::Basic {
                        self.d[j] -= theta_d * self.alpha_row[j];
                    }
                }
            }
            self.d[q] = 0.0;
            if (theta_d * best).abs() <= 1e-12 * self.cost_scale {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            let leave_state = if below { VarState::Lower } else { VarState::Upper };
            if self.pivot(p, q, leave_state, target) {
                self.compute_duals(false);
            } else {
                self.d[leave] = -theta_d;
            }
        }
    }

    fn primal_simplex(&mut self) -> Result<Outcome, LpError> {
        let mut degenerate_run = 0usize;
        let mut stuck = 0usize;
        loop {
            self.check_iterations()?;
            let bland = degenerate_run > self.opts.degenerate_limit;
            let phase1 = !self.is_primal_feasible();
            self.compute_duals(phase1);
            let dtol = if phase1 { self.opts.opt_tol } else { self.dtol() };

            let nt = self.n + self.m;
            let mut entering = usize::MAX;
            let mut best = 0.0;
            for j in 0..nt {
                let st = self.state[j];
                if st == VarState::Basic || self.is_fixed(j) {
                    continue;
                }
                let dj = self.d[j];
                let eligible = match st {
                    VarState::Lower => dj < -dtol,
                    VarState::Upper => dj > dtol,
                    VarState::Free => dj.abs() > dtol,
                    VarState::Basic => false,
                };
                if !eligible {
                    continue;
                }
                if bland {
                    entering = j;
                    break;
                }
                if dj.abs() > best {
                    best = dj.abs();
                    entering = j;
                }
            }
            if entering == usize::MAX {
                return Ok(if phase1 {
                    Outcome::Infeasible
                } else {
                    Outcome::Optimal
                });
            }
            let q = entering;
            let dir = if self.d[q] < 0.0 { 1.0 } else { -1.0 };
            self.load_column(q);

            // Harris pass 1.
            let mut theta_max = f64::INFINITY;
            for p in 0..self.m {
                let a = self.work_col[p];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let j = self.basis[p];
                if let Some((lim, _, _)) = self.step_limit(j, -dir * a, true) {
                    theta_max = theta_max.min(lim);
                }
            }
            let mut leaving = usize::MAX;
            let mut leave_to = (VarState::Lower, 0.0);
            let mut best_a = 0.0;
            let mut best_t = f64::INFINITY;
            for p in 0..self.m {
                let a = self.work_col[p];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let j = self.basis[p];
                if let Some((t, st, b)) = self.step_limit(j, -dir * a, false) {
                    let t = t.max(0.0);
                    let take = if bland {
                        t < best_t || (t == best_t && j < self.basis.get(leaving).copied().unwrap_or(usize::MAX))
                    } else {
                        t <= theta_max && a.abs() > best_a
                    };
                    if take {
                        leaving = p;
                        best_a = a.abs();
                        best_t = t;
                        leave_to = (st, b);
                    }
                }
            }
            let range = self.upper[q] - self.lower[q];

            if leaving == usize::MAX && !range.is_finite() {
                if phase1 {
                    stuck += 1;
                    if stuck > 3 {
                        return Err(LpError::Stalled {
                            iterations: self.iterations,
                        });
                    }
                    self.refactor();
                    continue;
                }
                return Ok(Outcome::Unbounded);
            }
            stuck = 0;

            if range.is_finite() && (leaving == usize::MAX || range <= best_t) {
                // Bound flip of the entering variable.
                for pos in 0..self.m {
                    let a = self.work_col[pos];
                    if a != 0.0 {
                        let j = self.basis[pos];
                        self.x[j] -= dir * range * a;
                    }
                }
                if dir > 0.0 {
                    self.state[q] = VarState::Upper;
                    self.x[q] = self.upper[q];
                } else {
                    self.state[q] = VarState::Lower;
                    self.x[q] = self.lower[q];
                }
                self.iterations += 1;
                degenerate_run = 0;
                continue;
            }

            let t = best_t;
            for pos in 0..self.m {
                let a = self.work_col[pos];
                if a != 0.0 {
                    let j = self.basis[pos];
                    self.x[j] -= dir * t * a;
                }
            }
            self.x[q] += dir * t;
            if t * best <= 1e-12 * self.cost_scale.max(1.0) {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(leaving, q, leave_to.0, leave_to.1);
        }
    }

    /// Step length at which basic variable `j`, moving at `rate` per unit
    /// step, reaches a breakpoint; with the bound it lands on. `relaxed`
    /// widens the bound by the feasibility tolerance (Harris pass 1).
    fn step_limit(&self, j: usize, rate: f64, relaxed: bool) -> Option<(f64, VarState, f64)> {
        let (v, l, u) = (self.x[j], self.lower[j], self.upper[j]);
        if rate < 0.0 {
            let below = v < l - self.ptol(l);
            let above = v > u + self.ptol(u);
            if above {
                let tol = if relaxed { self.ptol(u) } else { 0.0 };
                Some(((v - u + tol) / -rate, VarState::Upper, u))
            } else if !below && l.is_finite() {
                let tol = if relaxed { self.ptol(l) } else { 0.0 };
                Some(((v - l + tol) / -rate, VarState::Lower, l))
            } else {
                None
            }
        } else if rate > 0.0 {
            let below = v < l - self.ptol(l);
            let above = v > u + self.ptol(u);
            if below {
                let tol = if relaxed { self.ptol(l) } else { 0.0 };
                Some(((l - v + tol) / rate, VarState::Lower, l))
            } else if !above && u.is_finite() {
                let tol = if relaxed { self.ptol(u) } else { 0.0 };
                Some(((u - v + tol) / rate, VarState::Upper, u))
            } else {
                None
            }
        } else {
            None
        }
    }

    fn run(mut self) -> Result<Solution, LpError> {
        self.compute_duals(false);
        let mut outcome = if self.is_dual_feasible() {
            self.dual_simplex()?
        } else {
            self.primal_simplex()?
        };

        // Clean-up rounds on a fresh factorization.
        for _ in 0..4 {
            if outcome != Outcome::Optimal {
                break;
            }
            self.refactor();
            self.refine_xb();
            self.compute_duals(false);
            let primal_ok = self.is_primal_feasible();
            let dual_ok = self.is_dual_feasible();
            if primal_ok && dual_ok {
                break;
            }
            outcome = if !primal_ok && dual_ok {
                self.dual_simplex()?
            } else {
                self.primal_simplex()?
            };
        }

        let n = self.n;
        let status = match outcome {
            Outcome::Optimal => Status::Optimal,
            Outcome::Infeasible => Status::Infeasible,
            Outcome::Unbounded => Status::Unbounded,
        };
        if status != Status::Optimal {
            return Ok(Solution {
                status,
                objective: match status {
                    Status::Unbounded => f64::NEG_INFINITY,
                    _ => f64::INFINITY,
                },
                primal: self.x[..n].to_vec(),
                dual: vec![0.0; self.m],
                reduced_costs: vec![0.0; n],
                iterations: self.iterations,
            });
        }
        let primal = self.x[..n].to_vec();
        let objective = self.problem.objective_value(&primal);
        Ok(Solution {
            status,
            objective,
            primal,
            dual: self.y.clone(),
            reduced_costs: self.d[..n].to_vec(),
            iterations: self.iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve, VarId};

    #[test]
    fn single_variable_lower_bound_row() {
        let mut lp = LpProblem::new();
        let x = lp.add_var("x", 1.0);
        let r = lp.add_row("r", [(x, 1.0)], Sense::Ge, 3.0);
        let sol = solve(&lp, 1e-7, 1e-8).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.value(x) - 3.0).abs() < 1e-12);
        assert!((sol.objective - 3.0).abs() < 1e-12);
        assert!((sol.row_dual(r) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LpProblem::new();
        let x = lp.add_var("x", -1.0);
        lp.add_row("le", [(x, 1.0)], Sense::Le, 0.0);
        lp.add_row("ge", [(x, 1.0)], Sense::Ge, 1.0);
        let sol = solve(&lp, 1e-7, 1e-8).unwrap();
        assert_eq!(sol.status, Status::Infeasible);
    }

    #[test]
    fn unbounded_ray_is_detected() {
        let mut lp = LpProblem::new();
        lp.add_var("x", -1.0);
        let sol = solve(&lp, 1e-7, 1e-8).unwrap();
        assert_eq!(sol.status, Status::Unbounded);
    }

    #[test]
    fn dual_path_infeasible() {
        let mut lp = LpProblem::new();
        let x = lp.add_var("x", 1.0);
        let y = lp.add_var("y", 1.0);
        lp.add_row("a", [(x, 1.0), (y, 1.0)], Sense::Le, 1.0);
        lp.add_row("b", [(x, 1.0), (y, 1.0)], Sense::Ge, 2.0);
        let sol = solve(&lp, 1e-7, 1e-8).unwrap();
        assert_eq!(sol.status, Status::Infeasible);
    }

    #[test]
    fn free_and_boxed_variables() {
        // min -x - 2y, x in [0, 4], y free, x + y <= 6, y - x <= 1
        let mut lp = LpProblem::new();
        let x = lp.add_bounded_var("x", -1.0, 0.0, 4.0);
        let y = lp.add_bounded_var("y", -2.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row("a", [(x, 1.0), (y, 1.0)], Sense::Le, 6.0);
        lp.add_row("b", [(y, 1.0), (x, -1.0)], Sense::Le, 1.0);
        let sol = solve(&lp, 1e-7, 1e-8).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        // Vertex x = 2.5, y = 3.5 gives -9.5.
        assert!((sol.objective + 9.5).abs() < 1e-9, "{sol:?}");
        assert!((sol.value(VarId(0)) - 2.5).abs() < 1e-9);
    }

    #[test]
    fn equality_rows_with_degenerate_start() {
        // Transportation-like problem with redundant equality.
        let mut lp = LpProblem::new();
        let cost = [[4.0, 6.0], [5.0, 3.0]];
        let mut v = Vec::new();
        for (i, row) in cost.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                v.push(lp.add_var(format!("x{i}{j}"), *c));
            }
        }
        lp.add_row("s0", [(v[0], 1.0), (v[1], 1.0)], Sense::Eq, 5.0);
        lp.add_row("s1", [(v[2], 1.0), (v[3], 1.0)], Sense::Eq, 5.0);
        lp.add_row("d0", [(v[0], 1.0), (v[2], 1.0)], Sense::Eq, 4.0);
        lp.add_row("d1", [(v[1], 1.0), (v[3], 1.0)], Sense::Eq, 6.0);
        let sol = solve(&lp, 1e-7, 1e-8).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        // x00 = 4, x01 = 1, x11 = 5 -> 16 + 6 + 15 = 37.
        assert!((sol.objective - 37.0).abs() < 1e-9, "{sol:?}");
    }
}
