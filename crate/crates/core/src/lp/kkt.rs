//! Independent verification of the four optimality conditions of a
//! minimization LP: stationarity, primal feasibility, dual feasibility and
//! complementary slackness, plus the duality gap.
//!
//! Each condition is reported as an absolute max-norm violation and as a
//! scaled violation, where every row (column) term is divided by
//! `1 + max(|b_i|, max_j |a_ij x_j|)` (respectively `1 + max(|c_j|,
//! max_i |a_ij y_i|)`). Pass/fail is decided on the scaled values, which keeps
//! the verdict meaningful for rows whose rhs is in the tens of millions.

use super::{LpProblem, Sense, Solution, Status};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KktReport {
    pub stationarity: f64,
    pub primal_feas: f64,
    pub dual_feas: f64,
    pub comp_slack: f64,
    pub stationarity_scaled: f64,
    pub primal_feas_scaled: f64,
    pub dual_feas_scaled: f64,
    pub comp_slack_scaled: f64,
    /// `|c·x − dual objective|`.
    pub duality_gap: f64,
    pub objective: f64,
    pub tol: f64,
    pub pass: bool,
}

impl KktReport {
    /// Largest of the four scaled residuals.
    pub fn max_scaled(&self) -> f64 {
        self.stationarity_scaled
            .max(self.primal_feas_scaled)
            .max(self.dual_feas_scaled)
            .max(self.comp_slack_scaled)
    }

    /// Whether the duality gap is within `rel·(1 + |objective|)`.
    pub fn gap_ok(&self, rel: f64) -> bool {
        self.duality_gap <= rel * (1.0 + self.objective.abs())
    }
}

/// Evaluates the optimality conditions of `sol` for `p` at tolerance `tol`.
///
/// The duals are read as `c = Aᵀy + d`. Reduced costs `d` are taken from the
/// solution; a solution whose status is not optimal never passes.
pub fn check_kkt(p: &LpProblem, sol: &Solution, tol: f64) -> KktReport {
    let n = p.n_vars();
    let m = p.n_rows();
    let x = &sol.primal;
    let y = &sol.dual;
    let d = &sol.reduced_costs;
    let c = p.objective();
    let (lo, up) = (p.lower(), p.upper());

    let mut row_scale = vec![1.0f64; m];
    let mut col_scale = vec![1.0f64; n];
    let mut aty = vec![0.0; n];
    let mut act = vec![0.0; m];
    for (i, row) in p.rows().iter().enumerate() {
        let mut s = row.rhs.abs();
        for &(j, a) in &row.coeffs {
            let ax = a * x[j];
            act[i] += ax;
            s = s.max(ax.abs());
            let ay = a * y[i];
            aty[j] += ay;
            col_scale[j] = col_scale[j].max(1.0 + ay.abs());
        }
        row_scale[i] = 1.0 + s;
    }
    for j in 0..n {
        col_scale[j] = col_scale[j].max(1.0 + c[j].abs());
    }

    let mut r = Residuals::default();

    for j in 0..n {
        // Stationarity.
        let st = (c[j] - aty[j] - d[j]).abs();
        r.stationarity.push(st, st / col_scale[j]);

        // Bound feasibility of x.
        let bscale = 1.0 + x[j].abs().max(lo[j].abs().min(up[j].abs()));
        let viol = (lo[j] - x[j]).max(x[j] - up[j]).max(0.0);
        r.primal.push(viol, viol / bscale);

        // Sign of the reduced cost must be backed by a finite bound.
        let dv = if d[j] > 0.0 && lo[j] == f64::NEG_INFINITY {
            d[j]
        } else if d[j] < 0.0 && up[j] == f64::INFINITY {
            -d[j]
        } else {
            0.0
        };
        r.dual.push(dv, dv / col_scale[j]);

        // d_j > 0 only at the lower bound, d_j < 0 only at the upper bound.
        let gap = if d[j] > 0.0 && lo[j].is_finite() {
            x[j] - lo[j]
        } else if d[j] < 0.0 && up[j].is_finite() {
            up[j] - x[j]
        } else {
            0.0
        };
        let cs = (d[j] * gap).abs();
        r.comp.push(cs, cs / (col_scale[j] * bscale));
    }

    let mut dual_obj = 0.0;
    for (i, row) in p.rows().iter().enumerate() {
        let slack = act[i] - row.rhs;
        let viol = match row.sense {
            Sense::Le => slack.max(0.0),
            Sense::Ge => (-slack).max(0.0),
            Sense::Eq => slack.abs(),
        };
        r.primal.push(viol, viol / row_scale[i]);

        let dv = match row.sense {
            Sense::Le => y[i].max(0.0),
            Sense::Ge => (-y[i]).max(0.0),
            Sense::Eq => 0.0,
        };
        let yscale = 1.0 + y[i].abs();
        r.dual.push(dv, dv / yscale);

        let cs = match row.sense {
            Sense::Eq => 0.0,
            _ => (y[i] * slack).abs(),
        };
        r.comp.push(cs, cs / (row_scale[i] * yscale));
        dual_obj += y[i] * row.rhs;
    }
    for j in 0..n {
        let bound = if d[j] > 0.0 && lo[j].is_finite() {
            lo[j]
        } else if d[j] < 0.0 && up[j].is_finite() {
            up[j]
        } else {
            x[j]
        };
        dual_obj += d[j] * bound;
    }
    let objective = p.objective_value(x);
    let duality_gap = (objective - dual_obj).abs();

    let mut report = KktReport {
        stationarity: r.stationarity.abs,
        primal_feas: r.primal.abs,
        dual_feas: r.dual.abs,
        comp_slack: r.comp.abs,
        stationarity_scaled: r.stationarity.scaled,
        primal_feas_scaled: r.primal.scaled,
        dual_feas_scaled: r.dual.scaled,
        comp_slack_scaled: r.comp.scaled,
        duality_gap,
        objective,
        tol,
        pass: false,
    };
    report.pass = sol.status == Status::Optimal && report.max_scaled() <= tol;
    report
}

#[derive(Default)]
struct Residuals {
    stationarity: MaxPair,
    primal: MaxPair,
    dual: MaxPair,
    comp: MaxPair,
}

#[derive(Default)]
struct MaxPair {
    abs: f64,
    scaled: f64,
}

impl MaxPair {
    fn push(&mut self, abs: f64, scaled: f64) {
        self.abs = self.abs.max(abs);
        self.scaled = self.scaled.max(scaled);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve;

    fn small() -> LpProblem {
        // min x1 + 2 x2  s.t.  x1 + x2 >= 3,  x1 <= 2
        let mut lp = LpProblem::new();
        let x1 = lp.add_var("x1", 1.0);
        let x2 = lp.add_var("x2", 2.0);
        lp.add_row("cover", [(x1, 1.0), (x2, 1.0)], Sense::Ge, 3.0);
        lp.add_row("cap", [(x1, 1.0)], Sense::Le, 2.0);
        lp
    }

    #[test]
    fn solver_output_passes() {
        let lp = small();
        let sol = solve(&lp, 1e-7, 1e-8).unwrap();
        let rep = check_kkt(&lp, &sol, 1e-6);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.gap_ok(1e-8));
        assert!((sol.objective - 4.0).abs() < 1e-12);
    }

    #[test]
    fn perturbed_primal_is_flagged() {
        let lp = small();
        let mut sol = solve(&lp, 1e-7, 1e-8).unwrap();
        sol.primal[0] += 1e-2;
        let rep = check_kkt(&lp, &sol, 1e-6);
        assert!(rep.primal_feas > 1e-3 || rep.comp_slack > 1e-3, "{rep:?}");
        assert!(!rep.pass);
    }

    #[test]
    fn zeroed_duals_leave_basic_costs_as_stationarity_residual() {
        let lp = small();
        let mut sol = solve(&lp, 1e-7, 1e-8).unwrap();
        sol.dual.iter_mut().for_each(|v| *v = 0.0);
        let rep = check_kkt(&lp, &sol, 1e-6);
        // Both x1 and x2 are basic (positive) with zero reduced cost.
        assert!(sol.primal.iter().all(|&v| v > 0.0));
        assert!(sol.reduced_costs.iter().all(|&v| v == 0.0));
        assert_eq!(rep.stationarity, 2.0);
    }
}
