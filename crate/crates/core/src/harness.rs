//! Experiment drivers: parameter sweeps, equivalent-target calibration,
//! factor separation and an independent dense LP oracle for tiny instances.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{detect_cycling, emissions, reported_share, CYCLING_TOL};
use crate::error::{Error, Result};
use crate::formulation::{solve_scenario, ModelRun};
use crate::lp::{RevisedSimplex, SolverOptions, Status};
use crate::model::{validate_scenario, PolicyKind, PolicySpec, Scenario, Slcr, TechClass, Variant};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "USC_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Phi,
    EtaRt,
    StorageVarCost,
    ResVarCost,
    CurtailmentCost,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Phi => "phi",
            SweepAxis::EtaRt => "eta_rt",
            SweepAxis::StorageVarCost => "storage_var_cost",
            SweepAxis::ResVarCost => "res_var_cost",
            SweepAxis::CurtailmentCost => "curtailment_cost",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "phi" => SweepAxis::Phi,
            "eta_rt" => SweepAxis::EtaRt,
            "storage_var_cost" => SweepAxis::StorageVarCost,
            "res_var_cost" => SweepAxis::ResVarCost,
            "curtailment_cost" => SweepAxis::CurtailmentCost,
            _ => return Err(Error::InvalidParameter(format!("unknown sweep axis `{s}`"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub variants: Vec<Variant>,
}

/// Returns `base` with the renewable-share `variant` and the axis set to
/// `value`.
///
/// `storage_var_cost` is the round-trip variable cost, split evenly between
/// charging and discharging; `eta_rt` is split evenly as `sqrt` per
/// direction.
pub fn apply_axis(base: &Scenario, axis: SweepAxis, value: f64, variant: Variant) -> Scenario {
    let mut s = base.clone();
    let phi = if s.policy.kind == PolicyKind::RenewableShare {
        s.policy.phi
    } else {
        0.8
    };
    s.policy = PolicySpec::renewable_share(variant, phi);
    match axis {
        SweepAxis::Phi => s.policy.phi = value,
        SweepAxis::EtaRt => s.storages.iter_mut().for_each(|st| st.set_round_trip(value)),
        SweepAxis::StorageVarCost => s.storages.iter_mut().for_each(|st| {
            st.var_charge_cost = value / 2.0;
            st.var_discharge_cost = value / 2.0;
        }),
        SweepAxis::ResVarCost => s
            .technologies
            .iter_mut()
            .filter(|t| t.class == TechClass::Renewable)
            .for_each(|t| t.variable_cost = value),
        SweepAxis::CurtailmentCost => s
            .technologies
            .iter_mut()
            .filter(|t| t.class == TechClass::Renewable)
            .for_each(|t| t.curtailment_cost = value),
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub variant: Variant,
    pub status: String,
    pub objective: Option<f64>,
    pub cycling_energy: Option<f64>,
    pub cycling_hours: Option<usize>,
    pub capacities: BTreeMap<String, f64>,
    pub emissions: Option<f64>,
    /// Set where storage has no variable cost, so simultaneous charging and
    /// discharging is costless and its amount is not determined.
    pub indeterminate: bool,
}

/// A rayon pool honouring [`THREADS_ENV`].
pub fn thread_pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            b = b.num_threads(n);
        }
    }
    b.build().expect("thread pool")
}

fn solve(s: &Scenario, opts: &SolverOptions) -> Result<ModelRun> {
    solve_scenario(s, &RevisedSimplex::new(opts.clone()))
}

/// One row per (grid value, variant), in grid-major order. Solves run in
/// parallel; failed or infeasible solves become rows with their status.
pub fn run_sweep(spec: &SweepSpec, opts: &SolverOptions) -> Result<Vec<SweepRow>> {
    if spec.variants.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one variant".into()));
    }
    if spec.grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sweep grid must be strictly increasing".into()));
    }
    let jobs: Vec<(f64, Variant)> = spec
        .grid
        .iter()
        .flat_map(|&v| spec.variants.iter().map(move |&var| (v, var)))
        .collect();
    for &(value, variant) in &jobs {
        let violations = validate_scenario(&apply_axis(&spec.base, spec.axis, value, variant));
        if !violations.is_empty() {
            return Err(Error::InvalidScenario(violations));
        }
    }
    let rows = thread_pool().install(|| {
        jobs.par_iter()
            .map(|&(value, variant)| {
                let s = apply_axis(&spec.base, spec.axis, value, variant);
                let indeterminate = s
                    .storages
                    .iter()
                    .any(|st| st.var_charge_cost + st.var_discharge_cost == 0.0);
                let mut row = SweepRow {
                    axis: spec.axis,
                    value,
                    variant,
                    status: String::new(),
                    objective: None,
                    cycling_energy: None,
                    cycling_hours: None,
                    capacities: BTreeMap::new(),
                    emissions: None,
                    indeterminate,
                };
                match solve(&s, opts) {
                    Ok(run) if run.is_optimal() => {
                        let rep = detect_cycling(&run, CYCLING_TOL);
                        row.status = Status::Optimal.to_string();
                        row.objective = Some(run.solution.objective);
                        row.cycling_energy = Some(rep.total_energy());
                        row.cycling_hours = Some(rep.hours);
                        row.capacities = run.capacities();
                        row.emissions = Some(emissions(&run));
                    }
                    Ok(run) => row.status = run.solution.status.to_string(),
                    Err(e) => row.status = format!("error: {e}"),
                }
                row
            })
            .collect()
    });
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationStep {
    pub phi: f64,
    pub share: f64,
    pub objective: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub phi: f64,
    pub share: f64,
    pub trace: Vec<CalibrationStep>,
}

pub const MAX_CALIBRATION_ITERATIONS: usize = 30;

/// Finds the φ for a complete-SLCR run of `base`'s family whose share,
/// reported under `report_as`, is within `tol` of `target`. Bisects on
/// `[max(0, target − 0.1), target]`.
pub fn calibrate_equivalent_target(
    base: &Scenario,
    target: f64,
    report_as: Variant,
    tol: f64,
    opts: &SolverOptions,
) -> Result<Calibration> {
    let variant = match base.policy.variant() {
        Some(v) if v.slcr == Slcr::Complete => v,
        _ => {
            return Err(Error::Calibration(
                "base scenario must carry a complete-SLCR renewable-share policy".into(),
            ))
        }
    };
    let mut trace = Vec::new();
    let eval = |phi: f64, trace: &mut Vec<CalibrationStep>| -> Result<f64> {
        let run = solve(&base.with_policy(PolicySpec::renewable_share(variant, phi)), opts)?;
        if !run.is_optimal() {
            return Err(Error::Calibration(format!(
                "solve at phi = {phi} is {}",
                run.solution.status
            )));
        }
        let share = reported_share(&run, report_as);
        trace.push(CalibrationStep {
            phi,
            share,
            objective: run.solution.objective,
            mu: run.policy_mu(),
        });
        Ok(share)
    };
    let done = |phi: f64, share: f64, trace: Vec<CalibrationStep>| Calibration { phi, share, trace };

    let mut hi = target.clamp(0.0, 1.0);
    let mut lo = (target - 0.1).max(0.0);
    let f_hi = eval(hi, &mut trace)? - target;
    if f_hi.abs() <= tol {
        return Ok(done(hi, f_hi + target, trace));
    }
    if f_hi < 0.0 {
        return Err(Error::Calibration(format!(
            "reported share {:.6} at phi = {hi} is already below the target {target}",
            f_hi + target
        )));
    }
    let f_lo = eval(lo, &mut trace)? - target;
    if f_lo.abs() <= tol {
        return Ok(done(lo, f_lo + target, trace));
    }
    if f_lo > 0.0 {
        let mu = trace.last().map_or(0.0, |s| s.mu);
        if mu == 0.0 {
            // The constraint does not bind at the bracket's lower end.
            return Ok(done(lo, f_lo + target, trace));
        }
        return Err(Error::Calibration(format!(
            "no sign change on [{lo}, {hi}]: reported shares {:.6} and {:.6} both exceed {target}",
            f_lo + target,
            f_hi + target
        )));
    }
    let (mut flo, mut fhi) = (f_lo, f_hi);
    for _ in 0..MAX_CALIBRATION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let f = eval(mid, &mut trace)? - target;
        if f.abs() <= tol {
            return Ok(done(mid, f + target, trace));
        }
        if f < flo - tol || f > fhi + tol {
            return Err(Error::Calibration(format!(
                "reported share is not monotonic in phi: {:?}",
                trace.iter().map(|s| (s.phi, s.share)).collect::<Vec<_>>()
            )));
        }
        if f < 0.0 {
            lo = mid;
            flo = f;
        } else {
            hi = mid;
            fhi = f;
        }
    }
    Err(Error::Calibration(format!(
        "no convergence within {MAX_CALIBRATION_ITERATIONS} iterations; last bracket [{lo}, {hi}]"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationRun {
    pub label: String,
    pub variant: Variant,
    pub phi: f64,
    pub objective: f64,
    pub capacities: BTreeMap<String, f64>,
    pub generation: BTreeMap<String, f64>,
    pub curtailment: f64,
    pub storage_losses: f64,
    pub cycling_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationDelta {
    pub label: String,
    pub from: String,
    pub to: String,
    pub capacities: BTreeMap<String, f64>,
    pub generation: BTreeMap<String, f64>,
    pub curtailment: f64,
    pub storage_losses: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorSeparation {
    pub runs: Vec<SeparationRun>,
    pub deltas: Vec<SeparationDelta>,
}

fn separation_run(label: &str, run: &ModelRun, variant: Variant, phi: f64) -> SeparationRun {
    SeparationRun {
        label: label.to_string(),
        variant,
        phi,
        objective: run.solution.objective,
        capacities: run.capacities(),
        generation: run
            .layout
            .techs
            .iter()
            .map(|t| (t.name.clone(), run.total(&t.generation)))
            .collect(),
        curtailment: run.curtailment_total(),
        storage_losses: run.storage_losses(),
        cycling_energy: detect_cycling(run, CYCLING_TOL).total_energy(),
    }
}

fn delta(label: &str, a: &SeparationRun, b: &SeparationRun) -> SeparationDelta {
    let diff = |x: &BTreeMap<String, f64>, y: &BTreeMap<String, f64>| {
        x.iter()
            .map(|(k, v)| (k.clone(), y.get(k).copied().unwrap_or(0.0) - v))
            .collect()
    };
    SeparationDelta {
        label: label.to_string(),
        from: a.label.clone(),
        to: b.label.clone(),
        capacities: diff(&a.capacities, &b.capacities),
        generation: diff(&a.generation, &b.generation),
        curtailment: b.curtailment - a.curtailment,
        storage_losses: b.storage_losses - a.storage_losses,
    }
}

/// Five runs separating the cycling effect from the ambition effect of a
/// weaker loss coverage: zero@φ, complete at the zero-matched φ,
/// proportionate@φ, complete at the proportionate-matched φ, complete@φ.
/// The family is taken from `base`'s policy (family 1 if it has none).
pub fn factor_separation(base: &Scenario, phi: f64, opts: &SolverOptions) -> Result<FactorSeparation> {
    let family = base.policy.variant().map_or(1, |v| v.family);
    let zero = Variant::new(family, Slcr::Zero)?;
    let prop = Variant::new(family, Slcr::Proportionate)?;
    let complete = Variant::new(family, Slcr::Complete)?;
    let at = |v: Variant, p: f64| base.with_policy(PolicySpec::renewable_share(v, p));
    let optimal = |run: ModelRun| -> Result<ModelRun> {
        if run.is_optimal() {
            Ok(run)
        } else {
            Err(Error::Calibration(format!("factor separation run is {}", run.solution.status)))
        }
    };

    let r_zero = optimal(solve(&at(zero, phi), opts)?)?;
    let r_prop = optimal(solve(&at(prop, phi), opts)?)?;
    let r_complete = optimal(solve(&at(complete, phi), opts)?)?;

    let matched = |reference: &ModelRun, report_as: Variant| -> Result<(f64, ModelRun)> {
        let target = reported_share(reference, report_as);
        let cal = calibrate_equivalent_target(&at(complete, phi), target, report_as, 1e-4, opts)?;
        Ok((cal.phi, optimal(solve(&at(complete, cal.phi), opts)?)?))
    };
    let (phi_zero, r_zero_matched) = matched(&r_zero, zero)?;
    let (phi_prop, r_prop_matched) = matched(&r_prop, prop)?;

    let runs = vec![
        separation_run("zero", &r_zero, zero, phi),
        separation_run("complete_zero_matched", &r_zero_matched, complete, phi_zero),
        separation_run("proportionate", &r_prop, prop, phi),
        separation_run("complete_proportionate_matched", &r_prop_matched, complete, phi_prop),
        separation_run("complete", &r_complete, complete, phi),
    ];
    let deltas = vec![
        delta("cycling_effect_zero", &runs[1], &runs[0]),
        delta("ambition_effect_zero", &runs[4], &runs[1]),
        delta("cycling_effect_proportionate", &runs[3], &runs[2]),
        delta("ambition_effect_proportionate", &runs[4], &runs[3]),
    ];
    Ok(FactorSeparation { runs, deltas })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub status: Status,
    pub objective: f64,
}

/// Solves a tiny scenario (T <= 12, <= 2 technologies, <= 1 storage) with a
/// dense two-phase tableau simplex under Bland's rule. The model algebra is
/// assembled here from the scenario directly, independently of
/// [`crate::formulation`].
pub fn brute_force_oracle(s: &Scenario) -> Result<OracleResult> {
    if s.horizon > 12 || s.technologies.len() > 2 || s.storages.len() > 1 {
        return Err(Error::InvalidParameter(format!(
            "oracle instances are limited to 12 hours, 2 technologies and 1 storage (got {}, {}, {})",
            s.horizon,
            s.technologies.len(),
            s.storages.len()
        )));
    }
    let v = validate_scenario(s);
    if !v.is_empty() {
        return Err(Error::InvalidScenario(v));
    }
    let (a, senses, b, c) = oracle::assemble(s);
    Ok(oracle::tableau_simplex(&a, &senses, &b, &c))
}

mod oracle {
    use super::OracleResult;
    use crate::lp::Status;
    use crate::model::{PolicyKind, Scenario, Slcr};

    #[derive(Clone, Copy, PartialEq)]
    pub enum S {
        Le,
        Eq,
        Ge,
    }

    /// Dense rows, senses, rhs and costs of the model over nonnegative
    /// variables.
    pub fn assemble(s: &Scenario) -> (Vec<Vec<f64>>, Vec<S>, Vec<f64>, Vec<f64>) {
        let t_n = s.horizon;
        let mut cost = Vec::new();
        let mut col = |c: f64| {
            cost.push(c);
            cost.len() - 1
        };
        struct Gen {
            cap: usize,
            g: Vec<usize>,
            cu: Vec<usize>,
            ren: bool,
        }
        let mut gens = Vec::new();
        for tech in &s.technologies {
            let price = if s.policy.kind == PolicyKind::CarbonPrice {
                s.policy.price * tech.emission_factor
            } else {
                0.0
            };
            let cap = col(tech.capacity_cost);
            let g = (0..t_n).map(|_| col(tech.variable_cost + price)).collect();
            let cu = if tech.is_renewable() {
                (0..t_n).map(|_| col(tech.curtailment_cost)).collect()
            } else {
                Vec::new()
            };
            gens.push(Gen { cap, g, cu, ren: tech.is_renewable() });
        }
        struct Sto {
            cin: usize,
            cout: usize,
            cl: usize,
            gin: Vec<usize>,
            gout: Vec<usize>,
            gl: Vec<usize>,
        }
        let mut stos = Vec::new();
        for st in &s.storages {
            let cin = col(st.charge_cost);
            let cout = col(st.discharge_cost);
            let cl = col(st.energy_cost);
            let gin = (0..t_n).map(|_| col(st.var_charge_cost)).collect();
            let gout = (0..t_n).map(|_| col(st.var_discharge_cost)).collect();
            let gl = (0..t_n).map(|_| col(0.0)).collect();
            stos.push(Sto { cin, cout, cl, gin, gout, gl });
        }
        let n = cost.len();
        let mut a = Vec::new();
        let mut sense = Vec::new();
        let mut rhs = Vec::new();
        let mut push = |entries: Vec<(usize, f64)>, s_: S, b: f64| {
            let mut row = vec![0.0; n];
            for (j, v) in entries {
                row[j] += v;
            }
            a.push(row);
            sense.push(s_);
            rhs.push(b);
        };

        for t in 0..t_n {
            let mut e: Vec<(usize, f64)> = gens.iter().map(|g| (g.g[t], 1.0)).collect();
            for st in &stos {
                e.push((st.gout[t], 1.0));
                e.push((st.gin[t], -1.0));
            }
            push(e, S::Eq, s.demand[t]);
            for (g, tech) in gens.iter().zip(&s.technologies) {
                if g.ren {
                    push(
                        vec![(g.g[t], 1.0), (g.cu[t], 1.0), (g.cap, -tech.availability[t])],
                        S::Eq,
                        0.0,
                    );
                } else {
                    push(vec![(g.g[t], 1.0), (g.cap, -1.0)], S::Le, 0.0);
                }
            }
            for (st, p) in stos.iter().zip(&s.storages) {
                push(vec![(st.gin[t], 1.0), (st.cin, -1.0)], S::Le, 0.0);
                push(vec![(st.gout[t], 1.0), (st.cout, -1.0)], S::Le, 0.0);
                push(vec![(st.gl[t], 1.0), (st.cl, -1.0)], S::Le, 0.0);
                let mut e = vec![
                    (st.gl[t], 1.0),
                    (st.gin[t], -p.eta_in),
                    (st.gout[t], 1.0 / p.eta_out),
                ];
                if t > 0 {
                    e.push((st.gl[t - 1], -p.self_discharge));
                } else if s.wrap_storage_level {
                    e.push((st.gl[t_n - 1], -p.self_discharge));
                }
                push(e, S::Eq, 0.0);
            }
        }

        let p = &s.policy;
        let d: f64 = s.demand.iter().sum();
        // Aggregates R (renewable generation), C (conventional generation)
        // and L (charging minus discharging) as coefficient lists.
        let agg = |ren: bool, w: f64| -> Vec<(usize, f64)> {
            gens.iter()
                .filter(|g| g.ren == ren)
                .flat_map(|g| g.g.iter().map(move |&j| (j, w)))
                .collect()
        };
        let losses = |w: f64| -> Vec<(usize, f64)> {
            stos.iter()
                .flat_map(|st| {
                    st.gin
                        .iter()
                        .map(move |&j| (j, w))
                        .chain(st.gout.iter().map(move |&j| (j, -w)))
                })
                .collect()
        };
        match p.kind {
            PolicyKind::RenewableShare => {
                let phi = p.phi;
                let lvl = p.slcr;
                // (weight on R, weight on C, weight on L, sense, rhs), read
                // off "R >= φD + ...", "R >= φG + ...", "C <= (1−φ)D + ..."
                // and "C <= (1−φ)G + ..." with G = R + C.
                let l_extra = |zero: f64, prop: f64, complete: f64| match lvl {
                    Slcr::Zero => zero,
                    Slcr::Proportionate => prop,
                    Slcr::Complete => complete,
                };
                let (wr, wc, wl, sn, b) = match p.family {
                    1 => (1.0, 0.0, -l_extra(0.0, phi, 1.0), S::Ge, phi * d),
                    2 => (1.0 - phi, -phi, -l_extra(-phi, 0.0, 1.0 - phi), S::Ge, 0.0),
                    3 => (0.0, 1.0, -l_extra(1.0, 1.0 - phi, 0.0), S::Le, (1.0 - phi) * d),
                    _ => (-(1.0 - phi), phi, -l_extra(phi, 0.0, -(1.0 - phi)), S::Le, 0.0),
                };
                let mut e = agg(true, wr);
                e.extend(agg(false, wc));
                e.extend(losses(wl));
                push(e, sn, b);
            }
            PolicyKind::PotentialShare => {
                let e = gens
                    .iter()
                    .zip(&s.technologies)
                    .filter(|(g, _)| g.ren)
                    .map(|(g, t)| (g.cap, t.availability.iter().sum::<f64>()))
                    .collect();
                push(e, S::Ge, p.phi * d);
            }
            PolicyKind::CapacityTarget => {
                for (name, &target) in &p.capacity_targets {
                    if let Some(k) = s.technologies.iter().position(|t| &t.name == name) {
                        push(vec![(gens[k].cap, 1.0)], S::Ge, target);
                    }
                }
            }
            PolicyKind::CarbonCap if p.cap.is_finite() => {
                let e = gens
                    .iter()
                    .zip(&s.technologies)
                    .flat_map(|(g, t)| g.g.iter().map(move |&j| (j, t.emission_factor)))
                    .collect();
                push(e, S::Le, p.cap);
            }
            _ => {}
        }
        (a, sense, rhs, cost)
    }

    /// Textbook two-phase tableau simplex with Bland's rule for
    /// `min c·x, A x (sense) b, x >= 0`.
    pub fn tableau_simplex(a: &[Vec<f64>], sense: &[S], b: &[f64], c: &[f64]) -> OracleResult {
        let m = a.len();
        let n = c.len();
        let n_slack = sense.iter().filter(|s| **s != S::Eq).count();
        let n_art = m;
        let width = n + n_slack + n_art;
        let mut tab = vec![vec![0.0; width + 1]; m];
        let mut basis = vec![0usize; m];
        let mut k = n;
        for i in 0..m {
            let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                tab[i][j] = flip * a[i][j];
            }
            tab[i][width] = flip * b[i];
            match sense[i] {
                S::Le => {
                    tab[i][k] = flip;
                    k += 1;
                }
                S::Ge => {
                    tab[i][k] = -flip;
                    k += 1;
                }
                S::Eq => {}
            }
            tab[i][n + n_slack + i] = 1.0;
            basis[i] = n + n_slack + i;
        }
        let scale = 1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-9;

        let run = |tab: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, cost: &[f64], allowed: usize| -> bool {
            loop {
                // Reduced costs d_j = c_j − c_B B^-1 A_j (tableau rows hold B^-1 A).
                let mut entering = None;
                for j in 0..allowed {
                    if basis.contains(&j) {
                        continue;
                    }
                    let mut dj = cost[j];
                    for i in 0..m {
                        dj -= cost[basis[i]] * tab[i][j];
                    }
                    let cscale = 1.0 + cost.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    if dj < -eps * cscale {
                        entering = Some(j);
                        break;
                    }
                }
                let Some(q) = entering else { return true };
                let mut leave: Option<(usize, f64)> = None;
                for i in 0..m {
                    if tab[i][q] > eps {
                        let ratio = tab[i][width] / tab[i][q];
                        let better = match leave {
                            None => true,
                            Some((p, r)) => {
                                ratio < r - 1e-12 * scale
                                    || ((ratio - r).abs() <= 1e-12 * scale && basis[i] < basis[p])
                            }
                        };
                        if better {
                            leave = Some((i, ratio));
                        }
                    }
                }
                let Some((p, _)) = leave else { return false };
                let piv = tab[p][q];
                for v in tab[p].iter_mut() {
                    *v /= piv;
                }
                let prow = tab[p].clone();
                for (i, row) in tab.iter_mut().enumerate() {
                    if i != p && row[q] != 0.0 {
                        let f = row[q];
                        for (x, y) in row.iter_mut().zip(&prow) {
                            *x -= f * y;
                        }
                    }
                }
                basis[p] = q;
            }
        };

        // Phase 1: minimize the sum of artificials.
        let mut c1 = vec![0.0; width];
        for j in n + n_slack..width {
            c1[j] = 1.0;
        }
        run(&mut tab, &mut basis, &c1, width);
        let infeas: f64 = (0..m)
            .filter(|&i| basis[i] >= n + n_slack)
            .map(|i| tab[i][width])
            .sum();
        if infeas > 1e-7 * scale {
            return OracleResult {
                status: Status::Infeasible,
                objective: f64::INFINITY,
            };
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        for i in 0..m {
            if basis[i] >= n + n_slack {
                if let Some(q) = (0..n + n_slack).find(|&j| tab[i][j].abs() > 1e-9 && !basis.contains(&j)) {
                    let piv = tab[i][q];
                    for v in tab[i].iter_mut() {
                        *v /= piv;
                    }
                    let prow = tab[i].clone();
                    for (r, row) in tab.iter_mut().enumerate() {
                        if r != i && row[q] != 0.0 {
                            let f = row[q];
                            for (x, y) in row.iter_mut().zip(&prow) {
                                *x -= f * y;
                            }
                        }
                    }
                    basis[i] = q;
                }
            }
        }
        // Phase 2 over structurals and slacks only.
        let mut c2 = vec![0.0; width];
        c2[..n].copy_from_slice(c);
        if !run(&mut tab, &mut basis, &c2, n + n_slack) {
            return OracleResult {
                status: Status::Unbounded,
                objective: f64::NEG_INFINITY,
            };
        }
        let objective = (0..m).map(|i| c2[basis[i]] * tab[i][width]).sum();
        OracleResult {
            status: Status::Optimal,
            objective,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Technology, STORAGE_DEFAULT};

    fn tiny(policy: PolicySpec) -> Scenario {
        Scenario {
            horizon: 4,
            demand: vec![50.0, 80.0, 60.0, 70.0],
            technologies: vec![
                Technology::conventional("gas", 20.0, 40.0, 0.4, 4),
                Technology::renewable("pv", 25.0, 0.0, vec![0.0, 0.9, 0.6, 0.1]),
            ],
            storages: vec![STORAGE_DEFAULT.build("sto", 4)],
            policy,
            wrap_storage_level: true,
        }
    }

    #[test]
    fn oracle_zero_demand() {
        let mut s = tiny(PolicySpec::none());
        s.demand = vec![0.0; 4];
        assert_eq!(brute_force_oracle(&s).unwrap().objective, 0.0);
    }

    #[test]
    fn oracle_matches_solver_on_tiny_instance() {
        for v in Variant::all() {
            let s = tiny(PolicySpec::renewable_share(v, 0.6));
            let o = brute_force_oracle(&s).unwrap();
            let run = solve(&s, &SolverOptions::default()).unwrap();
            assert_eq!(o.status, run.solution.status, "{v}");
            let rel = (o.objective - run.solution.objective).abs() / (1.0 + o.objective.abs());
            assert!(rel <= 1e-8, "{v}: oracle {} vs {}", o.objective, run.solution.objective);
        }
    }

    #[test]
    fn oracle_rejects_large_instances() {
        let mut s = tiny(PolicySpec::none());
        s.horizon = 13;
        assert!(brute_force_oracle(&s).is_err());
    }

    #[test]
    fn axis_application() {
        let v = Variant::new(1, Slcr::Zero).unwrap();
        let s = apply_axis(&tiny(PolicySpec::none()), SweepAxis::EtaRt, 0.81, v);
        assert!((s.storages[0].eta_in - 0.9).abs() < 1e-12);
        assert_eq!(s.policy.variant(), Some(v));
        let s = apply_axis(&s, SweepAxis::StorageVarCost, 3.0, v);
        assert_eq!(s.storages[0].var_charge_cost, 1.5);
        let s = apply_axis(&s, SweepAxis::Phi, 0.3, v);
        assert_eq!(s.policy.phi, 0.3);
    }

    #[test]
    fn sweep_rejects_unsorted_grid() {
        let spec = SweepSpec {
            base: tiny(PolicySpec::none()),
            axis: SweepAxis::Phi,
            grid: vec![0.5, 0.4],
            variants: vec![Variant::new(1, Slcr::Zero).unwrap()],
        };
        assert!(run_sweep(&spec, &SolverOptions::default()).is_err());
    }
}
