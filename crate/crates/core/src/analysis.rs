//! Post-solution diagnostics: cycling detection and decomposition, storage
//! economics (LCOS, market value, normalized losses, zero-profit residual),
//! residual load duration curves, reported renewable shares, emissions and
//! price tagging.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulation::{loss_coefficient, ModelRun};
use crate::model::{PolicyKind, Slcr, Variant};

/// Default threshold (MW) below which a flow counts as zero.
pub const CYCLING_TOL: f64 = 1e-6;

/// Simultaneous charge and discharge in one storage-hour, split into its
/// same-period (SPC) and across-period (APC) parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclingEvent {
    pub storage: String,
    pub hour: usize,
    pub charge: f64,
    pub discharge: f64,
    /// 1..=4, or 0 when charge and discharge do not overlap.
    pub cycling_type: u8,
    pub spc: f64,
    pub apc: f64,
    pub unintended_discharge: f64,
    pub unintended_losses: f64,
    pub intended_charge: f64,
    pub intended_discharge: f64,
}

impl CyclingEvent {
    /// SPC + APC + unintended discharge.
    pub fn total_unintended(&self) -> f64 {
        self.spc + self.apc + self.unintended_discharge
    }
}

/// Splits one hour's charge `c` and discharge `d` at round-trip efficiency
/// `eta_rt`.
///
/// The unintended discharge is `U = min(c, d)`. Of it, `s = min(eta_rt·c, d)`
/// can be served by this hour's charge, which required `s / eta_rt` of
/// charging (SPC); the remainder `(U − s) / eta_rt` had to be charged in
/// other hours (APC). Losses are `U·(1/eta_rt − 1)`.
pub fn decompose_cycling(c: f64, d: f64, eta_rt: f64) -> Result<CyclingEvent> {
    if !(eta_rt > 0.0 && eta_rt <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "round-trip efficiency must be in (0, 1], got {eta_rt}"
        )));
    }
    if !(c >= 0.0 && d >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "charge and discharge must be >= 0, got {c} and {d}"
        )));
    }
    let u = c.min(d);
    let s = (eta_rt * c).min(d);
    let spc = s / eta_rt;
    let apc = (u - s) / eta_rt;
    let cycling_type = if u <= CYCLING_TOL {
        0
    } else if (c - d).abs() <= CYCLING_TOL {
        1
    } else if d > c {
        2
    } else if d > eta_rt * c {
        3
    } else {
        4
    };
    Ok(CyclingEvent {
        storage: String::new(),
        hour: 0,
        charge: c,
        discharge: d,
        cycling_type,
        spc,
        apc,
        unintended_discharge: u,
        unintended_losses: u * (1.0 / eta_rt - 1.0),
        intended_charge: c - spc,
        intended_discharge: d - u,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CyclingReport {
    pub events: Vec<CyclingEvent>,
    /// Distinct hours with at least one event.
    pub hours: usize,
    pub total_spc: f64,
    pub total_apc: f64,
    pub total_unintended_discharge: f64,
    pub total_losses: f64,
}

impl CyclingReport {
    pub fn from_events(events: Vec<CyclingEvent>) -> Self {
        let mut hours: Vec<usize> = events.iter().map(|e| e.hour).collect();
        hours.sort_unstable();
        hours.dedup();
        Self {
            hours: hours.len(),
            total_spc: events.iter().fold(0.0, |a, e| a + e.spc),
            total_apc: events.iter().fold(0.0, |a, e| a + e.apc),
            total_unintended_discharge: events.iter().fold(0.0, |a, e| a + e.unintended_discharge),
            total_losses: events.iter().fold(0.0, |a, e| a + e.unintended_losses),
            events,
        }
    }

    /// Total unintended storage use: SPC + APC + unintended discharge.
    pub fn total_energy(&self) -> f64 {
        self.total_spc + self.total_apc + self.total_unintended_discharge
    }

    pub fn is_cycling_hour(&self, t: usize) -> bool {
        self.events.iter().any(|e| e.hour == t)
    }
}

/// One event per (storage, hour) where both charge and discharge exceed `tol`.
pub fn detect_cycling(run: &ModelRun, tol: f64) -> CyclingReport {
    let mut events = Vec::new();
    for (st, cols) in run.scenario.storages.iter().zip(&run.layout.storages) {
        for t in 0..run.layout.horizon {
            let c = run.value(cols.charge[t]).max(0.0);
            let d = run.value(cols.discharge[t]).max(0.0);
            if c.min(d) > tol {
                let mut e = decompose_cycling(c, d, st.round_trip())
                    .expect("validated scenario has efficiencies in (0, 1]");
                e.storage = st.name.clone();
                e.hour = t;
                events.push(e);
            }
        }
    }
    CyclingReport::from_events(events)
}

fn discharge_total(run: &ModelRun, r: usize) -> Option<f64> {
    let total = run.total(&run.layout.storages[r].discharge);
    (total > 0.0).then_some(total)
}

/// Levelized cost of storage `r`: capacity, variable and charging-energy cost
/// per MWh discharged. `None` when nothing is discharged.
pub fn lcos(run: &ModelRun, r: usize) -> Option<f64> {
    let out = discharge_total(run, r)?;
    let st = &run.scenario.storages[r];
    let cols = &run.layout.storages[r];
    let prices = run.prices();
    let capital = st.charge_cost * run.value(cols.cap_in)
        + st.discharge_cost * run.value(cols.cap_out)
        + st.energy_cost * run.value(cols.cap_level);
    let variable = st.var_charge_cost * run.total(&cols.charge)
        + st.var_discharge_cost * run.total(&cols.discharge);
    let energy: f64 = cols
        .charge
        .iter()
        .zip(&prices)
        .map(|(&v, p)| p * run.value(v))
        .sum();
    Some((capital + variable + energy) / out)
}

/// Discharge-weighted mean price earned by storage `r`.
pub fn market_value(run: &ModelRun, r: usize) -> Option<f64> {
    let out = discharge_total(run, r)?;
    let cols = &run.layout.storages[r];
    let revenue: f64 = cols
        .discharge
        .iter()
        .zip(run.prices())
        .map(|(&v, p)| p * run.value(v))
        .sum();
    Some(revenue / out)
}

/// Storage losses per MWh discharged: `Σ(G_in − G_out) / Σ G_out`.
pub fn nsl(run: &ModelRun, r: usize) -> Option<f64> {
    let out = discharge_total(run, r)?;
    let cols = &run.layout.storages[r];
    Some((run.total(&cols.charge) - out) / out)
}

/// Factor `k` in the storage zero-profit condition `LCOS + k·μ·NSL = MV`.
pub fn zero_profit_k(variant: Variant, phi: f64) -> f64 {
    match (variant.family, variant.slcr) {
        (1, Slcr::Zero) | (2, Slcr::Proportionate) | (4, Slcr::Proportionate) | (3, Slcr::Complete) => 0.0,
        (1, Slcr::Proportionate) => phi,
        (1, Slcr::Complete) => 1.0,
        (2, Slcr::Zero) | (4, Slcr::Zero) => -phi,
        (2, Slcr::Complete) | (4, Slcr::Complete) => 1.0 - phi,
        (3, Slcr::Zero) => -1.0,
        (3, Slcr::Proportionate) => -(1.0 - phi),
        _ => 0.0,
    }
}

/// `LCOS + k·μ·NSL − MV` for storage `r`, with μ the policy multiplier in
/// its natural (nonnegative) sign. Policies whose row does not involve
/// storage flows use `k = 0`.
pub fn zero_profit_residual(run: &ModelRun, r: usize) -> Result<f64> {
    let lcos = lcos(run, r).ok_or(Error::Undefined("LCOS"))?;
    let mv = market_value(run, r).ok_or(Error::Undefined("market value"))?;
    let nsl = nsl(run, r).ok_or(Error::Undefined("NSL"))?;
    let p = &run.scenario.policy;
    let k = match p.variant() {
        Some(v) => zero_profit_k(v, p.phi),
        None => 0.0,
    };
    Ok(lcos + k * run.policy_mu() * nsl - mv)
}

/// Same residual computed from the raw row dual and the policy row's own
/// loss coefficient, without the sign bookkeeping of `k` and μ.
pub fn zero_profit_residual_from_row(run: &ModelRun, r: usize) -> Result<f64> {
    let lcos = lcos(run, r).ok_or(Error::Undefined("LCOS"))?;
    let mv = market_value(run, r).ok_or(Error::Undefined("market value"))?;
    let nsl = nsl(run, r).ok_or(Error::Undefined("NSL"))?;
    let a = match run.scenario.policy.variant() {
        Some(v) => loss_coefficient(v, run.scenario.policy.phi),
        None => 0.0,
    };
    Ok(lcos - a * run.policy_dual() * nsl - mv)
}

/// Residual load duration curves, each sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rldc {
    /// Demand minus renewable potential.
    pub raw: Vec<f64>,
    /// Plus curtailment.
    pub after_curtailment: Vec<f64>,
    /// Plus storage charging minus discharging.
    pub after_storage: Vec<f64>,
}

pub fn rldc(run: &ModelRun) -> Rldc {
    let s = &run.scenario;
    let l = &run.layout;
    let mut raw = s.demand.clone();
    let mut after_curtailment;
    for (tech, cols) in s.technologies.iter().zip(&l.techs) {
        if tech.is_renewable() {
            let cap = run.value(cols.capacity);
            for (t, r) in raw.iter_mut().enumerate() {
                *r -= tech.availability[t] * cap;
            }
        }
    }
    after_curtailment = raw.clone();
    for cols in &l.techs {
        for (t, &v) in cols.curtailment.iter().enumerate() {
            after_curtailment[t] += run.value(v);
        }
    }
    let mut after_storage = after_curtailment.clone();
    for cols in &l.storages {
        for t in 0..l.horizon {
            after_storage[t] += run.value(cols.charge[t]) - run.value(cols.discharge[t]);
        }
    }
    for v in [&mut raw, &mut after_curtailment, &mut after_storage] {
        v.sort_by(|a, b| b.total_cmp(a));
    }
    Rldc {
        raw,
        after_curtailment,
        after_storage,
    }
}

/// The φ at which the policy row of `variant` would be exactly binding for
/// this solution.
pub fn reported_share(run: &ModelRun, variant: Variant) -> f64 {
    let d = run.scenario.total_demand();
    let r = run.generation_total(true);
    let c = run.generation_total(false);
    let l = run.storage_losses();
    let g = r + c;
    match (variant.family, variant.slcr) {
        (1, Slcr::Zero) => r / d,
        (1, Slcr::Proportionate) => r / (d + l),
        (1, Slcr::Complete) => (r - l) / d,
        (2, Slcr::Zero) => r / (g - l),
        (2, Slcr::Proportionate) => r / g,
        (2, Slcr::Complete) => (r - l) / (g - l),
        (3, Slcr::Zero) => 1.0 - (c - l) / d,
        (3, Slcr::Proportionate) => 1.0 - c / (d + l),
        (3, Slcr::Complete) => 1.0 - c / d,
        (4, Slcr::Zero) => 1.0 - (c - l) / (g - l),
        (4, Slcr::Proportionate) => 1.0 - c / g,
        (4, Slcr::Complete) => 1.0 - c / (g - l),
        _ => f64::NAN,
    }
}

/// Σ e_s G_st in tCO2.
pub fn emissions(run: &ModelRun) -> f64 {
    run.scenario
        .technologies
        .iter()
        .zip(&run.layout.techs)
        .map(|(t, cols)| t.emission_factor * run.total(&cols.generation))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct TaggedPrice {
    pub hour: usize,
    pub price: f64,
    pub cycling: bool,
}

pub fn tagged_prices(run: &ModelRun, report: &CyclingReport) -> Vec<TaggedPrice> {
    let mut flag = vec![false; run.layout.horizon];
    for e in &report.events {
        flag[e.hour] = true;
    }
    run.prices()
        .into_iter()
        .enumerate()
        .map(|(hour, price)| TaggedPrice {
            hour,
            price,
            cycling: flag[hour],
        })
        .collect()
}

/// Largest violation of the discharge optimality condition
/// `λ_t = o_out − λ^l_t/η_out − a_p·y_p` over hours where storage `r`
/// discharges strictly between 0 and its capacity (margin `tol`). Returns
/// the residual and the number of hours checked.
pub fn discharge_price_condition(run: &ModelRun, r: usize, tol: f64) -> (f64, usize) {
    let st = &run.scenario.storages[r];
    let cols = &run.layout.storages[r];
    let cap = run.value(cols.cap_out);
    let prices = run.prices();
    let policy = run.layout.policy_row.map(|row| (run.lp.row(row), run.solution.row_dual(row)));
    let mut worst = 0.0f64;
    let mut checked = 0;
    for t in 0..run.layout.horizon {
        let g = run.value(cols.discharge[t]);
        if g <= tol || g >= cap - tol {
            continue;
        }
        let level_dual = run.solution.row_dual(cols.level_rows[t]);
        let policy_term = policy.map_or(0.0, |(row, y)| {
            row.coeffs
                .iter()
                .find(|&&(j, _)| j == cols.discharge[t].0)
                .map_or(0.0, |&(_, a)| a * y)
        });
        let expected = st.var_discharge_cost - level_dual / st.eta_out - policy_term;
        worst = worst.max((prices[t] - expected).abs());
        checked += 1;
    }
    (worst, checked)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StorageMetrics {
    pub name: String,
    pub lcos: Option<f64>,
    pub mv: Option<f64>,
    pub nsl: Option<f64>,
    pub zero_profit_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub storages: Vec<StorageMetrics>,
    pub mu_policy: f64,
    pub rldc: Rldc,
    /// Reported renewable share per variant label (`"1a"` ... `"4c"`).
    pub reported_share: BTreeMap<String, f64>,
    pub emissions: f64,
    pub prices: Vec<TaggedPrice>,
}

pub fn metrics(run: &ModelRun, cycling: &CyclingReport) -> MetricsReport {
    let storages = (0..run.layout.storages.len())
        .map(|r| StorageMetrics {
            name: run.layout.storages[r].name.clone(),
            lcos: lcos(run, r),
            mv: market_value(run, r),
            nsl: nsl(run, r),
            zero_profit_residual: zero_profit_residual(run, r).ok(),
        })
        .collect();
    MetricsReport {
        storages,
        mu_policy: match run.scenario.policy.kind {
            PolicyKind::None | PolicyKind::CarbonPrice => 0.0,
            _ => run.policy_mu(),
        },
        rldc: rldc(run),
        reported_share: Variant::all()
            .into_iter()
            .map(|v| (v.to_string(), reported_share(run, v)))
            .collect(),
        emissions: emissions(run),
        prices: tagged_prices(run, cycling),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn equal_flows_type_one() {
        let e = decompose_cycling(10.0, 10.0, 0.64).unwrap();
        assert_eq!(e.cycling_type, 1);
        assert!(close(e.spc, 10.0));
        assert!(close(e.apc, 5.625));
        assert!(close(e.unintended_discharge, 10.0));
        assert!(close(e.unintended_losses, 5.625));
        assert!(close(e.total_unintended(), 25.625));
    }

    #[test]
    fn discharge_only_is_not_an_event() {
        let e = decompose_cycling(0.0, 5.0, 0.8).unwrap();
        assert_eq!(e.cycling_type, 0);
        assert_eq!(e.intended_discharge, 5.0);
        assert_eq!(e.spc + e.apc + e.unintended_discharge + e.unintended_losses, 0.0);
    }

    #[test]
    fn charge_heavy_type_four() {
        let e = decompose_cycling(10.0, 4.0, 0.64).unwrap();
        assert_eq!(e.cycling_type, 4);
        assert!(close(e.spc, 6.25));
        assert!(close(e.apc, 0.0));
        assert!(close(e.unintended_losses, 2.25));
        assert!(close(e.intended_charge, 3.75));
    }

    #[test]
    fn discharge_heavy_type_two() {
        let e = decompose_cycling(4.0, 10.0, 0.64).unwrap();
        assert_eq!(e.cycling_type, 2);
        assert!(close(e.unintended_discharge, 4.0));
        assert!(close(e.spc, 4.0));
        assert!(close(e.apc, 2.25));
        assert!(close(e.unintended_losses, 2.25));
        assert!(close(e.intended_discharge, 6.0));
    }

    #[test]
    fn type_three_between_eta_c_and_c() {
        let e = decompose_cycling(10.0, 8.0, 0.64).unwrap();
        assert_eq!(e.cycling_type, 3);
    }

    #[test]
    fn bad_efficiency_is_rejected() {
        assert!(decompose_cycling(1.0, 1.0, 0.0).is_err());
        assert!(decompose_cycling(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn report_totals_are_event_sums() {
        let mut a = decompose_cycling(10.0, 10.0, 0.64).unwrap();
        a.hour = 3;
        let mut b = decompose_cycling(4.0, 10.0, 0.64).unwrap();
        b.hour = 3;
        let mut c = decompose_cycling(10.0, 4.0, 0.64).unwrap();
        c.hour = 5;
        let rep = CyclingReport::from_events(vec![a, b, c]);
        assert_eq!(rep.hours, 2);
        assert!(close(rep.total_spc, 10.0 + 4.0 + 6.25));
        assert!(close(rep.total_losses, 5.625 + 2.25 + 2.25));
        assert!(rep.is_cycling_hour(5) && !rep.is_cycling_hour(4));
    }

    #[test]
    fn k_matches_loss_coefficient_sign_rule() {
        for v in Variant::all() {
            for phi in [0.0, 0.3, 0.8, 1.0] {
                let a = loss_coefficient(v, phi);
                let expected = if v.is_minimum_renewable() { -a } else { a };
                assert_eq!(zero_profit_k(v, phi), expected, "{v} at {phi}");
            }
        }
    }
}
