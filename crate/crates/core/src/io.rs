//! Configuration loading and result serialization.
//!
//! Configuration is TOML with sections `[scenario]`, `[technology.NAME]`,
//! `[storage.NAME]`, `[policy]`, `[solver]` and an optional `[sweep]`.
//! Technologies named like a built-in default (`coal`, `ocgt`, `pv`, `wind`)
//! inherit every key they omit; other names must give all cost keys. The
//! same holds for storages against the built-in storage default.
//!
//! Every output file carries [`SCHEMA_VERSION`]: as a top-level field in
//! JSON and as the first column of every CSV. Numbers are written rounded
//! to 12 significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{detect_cycling, metrics, CyclingReport, MetricsReport, CYCLING_TOL};
use crate::error::{Error, Result};
use crate::formulation::ModelRun;
use crate::harness::{SweepAxis, SweepRow, SweepSpec};
use crate::lp::{check_kkt, KktReport, SolverOptions};
use crate::model::{
    annualize, default_demand, scale_to_horizon, synth_profiles, technology_defaults,
    validate_scenario, PolicyKind, PolicySpec, Scenario, Slcr, Storage, TechClass, Technology,
    Variant, DEFAULT_RATE, DEFAULT_SEED, DESK_HORIZON, STORAGE_DEFAULT,
};

pub const SCHEMA_VERSION: u32 = 1;

/// The bundled default configuration.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.toml");

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    scenario: ScenarioSection,
    #[serde(default)]
    technology: BTreeMap<String, TechSection>,
    #[serde(default)]
    storage: BTreeMap<String, StorageSection>,
    #[serde(default)]
    policy: Option<PolicySection>,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    horizon: Option<usize>,
    seed: Option<u64>,
    discount_rate: Option<f64>,
    /// CSV with a `demand` column; default is the built-in demand shape.
    demand_csv: Option<PathBuf>,
    /// CSV with one availability column per renewable technology.
    profiles_csv: Option<PathBuf>,
    wrap_storage_level: Option<bool>,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TechSection {
    class: Option<TechClass>,
    /// EUR/kW.
    overnight: Option<f64>,
    /// EUR/kW-year.
    fixed_om: Option<f64>,
    lifetime: Option<f64>,
    variable_cost: Option<f64>,
    emission_factor: Option<f64>,
    curtailment_cost: Option<f64>,
    /// Column of `profiles_csv`, or `pv`/`wind` for the synthetic profiles
    /// when no CSV is given. Defaults to the technology name.
    profile: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StorageSection {
    /// EUR/MW-year, already annualized.
    charge_cost: Option<f64>,
    discharge_cost: Option<f64>,
    /// EUR/kWh.
    energy_overnight: Option<f64>,
    lifetime: Option<f64>,
    var_charge_cost: Option<f64>,
    var_discharge_cost: Option<f64>,
    round_trip: Option<f64>,
    self_discharge: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicySection {
    kind: Option<PolicyKind>,
    family: Option<u8>,
    slcr: Option<String>,
    phi: Option<f64>,
    cap: Option<f64>,
    price: Option<f64>,
    #[serde(default)]
    targets: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    feas_tol: Option<f64>,
    opt_tol: Option<f64>,
    refactor_interval: Option<usize>,
    degenerate_limit: Option<usize>,
    max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    axis: SweepAxis,
    grid: Vec<f64>,
    variants: Vec<String>,
}

/// Run settings that are not part of the model itself.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// The configuration file, if any.
    pub source: Option<PathBuf>,
    pub seed: u64,
    pub solver: SolverOptions,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: None,
            seed: DEFAULT_SEED,
            solver: SolverOptions::default(),
            output_dir: PathBuf::from("results"),
        }
    }
}

/// Overrides for the policy's renewable-share variant; unset fields keep
/// the configured values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PolicyOverride {
    pub family: Option<u8>,
    pub slcr: Option<Slcr>,
    pub phi: Option<f64>,
}

impl PolicyOverride {
    pub fn is_empty(&self) -> bool {
        self.family.is_none() && self.slcr.is_none() && self.phi.is_none()
    }

    /// Applies the override; any set field turns the policy into a
    /// renewable-share policy.
    pub fn apply(&self, s: &mut Scenario) -> Result<()> {
        if self.is_empty() {
            return Ok(());
        }
        let current = s.policy.variant();
        let family = self.family.or(current.map(|v| v.family)).unwrap_or(1);
        let slcr = self.slcr.or(current.map(|v| v.slcr)).unwrap_or(Slcr::Complete);
        let phi = self.phi.unwrap_or(if current.is_some() { s.policy.phi } else { 0.8 });
        s.policy = PolicySpec::renewable_share(Variant::new(family, slcr)?, phi);
        let v = validate_scenario(s);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(v))
        }
    }
}

fn config_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Loads a configuration file into a validated scenario and run settings.
pub fn load_config(path: &Path) -> Result<(Scenario, RunConfig)> {
    let text = fs::read_to_string(path).map_err(|e| config_err(path, e.to_string()))?;
    let (s, mut rc, _) = parse_config(&text, path)?;
    rc.source = Some(path.to_path_buf());
    Ok((s, rc))
}

/// Loads a configuration file that also carries a `[sweep]` section.
pub fn load_sweep(path: &Path) -> Result<(SweepSpec, RunConfig)> {
    let text = fs::read_to_string(path).map_err(|e| config_err(path, e.to_string()))?;
    let (base, mut rc, sweep) = parse_config(&text, path)?;
    rc.source = Some(path.to_path_buf());
    let sweep = sweep.ok_or_else(|| config_err(path, "missing [sweep] section"))?;
    let variants = sweep
        .variants
        .iter()
        .map(|v| v.parse::<Variant>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| config_err(path, format!("[sweep] variants: {e}")))?;
    if variants.is_empty() {
        return Err(config_err(path, "[sweep] variants must not be empty"));
    }
    if sweep.grid.windows(2).any(|w| w[1] <= w[0]) || sweep.grid.is_empty() {
        return Err(config_err(path, "[sweep] grid must be non-empty and strictly increasing"));
    }
    Ok((
        SweepSpec {
            base,
            axis: sweep.axis,
            grid: sweep.grid,
            variants,
        },
        rc,
    ))
}

/// The bundled default configuration, parsed.
pub fn default_config() -> Result<(Scenario, RunConfig)> {
    let (s, rc, _) = parse_config(DEFAULT_CONFIG, Path::new("<bundled default.toml>"))?;
    Ok((s, rc))
}

fn parse_config(text: &str, path: &Path) -> Result<(Scenario, RunConfig, Option<SweepSection>)> {
    let cfg: ConfigFile = toml::from_str(text).map_err(|e| config_err(path, e.to_string()))?;
    let base_dir = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) };

    let sc = &cfg.scenario;
    let horizon = sc.horizon.unwrap_or(DESK_HORIZON);
    let seed = sc.seed.unwrap_or(DEFAULT_SEED);
    let rate = sc.discount_rate.unwrap_or(DEFAULT_RATE);

    let demand = match &sc.demand_csv {
        Some(p) => {
            let p = resolve(p);
            let mut cols = read_columns(&p, &["demand"])?;
            let d = cols.remove("demand").unwrap_or_default();
            if d.len() != horizon {
                return Err(config_err(
                    &p,
                    format!("column `demand` has {} rows, horizon is {horizon}", d.len()),
                ));
            }
            d
        }
        None => default_demand(horizon),
    };

    if cfg.technology.is_empty() {
        return Err(config_err(path, "no [technology.NAME] section"));
    }
    let needed: Vec<String> = cfg
        .technology
        .iter()
        .filter(|(name, t)| tech_class(name, t) == Some(TechClass::Renewable))
        .map(|(name, t)| t.profile.clone().unwrap_or_else(|| name.clone()))
        .collect();
    let profile_cols: BTreeMap<String, Vec<f64>> = match &sc.profiles_csv {
        Some(p) => {
            let p = resolve(p);
            let cols = read_columns(&p, &needed.iter().map(String::as_str).collect::<Vec<_>>())?;
            for (name, col) in &cols {
                if col.len() != horizon {
                    return Err(config_err(
                        &p,
                        format!("column `{name}` has {} rows, horizon is {horizon}", col.len()),
                    ));
                }
                if let Some(row) = col.iter().position(|v| !(0.0..=1.0).contains(v)) {
                    return Err(config_err(
                        &p,
                        format!("line {}: column `{name}` value {} outside [0, 1]", row + 2, col[row]),
                    ));
                }
            }
            cols
        }
        None => {
            let pr = synth_profiles(seed, horizon)?;
            BTreeMap::from([("pv".to_string(), pr.pv), ("wind".to_string(), pr.wind)])
        }
    };

    let mut technologies = Vec::new();
    for (name, t) in &cfg.technology {
        let ctx = format!("[technology.{name}]");
        let def = technology_defaults(name);
        let class = tech_class(name, t)
            .ok_or_else(|| config_err(path, format!("{ctx}: missing key `class`")))?;
        let get = |v: Option<f64>, d: Option<f64>, key: &str| {
            v.or(d).ok_or_else(|| config_err(path, format!("{ctx}: missing key `{key}`")))
        };
        let overnight = get(t.overnight, def.map(|d| d.overnight), "overnight")?;
        let fixed_om = get(t.fixed_om, def.map(|d| d.fixed_om), "fixed_om")?;
        let lifetime = get(t.lifetime, def.map(|d| d.lifetime), "lifetime")?;
        let variable_cost = get(t.variable_cost, def.map(|d| d.variable_cost), "variable_cost")?;
        let annual = annualize(overnight, lifetime, rate, fixed_om)
            .map_err(|e| config_err(path, format!("{ctx}: {e}")))?;
        let cost = scale_to_horizon(annual, horizon);
        let mut tech = match class {
            TechClass::Conventional => {
                let ef = get(t.emission_factor, def.map(|d| d.emission_factor), "emission_factor")?;
                Technology::conventional(name, cost, variable_cost, ef, horizon)
            }
            TechClass::Renewable => {
                let col = t.profile.clone().unwrap_or_else(|| name.clone());
                let avail = profile_cols.get(&col).cloned().ok_or_else(|| {
                    config_err(path, format!("{ctx}: no availability profile `{col}`"))
                })?;
                Technology::renewable(name, cost, variable_cost, avail)
            }
        };
        if let Some(c) = t.curtailment_cost {
            tech.curtailment_cost = c;
        }
        technologies.push(tech);
    }

    let mut storages = Vec::new();
    for (name, st) in &cfg.storage {
        let d = &STORAGE_DEFAULT;
        let energy = annualize(
            st.energy_overnight.unwrap_or(d.energy_overnight),
            st.lifetime.unwrap_or(d.lifetime),
            rate,
            0.0,
        )
        .map_err(|e| config_err(path, format!("[storage.{name}]: {e}")))?;
        let mut s = Storage {
            name: name.clone(),
            charge_cost: scale_to_horizon(st.charge_cost.unwrap_or(d.charge_cost), horizon),
            discharge_cost: scale_to_horizon(st.discharge_cost.unwrap_or(d.discharge_cost), horizon),
            energy_cost: scale_to_horizon(energy, horizon),
            var_charge_cost: st.var_charge_cost.unwrap_or(d.var_charge_cost),
            var_discharge_cost: st.var_discharge_cost.unwrap_or(d.var_discharge_cost),
            eta_in: 1.0,
            eta_out: 1.0,
            self_discharge: st.self_discharge.unwrap_or(1.0),
        };
        s.set_round_trip(st.round_trip.unwrap_or(d.round_trip));
        storages.push(s);
    }

    let policy = match &cfg.policy {
        None => PolicySpec::none(),
        Some(p) => parse_policy(p).map_err(|e| config_err(path, format!("[policy]: {e}")))?,
    };

    let scenario = Scenario {
        horizon,
        demand,
        technologies,
        storages,
        policy,
        wrap_storage_level: sc.wrap_storage_level.unwrap_or(true),
    };
    let violations = validate_scenario(&scenario);
    if !violations.is_empty() {
        return Err(Error::InvalidScenario(violations));
    }

    let mut solver = SolverOptions::default();
    let sv = &cfg.solver;
    solver.feas_tol = sv.feas_tol.unwrap_or(solver.feas_tol);
    solver.opt_tol = sv.opt_tol.unwrap_or(solver.opt_tol);
    solver.refactor_interval = sv.refactor_interval.unwrap_or(solver.refactor_interval);
    solver.degenerate_limit = sv.degenerate_limit.unwrap_or(solver.degenerate_limit);
    solver.max_iterations = sv.max_iterations.or(solver.max_iterations);

    let rc = RunConfig {
        source: None,
        seed,
        solver,
        output_dir: sc
            .output_dir
            .as_deref()
            .map(resolve)
            .unwrap_or_else(|| PathBuf::from("results")),
    };
    Ok((scenario, rc, cfg.sweep))
}

fn tech_class(name: &str, t: &TechSection) -> Option<TechClass> {
    t.class.or_else(|| technology_defaults(name).map(|d| d.class))
}

fn parse_policy(p: &PolicySection) -> Result<PolicySpec> {
    let kind = p.kind.unwrap_or(PolicyKind::RenewableShare);
    let need = |v: Option<f64>, key: &str| {
        v.ok_or_else(|| Error::InvalidParameter(format!("missing key `{key}` for policy `{kind}`")))
    };
    Ok(match kind {
        PolicyKind::None => PolicySpec::none(),
        PolicyKind::RenewableShare => {
            let family = p
                .family
                .ok_or_else(|| Error::InvalidParameter("missing key `family`".into()))?;
            let slcr: Slcr = p
                .slcr
                .as_deref()
                .ok_or_else(|| Error::InvalidParameter("missing key `slcr`".into()))?
                .parse()?;
            PolicySpec::renewable_share(Variant::new(family, slcr)?, need(p.phi, "phi")?)
        }
        PolicyKind::PotentialShare => PolicySpec::potential_share(need(p.phi, "phi")?),
        PolicyKind::CapacityTarget => PolicySpec::capacity_target(p.targets.clone()),
        PolicyKind::CarbonCap => PolicySpec::carbon_cap(need(p.cap, "cap")?),
        PolicyKind::CarbonPrice => PolicySpec::carbon_price(need(p.price, "price")?),
    })
}

/// Reads the named numeric columns of a CSV file (other columns are
/// ignored). Errors name the file, line and column.
pub fn read_columns(path: &Path, names: &[&str]) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| config_err(path, e.to_string()))?;
    let headers = rdr.headers().map_err(|e| config_err(path, e.to_string()))?.clone();
    let mut idx = Vec::new();
    for &name in names {
        let i = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| config_err(path, format!("missing column `{name}`")))?;
        idx.push((name, i));
    }
    let mut out: BTreeMap<String, Vec<f64>> =
        names.iter().map(|n| (n.to_string(), Vec::new())).collect();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| config_err(path, e.to_string()))?;
        let line = rec.position().map_or(k as u64 + 2, |p| p.line());
        for &(name, i) in &idx {
            let field = rec.get(i).unwrap_or("").trim();
            let v: f64 = field.parse().map_err(|_| {
                config_err(path, format!("line {line}: column `{name}`: `{field}` is not a number"))
            })?;
            if !v.is_finite() {
                return Err(config_err(path, format!("line {line}: column `{name}`: non-finite value")));
            }
            out.get_mut(name).expect("column").push(v);
        }
    }
    Ok(out)
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float")
}

/// Text form of [`round12`], shortest representation that parses back to
/// the rounded value.
pub fn fmt12(x: f64) -> String {
    let r = round12(x);
    if r.is_nan() {
        "NaN".into()
    } else if r.is_infinite() {
        if r > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{r}")
    }
}

/// Rounds every float in a JSON tree to 12 significant digits; non-finite
/// values become `null`.
fn round_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64().filter(|_| n.is_f64()) {
                *v = serde_json::Number::from_f64(round12(f))
                    .map(serde_json::Value::Number)
                    .unwrap_or(serde_json::Value::Null);
            }
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(round_json),
        serde_json::Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Summary written to `results.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub horizon: usize,
    pub policy: PolicySpec,
    pub status: String,
    pub objective: f64,
    pub iterations: usize,
    pub capacities: BTreeMap<String, f64>,
    pub generation: BTreeMap<String, f64>,
    pub curtailment: f64,
    pub storage_losses: f64,
    pub policy_dual: Option<f64>,
    pub metrics: Option<SummaryMetrics>,
    pub cycling: CyclingSummary,
    pub kkt: KktReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryMetrics {
    pub mu_policy: f64,
    pub reported_share: BTreeMap<String, f64>,
    pub emissions: f64,
    pub storages: Vec<crate::analysis::StorageMetrics>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclingSummary {
    pub hours: usize,
    pub spc: f64,
    pub apc: f64,
    pub unintended_discharge: f64,
    pub unintended_losses: f64,
    pub total_unintended: f64,
}

pub fn summarize(run: &ModelRun, report: &CyclingReport, m: Option<&MetricsReport>) -> RunSummary {
    let kkt = check_kkt(&run.lp, &run.solution, 1e-6);
    RunSummary {
        schema_version: SCHEMA_VERSION,
        horizon: run.layout.horizon,
        policy: run.scenario.policy.clone(),
        status: run.solution.status.to_string(),
        objective: run.solution.objective,
        iterations: run.solution.iterations,
        capacities: run.capacities(),
        generation: run
            .layout
            .techs
            .iter()
            .map(|t| (t.name.clone(), run.total(&t.generation)))
            .collect(),
        curtailment: run.curtailment_total(),
        storage_losses: run.storage_losses(),
        policy_dual: run.layout.policy_row.map(|_| run.policy_dual()),
        metrics: m.map(|m| SummaryMetrics {
            mu_policy: m.mu_policy,
            reported_share: m.reported_share.clone(),
            emissions: m.emissions,
            storages: m.storages.clone(),
        }),
        cycling: CyclingSummary {
            hours: report.hours,
            spc: report.total_spc,
            apc: report.total_apc,
            unintended_discharge: report.total_unintended_discharge,
            unintended_losses: report.total_losses,
            total_unintended: report.total_energy(),
        },
        kkt,
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?)
}

/// Writes `results.json`, `dispatch.csv`, `rldc.csv` and `cycling.csv` for
/// one run into `dir` (created if missing). Returns the written paths.
///
/// `dispatch.csv`: `schema_version, t, demand, G[tech]..., CU[tech]...,
/// in[storage], out[storage], level[storage]..., price, cycling`.
/// `rldc.csv`: `schema_version, rank, raw, after_curtailment, after_storage`
/// (descending curves). `cycling.csv`: one row per cycling event.
pub fn write_results(run: &ModelRun, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let report = detect_cycling(run, CYCLING_TOL);
    let m = run.is_optimal().then(|| metrics(run, &report));
    let mut written = Vec::new();

    let p = dir.join("results.json");
    fs::write(&p, to_json_string(&summarize(run, &report, m.as_ref()))?)?;
    written.push(p);

    if !run.is_optimal() {
        return Ok(written);
    }
    let m = m.expect("metrics of optimal run");

    let p = dir.join("dispatch.csv");
    let mut w = csv_writer(&p)?;
    let mut header = vec!["schema_version".to_string(), "t".into(), "demand".into()];
    for t in &run.layout.techs {
        header.push(format!("G[{}]", t.name));
    }
    for t in run.layout.techs.iter().filter(|t| t.renewable) {
        header.push(format!("CU[{}]", t.name));
    }
    for s in &run.layout.storages {
        header.push(format!("in[{}]", s.name));
        header.push(format!("out[{}]", s.name));
        header.push(format!("level[{}]", s.name));
    }
    header.push("price".into());
    header.push("cycling".into());
    w.write_record(&header)?;
    let prices = run.prices();
    for t in 0..run.layout.horizon {
        let mut rec = vec![
            SCHEMA_VERSION.to_string(),
            t.to_string(),
            fmt12(run.scenario.demand[t]),
        ];
        for c in &run.layout.techs {
            rec.push(fmt12(run.value(c.generation[t])));
        }
        for c in run.layout.techs.iter().filter(|t| t.renewable) {
            rec.push(fmt12(run.value(c.curtailment[t])));
        }
        for s in &run.layout.storages {
            rec.push(fmt12(run.value(s.charge[t])));
            rec.push(fmt12(run.value(s.discharge[t])));
            rec.push(fmt12(run.value(s.level[t])));
        }
        rec.push(fmt12(prices[t]));
        rec.push(u8::from(report.is_cycling_hour(t)).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    written.push(p);

    let p = dir.join("rldc.csv");
    let mut w = csv_writer(&p)?;
    w.write_record(["schema_version", "rank", "raw", "after_curtailment", "after_storage"])?;
    for k in 0..m.rldc.raw.len() {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            k.to_string(),
            fmt12(m.rldc.raw[k]),
            fmt12(m.rldc.after_curtailment[k]),
            fmt12(m.rldc.after_storage[k]),
        ])?;
    }
    w.flush()?;
    written.push(p);

    let p = dir.join("cycling.csv");
    write_cycling_csv(&report, &p)?;
    written.push(p);
    Ok(written)
}

/// `cycling.csv`: `schema_version, storage, t, charge, discharge, type, spc,
/// apc, unintended_discharge, unintended_losses`; header only when empty.
pub fn write_cycling_csv(report: &CyclingReport, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "schema_version",
        "storage",
        "t",
        "charge",
        "discharge",
        "type",
        "spc",
        "apc",
        "unintended_discharge",
        "unintended_losses",
    ])?;
    for e in &report.events {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            e.storage.clone(),
            e.hour.to_string(),
            fmt12(e.charge),
            fmt12(e.discharge),
            e.cycling_type.to_string(),
            fmt12(e.spc),
            fmt12(e.apc),
            fmt12(e.unintended_discharge),
            fmt12(e.unintended_losses),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `sweep.csv`: `schema_version, axis, value, variant, status, objective,
/// cycling_energy, cycling_hours, emissions, indeterminate, cap[...]...`.
/// Empty cells mark values missing for non-optimal rows.
pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let cap_keys: Vec<String> = {
        let mut k: Vec<String> = rows.iter().flat_map(|r| r.capacities.keys().cloned()).collect();
        k.sort();
        k.dedup();
        k
    };
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = [
        "schema_version",
        "axis",
        "value",
        "variant",
        "status",
        "objective",
        "cycling_energy",
        "cycling_hours",
        "emissions",
        "indeterminate",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(cap_keys.iter().map(|k| format!("cap[{k}]")));
    w.write_record(&header)?;
    let opt = |v: Option<f64>| v.map(fmt12).unwrap_or_default();
    for r in rows {
        let mut rec = vec![
            SCHEMA_VERSION.to_string(),
            r.axis.to_string(),
            fmt12(r.value),
            r.variant.to_string(),
            r.status.clone(),
            opt(r.objective),
            opt(r.cycling_energy),
            r.cycling_hours.map(|h| h.to_string()).unwrap_or_default(),
            opt(r.emissions),
            u8::from(r.indeterminate).to_string(),
        ];
        rec.extend(cap_keys.iter().map(|k| opt(r.capacities.get(k).copied())));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes availability profiles as `schema_version, t, pv, wind`.
pub fn write_profiles_csv(pv: &[f64], wind: &[f64], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["schema_version", "t", "pv", "wind"])?;
    for t in 0..pv.len() {
        w.write_record([SCHEMA_VERSION.to_string(), t.to_string(), fmt12(pv[t]), fmt12(wind[t])])?;
    }
    w.flush()?;
    Ok(())
}
