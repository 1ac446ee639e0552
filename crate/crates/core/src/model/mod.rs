//! Domain types shared by the formulation, analysis and harness layers.
//!
//! Units: capacities in MW (MWh for storage energy), flows in MWh per hour,
//! capacity costs in EUR per MW (or MWh) for the modelled horizon, variable
//! costs in EUR/MWh, emission factors in tCO2/MWh.

mod defaults;
mod profiles;

pub use defaults::{
    default_demand, desk_scenario, scale_to_horizon, storage_defaults, technology_defaults,
    StorageAssumption, TechAssumption, ANNUAL_DEMAND_MWH, DEFAULT_RATE, DEFAULT_SEED,
    DESK_HORIZON, HOURS_PER_YEAR, STORAGE_DEFAULT, TECH_DEFAULTS,
};
pub use profiles::{synth_profiles, Profiles};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TechClass {
    Renewable,
    Conventional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Technology {
    pub name: String,
    pub class: TechClass,
    /// Annualized capacity cost incl. fixed O&M, EUR/MW for the horizon.
    pub capacity_cost: f64,
    pub variable_cost: f64,
    /// Hourly availability factor; all ones for conventional plants.
    pub availability: Vec<f64>,
    pub curtailment_cost: f64,
    pub emission_factor: f64,
}

impl Technology {
    pub fn conventional(
        name: impl Into<String>,
        capacity_cost: f64,
        variable_cost: f64,
        emission_factor: f64,
        horizon: usize,
    ) -> Self {
        Self {
            name: name.into(),
            class: TechClass::Conventional,
            capacity_cost,
            variable_cost,
            availability: vec![1.0; horizon],
            curtailment_cost: 0.0,
            emission_factor,
        }
    }

    pub fn renewable(
        name: impl Into<String>,
        capacity_cost: f64,
        variable_cost: f64,
        availability: Vec<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            class: TechClass::Renewable,
            capacity_cost,
            variable_cost,
            availability,
            curtailment_cost: 0.0,
            emission_factor: 0.0,
        }
    }

    pub fn is_renewable(&self) -> bool {
        self.class == TechClass::Renewable
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Storage {
    pub name: String,
    pub charge_cost: f64,
    pub discharge_cost: f64,
    pub energy_cost: f64,
    pub var_charge_cost: f64,
    pub var_discharge_cost: f64,
    pub eta_in: f64,
    pub eta_out: f64,
    /// Fraction of the stored energy retained from one hour to the next.
    pub self_discharge: f64,
}

impl Storage {
    pub fn round_trip(&self) -> f64 {
        self.eta_in * self.eta_out
    }

    /// Sets both directional efficiencies to `sqrt(eta_rt)`.
    pub fn set_round_trip(&mut self, eta_rt: f64) {
        let e = eta_rt.sqrt();
        self.eta_in = e;
        self.eta_out = e;
    }
}

/// Share of storage conversion losses the renewable constraint makes
/// renewables cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slcr {
    Zero,
    Proportionate,
    Complete,
}

impl Slcr {
    pub const ALL: [Slcr; 3] = [Slcr::Zero, Slcr::Proportionate, Slcr::Complete];

    pub fn letter(self) -> char {
        match self {
            Slcr::Zero => 'a',
            Slcr::Proportionate => 'b',
            Slcr::Complete => 'c',
        }
    }
}

impl fmt::Display for Slcr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slcr::Zero => "zero",
            Slcr::Proportionate => "proportionate",
            Slcr::Complete => "complete",
        })
    }
}

impl FromStr for Slcr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "a" => Ok(Slcr::Zero),
            "proportionate" | "b" => Ok(Slcr::Proportionate),
            "complete" | "c" => Ok(Slcr::Complete),
            _ => Err(Error::InvalidParameter(format!(
                "slcr must be zero, proportionate or complete, got `{s}`"
            ))),
        }
    }
}

/// One of the twelve renewable-share formulations: a constraint family
/// (1: min renewable share of demand, 2: of generation, 3: max conventional
/// share of demand, 4: of generation) and a loss-coverage level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Variant {
    pub family: u8,
    pub slcr: Slcr,
}

impl Variant {
    pub fn new(family: u8, slcr: Slcr) -> Result<Self> {
        if !(1..=4).contains(&family) {
            return Err(Error::InvalidParameter(format!(
                "constraint family must be 1..4, got {family}"
            )));
        }
        Ok(Self { family, slcr })
    }

    /// All twelve variants, ordered 1a, 1b, ..., 4c.
    pub fn all() -> Vec<Variant> {
        (1..=4)
            .flat_map(|family| Slcr::ALL.into_iter().map(move |slcr| Variant { family, slcr }))
            .collect()
    }

    /// Families 1 and 2 bound renewables from below; 3 and 4 bound
    /// conventional generation from above.
    pub fn is_minimum_renewable(self) -> bool {
        self.family <= 2
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.slcr.letter())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let (Some(d), Some(l), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(Error::InvalidParameter(format!("variant must look like `1c`, got `{s}`")));
        };
        let family = d
            .to_digit(10)
            .ok_or_else(|| Error::InvalidParameter(format!("bad family in `{s}`")))?;
        Variant::new(family as u8, l.to_string().parse()?)
    }
}

impl From<Variant> for String {
    fn from(v: Variant) -> String {
        v.to_string()
    }
}

impl TryFrom<String> for Variant {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    RenewableShare,
    PotentialShare,
    CapacityTarget,
    CarbonCap,
    CarbonPrice,
    None,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::RenewableShare => "renewable_share",
            PolicyKind::PotentialShare => "potential_share",
            PolicyKind::CapacityTarget => "capacity_target",
            PolicyKind::CarbonCap => "carbon_cap",
            PolicyKind::CarbonPrice => "carbon_price",
            PolicyKind::None => "none",
        })
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "renewable_share" => PolicyKind::RenewableShare,
            "potential_share" => PolicyKind::PotentialShare,
            "capacity_target" => PolicyKind::CapacityTarget,
            "carbon_cap" => PolicyKind::CarbonCap,
            "carbon_price" => PolicyKind::CarbonPrice,
            "none" => PolicyKind::None,
            _ => return Err(Error::InvalidParameter(format!("unknown policy kind `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub family: u8,
    pub slcr: Slcr,
    pub phi: f64,
    /// Emission cap in tCO2; `+inf` disables the row.
    pub cap: f64,
    /// Carbon price in EUR/tCO2.
    pub price: f64,
    /// Minimum capacity in MW per renewable technology.
    pub capacity_targets: BTreeMap<String, f64>,
}

impl Default for PolicySpec {
    fn default() -> Self {
        Self {
            kind: PolicyKind::None,
            family: 1,
            slcr: Slcr::Complete,
            phi: 0.0,
            cap: f64::INFINITY,
            price: 0.0,
            capacity_targets: BTreeMap::new(),
        }
    }
}

impl PolicySpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn renewable_share(variant: Variant, phi: f64) -> Self {
        Self {
            kind: PolicyKind::RenewableShare,
            family: variant.family,
            slcr: variant.slcr,
            phi,
            ..Self::default()
        }
    }

    pub fn potential_share(phi: f64) -> Self {
        Self {
            kind: PolicyKind::PotentialShare,
            phi,
            ..Self::default()
        }
    }

    pub fn capacity_target(targets: BTreeMap<String, f64>) -> Self {
        Self {
            kind: PolicyKind::CapacityTarget,
            capacity_targets: targets,
            ..Self::default()
        }
    }

    pub fn carbon_cap(cap: f64) -> Self {
        Self {
            kind: PolicyKind::CarbonCap,
            cap,
            ..Self::default()
        }
    }

    pub fn carbon_price(price: f64) -> Self {
        Self {
            kind: PolicyKind::CarbonPrice,
            price,
            ..Self::default()
        }
    }

    /// The renewable-share variant, if this is a renewable-share policy.
    pub fn variant(&self) -> Option<Variant> {
        (self.kind == PolicyKind::RenewableShare).then_some(Variant {
            family: self.family,
            slcr: self.slcr,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub horizon: usize,
    pub demand: Vec<f64>,
    pub technologies: Vec<Technology>,
    pub storages: Vec<Storage>,
    pub policy: PolicySpec,
    pub wrap_storage_level: bool,
}

impl Scenario {
    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }

    pub fn technology(&self, name: &str) -> Option<&Technology> {
        self.technologies.iter().find(|t| t.name == name)
    }

    pub fn with_policy(&self, policy: PolicySpec) -> Scenario {
        Scenario {
            policy,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Checks every scenario invariant; an empty list means the scenario is valid.
pub fn validate_scenario(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code: &'static str, message: String| out.push(Violation { code, message });
    let t = s.horizon;

    if t < 2 {
        push("horizon_too_short", format!("horizon is {t} hours, need at least 2"));
    }
    if s.demand.len() != t {
        push(
            "series_length_mismatch",
            format!("demand has {} values for a {t}-hour horizon", s.demand.len()),
        );
    }
    if let Some((h, d)) = s.demand.iter().enumerate().find(|(_, d)| !(**d >= 0.0) || !d.is_finite()) {
        push("negative_demand", format!("demand[{h}] = {d}"));
    }
    if s.technologies.is_empty() {
        push("no_technology", "scenario has no generation technology".into());
    }

    let mut names = std::collections::HashSet::new();
    for tech in &s.technologies {
        if !names.insert(tech.name.as_str()) {
            push("duplicate_name", format!("technology `{}` appears twice", tech.name));
        }
        if tech.availability.len() != t {
            push(
                "series_length_mismatch",
                format!(
                    "availability of `{}` has {} values for a {t}-hour horizon",
                    tech.name,
                    tech.availability.len()
                ),
            );
        }
        if let Some((h, a)) = tech
            .availability
            .iter()
            .enumerate()
            .find(|(_, a)| !(0.0..=1.0).contains(*a))
        {
            push(
                "availability_out_of_range",
                format!("availability of `{}` at hour {h} is {a}", tech.name),
            );
        }
        for (what, v) in [
            ("capacity_cost", tech.capacity_cost),
            ("variable_cost", tech.variable_cost),
            ("curtailment_cost", tech.curtailment_cost),
            ("emission_factor", tech.emission_factor),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                push("negative_cost", format!("{what} of `{}` is {v}", tech.name));
            }
        }
    }

    for st in &s.storages {
        if !names.insert(st.name.as_str()) {
            push("duplicate_name", format!("`{}` appears twice", st.name));
        }
        for (what, v) in [
            ("charge_cost", st.charge_cost),
            ("discharge_cost", st.discharge_cost),
            ("energy_cost", st.energy_cost),
            ("var_charge_cost", st.var_charge_cost),
            ("var_discharge_cost", st.var_discharge_cost),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                push("negative_cost", format!("{what} of `{}` is {v}", st.name));
            }
        }
        for (what, v) in [("eta_in", st.eta_in), ("eta_out", st.eta_out)] {
            if !(v > 0.0 && v <= 1.0) {
                push("efficiency_out_of_range", format!("{what} of `{}` is {v}", st.name));
            }
        }
        if !(st.self_discharge > 0.0 && st.self_discharge <= 1.0) {
            push(
                "self_discharge_out_of_range",
                format!("self_discharge of `{}` is {}", st.name, st.self_discharge),
            );
        }
    }

    let p = &s.policy;
    match p.kind {
        PolicyKind::RenewableShare | PolicyKind::PotentialShare => {
            if !(0.0..=1.0).contains(&p.phi) {
                push("phi_out_of_range", format!("phi is {}", p.phi));
            }
            if p.kind == PolicyKind::RenewableShare && !(1..=4).contains(&p.family) {
                push("invalid_family", format!("family is {}", p.family));
            }
        }
        PolicyKind::CapacityTarget => {
            for (name, v) in &p.capacity_targets {
                match s.technology(name) {
                    None => push("unknown_technology", format!("capacity target for `{name}`")),
                    Some(tech) if !tech.is_renewable() => push(
                        "target_on_conventional",
                        format!("capacity target for conventional `{name}`"),
                    ),
                    _ => {}
                }
                if !(*v >= 0.0) || !v.is_finite() {
                    push("negative_target", format!("capacity target for `{name}` is {v}"));
                }
            }
        }
        PolicyKind::CarbonCap => {
            if !(p.cap >= 0.0) {
                push("negative_cap", format!("carbon cap is {}", p.cap));
            }
        }
        PolicyKind::CarbonPrice => {
            if !(p.price >= 0.0) || !p.price.is_finite() {
                push("negative_price", format!("carbon price is {}", p.price));
            }
        }
        PolicyKind::None => {}
    }
    out
}

/// Annualized capacity cost in EUR/MW-year from overnight cost (EUR/kW),
/// lifetime (years), interest rate and fixed O&M (EUR/kW-year).
pub fn annualize(overnight: f64, lifetime: f64, rate: f64, fixed_om: f64) -> Result<f64> {
    if !(lifetime > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lifetime must be positive, got {lifetime}"
        )));
    }
    if !(rate >= 0.0) {
        return Err(Error::InvalidParameter(format!("rate must be >= 0, got {rate}")));
    }
    let af = if rate == 0.0 {
        1.0 / lifetime
    } else {
        rate / (1.0 - (1.0 + rate).powf(-lifetime))
    };
    Ok(1000.0 * (overnight * af + fixed_om))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_hour() -> Scenario {
        Scenario {
            horizon: 2,
            demand: vec![10.0, 20.0],
            technologies: vec![
                Technology::conventional("gas", 5.0, 50.0, 0.4, 2),
                Technology::renewable("pv", 3.0, 0.0, vec![0.2, 0.9]),
            ],
            storages: vec![STORAGE_DEFAULT.build("sto", 2)],
            policy: PolicySpec::none(),
            wrap_storage_level: true,
        }
    }

    #[test]
    fn well_formed_scenario_has_no_violations() {
        assert!(validate_scenario(&two_hour()).is_empty());
    }

    #[test]
    fn availability_above_one_is_flagged() {
        let mut s = two_hour();
        s.technologies[1].availability[0] = 1.3;
        let v = validate_scenario(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, "availability_out_of_range");
    }

    #[test]
    fn short_demand_is_flagged() {
        let mut s = two_hour();
        s.horizon = 8;
        s.demand = vec![1.0; 5];
        for t in &mut s.technologies {
            t.availability = vec![0.5; 8];
        }
        let codes: Vec<_> = validate_scenario(&s).iter().map(|v| v.code).collect();
        assert_eq!(codes, ["series_length_mismatch"]);
    }

    #[test]
    fn capacity_target_checks() {
        let mut s = two_hour();
        s.policy = PolicySpec::capacity_target([("gas".to_string(), 5.0)].into());
        assert_eq!(validate_scenario(&s)[0].code, "target_on_conventional");
        s.policy = PolicySpec::capacity_target([("nuclear".to_string(), 5.0)].into());
        assert_eq!(validate_scenario(&s)[0].code, "unknown_technology");
    }

    #[test]
    fn annualize_examples() {
        assert!((annualize(1300.0, 25.0, 0.0, 25.0).unwrap() - 77_000.0).abs() < 1e-9);
        assert!((annualize(400.0, 1.0, 0.0, 0.0).unwrap() - 400_000.0).abs() < 1e-9);
        let v = annualize(1000.0, 20.0, 0.05, 20.0).unwrap();
        assert!((v - 100_242.6).abs() < 0.1, "{v}");
        assert!(annualize(1.0, 0.0, 0.05, 0.0).is_err());
    }

    #[test]
    fn variant_labels_round_trip() {
        let all = Variant::all();
        assert_eq!(all.len(), 12);
        for v in all {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
        assert!("5a".parse::<Variant>().is_err());
        assert!("1d".parse::<Variant>().is_err());
    }
}
