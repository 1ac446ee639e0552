//! Default parameterization: a stylized German power sector with coal, OCGT,
//! PV, wind and a pumped-hydro-like storage.

use super::{synth_profiles, annualize, PolicySpec, Scenario, Storage, TechClass, Technology};
use crate::error::Result;

pub const HOURS_PER_YEAR: f64 = 8760.0;
pub const ANNUAL_DEMAND_MWH: f64 = 520e6;
pub const DESK_HORIZON: usize = 672;
pub const DEFAULT_RATE: f64 = 0.04;
pub const DEFAULT_SEED: u64 = 42;

/// Relative amplitude of the diurnal demand ripple.
const DEMAND_RIPPLE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TechAssumption {
    pub name: &'static str,
    pub class: TechClass,
    /// EUR/kW.
    pub overnight: f64,
    /// EUR/kW-year.
    pub fixed_om: f64,
    pub lifetime: f64,
    pub variable_cost: f64,
    pub emission_factor: f64,
}

impl TechAssumption {
    /// Annualized cost in EUR/MW-year.
    pub fn annual_cost(&self, rate: f64) -> Result<f64> {
        annualize(self.overnight, self.lifetime, rate, self.fixed_om)
    }
}

pub const TECH_DEFAULTS: [TechAssumption; 4] = [
    TechAssumption {
        name: "coal",
        class: TechClass::Conventional,
        overnight: 1300.0,
        fixed_om: 25.0,
        lifetime: 40.0,
        variable_cost: 21.55,
        emission_factor: 0.9,
    },
    TechAssumption {
        name: "ocgt",
        class: TechClass::Conventional,
        overnight: 400.0,
        fixed_om: 1.5,
        lifetime: 30.0,
        variable_cost: 76.34,
        emission_factor: 0.4,
    },
    TechAssumption {
        name: "pv",
        class: TechClass::Renewable,
        overnight: 390.0,
        fixed_om: 10.6,
        lifetime: 25.0,
        variable_cost: 0.0,
        emission_factor: 0.0,
    },
    TechAssumption {
        name: "wind",
        class: TechClass::Renewable,
        overnight: 1000.0,
        fixed_om: 20.0,
        lifetime: 25.0,
        variable_cost: 0.0,
        emission_factor: 0.0,
    },
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageAssumption {
    /// Charging power, EUR/MW-year (taken as already annualized).
    pub charge_cost: f64,
    /// Discharging power, EUR/MW-year (taken as already annualized).
    pub discharge_cost: f64,
    /// Energy capacity overnight cost, EUR/kWh.
    pub energy_overnight: f64,
    pub lifetime: f64,
    pub var_charge_cost: f64,
    pub var_discharge_cost: f64,
    pub round_trip: f64,
}

pub const STORAGE_DEFAULT: StorageAssumption = StorageAssumption {
    charge_cost: 1100.0,
    discharge_cost: 1100.0,
    energy_overnight: 80.0,
    lifetime: 50.0,
    var_charge_cost: 0.5,
    var_discharge_cost: 0.5,
    round_trip: 0.8,
};

impl StorageAssumption {
    /// Storage with costs annualized at `rate` and scaled to `horizon` hours.
    pub fn build_with(&self, name: &str, rate: f64, horizon: usize) -> Result<Storage> {
        let energy = annualize(self.energy_overnight, self.lifetime, rate, 0.0)?;
        let eta = self.round_trip.sqrt();
        Ok(Storage {
            name: name.to_string(),
            charge_cost: scale_to_horizon(self.charge_cost, horizon),
            discharge_cost: scale_to_horizon(self.discharge_cost, horizon),
            energy_cost: scale_to_horizon(energy, horizon),
            var_charge_cost: self.var_charge_cost,
            var_discharge_cost: self.var_discharge_cost,
            eta_in: eta,
            eta_out: eta,
            self_discharge: 1.0,
        })
    }

    pub fn build(&self, name: &str, horizon: usize) -> Storage {
        self.build_with(name, DEFAULT_RATE, horizon)
            .expect("default storage lifetime is positive")
    }
}

pub fn technology_defaults(name: &str) -> Option<&'static TechAssumption> {
    TECH_DEFAULTS.iter().find(|t| t.name == name)
}

pub fn storage_defaults() -> &'static StorageAssumption {
    &STORAGE_DEFAULT
}

/// Scales an annual cost to a horizon of `horizon` hours.
pub fn scale_to_horizon(annual: f64, horizon: usize) -> f64 {
    annual * horizon as f64 / HOURS_PER_YEAR
}

/// Flat demand with a diurnal ripple peaking early afternoon, scaled so the
/// horizon total is the annual demand times `horizon / 8760`.
pub fn default_demand(horizon: usize) -> Vec<f64> {
    let shape: Vec<f64> = (0..horizon)
        .map(|t| {
            let h = (t % 24) as f64;
            1.0 + DEMAND_RIPPLE * (2.0 * std::f64::consts::PI * (h - 7.0) / 24.0).sin()
        })
        .collect();
    let total = ANNUAL_DEMAND_MWH * horizon as f64 / HOURS_PER_YEAR;
    let sum: f64 = shape.iter().sum();
    shape.into_iter().map(|s| s * total / sum).collect()
}

/// The default scenario: four technologies at the default costs, one
/// storage, synthetic PV/wind profiles from `seed`.
pub fn desk_scenario(horizon: usize, seed: u64, policy: PolicySpec) -> Result<Scenario> {
    let profiles = synth_profiles(seed, horizon)?;
    let mut technologies = Vec::new();
    for a in &TECH_DEFAULTS {
        let cost = scale_to_horizon(a.annual_cost(DEFAULT_RATE)?, horizon);
        let tech = match a.class {
            TechClass::Conventional => {
                Technology::conventional(a.name, cost, a.variable_cost, a.emission_factor, horizon)
            }
            TechClass::Renewable => {
                let avail = if a.name == "pv" {
                    profiles.pv.clone()
                } else {
                    profiles.wind.clone()
                };
                Technology::renewable(a.name, cost, a.variable_cost, avail)
            }
        };
        technologies.push(tech);
    }
    Ok(Scenario {
        horizon,
        demand: default_demand(horizon),
        technologies,
        storages: vec![STORAGE_DEFAULT.build("storage", horizon)],
        policy,
        wrap_storage_level: true,
    })
}
