//! Benchmark fixtures.

use usc_lab_core::model::{desk_scenario, DEFAULT_SEED};
use usc_lab_core::{PolicySpec, Scenario, Slcr, Variant};

/// The default scenario at `horizon` hours under the 1a or 1c policy at φ = 0.8.
pub fn scenario(horizon: usize, slcr: Slcr) -> Scenario {
    let v = Variant::new(1, slcr).expect("family 1");
    desk_scenario(horizon, DEFAULT_SEED, PolicySpec::renewable_share(v, 0.8)).expect("default scenario")
}
