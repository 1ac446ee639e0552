//! Synthetic availability profiles standing in for measured weather data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profiles {
    pub pv: Vec<f64>,
    pub wind: Vec<f64>,
}

// Calibrated to German-like capacity factors: about 11% for PV and 27% for
// onshore wind.
const PV_MEAN_AMPLITUDE: f64 = 0.35;
const PV_AMPLITUDE_SD: f64 = 0.15;
const WIND_MEAN: f64 = 0.25;
const WIND_SCALE: f64 = 0.2;
const WIND_PERSISTENCE: f64 = 0.97;

/// Hourly PV and wind availability for `horizon` hours, starting at midnight.
///
/// PV follows a half-sine between 06:00 and 18:00 whose peak varies from day
/// to day; wind is an AR(1) process around a fixed mean. Both are clipped to
/// `[0, 1]`. The same seed always yields the same series.
pub fn synth_profiles(seed: u64, horizon: usize) -> Result<Profiles> {
    if horizon < 24 {
        return Err(Error::InvalidParameter(format!(
            "profiles need at least 24 hours, got {horizon}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");

    let mut pv = Vec::with_capacity(horizon);
    let mut amplitude = 0.0;
    for t in 0..horizon {
        if t % 24 == 0 {
            let a = PV_MEAN_AMPLITUDE + PV_AMPLITUDE_SD * std_normal.sample(&mut rng);
            amplitude = a.clamp(0.05, 1.0);
        }
        pv.push((amplitude * sun_elevation(t % 24)).clamp(0.0, 1.0));
    }

    let innovation = (1.0 - WIND_PERSISTENCE * WIND_PERSISTENCE).sqrt();
    let mut z: f64 = std_normal.sample(&mut rng);
    let mut wind = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        wind.push((WIND_MEAN + WIND_SCALE * z).clamp(0.0, 1.0));
        z = WIND_PERSISTENCE * z + innovation * std_normal.sample(&mut rng);
    }
    Ok(Profiles { pv, wind })
}

/// Normalized sun elevation for the hour starting at `hour` (0 at night).
fn sun_elevation(hour: usize) -> f64 {
    let h = hour as f64 + 0.5;
    if (6.0..18.0).contains(&h) {
        (std::f64::consts::PI * (h - 6.0) / 12.0).sin()
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn night_hours_are_dark() {
        let p = synth_profiles(42, 48).unwrap();
        for t in 0..48 {
            if sun_elevation(t % 24) == 0.0 {
                assert_eq!(p.pv[t], 0.0, "hour {t}");
            }
        }
        assert!(p.pv[12] > 0.0);
    }

    #[test]
    fn full_year_is_clipped_and_deterministic() {
        let a = synth_profiles(42, 8760).unwrap();
        let b = synth_profiles(42, 8760).unwrap();
        assert_eq!(a, b);
        assert!(a.pv.iter().chain(&a.wind).all(|v| (0.0..=1.0).contains(v)));
        let other = synth_profiles(43, 8760).unwrap();
        assert_ne!(a.wind, other.wind);
    }

    #[test]
    fn short_horizon_is_rejected() {
        assert!(synth_profiles(1, 23).is_err());
    }
}
