use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use usc_lab_core::analysis::{decompose_cycling, reported_share, rldc};
use usc_lab_core::lp::RevisedSimplex;
use usc_lab_core::model::{annualize, synth_profiles};
use usc_lab_core::{
    solve_scenario, ModelRun, PolicySpec, Scenario, Slcr, SolverOptions, Storage, Technology,
    Variant,
};

fn tiny(seed: u64, policy: Option<PolicySpec>) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = rng.random_range(3..=10);
    let demand = (0..horizon).map(|_| rng.random_range(10.0..100.0)).collect();
    let avail = (0..horizon)
        .map(|t| if t % 3 == 0 { 0.0 } else { rng.random_range(0.2..1.0) })
        .collect();
    let mut st = Storage {
        name: "s".into(),
        charge_cost: rng.random_range(0.5..3.0),
        discharge_cost: rng.random_range(0.5..3.0),
        energy_cost: rng.random_range(0.1..2.0),
        var_charge_cost: 0.5,
        var_discharge_cost: 0.5,
        eta_in: 1.0,
        eta_out: 1.0,
        self_discharge: 1.0,
    };
    st.set_round_trip(rng.random_range(0.6..0.95));
    let phi = rng.random_range(0.2..0.9);
    Scenario {
        horizon,
        demand,
        technologies: vec![
            Technology::conventional("gas", rng.random_range(5.0..20.0), rng.random_range(30.0..80.0), 0.4, horizon),
            Technology::renewable("pv", rng.random_range(5.0..30.0), 0.0, avail),
        ],
        storages: vec![st],
        policy: policy.unwrap_or_else(|| {
            PolicySpec::renewable_share(Variant::all()[rng.random_range(0..12)], phi)
        }),
        wrap_storage_level: true,
    }
}

fn solve(s: &Scenario) -> ModelRun {
    let run = solve_scenario(s, &RevisedSimplex::new(SolverOptions::default())).unwrap();
    assert!(run.is_optimal());
    run
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn decomposition_reconstructs_flows(c in 0.0f64..1e4, d in 0.0f64..1e4, eta in 0.05f64..=1.0) {
        let e = decompose_cycling(c, d, eta).unwrap();
        let u = c.min(d);
        prop_assert!(e.spc >= 0.0 && e.apc >= -1e-12 && e.unintended_discharge >= 0.0);
        prop_assert!(close(e.spc + e.intended_charge, c, 1e-12));
        prop_assert!(close(e.unintended_discharge + e.intended_discharge, d, 1e-12));
        prop_assert!(close(e.unintended_losses, u * (1.0 / eta - 1.0), 1e-12));
        // The unintended charge (SPC + APC) refills exactly what was discharged, plus losses.
        prop_assert!(close((e.spc + e.apc) * eta, u, 1e-12));
        prop_assert!(close(e.total_unintended(), e.spc + e.apc + e.unintended_discharge, 1e-12));
        prop_assert!(e.cycling_type <= 4);
        prop_assert_eq!(e.cycling_type == 0, u <= 1e-6);
    }

    #[test]
    fn annualize_is_monotone(overnight in 1.0f64..5000.0, life in 1.0f64..80.0, rate in 0.0f64..0.2, om in 0.0f64..50.0) {
        let a = annualize(overnight, life, rate, om).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!(annualize(overnight, life, rate + 0.01, om).unwrap() > a);
        prop_assert!(annualize(overnight, life + 1.0, rate, om).unwrap() < a);
        prop_assert!(annualize(overnight * 2.0, life, rate, om).unwrap() > a);
        // Never below straight-line depreciation.
        prop_assert!(a >= (overnight / life + om) * 1e3 * (1.0 - 1e-12));
    }

    #[test]
    fn profiles_are_availabilities(seed in any::<u64>(), horizon in 24usize..400) {
        let p = synth_profiles(seed, horizon).unwrap();
        prop_assert_eq!(p.pv.len(), horizon);
        prop_assert!(p.pv.iter().chain(&p.wind).all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(p, synth_profiles(seed, horizon).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// All four families report the same share for a given loss coverage,
    /// because generation equals demand plus storage losses.
    #[test]
    fn reported_share_agrees_across_families(seed in any::<u64>()) {
        let run = solve(&tiny(seed, None));
        for slcr in Slcr::ALL {
            let base = reported_share(&run, Variant::new(1, slcr).unwrap());
            for f in 2..=4 {
                let v = reported_share(&run, Variant::new(f, slcr).unwrap());
                prop_assert!(close(base, v, 1e-9), "{}{}: {} vs {}", f, slcr.letter(), v, base);
            }
        }
    }

    /// The policy is met at the reported share of its own variant.
    #[test]
    fn own_reported_share_meets_target(seed in any::<u64>()) {
        let s = tiny(seed, None);
        let run = solve(&s);
        let v = s.policy.variant().unwrap();
        prop_assert!(reported_share(&run, v) >= s.policy.phi - 1e-7);
    }

    /// Scaling all costs scales the optimal objective.
    #[test]
    fn cost_scaling(seed in any::<u64>(), k in 0.1f64..10.0) {
        let s = tiny(seed, None);
        let mut t = s.clone();
        for tech in &mut t.technologies {
            tech.capacity_cost *= k;
            tech.variable_cost *= k;
            tech.curtailment_cost *= k;
        }
        for st in &mut t.storages {
            st.charge_cost *= k;
            st.discharge_cost *= k;
            st.energy_cost *= k;
            st.var_charge_cost *= k;
            st.var_discharge_cost *= k;
        }
        let (a, b) = (solve(&s), solve(&t));
        prop_assert!(close(b.solution.objective, k * a.solution.objective, 1e-8));
    }

    /// RLDC curves are sorted; curtailment only raises the residual load,
    /// and the final curve is conventional generation.
    #[test]
    fn rldc_properties(seed in any::<u64>()) {
        let run = solve(&tiny(seed, None));
        let r = rldc(&run);
        for curve in [&r.raw, &r.after_curtailment, &r.after_storage] {
            prop_assert!(curve.windows(2).all(|w| w[0] >= w[1]));
        }
        prop_assert!(r.raw.iter().zip(&r.after_curtailment).all(|(a, b)| b >= &(a - 1e-9)));
        let mut conv: Vec<f64> = run.series(&run.layout.techs[0].generation);
        conv.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in conv.iter().zip(&r.after_storage) {
            prop_assert!(close(*a, *b, 1e-7));
        }
        let extra: f64 = r.after_storage.iter().sum::<f64>() - r.after_curtailment.iter().sum::<f64>();
        prop_assert!(close(extra, run.storage_losses(), 1e-7));
    }
}
