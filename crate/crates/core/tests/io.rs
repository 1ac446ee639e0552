use std::fs;

use usc_lab_core::analysis::CyclingReport;
use usc_lab_core::io::{load_config, read_columns, round12, write_cycling_csv, write_results};
use usc_lab_core::lp::RevisedSimplex;
use usc_lab_core::solve_scenario;

const CONFIG: &str = r#"
[scenario]
horizon = 48
seed = 11

[technology.coal]
[technology.pv]

[storage.battery]
round_trip = 0.7

[policy]
family = 2
slcr = "b"
phi = 0.5
"#;

#[test]
fn dispatch_round_trips_at_twelve_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let (s, rc) = load_config(&cfg).unwrap();
    assert_eq!(s.storages.len(), 1);
    assert!((s.storages[0].round_trip() - 0.7).abs() < 1e-12);
    let run = solve_scenario(&s, &RevisedSimplex::new(rc.solver)).unwrap();
    let out = tmp.path().join("out");
    write_results(&run, &out).unwrap();

    let cols = read_columns(&out.join("dispatch.csv"), &["G[pv]", "in[battery]", "price"]).unwrap();
    let pv = run.series(&run.layout.tech("pv").unwrap().generation);
    let charge = run.series(&run.layout.storages[0].charge);
    let prices = run.prices();
    for t in 0..48 {
        assert_eq!(cols["G[pv]"][t].to_bits(), round12(pv[t]).to_bits());
        assert_eq!(cols["in[battery]"][t].to_bits(), round12(charge[t]).to_bits());
        assert_eq!(cols["price"][t].to_bits(), round12(prices[t]).to_bits());
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert!(json["metrics"]["reported_share"]["2b"].as_f64().unwrap() >= 0.5 - 1e-9);
    let rldc = fs::read_to_string(out.join("rldc.csv")).unwrap();
    assert!(rldc.starts_with("schema_version,rank,raw,after_curtailment,after_storage\n"));
    assert_eq!(rldc.lines().count(), 49);
}

#[test]
fn omitted_storage_gives_empty_list() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "[scenario]\nhorizon = 24\n[technology.coal]\n").unwrap();
    let (s, _) = load_config(&cfg).unwrap();
    assert!(s.storages.is_empty());
    assert!(s.policy.variant().is_none());
}

#[test]
fn bad_availability_column_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("p.csv"), "t,pv,wind\n0,0.2,1.5\n1,0.1,0.3\n").unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(
        &cfg,
        "[scenario]\nhorizon = 2\nprofiles_csv = \"p.csv\"\n[technology.coal]\n[technology.wind]\n",
    )
    .unwrap();
    let err = load_config(&cfg).unwrap_err().to_string();
    assert!(err.contains("p.csv") && err.contains("`wind`") && err.contains("line 2"), "{err}");
}

#[test]
fn empty_cycling_report_is_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("cycling.csv");
    write_cycling_csv(&CyclingReport::default(), &p).unwrap();
    let text = fs::read_to_string(p).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("schema_version,storage,t,"));
}
