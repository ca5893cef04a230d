use otsfd::harness::{run_study, StudyConfig};
use otsfd::solvers_1d::{SchemeVariant, StartProcedure};
use otsfd::experiments::RunOptions;

fn kpy_order(start: StartProcedure, resolutions: Vec<usize>) -> f64 {
    let mut cfg = StudyConfig::new("wave-1d-kpy", SchemeVariant::OTS_NIDC)
        .unwrap()
        .with_options(RunOptions { start, ..RunOptions::default() });
    cfg.resolutions = resolutions;
    let report = run_study(&cfg).unwrap();
    assert_eq!(report.failures().count(), 0);
    report.order().unwrap()
}

#[test]
fn exact_start_matches_fifth_order_start() {
    let ns = vec![160, 320, 640];
    let exact = kpy_order(StartProcedure::Exact, ns.clone());
    let taylor = kpy_order(StartProcedure::Taylor(5), ns);
    assert!((exact - taylor).abs() <= 1e-2, "exact {exact}, fifth-order {taylor}");
}

#[test]
fn third_order_start_costs_an_order() {
    let ns = vec![20, 40, 80, 160];
    let third = kpy_order(StartProcedure::Taylor(3), ns.clone());
    let fifth = kpy_order(StartProcedure::Taylor(5), ns);
    assert!(fifth - third >= 0.7, "third {third}, fifth {fifth}");
}
