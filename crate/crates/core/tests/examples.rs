mod rayleigh_ensemble {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rayleigh_ensemble.rs"));
}

#[test]
fn rayleigh_ensemble_runs() {
    rayleigh_ensemble::run_example().expect("rayleigh_ensemble example should run");
}

mod closed_form_allocations {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/closed_form_allocations.rs"));
}

#[test]
fn closed_form_allocations_runs() {
    closed_form_allocations::run_example().expect("closed_form_allocations example should run");
}

mod dual_search {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dual_search.rs"));
}

#[test]
fn dual_search_runs() {
    dual_search::run_example().expect("dual_search example should run");
}

mod case_regions {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/case_regions.rs"));
}

#[test]
fn case_regions_runs() {
    case_regions::run_example().expect("case_regions example should run");
}

mod rate_curves {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rate_curves.rs"));
}

#[test]
fn rate_curves_runs() {
    rate_curves::run_example().expect("rate_curves example should run");
}

mod correlation_comparison {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/correlation_comparison.rs"));
}

#[test]
fn correlation_comparison_runs() {
    correlation_comparison::run_example().expect("correlation_comparison example should run");
}

mod oracle_cross_check {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/oracle_cross_check.rs"));
}

#[test]
fn oracle_cross_check_runs() {
    oracle_cross_check::run_example().expect("oracle_cross_check example should run");
}

mod parallel_relay {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/parallel_relay.rs"));
}

#[test]
fn parallel_relay_runs() {
    parallel_relay::run_example().expect("parallel_relay example should run");
}
