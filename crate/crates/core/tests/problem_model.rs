use std::f64::consts::PI;
use std::sync::Arc;

use evlab::catalog::{builtin_catalog, catalog_entries, Params};
use evlab::problem::Convexity;
use evlab::{
    detect_affine_interval, validate_assumptions, Assumption, DiffusionModel, Domain, FluxModel, InitialData,
    ProblemSpec, Status,
};

fn sine_spec(flux: FluxModel, diffusion: DiffusionModel) -> ProblemSpec {
    ProblemSpec::new("test", flux, diffusion, InitialData::sine(1.0), Domain::torus()).unwrap()
}

#[test]
fn burgers_satisfies_every_assumption() {
    let spec = sine_spec(FluxModel::burgers(), DiffusionModel::none());
    let report = validate_assumptions(&spec, &Assumption::all()).unwrap();
    assert_eq!(report.satisfied(), Assumption::all(), "{}", report.summary());
}

#[test]
fn oscillating_linear_flux_violates_coercivity() {
    let flux = FluxModel::new(
        "sin(2 pi x) u",
        Arc::new(|x, u| (2.0 * PI * x).sin() * u),
        Arc::new(|x, _| (2.0 * PI * x).sin()),
        Arc::new(|x, u| 2.0 * PI * (2.0 * PI * x).cos() * u),
    );
    let spec = sine_spec(flux, DiffusionModel::none());
    let report = validate_assumptions(&spec, &[Assumption::A1].into_iter().collect()).unwrap();
    let check = &report.checks[0];
    assert_eq!(check.status, Status::Violated);
    assert!(check.witness.is_some());

    // independent evaluation: inf_x ½f² − (‖α‖+‖β′‖+1)|f_x u| on a grid never grows with |u|
    let g = |u: f64| {
        (0..=1000)
            .map(|k| {
                let x = k as f64 / 1000.0;
                let f = (2.0 * PI * x).sin() * u;
                0.5 * f * f - (2.0 * PI * (2.0 * PI * x).cos() * u * u).abs()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let values: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&u| g(u)).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0]), "{values:?}");
}

#[test]
fn decreasing_beta_violates_monotonicity() {
    let diffusion = DiffusionModel::none().with_beta(|u| -u, |_| -1.0);
    let spec = sine_spec(FluxModel::burgers(), diffusion);
    let report = validate_assumptions(&spec, &[Assumption::A4].into_iter().collect()).unwrap();
    assert_eq!(report.checks[0].status, Status::Violated);
    assert!(report.checks[0].witness.and_then(|w| w.u).is_some());
}

#[test]
fn every_verdict_carries_a_witness_or_budget() {
    for e in catalog_entries() {
        let spec = builtin_catalog(e.name, &Params::new()).unwrap();
        let report = validate_assumptions(&spec, &Assumption::all()).unwrap();
        assert_eq!(report.checks.len(), 8);
        for c in &report.checks {
            assert!(c.witness.is_some() || c.samples > 0, "{} {:?}", e.name, c.assumption);
            if c.status == Status::Violated {
                assert!(c.witness.is_some(), "{} {:?}", e.name, c.assumption);
            }
        }
    }
}

#[test]
fn catalog_instances_have_the_documented_structure() {
    let burgers = builtin_catalog("burgers", &Params::new()).unwrap();
    assert!(burgers.flux.x_independent);
    assert_eq!(burgers.flux.convexity, Convexity::StrictlyConvex);

    let flat = builtin_catalog("flat-middle-flux", &Params::new()).unwrap();
    let i = detect_affine_interval(&flat.flux, &flat.diffusion, flat.working_range, 1e-9).unwrap();
    assert!((i.a + 1.0).abs() < 1e-6 && (i.b - 1.0).abs() < 1e-6);
    assert!((i.d - 2.0).abs() < 1e-9);

    let xdep = builtin_catalog("x-dependent-convex", &Params::new()).unwrap();
    let report = validate_assumptions(&xdep, &Assumption::all()).unwrap();
    assert_eq!(report.status(Assumption::A6), Some(Status::Satisfied));
    assert_eq!(report.status(Assumption::A8), Some(Status::Satisfied));
    assert!(!xdep.flux.x_independent);
}

#[test]
fn pure_flat_flux_has_zero_drift() {
    let flux = FluxModel::autonomous(
        "flat",
        |u: f64| (u.abs() - 1.0).max(0.0).powi(2),
        |u: f64| 2.0 * u.signum() * (u.abs() - 1.0).max(0.0),
    );
    let i = detect_affine_interval(&flux, &DiffusionModel::none(), (-2.0, 2.0), 1e-9).unwrap();
    assert!((i.a + 1.0).abs() < 1e-6 && (i.b - 1.0).abs() < 1e-6);
    assert!(i.d.abs() < 1e-9);
    assert_eq!(i.c2, 0.0);
    assert!(!i.degenerate);
}

#[test]
fn range_padding_survives_new_initial_data() {
    let xdep = builtin_catalog("x-dependent-convex", &Params::new()).unwrap();
    let pad = xdep.range_padding;
    assert!(pad > 0.0);
    let swapped = xdep.with_initial(InitialData::Constant { value: 0.0 });
    assert_eq!(swapped.working_range, (-1.0 - pad, 1.0 + pad));
}
