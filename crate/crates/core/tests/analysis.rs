use evlab::analysis::entropy::audit_entropy_inequality;
use evlab::analysis::equivalence::{check_equivalence, EquivalenceConfig};
use evlab::analysis::flux_bound::run_flux_bound;
use evlab::analysis::lipschitz::run_lipschitz;
use evlab::analysis::longtime::{hj_longtime, HjLongtimeOptions};
use evlab::analysis::viscosity::vanishing_viscosity_convergence;
use evlab::analysis::Verdict;
use evlab::catalog::{builtin_catalog, Params};
use evlab::cl::{self, SchemeConfig, Theta, Trajectory};
use evlab::hj::{self, HjSchemeConfig};
use evlab::transforms::l1_norm;
use evlab::{Error, Grid, InitialData, ProblemSpec};

fn params(list: &[(&str, f64)]) -> Params {
    list.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn burgers_with(u0: InitialData) -> ProblemSpec {
    builtin_catalog("burgers", &Params::new()).unwrap().with_initial(u0)
}

#[test]
fn linear_advection_equivalence_is_exact_with_matched_dissipation() {
    // for linear f the Lax–Friedrichs flux and Hamiltonian coincide, so u = Dv to rounding
    let spec = builtin_catalog("linear-advection", &params(&[("speed", 0.7)])).unwrap();
    let config = EquivalenceConfig {
        cl: SchemeConfig::default().with_flux(cl::FluxScheme::LaxFriedrichs(Theta::Fixed(1.0))),
        hj: HjSchemeConfig::default().with_theta(Theta::Fixed(1.0)),
        ..EquivalenceConfig::default()
    };
    let report = check_equivalence(&spec, &config, 0.5, &[64, 128]).unwrap();
    assert!(report.exact);
    assert_eq!(report.verdict, Verdict::Pass);
    for level in &report.levels {
        for s in &level.samples {
            assert!(s.l1 <= 1e-10 && s.linf <= 1e-10, "{s:?}");
        }
    }
}

#[test]
fn constant_data_has_no_equivalence_defect() {
    let spec = burgers_with(InitialData::Constant { value: 0.5 });
    let report = check_equivalence(&spec, &EquivalenceConfig::default(), 0.25, &[32, 64]).unwrap();
    assert!(report.exact);
    for level in &report.levels {
        assert!(level.final_defects().l1 <= 1e-12, "{:?}", level.final_defects());
    }
}

#[test]
fn entropy_residual_vanishes_for_constant_states() {
    let spec = burgers_with(InitialData::Constant { value: 0.5 });
    let run = cl::record_cl(&spec, &SchemeConfig::default(), Grid::periodic(32).unwrap(), 0.1).unwrap();
    let audit = audit_entropy_inequality(&run, &spec, &[-1.0, 0.25, 0.5, 2.0], 1.0).unwrap();
    assert_eq!(audit.worst.worst, 0.0);
    assert_eq!(audit.verdict, Verdict::Pass);
}

#[test]
fn levels_outside_the_range_reduce_to_conservation() {
    let spec = builtin_catalog("burgers", &Params::new()).unwrap();
    let run = cl::record_cl(&spec, &SchemeConfig::default(), Grid::periodic(64).unwrap(), 0.3).unwrap();
    let audit = audit_entropy_inequality(&run, &spec, &[-5.0, 5.0], 0.0).unwrap();
    assert!(audit.worst.worst.abs() <= 1e-12, "{:?}", audit.worst);
}

#[test]
fn truncated_trajectory_is_rejected() {
    let spec = builtin_catalog("burgers", &Params::new()).unwrap();
    let mut run: Trajectory = cl::record_cl(&spec, &SchemeConfig::default(), Grid::periodic(16).unwrap(), 0.05).unwrap();
    run.dts.pop();
    let err = audit_entropy_inequality(&run, &spec, &[0.0], 1.0).unwrap_err();
    assert!(matches!(err, Error::MissingDt { .. }), "{err}");
}

#[test]
fn flux_bound_series_behaves_as_expected() {
    let grid = Grid::periodic(128).unwrap();
    let cfg = SchemeConfig::default();

    let flat = burgers_with(InitialData::Constant { value: 0.5 });
    let audit = run_flux_bound(&flat, &cfg, grid, 0.2, 4, 1.0).unwrap();
    assert!(audit.max_w.iter().all(|&w| w == audit.initial), "{:?}", audit.max_w);

    let heat = builtin_catalog("heat", &params(&[("alpha", 0.1)])).unwrap();
    let audit = run_flux_bound(&heat, &cfg, grid, 0.5, 5, 1.0).unwrap();
    assert!(audit.max_w.windows(2).all(|w| w[1] <= w[0]), "{:?}", audit.max_w);
    assert!(*audit.max_w.last().unwrap() < 0.5 * audit.initial);

    // the shock forms at t = 1/(2π) and the bound still holds across it
    let burgers = builtin_catalog("burgers", &Params::new()).unwrap();
    let audit = run_flux_bound(&burgers, &cfg, grid, 0.5, 10, 1.0).unwrap();
    assert_eq!(audit.verdict, Verdict::Pass, "{:?}", audit.max_w);
}

#[test]
fn zero_primitive_has_zero_lipschitz_constants() {
    let spec = burgers_with(InitialData::Constant { value: 0.0 });
    let audit = run_lipschitz(
        &spec,
        &HjSchemeConfig::default(),
        Grid::periodic(128).unwrap(),
        &[0.02, 0.01],
        0.1,
        &[0.05],
    )
    .unwrap();
    for e in &audit.entries {
        assert_eq!(e.max_slope, 0.0);
        assert_eq!(e.max_rate, 0.0);
    }
    assert_eq!(audit.slope_bound, 0.0);
    assert_eq!(audit.rate_bound, 0.0);
}

#[test]
fn zero_data_is_its_own_traveling_profile() {
    let spec = burgers_with(InitialData::Constant { value: 0.0 });
    let times: Vec<f64> = (1..=4).map(|k| 0.5 * k as f64).collect();
    let report = hj_longtime(
        &spec,
        &HjSchemeConfig::default(),
        Grid::periodic(64).unwrap(),
        2.0,
        &times,
        &HjLongtimeOptions::default(),
    )
    .unwrap();
    assert_eq!(report.oscillation, 0.0);
    assert!(report.residuals.iter().all(|&r| r == 0.0), "{:?}", report.residuals);
    assert_eq!(report.verdict, Verdict::Pass);
}

#[test]
fn burgers_sawtooth_decays_like_one_over_four_t() {
    // a unit-period sawtooth of slope 1/t has L¹ norm 1/(4t)
    let spec = builtin_catalog("burgers", &Params::new()).unwrap();
    let times = [5.0, 10.0, 20.0];
    let snaps = cl::solve_cl(&spec, &SchemeConfig::default(), Grid::periodic(256).unwrap(), 20.0, &times).unwrap();
    for (s, t) in snaps.iter().zip(times) {
        let scaled = 4.0 * t * l1_norm(s);
        assert!((scaled - 1.0).abs() < 0.05, "t = {t}: 4t·L1 = {scaled}");
    }
}

#[test]
fn constant_data_has_no_viscous_correction() {
    let spec = burgers_with(InitialData::Constant { value: 0.5 });
    let report = vanishing_viscosity_convergence(
        &spec,
        &SchemeConfig::default(),
        Grid::periodic(1024).unwrap(),
        &[0.02, 0.01, 0.005],
        0.05,
        (0.5, 1.5),
    )
    .unwrap();
    assert!(report.distances.iter().all(|&d| d == 0.0), "{:?}", report.distances);
    assert!(report.ladder_distances.iter().all(|&d| d == 0.0));
    assert_eq!(report.verdict, Verdict::Pass);
}

#[test]
fn hj_and_cl_agree_on_constant_slopes() {
    let spec = burgers_with(InitialData::Constant { value: 0.5 });
    let grid = Grid::periodic(32).unwrap();
    let v = hj::solve_hj(&spec, &HjSchemeConfig::default(), grid, 0.4, &[]).unwrap().pop().unwrap();
    // v = x/2 − t/8
    for i in 0..=grid.n {
        assert!((v.values[i] - (0.5 * grid.face(i) - 0.05)).abs() < 1e-13);
    }
}

#[test]
fn gradient_energy_matches_the_heat_dissipation_identity() {
    // ½‖u(T)‖² + α∫∫u_x² = ½‖u₀‖², with ‖sin(2πx)‖² = ½ decaying by exp(−8π²αT)
    let alpha = 0.05;
    let t = 0.2;
    let spec = builtin_catalog("heat", &params(&[("alpha", alpha)])).unwrap();
    let run = cl::record_cl(&spec, &SchemeConfig::default(), Grid::periodic(128).unwrap(), t).unwrap();
    let audit = audit_entropy_inequality(&run, &spec, &[0.0], 1.0).unwrap();
    let expected = 0.25 * (1.0 - (-8.0 * std::f64::consts::PI.powi(2) * alpha * t).exp());
    assert!((audit.gradient_energy / expected - 1.0).abs() < 0.02, "{} vs {expected}", audit.gradient_energy);

    let burgers = builtin_catalog("burgers", &Params::new()).unwrap();
    let run = cl::record_cl(&burgers, &SchemeConfig::default(), Grid::periodic(64).unwrap(), 0.3).unwrap();
    assert_eq!(audit_entropy_inequality(&run, &burgers, &[0.0], 1.0).unwrap().gradient_energy, 0.0);
}
