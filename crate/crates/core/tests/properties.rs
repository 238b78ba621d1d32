//! Property tests for the solvers, transforms and problem models.

mod common;

use proptest::prelude::*;

use evlab::catalog::{builtin_catalog, catalog_entries, flat_middle_flux, plateau_beta, Params};
use evlab::cl::{self, eo_flux, ClScheme, ConvectiveFlux, LaxFriedrichs, SchemeConfig};
use evlab::hj::{self, numerical_hamiltonian, HjSchemeConfig};
use evlab::io::{read_cell_snapshots, write_cell_snapshots};
use evlab::transforms::{
    align_profile, bv_seminorm, derivative, l1_distance, linf_distance, primitive, primitive_with_offset, AlignOptions,
    Metric, ShiftGrid,
};
use evlab::{detect_affine_interval, CellField, Grid, InitialData, ProblemSpec};

use common::rng;

fn catalog_names() -> Vec<&'static str> {
    catalog_entries().iter().map(|e| e.name).collect()
}

fn spec_strategy() -> impl Strategy<Value = ProblemSpec> {
    (0..catalog_names().len()).prop_map(|k| builtin_catalog(catalog_names()[k], &Params::new()).unwrap())
}

/// A catalog problem started from random Fourier data inside its working box.
fn random_problem() -> impl Strategy<Value = ProblemSpec> {
    (spec_strategy(), any::<u64>()).prop_map(|(spec, seed)| {
        let (lo, hi) = spec.working_range;
        let data = common::random_fourier(&mut rng(seed), 4, 0.3 * (hi - lo), 0.5 * (lo + hi));
        spec.with_initial(data)
    })
}

fn cells(grid: Grid, values: Vec<f64>) -> CellField {
    CellField::new(grid, values, 0.0).unwrap()
}

fn cell_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flux_derivatives_match_finite_differences(spec in spec_strategy(), s in 0.0..1.0f64, x in 0.0..1.0f64) {
        let (lo, hi) = spec.working_range;
        let u = lo + s * (hi - lo);
        let h = 1e-6;
        let f = &spec.flux;
        let fd_u = (f.f(x, u + h) - f.f(x, u - h)) / (2.0 * h);
        let fd_x = (f.f(x + h, u) - f.f(x - h, u)) / (2.0 * h);
        prop_assert!((fd_u - f.f_u(x, u)).abs() <= 1e-6 * f.f_u(x, u).abs().max(1.0));
        prop_assert!((fd_x - f.f_x(x, u)).abs() <= 1e-6 * f.f_x(x, u).abs().max(1.0));
        if f.x_independent {
            prop_assert_eq!(f.f(x, u), f.f(0.3, u));
        }
    }

    #[test]
    fn diffusion_is_monotone_and_consistent(spec in spec_strategy(), s in 0.0..1.0f64, x in 0.0..1.0f64) {
        let (lo, hi) = spec.working_range;
        let u = lo + s * (hi - lo);
        let d = &spec.diffusion;
        let h = 1e-6;
        prop_assert!(d.alpha(x) >= 0.0);
        prop_assert!(d.beta_prime(u) >= 0.0);
        let fd = (d.beta(u + h) - d.beta(u - h)) / (2.0 * h);
        prop_assert!((fd - d.beta_prime(u)).abs() <= 1e-6 * d.beta_prime(u).abs().max(1.0));
        // periodic inputs
        prop_assert!((spec.flux.f(0.0, u) - spec.flux.f(1.0, u)).abs() <= 1e-12 * spec.flux.f(0.0, u).abs().max(1.0));
        prop_assert!((d.alpha(0.0) - d.alpha(1.0)).abs() <= 1e-12);
    }

    #[test]
    fn numerical_fluxes_are_consistent(spec in spec_strategy(), s in 0.0..1.0f64, x in 0.0..1.0f64) {
        let (lo, hi) = spec.working_range;
        let u = lo + s * (hi - lo);
        let f = spec.flux.f(x, u);
        prop_assert!((eo_flux(u, u, x, &spec.flux) - f).abs() <= 1e-12 * f.abs().max(1.0));
        prop_assert_eq!(LaxFriedrichs { theta: 3.0 }.flux(&spec.flux, x, u, u), f);
        prop_assert!((numerical_hamiltonian(u, u, x, &spec.flux, 2.0) - f).abs() <= 1e-14 * f.abs().max(1.0));
    }

    #[test]
    fn eo_flux_is_monotone(spec in spec_strategy(), a in 0.0..1.0f64, b in 0.0..1.0f64, d in 1e-3..0.5f64, x in 0.0..1.0f64) {
        let (lo, hi) = spec.working_range;
        let (ul, ur) = (lo + a * (hi - lo), lo + b * (hi - lo));
        let base = eo_flux(ul, ur, x, &spec.flux);
        prop_assert!(eo_flux(ul + d, ur, x, &spec.flux) >= base - 1e-12);
        prop_assert!(eo_flux(ul, ur + d, x, &spec.flux) <= base + 1e-12);
    }

    #[test]
    fn hamiltonian_is_monotone(spec in spec_strategy(), a in 0.0..1.0f64, b in 0.0..1.0f64, d in 1e-3..0.5f64, x in 0.0..1.0f64) {
        let (lo, hi) = spec.working_range;
        let (pm, pp) = (lo + a * (hi - lo), lo + b * (hi - lo));
        let theta = (0..=64)
            .map(|k| spec.flux.f_u(x, lo - 1.0 + (hi - lo + 2.0) * k as f64 / 64.0).abs())
            .fold(0.0, f64::max);
        let base = numerical_hamiltonian(pm, pp, x, &spec.flux, theta);
        prop_assert!(numerical_hamiltonian(pm, pp + d, x, &spec.flux, theta) <= base + 1e-12);
        prop_assert!(numerical_hamiltonian(pm + d, pp, x, &spec.flux, theta) >= base - 1e-12);
    }

    #[test]
    fn periodic_runs_conserve_mass(spec in random_problem()) {
        let grid = Grid::periodic(32).unwrap();
        let u0 = cl::initial_cells(&spec, grid);
        let u = cl::solve_cl(&spec, &SchemeConfig::default(), grid, 0.1, &[]).unwrap().pop().unwrap();
        prop_assert!((u.mass() - u0.mass()).abs() <= 1e-10);
    }

    #[test]
    fn x_independent_runs_obey_maximum_principle_and_tvd(spec in random_problem()) {
        prop_assume!(spec.flux.x_independent);
        let grid = Grid::periodic(32).unwrap();
        let u0 = cl::initial_cells(&spec, grid);
        let times: Vec<f64> = (1..=5).map(|k| 0.02 * k as f64).collect();
        let snaps = cl::solve_cl(&spec, &SchemeConfig::default(), grid, 0.1, &times).unwrap();
        let (lo, hi) = u0.range();
        let mut tv = bv_seminorm(&u0);
        for u in &snaps {
            let (a, b) = u.range();
            prop_assert!(a >= lo - 1e-12 && b <= hi + 1e-12);
            prop_assert!(u.max_abs() <= u0.max_abs() + 1e-12);
            let next = bv_seminorm(u);
            prop_assert!(next <= tv + 1e-12);
            tv = next;
        }
    }

    #[test]
    fn cl_comparison_and_l1_contraction(spec in spec_strategy(), seed in any::<u64>(), lift in 0.01..0.5f64) {
        let grid = Grid::periodic(32).unwrap();
        let (lo, hi) = spec.working_range;
        let data = common::random_fourier(&mut rng(seed), 3, 0.25 * (hi - lo), 0.5 * (lo + hi));
        let a = cl::initial_cells(&spec.clone().with_initial(data), grid);
        let mut b = a.clone();
        for (j, v) in b.values.iter_mut().enumerate() {
            *v += lift * (1.0 + (7.0 * j as f64).sin());
        }
        let config = SchemeConfig::default();
        let (sa, sb) = (ClScheme::new(&spec, &config, &a).unwrap(), ClScheme::new(&spec, &config, &b).unwrap());
        let d0 = l1_distance(&a, &b).unwrap();
        let (mut u, mut w) = (a, b);
        for _ in 0..20 {
            let dt = cl::stable_dt(&u, &spec, &sa).unwrap().min(cl::stable_dt(&w, &spec, &sb).unwrap());
            u = cl::step_cl(&u, &spec, &sa, dt).unwrap();
            w = cl::step_cl(&w, &spec, &sb, dt).unwrap();
            prop_assert!(u.values.iter().zip(&w.values).all(|(x, y)| *x <= *y + 1e-13));
            prop_assert!(l1_distance(&u, &w).unwrap() <= d0 + 1e-12);
        }
    }

    #[test]
    fn hj_constant_shift_and_contraction(spec in random_problem(), c in -3.0..3.0f64) {
        let grid = Grid::periodic(32).unwrap();
        let v0 = hj::initial_nodes(&spec, grid);
        let scheme = hj::HjScheme::new(&spec, &HjSchemeConfig::default(), &v0).unwrap();
        let mut shifted = v0.clone();
        for v in &mut shifted.values {
            *v += c;
        }
        let a = hj::solve_hj_from(v0, &spec, &scheme, 0.05, &[]).unwrap().pop().unwrap();
        let b = hj::solve_hj_from(shifted, &spec, &scheme, 0.05, &[]).unwrap().pop().unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((y - x - c).abs() <= 1e-12 * (1.0 + c.abs()) * 8.0);
        }
        prop_assert!(linf_distance(&a, &b).unwrap() <= c.abs() + 1e-12);
    }

    #[test]
    fn primitive_and_derivative_invert(values in cell_values(24), offset in -2.0..2.0f64) {
        let grid = Grid::periodic(24).unwrap();
        let mut u = cells(grid, values);
        u.anchor_offset = offset;
        let back = derivative(&primitive_with_offset(&u));
        for (a, b) in u.values.iter().zip(&back.values) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let v = primitive(&u);
        prop_assert_eq!(v.values[grid.anchor()], 0.0);
        let again = primitive_with_offset(&derivative(&v));
        prop_assert!(linf_distance(&v, &again).unwrap() <= 1e-12);
    }

    #[test]
    fn distances_are_metrics(a in cell_values(16), b in cell_values(16), c in cell_values(16)) {
        let grid = Grid::periodic(16).unwrap();
        let (a, b, c) = (cells(grid, a), cells(grid, b), cells(grid, c));
        prop_assert_eq!(l1_distance(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(l1_distance(&a, &b).unwrap(), l1_distance(&b, &a).unwrap());
        prop_assert!(l1_distance(&a, &c).unwrap() <= l1_distance(&a, &b).unwrap() + l1_distance(&b, &c).unwrap() + 1e-12);
        let (va, vb, vc) = (primitive(&a), primitive(&b), primitive(&c));
        prop_assert_eq!(linf_distance(&va, &va).unwrap(), 0.0);
        prop_assert_eq!(linf_distance(&va, &vb).unwrap(), linf_distance(&vb, &va).unwrap());
        prop_assert!(linf_distance(&va, &vc).unwrap() <= linf_distance(&va, &vb).unwrap() + linf_distance(&vb, &vc).unwrap() + 1e-12);
    }

    #[test]
    fn alignment_never_worse_than_no_shift(a in cell_values(32), b in cell_values(32), l1 in any::<bool>(), mm in any::<bool>()) {
        let grid = Grid::periodic(32).unwrap();
        let (va, vb) = (primitive(&cells(grid, a)), primitive(&cells(grid, b)));
        let opts = AlignOptions { metric: if l1 { Metric::L1 } else { Metric::Linf }, mean_matching: mm, parabolic_refine: false };
        let best = align_profile(&va, &vb, ShiftGrid::All, opts).unwrap();
        let zero = align_profile(&va, &vb, ShiftGrid::Around { center: 0, half_width: 0 }, opts).unwrap();
        prop_assert!(best.residual <= zero.residual + 1e-12);
        prop_assert!(best.shift.abs() <= 0.5 * grid.length() + 1e-12);
    }

    #[test]
    fn affine_interval_invariants(w in 0.1..2.0f64, d in -3.0..3.0f64, s in 0.1..3.0f64, kappa in 0.0..1.0f64, tol_exp in -8.0..-4.0f64) {
        let flux = flat_middle_flux(w, d, s);
        let diffusion = plateau_beta(kappa, w);
        let tol = 10f64.powf(tol_exp);
        let i = detect_affine_interval(&flux, &diffusion, (-w - 1.0, w + 1.0), tol).unwrap();
        prop_assert!(i.a <= 0.0 && i.b >= 0.0);
        prop_assert!(i.a >= -w - 1e-3 && i.b <= w + 1e-3 && i.a <= -w + 1e-3 && i.b >= w - 1e-3);
        for k in 0..=200 {
            let u = i.a + (i.b - i.a) * k as f64 / 200.0;
            prop_assert!((flux.f(0.0, u) - (i.d * u + flux.f(0.0, 0.0))).abs() <= tol);
            prop_assert!((diffusion.beta(u) - diffusion.beta(0.0)).abs() <= tol);
        }
    }

    #[test]
    fn snapshot_round_trip_is_exact(values in prop::collection::vec(-1e6..1e6f64, 20), t in 0.0..10.0f64) {
        let grid = Grid::periodic(20).unwrap();
        let mut u = cells(grid, values);
        u.time = t;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        write_cell_snapshots(&path, std::slice::from_ref(&u)).unwrap();
        let back = read_cell_snapshots(&path, grid).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(&back[0].values, &u.values);
        prop_assert_eq!(back[0].time.to_bits(), u.time.to_bits());
    }
}

#[test]
fn constant_data_is_a_fixed_point_of_both_solvers() {
    let grid = Grid::periodic(16).unwrap();
    for name in catalog_names() {
        let spec = builtin_catalog(name, &Params::new()).unwrap().with_initial(InitialData::Constant { value: 3.0 });
        if !spec.flux.x_independent {
            continue;
        }
        let u = cl::solve_cl(&spec, &SchemeConfig::default(), grid, 0.2, &[]).unwrap().pop().unwrap();
        assert!(u.values.iter().all(|&v| v == 3.0), "{name}");
        let v0 = hj::initial_nodes(&spec, grid);
        let v = hj::solve_hj(&spec, &HjSchemeConfig::default(), grid, 0.2, &[]).unwrap().pop().unwrap();
        let f = spec.flux.f(0.0, 3.0);
        for (a, b) in v0.values.iter().zip(&v.values) {
            assert!((b - (a - 0.2 * f)).abs() < 1e-12, "{name}");
        }
    }
}
