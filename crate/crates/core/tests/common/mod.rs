//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use evlab::cl::{ConvectiveFlux, FluxScheme, SchemeConfig};
use evlab::{FluxModel, Grid, InitialData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Composite Gauss–Legendre (3 points) average of `g` over `[a, b]` with `m` panels.
pub fn average(g: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let nodes = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
    let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let h = (b - a) / m as f64;
    let mut s = 0.0;
    for k in 0..m {
        let mid = a + (k as f64 + 0.5) * h;
        for (x, w) in nodes.iter().zip(weights) {
            s += w * g(mid + 0.5 * h * x);
        }
    }
    s * 0.5 * h / (b - a)
}

/// Exact cell averages of a piecewise-smooth profile (kinks resolved by many panels).
pub fn exact_cells(grid: Grid, g: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..grid.n).map(|j| average(&g, grid.face(j), grid.face(j + 1), 64)).collect()
}

/// Entropy solution of Burgers' equation for the rarefaction `uL < uR` centred at `x0`.
pub fn burgers_rarefaction(x: f64, t: f64, x0: f64, ul: f64, ur: f64) -> f64 {
    ((x - x0) / t).clamp(ul, ur)
}

/// Heat equation `u_t = α u_xx` from `sin(2πx)`.
pub fn heat_sine(x: f64, t: f64, alpha: f64) -> f64 {
    (-4.0 * PI * PI * alpha * t).exp() * (2.0 * PI * x).sin()
}

/// The `f_u > 0` root `U` of `U²/2 + φU = c` (requires `c ≥ −φ²/2`).
pub fn stationary_root(phi: f64, c: f64) -> f64 {
    // plain bisection on the increasing branch U ≥ −φ
    let g = |u: f64| 0.5 * u * u + phi * u - c;
    let (mut lo, mut hi) = (-phi, -phi + 1.0);
    while g(hi) < 0.0 {
        hi = -phi + 2.0 * (hi + phi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Stationary profile of `u_t + (u²/2 + A sin(2πx) u)_x = 0` with mean `mass`
/// on `grid`, with `c̄` found by bisection on the mass constraint.
pub fn stationary_profile(grid: Grid, a: f64, mass: f64) -> (f64, Vec<f64>) {
    let phi = |x: f64| a * (2.0 * PI * x).sin();
    let profile = |c: f64| -> Vec<f64> { (0..grid.n).map(|j| stationary_root(phi(grid.center(j)), c)).collect() };
    let mean = |c: f64| profile(c).iter().sum::<f64>() / grid.n as f64;
    let (mut lo, mut hi) = (0.0, 1.0);
    assert!(mean(lo) < mass, "mass below the c = 0 profile");
    while mean(hi) < mass {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < mass {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    (c, profile(c))
}

/// Central flux plus negative numerical viscosity: deliberately not monotone.
#[derive(Debug)]
pub struct AntiDiffusive {
    pub strength: f64,
}

impl ConvectiveFlux for AntiDiffusive {
    fn name(&self) -> String {
        "anti-diffusive".into()
    }

    fn flux(&self, model: &FluxModel, x: f64, ul: f64, ur: f64) -> f64 {
        0.5 * (model.f(x, ul) + model.f(x, ur)) + 0.5 * self.strength * (ur - ul)
    }

    fn speed(&self, max_fu: f64) -> f64 {
        max_fu.max(self.strength)
    }
}

pub fn broken_config(strength: f64) -> SchemeConfig {
    SchemeConfig::default().with_flux(FluxScheme::Custom(Arc::new(AntiDiffusive { strength })))
}

/// Random trigonometric polynomial data with up to `modes` modes, bounded by `scale`.
pub fn random_fourier(rng: &mut ChaCha8Rng, modes: usize, scale: f64, mean: f64) -> InitialData {
    let m = rng.gen_range(1..=modes);
    let mut list = Vec::with_capacity(m);
    for k in 1..=m {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        list.push((k as f64, a, b));
    }
    let total: f64 = list.iter().map(|(_, a, b)| a.abs() + b.abs()).sum();
    let norm = scale / total.max(1e-12);
    InitialData::Fourier { mean, modes: list.into_iter().map(|(k, a, b)| (k, a * norm, b * norm)).collect() }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
