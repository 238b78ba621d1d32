//! Hopf–Lax representation `v(x,t) = min_y v₀(y) + t·f*((x−y)/t)` for the
//! first-order convex case, used as an independent oracle.

use crate::error::{Error, Result};
use crate::problem::{Convexity, FluxModel};
use crate::quadrature::golden_min;

/// `f*(q) = sup_p (q·p − f(p))` by a coarse scan plus golden-section search,
/// widening the search window until the maximiser is interior.
pub fn legendre_transform(flux: &FluxModel, q: f64) -> f64 {
    let objective = |p: f64| -(q * p - flux.f(0.0, p));
    let mut w = 1.0f64.max(2.0 * q.abs());
    loop {
        let n = 64;
        let h = 2.0 * w / n as f64;
        let (mut best_k, mut best) = (0, f64::INFINITY);
        for k in 0..=n {
            let val = objective(-w + h * k as f64);
            if val < best {
                best = val;
                best_k = k;
            }
        }
        if (best_k == 0 || best_k == n) && w < 1e12 {
            w *= 4.0;
            continue;
        }
        let centre = -w + h * best_k as f64;
        let (_, fmin) = golden_min(objective, centre - h, centre + h, 1e-13 * w.max(1.0));
        return -fmin;
    }
}

fn validate(flux: &FluxModel, t: f64) -> Result<()> {
    if flux.convexity != Convexity::StrictlyConvex || !flux.x_independent {
        return Err(Error::Structural(
            "Hopf-Lax formula needs a strictly convex, x-independent flux".into(),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    Ok(())
}

/// Minimises over `n_y + 1` equispaced points of `y_window`, then refines the
/// three best local minima by golden-section search.
fn minimise_on_grid(cost: &dyn Fn(f64) -> f64, y_window: (f64, f64), n_y: usize) -> f64 {
    let (a, b) = y_window;
    let h = (b - a) / n_y as f64;
    let vals: Vec<f64> = (0..=n_y).map(|k| cost(a + h * k as f64)).collect();
    let mut minima: Vec<usize> = (0..=n_y)
        .filter(|&k| (k == 0 || vals[k] <= vals[k - 1]) && (k == n_y || vals[k] <= vals[k + 1]))
        .collect();
    minima.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    minima.truncate(3);
    let mut best = f64::INFINITY;
    for k in minima {
        let y = a + h * k as f64;
        let lo = (y - h).max(a);
        let hi = (y + h).min(b);
        let (_, v) = golden_min(cost, lo, hi, 1e-13 * (1.0 + y.abs()));
        best = best.min(v).min(vals[k]);
    }
    best
}

/// Hopf–Lax value at `(x, t)` with `y` restricted to `y_window`.
///
/// The y-grid starts at `n_y` points and is doubled until two consecutive
/// results differ by less than 1e-8.
pub fn hopf_lax_oracle(
    v0: &dyn Fn(f64) -> f64,
    flux: &FluxModel,
    x: f64,
    t: f64,
    y_window: (f64, f64),
    n_y: usize,
) -> Result<f64> {
    validate(flux, t)?;
    if !(y_window.0 < y_window.1) {
        return Err(Error::param("y_window", "empty minimisation window"));
    }
    let cost = |y: f64| v0(y) + t * legendre_transform(flux, (x - y) / t);
    let mut n = n_y.max(16);
    let mut prev = minimise_on_grid(&cost, y_window, n);
    for _ in 0..12 {
        n *= 2;
        let cur = minimise_on_grid(&cost, y_window, n);
        if (cur - prev).abs() < 1e-8 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Structural(format!("Hopf-Lax minimisation did not settle at x = {x}, t = {t}")))
}
