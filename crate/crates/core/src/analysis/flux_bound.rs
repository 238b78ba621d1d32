//! Maximum principle for the flux variable `w = −f(x,u) + α u_x + β(u)_x + ε u_x`.
//!
//! `w` is evaluated at faces with the solver's own face fluxes (`w = −T`),
//! which is exactly the time rate of the primitive `v`.

use crate::analysis::Verdict;
use crate::cl::{self, face_fluxes, ClScheme, SchemeConfig};
use crate::error::Result;
use crate::field::{CellField, Grid};
use crate::par;
use crate::problem::ProblemSpec;

#[derive(Clone, Debug)]
pub struct FluxBoundAudit {
    pub epsilon: f64,
    pub times: Vec<f64>,
    pub max_w: Vec<f64>,
    pub initial: f64,
    /// `C·(dx + dt)`.
    pub tol_growth: f64,
    pub verdict: Verdict,
}

pub fn max_abs_w(state: &CellField, spec: &ProblemSpec, scheme: &ClScheme) -> f64 {
    face_fluxes(state, spec, scheme).iter().fold(0.0, |m, t| m.max(t.abs()))
}

/// Checks `max|w(t)| ≤ max|w(0)| + C·(dx + dt)` on `snapshots` (first one is `t = 0`).
pub fn audit_flux_bound(
    snapshots: &[CellField],
    spec: &ProblemSpec,
    scheme: &ClScheme,
    max_dt: f64,
    c: f64,
) -> FluxBoundAudit {
    let times: Vec<f64> = snapshots.iter().map(|s| s.time).collect();
    let max_w: Vec<f64> = snapshots.iter().map(|s| max_abs_w(s, spec, scheme)).collect();
    let initial = max_w.first().copied().unwrap_or(0.0);
    let dx = snapshots.first().map_or(0.0, |s| s.grid.dx);
    let tol_growth = c * (dx + max_dt);
    let ok = max_w.iter().all(|&w| w <= initial + tol_growth);
    FluxBoundAudit { epsilon: scheme.epsilon, times, max_w, initial, tol_growth, verdict: Verdict::from_bool(ok) }
}

/// Runs the solver with `n_snapshots` equispaced outputs and audits it.
pub fn run_flux_bound(
    spec: &ProblemSpec,
    config: &SchemeConfig,
    grid: Grid,
    t_end: f64,
    n_snapshots: usize,
    c: f64,
) -> Result<FluxBoundAudit> {
    let initial = cl::initial_cells(spec, grid);
    let scheme = ClScheme::new(spec, config, &initial)?;
    let times: Vec<f64> = (1..=n_snapshots).map(|k| t_end * k as f64 / n_snapshots as f64).collect();
    let mut max_dt: f64 = 0.0;
    let mut obs = |_: &CellField, dt: f64, _: &CellField| max_dt = max_dt.max(dt);
    let mut snaps = vec![initial.clone()];
    snaps.extend(cl::solve_from(initial, spec, &scheme, t_end, &times, &mut obs)?);
    Ok(audit_flux_bound(&snaps, spec, &scheme, max_dt, c))
}

#[derive(Clone, Debug)]
pub struct FluxBoundLadder {
    pub audits: Vec<FluxBoundAudit>,
    /// `max_ε max_t |w^ε|`, the ε-uniform bound.
    pub uniform_bound: f64,
    pub verdict: Verdict,
}

/// One audit per ε; the ladder passes when every entry passes.
pub fn flux_bound_ladder(
    spec: &ProblemSpec,
    config: &SchemeConfig,
    grid: Grid,
    eps_list: &[f64],
    t_end: f64,
    n_snapshots: usize,
    c: f64,
) -> Result<FluxBoundLadder> {
    let runs = par::parallel_map(eps_list, |&eps| {
        run_flux_bound(spec, &config.clone().with_epsilon(eps), grid, t_end, n_snapshots, c)
    });
    let audits = par::collect_results(runs)?;
    let uniform_bound = audits.iter().flat_map(|a| a.max_w.iter()).fold(0.0, |m: f64, w| m.max(*w));
    let verdict = audits.iter().fold(Verdict::Pass, |v, a| v.combine(a.verdict));
    Ok(FluxBoundLadder { audits, uniform_bound, verdict })
}
