//! Convergence of the viscous approximations to the ε = 0 entropy scheme.

use crate::analysis::stats::{loglog_order, strictly_decreasing};
use crate::analysis::Verdict;
use crate::cl::{self, validate_eps_list, SchemeConfig};
use crate::error::Result;
use crate::field::Grid;
use crate::par;
use crate::problem::ProblemSpec;
use crate::transforms::l1_distance;

#[derive(Clone, Debug)]
pub struct ViscosityReport {
    pub eps: Vec<f64>,
    /// `‖u^ε − u^{ε=0}‖_{L¹}` at `t_end`.
    pub distances: Vec<f64>,
    /// Consecutive `‖u^{ε_k} − u^{ε_{k+1}}‖_{L¹}`.
    pub ladder_distances: Vec<f64>,
    pub exponent: Option<f64>,
    pub exponent_window: (f64, f64),
    pub verdict: Verdict,
}

/// Distances to the ε = 0 solution on the same grid; passes when they
/// decrease with ε and the log-log exponent lies in `exponent_window`.
pub fn vanishing_viscosity_convergence(
    spec: &ProblemSpec,
    config: &SchemeConfig,
    grid: Grid,
    eps_list: &[f64],
    t_end: f64,
    exponent_window: (f64, f64),
) -> Result<ViscosityReport> {
    validate_eps_list(eps_list, grid.dx)?;
    let mut all = vec![0.0];
    all.extend_from_slice(eps_list);
    let runs = par::parallel_map(&all, |&eps| {
        cl::solve_cl(spec, &config.clone().with_epsilon(eps), grid, t_end, &[]).map(|mut s| s.pop().expect("final"))
    });
    let finals = par::collect_results(runs)?;
    let reference = &finals[0];
    let distances = finals[1..].iter().map(|u| l1_distance(u, reference)).collect::<Result<Vec<_>>>()?;
    let ladder_distances = finals[1..].windows(2).map(|w| l1_distance(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
    let exponent = loglog_order(eps_list, &distances);
    let verdict = if distances.iter().all(|&d| d == 0.0) {
        Verdict::Pass
    } else if eps_list.len() < 2 {
        Verdict::Degraded
    } else {
        Verdict::from_bool(
            strictly_decreasing(&distances)
                && exponent.is_some_and(|e| e >= exponent_window.0 && e <= exponent_window.1),
        )
    };
    Ok(ViscosityReport { eps: eps_list.to_vec(), distances, ladder_distances, exponent, exponent_window, verdict })
}
