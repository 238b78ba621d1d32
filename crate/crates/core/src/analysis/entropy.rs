//! Discrete Kruzhkov cell-entropy inequality for `η_k(u) = |u − k|`.
//!
//! With `T` the total face flux (convective minus diffusive) and
//! `Q_k = T(uL∨k, uR∨k) − T(uL∧k, uR∧k)`, each step must satisfy
//!
//! `|u_j − k| − λ(Q_{j+½} − Q_{j−½}) − |u_j' − k + λ(f(x_{j+½},k) − f(x_{j−½},k))| ≥ 0`.
//!
//! The diffusive part of `Q_k` is the face difference of
//! `r_k(u) = sign(u−k)(α(u−k) + β(u) − β(k) + ε(u−k))`, the entropy
//! diffusion flux. For a monotone scheme the residual is nonnegative up to
//! round-off.

use crate::analysis::Verdict;
use crate::cl::{face_states, ClScheme, Trajectory};
use crate::error::{Error, Result};
use crate::field::{Boundary, CellField};
use crate::par;
use crate::problem::ProblemSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepResidual {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub dx: f64,
    /// Most negative (or smallest) residual over cells and levels.
    pub worst: f64,
    pub level: f64,
    pub cell: usize,
    /// `dt·Σ_faces [(α+ε)(Δu)² + Δβ(u)·Δu]/dx`, the step's share of the
    /// discrete `∫∫(α+β′)u_x²`.
    pub energy: f64,
}

#[derive(Clone, Debug)]
pub struct EntropyAudit {
    pub levels: Vec<f64>,
    pub steps: Vec<StepResidual>,
    pub worst: StepResidual,
    /// `C` in the tolerance `1e-10 + C·dt·dx`.
    pub c: f64,
    /// Accumulated gradient energy over the run; reported, not asserted.
    pub gradient_energy: f64,
    pub verdict: Verdict,
}

/// 16 equispaced levels across the working range plus any Riemann states.
pub fn default_levels(spec: &ProblemSpec) -> Vec<f64> {
    let (lo, hi) = spec.working_range;
    let mut k: Vec<f64> = (0..16).map(|i| lo + (hi - lo) * i as f64 / 15.0).collect();
    k.extend(spec.initial.riemann_states());
    k.sort_by(|a, b| a.total_cmp(b));
    k.dedup();
    k
}

fn step_residual(
    before: &CellField,
    after: &CellField,
    dt: f64,
    spec: &ProblemSpec,
    scheme: &ClScheme,
    levels: &[f64],
) -> (f64, f64, usize) {
    let g = before.grid;
    let dx = g.dx;
    let lambda = dt / dx;
    let mut worst = (f64::INFINITY, f64::NAN, 0);
    let mut q = vec![0.0; g.n + 1];
    for &k in levels {
        for (i, qi) in q.iter_mut().enumerate() {
            let (ul, ur) = face_states(&before.values, g.boundary, i);
            let x = g.face(i);
            *qi = scheme.face_flux(spec, x, ul.max(k), ur.max(k), dx) - scheme.face_flux(spec, x, ul.min(k), ur.min(k), dx);
        }
        if g.boundary == Boundary::Periodic {
            q[g.n] = q[0];
        }
        for j in 0..g.n {
            let df = spec.flux.f(g.face(j + 1), k) - spec.flux.f(g.face(j), k);
            let r = (before.values[j] - k).abs() - lambda * (q[j + 1] - q[j]) - (after.values[j] - k + lambda * df).abs();
            if r < worst.0 {
                worst = (r, k, j);
            }
        }
    }
    worst
}

fn step_energy(before: &CellField, dt: f64, spec: &ProblemSpec, scheme: &ClScheme) -> f64 {
    let g = before.grid;
    let faces = match g.boundary {
        Boundary::Periodic => 0..g.n,
        Boundary::Outflow => 1..g.n,
    };
    let d = &spec.diffusion;
    let sum: f64 = faces
        .map(|i| {
            let (ul, ur) = face_states(&before.values, g.boundary, i);
            let du = ur - ul;
            (d.alpha(g.face(i)) + scheme.epsilon) * du * du + (d.beta(ur) - d.beta(ul)) * du
        })
        .sum();
    dt * sum / g.dx
}

/// Audits every step of `run` at the given levels.
pub fn audit_entropy_inequality(run: &Trajectory, spec: &ProblemSpec, k_levels: &[f64], c: f64) -> Result<EntropyAudit> {
    if run.states.len() != run.dts.len() + 1 {
        return Err(Error::MissingDt { states: run.states.len(), dts: run.dts.len() });
    }
    if k_levels.is_empty() {
        return Err(Error::param("k_levels", "no entropy levels"));
    }
    let idx: Vec<usize> = (0..run.dts.len()).collect();
    let steps: Vec<StepResidual> = par::parallel_map(&idx, |&n| {
        let before = &run.states[n];
        let (worst, level, cell) = step_residual(before, &run.states[n + 1], run.dts[n], spec, &run.scheme, k_levels);
        let energy = step_energy(before, run.dts[n], spec, &run.scheme);
        StepResidual { step: n, time: before.time, dt: run.dts[n], dx: before.grid.dx, worst, level, cell, energy }
    });
    let pass = steps.iter().all(|s| s.worst >= -(1e-10 + c * s.dt * s.dx));
    let worst = steps
        .iter()
        .copied()
        .min_by(|a, b| a.worst.total_cmp(&b.worst))
        .unwrap_or(StepResidual { step: 0, time: 0.0, dt: 0.0, dx: run.states[0].grid.dx, worst: 0.0, level: f64::NAN, cell: 0, energy: 0.0 });
    let gradient_energy = steps.iter().map(|s| s.energy).sum();
    Ok(EntropyAudit { levels: k_levels.to_vec(), steps, worst, c, gradient_energy, verdict: Verdict::from_bool(pass) })
}
