//! Large-time behaviour on the torus: traveling profiles `V(x − dt)` for the
//! HJ equation when `f = f(u)`, `α = 0`, and stationary profiles plus the
//! ergodic constant for strictly convex fluxes.

use std::collections::BTreeSet;

use crate::analysis::stats::{least_squares, theil_sen};
use crate::analysis::Verdict;
use crate::cl::{self, SchemeConfig};
use crate::error::{Error, Result};
use crate::field::{Grid, NodalField};
use crate::hj::{self, HjSchemeConfig};
use crate::problem::{detect_affine_interval, validate_assumptions, AffineInterval, Assumption, ProblemSpec, Status};
use crate::transforms::{align_profile, l1_distance, primitive_with_offset, AlignOptions, Metric, ShiftGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LongtimeKind {
    HamiltonJacobi,
    ConservationLaw,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BracketSample {
    pub time: f64,
    /// `min_x(ṽ − V̂(· − dt))`
    pub m: f64,
    /// `max_x(ṽ − V̂(· − dt))`
    pub big_m: f64,
}

#[derive(Clone, Debug)]
pub struct LargeTimeReport {
    pub kind: LongtimeKind,
    pub problem: String,
    /// `d̂` (HJ) or `ĉ` (CL).
    pub estimate: f64,
    /// Theoretical drift `d` (HJ only).
    pub theory: Option<f64>,
    pub interval: Option<AffineInterval>,
    /// Per-window ergodic-constant estimates (CL only).
    pub window_estimates: Vec<f64>,
    /// `V̂` on nodes `0..n` or `Û` on cells.
    pub profile: Vec<f64>,
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Alignment shifts (HJ only).
    pub shifts: Vec<f64>,
    pub theil_sen: f64,
    /// Worst violation of the slope sandwich (≤ 0 means it holds).
    pub sandwich_excess: Option<f64>,
    pub sandwich_ok: Option<bool>,
    pub oscillation: f64,
    pub bracket: Vec<BracketSample>,
    pub bracket_ok: Option<bool>,
    /// `∫u(t_max) − ∫u₀`.
    pub mass_drift: f64,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct HjLongtimeOptions {
    pub affine_tol: f64,
    /// Bracketing tolerance per unit time, in units of `dx`.
    pub bracket_c: f64,
    /// Alignment search half-width in cells around `d·t`.
    pub search_cells: i64,
    /// Required `|d̂ − d|` when the interval is not degenerate.
    pub drift_tol: f64,
    /// Oscillation bound for `V̂` in the degenerate case, in units of `dx`.
    pub flat_cells: f64,
}

impl Default for HjLongtimeOptions {
    fn default() -> Self {
        HjLongtimeOptions { affine_tol: 1e-6, bracket_c: 1.0, search_cells: 2, drift_tol: 1e-3, flat_cells: 10.0 }
    }
}

fn require(spec: &ProblemSpec, a: Assumption) -> Result<()> {
    let which: BTreeSet<Assumption> = [a].into_iter().collect();
    let report = validate_assumptions(spec, &which)?;
    if report.status(a) != Some(Status::Satisfied) {
        return Err(Error::AssumptionViolated(Box::new(report)));
    }
    if !spec.domain.is_periodic() {
        return Err(Error::Structural("large-time experiments run on the torus".into()));
    }
    Ok(())
}

/// `w_i = v_{i+k}` extended quasi-periodically (`v(x + L) = v(x) + jump`).
fn roll(v: &NodalField, k: i64) -> NodalField {
    let n = v.grid.n as i64;
    let jump = v.jump();
    let mut values: Vec<f64> = (0..n)
        .map(|i| {
            let idx = i + k;
            v.values[idx.rem_euclid(n) as usize] + idx.div_euclid(n) as f64 * jump
        })
        .collect();
    values.push(values[0] + jump);
    NodalField { grid: v.grid, values, time: v.time, gauge: 0.0 }
}

fn oscillation(values: &[f64]) -> f64 {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    hi - lo
}

/// Largest violation of `a·Δy ≤ V(y₂) − V(y₁) ≤ b·Δy` minus the tolerance,
/// over all node pairs in one period.
fn sandwich_excess(profile: &[f64], dx: f64, a: f64, b: f64, tol: f64) -> f64 {
    let n = profile.len();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let dy = (j - i) as f64 * dx;
            let dv = profile[j] - profile[i];
            worst = worst.max(a * dy - dv - tol).max(dv - b * dy - tol);
        }
    }
    worst
}

/// Traveling-profile experiment for the HJ equation.
pub fn hj_longtime(
    spec: &ProblemSpec,
    config: &HjSchemeConfig,
    grid: Grid,
    t_max: f64,
    checkpoint_times: &[f64],
    options: &HjLongtimeOptions,
) -> Result<LargeTimeReport> {
    require(spec, Assumption::A7)?;
    let interval = detect_affine_interval(&spec.flux, &spec.diffusion, spec.working_range, options.affine_tol)?;
    let d = interval.d;
    let f0 = spec.flux.f(0.0, 0.0);
    let mut snaps = hj::solve_hj(spec, config, grid, t_max, checkpoint_times)?;
    for s in &mut snaps {
        s.gauge = f0 * s.time;
        for v in &mut s.values {
            *v += s.gauge;
        }
    }
    let dx = grid.dx;
    let last = snaps.last().expect("t_max snapshot");
    let cells = |t: f64| (d * t / dx).round() as i64;
    let profile = roll(last, cells(t_max));

    let opts = AlignOptions { metric: Metric::Linf, mean_matching: false, parabolic_refine: true };
    let mut times = Vec::new();
    let mut residuals = Vec::new();
    let mut shifts = Vec::new();
    let mut bracket = Vec::new();
    for s in &snaps {
        let a = align_profile(
            s,
            &profile,
            ShiftGrid::Around { center: cells(s.time), half_width: options.search_cells },
            opts,
        )?;
        let target = roll(&profile, -cells(s.time));
        let diff: Vec<f64> = s.values.iter().zip(&target.values).map(|(x, y)| x - y).collect();
        let (m, big_m) = diff.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        times.push(s.time);
        residuals.push(a.residual);
        shifts.push(a.shift);
        bracket.push(BracketSample { time: s.time, m, big_m });
    }
    let drift = least_squares(&times, &shifts).map_or(f64::NAN, |(slope, _)| slope);
    let trend_n = residuals.len().saturating_sub(1).max(1);
    let trend = theil_sen(&times[..trend_n], &residuals[..trend_n]).unwrap_or(0.0);
    let bracket_ok = bracket.windows(2).all(|w| {
        let tol = options.bracket_c * dx * (w[1].time - w[0].time) + 1e-12;
        w[1].m >= w[0].m - tol && w[1].big_m <= w[0].big_m + tol
    });

    let periodic = &profile.values[..grid.n];
    let osc = oscillation(periodic);
    let tol = 2.0 * dx * interval.a.abs().max(interval.b.abs()).max(1.0);
    let excess = sandwich_excess(periodic, dx, interval.a, interval.b, tol);
    let mut sandwich_ok = excess <= 0.0;
    let mut notes = Vec::new();
    if interval.degenerate {
        let flat = osc <= options.flat_cells * dx;
        notes.push(format!("degenerate interval: osc(V) = {osc:.3e} vs {:.3e}", options.flat_cells * dx));
        sandwich_ok &= flat;
    }
    let drift_ok = interval.degenerate || (drift - d).abs() <= options.drift_tol;
    if !drift_ok {
        notes.push(format!("drift estimate {drift} differs from d = {d}"));
    }
    if let Some(check) = validate_assumptions(spec, &[Assumption::A5].into_iter().collect())?.checks.first() {
        if check.status != Status::Satisfied {
            notes.push("u0 is not BV/Lipschitz at the sampling budget".into());
        }
    }
    let mass_drift = last.jump() - snaps[0].jump();
    let verdict = Verdict::from_bool(sandwich_ok && bracket_ok && trend <= 0.0 && drift_ok);
    Ok(LargeTimeReport {
        kind: LongtimeKind::HamiltonJacobi,
        problem: spec.name.clone(),
        estimate: drift,
        theory: Some(d),
        interval: Some(interval),
        window_estimates: Vec::new(),
        profile: periodic.to_vec(),
        times,
        residuals,
        shifts,
        theil_sen: trend,
        sandwich_excess: Some(excess),
        sandwich_ok: Some(sandwich_ok),
        oscillation: osc,
        bracket,
        bracket_ok: Some(bracket_ok),
        mass_drift,
        notes,
        verdict,
    })
}

#[derive(Clone, Debug)]
pub struct ClLongtimeOptions {
    /// Number of disjoint windows in `[t_max/2, t_max]`.
    pub windows: usize,
    pub window_agreement: f64,
}

impl Default for ClLongtimeOptions {
    fn default() -> Self {
        ClLongtimeOptions { windows: 4, window_agreement: 1e-3 }
    }
}

/// Stationary-profile and ergodic-constant experiment for the conservation law.
///
/// `ĉ` is the time slope `−Δv/Δt` of the primitive, averaged over nodes, on
/// disjoint late-time windows.
pub fn cl_longtime(
    spec: &ProblemSpec,
    config: &SchemeConfig,
    grid: Grid,
    t_max: f64,
    checkpoint_times: &[f64],
    options: &ClLongtimeOptions,
) -> Result<LargeTimeReport> {
    require(spec, Assumption::A8)?;
    if options.windows == 0 {
        return Err(Error::param("windows", "need at least one window"));
    }
    let w = options.windows;
    let edges: Vec<f64> = (0..=w).map(|k| 0.5 * t_max * (1.0 + k as f64 / w as f64)).collect();
    let mut requested: Vec<f64> = checkpoint_times.to_vec();
    requested.extend(&edges);
    let snaps = cl::solve_cl(spec, config, grid, t_max, &requested)?;
    let initial = cl::initial_cells(spec, grid);
    let find = |t: f64| snaps.iter().find(|s| s.time == t).expect("requested snapshot");
    let v_mean = |t: f64| {
        let v = primitive_with_offset(find(t));
        v.values[..grid.n].iter().sum::<f64>() / grid.n as f64
    };
    let window_estimates: Vec<f64> =
        edges.windows(2).map(|e| -(v_mean(e[1]) - v_mean(e[0])) / (e[1] - e[0])).collect();
    let c_hat = window_estimates.iter().sum::<f64>() / w as f64;
    let spread = oscillation(&window_estimates);
    let last = snaps.last().expect("t_max snapshot");

    let mut checkpoints: Vec<f64> = checkpoint_times.iter().copied().filter(|&t| t >= 0.0 && t <= t_max).collect();
    checkpoints.push(t_max);
    checkpoints.sort_by(|a, b| a.total_cmp(b));
    checkpoints.dedup();
    let mut residuals = Vec::new();
    for &t in &checkpoints {
        let u = if t == 0.0 { &initial } else { find(t) };
        residuals.push(l1_distance(u, last)?);
    }
    let trend_n = residuals.len().saturating_sub(1).max(1);
    let trend = theil_sen(&checkpoints[..trend_n], &residuals[..trend_n]).unwrap_or(0.0);
    let mass_drift = last.mass() - initial.mass();
    let notes = vec![
        format!("c from v time-slope: {c_hat:.6e}; window spread {spread:.3e}"),
        format!("mean of u drifts by {mass_drift:.3e} (a profile moving as U - ct would need rate {:.3e})", -c_hat),
    ];
    let verdict = Verdict::from_bool(trend <= 0.0 && spread <= options.window_agreement);
    Ok(LargeTimeReport {
        kind: LongtimeKind::ConservationLaw,
        problem: spec.name.clone(),
        estimate: c_hat,
        theory: None,
        interval: None,
        window_estimates,
        profile: last.values.clone(),
        times: checkpoints,
        residuals,
        shifts: Vec::new(),
        theil_sen: trend,
        sandwich_excess: None,
        sandwich_ok: None,
        oscillation: oscillation(&last.values),
        bracket: Vec::new(),
        bracket_ok: None,
        mass_drift,
        notes,
        verdict,
    })
}
