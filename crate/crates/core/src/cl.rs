//! Explicit monotone finite-volume solver for
//! `u_t + f(x,u)_x = (α(x)u_x + β(u)_x)_x + ε u_xx`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Boundary, CellField, Grid};
use crate::par;
use crate::problem::{DiffusionModel, FluxModel, ProblemSpec};

/// A two-point convective numerical flux.
pub trait ConvectiveFlux: Send + Sync {
    fn name(&self) -> String;

    fn flux(&self, model: &FluxModel, x: f64, ul: f64, ur: f64) -> f64;

    /// Signal speed entering the CFL bound, given the largest local `|∂_u f|`.
    fn speed(&self, max_fu: f64) -> f64;

    /// Rejects states for which the flux is no longer monotone.
    fn check_monotone(&self, _max_fu: f64) -> Result<()> {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EngquistOsher;

impl ConvectiveFlux for EngquistOsher {
    fn name(&self) -> String {
        "engquist-osher".into()
    }

    fn flux(&self, model: &FluxModel, x: f64, ul: f64, ur: f64) -> f64 {
        eo_flux(ul, ur, x, model)
    }

    fn speed(&self, max_fu: f64) -> f64 {
        max_fu
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LaxFriedrichs {
    pub theta: f64,
}

impl ConvectiveFlux for LaxFriedrichs {
    fn name(&self) -> String {
        format!("lax-friedrichs(theta={})", self.theta)
    }

    fn flux(&self, model: &FluxModel, x: f64, ul: f64, ur: f64) -> f64 {
        0.5 * (model.f(x, ul) + model.f(x, ur)) - 0.5 * self.theta * (ur - ul)
    }

    fn speed(&self, _max_fu: f64) -> f64 {
        self.theta
    }

    fn check_monotone(&self, max_fu: f64) -> Result<()> {
        if self.theta < max_fu {
            return Err(Error::Monotonicity { theta: self.theta, speed: max_fu });
        }
        Ok(())
    }
}

/// Engquist–Osher flux
/// `f(x,0) + ∫₀^{uL} max(∂_u f, 0) + ∫₀^{uR} min(∂_u f, 0)`.
pub fn eo_flux(ul: f64, ur: f64, x: f64, flux: &FluxModel) -> f64 {
    let (pos, _) = flux.split_increment(x, 0.0, ul);
    let (_, neg) = flux.split_increment(x, 0.0, ur);
    flux.f(x, 0.0) + pos + neg
}

/// `[α(x)(uR − uL) + β(uR) − β(uL) + ε(uR − uL)] / dx`.
pub fn diffusion_face_flux(ul: f64, ur: f64, x: f64, diffusion: &DiffusionModel, dx: f64, epsilon: f64) -> f64 {
    ((diffusion.alpha(x) + epsilon) * (ur - ul) + diffusion.beta(ur) - diffusion.beta(ul)) / dx
}

/// Dissipation coefficient of a Lax–Friedrichs flux.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Theta {
    Fixed(f64),
    /// `factor · max |∂_u f|` over the initial state range.
    Inflated(f64),
}

#[derive(Clone)]
pub enum FluxScheme {
    EngquistOsher,
    LaxFriedrichs(Theta),
    Custom(Arc<dyn ConvectiveFlux>),
}

impl fmt::Debug for FluxScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FluxScheme::EngquistOsher => write!(f, "EngquistOsher"),
            FluxScheme::LaxFriedrichs(t) => write!(f, "LaxFriedrichs({t:?})"),
            FluxScheme::Custom(c) => write!(f, "Custom({})", c.name()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SchemeConfig {
    pub flux_scheme: FluxScheme,
    pub cfl: f64,
    /// Overrides `ProblemSpec::epsilon` when set.
    pub epsilon: Option<f64>,
    pub max_dt: Option<f64>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig { flux_scheme: FluxScheme::EngquistOsher, cfl: 0.9, epsilon: None, max_dt: None }
    }
}

impl SchemeConfig {
    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn with_flux(mut self, flux_scheme: FluxScheme) -> Self {
        self.flux_scheme = flux_scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::param("cfl", format!("must lie in (0, 1], got {}", self.cfl)));
        }
        if let Some(e) = self.epsilon {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::param("epsilon", format!("must be >= 0, got {e}")));
            }
        }
        if let Some(m) = self.max_dt {
            if !(m > 0.0) {
                return Err(Error::param("max_dt", format!("must be positive, got {m}")));
            }
        }
        Ok(())
    }
}

/// A scheme with all run-dependent constants (θ, ε) fixed.
#[derive(Clone)]
pub struct ClScheme {
    pub flux: Arc<dyn ConvectiveFlux>,
    pub cfl: f64,
    pub epsilon: f64,
    pub max_dt: Option<f64>,
}

impl fmt::Debug for ClScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClScheme")
            .field("flux", &self.flux.name())
            .field("cfl", &self.cfl)
            .field("epsilon", &self.epsilon)
            .field("max_dt", &self.max_dt)
            .finish()
    }
}

impl ClScheme {
    /// Resolves `config` for a run starting from `initial`.
    pub fn new(spec: &ProblemSpec, config: &SchemeConfig, initial: &CellField) -> Result<Self> {
        config.validate()?;
        let flux: Arc<dyn ConvectiveFlux> = match &config.flux_scheme {
            FluxScheme::EngquistOsher => Arc::new(EngquistOsher),
            FluxScheme::LaxFriedrichs(Theta::Fixed(theta)) => Arc::new(LaxFriedrichs { theta: *theta }),
            FluxScheme::LaxFriedrichs(Theta::Inflated(factor)) => {
                Arc::new(LaxFriedrichs { theta: factor * max_face_speed(initial, &spec.flux)? })
            }
            FluxScheme::Custom(c) => c.clone(),
        };
        Ok(ClScheme {
            flux,
            cfl: config.cfl,
            epsilon: config.epsilon.unwrap_or(spec.epsilon),
            max_dt: config.max_dt,
        })
    }

    /// Total face flux `T = F − G` (convective minus diffusive).
    #[inline]
    pub fn face_flux(&self, spec: &ProblemSpec, x: f64, ul: f64, ur: f64, dx: f64) -> f64 {
        self.flux.flux(&spec.flux, x, ul, ur) - diffusion_face_flux(ul, ur, x, &spec.diffusion, dx, self.epsilon)
    }
}

/// Left and right neighbours of face `i` (between cells `i−1` and `i`).
#[inline]
pub(crate) fn face_states(values: &[f64], boundary: Boundary, i: usize) -> (f64, f64) {
    let n = values.len();
    match boundary {
        Boundary::Periodic => (values[(i + n - 1) % n], values[i % n]),
        Boundary::Outflow => (values[i.saturating_sub(1)], values[i.min(n - 1)]),
    }
}

/// `max |∂_u f|` over faces, evaluated at both adjacent states.
fn max_face_speed(state: &CellField, flux: &FluxModel) -> Result<f64> {
    let g = state.grid;
    let mut s: f64 = 0.0;
    for i in 0..=g.n {
        let x = g.face(i);
        let (ul, ur) = face_states(&state.values, g.boundary, i);
        let a = flux.f_u(x, ul).abs().max(flux.f_u(x, ur).abs());
        if !a.is_finite() {
            return Err(Error::Evaluation { what: "f_u", x, u: ul });
        }
        s = s.max(a);
    }
    Ok(s)
}

/// `max (α + β′ + ε)` over faces, `β′` evaluated at both adjacent states.
fn max_face_diffusivity(state: &CellField, diffusion: &DiffusionModel, epsilon: f64) -> Result<f64> {
    let g = state.grid;
    let mut s: f64 = 0.0;
    for i in 0..=g.n {
        let x = g.face(i);
        let (ul, ur) = face_states(&state.values, g.boundary, i);
        let a = diffusion.alpha(x) + diffusion.beta_prime(ul).max(diffusion.beta_prime(ur)) + epsilon;
        if !a.is_finite() {
            return Err(Error::Evaluation { what: "diffusivity", x, u: ul });
        }
        s = s.max(a);
    }
    Ok(s)
}

/// `cfl / (speed/dx + 2·max(α+β′+ε)/dx²)`, capped by `max_dt`.
///
/// When both terms vanish the result is `max_dt`, or `+∞` without a cap;
/// the time loop then clamps to the next output time.
pub fn stable_dt(state: &CellField, spec: &ProblemSpec, scheme: &ClScheme) -> Result<f64> {
    let dx = state.grid.dx;
    let max_fu = max_face_speed(state, &spec.flux)?;
    scheme.flux.check_monotone(max_fu)?;
    let speed = scheme.flux.speed(max_fu);
    let diff = max_face_diffusivity(state, &spec.diffusion, scheme.epsilon)?;
    let denom = speed / dx + 2.0 * diff / (dx * dx);
    let dt = if denom > 0.0 { scheme.cfl / denom } else { f64::INFINITY };
    Ok(match scheme.max_dt {
        Some(m) => dt.min(m),
        None => dt,
    })
}

/// Total face fluxes `T_i`, `i = 0..=n`.
pub fn face_fluxes(state: &CellField, spec: &ProblemSpec, scheme: &ClScheme) -> Vec<f64> {
    let g = state.grid;
    let mut t: Vec<f64> = (0..=g.n)
        .map(|i| {
            let (ul, ur) = face_states(&state.values, g.boundary, i);
            scheme.face_flux(spec, g.face(i), ul, ur, g.dx)
        })
        .collect();
    if g.boundary == Boundary::Periodic {
        t[g.n] = t[0];
    }
    t
}

/// One forward-Euler step. Refuses `dt` above the stable limit.
pub fn step_cl(state: &CellField, spec: &ProblemSpec, scheme: &ClScheme, dt: f64) -> Result<CellField> {
    let limit = stable_dt(state, spec, scheme)?;
    if !(dt >= 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Stability { dt, limit });
    }
    Ok(step_unchecked(state, spec, scheme, dt))
}

pub(crate) fn step_unchecked(state: &CellField, spec: &ProblemSpec, scheme: &ClScheme, dt: f64) -> CellField {
    let g = state.grid;
    let t = face_fluxes(state, spec, scheme);
    let lambda = dt / g.dx;
    let values = (0..g.n).map(|j| state.values[j] - lambda * (t[j + 1] - t[j])).collect();
    CellField {
        grid: g,
        values,
        time: state.time + dt,
        anchor_offset: state.anchor_offset - dt * t[g.anchor()],
    }
}

/// Cell averages of `u₀` on `grid`.
pub fn initial_cells(spec: &ProblemSpec, grid: Grid) -> CellField {
    CellField::from_fn(grid, |a, b| spec.initial.cell_average(a, b))
}

/// Called after every step with `(previous, dt, next)`.
pub trait StepObserver {
    fn observe(&mut self, before: &CellField, dt: f64, after: &CellField);
}

impl<F: FnMut(&CellField, f64, &CellField)> StepObserver for F {
    fn observe(&mut self, before: &CellField, dt: f64, after: &CellField) {
        self(before, dt, after)
    }
}

/// Sorted output times in `[0, t_end]`, always including `t_end`.
pub(crate) fn output_times(t_end: f64, snapshot_times: &[f64]) -> Result<Vec<f64>> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::param("t_end", format!("must be finite and >= 0, got {t_end}")));
    }
    let mut times: Vec<f64> = snapshot_times.iter().copied().filter(|&t| t >= 0.0 && t <= t_end).collect();
    times.push(t_end);
    times.sort_by(|a, b| a.total_cmp(b));
    times.dedup();
    Ok(times)
}

/// Runs to `t_end` and returns snapshots at `snapshot_times ∪ {t_end}`,
/// each hit exactly by shortening the last substep.
pub fn solve_cl(
    spec: &ProblemSpec,
    config: &SchemeConfig,
    grid: Grid,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<Vec<CellField>> {
    solve_cl_observed(spec, config, grid, t_end, snapshot_times, &mut |_: &CellField, _: f64, _: &CellField| {})
}

pub fn solve_cl_observed(
    spec: &ProblemSpec,
    config: &SchemeConfig,
    grid: Grid,
    t_end: f64,
    snapshot_times: &[f64],
    observer: &mut dyn StepObserver,
) -> Result<Vec<CellField>> {
    let initial = initial_cells(spec, grid);
    let scheme = ClScheme::new(spec, config, &initial)?;
    solve_from(initial, spec, &scheme, t_end, snapshot_times, observer)
}

pub fn solve_from(
    initial: CellField,
    spec: &ProblemSpec,
    scheme: &ClScheme,
    t_end: f64,
    snapshot_times: &[f64],
    observer: &mut dyn StepObserver,
) -> Result<Vec<CellField>> {
    let times = output_times(t_end, snapshot_times)?;
    let mut out = Vec::with_capacity(times.len());
    let mut state = initial;
    for &target in &times {
        while state.time < target {
            let limit = stable_dt(&state, spec, scheme)?;
            let remaining = target - state.time;
            let (dt, last) = if remaining <= limit { (remaining, true) } else { (limit, false) };
            let mut next = step_unchecked(&state, spec, scheme, dt);
            if last {
                next.time = target;
            }
            if !next.is_finite() {
                return Err(Error::NonFinite { time: state.time, last_good: Box::new(state) });
            }
            observer.observe(&state, dt, &next);
            state = next;
        }
        out.push(state.clone());
    }
    Ok(out)
}

/// Every state and step size of a run, as needed by the audits.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<CellField>,
    pub dts: Vec<f64>,
    pub scheme: ClScheme,
}

/// Runs to `t_end` keeping every intermediate state.
pub fn record_cl(spec: &ProblemSpec, config: &SchemeConfig, grid: Grid, t_end: f64) -> Result<Trajectory> {
    let initial = initial_cells(spec, grid);
    let scheme = ClScheme::new(spec, config, &initial)?;
    let mut states = vec![initial.clone()];
    let mut dts = Vec::new();
    let mut obs = |_: &CellField, dt: f64, after: &CellField| {
        dts.push(dt);
        states.push(after.clone());
    };
    solve_from(initial, spec, &scheme, t_end, &[], &mut obs)?;
    Ok(Trajectory { states, dts, scheme })
}

#[derive(Clone, Debug)]
pub struct ViscosityLadder {
    pub entries: Vec<(f64, CellField)>,
    /// `‖u^{ε_k} − u^{ε_{k+1}}‖_{L¹}` for consecutive entries.
    pub distances: Vec<f64>,
}

/// Checks a strictly decreasing positive ε list and the `dx ≤ ε/4` resolution heuristic.
pub(crate) fn validate_eps_list(eps_list: &[f64], dx: f64) -> Result<()> {
    if eps_list.is_empty() {
        return Err(Error::param("eps_list", "empty"));
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::param("eps_list", "entries must be positive"));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("eps_list", "must be strictly decreasing"));
    }
    let smallest = *eps_list.last().unwrap();
    if dx > 0.25 * smallest * (1.0 + 1e-12) {
        return Err(Error::param(
            "eps_list",
            format!("grid too coarse: dx = {dx} exceeds min(eps)/4 = {}", 0.25 * smallest),
        ));
    }
    Ok(())
}

/// Solves the viscous problem for each ε (in parallel across ε).
pub fn viscosity_ladder(
    spec: &ProblemSpec,
    config: &SchemeConfig,
    grid: Grid,
    eps_list: &[f64],
    t_end: f64,
) -> Result<ViscosityLadder> {
    validate_eps_list(eps_list, grid.dx)?;
    let runs = par::parallel_map(eps_list, |&eps| {
        let cfg = config.clone().with_epsilon(eps);
        solve_cl(spec, &cfg, grid, t_end, &[]).map(|mut s| (eps, s.pop().expect("final snapshot")))
    });
    let entries = par::collect_results(runs)?;
    let distances = entries
        .windows(2)
        .map(|w| crate::transforms::l1_distance(&w[0].1, &w[1].1))
        .collect::<Result<Vec<_>>>()?;
    Ok(ViscosityLadder { entries, distances })
}
