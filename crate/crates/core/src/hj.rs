//! Monotone finite-difference solver for
//! `v_t + f(x, v_x) = (α(x) + β′(v_x)) v_xx + ε v_xx`.

use crate::cl::{output_times, Theta};
use crate::error::{Error, Result};
use crate::field::{Boundary, Grid, NodalField};
use crate::problem::{FluxModel, ProblemSpec};

/// Discretisation of the second-order term at node `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiffusionForm {
    /// `[(α+ε)(p⁺−p⁻) + β(p⁺) − β(p⁻)] / dx`; the primitive of the
    /// finite-volume diffusion flux, monotone under the usual CFL bound.
    #[default]
    BetaDifference,
    /// `(α + β′(D⁰v) + ε)·D²v` with the centred slope.
    CenteredBetaPrime,
}

#[derive(Clone, Debug)]
pub struct HjSchemeConfig {
    pub theta: Theta,
    pub cfl: f64,
    /// Overrides `ProblemSpec::epsilon` when set.
    pub epsilon: Option<f64>,
    pub max_dt: Option<f64>,
    pub diffusion_form: DiffusionForm,
}

impl Default for HjSchemeConfig {
    fn default() -> Self {
        HjSchemeConfig {
            theta: Theta::Inflated(1.5),
            cfl: 0.9,
            epsilon: None,
            max_dt: None,
            diffusion_form: DiffusionForm::BetaDifference,
        }
    }
}

impl HjSchemeConfig {
    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn with_theta(mut self, theta: Theta) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::param("cfl", format!("must lie in (0, 1], got {}", self.cfl)));
        }
        match self.theta {
            Theta::Fixed(t) if !(t >= 0.0) => return Err(Error::param("theta", "must be >= 0")),
            Theta::Inflated(k) if !(k >= 1.0) => return Err(Error::param("theta", "inflation must be >= 1")),
            _ => {}
        }
        if let Some(e) = self.epsilon {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::param("epsilon", format!("must be >= 0, got {e}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HjScheme {
    pub theta: f64,
    pub cfl: f64,
    pub epsilon: f64,
    pub max_dt: Option<f64>,
    pub diffusion_form: DiffusionForm,
}

impl HjScheme {
    /// Resolves θ from the slope range of `initial`.
    pub fn new(spec: &ProblemSpec, config: &HjSchemeConfig, initial: &NodalField) -> Result<Self> {
        config.validate()?;
        let theta = match config.theta {
            Theta::Fixed(t) => t,
            Theta::Inflated(k) => k * max_speed_on_slopes(spec, initial)?,
        };
        Ok(HjScheme {
            theta,
            cfl: config.cfl,
            epsilon: config.epsilon.unwrap_or(spec.epsilon),
            max_dt: config.max_dt,
            diffusion_form: config.diffusion_form,
        })
    }
}

/// `max |∂_u f(x_i, p)|` over nodes and 33 slopes spanning the field's slope range.
fn max_speed_on_slopes(spec: &ProblemSpec, v: &NodalField) -> Result<f64> {
    let (lo, hi) = v.slope_range();
    let g = v.grid;
    let mut s: f64 = 0.0;
    for i in 0..=g.n {
        let x = g.face(i);
        for k in 0..=32 {
            let p = lo + (hi - lo) * k as f64 / 32.0;
            let a = spec.flux.f_u(x, p).abs();
            if !a.is_finite() {
                return Err(Error::Evaluation { what: "f_u", x, u: p });
            }
            s = s.max(a);
        }
    }
    Ok(s)
}

/// Lax–Friedrichs Hamiltonian `f(x, (p⁻+p⁺)/2) − θ(p⁺−p⁻)/2`.
#[inline]
pub fn numerical_hamiltonian(p_minus: f64, p_plus: f64, x: f64, flux: &FluxModel, theta: f64) -> f64 {
    flux.f(x, 0.5 * (p_minus + p_plus)) - 0.5 * theta * (p_plus - p_minus)
}

/// One-sided slopes `(D⁻v_i, D⁺v_i)` with periodic wrap or extrapolated ends.
#[inline]
fn slopes(v: &NodalField, i: usize) -> (f64, f64) {
    let g = v.grid;
    let n = g.n;
    let dx = g.dx;
    match g.boundary {
        Boundary::Periodic => {
            let jump = v.values[n] - v.values[0];
            let left = if i == 0 { v.values[n - 1] - jump } else { v.values[i - 1] };
            ((v.values[i] - left) / dx, (v.values[i + 1] - v.values[i]) / dx)
        }
        Boundary::Outflow => {
            if i == 0 {
                let p = (v.values[1] - v.values[0]) / dx;
                (p, p)
            } else if i == n {
                let p = (v.values[n] - v.values[n - 1]) / dx;
                (p, p)
            } else {
                ((v.values[i] - v.values[i - 1]) / dx, (v.values[i + 1] - v.values[i]) / dx)
            }
        }
    }
}

fn updated_nodes(g: &Grid) -> usize {
    match g.boundary {
        Boundary::Periodic => g.n,
        Boundary::Outflow => g.n + 1,
    }
}

#[inline]
fn second_order_term(spec: &ProblemSpec, scheme: &HjScheme, x: f64, pm: f64, pp: f64, dx: f64) -> f64 {
    let d = &spec.diffusion;
    match scheme.diffusion_form {
        DiffusionForm::BetaDifference => {
            ((d.alpha(x) + scheme.epsilon) * (pp - pm) + d.beta(pp) - d.beta(pm)) / dx
        }
        DiffusionForm::CenteredBetaPrime => {
            (d.alpha(x) + d.beta_prime(0.5 * (pm + pp)) + scheme.epsilon) * (pp - pm) / dx
        }
    }
}

/// `cfl / (θ/dx + 2·max(α+β′+ε)/dx²)`, `β′` taken at the node's one-sided slopes.
pub fn stable_dt_hj(state: &NodalField, spec: &ProblemSpec, scheme: &HjScheme) -> Result<f64> {
    let g = state.grid;
    let dx = g.dx;
    let mut diff: f64 = 0.0;
    for i in 0..updated_nodes(&g) {
        let x = g.face(i);
        let (pm, pp) = slopes(state, i);
        let fu = spec.flux.f_u(x, 0.5 * (pm + pp)).abs();
        if !fu.is_finite() {
            return Err(Error::Evaluation { what: "f_u", x, u: 0.5 * (pm + pp) });
        }
        if fu > scheme.theta * (1.0 + 1e-12) {
            return Err(Error::Monotonicity { theta: scheme.theta, speed: fu });
        }
        let d = &spec.diffusion;
        let bp = match scheme.diffusion_form {
            DiffusionForm::BetaDifference => d.beta_prime(pm).max(d.beta_prime(pp)),
            DiffusionForm::CenteredBetaPrime => d.beta_prime(0.5 * (pm + pp)),
        };
        let a = d.alpha(x) + bp + scheme.epsilon;
        if !a.is_finite() {
            return Err(Error::Evaluation { what: "diffusivity", x, u: pm });
        }
        diff = diff.max(a);
    }
    let denom = scheme.theta / dx + 2.0 * diff / (dx * dx);
    let dt = if denom > 0.0 { scheme.cfl / denom } else { f64::INFINITY };
    Ok(match scheme.max_dt {
        Some(m) => dt.min(m),
        None => dt,
    })
}

/// Nodal increments `(v^{n+1} − v^n)/dt = −Ĥ + diffusion` for all nodes.
pub fn nodal_rates(state: &NodalField, spec: &ProblemSpec, scheme: &HjScheme) -> Vec<f64> {
    let g = state.grid;
    let mut rates: Vec<f64> = (0..updated_nodes(&g))
        .map(|i| {
            let x = g.face(i);
            let (pm, pp) = slopes(state, i);
            second_order_term(spec, scheme, x, pm, pp, g.dx)
                - numerical_hamiltonian(pm, pp, x, &spec.flux, scheme.theta)
        })
        .collect();
    if g.boundary == Boundary::Periodic {
        rates.push(rates[0]);
    }
    rates
}

pub(crate) fn step_hj_unchecked(state: &NodalField, spec: &ProblemSpec, scheme: &HjScheme, dt: f64) -> NodalField {
    let rates = nodal_rates(state, spec, scheme);
    let mut values: Vec<f64> = state.values.iter().zip(&rates).map(|(v, r)| v + dt * r).collect();
    if state.grid.boundary == Boundary::Periodic {
        let n = state.grid.n;
        values[n] = values[0] + state.jump();
    }
    NodalField { grid: state.grid, values, time: state.time + dt, gauge: state.gauge }
}

/// One forward-Euler step. Refuses `dt` above the stable limit.
pub fn step_hj(state: &NodalField, spec: &ProblemSpec, scheme: &HjScheme, dt: f64) -> Result<NodalField> {
    let limit = stable_dt_hj(state, spec, scheme)?;
    if !(dt >= 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Stability { dt, limit });
    }
    Ok(step_hj_unchecked(state, spec, scheme, dt))
}

/// `v₀ = ∫₀ˣ u₀` sampled at the nodes.
pub fn initial_nodes(spec: &ProblemSpec, grid: Grid) -> NodalField {
    let mut v = NodalField::from_fn(grid, |x| spec.v0(x));
    v.values[grid.anchor()] = 0.0;
    v
}

pub fn solve_hj(
    spec: &ProblemSpec,
    config: &HjSchemeConfig,
    grid: Grid,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<Vec<NodalField>> {
    let initial = initial_nodes(spec, grid);
    let scheme = HjScheme::new(spec, config, &initial)?;
    solve_hj_from(initial, spec, &scheme, t_end, snapshot_times)
}

/// Runs from an arbitrary initial field; snapshots hit exactly.
pub fn solve_hj_from(
    initial: NodalField,
    spec: &ProblemSpec,
    scheme: &HjScheme,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<Vec<NodalField>> {
    let times = output_times(t_end, snapshot_times)?;
    let mut out = Vec::with_capacity(times.len());
    let mut state = initial;
    for &target in &times {
        while state.time < target {
            let limit = stable_dt_hj(&state, spec, scheme)?;
            let remaining = target - state.time;
            let (dt, last) = if remaining <= limit { (remaining, true) } else { (limit, false) };
            let mut next = step_hj_unchecked(&state, spec, scheme, dt);
            if last {
                next.time = target;
            }
            if !next.is_finite() {
                return Err(Error::NonFinite {
                    time: state.time,
                    last_good: Box::new(crate::transforms::derivative(&state)),
                });
            }
            state = next;
        }
        out.push(state.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::InitialData;
    use crate::problem::{DiffusionModel, Domain};

    #[test]
    fn hamiltonian_examples() {
        let b = FluxModel::burgers();
        assert_eq!(numerical_hamiltonian(1.0, -1.0, 0.0, &b, 1.0), 1.0);
        for p in [-2.0, -0.3, 0.0, 1.7] {
            assert_eq!(numerical_hamiltonian(p, p, 0.0, &b, 3.0), b.f(0.0, p));
        }
    }

    #[test]
    fn zero_data_stays_zero_and_constant_flux_shift() {
        let grid = Grid::periodic(32).unwrap();
        let spec = ProblemSpec::new(
            "b",
            FluxModel::burgers(),
            DiffusionModel::none(),
            InitialData::Constant { value: 0.0 },
            Domain::torus(),
        )
        .unwrap();
        let cfg = HjSchemeConfig::default().with_theta(Theta::Fixed(1.0));
        let out = solve_hj(&spec, &cfg, grid, 0.5, &[]).unwrap();
        assert!(out[0].values.iter().all(|&v| v == 0.0));

        let shifted = FluxModel::autonomous("b+1", |p| 0.5 * p * p + 1.0, |p| p);
        let spec = ProblemSpec { flux: shifted, ..spec };
        let out = solve_hj(&spec, &cfg, grid, 0.5, &[]).unwrap();
        assert!(out[0].values.iter().all(|&v| (v + 0.5).abs() < 1e-14));
    }

    #[test]
    fn translation_by_one_cell() {
        let grid = Grid::periodic(64).unwrap();
        let spec = ProblemSpec::new(
            "b",
            FluxModel::burgers(),
            DiffusionModel::constant_alpha(0.0),
            InitialData::sine(1.0),
            Domain::torus(),
        )
        .unwrap();
        let v0 = initial_nodes(&spec, grid);
        let mut shifted = v0.clone();
        for i in 0..grid.n {
            shifted.values[i] = v0.values[(i + 1) % grid.n];
        }
        shifted.values[grid.n] = shifted.values[0];
        let scheme = HjScheme::new(&spec, &HjSchemeConfig::default(), &v0).unwrap();
        let a = solve_hj_from(v0, &spec, &scheme, 0.3, &[]).unwrap().pop().unwrap();
        let b = solve_hj_from(shifted, &spec, &scheme, 0.3, &[]).unwrap().pop().unwrap();
        for i in 0..grid.n {
            assert!((b.values[i] - a.values[(i + 1) % grid.n]).abs() < 1e-13);
        }
    }
}
