//! Problem instances: flux, diffusion, initial data, domain, plus the
//! sampled assumption checks and the affine-interval detection that drives
//! the large-time experiments.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::initial::{InitialData, ScalarFn};
use crate::quadrature::{adaptive_simpson, bisect};

pub type FluxFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SonicFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convexity {
    StrictlyConvex,
    General,
}

/// Convective flux `f(x, u)` with analytic partial derivatives.
#[derive(Clone)]
pub struct FluxModel {
    pub name: String,
    f: FluxFn,
    f_u: FluxFn,
    f_x: FluxFn,
    /// Points in `u` (at a given `x`) where `∂_u f` may change sign.
    sonic: Option<SonicFn>,
    pub x_independent: bool,
    pub convexity: Convexity,
}

impl fmt::Debug for FluxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxModel")
            .field("name", &self.name)
            .field("x_independent", &self.x_independent)
            .field("convexity", &self.convexity)
            .finish()
    }
}

impl FluxModel {
    pub fn new(name: impl Into<String>, f: FluxFn, f_u: FluxFn, f_x: FluxFn) -> Self {
        FluxModel {
            name: name.into(),
            f,
            f_u,
            f_x,
            sonic: None,
            x_independent: false,
            convexity: Convexity::General,
        }
    }

    /// An `x`-independent flux `f(u)` with derivative `f'(u)`.
    pub fn autonomous(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut model = FluxModel::new(
            name,
            Arc::new(move |_, u| f(u)),
            Arc::new(move |_, u| df(u)),
            Arc::new(|_, _| 0.0),
        );
        model.x_independent = true;
        model
    }

    pub fn strictly_convex(mut self) -> Self {
        self.convexity = Convexity::StrictlyConvex;
        self
    }

    pub fn with_sonic_points(mut self, sonic: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.sonic = Some(Arc::new(sonic));
        self
    }

    /// Drops the analytic sonic-point information, forcing quadrature in
    /// [`FluxModel::split_increment`].
    pub fn without_sonic_points(mut self) -> Self {
        self.sonic = None;
        self
    }

    pub fn burgers() -> Self {
        FluxModel::autonomous("burgers", |u| 0.5 * u * u, |u| u)
            .strictly_convex()
            .with_sonic_points(|_| vec![0.0])
    }

    pub fn linear(speed: f64) -> Self {
        FluxModel::autonomous("linear", move |u| speed * u, move |_| speed).with_sonic_points(|_| Vec::new())
    }

    pub fn zero() -> Self {
        FluxModel::autonomous("zero", |_| 0.0, |_| 0.0).with_sonic_points(|_| Vec::new())
    }

    #[inline]
    pub fn f(&self, x: f64, u: f64) -> f64 {
        (self.f)(x, u)
    }

    #[inline]
    pub fn f_u(&self, x: f64, u: f64) -> f64 {
        (self.f_u)(x, u)
    }

    #[inline]
    pub fn f_x(&self, x: f64, u: f64) -> f64 {
        (self.f_x)(x, u)
    }

    pub fn has_sonic_points(&self) -> bool {
        self.sonic.is_some()
    }

    /// Oriented integrals `(∫_a^b max(∂_u f, 0), ∫_a^b min(∂_u f, 0))` at fixed `x`.
    ///
    /// With sonic points available the integrals are exact flux increments over
    /// monotone pieces; otherwise adaptive Simpson to 1e-10.
    pub fn split_increment(&self, x: f64, a: f64, b: f64) -> (f64, f64) {
        if a == b {
            return (0.0, 0.0);
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let (pos, neg) = match &self.sonic {
            Some(sonic) => {
                let mut pos = 0.0;
                let mut neg = 0.0;
                let mut cuts: Vec<f64> = sonic(x).into_iter().filter(|&s| s > lo && s < hi).collect();
                cuts.sort_by(|p, q| p.total_cmp(q));
                let mut left = lo;
                let mut f_left = self.f(x, lo);
                for right in cuts.into_iter().chain(std::iter::once(hi)) {
                    let f_right = self.f(x, right);
                    let delta = f_right - f_left;
                    if delta > 0.0 {
                        pos += delta;
                    } else {
                        neg += delta;
                    }
                    left = right;
                    f_left = f_right;
                }
                debug_assert_eq!(left, hi);
                (pos, neg)
            }
            None => (
                adaptive_simpson(&|s| self.f_u(x, s).max(0.0), lo, hi, 1e-10),
                adaptive_simpson(&|s| self.f_u(x, s).min(0.0), lo, hi, 1e-10),
            ),
        };
        (sign * pos, sign * neg)
    }
}

/// Diffusion coefficients `α(x)` and `β(u)`.
#[derive(Clone)]
pub struct DiffusionModel {
    pub name: String,
    alpha: ScalarFn,
    alpha_x: ScalarFn,
    beta: ScalarFn,
    beta_prime: ScalarFn,
}

impl fmt::Debug for DiffusionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionModel").field("name", &self.name).finish()
    }
}

impl DiffusionModel {
    pub fn new(
        name: impl Into<String>,
        alpha: ScalarFn,
        alpha_x: ScalarFn,
        beta: ScalarFn,
        beta_prime: ScalarFn,
    ) -> Self {
        DiffusionModel { name: name.into(), alpha, alpha_x, beta, beta_prime }
    }

    pub fn none() -> Self {
        DiffusionModel::constant_alpha(0.0)
    }

    pub fn constant_alpha(alpha: f64) -> Self {
        DiffusionModel::new(
            format!("alpha={alpha}"),
            Arc::new(move |_| alpha),
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
        )
    }

    pub fn with_beta(
        mut self,
        beta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        beta_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.beta = Arc::new(beta);
        self.beta_prime = Arc::new(beta_prime);
        self
    }

    #[inline]
    pub fn alpha(&self, x: f64) -> f64 {
        (self.alpha)(x)
    }

    #[inline]
    pub fn alpha_x(&self, x: f64) -> f64 {
        (self.alpha_x)(x)
    }

    #[inline]
    pub fn beta(&self, u: f64) -> f64 {
        (self.beta)(u)
    }

    #[inline]
    pub fn beta_prime(&self, u: f64) -> f64 {
        (self.beta_prime)(u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// `[0, length)` with periodic wrap; the torus has unit length.
    Periodic { length: f64 },
    /// `[-half_width, half_width]` with outflow boundaries.
    Line { half_width: f64 },
}

impl Domain {
    pub fn torus() -> Self {
        Domain::Periodic { length: 1.0 }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Domain::Periodic { length } => length,
            Domain::Line { half_width } => 2.0 * half_width,
        }
    }

    pub fn left(&self) -> f64 {
        match *self {
            Domain::Periodic { .. } => 0.0,
            Domain::Line { half_width } => -half_width,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Domain::Periodic { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.length();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::param("domain.length", format!("must be positive, got {len}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assumption {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
}

impl Assumption {
    pub const ALL: [Assumption; 8] = [
        Assumption::A1,
        Assumption::A2,
        Assumption::A3,
        Assumption::A4,
        Assumption::A5,
        Assumption::A6,
        Assumption::A7,
        Assumption::A8,
    ];

    pub fn all() -> BTreeSet<Assumption> {
        Self::ALL.into_iter().collect()
    }

    pub fn range(from: Assumption, to: Assumption) -> BTreeSet<Assumption> {
        Self::ALL.into_iter().filter(|a| *a >= from && *a <= to).collect()
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A fully specified problem instance.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub name: String,
    pub flux: FluxModel,
    pub diffusion: DiffusionModel,
    pub initial: InitialData,
    pub domain: Domain,
    /// Vanishing-viscosity parameter; zero means the limit problem.
    pub epsilon: f64,
    /// A-priori state box `[u_min, u_max]`.
    pub working_range: (f64, f64),
    /// Extra margin added on both sides whenever the working range is
    /// recomputed from the initial data.
    pub range_padding: f64,
    /// Assumptions the instance is documented to satisfy.
    pub documented: BTreeSet<Assumption>,
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        flux: FluxModel,
        diffusion: DiffusionModel,
        initial: InitialData,
        domain: Domain,
    ) -> Result<Self> {
        domain.validate()?;
        let working_range = default_working_range(&initial, &domain);
        Ok(ProblemSpec {
            name: name.into(),
            flux,
            diffusion,
            initial,
            domain,
            epsilon: 0.0,
            working_range,
            range_padding: 0.0,
            documented: BTreeSet::new(),
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::param("epsilon", format!("must be >= 0, got {epsilon}")));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn with_initial(mut self, initial: InitialData) -> Self {
        self.initial = initial;
        self.reset_working_range();
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Result<Self> {
        domain.validate()?;
        self.domain = domain;
        self.reset_working_range();
        Ok(self)
    }

    /// Widens the working range by `pad` on both sides, now and after any later
    /// change of initial data or domain.
    pub fn with_range_padding(mut self, pad: f64) -> Result<Self> {
        if !(pad >= 0.0 && pad.is_finite()) {
            return Err(Error::param("range_padding", format!("must be >= 0, got {pad}")));
        }
        self.range_padding = pad;
        self.reset_working_range();
        Ok(self)
    }

    fn reset_working_range(&mut self) {
        let (lo, hi) = default_working_range(&self.initial, &self.domain);
        self.working_range = (lo - self.range_padding, hi + self.range_padding);
    }

    pub fn with_working_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::param("working_range", format!("invalid box [{lo}, {hi}]")));
        }
        self.working_range = (lo, hi);
        Ok(self)
    }

    /// `v₀(x) = ∫₀ˣ u₀`.
    pub fn v0(&self, x: f64) -> f64 {
        self.initial.primitive(x)
    }

    pub(crate) fn x_samples(&self, n: usize) -> Vec<f64> {
        let (a, len) = (self.domain.left(), self.domain.length());
        (0..=n).map(|i| a + len * i as f64 / n as f64).collect()
    }
}

/// `[min u₀ − 1, max u₀ + 1]` over a dense sample of the domain.
fn default_working_range(initial: &InitialData, domain: &Domain) -> (f64, f64) {
    let n = 4096;
    let (a, len) = (domain.left(), domain.length());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=n {
        let v = initial.value(a + len * i as f64 / n as f64);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for s in initial.riemann_states() {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    (lo - 1.0, hi + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Satisfied,
    Violated,
    NotCheckable,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    pub x: Option<f64>,
    pub u: Option<f64>,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub status: Status,
    pub witness: Option<Witness>,
    /// Number of evaluations spent.
    pub samples: usize,
    pub note: String,
}

#[derive(Clone, Debug, Default)]
pub struct AssumptionReport {
    pub problem: String,
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    pub fn status(&self, a: Assumption) -> Option<Status> {
        self.checks.iter().find(|c| c.assumption == a).map(|c| c.status)
    }

    pub fn satisfied(&self) -> BTreeSet<Assumption> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Satisfied)
            .map(|c| c.assumption)
            .collect()
    }

    pub fn violated(&self) -> Vec<&AssumptionCheck> {
        self.checks.iter().filter(|c| c.status == Status::Violated).collect()
    }

    pub fn summary(&self) -> String {
        let bad: Vec<String> = self
            .violated()
            .iter()
            .map(|c| match c.witness {
                Some(w) => format!("{} (x={:?}, u={:?}: {})", c.assumption, w.x, w.u, c.note),
                None => format!("{} ({})", c.assumption, c.note),
            })
            .collect();
        if bad.is_empty() {
            format!("problem `{}`: no assumption violated at sampling budget", self.problem)
        } else {
            format!("problem `{}` violates {}", self.problem, bad.join("; "))
        }
    }
}

const X_SAMPLES: usize = 128;
const U_SAMPLES: usize = 256;

fn eval2(what: &'static str, x: f64, u: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { what, x, u })
    }
}

fn eval1x(what: &'static str, x: f64, v: f64) -> Result<f64> {
    eval2(what, x, f64::NAN, v)
}

fn eval1u(what: &'static str, u: f64, v: f64) -> Result<f64> {
    eval2(what, f64::NAN, u, v)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Checks the requested assumptions by dense sampling on the working range.
///
/// Verdicts mean "no counterexample at the sampling budget", never a proof.
pub fn validate_assumptions(spec: &ProblemSpec, which: &BTreeSet<Assumption>) -> Result<AssumptionReport> {
    let mut report = AssumptionReport { problem: spec.name.clone(), checks: Vec::new() };
    for &a in which {
        let check = match a {
            Assumption::A1 => check_a1(spec)?,
            Assumption::A2 => check_a2(spec)?,
            Assumption::A3 => check_a3(spec)?,
            Assumption::A4 => check_a4(spec)?,
            Assumption::A5 => check_a5(spec)?,
            Assumption::A6 => check_a6(spec)?,
            Assumption::A7 => check_a7(spec)?,
            Assumption::A8 => check_a8(spec)?,
        };
        report.checks.push(check);
    }
    Ok(report)
}

fn radius(spec: &ProblemSpec) -> f64 {
    let (lo, hi) = spec.working_range;
    lo.abs().max(hi.abs()).max(1e-3)
}

fn sup_alpha(spec: &ProblemSpec, xs: &[f64]) -> Result<f64> {
    let mut s: f64 = 0.0;
    for &x in xs {
        s = s.max(eval1x("alpha", x, spec.diffusion.alpha(x))?.abs());
    }
    Ok(s)
}

fn sup_beta_prime(spec: &ProblemSpec, r: f64) -> Result<f64> {
    let mut s: f64 = 0.0;
    for u in linspace(-r, r, 4 * U_SAMPLES) {
        s = s.max(eval1u("beta_prime", u, spec.diffusion.beta_prime(u))?.abs());
    }
    Ok(s)
}

fn check_a1(spec: &ProblemSpec) -> Result<AssumptionCheck> {
    let xs = spec.x_samples(X_SAMPLES);
    let r = radius(spec);
    let k = sup_alpha(spec, &xs)? + sup_beta_prime(spec, 4.0 * r)? + 1.0;
    let mut samples = 0;
    // inf over x of ½f² − K|∂_x f · u|
    let mut coercivity = |u: f64| -> Result<(f64, f64)> {
        let mut best = (f64::INFINITY, f64::NAN);
        for &x in &xs {
            let f = eval2("f", x, u, spec.flux.f(x, u))?;
            let fx = eval2("f_x", x, u, spec.flux.f_x(x, u))?;
            samples += 1;
            let g = 0.5 * f * f - k * (fx * u).abs();
            if g < best.0 {
                best = (g, x);
            }
        }
        Ok(best)
    };
    let mut shells = Vec::new();
    for scale in [1.0, 2.0, 4.0] {
        let u = scale * r;
        let (gp, xp) = coercivity(u)?;
        let (gm, xm) = coercivity(-u)?;
        shells.push(if gp <= gm { (gp, xp, u) } else { (gm, xm, -u) });
    }
    // escape check: the outermost shell must be positive and still growing
    let grows = shells[1].0 < shells[2].0 && shells[2].0 > 0.0;
    let (g4, x4, u4) = shells[2];
    Ok(AssumptionCheck {
        assumption: Assumption::A1,
        status: if grows { Status::Satisfied } else { Status::Violated },
        witness: (!grows).then_some(Witness { x: Some(x4), u: Some(u4), value: g4 }),
        samples,
        note: format!(
            "coercivity inf_x at |u| = {r:.3}, {:.3}, {:.3}: {:.4e}, {:.4e}, {:.4e}; growth beyond 4x not checkable",
            2.0 * r,
            4.0 * r,
            shells[0].0,
            shells[1].0,
            shells[2].0
        ),
    })
}

fn check_a2(spec: &ProblemSpec) -> Result<AssumptionCheck> {
    let xs = spec.x_samples(X_SAMPLES);
    let (lo, hi) = spec.working_range;
    let us = linspace(lo, hi, U_SAMPLES / 4);
    let h = 1e-5;
    let dx = spec.domain.length() / X_SAMPLES as f64;
    let (mut l1_fx, mut l1_fxx) = (0.0, 0.0);
    for &x in &xs {
        let (mut s1, mut s2): (f64, f64) = (0.0, 0.0);
        for &u in &us {
            let fx = eval2("f_x", x, u, spec.flux.f_x(x, u))?;
            let fxx = eval2("f_xx", x, u, (spec.flux.f_x(x + h, u) - spec.flux.f_x(x - h, u)) / (2.0 * h))?;
            s1 = s1.max(fx.abs());
            s2 = s2.max(fxx.abs());
        }
        l1_fx += s1 * dx;
        l1_fxx += s2 * dx;
    }
    Ok(AssumptionCheck {
        assumption: Assumption::A2,
        status: Status::Satisfied,
        witness: None,
        samples: xs.len() * us.len() * 3,
        note: format!(
            "over the {} window: L1_x sup_u |f_x| = {l1_fx:.4e}, L1_x sup_u |f_xx| = {l1_fxx:.4e}",
            if spec.domain.is_periodic() { "period" } else { "truncation" }
        ),
    })
}

fn check_a3(spec: &ProblemSpec) -> Result<AssumptionCheck> {
    let xs = spec.x_samples(X_SAMPLES);
    let (lo, hi) = spec.working_range;
    let us = linspace(lo, hi, U_SAMPLES / 4);
    let h = 1e-5;
    let (mut s_fu, mut s_fux): (f64, f64) = (0.0, 0.0);
    for &x in &xs {
        for &u in &us {
            s_fu = s_fu.max(eval2("f_u", x, u, spec.flux.f_u(x, u))?.abs());
            let fux = (spec.flux.f_u(x + h, u) - spec.flux.f_u(x - h, u)) / (2.0 * h);
            s_fux = s_fux.max(eval2("f_ux", x, u, fux)?.abs());
        }
    }
    Ok(AssumptionCheck {
        assumption: Assumption::A3,
        status: Status::Satisfied,
        witness: None,
        samples: xs.len() * us.len() * 3,
        note: format!("sup |f_u| = {s_fu:.4e}, sup |f_ux| = {s_fux:.4e} on the working box"),
    })
}

fn check_a4(spec: &ProblemSpec) -> Result<AssumptionCheck> {
    let xs = spec.x_samples(X_SAMPLES);
    let r = radius(spec);
    let mut samples = 0;
    for &x in &xs {
        let a = eval1x("alpha", x, spec.diffusion.alpha(x))?;
        eval1x("alpha_x", x, spec.diffusion.alpha_x(x))?;
        samples += 1;
        if a < 0.0 {
            return Ok(AssumptionCheck {
                assumption: Assumption::A4,
                status: Status::Violated,
                witness: Some(Witness { x: Some(x), u: None, value: a }),
                samples,
                note: "alpha is negative".into(),
            });
        }
    }
    let h = 1e-6;
    for u in linspace(-2.0 * r, 2.0 * r, 2 * U_SAMPLES) {
        let bp = eval1u("beta_prime", u, spec.diffusion.beta_prime(u))?;
        let b = eval1u("beta", u, spec.diffusion.beta(u))?;
        samples += 3;
        if bp < 0.0 {
            return Ok(AssumptionCheck {
                assumption: Assumption::A4,
                status: Status::Violated,
                witness: Some(Witness { x: None, u: Some(u), value: bp }),
                samples,
                note: "beta is decreasing (beta' < 0)".into(),
            });
        }
        let fd = (spec.diffusion.beta(u + h) - spec.diffusion.beta(u - h)) / (2.0 * h);
        if (fd - bp).abs() > 1e-5 * bp.abs().max(1.0) {
            return Ok(AssumptionCheck {
                assumption: Assumption::A4,
                status: Status::Violated,
                witness: Some(Witness { x: None, u: Some(u), value: fd - bp }),
                samples,
                note: format!("beta' = {bp} inconsistent with difference quotient of beta ({b} at u)"),
            });
        }
    }
    Ok(AssumptionCheck {
        assumption: Assumption::A4,
        status: Status::Satisfied,
        witness: None,
        samples,
        note: "alpha >= 0 and beta nondecreasing at all samples".into(),
    })
}

fn check_a5(spec: &ProblemSpec) -> Result<AssumptionCheck> {
    let (a, len) = (spec.domain.left(), spec.domain.length());
    let quotient = |n: usize| -> (f64, f64, f64) {
        let h = len / n as f64;
        let mut best = (0.0, a, 0.0);
        let mut tv = 0.0;
        let mut prev = spec.initial.value(a);
        for i in 1..=n {
            let x = a + h * i as f64;
            let cur = spec.initial.value(x);
            let q = (cur - prev).abs() / h;
            tv += (cur - prev).abs();
            if q > best.0 {
                best = (q, x - 0.5 * h, 0.0);
            }
            prev = cur;
        }
        best.2 = tv;
        best
    };
    let coarse = quotient(2048);
    let fine = quotient(4096);
    let jump = !spec.initial.is_lipschitz() || (fine.0 > 1.8 * coarse.0 && fine.0 > 1e3);
    Ok(AssumptionCheck {
        assumption: Assumption::A5,
        status: if jump { Status::Violated } else { Status::Satisfied },
        witness: jump.then_some(Witness { x: Some(fine.1), u: None, value: fine.0 }),
        samples: 2048 + 4096,
        note: format!(
            "max difference quotient {:.4e} (h/2: {:.4e}), total variation {:.4e}",
            coarse.0, fine.0, fine.2
        ),
    })
}

fn check_a6(spec: &ProblemSpec) -> Result<AssumptionCheck> {
    let Domain::Periodic { length } = spec.domain else {
        return Ok(AssumptionCheck {
            assumption: Assumption::A6,
            status: Status::NotCheckable,
            witness: None,
            samples: 0,
            note: "whole-line domain: periodicity does not apply".into(),
        });
    };
    let (lo, hi) = spec.working_range;
    let mut samples = 0;
    let tol = 1e-9;
    let violated = |x: Option<f64>, u: Option<f64>, value: f64, note: &str, samples| AssumptionCheck {
        assumption: Assumption::A6,
        status: Status::Violated,
        witness: Some(Witness { x, u, value }),
        samples,
        note: note.to_string(),
    };
    for u in linspace(lo, hi, U_SAMPLES) {
        let d = eval2("f", 0.0, u, spec.flux.f(0.0, u))? - eval2("f", length, u, spec.flux.f(length, u))?;
        samples += 2;
        if d.abs() > tol * (1.0 + spec.flux.f(0.0, u).abs()) {
            return Ok(violated(Some(0.0), Some(u), d, "f(0,u) != f(L,u)", samples));
        }
    }
    for x in [0.0, 0.25 * length, 0.5 * length] {
        let d = spec.diffusion.alpha(x) - spec.diffusion.alpha(x + length);
        if d.abs() > tol {
            return Ok(violated(Some(x), None, d, "alpha not periodic", samples));
        }
        let d = spec.initial.value(x) - spec.initial.value(x + length);
        if d.abs() > tol {
            return Ok(violated(Some(x), None, d, "u0 not periodic", samples));
        }
    }
    let jump = spec.v0(length) - spec.v0(0.0);
    if jump.abs() > tol {
        return Ok(violated(
            Some(length),
            None,
            jump,
            "v0 not periodic (u0 has nonzero mean)",
            samples,
        ));
    }
    Ok(AssumptionCheck {
        assumption: Assumption::A6,
        status: Status::Satisfied,
        witness: None,
        samples,
        note: format!("period {length}"),
    })
}

fn check_a7(spec: &ProblemSpec) -> Result<AssumptionCheck> {
    let xs = spec.x_samples(X_SAMPLES / 4);
    let (lo, hi) = spec.working_range;
    let mut samples = 0;
    for u in linspace(lo, hi, U_SAMPLES / 8) {
        let f0 = spec.flux.f(xs[0], u);
        for &x in &xs[1..] {
            samples += 1;
            let d = spec.flux.f(x, u) - f0;
            if d.abs() > 1e-12 * (1.0 + f0.abs()) {
                return Ok(AssumptionCheck {
                    assumption: Assumption::A7,
                    status: Status::Violated,
                    witness: Some(Witness { x: Some(x), u: Some(u), value: d }),
                    samples,
                    note: "f depends on x".into(),
                });
            }
        }
    }
    for &x in &xs {
        samples += 1;
        let a = spec.diffusion.alpha(x);
        if a != 0.0 {
            return Ok(AssumptionCheck {
                assumption: Assumption::A7,
                status: Status::Violated,
                witness: Some(Witness { x: Some(x), u: None, value: a }),
                samples,
                note: "alpha is not identically zero".into(),
            });
        }
    }
    Ok(AssumptionCheck {
        assumption: Assumption::A7,
        status: if spec.flux.x_independent { Status::Satisfied } else { Status::Violated },
        witness: None,
        samples,
        note: if spec.flux.x_independent {
            "f = f(u) and alpha = 0 at all samples".into()
        } else {
            "flux not flagged x-independent".into()
        },
    })
}

fn check_a8(spec: &ProblemSpec) -> Result<AssumptionCheck> {
    let xs = spec.x_samples(X_SAMPLES / 4);
    let r = radius(spec);
    let us = linspace(-2.0 * r, 2.0 * r, U_SAMPLES);
    let mut samples = 0;
    for &x in &xs {
        let mut prev = eval2("f_u", x, us[0], spec.flux.f_u(x, us[0]))?;
        for &u in &us[1..] {
            let cur = eval2("f_u", x, u, spec.flux.f_u(x, u))?;
            samples += 1;
            if cur <= prev {
                return Ok(AssumptionCheck {
                    assumption: Assumption::A8,
                    status: Status::Violated,
                    witness: Some(Witness { x: Some(x), u: Some(u), value: cur - prev }),
                    samples,
                    note: "u -> f(x,u) not strictly convex (f_u not increasing)".into(),
                });
            }
            prev = cur;
        }
    }
    let b0 = spec.diffusion.beta(0.0);
    for &u in &us {
        samples += 1;
        let db = spec.diffusion.beta(u) - b0;
        if db != 0.0 || spec.diffusion.beta_prime(u) != 0.0 {
            return Ok(AssumptionCheck {
                assumption: Assumption::A8,
                status: Status::Violated,
                witness: Some(Witness { x: None, u: Some(u), value: db }),
                samples,
                note: "beta is not identically zero".into(),
            });
        }
    }
    Ok(AssumptionCheck {
        assumption: Assumption::A8,
        status: Status::Satisfied,
        witness: None,
        samples,
        note: "f_u strictly increasing in u, beta = 0 at all samples".into(),
    })
}

/// The interval `I = [a, b] ∋ 0` on which `f` is affine and `β` constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineInterval {
    pub a: f64,
    pub b: f64,
    /// Drift speed: `f(u) − f(0) = d·u` on `I`.
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `a = b = 0`.
    pub degenerate: bool,
}

impl AffineInterval {
    pub fn contains(&self, u: f64) -> bool {
        u >= self.a && u <= self.b
    }
}

pub const AFFINE_SCAN_POINTS: usize = 4096;

/// [`detect_affine_interval_with`] at the default scan resolution.
pub fn detect_affine_interval(
    flux: &FluxModel,
    diffusion: &DiffusionModel,
    working_range: (f64, f64),
    tol: f64,
) -> Result<AffineInterval> {
    detect_affine_interval_with(flux, diffusion, working_range, tol, AFFINE_SCAN_POINTS)
}

/// Scans outward from `u = 0` on an `n_scan`-point grid over the working
/// range while `|∂_u f(u) − ∂_u f(0)| ≤ tol/2`, `|β′(u)| ≤ tol/2` and
/// `|β(u) − β(0)| ≤ tol/2`; the first failing cell is bisected to 1e-10.
pub fn detect_affine_interval_with(
    flux: &FluxModel,
    diffusion: &DiffusionModel,
    working_range: (f64, f64),
    tol: f64,
    n_scan: usize,
) -> Result<AffineInterval> {
    if !flux.x_independent {
        return Err(Error::Structural(
            "affine-interval detection requires an x-independent flux".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    if n_scan < 2 {
        return Err(Error::param("n_scan", "need at least two scan points"));
    }
    let lo = working_range.0.min(0.0);
    let hi = working_range.1.max(0.0);
    let h = (hi - lo) / (n_scan - 1) as f64;
    let x = 0.0;
    let slope0 = flux.f_u(x, 0.0);
    let beta0 = diffusion.beta(0.0);
    let half = 0.5 * tol;
    let affine_at = |u: f64| {
        (flux.f_u(x, u) - slope0).abs() <= half
            && diffusion.beta_prime(u).abs() <= half
            && (diffusion.beta(u) - beta0).abs() <= half
    };
    let endpoint = |dir: f64, limit: f64| -> f64 {
        let mut last_good = 0.0;
        let mut k = 1usize;
        loop {
            let u = dir * k as f64 * h;
            if dir * u > dir * limit + 1e-15 {
                return limit;
            }
            if !affine_at(u) {
                let sign_fn = |s: f64| if affine_at(s) { -1.0 } else { 1.0 };
                return bisect(sign_fn, last_good, u, 1e-10).unwrap_or(last_good);
            }
            last_good = u;
            k += 1;
        }
    };
    let mut b = if hi > 0.0 { endpoint(1.0, hi) } else { 0.0 };
    let mut a = if lo < 0.0 { endpoint(-1.0, lo) } else { 0.0 };
    let degenerate = b - a < h;
    if degenerate {
        a = 0.0;
        b = 0.0;
    }
    let d = if degenerate { slope0 } else { (flux.f(x, b) - flux.f(x, a)) / (b - a) };
    Ok(AffineInterval { a, b, d, c1: d, c2: flux.f(x, 0.0), c3: beta0, degenerate })
}
