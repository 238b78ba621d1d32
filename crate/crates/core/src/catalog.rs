//! Built-in problem instances.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::initial::InitialData;
use crate::problem::{Assumption, DiffusionModel, Domain, FluxModel, ProblemSpec};

pub type Params = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug)]
pub struct ParamDoc {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub doc: &'static str,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: Vec<ParamDoc>,
    /// Assumptions validated as satisfied with default parameters.
    pub documented: Vec<Assumption>,
}

const fn p(name: &'static str, default: f64, min: f64, max: f64, doc: &'static str) -> ParamDoc {
    ParamDoc { name, default, min, max, doc }
}

use Assumption::*;

pub fn catalog_entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "burgers",
            summary: "f(u) = u^2/2, no diffusion, u0 = mean + amplitude*sin(2*pi*k*x)",
            params: vec![
                p("amplitude", 1.0, -10.0, 10.0, "sine amplitude"),
                p("wavenumber", 1.0, 1.0, 16.0, "integer wavenumber k"),
                p("mean", 0.0, -5.0, 5.0, "mean of u0"),
            ],
            documented: vec![A1, A2, A3, A4, A5, A6, A7, A8],
        },
        CatalogEntry {
            name: "linear-advection",
            summary: "f(u) = c*u, no diffusion, u0 = amplitude*sin(2*pi*x)",
            params: vec![
                p("speed", 1.0, -10.0, 10.0, "transport speed c (nonzero)"),
                p("amplitude", 1.0, -10.0, 10.0, "sine amplitude"),
            ],
            documented: vec![A1, A2, A3, A4, A5, A6, A7],
        },
        CatalogEntry {
            name: "flat-middle-flux",
            summary: "f(u) = d*u + s*max(|u|-w,0)^2, affine on [-w,w]",
            params: vec![
                p("width", 1.0, 0.0, 10.0, "half-width w of the affine interval"),
                p("drift", 2.0, -10.0, 10.0, "slope d on the affine interval"),
                p("steepness", 1.0, 0.01, 10.0, "curvature s outside the interval"),
                p("amplitude", 0.5, -10.0, 10.0, "sine amplitude of u0"),
            ],
            documented: vec![A1, A2, A3, A4, A5, A6, A7],
        },
        CatalogEntry {
            name: "x-dependent-convex",
            summary: "f(x,u) = u^2/2 + A*sin(2*pi*x)*u, optional constant alpha",
            params: vec![
                p("phi_amplitude", 1.0, -5.0, 5.0, "amplitude A of phi(x) = A*sin(2*pi*x)"),
                p("alpha", 0.0, 0.0, 10.0, "constant diffusion coefficient"),
                p("amplitude", 1.0, -10.0, 10.0, "sine amplitude of u0"),
                p("mean", 0.0, -5.0, 5.0, "mean of u0"),
            ],
            documented: vec![A1, A2, A3, A4, A5, A6, A8],
        },
        CatalogEntry {
            name: "heat",
            summary: "f = 0, constant alpha, u0 = amplitude*sin(2*pi*x)",
            params: vec![
                p("alpha", 1.0, 0.0, 100.0, "diffusion coefficient"),
                p("amplitude", 1.0, -10.0, 10.0, "sine amplitude"),
            ],
            documented: vec![A2, A3, A4, A5, A6],
        },
        CatalogEntry {
            name: "porous-medium",
            summary: "f = 0, beta(u) = u|u|^(m-1), compactly supported cos^2 bump",
            params: vec![
                p("m", 2.0, 1.0, 5.0, "porous-medium exponent"),
                p("height", 1.0, 0.0, 10.0, "bump height"),
                p("half_width", 0.15, 0.01, 0.5, "bump half-width"),
            ],
            documented: vec![A2, A3, A4, A5, A7],
        },
        CatalogEntry {
            name: "plateau-beta",
            summary: "f(u) = u^2/2, beta' = kappa*clamp(|u|-w, 0, 1), degenerate for |u| <= w",
            params: vec![
                p("kappa", 0.1, 0.0, 10.0, "plateau height of beta'"),
                p("width", 1.0, 0.0, 10.0, "degenerate half-width w"),
                p("amplitude", 2.0, -10.0, 10.0, "sine amplitude of u0"),
            ],
            documented: vec![A1, A2, A3, A4, A5, A6, A7],
        },
    ]
}

fn resolve(entry: &CatalogEntry, params: &Params) -> Result<BTreeMap<&'static str, f64>> {
    for key in params.keys() {
        if !entry.params.iter().any(|d| d.name == key) {
            return Err(Error::param(key, format!("unknown parameter for `{}`", entry.name)));
        }
    }
    let mut out = BTreeMap::new();
    for d in &entry.params {
        let v = params.get(d.name).copied().unwrap_or(d.default);
        if !(v >= d.min && v <= d.max) {
            return Err(Error::param(d.name, format!("{v} outside [{}, {}]", d.min, d.max)));
        }
        out.insert(d.name, v);
    }
    Ok(out)
}

/// Builds a catalog instance on the unit torus.
pub fn builtin_catalog(name: &str, params: &Params) -> Result<ProblemSpec> {
    let entries = catalog_entries();
    let entry = entries.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownProblem(name.to_string()))?;
    let v = resolve(entry, params)?;
    let torus = Domain::torus();
    let sine = |amplitude: f64| InitialData::sine(amplitude);
    let mut spec = match name {
        "burgers" => {
            let k = v["wavenumber"];
            if k.fract() != 0.0 {
                return Err(Error::param("wavenumber", "must be an integer on the torus"));
            }
            let u0 = InitialData::Sine { amplitude: v["amplitude"], wavenumber: k, phase: 0.0, mean: v["mean"] };
            ProblemSpec::new(name, FluxModel::burgers(), DiffusionModel::none(), u0, torus)?
        }
        "linear-advection" => {
            let c = v["speed"];
            if c == 0.0 {
                return Err(Error::param("speed", "must be nonzero"));
            }
            ProblemSpec::new(name, FluxModel::linear(c), DiffusionModel::none(), sine(v["amplitude"]), torus)?
        }
        "flat-middle-flux" => {
            let flux = flat_middle_flux(v["width"], v["drift"], v["steepness"]);
            ProblemSpec::new(name, flux, DiffusionModel::none(), sine(v["amplitude"]), torus)?
        }
        "x-dependent-convex" => {
            let a = v["phi_amplitude"];
            let u0 = InitialData::Sine { amplitude: v["amplitude"], wavenumber: 1.0, phase: 0.0, mean: v["mean"] };
            // the coercivity growth is only visible once |u| dominates |phi'|
            ProblemSpec::new(name, x_dependent_convex_flux(a), DiffusionModel::constant_alpha(v["alpha"]), u0, torus)?
                .with_range_padding(2.0 * a.abs())?
        }
        "heat" => ProblemSpec::new(
            name,
            FluxModel::zero(),
            DiffusionModel::constant_alpha(v["alpha"]),
            sine(v["amplitude"]),
            torus,
        )?,
        "porous-medium" => {
            let m = v["m"];
            let diffusion = DiffusionModel::none().with_beta(
                move |u: f64| u * u.abs().powf(m - 1.0),
                move |u: f64| if m == 1.0 { 1.0 } else { m * u.abs().powf(m - 1.0) },
            );
            let u0 = InitialData::Bump { center: 0.5, half_width: v["half_width"], height: v["height"] };
            ProblemSpec::new(name, FluxModel::zero(), diffusion, u0, torus)?
        }
        "plateau-beta" => {
            let diffusion = plateau_beta(v["kappa"], v["width"]);
            ProblemSpec::new(name, FluxModel::burgers(), diffusion, sine(v["amplitude"]), torus)?
        }
        _ => unreachable!("catalog entry without constructor"),
    };
    spec.documented = entry.documented.iter().copied().collect();
    Ok(spec)
}

/// `f(u) = d·u + s·max(|u| − w, 0)²`.
pub fn flat_middle_flux(w: f64, d: f64, s: f64) -> FluxModel {
    let mut sonic = vec![-w, w];
    if d < 0.0 {
        sonic.push(w - d / (2.0 * s));
    }
    if d > 0.0 {
        sonic.push(-w - d / (2.0 * s));
    }
    FluxModel::autonomous(
        "flat-middle-flux",
        move |u: f64| d * u + s * (u.abs() - w).max(0.0).powi(2),
        move |u: f64| d + 2.0 * s * u.signum() * (u.abs() - w).max(0.0),
    )
    .with_sonic_points(move |_| sonic.clone())
}

/// `f(x,u) = u²/2 + A·sin(2πx)·u`.
pub fn x_dependent_convex_flux(a: f64) -> FluxModel {
    let phi = move |x: f64| a * (2.0 * PI * x).sin();
    FluxModel::new(
        "x-dependent-convex",
        Arc::new(move |x, u| 0.5 * u * u + phi(x) * u),
        Arc::new(move |x, u| u + phi(x)),
        Arc::new(move |x, u| 2.0 * PI * a * (2.0 * PI * x).cos() * u),
    )
    .strictly_convex()
    .with_sonic_points(move |x| vec![-phi(x)])
}

/// `β′(u) = κ·clamp(|u| − w, 0, 1)` with `β` its odd primitive.
pub fn plateau_beta(kappa: f64, w: f64) -> DiffusionModel {
    let beta = move |u: f64| {
        let s = (u.abs() - w).max(0.0);
        let mag = if s <= 1.0 { 0.5 * s * s } else { 0.5 + (s - 1.0) };
        kappa * u.signum() * mag
    };
    DiffusionModel::none().with_beta(beta, move |u: f64| kappa * (u.abs() - w).clamp(0.0, 1.0))
}
