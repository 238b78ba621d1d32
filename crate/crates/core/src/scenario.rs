//! TOML scenario files.
//!
//! ```toml
//! id = "burgers-equivalence"
//! experiment = "equivalence"
//!
//! [problem]
//! name = "burgers"
//! params = { amplitude = 1.0 }
//!
//! [domain]
//! kind = "periodic"
//! n_cells = 256
//! levels = [128, 256, 512, 1024]
//!
//! [solver]
//! cfl = 0.9
//! t_end = 0.5
//!
//! [outputs]
//! snapshots = false
//! ```
//!
//! Errors name the offending key and its line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::catalog::{builtin_catalog, Params};
use crate::cl::{FluxScheme, SchemeConfig, Theta};
use crate::error::{Error, Result};
use crate::hj::{DiffusionForm, HjSchemeConfig};
use crate::initial::InitialData;
use crate::problem::{Domain, ProblemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    SolveCl,
    SolveHj,
    Equivalence,
    EntropyAudit,
    FluxAudit,
    LipschitzAudit,
    HjLongtime,
    ClLongtime,
    ViscosityLadder,
}

impl ExperimentKind {
    pub const ALL: [(&'static str, ExperimentKind); 9] = [
        ("solve-cl", ExperimentKind::SolveCl),
        ("solve-hj", ExperimentKind::SolveHj),
        ("equivalence", ExperimentKind::Equivalence),
        ("entropy-audit", ExperimentKind::EntropyAudit),
        ("flux-audit", ExperimentKind::FluxAudit),
        ("lipschitz-audit", ExperimentKind::LipschitzAudit),
        ("hj-longtime", ExperimentKind::HjLongtime),
        ("cl-longtime", ExperimentKind::ClLongtime),
        ("viscosity-ladder", ExperimentKind::ViscosityLadder),
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().find(|(n, _)| *n == s).map(|(_, k)| *k)
    }

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, k)| *k == self).map(|(n, _)| *n).unwrap()
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub checkpoints: Vec<f64>,
    pub affine_tol: f64,
    pub windows: usize,
    pub window_agreement: f64,
    pub exponent_window: (f64, f64),
    /// Tolerance constant of the entropy and flux-bound audits.
    pub c: f64,
    pub n_snapshots: usize,
}

#[derive(Clone, Debug)]
pub struct Outputs {
    pub root: Option<PathBuf>,
    pub snapshots: bool,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub experiment: ExperimentKind,
    pub problem: String,
    pub params: Params,
    pub initial: Option<InitialData>,
    pub domain: Domain,
    pub n_cells: usize,
    pub levels: Vec<usize>,
    pub cl: SchemeConfig,
    pub hj: HjSchemeConfig,
    pub t_end: f64,
    pub epsilon: f64,
    pub epsilon_ladder: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub analysis: AnalysisOptions,
    pub outputs: Outputs,
}

impl Scenario {
    /// The problem instance described by the scenario.
    pub fn spec(&self) -> Result<ProblemSpec> {
        let mut spec = builtin_catalog(&self.problem, &self.params)?;
        if let Some(u0) = &self.initial {
            spec = spec.with_initial(u0.clone());
        }
        spec = spec.with_domain(self.domain)?;
        spec.with_epsilon(self.epsilon)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: Option<Spanned<String>>,
    experiment: Spanned<String>,
    problem: Spanned<RawProblem>,
    domain: Spanned<RawDomain>,
    solver: Spanned<RawSolver>,
    #[serde(default)]
    analysis: RawAnalysis,
    #[serde(default)]
    outputs: RawOutputs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: Spanned<String>,
    #[serde(default)]
    params: BTreeMap<String, Spanned<f64>>,
    initial: Option<Spanned<RawInitial>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    kind: Spanned<String>,
    amplitude: Option<f64>,
    wavenumber: Option<f64>,
    phase: Option<f64>,
    mean: Option<f64>,
    value: Option<f64>,
    x0: Option<f64>,
    left: Option<f64>,
    right: Option<f64>,
    center: Option<f64>,
    half_width: Option<f64>,
    height: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    kind: Spanned<String>,
    half_width: Option<Spanned<f64>>,
    n_cells: Spanned<i64>,
    levels: Option<Spanned<Vec<i64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    flux: Option<Spanned<String>>,
    theta: Option<Spanned<f64>>,
    theta_inflation: Option<Spanned<f64>>,
    hj_diffusion: Option<Spanned<String>>,
    cfl: Option<Spanned<f64>>,
    t_end: Spanned<f64>,
    epsilon: Option<Spanned<f64>>,
    epsilon_ladder: Option<Spanned<Vec<f64>>>,
    snapshot_times: Option<Vec<f64>>,
    max_dt: Option<Spanned<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    checkpoints: Option<Vec<f64>>,
    affine_tol: Option<Spanned<f64>>,
    windows: Option<Spanned<i64>>,
    window_agreement: Option<f64>,
    exponent_window: Option<Spanned<Vec<f64>>>,
    c: Option<f64>,
    n_snapshots: Option<Spanned<i64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    root: Option<String>,
    snapshots: Option<bool>,
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Dotted key at `offset`: the left-hand side on that line under the nearest section header.
fn key_at(source: &str, offset: usize) -> String {
    let offset = offset.min(source.len());
    let start = source[..offset].rfind('\n').map_or(0, |i| i + 1);
    let line = source[start..].lines().next().unwrap_or("");
    let section = source[..start]
        .lines()
        .rev()
        .find_map(|l| {
            let t = l.trim();
            (t.starts_with('[') && t.ends_with(']')).then(|| t.trim_matches(|c| c == '[' || c == ']').to_string())
        });
    let trimmed = line.trim();
    let key = if trimmed.starts_with('[') {
        trimmed.trim_matches(|c| c == '[' || c == ']').to_string()
    } else {
        let lhs = line.split('=').next().unwrap_or("").trim().to_string();
        match section {
            Some(s) if !lhs.is_empty() => format!("{s}.{lhs}"),
            _ => lhs,
        }
    };
    if key.is_empty() {
        "<document>".into()
    } else {
        key
    }
}

struct Ctx<'a> {
    source: &'a str,
}

impl Ctx<'_> {
    fn err<T>(&self, key: &str, span: std::ops::Range<usize>, message: impl Into<String>) -> Result<T> {
        Err(Error::Config { key: key.to_string(), line: line_of(self.source, span.start), message: message.into() })
    }

    fn positive(&self, key: &str, v: &Spanned<f64>) -> Result<f64> {
        let x = *v.get_ref();
        if !(x > 0.0 && x.is_finite()) {
            return self.err(key, v.span(), format!("must be positive, got {x}"));
        }
        Ok(x)
    }
}

/// Parses and validates scenario text; `fallback_id` names the scenario when `id` is absent.
pub fn parse_scenario(source: &str, fallback_id: &str) -> Result<Scenario> {
    let raw: RawScenario = toml::from_str(source).map_err(|e| {
        let line = e.span().map_or(0, |s| line_of(source, s.start));
        let key = e.span().map_or_else(|| "<document>".to_string(), |s| key_at(source, s.start));
        Error::Config { key, line, message: e.message().to_string() }
    })?;
    let ctx = Ctx { source };

    let experiment = ExperimentKind::parse(raw.experiment.get_ref()).map_or_else(
        || {
            let names: Vec<&str> = ExperimentKind::ALL.iter().map(|(n, _)| *n).collect();
            ctx.err("experiment", raw.experiment.span(), format!("unknown experiment; expected one of {}", names.join(", ")))
        },
        Ok,
    )?;
    let id = match &raw.id {
        Some(s) => {
            let v = s.get_ref();
            if v.is_empty() || v.contains(['/', '\\']) || v == "." || v == ".." {
                return ctx.err("id", s.span(), "must be a plain, non-empty name");
            }
            v.clone()
        }
        None => fallback_id.to_string(),
    };

    let problem = raw.problem.into_inner();
    let params: Params = problem.params.iter().map(|(k, v)| (k.clone(), *v.get_ref())).collect();
    let name = problem.name.get_ref().clone();
    let initial = problem.initial.map(|i| parse_initial(&ctx, i)).transpose()?;

    let domain_span = raw.domain.span();
    let d = raw.domain.into_inner();
    let domain = match d.kind.get_ref().as_str() {
        "periodic" => Domain::torus(),
        "line" => {
            let Some(hw) = &d.half_width else {
                return ctx.err("domain.half_width", domain_span, "required for line domains");
            };
            Domain::Line { half_width: ctx.positive("domain.half_width", hw)? }
        }
        other => return ctx.err("domain.kind", d.kind.span(), format!("unknown kind `{other}` (periodic | line)")),
    };
    let n_cells = *d.n_cells.get_ref();
    if n_cells < 4 {
        return ctx.err("domain.n_cells", d.n_cells.span(), "need at least 4 cells");
    }
    if matches!(domain, Domain::Line { .. }) && n_cells % 2 != 0 {
        return ctx.err("domain.n_cells", d.n_cells.span(), "line domains need an even cell count");
    }
    let levels: Vec<usize> = match &d.levels {
        Some(l) => {
            if l.get_ref().is_empty() || l.get_ref().iter().any(|&n| n < 4) {
                return ctx.err("domain.levels", l.span(), "levels must be cell counts >= 4");
            }
            let levels: Vec<usize> = l.get_ref().iter().map(|&n| n as usize).collect();
            if levels.windows(2).any(|w| w[1] != 2 * w[0]) {
                return ctx.err("domain.levels", l.span(), "refinement levels must double at every step");
            }
            levels
        }
        None => vec![n_cells as usize],
    };

    let solver_span = raw.solver.span();
    let s = raw.solver.into_inner();
    let cfl = match &s.cfl {
        Some(c) => {
            let v = *c.get_ref();
            if !(v > 0.0 && v <= 1.0) {
                return ctx.err("solver.cfl", c.span(), format!("must lie in (0, 1], got {v}"));
            }
            v
        }
        None => 0.9,
    };
    let theta = match (&s.theta, &s.theta_inflation) {
        (Some(_), Some(t)) => return ctx.err("solver.theta_inflation", t.span(), "give either theta or theta_inflation"),
        (Some(t), None) => {
            let v = *t.get_ref();
            if !(v >= 0.0) {
                return ctx.err("solver.theta", t.span(), "must be >= 0");
            }
            Theta::Fixed(v)
        }
        (None, Some(k)) => {
            let v = *k.get_ref();
            if !(v >= 1.0) {
                return ctx.err("solver.theta_inflation", k.span(), "must be >= 1");
            }
            Theta::Inflated(v)
        }
        (None, None) => Theta::Inflated(1.5),
    };
    let flux_scheme = match &s.flux {
        None => FluxScheme::EngquistOsher,
        Some(f) => match f.get_ref().as_str() {
            "engquist-osher" => FluxScheme::EngquistOsher,
            "lax-friedrichs" => FluxScheme::LaxFriedrichs(theta),
            other => {
                return ctx.err("solver.flux", f.span(), format!("unknown flux `{other}` (engquist-osher | lax-friedrichs)"))
            }
        },
    };
    let diffusion_form = match &s.hj_diffusion {
        None => DiffusionForm::BetaDifference,
        Some(f) => match f.get_ref().as_str() {
            "beta-difference" => DiffusionForm::BetaDifference,
            "centered" => DiffusionForm::CenteredBetaPrime,
            other => return ctx.err("solver.hj_diffusion", f.span(), format!("unknown form `{other}` (beta-difference | centered)")),
        },
    };
    let t_end = *s.t_end.get_ref();
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return ctx.err("solver.t_end", s.t_end.span(), "must be finite and >= 0");
    }
    let epsilon = match &s.epsilon {
        Some(e) => {
            let v = *e.get_ref();
            if !(v >= 0.0 && v.is_finite()) {
                return ctx.err("solver.epsilon", e.span(), "must be >= 0");
            }
            v
        }
        None => 0.0,
    };
    let max_dt = s.max_dt.as_ref().map(|m| ctx.positive("solver.max_dt", m)).transpose()?;
    let epsilon_ladder = match &s.epsilon_ladder {
        Some(l) => {
            let v = l.get_ref().clone();
            if v.is_empty() || v.iter().any(|&e| !(e > 0.0)) || v.windows(2).any(|w| w[1] >= w[0]) {
                return ctx.err("solver.epsilon_ladder", l.span(), "must be strictly decreasing positive values");
            }
            v
        }
        None => Vec::new(),
    };
    if matches!(experiment, ExperimentKind::ViscosityLadder | ExperimentKind::LipschitzAudit) && epsilon_ladder.is_empty() {
        return ctx.err("solver.epsilon_ladder", solver_span, format!("required by experiment `{}`", experiment.name()));
    }

    let a = raw.analysis;
    let windows = match &a.windows {
        Some(w) if *w.get_ref() < 1 => return ctx.err("analysis.windows", w.span(), "need at least one window"),
        Some(w) => *w.get_ref() as usize,
        None => 4,
    };
    let exponent_window = match &a.exponent_window {
        Some(w) => match w.get_ref().as_slice() {
            [lo, hi] if lo < hi => (*lo, *hi),
            _ => return ctx.err("analysis.exponent_window", w.span(), "expected [low, high]"),
        },
        None => (0.5, 1.5),
    };
    let n_snapshots = match &a.n_snapshots {
        Some(n) if *n.get_ref() < 2 => return ctx.err("analysis.n_snapshots", n.span(), "need at least 2"),
        Some(n) => *n.get_ref() as usize,
        None => 20,
    };
    let affine_tol = a.affine_tol.as_ref().map(|t| ctx.positive("analysis.affine_tol", t)).transpose()?.unwrap_or(1e-6);
    let checkpoints = a
        .checkpoints
        .unwrap_or_else(|| (1..=20).map(|k| t_end * k as f64 / 20.0).collect());

    Ok(Scenario {
        id,
        experiment,
        problem: name,
        params,
        initial,
        domain,
        n_cells: n_cells as usize,
        levels,
        cl: SchemeConfig { flux_scheme, cfl, epsilon: None, max_dt },
        hj: HjSchemeConfig { theta, cfl, epsilon: None, max_dt, diffusion_form },
        t_end,
        epsilon,
        epsilon_ladder,
        snapshot_times: s.snapshot_times.unwrap_or_default(),
        analysis: AnalysisOptions {
            checkpoints,
            affine_tol,
            windows,
            window_agreement: a.window_agreement.unwrap_or(1e-3),
            exponent_window,
            c: a.c.unwrap_or(1.0),
            n_snapshots,
        },
        outputs: Outputs { root: raw.outputs.root.map(PathBuf::from), snapshots: raw.outputs.snapshots.unwrap_or(true) },
    })
}

fn parse_initial(ctx: &Ctx<'_>, raw: Spanned<RawInitial>) -> Result<InitialData> {
    let span = raw.span();
    let r = raw.into_inner();
    let need = |v: Option<f64>, key: &str| -> Result<f64> {
        v.map_or_else(|| ctx.err(&format!("problem.initial.{key}"), span.clone(), "required for this kind"), Ok)
    };
    Ok(match r.kind.get_ref().as_str() {
        "constant" => InitialData::Constant { value: need(r.value, "value")? },
        "sine" => InitialData::Sine {
            amplitude: r.amplitude.unwrap_or(1.0),
            wavenumber: r.wavenumber.unwrap_or(1.0),
            phase: r.phase.unwrap_or(0.0),
            mean: r.mean.unwrap_or(0.0),
        },
        "riemann" => InitialData::Riemann { x0: need(r.x0, "x0")?, left: need(r.left, "left")?, right: need(r.right, "right")? },
        "bump" => InitialData::Bump {
            center: need(r.center, "center")?,
            half_width: need(r.half_width, "half_width")?,
            height: need(r.height, "height")?,
        },
        other => {
            return ctx.err(
                "problem.initial.kind",
                r.kind.span(),
                format!("unknown kind `{other}` (constant | sine | riemann | bump)"),
            )
        }
    })
}

/// Reads and parses a scenario file; the file stem is the default id.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_scenario(&text, stem)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
id = "demo"
experiment = "equivalence"

[problem]
name = "burgers"
params = { amplitude = 1.0 }

[domain]
kind = "periodic"
n_cells = 64
levels = [32, 64, 128]

[solver]
cfl = 0.5
t_end = 0.2
"#;

    #[test]
    fn parses_base() {
        let s = parse_scenario(BASE, "x").unwrap();
        assert_eq!(s.id, "demo");
        assert_eq!(s.experiment, ExperimentKind::Equivalence);
        assert_eq!(s.levels, vec![32, 64, 128]);
        assert_eq!(s.cl.cfl, 0.5);
        assert!(s.spec().is_ok());
    }

    #[test]
    fn cfl_error_names_key_and_line() {
        let text = BASE.replace("cfl = 0.5", "cfl = 1.5");
        match parse_scenario(&text, "x") {
            Err(Error::Config { key, line, .. }) => {
                assert_eq!(key, "solver.cfl");
                assert_eq!(line, 15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_and_unknown_key_errors() {
        let text = BASE.replace("t_end = 0.2", "t_end = \"soon\"");
        match parse_scenario(&text, "x") {
            Err(Error::Config { key, line, .. }) => assert_eq!((key.as_str(), line), ("solver.t_end", 16)),
            other => panic!("{other:?}"),
        }
        let text = BASE.replace("kind = \"periodic\"", "kind = \"periodic\"\nbogus = 1");
        match parse_scenario(&text, "x") {
            Err(Error::Config { line, message, .. }) => {
                assert_eq!(line, 11);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_doubling_levels_refused() {
        let text = BASE.replace("[32, 64, 128]", "[32, 48, 96]");
        assert!(matches!(parse_scenario(&text, "x"), Err(Error::Config { ref key, .. }) if key == "domain.levels"));
    }
}
