//! ε-uniform Lipschitz bounds for the Hamilton–Jacobi solution: slopes
//! `|v_x|` and discrete time rates `|v_t|`.

use crate::analysis::Verdict;
use crate::error::{Error, Result};
use crate::field::{Grid, NodalField};
use crate::hj::{self, HjSchemeConfig};
use crate::par;
use crate::problem::ProblemSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzEntry {
    pub epsilon: f64,
    pub max_slope: f64,
    pub max_rate: f64,
    /// Rate over the first snapshot interval.
    pub initial_rate: f64,
    /// `max|f(x,u₀)| + (‖α‖ + ‖β′‖ + ε)·max|u₀′|`.
    pub predicted_m: f64,
}

#[derive(Clone, Debug)]
pub struct LipschitzAudit {
    pub entries: Vec<LipschitzEntry>,
    pub slope_bound: f64,
    pub rate_bound: f64,
    /// Single constant bounding both quantities across ε.
    pub constant: f64,
    pub uniform: bool,
    /// Initial rate within 10% of the predicted `M` for every ε.
    pub m_match: bool,
    pub verdict: Verdict,
}

/// Growth allowed for the maximum over ε relative to the largest-ε value.
pub const UNIFORMITY_FACTOR: f64 = 1.1;
pub const M_TOLERANCE: f64 = 0.1;

/// The initial time-rate bound `M` evaluated on 4096 sample points.
pub fn predicted_m(spec: &ProblemSpec, epsilon: f64) -> f64 {
    let xs = spec.x_samples(4096);
    let (mut fmax, mut dmax, mut alpha): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in &xs {
        let u = spec.initial.value(x);
        lo = lo.min(u);
        hi = hi.max(u);
        fmax = fmax.max(spec.flux.f(x, u).abs());
        dmax = dmax.max(spec.initial.derivative(x).map_or(f64::INFINITY, f64::abs));
        alpha = alpha.max(spec.diffusion.alpha(x).abs());
    }
    let beta = (0..=256)
        .map(|k| spec.diffusion.beta_prime(lo + (hi - lo) * k as f64 / 256.0).abs())
        .fold(0.0, f64::max);
    fmax + (alpha + beta + epsilon) * dmax
}

fn measure(epsilon: f64, snapshots: &[NodalField], spec: &ProblemSpec) -> Result<LipschitzEntry> {
    if snapshots.len() < 3 {
        return Err(Error::param("snapshots", "need at least 3 snapshots per run"));
    }
    let max_slope = snapshots.iter().map(|s| s.max_slope()).fold(0.0, f64::max);
    let rates: Vec<f64> = snapshots
        .windows(2)
        .map(|w| {
            let dt = w[1].time - w[0].time;
            w[0].values.iter().zip(&w[1].values).map(|(a, b)| (b - a).abs()).fold(0.0, f64::max) / dt
        })
        .collect();
    Ok(LipschitzEntry {
        epsilon,
        max_slope,
        max_rate: rates.iter().copied().fold(0.0, f64::max),
        initial_rate: rates[0],
        predicted_m: predicted_m(spec, epsilon),
    })
}

/// Audits runs given as `(ε, snapshots)`; each run's first snapshot is `t = 0`.
pub fn audit_lipschitz(runs: &[(f64, Vec<NodalField>)], spec: &ProblemSpec) -> Result<LipschitzAudit> {
    let mut entries = runs.iter().map(|(e, s)| measure(*e, s, spec)).collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let slope_bound = entries.iter().map(|e| e.max_slope).fold(0.0, f64::max);
    let rate_bound = entries.iter().map(|e| e.max_rate).fold(0.0, f64::max);
    let constant = slope_bound + rate_bound;
    let m_match = entries.iter().all(|e| {
        if e.predicted_m > 0.0 {
            (e.initial_rate - e.predicted_m).abs() <= M_TOLERANCE * e.predicted_m
        } else {
            e.initial_rate <= 1e-12
        }
    });
    let (uniform, verdict) = match entries.first() {
        Some(largest) if entries.len() >= 2 => {
            let floor = 1e-12;
            let uniform = slope_bound <= UNIFORMITY_FACTOR * largest.max_slope + floor
                && rate_bound <= UNIFORMITY_FACTOR * largest.max_rate + floor;
            (uniform, Verdict::from_bool(uniform && m_match))
        }
        _ => (false, Verdict::Degraded),
    };
    Ok(LipschitzAudit { entries, slope_bound, rate_bound, constant, uniform, m_match, verdict })
}

/// Solves the HJ problem for each ε (in parallel) with outputs at `times`
/// and audits the result.
pub fn run_lipschitz(
    spec: &ProblemSpec,
    config: &HjSchemeConfig,
    grid: Grid,
    eps_list: &[f64],
    t_end: f64,
    times: &[f64],
) -> Result<LipschitzAudit> {
    let runs = par::parallel_map(eps_list, |&eps| {
        let cfg = config.clone().with_epsilon(eps);
        let initial = hj::initial_nodes(spec, grid);
        let scheme = hj::HjScheme::new(spec, &cfg, &initial)?;
        let mut snaps = vec![initial.clone()];
        snaps.extend(hj::solve_hj_from(initial, spec, &scheme, t_end, times)?);
        Ok::<_, Error>((eps, snaps))
    });
    audit_lipschitz(&par::collect_results(runs)?, spec)
}
