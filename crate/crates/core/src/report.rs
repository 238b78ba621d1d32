//! Running scenarios and writing their artifacts.
//!
//! Every run writes into `<root>/<scenario id>/`: `report.txt` (key/value
//! lines ending in `VERDICT: PASS|FAIL|DEGRADED`), CSV tables, optional
//! snapshots and `manifest.txt` with the SHA-256 of every other artifact.
//! Nothing time- or host-dependent is written, so reruns are byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::analysis::entropy::{audit_entropy_inequality, default_levels};
use crate::analysis::equivalence::{check_equivalence, EquivalenceConfig, EquivalenceReport};
use crate::analysis::flux_bound::flux_bound_ladder;
use crate::analysis::lipschitz::run_lipschitz;
use crate::analysis::longtime::{cl_longtime, hj_longtime, ClLongtimeOptions, HjLongtimeOptions, LargeTimeReport};
use crate::analysis::viscosity::vanishing_viscosity_convergence;
use crate::analysis::Verdict;
use crate::cl;
use crate::error::{Error, Result};
use crate::field::Grid;
use crate::hj;
use crate::io::{fmt_f64, write_cell_snapshots, write_nodal_snapshots, write_table, write_text};
use crate::problem::{validate_assumptions, Assumption, ProblemSpec};
use crate::scenario::{ExperimentKind, Scenario};
use crate::transforms::bv_seminorm;

/// Environment variable overriding the output root.
pub const OUTPUT_ROOT_ENV: &str = "EVLAB_OUTPUT_ROOT";
pub const DEFAULT_OUTPUT_ROOT: &str = "evlab-output";

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub id: String,
    pub dir: PathBuf,
    pub verdict: Verdict,
    /// Per-check verdicts, in report order.
    pub checks: Vec<(String, Verdict)>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// Report body under construction.
#[derive(Default)]
struct Doc {
    text: String,
    tables: Vec<Table>,
    checks: Vec<(String, Verdict)>,
}

impl Doc {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key}: {value}");
    }

    fn check(&mut self, name: &str, verdict: Verdict) {
        self.kv(&format!("check {name}"), verdict);
        self.checks.push((name.to_string(), verdict));
    }

    fn verdict(&self) -> Verdict {
        if self.checks.is_empty() {
            return Verdict::Degraded;
        }
        self.checks.iter().fold(Verdict::Pass, |v, (_, c)| v.combine(*c))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), fmt_f64)
}

/// Output root: explicit override, then `EVLAB_OUTPUT_ROOT`, then the
/// scenario's `outputs.root`, then `evlab-output`.
pub fn output_root(scenario: &Scenario, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUTPUT_ROOT_ENV).filter(|p| !p.is_empty()) {
        return PathBuf::from(p);
    }
    scenario.outputs.root.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

/// Creates `<root>/<id>` and makes sure it is writable.
pub fn prepare_output_dir(root: &Path, id: &str) -> Result<PathBuf> {
    let dir = root.join(id);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let probe = dir.join(".write-probe");
    std::fs::write(&probe, b"").map_err(|e| Error::io(&dir, e))?;
    std::fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))?;
    Ok(dir)
}

/// Order columns for a refinement study whose cell counts double per level.
pub fn refinement_table(report: &EquivalenceReport) -> Result<Table> {
    if report.levels.windows(2).any(|w| w[1].n != 2 * w[0].n) {
        return Err(Error::param("levels", "refinement table needs cell counts that double per level"));
    }
    let mut t = Table::new("refinement", &["n", "dx", "steps", "l1_defect", "linf_defect", "order_l1", "order_linf"]);
    for (k, level) in report.levels.iter().enumerate() {
        let d = level.final_defects();
        let order = |f: fn(&crate::analysis::equivalence::DefectSample) -> f64| {
            if k == 0 {
                return "n/a".to_string();
            }
            let prev = f(&report.levels[k - 1].final_defects());
            let cur = f(&d);
            if prev > 0.0 && cur > 0.0 {
                fmt_f64((prev / cur).log2())
            } else {
                "n/a".to_string()
            }
        };
        t.push(vec![
            level.n.to_string(),
            fmt_f64(level.dx),
            level.steps.to_string(),
            fmt_f64(d.l1),
            fmt_f64(d.linf),
            order(|s| s.l1),
            order(|s| s.linf),
        ]);
    }
    Ok(t)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `manifest.txt` listing the SHA-256 of every other file in `dir`.
pub fn write_manifest(dir: &Path) -> Result<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n != "manifest.txt")
        .collect();
    names.sort();
    let mut text = String::new();
    for name in names {
        let path = dir.join(&name);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let _ = writeln!(text, "{}  {name}", sha256_hex(&bytes));
    }
    write_text(&dir.join("manifest.txt"), &text)?;
    Ok(text)
}

/// Runs `scenario` writing into `<root>/<id>`.
///
/// On a non-finite state the last finite field is dumped to
/// `postmortem_u.csv` and the error is returned.
pub fn run_scenario(scenario: &Scenario, root: &Path) -> Result<RunOutcome> {
    let dir = prepare_output_dir(root, &scenario.id)?;
    clear_artifacts(&dir)?;
    let result = scenario.spec().and_then(|spec| run_experiment(scenario, &spec, &dir));
    match result {
        Ok(doc) => {
            let verdict = doc.verdict();
            let mut text = header(scenario);
            text.push_str(&doc.text);
            let _ = writeln!(text, "VERDICT: {verdict}");
            write_text(&dir.join("report.txt"), &text)?;
            for t in &doc.tables {
                let header: Vec<&str> = t.header.iter().map(String::as_str).collect();
                write_table(&dir.join(format!("{}.csv", t.name)), &header, &t.rows)?;
            }
            write_manifest(&dir)?;
            Ok(RunOutcome { id: scenario.id.clone(), dir, verdict, checks: doc.checks })
        }
        Err(err) => {
            if let Error::NonFinite { last_good, .. } = &err {
                write_cell_snapshots(&dir.join("postmortem_u.csv"), std::slice::from_ref(last_good.as_ref()))?;
            }
            let mut text = header(scenario);
            let _ = writeln!(text, "error: {err}");
            let _ = writeln!(text, "VERDICT: {}", Verdict::Fail);
            write_text(&dir.join("report.txt"), &text)?;
            write_manifest(&dir)?;
            Err(err)
        }
    }
}

fn clear_artifacts(dir: &Path) -> Result<()> {
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?.filter_map(|e| e.ok()) {
        let path = entry.path();
        let ours = path.extension().is_some_and(|e| e == "csv" || e == "txt");
        if path.is_file() && ours {
            std::fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

fn header(s: &Scenario) -> String {
    let mut d = Doc::default();
    d.kv("scenario", &s.id);
    d.kv("experiment", s.experiment.name());
    d.kv("problem", &s.problem);
    for (k, v) in &s.params {
        d.kv(&format!("param {k}"), fmt_f64(*v));
    }
    d.kv("domain", format!("{:?}", s.domain));
    d.kv("n_cells", s.n_cells);
    d.kv("cfl", fmt_f64(s.cl.cfl));
    d.kv("t_end", fmt_f64(s.t_end));
    d.kv("epsilon", fmt_f64(s.epsilon));
    d.text
}

fn run_experiment(s: &Scenario, spec: &ProblemSpec, dir: &Path) -> Result<Doc> {
    let grid = Grid::new(&spec.domain, s.n_cells)?;
    let mut doc = Doc::default();
    let report = validate_assumptions(spec, &Assumption::all())?;
    let satisfied: Vec<String> = report.satisfied().iter().map(|a| a.to_string()).collect();
    doc.kv("assumptions satisfied", satisfied.join(" "));
    if !report.violated().is_empty() {
        doc.kv("assumptions violated", report.summary());
    }
    match s.experiment {
        ExperimentKind::SolveCl => solve_cl(s, spec, grid, dir, &mut doc)?,
        ExperimentKind::SolveHj => solve_hj(s, spec, grid, dir, &mut doc)?,
        ExperimentKind::Equivalence => equivalence(s, spec, &mut doc)?,
        ExperimentKind::EntropyAudit => {
            let run = cl::record_cl(spec, &s.cl, grid, s.t_end)?;
            let audit = audit_entropy_inequality(&run, spec, &default_levels(spec), s.analysis.c)?;
            doc.kv("steps", audit.steps.len());
            doc.kv("levels", audit.levels.len());
            doc.kv("worst residual", fmt_f64(audit.worst.worst));
            doc.kv("worst at step", audit.worst.step);
            doc.kv("worst level", fmt_f64(audit.worst.level));
            doc.kv("worst cell", audit.worst.cell);
            doc.kv("gradient energy", fmt_f64(audit.gradient_energy));
            let mut t = Table::new("entropy", &["step", "t", "dt", "worst_residual", "level", "cell", "energy"]);
            for r in &audit.steps {
                t.push(vec![
                    r.step.to_string(),
                    fmt_f64(r.time),
                    fmt_f64(r.dt),
                    fmt_f64(r.worst),
                    fmt_f64(r.level),
                    r.cell.to_string(),
                    fmt_f64(r.energy),
                ]);
            }
            doc.tables.push(t);
            doc.check("entropy inequality", audit.verdict);
        }
        ExperimentKind::FluxAudit => {
            let eps = if s.epsilon_ladder.is_empty() { vec![s.epsilon] } else { s.epsilon_ladder.clone() };
            let ladder = flux_bound_ladder(spec, &s.cl, grid, &eps, s.t_end, s.analysis.n_snapshots, s.analysis.c)?;
            doc.kv("uniform bound", fmt_f64(ladder.uniform_bound));
            let mut t = Table::new("flux_bound", &["epsilon", "t", "max_abs_w"]);
            for a in &ladder.audits {
                doc.kv(&format!("eps {} initial max|w|", fmt_f64(a.epsilon)), fmt_f64(a.initial));
                doc.kv(&format!("eps {} allowed growth", fmt_f64(a.epsilon)), fmt_f64(a.tol_growth));
                for (time, w) in a.times.iter().zip(&a.max_w) {
                    t.push(vec![fmt_f64(a.epsilon), fmt_f64(*time), fmt_f64(*w)]);
                }
            }
            doc.tables.push(t);
            doc.check("flux bound", ladder.verdict);
        }
        ExperimentKind::LipschitzAudit => {
            let times = lipschitz_times(s);
            let audit = run_lipschitz(spec, &s.hj, grid, &s.epsilon_ladder, s.t_end, &times)?;
            doc.kv("slope bound", fmt_f64(audit.slope_bound));
            doc.kv("rate bound", fmt_f64(audit.rate_bound));
            doc.kv("constant", fmt_f64(audit.constant));
            let mut t = Table::new("lipschitz", &["epsilon", "max_slope", "max_rate", "initial_rate", "predicted_m"]);
            for e in &audit.entries {
                t.push(vec![
                    fmt_f64(e.epsilon),
                    fmt_f64(e.max_slope),
                    fmt_f64(e.max_rate),
                    fmt_f64(e.initial_rate),
                    fmt_f64(e.predicted_m),
                ]);
            }
            doc.tables.push(t);
            doc.check("uniform in epsilon", Verdict::from_bool(audit.uniform));
            doc.check("initial rate matches M", Verdict::from_bool(audit.m_match));
            doc.check("lipschitz", audit.verdict);
        }
        ExperimentKind::HjLongtime => {
            let opts = HjLongtimeOptions { affine_tol: s.analysis.affine_tol, ..Default::default() };
            let r = hj_longtime(spec, &s.hj, grid, s.t_end, &s.analysis.checkpoints, &opts)?;
            longtime_doc(&r, &mut doc);
        }
        ExperimentKind::ClLongtime => {
            let opts = ClLongtimeOptions { windows: s.analysis.windows, window_agreement: s.analysis.window_agreement };
            let r = cl_longtime(spec, &s.cl, grid, s.t_end, &s.analysis.checkpoints, &opts)?;
            longtime_doc(&r, &mut doc);
        }
        ExperimentKind::ViscosityLadder => {
            let r = vanishing_viscosity_convergence(
                spec,
                &s.cl,
                grid,
                &s.epsilon_ladder,
                s.t_end,
                s.analysis.exponent_window,
            )?;
            doc.kv("exponent", opt(r.exponent));
            doc.kv("exponent window", format!("[{}, {}]", r.exponent_window.0, r.exponent_window.1));
            let mut t = Table::new("viscosity", &["epsilon", "l1_to_inviscid", "l1_to_next"]);
            for (k, (e, d)) in r.eps.iter().zip(&r.distances).enumerate() {
                t.push(vec![fmt_f64(*e), fmt_f64(*d), opt(r.ladder_distances.get(k).copied())]);
            }
            doc.tables.push(t);
            doc.check("vanishing viscosity", r.verdict);
        }
    }
    Ok(doc)
}

fn lipschitz_times(s: &Scenario) -> Vec<f64> {
    let n = s.analysis.n_snapshots;
    (1..=n).map(|k| s.t_end * k as f64 / n as f64).collect()
}

fn solve_cl(s: &Scenario, spec: &ProblemSpec, grid: Grid, dir: &Path, doc: &mut Doc) -> Result<()> {
    let snaps = cl::solve_cl(spec, &s.cl.clone().with_epsilon(s.epsilon), grid, s.t_end, &s.snapshot_times)?;
    let initial = cl::initial_cells(spec, grid);
    let mut t = Table::new("summary", &["t", "mass", "max_abs_u", "total_variation"]);
    for u in std::iter::once(&initial).chain(&snaps) {
        t.push(vec![fmt_f64(u.time), fmt_f64(u.mass()), fmt_f64(u.max_abs()), fmt_f64(bv_seminorm(u))]);
    }
    let last = snaps.last().expect("final state");
    let drift = (last.mass() - initial.mass()).abs();
    doc.kv("steps to t_end", "completed");
    doc.kv("mass drift", fmt_f64(drift));
    doc.tables.push(t);
    if s.outputs.snapshots {
        let mut all = vec![initial];
        all.extend(snaps);
        write_cell_snapshots(&dir.join("snapshots_u.csv"), &all)?;
    }
    if grid.is_periodic() {
        doc.check("conservation", Verdict::from_bool(drift <= 1e-10));
    } else {
        doc.check("completed", Verdict::Pass);
    }
    Ok(())
}

fn solve_hj(s: &Scenario, spec: &ProblemSpec, grid: Grid, dir: &Path, doc: &mut Doc) -> Result<()> {
    let snaps = hj::solve_hj(spec, &s.hj.clone().with_epsilon(s.epsilon), grid, s.t_end, &s.snapshot_times)?;
    let initial = hj::initial_nodes(spec, grid);
    let mut t = Table::new("summary", &["t", "max_slope", "jump", "v_anchor"]);
    for v in std::iter::once(&initial).chain(&snaps) {
        t.push(vec![fmt_f64(v.time), fmt_f64(v.max_slope()), fmt_f64(v.jump()), fmt_f64(v.values[grid.anchor()])]);
    }
    doc.tables.push(t);
    if s.outputs.snapshots {
        let mut all = vec![initial];
        all.extend(snaps);
        write_nodal_snapshots(&dir.join("snapshots_v.csv"), &all)?;
    }
    doc.check("completed", Verdict::Pass);
    Ok(())
}

fn equivalence(s: &Scenario, spec: &ProblemSpec, doc: &mut Doc) -> Result<()> {
    let config = EquivalenceConfig { cl: s.cl.clone(), hj: s.hj.clone(), ..Default::default() };
    let r = check_equivalence(spec, &config, s.t_end, &s.levels)?;
    doc.kv("exact agreement", r.exact);
    doc.kv("A1 waived for x-independent flux", r.relaxed);
    doc.kv("order l1", opt(r.order_l1));
    doc.kv("order linf", opt(r.order_linf));
    doc.tables.push(refinement_table(&r)?);
    let mut samples = Table::new("defects", &["n", "t", "l1_defect", "linf_defect"]);
    for level in &r.levels {
        for d in &level.samples {
            samples.push(vec![level.n.to_string(), fmt_f64(d.time), fmt_f64(d.l1), fmt_f64(d.linf)]);
        }
    }
    doc.tables.push(samples);
    doc.check("equivalence", r.verdict);
    Ok(())
}

fn longtime_doc(r: &LargeTimeReport, doc: &mut Doc) {
    doc.kv("estimate", fmt_f64(r.estimate));
    doc.kv("theory", opt(r.theory));
    if let Some(i) = &r.interval {
        doc.kv("affine interval", format!("[{}, {}] degenerate={}", fmt_f64(i.a), fmt_f64(i.b), i.degenerate));
    }
    for (k, w) in r.window_estimates.iter().enumerate() {
        doc.kv(&format!("window {k} estimate"), fmt_f64(*w));
    }
    doc.kv("theil-sen slope", fmt_f64(r.theil_sen));
    if let Some(e) = r.sandwich_excess {
        doc.kv("sandwich excess", fmt_f64(e));
    }
    doc.kv("oscillation", fmt_f64(r.oscillation));
    doc.kv("mass drift", fmt_f64(r.mass_drift));
    for n in &r.notes {
        doc.kv("note", n);
    }
    let mut t = Table::new("longtime", &["t", "residual", "shift"]);
    for (k, (time, res)) in r.times.iter().zip(&r.residuals).enumerate() {
        t.push(vec![fmt_f64(*time), fmt_f64(*res), opt(r.shifts.get(k).copied())]);
    }
    doc.tables.push(t);
    let mut p = Table::new("profile", &["index", "value"]);
    for (k, v) in r.profile.iter().enumerate() {
        p.push(vec![k.to_string(), fmt_f64(*v)]);
    }
    doc.tables.push(p);
    if !r.bracket.is_empty() {
        let mut b = Table::new("bracket", &["t", "m", "M"]);
        for s in &r.bracket {
            b.push(vec![fmt_f64(s.time), fmt_f64(s.m), fmt_f64(s.big_m)]);
        }
        doc.tables.push(b);
    }
    if let Some(ok) = r.sandwich_ok {
        doc.check("slope sandwich", Verdict::from_bool(ok));
    }
    if let Some(ok) = r.bracket_ok {
        doc.check("bracketing", Verdict::from_bool(ok));
    }
    doc.check("large-time", r.verdict);
}
