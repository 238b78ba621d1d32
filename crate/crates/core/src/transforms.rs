//! Primitive/derivative maps between cell and node fields, distances, and
//! translation fitting of periodic profiles.

use crate::error::{Error, Result};
use crate::field::{CellField, Grid, NodalField};

/// `v_i = Σ u_j·dx` from the anchor node (`x = 0`), where `v = 0`.
pub fn primitive(u: &CellField) -> NodalField {
    let g = u.grid;
    let a = g.anchor();
    let mut v = vec![0.0; g.n + 1];
    for i in a + 1..=g.n {
        v[i] = v[i - 1] + u.values[i - 1] * g.dx;
    }
    for i in (0..a).rev() {
        v[i] = v[i + 1] - u.values[i] * g.dx;
    }
    NodalField { grid: g, values: v, time: u.time, gauge: 0.0 }
}

/// [`primitive`] shifted by the flux that crossed the anchor face, i.e. the
/// HJ field whose derivative is `u` and whose initial anchor value was 0.
pub fn primitive_with_offset(u: &CellField) -> NodalField {
    let mut v = primitive(u);
    for x in &mut v.values {
        *x += u.anchor_offset;
    }
    v
}

/// `u_j = (v_{j+1} − v_j)/dx`; the anchor value is kept as `anchor_offset`
/// so that `primitive_with_offset(derivative(v)) = v`.
pub fn derivative(v: &NodalField) -> CellField {
    let g = v.grid;
    let values = v.values.windows(2).map(|w| (w[1] - w[0]) / g.dx).collect();
    CellField { grid: g, values, time: v.time, anchor_offset: v.values[g.anchor()] }
}

/// `Σ |a_j − b_j|·dx`.
pub fn l1_distance(a: &CellField, b: &CellField) -> Result<f64> {
    a.grid.ensure_same(&b.grid)?;
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).sum::<f64>() * a.grid.dx)
}

/// `Σ |u_j|·dx`.
pub fn l1_norm(u: &CellField) -> f64 {
    u.values.iter().map(|x| x.abs()).sum::<f64>() * u.grid.dx
}

/// `max |a_i − b_i|` over nodes.
pub fn linf_distance(a: &NodalField, b: &NodalField) -> Result<f64> {
    a.grid.ensure_same(&b.grid)?;
    Ok(a.values.iter().zip(&b.values).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

/// `max |a_j − b_j|` over cells.
pub fn linf_cells(a: &CellField, b: &CellField) -> Result<f64> {
    a.grid.ensure_same(&b.grid)?;
    Ok(a.values.iter().zip(&b.values).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

/// Total variation `Σ |u_{j+1} − u_j|`, including the wrap-around jump on the torus.
pub fn bv_seminorm(u: &CellField) -> f64 {
    let inner: f64 = u.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    if u.grid.is_periodic() {
        inner + (u.values[0] - u.values[u.grid.n - 1]).abs()
    } else {
        inner
    }
}

/// `‖u‖_{L¹} + ‖∂_x u‖_{L¹}`, the full BV norm.
pub fn bv_norm(u: &CellField) -> f64 {
    l1_norm(u) + bv_seminorm(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Linf,
    L1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlignMethod {
    ExhaustiveGrid,
}

/// Shift candidates in cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShiftGrid {
    /// Every cell shift in one period.
    All,
    /// `center − half_width ..= center + half_width`.
    Around { center: i64, half_width: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlignOptions {
    pub metric: Metric,
    /// Subtract the best constant before measuring (midrange for L∞, median for L¹).
    pub mean_matching: bool,
    /// Refine the best cell shift by a 3-point parabola through the residuals.
    pub parabolic_refine: bool,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions { metric: Metric::Linf, mean_matching: false, parabolic_refine: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileAlignment {
    /// Best `s` with `candidate(x) ≈ reference(x − s)`, in `[−L/2, L/2)` for [`ShiftGrid::All`].
    pub shift: f64,
    pub residual: f64,
    pub method: AlignMethod,
}

/// Reference value at node `i − k` extended quasi-periodically by its jump.
#[inline]
fn shifted_value(reference: &NodalField, i: i64, k: i64) -> f64 {
    let n = reference.grid.n as i64;
    let idx = i - k;
    let wraps = idx.div_euclid(n);
    let r = idx.rem_euclid(n) as usize;
    reference.values[r] + wraps as f64 * reference.jump()
}

fn distance(diff: &mut [f64], options: &AlignOptions, dx: f64) -> f64 {
    let offset = if options.mean_matching {
        match options.metric {
            Metric::Linf => {
                let (lo, hi) = diff.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &d| (l.min(d), h.max(d)));
                0.5 * (lo + hi)
            }
            Metric::L1 => {
                let mut s = diff.to_vec();
                s.sort_by(|a, b| a.total_cmp(b));
                s[s.len() / 2]
            }
        }
    } else {
        0.0
    };
    match options.metric {
        Metric::Linf => diff.iter().fold(0.0, |m, d| m.max((d - offset).abs())),
        Metric::L1 => diff.iter().map(|d| (d - offset).abs()).sum::<f64>() * dx,
    }
}

fn residual_at(candidate: &NodalField, reference: &NodalField, shift: f64, options: &AlignOptions) -> f64 {
    let g = candidate.grid;
    let k = shift.floor() as i64;
    let frac = shift - k as f64;
    let mut diff: Vec<f64> = (0..g.n as i64)
        .map(|i| {
            // reference(x_i − s) by linear interpolation between nodes i−k−1 and i−k
            let r = (1.0 - frac) * shifted_value(reference, i, k) + frac * shifted_value(reference, i, k + 1);
            candidate.values[i as usize] - r
        })
        .collect();
    distance(&mut diff, options, g.dx)
}

/// Exhaustive search over cell-multiple shifts minimising the chosen distance.
pub fn align_profile(
    candidate: &NodalField,
    reference: &NodalField,
    shift_grid: ShiftGrid,
    options: AlignOptions,
) -> Result<ProfileAlignment> {
    let g: Grid = candidate.grid;
    g.ensure_same(&reference.grid)?;
    if !g.is_periodic() {
        return Err(Error::Structural("profile alignment needs periodic fields".into()));
    }
    let n = g.n as i64;
    let shifts: Vec<i64> = match shift_grid {
        ShiftGrid::All => (-(n / 2)..n - n / 2).collect(),
        ShiftGrid::Around { center, half_width } => (center - half_width..=center + half_width).collect(),
    };
    let residuals: Vec<f64> = shifts.iter().map(|&k| residual_at(candidate, reference, k as f64, &options)).collect();
    let (best, &best_res) = residuals
        .iter()
        .enumerate()
        .fold((0, &f64::INFINITY), |acc, (i, r)| if *r < *acc.1 { (i, r) } else { acc });
    let mut shift = shifts[best] as f64;
    let mut residual = best_res;
    if options.parabolic_refine && best > 0 && best + 1 < residuals.len() {
        let (rm, r0, rp) = (residuals[best - 1], residuals[best], residuals[best + 1]);
        let curv = rm - 2.0 * r0 + rp;
        if curv > 0.0 {
            let delta = (0.5 * (rm - rp) / curv).clamp(-0.5, 0.5);
            let r = residual_at(candidate, reference, shift + delta, &options);
            if r < residual {
                shift += delta;
                residual = r;
            }
        }
    }
    Ok(ProfileAlignment { shift: shift * g.dx, residual, method: AlignMethod::ExhaustiveGrid })
}
