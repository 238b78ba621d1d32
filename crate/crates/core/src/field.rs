//! Grids, cell-averaged fields for the conservation law and node-valued
//! fields for the Hamilton–Jacobi equation.

use crate::error::{Error, Result};
use crate::problem::Domain;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    Periodic,
    /// Zero-gradient ghost cells at both truncation ends.
    Outflow,
}

/// Uniform grid with `n` cells and `n + 1` faces (= HJ nodes).
///
/// Faces sit at `origin + i·dx`; the periodic grid starts at `x = 0`, the
/// truncated line is `[-W, W]` with `n` even so that `x = 0` is a face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub dx: f64,
    pub origin: f64,
    pub boundary: Boundary,
}

impl Grid {
    pub fn new(domain: &Domain, n: usize) -> Result<Self> {
        domain.validate()?;
        if n < 4 {
            return Err(Error::param("n_cells", format!("need at least 4 cells, got {n}")));
        }
        let (origin, boundary) = match domain {
            Domain::Periodic { .. } => (0.0, Boundary::Periodic),
            Domain::Line { half_width } => {
                if !n.is_multiple_of(2) {
                    return Err(Error::param("n_cells", "line domains need an even cell count"));
                }
                (-half_width, Boundary::Outflow)
            }
        };
        Ok(Grid { n, dx: domain.length() / n as f64, origin, boundary })
    }

    pub fn periodic(n: usize) -> Result<Self> {
        Grid::new(&Domain::torus(), n)
    }

    pub fn length(&self) -> f64 {
        self.dx * self.n as f64
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    #[inline]
    pub fn center(&self, j: usize) -> f64 {
        self.origin + (j as f64 + 0.5) * self.dx
    }

    #[inline]
    pub fn face(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.dx
    }

    /// Index of the face/node at `x = 0`.
    pub fn anchor(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => 0,
            Boundary::Outflow => self.n / 2,
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.boundary == other.boundary && self.dx == other.dx && self.origin == other.origin
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Twice as many cells on the same domain.
    pub fn refined(&self) -> Grid {
        Grid { n: 2 * self.n, dx: 0.5 * self.dx, ..*self }
    }
}

/// Cell averages `u_j` at time `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub time: f64,
    /// Net convective-minus-diffusive flux that crossed the anchor face
    /// (`x = 0`) up to `time`, with sign so that `v(0, t) = anchor_offset`
    /// for the HJ field `v = ∫₀ˣ u` plus this offset.
    pub anchor_offset: f64,
}

impl CellField {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} values for {} cells", values.len(), grid.n)));
        }
        Ok(CellField { grid, values, time, anchor_offset: 0.0 })
    }

    pub fn from_fn(grid: Grid, mut cell_average: impl FnMut(f64, f64) -> f64) -> Self {
        let values = (0..grid.n).map(|j| cell_average(grid.face(j), grid.face(j + 1))).collect();
        CellField { grid, values, time: 0.0, anchor_offset: 0.0 }
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Node values `v_i`, `i = 0..=n`, at time `time`.
///
/// On the torus `v_n = v_0 + jump` where `jump = ∫_𝕋 ∂_x v`, so `v` is the
/// sum of `mean_slope()·x` and a periodic remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub time: f64,
    /// Constant added by the experiment layer (the `f(0)·t` gauge shift).
    pub gauge: f64,
}

impl NodalField {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n + 1 {
            return Err(Error::GridMismatch(format!("{} values for {} nodes", values.len(), grid.n + 1)));
        }
        Ok(NodalField { grid, values, time, gauge: 0.0 })
    }

    pub fn from_fn(grid: Grid, mut v: impl FnMut(f64) -> f64) -> Self {
        let values = (0..=grid.n).map(|i| v(grid.face(i))).collect();
        NodalField { grid, values, time: 0.0, gauge: 0.0 }
    }

    /// `v_n − v_0` (zero-mean data gives a periodic field).
    pub fn jump(&self) -> f64 {
        self.values[self.grid.n] - self.values[0]
    }

    pub fn mean_slope(&self) -> f64 {
        self.jump() / self.grid.length()
    }

    /// `v_i − mean_slope·(x_i − origin)` for `i = 0..n` (periodic remainder).
    pub fn periodic_part(&self) -> Vec<f64> {
        let m = self.mean_slope();
        (0..self.grid.n).map(|i| self.values[i] - m * (i as f64 * self.grid.dx)).collect()
    }

    /// Values with the gauge constant added.
    pub fn gauged(&self) -> Vec<f64> {
        self.values.iter().map(|v| v + self.gauge).collect()
    }

    /// Largest one-sided slope magnitude `max_i |v_{i+1} − v_i| / dx`.
    pub fn max_slope(&self) -> f64 {
        self.values.windows(2).fold(0.0, |m: f64, w| m.max((w[1] - w[0]).abs())) / self.grid.dx
    }

    pub fn slope_range(&self) -> (f64, f64) {
        let dx = self.grid.dx;
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]) / dx)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p), hi.max(p)))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
