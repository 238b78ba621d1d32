//! Initial data `u₀` with exact cell averages and primitives where available.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::quadrature::adaptive_simpson;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum InitialData {
    Constant { value: f64 },
    /// `mean + amplitude · sin(2π·wavenumber·x + phase)`
    Sine { amplitude: f64, wavenumber: f64, phase: f64, mean: f64 },
    /// `left` for `x < x0`, `right` for `x > x0`.
    Riemann { x0: f64, left: f64, right: f64 },
    /// `height · cos²(π(x − center)/(2·half_width))` on `|x − center| < half_width`, zero outside.
    Bump { center: f64, half_width: f64, height: f64 },
    /// `mean + Σ a_k cos(2πkx) + b_k sin(2πkx)`, modes given as `(k, a_k, b_k)`.
    Fourier { mean: f64, modes: Vec<(f64, f64, f64)> },
    Custom { u: ScalarFn, derivative: Option<ScalarFn>, antiderivative: Option<ScalarFn> },
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::Constant { value } => write!(f, "Constant({value})"),
            InitialData::Sine { amplitude, wavenumber, phase, mean } => write!(
                f,
                "Sine(amplitude={amplitude}, wavenumber={wavenumber}, phase={phase}, mean={mean})"
            ),
            InitialData::Riemann { x0, left, right } => {
                write!(f, "Riemann(x0={x0}, left={left}, right={right})")
            }
            InitialData::Bump { center, half_width, height } => {
                write!(f, "Bump(center={center}, half_width={half_width}, height={height})")
            }
            InitialData::Fourier { mean, modes } => write!(f, "Fourier(mean={mean}, modes={modes:?})"),
            InitialData::Custom { .. } => write!(f, "Custom"),
        }
    }
}

impl InitialData {
    pub fn sine(amplitude: f64) -> Self {
        InitialData::Sine { amplitude, wavenumber: 1.0, phase: 0.0, mean: 0.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            InitialData::Constant { value } => *value,
            InitialData::Sine { amplitude, wavenumber, phase, mean } => {
                mean + amplitude * (2.0 * PI * wavenumber * x + phase).sin()
            }
            InitialData::Riemann { x0, left, right } => {
                if x < *x0 {
                    *left
                } else {
                    *right
                }
            }
            InitialData::Bump { center, half_width, height } => {
                let y = x - center;
                if y.abs() >= *half_width {
                    0.0
                } else {
                    height * (PI * y / (2.0 * half_width)).cos().powi(2)
                }
            }
            InitialData::Fourier { mean, modes } => {
                mean + modes
                    .iter()
                    .map(|&(k, a, b)| {
                        let arg = 2.0 * PI * k * x;
                        a * arg.cos() + b * arg.sin()
                    })
                    .sum::<f64>()
            }
            InitialData::Custom { u, .. } => u(x),
        }
    }

    /// Pointwise derivative `u₀'(x)`; `None` where the data has a jump.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match self {
            InitialData::Constant { .. } => Some(0.0),
            InitialData::Sine { amplitude, wavenumber, phase, .. } => {
                let w = 2.0 * PI * wavenumber;
                Some(amplitude * w * (w * x + phase).cos())
            }
            InitialData::Riemann { x0, left, right } => {
                if x == *x0 && left != right {
                    None
                } else {
                    Some(0.0)
                }
            }
            InitialData::Bump { center, half_width, height } => {
                let y = x - center;
                if y.abs() >= *half_width {
                    Some(0.0)
                } else {
                    Some(-height * PI / (2.0 * half_width) * (PI * y / half_width).sin())
                }
            }
            InitialData::Fourier { modes, .. } => Some(
                modes
                    .iter()
                    .map(|&(k, a, b)| {
                        let w = 2.0 * PI * k;
                        w * (-a * (w * x).sin() + b * (w * x).cos())
                    })
                    .sum(),
            ),
            InitialData::Custom { derivative, u, .. } => match derivative {
                Some(d) => Some(d(x)),
                None => {
                    let h = 1e-6;
                    Some((u(x + h) - u(x - h)) / (2.0 * h))
                }
            },
        }
    }

    /// An antiderivative `A` with `A' = u₀` when a closed form is known.
    pub fn antiderivative(&self, x: f64) -> Option<f64> {
        match self {
            InitialData::Constant { value } => Some(value * x),
            InitialData::Sine { amplitude, wavenumber, phase, mean } => {
                let w = 2.0 * PI * wavenumber;
                Some(mean * x - amplitude * (w * x + phase).cos() / w)
            }
            InitialData::Riemann { x0, left, right } => {
                Some(left * (x.min(*x0) - x0) + right * (x - x0).max(0.0))
            }
            InitialData::Bump { center, half_width, height } => {
                let w = *half_width;
                let y = (x - center).clamp(-w, w);
                Some(height * (0.5 * y + w / (2.0 * PI) * (PI * y / w).sin()))
            }
            InitialData::Fourier { mean, modes } => Some(
                mean * x
                    + modes
                        .iter()
                        .map(|&(k, a, b)| {
                            let w = 2.0 * PI * k;
                            (a * (w * x).sin() - b * (w * x).cos()) / w
                        })
                        .sum::<f64>(),
            ),
            InitialData::Custom { antiderivative, .. } => antiderivative.as_ref().map(|a| a(x)),
        }
    }

    /// `v₀(x) = ∫₀ˣ u₀`.
    pub fn primitive(&self, x: f64) -> f64 {
        match (self.antiderivative(x), self.antiderivative(0.0)) {
            (Some(ax), Some(a0)) => ax - a0,
            _ => adaptive_simpson(&|y| self.value(y), 0.0, x, 1e-12),
        }
    }

    /// Average of `u₀` over `[a, b]`.
    pub fn cell_average(&self, a: f64, b: f64) -> f64 {
        match (self.antiderivative(a), self.antiderivative(b)) {
            (Some(aa), Some(ab)) => (ab - aa) / (b - a),
            _ => adaptive_simpson(&|y| self.value(y), a, b, 1e-13 * (b - a)) / (b - a),
        }
    }

    /// Values of the jumps in piecewise-constant data (used as extra entropy levels).
    pub fn riemann_states(&self) -> Vec<f64> {
        match self {
            InitialData::Riemann { left, right, .. } => vec![*left, *right],
            _ => Vec::new(),
        }
    }

    /// True when `u₀` is Lipschitz (no jumps).
    pub fn is_lipschitz(&self) -> bool {
        match self {
            InitialData::Riemann { left, right, .. } => left == right,
            _ => true,
        }
    }
}
