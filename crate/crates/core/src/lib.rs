//! Numerical laboratory for degenerate parabolic-hyperbolic conservation laws
//! `u_t + f(x,u)_x = (α(x)u_x + β(u)_x)_x` and the associated quasilinear
//! Hamilton–Jacobi equations `v_t + f(x,v_x) = (α(x) + β′(v_x))v_xx`.
//!
//! The crate provides monotone solvers for both equations, the primitive and
//! derivative maps between them, and audits that check the qualitative
//! theory (equivalence `u = v_x`, entropy inequalities, flux and Lipschitz
//! bounds, vanishing viscosity, large-time behaviour on the torus).

// negated comparisons below are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod catalog;
pub mod cl;
pub mod error;
pub mod field;
pub mod hj;
pub mod hopf_lax;
pub mod initial;
pub mod io;
pub mod par;
pub mod problem;
pub mod quadrature;
pub mod report;
pub mod scenario;
pub mod transforms;

pub use error::{Error, Result};
pub use field::{Boundary, CellField, Grid, NodalField};
pub use initial::InitialData;
pub use problem::{
    detect_affine_interval, validate_assumptions, AffineInterval, Assumption, AssumptionReport, DiffusionModel,
    Domain, FluxModel, ProblemSpec, Status,
};
