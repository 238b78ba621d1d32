//! Audits and experiments built on top of the two solvers.

use std::fmt;

pub mod entropy;
pub mod equivalence;
pub mod flux_bound;
pub mod lipschitz;
pub mod longtime;
pub mod stats;
pub mod viscosity;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Not enough data to decide.
    Degraded,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    /// `Fail` dominates `Degraded`, which dominates `Pass`.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Degraded, _) | (_, Verdict::Degraded) => Verdict::Degraded,
            _ => Verdict::Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Degraded => "DEGRADED",
        })
    }
}
