//! Solvers for one-sided, paired, two-term, five-term and coupled systems.

pub mod basic;
pub mod family;
pub mod five_term;
pub mod master;
pub mod mixed;
pub mod report;
pub mod three_term;
pub mod two_term;

pub use basic::{solve_left, solve_pair, solve_right};
pub use family::{Family, ParamShape, Params};
pub use five_term::{five_term_intermediates, solve_five_term, Branch, FiveTermInstance, FiveTermIntermediates, FiveTermSolution};
pub use master::{check_master, solve_master, MasterInstance, MasterIntermediates, MasterSolution};
pub use mixed::{check_mixed_system, solve_mixed_system, MixedInstance, MixedSolution};
pub use report::{MpCondition, Outcome, RankCondition, SolvabilityReport};
pub use three_term::{check_three_term_system, solve_three_term_system, ThreeTermInstance, ThreeTermSolution};
pub use two_term::{solve_two_term, TwoTermInstance, TwoTermSolution};

use crate::decomp::{pinv, rank, Tol};
use crate::error::Result;
use crate::qmatrix::QMatrix;

/// Default residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Numerical policy shared by all solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Opts {
    /// Relative residual tolerance; also the absolute floor of every rank decision.
    pub tol: f64,
    /// Which of the two particular-solution formulas the five-term solver uses.
    pub branch: Branch,
}

impl Default for Opts {
    fn default() -> Self {
        Opts { tol: DEFAULT_TOL, branch: Branch::First }
    }
}

impl Opts {
    pub fn with_tol(tol: f64) -> Self {
        Opts { tol, ..Opts::default() }
    }

    pub fn rank_tol(&self) -> Tol {
        Tol::Floor(self.tol)
    }

    pub fn rank(&self, a: &QMatrix) -> Result<usize> {
        rank(a, self.rank_tol())
    }
}

/// A matrix with its Moore–Penrose inverse and both projectors.
#[derive(Clone, Debug)]
pub(crate) struct Gi {
    pub a: QMatrix,
    pub p: QMatrix,
    pub l: QMatrix,
    pub r: QMatrix,
}

pub(crate) fn gi(a: &QMatrix, o: &Opts) -> Result<Gi> {
    let b = pinv(a, o.rank_tol())?;
    Ok(Gi { a: a.clone(), p: b.pinv, l: b.proj_left, r: b.proj_right })
}

/// `1 + Σ‖M‖_F`, the scale that residual thresholds are relative to.
pub(crate) fn scale_of<'a>(ms: impl IntoIterator<Item = &'a QMatrix>) -> f64 {
    1.0 + ms.into_iter().map(|m| m.frobenius_norm()).sum::<f64>()
}

/// Named unknowns of a solution, in a fixed order.
pub trait Blocks {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)>;
}

impl Blocks for QMatrix {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("X", self)]
    }
}
