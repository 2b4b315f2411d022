use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qmatrix::QMatrix;
use crate::solvers::{Family, Opts};

/// A vanishing-residual condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpCondition {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// A rank equality `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankCondition {
    pub name: String,
    pub lhs: usize,
    pub rhs: usize,
    pub pass: bool,
}

/// Per-condition verdicts for one instance under both certificate forms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityReport {
    pub mp_conditions: Vec<MpCondition>,
    pub rank_conditions: Vec<RankCondition>,
    pub compat_conditions: Vec<MpCondition>,
    /// False when only the residual form was computed.
    pub rank_evaluated: bool,
    pub consistent: bool,
    pub forms_agree: bool,
    pub tol: f64,
}

impl SolvabilityReport {
    pub fn new(tol: f64) -> Self {
        SolvabilityReport { tol, consistent: true, forms_agree: true, ..Default::default() }
    }

    /// Records `‖m‖_F ≤ tol · scale`.
    pub fn mp(&mut self, name: impl Into<String>, m: &QMatrix, scale: f64) {
        self.mp_conditions.push(residual_condition(name, m.frobenius_norm(), self.tol * scale));
    }

    /// Records the compatibility `‖lhs − rhs‖_F ≤ tol · scale`.
    pub fn compat(&mut self, name: impl Into<String>, lhs: &QMatrix, rhs: &QMatrix, scale: f64) {
        let r = (lhs - rhs).frobenius_norm();
        self.compat_conditions.push(residual_condition(name, r, self.tol * scale));
    }

    pub fn rank_eq(&mut self, name: impl Into<String>, lhs: usize, rhs: usize) {
        self.rank_evaluated = true;
        self.rank_conditions.push(RankCondition { name: name.into(), lhs, rhs, pass: lhs == rhs });
    }

    /// Evaluates `r(lhs) = rhs` under the solver rank policy.
    pub fn rank_of(&mut self, name: impl Into<String>, lhs: &QMatrix, rhs: usize, o: &Opts) -> Result<()> {
        let l = o.rank(lhs)?;
        self.rank_eq(name, l, rhs);
        Ok(())
    }

    pub fn mp_verdict(&self) -> bool {
        self.mp_conditions.iter().all(|c| c.pass)
    }

    pub fn compat_verdict(&self) -> bool {
        self.compat_conditions.iter().all(|c| c.pass)
    }

    pub fn rank_verdict(&self) -> bool {
        self.rank_conditions.iter().all(|c| c.pass)
    }

    /// Recomputes `consistent` and `forms_agree` from the lists.
    pub fn finish(mut self) -> Self {
        let compat = self.compat_verdict();
        let mp = self.mp_verdict() && compat;
        let rk = self.rank_verdict() && compat;
        self.consistent = mp && rk;
        self.forms_agree = !self.rank_evaluated || mp == rk;
        self
    }

    /// Appends another report's conditions, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: SolvabilityReport) {
        let pre = |n: String| if prefix.is_empty() { n } else { format!("{prefix}: {n}") };
        self.mp_conditions.extend(other.mp_conditions.into_iter().map(|mut c| {
            c.name = pre(c.name);
            c
        }));
        self.compat_conditions.extend(other.compat_conditions.into_iter().map(|mut c| {
            c.name = pre(c.name);
            c
        }));
        self.rank_evaluated |= other.rank_evaluated;
        self.rank_conditions.extend(other.rank_conditions.into_iter().map(|mut c| {
            c.name = pre(c.name);
            c
        }));
    }

    /// Names of every failing condition.
    pub fn failing(&self) -> Vec<String> {
        let mp = self.mp_conditions.iter().chain(&self.compat_conditions).filter(|c| !c.pass).map(|c| c.name.clone());
        let rk = self.rank_conditions.iter().filter(|c| !c.pass).map(|c| c.name.clone());
        mp.chain(rk).collect()
    }
}

fn residual_condition(name: impl Into<String>, residual: f64, threshold: f64) -> MpCondition {
    MpCondition { name: name.into(), residual, threshold, pass: residual <= threshold && residual.is_finite() }
}

impl fmt::Display for SolvabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .mp_conditions
            .iter()
            .chain(&self.compat_conditions)
            .map(|c| c.name.len())
            .chain(self.rank_conditions.iter().map(|c| c.name.len()))
            .max()
            .unwrap_or(0);
        let mark = |p: bool| if p { "ok" } else { "FAIL" };
        for (title, list) in [("compatibility", &self.compat_conditions), ("residual conditions", &self.mp_conditions)] {
            if list.is_empty() {
                continue;
            }
            writeln!(f, "{title}:")?;
            for c in list {
                writeln!(f, "  {:<width$}  {:>10.3e} <= {:<10.3e} {}", c.name, c.residual, c.threshold, mark(c.pass))?;
            }
        }
        if self.rank_evaluated {
            writeln!(f, "rank conditions:")?;
            for c in &self.rank_conditions {
                writeln!(f, "  {:<width$}  {:>4} = {:<4} {}", c.name, c.lhs, c.rhs, mark(c.pass))?;
            }
        }
        write!(f, "verdict: {}", if self.consistent { "consistent" } else { "inconsistent" })?;
        if !self.forms_agree {
            write!(f, " (residual and rank forms disagree)")?;
        }
        Ok(())
    }
}

/// Result of a solve: a solution family, or the report explaining why none exists.
#[derive(Clone, Debug)]
pub enum Outcome<S> {
    Consistent { family: Family<S>, report: SolvabilityReport },
    Inconsistent(SolvabilityReport),
}

impl<S: Clone + 'static> Outcome<S> {
    pub fn report(&self) -> &SolvabilityReport {
        match self {
            Outcome::Consistent { report, .. } | Outcome::Inconsistent(report) => report,
        }
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self, Outcome::Consistent { .. })
    }

    pub fn family(&self) -> Option<&Family<S>> {
        match self {
            Outcome::Consistent { family, .. } => Some(family),
            Outcome::Inconsistent(_) => None,
        }
    }

    pub fn into_family(self) -> std::result::Result<Family<S>, SolvabilityReport> {
        match self {
            Outcome::Consistent { family, .. } => Ok(family),
            Outcome::Inconsistent(r) => Err(r),
        }
    }

    /// Builds the outcome from a finished report, constructing the family only when consistent.
    pub fn decide(report: SolvabilityReport, family: impl FnOnce() -> Result<Family<S>>) -> Result<Self> {
        let report = report.finish();
        Ok(if report.consistent {
            Outcome::Consistent { family: family()?, report }
        } else {
            Outcome::Inconsistent(report)
        })
    }
}
