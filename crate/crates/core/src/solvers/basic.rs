//! `AX = C`, `XA = C` and the pair `AX = C, XB = D`.

use crate::error::{dim, Result};
use crate::qmatrix::QMatrix;
use crate::solvers::{gi, scale_of, Family, Opts, Outcome, ParamShape, SolvabilityReport};

/// `AX = C`: consistent iff `R_A C = 0`; `X = A†C + L_A U1`.
pub fn solve_left(a: &QMatrix, c: &QMatrix, o: &Opts) -> Result<Outcome<QMatrix>> {
    if a.rows() != c.rows() {
        return Err(dim("solve_left", a.shape(), c.shape()));
    }
    let g = gi(a, o)?;
    let mut rep = SolvabilityReport::new(o.tol);
    rep.mp("R_A C = 0", &(&g.r * c), scale_of([c]));
    let x0 = &g.p * c;
    Outcome::decide(rep, || {
        Family::from_named(vec![ParamShape::new("U1", (a.cols(), c.cols()))], move |p| Ok(&x0 + &(&g.l * p.get("U1"))))
    })
}

/// `XA = C`: consistent iff `C L_A = 0`; `X = CA† + U1 R_A`.
pub fn solve_right(a: &QMatrix, c: &QMatrix, o: &Opts) -> Result<Outcome<QMatrix>> {
    if a.cols() != c.cols() {
        return Err(dim("solve_right", a.shape(), c.shape()));
    }
    let g = gi(a, o)?;
    let mut rep = SolvabilityReport::new(o.tol);
    rep.mp("C L_A = 0", &(c * &g.l), scale_of([c]));
    let x0 = c * &g.p;
    Outcome::decide(rep, || {
        Family::from_named(vec![ParamShape::new("U1", (c.rows(), a.rows()))], move |p| Ok(&x0 + &(p.get("U1") * &g.r)))
    })
}

/// `AX = C, XB = D`: consistent iff `R_A C = 0`, `D L_B = 0` and `AD = CB`;
/// `X = A†C + L_A D B† + L_A U1 R_B`.
pub fn solve_pair(a: &QMatrix, c: &QMatrix, b: &QMatrix, d: &QMatrix, o: &Opts) -> Result<Outcome<QMatrix>> {
    let (n, m) = (a.cols(), b.rows());
    if a.rows() != c.rows() || c.cols() != m {
        return Err(dim("solve_pair: AX = C", a.shape(), c.shape()));
    }
    if d.rows() != n || d.cols() != b.cols() {
        return Err(dim("solve_pair: XB = D", d.shape(), b.shape()));
    }
    let ga = gi(a, o)?;
    let gb = gi(b, o)?;
    let s = scale_of([a, b, c, d]);
    let mut rep = SolvabilityReport::new(o.tol);
    rep.mp("R_A C = 0", &(&ga.r * c), s);
    rep.mp("D L_B = 0", &(d * &gb.l), s);
    rep.compat("AD = CB", &(a * d), &(c * b), s * s);
    let x0 = &(&ga.p * c) + &(&(&ga.l * d) * &gb.p);
    Outcome::decide(rep, || {
        Family::from_named(vec![ParamShape::new("U1", (n, m))], move |p| Ok(&x0 + &(&(&ga.l * p.get("U1")) * &gb.r)))
    })
}

/// Particular solution of a pair, without a consistency decision.
pub(crate) fn pair_particular(a: &super::Gi, c: &QMatrix, b: &super::Gi, d: &QMatrix) -> QMatrix {
    &(&a.p * c) + &(&(&a.l * d) * &b.p)
}
