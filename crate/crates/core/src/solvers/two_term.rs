//! `C3 X3 D3 + C4 X4 D4 = E1`.

use serde::{Deserialize, Serialize};

use crate::error::{dim, Result};
use crate::qblock;
use crate::qmatrix::QMatrix;
use crate::solvers::{gi, scale_of, Blocks, Family, Gi, Opts, Outcome, ParamShape, SolvabilityReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoTermInstance {
    pub c3: QMatrix,
    pub d3: QMatrix,
    pub c4: QMatrix,
    pub d4: QMatrix,
    pub e1: QMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoTermSolution {
    pub x3: QMatrix,
    pub x4: QMatrix,
}

impl Blocks for TwoTermSolution {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("X3", &self.x3), ("X4", &self.x4)]
    }
}

impl TwoTermInstance {
    pub fn validate(&self) -> Result<()> {
        let (m, n) = self.e1.shape();
        for (nm, c) in [("C3", &self.c3), ("C4", &self.c4)] {
            if c.rows() != m {
                return Err(dim(nm, c.shape(), self.e1.shape()));
            }
        }
        for (nm, d) in [("D3", &self.d3), ("D4", &self.d4)] {
            if d.cols() != n {
                return Err(dim(nm, d.shape(), self.e1.shape()));
            }
        }
        Ok(())
    }

    pub fn residual(&self, s: &TwoTermSolution) -> QMatrix {
        &(&(&(&self.c3 * &s.x3) * &self.d3) + &(&(&self.c4 * &s.x4) * &self.d4)) - &self.e1
    }

    pub fn scale(&self) -> f64 {
        scale_of([&self.c3, &self.d3, &self.c4, &self.d4, &self.e1])
    }
}

/// Shared machinery for `A X B + C Y D = E` with
/// `M = R_A C`, `N = D L_B`, `S = C L_M`.
#[derive(Clone, Debug)]
pub(crate) struct TwoTermCore {
    pub a: Gi,
    pub b: Gi,
    pub c: Gi,
    pub d: Gi,
    pub m: Gi,
    pub n: Gi,
    pub s: Gi,
}

/// Free parameters of [`TwoTermCore::solve`] in the order `Y11, …, Y15`.
pub(crate) struct TwoTermFree<'a> {
    pub y11: &'a QMatrix,
    pub y12: &'a QMatrix,
    pub y13: &'a QMatrix,
    pub y14: &'a QMatrix,
    pub y15: &'a QMatrix,
}

impl TwoTermCore {
    pub fn new(a: &QMatrix, b: &QMatrix, c: &QMatrix, d: &QMatrix, o: &Opts) -> Result<Self> {
        let a = gi(a, o)?;
        let b = gi(b, o)?;
        let c = gi(c, o)?;
        let d = gi(d, o)?;
        let m = gi(&(&a.r * &c.a), o)?;
        let n = gi(&(&d.a * &b.l), o)?;
        let s = gi(&(&c.a * &m.l), o)?;
        Ok(TwoTermCore { a, b, c, d, m, n, s })
    }

    /// Shapes of `Y11, …, Y15`.
    pub fn shapes(&self) -> [(usize, usize); 5] {
        let xy = (self.a.a.cols(), self.b.a.rows());
        let yy = (self.c.a.cols(), self.d.a.rows());
        [(self.s.a.cols(), self.n.a.rows()), xy, xy, yy, yy]
    }

    /// The residual conditions `R_M R_A E`, `R_A E L_D`, `E L_B L_N`, `R_C E L_B`.
    pub fn conditions(&self, e: &QMatrix) -> [(&'static str, QMatrix); 4] {
        [
            ("R_M R_A E = 0", &(&self.m.r * &self.a.r) * e),
            ("R_A E L_D = 0", &(&self.a.r * e) * &self.d.l),
            ("E L_B L_N = 0", &(e * &self.b.l) * &self.n.l),
            ("R_C E L_B = 0", &(&self.c.r * e) * &self.b.l),
        ]
    }

    /// `X = A†EB† − A†CM†EB† − A†SC†EN†DB† − A†S Y11 R_N DB† + L_A Y12 + Y13 R_B`,
    /// `Y = M†ED† + S†SC†EN† + L_M L_S Y14 + Y15 R_D + L_M Y11 R_N`.
    pub fn solve(&self, e: &QMatrix, f: &TwoTermFree) -> (QMatrix, QMatrix) {
        let (a, b, c, d, m, n, s) = (&self.a, &self.b, &self.c, &self.d, &self.m, &self.n, &self.s);
        let eb = e * &b.p;
        let cen = &(&c.p * e) * &n.p;
        let db = &d.a * &b.p;
        let mut x = &a.p * &eb;
        x -= &(&(&(&a.p * &c.a) * &m.p) * &eb);
        x -= &(&(&(&a.p * &s.a) * &cen) * &db);
        x -= &(&(&(&(&a.p * &s.a) * f.y11) * &n.r) * &db);
        x += &(&a.l * f.y12);
        x += &(f.y13 * &b.r);
        let mut y = &(&m.p * e) * &d.p;
        y += &(&(&s.p * &s.a) * &cen);
        y += &(&(&m.l * &s.l) * f.y14);
        y += &(f.y15 * &d.r);
        y += &(&(&m.l * f.y11) * &n.r);
        (x, y)
    }
}

/// Solves `C3 X3 D3 + C4 X4 D4 = E1`. Both the four residual conditions and the four
/// rank equalities are evaluated; the residual of the constructed particular solution is
/// reported alongside them.
pub fn solve_two_term(inst: &TwoTermInstance, o: &Opts) -> Result<Outcome<TwoTermSolution>> {
    inst.validate()?;
    let TwoTermInstance { c3, d3, c4, d4, e1 } = inst;
    let core = TwoTermCore::new(c3, d3, c4, d4, o)?;
    let sc = inst.scale();
    let mut rep = SolvabilityReport::new(o.tol);
    for (name, m) in core.conditions(e1) {
        rep.mp(name, &m, sc);
    }

    rep.rank_of("r(C3, E1, C4) = r(C3, C4)", &QMatrix::hstack(&[c3, e1, c4])?, o.rank(&QMatrix::hstack(&[c3, c4])?)?, o)?;
    rep.rank_of("r(D3; E1; D4) = r(D3; D4)", &QMatrix::vstack(&[d3, e1, d4])?, o.rank(&QMatrix::vstack(&[d3, d4])?)?, o)?;
    rep.rank_of("r[C3 E1; 0 D4] = r(C3) + r(D4)", &qblock![[c3, e1], [0, d4]]?, o.rank(c3)? + o.rank(d4)?, o)?;
    rep.rank_of("r[D3 0; E1 C4] = r(D3) + r(C4)", &qblock![[d3, 0], [e1, c4]]?, o.rank(d3)? + o.rank(c4)?, o)?;

    let [s11, s12, s13, s14, s15] = core.shapes();
    let params = vec![
        ParamShape::new("Y11", s11),
        ParamShape::new("Y12", s12),
        ParamShape::new("Y13", s13),
        ParamShape::new("Y14", s14),
        ParamShape::new("Y15", s15),
    ];
    let e1 = e1.clone();
    let build = move |p: &crate::solvers::Params| {
        let free = TwoTermFree { y11: p.get("Y11"), y12: p.get("Y12"), y13: p.get("Y13"), y14: p.get("Y14"), y15: p.get("Y15") };
        let (x3, x4) = core.solve(&e1, &free);
        Ok(TwoTermSolution { x3, x4 })
    };
    let family = Family::from_named(params, build)?;
    rep.mp("particular solution residual", &inst.residual(&family.particular), sc * sc);
    Outcome::decide(rep, move || Ok(family))
}
