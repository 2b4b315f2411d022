//! `A1 X1 + X2 B1 + A2 Y1 B2 + A3 Y2 B3 + A4 Y3 B4 = B`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{dim, Result};
use crate::qblock;
use crate::qmatrix::QMatrix;
use crate::solvers::two_term::{TwoTermCore, TwoTermFree};
use crate::solvers::{gi, scale_of, Blocks, Family, Gi, Opts, Outcome, ParamShape, Params, SolvabilityReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiveTermInstance {
    pub a1: QMatrix,
    pub b1: QMatrix,
    pub a2: QMatrix,
    pub b2: QMatrix,
    pub a3: QMatrix,
    pub b3: QMatrix,
    pub a4: QMatrix,
    pub b4: QMatrix,
    pub b: QMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiveTermSolution {
    pub x1: QMatrix,
    pub x2: QMatrix,
    pub y1: QMatrix,
    pub y2: QMatrix,
    pub y3: QMatrix,
}

impl Blocks for FiveTermSolution {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("X1", &self.x1), ("X2", &self.x2), ("Y1", &self.y1), ("Y2", &self.y2), ("Y3", &self.y3)]
    }
}

/// Which of the two equivalent expressions for `Y3` to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `Y3 = F1 + L_{C2} V1 + V2 R_{D1} + L_{C1} V3 R_{D2}`.
    #[default]
    First,
    /// `Y3 = F2 − L_{C4} W1 − W2 R_{D3} − L_{C3} W3 R_{D4}`.
    Second,
}

/// Every derived matrix of the five-term reduction.
#[derive(Clone, Debug)]
pub struct FiveTermIntermediates {
    pub a11: QMatrix,
    pub a22: QMatrix,
    pub a33: QMatrix,
    pub b11: QMatrix,
    pub b22: QMatrix,
    pub b33: QMatrix,
    pub t1: QMatrix,
    pub n1: QMatrix,
    pub m1: QMatrix,
    pub s1: QMatrix,
    pub c: QMatrix,
    pub c1: QMatrix,
    pub c2: QMatrix,
    pub c3: QMatrix,
    pub c4: QMatrix,
    pub d: QMatrix,
    pub d1: QMatrix,
    pub d2: QMatrix,
    pub d3: QMatrix,
    pub d4: QMatrix,
    pub e1: QMatrix,
    pub e2: QMatrix,
    pub e3: QMatrix,
    pub e4: QMatrix,
    pub c11: QMatrix,
    pub d11: QMatrix,
    pub c22: QMatrix,
    pub d22: QMatrix,
    pub c33: QMatrix,
    pub d33: QMatrix,
    pub f1: QMatrix,
    pub f2: QMatrix,
    pub e11: QMatrix,
    pub e22: QMatrix,
    pub e33: QMatrix,
    pub e44: QMatrix,
    pub m: QMatrix,
    pub n: QMatrix,
    pub f: QMatrix,
    pub e: QMatrix,
    pub s: QMatrix,
    pub g1: QMatrix,
    pub g2: QMatrix,
    pub f11: QMatrix,
    pub f22: QMatrix,
}

impl FiveTermInstance {
    pub fn validate(&self) -> Result<()> {
        let (p, q) = self.b.shape();
        for (nm, a) in [("A1", &self.a1), ("A2", &self.a2), ("A3", &self.a3), ("A4", &self.a4)] {
            if a.rows() != p {
                return Err(dim(nm, a.shape(), self.b.shape()));
            }
        }
        for (nm, b) in [("B1", &self.b1), ("B2", &self.b2), ("B3", &self.b3), ("B4", &self.b4)] {
            if b.cols() != q {
                return Err(dim(nm, b.shape(), self.b.shape()));
            }
        }
        Ok(())
    }

    pub fn residual(&self, s: &FiveTermSolution) -> QMatrix {
        let mut r = &self.a1 * &s.x1;
        r += &(&s.x2 * &self.b1);
        r += &(&(&self.a2 * &s.y1) * &self.b2);
        r += &(&(&self.a3 * &s.y2) * &self.b3);
        r += &(&(&self.a4 * &s.y3) * &self.b4);
        &r - &self.b
    }

    pub fn scale(&self) -> f64 {
        scale_of([&self.a1, &self.b1, &self.a2, &self.b2, &self.a3, &self.b3, &self.a4, &self.b4, &self.b])
    }

    /// Every coefficient zero-sized except the right-hand side.
    pub fn zeros_like(b: QMatrix) -> Self {
        let (p, q) = b.shape();
        FiveTermInstance {
            a1: QMatrix::zeros(p, 0),
            b1: QMatrix::zeros(0, q),
            a2: QMatrix::zeros(p, 0),
            b2: QMatrix::zeros(0, q),
            a3: QMatrix::zeros(p, 0),
            b3: QMatrix::zeros(0, q),
            a4: QMatrix::zeros(p, 0),
            b4: QMatrix::zeros(0, q),
            b,
        }
    }
}

/// The reduction with all generalized inverses it needs, ready to assemble solutions.
pub(crate) struct Prepared {
    pub inst: FiveTermInstance,
    pub im: FiveTermIntermediates,
    ga1: Gi,
    gb1: Gi,
    gc: [Gi; 4],
    gd: [Gi; 4],
    gc11: Gi,
    gd11: Gi,
    gs_e22: Gi,
    gs_e33: Gi,
    /// `A11 Y1 B11 + A22 Y2 B22 = T`.
    core_y: TwoTermCore,
    /// `E11 V3 E33 + E22 W3 E44 = F`.
    core_vw: TwoTermCore,
}

pub(crate) fn prepare(inst: &FiveTermInstance, o: &Opts) -> Result<Prepared> {
    inst.validate()?;
    let FiveTermInstance { a1, b1, a2, b2, a3, b3, a4, b4, b } = inst;
    let ga1 = gi(a1, o)?;
    let gb1 = gi(b1, o)?;
    let a11 = &ga1.r * a2;
    let a22 = &ga1.r * a3;
    let a33 = &ga1.r * a4;
    let b11 = b2 * &gb1.l;
    let b22 = b3 * &gb1.l;
    let b33 = b4 * &gb1.l;
    let t1 = &(&ga1.r * b) * &gb1.l;

    let core_y = TwoTermCore::new(&a11, &b11, &a22, &b22, o)?;
    let (m1, n1, s1) = (core_y.m.a.clone(), core_y.n.a.clone(), core_y.s.a.clone());
    let c = &core_y.m.r * &core_y.a.r;
    let d = &core_y.b.l * &core_y.n.l;
    let c1 = &c * &a33;
    let c2 = &core_y.a.r * &a33;
    let c3 = &core_y.c.r * &a33;
    let c4 = a33.clone();
    let d1 = b33.clone();
    let d2 = &b33 * &core_y.d.l;
    let d3 = &b33 * &core_y.b.l;
    let d4 = &b33 * &d;
    let e1 = &c * &t1;
    let e2 = &(&core_y.a.r * &t1) * &core_y.d.l;
    let e3 = &(&core_y.c.r * &t1) * &core_y.b.l;
    let e4 = &t1 * &d;

    let gc = [gi(&c1, o)?, gi(&c2, o)?, gi(&c3, o)?, gi(&c4, o)?];
    let gd = [gi(&d1, o)?, gi(&d2, o)?, gi(&d3, o)?, gi(&d4, o)?];
    let c11 = QMatrix::hstack(&[&gc[1].l, &gc[3].l])?;
    let d11 = QMatrix::vstack(&[&gd[0].r, &gd[2].r])?;
    let c22 = gc[0].l.clone();
    let d22 = gd[1].r.clone();
    let c33 = gc[2].l.clone();
    let d33 = gd[3].r.clone();
    let f11 = &c2 * &gc[0].l;
    let g1 = &e2 - &(&(&(&(&c2 * &gc[0].p) * &e1) * &gd[0].p) * &d2);
    let f22 = &c4 * &gc[2].l;
    let g2 = &e4 - &(&(&(&(&c4 * &gc[2].p) * &e3) * &gd[2].p) * &d4);
    let f1 = &(&(&gc[0].p * &e1) * &gd[0].p) + &(&(&(&gc[0].l * &gc[1].p) * &e2) * &gd[1].p);
    let f2 = &(&(&gc[2].p * &e3) * &gd[2].p) + &(&(&(&gc[2].l * &gc[3].p) * &e4) * &gd[3].p);

    let gc11 = gi(&c11, o)?;
    let gd11 = gi(&d11, o)?;
    let e11 = &gc11.r * &c22;
    let e22 = &gc11.r * &c33;
    let e33 = &d22 * &gd11.l;
    let e44 = &d33 * &gd11.l;
    let core_vw = TwoTermCore::new(&e11, &e33, &e22, &e44, o)?;
    let (m, n, s) = (core_vw.m.a.clone(), core_vw.n.a.clone(), core_vw.s.a.clone());
    let f = &f2 - &f1;
    let e = &(&gc11.r * &f) * &gd11.l;
    let gs_e22 = core_vw.c.clone();
    let gs_e33 = core_vw.b.clone();

    let im = FiveTermIntermediates {
        a11, a22, a33, b11, b22, b33, t1, n1, m1, s1, c, c1, c2, c3, c4, d, d1, d2, d3, d4, e1, e2, e3, e4,
        c11, d11, c22, d22, c33, d33, f1, f2, e11, e22, e33, e44, m, n, f, e, s, g1, g2, f11, f22,
    };
    Ok(Prepared { inst: inst.clone(), im, ga1, gb1, gc, gd, gc11, gd11, gs_e22, gs_e33, core_y, core_vw })
}

/// Names of the residual conditions, in order: for `i = 1..4` the pair
/// `R_{Ci} Ei`, `Ei L_{Di}`, then `R_{E22} E L_{E33}`.
pub(crate) type ConditionNames = ([String; 8], String);

impl Prepared {
    /// The residual certificate: `R_{Ci} Ei = 0`, `Ei L_{Di} = 0` (`i = 1..4`) and
    /// `R_{E22} E L_{E33} = 0`.
    pub fn conditions(&self, rep: &mut SolvabilityReport, scale: f64, names: Option<&ConditionNames>) {
        let im = &self.im;
        let es = [&im.e1, &im.e2, &im.e3, &im.e4];
        for i in 0..4 {
            let (n1, n2) = match names {
                Some((n, _)) => (n[2 * i].clone(), n[2 * i + 1].clone()),
                None => (format!("R_C{0} E{0} = 0", i + 1), format!("E{0} L_D{0} = 0", i + 1)),
            };
            rep.mp(n1, &(&self.gc[i].r * es[i]), scale);
            rep.mp(n2, &(es[i] * &self.gd[i].l), scale);
        }
        let last = names.map_or_else(|| "R_E22 E L_E33 = 0".to_string(), |(_, l)| l.clone());
        rep.mp(last, &(&(&self.gs_e22.r * &im.e) * &self.gs_e33.l), scale);
    }

    pub fn param_shapes(&self) -> Vec<ParamShape> {
        let (a1, b1) = (&self.inst.a1, &self.inst.b1);
        let [s4, s5, s6, s7, s8] = self.core_y.shapes();
        let [s31, s32, s33, s41, s42] = self.core_vw.shapes();
        let (c11, d11) = (&self.im.c11, &self.im.d11);
        vec![
            ParamShape::new("U1", (a1.rows(), b1.rows())),
            ParamShape::new("U2", (a1.cols(), b1.cols())),
            ParamShape::new("U3", (a1.rows(), b1.rows())),
            ParamShape::new("U4", s4),
            ParamShape::new("U5", s5),
            ParamShape::new("U6", s6),
            ParamShape::new("U7", s7),
            ParamShape::new("U8", s8),
            ParamShape::new("U11", (c11.rows(), d11.rows())),
            ParamShape::new("U12", (c11.cols(), d11.cols())),
            ParamShape::new("U21", (c11.rows(), d11.rows())),
            ParamShape::new("U31", s31),
            ParamShape::new("U32", s32),
            ParamShape::new("U33", s33),
            ParamShape::new("U41", s41),
            ParamShape::new("U42", s42),
        ]
    }

    pub fn assemble(&self, p: &Params, branch: Branch) -> Result<FiveTermSolution> {
        let im = &self.im;
        let inst = &self.inst;
        let (v3, w3) = self.core_vw.solve(
            &im.f,
            &TwoTermFree { y11: p.get("U31"), y12: p.get("U32"), y13: p.get("U33"), y14: p.get("U41"), y15: p.get("U42") },
        );
        let fp = &(&im.f - &(&(&im.c22 * &v3) * &im.d22)) - &(&(&im.c33 * &w3) * &im.d33);
        let (u11, u12, u21) = (p.get("U11"), p.get("U12"), p.get("U21"));
        let vw1 = &(&self.gc11.p * &fp) - &(&(&(&self.gc11.p * u11) * &im.d11) - &(&self.gc11.l * u12));
        let vw2 = &(&(&(&self.gc11.r * &fp) * &self.gd11.p) + &(&(&im.c11 * &self.gc11.p) * u11)) + &(u21 * &self.gd11.r);
        let m = inst.a4.cols();
        let n = inst.b4.rows();
        let y3 = match branch {
            Branch::First => {
                let v1 = &QMatrix::row_selector(m, 0, 2 * m)? * &vw1;
                let v2 = &vw2 * &QMatrix::col_selector(n, 0, 2 * n)?;
                let mut y = im.f1.clone();
                y += &(&self.gc[1].l * &v1);
                y += &(&v2 * &self.gd[0].r);
                y += &(&(&self.gc[0].l * &v3) * &self.gd[1].r);
                y
            }
            Branch::Second => {
                let w1 = &QMatrix::row_selector(m, m, 2 * m)? * &vw1;
                let w2 = &vw2 * &QMatrix::col_selector(n, n, 2 * n)?;
                let mut y = im.f2.clone();
                y -= &(&self.gc[3].l * &w1);
                y -= &(&w2 * &self.gd[2].r);
                y -= &(&(&self.gc[2].l * &w3) * &self.gd[3].r);
                y
            }
        };
        let t = &im.t1 - &(&(&im.a33 * &y3) * &im.b33);
        let (y1, y2) = self.core_y.solve(
            &t,
            &TwoTermFree { y11: p.get("U4"), y12: p.get("U5"), y13: p.get("U6"), y14: p.get("U7"), y15: p.get("U8") },
        );
        let mut bp = inst.b.clone();
        bp -= &(&(&inst.a2 * &y1) * &inst.b2);
        bp -= &(&(&inst.a3 * &y2) * &inst.b3);
        bp -= &(&(&inst.a4 * &y3) * &inst.b4);
        let (u1, u2, u3) = (p.get("U1"), p.get("U2"), p.get("U3"));
        let x1 = &(&(&self.ga1.p * &bp) - &(&(&self.ga1.p * u1) * &inst.b1)) + &(&self.ga1.l * u2);
        let x2 = &(&(&(&self.ga1.r * &bp) * &self.gb1.p) + &(&(&inst.a1 * &self.ga1.p) * u1)) + &(u3 * &self.gb1.r);
        Ok(FiveTermSolution { x1, x2, y1, y2, y3 })
    }

    pub fn family(self: Arc<Self>, branch: Branch) -> Result<Family<FiveTermSolution>> {
        let shapes = self.param_shapes();
        Family::from_named(shapes, move |p| self.assemble(p, branch))
    }
}

/// All intermediates of the reduction.
pub fn five_term_intermediates(inst: &FiveTermInstance, o: &Opts) -> Result<FiveTermIntermediates> {
    Ok(prepare(inst, o)?.im)
}

/// The nine rank equalities of the five-term equation.
pub fn five_term_rank_conditions(inst: &FiveTermInstance, rep: &mut SolvabilityReport, o: &Opts) -> Result<()> {
    let FiveTermInstance { a1, b1, a2, b2, a3, b3, a4, b4, b } = inst;
    let r = |m: &QMatrix| o.rank(m);
    let h = |ms: &[&QMatrix]| QMatrix::hstack(ms);
    let v = |ms: &[&QMatrix]| QMatrix::vstack(ms);
    rep.rank_of("r[B A2 A3 A4 A1; B1 0] = r(B1) + r(A2 A3 A4 A1)", &qblock![[b, a2, a3, a4, a1], [b1, 0, 0, 0, 0]]?, r(b1)? + r(&h(&[a2, a3, a4, a1])?)?, o)?;
    rep.rank_of("r[B A2 A4 A1; B3 0; B1 0] = r(A2 A4 A1) + r(B3; B1)", &qblock![[b, a2, a4, a1], [b3, 0, 0, 0], [b1, 0, 0, 0]]?, r(&h(&[a2, a4, a1])?)? + r(&v(&[b3, b1])?)?, o)?;
    rep.rank_of("r[B A3 A4 A1; B2 0; B1 0] = r(A3 A4 A1) + r(B2; B1)", &qblock![[b, a3, a4, a1], [b2, 0, 0, 0], [b1, 0, 0, 0]]?, r(&h(&[a3, a4, a1])?)? + r(&v(&[b2, b1])?)?, o)?;
    rep.rank_of("r[B A4 A1; B2 0; B3 0; B1 0] = r(B2; B3; B1) + r(A4 A1)", &qblock![[b, a4, a1], [b2, 0, 0], [b3, 0, 0], [b1, 0, 0]]?, r(&v(&[b2, b3, b1])?)? + r(&h(&[a4, a1])?)?, o)?;
    rep.rank_of("r[B A2 A3 A1; B4 0; B1 0] = r(A2 A3 A1) + r(B4; B1)", &qblock![[b, a2, a3, a1], [b4, 0, 0, 0], [b1, 0, 0, 0]]?, r(&h(&[a2, a3, a1])?)? + r(&v(&[b4, b1])?)?, o)?;
    rep.rank_of("r[B A2 A1; B3 0; B4 0; B1 0] = r(B3; B4; B1) + r(A2 A1)", &qblock![[b, a2, a1], [b3, 0, 0], [b4, 0, 0], [b1, 0, 0]]?, r(&v(&[b3, b4, b1])?)? + r(&h(&[a2, a1])?)?, o)?;
    rep.rank_of("r[B A3 A1; B2 0; B4 0; B1 0] = r(B2; B4; B1) + r(A3 A1)", &qblock![[b, a3, a1], [b2, 0, 0], [b4, 0, 0], [b1, 0, 0]]?, r(&v(&[b2, b4, b1])?)? + r(&h(&[a3, a1])?)?, o)?;
    rep.rank_of("r[B A1; B2 0; B3 0; B4 0; B1 0] = r(B2; B3; B4; B1) + r(A1)", &qblock![[b, a1], [b2, 0], [b3, 0], [b4, 0], [b1, 0]]?, r(&v(&[b2, b3, b4, b1])?)? + r(a1)?, o)?;
    let nb = -b;
    let big = qblock![
        [b, a2, a1, 0, 0, 0, a4],
        [b3, 0, 0, 0, 0, 0, 0],
        [b1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, nb, a3, a1, a4],
        [0, 0, 0, b2, 0, 0, 0],
        [0, 0, 0, b1, 0, 0, 0],
        [b4, 0, 0, b4, 0, 0, 0]
    ]?;
    let rhs1 = qblock![[b3, 0], [b1, 0], [0, b2], [0, b1], [b4, b4]]?;
    let rhs2 = qblock![[a2, a1, 0, 0, a4], [0, 0, a3, a1, a4]]?;
    rep.rank_of("r[coupled 7x7 block] = r[B-blocks] + r[A-blocks]", &big, r(&rhs1)? + r(&rhs2)?, o)?;
    Ok(())
}

/// Solves the five-term equation. Both certificate forms are evaluated.
pub fn solve_five_term(inst: &FiveTermInstance, o: &Opts) -> Result<Outcome<FiveTermSolution>> {
    let prep = Arc::new(prepare(inst, o)?);
    let mut rep = SolvabilityReport::new(o.tol);
    prep.conditions(&mut rep, inst.scale(), None);
    five_term_rank_conditions(inst, &mut rep, o)?;
    let branch = o.branch;
    Outcome::decide(rep, move || prep.family(branch))
}
