//! `A1 X = C1, X B1 = C2, A2 Y = C3, Y B2 = C4, A3 X B3 + A4 Y B4 = Cc`.

use crate::error::{Error, Result};
use crate::qblock;
use crate::qmatrix::QMatrix;
use crate::solvers::{gi, scale_of, Blocks, Family, Gi, Opts, Outcome, ParamShape, SolvabilityReport};

#[derive(Clone, Debug, PartialEq)]
pub struct MixedInstance {
    pub a1: QMatrix,
    pub a2: QMatrix,
    pub a3: QMatrix,
    pub a4: QMatrix,
    pub b1: QMatrix,
    pub b2: QMatrix,
    pub b3: QMatrix,
    pub b4: QMatrix,
    pub c1: QMatrix,
    pub c2: QMatrix,
    pub c3: QMatrix,
    pub c4: QMatrix,
    pub cc: QMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedSolution {
    pub x: QMatrix,
    pub y: QMatrix,
}

impl Blocks for MixedSolution {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("X", &self.x), ("Y", &self.y)]
    }
}

impl MixedInstance {
    /// Unknown shapes `(X, Y)`.
    pub fn unknown_shapes(&self) -> [(usize, usize); 2] {
        [(self.a3.cols(), self.b3.rows()), (self.a4.cols(), self.b4.rows())]
    }

    pub fn validate(&self) -> Result<()> {
        let (p, q) = self.cc.shape();
        let [(n1, m1), (n2, m2)] = self.unknown_shapes();
        let sh = |m: &QMatrix| format!("{}x{}", m.rows(), m.cols());
        let checks = [
            (self.a3.rows() == p, format!("A3 is {} but Cc has {p} rows", sh(&self.a3))),
            (self.a4.rows() == p, format!("A4 is {} but Cc has {p} rows", sh(&self.a4))),
            (self.b3.cols() == q, format!("B3 is {} but Cc has {q} columns", sh(&self.b3))),
            (self.b4.cols() == q, format!("B4 is {} but Cc has {q} columns", sh(&self.b4))),
            (self.a1.cols() == n1, format!("A1 is {} but X has {n1} rows", sh(&self.a1))),
            (self.b1.rows() == m1, format!("B1 is {} but X has {m1} columns", sh(&self.b1))),
            (self.a2.cols() == n2, format!("A2 is {} but Y has {n2} rows", sh(&self.a2))),
            (self.b2.rows() == m2, format!("B2 is {} but Y has {m2} columns", sh(&self.b2))),
            (self.c1.shape() == (self.a1.rows(), m1), format!("C1 is {}, expected {}x{m1}", sh(&self.c1), self.a1.rows())),
            (self.c2.shape() == (n1, self.b1.cols()), format!("C2 is {}, expected {n1}x{}", sh(&self.c2), self.b1.cols())),
            (self.c3.shape() == (self.a2.rows(), m2), format!("C3 is {}, expected {}x{m2}", sh(&self.c3), self.a2.rows())),
            (self.c4.shape() == (n2, self.b2.cols()), format!("C4 is {}, expected {n2}x{}", sh(&self.c4), self.b2.cols())),
        ];
        match checks.into_iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::Shape(msg)),
            None => Ok(()),
        }
    }

    pub fn residuals(&self, s: &MixedSolution) -> Result<Vec<(String, QMatrix)>> {
        let main = self.a3.try_mul(&s.x)?.try_mul(&self.b3)?.try_add(&self.a4.try_mul(&s.y)?.try_mul(&self.b4)?)?;
        Ok(vec![
            ("A1 X = C1".into(), self.a1.try_mul(&s.x)?.try_sub(&self.c1)?),
            ("X B1 = C2".into(), s.x.try_mul(&self.b1)?.try_sub(&self.c2)?),
            ("A2 Y = C3".into(), self.a2.try_mul(&s.y)?.try_sub(&self.c3)?),
            ("Y B2 = C4".into(), s.y.try_mul(&self.b2)?.try_sub(&self.c4)?),
            ("A3 X B3 + A4 Y B4 = Cc".into(), main.try_sub(&self.cc)?),
        ])
    }

    pub fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![
            ("A1", &self.a1),
            ("A2", &self.a2),
            ("A3", &self.a3),
            ("A4", &self.a4),
            ("B1", &self.b1),
            ("B2", &self.b2),
            ("B3", &self.b3),
            ("B4", &self.b4),
            ("C1", &self.c1),
            ("C2", &self.c2),
            ("C3", &self.c3),
            ("C4", &self.c4),
            ("Cc", &self.cc),
        ]
    }

    pub fn scale(&self) -> f64 {
        scale_of(self.blocks().into_iter().map(|(_, m)| m))
    }
}

struct Prepared {
    g1: Gi,
    g2: Gi,
    h1: Gi,
    h2: Gi,
    /// `A = A3 L_{A1}`, `B = R_{B1} B3`, `C = A4 L_{A2}`, `D = R_{B2} B4`.
    a: Gi,
    b: Gi,
    c: Gi,
    d: Gi,
    /// `M = R_A C`, `N = D L_B`, `S = C L_M`.
    m: Gi,
    n: Gi,
    s: Gi,
    e: QMatrix,
}

fn prepare(inst: &MixedInstance, o: &Opts) -> Result<Prepared> {
    inst.validate()?;
    let g1 = gi(&inst.a1, o)?;
    let g2 = gi(&inst.a2, o)?;
    let h1 = gi(&inst.b1, o)?;
    let h2 = gi(&inst.b2, o)?;
    let a = gi(&(&inst.a3 * &g1.l), o)?;
    let b = gi(&(&h1.r * &inst.b3), o)?;
    let c = gi(&(&inst.a4 * &g2.l), o)?;
    let d = gi(&(&h2.r * &inst.b4), o)?;
    let m = gi(&(&a.r * &c.a), o)?;
    let n = gi(&(&d.a * &b.l), o)?;
    let s = gi(&(&c.a * &m.l), o)?;
    let mut e = inst.cc.clone();
    e -= &(&(&(&inst.a3 * &g1.p) * &inst.c1) * &inst.b3);
    e -= &(&(&(&a.a * &inst.c2) * &h1.p) * &inst.b3);
    e -= &(&(&(&inst.a4 * &g2.p) * &inst.c3) * &inst.b4);
    e -= &(&(&(&c.a * &inst.c4) * &h2.p) * &inst.b4);
    Ok(Prepared { g1, g2, h1, h2, a, b, c, d, m, n, s, e })
}

impl Prepared {
    fn residual_report(&self, inst: &MixedInstance, o: &Opts) -> SolvabilityReport {
        let sc = inst.scale();
        let mut rep = SolvabilityReport::new(o.tol);
        rep.compat("A1 C2 = C1 B1", &(&inst.a1 * &inst.c2), &(&inst.c1 * &inst.b1), sc * sc);
        rep.compat("A2 C4 = C3 B2", &(&inst.a2 * &inst.c4), &(&inst.c3 * &inst.b2), sc * sc);
        rep.mp("R_A1 C1 = 0", &(&self.g1.r * &inst.c1), sc);
        rep.mp("R_A2 C3 = 0", &(&self.g2.r * &inst.c3), sc);
        rep.mp("C2 L_B1 = 0", &(&inst.c2 * &self.h1.l), sc);
        rep.mp("C4 L_B2 = 0", &(&inst.c4 * &self.h2.l), sc);
        let e = &self.e;
        rep.mp("R_M R_A E = 0", &(&(&self.m.r * &self.a.r) * e), sc);
        rep.mp("R_A E L_D = 0", &(&(&self.a.r * e) * &self.d.l), sc);
        rep.mp("E L_B L_N = 0", &(&(e * &self.b.l) * &self.n.l), sc);
        rep.mp("R_C E L_B = 0", &(&(&self.c.r * e) * &self.b.l), sc);
        rep
    }

    fn param_shapes(&self) -> Vec<ParamShape> {
        let ub = (self.a.a.cols(), self.b.a.rows());
        vec![
            ParamShape::new("U", ub),
            ParamShape::new("Z", ub),
            ParamShape::new("V", (self.s.a.cols(), self.n.a.rows())),
            ParamShape::new("W", (self.c.a.cols(), self.d.a.rows())),
        ]
    }

    fn assemble(&self, inst: &MixedInstance, u: &QMatrix, z: &QMatrix, v: &QMatrix, w: &QMatrix) -> MixedSolution {
        let (a, b, c, d, m, n, s) = (&self.a, &self.b, &self.c, &self.d, &self.m, &self.n, &self.s);
        let e = &self.e;
        let l1 = &self.g1.l;
        let r1 = &self.h1.r;
        let l2 = &self.g2.l;
        let r2 = &self.h2.r;
        let cel = &(&(&c.p * e) * &b.l) * &n.p;

        let mut inner = &(&a.p * e) * &b.p;
        inner -= &(&(&(&(&(&a.p * &c.a) * &m.p) * &a.r) * e) * &b.p);
        inner -= &(&(&(&(&a.p * &s.a) * &cel) * &d.a) * &b.p);
        inner -= &(&(&(&(&(&a.p * &s.a) * v) * &n.r) * &d.a) * &b.p);
        inner += &(&a.l * u);
        inner += &(z * &b.r);
        let mut x = &self.g1.p * &inst.c1;
        x += &(&(l1 * &inst.c2) * &self.h1.p);
        x += &(&(l1 * &inner) * r1);

        let mut inner = &(&(&m.p * &a.r) * e) * &d.p;
        inner += &(&(&(&m.l * &s.p) * &s.a) * &cel);
        inner += &(&m.l * &(v - &(&(&(&(&s.p * &s.a) * v) * &n.a) * &n.p)));
        inner += &(w * &d.r);
        let mut y = &self.g2.p * &inst.c3;
        y += &(&(l2 * &inst.c4) * &self.h2.p);
        y += &(&(l2 * &inner) * r2);
        MixedSolution { x, y }
    }
}

fn rank_conditions(inst: &MixedInstance, rep: &mut SolvabilityReport, o: &Opts) -> Result<()> {
    let MixedInstance { a1, a2, a3, a4, b1, b2, b3, b4, c1, c2, c3, c4, cc } = inst;
    let r = |m: &QMatrix| o.rank(m);
    rep.rank_of("r(A1, C1) = r(A1)", &QMatrix::hstack(&[a1, c1])?, r(a1)?, o)?;
    rep.rank_of("r(A2, C3) = r(A2)", &QMatrix::hstack(&[a2, c3])?, r(a2)?, o)?;
    rep.rank_of("r(C2; B1) = r(B1)", &QMatrix::vstack(&[c2, b1])?, r(b1)?, o)?;
    rep.rank_of("r(C4; B2) = r(B2)", &QMatrix::vstack(&[c4, b2])?, r(b2)?, o)?;
    let (c1b3, c3b4, a3c2, a4c4) = (c1 * b3, c3 * b4, a3 * c2, a4 * c4);
    rep.rank_of(
        "coupled rank, X through A-blocks, Y through B-blocks",
        &qblock![[a1, 0, c1b3], [a3, a4c4, cc], [0, b2, b4]]?,
        r(&qblock![[a1, 0, 0], [a3, 0, 0], [0, b2, b4]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, Y through A-blocks, X through B-blocks",
        &qblock![[a2, 0, c3b4], [a4, a3c2, cc], [0, b1, b3]]?,
        r(&qblock![[a2, 0, 0], [a4, 0, 0], [0, b1, b3]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Y through B-blocks",
        &qblock![[b1, 0, b3], [0, b2, b4], [a3c2, a4c4, cc]]?,
        r(&qblock![[b1, 0, b3], [0, b2, b4]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Y through A-blocks",
        &qblock![[c1b3, a1, 0], [c3b4, 0, a2], [cc, a3, a4]]?,
        r(&qblock![[a1, 0], [0, a2], [a3, a4]]?)?,
        o,
    )?;
    Ok(())
}

/// Evaluates compatibility, residual and rank certificates.
pub fn check_mixed_system(inst: &MixedInstance, o: &Opts) -> Result<SolvabilityReport> {
    let prep = prepare(inst, o)?;
    let mut rep = prep.residual_report(inst, o);
    rank_conditions(inst, &mut rep, o)?;
    Ok(rep.finish())
}

/// Solves the system with both certificate forms evaluated. Free parameters are
/// `U, Z, V, W`.
pub fn solve_mixed_system(inst: &MixedInstance, o: &Opts) -> Result<Outcome<MixedSolution>> {
    let prep = prepare(inst, o)?;
    let mut rep = prep.residual_report(inst, o);
    rank_conditions(inst, &mut rep, o)?;
    let inst = inst.clone();
    Outcome::decide(rep, move || {
        Family::from_named(prep.param_shapes(), move |p| Ok(prep.assemble(&inst, p.get("U"), p.get("Z"), p.get("V"), p.get("W"))))
    })
}
