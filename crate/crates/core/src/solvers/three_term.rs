//! `Ai Wi = Ci, Wi Bi = Di (i = 1..3)`, `E1 X F1 + E2 Y F2 + E3 Z F3 = C`
//! with `(W1, W2, W3) = (X, Y, Z)`, handled as the coupled system with its first slot empty.

use crate::error::Result;
use crate::qblock;
use crate::qmatrix::QMatrix;
use crate::solvers::master::{check_master_residuals, MasterInstance};
use crate::solvers::{solve_master, Blocks, Opts, Outcome, SolvabilityReport};

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeTermInstance {
    pub a: [QMatrix; 3],
    pub b: [QMatrix; 3],
    pub c: [QMatrix; 3],
    pub d: [QMatrix; 3],
    pub e: [QMatrix; 3],
    pub f: [QMatrix; 3],
    pub cc: QMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeTermSolution {
    pub x: QMatrix,
    pub y: QMatrix,
    pub z: QMatrix,
}

impl Blocks for ThreeTermSolution {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("X", &self.x), ("Y", &self.y), ("Z", &self.z)]
    }
}

impl ThreeTermInstance {
    /// The coupled instance with slot 1 zero-sized and slots 2..4 taken from this one.
    pub fn lift(&self) -> MasterInstance {
        let mut m = MasterInstance::empty(self.cc.clone());
        for k in 0..3 {
            m.a[k + 1] = self.a[k].clone();
            m.b[k + 1] = self.b[k].clone();
            m.c[k + 1] = self.c[k].clone();
            m.d[k + 1] = self.d[k].clone();
            m.e[k + 1] = self.e[k].clone();
            m.f[k + 1] = self.f[k].clone();
        }
        m
    }

    pub fn residuals(&self, s: &ThreeTermSolution) -> Result<Vec<(String, QMatrix)>> {
        let mut out = Vec::with_capacity(7);
        let mut main = -&self.cc;
        for (k, (nm, w)) in [("X", &s.x), ("Y", &s.y), ("Z", &s.z)].into_iter().enumerate() {
            let i = k + 1;
            out.push((format!("A{i} {nm} = C{i}"), (&self.a[k] * w).try_sub(&self.c[k])?));
            out.push((format!("{nm} B{i} = D{i}"), (w * &self.b[k]).try_sub(&self.d[k])?));
            main = main.try_add(&self.e[k].try_mul(w)?.try_mul(&self.f[k])?)?;
        }
        out.push(("E1 X F1 + E2 Y F2 + E3 Z F3 = C".to_string(), main));
        Ok(out)
    }

    pub fn scale(&self) -> f64 {
        self.lift().scale()
    }
}

/// The rank certificate stated directly in the three-term coefficients.
pub fn three_term_rank_conditions(inst: &ThreeTermInstance, rep: &mut SolvabilityReport, o: &Opts) -> Result<()> {
    let r = |m: &QMatrix| o.rank(m);
    let [a1, a2, a3] = &inst.a;
    let [b1, b2, b3] = &inst.b;
    let [c1, c2, c3] = &inst.c;
    let [d1, d2, d3] = &inst.d;
    let [e1, e2, e3] = &inst.e;
    let [f1, f2, f3] = &inst.f;
    let c = &inst.cc;
    for k in 0..3 {
        let s = k + 1;
        rep.rank_of(format!("r(C{s}, A{s}) = r(A{s})"), &QMatrix::hstack(&[&inst.c[k], &inst.a[k]])?, r(&inst.a[k])?, o)?;
        rep.rank_of(format!("r(D{s}; B{s}) = r(B{s})"), &QMatrix::vstack(&[&inst.d[k], &inst.b[k]])?, r(&inst.b[k])?, o)?;
    }
    let (c1f1, c2f2, c3f3) = (c1 * f1, c2 * f2, c3 * f3);
    let (e1d1, e2d2, e3d3) = (e1 * d1, e2 * d2, e3 * d3);
    let v = |ms: &[&QMatrix]| QMatrix::vstack(ms);
    let h = |ms: &[&QMatrix]| QMatrix::hstack(ms);

    rep.rank_of(
        "coupled rank, X Y Z through A-blocks",
        &qblock![[c, e1, e2, e3], [c1f1, a1, 0, 0], [c2f2, 0, a2, 0], [c3f3, 0, 0, a3]]?,
        r(&qblock![[e1, e2, e3], [a1, 0, 0], [0, a2, 0], [0, 0, a3]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, Y through B-blocks",
        &qblock![[c, e1, e3, e2d2], [f2, 0, 0, b2], [c1f1, a1, 0, 0], [c3f3, 0, a3, 0]]?,
        r(&qblock![[e1, e3], [a1, 0], [0, a3]]?)? + r(&h(&[f2, b2])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X through B-blocks",
        &qblock![[c, e3, e2, e1d1], [f1, 0, 0, b1], [c3f3, a3, 0, 0], [c2f2, 0, a2, 0]]?,
        r(&qblock![[e3, e2], [a3, 0], [0, a2]]?)? + r(&h(&[f1, b1])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Y through B-blocks",
        &qblock![[c, e3, e1d1, e2d2], [f1, 0, b1, 0], [f2, 0, 0, b2], [c3f3, a3, 0, 0]]?,
        r(&qblock![[f1, b1, 0], [f2, 0, b2]]?)? + r(&v(&[e3, a3])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, Z through B-blocks",
        &qblock![[c, e1, e2, e3d3], [f3, 0, 0, b3], [c1f1, a1, 0, 0], [c2f2, 0, a2, 0]]?,
        r(&qblock![[e1, e2], [a1, 0], [0, a2]]?)? + r(&h(&[f3, b3])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, Y Z through B-blocks",
        &qblock![[c, e1, e3d3, e2d2], [f3, 0, b3, 0], [f2, 0, 0, b2], [c1f1, a1, 0, 0]]?,
        r(&qblock![[f3, b3, 0], [f2, 0, b2]]?)? + r(&v(&[e1, a1])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Z through B-blocks",
        &qblock![[c, e2, e1d1, e3d3], [f1, 0, b1, 0], [f3, 0, 0, b3], [c2f2, a2, 0, 0]]?,
        r(&qblock![[f1, b1, 0], [f3, 0, b3]]?)? + r(&v(&[e2, a2])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Y Z through B-blocks",
        &qblock![[c, e1d1, e2d2, e3d3], [f1, b1, 0, 0], [f2, 0, b2, 0], [f3, 0, 0, b3]]?,
        r(&qblock![[f1, b1, 0, 0], [f2, 0, b2, 0], [f3, 0, 0, b3]]?)?,
        o,
    )?;
    let (nc, ne1d1, nc2f2, nc3f3) = (-c, -&e1d1, -&c2f2, -&c3f3);
    let big = qblock![
        [c, 0, e1, 0, e3, e2d2, 0, e3d3],
        [0, nc, 0, e2, e3, 0, ne1d1, 0],
        [f2, 0, 0, 0, 0, b2, 0, 0],
        [0, f1, 0, 0, 0, 0, b1, 0],
        [f3, f3, 0, 0, 0, 0, 0, b3],
        [c1f1, 0, a1, 0, 0, 0, 0, 0],
        [0, nc2f2, 0, a2, 0, 0, 0, 0],
        [0, nc3f3, 0, 0, a3, 0, 0, 0]
    ]?;
    let rhs = r(&qblock![[f2, 0, b2, 0, 0], [0, f1, 0, b1, 0], [f3, f3, 0, 0, b3]]?)?
        + r(&qblock![[e1, 0, e3], [0, e2, e3], [a1, 0, 0], [0, a2, 0], [0, 0, a3]]?)?;
    rep.rank_of("coupled rank, doubled block", &big, rhs, o)?;
    Ok(())
}

/// Residual certificate of the lifted coupled system plus the three-term rank list.
pub fn check_three_term_system(inst: &ThreeTermInstance, o: &Opts) -> Result<SolvabilityReport> {
    let mut rep = check_master_residuals(&inst.lift(), o)?;
    three_term_rank_conditions(inst, &mut rep, o)?;
    Ok(rep.finish())
}

pub fn solve_three_term_system(inst: &ThreeTermInstance, o: &Opts) -> Result<Outcome<ThreeTermSolution>> {
    Ok(match solve_master(&inst.lift(), o)? {
        Outcome::Consistent { family, report } => Outcome::Consistent {
            family: family.map(|s| Ok(ThreeTermSolution { x: s.x, y: s.y, z: s.z }))?,
            report,
        },
        Outcome::Inconsistent(r) => Outcome::Inconsistent(r),
    })
}
