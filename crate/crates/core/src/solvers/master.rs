//! The coupled system
//! `A1 U = C1, V B1 = D1, Ai Wi = Ci, Wi Bi = Di (i = 2..4),`
//! `E1 U + V F1 + E2 X F2 + E3 Y F3 + E4 Z F4 = Cc` with `(W2, W3, W4) = (X, Y, Z)`.

use std::sync::Arc;

use crate::error::{dim, Error, Result};
use crate::qblock;
use crate::qmatrix::QMatrix;
use crate::solvers::basic::pair_particular;
use crate::solvers::five_term::{prepare, FiveTermInstance, FiveTermSolution};
use crate::solvers::{gi, scale_of, Blocks, Family, Gi, Opts, Outcome, SolvabilityReport};

/// Coefficients of the coupled system. Index `k` of each array holds the block with
/// subscript `k + 1`; zero-sized blocks switch the corresponding equations off.
#[derive(Clone, Debug, PartialEq)]
pub struct MasterInstance {
    pub a: [QMatrix; 4],
    pub b: [QMatrix; 4],
    pub c: [QMatrix; 4],
    pub d: [QMatrix; 4],
    pub e: [QMatrix; 4],
    pub f: [QMatrix; 4],
    pub cc: QMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MasterSolution {
    pub u: QMatrix,
    pub v: QMatrix,
    pub x: QMatrix,
    pub y: QMatrix,
    pub z: QMatrix,
}

impl Blocks for MasterSolution {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("U", &self.u), ("V", &self.v), ("X", &self.x), ("Y", &self.y), ("Z", &self.z)]
    }
}

/// Every derived matrix of the reduction to a five-term equation.
#[derive(Clone, Debug)]
pub struct MasterIntermediates {
    /// `E1 L_{A1}`, `E2 L_{A2}`, `E3 L_{A3}`, `E4 L_{A4}`.
    pub a_ii: [QMatrix; 4],
    /// `R_{B1} F1`, …, `R_{B4} F4`.
    pub b_ii: [QMatrix; 4],
    /// `B21, B31, B41`: `Bjj L_{B11}` for `j = 2..4`.
    pub b_j1: [QMatrix; 3],
    /// `A12, A13, A14`: `R_{A11} Ajj` for `j = 2..4`.
    pub a_1j: [QMatrix; 3],
    pub t1: QMatrix,
    pub t2: QMatrix,
    pub n1: QMatrix,
    pub m1: QMatrix,
    /// `A13 L_{M1}`; unrelated to the unknown `S1` of the solution formula.
    pub s1_mid: QMatrix,
    pub g: QMatrix,
    pub g_i: [QMatrix; 4],
    pub h: QMatrix,
    pub h_i: [QMatrix; 4],
    pub l_i: [QMatrix; 4],
    pub c11: QMatrix,
    pub d11: QMatrix,
    pub c22: QMatrix,
    pub d22: QMatrix,
    pub c33: QMatrix,
    pub d33: QMatrix,
    pub e11: QMatrix,
    pub e22: QMatrix,
    pub e33: QMatrix,
    pub e44: QMatrix,
    pub m: QMatrix,
    pub n: QMatrix,
    pub f: QMatrix,
    pub e: QMatrix,
    pub s: QMatrix,
    pub f11: QMatrix,
    pub g11: QMatrix,
    pub f22: QMatrix,
    pub g22: QMatrix,
    pub f33: QMatrix,
    pub f44: QMatrix,
}

const SLOT: [&str; 4] = ["1", "2", "3", "4"];

impl MasterInstance {
    /// An instance whose every block is zero-sized except `Cc`.
    pub fn empty(cc: QMatrix) -> Self {
        let (p, q) = cc.shape();
        let z = || std::array::from_fn(|_| QMatrix::zeros(0, 0));
        let mut inst = MasterInstance {
            a: z(),
            b: z(),
            c: z(),
            d: z(),
            e: std::array::from_fn(|_| QMatrix::zeros(p, 0)),
            f: std::array::from_fn(|_| QMatrix::zeros(0, q)),
            cc,
        };
        inst.c[0] = QMatrix::zeros(0, q);
        inst.d[0] = QMatrix::zeros(p, 0);
        inst
    }

    /// Unknown shapes `(U, V, X, Y, Z)` implied by the coefficients.
    pub fn unknown_shapes(&self) -> [(usize, usize); 5] {
        let (p, q) = self.cc.shape();
        [
            (self.e[0].cols(), q),
            (p, self.f[0].rows()),
            (self.e[1].cols(), self.f[1].rows()),
            (self.e[2].cols(), self.f[2].rows()),
            (self.e[3].cols(), self.f[3].rows()),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let (p, q) = self.cc.shape();
        let check = |ok: bool, what: String| if ok { Ok(()) } else { Err(Error::Shape(what)) };
        let sh = |m: &QMatrix| format!("{}x{}", m.rows(), m.cols());
        for k in 0..4 {
            let s = SLOT[k];
            let (a, b, c, d, e, f) = (&self.a[k], &self.b[k], &self.c[k], &self.d[k], &self.e[k], &self.f[k]);
            if k == 0 {
                // U is nu x q, V is p x s
                let nu = e.cols();
                let sv = f.rows();
                check(e.rows() == p, format!("E1 is {} but Cc has {p} rows", sh(e)))?;
                check(f.cols() == q, format!("F1 is {} but Cc has {q} columns", sh(f)))?;
                check(a.cols() == nu, format!("A1 is {} but U has {nu} rows (from E1)", sh(a)))?;
                check(c.rows() == a.rows() && c.cols() == q, format!("C1 is {}, expected {}x{q}", sh(c), a.rows()))?;
                check(b.rows() == sv, format!("B1 is {} but V has {sv} columns (from F1)", sh(b)))?;
                check(d.rows() == p && d.cols() == b.cols(), format!("D1 is {}, expected {p}x{}", sh(d), b.cols()))?;
            } else {
                let (n, m) = (e.cols(), f.rows());
                check(e.rows() == p, format!("E{s} is {} but Cc has {p} rows", sh(e)))?;
                check(f.cols() == q, format!("F{s} is {} but Cc has {q} columns", sh(f)))?;
                check(a.cols() == n, format!("A{s} is {} but the unknown has {n} rows (from E{s})", sh(a)))?;
                check(c.rows() == a.rows() && c.cols() == m, format!("C{s} is {}, expected {}x{m}", sh(c), a.rows()))?;
                check(b.rows() == m, format!("B{s} is {} but the unknown has {m} columns (from F{s})", sh(b)))?;
                check(d.rows() == n && d.cols() == b.cols(), format!("D{s} is {}, expected {n}x{}", sh(d), b.cols()))?;
            }
        }
        Ok(())
    }

    /// Named residual matrices of all nine equations.
    pub fn residuals(&self, s: &MasterSolution) -> Result<Vec<(String, QMatrix)>> {
        let shapes = self.unknown_shapes();
        for ((nm, m), want) in s.blocks().into_iter().zip(shapes) {
            if m.shape() != want {
                return Err(dim(nm, m.shape(), want));
            }
        }
        let mut out = vec![
            ("A1 U = C1".to_string(), &(&self.a[0] * &s.u) - &self.c[0]),
            ("V B1 = D1".to_string(), &(&s.v * &self.b[0]) - &self.d[0]),
        ];
        for k in 1..4 {
            let (nm, w) = [("X", &s.x), ("Y", &s.y), ("Z", &s.z)][k - 1];
            out.push((format!("A{} {nm} = C{}", k + 1, k + 1), &(&self.a[k] * w) - &self.c[k]));
            out.push((format!("{nm} B{} = D{}", k + 1, k + 1), &(w * &self.b[k]) - &self.d[k]));
        }
        let mut main = &self.e[0] * &s.u;
        main += &(&s.v * &self.f[0]);
        main += &(&(&self.e[1] * &s.x) * &self.f[1]);
        main += &(&(&self.e[2] * &s.y) * &self.f[2]);
        main += &(&(&self.e[3] * &s.z) * &self.f[3]);
        out.push(("E1 U + V F1 + E2 X F2 + E3 Y F3 + E4 Z F4 = Cc".to_string(), &main - &self.cc));
        Ok(out)
    }

    pub fn blocks(&self) -> Vec<(String, &QMatrix)> {
        let mut out = Vec::with_capacity(25);
        for (l, arr) in [("A", &self.a), ("B", &self.b), ("C", &self.c), ("D", &self.d), ("E", &self.e), ("F", &self.f)] {
            for (k, m) in arr.iter().enumerate() {
                out.push((format!("{l}{}", k + 1), m));
            }
        }
        out.push(("Cc".to_string(), &self.cc));
        out
    }

    pub fn scale(&self) -> f64 {
        scale_of(self.blocks().into_iter().map(|(_, m)| m))
    }
}

/// Side-equation data and the prepared five-term reduction.
struct Reduction {
    ga: [Gi; 4],
    gb: [Gi; 4],
    /// Particular solutions `Ai† Ci + L_{Ai} Di Bi†` of the pair equations (`i = 2..4`).
    w0: [QMatrix; 3],
    five: Arc<crate::solvers::five_term::Prepared>,
    t1: QMatrix,
    a_ii: [QMatrix; 4],
    b_ii: [QMatrix; 4],
}

fn reduce(inst: &MasterInstance, o: &Opts) -> Result<Reduction> {
    inst.validate()?;
    let ga: [Gi; 4] = [gi(&inst.a[0], o)?, gi(&inst.a[1], o)?, gi(&inst.a[2], o)?, gi(&inst.a[3], o)?];
    let gb: [Gi; 4] = [gi(&inst.b[0], o)?, gi(&inst.b[1], o)?, gi(&inst.b[2], o)?, gi(&inst.b[3], o)?];
    let mut t1 = inst.cc.clone();
    t1 -= &(&(&inst.e[0] * &ga[0].p) * &inst.c[0]);
    t1 -= &(&(&inst.d[0] * &gb[0].p) * &inst.f[0]);
    let w0: [QMatrix; 3] = std::array::from_fn(|j| pair_particular(&ga[j + 1], &inst.c[j + 1], &gb[j + 1], &inst.d[j + 1]));
    for j in 0..3 {
        t1 -= &(&(&inst.e[j + 1] * &w0[j]) * &inst.f[j + 1]);
    }
    let a_ii: [QMatrix; 4] = std::array::from_fn(|k| &inst.e[k] * &ga[k].l);
    let b_ii: [QMatrix; 4] = std::array::from_fn(|k| &gb[k].r * &inst.f[k]);
    let reduced = FiveTermInstance {
        a1: a_ii[0].clone(),
        b1: b_ii[0].clone(),
        a2: a_ii[1].clone(),
        b2: b_ii[1].clone(),
        a3: a_ii[2].clone(),
        b3: b_ii[2].clone(),
        a4: a_ii[3].clone(),
        b4: b_ii[3].clone(),
        b: t1.clone(),
    };
    let five = Arc::new(prepare(&reduced, o)?);
    Ok(Reduction { ga, gb, w0, five, t1, a_ii, b_ii })
}

fn reduced_condition_names() -> ([String; 8], String) {
    let n = std::array::from_fn(|k| {
        let i = k / 2 + 1;
        if k % 2 == 0 {
            format!("R_G{i} L{i} = 0")
        } else {
            format!("L{i} L_H{i} = 0")
        }
    });
    (n, "R_E22 E L_E33 = 0".to_string())
}

fn residual_report(inst: &MasterInstance, red: &Reduction, o: &Opts) -> SolvabilityReport {
    let sc = inst.scale();
    let mut rep = SolvabilityReport::new(o.tol);
    for k in 1..4 {
        rep.compat(
            format!("A{0} D{0} = C{0} B{0}", k + 1),
            &(&inst.a[k] * &inst.d[k]),
            &(&inst.c[k] * &inst.b[k]),
            sc * sc,
        );
    }
    for k in 0..4 {
        rep.mp(format!("R_A{0} C{0} = 0", k + 1), &(&red.ga[k].r * &inst.c[k]), sc);
        rep.mp(format!("D{0} L_B{0} = 0", k + 1), &(&inst.d[k] * &red.gb[k].l), sc);
    }
    red.five.conditions(&mut rep, sc, Some(&reduced_condition_names()));
    rep
}

/// Appends the rank certificate of the coupled system to `rep`.
pub fn master_rank_conditions(inst: &MasterInstance, rep: &mut SolvabilityReport, o: &Opts) -> Result<()> {
    let r = |m: &QMatrix| o.rank(m);
    let [a1, a2, a3, a4] = &inst.a;
    let [b1, b2, b3, b4] = &inst.b;
    let [c1, c2, c3, c4] = &inst.c;
    let [d1, d2, d3, d4] = &inst.d;
    let [e1, e2, e3, e4] = &inst.e;
    let [f1, f2, f3, f4] = &inst.f;
    let cc = &inst.cc;
    for k in 0..4 {
        let s = SLOT[k];
        rep.rank_of(format!("r(C{s}, A{s}) = r(A{s})"), &QMatrix::hstack(&[&inst.c[k], &inst.a[k]])?, r(&inst.a[k])?, o)?;
        rep.rank_of(format!("r(D{s}; B{s}) = r(B{s})"), &QMatrix::vstack(&[&inst.d[k], &inst.b[k]])?, r(&inst.b[k])?, o)?;
    }
    let (c2f2, c3f3, c4f4) = (c2 * f2, c3 * f3, c4 * f4);
    let (e2d2, e3d3, e4d4) = (e2 * d2, e3 * d3, e4 * d4);

    rep.rank_of(
        "coupled rank, X Y Z through A-blocks",
        &qblock![
            [cc, e1, e2, e3, e4, d1],
            [f1, 0, 0, 0, 0, b1],
            [c1, a1, 0, 0, 0, 0],
            [c2f2, 0, a2, 0, 0, 0],
            [c3f3, 0, 0, a3, 0, 0],
            [c4f4, 0, 0, 0, a4, 0]
        ]?,
        r(&qblock![[e1, e2, e3, e4], [a1, 0, 0, 0], [0, a2, 0, 0], [0, 0, a3, 0], [0, 0, 0, a4]]?)? + r(&QMatrix::hstack(&[f1, b1])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, Y through B-blocks",
        &qblock![
            [cc, e1, e2, e4, e3d3, d1],
            [c1, a1, 0, 0, 0, 0],
            [c2f2, 0, a2, 0, 0, 0],
            [c4f4, 0, 0, a4, 0, 0],
            [f3, 0, 0, 0, b3, 0],
            [f1, 0, 0, 0, 0, b1]
        ]?,
        r(&qblock![[e1, e2, e4], [a1, 0, 0], [0, a2, 0], [0, 0, a4]]?)? + r(&qblock![[f3, b3, 0], [f1, 0, b1]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X through B-blocks",
        &qblock![
            [cc, e1, e3, e4, e2d2, d1],
            [c1, a1, 0, 0, 0, 0],
            [c3f3, 0, a3, 0, 0, 0],
            [c4f4, 0, 0, a4, 0, 0],
            [f2, 0, 0, 0, b2, 0],
            [f1, 0, 0, 0, 0, b1]
        ]?,
        r(&qblock![[e1, e3, e4], [a1, 0, 0], [0, a3, 0], [0, 0, a4]]?)? + r(&qblock![[f2, b2, 0], [f1, 0, b1]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Y through B-blocks",
        &qblock![
            [cc, e4, e1, e2d2, e3d3, d1],
            [f2, 0, 0, b2, 0, 0],
            [f3, 0, 0, 0, b3, 0],
            [f1, 0, 0, 0, 0, b1],
            [c4f4, a4, 0, 0, 0, 0],
            [c1, 0, a1, 0, 0, 0]
        ]?,
        r(&qblock![[f2, b2, 0, 0], [f3, 0, b3, 0], [f1, 0, 0, b1]]?)? + r(&qblock![[e4, e1], [a4, 0], [0, a1]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, Z through B-blocks",
        &qblock![
            [cc, e1, e2, e3, e4d4, d1],
            [c1, a1, 0, 0, 0, 0],
            [c2f2, 0, a2, 0, 0, 0],
            [c3f3, 0, 0, a3, 0, 0],
            [f4, 0, 0, 0, b4, 0],
            [f1, 0, 0, 0, 0, b1]
        ]?,
        r(&qblock![[e1, e2, e3], [a1, 0, 0], [0, a2, 0], [0, 0, a3]]?)? + r(&qblock![[f4, b4, 0], [f1, 0, b1]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, Y Z through B-blocks",
        &qblock![
            [cc, e2, e1, e3d3, e4d4, d1],
            [f3, 0, 0, b3, 0, 0],
            [f4, 0, 0, 0, b4, 0],
            [f1, 0, 0, 0, 0, b1],
            [c2f2, a2, 0, 0, 0, 0],
            [c1, 0, a1, 0, 0, 0]
        ]?,
        r(&qblock![[f3, b3, 0, 0], [f4, 0, b4, 0], [f1, 0, 0, b1]]?)? + r(&qblock![[e2, e1], [a2, 0], [0, a1]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Z through B-blocks",
        &qblock![
            [cc, e3, e1, e2d2, e4d4, d1],
            [f2, 0, 0, b2, 0, 0],
            [f4, 0, 0, 0, b4, 0],
            [f1, 0, 0, 0, 0, b1],
            [c3f3, a3, 0, 0, 0, 0],
            [c1, 0, a1, 0, 0, 0]
        ]?,
        r(&qblock![[f2, b2, 0, 0], [f4, 0, b4, 0], [f1, 0, 0, b1]]?)? + r(&qblock![[e3, e1], [a3, 0], [0, a1]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Y Z through B-blocks",
        &qblock![
            [cc, e1, e4d4, e2d2, e3d3, d1],
            [f4, 0, b4, 0, 0, 0],
            [f2, 0, 0, b2, 0, 0],
            [f3, 0, 0, 0, b3, 0],
            [f1, 0, 0, 0, 0, b1],
            [c1, a1, 0, 0, 0, 0]
        ]?,
        r(&qblock![[f4, b4, 0, 0, 0], [f2, 0, b2, 0, 0], [f3, 0, 0, b3, 0], [f1, 0, 0, 0, b1]]?)? + r(&QMatrix::vstack(&[e1, a1])?)?,
        o,
    )?;
    let nf4 = -f4;
    let big = qblock![
        [cc, e2, e1, 0, 0, 0, e4, e3d3, d1, 0, 0, e4d4],
        [f3, 0, 0, 0, 0, 0, 0, b3, 0, 0, 0, 0],
        [f1, 0, 0, 0, 0, 0, 0, 0, b1, 0, 0, 0],
        [0, 0, 0, cc, e3, e1, e4, 0, 0, e2d2, d1, 0],
        [0, 0, 0, f2, 0, 0, 0, 0, 0, b2, 0, 0],
        [0, 0, 0, f1, 0, 0, 0, 0, 0, 0, b1, 0],
        [f4, 0, 0, nf4, 0, 0, 0, 0, 0, 0, 0, b4],
        [c2f2, a2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [c1, 0, a1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, c3f3, a3, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, c1, 0, a1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, c4f4, 0, 0, a4, 0, 0, 0, 0, 0]
    ]?;
    let rhs1 = qblock![
        [f3, 0, b3, 0, 0, 0, 0],
        [f1, 0, 0, b1, 0, 0, 0],
        [0, f2, 0, 0, b2, 0, 0],
        [0, f1, 0, 0, 0, b1, 0],
        [f4, f4, 0, 0, 0, 0, b4]
    ]?;
    let rhs2 = qblock![
        [e2, e1, 0, 0, e4],
        [0, 0, e3, e1, e4],
        [a2, 0, 0, 0, 0],
        [0, a1, 0, 0, 0],
        [0, 0, a3, 0, 0],
        [0, 0, 0, a1, 0],
        [0, 0, 0, 0, a4]
    ]?;
    rep.rank_of("coupled rank, doubled block", &big, r(&rhs1)? + r(&rhs2)?, o)?;
    Ok(())
}

/// Compatibility and residual certificates only; the report is left unfinished.
pub(crate) fn check_master_residuals(inst: &MasterInstance, o: &Opts) -> Result<SolvabilityReport> {
    let red = reduce(inst, o)?;
    Ok(residual_report(inst, &red, o))
}

/// Evaluates compatibility, residual and rank certificates.
pub fn check_master(inst: &MasterInstance, o: &Opts) -> Result<SolvabilityReport> {
    let red = reduce(inst, o)?;
    let mut rep = residual_report(inst, &red, o);
    master_rank_conditions(inst, &mut rep, o)?;
    Ok(rep.finish())
}

/// All intermediates of the reduction.
pub fn master_intermediates(inst: &MasterInstance, o: &Opts) -> Result<MasterIntermediates> {
    let red = reduce(inst, o)?;
    let im = &red.five.im;
    Ok(MasterIntermediates {
        a_ii: red.a_ii.clone(),
        b_ii: red.b_ii.clone(),
        b_j1: [im.b11.clone(), im.b22.clone(), im.b33.clone()],
        a_1j: [im.a11.clone(), im.a22.clone(), im.a33.clone()],
        t1: red.t1.clone(),
        t2: im.t1.clone(),
        n1: im.n1.clone(),
        m1: im.m1.clone(),
        s1_mid: im.s1.clone(),
        g: im.c.clone(),
        g_i: [im.c1.clone(), im.c2.clone(), im.c3.clone(), im.c4.clone()],
        h: im.d.clone(),
        h_i: [im.d1.clone(), im.d2.clone(), im.d3.clone(), im.d4.clone()],
        l_i: [im.e1.clone(), im.e2.clone(), im.e3.clone(), im.e4.clone()],
        c11: im.c11.clone(),
        d11: im.d11.clone(),
        c22: im.c22.clone(),
        d22: im.d22.clone(),
        c33: im.c33.clone(),
        d33: im.d33.clone(),
        e11: im.e11.clone(),
        e22: im.e22.clone(),
        e33: im.e33.clone(),
        e44: im.e44.clone(),
        m: im.m.clone(),
        n: im.n.clone(),
        f: im.f.clone(),
        e: im.e.clone(),
        s: im.s.clone(),
        f11: im.f11.clone(),
        g11: im.g1.clone(),
        f22: im.f22.clone(),
        g22: im.g2.clone(),
        f33: im.f1.clone(),
        f44: im.f2.clone(),
    })
}

fn master_family(inst: &MasterInstance, red: Reduction, o: &Opts) -> Result<Family<MasterSolution>> {
    let Reduction { ga, gb, w0, five, .. } = red;
    let fam = five.family(o.branch)?;
    let side = Side {
        u0: &ga[0].p * &inst.c[0],
        v0: &inst.d[0] * &gb[0].p,
        la: std::array::from_fn(|k| ga[k].l.clone()),
        rb: std::array::from_fn(|k| gb[k].r.clone()),
        w0,
    };
    fam.rename(&[("U1", "W11"), ("U2", "W12"), ("U3", "W13")]).map(move |s| Ok(side.lift(s)))
}

/// Particular side solutions and projectors that turn a reduced solution into a full one.
struct Side {
    u0: QMatrix,
    v0: QMatrix,
    la: [QMatrix; 4],
    rb: [QMatrix; 4],
    w0: [QMatrix; 3],
}

impl Side {
    fn lift(&self, s: FiveTermSolution) -> MasterSolution {
        let two = |k: usize, w: &QMatrix| &self.w0[k - 1] + &(&(&self.la[k] * w) * &self.rb[k]);
        MasterSolution {
            u: &self.u0 + &(&self.la[0] * &s.x1),
            v: &self.v0 + &(&s.x2 * &self.rb[0]),
            x: two(1, &s.y1),
            y: two(2, &s.y2),
            z: two(3, &s.y3),
        }
    }
}

/// Solves the coupled system. Only the residual certificate is evaluated; use
/// [`check_master`] for the rank form.
pub fn solve_master(inst: &MasterInstance, o: &Opts) -> Result<Outcome<MasterSolution>> {
    let red = reduce(inst, o)?;
    let rep = residual_report(inst, &red, o);
    Outcome::decide(rep, move || master_family(inst, red, o))
}
