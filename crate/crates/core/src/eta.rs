//! η-Hermitian solutions.
//!
//! * full: `A1 U = C1, Ai Wi = Ci (i = 2..4)`,
//!   `E1 U + (E1 U)^η* + E2 X E2^η* + E3 Y E3^η* + E4 Z E4^η* = Cc` with `X, Y, Z` η-Hermitian;
//! * three: the same without `U`;
//! * two: `B1 Y B1^η* + C1 Z C1^η* = D1`;
//! * mixed: `A1 X = C1, Y B1 = D1, A2 X A2^η* + A3 Y A3^η* = D3`.
//!
//! The first two go through the doubled coupled system
//! `A1 U1 = C1, U2 A1^η* = C1^η*, Ai Wi = Ci, Wi Ai^η* = Ci^η*`,
//! `E1 U1 + U2 E1^η* + Σ Ei Wi Ei^η* = Cc`,
//! whose solutions map back through `U = (U1 + U2^η*)/2` and η-symmetrization.

use crate::error::{Error, Result};
use crate::qblock;
use crate::qcore::Eta;
use crate::qmatrix::QMatrix;
use crate::solvers::master::{check_master_residuals, MasterInstance, MasterSolution};
use crate::solvers::{gi, scale_of, solve_master, Blocks, Family, Gi, Opts, Outcome, ParamShape, Params, SolvabilityReport};

/// `(X + X^η*)/2`.
pub fn symmetrize(x: &QMatrix, eta: Eta) -> Result<QMatrix> {
    if !x.is_square() {
        return Err(Error::Shape(format!("symmetrize needs a square matrix, got {}x{}", x.rows(), x.cols())));
    }
    Ok((x + &x.eta_conj_transpose(eta)) * 0.5)
}

/// `‖X − X^η*‖_F`; infinite for non-square input.
pub fn hermicity_defect(x: &QMatrix, eta: Eta) -> f64 {
    if !x.is_square() {
        return f64::INFINITY;
    }
    (x - &x.eta_conj_transpose(eta)).frobenius_norm()
}

fn require_hermitian(name: &str, m: &QMatrix, eta: Eta, tol: f64) -> Result<()> {
    let d = hermicity_defect(m, eta);
    if d > tol * (1.0 + m.frobenius_norm()) {
        return Err(Error::Precondition(format!("{name} must be {eta}-Hermitian (defect {d:.3e})")));
    }
    Ok(())
}

fn herm_residual(name: &str, m: &QMatrix, eta: Eta) -> (String, QMatrix) {
    (format!("{name} = {name}^{eta}*"), m - &m.eta_conj_transpose(eta))
}

/// The four η-Hermitian problem shapes.
#[derive(Clone, Debug, PartialEq)]
pub enum EtaInstance {
    Full(EtaFullInstance),
    Three(EtaThreeInstance),
    Two(EtaTwoInstance),
    Mixed(EtaMixedInstance),
}

impl EtaInstance {
    pub fn eta(&self) -> Eta {
        match self {
            EtaInstance::Full(i) => i.eta,
            EtaInstance::Three(i) => i.eta,
            EtaInstance::Two(i) => i.eta,
            EtaInstance::Mixed(i) => i.eta,
        }
    }
}

// ---------------------------------------------------------------- full

#[derive(Clone, Debug, PartialEq)]
pub struct EtaFullInstance {
    pub eta: Eta,
    pub a: [QMatrix; 4],
    pub c: [QMatrix; 4],
    pub e: [QMatrix; 4],
    pub cc: QMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaFullSolution {
    pub u: QMatrix,
    pub x: QMatrix,
    pub y: QMatrix,
    pub z: QMatrix,
}

impl Blocks for EtaFullSolution {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("U", &self.u), ("X", &self.x), ("Y", &self.y), ("Z", &self.z)]
    }
}

impl EtaFullSolution {
    /// The doubled-system solution `(U, U^η*, X, Y, Z)`.
    pub fn to_doubled(&self, eta: Eta) -> MasterSolution {
        MasterSolution {
            u: self.u.clone(),
            v: self.u.eta_conj_transpose(eta),
            x: self.x.clone(),
            y: self.y.clone(),
            z: self.z.clone(),
        }
    }

    /// Maps a doubled-system solution back: `U = (U1 + U2^η*)/2`, the rest symmetrized.
    pub fn from_doubled(s: &MasterSolution, eta: Eta) -> Result<Self> {
        Ok(EtaFullSolution {
            u: (&s.u + &s.v.eta_conj_transpose(eta)) * 0.5,
            x: symmetrize(&s.x, eta)?,
            y: symmetrize(&s.y, eta)?,
            z: symmetrize(&s.z, eta)?,
        })
    }
}

impl EtaFullInstance {
    /// The coupled instance whose every solution maps onto a solution of this one.
    pub fn doubled(&self) -> MasterInstance {
        let ec = |m: &QMatrix| m.eta_conj_transpose(self.eta);
        MasterInstance {
            a: self.a.clone(),
            b: std::array::from_fn(|k| ec(&self.a[k])),
            c: self.c.clone(),
            d: std::array::from_fn(|k| ec(&self.c[k])),
            e: self.e.clone(),
            f: std::array::from_fn(|k| ec(&self.e[k])),
            cc: self.cc.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.doubled().validate()
    }

    pub fn scale(&self) -> f64 {
        scale_of(self.a.iter().chain(&self.c).chain(&self.e).chain([&self.cc]))
    }

    pub fn residuals(&self, s: &EtaFullSolution) -> Result<Vec<(String, QMatrix)>> {
        let eta = self.eta;
        let mut out = vec![("A1 U = C1".to_string(), self.a[0].try_mul(&s.u)?.try_sub(&self.c[0])?)];
        let e1u = self.e[0].try_mul(&s.u)?;
        let mut main = e1u.try_add(&e1u.eta_conj_transpose(eta))?;
        for (k, (nm, w)) in [("X", &s.x), ("Y", &s.y), ("Z", &s.z)].into_iter().enumerate() {
            let i = k + 2;
            out.push((format!("A{i} {nm} = C{i}"), self.a[k + 1].try_mul(w)?.try_sub(&self.c[k + 1])?));
            main = main.try_add(&self.e[k + 1].try_mul(w)?.try_mul(&self.e[k + 1].eta_conj_transpose(eta))?)?;
        }
        out.push((format!("E1 U + (E1 U)^{eta}* + Σ Ei Wi Ei^{eta}* = Cc"), main.try_sub(&self.cc)?));
        for (nm, w) in [("X", &s.x), ("Y", &s.y), ("Z", &s.z)] {
            out.push(herm_residual(nm, w, eta));
        }
        Ok(out)
    }
}

fn eta_residual_report(doubled: &MasterInstance, eta: Eta, o: &Opts) -> Result<SolvabilityReport> {
    let mut rep = SolvabilityReport::new(o.tol);
    let inner = check_master_residuals(doubled, o)?;
    rep.absorb("doubled system", inner);
    let sc = doubled.scale();
    rep.compat(format!("Cc = Cc^{eta}*"), &doubled.cc, &doubled.cc.eta_conj_transpose(eta), sc);
    Ok(rep)
}

/// Rank certificate of the full η-Hermitian system.
pub fn eta_full_rank_conditions(inst: &EtaFullInstance, rep: &mut SolvabilityReport, o: &Opts) -> Result<()> {
    let eta = inst.eta;
    let e = |m: &QMatrix| m.eta_conj_transpose(eta);
    let r = |m: &QMatrix| o.rank(m);
    let [a1, a2, a3, a4] = &inst.a;
    let [c1, c2, c3, c4] = &inst.c;
    let [e1, e2, e3, e4] = &inst.e;
    let cc = &inst.cc;
    for k in 0..4 {
        let s = k + 1;
        rep.rank_of(format!("r(C{s}, A{s}) = r(A{s})"), &QMatrix::hstack(&[&inst.c[k], &inst.a[k]])?, r(&inst.a[k])?, o)?;
    }
    let (p2, p3, p4) = (c2 * &e(e2), c3 * &e(e3), c4 * &e(e4));
    let (ep2, ep3, ep4) = (e(&p2), e(&p3), e(&p4));
    let (ea1, ea2, ea3, ea4) = (e(a1), e(a2), e(a3), e(a4));
    let (ec1, ee1, ee2, ee3, ee4) = (e(c1), e(e1), e(e2), e(e3), e(e4));
    let nee4 = -&ee4;

    rep.rank_of(
        "coupled rank, all unknowns through A-blocks",
        &qblock![
            [cc, e1, e2, e3, e4, ec1],
            [ee1, 0, 0, 0, 0, ea1],
            [c1, a1, 0, 0, 0, 0],
            [p2, 0, a2, 0, 0, 0],
            [p3, 0, 0, a3, 0, 0],
            [p4, 0, 0, 0, a4, 0]
        ]?,
        r(&qblock![[e1, e2, e3, e4], [a1, 0, 0, 0], [0, a2, 0, 0], [0, 0, a3, 0], [0, 0, 0, a4]]?)? + r(&QMatrix::vstack(&[e1, a1])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, Y mirrored",
        &qblock![
            [cc, e4, e2, e1, ep3, ec1],
            [ee3, 0, 0, 0, ea3, 0],
            [ee1, 0, 0, 0, 0, ea1],
            [p4, a4, 0, 0, 0, 0],
            [p2, 0, a2, 0, 0, 0],
            [c1, 0, 0, a1, 0, 0]
        ]?,
        r(&qblock![[e4, e2, e1], [a4, 0, 0], [0, a2, 0], [0, 0, a1]]?)? + r(&qblock![[e3, e1], [a3, 0], [0, a1]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X mirrored",
        &qblock![
            [cc, e4, e3, e1, ep2, ec1],
            [ee2, 0, 0, 0, ea2, 0],
            [ee1, 0, 0, 0, 0, ea1],
            [p4, a4, 0, 0, 0, 0],
            [p3, 0, a3, 0, 0, 0],
            [c1, 0, 0, a1, 0, 0]
        ]?,
        r(&qblock![[e4, e3, e1], [a4, 0, 0], [0, a3, 0], [0, 0, a1]]?)? + r(&qblock![[e2, e1], [a2, 0], [0, a1]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Y mirrored",
        &qblock![
            [cc, e4, e1, ep3, ep2, ec1],
            [ee3, 0, 0, ea3, 0, 0],
            [ee2, 0, 0, 0, ea2, 0],
            [ee1, 0, 0, 0, 0, ea1],
            [p4, a4, 0, 0, 0, 0],
            [c1, 0, a1, 0, 0, 0]
        ]?,
        r(&qblock![[e3, e2, e1], [a3, 0, 0], [0, a2, 0], [0, 0, a1]]?)? + r(&qblock![[e4, e1], [a4, 0], [0, a1]]?)?,
        o,
    )?;
    let big = qblock![
        [cc, e2, e1, 0, 0, 0, e4, ep3, ec1, 0, 0, ep4],
        [ee3, 0, 0, 0, 0, 0, 0, ea3, 0, 0, 0, 0],
        [ee1, 0, 0, 0, 0, 0, 0, 0, ea1, 0, 0, 0],
        [0, 0, 0, cc, e3, e1, e4, 0, 0, ep2, ec1, 0],
        [0, 0, 0, ee2, 0, 0, 0, 0, 0, ea2, 0, 0],
        [0, 0, 0, ee1, 0, 0, 0, 0, 0, 0, ea1, 0],
        [ee4, 0, 0, nee4, 0, 0, 0, 0, 0, 0, 0, ea4],
        [p2, a2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [c1, 0, a1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, p3, a3, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, c1, 0, a1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, p4, 0, 0, a4, 0, 0, 0, 0, 0]
    ]?;
    let rhs = qblock![
        [e2, e1, 0, 0, e4],
        [0, 0, e3, e1, e4],
        [a2, 0, 0, 0, 0],
        [0, a1, 0, 0, 0],
        [0, 0, a3, 0, 0],
        [0, 0, 0, a1, 0],
        [0, 0, 0, 0, a4]
    ]?;
    rep.rank_of("coupled rank, doubled block", &big, 2 * r(&rhs)?, o)?;
    Ok(())
}

/// Evaluates the doubled system's residual certificate, the `Cc` η-Hermicity and the rank list.
pub fn check_eta_full(inst: &EtaFullInstance, o: &Opts) -> Result<SolvabilityReport> {
    inst.validate()?;
    let mut rep = eta_residual_report(&inst.doubled(), inst.eta, o)?;
    eta_full_rank_conditions(inst, &mut rep, o)?;
    Ok(rep.finish())
}

/// Solves through the doubled system once `rep` has certified consistency.
fn solve_doubled(doubled: &MasterInstance, eta: Eta, rep: SolvabilityReport, o: &Opts) -> Result<Outcome<EtaFullSolution>> {
    if !rep.consistent {
        return Ok(Outcome::Inconsistent(rep));
    }
    let fam = solve_master(doubled, o)?
        .into_family()
        .map_err(|r| Error::Numeric(format!("doubled system rejected: {}", r.failing().join(", "))))?;
    Ok(Outcome::Consistent { family: fam.map(move |s| EtaFullSolution::from_doubled(&s, eta))?, report: rep })
}

/// Solves the full η-Hermitian system; both certificate forms are evaluated.
pub fn solve_eta_full(inst: &EtaFullInstance, o: &Opts) -> Result<Outcome<EtaFullSolution>> {
    let rep = check_eta_full(inst, o)?;
    solve_doubled(&inst.doubled(), inst.eta, rep, o)
}

// ---------------------------------------------------------------- three

#[derive(Clone, Debug, PartialEq)]
pub struct EtaThreeInstance {
    pub eta: Eta,
    pub a: [QMatrix; 3],
    pub c: [QMatrix; 3],
    pub e: [QMatrix; 3],
    pub cc: QMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaThreeSolution {
    pub x: QMatrix,
    pub y: QMatrix,
    pub z: QMatrix,
}

impl Blocks for EtaThreeSolution {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("X", &self.x), ("Y", &self.y), ("Z", &self.z)]
    }
}

impl EtaThreeInstance {
    /// The full instance with the `U` slot zero-sized.
    pub fn lift(&self) -> EtaFullInstance {
        let p = self.cc.rows();
        let pick = |arr: &[QMatrix; 3], first: QMatrix| [first, arr[0].clone(), arr[1].clone(), arr[2].clone()];
        EtaFullInstance {
            eta: self.eta,
            a: pick(&self.a, QMatrix::zeros(0, 0)),
            c: pick(&self.c, QMatrix::zeros(0, self.cc.cols())),
            e: pick(&self.e, QMatrix::zeros(p, 0)),
            cc: self.cc.clone(),
        }
    }

    pub fn scale(&self) -> f64 {
        scale_of(self.a.iter().chain(&self.c).chain(&self.e).chain([&self.cc]))
    }

    pub fn residuals(&self, s: &EtaThreeSolution) -> Result<Vec<(String, QMatrix)>> {
        let eta = self.eta;
        let mut out = Vec::with_capacity(7);
        let mut main = -&self.cc;
        for (k, (nm, w)) in [("X", &s.x), ("Y", &s.y), ("Z", &s.z)].into_iter().enumerate() {
            let i = k + 1;
            out.push((format!("A{i} {nm} = C{i}"), self.a[k].try_mul(w)?.try_sub(&self.c[k])?));
            main = main.try_add(&self.e[k].try_mul(w)?.try_mul(&self.e[k].eta_conj_transpose(eta))?)?;
        }
        out.push((format!("E1 X E1^{eta}* + E2 Y E2^{eta}* + E3 Z E3^{eta}* = C"), main));
        for (nm, w) in [("X", &s.x), ("Y", &s.y), ("Z", &s.z)] {
            out.push(herm_residual(nm, w, eta));
        }
        Ok(out)
    }
}

/// Rank certificate stated in the three-term coefficients.
pub fn eta_three_rank_conditions(inst: &EtaThreeInstance, rep: &mut SolvabilityReport, o: &Opts) -> Result<()> {
    let eta = inst.eta;
    let e = |m: &QMatrix| m.eta_conj_transpose(eta);
    let r = |m: &QMatrix| o.rank(m);
    let [a1, a2, a3] = &inst.a;
    let [c1, c2, c3] = &inst.c;
    let [e1, e2, e3] = &inst.e;
    let c = &inst.cc;
    for k in 0..3 {
        let s = k + 1;
        rep.rank_of(format!("r(A{s}, C{s}) = r(A{s})"), &QMatrix::hstack(&[&inst.a[k], &inst.c[k]])?, r(&inst.a[k])?, o)?;
    }
    let (p1, p2, p3) = (c1 * &e(e1), c2 * &e(e2), c3 * &e(e3));
    let (e1c1, e2c2, e3c3) = (e1 * &e(c1), e2 * &e(c2), e3 * &e(c3));
    let (ea1, ea2, ea3, ee1, ee2, ee3) = (e(a1), e(a2), e(a3), e(e1), e(e2), e(e3));
    rep.rank_of(
        "coupled rank, all unknowns through A-blocks",
        &qblock![[c, e3, e1, e2], [p3, a3, 0, 0], [p1, 0, a1, 0], [p2, 0, 0, a2]]?,
        r(&qblock![[e3, e1, e2], [a3, 0, 0], [0, a1, 0], [0, 0, a2]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, Y mirrored",
        &qblock![[c, e3, e1, e2c2], [ee2, 0, 0, ea2], [p3, a3, 0, 0], [p1, 0, a1, 0]]?,
        r(&qblock![[e3, e1], [a3, 0], [0, a1]]?)? + r(&QMatrix::vstack(&[e2, a2])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X mirrored",
        &qblock![[c, e3, e2, e1c1], [ee1, 0, 0, ea1], [p3, a3, 0, 0], [p2, 0, a2, 0]]?,
        r(&qblock![[e3, e2], [a3, 0], [0, a2]]?)? + r(&QMatrix::vstack(&[e1, a1])?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X Y mirrored",
        &qblock![[c, e3, e1c1, e2c2], [ee1, 0, ea1, 0], [ee2, 0, 0, ea2], [p3, a3, 0, 0]]?,
        r(&qblock![[e1, e2], [a1, 0], [0, a2]]?)? + r(&QMatrix::vstack(&[e3, a3])?)?,
        o,
    )?;
    let (nc, ne1c1, np2, np3) = (-c, -&e1c1, -&p2, -&p3);
    let big = qblock![
        [c, 0, e1, 0, e3, e2c2, 0, e3c3],
        [0, nc, 0, e2, e3, 0, ne1c1, 0],
        [ee2, 0, 0, 0, 0, ea2, 0, 0],
        [0, ee1, 0, 0, 0, 0, ea1, 0],
        [ee3, ee3, 0, 0, 0, 0, 0, ea3],
        [p1, 0, a1, 0, 0, 0, 0, 0],
        [0, np2, 0, a2, 0, 0, 0, 0],
        [0, np3, 0, 0, a3, 0, 0, 0]
    ]?;
    let rhs = qblock![[e1, 0, e3], [0, e2, e3], [a1, 0, 0], [0, a2, 0], [0, 0, a3]]?;
    rep.rank_of("coupled rank, doubled block", &big, 2 * r(&rhs)?, o)?;
    Ok(())
}

pub fn check_eta_three(inst: &EtaThreeInstance, o: &Opts) -> Result<SolvabilityReport> {
    let full = inst.lift();
    full.validate()?;
    let mut rep = eta_residual_report(&full.doubled(), inst.eta, o)?;
    eta_three_rank_conditions(inst, &mut rep, o)?;
    Ok(rep.finish())
}

pub fn solve_eta_three(inst: &EtaThreeInstance, o: &Opts) -> Result<Outcome<EtaThreeSolution>> {
    let rep = check_eta_three(inst, o)?;
    let outcome = solve_doubled(&inst.lift().doubled(), inst.eta, rep, o)?;
    Ok(match outcome {
        Outcome::Consistent { family, report } => Outcome::Consistent {
            family: family.map(|s| Ok(EtaThreeSolution { x: s.x, y: s.y, z: s.z }))?,
            report,
        },
        Outcome::Inconsistent(r) => Outcome::Inconsistent(r),
    })
}

// ---------------------------------------------------------------- two

#[derive(Clone, Debug, PartialEq)]
pub struct EtaTwoInstance {
    pub eta: Eta,
    pub b1: QMatrix,
    pub c1: QMatrix,
    pub d1: QMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaTwoSolution {
    pub y: QMatrix,
    pub z: QMatrix,
}

impl Blocks for EtaTwoSolution {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("Y", &self.y), ("Z", &self.z)]
    }
}

impl EtaTwoInstance {
    pub fn validate(&self) -> Result<()> {
        let p = self.d1.rows();
        if !self.d1.is_square() {
            return Err(Error::Shape(format!("D1 must be square, got {}x{}", p, self.d1.cols())));
        }
        for (nm, m) in [("B1", &self.b1), ("C1", &self.c1)] {
            if m.rows() != p {
                return Err(Error::Shape(format!("{nm} has {} rows but D1 has {p}", m.rows())));
            }
        }
        Ok(())
    }

    pub fn scale(&self) -> f64 {
        scale_of([&self.b1, &self.c1, &self.d1])
    }

    pub fn residuals(&self, s: &EtaTwoSolution) -> Result<Vec<(String, QMatrix)>> {
        let eta = self.eta;
        let lhs = self
            .b1
            .try_mul(&s.y)?
            .try_mul(&self.b1.eta_conj_transpose(eta))?
            .try_add(&self.c1.try_mul(&s.z)?.try_mul(&self.c1.eta_conj_transpose(eta))?)?;
        Ok(vec![
            (format!("B1 Y B1^{eta}* + C1 Z C1^{eta}* = D1"), lhs.try_sub(&self.d1)?),
            herm_residual("Y", &s.y, eta),
            herm_residual("Z", &s.z, eta),
        ])
    }
}

/// `B Y B^η* + C Z C^η* = D` with `M = R_B C`, `S = C L_M`.
struct TwoCore {
    eta: Eta,
    b: Gi,
    c: Gi,
    m: Gi,
    s: Gi,
    d: QMatrix,
}

impl TwoCore {
    fn new(b: &QMatrix, c: &QMatrix, d: &QMatrix, eta: Eta, o: &Opts) -> Result<Self> {
        let b = gi(b, o)?;
        let c = gi(c, o)?;
        let m = gi(&(&b.r * &c.a), o)?;
        let s = gi(&(&c.a * &m.l), o)?;
        Ok(TwoCore { eta, b, c, m, s, d: d.clone() })
    }

    fn e(&self, m: &QMatrix) -> QMatrix {
        m.eta_conj_transpose(self.eta)
    }

    fn conditions(&self, rep: &mut SolvabilityReport, names: [&str; 2], scale: f64) {
        rep.mp(names[0], &(&(&self.m.r * &self.b.r) * &self.d), scale);
        rep.mp(names[1], &(&(&self.b.r * &self.d) * &self.e(&self.c.r)), scale);
    }

    fn rank_conditions(&self, rep: &mut SolvabilityReport, names: [&str; 2], o: &Opts) -> Result<()> {
        let (b, c, d) = (&self.b.a, &self.c.a, &self.d);
        let ec = self.e(c);
        rep.rank_of(names[0], &qblock![[b, d], [0, ec]]?, o.rank(b)? + o.rank(c)?, o)?;
        rep.rank_of(names[1], &QMatrix::hstack(&[b, c, d])?, o.rank(&QMatrix::hstack(&[b, c])?)?, o)?;
        Ok(())
    }

    /// Shapes of `(U, V, W1, W2)`; `W2` must be η-Hermitian.
    fn shapes(&self) -> [(usize, usize); 4] {
        let n1 = self.b.a.cols();
        let n2 = self.c.a.cols();
        [(n1, n1), (n2, n2), (n2, n2), (n2, n2)]
    }

    fn solve(&self, u: &QMatrix, v: &QMatrix, w1: &QMatrix, w2: &QMatrix) -> (QMatrix, QMatrix) {
        let (b, c, m, s, d) = (&self.b, &self.c, &self.m, &self.s, &self.d);
        let e = |x: &QMatrix| self.e(x);
        let ebp = e(&b.p);
        let emp = e(&m.p);
        let ecp = e(&c.p);
        let id = QMatrix::identity(d.rows());
        let i2 = QMatrix::identity(c.a.cols());
        let ssp = &s.p * &s.a;

        let mut y = &(&b.p * d) * &ebp;
        let t1 = &(&(&(&(&b.p * &c.a) * &m.p) * d) * &(&id + &(&ecp * &e(&s.a)))) * &ebp;
        let t2 = &(&(&(&(&b.p * &(&id + &(&s.a * &c.p))) * d) * &emp) * &e(&c.a)) * &ebp;
        y -= &((&t1 + &t2) * 0.5);
        y -= &(&(&(&(&b.p * &s.a) * w2) * &e(&s.a)) * &ebp);
        y += &(&b.l * u);
        y += &(&e(u) * &e(&b.l));

        let z1 = &(&(&m.p * d) * &ecp) * &(&i2 + &e(&ssp));
        let z2 = &(&(&(&i2 + &ssp) * &c.p) * d) * &emp;
        let mut z = (&z1 + &z2) * 0.5;
        z += &(&(&m.l * w2) * &e(&m.l));
        z += &(v * &e(&c.l));
        z += &(&c.l * &e(v));
        z += &(&(&m.l * &s.l) * w1);
        z += &(&(&e(w1) * &e(&s.l)) * &e(&m.l));
        (y, z)
    }
}

fn check_two(inst: &EtaTwoInstance, o: &Opts) -> Result<(TwoCore, SolvabilityReport)> {
    inst.validate()?;
    require_hermitian("D1", &inst.d1, inst.eta, o.tol)?;
    let core = TwoCore::new(&inst.b1, &inst.c1, &inst.d1, inst.eta, o)?;
    let mut rep = SolvabilityReport::new(o.tol);
    core.conditions(&mut rep, ["R_M R_B1 D1 = 0", "R_B1 D1 (R_C1)^η* = 0"], inst.scale());
    core.rank_conditions(&mut rep, ["r[B1 D1; 0 C1^η*] = r(B1) + r(C1)", "r(B1, C1, D1) = r(B1, C1)"], o)?;
    Ok((core, rep))
}

pub fn check_eta_two(inst: &EtaTwoInstance, o: &Opts) -> Result<SolvabilityReport> {
    Ok(check_two(inst, o)?.1.finish())
}

/// Solves `B1 Y B1^η* + C1 Z C1^η* = D1` for η-Hermitian `Y, Z`. Free parameters are
/// `U, V, W1` and the η-Hermitian `W2`.
pub fn solve_eta_two(inst: &EtaTwoInstance, o: &Opts) -> Result<Outcome<EtaTwoSolution>> {
    let (core, rep) = check_two(inst, o)?;
    let [su, sv, sw1, sw2] = core.shapes();
    let params = vec![
        ParamShape::new("U", su),
        ParamShape::new("V", sv),
        ParamShape::new("W1", sw1),
        ParamShape::eta_hermitian("W2", sw2.0, inst.eta),
    ];
    Outcome::decide(rep, move || {
        Family::from_named(params, move |p: &Params| {
            let (y, z) = core.solve(p.get("U"), p.get("V"), p.get("W1"), p.get("W2"));
            Ok(EtaTwoSolution { y, z })
        })
    })
}

// ---------------------------------------------------------------- mixed

#[derive(Clone, Debug, PartialEq)]
pub struct EtaMixedInstance {
    pub eta: Eta,
    pub a1: QMatrix,
    pub c1: QMatrix,
    pub b1: QMatrix,
    pub d1: QMatrix,
    pub a2: QMatrix,
    pub a3: QMatrix,
    pub d3: QMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaMixedSolution {
    pub x: QMatrix,
    pub y: QMatrix,
}

impl Blocks for EtaMixedSolution {
    fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        vec![("X", &self.x), ("Y", &self.y)]
    }
}

impl EtaMixedInstance {
    pub fn validate(&self) -> Result<()> {
        let p = self.d3.rows();
        let (n, m) = (self.a2.cols(), self.a3.cols());
        let checks = [
            (self.d3.is_square(), format!("D3 must be square, got {}x{}", p, self.d3.cols())),
            (self.a2.rows() == p, format!("A2 has {} rows but D3 has {p}", self.a2.rows())),
            (self.a3.rows() == p, format!("A3 has {} rows but D3 has {p}", self.a3.rows())),
            (self.a1.cols() == n, format!("A1 has {} columns but X is {n}x{n}", self.a1.cols())),
            (self.c1.shape() == (self.a1.rows(), n), format!("C1 is {}x{}, expected {}x{n}", self.c1.rows(), self.c1.cols(), self.a1.rows())),
            (self.b1.rows() == m, format!("B1 has {} rows but Y is {m}x{m}", self.b1.rows())),
            (self.d1.shape() == (m, self.b1.cols()), format!("D1 is {}x{}, expected {m}x{}", self.d1.rows(), self.d1.cols(), self.b1.cols())),
        ];
        match checks.into_iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::Shape(msg)),
            None => Ok(()),
        }
    }

    pub fn scale(&self) -> f64 {
        scale_of([&self.a1, &self.c1, &self.b1, &self.d1, &self.a2, &self.a3, &self.d3])
    }

    pub fn residuals(&self, s: &EtaMixedSolution) -> Result<Vec<(String, QMatrix)>> {
        let eta = self.eta;
        let main = self
            .a2
            .try_mul(&s.x)?
            .try_mul(&self.a2.eta_conj_transpose(eta))?
            .try_add(&self.a3.try_mul(&s.y)?.try_mul(&self.a3.eta_conj_transpose(eta))?)?;
        Ok(vec![
            ("A1 X = C1".into(), self.a1.try_mul(&s.x)?.try_sub(&self.c1)?),
            ("Y B1 = D1".into(), s.y.try_mul(&self.b1)?.try_sub(&self.d1)?),
            (format!("A2 X A2^{eta}* + A3 Y A3^{eta}* = D3"), main.try_sub(&self.d3)?),
            herm_residual("X", &s.x, eta),
            herm_residual("Y", &s.y, eta),
        ])
    }
}

struct MixedPrep {
    eta: Eta,
    ga1: Gi,
    gb1: Gi,
    x0: QMatrix,
    y0: QMatrix,
    core: TwoCore,
}

fn prepare_mixed(inst: &EtaMixedInstance, o: &Opts) -> Result<MixedPrep> {
    inst.validate()?;
    let eta = inst.eta;
    require_hermitian("D3", &inst.d3, eta, o.tol)?;
    let e = |m: &QMatrix| m.eta_conj_transpose(eta);
    let ga1 = gi(&inst.a1, o)?;
    let gb1 = gi(&inst.b1, o)?;
    let ac = &ga1.p * &inst.c1;
    let x0 = &(&ac + &e(&ac)) - &(&(&(&ga1.p * &inst.a1) * &e(&inst.c1)) * &e(&ga1.p));
    let db = &inst.d1 * &gb1.p;
    let y0 = &(&db + &e(&db)) - &(&(&e(&gb1.p) * &e(&inst.b1)) * &db);
    let b4 = &inst.a2 * &ga1.l;
    let c4 = &inst.a3 * &e(&gb1.r);
    let d4 = &(&inst.d3 - &(&(&inst.a2 * &x0) * &e(&inst.a2))) - &(&(&inst.a3 * &y0) * &e(&inst.a3));
    let core = TwoCore::new(&b4, &c4, &d4, eta, o)?;
    Ok(MixedPrep { eta, ga1, gb1, x0, y0, core })
}

fn check_mixed(inst: &EtaMixedInstance, o: &Opts) -> Result<(MixedPrep, SolvabilityReport)> {
    let prep = prepare_mixed(inst, o)?;
    let eta = inst.eta;
    let e = |m: &QMatrix| m.eta_conj_transpose(eta);
    let sc = inst.scale();
    let mut rep = SolvabilityReport::new(o.tol);
    rep.compat(format!("A1 C1^{eta}* = C1 A1^{eta}*"), &(&inst.a1 * &e(&inst.c1)), &(&inst.c1 * &e(&inst.a1)), sc * sc);
    rep.compat(format!("B1^{eta}* D1 = D1^{eta}* B1"), &(&e(&inst.b1) * &inst.d1), &(&e(&inst.d1) * &inst.b1), sc * sc);
    rep.mp("R_A1 C1 = 0", &(&prep.ga1.r * &inst.c1), sc);
    rep.mp("D1 L_B1 = 0", &(&inst.d1 * &prep.gb1.l), sc);
    // D4 carries products of the inputs, hence the squared scale.
    prep.core.conditions(&mut rep, ["R_M R_B4 D4 = 0", "R_B4 D4 (R_C4)^η* = 0"], sc * sc);

    let r = |m: &QMatrix| o.rank(m);
    let EtaMixedInstance { a1, c1, b1, d1, a2, a3, d3, .. } = inst;
    rep.rank_of("r(A1, C1) = r(A1)", &QMatrix::hstack(&[a1, c1])?, r(a1)?, o)?;
    rep.rank_of("r(D1; B1) = r(B1)", &QMatrix::vstack(&[d1, b1])?, r(b1)?, o)?;
    let (c1a2, d1a3, eb1, ea3, a3d1) = (c1 * &e(a2), &e(d1) * &e(a3), e(b1), e(a3), a3 * d1);
    rep.rank_of(
        "coupled rank, X and Y through their side equations",
        &qblock![[d3, a2, a3], [c1a2, a1, 0], [d1a3, 0, eb1]]?,
        r(&qblock![[a2, a3], [a1, 0], [0, eb1]]?)?,
        o,
    )?;
    rep.rank_of(
        "coupled rank, X through A1, Y mirrored",
        &qblock![[d3, a2, a3d1], [ea3, 0, b1], [c1a2, a1, 0]]?,
        r(&QMatrix::vstack(&[a2, a1])?)? + r(&QMatrix::hstack(&[&ea3, b1])?)?,
        o,
    )?;
    Ok((prep, rep))
}

pub fn check_eta_mixed(inst: &EtaMixedInstance, o: &Opts) -> Result<SolvabilityReport> {
    Ok(check_mixed(inst, o)?.1.finish())
}

/// Solves `A1 X = C1, Y B1 = D1, A2 X A2^η* + A3 Y A3^η* = D3` for η-Hermitian `X, Y`.
/// Free parameters are `U3, U4, U5` and the η-Hermitian `U6`.
pub fn solve_eta_mixed(inst: &EtaMixedInstance, o: &Opts) -> Result<Outcome<EtaMixedSolution>> {
    let (prep, rep) = check_mixed(inst, o)?;
    let [su, sv, sw1, sw2] = prep.core.shapes();
    let params = vec![
        ParamShape::new("U3", sw1),
        ParamShape::new("U4", su),
        ParamShape::new("U5", sv),
        ParamShape::eta_hermitian("U6", sw2.0, prep.eta),
    ];
    Outcome::decide(rep, move || {
        Family::from_named(params, move |p: &Params| {
            let (v, w) = prep.core.solve(p.get("U4"), p.get("U5"), p.get("U3"), p.get("U6"));
            let e = |m: &QMatrix| m.eta_conj_transpose(prep.eta);
            let la = &prep.ga1.l;
            let rb = &prep.gb1.r;
            Ok(EtaMixedSolution {
                x: &prep.x0 + &(&(la * &v) * &e(la)),
                y: &prep.y0 + &(&(&e(rb) * &w) * rb),
            })
        })
    })
}
