//! Seeded instance generation and residual verification.
//!
//! Every generator draws a witness first and builds the right-hand sides from it, so a
//! generated instance is consistent with a known certificate regardless of the solvers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eta::{
    symmetrize, EtaFullInstance, EtaFullSolution, EtaMixedInstance, EtaMixedSolution, EtaThreeInstance,
    EtaThreeSolution, EtaTwoInstance, EtaTwoSolution,
};
use crate::qcore::Eta;
use crate::qmatrix::QMatrix;
use crate::solvers::master::check_master_residuals;
use crate::solvers::{
    FiveTermInstance, FiveTermSolution, MasterInstance, MasterSolution, MixedInstance, MixedSolution, Opts,
    ThreeTermInstance, ThreeTermSolution, TwoTermInstance, TwoTermSolution,
};

/// Largest block dimension a profile may request.
pub const MAX_DIM: usize = 16;

/// Retries of [`gen_inconsistent`] before giving up.
pub const PERTURB_RETRIES: usize = 8;

/// The generator behind every seeded draw.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Block sizes of a coupled instance.
///
/// `Cc` is `p x q`; `U` is `u_rows x q`; `V` is `p x v_cols`; the other unknowns have the
/// shapes in `unknowns`. Slot `k` of `a_rows`/`b_cols` gives the rows of `A{k+1}` and the
/// columns of `B{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionProfile {
    pub p: usize,
    pub q: usize,
    pub u_rows: usize,
    pub v_cols: usize,
    pub unknowns: [(usize, usize); 3],
    pub a_rows: [usize; 4],
    pub b_cols: [usize; 4],
    pub seed: u64,
}

impl DimensionProfile {
    /// Every dimension equal to `d`.
    pub fn uniform(d: usize, seed: u64) -> Self {
        DimensionProfile { p: d, q: d, u_rows: d, v_cols: d, unknowns: [(d, d); 3], a_rows: [d; 4], b_cols: [d; 4], seed }
    }

    /// Three fixed shapes used by the test suites: square and fully determined, rectangular,
    /// and rectangular with an empty `B4`.
    pub fn standard(kind: usize, seed: u64) -> Self {
        match kind % 3 {
            0 => Self::uniform(2, seed),
            1 => DimensionProfile {
                p: 3,
                q: 4,
                u_rows: 2,
                v_cols: 3,
                unknowns: [(2, 3), (3, 2), (2, 2)],
                a_rows: [1, 2, 1, 2],
                b_cols: [2, 1, 2, 1],
                seed,
            },
            _ => DimensionProfile {
                p: 4,
                q: 3,
                u_rows: 3,
                v_cols: 2,
                unknowns: [(3, 2), (1, 3), (2, 2)],
                a_rows: [2, 1, 1, 1],
                b_cols: [1, 2, 1, 0],
                seed,
            },
        }
    }

    /// Dimensions drawn uniformly from `1..=max` (`0..=max` for the side-equation sizes).
    pub fn random(seed: u64, max: usize) -> Self {
        let mut rng = seeded(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut d = |lo: usize| rng.random_range(lo..=max.max(lo));
        DimensionProfile {
            p: d(1),
            q: d(1),
            u_rows: d(1),
            v_cols: d(1),
            unknowns: [(d(1), d(1)), (d(1), d(1)), (d(1), d(1))],
            a_rows: [d(0), d(0), d(0), d(0)],
            b_cols: [d(0), d(0), d(0), d(0)],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.p, self.q, self.u_rows, self.v_cols]
            .into_iter()
            .chain(self.unknowns.iter().flat_map(|&(n, m)| [n, m]))
            .chain(self.a_rows)
            .chain(self.b_cols);
        match all.max() {
            Some(d) if d > MAX_DIM => Err(Error::Shape(format!("profile dimension {d} exceeds the limit {MAX_DIM}"))),
            _ => Ok(()),
        }
    }
}

/// Draws a witness and builds the coupled instance it solves.
pub fn gen_consistent(profile: &DimensionProfile) -> Result<(MasterInstance, MasterSolution)> {
    profile.validate()?;
    let mut rng = seeded(profile.seed);
    let rng = &mut rng;
    let DimensionProfile { p, q, u_rows, v_cols, unknowns, a_rows, b_cols, .. } = *profile;
    let rand = |r: usize, c: usize, rng: &mut ChaCha8Rng| QMatrix::random(r, c, rng);

    let sol = MasterSolution {
        u: rand(u_rows, q, rng),
        v: rand(p, v_cols, rng),
        x: rand(unknowns[0].0, unknowns[0].1, rng),
        y: rand(unknowns[1].0, unknowns[1].1, rng),
        z: rand(unknowns[2].0, unknowns[2].1, rng),
    };
    let mut inst = MasterInstance::empty(QMatrix::zeros(p, q));
    inst.a[0] = rand(a_rows[0], u_rows, rng);
    inst.c[0] = &inst.a[0] * &sol.u;
    inst.b[0] = rand(v_cols, b_cols[0], rng);
    inst.d[0] = &sol.v * &inst.b[0];
    inst.e[0] = rand(p, u_rows, rng);
    inst.f[0] = rand(v_cols, q, rng);
    let mut cc = &(&inst.e[0] * &sol.u) + &(&sol.v * &inst.f[0]);
    for (k, w) in [&sol.x, &sol.y, &sol.z].into_iter().enumerate() {
        let (n, m) = w.shape();
        let s = k + 1;
        inst.a[s] = rand(a_rows[s], n, rng);
        inst.b[s] = rand(m, b_cols[s], rng);
        inst.c[s] = &inst.a[s] * w;
        inst.d[s] = w * &inst.b[s];
        inst.e[s] = rand(p, n, rng);
        inst.f[s] = rand(m, q, rng);
        cc += &(&(&inst.e[s] * w) * &inst.f[s]);
    }
    inst.cc = cc;
    Ok((inst, sol))
}

/// A consistent instance with `Cc` shifted by a random matrix of the same norm, re-drawn
/// until the residual certificate rejects it.
pub fn gen_inconsistent(profile: &DimensionProfile) -> Result<MasterInstance> {
    let (base, _) = gen_consistent(profile)?;
    let mut rng = seeded(profile.seed.wrapping_add(0x5851_f42d_4c95_7f2d));
    let o = Opts::default();
    let (p, q) = base.cc.shape();
    if p == 0 || q == 0 {
        return Err(Error::Precondition("an empty Cc cannot be perturbed".into()));
    }
    let size = base.cc.frobenius_norm().max(1.0);
    for _ in 0..PERTURB_RETRIES {
        let pert = QMatrix::random(p, q, &mut rng);
        let mut inst = base.clone();
        inst.cc += &pert.scale(size / pert.frobenius_norm());
        if !check_master_residuals(&inst, &o)?.finish().consistent {
            return Ok(inst);
        }
    }
    Err(Error::Precondition(format!(
        "every perturbation of Cc stayed consistent after {PERTURB_RETRIES} draws; the coefficient blocks span the whole right-hand side"
    )))
}

/// Instances whose residual equations can be evaluated against a candidate solution.
pub trait Verifiable {
    type Solution;
    fn residual_list(&self, s: &Self::Solution) -> Result<Vec<(String, QMatrix)>>;
    /// `1 + Σ‖block‖_F`.
    fn residual_scale(&self) -> f64;
}

macro_rules! verifiable {
    ($inst:ty, $sol:ty) => {
        impl Verifiable for $inst {
            type Solution = $sol;
            fn residual_list(&self, s: &$sol) -> Result<Vec<(String, QMatrix)>> {
                self.residuals(s)
            }
            fn residual_scale(&self) -> f64 {
                self.scale()
            }
        }
    };
}

verifiable!(MasterInstance, MasterSolution);
verifiable!(ThreeTermInstance, ThreeTermSolution);
verifiable!(MixedInstance, MixedSolution);
verifiable!(EtaFullInstance, EtaFullSolution);
verifiable!(EtaThreeInstance, EtaThreeSolution);
verifiable!(EtaTwoInstance, EtaTwoSolution);
verifiable!(EtaMixedInstance, EtaMixedSolution);

impl Verifiable for TwoTermInstance {
    type Solution = TwoTermSolution;
    fn residual_list(&self, s: &TwoTermSolution) -> Result<Vec<(String, QMatrix)>> {
        self.validate()?;
        for (nm, m, want) in [("X3", &s.x3, (self.c3.cols(), self.d3.rows())), ("X4", &s.x4, (self.c4.cols(), self.d4.rows()))] {
            if m.shape() != want {
                return Err(crate::error::dim(nm, m.shape(), want));
            }
        }
        Ok(vec![("C3 X3 D3 + C4 X4 D4 = E1".into(), self.residual(s))])
    }
    fn residual_scale(&self) -> f64 {
        self.scale()
    }
}

impl Verifiable for FiveTermInstance {
    type Solution = FiveTermSolution;
    fn residual_list(&self, s: &FiveTermSolution) -> Result<Vec<(String, QMatrix)>> {
        let lhs = self
            .a1
            .try_mul(&s.x1)?
            .try_add(&s.x2.try_mul(&self.b1)?)?
            .try_add(&self.a2.try_mul(&s.y1)?.try_mul(&self.b2)?)?
            .try_add(&self.a3.try_mul(&s.y2)?.try_mul(&self.b3)?)?
            .try_add(&self.a4.try_mul(&s.y3)?.try_mul(&self.b4)?)?;
        Ok(vec![("A1 X1 + X2 B1 + A2 Y1 B2 + A3 Y2 B3 + A4 Y3 B4 = B".into(), lhs.try_sub(&self.b)?)])
    }
    fn residual_scale(&self) -> f64 {
        self.scale()
    }
}

/// One evaluated equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub name: String,
    pub absolute: f64,
    /// `absolute / (1 + Σ‖block‖_F)`.
    pub relative: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    pub tol: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn max_relative(&self) -> f64 {
        self.entries.iter().map(|e| e.relative).fold(0.0, f64::max)
    }

    /// The largest relative residual among entries whose name matches `pred`.
    pub fn max_relative_where(&self, pred: impl Fn(&str) -> bool) -> f64 {
        self.entries.iter().filter(|e| pred(&e.name)).map(|e| e.relative).fold(0.0, f64::max)
    }
}

impl std::fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let width = self.entries.iter().map(|e| e.name.chars().count()).max().unwrap_or(0);
        for e in &self.entries {
            let pad = width - e.name.chars().count();
            writeln!(
                f,
                "  {}{}  abs {:>10.3e}  rel {:>10.3e}  {}",
                e.name,
                " ".repeat(pad),
                e.absolute,
                e.relative,
                if e.pass { "ok" } else { "FAIL" }
            )?;
        }
        write!(f, "verdict: {} (tol {:e})", if self.pass { "pass" } else { "fail" }, self.tol)
    }
}

/// Evaluates every equation of `inst` at `sol`; an entry passes when its relative residual
/// is at most `tol`.
pub fn verify_solution<I: Verifiable>(inst: &I, sol: &I::Solution, tol: f64) -> Result<ResidualReport> {
    let scale = inst.residual_scale();
    let entries: Vec<ResidualEntry> = inst
        .residual_list(sol)?
        .into_iter()
        .map(|(name, m)| {
            let absolute = m.frobenius_norm();
            let relative = absolute / scale;
            ResidualEntry { name, absolute, relative, pass: relative <= tol && relative.is_finite() }
        })
        .collect();
    let pass = entries.iter().all(|e| e.pass);
    Ok(ResidualReport { entries, tol, pass })
}

/// Witness-first generators for the specialised systems, with block sizes in `0..=max`
/// (`1..=max` for the right-hand side).
pub mod planted {
    use super::*;

    fn d<R: Rng + ?Sized>(rng: &mut R, lo: usize, max: usize) -> usize {
        rng.random_range(lo..=max.max(lo))
    }

    fn rnd<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> QMatrix {
        QMatrix::random(r, c, rng)
    }

    fn herm<R: Rng + ?Sized>(rng: &mut R, n: usize, eta: Eta) -> QMatrix {
        symmetrize(&QMatrix::random(n, n, rng), eta).expect("square")
    }

    /// `A X = C` with witness `X`.
    pub fn left<R: Rng + ?Sized>(rng: &mut R, max: usize) -> (QMatrix, QMatrix, QMatrix) {
        let (a, n, m) = (d(rng, 1, max), d(rng, 1, max), d(rng, 1, max));
        let aa = rnd(rng, a, n);
        let x = rnd(rng, n, m);
        let c = &aa * &x;
        (aa, c, x)
    }

    /// `X A = C` with witness `X`.
    pub fn right<R: Rng + ?Sized>(rng: &mut R, max: usize) -> (QMatrix, QMatrix, QMatrix) {
        let (a, n, m) = (d(rng, 1, max), d(rng, 1, max), d(rng, 1, max));
        let aa = rnd(rng, n, a);
        let x = rnd(rng, m, n);
        let c = &x * &aa;
        (aa, c, x)
    }

    /// `A X = C, X B = D` as `(A, C, B, D, X)`.
    pub fn pair<R: Rng + ?Sized>(rng: &mut R, max: usize) -> (QMatrix, QMatrix, QMatrix, QMatrix, QMatrix) {
        let (a, b, n, m) = (d(rng, 1, max), d(rng, 1, max), d(rng, 1, max), d(rng, 1, max));
        let aa = rnd(rng, a, n);
        let bb = rnd(rng, m, b);
        let x = rnd(rng, n, m);
        let c = &aa * &x;
        let dd = &x * &bb;
        (aa, c, bb, dd, x)
    }

    pub fn two_term<R: Rng + ?Sized>(rng: &mut R, max: usize) -> (TwoTermInstance, TwoTermSolution) {
        let (p, q) = (d(rng, 1, max), d(rng, 1, max));
        let (n3, m3, n4, m4) = (d(rng, 0, max), d(rng, 0, max), d(rng, 0, max), d(rng, 0, max));
        let s = TwoTermSolution { x3: rnd(rng, n3, m3), x4: rnd(rng, n4, m4) };
        let (c3, d3, c4, d4) = (rnd(rng, p, n3), rnd(rng, m3, q), rnd(rng, p, n4), rnd(rng, m4, q));
        let e1 = &(&(&c3 * &s.x3) * &d3) + &(&(&c4 * &s.x4) * &d4);
        (TwoTermInstance { c3, d3, c4, d4, e1 }, s)
    }

    pub fn five_term<R: Rng + ?Sized>(rng: &mut R, max: usize) -> (FiveTermInstance, FiveTermSolution) {
        let (p, q) = (d(rng, 1, max), d(rng, 1, max));
        let (n1, m1) = (d(rng, 0, max), d(rng, 0, max));
        let dims: [(usize, usize); 3] = std::array::from_fn(|_| (d(rng, 0, max), d(rng, 0, max)));
        let s = FiveTermSolution {
            x1: rnd(rng, n1, q),
            x2: rnd(rng, p, m1),
            y1: rnd(rng, dims[0].0, dims[0].1),
            y2: rnd(rng, dims[1].0, dims[1].1),
            y3: rnd(rng, dims[2].0, dims[2].1),
        };
        let a1 = rnd(rng, p, n1);
        let b1 = rnd(rng, m1, q);
        let [(na, ma), (nb, mb), (nc, mc)] = dims;
        let (a2, b2, a3, b3, a4, b4) =
            (rnd(rng, p, na), rnd(rng, ma, q), rnd(rng, p, nb), rnd(rng, mb, q), rnd(rng, p, nc), rnd(rng, mc, q));
        let mut b = &a1 * &s.x1;
        b += &(&s.x2 * &b1);
        b += &(&(&a2 * &s.y1) * &b2);
        b += &(&(&a3 * &s.y2) * &b3);
        b += &(&(&a4 * &s.y3) * &b4);
        (FiveTermInstance { a1, b1, a2, b2, a3, b3, a4, b4, b }, s)
    }

    /// A coupled instance with every dimension drawn from the rng.
    pub fn master<R: Rng + ?Sized>(rng: &mut R, max: usize) -> (MasterInstance, MasterSolution) {
        let mut profile = DimensionProfile::random(rng.random(), max);
        profile.seed = rng.random();
        gen_consistent(&profile).expect("profile within limits")
    }

    pub fn three_term<R: Rng + ?Sized>(rng: &mut R, max: usize) -> (ThreeTermInstance, ThreeTermSolution) {
        let (p, q) = (d(rng, 1, max), d(rng, 1, max));
        let mut parts: Vec<[QMatrix; 7]> = Vec::with_capacity(3);
        let mut cc = QMatrix::zeros(p, q);
        for _ in 0..3 {
            let (n, m, a, b) = (d(rng, 1, max), d(rng, 1, max), d(rng, 0, max), d(rng, 0, max));
            let w = rnd(rng, n, m);
            let (aa, bb, e, f) = (rnd(rng, a, n), rnd(rng, m, b), rnd(rng, p, n), rnd(rng, m, q));
            cc += &(&(&e * &w) * &f);
            let c = &aa * &w;
            let dd = &w * &bb;
            parts.push([aa, bb, c, dd, e, f, w]);
        }
        let get = |j: usize| -> [QMatrix; 3] { std::array::from_fn(|k| parts[k][j].clone()) };
        let inst = ThreeTermInstance { a: get(0), b: get(1), c: get(2), d: get(3), e: get(4), f: get(5), cc };
        let [x, y, z] = get(6);
        (inst, ThreeTermSolution { x, y, z })
    }

    pub fn mixed<R: Rng + ?Sized>(rng: &mut R, max: usize) -> (MixedInstance, MixedSolution) {
        let (p, q) = (d(rng, 1, max), d(rng, 1, max));
        let (n1, m1, n2, m2) = (d(rng, 1, max), d(rng, 1, max), d(rng, 1, max), d(rng, 1, max));
        let (ra1, cb1, ra2, cb2) = (d(rng, 0, max), d(rng, 0, max), d(rng, 0, max), d(rng, 0, max));
        let s = MixedSolution { x: rnd(rng, n1, m1), y: rnd(rng, n2, m2) };
        let a1 = rnd(rng, ra1, n1);
        let b1 = rnd(rng, m1, cb1);
        let a2 = rnd(rng, ra2, n2);
        let b2 = rnd(rng, m2, cb2);
        let a3 = rnd(rng, p, n1);
        let b3 = rnd(rng, m1, q);
        let a4 = rnd(rng, p, n2);
        let b4 = rnd(rng, m2, q);
        let cc = &(&(&a3 * &s.x) * &b3) + &(&(&a4 * &s.y) * &b4);
        let inst = MixedInstance {
            c1: &a1 * &s.x,
            c2: &s.x * &b1,
            c3: &a2 * &s.y,
            c4: &s.y * &b2,
            a1,
            a2,
            a3,
            a4,
            b1,
            b2,
            b3,
            b4,
            cc,
        };
        (inst, s)
    }

    pub fn eta_full<R: Rng + ?Sized>(rng: &mut R, max: usize, eta: Eta) -> (EtaFullInstance, EtaFullSolution) {
        let p = d(rng, 1, max);
        let nu = d(rng, 0, max);
        let u = rnd(rng, nu, p);
        let ra1 = d(rng, 0, max);
        let a1 = rnd(rng, ra1, nu);
        let e1 = rnd(rng, p, nu);
        let e1u = &e1 * &u;
        let mut cc = &e1u + &e1u.eta_conj_transpose(eta);
        let mut a = vec![a1.clone()];
        let mut c = vec![&a1 * &u];
        let mut e = vec![e1];
        let mut w = Vec::with_capacity(3);
        for _ in 0..3 {
            let n = d(rng, 0, max);
            let x = herm(rng, n, eta);
            let ra = d(rng, 0, max);
            let ak = rnd(rng, ra, n);
            let ek = rnd(rng, p, n);
            cc += &(&(&ek * &x) * &ek.eta_conj_transpose(eta));
            c.push(&ak * &x);
            a.push(ak);
            e.push(ek);
            w.push(x);
        }
        let arr = |v: Vec<QMatrix>| -> [QMatrix; 4] { v.try_into().expect("four blocks") };
        let [x, y, z]: [QMatrix; 3] = w.try_into().expect("three unknowns");
        (EtaFullInstance { eta, a: arr(a), c: arr(c), e: arr(e), cc }, EtaFullSolution { u, x, y, z })
    }

    pub fn eta_three<R: Rng + ?Sized>(rng: &mut R, max: usize, eta: Eta) -> (EtaThreeInstance, EtaThreeSolution) {
        let p = d(rng, 1, max);
        let mut cc = QMatrix::zeros(p, p);
        let mut parts: Vec<[QMatrix; 4]> = Vec::with_capacity(3);
        for _ in 0..3 {
            let n = d(rng, 0, max);
            let x = herm(rng, n, eta);
            let ra = d(rng, 0, max);
            let ak = rnd(rng, ra, n);
            let ek = rnd(rng, p, n);
            cc += &(&(&ek * &x) * &ek.eta_conj_transpose(eta));
            let ck = &ak * &x;
            parts.push([ak, ck, ek, x]);
        }
        let get = |j: usize| -> [QMatrix; 3] { std::array::from_fn(|k| parts[k][j].clone()) };
        let [x, y, z] = get(3);
        (EtaThreeInstance { eta, a: get(0), c: get(1), e: get(2), cc }, EtaThreeSolution { x, y, z })
    }

    pub fn eta_two<R: Rng + ?Sized>(rng: &mut R, max: usize, eta: Eta) -> (EtaTwoInstance, EtaTwoSolution) {
        let (p, n1, n2) = (d(rng, 1, max), d(rng, 0, max), d(rng, 0, max));
        let b1 = rnd(rng, p, n1);
        let c1 = rnd(rng, p, n2);
        let s = EtaTwoSolution { y: herm(rng, n1, eta), z: herm(rng, n2, eta) };
        let d1 = &(&(&b1 * &s.y) * &b1.eta_conj_transpose(eta)) + &(&(&c1 * &s.z) * &c1.eta_conj_transpose(eta));
        (EtaTwoInstance { eta, b1, c1, d1 }, s)
    }

    pub fn eta_mixed<R: Rng + ?Sized>(rng: &mut R, max: usize, eta: Eta) -> (EtaMixedInstance, EtaMixedSolution) {
        let (p, n, m) = (d(rng, 1, max), d(rng, 0, max), d(rng, 0, max));
        let (ra1, cb1) = (d(rng, 0, max), d(rng, 0, max));
        let s = EtaMixedSolution { x: herm(rng, n, eta), y: herm(rng, m, eta) };
        let a1 = rnd(rng, ra1, n);
        let b1 = rnd(rng, m, cb1);
        let a2 = rnd(rng, p, n);
        let a3 = rnd(rng, p, m);
        let d3 = &(&(&a2 * &s.x) * &a2.eta_conj_transpose(eta)) + &(&(&a3 * &s.y) * &a3.eta_conj_transpose(eta));
        let inst = EtaMixedInstance { eta, c1: &a1 * &s.x, d1: &s.y * &b1, a1, b1, a2, a3, d3 };
        (inst, s)
    }
}
