//! SVD, numerical rank, Moore–Penrose inverse and projectors, all computed through the
//! complex adjoint embedding.

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qblock;
use crate::qcore::Quaternion;
use crate::qmatrix::{ComplexMatrix, QMatrix};

/// Sweep cap per unit of the smaller embedded dimension.
pub const SWEEP_CAP: usize = 100;

/// Convergence thresholds handed to the bidiagonal QR iteration, tried in order until a
/// factorization passes [`accept_svd`].
pub const SVD_EPS: [f64; 4] = [5.0 * f64::EPSILON, f64::EPSILON, 1e-14, 1e-13];

/// A factorization is accepted when its reconstruction and orthonormality defects are
/// below `SVD_ACCEPT · ε · max(rows, cols)`, relative to `σ_max` for the reconstruction.
pub const SVD_ACCEPT: f64 = 256.0;

/// Largest relative defect tolerated from the best attempt when none is accepted.
pub const SVD_GIVE_UP: f64 = 1e-8;

/// Rank threshold policy.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Tol {
    /// `max(m, n) · σ_max · 2⁻⁵²`.
    #[default]
    Auto,
    /// A fixed absolute threshold.
    Abs(f64),
    /// The larger of [`Tol::Auto`] and the given absolute floor.
    Floor(f64),
}

impl Tol {
    pub fn threshold(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        let auto = rows.max(cols) as f64 * sigma_max * f64::EPSILON;
        match self {
            Tol::Auto => auto,
            Tol::Abs(t) => t,
            Tol::Floor(f) => auto.max(f),
        }
    }
}


/// Thin quaternion SVD `A = U · diag(σ) · V*` with `k = min(m, n)` columns in `U` and `V`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: QMatrix,
    pub sigma: Vec<f64>,
    pub v: QMatrix,
}

/// `A†` together with `L_A = I − A†A`, `R_A = I − AA†` and the numerical rank.
#[derive(Clone, Debug)]
pub struct PinvBundle {
    pub pinv: QMatrix,
    pub proj_left: QMatrix,
    pub proj_right: QMatrix,
    pub rank: usize,
    pub tol_used: f64,
}

struct ComplexSvd {
    u: DMatrix<Complex64>,
    s: Vec<f64>,
    v_t: DMatrix<Complex64>,
}

fn complex_svd(m: &ComplexMatrix, vectors: bool) -> Result<ComplexSvd> {
    let dm = m.to_dmatrix();
    let scale = m.rows.max(m.cols).max(1) as f64 * f64::EPSILON;
    let mut best: Option<(f64, ComplexSvd)> = None;
    for &eps in &SVD_EPS {
        for adjoint in [false, true] {
            let Some(f) = try_complex_svd(&dm, adjoint, eps) else { continue };
            let defect = svd_defect(&dm, &f);
            if defect <= SVD_ACCEPT * scale {
                return Ok(finish(f, vectors));
            }
            if best.as_ref().is_none_or(|(d, _)| defect < *d) {
                best = Some((defect, f));
            }
        }
    }
    match best {
        Some((d, f)) if d <= SVD_GIVE_UP => Ok(finish(f, vectors)),
        Some((d, _)) => Err(Error::Numeric(format!(
            "SVD of {}x{} embedding inaccurate (relative defect {d:.2e})",
            m.rows, m.cols
        ))),
        None => Err(Error::Numeric(format!("SVD of {}x{} embedding did not converge", m.rows, m.cols))),
    }
}

fn finish(mut f: ComplexSvd, vectors: bool) -> ComplexSvd {
    if !vectors {
        f.u = DMatrix::zeros(0, 0);
        f.v_t = DMatrix::zeros(0, 0);
    }
    f
}

/// Factorizes `dm`, or `dm*` when `adjoint` is set and maps the factors back.
fn try_complex_svd(dm: &DMatrix<Complex64>, adjoint: bool, eps: f64) -> Option<ComplexSvd> {
    let k = dm.nrows().min(dm.ncols());
    let input = if adjoint { dm.adjoint() } else { dm.clone() };
    let svd = SVD::try_new(input, true, true, eps, SWEEP_CAP * k.max(1))?;
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    if s.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let (u, v_t) = (svd.u?, svd.v_t?);
    Some(if adjoint { ComplexSvd { u: v_t.adjoint(), s, v_t: u.adjoint() } } else { ComplexSvd { u, s, v_t } })
}

/// The largest of `‖U Σ V* − M‖ / σ_max`, `‖U*U − I‖` and `‖V*V − I‖`.
fn svd_defect(dm: &DMatrix<Complex64>, f: &ComplexSvd) -> f64 {
    let k = f.s.len();
    let smax = f.s.iter().copied().fold(0.0, f64::max);
    let mut us = f.u.clone();
    for (j, &sj) in f.s.iter().enumerate() {
        us.column_mut(j).scale_mut(sj);
    }
    let recon = (&us * &f.v_t - dm).norm() / if smax > 0.0 { smax } else { 1.0 };
    let eye = DMatrix::<Complex64>::identity(k, k);
    let ou = (f.u.adjoint() * &f.u - &eye).norm();
    let ov = (&f.v_t * f.v_t.adjoint() - &eye).norm();
    recon.max(ou).max(ov)
}

/// Averages each adjacent pair of the (descending) embedded singular values.
fn collapse_pairs(s: &[f64]) -> Vec<f64> {
    s.chunks(2).map(|p| p.iter().sum::<f64>() / p.len() as f64).collect()
}

/// Quaternion singular values, non-increasing, `min(m, n)` of them.
pub fn singular_values(a: &QMatrix) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Ok(Vec::new());
    }
    Ok(collapse_pairs(&complex_svd(&a.embed(), false)?.s))
}

/// Numerical rank under the given tolerance policy. Empty matrices have rank 0.
pub fn rank(a: &QMatrix, tol: Tol) -> Result<usize> {
    let s = singular_values(a)?;
    let Some(&smax) = s.first() else { return Ok(0) };
    let t = tol.threshold(a.rows(), a.cols(), smax);
    Ok(s.iter().filter(|&&x| x > t).count())
}

/// Rank of the complex embedding itself (no pair collapsing), used to check evenness.
pub fn embedded_rank(a: &QMatrix, tol: Tol) -> Result<usize> {
    if a.is_empty() {
        return Ok(0);
    }
    let s = complex_svd(&a.embed(), false)?.s;
    let t = tol.threshold(a.rows(), a.cols(), s[0]);
    Ok(s.iter().filter(|&&x| x > t).count())
}

/// Moore–Penrose inverse with its projectors.
pub fn pinv(a: &QMatrix, tol: Tol) -> Result<PinvBundle> {
    let (m, n) = a.shape();
    if a.is_empty() {
        return Ok(PinvBundle {
            pinv: QMatrix::zeros(n, m),
            proj_left: QMatrix::identity(n),
            proj_right: QMatrix::identity(m),
            rank: 0,
            tol_used: tol.threshold(m, n, 0.0),
        });
    }
    let csvd = complex_svd(&a.embed(), true)?;
    let sigma = collapse_pairs(&csvd.s);
    let tol_used = tol.threshold(m, n, sigma[0]);
    let r = sigma.iter().filter(|&&x| x > tol_used).count();
    // pseudo-inverse of the embedding from the 2r retained complex triplets
    let mut p = DMatrix::<Complex64>::zeros(2 * n, 2 * m);
    for t in 0..2 * r {
        let inv = 1.0 / csvd.s[t];
        let vcol = csvd.v_t.row(t).adjoint();
        let urow = csvd.u.column(t).adjoint();
        p += (vcol * urow) * Complex64::new(inv, 0.0);
    }
    let (pinv, _) = QMatrix::unembed_projected(&ComplexMatrix::from_dmatrix(&p))?;
    let proj_left = &QMatrix::identity(n) - &(&pinv * a);
    let proj_right = &QMatrix::identity(m) - &(a * &pinv);
    Ok(PinvBundle { pinv, proj_left, proj_right, rank: r, tol_used })
}

/// Lifts a complex vector `(p; q)` of length `2n` to the quaternion vector `p − conj(q)·j`,
/// whose embedding has `(p; q)` as first column.
fn lift(col: &[Complex64]) -> Vec<Quaternion> {
    let n = col.len() / 2;
    (0..n).map(|i| Quaternion::from_parts(col[i], -col[n + i].conj())).collect()
}

fn qdot(a: &[Quaternion], b: &[Quaternion]) -> Quaternion {
    a.iter().zip(b).fold(Quaternion::ZERO, |s, (&x, &y)| s + x.conj() * y)
}

fn qnorm(a: &[Quaternion]) -> f64 {
    a.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

/// Quaternion Gram–Schmidt: orthogonalizes `cand` against `basis` (right-scalar
/// coefficients, applied twice) and appends it when enough of it survives.
fn push_orthonormal(basis: &mut Vec<Vec<Quaternion>>, mut cand: Vec<Quaternion>) -> bool {
    let n0 = qnorm(&cand);
    if n0 == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for b in basis.iter() {
            let c = qdot(b, &cand);
            for (x, &y) in cand.iter_mut().zip(b) {
                *x -= y * c;
            }
        }
    }
    let nr = qnorm(&cand);
    if nr <= 0.5 * n0 {
        return false;
    }
    basis.push(cand.into_iter().map(|q| q * (1.0 / nr)).collect());
    true
}

fn columns_to_matrix(rows: usize, cols: &[Vec<Quaternion>]) -> QMatrix {
    QMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r])
}

/// Thin quaternion SVD. Right singular vectors are lifted from the complex SVD of the
/// embedding and orthonormalized; left vectors follow from `U = AV/σ` for nonzero σ and
/// are completed by lifted left vectors otherwise.
pub fn svd(a: &QMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return Ok(Svd { u: QMatrix::zeros(m, 0), sigma: Vec::new(), v: QMatrix::zeros(n, 0) });
    }
    let csvd = complex_svd(&a.embed(), true)?;
    let sigma = collapse_pairs(&csvd.s);

    let mut vs: Vec<Vec<Quaternion>> = Vec::with_capacity(k);
    for t in 0..csvd.v_t.nrows() {
        if vs.len() == k {
            break;
        }
        let col: Vec<Complex64> = csvd.v_t.row(t).iter().map(|z| z.conj()).collect();
        push_orthonormal(&mut vs, lift(&col));
    }
    if vs.len() < k {
        return Err(Error::Numeric("could not lift right singular vectors".into()));
    }
    let v = columns_to_matrix(n, &vs);
    let av = a * &v;

    let floor = sigma[0] * f64::EPSILON * (m.max(n) as f64);
    let mut us: Vec<Vec<Quaternion>> = Vec::with_capacity(k);
    let mut pending = Vec::new();
    for (i, &s) in sigma.iter().enumerate() {
        if s > floor {
            us.push((0..m).map(|r| av.get(r, i) * (1.0 / s)).collect());
        } else {
            pending.push(i);
        }
    }
    if !pending.is_empty() {
        let mut extra = us.clone();
        for t in 0..csvd.u.ncols() {
            if extra.len() == k {
                break;
            }
            let col: Vec<Complex64> = csvd.u.column(t).iter().copied().collect();
            push_orthonormal(&mut extra, lift(&col));
        }
        for c in 0..m {
            if extra.len() == k {
                break;
            }
            let unit = (0..m).map(|r| if r == c { Quaternion::ONE } else { Quaternion::ZERO }).collect();
            push_orthonormal(&mut extra, unit);
        }
        let tail = extra.split_off(us.len());
        for (slot, col) in pending.into_iter().zip(tail) {
            us.insert(slot, col);
        }
    }
    let u = columns_to_matrix(m, &us);
    Ok(Svd { u, sigma, v })
}

/// Both sides of the Marsaglia–Styan rank identity
/// `r[[A, B·L_D], [R_E·C, 0]] = r[[A, B, 0], [C, 0, E], [0, D, 0]] − r(D) − r(E)`,
/// evaluated with every rank taken under `Tol::Floor` of the default solver tolerance.
pub fn rank_block_oracle(
    a: &QMatrix,
    b: &QMatrix,
    c: &QMatrix,
    d: &QMatrix,
    e: &QMatrix,
) -> Result<(usize, usize)> {
    let tol = Tol::Floor(crate::solvers::DEFAULT_TOL);
    let bl = b.try_mul(&pinv(d, tol)?.proj_left)?;
    let rc = pinv(e, tol)?.proj_right.try_mul(c)?;
    let lhs = rank(&qblock![[a, bl], [rc, 0]]?, tol)?;
    let big = qblock![[a, b, 0], [c, 0, e], [0, d, 0]]?;
    let rhs = rank(&big, tol)? as isize - rank(d, tol)? as isize - rank(e, tol)? as isize;
    Ok((lhs, rhs.max(0) as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn diag_singular_values() {
        let mut a = QMatrix::zeros(2, 2);
        a.set(0, 0, Quaternion::real(3.0));
        a.set(1, 1, Quaternion::real(1.0));
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unit_entry() {
        let s = svd(&QMatrix::scalar(Quaternion::J)).unwrap();
        assert!((s.sigma[0] - 1.0).abs() < 1e-14);
        let back = &(&s.u * &QMatrix::scalar(Quaternion::real(s.sigma[0]))) * &s.v.conj_transpose();
        assert!(back.max_diff(&QMatrix::scalar(Quaternion::J)) < 1e-14);
    }

    #[test]
    fn pinv_identity_and_zero() {
        let b = pinv(&QMatrix::identity(3), Tol::Auto).unwrap();
        assert_eq!(b.rank, 3);
        assert!(b.pinv.max_diff(&QMatrix::identity(3)) < 1e-15);
        assert!(b.proj_left.max_abs() < 1e-15 && b.proj_right.max_abs() < 1e-15);

        let z = pinv(&QMatrix::zeros(2, 3), Tol::Auto).unwrap();
        assert_eq!(z.rank, 0);
        assert_eq!(z.pinv, QMatrix::zeros(3, 2));
        assert_eq!(z.proj_left, QMatrix::identity(3));
        assert_eq!(z.proj_right, QMatrix::identity(2));
    }

    #[test]
    fn pinv_scalar() {
        let b = pinv(&QMatrix::scalar(Quaternion::new(0.0, 2.0, 0.0, 0.0)), Tol::Auto).unwrap();
        assert!(b.pinv.max_diff(&QMatrix::scalar(Quaternion::new(0.0, -0.5, 0.0, 0.0))) < 1e-15);
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(rank(&QMatrix::zeros(0, 4), Tol::Auto).unwrap(), 0);
        let s = svd(&QMatrix::zeros(3, 0)).unwrap();
        assert_eq!(s.u.shape(), (3, 0));
        assert_eq!(rank_block_oracle(
            &QMatrix::zeros(2, 2),
            &QMatrix::zeros(2, 1),
            &QMatrix::zeros(1, 2),
            &QMatrix::zeros(1, 1),
            &QMatrix::zeros(1, 1),
        )
        .unwrap(), (0, 0));
    }

    #[test]
    fn pinv_penrose_on_random_products() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let (m, n) = (rng.random_range(1..=6), rng.random_range(1..=6));
            let k = rng.random_range(1..=m.min(n));
            let a = &QMatrix::random(m, k, &mut rng) * &QMatrix::random(k, n, &mut rng);
            let b = pinv(&a, Tol::Auto).unwrap();
            assert_eq!(b.rank, k);
            let scale = a.frobenius_norm() * b.pinv.frobenius_norm();
            assert!((&(&(&a * &b.pinv) * &a) - &a).frobenius_norm() <= 1e-12 * a.frobenius_norm() * scale.max(1.0));
            let h = &a * &b.pinv;
            assert!((&h - &h.conj_transpose()).frobenius_norm() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn identity_beside_projector_has_exact_spectrum() {
        let mut rng = crate::harness::seeded(88);
        for _ in 0..200 {
            let n = rng.random_range(2..=5);
            let k = rng.random_range(1..n);
            let p = pinv(&QMatrix::random(k, n, &mut rng), Tol::Auto).unwrap().proj_left;
            let c = QMatrix::hstack(&[&QMatrix::identity(n), &p]).unwrap();
            for s in singular_values(&c).unwrap() {
                let d = (s - 1.0).abs().min((s - 2f64.sqrt()).abs());
                assert!(d < 1e-12, "singular value {s}");
            }
            let b = pinv(&c, Tol::Auto).unwrap();
            assert!(b.proj_right.frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn block_rank_oracle_with_vanishing_blocks() {
        let mut rng = crate::harness::seeded(3);
        let b = QMatrix::random(2, 1, &mut rng);
        let d = QMatrix::random(3, 1, &mut rng);
        let c = QMatrix::random(2, 4, &mut rng);
        let e = QMatrix::random(2, 4, &mut rng);
        let (lhs, rhs) = rank_block_oracle(&QMatrix::zeros(2, 4), &b, &c, &d, &e).unwrap();
        assert_eq!((lhs, rhs), (0, 0));
    }
}
