//! Singular values, numerical rank and the Moore–Penrose inverse of a rank-deficient matrix.

use qsylv::decomp::{pinv, rank, singular_values, svd, Tol};
use qsylv::harness::seeded;
use qsylv::QMatrix;

fn main() -> qsylv::Result<()> {
    let mut rng = seeded(11);
    let a = &QMatrix::random(5, 2, &mut rng) * &QMatrix::random(2, 4, &mut rng);
    println!("singular values: {:?}", singular_values(&a)?);
    println!("rank: {}", rank(&a, Tol::Auto)?);

    let s = svd(&a)?;
    let back = &(&s.u * &QMatrix::from_fn(s.sigma.len(), s.sigma.len(), |r, c| {
        if r == c { s.sigma[r].into() } else { Default::default() }
    })) * &s.v.conj_transpose();
    println!("‖U Σ V* − A‖ = {:.2e}", (&back - &a).frobenius_norm());

    let b = pinv(&a, Tol::Auto)?;
    let x = &b.pinv;
    println!("‖A X A − A‖ = {:.2e}", (&(&(&a * x) * &a) - &a).frobenius_norm());
    println!("‖X A X − X‖ = {:.2e}", (&(&(x * &a) * x) - x).frobenius_norm());
    let ax = &a * x;
    println!("‖(A X)* − A X‖ = {:.2e}", (&ax.conj_transpose() - &ax).frobenius_norm());
    let xa = x * &a;
    println!("‖(X A)* − X A‖ = {:.2e}", (&xa.conj_transpose() - &xa).frobenius_norm());
    println!("‖L_A² − L_A‖ = {:.2e}", (&(&b.proj_left * &b.proj_left) - &b.proj_left).frobenius_norm());
    println!("‖R_A A‖ = {:.2e}", (&b.proj_right * &a).frobenius_norm());
    Ok(())
}
