//! Both sides of the block rank identity used to turn projector conditions into rank counts.

use qsylv::decomp::rank_block_oracle;
use qsylv::harness::seeded;
use qsylv::QMatrix;

fn main() -> qsylv::Result<()> {
    let mut rng = seeded(4);
    for trial in 0..5 {
        let r = |m, n, rng: &mut _| QMatrix::random(m, n, rng);
        let (a, b, c) = (r(3, 3, &mut rng), r(3, 2, &mut rng), r(2, 3, &mut rng));
        // a rank-one D and a wide E so both projectors are non-trivial
        let d = &r(2, 1, &mut rng) * &r(1, 2, &mut rng);
        let e = r(2, 4, &mut rng);
        let (lhs, rhs) = rank_block_oracle(&a, &b, &c, &d, &e)?;
        println!("trial {trial}: r[[A, B L_D], [R_E C, 0]] = {lhs}, r[[A, B, 0], [C, 0, E], [0, D, 0]] - r(D) - r(E) = {rhs}");
    }
    Ok(())
}
