//! `A X = C`, `X A = C` and the pair `A X = C, X B = D`, with a random member of each family.

use qsylv::harness::{planted, seeded};
use qsylv::solvers::{solve_left, solve_pair, solve_right, Opts};

fn main() -> qsylv::Result<()> {
    let o = Opts::default();
    let mut rng = seeded(2);

    let (a, c, _) = planted::left(&mut rng, 4);
    let fam = solve_left(&a, &c, &o)?.into_family().expect("planted");
    let x = fam.assemble(&fam.random_params(&mut rng))?;
    println!("A X = C: residual {:.2e}, free parameters {:?}", (&(&a * &x) - &c).frobenius_norm(), fam.params());

    let (a, c, _) = planted::right(&mut rng, 4);
    let fam = solve_right(&a, &c, &o)?.into_family().expect("planted");
    println!("X A = C: residual {:.2e}", (&(&fam.particular * &a) - &c).frobenius_norm());

    let (a, c, b, d, _) = planted::pair(&mut rng, 4);
    let out = solve_pair(&a, &c, &b, &d, &o)?;
    println!("{}", out.report());
    let x = out.into_family().expect("planted").particular;
    println!("A X = C: {:.2e}, X B = D: {:.2e}", (&(&a * &x) - &c).frobenius_norm(), (&(&x * &b) - &d).frobenius_norm());

    // an inconsistent left equation: the right-hand side leaves the column space of A
    let a = qsylv::QMatrix::from_fn(2, 1, |r, _| if r == 0 { 1.0.into() } else { Default::default() });
    let c = qsylv::QMatrix::from_fn(2, 1, |_, _| 1.0.into());
    println!("\ninconsistent case:\n{}", solve_left(&a, &c, &o)?.report());
    Ok(())
}
