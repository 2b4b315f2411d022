//! `C3 X3 D3 + C4 X4 D4 = E1`: rank certificate, residual certificate and a solution.

use qsylv::harness::{planted, seeded, verify_solution};
use qsylv::solvers::{solve_two_term, Opts};

fn main() -> qsylv::Result<()> {
    let (inst, _) = planted::two_term(&mut seeded(8), 4);
    let out = solve_two_term(&inst, &Opts::default())?;
    println!("{}", out.report());
    let fam = out.into_family().expect("planted instances are consistent");
    let sol = fam.assemble(&fam.random_params(&mut seeded(1)))?;
    println!("{}", verify_solution(&inst, &sol, 1e-9)?);
    Ok(())
}
