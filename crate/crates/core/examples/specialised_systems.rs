//! The three-term system and the mixed one-sided/two-sided system.

use qsylv::harness::{planted, seeded, verify_solution};
use qsylv::solvers::{check_three_term_system, solve_mixed_system, solve_three_term_system, Opts};

fn main() -> qsylv::Result<()> {
    let o = Opts::default();
    let (inst, _) = planted::three_term(&mut seeded(6), 3);
    let rep = check_three_term_system(&inst, &o)?;
    println!("three-term: consistent = {}, forms agree = {}", rep.consistent, rep.forms_agree);
    let fam = solve_three_term_system(&inst, &o)?.into_family().expect("planted");
    println!("{}", verify_solution(&inst, &fam.particular, 1e-9)?);

    let (inst, _) = planted::mixed(&mut seeded(6), 3);
    let out = solve_mixed_system(&inst, &o)?;
    println!("\nmixed:\n{}", out.report());
    let fam = out.into_family().expect("planted");
    let sol = fam.assemble(&fam.random_params(&mut seeded(0)))?;
    println!("{}", verify_solution(&inst, &sol, 1e-9)?);
    Ok(())
}
