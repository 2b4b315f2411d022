//! The nine-equation coupled system on a generated instance: certificate, family and a
//! perturbed right-hand side that breaks consistency.

use qsylv::harness::{gen_consistent, gen_inconsistent, seeded, verify_solution, DimensionProfile};
use qsylv::solvers::{check_master, solve_master, Opts};

fn main() -> qsylv::Result<()> {
    let o = Opts::default();
    let profile = DimensionProfile::standard(1, 5);
    let (inst, witness) = gen_consistent(&profile)?;
    println!("witness: {}", verify_solution(&inst, &witness, 1e-12)?.pass);

    let report = check_master(&inst, &o)?;
    println!("{report}");

    let fam = solve_master(&inst, &o)?.into_family().expect("consistent");
    println!("free parameters:");
    for p in fam.params() {
        println!("  {} {}x{}", p.name, p.rows, p.cols);
    }
    let sol = fam.assemble(&fam.random_params(&mut seeded(3)))?;
    println!("{}", verify_solution(&inst, &sol, 1e-9)?);

    let bad = gen_inconsistent(&profile)?;
    let report = check_master(&bad, &o)?;
    println!("perturbed: consistent = {}, failing: {:?}", report.consistent, report.failing());
    Ok(())
}
