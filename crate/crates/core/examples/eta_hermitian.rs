//! η-Hermitian solutions for each η and each of the four η systems.

use qsylv::eta::{solve_eta_full, solve_eta_mixed, solve_eta_three, solve_eta_two};
use qsylv::harness::{planted, seeded, verify_solution};
use qsylv::solvers::Opts;
use qsylv::Eta;

fn main() -> qsylv::Result<()> {
    let o = Opts::default();
    for eta in Eta::ALL {
        let mut rng = seeded(9);
        let (inst, _) = planted::eta_full(&mut rng, 3, eta);
        let fam = solve_eta_full(&inst, &o)?.into_family().expect("planted");
        let full = verify_solution(&inst, &fam.assemble(&fam.random_params(&mut rng))?, 1e-9)?;

        let (inst, _) = planted::eta_three(&mut rng, 3, eta);
        let fam = solve_eta_three(&inst, &o)?.into_family().expect("planted");
        let three = verify_solution(&inst, &fam.particular, 1e-9)?;

        let (inst, _) = planted::eta_two(&mut rng, 3, eta);
        let fam = solve_eta_two(&inst, &o)?.into_family().expect("planted");
        let two = verify_solution(&inst, &fam.assemble(&fam.random_params(&mut rng))?, 1e-9)?;

        let (inst, _) = planted::eta_mixed(&mut rng, 3, eta);
        let fam = solve_eta_mixed(&inst, &o)?.into_family().expect("planted");
        let mixed = verify_solution(&inst, &fam.assemble(&fam.random_params(&mut rng))?, 1e-9)?;

        println!("η = {eta}");
        for (name, rep) in [("full", full), ("three", three), ("two", two), ("mixed", mixed)] {
            println!("  {name:<6} pass = {}  max residual {:.1e}", rep.pass, rep.max_relative());
        }
    }
    Ok(())
}
