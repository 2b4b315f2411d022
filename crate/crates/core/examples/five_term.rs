//! `A1 X1 + X2 B1 + A2 Y1 B2 + A3 Y2 B3 + A4 Y3 B4 = B` with both expressions for `Y3`.

use qsylv::harness::{planted, seeded, verify_solution};
use qsylv::solvers::{solve_five_term, Branch, Opts};

fn main() -> qsylv::Result<()> {
    let (inst, _) = planted::five_term(&mut seeded(21), 4);
    for branch in [Branch::First, Branch::Second] {
        let o = Opts { branch, ..Opts::default() };
        let out = solve_five_term(&inst, &o)?;
        println!("{branch:?}: consistent = {}, forms agree = {}", out.report().consistent, out.report().forms_agree);
        let fam = out.into_family().expect("planted");
        println!("  {} free parameters", fam.params().len());
        let rep = verify_solution(&inst, &fam.particular, 1e-9)?;
        println!("  max relative residual {:.2e}", rep.max_relative());
    }
    Ok(())
}
