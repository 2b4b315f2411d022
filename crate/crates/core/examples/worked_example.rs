//! Loads `examples/example51.json`, prints its rank table and solves it.

use std::path::Path;

use qsylv::io::{parse_instance, parse_solution, FreeParams};
use qsylv::solvers::Opts;

fn main() -> qsylv::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../examples");
    let text = std::fs::read_to_string(root.join("example51.json"))?;
    let problem = parse_instance(&text, None, None)?;
    let o = Opts::default();

    let report = problem.check(&o)?;
    for c in &report.rank_conditions {
        println!("{:<40} {:>3} = {:<3}", c.name, c.lhs, c.rhs);
    }

    let printed = parse_solution(&std::fs::read_to_string(root.join("example51.solution.json"))?, &problem)?;
    println!("printed solution:\n{}", problem.verify(&printed, 1e-3)?);

    let solved = problem.solve(&o, &FreeParams::Zero)?;
    let sol = solved.solution.expect("consistent");
    println!("computed solution:\n{}", problem.verify(&sol, 1e-8)?);
    Ok(())
}
