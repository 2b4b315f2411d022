//! Writing and re-reading instance and solution documents.

use qsylv::cli::generate;
use qsylv::io::{instance_document, parse_instance, parse_solution, solution_document, to_text, Variant};
use qsylv::Eta;

fn main() -> qsylv::Result<()> {
    let (problem, witness) = generate(Variant::EtaTwo, Eta::J, 4, Some(2), None, false)?;
    let text = to_text(&instance_document(&problem));
    println!("{text}");
    let back = parse_instance(&text, None, None)?;
    println!("instance round trip identical: {}", back == problem);

    let witness = witness.expect("consistent instances carry a witness");
    let wtext = to_text(&solution_document(&problem, &witness, &[]));
    let wback = parse_solution(&wtext, &back)?;
    println!("solution round trip identical: {}", wback == witness);
    println!("{}", back.verify(&wback, 1e-12)?);
    Ok(())
}
