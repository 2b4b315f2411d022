//! The `qsylv` command line: `check`, `solve`, `gen` and `verify`.
//!
//! Exit codes: 0 consistent or passing, 2 inconsistent or failing, 1 for I/O, parse and
//! shape errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::harness::{self, gen_consistent, gen_inconsistent, planted, seeded, DimensionProfile};
use crate::io::{
    instance_document, parse_instance, parse_params, parse_solution, solution_document, to_text,
    Answer, FreeParams, Problem, Variant,
};
use crate::qcore::Eta;
use crate::solvers::{Opts, DEFAULT_TOL};

/// Planted draws tried by `gen --inconsistent` for the specialised systems.
pub const INCONSISTENT_DRAWS: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "qsylv", version, about = "Solvability checks and general solutions for coupled quaternion matrix equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the solvability conditions of an instance.
    Check {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve an instance and write one member of its solution family.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
        /// zero, random, random(SEED) or file(PATH).
        #[arg(long, default_value = "zero")]
        free: String,
    },
    /// Generate a seeded instance; a consistent one comes with its witness.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Block size for every dimension.
        #[arg(long)]
        dim: Option<usize>,
        /// Draw every dimension uniformly up to this bound (coupled system only).
        #[arg(long)]
        random_dims: Option<usize>,
        /// Perturb the right-hand side until the instance is inconsistent.
        #[arg(long)]
        inconsistent: bool,
    },
    /// Evaluate every equation of an instance at a solution.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// System type; defaults to the document's own `variant`, then `master`.
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Unit for η-conjugation; defaults to the document's own `eta`, then `i`.
    #[arg(long, value_parser = parse_eta)]
    pub eta: Option<Eta>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output document path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_eta(s: &str) -> std::result::Result<Eta, String> {
    s.parse().map_err(|_| format!("expected i, j or k, got {s:?}"))
}

/// A command's verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

pub fn exit_code(r: &Result<Verdict>) -> ExitCode {
    match r {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(2),
        Err(_) => ExitCode::from(1),
    }
}

/// Parses `zero`, `random`, `random(SEED)` or `file(PATH)`.
pub fn parse_free(spec: &str, seed: u64) -> Result<FreeParams> {
    let spec = spec.trim();
    if spec == "zero" {
        return Ok(FreeParams::Zero);
    }
    if spec == "random" {
        return Ok(FreeParams::Random(seed));
    }
    let inner = |pre: &str| spec.strip_prefix(pre).and_then(|r| r.strip_suffix(')'));
    if let Some(s) = inner("random(") {
        let seed = s.trim().parse().map_err(|_| Error::Document(format!("--free: bad seed {s:?}")))?;
        return Ok(FreeParams::Random(seed));
    }
    if let Some(p) = inner("file(") {
        return Ok(FreeParams::Given(parse_params(&read(Path::new(p.trim()))?)?));
    }
    Err(Error::Document(format!("--free: expected zero, random, random(SEED) or file(PATH), got {spec:?}")))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, v: &Value) -> Result<()> {
    match out {
        Some(p) => fs::write(p, to_text(v)).map_err(|e| Error::Document(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(to_text(v).as_bytes())?;
            Ok(())
        }
    }
}

/// Human-readable output goes to stdout when the document goes to a file, else to stderr.
fn say(out: &Option<PathBuf>, text: &str) {
    if out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
}

fn load(path: &Path, c: &Common) -> Result<Problem> {
    parse_instance(&read(path)?, c.variant, c.eta)
}

fn opts(c: &Common) -> Result<Opts> {
    if !(c.tol.is_finite() && c.tol > 0.0) {
        return Err(Error::Document(format!("--tol must be positive, got {}", c.tol)));
    }
    Ok(Opts::with_tol(c.tol))
}

/// A violated solver precondition (an RHS that is not η-Hermitian) rules out every solution.
fn precondition_as_inconsistent<T>(r: Result<T>, out: &Option<PathBuf>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Precondition(msg)) => {
            say(out, &format!("verdict: inconsistent ({msg})"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

pub fn cmd_check(path: &Path, c: &Common) -> Result<Verdict> {
    let problem = load(path, c)?;
    let Some(report) = precondition_as_inconsistent(problem.check(&opts(c)?), &c.out)? else {
        return Ok(Verdict::Fail);
    };
    println!("{report}");
    if c.out.is_some() {
        emit(&c.out, &json!({ "variant": problem.variant().as_str(), "report": report }))?;
    }
    Ok(Verdict::from_bool(report.consistent))
}

pub fn cmd_solve(path: &Path, c: &Common, free: &str) -> Result<Verdict> {
    let problem = load(path, c)?;
    let free = parse_free(free, c.seed)?;
    let Some(solved) = precondition_as_inconsistent(problem.solve(&opts(c)?, &free), &c.out)? else {
        return Ok(Verdict::Fail);
    };
    let Some(sol) = solved.solution else {
        say(&c.out, &solved.report.to_string());
        say(&c.out, &format!("failing conditions: {}", solved.report.failing().join("; ")));
        return Ok(Verdict::Fail);
    };
    let residuals = problem.verify(&sol, c.tol)?;
    say(&c.out, &residuals.to_string());
    let doc = solution_document(
        &problem,
        &sol,
        &[("report", json!({ "solvability": solved.report, "residuals": residuals, "free_parameters": solved.params }))],
    );
    emit(&c.out, &doc)?;
    Ok(Verdict::Pass)
}

pub fn cmd_verify(instance: &Path, solution: &Path, c: &Common) -> Result<Verdict> {
    let problem = load(instance, c)?;
    let sol = parse_solution(&read(solution)?, &problem)?;
    let report = problem.verify(&sol, c.tol)?;
    println!("{report}");
    if c.out.is_some() {
        emit(&c.out, &json!({ "variant": problem.variant().as_str(), "residuals": report }))?;
    }
    Ok(Verdict::from_bool(report.pass))
}

/// Generates `(instance, witness)`; the witness is `None` for inconsistent instances.
pub fn generate(
    variant: Variant,
    eta: Eta,
    seed: u64,
    dim: Option<usize>,
    random_dims: Option<usize>,
    inconsistent: bool,
) -> Result<(Problem, Option<Answer>)> {
    if random_dims.is_some() && variant != Variant::Master {
        return Err(Error::Document("--random-dims applies to the coupled system only".into()));
    }
    if let Some(d) = dim.or(random_dims) {
        if d == 0 || d > harness::MAX_DIM {
            return Err(Error::Shape(format!("dimension {d} outside 1..={}", harness::MAX_DIM)));
        }
    }
    if variant == Variant::Master {
        let profile = match (dim, random_dims) {
            (_, Some(max)) => DimensionProfile::random(seed, max),
            (Some(d), None) => DimensionProfile::uniform(d, seed),
            (None, None) => DimensionProfile::uniform(2, seed),
        };
        return if inconsistent {
            Ok((Problem::Master(gen_inconsistent(&profile)?), None))
        } else {
            let (i, w) = gen_consistent(&profile)?;
            Ok((Problem::Master(i), Some(Answer::Master(w))))
        };
    }
    let max = dim.unwrap_or(3);
    let mut rng = seeded(seed);
    if !inconsistent {
        let (problem, witness) = planted_problem(variant, eta, &mut rng, max);
        return Ok((problem, Some(witness)));
    }
    let o = Opts::default();
    for _ in 0..INCONSISTENT_DRAWS {
        let (mut problem, _) = planted_problem(variant, eta, &mut rng, max);
        problem.perturb(&mut rng)?;
        match problem.check(&o) {
            Ok(r) if r.consistent => continue,
            Ok(_) | Err(Error::Precondition(_)) => return Ok((problem, None)),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Precondition(format!(
        "{INCONSISTENT_DRAWS} perturbed draws all stayed consistent; try a larger --dim"
    )))
}

fn planted_problem(variant: Variant, eta: Eta, rng: &mut ChaCha8Rng, max: usize) -> (Problem, Answer) {
    match variant {
        Variant::Master => {
            let (i, w) = planted::master(rng, max);
            (Problem::Master(i), Answer::Master(w))
        }
        Variant::ThreeTerm => {
            let (i, w) = planted::three_term(rng, max);
            (Problem::ThreeTerm(i), Answer::ThreeTerm(w))
        }
        Variant::Mixed => {
            let (i, w) = planted::mixed(rng, max);
            (Problem::Mixed(i), Answer::Mixed(w))
        }
        Variant::TwoTerm => {
            let (i, w) = planted::two_term(rng, max);
            (Problem::TwoTerm(i), Answer::TwoTerm(w))
        }
        Variant::FiveTerm => {
            let (i, w) = planted::five_term(rng, max);
            (Problem::FiveTerm(i), Answer::FiveTerm(w))
        }
        Variant::EtaFull => {
            let (i, w) = planted::eta_full(rng, max, eta);
            (Problem::EtaFull(i), Answer::EtaFull(w))
        }
        Variant::EtaThree => {
            let (i, w) = planted::eta_three(rng, max, eta);
            (Problem::EtaThree(i), Answer::EtaThree(w))
        }
        Variant::EtaTwo => {
            let (i, w) = planted::eta_two(rng, max, eta);
            (Problem::EtaTwo(i), Answer::EtaTwo(w))
        }
        Variant::EtaMixed => {
            let (i, w) = planted::eta_mixed(rng, max, eta);
            (Problem::EtaMixed(i), Answer::EtaMixed(w))
        }
    }
}

/// `instance.json` gives `instance.witness.json`.
pub fn witness_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.witness.json"))
}

pub fn cmd_gen(c: &Common, dim: Option<usize>, random_dims: Option<usize>, inconsistent: bool) -> Result<Verdict> {
    let variant = c.variant.unwrap_or(Variant::Master);
    let (problem, witness) = generate(variant, c.eta.unwrap_or(Eta::I), c.seed, dim, random_dims, inconsistent)?;
    let mut doc = instance_document(&problem);
    doc["seed"] = json!(c.seed);
    emit(&c.out, &doc)?;
    if let (Some(w), Some(out)) = (witness, &c.out) {
        let wp = witness_path(out);
        let wdoc = solution_document(&problem, &w, &[("seed", json!(c.seed))]);
        fs::write(&wp, to_text(&wdoc)).map_err(|e| Error::Document(format!("{}: {e}", wp.display())))?;
        println!("wrote {} and {}", out.display(), wp.display());
    } else if let Some(out) = &c.out {
        println!("wrote {}", out.display());
    }
    Ok(Verdict::Pass)
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::Check { path, common } => cmd_check(&path, &common),
        Command::Solve { path, common, free } => cmd_solve(&path, &common, &free),
        Command::Gen { common, dim, random_dims, inconsistent } => cmd_gen(&common, dim, random_dims, inconsistent),
        Command::Verify { instance, solution, common } => cmd_verify(&instance, &solution, &common),
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_parameter_specs() {
        assert_eq!(parse_free("zero", 3).unwrap(), FreeParams::Zero);
        assert_eq!(parse_free("random", 3).unwrap(), FreeParams::Random(3));
        assert_eq!(parse_free("random(11)", 3).unwrap(), FreeParams::Random(11));
        assert!(parse_free("random(x)", 3).is_err());
        assert!(parse_free("file(/nonexistent/params.json)", 3).is_err());
        assert!(parse_free("ones", 3).is_err());
    }

    #[test]
    fn witness_path_sits_beside_output() {
        assert_eq!(witness_path(Path::new("/tmp/run/inst.json")), Path::new("/tmp/run/inst.witness.json"));
    }

    #[test]
    fn generated_witnesses_verify_for_every_variant() {
        for v in Variant::ALL {
            for eta in Eta::ALL {
                let (p, w) = generate(v, eta, 5, None, None, false).unwrap();
                assert!(p.verify(&w.unwrap(), 1e-12).unwrap().pass, "{v} {eta}");
            }
        }
    }

    #[test]
    fn dimension_limits_are_enforced() {
        assert!(generate(Variant::Master, Eta::I, 0, Some(0), None, false).is_err());
        assert!(generate(Variant::Master, Eta::I, 0, Some(harness::MAX_DIM + 1), None, false).is_err());
        assert!(generate(Variant::TwoTerm, Eta::I, 0, None, Some(3), false).is_err());
    }
}
