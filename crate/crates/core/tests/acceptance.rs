//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every criterion is evaluated and reported even when an
//! earlier one fails. The process fails when any criterion fails, except for criteria listed
//! in `KNOWN_DEVIATIONS`; those still print FAIL, and the process fails if one of them
//! unexpectedly passes so the list cannot go stale.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use qsylv::decomp::{embedded_rank, pinv, rank_block_oracle, Tol};
use qsylv::eta::{solve_eta_full, solve_eta_mixed, solve_eta_three, solve_eta_two};
use qsylv::harness::{gen_consistent, gen_inconsistent, planted, seeded, verify_solution, DimensionProfile};
use qsylv::io::{instance_document, parse_instance, parse_solution, solution_document, to_text, FreeParams, Problem, Variant};
use qsylv::solvers::{
    check_master, solve_five_term, solve_left, solve_master, solve_mixed_system, solve_pair, solve_right,
    solve_three_term_system, solve_two_term, Opts,
};
use qsylv::{Eta, QMatrix};
use rand::Rng;

/// Rank values printed for the worked example, in condition order.
const PRINTED_COUPLED_RANKS: [usize; 9] = [11, 8, 10, 9, 10, 9, 9, 8, 19];
const EXAMPLE_RUNTIME: Duration = Duration::from_secs(1);
const PRINTED_SOLUTION_TOL: f64 = 1e-3;
const SOLVER_TOL: f64 = 1e-8;
const PENROSE_TOL: f64 = 1e-10;
const PENROSE_CASES: u64 = 500;
const ORACLE_CASES: u64 = 200;
const PLANTED_CASES: u64 = 100;
const PLANTED_MAX_DIM: usize = 5;
const PLANTED_RUNTIME: Duration = Duration::from_millis(100);
const FORM_CASES: u64 = 100;
const FREE_INSTANCES: u64 = 20;
const FREE_DRAWS: usize = 20;
const ETA_CASES: u64 = 50;
const HERMICITY_TOL: f64 = 1e-12;
const DOUBLED_TOL: f64 = 1e-10;
const CLI_PIPELINE_SEEDS: u64 = 20;
const CLI_CORPUS: u64 = 40;

/// Criteria expected to fail, with the document that itemizes why.
const KNOWN_DEVIATIONS: [(usize, &str); 1] = [(1, "docs/deviations.md")];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn example_problem() -> Problem {
    parse_instance(&read(&repo_root().join("examples/example51.json")), None, None).expect("example document parses")
}

fn example_rank_table() -> Verdict {
    let start = Instant::now();
    let problem = example_problem();
    let report = problem.check(&Opts::default()).expect("check runs");
    let elapsed = start.elapsed();
    let coupled: Vec<_> = report.rank_conditions.iter().filter(|c| c.name.starts_with("coupled rank")).collect();
    let computed: Vec<usize> = coupled.iter().map(|c| c.lhs).collect();
    let mismatches: Vec<String> = computed
        .iter()
        .zip(PRINTED_COUPLED_RANKS)
        .enumerate()
        .filter(|(_, (c, p))| **c != *p)
        .map(|(k, (c, p))| format!("condition {} computed {c}, printed {p}", k + 1))
        .collect();

    let Problem::Master(inst) = &problem else { unreachable!("the worked example is a coupled instance") };
    let o = Opts::default();
    let mut pair_ranks = Vec::new();
    for s in 1..4 {
        pair_ranks.push((o.rank(&inst.a[s]).unwrap(), o.rank(&inst.b[s]).unwrap()));
    }
    let pairs_ok = pair_ranks.iter().all(|&p| p == (2, 1));
    let pass = mismatches.is_empty() && computed.len() == 9 && pairs_ok && elapsed < EXAMPLE_RUNTIME;
    verdict(
        pass,
        format!(
            "ranks {computed:?}; {}; r(Ai), r(Bi) = {pair_ranks:?}; {:.0} ms",
            if mismatches.is_empty() { "all match".to_string() } else { mismatches.join(", ") },
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn example_solution() -> Verdict {
    let problem = example_problem();
    let printed = parse_solution(&read(&repo_root().join("examples/example51.solution.json")), &problem)
        .expect("printed solution parses");
    let printed_rep = problem.verify(&printed, PRINTED_SOLUTION_TOL).unwrap();
    let solved = problem.solve(&Opts::default(), &FreeParams::Zero).unwrap();
    let Some(sol) = solved.solution else { return verdict(false, "solver reports the example inconsistent") };
    let solver_rep = problem.verify(&sol, SOLVER_TOL).unwrap();
    verdict(
        printed_rep.pass && solver_rep.pass && solver_rep.entries.len() == 9,
        format!(
            "printed max rel {:.1e} (tol {PRINTED_SOLUTION_TOL:e}); solver max rel {:.1e} over {} equations (tol {SOLVER_TOL:e})",
            printed_rep.max_relative(),
            solver_rep.max_relative(),
            solver_rep.entries.len()
        ),
    )
}

fn rel(m: &QMatrix, scale: f64) -> f64 {
    m.frobenius_norm() / scale.max(1.0)
}

fn penrose() -> Verdict {
    let mut worst = 0.0f64;
    let mut odd = 0;
    let mut deficient = 0;
    for seed in 0..PENROSE_CASES {
        let mut rng = seeded(1000 + seed);
        let m = rng.random_range(1..=8);
        let n = rng.random_range(1..=8);
        let a = if seed % 2 == 0 {
            let k = rng.random_range(1..=m.min(n));
            if k < m.min(n) {
                deficient += 1;
            }
            &QMatrix::random(m, k, &mut rng) * &QMatrix::random(k, n, &mut rng)
        } else {
            QMatrix::random(m, n, &mut rng)
        };
        let b = pinv(&a, Tol::Auto).unwrap();
        let x = &b.pinv;
        let (na, nx) = (a.frobenius_norm(), x.frobenius_norm());
        let ax = &a * x;
        let xa = x * &a;
        let checks = [
            rel(&(&(&ax * &a) - &a), na),
            rel(&(&(&xa * x) - x), nx),
            rel(&(&ax.conj_transpose() - &ax), ax.frobenius_norm()),
            rel(&(&xa.conj_transpose() - &xa), xa.frobenius_norm()),
            rel(&(&a * &b.proj_left), na),
            rel(&(&b.proj_right * &a), na),
        ];
        worst = checks.into_iter().fold(worst, f64::max);
        if !embedded_rank(&a, Tol::Auto).unwrap().is_multiple_of(2) {
            odd += 1;
        }
    }
    verdict(
        worst <= PENROSE_TOL && odd == 0,
        format!("{PENROSE_CASES} matrices ({deficient} rank-deficient), worst rel {worst:.1e}, odd embedded ranks {odd}"),
    )
}

fn oracle() -> Verdict {
    let mut bad = Vec::new();
    for seed in 0..ORACLE_CASES {
        let mut rng = seeded(5000 + seed);
        let mut d = || rng.random_range(1..=4usize);
        let (m, n, k, l, s, t) = (d(), d(), d(), d(), d(), d());
        let mut rng = seeded(9000 + seed);
        let low = |r: usize, c: usize, rng: &mut _| {
            let k = rng_range(rng, r.min(c));
            &QMatrix::random(r, k, rng) * &QMatrix::random(k, c, rng)
        };
        let a = low(m, n, &mut rng);
        let b = low(m, k, &mut rng);
        let c = low(l, n, &mut rng);
        let dd = low(s, k, &mut rng);
        let e = low(l, t, &mut rng);
        let (lhs, rhs) = rank_block_oracle(&a, &b, &c, &dd, &e).unwrap();
        if lhs != rhs {
            bad.push(format!("seed {seed}: {lhs} vs {rhs}"));
        }
    }
    verdict(bad.is_empty(), format!("{ORACLE_CASES} tuples, {} mismatches {bad:?}", bad.len()))
}

fn rng_range<R: Rng>(rng: &mut R, hi: usize) -> usize {
    rng.random_range(0..=hi)
}

/// Runs `case` for each seed; returns (worst relative residual, slowest case, failure notes).
fn planted_run(mut case: impl FnMut(u64) -> Result<f64, String>) -> (f64, Duration, Vec<String>) {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut notes = Vec::new();
    for seed in 0..PLANTED_CASES {
        let start = Instant::now();
        let r = case(seed);
        slowest = slowest.max(start.elapsed());
        match r {
            Ok(v) => worst = worst.max(v),
            Err(e) => notes.push(format!("seed {seed}: {e}")),
        }
    }
    (worst, slowest, notes)
}

fn residual_of(a: &QMatrix, x: &QMatrix, c: &QMatrix, left: bool) -> f64 {
    let r = if left { &(a * x) - c } else { &(x * a) - c };
    r.frobenius_norm() / (1.0 + a.frobenius_norm() + c.frobenius_norm())
}

fn planted_round_trips() -> Verdict {
    let o = Opts::default();
    let max = PLANTED_MAX_DIM;
    let inconsistent = |r: qsylv::solvers::SolvabilityReport| format!("reported inconsistent: {:?}", r.failing());
    let runs: Vec<(&str, (f64, Duration, Vec<String>))> = vec![
        (
            "left",
            planted_run(|s| {
                let (a, c, _) = planted::left(&mut seeded(s), max);
                let x = solve_left(&a, &c, &o).unwrap().into_family().map_err(inconsistent)?.particular;
                Ok(residual_of(&a, &x, &c, true))
            }),
        ),
        (
            "right",
            planted_run(|s| {
                let (a, c, _) = planted::right(&mut seeded(s), max);
                let x = solve_right(&a, &c, &o).unwrap().into_family().map_err(inconsistent)?.particular;
                Ok(residual_of(&a, &x, &c, false))
            }),
        ),
        (
            "pair",
            planted_run(|s| {
                let (a, c, b, d, _) = planted::pair(&mut seeded(s), max);
                let x = solve_pair(&a, &c, &b, &d, &o).unwrap().into_family().map_err(inconsistent)?.particular;
                let sc = 1.0 + a.frobenius_norm() + b.frobenius_norm() + c.frobenius_norm() + d.frobenius_norm();
                Ok((&(&a * &x) - &c).frobenius_norm().max((&(&x * &b) - &d).frobenius_norm()) / sc)
            }),
        ),
        (
            "two-term",
            planted_run(|s| {
                let (inst, _) = planted::two_term(&mut seeded(s), max);
                let x = solve_two_term(&inst, &o).unwrap().into_family().map_err(inconsistent)?.particular;
                Ok(verify_solution(&inst, &x, SOLVER_TOL).unwrap().max_relative())
            }),
        ),
        (
            "five-term",
            planted_run(|s| {
                let (inst, _) = planted::five_term(&mut seeded(s), max);
                let x = solve_five_term(&inst, &o).unwrap().into_family().map_err(inconsistent)?.particular;
                Ok(verify_solution(&inst, &x, SOLVER_TOL).unwrap().max_relative())
            }),
        ),
        (
            "master",
            planted_run(|s| {
                let (inst, _) = planted::master(&mut seeded(s), max);
                let x = solve_master(&inst, &o).unwrap().into_family().map_err(inconsistent)?.particular;
                Ok(verify_solution(&inst, &x, SOLVER_TOL).unwrap().max_relative())
            }),
        ),
        (
            "three-term",
            planted_run(|s| {
                let (inst, _) = planted::three_term(&mut seeded(s), max);
                let x = solve_three_term_system(&inst, &o).unwrap().into_family().map_err(inconsistent)?.particular;
                Ok(verify_solution(&inst, &x, SOLVER_TOL).unwrap().max_relative())
            }),
        ),
        (
            "mixed",
            planted_run(|s| {
                let (inst, _) = planted::mixed(&mut seeded(s), max);
                let x = solve_mixed_system(&inst, &o).unwrap().into_family().map_err(inconsistent)?.particular;
                Ok(verify_solution(&inst, &x, SOLVER_TOL).unwrap().max_relative())
            }),
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, (worst, slowest, notes)) in &runs {
        let ok = notes.is_empty() && *worst <= SOLVER_TOL && *slowest < PLANTED_RUNTIME;
        pass &= ok;
        parts.push(format!("{name} {worst:.0e}/{:.0}ms", slowest.as_secs_f64() * 1e3));
        if !notes.is_empty() {
            parts.push(format!("{name} failures {notes:?}"));
        }
    }
    verdict(pass, format!("{PLANTED_CASES} each, worst rel/slowest: {}", parts.join(", ")))
}

fn condition_forms() -> Verdict {
    let o = Opts::default();
    let mut disagree = Vec::new();
    let mut wrong = Vec::new();
    let mut generated = [0usize; 2];
    for seed in 0..FORM_CASES {
        let profile = DimensionProfile::standard(seed as usize, seed);
        let (inst, _) = gen_consistent(&profile).unwrap();
        let r = check_master(&inst, &o).unwrap();
        generated[0] += 1;
        if !r.forms_agree {
            disagree.push(format!("consistent seed {seed}"));
        }
        if !r.consistent {
            wrong.push(format!("consistent seed {seed}"));
        }

        let inst = match gen_inconsistent(&profile) {
            Ok(i) => i,
            Err(e) => {
                wrong.push(format!("inconsistent seed {seed}: {e}"));
                continue;
            }
        };
        let r = check_master(&inst, &o).unwrap();
        generated[1] += 1;
        if !r.forms_agree {
            disagree.push(format!("inconsistent seed {seed}"));
        }
        if r.consistent {
            wrong.push(format!("inconsistent seed {seed} reported consistent"));
        }
    }
    verdict(
        disagree.is_empty() && wrong.is_empty() && generated == [FORM_CASES as usize; 2],
        format!(
            "{} consistent + {} perturbed instances, disagreements {disagree:?}, wrong verdicts {wrong:?}",
            generated[0], generated[1]
        ),
    )
}

fn free_parameters() -> Verdict {
    let o = Opts::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut notes = Vec::new();
    for seed in 0..FREE_INSTANCES {
        let mut rng = seeded(300 + seed);
        let (inst, _) = planted::master(&mut rng, PLANTED_MAX_DIM);
        let fam = match solve_master(&inst, &o).unwrap().into_family() {
            Ok(f) => f,
            Err(r) => {
                notes.push(format!("seed {seed}: {:?}", r.failing()));
                continue;
            }
        };
        for _ in 0..FREE_DRAWS {
            let s = fam.assemble(&fam.random_params(&mut rng)).unwrap();
            let rep = verify_solution(&inst, &s, SOLVER_TOL).unwrap();
            worst = worst.max(rep.max_relative());
            count += 1;
        }
    }
    verdict(
        notes.is_empty() && worst <= SOLVER_TOL && count == FREE_INSTANCES as usize * FREE_DRAWS,
        format!("{count} assembled solutions, worst rel {worst:.1e} {notes:?}"),
    )
}

fn is_hermicity(name: &str) -> bool {
    name.ends_with('*') && name.contains(" = ") && !name.contains('+')
}

fn eta_suite() -> Verdict {
    let o = Opts::default();
    let mut eq_worst = 0.0f64;
    let mut herm_worst = 0.0f64;
    let mut doubled_worst = 0.0f64;
    let mut notes = Vec::new();
    let mut solved = 0;
    let mut record = |rep: qsylv::harness::ResidualReport| {
        for e in &rep.entries {
            if is_hermicity(&e.name) {
                herm_worst = herm_worst.max(e.relative);
            } else {
                eq_worst = eq_worst.max(e.relative);
            }
        }
    };
    for eta in Eta::ALL {
        for seed in 0..ETA_CASES {
            let mut rng = seeded(700 + seed);

            let (inst, w) = planted::eta_full(&mut rng, PLANTED_MAX_DIM, eta);
            match solve_eta_full(&inst, &o).unwrap().into_family() {
                Ok(fam) => {
                    record(verify_solution(&inst, &fam.assemble(&fam.random_params(&mut rng)).unwrap(), SOLVER_TOL).unwrap());
                    solved += 1;
                }
                Err(r) => notes.push(format!("full {eta} {seed}: {:?}", r.failing())),
            }
            // witness -> doubled system
            let doubled = inst.doubled();
            doubled_worst = doubled_worst.max(verify_solution(&doubled, &w.to_doubled(eta), 1.0).unwrap().max_relative());
            // doubled-system solution -> witness of the original
            if let Ok(fam) = solve_master(&doubled, &o).unwrap().into_family() {
                let back = qsylv::eta::EtaFullSolution::from_doubled(&fam.assemble(&fam.random_params(&mut rng)).unwrap(), eta).unwrap();
                doubled_worst = doubled_worst.max(verify_solution(&inst, &back, 1.0).unwrap().max_relative());
            } else {
                notes.push(format!("doubled {eta} {seed} inconsistent"));
            }

            let (inst, _) = planted::eta_three(&mut rng, PLANTED_MAX_DIM, eta);
            match solve_eta_three(&inst, &o).unwrap().into_family() {
                Ok(fam) => {
                    record(verify_solution(&inst, &fam.assemble(&fam.random_params(&mut rng)).unwrap(), SOLVER_TOL).unwrap());
                    solved += 1;
                }
                Err(r) => notes.push(format!("three {eta} {seed}: {:?}", r.failing())),
            }

            let (inst, _) = planted::eta_two(&mut rng, PLANTED_MAX_DIM, eta);
            match solve_eta_two(&inst, &o).unwrap().into_family() {
                Ok(fam) => {
                    record(verify_solution(&inst, &fam.assemble(&fam.random_params(&mut rng)).unwrap(), SOLVER_TOL).unwrap());
                    solved += 1;
                }
                Err(r) => notes.push(format!("two {eta} {seed}: {:?}", r.failing())),
            }

            let (inst, _) = planted::eta_mixed(&mut rng, PLANTED_MAX_DIM, eta);
            match solve_eta_mixed(&inst, &o).unwrap().into_family() {
                Ok(fam) => {
                    record(verify_solution(&inst, &fam.assemble(&fam.random_params(&mut rng)).unwrap(), SOLVER_TOL).unwrap());
                    solved += 1;
                }
                Err(r) => notes.push(format!("mixed {eta} {seed}: {:?}", r.failing())),
            }
        }
    }
    verdict(
        notes.is_empty() && eq_worst <= SOLVER_TOL && herm_worst <= HERMICITY_TOL && doubled_worst <= DOUBLED_TOL,
        format!(
            "{solved} solved, equations {eq_worst:.1e}, hermicity {herm_worst:.1e}, doubled map {doubled_worst:.1e} {notes:?}"
        ),
    )
}

fn qsylv(args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_qsylv")).args(args).output().expect("binary runs");
    out.status.code().unwrap_or(-1)
}

fn cli_contract() -> Verdict {
    let dir = std::env::temp_dir().join(format!("qsylv-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = |name: String| dir.join(name).to_string_lossy().into_owned();
    let mut notes = Vec::new();

    for seed in 0..CLI_PIPELINE_SEEDS {
        let variant = Variant::ALL[seed as usize % Variant::ALL.len()].as_str();
        let eta = ["i", "j", "k"][seed as usize % 3];
        let s = seed.to_string();
        let inst = p(format!("pipe{seed}.json"));
        let sol = p(format!("pipe{seed}.sol.json"));
        let codes = [
            qsylv(&["gen", "--variant", variant, "--eta", eta, "--seed", &s, "--out", &inst]),
            qsylv(&["solve", &inst, "--free", &format!("random({seed})"), "--out", &sol]),
            qsylv(&["verify", &inst, &sol]),
            qsylv(&["verify", &inst, &p(format!("pipe{seed}.witness.json"))]),
        ];
        if codes != [0; 4] {
            notes.push(format!("pipeline {variant} seed {seed}: {codes:?}"));
        }
    }

    let mut agree = 0;
    for n in 0..CLI_CORPUS {
        let variant = Variant::ALL[n as usize % Variant::ALL.len()].as_str();
        let eta = ["i", "j", "k"][n as usize % 3];
        let inconsistent = n % 2 == 1;
        let inst = p(format!("corpus{n}.json"));
        let s = (100 + n).to_string();
        let mut args = vec!["gen", "--variant", variant, "--eta", eta, "--seed", &s, "--out", &inst];
        if inconsistent {
            args.push("--inconsistent");
        }
        if qsylv(&args) != 0 {
            notes.push(format!("corpus {n} ({variant}) did not generate"));
            continue;
        }
        let check = qsylv(&["check", &inst]);
        let solve = qsylv(&["solve", &inst, "--out", &p(format!("corpus{n}.sol.json"))]);
        let expected = if inconsistent { 2 } else { 0 };
        if check == solve && check == expected {
            agree += 1;
        } else {
            notes.push(format!("corpus {n} ({variant}, inconsistent={inconsistent}): check {check}, solve {solve}"));
        }
    }

    let mut reparse_failures = 0;
    let mut documents = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.contains(".sol.") || name.contains(".witness.") {
            continue;
        }
        let text = read(&path);
        let problem = parse_instance(&text, None, None).unwrap();
        let again = to_text(&instance_document(&problem));
        let reparsed = parse_instance(&again, None, None).unwrap();
        documents += 1;
        if reparsed != problem || again != to_text(&instance_document(&reparsed)) {
            reparse_failures += 1;
        }
        let sol_path = path.with_file_name(name.replace(".json", ".sol.json"));
        if sol_path.exists() {
            let sol = parse_solution(&read(&sol_path), &problem).unwrap();
            let again = to_text(&solution_document(&problem, &sol, &[]));
            if parse_solution(&again, &problem).unwrap() != sol {
                reparse_failures += 1;
            }
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    verdict(
        notes.is_empty() && agree == CLI_CORPUS && reparse_failures == 0,
        format!(
            "{CLI_PIPELINE_SEEDS} pipelines, {agree}/{CLI_CORPUS} check/solve agreements, {documents} documents re-parsed with {reparse_failures} differences {notes:?}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("worked example rank table", example_rank_table),
        ("worked example solution cross-check", example_solution),
        ("Penrose identities", penrose),
        ("block rank oracle", oracle),
        ("planted round trips", planted_round_trips),
        ("condition-form agreement", condition_forms),
        ("free-parameter soundness", free_parameters),
        ("eta-Hermitian suite", eta_suite),
        ("command-line contract", cli_contract),
    ];
    let mut unexpected = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        let v = run();
        let known = KNOWN_DEVIATIONS.iter().find(|(c, _)| *c == id);
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let note = match (known, v.pass) {
            (Some((_, doc)), false) => format!(" [known deviation, see {doc}]"),
            (Some(_), true) => {
                unexpected.push(format!("criterion {id} passes but is listed as a known deviation"));
                String::new()
            }
            (None, false) => {
                unexpected.push(format!("criterion {id} fails"));
                String::new()
            }
            (None, true) => String::new(),
        };
        println!("{tag} {id} {name}: {}{note}", v.detail);
    }
    if !unexpected.is_empty() {
        eprintln!("{}", unexpected.join("\n"));
        std::process::exit(1);
    }
}
