use qsylv::eta::{solve_eta_full, solve_eta_mixed, solve_eta_three, solve_eta_two};
use qsylv::harness::{planted, seeded, verify_solution};
use qsylv::solvers::{
    solve_five_term, solve_left, solve_master, solve_mixed_system, solve_pair, solve_right, solve_three_term_system,
    solve_two_term, Opts,
};
use qsylv::{Eta, QMatrix};

const SEEDS: u64 = 60;
const MAX: usize = 5;
const TOL: f64 = 1e-8;

fn rel(r: &QMatrix, scale: f64) -> f64 {
    r.frobenius_norm() / scale
}

#[test]
fn one_sided_and_pair() {
    let o = Opts::default();
    for seed in 0..SEEDS {
        let mut rng = seeded(seed);
        let (a, c, _) = planted::left(&mut rng, MAX);
        let x = solve_left(&a, &c, &o).unwrap().into_family().unwrap().particular;
        assert!(rel(&(&(&a * &x) - &c), 1.0 + a.frobenius_norm() + c.frobenius_norm()) < TOL, "left seed {seed}");

        let (a, c, _) = planted::right(&mut rng, MAX);
        let x = solve_right(&a, &c, &o).unwrap().into_family().unwrap().particular;
        assert!(rel(&(&(&x * &a) - &c), 1.0 + a.frobenius_norm() + c.frobenius_norm()) < TOL, "right seed {seed}");

        let (a, c, b, d, _) = planted::pair(&mut rng, MAX);
        let fam = solve_pair(&a, &c, &b, &d, &o).unwrap().into_family().unwrap();
        let sc = 1.0 + a.frobenius_norm() + b.frobenius_norm() + c.frobenius_norm() + d.frobenius_norm();
        for x in [fam.particular.clone(), fam.assemble(&fam.random_params(&mut rng)).unwrap()] {
            assert!(rel(&(&(&a * &x) - &c), sc) < TOL, "pair seed {seed}");
            assert!(rel(&(&(&x * &b) - &d), sc) < TOL, "pair seed {seed}");
        }
    }
}

#[test]
fn two_term() {
    let o = Opts::default();
    for seed in 0..SEEDS {
        let mut rng = seeded(seed);
        let (inst, w) = planted::two_term(&mut rng, MAX);
        assert!(verify_solution(&inst, &w, 1e-12).unwrap().pass);
        let out = solve_two_term(&inst, &o).unwrap();
        assert!(out.report().forms_agree, "seed {seed}\n{}", out.report());
        let fam = out.into_family().unwrap_or_else(|r| panic!("seed {seed}: {r}"));
        for s in [fam.particular.clone(), fam.assemble(&fam.random_params(&mut rng)).unwrap()] {
            let rep = verify_solution(&inst, &s, TOL).unwrap();
            assert!(rep.pass, "seed {seed}\n{rep}");
        }
    }
}

#[test]
fn five_term() {
    let o = Opts::default();
    for seed in 0..SEEDS {
        let mut rng = seeded(seed);
        let (inst, _) = planted::five_term(&mut rng, MAX);
        let out = solve_five_term(&inst, &o).unwrap();
        assert!(out.report().forms_agree, "seed {seed}\n{}", out.report());
        let fam = out.into_family().unwrap_or_else(|r| panic!("seed {seed}: {r}"));
        for s in [fam.particular.clone(), fam.assemble(&fam.random_params(&mut rng)).unwrap()] {
            let rep = verify_solution(&inst, &s, TOL).unwrap();
            assert!(rep.pass, "seed {seed}\n{rep}");
        }
    }
}

#[test]
fn master() {
    let o = Opts::default();
    for seed in 0..SEEDS {
        let mut rng = seeded(seed);
        let (inst, _) = planted::master(&mut rng, MAX);
        let fam = solve_master(&inst, &o).unwrap().into_family().unwrap_or_else(|r| panic!("seed {seed}: {r}"));
        for s in [fam.particular.clone(), fam.assemble(&fam.random_params(&mut rng)).unwrap()] {
            let rep = verify_solution(&inst, &s, TOL).unwrap();
            assert!(rep.pass, "seed {seed}\n{rep}");
        }
    }
}

#[test]
fn three_term() {
    let o = Opts::default();
    for seed in 0..SEEDS {
        let mut rng = seeded(seed);
        let (inst, _) = planted::three_term(&mut rng, MAX);
        let out = solve_three_term_system(&inst, &o).unwrap();
        let fam = out.into_family().unwrap_or_else(|r| panic!("seed {seed}: {r}"));
        for s in [fam.particular.clone(), fam.assemble(&fam.random_params(&mut rng)).unwrap()] {
            let rep = verify_solution(&inst, &s, TOL).unwrap();
            assert!(rep.pass, "seed {seed}\n{rep}");
        }
        let rep = qsylv::solvers::check_three_term_system(&inst, &o).unwrap();
        assert!(rep.consistent && rep.forms_agree, "seed {seed}\n{rep}");
    }
}

#[test]
fn mixed() {
    let o = Opts::default();
    for seed in 0..SEEDS {
        let mut rng = seeded(seed);
        let (inst, _) = planted::mixed(&mut rng, MAX);
        let out = solve_mixed_system(&inst, &o).unwrap();
        assert!(out.report().forms_agree, "seed {seed}\n{}", out.report());
        let fam = out.into_family().unwrap_or_else(|r| panic!("seed {seed}: {r}"));
        for s in [fam.particular.clone(), fam.assemble(&fam.random_params(&mut rng)).unwrap()] {
            let rep = verify_solution(&inst, &s, TOL).unwrap();
            assert!(rep.pass, "seed {seed}\n{rep}");
        }
    }
}

fn herm_ok(rep: &qsylv::harness::ResidualReport) -> bool {
    rep.max_relative_where(|n| n.ends_with('*')) <= 1e-12
}

#[test]
fn eta_variants() {
    let o = Opts::default();
    for eta in Eta::ALL {
        for seed in 0..SEEDS {
            let mut rng = seeded(seed);
            let (inst, w) = planted::eta_full(&mut rng, MAX, eta);
            assert!(verify_solution(&inst, &w, 1e-12).unwrap().pass);
            let out = solve_eta_full(&inst, &o).unwrap();
            assert!(out.report().forms_agree, "{eta} seed {seed}\n{}", out.report());
            let fam = out.into_family().unwrap_or_else(|r| panic!("full {eta} seed {seed}: {r}"));
            for s in [fam.particular.clone(), fam.assemble(&fam.random_params(&mut rng)).unwrap()] {
                let rep = verify_solution(&inst, &s, TOL).unwrap();
                assert!(rep.pass && herm_ok(&rep), "full {eta} seed {seed}\n{rep}");
            }

            let (inst, _) = planted::eta_three(&mut rng, MAX, eta);
            let out = solve_eta_three(&inst, &o).unwrap();
            assert!(out.report().forms_agree, "{eta} seed {seed}\n{}", out.report());
            let fam = out.into_family().unwrap_or_else(|r| panic!("three {eta} seed {seed}: {r}"));
            let rep = verify_solution(&inst, &fam.particular, TOL).unwrap();
            assert!(rep.pass && herm_ok(&rep), "three {eta} seed {seed}\n{rep}");

            let (inst, _) = planted::eta_two(&mut rng, MAX, eta);
            let out = solve_eta_two(&inst, &o).unwrap();
            assert!(out.report().forms_agree, "{eta} seed {seed}\n{}", out.report());
            let fam = out.into_family().unwrap_or_else(|r| panic!("two {eta} seed {seed}: {r}"));
            for s in [fam.particular.clone(), fam.assemble(&fam.random_params(&mut rng)).unwrap()] {
                let rep = verify_solution(&inst, &s, TOL).unwrap();
                assert!(rep.pass && herm_ok(&rep), "two {eta} seed {seed}\n{rep}");
            }

            let (inst, _) = planted::eta_mixed(&mut rng, MAX, eta);
            let out = solve_eta_mixed(&inst, &o).unwrap();
            assert!(out.report().forms_agree, "{eta} seed {seed}\n{}", out.report());
            let fam = out.into_family().unwrap_or_else(|r| panic!("mixed {eta} seed {seed}: {r}"));
            for s in [fam.particular.clone(), fam.assemble(&fam.random_params(&mut rng)).unwrap()] {
                let rep = verify_solution(&inst, &s, TOL).unwrap();
                assert!(rep.pass && herm_ok(&rep), "mixed {eta} seed {seed}\n{rep}");
            }
        }
    }
}
