//! JSON documents for instances, solutions and free parameters.
//!
//! An instance document is an object whose matrix-valued keys name coefficient blocks, each
//! written as `{rows, cols, entries}` with quaternion entries `[w, x, y, z]`. Blocks left out
//! of a document are zero matrices whose sizes are inferred from the blocks that are present;
//! a size nothing constrains is zero.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::eta::{
    check_eta_full, check_eta_mixed, check_eta_three, check_eta_two, solve_eta_full, solve_eta_mixed, solve_eta_three,
    solve_eta_two, symmetrize, EtaFullInstance, EtaFullSolution, EtaMixedInstance, EtaMixedSolution,
    EtaThreeInstance, EtaThreeSolution, EtaTwoInstance, EtaTwoSolution,
};
use crate::harness::{verify_solution, ResidualReport};
use crate::qcore::Eta;
use crate::qmatrix::QMatrix;
use crate::solvers::{
    check_master, check_mixed_system, check_three_term_system, solve_five_term, solve_master, solve_mixed_system,
    solve_three_term_system, solve_two_term, Blocks, Family, FiveTermInstance, FiveTermSolution, MasterInstance,
    MasterSolution, MixedInstance, MixedSolution, Opts, Outcome, ParamShape, SolvabilityReport, ThreeTermInstance,
    ThreeTermSolution, TwoTermInstance, TwoTermSolution,
};

/// Top-level keys that never hold a matrix.
pub const RESERVED_KEYS: [&str; 8] = ["notes", "header", "choices", "variant", "eta", "seed", "profile", "report"];

/// The system a document describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Variant {
    Master,
    ThreeTerm,
    Mixed,
    TwoTerm,
    FiveTerm,
    EtaFull,
    EtaThree,
    EtaTwo,
    EtaMixed,
}

impl Variant {
    pub const ALL: [Variant; 9] = [
        Variant::Master,
        Variant::ThreeTerm,
        Variant::Mixed,
        Variant::TwoTerm,
        Variant::FiveTerm,
        Variant::EtaFull,
        Variant::EtaThree,
        Variant::EtaTwo,
        Variant::EtaMixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Master => "master",
            Variant::ThreeTerm => "three-term",
            Variant::Mixed => "mixed",
            Variant::TwoTerm => "two-term",
            Variant::FiveTerm => "five-term",
            Variant::EtaFull => "eta-full",
            Variant::EtaThree => "eta-three",
            Variant::EtaTwo => "eta-two",
            Variant::EtaMixed => "eta-mixed",
        }
    }

    pub fn is_eta(self) -> bool {
        matches!(self, Variant::EtaFull | Variant::EtaThree | Variant::EtaTwo | Variant::EtaMixed)
    }

    /// Block keys with their row and column size variables and accepted aliases.
    fn layout(self) -> Vec<Slot> {
        let mut out = Vec::new();
        let mut push = |key: String, rows: String, cols: String, aliases: Vec<String>| {
            out.push(Slot { key, rows, cols, aliases })
        };
        let s = |x: &str| x.to_string();
        match self {
            Variant::Master | Variant::ThreeTerm => {
                let first = if self == Variant::Master {
                    push(s("A1"), s("a1"), s("nu"), vec![]);
                    push(s("B1"), s("sv"), s("b1"), vec![]);
                    push(s("C1"), s("a1"), s("q"), vec![]);
                    push(s("D1"), s("p"), s("b1"), vec![]);
                    push(s("E1"), s("p"), s("nu"), vec![]);
                    push(s("F1"), s("sv"), s("q"), vec![]);
                    2
                } else {
                    1
                };
                for i in first..first + 3 {
                    let (a, b, n, m) = (format!("a{i}"), format!("b{i}"), format!("n{i}"), format!("m{i}"));
                    push(format!("A{i}"), a.clone(), n.clone(), vec![]);
                    push(format!("B{i}"), m.clone(), b.clone(), vec![]);
                    push(format!("C{i}"), a, m.clone(), vec![]);
                    push(format!("D{i}"), n.clone(), b, vec![]);
                    push(format!("E{i}"), s("p"), n, vec![]);
                    push(format!("F{i}"), m, s("q"), vec![]);
                }
                push(s("Cc"), s("p"), s("q"), vec![s("C")]);
            }
            Variant::Mixed => {
                for (a, c_left, c_right, b, x, r, t) in [("A1", "C1", "C2", "B1", "1", "r1", "t1"), ("A2", "C3", "C4", "B2", "2", "r2", "t2")] {
                    let (n, m) = (format!("n{x}"), format!("m{x}"));
                    push(s(a), s(r), n.clone(), vec![]);
                    push(s(b), m.clone(), s(t), vec![]);
                    push(s(c_left), s(r), m.clone(), vec![]);
                    push(s(c_right), n, s(t), vec![]);
                }
                push(s("A3"), s("p"), s("n1"), vec![]);
                push(s("B3"), s("m1"), s("q"), vec![]);
                push(s("A4"), s("p"), s("n2"), vec![]);
                push(s("B4"), s("m2"), s("q"), vec![]);
                push(s("Cc"), s("p"), s("q"), vec![s("C")]);
            }
            Variant::TwoTerm => {
                push(s("C3"), s("p"), s("n3"), vec![]);
                push(s("D3"), s("m3"), s("q"), vec![]);
                push(s("C4"), s("p"), s("n4"), vec![]);
                push(s("D4"), s("m4"), s("q"), vec![]);
                push(s("E1"), s("p"), s("q"), vec![]);
            }
            Variant::FiveTerm => {
                push(s("A1"), s("p"), s("k1"), vec![]);
                push(s("B1"), s("k2"), s("q"), vec![]);
                for i in 2..=4 {
                    push(format!("A{i}"), s("p"), format!("n{i}"), vec![]);
                    push(format!("B{i}"), format!("m{i}"), s("q"), vec![]);
                }
                push(s("B"), s("p"), s("q"), vec![]);
            }
            Variant::EtaFull | Variant::EtaThree => {
                let first = if self == Variant::EtaFull {
                    push(s("A1"), s("a1"), s("nu"), vec![]);
                    push(s("C1"), s("a1"), s("p"), vec![s("B1")]);
                    push(s("E1"), s("p"), s("nu"), vec![]);
                    2
                } else {
                    1
                };
                for i in first..first + 3 {
                    let (a, n) = (format!("a{i}"), format!("n{i}"));
                    push(format!("A{i}"), a.clone(), n.clone(), vec![]);
                    push(format!("C{i}"), a, n.clone(), vec![format!("B{i}")]);
                    push(format!("E{i}"), s("p"), n, vec![]);
                }
                push(s("Cc"), s("p"), s("p"), vec![s("C"), s("B")]);
            }
            Variant::EtaTwo => {
                push(s("B1"), s("p"), s("n1"), vec![]);
                push(s("C1"), s("p"), s("n2"), vec![]);
                push(s("D1"), s("p"), s("p"), vec![]);
            }
            Variant::EtaMixed => {
                push(s("A1"), s("r1"), s("n"), vec![]);
                push(s("C1"), s("r1"), s("n"), vec![]);
                push(s("B1"), s("m"), s("t1"), vec![]);
                push(s("D1"), s("m"), s("t1"), vec![]);
                push(s("A2"), s("p"), s("n"), vec![]);
                push(s("A3"), s("p"), s("m"), vec![]);
                push(s("D3"), s("p"), s("p"), vec![]);
            }
        }
        out
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Document(format!("key \"variant\": unknown variant {s:?}")))
    }
}

struct Slot {
    key: String,
    rows: String,
    cols: String,
    aliases: Vec<String>,
}

/// A parsed instance of any supported system.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    Master(MasterInstance),
    ThreeTerm(ThreeTermInstance),
    Mixed(MixedInstance),
    TwoTerm(TwoTermInstance),
    FiveTerm(FiveTermInstance),
    EtaFull(EtaFullInstance),
    EtaThree(EtaThreeInstance),
    EtaTwo(EtaTwoInstance),
    EtaMixed(EtaMixedInstance),
}

/// A solution of any supported system.
#[derive(Clone, Debug, PartialEq)]
pub enum Answer {
    Master(MasterSolution),
    ThreeTerm(ThreeTermSolution),
    Mixed(MixedSolution),
    TwoTerm(TwoTermSolution),
    FiveTerm(FiveTermSolution),
    EtaFull(EtaFullSolution),
    EtaThree(EtaThreeSolution),
    EtaTwo(EtaTwoSolution),
    EtaMixed(EtaMixedSolution),
}

impl Answer {
    pub fn blocks(&self) -> Vec<(&'static str, &QMatrix)> {
        match self {
            Answer::Master(s) => s.blocks(),
            Answer::ThreeTerm(s) => s.blocks(),
            Answer::Mixed(s) => s.blocks(),
            Answer::TwoTerm(s) => s.blocks(),
            Answer::FiveTerm(s) => s.blocks(),
            Answer::EtaFull(s) => s.blocks(),
            Answer::EtaThree(s) => s.blocks(),
            Answer::EtaTwo(s) => s.blocks(),
            Answer::EtaMixed(s) => s.blocks(),
        }
    }
}

/// How free parameters are chosen when a solution family is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum FreeParams {
    Zero,
    Random(u64),
    /// Values by parameter name; parameters not listed are zero.
    Given(BTreeMap<String, QMatrix>),
}

/// The outcome of a solve with the chosen family member already evaluated.
#[derive(Clone, Debug)]
pub struct Solved {
    pub report: SolvabilityReport,
    /// `None` when the instance is inconsistent.
    pub solution: Option<Answer>,
    pub params: Vec<ParamShape>,
}

fn evaluate<S: Clone + 'static>(
    out: Outcome<S>,
    free: &FreeParams,
    wrap: fn(S) -> Answer,
) -> Result<Solved> {
    match out {
        Outcome::Inconsistent(report) => Ok(Solved { report, solution: None, params: Vec::new() }),
        Outcome::Consistent { family, report } => {
            let s = pick(&family, free)?;
            Ok(Solved { report, solution: Some(wrap(s)), params: family.params().to_vec() })
        }
    }
}

fn pick<S: Clone + 'static>(family: &Family<S>, free: &FreeParams) -> Result<S> {
    match free {
        FreeParams::Zero => Ok(family.particular.clone()),
        FreeParams::Random(seed) => family.assemble(&family.random_params(&mut crate::harness::seeded(*seed))),
        FreeParams::Given(map) => {
            if let Some(k) = map.keys().find(|k| !family.params().iter().any(|p| &p.name == *k)) {
                let known: Vec<&str> = family.params().iter().map(|p| p.name.as_str()).collect();
                return Err(Error::Document(format!("key {k:?}: not a free parameter of this family (expected one of {known:?})")));
            }
            family.assemble_named(|n| map.get(n).cloned())
        }
    }
}

impl Problem {
    pub fn variant(&self) -> Variant {
        match self {
            Problem::Master(_) => Variant::Master,
            Problem::ThreeTerm(_) => Variant::ThreeTerm,
            Problem::Mixed(_) => Variant::Mixed,
            Problem::TwoTerm(_) => Variant::TwoTerm,
            Problem::FiveTerm(_) => Variant::FiveTerm,
            Problem::EtaFull(_) => Variant::EtaFull,
            Problem::EtaThree(_) => Variant::EtaThree,
            Problem::EtaTwo(_) => Variant::EtaTwo,
            Problem::EtaMixed(_) => Variant::EtaMixed,
        }
    }

    pub fn eta(&self) -> Option<Eta> {
        match self {
            Problem::EtaFull(i) => Some(i.eta),
            Problem::EtaThree(i) => Some(i.eta),
            Problem::EtaTwo(i) => Some(i.eta),
            Problem::EtaMixed(i) => Some(i.eta),
            _ => None,
        }
    }

    /// Blocks under their canonical keys, in layout order.
    pub fn blocks(&self) -> Vec<(String, &QMatrix)> {
        let s = |k: &str| k.to_string();
        match self {
            Problem::Master(i) => i.blocks(),
            Problem::ThreeTerm(i) => {
                let mut out = Vec::new();
                for k in 0..3 {
                    let n = k + 1;
                    out.extend([
                        (format!("A{n}"), &i.a[k]),
                        (format!("B{n}"), &i.b[k]),
                        (format!("C{n}"), &i.c[k]),
                        (format!("D{n}"), &i.d[k]),
                        (format!("E{n}"), &i.e[k]),
                        (format!("F{n}"), &i.f[k]),
                    ]);
                }
                out.push((s("Cc"), &i.cc));
                out
            }
            Problem::Mixed(i) => vec![
                (s("A1"), &i.a1),
                (s("B1"), &i.b1),
                (s("C1"), &i.c1),
                (s("C2"), &i.c2),
                (s("A2"), &i.a2),
                (s("B2"), &i.b2),
                (s("C3"), &i.c3),
                (s("C4"), &i.c4),
                (s("A3"), &i.a3),
                (s("B3"), &i.b3),
                (s("A4"), &i.a4),
                (s("B4"), &i.b4),
                (s("Cc"), &i.cc),
            ],
            Problem::TwoTerm(i) => vec![(s("C3"), &i.c3), (s("D3"), &i.d3), (s("C4"), &i.c4), (s("D4"), &i.d4), (s("E1"), &i.e1)],
            Problem::FiveTerm(i) => vec![
                (s("A1"), &i.a1),
                (s("B1"), &i.b1),
                (s("A2"), &i.a2),
                (s("B2"), &i.b2),
                (s("A3"), &i.a3),
                (s("B3"), &i.b3),
                (s("A4"), &i.a4),
                (s("B4"), &i.b4),
                (s("B"), &i.b),
            ],
            Problem::EtaFull(i) => eta_blocks(&i.a, &i.c, &i.e, &i.cc, 1),
            Problem::EtaThree(i) => eta_blocks(&i.a, &i.c, &i.e, &i.cc, 1),
            Problem::EtaTwo(i) => vec![(s("B1"), &i.b1), (s("C1"), &i.c1), (s("D1"), &i.d1)],
            Problem::EtaMixed(i) => vec![
                (s("A1"), &i.a1),
                (s("C1"), &i.c1),
                (s("B1"), &i.b1),
                (s("D1"), &i.d1),
                (s("A2"), &i.a2),
                (s("A3"), &i.a3),
                (s("D3"), &i.d3),
            ],
        }
    }

    /// The right-hand side of the main equation.
    pub fn rhs_mut(&mut self) -> &mut QMatrix {
        match self {
            Problem::Master(i) => &mut i.cc,
            Problem::ThreeTerm(i) => &mut i.cc,
            Problem::Mixed(i) => &mut i.cc,
            Problem::TwoTerm(i) => &mut i.e1,
            Problem::FiveTerm(i) => &mut i.b,
            Problem::EtaFull(i) => &mut i.cc,
            Problem::EtaThree(i) => &mut i.cc,
            Problem::EtaTwo(i) => &mut i.d1,
            Problem::EtaMixed(i) => &mut i.d3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Problem::Master(i) => i.validate(),
            Problem::ThreeTerm(i) => i.lift().validate(),
            Problem::Mixed(i) => i.validate(),
            Problem::TwoTerm(i) => i.validate(),
            Problem::FiveTerm(i) => i.validate(),
            Problem::EtaFull(i) => i.validate(),
            Problem::EtaThree(i) => i.lift().validate(),
            Problem::EtaTwo(i) => i.validate(),
            Problem::EtaMixed(i) => i.validate(),
        }
    }

    /// Names and shapes of the unknowns, in solution-document order.
    pub fn unknown_shapes(&self) -> Vec<(&'static str, (usize, usize))> {
        let sq = |n: usize| (n, n);
        match self {
            Problem::Master(i) => ["U", "V", "X", "Y", "Z"].into_iter().zip(i.unknown_shapes()).collect(),
            Problem::ThreeTerm(i) => {
                let sh = i.lift().unknown_shapes();
                vec![("X", sh[2]), ("Y", sh[3]), ("Z", sh[4])]
            }
            Problem::Mixed(i) => {
                let [x, y] = i.unknown_shapes();
                vec![("X", x), ("Y", y)]
            }
            Problem::TwoTerm(i) => vec![("X3", (i.c3.cols(), i.d3.rows())), ("X4", (i.c4.cols(), i.d4.rows()))],
            Problem::FiveTerm(i) => vec![
                ("X1", (i.a1.cols(), i.b.cols())),
                ("X2", (i.b.rows(), i.b1.rows())),
                ("Y1", (i.a2.cols(), i.b2.rows())),
                ("Y2", (i.a3.cols(), i.b3.rows())),
                ("Y3", (i.a4.cols(), i.b4.rows())),
            ],
            Problem::EtaFull(i) => vec![
                ("U", (i.e[0].cols(), i.cc.rows())),
                ("X", sq(i.e[1].cols())),
                ("Y", sq(i.e[2].cols())),
                ("Z", sq(i.e[3].cols())),
            ],
            Problem::EtaThree(i) => vec![("X", sq(i.e[0].cols())), ("Y", sq(i.e[1].cols())), ("Z", sq(i.e[2].cols()))],
            Problem::EtaTwo(i) => vec![("Y", sq(i.b1.cols())), ("Z", sq(i.c1.cols()))],
            Problem::EtaMixed(i) => vec![("X", sq(i.a2.cols())), ("Y", sq(i.a3.cols()))],
        }
    }

    /// Evaluates the solvability certificate.
    pub fn check(&self, o: &Opts) -> Result<SolvabilityReport> {
        self.validate()?;
        match self {
            Problem::Master(i) => check_master(i, o),
            Problem::ThreeTerm(i) => check_three_term_system(i, o),
            Problem::Mixed(i) => check_mixed_system(i, o),
            Problem::TwoTerm(i) => Ok(solve_two_term(i, o)?.report().clone()),
            Problem::FiveTerm(i) => Ok(solve_five_term(i, o)?.report().clone()),
            Problem::EtaFull(i) => check_eta_full(i, o),
            Problem::EtaThree(i) => check_eta_three(i, o),
            Problem::EtaTwo(i) => check_eta_two(i, o),
            Problem::EtaMixed(i) => check_eta_mixed(i, o),
        }
    }

    /// Solves and evaluates the family member selected by `free`.
    pub fn solve(&self, o: &Opts, free: &FreeParams) -> Result<Solved> {
        self.validate()?;
        match self {
            Problem::Master(i) => evaluate(solve_master(i, o)?, free, Answer::Master),
            Problem::ThreeTerm(i) => evaluate(solve_three_term_system(i, o)?, free, Answer::ThreeTerm),
            Problem::Mixed(i) => evaluate(solve_mixed_system(i, o)?, free, Answer::Mixed),
            Problem::TwoTerm(i) => evaluate(solve_two_term(i, o)?, free, Answer::TwoTerm),
            Problem::FiveTerm(i) => evaluate(solve_five_term(i, o)?, free, Answer::FiveTerm),
            Problem::EtaFull(i) => evaluate(solve_eta_full(i, o)?, free, Answer::EtaFull),
            Problem::EtaThree(i) => evaluate(solve_eta_three(i, o)?, free, Answer::EtaThree),
            Problem::EtaTwo(i) => evaluate(solve_eta_two(i, o)?, free, Answer::EtaTwo),
            Problem::EtaMixed(i) => evaluate(solve_eta_mixed(i, o)?, free, Answer::EtaMixed),
        }
    }

    /// Evaluates every equation at `sol`.
    pub fn verify(&self, sol: &Answer, tol: f64) -> Result<ResidualReport> {
        match (self, sol) {
            (Problem::Master(i), Answer::Master(s)) => verify_solution(i, s, tol),
            (Problem::ThreeTerm(i), Answer::ThreeTerm(s)) => verify_solution(i, s, tol),
            (Problem::Mixed(i), Answer::Mixed(s)) => verify_solution(i, s, tol),
            (Problem::TwoTerm(i), Answer::TwoTerm(s)) => verify_solution(i, s, tol),
            (Problem::FiveTerm(i), Answer::FiveTerm(s)) => verify_solution(i, s, tol),
            (Problem::EtaFull(i), Answer::EtaFull(s)) => verify_solution(i, s, tol),
            (Problem::EtaThree(i), Answer::EtaThree(s)) => verify_solution(i, s, tol),
            (Problem::EtaTwo(i), Answer::EtaTwo(s)) => verify_solution(i, s, tol),
            (Problem::EtaMixed(i), Answer::EtaMixed(s)) => verify_solution(i, s, tol),
            _ => Err(Error::Document(format!("solution does not belong to a {} instance", self.variant()))),
        }
    }

    /// Every right-hand-side block, flagged when it must stay η-Hermitian.
    pub fn rhs_blocks_mut(&mut self) -> Vec<(&mut QMatrix, bool)> {
        match self {
            Problem::Master(i) => i.c.iter_mut().chain(i.d.iter_mut()).chain([&mut i.cc]).map(|m| (m, false)).collect(),
            Problem::ThreeTerm(i) => i.c.iter_mut().chain(i.d.iter_mut()).chain([&mut i.cc]).map(|m| (m, false)).collect(),
            Problem::Mixed(i) => {
                [&mut i.c1, &mut i.c2, &mut i.c3, &mut i.c4, &mut i.cc].into_iter().map(|m| (m, false)).collect()
            }
            Problem::TwoTerm(i) => vec![(&mut i.e1, false)],
            Problem::FiveTerm(i) => vec![(&mut i.b, false)],
            Problem::EtaFull(i) => i.c.iter_mut().map(|m| (m, false)).chain([(&mut i.cc, true)]).collect(),
            Problem::EtaThree(i) => i.c.iter_mut().map(|m| (m, false)).chain([(&mut i.cc, true)]).collect(),
            Problem::EtaTwo(i) => vec![(&mut i.d1, true)],
            Problem::EtaMixed(i) => vec![(&mut i.c1, false), (&mut i.d1, false), (&mut i.d3, true)],
        }
    }

    /// Adds to every non-empty right-hand-side block a random matrix of the block's own
    /// norm (at least 1), η-symmetrized where the block must stay η-Hermitian.
    pub fn perturb<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let eta = self.eta().unwrap_or(Eta::I);
        for (m, herm) in self.rhs_blocks_mut() {
            let (p, q) = m.shape();
            if p * q == 0 {
                continue;
            }
            let mut pert = QMatrix::random(p, q, rng);
            if herm {
                pert = symmetrize(&pert, eta)?;
            }
            let size = m.frobenius_norm().max(1.0) / pert.frobenius_norm();
            *m += &pert.scale(size);
        }
        Ok(())
    }
}

fn eta_blocks<'a, const K: usize>(
    a: &'a [QMatrix; K],
    c: &'a [QMatrix; K],
    e: &'a [QMatrix; K],
    cc: &'a QMatrix,
    first: usize,
) -> Vec<(String, &'a QMatrix)> {
    let mut out = Vec::new();
    for k in 0..K {
        let n = k + first;
        out.extend([(format!("A{n}"), &a[k]), (format!("C{n}"), &c[k]), (format!("E{n}"), &e[k])]);
    }
    out.push(("Cc".to_string(), cc));
    out
}

// ---------------------------------------------------------------- parsing

fn parse_object(text: &str) -> Result<Map<String, Value>> {
    let v: Value = serde_json::from_str(text)?;
    match v {
        Value::Object(m) => Ok(m),
        _ => Err(Error::Document("top level must be an object".into())),
    }
}

fn matrix_at(key: &str, v: &Value) -> Result<QMatrix> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Document(format!("key {key:?}: {e}")))
}

fn string_at(m: &Map<String, Value>, key: &str) -> Result<Option<String>> {
    match m.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(Error::Document(format!("key {key:?}: expected a string"))),
    }
}

/// Reads `variant` and `eta` from a document; either may be absent.
pub fn document_header(text: &str) -> Result<(Option<Variant>, Option<Eta>)> {
    let m = parse_object(text)?;
    header_of(&m)
}

fn header_of(m: &Map<String, Value>) -> Result<(Option<Variant>, Option<Eta>)> {
    let variant = string_at(m, "variant")?.map(|s| s.parse()).transpose()?;
    let eta = string_at(m, "eta")?
        .map(|s| s.parse::<Eta>().map_err(|_| Error::Document(format!("key \"eta\": expected i, j or k, got {s:?}"))))
        .transpose()?;
    Ok((variant, eta))
}

/// Parses an instance. `variant` and `eta` override the document's own fields; the
/// defaults are the coupled system and `i`.
pub fn parse_instance(text: &str, variant: Option<Variant>, eta: Option<Eta>) -> Result<Problem> {
    let m = parse_object(text)?;
    let (doc_variant, doc_eta) = header_of(&m)?;
    let variant = variant.or(doc_variant).unwrap_or(Variant::Master);
    let eta = eta.or(doc_eta).unwrap_or(Eta::I);
    let layout = variant.layout();

    let mut found: BTreeMap<String, QMatrix> = BTreeMap::new();
    for (key, value) in &m {
        if RESERVED_KEYS.contains(&key.as_str()) {
            continue;
        }
        let slot = layout.iter().find(|s| &s.key == key || s.aliases.contains(key)).ok_or_else(|| {
            Error::Document(format!("key {key:?}: not a block of a {variant} instance"))
        })?;
        let mat = matrix_at(key, value)?;
        if found.insert(slot.key.clone(), mat).is_some() {
            return Err(Error::Document(format!("key {key:?}: block {} given twice", slot.key)));
        }
    }

    let mut sizes: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for slot in &layout {
        let Some(mat) = found.get(&slot.key) else { continue };
        for (var, n, what) in [(&slot.rows, mat.rows(), "rows"), (&slot.cols, mat.cols(), "columns")] {
            match sizes.get(var.as_str()) {
                Some((want, from)) if *want != n => {
                    return Err(Error::Document(format!(
                        "key {:?}: has {n} {what} but {from} fixes that size to {want}",
                        slot.key
                    )))
                }
                Some(_) => {}
                None => {
                    sizes.insert(var, (n, slot.key.clone()));
                }
            }
        }
    }
    let size = |v: &str| sizes.get(v).map_or(0, |(n, _)| *n);
    let mut get = |key: &str| {
        let slot = layout.iter().find(|s| s.key == key).expect("layout key");
        found.remove(key).unwrap_or_else(|| QMatrix::zeros(size(&slot.rows), size(&slot.cols)))
    };
    let arr = |l: &str, first: usize, get: &mut dyn FnMut(&str) -> QMatrix| -> [QMatrix; 3] {
        std::array::from_fn(|k| get(&format!("{l}{}", k + first)))
    };

    let problem = match variant {
        Variant::Master => {
            let mut four = |l: &str| -> [QMatrix; 4] { std::array::from_fn(|k| get(&format!("{l}{}", k + 1))) };
            let (a, b, c, d, e, f) = (four("A"), four("B"), four("C"), four("D"), four("E"), four("F"));
            Problem::Master(MasterInstance { a, b, c, d, e, f, cc: get("Cc") })
        }
        Variant::ThreeTerm => {
            let (a, b, c) = (arr("A", 1, &mut get), arr("B", 1, &mut get), arr("C", 1, &mut get));
            let (d, e, f) = (arr("D", 1, &mut get), arr("E", 1, &mut get), arr("F", 1, &mut get));
            Problem::ThreeTerm(ThreeTermInstance { a, b, c, d, e, f, cc: get("Cc") })
        }
        Variant::Mixed => Problem::Mixed(MixedInstance {
            a1: get("A1"),
            a2: get("A2"),
            a3: get("A3"),
            a4: get("A4"),
            b1: get("B1"),
            b2: get("B2"),
            b3: get("B3"),
            b4: get("B4"),
            c1: get("C1"),
            c2: get("C2"),
            c3: get("C3"),
            c4: get("C4"),
            cc: get("Cc"),
        }),
        Variant::TwoTerm => Problem::TwoTerm(TwoTermInstance {
            c3: get("C3"),
            d3: get("D3"),
            c4: get("C4"),
            d4: get("D4"),
            e1: get("E1"),
        }),
        Variant::FiveTerm => Problem::FiveTerm(FiveTermInstance {
            a1: get("A1"),
            b1: get("B1"),
            a2: get("A2"),
            b2: get("B2"),
            a3: get("A3"),
            b3: get("B3"),
            a4: get("A4"),
            b4: get("B4"),
            b: get("B"),
        }),
        Variant::EtaFull => {
            let mut four = |l: &str| -> [QMatrix; 4] { std::array::from_fn(|k| get(&format!("{l}{}", k + 1))) };
            let (a, c, e) = (four("A"), four("C"), four("E"));
            Problem::EtaFull(EtaFullInstance { eta, a, c, e, cc: get("Cc") })
        }
        Variant::EtaThree => {
            let (a, c, e) = (arr("A", 1, &mut get), arr("C", 1, &mut get), arr("E", 1, &mut get));
            Problem::EtaThree(EtaThreeInstance { eta, a, c, e, cc: get("Cc") })
        }
        Variant::EtaTwo => Problem::EtaTwo(EtaTwoInstance { eta, b1: get("B1"), c1: get("C1"), d1: get("D1") }),
        Variant::EtaMixed => Problem::EtaMixed(EtaMixedInstance {
            eta,
            a1: get("A1"),
            c1: get("C1"),
            b1: get("B1"),
            d1: get("D1"),
            a2: get("A2"),
            a3: get("A3"),
            d3: get("D3"),
        }),
    };
    problem.validate()?;
    Ok(problem)
}

fn named_matrices(text: &str, expected: &[(&'static str, (usize, usize))]) -> Result<BTreeMap<String, QMatrix>> {
    let m = parse_object(text)?;
    let mut out = BTreeMap::new();
    for (key, value) in &m {
        if RESERVED_KEYS.contains(&key.as_str()) {
            continue;
        }
        if !expected.iter().any(|(n, _)| n == key) {
            let names: Vec<&str> = expected.iter().map(|(n, _)| *n).collect();
            return Err(Error::Document(format!("key {key:?}: unexpected (expected one of {names:?})")));
        }
        out.insert(key.clone(), matrix_at(key, value)?);
    }
    Ok(out)
}

/// Parses a solution of `problem`. A block may be left out only when it is zero-sized.
pub fn parse_solution(text: &str, problem: &Problem) -> Result<Answer> {
    let expected = problem.unknown_shapes();
    let mut found = named_matrices(text, &expected)?;
    let mut blocks = Vec::with_capacity(expected.len());
    for &(name, shape) in &expected {
        let mat = match found.remove(name) {
            Some(m) if m.shape() != shape => {
                return Err(Error::Document(format!(
                    "key {name:?}: is {}x{} but the instance needs {}x{}",
                    m.rows(),
                    m.cols(),
                    shape.0,
                    shape.1
                )))
            }
            Some(m) => m,
            None if shape.0 * shape.1 == 0 => QMatrix::zeros(shape.0, shape.1),
            None => return Err(Error::Document(format!("key {name:?}: missing"))),
        };
        blocks.push(mat);
    }
    let mut it = blocks.into_iter();
    let mut next = || it.next().expect("one block per unknown");
    Ok(match problem {
        Problem::Master(_) => Answer::Master(MasterSolution { u: next(), v: next(), x: next(), y: next(), z: next() }),
        Problem::ThreeTerm(_) => Answer::ThreeTerm(ThreeTermSolution { x: next(), y: next(), z: next() }),
        Problem::Mixed(_) => Answer::Mixed(MixedSolution { x: next(), y: next() }),
        Problem::TwoTerm(_) => Answer::TwoTerm(TwoTermSolution { x3: next(), x4: next() }),
        Problem::FiveTerm(_) => {
            Answer::FiveTerm(FiveTermSolution { x1: next(), x2: next(), y1: next(), y2: next(), y3: next() })
        }
        Problem::EtaFull(_) => Answer::EtaFull(EtaFullSolution { u: next(), x: next(), y: next(), z: next() }),
        Problem::EtaThree(_) => Answer::EtaThree(EtaThreeSolution { x: next(), y: next(), z: next() }),
        Problem::EtaTwo(_) => Answer::EtaTwo(EtaTwoSolution { y: next(), z: next() }),
        Problem::EtaMixed(_) => Answer::EtaMixed(EtaMixedSolution { x: next(), y: next() }),
    })
}

/// Parses a free-parameter document: matrices keyed by parameter name.
pub fn parse_params(text: &str) -> Result<BTreeMap<String, QMatrix>> {
    let m = parse_object(text)?;
    let mut out = BTreeMap::new();
    for (key, value) in &m {
        if RESERVED_KEYS.contains(&key.as_str()) {
            continue;
        }
        out.insert(key.clone(), matrix_at(key, value)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------- writing

fn matrix_value(m: &QMatrix) -> Value {
    serde_json::to_value(m).expect("matrices always serialize")
}

fn header(variant: Variant, eta: Option<Eta>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("variant".into(), Value::String(variant.to_string()));
    if let Some(eta) = eta {
        m.insert("eta".into(), Value::String(eta.to_string()));
    }
    m
}

/// The instance as a document, every block written out.
pub fn instance_document(problem: &Problem) -> Value {
    let mut m = header(problem.variant(), problem.eta());
    for (k, mat) in problem.blocks() {
        m.insert(k, matrix_value(mat));
    }
    Value::Object(m)
}

/// A solution document; `extra` entries (reports, seeds) are added under reserved keys.
pub fn solution_document(problem: &Problem, sol: &Answer, extra: &[(&str, Value)]) -> Value {
    let mut m = header(problem.variant(), problem.eta());
    for (k, mat) in sol.blocks() {
        m.insert(k.to_string(), matrix_value(mat));
    }
    for (k, v) in extra {
        m.insert((*k).to_string(), v.clone());
    }
    Value::Object(m)
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(rows: usize, cols: usize) -> String {
        let row = format!("[{}]", vec!["[1, 0, 0, 0]"; cols].join(", "));
        format!(r#"{{"rows": {rows}, "cols": {cols}, "entries": [{}]}}"#, vec![row; rows].join(", "))
    }

    #[test]
    fn absent_blocks_become_zeros_of_inferred_size() {
        let text = format!(r#"{{"variant": "eta-two", "eta": "j", "B1": {}, "D1": {}}}"#, block(2, 3), block(2, 2));
        let Problem::EtaTwo(inst) = parse_instance(&text, None, None).unwrap() else { panic!("wrong variant") };
        assert_eq!(inst.eta, Eta::J);
        assert_eq!(inst.c1.shape(), (2, 0));
    }

    #[test]
    fn flags_override_document_header() {
        let text = format!(r#"{{"variant": "eta-two", "eta": "j", "B1": {}, "D1": {}}}"#, block(1, 1), block(1, 1));
        let p = parse_instance(&text, None, Some(Eta::K)).unwrap();
        assert_eq!((p.variant(), p.eta()), (Variant::EtaTwo, Some(Eta::K)));
        assert_eq!(document_header(&text).unwrap(), (Some(Variant::EtaTwo), Some(Eta::J)));
    }

    #[test]
    fn errors_name_the_key() {
        let msg = |text: &str| parse_instance(text, None, None).unwrap_err().to_string();
        assert!(msg(&format!(r#"{{"B": {}}}"#, block(1, 1))).contains("key \"B\""));
        assert!(msg(&format!(r#"{{"variant": "eta-full", "C": {}, "B": {}}}"#, block(1, 1), block(1, 1))).contains("given twice"));
        assert!(msg(&format!(r#"{{"A2": {}, "C2": {}}}"#, block(2, 2), block(3, 2))).contains("C2"));
        assert!(msg(r#"{"eta": "q"}"#).contains("key \"eta\""));
        assert!(msg(r#"[1, 2]"#).contains("object"));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("cubic".parse::<Variant>().unwrap_err().to_string().contains("key \"variant\""));
    }

    #[test]
    fn solution_shape_mismatch_names_the_key() {
        let text = format!(r#"{{"variant": "eta-two", "B1": {}, "C1": {}}}"#, block(2, 2), block(2, 1));
        let p = parse_instance(&text, None, None).unwrap();
        let sol = format!(r#"{{"Y": {}, "Z": {}}}"#, block(2, 2), block(2, 2));
        assert!(parse_solution(&sol, &p).unwrap_err().to_string().contains("\"Z\""));
    }
}
