use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qsylv::eta::hermicity_defect;
use qsylv::io::{parse_instance, parse_solution, Answer};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsylv")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qsylv-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../examples").join(name).to_string_lossy().into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn worked_example_check_prints_rank_table() {
    let o = bin(&["check", &example("example51.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    for (name, value) in [
        ("coupled rank, X Y Z through A-blocks", 11),
        ("coupled rank, X Y Z through B-blocks", 8),
        ("coupled rank, doubled block", 19),
    ] {
        let line = out.lines().find(|l| l.contains(name)).unwrap_or_else(|| panic!("{name} missing"));
        assert!(line.contains(&format!("{value} = {value}")), "{line}");
    }
}

#[test]
fn worked_example_printed_solution_verifies() {
    let o = bin(&["verify", &example("example51.json"), &example("example51.solution.json"), "--tol", "1e-3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn worked_example_solves() {
    let dir = scratch("worked");
    let out = dir.join("sol.json");
    assert_eq!(code(&bin(&["solve", &example("example51.json"), "--out", &s(&out)])), 0);
    let o = bin(&["verify", &example("example51.json"), &s(&out), "--tol", "1e-8"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn zero_solution_fails_verification() {
    let dir = scratch("zero");
    let inst = dir.join("i.json");
    assert_eq!(code(&bin(&["gen", "--seed", "4", "--out", &s(&inst)])), 0);
    let problem = parse_instance(&std::fs::read_to_string(&inst).unwrap(), None, None).unwrap();
    let mut doc = serde_json::Map::new();
    for (name, (rows, cols)) in problem.unknown_shapes() {
        let entries = vec![vec![[0.0; 4]; cols]; rows];
        doc.insert(name.to_string(), serde_json::json!({"rows": rows, "cols": cols, "entries": entries}));
    }
    let zero = dir.join("z.json");
    std::fs::write(&zero, serde_json::Value::Object(doc).to_string()).unwrap();
    let o = bin(&["verify", &s(&inst), &s(&zero)]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn inconsistent_instance_exits_two_everywhere() {
    let dir = scratch("bad");
    let inst = dir.join("bad.json");
    assert_eq!(code(&bin(&["gen", "--seed", "1", "--inconsistent", "--out", &s(&inst)])), 0);
    assert!(!dir.join("bad.witness.json").exists());
    assert_eq!(code(&bin(&["check", &s(&inst)])), 2);
    let o = bin(&["solve", &s(&inst)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("failing conditions:"), "{}", stderr(&o));
}

#[test]
fn generation_is_deterministic() {
    let dir = scratch("det");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for p in [&a, &b] {
        assert_eq!(code(&bin(&["gen", "--variant", "mixed", "--seed", "17", "--out", &s(p)])), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.join("c.json");
    assert_eq!(code(&bin(&["gen", "--variant", "mixed", "--seed", "18", "--out", &s(&c)])), 0);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn eta_three_solution_is_eta_hermitian() {
    let dir = scratch("eta");
    let inst = dir.join("i.json");
    assert_eq!(code(&bin(&["gen", "--variant", "eta-three", "--eta", "k", "--seed", "3", "--out", &s(&inst)])), 0);
    let out = dir.join("s.json");
    assert_eq!(code(&bin(&["solve", &s(&inst), "--free", "random(4)", "--out", &s(&out)])), 0);
    let problem = parse_instance(&std::fs::read_to_string(&inst).unwrap(), None, None).unwrap();
    let Answer::EtaThree(sol) = parse_solution(&std::fs::read_to_string(&out).unwrap(), &problem).unwrap() else {
        panic!("wrong solution kind")
    };
    for m in [&sol.x, &sol.y, &sol.z] {
        assert!(hermicity_defect(m, qsylv::Eta::K) <= 1e-12 * (1.0 + m.frobenius_norm()));
    }
}

#[test]
fn free_parameters_from_file() {
    let dir = scratch("free");
    let inst = dir.join("i.json");
    assert_eq!(code(&bin(&["gen", "--variant", "two-term", "--seed", "2", "--out", &s(&inst)])), 0);
    let params = dir.join("p.json");
    std::fs::write(&params, r#"{"nope": {"rows": 1, "cols": 1, "entries": [[[1, 0, 0, 0]]]}}"#).unwrap();
    let o = bin(&["solve", &s(&inst), "--free", &format!("file({})", s(&params))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("\"nope\""), "{}", stderr(&o));

    std::fs::write(&params, "{}").unwrap();
    let out = dir.join("s.json");
    let o = bin(&["solve", &s(&inst), "--free", &format!("file({})", s(&params)), "--out", &s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&bin(&["verify", &s(&inst), &s(&out)])), 0);
}

#[test]
fn parse_errors_exit_one_and_name_the_key() {
    let dir = scratch("parse");
    let full = std::fs::read_to_string(example("example51.json")).unwrap();
    let truncated = dir.join("t.json");
    std::fs::write(&truncated, &full[..full.len() / 2]).unwrap();
    assert_eq!(code(&bin(&["check", &s(&truncated)])), 1);

    let cases = [
        (r#"{"A2": {"rows": 1, "cols": 1, "entries": [[[1, 2, 3]]]}}"#, "\"A2\""),
        (r#"{"Q9": {"rows": 1, "cols": 1, "entries": [[[1, 2, 3, 4]]]}}"#, "\"Q9\""),
        (r#"{"A2": {"rows": 2, "cols": 1, "entries": [[[1, 2, 3, 4]]]}}"#, "\"A2\""),
        (r#"{"variant": "cubic"}"#, "\"variant\""),
    ];
    for (k, (doc, key)) in cases.into_iter().enumerate() {
        let p = dir.join(format!("bad{k}.json"));
        std::fs::write(&p, doc).unwrap();
        let o = bin(&["check", &s(&p)]);
        assert_eq!(code(&o), 1, "{doc}");
        assert!(stderr(&o).contains(key), "{doc}: {}", stderr(&o));
    }
    assert_eq!(code(&bin(&["check", &s(&dir.join("missing.json"))])), 1);
    assert_eq!(code(&bin(&["check", "--variant", "cubic", &s(&truncated)])), 1);
}

#[test]
fn check_writes_structured_report() {
    let dir = scratch("report");
    let out = dir.join("r.json");
    assert_eq!(code(&bin(&["check", &example("example51.json"), "--out", &s(&out)])), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["variant"], "master");
    assert_eq!(v["report"]["consistent"], true);
    assert_eq!(v["report"]["rank_conditions"].as_array().unwrap().len(), 17);
}
