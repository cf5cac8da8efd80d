use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use typed_exchange::core::sat::Budget;
use typed_exchange::core::{verify_representation, ConstrainedPairs};
use typed_exchange::formats::{parse_attributes, parse_dimacs, parse_edge_list};

const BIN: &str = env!("CARGO_BIN_EXE_typed-exchange");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("TYPED_EXCHANGE_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn witness(dir: &TempDir) -> PathBuf {
    let o = run(&["gen", "witness", "--n", "4"]);
    assert!(o.status.success());
    write(dir, "w.edges", &stdout(&o))
}

#[test]
fn exit_codes_follow_status() {
    let dir = TempDir::new().unwrap();
    let w = witness(&dir);
    let unsat = run(&["represent", s(&w), "--k", "3"]);
    assert_eq!(unsat.status.code(), Some(1));
    assert!(stdout(&unsat).contains("status: UNSAT"));
    let out = dir.path().join("w.attr");
    let sat = run(&["represent", s(&w), "--k", "4", "--out", s(&out)]);
    assert_eq!(sat.status.code(), Some(0));

    let g = parse_edge_list(&std::fs::read_to_string(&w).unwrap()).unwrap();
    let attr = parse_attributes(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(
        verify_representation(&g, &attr.rep, &ConstrainedPairs::All)
            .unwrap()
            .ok
    );

    let bad = write(&dir, "bad.edges", "3 2\n0 1\n");
    assert_eq!(
        run(&["represent", s(&bad), "--k", "2"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["represent"]).status.code(), Some(3));
    assert_eq!(
        run(&["represent", s(&w), "--k", "4", "--budget-conflicts", "0"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn zero_budget_on_hard_instance_times_out() {
    let dir = TempDir::new().unwrap();
    let w = witness(&dir);
    let o = run(&["represent", s(&w), "--k", "3", "--budget-conflicts", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("status: TIMEOUT"));
}

#[test]
fn clears_three_cycle() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "c.edges", "3 3\n0 1\n1 2\n2 0\n");
    let o = run(&["clear", s(&g), "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("value: 3"));
    let o = run(&["clear", s(&g), "-L", "2"]);
    assert!(stdout(&o).contains("value: 0"));
}

#[test]
fn flip_example_from_files() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "f.attr", "2 2 0\nd:11 p:11\nd:10 p:01\n");
    let costs = write(&dir, "costs", "cost 0 1 0.5\n");
    let o = run(&["clear", s(&g), "--flip-costs", s(&costs)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("flip 0 -> 1: 1"), "{text}");
    assert!(text.contains("net: 1.5"), "{text}");
    let json = run(&["clear", s(&g), "--flip-costs", s(&costs), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["flip"]["net"], 1.5);
}

#[test]
fn oracle_agrees_on_generated_pools() {
    let dir = TempDir::new().unwrap();
    for seed in 1..=12 {
        let p = dir.path().join(format!("p{seed}.attr"));
        let seed = seed.to_string();
        let o = run(&[
            "gen",
            "pool",
            "--n",
            "9",
            "--t",
            "1",
            "--seed",
            &seed,
            "--bits",
            "4",
            "--out",
            s(&p),
        ]);
        assert!(o.status.success());
        for l in ["2", "3"] {
            let o = run(&["clear", s(&p), "-L", l, "--oracle"]);
            assert_eq!(
                o.status.code(),
                Some(0),
                "{}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
    }
}

#[test]
fn reduction_statuses() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.cnf", "p cnf 3 2\n1 2 3 0\n-1 -2 3 0\n");
    let out = dir.path().join("r");
    let o = run(&["reduce", s(&f), "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("assignment: x1="));
    assert!(out.join("reduction.attr").exists());

    let contra = write(&dir, "u.cnf", "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n");
    let o = run(&["reduce", s(&contra)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status: UNSAT"));
}

#[test]
fn dimacs_export_and_model_import() {
    let dir = TempDir::new().unwrap();
    let w = witness(&dir);
    let cnf_path = dir.path().join("w.cnf");
    let o = run(&[
        "represent",
        s(&w),
        "--k",
        "4",
        "--t",
        "1",
        "--emit-dimacs",
        s(&cnf_path),
    ]);
    assert!(o.status.code().unwrap() <= 1);
    assert!(dir.path().join("w.cnf.varmap").exists());

    let cnf = parse_dimacs(&std::fs::read_to_string(&cnf_path).unwrap()).unwrap();
    let (_, model) = cnf.solve(&Budget::unlimited());
    let model_path = dir.path().join("w.model");
    match model {
        Some(m) => {
            let lits: Vec<String> = m
                .iter()
                .enumerate()
                .map(|(i, &b)| {
                    if b {
                        format!("{}", i + 1)
                    } else {
                        format!("-{}", i + 1)
                    }
                })
                .collect();
            std::fs::write(
                &model_path,
                format!("s SATISFIABLE\nv {} 0\n", lits.join(" ")),
            )
            .unwrap();
            let attr = dir.path().join("w.attr");
            let o = run(&[
                "represent",
                s(&w),
                "--k",
                "4",
                "--t",
                "1",
                "--import-model",
                s(&model_path),
                "--out",
                s(&attr),
            ]);
            assert_eq!(o.status.code(), Some(0));
            let g = parse_edge_list(&std::fs::read_to_string(&w).unwrap()).unwrap();
            let rep = parse_attributes(&std::fs::read_to_string(&attr).unwrap())
                .unwrap()
                .rep;
            assert!(
                verify_representation(&g, &rep, &ConstrainedPairs::All)
                    .unwrap()
                    .ok
            );
        }
        None => {
            std::fs::write(&model_path, "s UNSATISFIABLE\n").unwrap();
            let o = run(&[
                "represent",
                s(&w),
                "--k",
                "4",
                "--t",
                "1",
                "--import-model",
                s(&model_path),
            ]);
            assert_eq!(o.status.code(), Some(1));
        }
    }
}

#[test]
fn rejects_model_that_is_not_a_model() {
    let dir = TempDir::new().unwrap();
    let w = witness(&dir);
    let m = write(&dir, "zero.model", "s SATISFIABLE\nv 0\n");
    let o = run(&["represent", s(&w), "--k", "4", "--import-model", s(&m)]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn deterministic_sweeps_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (p, jobs) in [(&a, "1"), (&b, "4")] {
        let o = run(&[
            "sweep-k",
            "--count",
            "4",
            "--n",
            "8",
            "--k-to",
            "8",
            "--deterministic",
            "--jobs",
            jobs,
            "--out",
            s(p),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("# typed-exchange csv v1\n"));
    assert_eq!(text.lines().count(), 2 + 4 * 8);
}

#[test]
fn seed_environment_overrides_flag() {
    let gen = |env: Option<&str>| {
        let mut c = Command::new(BIN);
        c.args(["gen", "pool", "--n", "12", "--t", "0", "--seed", "3"]);
        match env {
            Some(v) => c.env("TYPED_EXCHANGE_SEED", v),
            None => c.env_remove("TYPED_EXCHANGE_SEED"),
        };
        stdout(&c.output().unwrap())
    };
    assert_eq!(gen(None), gen(None));
    assert_eq!(gen(Some("3")), gen(None));
    assert_ne!(gen(Some("4")), gen(None));
}
