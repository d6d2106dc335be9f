use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use colprim_core::{instances, MatrixSetFile, ValidationMode};
use serde_json::Value;
use tempfile::TempDir;

fn colprim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colprim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

struct Fixtures {
    dir: TempDir,
}

impl Fixtures {
    fn new() -> Self {
        let f = Fixtures {
            dir: tempfile::tempdir().unwrap(),
        };
        f.put_set(
            "consensus.json",
            &instances::consensus_example(),
            ValidationMode::Stochastic,
        );
        f.put_set(
            "automaton.json",
            &instances::automaton_example(),
            ValidationMode::Binary,
        );
        f.put_set(
            "perm.json",
            &instances::permutation_pair(4),
            ValidationMode::Binary,
        );
        f.put("example.cnf", "p cnf 3 3\n-1 -2 -3 0\n1 2 3 0\n-1 2 -3 0\n");
        f
    }

    fn put_set(&self, name: &str, set: &colprim_core::MatrixSet, mode: ValidationMode) {
        self.put(name, &MatrixSetFile::from_set(set, mode).to_json());
    }

    fn put(&self, name: &str, contents: &str) -> String {
        let p = self.path(name);
        fs::write(&p, contents).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn decide_exit_codes() {
    let f = Fixtures::new();
    let yes = colprim(&["decide", &f.arg("consensus.json")]);
    assert_eq!(code(&yes), 0);
    assert_eq!(String::from_utf8_lossy(&yes.stdout), "yes\n");

    let no = colprim(&["decide", &f.arg("perm.json")]);
    assert_eq!(code(&no), 1);
    let text = String::from_utf8_lossy(&no.stdout);
    assert!(text.starts_with("no\n"));
    assert!(text.contains("{1,2}") && text.contains("{3,4}"));

    let bad = f.put("bad.json", "{ \"n\": 2, ");
    assert_eq!(code(&colprim(&["decide", &bad])), 2);
    let missing = f.arg("nope.json");
    assert_eq!(code(&colprim(&["decide", &missing])), 2);
}

#[test]
fn decide_rejects_invalid_rows() {
    let f = Fixtures::new();
    let p = f.put(
        "rows.json",
        r#"{"n":2,"mode":"stochastic","matrices":[{"name":"A","rows":[[0.5,0.4],[0,1]]}]}"#,
    );
    let out = colprim(&["decide", &p]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));
}

#[test]
fn synthesize_bruteforce_on_automaton() {
    let f = Fixtures::new();
    let out = colprim(&[
        "synthesize",
        &f.arg("automaton.json"),
        "--method",
        "bruteforce",
    ]);
    assert_eq!(code(&out), 0);
    let w = stdout_json(&out);
    assert_eq!(w["decision"], "yes");
    assert_eq!(w["word"], serde_json::json!([2, 2]));
    assert_eq!(w["length"], 2);
    assert_eq!(w["column"], 3);
}

#[test]
fn synthesize_greedy_on_consensus_example() {
    let f = Fixtures::new();
    let out = colprim(&["synthesize", &f.arg("consensus.json")]);
    assert_eq!(code(&out), 0);
    let w = stdout_json(&out);
    assert!(w["length"].as_u64().unwrap() <= 27);
    assert_eq!(w["bounds"]["pin_frankl"], 10);
    assert_eq!(w["bounds"]["cerny_conjecture"], 9);
    assert_eq!(w["bounds"]["greedy_guarantee"], 27);
}

#[test]
fn synthesize_failure_codes() {
    let f = Fixtures::new();
    let out = colprim(&["synthesize", &f.arg("perm.json")]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["decision"], "no");

    let capped = colprim(&[
        "synthesize",
        &f.arg("consensus.json"),
        "--method",
        "bruteforce",
        "--max-len",
        "2",
    ]);
    assert_eq!(code(&capped), 3);

    let not_diag = colprim(&["synthesize", &f.arg("consensus.json"), "--method", "intree"]);
    assert_eq!(code(&not_diag), 2);
}

#[test]
fn simulate_periodic_limit() {
    let f = Fixtures::new();
    let out = colprim(&[
        "simulate",
        &f.arg("consensus.json"),
        "--schedule",
        "word",
        "--word",
        "11221",
        "--x0",
        "0,1,0,0",
        "--steps",
        "500",
    ]);
    assert_eq!(code(&out), 0);
    let s = stdout_json(&out);
    for x in s["final_state"].as_array().unwrap() {
        assert!((x.as_f64().unwrap() - 0.565).abs() < 1e-3);
    }
    assert_eq!(s["schedule"]["word"], serde_json::json!([1, 1, 2, 2, 1]));
}

#[test]
fn simulate_constant_start() {
    let f = Fixtures::new();
    let csv = f.arg("t.csv");
    let out = colprim(&[
        "simulate",
        &f.arg("consensus.json"),
        "--x0",
        "2,2,2,2",
        "--steps",
        "3",
        "--csv",
        &csv,
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["hitting_time"], 0);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x_1,x_2,x_3,x_4,diameter"));
    assert!(lines.next().unwrap().ends_with(",0.0000000000000000e0"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn simulate_random_is_reproducible() {
    let f = Fixtures::new();
    let run = |csv: &str| {
        colprim(&[
            "simulate",
            &f.arg("consensus.json"),
            "--seed",
            "99",
            "--steps",
            "200",
            "--csv",
            csv,
        ])
    };
    let (a, b) = (f.arg("a.csv"), f.arg("b.csv"));
    let (ra, rb) = (run(&a), run(&b));
    assert_eq!(code(&ra), 0);
    assert_eq!(ra.stdout, rb.stdout);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn simulate_rejects_non_stochastic() {
    let f = Fixtures::new();
    let p = f.put(
        "general.json",
        r#"{"n":2,"mode":"general","matrices":[{"name":"A","rows":[[1,1],[0,2]]}]}"#,
    );
    assert_eq!(code(&colprim(&["decide", &p])), 0);
    assert_eq!(code(&colprim(&["simulate", &p])), 2);
}

#[test]
fn simulate_trials_summary() {
    let f = Fixtures::new();
    let out = colprim(&[
        "simulate",
        &f.arg("consensus.json"),
        "--trials",
        "20",
        "--steps",
        "10000",
    ]);
    assert_eq!(code(&out), 0);
    let s = stdout_json(&out);
    assert_eq!(s["success_fraction"], 1.0);
    assert_eq!(s["seed"], 20_240_601);

    let perm = colprim(&[
        "simulate",
        &f.arg("perm.json"),
        "--trials",
        "5",
        "--steps",
        "2000",
    ]);
    assert_eq!(stdout_json(&perm)["successes"], 0);
}

#[test]
fn pairgraph_counts_and_dot() {
    let f = Fixtures::new();
    let dot = f.arg("g.dot");
    let out = colprim(&["pairgraph", &f.arg("automaton.json"), "--dot", &dot]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["nodes"], 6);
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph pairs {\n"));
    assert!(text.contains("\"1,2\" -> \"2,3\" [label=\"1\"];"));

    let ex = colprim(&["pairgraph", &f.arg("consensus.json")]);
    assert!(String::from_utf8_lossy(&ex.stdout).starts_with("digraph pairs {"));

    let one = f.put(
        "one.json",
        r#"{"n":1,"mode":"general","matrices":[{"name":"A","rows":[[0.5]]}]}"#,
    );
    let out = colprim(&["pairgraph", &one, "--dot", &dot]);
    assert_eq!(stdout_json(&out)["nodes"], 1);
    assert!(fs::read_to_string(&dot).unwrap().contains("\"1\" -> \"1\""));
}

#[test]
fn reduce_example_formula() {
    let f = Fixtures::new();
    let out_path = f.arg("red.json");
    let out = colprim(&[
        "reduce",
        &f.arg("example.cnf"),
        "--out",
        &out_path,
        "--verify",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let s = stdout_json(&out);
    assert_eq!(s["matrices"], 6);
    assert_eq!(s["dim"], 7);
    assert_eq!(s["check"]["short_word"].as_array().unwrap().len(), 3);

    let set = read_json(&f.path("red.json"));
    assert_eq!(set["n"], 7);
    assert_eq!(set["matrices"].as_array().unwrap().len(), 6);
    let map = read_json(&f.path("red.letters.json"));
    assert_eq!(map["2"], serde_json::json!({"var": 1, "polarity": false}));

    // the written set feeds back into the other commands
    assert_eq!(code(&colprim(&["decide", &out_path])), 0);
    let w = colprim(&["synthesize", &out_path, "--method", "intree"]);
    assert_eq!(code(&w), 0);
    assert!(stdout_json(&w)["length"].as_u64().unwrap() <= 6);
}

#[test]
fn reduce_unsat_and_empty() {
    let f = Fixtures::new();
    let unsat = f.put("unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let out = colprim(&["reduce", &unsat, "--out", &f.arg("u.json"), "--verify"]);
    assert_eq!(code(&out), 0);
    let check = &stdout_json(&out)["check"];
    assert_eq!(check["sat"], false);
    assert_eq!(check["short_word_exists"], false);

    let empty = f.put("empty.cnf", "p cnf 2 0\n");
    let out = colprim(&["reduce", &empty, "--out", &f.arg("e.json"), "--verify"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["matrices"], 4);
}

#[test]
fn reduce_error_codes() {
    let f = Fixtures::new();
    let bad = f.put("bad.cnf", "p cnf 2 1\n1 2 3 0\n");
    assert_eq!(
        code(&colprim(&["reduce", &bad, "--out", &f.arg("x.json")])),
        2
    );
    let wide = f.put("wide.cnf", "p cnf 13 0\n");
    let out = colprim(&["reduce", &wide, "--out", &f.arg("w.json"), "--verify"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn reports_are_byte_identical() {
    let f = Fixtures::new();
    let (a, b) = (f.arg("a.json"), f.arg("b.json"));
    for r in [&a, &b] {
        let out = colprim(&["--report", r, "synthesize", &f.arg("consensus.json")]);
        assert_eq!(code(&out), 0);
    }
    // the report path itself differs between the two runs
    let strip = |p: &str| {
        let mut v = read_json(Path::new(p));
        v["args"] = Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    let r = strip(&a);
    assert_eq!(r["command"], "synthesize");
    assert_eq!(r["exit_code"], 0);
    assert_eq!(r["input_sha256"].as_str().unwrap().len(), 64);
    assert!(r.get("elapsed_ms").is_none());

    let timed = colprim(&["--timing", "--report", &a, "decide", &f.arg("perm.json")]);
    assert_eq!(code(&timed), 1);
    assert!(read_json(Path::new(&a))["elapsed_ms"].is_number());
}

#[test]
fn jobs_flag_does_not_change_results() {
    let f = Fixtures::new();
    let run = |jobs: &str| {
        colprim(&[
            "--jobs",
            jobs,
            "simulate",
            &f.arg("consensus.json"),
            "--trials",
            "16",
        ])
        .stdout
    };
    assert_eq!(run("1"), run("4"));
}
