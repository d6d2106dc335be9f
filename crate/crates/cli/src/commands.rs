use std::fs;
use std::path::{Path, PathBuf};

use colprim_core::sim::default_t_max;
use colprim_core::synth::{shortest_word_with, BruteForceOptions};
use colprim_core::{
    build_pair_digraph, decide_column_primitive, intree_decide, parse_dimacs, pattern_product,
    random_switching_experiment, reduce, run, synthesize_word, verify_reduction, Error,
    ExperimentConfig, InTreeOutcome, MatrixSet, MatrixSetFile, Schedule, ValidationMode, Witness,
    Word,
};
use serde_json::{json, Value};

use crate::args::{Method, PairArgs, ReduceArgs, ScheduleKind, SimArgs, SynthArgs};
use crate::error::CliError;
use crate::report::pretty;

pub struct Outcome {
    pub stdout: String,
    pub payload: Value,
    pub code: u8,
}

impl Outcome {
    fn json(payload: Value, code: u8) -> Self {
        Outcome {
            stdout: pretty(&payload),
            payload,
            code,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn text(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| CliError::Input(Error::BadFile(e.to_string())))
}

fn load_set(bytes: &[u8]) -> Result<MatrixSet> {
    Ok(MatrixSetFile::from_json(text(bytes)?)?.into_set()?)
}

/// Refuses to emit a word whose product lacks the claimed positive column.
fn reverify(set: &MatrixSet, word: &Word, column: usize) -> Result<()> {
    let p = pattern_product(word, set)?;
    if p.column_positive(column) {
        Ok(())
    } else {
        Err(CliError::Unverified(format!(
            "word {word} has no positive column {}",
            column + 1
        )))
    }
}

pub fn decide(bytes: &[u8]) -> Result<Outcome> {
    let set = load_set(bytes)?;
    let g = build_pair_digraph(&set);
    let d = decide_column_primitive(&g);
    if d.is_column_primitive() {
        return Ok(Outcome {
            stdout: "yes\n".into(),
            payload: json!({
                "decision": "yes",
                "nodes": g.node_count(),
                "edges": g.edges().len(),
                "max_merge_distance": d.max_merge_distance(),
            }),
            code: 0,
        });
    }
    let blocking: Vec<String> = d
        .blocking_pairs()
        .iter()
        .map(|p| format!("{{{p}}}"))
        .collect();
    Ok(Outcome {
        stdout: format!("no\nblocking pairs: {}\n", blocking.join(" ")),
        payload: json!({
            "decision": "no",
            "nodes": g.node_count(),
            "edges": g.edges().len(),
            "blocking_pairs": blocking,
        }),
        code: 1,
    })
}

pub fn synthesize(args: &SynthArgs, bytes: &[u8]) -> Result<Outcome> {
    let set = load_set(bytes)?;
    let n = set.dim();
    let g = build_pair_digraph(&set);
    let method = match args.method {
        Method::Greedy => "greedy",
        Method::Bruteforce => "bruteforce",
        Method::Intree => "intree",
    };
    let with_method = |w: Witness| {
        let mut v = serde_json::to_value(w).expect("serializable");
        v["method"] = json!(method);
        v
    };
    if !decide_column_primitive(&g).is_column_primitive() {
        return Ok(Outcome::json(with_method(Witness::no(n)), 1));
    }

    let (word, column) = match args.method {
        Method::Greedy => {
            let res = synthesize_word(&set, &g)?;
            if !res.verify(&set) {
                return Err(CliError::Unverified("greedy certificate".into()));
            }
            (res.word, res.column)
        }
        Method::Bruteforce => {
            let opts = BruteForceOptions {
                max_len: args.max_len,
                ..Default::default()
            };
            match shortest_word_with(&set, opts)? {
                Some(found) => found,
                None => {
                    return Err(CliError::Budget(Error::BudgetExceeded(format!(
                        "no positive-column word of length at most {}",
                        args.max_len.unwrap_or_default()
                    ))))
                }
            }
        }
        Method::Intree => match intree_decide(&set)? {
            InTreeOutcome::Yes { word, root } => (word, root),
            InTreeOutcome::No => {
                return Err(CliError::Unverified(
                    "in-tree test disagrees with the pair digraph".into(),
                ))
            }
        },
    };
    reverify(&set, &word, column)?;
    Ok(Outcome::json(
        with_method(Witness::yes(&word, column, n)),
        0,
    ))
}

/// Schedule as echoed to users: letters 1-based.
fn schedule_json(s: &Schedule) -> Value {
    match s {
        Schedule::Periodic { word } => json!({ "kind": "periodic", "word": word.one_based() }),
        Schedule::Scripted { letters } => json!({
            "kind": "scripted",
            "letters": letters.iter().map(|k| k + 1).collect::<Vec<_>>(),
        }),
        Schedule::Random {
            seed,
            probabilities,
        } => json!({
            "kind": "random",
            "seed": seed,
            "probabilities": probabilities,
        }),
    }
}

fn default_x0(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64).collect()
}

pub fn simulate(args: &SimArgs, bytes: &[u8]) -> Result<Outcome> {
    let set = load_set(bytes)?;
    let n = set.dim();
    let m = set.len();

    if let Some(trials) = args.trials {
        if args.schedule != ScheduleKind::Random {
            return Err(CliError::Usage("--trials needs --schedule random".into()));
        }
        let cfg = ExperimentConfig {
            eps: args.eps,
            t_max: args.steps.unwrap_or_else(|| default_t_max(n)),
            probabilities: args.probabilities.clone(),
            x0: args.x0.clone(),
            ..ExperimentConfig::new(&set, trials, args.seed)
        };
        let summary = random_switching_experiment(&set, &cfg)?;
        return Ok(Outcome::json(
            serde_json::to_value(summary).expect("serializable"),
            0,
        ));
    }

    let schedule = match args.schedule {
        ScheduleKind::Word => {
            let text = args.word.as_deref().expect("clap requires --word");
            Schedule::Periodic {
                word: text.parse()?,
            }
        }
        ScheduleKind::Random => Schedule::Random {
            seed: args.seed,
            probabilities: args
                .probabilities
                .clone()
                .unwrap_or_else(|| vec![1.0 / m as f64; m]),
        },
    };
    let x0 = args.x0.clone().unwrap_or_else(|| default_x0(n));
    let steps = args.steps.unwrap_or(1000);
    let traj = run(&set, &schedule, &x0, steps)?;
    if let Some(path) = &args.csv {
        write(path, &traj.to_csv())?;
    }
    let payload = json!({
        "schedule": schedule_json(&schedule),
        "seed": args.seed,
        "x0": x0,
        "steps": steps,
        "eps": args.eps,
        "final_state": traj.final_state(),
        "final_diameter": traj.final_diameter(),
        "hitting_time": traj.hitting_time(args.eps),
    });
    Ok(Outcome::json(payload, 0))
}

pub fn pairgraph(args: &PairArgs, bytes: &[u8]) -> Result<Outcome> {
    let set = load_set(bytes)?;
    let g = build_pair_digraph(&set);
    let dot = g.to_dot();
    let payload = json!({
        "nodes": g.node_count(),
        "edges": g.edges().len(),
        "dot": args.dot,
    });
    match &args.dot {
        Some(path) => {
            write(path, &dot)?;
            Ok(Outcome::json(payload, 0))
        }
        None => Ok(Outcome {
            stdout: dot,
            payload,
            code: 0,
        }),
    }
}

fn letter_map_path(args: &ReduceArgs) -> PathBuf {
    args.letter_map
        .clone()
        .unwrap_or_else(|| args.out.with_extension("letters.json"))
}

pub fn reduce_cmd(args: &ReduceArgs, bytes: &[u8]) -> Result<Outcome> {
    let formula = parse_dimacs(text(bytes)?)?;
    let rs = reduce(&formula);
    let map_path = letter_map_path(args);
    write(
        &args.out,
        &MatrixSetFile::from_set(&rs.set, ValidationMode::PositiveDiagonal).to_json(),
    )?;
    write(&map_path, &rs.letter_map_json())?;

    let mut payload = json!({
        "vars": rs.vars,
        "clauses": rs.clauses,
        "dim": rs.set.dim(),
        "matrices": rs.set.len(),
        "out": args.out,
        "letter_map": map_path,
    });
    if args.verify {
        let check = verify_reduction(&formula)?;
        if let Some(letters) = &check.short_word {
            let word = Word::from_one_based(letters)?;
            if word.len() > formula.vars() {
                return Err(CliError::Unverified(format!(
                    "word {word} is longer than v"
                )));
            }
            reverify(&rs.set, &word, 0)?;
        }
        payload["check"] = serde_json::to_value(&check).expect("serializable");
        if !check.passed() {
            return Err(CliError::ReductionMismatch(pretty(&check)));
        }
    }
    Ok(Outcome::json(payload, 0))
}
