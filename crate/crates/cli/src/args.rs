use std::path::PathBuf;

use clap::{Args as ClapArgs, Parser, Subcommand, ValueEnum};

/// Default seed for random schedules. Fixed so runs are replayable.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "colprim", version, about = "Column-primitivity of matrix sets")]
pub struct Cli {
    /// Write a JSON run report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,

    /// Cap on worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Include wall-clock time in the report. Off by default so reports are
    /// byte-identical across runs.
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether some product has a positive column.
    Decide(InputArgs),
    /// Produce a positive-column word.
    Synthesize(SynthArgs),
    /// Iterate x(t+1) = A_σ(t) x(t).
    Simulate(SimArgs),
    /// Build the digraph of pairs.
    Pairgraph(PairArgs),
    /// Reduce a 3-CNF formula to a matrix set.
    Reduce(ReduceArgs),
}

#[derive(ClapArgs, Debug)]
pub struct InputArgs {
    /// Matrix-set JSON file.
    pub input: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Greedy,
    Bruteforce,
    /// Positive-diagonal sets only.
    Intree,
}

#[derive(ClapArgs, Debug)]
pub struct SynthArgs {
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = Method::Greedy)]
    pub method: Method,

    /// Longest word the brute-force search may try.
    #[arg(long, value_name = "L")]
    pub max_len: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScheduleKind {
    Word,
    Random,
}

#[derive(ClapArgs, Debug)]
pub struct SimArgs {
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = ScheduleKind::Random)]
    pub schedule: ScheduleKind,

    /// Periodic word, 1-based, e.g. `11221`; its last letter acts first.
    #[arg(long, required_if_eq("schedule", "word"))]
    pub word: Option<String>,

    /// Letter probabilities for random schedules, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub probabilities: Option<Vec<f64>>,

    /// Initial state, comma separated. Defaults to (1, 2, …, n).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,

    /// Steps for a single run, or the per-trial budget with `--trials`.
    #[arg(long)]
    pub steps: Option<usize>,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, default_value_t = colprim_core::sim::DEFAULT_EPS)]
    pub eps: f64,

    /// Run this many independent random trials instead of one trajectory.
    #[arg(long, conflicts_with = "csv")]
    pub trials: Option<usize>,

    /// Write the trajectory here.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(ClapArgs, Debug)]
pub struct PairArgs {
    pub input: PathBuf,

    /// Write DOT here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub dot: Option<PathBuf>,
}

#[derive(ClapArgs, Debug)]
pub struct ReduceArgs {
    /// DIMACS CNF file.
    pub input: PathBuf,

    /// Matrix-set JSON to write.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Letter map sidecar. Defaults to the output path with extension
    /// `letters.json`.
    #[arg(long, value_name = "FILE")]
    pub letter_map: Option<PathBuf>,

    /// Check satisfiability against short positive-column words.
    #[arg(long)]
    pub verify: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn word_schedule_needs_a_word() {
        assert!(
            Cli::try_parse_from(["colprim", "simulate", "s.json", "--schedule", "word"]).is_err()
        );
        let cli = Cli::try_parse_from(["colprim", "simulate", "s.json", "--x0", "-1,2.5"]).unwrap();
        let Command::Simulate(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.x0, Some(vec![-1.0, 2.5]));
        assert_eq!(a.seed, DEFAULT_SEED);
    }
}
