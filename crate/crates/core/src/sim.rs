//! Switched consensus `x(t+1) = A_{σ(t)} x(t)` and push-sum.
//!
//! Random schedules draw letters from ChaCha8 (`rand_chacha::ChaCha8Rng`)
//! seeded with `seed_from_u64(seed)`; trial `i` of an experiment uses
//! stream `i` of that generator, so trials are reproducible one by one and
//! independent of thread count.

use std::fmt::Write as _;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matset::{pattern_product, product, Matrix, MatrixSet, Word, ROW_SUM_TOL};

/// Default consensus threshold on the diameter.
pub const DEFAULT_EPS: f64 = 1e-6;
/// Slack on the contraction inequality.
pub const CONTRACTION_SLACK: f64 = 1e-12;
/// Push-sum weights below this are treated as zero when reading estimates.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// `max_i x_i − min_i x_i`
pub fn diameter(x: &[f64]) -> f64 {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if x.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// `100·n³`, the default step budget of random experiments.
pub fn default_t_max(n: usize) -> usize {
    100 * n * n * n
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// Repeats the word; its rightmost letter acts first.
    Periodic { word: Word },
    /// Letters in time order.
    Scripted { letters: Vec<usize> },
    /// i.i.d. letters with the given probabilities.
    Random { seed: u64, probabilities: Vec<f64> },
}

impl Schedule {
    pub fn uniform(seed: u64, m: usize) -> Self {
        Schedule::Random {
            seed,
            probabilities: vec![1.0 / m as f64; m],
        }
    }

    fn check(&self, set: &MatrixSet, steps: usize) -> Result<()> {
        match self {
            Schedule::Periodic { word } => {
                if word.is_empty() {
                    return Err(Error::EmptyWord);
                }
                set.check_word(word)
            }
            Schedule::Scripted { letters } => {
                if letters.len() < steps {
                    return Err(Error::BadWord(format!(
                        "script has {} letters, {steps} steps requested",
                        letters.len()
                    )));
                }
                set.check_word(&Word::new(letters.clone()))
            }
            Schedule::Random { probabilities, .. } => check_probabilities(probabilities, set.len()),
        }
    }

    fn stream(&self, trial: u64) -> LetterStream<'_> {
        match self {
            Schedule::Periodic { word } => LetterStream::Cycle {
                order: word.application_order().collect(),
                t: 0,
            },
            Schedule::Scripted { letters } => LetterStream::Script { letters, t: 0 },
            Schedule::Random {
                seed,
                probabilities,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(trial);
                LetterStream::Random {
                    rng,
                    dist: WeightedIndex::new(probabilities).expect("checked"),
                }
            }
        }
    }
}

fn check_probabilities(p: &[f64], m: usize) -> Result<()> {
    if p.len() != m {
        return Err(Error::BadProbabilities(format!(
            "{} probabilities for {m} letters",
            p.len()
        )));
    }
    if let Some(bad) = p.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::BadProbabilities(format!(
            "{bad} is not strictly positive"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::BadProbabilities(format!(
            "probabilities sum to {sum}"
        )));
    }
    Ok(())
}

// One stream per run; the size of the RNG variant does not matter.
#[allow(clippy::large_enum_variant)]
enum LetterStream<'a> {
    Cycle {
        order: Vec<usize>,
        t: usize,
    },
    Script {
        letters: &'a [usize],
        t: usize,
    },
    Random {
        rng: ChaCha8Rng,
        dist: WeightedIndex<f64>,
    },
}

impl LetterStream<'_> {
    fn rng(&mut self) -> Option<&mut ChaCha8Rng> {
        match self {
            LetterStream::Random { rng, .. } => Some(rng),
            _ => None,
        }
    }
}

impl Iterator for LetterStream<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            LetterStream::Cycle { order, t } => {
                let k = order[*t % order.len()];
                *t += 1;
                Some(k)
            }
            LetterStream::Script { letters, t } => {
                let k = letters.get(*t).copied();
                *t += 1;
                k
            }
            LetterStream::Random { rng, dist } => Some(dist.sample(rng)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// `x(0) … x(T)`
    pub states: Vec<Vec<f64>>,
    pub diameters: Vec<f64>,
    pub schedule: Schedule,
    /// Letters in time order, `σ(0) … σ(T−1)`.
    pub letters_used: Vec<usize>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("x(0) is always recorded")
    }

    pub fn final_diameter(&self) -> f64 {
        *self.diameters.last().expect("x(0) is always recorded")
    }

    /// First `t` with `diameter(x(t)) < eps`.
    pub fn hitting_time(&self, eps: f64) -> Option<usize> {
        self.diameters.iter().position(|&d| d < eps)
    }

    /// CSV with header `t,x_1,…,x_n,diameter`; values carry 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.states[0].len();
        let mut s = String::from("t");
        for i in 1..=n {
            let _ = write!(s, ",x_{i}");
        }
        s.push_str(",diameter\n");
        for (t, (x, d)) in self.states.iter().zip(&self.diameters).enumerate() {
            let _ = write!(s, "{t}");
            for v in x {
                let _ = write!(s, ",{}", sig17(*v));
            }
            let _ = writeln!(s, ",{}", sig17(*d));
        }
        s
    }
}

/// Scientific notation with 17 significant digits.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

fn require_stochastic(set: &MatrixSet) -> Result<()> {
    if set.flags().stochastic {
        Ok(())
    } else {
        Err(Error::NotStochastic)
    }
}

fn check_len(x: &[f64], n: usize) -> Result<()> {
    if x.len() == n {
        Ok(())
    } else {
        Err(Error::VectorLength {
            expected: n,
            found: x.len(),
        })
    }
}

/// Iterates the switched system for `steps` steps.
pub fn run(set: &MatrixSet, schedule: &Schedule, x0: &[f64], steps: usize) -> Result<Trajectory> {
    require_stochastic(set)?;
    check_len(x0, set.dim())?;
    schedule.check(set, steps)?;
    let mut letters = schedule.stream(0);
    let mut states = Vec::with_capacity(steps + 1);
    let mut diameters = Vec::with_capacity(steps + 1);
    let mut letters_used = Vec::with_capacity(steps);
    states.push(x0.to_vec());
    diameters.push(diameter(x0));
    for _ in 0..steps {
        let k = letters.next().expect("schedule checked for length");
        let x = set.matrix(k).apply(states.last().expect("nonempty"));
        diameters.push(diameter(&x));
        states.push(x);
        letters_used.push(k);
    }
    Ok(Trajectory {
        states,
        diameters,
        schedule: schedule.clone(),
        letters_used,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionReport {
    /// `min_i (A_w)_{ij}` over the witness column `j`.
    pub a: f64,
    pub column: usize,
    pub before: f64,
    pub after: f64,
    pub holds: bool,
}

/// Checks `diameter(A_w x) ≤ (1 − a)·diameter(x)` for a positive-column
/// word, with `a` the smallest entry of its first positive column.
pub fn contraction_check(set: &MatrixSet, word: &Word, x0: &[f64]) -> Result<ContractionReport> {
    require_stochastic(set)?;
    check_len(x0, set.dim())?;
    let column = pattern_product(word, set)?
        .positive_column()
        .ok_or(Error::NotPositiveColumn)?;
    let aw = product(word, set)?;
    let a = (0..aw.dim())
        .map(|i| aw.get(i, column))
        .fold(f64::INFINITY, f64::min);
    let before = diameter(x0);
    let after = diameter(&aw.apply(x0));
    Ok(ContractionReport {
        a,
        column,
        before,
        after,
        holds: after <= (1.0 - a) * before + CONTRACTION_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub seed: u64,
    pub eps: f64,
    pub t_max: usize,
    /// `None` means uniform.
    pub probabilities: Option<Vec<f64>>,
    /// `None` draws `x0` uniformly from `[0, 1)ⁿ` per trial, before any
    /// letter, from the trial's own stream.
    pub x0: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn new(set: &MatrixSet, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            trials,
            seed,
            eps: DEFAULT_EPS,
            t_max: default_t_max(set.dim()),
            probabilities: None,
            x0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingQuantiles {
    pub min: usize,
    pub median: usize,
    pub p90: usize,
    pub max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub seed: u64,
    pub eps: f64,
    pub t_max: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_fraction: f64,
    /// Per trial; `None` when the threshold was not reached by `t_max`.
    pub hitting_times: Vec<Option<usize>>,
    /// Over successful trials only.
    pub quantiles: Option<HittingQuantiles>,
}

/// Runs independent random-switching trials until the diameter drops below
/// `eps` or `t_max` steps elapse. Trials run in parallel.
pub fn random_switching_experiment(
    set: &MatrixSet,
    cfg: &ExperimentConfig,
) -> Result<ExperimentSummary> {
    require_stochastic(set)?;
    let n = set.dim();
    let m = set.len();
    let probabilities = cfg
        .probabilities
        .clone()
        .unwrap_or_else(|| vec![1.0 / m as f64; m]);
    check_probabilities(&probabilities, m)?;
    if let Some(x0) = &cfg.x0 {
        check_len(x0, n)?;
    }
    let schedule = Schedule::Random {
        seed: cfg.seed,
        probabilities,
    };

    let hitting_times: Vec<Option<usize>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut letters = schedule.stream(trial as u64);
            let mut x = match &cfg.x0 {
                Some(x0) => x0.clone(),
                None => {
                    let rng = letters.rng().expect("random stream");
                    (0..n).map(|_| rng.random::<f64>()).collect()
                }
            };
            let mut next = vec![0.0; n];
            for t in 0..=cfg.t_max {
                if diameter(&x) < cfg.eps {
                    return Some(t);
                }
                if t == cfg.t_max {
                    break;
                }
                let k = letters.next().expect("random streams are infinite");
                set.matrix(k).apply_into(&x, &mut next);
                std::mem::swap(&mut x, &mut next);
            }
            None
        })
        .collect();

    let mut hits: Vec<usize> = hitting_times.iter().flatten().copied().collect();
    hits.sort_unstable();
    let quantiles = (!hits.is_empty()).then(|| {
        let at = |q: f64| hits[((hits.len() - 1) as f64 * q).round() as usize];
        HittingQuantiles {
            min: hits[0],
            median: at(0.5),
            p90: at(0.9),
            max: hits[hits.len() - 1],
        }
    });
    let successes = hits.len();
    Ok(ExperimentSummary {
        seed: cfg.seed,
        eps: cfg.eps,
        t_max: cfg.t_max,
        trials: cfg.trials,
        successes,
        success_fraction: if cfg.trials == 0 {
            0.0
        } else {
            successes as f64 / cfg.trials as f64
        },
        hitting_times,
        quantiles,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushSumState {
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    /// `s_i / w_i`, absent where `w_i ≤ 1e-12`.
    pub estimates: Vec<Option<f64>>,
}

impl PushSumState {
    fn new(s: Vec<f64>, w: Vec<f64>) -> Self {
        let estimates = s
            .iter()
            .zip(&w)
            .map(|(&s, &w)| (w > WEIGHT_FLOOR).then(|| s / w))
            .collect();
        PushSumState { s, w, estimates }
    }
}

/// Checks every column of every matrix sums to one.
pub fn check_column_stochastic(set: &MatrixSet) -> Result<()> {
    for (k, a) in set.matrices().iter().enumerate() {
        for (j, sum) in a.col_sums().into_iter().enumerate() {
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NotColumnStochastic {
                    matrix: k + 1,
                    col: j + 1,
                    sum,
                });
            }
        }
    }
    Ok(())
}

/// Push-sum with column-stochastic matrices: `s(0) = x0`, `w(0) = 1`, both
/// updated by the scheduled matrix. Returns `steps + 1` states.
pub fn push_sum_run(
    set: &MatrixSet,
    schedule: &Schedule,
    x0: &[f64],
    steps: usize,
) -> Result<Vec<PushSumState>> {
    check_column_stochastic(set)?;
    schedule.check(set, steps)?;
    push_sum_iterate(set.matrices(), schedule, x0, steps)
}

/// Push-sum driven by the transposes of a row-stochastic set. Transposes
/// may have zero rows (an agent that only sends), which a [`MatrixSet`]
/// cannot hold.
pub fn push_sum_run_transposed(
    set: &MatrixSet,
    schedule: &Schedule,
    x0: &[f64],
    steps: usize,
) -> Result<Vec<PushSumState>> {
    require_stochastic(set)?;
    schedule.check(set, steps)?;
    let transposes: Vec<Matrix> = set.matrices().iter().map(Matrix::transpose).collect();
    push_sum_iterate(&transposes, schedule, x0, steps)
}

fn push_sum_iterate(
    mats: &[Matrix],
    schedule: &Schedule,
    x0: &[f64],
    steps: usize,
) -> Result<Vec<PushSumState>> {
    let n = mats[0].dim();
    check_len(x0, n)?;
    let mut letters = schedule.stream(0);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(PushSumState::new(x0.to_vec(), vec![1.0; n]));
    for _ in 0..steps {
        let k = letters.next().expect("schedule checked for length");
        let prev = out.last().expect("nonempty");
        let a = &mats[k];
        out.push(PushSumState::new(a.apply(&prev.s), a.apply(&prev.w)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::matset::{validate_set, Matrix, ValidationMode};

    fn e(n: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    }

    fn periodic(w: &str) -> Schedule {
        Schedule::Periodic {
            word: w.parse().unwrap(),
        }
    }

    #[test]
    fn periodic_limit_matches_left_eigenvector() {
        let set = instances::consensus_example();
        let tr = run(&set, &periodic("11221"), &e(4, 1), 200).unwrap();
        for &x in tr.final_state() {
            assert!((x - 0.565).abs() < 1e-3, "{x}");
        }
        let tr = run(&set, &periodic("11221"), &e(4, 0), 200).unwrap();
        assert!(tr.final_state().iter().all(|x| x.abs() < 1e-3));
        // time order is the reverse of written order
        assert_eq!(&tr.letters_used[..5], &[0, 1, 1, 0, 0]);
    }

    #[test]
    fn constant_vector_is_fixed() {
        let set = instances::consensus_example();
        let tr = run(&set, &Schedule::uniform(7, 2), &[1.0; 4], 50).unwrap();
        assert!(tr.diameters.iter().all(|&d| d == 0.0));
        assert!(tr.states.iter().flatten().all(|&v| (v - 1.0).abs() < 1e-15));
        assert_eq!(tr.hitting_time(1e-6), Some(0));
    }

    #[test]
    fn run_rejects_bad_inputs() {
        let set = instances::consensus_example();
        assert_eq!(
            run(&set, &periodic("11"), &[1.0; 3], 1),
            Err(Error::VectorLength {
                expected: 4,
                found: 3
            })
        );
        assert!(matches!(
            run(&set, &Schedule::Scripted { letters: vec![0] }, &[0.0; 4], 2),
            Err(Error::BadWord(_))
        ));
        assert!(matches!(
            run(
                &set,
                &Schedule::Random {
                    seed: 0,
                    probabilities: vec![1.0, 0.0]
                },
                &[0.0; 4],
                2
            ),
            Err(Error::BadProbabilities(_))
        ));
        let general = validate_set(&[vec![vec![2.0]]], ValidationMode::General).unwrap();
        assert_eq!(
            run(&general, &periodic("1"), &[1.0], 1),
            Err(Error::NotStochastic)
        );
    }

    #[test]
    fn scripted_matches_periodic() {
        let set = instances::consensus_example();
        let a = run(&set, &periodic("11221"), &e(4, 3), 10).unwrap();
        let b = run(
            &set,
            &Schedule::Scripted {
                letters: a.letters_used.clone(),
            },
            &e(4, 3),
            10,
        )
        .unwrap();
        assert_eq!(a.states, b.states);
    }

    #[test]
    fn contraction_on_golden_word() {
        let set = instances::consensus_example();
        let w: Word = "11221".parse().unwrap();
        let r = contraction_check(&set, &w, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.a, 0.2);
        assert_eq!(r.column, 1);
        assert!(r.holds);
        let r = contraction_check(&set, &w, &[0.0; 4]).unwrap();
        assert_eq!((r.before, r.after), (0.0, 0.0));
        assert!(r.holds);
        // rows sum to one only up to rounding
        let r = contraction_check(&set, &w, &[3.0; 4]).unwrap();
        assert_eq!(r.before, 0.0);
        assert!(r.after < 1e-15 && r.holds);
        assert_eq!(
            contraction_check(&set, &"1".parse().unwrap(), &[0.0; 4]),
            Err(Error::NotPositiveColumn)
        );
    }

    #[test]
    fn seeded_runs_are_identical() {
        let set = instances::consensus_example();
        let x0 = [0.1, 0.9, 0.4, 0.3];
        let a = run(&set, &Schedule::uniform(42, 2), &x0, 300).unwrap();
        let b = run(&set, &Schedule::uniform(42, 2), &x0, 300).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        let c = run(&set, &Schedule::uniform(43, 2), &x0, 300).unwrap();
        assert_ne!(a.letters_used, c.letters_used);
    }

    #[test]
    fn csv_layout() {
        let set = instances::consensus_example();
        let tr = run(&set, &periodic("1"), &[0.0, 1.0, 0.5, 0.25], 1).unwrap();
        let csv = tr.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x_1,x_2,x_3,x_4,diameter"));
        let row0: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row0, vec![0.0, 0.0, 1.0, 0.5, 0.25, 1.0]);
        assert_eq!(csv.lines().count(), 3);
        assert_eq!(sig17(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn experiment_permutations_never_converge() {
        let set = instances::permutation_pair(4);
        let mut cfg = ExperimentConfig::new(&set, 20, 1);
        cfg.t_max = 500;
        let s = random_switching_experiment(&set, &cfg).unwrap();
        assert_eq!(s.successes, 0);
        assert_eq!(s.success_fraction, 0.0);
        assert!(s.quantiles.is_none());
    }

    #[test]
    fn experiment_single_letter_matches_power_iteration() {
        // one positive-column letter: every trial follows the same matrix
        let a = vec![
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 0.5],
            vec![1.0, 0.0, 0.0],
        ];
        let set = validate_set(&[a], ValidationMode::Stochastic).unwrap();
        let x0 = vec![0.0, 1.0, 0.3];
        let mut cfg = ExperimentConfig::new(&set, 10, 9);
        cfg.x0 = Some(x0.clone());
        let s = random_switching_experiment(&set, &cfg).unwrap();
        let det = run(&set, &periodic("1"), &x0, cfg.t_max).unwrap();
        let expected = det.hitting_time(cfg.eps).unwrap();
        assert!(s.hitting_times.iter().all(|&h| h == Some(expected)));
    }

    #[test]
    fn experiment_is_reproducible() {
        let set = instances::consensus_example();
        let cfg = ExperimentConfig::new(&set, 16, 5);
        let a = random_switching_experiment(&set, &cfg).unwrap();
        let b = random_switching_experiment(&set, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.success_fraction, 1.0);
    }

    #[test]
    fn push_sum_two_agents() {
        let c = vec![vec![0.5, 0.0], vec![0.5, 1.0]];
        let set = validate_set(&[c], ValidationMode::General).unwrap();
        let states = push_sum_run(&set, &periodic("1"), &[0.0, 2.0], 100).unwrap();
        let last = states.last().unwrap();
        // agent 2 collects the whole mass and reads the average
        assert!((last.estimates[1].unwrap() - 1.0).abs() < 1e-12);
        // agent 1 keeps s = 0 while its weight halves away
        assert_eq!(states[10].estimates[0], Some(0.0));
        assert_eq!(last.estimates[0], None);
        for st in &states {
            assert!((st.s.iter().sum::<f64>() - 2.0).abs() < 1e-12);
            assert!((st.w.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn push_sum_identity_is_static() {
        let set = validate_set(&[Matrix::identity(3).rows()], ValidationMode::General).unwrap();
        let states = push_sum_run(&set, &periodic("1"), &[1.0, 2.0, 3.0], 20).unwrap();
        for st in &states {
            assert_eq!(st.estimates, vec![Some(1.0), Some(2.0), Some(3.0)]);
        }
    }

    #[test]
    fn push_sum_rejects_row_stochastic() {
        let set = instances::consensus_example();
        assert!(matches!(
            push_sum_run(&set, &periodic("1"), &[0.0; 4], 1),
            Err(Error::NotColumnStochastic { .. })
        ));
        assert!(matches!(
            set.transposed(),
            Err(Error::ZeroRow { matrix: 1, row: 1 })
        ));
        let states =
            push_sum_run_transposed(&set, &periodic("11221"), &[1.0, 2.0, 3.0, 4.0], 1000).unwrap();
        for st in &states {
            assert!((st.s.iter().sum::<f64>() - 10.0).abs() <= 1e-9 * 10.0);
            assert!((st.w.iter().sum::<f64>() - 4.0).abs() <= 1e-9 * 4.0);
        }
    }

    #[test]
    fn diameter_basics() {
        assert_eq!(diameter(&[]), 0.0);
        assert_eq!(diameter(&[3.0, -1.0, 2.0]), 4.0);
        assert_eq!(default_t_max(4), 6400);
    }
}
