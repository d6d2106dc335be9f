//! Positive-column word synthesis.
//!
//! Three routes to a certificate:
//! * [`synthesize_word`]: greedy pair merging along shortest paths of the
//!   digraph of pairs, recording a binary selection for every position.
//! * [`shortest_word_bruteforce`]: breadth-first search over reachable zero
//!   patterns; exact minimum length, exponential in `n`.
//! * [`intree_decide`]: for sets with positive diagonals, a word of length
//!   at most `n − 1` read off a rooted tree of the union digraph.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matset::{dominates, pattern_product, Matrix, MatrixSet, Word, ZeroPattern};
use crate::pairs::{decide_column_primitive, union_pattern, PairDigraph, PairNode};

/// Word-length bounds for an `n`-state set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LengthBounds {
    /// `(n³ − n) / 6`, proven for every column-primitive set.
    pub pin_frankl: u64,
    /// `(n − 1)²`, conjectured.
    pub cerny_conjecture: u64,
    /// `(n − 1)·(n(n+1)/2 − 1)`, what [`synthesize_word`] guarantees.
    pub greedy_guarantee: u64,
}

pub fn length_bounds(n: usize) -> LengthBounds {
    assert!(n >= 1, "dimension must be positive");
    let n = n as u64;
    LengthBounds {
        pin_frankl: (n * n * n - n) / 6,
        cerny_conjecture: (n - 1) * (n - 1),
        greedy_guarantee: (n - 1) * (n * (n + 1) / 2 - 1),
    }
}

/// One binary stochastic map per word position, in written order.
/// `maps[t][i]` is the image of state `i` under position `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionSequence {
    pub maps: Vec<Vec<usize>>,
}

impl SelectionSequence {
    /// Boolean product of the selections, as a zero pattern.
    pub fn product(&self, n: usize) -> ZeroPattern {
        let mut image: Vec<usize> = (0..n).collect();
        for map in &self.maps {
            for x in image.iter_mut() {
                *x = map[*x];
            }
        }
        ZeroPattern::from_map(&image)
    }

    /// Each selection is dominated by its letter's matrix.
    pub fn dominated_by(&self, word: &Word, set: &MatrixSet) -> bool {
        self.maps.len() == word.len()
            && self.maps.iter().zip(word.letters()).all(|(map, &k)| {
                let sel = selection_matrix(map);
                dominates(set.matrix(k), &sel)
            })
    }
}

fn selection_matrix(map: &[usize]) -> Matrix {
    let n = map.len();
    let rows: Vec<Vec<f64>> = map
        .iter()
        .map(|&j| {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            row
        })
        .collect();
    Matrix::from_rows(&rows).expect("selection rows have a single one")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    pub word: Word,
    pub column: usize,
    pub selections: SelectionSequence,
    pub length_bound_used: u64,
}

impl SynthesisResult {
    /// Re-checks the certificate against the set: the word's product has a
    /// positive `column`, and the selections are dominated binary maps whose
    /// composition sends every state to `column`.
    pub fn verify(&self, set: &MatrixSet) -> bool {
        let Ok(p) = pattern_product(&self.word, set) else {
            return false;
        };
        let sel = self.selections.product(set.dim());
        p.column_positive(self.column)
            && sel.column_positive(self.column)
            && self.selections.dominated_by(&self.word, set)
    }
}

/// Greedy synthesis: repeatedly merge the two smallest active states along
/// a stored shortest path of the digraph of pairs.
pub fn synthesize_word(set: &MatrixSet, g: &PairDigraph) -> Result<SynthesisResult> {
    let decision = decide_column_primitive(g);
    if !decision.is_column_primitive() {
        return Err(Error::NotColumnPrimitive);
    }
    let n = set.dim();
    let patterns = set.patterns();
    let first_successor: Vec<Vec<usize>> = patterns
        .iter()
        .map(|p| {
            (0..n)
                .map(|i| p.successors(i).next().expect("no zero row"))
                .collect()
        })
        .collect();

    let mut active: Vec<usize> = (0..n).collect();
    let mut letters = Vec::new();
    let mut maps = Vec::new();

    while active.len() > 1 {
        let pair = PairNode::new(active[0], active[1]);
        let path = decision
            .merging_path(g, pair)
            .expect("column-primitive sets merge every pair");
        let (mut a, mut b) = (pair.lo, pair.hi);
        for step in path {
            let k = step.letter;
            let pat = &patterns[k];
            let (c, d) = (step.to.lo, step.to.hi);
            let (ta, tb) = if pat.get(a, c) && pat.get(b, d) {
                (c, d)
            } else {
                debug_assert!(pat.get(a, d) && pat.get(b, c));
                (d, c)
            };
            let mut map = first_successor[k].clone();
            map[a] = ta;
            map[b] = tb;
            active = image(&active, &map);
            letters.push(k);
            maps.push(map);
            (a, b) = (ta, tb);
        }
    }

    if letters.is_empty() {
        // n = 1: any single letter is positive-column.
        letters.push(0);
        maps.push(first_successor[0].clone());
    }

    Ok(SynthesisResult {
        word: Word::new(letters),
        column: active[0],
        selections: SelectionSequence { maps },
        length_bound_used: length_bounds(n).greedy_guarantee.max(1),
    })
}

fn image(states: &[usize], map: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = states.iter().map(|&s| map[s]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Extracts a selection sequence from any word whose product has a positive
/// `column`: each state follows an entry that still leads to `column`.
pub fn extract_selections(
    set: &MatrixSet,
    word: &Word,
    column: usize,
) -> Option<SelectionSequence> {
    set.check_word(word).ok()?;
    let n = set.dim();
    let patterns = set.patterns();
    let letters = word.letters();
    // reach[t]: states that reach `column` through letters t.. (written order)
    let mut reach = vec![vec![false; n]; letters.len() + 1];
    reach[letters.len()][column] = true;
    for t in (0..letters.len()).rev() {
        let pat = &patterns[letters[t]];
        for i in 0..n {
            reach[t][i] = pat.successors(i).any(|j| reach[t + 1][j]);
        }
    }
    if !reach[0].iter().all(|&r| r) {
        return None;
    }
    let maps = letters
        .iter()
        .enumerate()
        .map(|(t, &k)| {
            let pat = &patterns[k];
            (0..n)
                .map(|i| {
                    pat.successors(i)
                        .find(|&j| reach[t + 1][j])
                        .or_else(|| pat.successors(i).next())
                        .expect("no zero row")
                })
                .collect()
        })
        .collect();
    Some(SelectionSequence { maps })
}

/// Default dimension above which an uncapped brute-force search is refused.
pub const BRUTE_FORCE_MAX_DIM: usize = 6;
/// Default cap on the number of distinct patterns held by the search.
pub const BRUTE_FORCE_MAX_PATTERNS: usize = 1 << 22;

#[derive(Debug, Clone, Copy)]
pub struct BruteForceOptions {
    pub max_len: Option<usize>,
    pub max_patterns: usize,
    pub max_dim: usize,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions {
            max_len: None,
            max_patterns: BRUTE_FORCE_MAX_PATTERNS,
            max_dim: BRUTE_FORCE_MAX_DIM,
        }
    }
}

/// Minimum-length positive-column word with default limits.
pub fn shortest_word_bruteforce(
    set: &MatrixSet,
    max_len: Option<usize>,
) -> Result<Option<(Word, usize)>> {
    shortest_word_with(
        set,
        BruteForceOptions {
            max_len,
            ..Default::default()
        },
    )
}

/// Breadth-first search over zero patterns of products, extended one letter
/// at a time on the right and deduplicated by pattern. Returns the first
/// positive-column word found (shortest; ties go to the smallest letters),
/// with the smallest positive column of its product.
pub fn shortest_word_with(
    set: &MatrixSet,
    opts: BruteForceOptions,
) -> Result<Option<(Word, usize)>> {
    let n = set.dim();
    if opts.max_len.is_none() && n > opts.max_dim {
        return Err(Error::BudgetExceeded(format!(
            "dimension {n} exceeds {} for an unbounded search",
            opts.max_dim
        )));
    }
    if opts.max_len == Some(0) {
        return Ok(None);
    }
    let patterns = set.patterns();
    // (parent node, letter)
    let mut tree: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashMap<ZeroPattern, ()> = HashMap::new();
    let mut queue: VecDeque<(usize, usize, ZeroPattern)> = VecDeque::new();

    let word_of = |tree: &[(usize, usize)], mut v: usize| {
        let mut letters = Vec::new();
        loop {
            let (parent, k) = tree[v];
            letters.push(k);
            if parent == usize::MAX {
                break;
            }
            v = parent;
        }
        letters.reverse();
        Word::new(letters)
    };

    for (k, p) in patterns.iter().enumerate() {
        if seen.contains_key(p) {
            continue;
        }
        tree.push((usize::MAX, k));
        if let Some(col) = p.positive_column() {
            return Ok(Some((word_of(&tree, tree.len() - 1), col)));
        }
        seen.insert(p.clone(), ());
        queue.push_back((tree.len() - 1, 1, p.clone()));
    }

    while let Some((v, len, p)) = queue.pop_front() {
        if opts.max_len.is_some_and(|m| len >= m) {
            continue;
        }
        for (k, a) in patterns.iter().enumerate() {
            let q = p.mul(a);
            if seen.contains_key(&q) {
                continue;
            }
            tree.push((v, k));
            if let Some(col) = q.positive_column() {
                return Ok(Some((word_of(&tree, tree.len() - 1), col)));
            }
            if seen.len() >= opts.max_patterns {
                return Err(Error::StateSpaceExceeded(opts.max_patterns));
            }
            seen.insert(q.clone(), ());
            queue.push_back((tree.len() - 1, len + 1, q));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InTreeOutcome {
    /// `word` has a positive column `root` and length at most `n − 1`.
    Yes {
        word: Word,
        root: usize,
    },
    No,
}

/// Decision for sets with positive diagonals via the union digraph.
///
/// Edges are read in influence direction (`j → i` when some `(A_k)_{ij} > 0`);
/// a root reaching every vertex is a column that can be made positive. The
/// smallest such root is used. Letters are chosen along a breadth-first tree
/// from the root; the positive diagonal keeps every earlier gain, so each
/// letter adds at least one state to the support of the root column.
pub fn intree_decide(set: &MatrixSet) -> Result<InTreeOutcome> {
    if !set.flags().positive_diagonal {
        return Err(Error::NotPositiveDiagonal);
    }
    let n = set.dim();
    let union = union_pattern(set);
    let patterns = set.patterns();

    for root in 0..n {
        let mut order = vec![root];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut parent = vec![usize::MAX; n];
        let mut head = 0;
        while head < order.len() {
            let j = order[head];
            head += 1;
            for i in 0..n {
                if !seen[i] && union.get(i, j) {
                    seen[i] = true;
                    parent[i] = j;
                    order.push(i);
                }
            }
        }
        if order.len() < n {
            continue;
        }

        let mut support = vec![false; n];
        support[root] = true;
        let mut applied = Vec::new();
        for &i in &order[1..] {
            if support[i] {
                continue;
            }
            let k = (0..set.len())
                .find(|&k| patterns[k].get(i, parent[i]))
                .expect("tree edge comes from some letter");
            let pat = &patterns[k];
            support = (0..n)
                .map(|x| pat.successors(x).any(|y| support[y]))
                .collect();
            applied.push(k);
        }
        applied.reverse();
        let word = Word::new(applied);
        let check = pattern_product(&word, set)?;
        assert!(
            check.column_positive(root),
            "in-tree word lost its root column"
        );
        return Ok(InTreeOutcome::Yes { word, root });
    }
    Ok(InTreeOutcome::No)
}

/// Certificate document emitted by the CLI. Letters and column are 1-based;
/// `word` is in written order, so its last letter acts first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub decision: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    pub bounds: LengthBounds,
}

impl Witness {
    pub fn yes(word: &Word, column: usize, n: usize) -> Self {
        Witness {
            decision: "yes",
            word: Some(word.one_based()),
            column: Some(column + 1),
            length: Some(word.len()),
            bounds: length_bounds(n),
        }
    }

    pub fn no(n: usize) -> Self {
        Witness {
            decision: "no",
            word: None,
            column: None,
            length: None,
            bounds: length_bounds(n),
        }
    }
}
