//! 3-SAT to shortest positive-column word.
//!
//! For a formula with `v` variables and `c` clauses, every literal gets a
//! `(1+v+c)`-dimensional matrix: identity plus ones in the first column at
//! the literal's variable row and at the rows of the clauses it satisfies.
//! The formula is satisfiable iff the set has a positive-column word of
//! length at most `v`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matset::{pattern_product, product, Matrix, MatrixSet, ValidationMode, Word};
use crate::synth::shortest_word_bruteforce;

/// Largest variable count accepted by the exhaustive satisfiability check.
pub const MAX_EXHAUSTIVE_VARS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn holds(&self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }

    /// Letter of this literal in the reduction: `X_1, ¬X_1, X_2, …`.
    pub fn letter(&self) -> usize {
        2 * self.var + usize::from(!self.positive)
    }

    pub fn from_letter(letter: usize) -> Self {
        Literal {
            var: letter / 2,
            positive: letter.is_multiple_of(2),
        }
    }

    fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "X{}", self.var + 1)
        } else {
            write!(f, "~X{}", self.var + 1)
        }
    }
}

pub type Clause = [Literal; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    vars: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        if vars == 0 {
            return Err(Error::MalformedDimacs {
                line: 0,
                reason: "formula has no variables".into(),
            });
        }
        if let Some(bad) = clauses.iter().flatten().find(|l| l.var >= vars) {
            return Err(Error::MalformedDimacs {
                line: 0,
                reason: format!("variable {} exceeds {vars}", bad.var + 1),
            });
        }
        Ok(CnfFormula { vars, clauses })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.holds(assignment)))
    }

    /// First satisfying assignment in binary counting order (variable 1 is
    /// the least significant bit), or `None`.
    pub fn solve_exhaustive(&self) -> Result<Option<Vec<bool>>> {
        if self.vars > MAX_EXHAUSTIVE_VARS {
            return Err(Error::BudgetExceeded(format!(
                "{} variables exceeds the exhaustive limit of {MAX_EXHAUSTIVE_VARS}",
                self.vars
            )));
        }
        Ok((0u32..1 << self.vars)
            .map(|mask| {
                (0..self.vars)
                    .map(|i| mask >> i & 1 == 1)
                    .collect::<Vec<_>>()
            })
            .find(|a| self.satisfied_by(a)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&l.to_dimacs().to_string());
                s.push(' ');
            }
            s.push_str("0\n");
        }
        s
    }
}

/// Parses DIMACS CNF. Clauses shorter than three literals are padded by
/// repeating their last literal; longer ones are rejected.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let malformed = |line: usize, reason: &str| Error::MalformedDimacs {
        line,
        reason: reason.to_string(),
    };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(malformed(line_no, "duplicate problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(malformed(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let vars = parts[2]
                .parse()
                .map_err(|_| malformed(line_no, "bad variable count"))?;
            let count = parts[3]
                .parse()
                .map_err(|_| malformed(line_no, "bad clause count"))?;
            if vars == 0 {
                return Err(malformed(line_no, "formula has no variables"));
            }
            header = Some((vars, count));
            continue;
        }
        let (vars, _) = header.ok_or_else(|| malformed(line_no, "clause before problem line"))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| malformed(line_no, &format!("bad literal `{tok}`")))?;
            if lit == 0 {
                let clause = match current.len() {
                    0 => return Err(malformed(line_no, "empty clause")),
                    1 => [current[0]; 3],
                    2 => [current[0], current[1], current[1]],
                    3 => [current[0], current[1], current[2]],
                    _ => return Err(Error::ClauseTooWide(clauses.len() + 1)),
                };
                clauses.push(clause);
                current.clear();
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > vars {
                return Err(malformed(
                    line_no,
                    &format!("variable {var} exceeds {vars}"),
                ));
            }
            current.push(Literal {
                var: var - 1,
                positive: lit > 0,
            });
            if current.len() > 3 {
                return Err(Error::ClauseTooWide(clauses.len() + 1));
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| malformed(last_line, "missing problem line"))?;
    if !current.is_empty() {
        return Err(malformed(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(malformed(
            last_line,
            &format!("header declares {count} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(vars, clauses)
}

/// Matrices of the reduction and the literal behind each letter.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionSet {
    pub set: MatrixSet,
    pub letter_map: Vec<Literal>,
    pub vars: usize,
    pub clauses: usize,
}

impl ReductionSet {
    /// First-column entries below row 1 of a letter's matrix.
    pub fn tail(&self, letter: usize) -> Vec<f64> {
        first_column_tail(self.set.matrix(letter))
    }

    /// Sidecar `{letter: {"var": i, "polarity": bool}}`, 1-based.
    pub fn letter_map_json(&self) -> String {
        let map: BTreeMap<usize, LetterInfo> = self
            .letter_map
            .iter()
            .enumerate()
            .map(|(k, l)| {
                (
                    k + 1,
                    LetterInfo {
                        var: l.var + 1,
                        polarity: l.positive,
                    },
                )
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&map).expect("serializable");
        s.push('\n');
        s
    }

    /// Word of one literal per variable, in variable order.
    pub fn assignment_word(&self, assignment: &[bool]) -> Word {
        Word::new(
            assignment
                .iter()
                .enumerate()
                .map(|(var, &positive)| Literal { var, positive }.letter())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterInfo {
    pub var: usize,
    pub polarity: bool,
}

pub fn first_column_tail(a: &Matrix) -> Vec<f64> {
    (1..a.dim()).map(|i| a.get(i, 0)).collect()
}

pub fn reduce(formula: &CnfFormula) -> ReductionSet {
    let v = formula.vars();
    let c = formula.clauses().len();
    let n = 1 + v + c;
    let mut matrices = Vec::with_capacity(2 * v);
    let mut names = Vec::with_capacity(2 * v);
    let mut letter_map = Vec::with_capacity(2 * v);
    for var in 0..v {
        for positive in [true, false] {
            let lit = Literal { var, positive };
            let mut rows = Matrix::identity(n).rows();
            rows[1 + var][0] = 1.0;
            for (j, clause) in formula.clauses().iter().enumerate() {
                if clause.contains(&lit) {
                    rows[1 + v + j][0] = 1.0;
                }
            }
            matrices.push(Matrix::from_rows(&rows).expect("identity plus ones"));
            names.push(lit.to_string());
            letter_map.push(lit);
        }
    }
    let set = MatrixSet::with_names(matrices, names, ValidationMode::PositiveDiagonal)
        .expect("reduction matrices have unit diagonals");
    ReductionSet {
        set,
        letter_map,
        vars: v,
        clauses: c,
    }
}

/// Row `i` of the product's first column is positive iff some factor has a
/// positive `(i, 1)` entry.
pub fn claim1_check(rs: &ReductionSet, word: &Word) -> bool {
    let Ok(p) = product(word, &rs.set) else {
        return false;
    };
    (0..p.dim()).all(|i| {
        let in_product = p.get(i, 0) > 0.0;
        let in_factor = word
            .letters()
            .iter()
            .any(|&k| rs.set.matrix(k).get(i, 0) > 0.0);
        in_product == in_factor
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionCheck {
    pub sat: bool,
    /// First satisfying assignment found, if any.
    pub assignment: Option<Vec<bool>>,
    pub short_word_exists: bool,
    /// 1-based letters of a shortest positive-column word of length ≤ v.
    pub short_word: Option<Vec<usize>>,
    pub agree: bool,
    /// The assignment's one-literal-per-variable word is positive-column.
    pub assignment_word_ok: Option<bool>,
    /// Literals read off the short word satisfy the formula.
    pub extracted_assignment_ok: Option<bool>,
}

impl ReductionCheck {
    /// Both directions hold and agree.
    pub fn passed(&self) -> bool {
        self.agree
            && self.assignment_word_ok.unwrap_or(true)
            && self.extracted_assignment_ok.unwrap_or(true)
    }
}

/// Cross-checks satisfiability (exhaustive) against the existence of a
/// positive-column word of length at most `v` (breadth-first search).
pub fn verify_reduction(formula: &CnfFormula) -> Result<ReductionCheck> {
    let assignment = formula.solve_exhaustive()?;
    let rs = reduce(formula);
    let short = shortest_word_bruteforce(&rs.set, Some(formula.vars()))?;

    let assignment_word_ok = assignment.as_ref().map(|a| {
        let w = rs.assignment_word(a);
        w.len() == formula.vars()
            && pattern_product(&w, &rs.set).is_ok_and(|p| p.column_positive(0))
    });
    let extracted_assignment_ok = short.as_ref().map(|(w, col)| {
        let mut chosen: Vec<Option<bool>> = vec![None; formula.vars()];
        for &k in w.letters() {
            let lit = Literal::from_letter(k);
            chosen[lit.var].get_or_insert(lit.positive);
        }
        *col == 0
            && chosen
                .into_iter()
                .collect::<Option<Vec<bool>>>()
                .is_some_and(|a| formula.satisfied_by(&a))
    });

    Ok(ReductionCheck {
        sat: assignment.is_some(),
        short_word_exists: short.is_some(),
        agree: assignment.is_some() == short.is_some(),
        short_word: short.map(|(w, _)| w.one_based()),
        assignment,
        assignment_word_ok,
        extracted_assignment_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "p cnf 3 3\n-1 -2 -3 0\n1 2 3 0\n-1 2 -3 0\n";

    fn lit(v: i64) -> Literal {
        Literal {
            var: v.unsigned_abs() as usize - 1,
            positive: v > 0,
        }
    }

    #[test]
    fn parse_example() {
        let f = parse_dimacs(EXAMPLE).unwrap();
        assert_eq!(f.vars(), 3);
        assert_eq!(
            f.clauses(),
            &[
                [lit(-1), lit(-2), lit(-3)],
                [lit(1), lit(2), lit(3)],
                [lit(-1), lit(2), lit(-3)]
            ]
        );
        assert_eq!(parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn parse_padding_and_comments() {
        let f = parse_dimacs("c tiny\np cnf 1 1\n1 1 1 0\n").unwrap();
        assert_eq!(f.clauses(), &[[lit(1); 3]]);
        let f = parse_dimacs("p cnf 2 2\n1 0\n-1\n 2 0\n%\n0\n").unwrap();
        assert_eq!(f.clauses(), &[[lit(1); 3], [lit(-1), lit(2), lit(2)]]);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_dimacs("p cnf 4 1\n1 2 3 4 0\n"),
            Err(Error::ClauseTooWide(1))
        );
        assert!(matches!(
            parse_dimacs("1 2 3 0\n"),
            Err(Error::MalformedDimacs { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(Error::MalformedDimacs { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 2\n1 2 0\n"),
            Err(Error::MalformedDimacs { .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 x 0\n"),
            Err(Error::MalformedDimacs { .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 2\n"),
            Err(Error::MalformedDimacs { .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n0\n"),
            Err(Error::MalformedDimacs { .. })
        ));
        assert!(matches!(
            parse_dimacs(""),
            Err(Error::MalformedDimacs { .. })
        ));
    }

    #[test]
    fn example_vectors() {
        let rs = reduce(&parse_dimacs(EXAMPLE).unwrap());
        assert_eq!(rs.set.len(), 6);
        assert_eq!(rs.set.dim(), 7);
        assert!(rs.set.flags().positive_diagonal);
        assert!(!rs.set.flags().stochastic);
        let expected: [[f64; 6]; 6] = [
            [1., 0., 0., 0., 1., 0.],
            [1., 0., 0., 1., 0., 1.],
            [0., 1., 0., 0., 1., 1.],
            [0., 1., 0., 1., 0., 0.],
            [0., 0., 1., 0., 1., 0.],
            [0., 0., 1., 1., 0., 1.],
        ];
        for (k, tail) in expected.iter().enumerate() {
            assert_eq!(rs.tail(k), tail.to_vec(), "letter {}", rs.letter_map[k]);
        }
        // ¬X1 · X2 · ¬X3
        let w = Word::new(vec![1, 2, 5]);
        let p = product(&w, &rs.set).unwrap();
        assert_eq!(first_column_tail(&p), vec![1., 1., 1., 2., 1., 3.]);
        assert!(claim1_check(&rs, &w));
        assert!(pattern_product(&w, &rs.set).unwrap().column_positive(0));
    }

    #[test]
    fn no_clause_reduction() {
        let rs = reduce(&CnfFormula::new(1, vec![]).unwrap());
        assert_eq!(rs.set.len(), 2);
        for k in 0..2 {
            assert_eq!(
                rs.set.matrix(k).rows(),
                vec![vec![1.0, 0.0], vec![1.0, 1.0]]
            );
        }
    }

    #[test]
    fn letter_order_and_map() {
        let rs = reduce(&parse_dimacs(EXAMPLE).unwrap());
        let names: Vec<_> = rs.set.names().to_vec();
        assert_eq!(names, ["X1", "~X1", "X2", "~X2", "X3", "~X3"]);
        let json: serde_json::Value = serde_json::from_str(&rs.letter_map_json()).unwrap();
        assert_eq!(json["2"], serde_json::json!({"var": 1, "polarity": false}));
        assert_eq!(json["5"], serde_json::json!({"var": 3, "polarity": true}));
    }

    #[test]
    fn verify_example() {
        let r = verify_reduction(&parse_dimacs(EXAMPLE).unwrap()).unwrap();
        assert!(r.sat && r.short_word_exists && r.agree && r.passed());
        assert_eq!(r.short_word.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn verify_unsat_one_variable() {
        let f = parse_dimacs("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n").unwrap();
        let r = verify_reduction(&f).unwrap();
        assert!(!r.sat);
        assert!(!r.short_word_exists);
        assert!(r.agree && r.passed());
    }

    #[test]
    fn verify_empty_formula() {
        let f = CnfFormula::new(1, vec![]).unwrap();
        let r = verify_reduction(&f).unwrap();
        assert!(r.sat && r.agree);
        assert_eq!(r.short_word, Some(vec![1]));
    }

    #[test]
    fn exhaustive_limit() {
        let f = CnfFormula::new(13, vec![]).unwrap();
        assert!(matches!(
            verify_reduction(&f),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
