//! Matrix sets, words over them, and the exact zero-pattern algebra.
//!
//! All indices are 0-based in the API. Letters and states are printed
//! 1-based (`Word`'s `Display`, file formats, error messages).
//!
//! A [`Word`] stores its letters in written order `w_l … w_1`, so the
//! product of `[a, b, c]` is `A_a · A_b · A_c` and the letter applied first
//! to a state vector is the last one stored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-sum tolerance used when checking stochasticity of input data.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Dense square matrix with nonnegative entries and no zero row.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from rows, checking squareness, finiteness,
    /// nonnegativity and the absence of zero rows. Errors report the
    /// matrix as number 1.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::checked(rows, 0)
    }

    fn checked(rows: &[Vec<f64>], index: usize) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::NotSquare {
                matrix: index + 1,
                row: 0,
                expected: 0,
                found: 0,
            });
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    matrix: index + 1,
                    row: i + 1,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        matrix: index + 1,
                        row: i + 1,
                        col: j + 1,
                    });
                }
                if value < 0.0 {
                    return Err(Error::NegativeEntry {
                        matrix: index + 1,
                        row: i + 1,
                        col: j + 1,
                        value,
                    });
                }
            }
            if row.iter().all(|&v| v == 0.0) {
                return Err(Error::ZeroRow {
                    matrix: index + 1,
                    row: i + 1,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// May produce zero rows; callers that need `ℛ_n` must check.
    pub(crate) fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Matrix { n, data }
    }

    /// `self · rhs`
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let out = &mut data[i * n..(i + 1) * n];
                for (o, &b) in out.iter_mut().zip(&rhs.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        Matrix { n, data }
    }

    /// `self · x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply_into(x, &mut out);
        out
    }

    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn pattern(&self) -> ZeroPattern {
        let mut p = ZeroPattern::empty(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) > 0.0 {
                    p.set(i, j);
                }
            }
        }
        p
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j)).sum())
            .collect()
    }
}

/// `a ⪰ b`: every zero entry of `a` is also zero in `b`.
pub fn dominates(a: &Matrix, b: &Matrix) -> bool {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    a.data
        .iter()
        .zip(&b.data)
        .all(|(&x, &y)| x != 0.0 || y == 0.0)
}

/// Boolean `n×n` matrix, `true` where the underlying entry is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZeroPattern {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl ZeroPattern {
    pub fn empty(n: usize) -> Self {
        let stride = n.div_ceil(64).max(1);
        ZeroPattern {
            n,
            stride,
            bits: vec![0; n * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut p = Self::empty(n);
        for i in 0..n {
            p.set(i, i);
        }
        p
    }

    /// Pattern of a total map `state -> image`, i.e. a binary stochastic
    /// matrix with a single one per row.
    pub fn from_map(map: &[usize]) -> Self {
        let mut p = Self::empty(map.len());
        for (i, &j) in map.iter().enumerate() {
            p.set(i, j);
        }
        p
    }

    pub fn from_bools(rows: &[Vec<bool>]) -> Self {
        let mut p = Self::empty(rows.len());
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), rows.len(), "pattern must be square");
            for (j, &b) in row.iter().enumerate() {
                if b {
                    p.set(i, j);
                }
            }
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / 64] |= 1 << (j % 64);
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    /// Boolean product `self · rhs`.
    pub fn mul(&self, rhs: &ZeroPattern) -> ZeroPattern {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut out = ZeroPattern::empty(self.n);
        for i in 0..self.n {
            let dst = i * self.stride;
            for k in 0..self.n {
                if self.get(i, k) {
                    for (w, &b) in rhs.row_words(k).iter().enumerate() {
                        out.bits[dst + w] |= b;
                    }
                }
            }
        }
        out
    }

    pub fn column_positive(&self, j: usize) -> bool {
        (0..self.n).all(|i| self.get(i, j))
    }

    /// Smallest index of an all-true column.
    pub fn positive_column(&self) -> Option<usize> {
        if self.n == 0 {
            return None;
        }
        let mut acc = self.row_words(0).to_vec();
        for i in 1..self.n {
            for (a, &b) in acc.iter_mut().zip(self.row_words(i)) {
                *a &= b;
            }
        }
        acc.iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    /// Pattern-level domination: every `true` of `other` is `true` here.
    pub fn covers(&self, other: &ZeroPattern) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| b & !a == 0)
    }

    pub fn has_zero_row(&self) -> bool {
        (0..self.n).any(|i| self.row_words(i).iter().all(|&w| w == 0))
    }

    pub fn is_binary_stochastic(&self) -> bool {
        (0..self.n).all(|i| {
            self.row_words(i)
                .iter()
                .map(|w| w.count_ones())
                .sum::<u32>()
                == 1
        })
    }

    /// Positive entries of row `i`, ascending.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.get(i, j))
    }
}

impl fmt::Display for ZeroPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                f.write_str(if self.get(i, j) { "+" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Structural class a set is validated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationMode {
    General,
    Stochastic,
    Binary,
    PositiveDiagonal,
}

impl fmt::Display for ValidationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidationMode::General => "general",
            ValidationMode::Stochastic => "stochastic",
            ValidationMode::Binary => "binary",
            ValidationMode::PositiveDiagonal => "positive_diagonal",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFlags {
    pub stochastic: bool,
    pub binary_stochastic: bool,
    pub positive_diagonal: bool,
}

/// Ordered, validated set of same-dimension matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    matrices: Vec<Matrix>,
    names: Vec<String>,
    flags: ClassFlags,
}

/// Validates raw arrays and builds a [`MatrixSet`].
///
/// Every set must live in `ℛ_n` (nonnegative, no zero row). The requested
/// mode adds its own requirement on top. Class flags are computed for all
/// three classes regardless of the mode.
pub fn validate_set(raw: &[Vec<Vec<f64>>], mode: ValidationMode) -> Result<MatrixSet> {
    if raw.is_empty() {
        return Err(Error::EmptySet);
    }
    let matrices = raw
        .iter()
        .enumerate()
        .map(|(k, rows)| Matrix::checked(rows, k))
        .collect::<Result<Vec<_>>>()?;
    let names = (1..=matrices.len()).map(|k| format!("A{k}")).collect();
    MatrixSet::with_names(matrices, names, mode)
}

impl MatrixSet {
    /// Builds a set from already constructed matrices and checks `mode`.
    pub fn with_names(
        matrices: Vec<Matrix>,
        names: Vec<String>,
        mode: ValidationMode,
    ) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::EmptySet);
        }
        assert_eq!(matrices.len(), names.len(), "one name per matrix");
        let n = matrices[0].dim();
        for (k, a) in matrices.iter().enumerate() {
            if a.dim() != n {
                return Err(Error::DimensionMismatch {
                    matrix: k + 1,
                    expected: n,
                    found: a.dim(),
                });
            }
        }
        match mode {
            ValidationMode::General => {}
            ValidationMode::Stochastic => check_stochastic(&matrices)?,
            ValidationMode::Binary => check_binary(&matrices)?,
            ValidationMode::PositiveDiagonal => check_diagonal(&matrices)?,
        }
        let flags = ClassFlags {
            stochastic: check_stochastic(&matrices).is_ok(),
            binary_stochastic: check_binary(&matrices).is_ok(),
            positive_diagonal: check_diagonal(&matrices).is_ok(),
        };
        Ok(MatrixSet {
            matrices,
            names,
            flags,
        })
    }

    pub fn new(matrices: Vec<Matrix>, mode: ValidationMode) -> Result<Self> {
        let names = (1..=matrices.len()).map(|k| format!("A{k}")).collect();
        Self::with_names(matrices, names, mode)
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn flags(&self) -> ClassFlags {
        self.flags
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn matrix(&self, letter: usize) -> &Matrix {
        &self.matrices[letter]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn patterns(&self) -> Vec<ZeroPattern> {
        self.matrices.iter().map(Matrix::pattern).collect()
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        match word.letters().iter().find(|&&k| k >= self.len()) {
            Some(&k) => Err(Error::InvalidLetter {
                letter: k + 1,
                m: self.len(),
            }),
            None => Ok(()),
        }
    }

    /// Same matrices, transposed. Validation mode is `General`.
    pub fn transposed(&self) -> Result<MatrixSet> {
        let ts: Vec<Matrix> = self.matrices.iter().map(Matrix::transpose).collect();
        for (k, t) in ts.iter().enumerate() {
            if let Some(i) = (0..t.dim()).find(|&i| t.row(i).iter().all(|&v| v == 0.0)) {
                return Err(Error::ZeroRow {
                    matrix: k + 1,
                    row: i + 1,
                });
            }
        }
        Self::with_names(ts, self.names.clone(), ValidationMode::General)
    }
}

fn check_stochastic(ms: &[Matrix]) -> Result<()> {
    for (k, a) in ms.iter().enumerate() {
        for (i, sum) in a.row_sums().into_iter().enumerate() {
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowSumViolation {
                    matrix: k + 1,
                    row: i + 1,
                    sum,
                });
            }
        }
    }
    Ok(())
}

fn check_binary(ms: &[Matrix]) -> Result<()> {
    for (k, a) in ms.iter().enumerate() {
        for i in 0..a.dim() {
            let mut ones = 0;
            for (j, &v) in a.row(i).iter().enumerate() {
                if v == 1.0 {
                    ones += 1;
                } else if v != 0.0 {
                    return Err(Error::NonBinaryEntry {
                        matrix: k + 1,
                        row: i + 1,
                        col: j + 1,
                        value: v,
                    });
                }
            }
            if ones != 1 {
                return Err(Error::NotBinaryStochastic {
                    matrix: k + 1,
                    row: i + 1,
                    ones,
                });
            }
        }
    }
    Ok(())
}

fn check_diagonal(ms: &[Matrix]) -> Result<()> {
    for (k, a) in ms.iter().enumerate() {
        if let Some(i) = (0..a.dim()).find(|&i| a.get(i, i) <= 0.0) {
            return Err(Error::ZeroDiagonal {
                matrix: k + 1,
                index: i + 1,
            });
        }
    }
    Ok(())
}

/// Finite sequence of letters in written order `w_l … w_1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    /// From 1-based letters, as written in the literature.
    pub fn from_one_based(letters: &[usize]) -> Result<Self> {
        letters
            .iter()
            .map(|&k| k.checked_sub(1).ok_or_else(|| Error::BadWord("0".into())))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letters in the order they act on a state vector: `w_1` first.
    pub fn application_order(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().rev().copied()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|k| k + 1).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self.0.iter().all(|&k| k < 9);
        for (t, k) in self.0.iter().enumerate() {
            if !compact && t > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        Ok(())
    }
}

/// Parses `11221` (single-digit letters) or `1,1,2,2,10` (comma or space
/// separated), both 1-based.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadWord(s.to_string());
        let letters: Vec<usize> = if s.contains([',', ' ']) {
            s.split([',', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        if letters.contains(&0) {
            return Err(bad());
        }
        Word::from_one_based(&letters)
    }
}

/// Numeric product `A_{w_l} ⋯ A_{w_1}`. The empty word gives the identity.
pub fn product(word: &Word, set: &MatrixSet) -> Result<Matrix> {
    set.check_word(word)?;
    let mut letters = word.letters().iter();
    let Some(&first) = letters.next() else {
        return Ok(Matrix::identity(set.dim()));
    };
    Ok(letters.fold(set.matrix(first).clone(), |acc, &k| acc.mul(set.matrix(k))))
}

/// Zero pattern of [`product`], computed in boolean arithmetic.
pub fn pattern_product(word: &Word, set: &MatrixSet) -> Result<ZeroPattern> {
    set.check_word(word)?;
    let patterns = set.patterns();
    Ok(pattern_product_of(word.letters(), &patterns, set.dim()))
}

pub(crate) fn pattern_product_of(
    letters: &[usize],
    patterns: &[ZeroPattern],
    n: usize,
) -> ZeroPattern {
    let mut letters = letters.iter();
    let Some(&first) = letters.next() else {
        return ZeroPattern::identity(n);
    };
    letters.fold(patterns[first].clone(), |acc, &k| acc.mul(&patterns[k]))
}

/// Smallest all-positive column of a pattern.
pub fn positive_column(p: &ZeroPattern) -> Option<usize> {
    p.positive_column()
}

/// On-disk matrix-set document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSetFile {
    pub n: usize,
    pub mode: ValidationMode,
    pub matrices: Vec<NamedMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixSetFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::BadFile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// Validates the document against its declared dimension and mode.
    pub fn into_set(self) -> Result<MatrixSet> {
        if self.matrices.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut ms = Vec::with_capacity(self.matrices.len());
        let mut names = Vec::with_capacity(self.matrices.len());
        for (k, nm) in self.matrices.into_iter().enumerate() {
            let a = Matrix::checked(&nm.rows, k)?;
            if a.dim() != self.n {
                return Err(Error::DimensionMismatch {
                    matrix: k + 1,
                    expected: self.n,
                    found: a.dim(),
                });
            }
            ms.push(a);
            names.push(nm.name);
        }
        MatrixSet::with_names(ms, names, self.mode)
    }

    pub fn from_set(set: &MatrixSet, mode: ValidationMode) -> Self {
        MatrixSetFile {
            n: set.dim(),
            mode,
            matrices: set
                .matrices()
                .iter()
                .zip(set.names())
                .map(|(a, name)| NamedMatrix {
                    name: name.clone(),
                    rows: a.rows(),
                })
                .collect(),
        }
    }
}
