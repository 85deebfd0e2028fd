//! Magic squares and the operator norms `||S||_{q→p}` they induce.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GlsError, Result};
use crate::measure::{Exponent, MeasureSpace};
use crate::opnorm::{op_norm_oracle, MatrixOperator};

const LINE_TOLERANCE: f64 = 1e-12;
/// Relative gap below which an oracle value counts as matching the formula.
pub const MATCH_TOLERANCE: f64 = 1e-3;

/// Nonnegative `n×n` matrix whose rows, columns and both diagonals sum to `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagicSquare {
    n: usize,
    entries: Vec<Vec<f64>>,
    alpha: f64,
}

impl MagicSquare {
    /// Validates `entries`; fails with [`GlsError::NotMagic`] on the first bad line.
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let report = validate_magic(&entries)?;
        if !report.pass {
            return Err(GlsError::NotMagic(report.first_failure()));
        }
        Ok(Self {
            n: entries.len(),
            alpha: report.alpha,
            entries,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let entries = (0..self.n).map(|j| (0..self.n).map(|i| self.entries[i][j]).collect()).collect();
        Self { entries, ..*self }
    }

    /// The square as an operator on `n` points weighted according to `convention`.
    pub fn operator(&self, convention: Convention) -> MatrixOperator {
        let space = convention.space(self.n);
        MatrixOperator::new(self.entries.clone(), space.clone(), space).expect("square of matching size")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SquareDoc = serde_json::from_str(text)?;
        Self::new(doc.entries)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SquareDoc {
            entries: self.entries.clone(),
        })
        .expect("plain numbers serialize")
    }
}

/// `{"entries":[[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareDoc {
    pub entries: Vec<Vec<f64>>,
}

pub fn make_uniform_magic(n: usize, alpha: f64) -> Result<MagicSquare> {
    if n == 0 {
        return Err(GlsError::InvalidParameter {
            name: "n",
            reason: "must be at least 1".into(),
        });
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(GlsError::InvalidParameter {
            name: "alpha",
            reason: format!("must be positive, got {alpha}"),
        });
    }
    Ok(MagicSquare {
        n,
        entries: vec![vec![alpha / n as f64; n]; n],
        alpha,
    })
}

/// Odd-order square filled with `1..n²` by the up-right rule, stepping down
/// when the target cell is taken.
pub fn make_siamese(n: usize) -> Result<MagicSquare> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(GlsError::InvalidParameter {
            name: "n",
            reason: format!("Siamese construction needs odd n >= 3, got {n}"),
        });
    }
    let mut m = vec![vec![0.0; n]; n];
    let (mut i, mut j) = (0, n / 2);
    for k in 1..=n * n {
        m[i][j] = k as f64;
        let (ni, nj) = ((i + n - 1) % n, (j + 1) % n);
        if m[ni][nj] == 0.0 {
            (i, j) = (ni, nj);
        } else {
            i = (i + 1) % n;
        }
    }
    MagicSquare::new(m)
}

/// Order `4k`: row-major `1..n²` with cells on the diagonals of each 4×4
/// block replaced by their complement `n² + 1 - v`.
pub fn make_doubly_even(n: usize) -> Result<MagicSquare> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(GlsError::InvalidParameter {
            name: "n",
            reason: format!("doubly-even construction needs n divisible by 4, got {n}"),
        });
    }
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = (i * n + j + 1) as f64;
                    let (a, b) = (i % 4, j % 4);
                    if a == b || a + b == 3 {
                        (n * n + 1) as f64 - v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    MagicSquare::new(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Line {
    Row(usize),
    Column(usize),
    Diagonal,
    AntiDiagonal,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::Row(i) => write!(f, "row {i}"),
            Line::Column(j) => write!(f, "column {j}"),
            Line::Diagonal => f.write_str("diagonal"),
            Line::AntiDiagonal => f.write_str("anti-diagonal"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineCheck {
    pub line: Line,
    pub sum: f64,
    pub deviation: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagicReport {
    pub pass: bool,
    /// Reference line sum (first row).
    pub alpha: f64,
    pub lines: Vec<LineCheck>,
    /// `(row, column)` of every negative entry.
    pub negative_entries: Vec<(usize, usize)>,
}

impl MagicReport {
    fn first_failure(&self) -> String {
        if let Some(&(i, j)) = self.negative_entries.first() {
            return format!("negative entry at ({i}, {j})");
        }
        match self.lines.iter().find(|l| !l.ok) {
            Some(l) => format!("{} sums to {} instead of {}", l.line, l.sum, self.alpha),
            None => "passes".into(),
        }
    }
}

/// Checks nonnegativity and the `2n + 2` line sums against the first row
/// sum, within `1e-12·α`.
pub fn validate_magic(entries: &[Vec<f64>]) -> Result<MagicReport> {
    let n = entries.len();
    if n == 0 {
        return Err(GlsError::NotSquare { rows: 0, cols: 0 });
    }
    if let Some(row) = entries.iter().find(|r| r.len() != n) {
        return Err(GlsError::NotSquare {
            rows: n,
            cols: row.len(),
        });
    }
    if let Some(k) = entries.iter().flatten().position(|v| !v.is_finite()) {
        return Err(GlsError::NonFiniteValue(k));
    }
    let mut sums: Vec<(Line, f64)> = Vec::with_capacity(2 * n + 2);
    for (i, row) in entries.iter().enumerate() {
        sums.push((Line::Row(i), row.iter().sum()));
    }
    for j in 0..n {
        sums.push((Line::Column(j), entries.iter().map(|r| r[j]).sum()));
    }
    sums.push((Line::Diagonal, (0..n).map(|k| entries[k][k]).sum()));
    sums.push((Line::AntiDiagonal, (0..n).map(|l| entries[n - 1 - l][l]).sum()));
    let alpha = sums[0].1;
    let tol = LINE_TOLERANCE * alpha.abs();
    let lines: Vec<LineCheck> = sums
        .into_iter()
        .map(|(line, sum)| {
            let deviation = sum - alpha;
            LineCheck {
                line,
                sum,
                deviation,
                ok: deviation.abs() <= tol,
            }
        })
        .collect();
    let negative_entries: Vec<(usize, usize)> = entries
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().filter(|(_, v)| **v < 0.0).map(move |(j, _)| (i, j)))
        .collect();
    Ok(MagicReport {
        pass: negative_entries.is_empty() && lines.iter().all(|l| l.ok),
        alpha,
        lines,
        negative_entries,
    })
}

/// `α · n^{1/q - 1/p}` for `q ≤ p`.
pub fn magic_norm_formula(n: usize, alpha: f64, q: Exponent, p: Exponent) -> Result<f64> {
    if q > p {
        return Err(GlsError::InvalidParameter {
            name: "q",
            reason: format!("formula stated for q <= p, got q = {q}, p = {p}"),
        });
    }
    Ok(alpha * (n as f64).powf(q.reciprocal() - p.reciprocal()))
}

/// Measure placed on both sides of a magic square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// All weights 1.
    Counting,
    /// All weights `1/n`.
    Normalized,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::Counting, Convention::Normalized];

    pub fn space(self, n: usize) -> MeasureSpace {
        match self {
            Convention::Counting => MeasureSpace::counting(n),
            Convention::Normalized => MeasureSpace::uniform_probability(n),
        }
        .expect("n >= 1")
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Counting => "counting",
            Convention::Normalized => "normalized",
        })
    }
}

/// Which norm is computed for a pair `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// `||S||_{q→p}`.
    AsGiven,
    /// `||S||_{p→q}`.
    Swapped,
}

impl Ordering {
    pub const ALL: [Ordering; 2] = [Ordering::AsGiven, Ordering::Swapped];
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ordering::AsGiven => "q->p",
            Ordering::Swapped => "p->q",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperExactRow {
    pub convention: Convention,
    pub ordering: Ordering,
    pub q: Exponent,
    pub p: Exponent,
    pub oracle: f64,
    pub formula: f64,
    pub rel_gap: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperExactReport {
    pub n: usize,
    pub alpha: f64,
    pub resolution: usize,
    pub tolerance: f64,
    pub rows: Vec<SuperExactRow>,
    /// Convention/ordering combinations that match on every pair.
    pub matching: Vec<(Convention, Ordering)>,
}

/// Compares the oracle norm of `square` with `α · n^{|1/q - 1/p|}` for every
/// pair, convention and ordering; a row matches when the relative gap is at
/// most `tolerance` ([`MATCH_TOLERANCE`] by default). Reports; asserts nothing.
pub fn check_super_exact(
    square: &MagicSquare,
    pairs: &[(Exponent, Exponent)],
    conventions: &[Convention],
    resolution: usize,
    tolerance: f64,
) -> Result<SuperExactReport> {
    let n = square.order();
    let mut rows = Vec::new();
    for &convention in conventions {
        let op = square.operator(convention);
        for ordering in Ordering::ALL {
            for &(q, p) in pairs {
                let (from, to) = match ordering {
                    Ordering::AsGiven => (q, p),
                    Ordering::Swapped => (p, q),
                };
                let oracle = op_norm_oracle(&op, from, to, resolution)?.value;
                let formula = square.alpha() * (n as f64).powf((q.reciprocal() - p.reciprocal()).abs());
                let rel_gap = (oracle - formula).abs() / formula.abs().max(f64::MIN_POSITIVE);
                rows.push(SuperExactRow {
                    convention,
                    ordering,
                    q,
                    p,
                    oracle,
                    formula,
                    rel_gap,
                    matches: rel_gap <= tolerance,
                });
            }
        }
    }
    let mut matching = Vec::new();
    for &c in conventions {
        for o in Ordering::ALL {
            if rows.iter().filter(|r| r.convention == c && r.ordering == o).all(|r| r.matches) {
                matching.push((c, o));
            }
        }
    }
    Ok(SuperExactReport {
        n,
        alpha: square.alpha(),
        resolution,
        tolerance,
        rows,
        matching,
    })
}
