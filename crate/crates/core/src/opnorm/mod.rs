//! Matrix operators between weighted finite `L_q` and `L_p` spaces.
//!
//! `||A||_{q→p} = sup_{g≠0} ||Ag||_{p,μ} / ||g||_{q,ν}` is estimated from below
//! by alternating duality-map ascent ([`op_norm_lower`]) and, for small
//! sources, by exhaustive search over the unit sphere ([`op_norm_oracle`]).
//! The extrapolation checks built on top live in [`extrapolation`].

mod ascent;
pub mod extrapolation;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{GlsError, Result};
use crate::measure::{Exponent, GridFunction, MeasureSpace};

pub use ascent::{op_norm_lower, OpNormEstimate};
pub use extrapolation::{
    check_sigma_condition, minimal_constant, verify_theorem1, verify_theorem1_with_constant, MinimalConstant,
    OperatorBoundCertificate, SigmaReport, TheoremOptions, TheoremReport,
};
pub use oracle::{op_norm_oracle, op_norm_oracle_unguarded, OracleResult, ORACLE_SIZE_LIMIT};

/// `A = (a(i,j))` mapping functions on `source` (size `cols`, measure `ν`)
/// to functions on `target` (size `rows`, measure `μ`).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOperator {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    source: MeasureSpace,
    target: MeasureSpace,
}

impl MatrixOperator {
    pub fn new(entries: Vec<Vec<f64>>, source: MeasureSpace, target: MeasureSpace) -> Result<Self> {
        let rows = entries.len();
        if rows == 0 {
            return Err(GlsError::EmptySpace);
        }
        let cols = entries[0].len();
        if let Some(bad) = entries.iter().find(|r| r.len() != cols) {
            return Err(GlsError::LengthMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        if source.size() != cols {
            return Err(GlsError::LengthMismatch {
                expected: cols,
                got: source.size(),
            });
        }
        if target.size() != rows {
            return Err(GlsError::LengthMismatch {
                expected: rows,
                got: target.size(),
            });
        }
        let flat: Vec<f64> = entries.into_iter().flatten().collect();
        if let Some(i) = flat.iter().position(|v| !v.is_finite()) {
            return Err(GlsError::NonFiniteValue(i));
        }
        Ok(Self {
            rows,
            cols,
            entries: flat,
            source,
            target,
        })
    }

    /// Both sides carry counting measure.
    pub fn counting(entries: Vec<Vec<f64>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        Self::new(entries, MeasureSpace::counting(cols)?, MeasureSpace::counting(rows)?)
    }

    pub fn identity(space: MeasureSpace) -> Self {
        let n = space.size();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            entries,
            source: space.clone(),
            target: space,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn source(&self) -> &MeasureSpace {
        &self.source
    }

    pub fn target(&self) -> &MeasureSpace {
        &self.target
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row_vectors(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|&a| a >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&a| a == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|a| c * a).collect(),
            ..self.clone()
        }
    }

    /// `Aᵀ` with source and target swapped.
    pub fn transpose(&self) -> Self {
        let mut entries = vec![0.0; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                entries[j * self.rows + i] = self.entry(i, j);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }

    /// Same entries on different measures.
    pub fn with_spaces(&self, source: MeasureSpace, target: MeasureSpace) -> Result<Self> {
        Self::new(self.row_vectors(), source, target)
    }

    /// `(Ag)_i = Σ_j a(i,j) g_j`.
    pub fn apply(&self, g: &GridFunction) -> Result<GridFunction> {
        if g.space() != &self.source {
            return Err(GlsError::SpaceMismatch);
        }
        let mut out = vec![0.0; self.rows];
        self.apply_slice(g.values(), &mut out);
        GridFunction::new(self.target.clone(), out)
    }

    pub(crate) fn apply_slice(&self, x: &[f64], out: &mut [f64]) {
        for (row, o) in self.entries.chunks_exact(self.cols).zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub(crate) fn apply_transpose_slice(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (row, yi) in self.entries.chunks_exact(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MatrixDoc = serde_json::from_str(text)?;
        doc.into_operator()
    }

    pub fn to_doc(&self) -> MatrixDoc {
        MatrixDoc {
            entries: self.row_vectors(),
            mu: Some(self.target.weights().to_vec()),
            nu: Some(self.source.weights().to_vec()),
        }
    }
}

/// `{"entries":[[...]], "mu":[...], "nu":[...]}`: `mu` weighs the target
/// (rows), `nu` the source (columns); both default to counting measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub entries: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<f64>>,
}

impl MatrixDoc {
    pub fn into_operator(self) -> Result<MatrixOperator> {
        let rows = self.entries.len();
        let cols = self.entries.first().map_or(0, Vec::len);
        let target = match self.mu {
            Some(w) => MeasureSpace::new(w)?,
            None => MeasureSpace::counting(rows)?,
        };
        let source = match self.nu {
            Some(w) => MeasureSpace::new(w)?,
            None => MeasureSpace::counting(cols)?,
        };
        MatrixOperator::new(self.entries, source, target)
    }
}

/// `σ^{1/q - 1/p}` with `1/∞ = 0`.
pub fn sigma_power(sigma: f64, q: Exponent, p: Exponent) -> f64 {
    sigma.powf(q.reciprocal() - p.reciprocal())
}
