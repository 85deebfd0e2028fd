use rayon::prelude::*;

use super::MatrixOperator;
use crate::error::{GlsError, Result};
use crate::measure::Exponent;

/// Largest source dimension accepted by [`op_norm_oracle`].
pub const ORACLE_SIZE_LIMIT: usize = 4;

const POLISH_MIN_STEP: f64 = 1e-14;
const POLISH_MAX_EVALS: usize = 200_000;

/// Exhaustive-search value of `||A||_{q→p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    /// Best grid value before polishing.
    pub grid_value: f64,
    pub argmax: Vec<f64>,
    pub evaluations: usize,
}

/// Brute-force `||A||_{q→p}` for sources of dimension at most
/// [`ORACLE_SIZE_LIMIT`].
pub fn op_norm_oracle(a: &MatrixOperator, q: Exponent, p: Exponent, resolution: usize) -> Result<OracleResult> {
    if a.cols() > ORACLE_SIZE_LIMIT {
        return Err(GlsError::OracleGuard {
            size: a.cols(),
            limit: ORACLE_SIZE_LIMIT,
        });
    }
    op_norm_oracle_unguarded(a, q, p, resolution)
}

/// [`op_norm_oracle`] without the size guard; cost grows like
/// `2^{n-1} · resolution^{n-1}`.
///
/// The ratio is scale invariant, so it is maximized over directions
/// `x = s ∘ u` with `u` on the simplex grid `{k / resolution : Σk = resolution}`
/// and `s` a sign pattern. A nonnegative matrix only needs `s = +`, since
/// `|Ax| ≤ A|x|` entrywise. The grid maximizer is then polished by a compass
/// search along the simplex edge directions `e_i - e_j`.
pub fn op_norm_oracle_unguarded(
    a: &MatrixOperator,
    q: Exponent,
    p: Exponent,
    resolution: usize,
) -> Result<OracleResult> {
    if resolution == 0 {
        return Err(GlsError::InvalidParameter {
            name: "resolution",
            reason: "must be positive".into(),
        });
    }
    let n = a.cols();
    if a.is_zero() {
        return Ok(OracleResult {
            value: 0.0,
            grid_value: 0.0,
            argmax: vec![0.0; n],
            evaluations: 0,
        });
    }
    let objective = Objective { a, q, p };
    let sign_patterns: Vec<Vec<f64>> = if a.is_nonnegative() {
        vec![vec![1.0; n]]
    } else {
        (0..1usize << (n - 1))
            .map(|mask| (0..n).map(|j| if j > 0 && mask >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect())
            .collect()
    };
    let items: Vec<(usize, usize)> = (0..sign_patterns.len())
        .flat_map(|s| (0..=resolution).map(move |k| (s, k)))
        .collect();
    let partial: Vec<Scan> = items
        .par_iter()
        .map(|&(s, k0)| objective.scan(&sign_patterns[s], k0, resolution))
        .collect();
    let mut best: Option<(usize, &Scan)> = None;
    for (i, scan) in partial.iter().enumerate() {
        if best.is_none_or(|(_, b)| scan.value > b.value) {
            best = Some((i, scan));
        }
    }
    let evaluations: usize = partial.iter().map(|s| s.evaluations).sum();
    let (idx, scan) = best.expect("at least one grid item");
    let signs = &sign_patterns[items[idx].0];
    let u: Vec<f64> = scan.composition.iter().map(|&k| k as f64 / resolution as f64).collect();
    let (u, polished, polish_evals) = objective.polish(signs, u, scan.value, 1.0 / resolution as f64);
    let argmax = u.iter().zip(signs).map(|(x, s)| x * s).collect();
    Ok(OracleResult {
        value: polished.max(scan.value),
        grid_value: scan.value,
        argmax,
        evaluations: evaluations + polish_evals,
    })
}

struct Scan {
    value: f64,
    composition: Vec<usize>,
    evaluations: usize,
}

struct Objective<'a> {
    a: &'a MatrixOperator,
    q: Exponent,
    p: Exponent,
}

impl Objective<'_> {
    fn ratio(&self, x: &[f64], y: &mut [f64]) -> f64 {
        let den = plain_norm(x, self.a.source().weights(), self.q);
        if den == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.a.apply_slice(x, y);
        plain_norm(y, self.a.target().weights(), self.p) / den
    }

    /// Best point among compositions whose first part is `k0`.
    fn scan(&self, signs: &[f64], k0: usize, resolution: usize) -> Scan {
        let n = signs.len();
        let mut ks = vec![0usize; n];
        ks[0] = k0;
        let mut state = ScanState {
            x: vec![0.0; n],
            y: vec![0.0; self.a.rows()],
            best: Scan {
                value: f64::NEG_INFINITY,
                composition: ks.clone(),
                evaluations: 0,
            },
        };
        if n == 1 {
            if k0 == resolution {
                self.visit(signs, &ks, resolution, &mut state);
            }
            return state.best;
        }
        self.recurse(signs, &mut ks, 1, resolution - k0, resolution, &mut state);
        state.best
    }

    fn recurse(&self, signs: &[f64], ks: &mut [usize], depth: usize, remaining: usize, res: usize, st: &mut ScanState) {
        if depth == ks.len() - 1 {
            ks[depth] = remaining;
            self.visit(signs, ks, res, st);
            return;
        }
        for k in 0..=remaining {
            ks[depth] = k;
            self.recurse(signs, ks, depth + 1, remaining - k, res, st);
        }
    }

    fn visit(&self, signs: &[f64], ks: &[usize], res: usize, st: &mut ScanState) {
        let scale = 1.0 / res as f64;
        for ((x, &k), s) in st.x.iter_mut().zip(ks).zip(signs) {
            *x = s * k as f64 * scale;
        }
        let v = self.ratio(&st.x, &mut st.y);
        st.best.evaluations += 1;
        if v > st.best.value {
            st.best.value = v;
            st.best.composition.copy_from_slice(ks);
        }
    }

    /// Compass search on the simplex with fixed signs.
    fn polish(&self, signs: &[f64], mut u: Vec<f64>, mut value: f64, mut step: f64) -> (Vec<f64>, f64, usize) {
        let n = u.len();
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; self.a.rows()];
        let mut evals = 0;
        let mut eval = |u: &[f64], evals: &mut usize| {
            *evals += 1;
            for ((xi, ui), s) in x.iter_mut().zip(u).zip(signs) {
                *xi = s * ui;
            }
            self.ratio(&x, &mut y)
        };
        while step > POLISH_MIN_STEP && evals < POLISH_MAX_EVALS {
            let mut improved = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j || u[j] <= 0.0 {
                        continue;
                    }
                    let d = step.min(u[j]);
                    let mut cand = u.clone();
                    cand[i] += d;
                    cand[j] -= d;
                    let v = eval(&cand, &mut evals);
                    if v > value {
                        value = v;
                        u = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        (u, value, evals)
    }
}

struct ScanState {
    x: Vec<f64>,
    y: Vec<f64>,
    best: Scan,
}

/// Weighted `ℓ_r` norm written independently of [`crate::measure::lp_norm`].
fn plain_norm(x: &[f64], w: &[f64], r: Exponent) -> f64 {
    match r {
        Exponent::Infinity => x.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        Exponent::Finite(1.0) => x.iter().zip(w).map(|(v, w)| w * v.abs()).sum(),
        Exponent::Finite(2.0) => x.iter().zip(w).map(|(v, w)| w * v * v).sum::<f64>().sqrt(),
        Exponent::Finite(r) => x
            .iter()
            .zip(w)
            .map(|(v, w)| w * v.abs().powf(r))
            .sum::<f64>()
            .powf(1.0 / r),
    }
}
