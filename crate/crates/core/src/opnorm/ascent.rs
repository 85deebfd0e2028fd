use rand::Rng;
use rand_distr::StandardNormal;

use super::MatrixOperator;
use crate::error::{GlsError, Result};
use crate::measure::{weighted_lp_norm, Exponent, GridFunction};
use crate::sampling::rng_for;

const MAX_ITERATIONS: usize = 1000;
const STAGNATION: f64 = 1e-12;

/// Lower bound on `||A||_{q→p}` with the vector that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct OpNormEstimate {
    pub value: f64,
    pub witness: GridFunction,
    /// The matrix is zero; `value` is 0 and `witness` the zero function.
    pub zero_matrix: bool,
    pub iterations: usize,
}

/// Estimates `||A||_{q→p}` from below by alternating duality-map ascent.
///
/// The weighted problem is mapped to the unweighted one for
/// `B = D_μ^{1/p} A D_ν^{-1/q}`. Each step applies `B`, the `p`-norm duality
/// map, `Bᵀ`, and the `q'`-duality map, then renormalizes; it runs until the
/// ratio moves by less than `1e-12` relative. Starts: the constant vector,
/// every basis vector, then `restarts` seeded random vectors (positive ones
/// for nonnegative matrices). The returned value is the ratio actually
/// attained by the witness, so it never exceeds the true norm.
pub fn op_norm_lower(
    a: &MatrixOperator,
    q: Exponent,
    p: Exponent,
    restarts: usize,
    seed: u64,
) -> Result<OpNormEstimate> {
    if restarts == 0 {
        return Err(GlsError::InvalidParameter {
            name: "restarts",
            reason: "must be at least 1".into(),
        });
    }
    if a.is_zero() {
        return Ok(OpNormEstimate {
            value: 0.0,
            witness: GridFunction::zeros(a.source().clone()),
            zero_matrix: true,
            iterations: 0,
        });
    }
    let problem = Scaled::new(a, q, p);
    let n = a.cols();
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(restarts + n + 1);
    starts.push(vec![1.0; n]);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        starts.push(e);
    }
    let mut rng = rng_for(seed, 1);
    let positive = a.is_nonnegative();
    for _ in 0..restarts {
        let h: Vec<f64> = (0..n)
            .map(|_| {
                if positive {
                    rng.random::<f64>() + 1e-3
                } else {
                    rng.sample::<f64, _>(StandardNormal)
                }
            })
            .collect();
        starts.push(h);
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_g = vec![0.0; n];
    let mut iterations = 0;
    for start in starts {
        let (g, value, its) = problem.ascend(start);
        iterations += its;
        if value > best_value {
            best_value = value;
            best_g = g;
        }
    }
    Ok(OpNormEstimate {
        value: best_value.max(0.0),
        witness: GridFunction::new(a.source().clone(), best_g)?,
        zero_matrix: false,
        iterations,
    })
}

/// Unweighted reformulation `B = D_μ^{1/p} A D_ν^{-1/q}`.
struct Scaled<'a> {
    a: &'a MatrixOperator,
    q: Exponent,
    p: Exponent,
    b: MatrixOperator,
    /// `ν_j^{-1/q}`: maps unweighted `h` back to `g`.
    unscale: Vec<f64>,
}

impl<'a> Scaled<'a> {
    fn new(a: &'a MatrixOperator, q: Exponent, p: Exponent) -> Self {
        let row_scale: Vec<f64> = a.target().weights().iter().map(|w| w.powf(p.reciprocal())).collect();
        let unscale: Vec<f64> = a.source().weights().iter().map(|w| w.powf(-q.reciprocal())).collect();
        let entries = (0..a.rows())
            .map(|i| (0..a.cols()).map(|j| row_scale[i] * a.entry(i, j) * unscale[j]).collect())
            .collect();
        let b = MatrixOperator::counting(entries).expect("same shape as a valid operator");
        Self { a, q, p, b, unscale }
    }

    /// Ratio `||Ag||_{p,μ} / ||g||_{q,ν}` in the original weighted norms.
    fn ratio(&self, g: &[f64], buf: &mut [f64]) -> f64 {
        let den = weighted_lp_norm(g, self.a.source().weights(), self.q);
        if den == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.a.apply_slice(g, buf);
        weighted_lp_norm(buf, self.a.target().weights(), self.p) / den
    }

    fn to_source(&self, h: &[f64]) -> Vec<f64> {
        h.iter().zip(&self.unscale).map(|(x, s)| x * s).collect()
    }

    /// Runs the fixed-point iteration from `h`; returns the best `g`, its ratio
    /// and the number of steps.
    fn ascend(&self, mut h: Vec<f64>) -> (Vec<f64>, f64, usize) {
        let mut y = vec![0.0; self.b.rows()];
        let mut z = vec![0.0; self.b.cols()];
        let mut buf = vec![0.0; self.a.rows()];
        let mut g = self.to_source(&h);
        let mut current = self.ratio(&g, &mut buf);
        let mut best = (g.clone(), current);
        let mut steps = 0;
        while steps < MAX_ITERATIONS {
            steps += 1;
            self.b.apply_slice(&h, &mut y);
            if !duality_map(&mut y, self.p) {
                break;
            }
            self.b.apply_transpose_slice(&y, &mut z);
            if !duality_map(&mut z, self.q.conjugate()) {
                break;
            }
            h.copy_from_slice(&z);
            g = self.to_source(&h);
            let next = self.ratio(&g, &mut buf);
            if next > best.1 {
                best = (g.clone(), next);
            }
            let moved = (next - current).abs();
            current = next;
            if moved <= STAGNATION * current.abs() {
                break;
            }
        }
        (best.0, best.1, steps)
    }
}

/// Overwrites `v` with a vector norming it in the dual of `ℓ_r`:
/// `sign(v)|v|^{r-1}` (scaled by `max|v|`), `sign(v)` for `r = 1`, and the
/// first maximal coordinate for `r = ∞`. Returns `false` for `v = 0`.
fn duality_map(v: &mut [f64], r: Exponent) -> bool {
    let (k, max) = v
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |(bk, bm), (i, x)| if x.abs() > bm { (i, x.abs()) } else { (bk, bm) });
    if max == 0.0 {
        return false;
    }
    match r {
        Exponent::Infinity => {
            let s = v[k].signum();
            v.iter_mut().for_each(|x| *x = 0.0);
            v[k] = s;
        }
        Exponent::Finite(1.0) => {
            v.iter_mut().for_each(|x| *x = if *x == 0.0 { 0.0 } else { x.signum() });
        }
        Exponent::Finite(r) => {
            let e = r - 1.0;
            v.iter_mut().for_each(|x| *x = x.signum() * (x.abs() / max).powf(e));
        }
    }
    true
}
