//! Young-Fenchel transform of `h(p) = p ln ψ(p)` and the tail bound
//! `T_f(t) ≤ exp(-h*(ln t))` for functions of unit GLS norm.

use serde::Serialize;

use crate::error::{GlsError, Result};
use crate::genfun::GeneratingFunction;
use crate::gls::gls_norm;
use crate::grid::{log_space, sup_over_grid, PGrid};
use crate::measure::{tail_function, Exponent, GridFunction};

/// Relative change of `h*` under grid extension that marks it as possibly infinite.
const DIVERGENCE_CHANGE: f64 = 0.01;
const TAIL_SLACK: f64 = 1e-9;
const NORMALIZATION_SLACK: f64 = 1e-9;

/// `h(p) = p ln ψ(p)`; `+∞` where `ψ(p) = +∞`.
pub fn h_of_p(psi: &GeneratingFunction, p: Exponent) -> Result<f64> {
    let w = psi.eval(p)?;
    Ok(h_value(p, w))
}

fn h_value(p: Exponent, psi: f64) -> f64 {
    if psi == f64::INFINITY {
        return f64::INFINITY;
    }
    match p {
        Exponent::Finite(p) => p * psi.ln(),
        Exponent::Infinity => {
            let l = psi.ln();
            if l > 0.0 {
                f64::INFINITY
            } else if l < 0.0 {
                f64::NEG_INFINITY
            } else {
                0.0
            }
        }
    }
}

/// `p v - h(p)`, with the `p = ∞` limit taken explicitly.
fn fenchel_objective(psi: &GeneratingFunction, v: f64, p: Exponent) -> f64 {
    let w = psi.eval_unchecked(p);
    if w == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    match p {
        Exponent::Finite(x) => x * v - x * w.ln(),
        Exponent::Infinity => {
            let slope = v - w.ln();
            if slope > 0.0 {
                f64::INFINITY
            } else if slope < 0.0 {
                f64::NEG_INFINITY
            } else {
                0.0
            }
        }
    }
}

/// Value of the transform at one dual point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FenchelData {
    pub v: f64,
    pub hstar: f64,
    pub argmax_p: Exponent,
    pub endpoint_flag: bool,
    /// Extending the truncated grid moved `h*` by more than 1%.
    pub possibly_infinite: bool,
}

/// `h*(v) = sup_p (p v - p ln ψ(p))` over `grid`.
pub fn young_fenchel(psi: &GeneratingFunction, v: f64, grid: &PGrid) -> Result<FenchelData> {
    if !grid.interval().is_within(psi.domain()) {
        return Err(GlsError::InvalidParameter {
            name: "grid",
            reason: format!("grid interval {} is not inside {}", grid.interval(), psi.domain()),
        });
    }
    if !v.is_finite() {
        return Err(GlsError::InvalidParameter {
            name: "v",
            reason: format!("must be finite, got {v}"),
        });
    }
    let sup = sup_over_grid(|p| fenchel_objective(psi, v, p), grid)?;
    let mut possibly_infinite = sup.value == f64::INFINITY;
    // With finite b and inf ψ > 0 the transform is bounded by b (v - ln inf ψ);
    // only a truncated unbounded domain can hide a divergence.
    if !possibly_infinite && grid.interval().b == Exponent::Infinity {
        if let Some(extended) = extend_right(grid) {
            let wider = sup_over_grid(|p| fenchel_objective(psi, v, p), &extended)?;
            let scale = sup.value.abs().max(f64::MIN_POSITIVE);
            possibly_infinite = wider.value - sup.value > DIVERGENCE_CHANGE * scale;
        }
    }
    Ok(FenchelData {
        v,
        hstar: sup.value,
        argmax_p: sup.argmax_p,
        endpoint_flag: sup.endpoint_flag,
        possibly_infinite,
    })
}

/// Same grid with its finite part extended from `p_last` to `2 p_last`.
fn extend_right(grid: &PGrid) -> Option<PGrid> {
    let last = grid.points().iter().rev().find(|p| p.is_finite())?.value();
    let density = grid.len().max(2) as f64 / (last / grid.interval().a).ln().max(1e-12);
    let extra = ((density * 2f64.ln()).ceil() as usize).max(8);
    Some(grid.with_points(log_space(last, 2.0 * last, extra + 1)))
}

/// One row of a tail-bound report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub t: f64,
    pub tail: f64,
    pub bound: f64,
    pub hstar: f64,
    pub possibly_infinite: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub gls_norm: f64,
    pub rows: Vec<TailRow>,
    pub all_ok: bool,
}

/// Checks `T_f(t) ≤ exp(-h*(ln t)) (1 + 1e-9)` for every `t` in `t_grid`.
///
/// `f` must already be normalized to `||f||_{Gψ} ≤ 1` on `grid`. The grid
/// transform is a lower bound of the true one, so the tested bound is never
/// tighter than the exact one.
pub fn tail_bound_check(
    f: &GridFunction,
    psi: &GeneratingFunction,
    t_grid: &[f64],
    grid: &PGrid,
) -> Result<TailReport> {
    if let Some(&t) = t_grid.iter().find(|&&t| t.is_nan() || t < std::f64::consts::E) {
        return Err(GlsError::InvalidParameter {
            name: "t",
            reason: format!("tail levels must be >= e, got {t}"),
        });
    }
    let norm = gls_norm(f, psi, grid)?.value;
    if norm > 1.0 + NORMALIZATION_SLACK {
        return Err(GlsError::NotNormalized(norm));
    }
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let fd = young_fenchel(psi, t.ln(), grid)?;
        let tail = tail_function(f, t)?;
        let bound = (-fd.hstar).exp();
        rows.push(TailRow {
            t,
            tail,
            bound,
            hstar: fd.hstar,
            possibly_infinite: fd.possibly_infinite,
            ok: tail <= bound * (1.0 + TAIL_SLACK),
        });
    }
    let all_ok = rows.iter().all(|r| r.ok);
    Ok(TailReport {
        gls_norm: norm,
        rows,
        all_ok,
    })
}
