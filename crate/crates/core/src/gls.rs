//! Grand Lebesgue space norms and fundamental functions.

use crate::error::{GlsError, Result};
use crate::genfun::GeneratingFunction;
use crate::grid::{sup_over_grid, PGrid, SupResult};
use crate::measure::{lp_norm, Exponent, GridFunction};

/// `x / ψ` with `x/∞ = 0`.
pub(crate) fn over_psi(x: f64, psi: f64) -> f64 {
    if psi == f64::INFINITY {
        0.0
    } else {
        x / psi
    }
}

fn check_grid(psi: &GeneratingFunction, grid: &PGrid) -> Result<()> {
    if grid.interval().is_within(psi.domain()) {
        Ok(())
    } else {
        Err(GlsError::InvalidParameter {
            name: "grid",
            reason: format!("grid interval {} is not inside {}", grid.interval(), psi.domain()),
        })
    }
}

/// `||f||_{Gψ} = sup_p ||f||_p / ψ(p)` over `grid`.
pub fn gls_norm(f: &GridFunction, psi: &GeneratingFunction, grid: &PGrid) -> Result<SupResult> {
    check_grid(psi, grid)?;
    sup_over_grid(
        |p| {
            let w = psi.eval_unchecked(p);
            if w == f64::INFINITY {
                0.0
            } else {
                lp_norm(f, p) / w
            }
        },
        grid,
    )
}

/// `φ_{Gψ}(δ) = sup_p δ^{1/p} / ψ(p)` over `grid`.
pub fn fundamental_function(psi: &GeneratingFunction, delta: f64, grid: &PGrid) -> Result<SupResult> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(GlsError::InvalidParameter {
            name: "delta",
            reason: format!("must be positive and finite, got {delta}"),
        });
    }
    check_grid(psi, grid)?;
    sup_over_grid(
        |p| over_psi(delta.powf(p.reciprocal()), psi.eval_unchecked(p)),
        grid,
    )
}

/// `||f||_{q)} = sup_ε ε^{1/(q-ε)} ||f||_{q-ε}` over the supplied `ε` values.
pub fn classical_grand_norm(f: &GridFunction, q: f64, eps_grid: &[f64]) -> Result<f64> {
    if !(q.is_finite() && q > 1.0) {
        return Err(GlsError::InvalidParameter {
            name: "q",
            reason: format!("must be > 1, got {q}"),
        });
    }
    if eps_grid.is_empty() {
        return Err(GlsError::EmptyGrid);
    }
    let mut best = 0.0_f64;
    for &eps in eps_grid {
        if !(eps > 0.0 && eps < q - 1.0) {
            return Err(GlsError::InvalidParameter {
                name: "eps",
                reason: format!("{eps} is outside (0, {})", q - 1.0),
            });
        }
        let p = q - eps;
        let v = eps.powf(1.0 / p) * lp_norm(f, Exponent::Finite(p));
        best = best.max(v);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfun::{
        make_boundary, make_classical_grand, make_degenerate, make_power, natural_function, ExponentInterval,
    };
    use crate::grid::GridConfig;
    use crate::measure::MeasureSpace;

    fn cfg() -> GridConfig {
        GridConfig::default()
    }

    #[test]
    fn natural_function_of_constant_has_unit_norm() {
        for n in [1, 3, 7] {
            let f = GridFunction::counting(vec![1.0; n]).unwrap();
            let knots = crate::grid::log_space(1.0, 50.0, 30);
            let psi = natural_function(std::slice::from_ref(&f), &knots).unwrap();
            let grid = PGrid::for_function(&psi, &cfg()).unwrap();
            let r = gls_norm(&f, &psi, &grid).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_reduces_to_lp() {
        let f = GridFunction::new(MeasureSpace::new(vec![0.3, 2.0, 1.1]).unwrap(), vec![1.5, -0.2, 4.0]).unwrap();
        for r in [1.0, 2.0, 3.5] {
            let psi = make_degenerate(r).unwrap();
            let grid = PGrid::for_function(&psi, &cfg()).unwrap();
            let v = gls_norm(&f, &psi, &grid).unwrap();
            assert_eq!(v.value, lp_norm(&f, Exponent::Finite(r)));
            assert_eq!(v.argmax_p, Exponent::Finite(r));
            let phi = fundamental_function(&psi, 9.0, &grid).unwrap();
            assert!((phi.value - 9f64.powf(1.0 / r)).abs() < 1e-14);
        }
    }

    #[test]
    fn power_one_on_constant_peaks_at_one() {
        // sup_p 4^{1/p}/p on [1, 64): derivative of ln is negative, max 4 at p = 1
        let f = GridFunction::counting(vec![1.0; 4]).unwrap();
        let psi = make_power(1.0)
            .unwrap()
            .restricted(ExponentInterval::finite(1.0, 64.0).unwrap())
            .unwrap();
        let grid = PGrid::for_function(&psi, &cfg()).unwrap();
        let r = gls_norm(&f, &psi, &grid).unwrap();
        assert_eq!(r.value, 4.0);
        assert_eq!(r.argmax_p, Exponent::ONE);
    }

    #[test]
    fn fundamental_examples() {
        let flat = GeneratingFunction::custom(ExponentInterval::unbounded(1.0).unwrap(), "one", |_| 1.0);
        let grid = PGrid::for_function(&flat, &cfg()).unwrap();
        assert_eq!(fundamental_function(&flat, 5.0, &grid).unwrap().value, 5.0);

        let psi = make_power(1.0).unwrap();
        let grid = PGrid::for_function(&psi, &cfg()).unwrap();
        let r = fundamental_function(&psi, std::f64::consts::E, &grid).unwrap();
        assert_eq!(r.value, std::f64::consts::E);
        assert_eq!(r.argmax_p, Exponent::ONE);
        assert!(fundamental_function(&psi, 0.0, &grid).is_err());
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let z = GridFunction::counting(vec![0.0; 4]).unwrap();
        let psi = make_boundary(3.0, 1.0, 1.0).unwrap();
        let grid = PGrid::for_function(&psi, &cfg()).unwrap();
        assert_eq!(gls_norm(&z, &psi, &grid).unwrap().value, 0.0);
    }

    #[test]
    fn grid_outside_domain_rejected() {
        let f = GridFunction::counting(vec![1.0]).unwrap();
        let psi = make_boundary(3.0, 0.0, 0.0).unwrap();
        let other = PGrid::log_spaced(ExponentInterval::finite(2.0, 5.0).unwrap(), &cfg()).unwrap();
        assert!(gls_norm(&f, &psi, &other).is_err());
    }

    #[test]
    fn classical_grand_matches_gls_under_substitution() {
        let f = GridFunction::new(MeasureSpace::new(vec![1.0, 0.5, 2.0]).unwrap(), vec![0.7, -3.0, 1.2]).unwrap();
        let q = 3.0;
        let eps: Vec<f64> = (1..200).map(|k| 2.0 * k as f64 / 200.0).collect();
        let direct = classical_grand_norm(&f, q, &eps).unwrap();
        let psi = make_classical_grand(q).unwrap();
        let grid = PGrid::from_points(*psi.domain(), eps.iter().map(|e| Exponent::Finite(q - e)), 0).unwrap();
        let via_gls = gls_norm(&f, &psi, &grid).unwrap().value;
        assert!((direct - via_gls).abs() <= 1e-12 * direct);
        assert_eq!(classical_grand_norm(&GridFunction::zeros(f.space().clone()), q, &eps).unwrap(), 0.0);
        assert!(classical_grand_norm(&f, q, &[2.5]).is_err());
        assert!(classical_grand_norm(&f, 1.0, &[0.5]).is_err());
    }

    #[test]
    fn classical_grand_constant_two_points() {
        // independent oracle: sup over a 10^5-point ε grid of (2ε)^{1/(2-ε)}
        let oracle = (1..100_000)
            .map(|k| k as f64 / 100_000.0)
            .map(|e| (2.0 * e).powf(1.0 / (2.0 - e)))
            .fold(0.0_f64, f64::max);
        let f = GridFunction::counting(vec![1.0, 1.0]).unwrap();
        let eps: Vec<f64> = (1..100_000).map(|k| k as f64 / 100_000.0).collect();
        let v = classical_grand_norm(&f, 2.0, &eps).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 2.0).abs() < 1e-4);
    }
}
