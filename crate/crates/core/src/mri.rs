//! Moment rearrangement invariant norms: an r.i. norm applied to the moment
//! profile `h(p) = ||f||_p` over an exponent interval.

use serde::{Deserialize, Serialize};

use crate::error::{GlsError, Result};
use crate::genfun::{interval_opt, ExponentInterval, GenSpec, GeneratingFunction};
use crate::gls::{fundamental_function, gls_norm};
use crate::grid::{GridConfig, PGrid};
use crate::measure::{lp_norm, Exponent, GridFunction};
use crate::opnorm::extrapolation::{check_samples, constant_for, require_fundamental};
use crate::opnorm::{MatrixOperator, OperatorBoundCertificate, TheoremOptions, TheoremReport};

/// Weight `w(p)` of an integral-kind norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// `w ≡ 1`.
    Const,
    /// `w(p) = p^k`.
    Power(f64),
}

impl Weight {
    fn at(self, p: f64) -> f64 {
        match self {
            Weight::Const => 1.0,
            Weight::Power(k) => p.powf(k),
        }
    }
}

#[derive(Debug, Clone)]
pub enum MriKind {
    /// `sup_p h(p) / ψ(p)`.
    Sup(GeneratingFunction),
    /// `(∫ |h(p)|^s w(p) dp)^{1/s}` by the trapezoid rule on the grid.
    Integral { s: f64, weight: Weight },
}

#[derive(Debug, Clone)]
pub struct MRINorm {
    interval: ExponentInterval,
    kind: MriKind,
    grid: PGrid,
}

/// Norm value and whether a sup-kind maximum sat at a truncated end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MriValue {
    pub value: f64,
    pub endpoint_flag: bool,
}

impl MRINorm {
    /// Sup kind over the domain of `psi`, on the grid [`PGrid::for_function`] builds.
    pub fn sup(psi: GeneratingFunction, config: &GridConfig) -> Result<Self> {
        let grid = PGrid::for_function(&psi, config)?;
        Ok(Self {
            interval: *psi.domain(),
            kind: MriKind::Sup(psi),
            grid,
        })
    }

    /// Integral kind over a bounded interval, on a log-spaced grid.
    pub fn integral(interval: ExponentInterval, s: f64, weight: Weight, config: &GridConfig) -> Result<Self> {
        if !(s >= 1.0 && s.is_finite()) {
            return Err(GlsError::InvalidParameter {
                name: "s",
                reason: format!("must be finite and >= 1, got {s}"),
            });
        }
        if !interval.b.is_finite() {
            return Err(GlsError::InvalidParameter {
                name: "interval",
                reason: "integral norms need a bounded interval".into(),
            });
        }
        if let Weight::Power(k) = weight {
            if !k.is_finite() {
                return Err(GlsError::InvalidParameter {
                    name: "weight",
                    reason: format!("power must be finite, got {k}"),
                });
            }
        }
        let grid = PGrid::log_spaced(interval, config)?;
        Self::integral_on(grid, s, weight)
    }

    /// Integral kind on an explicit grid of finite exponents.
    pub fn integral_on(grid: PGrid, s: f64, weight: Weight) -> Result<Self> {
        if grid.points().iter().any(|p| !p.is_finite()) {
            return Err(GlsError::InvalidParameter {
                name: "grid",
                reason: "integral norms need finite exponents".into(),
            });
        }
        Ok(Self {
            interval: *grid.interval(),
            kind: MriKind::Integral { s, weight },
            grid,
        })
    }

    pub fn interval(&self) -> &ExponentInterval {
        &self.interval
    }

    pub fn kind(&self) -> &MriKind {
        &self.kind
    }

    pub fn grid(&self) -> &PGrid {
        &self.grid
    }

    /// The integral-kind norm of grid samples `h(p_k)`.
    fn integrate(&self, s: f64, weight: Weight, h: impl Fn(Exponent) -> f64) -> f64 {
        let pts = self.grid.points();
        let g: Vec<f64> = pts.iter().map(|&p| h(p).abs().powf(s) * weight.at(p.value())).collect();
        if pts.len() == 1 {
            return g[0].powf(1.0 / s);
        }
        let total: f64 = pts
            .windows(2)
            .zip(g.windows(2))
            .map(|(p, v)| 0.5 * (p[1].value() - p[0].value()) * (v[0] + v[1]))
            .sum();
        total.powf(1.0 / s)
    }

    pub fn to_spec(&self) -> Option<MriSpec> {
        Some(match &self.kind {
            MriKind::Sup(psi) => MriSpec::Sup { psi: psi.to_spec()? },
            MriKind::Integral { s, weight } => MriSpec::Integral {
                s: *s,
                weight: *weight,
                interval: Some(self.interval),
            },
        })
    }
}

/// `||f||_W = <h>` with `h(p) = ||f||_p` on the grid of `w`.
pub fn mri_norm(f: &GridFunction, w: &MRINorm) -> Result<MriValue> {
    match &w.kind {
        MriKind::Sup(psi) => {
            let r = gls_norm(f, psi, &w.grid)?;
            Ok(MriValue {
                value: r.value,
                endpoint_flag: r.endpoint_flag,
            })
        }
        &MriKind::Integral { s, weight } => Ok(MriValue {
            value: w.integrate(s, weight, |p| lp_norm(f, p)),
            endpoint_flag: false,
        }),
    }
}

/// `φ_W(δ) = <δ^{1/p}>`.
pub fn mri_fundamental(w: &MRINorm, delta: f64) -> Result<MriValue> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(GlsError::InvalidParameter {
            name: "delta",
            reason: format!("must be positive and finite, got {delta}"),
        });
    }
    match &w.kind {
        MriKind::Sup(psi) => {
            let r = fundamental_function(psi, delta, &w.grid)?;
            Ok(MriValue {
                value: r.value,
                endpoint_flag: r.endpoint_flag,
            })
        }
        &MriKind::Integral { s, weight } => Ok(MriValue {
            value: w.integrate(s, weight, |p| delta.powf(p.reciprocal())),
            endpoint_flag: false,
        }),
    }
}

/// `min(a, b) ≥ max(c, d)` for `W` on `(a, b)` and `R` on `(c, d)`.
pub fn supp_ordering(w: &MRINorm, r: &MRINorm) -> bool {
    let (a, b) = (w.interval.a, w.interval.b.value());
    let (c, d) = (r.interval.a, r.interval.b.value());
    a.min(b) >= c.max(d)
}

fn fundamental_of(w: &MRINorm, delta: f64) -> Result<f64> {
    match &w.kind {
        MriKind::Sup(psi) => require_fundamental(&fundamental_function(psi, delta, &w.grid)?),
        MriKind::Integral { .. } => {
            let v = mri_fundamental(w, delta)?.value;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(GlsError::DegenerateFundamental(v))
            }
        }
    }
}

/// Checks `||Ag||_W / φ_W(1/σ) ≤ C̲ ||g||_R / φ_R(1/σ) (1 + 1e-8)` on sampled
/// `g`. `C̲` and the samples are the ones `verify_theorem1` uses for the same
/// grids and options, so sup-kind norms reproduce its values exactly.
pub fn verify_theorem2(
    a: &MatrixOperator,
    cert: &OperatorBoundCertificate,
    w: &MRINorm,
    r: &MRINorm,
    opts: &TheoremOptions,
) -> Result<TheoremReport> {
    if !cert.witnessed {
        return Err(GlsError::UnwitnessedCertificate);
    }
    if w.interval != cert.p_interval || r.interval != cert.q_interval {
        return Err(GlsError::InvalidParameter {
            name: "domain",
            reason: format!(
                "norms live on {} and {}, certificate on {} and {}",
                w.interval, r.interval, cert.p_interval, cert.q_interval
            ),
        });
    }
    let c_min = constant_for(a, cert, &w.grid, &r.grid, opts)?.value;
    verify_theorem2_with_constant(a, cert, w, r, c_min, opts)
}

/// [`verify_theorem2`] with a precomputed `C̲`.
pub fn verify_theorem2_with_constant(
    a: &MatrixOperator,
    cert: &OperatorBoundCertificate,
    w: &MRINorm,
    r: &MRINorm,
    c_min: f64,
    opts: &TheoremOptions,
) -> Result<TheoremReport> {
    if !cert.witnessed {
        return Err(GlsError::UnwitnessedCertificate);
    }
    let delta = 1.0 / cert.sigma;
    let phi_w = fundamental_of(w, delta)?;
    let phi_r = fundamental_of(r, delta)?;
    check_samples(
        a,
        opts,
        c_min,
        phi_w,
        phi_r,
        |ag| Ok(mri_norm(ag, w)?.value),
        |g| Ok(mri_norm(g, r)?.value),
    )
}

/// `{"kind":"sup","psi":{...}}` or
/// `{"kind":"integral","s":1,"weight":"const","interval":[4,6]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MriSpec {
    Sup {
        psi: GenSpec,
    },
    Integral {
        #[serde(default = "one")]
        s: f64,
        #[serde(default = "const_weight")]
        weight: Weight,
        #[serde(with = "interval_opt")]
        interval: Option<ExponentInterval>,
    },
}

fn one() -> f64 {
    1.0
}

fn const_weight() -> Weight {
    Weight::Const
}

impl MriSpec {
    pub fn build(&self, config: &GridConfig) -> Result<MRINorm> {
        match self {
            MriSpec::Sup { psi } => MRINorm::sup(psi.build()?, config),
            MriSpec::Integral { s, weight, interval } => {
                let iv = interval.ok_or_else(|| GlsError::Malformed("integral norm needs an interval".into()))?;
                MRINorm::integral(iv, *s, *weight, config)
            }
        }
    }

    pub fn from_json(text: &str, config: &GridConfig) -> Result<MRINorm> {
        let spec: MriSpec = serde_json::from_str(text)?;
        spec.build(config)
    }
}
