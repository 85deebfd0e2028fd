//! Generating functions `ψ(p)` of Grand Lebesgue spaces.
//!
//! A generating function is a positive function of the exponent on an interval
//! `[a, b)`. It may be `+∞` (the degenerate family, or singular boundary
//! behaviour); every consumer divides by it with the convention `C/∞ = 0`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GlsError, Result};
use crate::measure::{lp_norm, Exponent, GridFunction};

/// Exponent interval `[a, b)`, or `[a, b]` when `right_closed`.
///
/// With `b = ∞` the infinite exponent itself may be evaluated as a limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentInterval {
    pub a: f64,
    pub b: Exponent,
    #[serde(default)]
    pub right_closed: bool,
}

impl ExponentInterval {
    pub fn new(a: f64, b: Exponent) -> Result<Self> {
        if !(a.is_finite() && a >= 1.0 && Exponent::Finite(a) < b) {
            return Err(GlsError::InvalidInterval { a, b: b.value() });
        }
        Ok(Self {
            a,
            b,
            right_closed: false,
        })
    }

    pub fn finite(a: f64, b: f64) -> Result<Self> {
        Self::new(a, Exponent::new(b).map_err(|_| GlsError::InvalidInterval { a, b })?)
    }

    pub fn unbounded(a: f64) -> Result<Self> {
        Self::new(a, Exponent::Infinity)
    }

    pub fn contains(&self, p: Exponent) -> bool {
        let v = p.value();
        if v < self.a {
            return false;
        }
        match (self.b, p) {
            (Exponent::Infinity, _) => true,
            (Exponent::Finite(b), Exponent::Finite(p)) => p < b || (self.right_closed && p == b),
            (Exponent::Finite(_), Exponent::Infinity) => false,
        }
    }

    /// `self ⊆ other`, comparing endpoints.
    pub fn is_within(&self, other: &ExponentInterval) -> bool {
        if self.a < other.a {
            return false;
        }
        match (self.b.value(), other.b.value()) {
            (sb, ob) if sb < ob => true,
            (sb, ob) if sb == ob => !self.right_closed || other.right_closed,
            _ => false,
        }
    }

    /// Lower endpoint.
    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> Exponent {
        self.b
    }
}

impl fmt::Display for ExponentInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let close = if self.right_closed { ']' } else { ')' };
        write!(f, "[{}, {}{}", self.a, self.b, close)
    }
}

/// Tag describing how a generating function was built, with its parameters.
#[derive(Clone)]
pub enum GenKind {
    Power { m: f64 },
    Boundary { b: f64, alpha: f64, beta: f64 },
    Degenerate { r: f64 },
    ClassicalGrand { q: f64 },
    Natural(NaturalTable),
    Custom {
        name: String,
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKind::Power { m } => write!(f, "Power {{ m: {m} }}"),
            GenKind::Boundary { b, alpha, beta } => {
                write!(f, "Boundary {{ b: {b}, alpha: {alpha}, beta: {beta} }}")
            }
            GenKind::Degenerate { r } => write!(f, "Degenerate {{ r: {r} }}"),
            GenKind::ClassicalGrand { q } => write!(f, "ClassicalGrand {{ q: {q} }}"),
            GenKind::Natural(t) => write!(f, "Natural {{ knots: {} }}", t.knots.len()),
            GenKind::Custom { name, .. } => write!(f, "Custom {{ name: {name:?} }}"),
        }
    }
}

/// Knot values of a natural function; `ln ψ` is linear in `1/p` between knots.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalTable {
    knots: Vec<Exponent>,
    log_values: Vec<f64>,
}

impl NaturalTable {
    pub fn knots(&self) -> &[Exponent] {
        &self.knots
    }

    fn eval(&self, p: Exponent) -> f64 {
        if let Some(i) = self.knots.iter().position(|&k| k == p) {
            return self.log_values[i].exp();
        }
        // knots ascend in p, so 1/p descends
        let x = p.reciprocal();
        let i = self
            .knots
            .iter()
            .position(|k| k.reciprocal() < x)
            .expect("caller checked the domain");
        let (x0, x1) = (self.knots[i - 1].reciprocal(), self.knots[i].reciprocal());
        let (y0, y1) = (self.log_values[i - 1], self.log_values[i]);
        let t = (x - x0) / (x1 - x0);
        (y0 + t * (y1 - y0)).exp()
    }
}

/// A generating function `ψ` together with its domain.
#[derive(Debug, Clone)]
pub struct GeneratingFunction {
    domain: ExponentInterval,
    kind: GenKind,
}

/// `ψ_m(p) = p^{1/m}` on `[1, ∞)`.
pub fn make_power(m: f64) -> Result<GeneratingFunction> {
    if !(m.is_finite() && m > 0.0) {
        return Err(param("m", format!("must be positive, got {m}")));
    }
    Ok(GeneratingFunction {
        domain: ExponentInterval::unbounded(1.0)?,
        kind: GenKind::Power { m },
    })
}

/// `ψ_{b;α,β}(p) = (p-1)^{-α} (b-p)^{-β}` on `(1, b)`.
pub fn make_boundary(b: f64, alpha: f64, beta: f64) -> Result<GeneratingFunction> {
    if !(b.is_finite() && b > 1.0) {
        return Err(param("b", format!("must satisfy 1 < b < inf, got {b}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(param("alpha", format!("must be >= 0, got {alpha}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(param("beta", format!("must be >= 0, got {beta}")));
    }
    Ok(GeneratingFunction {
        domain: ExponentInterval::finite(1.0, b)?,
        kind: GenKind::Boundary { b, alpha, beta },
    })
}

/// `ψ_r(p) = 1` at `p = r` and `+∞` elsewhere; `Gψ_r` is `L_r`.
pub fn make_degenerate(r: f64) -> Result<GeneratingFunction> {
    if !(r.is_finite() && r >= 1.0) {
        return Err(param("r", format!("must be >= 1, got {r}")));
    }
    Ok(GeneratingFunction {
        domain: ExponentInterval::unbounded(1.0)?,
        kind: GenKind::Degenerate { r },
    })
}

/// `ψ(p) = (q-p)^{-1/p}` on `(1, q)`, the classical grand Lebesgue space `L^{q)}`.
pub fn make_classical_grand(q: f64) -> Result<GeneratingFunction> {
    if !(q.is_finite() && q > 1.0) {
        return Err(param("q", format!("must be > 1, got {q}")));
    }
    Ok(GeneratingFunction {
        domain: ExponentInterval::finite(1.0, q)?,
        kind: GenKind::ClassicalGrand { q },
    })
}

/// `ψ(p) = max_v ||ζ_v||_p` sampled on `grid`.
///
/// Between knots `ln ψ` is interpolated linearly in `1/p`. Each `ln ||ζ_v||_p`
/// is convex in `1/p`, so the interpolant never undercuts a family member.
pub fn natural_function(family: &[GridFunction], grid: &[Exponent]) -> Result<GeneratingFunction> {
    if family.is_empty() {
        return Err(GlsError::EmptyFamily);
    }
    if family.iter().all(GridFunction::is_zero) {
        return Err(GlsError::ZeroFamily);
    }
    let mut knots = grid.to_vec();
    knots.sort_by(|x, y| x.partial_cmp(y).expect("exponents are ordered"));
    knots.dedup();
    let (first, last) = match (knots.first(), knots.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(GlsError::EmptyGrid),
    };
    let log_values = knots
        .iter()
        .map(|&p| {
            family
                .iter()
                .map(|f| lp_norm(f, p))
                .fold(0.0_f64, f64::max)
                .ln()
        })
        .collect();
    let a = match first {
        Exponent::Finite(a) => a,
        Exponent::Infinity => return Err(param("grid", "needs a finite exponent".into())),
    };
    let domain = if knots.len() == 1 {
        // single knot: the domain collapses onto it
        ExponentInterval {
            a,
            b: first,
            right_closed: true,
        }
    } else {
        ExponentInterval {
            a,
            b: last,
            right_closed: true,
        }
    };
    Ok(GeneratingFunction {
        domain,
        kind: GenKind::Natural(NaturalTable { knots, log_values }),
    })
}

fn param(name: &'static str, reason: String) -> GlsError {
    GlsError::InvalidParameter { name, reason }
}

impl GeneratingFunction {
    /// A user-supplied generating function.
    pub fn custom(
        domain: ExponentInterval,
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            domain,
            kind: GenKind::Custom {
                name: name.into(),
                eval: Arc::new(eval),
            },
        }
    }

    pub fn domain(&self) -> &ExponentInterval {
        &self.domain
    }

    pub fn kind(&self) -> &GenKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &str {
        match &self.kind {
            GenKind::Power { .. } => "power",
            GenKind::Boundary { .. } => "boundary",
            GenKind::Degenerate { .. } => "degenerate",
            GenKind::ClassicalGrand { .. } => "classical_grand",
            GenKind::Natural(_) => "natural",
            GenKind::Custom { .. } => "custom",
        }
    }

    /// Same formula on a sub-interval of the current domain.
    pub fn restricted(&self, interval: ExponentInterval) -> Result<Self> {
        let single_knot = self.domain.right_closed && Exponent::Finite(self.domain.a) == self.domain.b;
        if single_knot || !interval.is_within(&self.domain) {
            return Err(GlsError::InvalidParameter {
                name: "interval",
                reason: format!("{interval} is not inside {}", self.domain),
            });
        }
        Ok(Self {
            domain: interval,
            kind: self.kind.clone(),
        })
    }

    /// Exponents that must appear on any grid used with this function.
    pub fn anchor_points(&self) -> Vec<Exponent> {
        match &self.kind {
            GenKind::Degenerate { r } => vec![Exponent::Finite(*r)],
            GenKind::Natural(t) => t.knots.clone(),
            _ => Vec::new(),
        }
    }

    pub fn accepts(&self, p: Exponent) -> bool {
        self.domain.contains(p)
    }

    /// `ψ(p)`, possibly `+∞`.
    pub fn eval(&self, p: Exponent) -> Result<f64> {
        if !self.accepts(p) {
            return Err(GlsError::OutOfDomain {
                p: p.value(),
                domain: self.domain.to_string(),
            });
        }
        Ok(self.eval_unchecked(p))
    }

    pub(crate) fn eval_unchecked(&self, p: Exponent) -> f64 {
        let x = p.value();
        match &self.kind {
            GenKind::Power { m } => x.powf(1.0 / m),
            GenKind::Boundary { b, alpha, beta } => {
                if p == Exponent::Infinity {
                    return f64::INFINITY;
                }
                (x - 1.0).powf(-alpha) * (b - x).powf(-beta)
            }
            GenKind::Degenerate { r } => {
                if x == *r {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            GenKind::ClassicalGrand { q } => (q - x).powf(-1.0 / x),
            GenKind::Natural(table) => table.eval(p),
            GenKind::Custom { eval, .. } => eval(x),
        }
    }

    /// JSON-facing description; custom functions have none.
    pub fn to_spec(&self) -> Option<GenSpec> {
        let interval = Some(self.domain);
        let spec = match &self.kind {
            GenKind::Power { m } => GenSpec::Power { m: *m, interval },
            GenKind::Boundary { b, alpha, beta } => GenSpec::Boundary {
                b: *b,
                alpha: *alpha,
                beta: *beta,
                interval,
            },
            GenKind::Degenerate { r } => GenSpec::Degenerate { r: *r },
            GenKind::ClassicalGrand { q } => GenSpec::ClassicalGrand { q: *q, interval },
            GenKind::Natural(_) | GenKind::Custom { .. } => return None,
        };
        Some(spec)
    }
}

/// Serialized generating-function description, e.g. `{"kind":"power","m":2}`.
///
/// The optional `interval` restricts the function to a sub-interval of its
/// natural domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GenSpec {
    Power {
        m: f64,
        #[serde(default, skip_serializing_if = "Option::is_none", with = "interval_opt")]
        interval: Option<ExponentInterval>,
    },
    Boundary {
        b: f64,
        alpha: f64,
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none", with = "interval_opt")]
        interval: Option<ExponentInterval>,
    },
    Degenerate {
        r: f64,
    },
    ClassicalGrand {
        q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none", with = "interval_opt")]
        interval: Option<ExponentInterval>,
    },
}

impl GenSpec {
    pub fn build(&self) -> Result<GeneratingFunction> {
        let (base, interval) = match self {
            GenSpec::Power { m, interval } => (make_power(*m)?, interval),
            GenSpec::Boundary {
                b,
                alpha,
                beta,
                interval,
            } => (make_boundary(*b, *alpha, *beta)?, interval),
            GenSpec::Degenerate { r } => return make_degenerate(*r),
            GenSpec::ClassicalGrand { q, interval } => (make_classical_grand(*q)?, interval),
        };
        match interval {
            Some(iv) if iv != base.domain() => base.restricted(*iv),
            _ => Ok(base),
        }
    }

    pub fn from_json(text: &str) -> Result<GeneratingFunction> {
        let spec: GenSpec = serde_json::from_str(text)?;
        spec.build()
    }
}

/// Intervals travel as `[a, b]` pairs in JSON, `b` possibly `"inf"`.
pub(crate) mod interval_opt {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &Option<ExponentInterval>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(iv) => (iv.a, iv.b).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<ExponentInterval>, D::Error> {
        let pair: Option<(f64, Exponent)> = Option::deserialize(d)?;
        pair.map(|(a, b)| ExponentInterval::new(a, b).map_err(serde::de::Error::custom))
            .transpose()
    }
}
