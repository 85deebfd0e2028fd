//! Finite weighted measure spaces and Lebesgue-Riesz norms on them.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GlsError, Result};

/// Above this exponent `|f|^p` is evaluated as `exp(p ln(|f| / max|f|))`.
const LARGE_EXPONENT: f64 = 50.0;
/// Sums over more points than this use compensated summation.
const COMPENSATED_THRESHOLD: usize = 1000;

/// An exponent `p` in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if value.is_finite() && value >= 1.0 {
            Ok(Exponent::Finite(value))
        } else {
            Err(GlsError::InvalidExponent(value))
        }
    }

    /// `1/p` with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// The value as an `f64`, `f64::INFINITY` for the infinite exponent.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    /// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::ONE,
            Exponent::Finite(1.0) => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = GlsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| GlsError::Malformed(format!("not an exponent: {s:?}")))?;
                Exponent::new(v)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Exponent::new(v),
            Raw::Str(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// A finite set of points carrying strictly positive weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSpace {
    weights: Vec<f64>,
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(GlsError::EmptySpace);
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(GlsError::InvalidWeight { index, value });
        }
        Ok(Self { weights })
    }

    /// Every point has weight 1.
    pub fn counting(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    /// Every point has weight `1/n`.
    pub fn uniform_probability(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        sum(self.weights.iter().copied(), self.weights.len())
    }

    pub fn is_counting(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }
}

/// A real-valued function on a [`MeasureSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    space: MeasureSpace,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(space: MeasureSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(GlsError::LengthMismatch {
                expected: space.size(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GlsError::NonFiniteValue(i));
        }
        Ok(Self { space, values })
    }

    /// Function on the counting measure of matching size.
    pub fn counting(values: Vec<f64>) -> Result<Self> {
        let space = MeasureSpace::counting(values.len())?;
        Self::new(space, values)
    }

    pub fn zeros(space: MeasureSpace) -> Self {
        let values = vec![0.0; space.size()];
        Self { space, values }
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            space: self.space.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn lp_norm(&self, p: Exponent) -> f64 {
        lp_norm(self, p)
    }

    /// Parses `{"weights":[...], "values":[...]}`; missing weights mean counting measure.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GridFunctionDoc = serde_json::from_str(text)?;
        doc.into_function()
    }

    pub fn to_json(&self) -> String {
        let doc = GridFunctionDoc {
            weights: Some(self.space.weights.clone()),
            values: self.values.clone(),
        };
        serde_json::to_string(&doc).expect("grid function serializes")
    }
}

/// Serialized form of a [`GridFunction`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFunctionDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub values: Vec<f64>,
}

impl GridFunctionDoc {
    pub fn into_function(self) -> Result<GridFunction> {
        let space = match self.weights {
            Some(w) => MeasureSpace::new(w)?,
            None => MeasureSpace::counting(self.values.len())?,
        };
        GridFunction::new(space, self.values)
    }
}

/// `(Σ_j |f_j|^p μ(j))^{1/p}`, or `max_j |f_j|` for `p = ∞`.
pub fn lp_norm(f: &GridFunction, p: Exponent) -> f64 {
    weighted_lp_norm(&f.values, f.space.weights(), p)
}

/// Slice form of [`lp_norm`]; `values` and `weights` must have equal length.
pub fn weighted_lp_norm(values: &[f64], weights: &[f64], p: Exponent) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let p = match p {
        Exponent::Infinity => return max,
        Exponent::Finite(p) => p,
    };
    if max == 0.0 {
        return 0.0;
    }
    let n = values.len();
    if p > LARGE_EXPONENT {
        let terms = values.iter().zip(weights).map(|(v, w)| {
            let a = v.abs();
            if a == 0.0 {
                0.0
            } else {
                w * (p * (a / max).ln()).exp()
            }
        });
        max * sum(terms, n).powf(1.0 / p)
    } else if p == 1.0 {
        sum(values.iter().zip(weights).map(|(v, w)| w * v.abs()), n)
    } else {
        let terms = values.iter().zip(weights).map(|(v, w)| w * v.abs().powf(p));
        sum(terms, n).powf(1.0 / p)
    }
}

/// `Σ { μ(j) : |f_j| ≥ t }`.
pub fn tail_function(f: &GridFunction, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(GlsError::NegativeLevel(t));
    }
    let terms = f
        .values
        .iter()
        .zip(f.space.weights())
        .filter(|(v, _)| v.abs() >= t)
        .map(|(_, w)| *w);
    Ok(sum(terms, f.values.len()))
}

fn sum(terms: impl Iterator<Item = f64>, len: usize) -> f64 {
    if len > COMPENSATED_THRESHOLD {
        neumaier_sum(terms)
    } else {
        terms.sum()
    }
}

fn neumaier_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut total = 0.0_f64;
    let mut compensation = 0.0_f64;
    for x in terms {
        let t = total + x;
        if total.abs() >= x.abs() {
            compensation += (total - t) + x;
        } else {
            compensation += (x - t) + total;
        }
        total = t;
    }
    total + compensation
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inf() -> Exponent {
        Exponent::Infinity
    }

    #[test]
    fn constant_one_counting() {
        let f = GridFunction::counting(vec![1.0; 4]).unwrap();
        assert_eq!(lp_norm(&f, Exponent::new(2.0).unwrap()), 2.0);
        assert_eq!(lp_norm(&f, inf()), 1.0);
    }

    #[test]
    fn weighted_cubic_norm() {
        let space = MeasureSpace::new(vec![0.5, 1.0, 2.0]).unwrap();
        let f = GridFunction::new(space, vec![1.0, -2.0, 3.0]).unwrap();
        // 0.5*1 + 1*8 + 2*27 = 62.5
        let expected = 62.5_f64.cbrt();
        let got = lp_norm(&f, Exponent::new(3.0).unwrap());
        assert!((got - expected).abs() < 1e-14 * expected);
        assert!((got - 3.968_502_629_920_498).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(MeasureSpace::new(vec![1.0, 0.0]).is_err());
        assert!(MeasureSpace::new(vec![]).is_err());
        let space = MeasureSpace::counting(3).unwrap();
        assert!(matches!(
            GridFunction::new(space, vec![1.0, 2.0]),
            Err(GlsError::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn tail_examples() {
        let ones = GridFunction::counting(vec![1.0; 3]).unwrap();
        assert_eq!(tail_function(&ones, 0.5).unwrap(), 3.0);
        assert_eq!(tail_function(&ones, 1.5).unwrap(), 0.0);
        let f = GridFunction::counting(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(tail_function(&f, 2.0).unwrap(), 2.0);
        assert_eq!(tail_function(&f, 0.0).unwrap(), 3.0);
        assert!(tail_function(&f, -1.0).is_err());
    }

    #[test]
    fn large_exponent_does_not_overflow() {
        let f = GridFunction::counting(vec![1e10, 3e9, -2.0]).unwrap();
        let v = lp_norm(&f, Exponent::new(1e4).unwrap());
        assert!(v.is_finite());
        assert!((v - 1e10).abs() / 1e10 < 1e-3);
    }

    #[test]
    fn zero_iff_zero_function() {
        let z = GridFunction::counting(vec![0.0; 5]).unwrap();
        for p in [1.0, 2.5, 80.0] {
            assert_eq!(lp_norm(&z, Exponent::new(p).unwrap()), 0.0);
        }
        assert_eq!(lp_norm(&z, inf()), 0.0);
        let f = GridFunction::counting(vec![0.0, 1e-300]).unwrap();
        assert!(lp_norm(&f, Exponent::new(1.0).unwrap()) > 0.0);
    }

    #[test]
    fn compensated_sum_large_space() {
        let n = 5000;
        let f = GridFunction::counting(vec![1.0; n]).unwrap();
        assert_eq!(lp_norm(&f, Exponent::ONE), n as f64);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("2.5".parse::<Exponent>().unwrap(), Exponent::Finite(2.5));
        assert!("0.3".parse::<Exponent>().is_err());
        let json = serde_json::to_string(&vec![Exponent::Finite(2.0), Exponent::Infinity]).unwrap();
        assert_eq!(json, r#"[2.0,"inf"]"#);
        let back: Vec<Exponent> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![Exponent::Finite(2.0), Exponent::Infinity]);
        assert_eq!(Exponent::Finite(4.0).conjugate(), Exponent::Finite(4.0 / 3.0));
        assert_eq!(Exponent::ONE.conjugate(), Exponent::Infinity);
    }

    #[test]
    fn json_defaults_to_counting() {
        let f = GridFunction::from_json(r#"{"values":[1,2,3]}"#).unwrap();
        assert!(f.space().is_counting());
        let g = GridFunction::from_json(r#"{"weights":[0.5,0.5],"values":[1,2]}"#).unwrap();
        assert_eq!(g.space().weights(), &[0.5, 0.5]);
        assert!(GridFunction::from_json(r#"{"weights":[1],"values":[1,2]}"#).is_err());
    }
}
