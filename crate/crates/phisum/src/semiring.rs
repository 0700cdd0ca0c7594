//! Weight algebras for pathsum computations.
//!
//! A [`Semiring`] supplies the two operations every algorithm in this crate is
//! written against: `add` (path alternatives) and `mul` (path extension),
//! together with their identities. [`Ring`] extends it with a subtraction that
//! undoes `add`, and [`DivisionRing`] with a multiplicative inverse; the
//! cheaper aggregator variants require these extra operations.
//!
//! Six instances are provided:
//!
//! | type           | add          | mul | zero  | one | extra      |
//! |----------------|--------------|-----|-------|-----|------------|
//! | [`Boolean`]    | or           | and | false | true|            |
//! | [`TropicalMin`]| min          | +   | +inf  | 0   |            |
//! | [`TropicalMax`]| max          | +   | -inf  | 0   |            |
//! | [`Real`]       | +            | *   | 0     | 1   | ring, division |
//! | [`Log`]        | log-add-exp  | +   | -inf  | 0   |            |
//! | [`Count`]      | +            | *   | 0     | 1   | ring       |
//!
//! `Log` numerically mirrors `Real` through `exp`, but it is deliberately not
//! declared a ring here: subtracting in the log domain is unstable, so the
//! general (undo-based) aggregator is the right tool for it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A token that could not be read as a weight of the named semiring.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {semiring} weight {token:?}")]
pub struct WeightParseError {
    pub semiring: &'static str,
    pub token: String,
}

impl WeightParseError {
    fn new(semiring: &'static str, token: &str) -> Self {
        Self {
            semiring,
            token: token.to_string(),
        }
    }
}

/// A semiring: a commutative monoid `(add, zero)` and a monoid `(mul, one)`
/// where `mul` distributes over `add` and `zero` annihilates `mul`.
pub trait Semiring:
    Copy + Clone + std::fmt::Debug + std::fmt::Display + PartialEq + Send + Sync + 'static
{
    /// Runtime tag for reports and dispatch.
    const KIND: SemiringKind;
    /// Name used in reports and error messages.
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    /// Reads one whitespace-delimited weight token.
    fn parse_token(token: &str) -> Result<Self, WeightParseError>;

    /// Draws a random weight that is not `zero`. Floating-point instances
    /// draw from dyadic grids so that sums and differences of sampled
    /// weights stay exactly representable.
    fn sample_nonzero<R: rand::Rng + ?Sized>(rng: &mut R) -> Self;

    /// Equality up to the verification tolerance pinned for this semiring:
    /// exact for the discrete instances, relative 1e-9 (with floor 1) for
    /// [`Real`], absolute 1e-6 for [`Log`].
    fn agrees(&self, other: &Self) -> bool {
        self == other
    }
}

/// A semiring whose `add` is invertible: `sub(add(a, b), b) == a`.
pub trait Ring: Semiring {
    fn sub(self, other: Self) -> Self;
}

/// A ring whose nonzero elements have multiplicative inverses.
pub trait DivisionRing: Ring {
    /// Multiplicative inverse. Callers must not pass `zero`.
    fn inv(self) -> Self;
}

fn parse_f64(semiring: &'static str, token: &str) -> Result<f64, WeightParseError> {
    match token.parse::<f64>() {
        Ok(v) if !v.is_nan() => Ok(v),
        _ => Err(WeightParseError::new(semiring, token)),
    }
}

/// Relative comparison with an absolute floor of 1, so values near an exact
/// zero are still compared meaningfully.
pub fn approx_eq_rel(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

// ---------------------------------------------------------------------------
// Boolean
// ---------------------------------------------------------------------------

/// Reachability weights: `add` = or, `mul` = and.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Boolean(pub bool);

impl std::fmt::Display for Boolean {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

impl Semiring for Boolean {
    const KIND: SemiringKind = SemiringKind::Boolean;
    const NAME: &'static str = "boolean";

    fn zero() -> Self {
        Boolean(false)
    }
    fn one() -> Self {
        Boolean(true)
    }
    fn add(self, other: Self) -> Self {
        Boolean(self.0 || other.0)
    }
    fn mul(self, other: Self) -> Self {
        Boolean(self.0 && other.0)
    }

    fn parse_token(token: &str) -> Result<Self, WeightParseError> {
        match token {
            "0" => Ok(Boolean(false)),
            "1" => Ok(Boolean(true)),
            _ => Err(WeightParseError::new(Self::NAME, token)),
        }
    }

    fn sample_nonzero<R: rand::Rng + ?Sized>(_rng: &mut R) -> Self {
        Boolean(true)
    }
}

// ---------------------------------------------------------------------------
// Tropical
// ---------------------------------------------------------------------------

/// Shortest-path weights: `add` = min, `mul` = +, `zero` = +inf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TropicalMin(pub f64);

impl std::fmt::Display for TropicalMin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Semiring for TropicalMin {
    const KIND: SemiringKind = SemiringKind::TropicalMin;
    const NAME: &'static str = "tropical-min";

    fn zero() -> Self {
        TropicalMin(f64::INFINITY)
    }
    fn one() -> Self {
        TropicalMin(0.0)
    }
    fn add(self, other: Self) -> Self {
        TropicalMin(self.0.min(other.0))
    }
    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        TropicalMin(self.0 + other.0)
    }

    fn parse_token(token: &str) -> Result<Self, WeightParseError> {
        parse_f64(Self::NAME, token).map(TropicalMin)
    }

    fn sample_nonzero<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        TropicalMin(rng.gen_range(0..=64) as f64 / 16.0)
    }
}

/// Longest-path weights: `add` = max, `mul` = +, `zero` = -inf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TropicalMax(pub f64);

impl std::fmt::Display for TropicalMax {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Semiring for TropicalMax {
    const KIND: SemiringKind = SemiringKind::TropicalMax;
    const NAME: &'static str = "tropical-max";

    fn zero() -> Self {
        TropicalMax(f64::NEG_INFINITY)
    }
    fn one() -> Self {
        TropicalMax(0.0)
    }
    fn add(self, other: Self) -> Self {
        TropicalMax(self.0.max(other.0))
    }
    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        TropicalMax(self.0 + other.0)
    }

    fn parse_token(token: &str) -> Result<Self, WeightParseError> {
        parse_f64(Self::NAME, token).map(TropicalMax)
    }

    fn sample_nonzero<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        TropicalMax(rng.gen_range(0..=64) as f64 / 16.0)
    }
}

// ---------------------------------------------------------------------------
// Real
// ---------------------------------------------------------------------------

/// Probability-style weights over f64 with ordinary arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl std::fmt::Display for Real {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Semiring for Real {
    const KIND: SemiringKind = SemiringKind::Real;
    const NAME: &'static str = "real";

    fn zero() -> Self {
        Real(0.0)
    }
    fn one() -> Self {
        Real(1.0)
    }
    fn add(self, other: Self) -> Self {
        Real(self.0 + other.0)
    }
    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Real(self.0 * other.0)
    }

    fn parse_token(token: &str) -> Result<Self, WeightParseError> {
        parse_f64(Self::NAME, token).map(Real)
    }

    fn sample_nonzero<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        Real(rng.gen_range(1..=16) as f64 / 16.0)
    }

    fn agrees(&self, other: &Self) -> bool {
        approx_eq_rel(self.0, other.0, 1e-9)
    }
}

impl Ring for Real {
    fn sub(self, other: Self) -> Self {
        Real(self.0 - other.0)
    }
}

impl DivisionRing for Real {
    fn inv(self) -> Self {
        Real(1.0 / self.0)
    }
}

// ---------------------------------------------------------------------------
// Log
// ---------------------------------------------------------------------------

/// Log-domain probabilities: `add` = log-add-exp, `mul` = +, `zero` = -inf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Log(pub f64);

impl std::fmt::Display for Log {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Semiring for Log {
    const KIND: SemiringKind = SemiringKind::Log;
    const NAME: &'static str = "log";

    fn zero() -> Self {
        Log(f64::NEG_INFINITY)
    }
    fn one() -> Self {
        Log(0.0)
    }
    fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let m = self.0.max(other.0);
        Log(m + ((self.0 - m).exp() + (other.0 - m).exp()).ln())
    }
    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Log(self.0 + other.0)
    }

    fn parse_token(token: &str) -> Result<Self, WeightParseError> {
        parse_f64(Self::NAME, token).map(Log)
    }

    fn sample_nonzero<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        Log(rng.gen_range(-32..=0) as f64 / 16.0)
    }

    fn agrees(&self, other: &Self) -> bool {
        self.0 == other.0 || (self.0 - other.0).abs() <= 1e-6
    }
}

// ---------------------------------------------------------------------------
// Count
// ---------------------------------------------------------------------------

/// Exact integer path counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Count(pub i64);

impl std::fmt::Display for Count {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Semiring for Count {
    const KIND: SemiringKind = SemiringKind::Count;
    const NAME: &'static str = "count";

    fn zero() -> Self {
        Count(0)
    }
    fn one() -> Self {
        Count(1)
    }
    fn add(self, other: Self) -> Self {
        Count(self.0 + other.0)
    }
    fn mul(self, other: Self) -> Self {
        Count(self.0 * other.0)
    }

    fn parse_token(token: &str) -> Result<Self, WeightParseError> {
        token
            .parse::<i64>()
            .map(Count)
            .map_err(|_| WeightParseError::new(Self::NAME, token))
    }

    fn sample_nonzero<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        Count(rng.gen_range(1..=3))
    }
}

impl Ring for Count {
    fn sub(self, other: Self) -> Self {
        Count(self.0 - other.0)
    }
}

// ---------------------------------------------------------------------------
// Runtime selection
// ---------------------------------------------------------------------------

/// Runtime name of a weight algebra, for CLI dispatch and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemiringKind {
    Boolean,
    TropicalMin,
    TropicalMax,
    Real,
    Log,
    Count,
}

impl SemiringKind {
    pub const ALL: [SemiringKind; 6] = [
        SemiringKind::Boolean,
        SemiringKind::TropicalMin,
        SemiringKind::TropicalMax,
        SemiringKind::Real,
        SemiringKind::Log,
        SemiringKind::Count,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SemiringKind::Boolean => Boolean::NAME,
            SemiringKind::TropicalMin => TropicalMin::NAME,
            SemiringKind::TropicalMax => TropicalMax::NAME,
            SemiringKind::Real => Real::NAME,
            SemiringKind::Log => Log::NAME,
            SemiringKind::Count => Count::NAME,
        }
    }

    /// True for the instances that implement [`Ring`].
    pub fn is_ring(self) -> bool {
        matches!(self, SemiringKind::Real | SemiringKind::Count)
    }
}

impl std::fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SemiringKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "boolean" => Ok(SemiringKind::Boolean),
            "tropical-min" => Ok(SemiringKind::TropicalMin),
            "tropical-max" => Ok(SemiringKind::TropicalMax),
            "real" => Ok(SemiringKind::Real),
            "log" => Ok(SemiringKind::Log),
            "count" => Ok(SemiringKind::Count),
            _ => Err(format!(
                "unknown semiring {s:?} (expected one of: boolean, tropical-min, \
                 tropical-max, real, log, count)"
            )),
        }
    }
}

/// Expands `$body` once per semiring, with `$W` bound to the instance type
/// selected by `$kind`.
#[macro_export]
macro_rules! dispatch_semiring {
    ($kind:expr, $W:ident => $body:expr) => {
        match $kind {
            $crate::semiring::SemiringKind::Boolean => {
                type $W = $crate::semiring::Boolean;
                $body
            }
            $crate::semiring::SemiringKind::TropicalMin => {
                type $W = $crate::semiring::TropicalMin;
                $body
            }
            $crate::semiring::SemiringKind::TropicalMax => {
                type $W = $crate::semiring::TropicalMax;
                $body
            }
            $crate::semiring::SemiringKind::Real => {
                type $W = $crate::semiring::Real;
                $body
            }
            $crate::semiring::SemiringKind::Log => {
                type $W = $crate::semiring::Log;
                $body
            }
            $crate::semiring::SemiringKind::Count => {
                type $W = $crate::semiring::Count;
                $body
            }
        }
    };
}
