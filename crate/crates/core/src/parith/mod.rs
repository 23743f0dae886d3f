//! Precision-tracked exact arithmetic: `Q_p`, `W(F_{p^m})[1/p]`, and
//! truncated power series.
//!
//! All elements follow the absolute-precision model: a value is known
//! modulo `p^N` for a stated integer `N`. Arithmetic propagates precision
//! soundly — the residue class of every result contains the exact answer.
//! The canonical zero carries valuation `+inf` (represented as `None`)
//! together with the precision at which it is indistinguishable from zero.

mod fq;
mod padic;
mod series;
mod witt;

pub use fq::{FqElem, FqParams};
pub use padic::Padic;
pub use series::PSeries;
pub use witt::{WittElem, WittRing};

use alloc::string::String;
use core::fmt;

/// Errors raised by the arithmetic kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// Two operands live over different primes.
    PrimeMismatch { left: u64, right: u64 },
    /// Two operands live over different residue fields.
    FieldMismatch {
        left: (u64, u32),
        right: (u64, u32),
    },
    /// Inverse of an element indistinguishable from zero at its precision.
    DivisionByZero,
    /// A unit was required (valuation zero) but the element has positive
    /// or negative valuation.
    NonUnit { valuation: i64 },
    /// No modulus is shipped for this residue field.
    UnsupportedField { p: u64, m: u32 },
    /// An operation ran out of precision before producing the requested
    /// number of digits.
    PrecisionExhausted { needed: i64, available: i64 },
    /// An exponent was too large to evaluate and could not be resolved by
    /// valuation bookkeeping.
    ExponentOverflow,
    /// Series or matrix operands have incompatible shapes.
    ShapeMismatch(String),
    /// Composition argument has a nonzero constant term.
    ConstantTerm,
    /// Input violated a documented precondition.
    Invalid(String),
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::PrimeMismatch { left, right } => {
                write!(f, "prime mismatch: {left} vs {right}")
            }
            ArithError::FieldMismatch { left, right } => write!(
                f,
                "residue field mismatch: F_{}^{} vs F_{}^{}",
                left.0, left.1, right.0, right.1
            ),
            ArithError::DivisionByZero => {
                write!(f, "inverse of a value indistinguishable from zero")
            }
            ArithError::NonUnit { valuation } => {
                write!(f, "unit required, found valuation {valuation}")
            }
            ArithError::UnsupportedField { p, m } => {
                write!(f, "no shipped modulus for F_{p}^{m}")
            }
            ArithError::PrecisionExhausted { needed, available } => write!(
                f,
                "precision exhausted: needed {needed} digits, have {available}"
            ),
            ArithError::ExponentOverflow => write!(f, "exponent too large to evaluate"),
            ArithError::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            ArithError::ConstantTerm => {
                write!(f, "composition argument has a nonzero constant term")
            }
            ArithError::Invalid(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ArithError {}

/// Saturation bound for valuations and precisions. Powers whose valuation
/// exceeds this are collapsed to the canonical zero at this precision.
pub const PREC_CAP: i64 = 1 << 40;

/// Shared contract of the coefficient rings (`Padic` and `WittElem`).
///
/// Elements are self-describing: each carries its prime, residue-field
/// parameters, and absolute precision, so no separate ring handle is
/// threaded through generic code.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn prime(&self) -> u64;

    /// Residue-field exponent (`1` for `Q_p`).
    fn field_degree(&self) -> u32;

    /// Absolute precision: the element is known modulo `p^N`.
    fn abs_prec(&self) -> i64;

    /// `None` encodes valuation `+inf` (zero at the stated precision).
    fn valuation(&self) -> Option<i64>;

    fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    fn is_integral(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }

    /// Canonical zero with the same ring parameters and precision.
    fn zero_like(&self) -> Self;

    /// One with the same ring parameters, at the element's relative precision.
    fn one_like(&self) -> Self;

    /// One with the same ring parameters at a chosen absolute precision
    /// (still subject to any ring-level precision cap).
    fn one_at(&self, abs_prec: i64) -> Self;

    fn add(&self, rhs: &Self) -> Result<Self, ArithError>;

    fn neg(&self) -> Self;

    fn sub(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Result<Self, ArithError>;

    fn inv(&self) -> Result<Self, ArithError>;

    fn div(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.mul(&rhs.inv()?)
    }

    /// Multiply by `p^k`; lowers or raises valuation and absolute precision
    /// together, preserving the digit list.
    fn mul_p_pow(&self, k: i64) -> Self;

    /// Multiply by an exact (infinite-precision) integer.
    fn mul_int(&self, n: i64) -> Self;

    /// Raise to a nonnegative integer power, with valuation bookkeeping for
    /// exponents too large to evaluate directly.
    fn pow_u(&self, e: u128) -> Result<Self, ArithError>;

    /// Digit-level Frobenius; the identity on `Q_p`.
    fn frobenius(&self) -> Self;

    /// `n`-th Frobenius iterate, `n` possibly negative (Frobenius has order
    /// `m` on `W(F_{p^m})`).
    fn frobenius_iter(&self, n: i64) -> Self {
        let m = self.field_degree() as i64;
        let k = n.rem_euclid(m);
        let mut out = self.clone();
        for _ in 0..k {
            out = out.frobenius();
        }
        out
    }

    /// Forget digits beyond absolute precision `n` (no-op when `n` is not
    /// below the current precision).
    fn reduce_abs_prec(&self, n: i64) -> Self;

    /// Equality at the common precision: the difference is indistinguishable
    /// from zero.
    fn congruent(&self, rhs: &Self) -> bool {
        match self.sub(rhs) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }

    /// Relative precision: number of known digits of the unit part.
    fn rel_prec(&self) -> i64 {
        match self.valuation() {
            Some(v) => self.abs_prec() - v,
            None => 0,
        }
    }
}
