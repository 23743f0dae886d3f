//! Exact, capped-precision arithmetic for p-adic period computations.
//!
//! The crate is organized around a small arithmetic kernel and the
//! structures built on top of it:
//!
//! - [`parith`] — `Q_p` and `W(F_{p^m})[1/p]` elements with digit-level
//!   Frobenius, plus truncated multivariate power series with composition
//!   and reversion.
//! - [`formal_groups`] — one-dimensional formal group laws: Honda
//!   logarithms, quasi-logarithms, `[p]`-series, height detection, and the
//!   universal deformation coefficients over `W(k)[[u_1, ..., u_{h-1}]]`.
//! - [`isocrystals`] — Frobenius-semilinear modules, Newton polygons, and
//!   Kottwitz-set enumeration.
//! - [`period_map`] — evaluation of the crystalline period map on rigid
//!   points of deformation space, producing canonical projective points.
//! - [`ff_curve`] — rank-1 adic points and the kappa map, Frobenius
//!   fundamental domains, the slope calculus of vector bundles, and
//!   Hecke/period-domain bookkeeping.
//! - [`actions`] — the division-algebra, `GL_h(Q_p)`, and Weil-group
//!   actions on tower points.
//!
//! Everything is exact: no floating point is used anywhere. All values are
//! immutable after construction and safe to share across threads.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod parith;

pub mod matrix;

pub mod formal_groups;

pub mod isocrystals;

pub mod period_map;

pub mod ff_curve;

pub mod actions;

pub use parith::{ArithError, Coeff, FqElem, FqParams, PSeries, Padic, WittElem, WittRing};

/// Exact rational numbers used for slopes, valuations, and radii.
pub type Rat = num_rational::Ratio<i128>;

/// Convenience constructor for a reduced rational.
pub fn rat(num: i128, den: i128) -> Rat {
    Rat::new(num, den)
}
