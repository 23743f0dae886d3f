//! Evaluation of the crystalline period map on deformation space.
//!
//! A rigid point is a tuple of deformation parameters strictly inside the
//! unit open polydisc (every coordinate of positive valuation). Its image
//! is the projective point with coordinates
//! `phi_i = lim_n p^n b_{nh+i}` built from the universal-deformation
//! coefficients; the limit stabilizes extremely fast on the open polydisc,
//! and the evaluator refuses to return digits it cannot certify.

use alloc::vec::Vec;
use core::fmt;

use crate::formal_groups::gh_universal_coeffs;
use crate::parith::{ArithError, Coeff};
use crate::Rat;

#[derive(Debug, Clone, PartialEq)]
pub enum PeriodError {
    /// A deformation parameter sits on or outside the polydisc boundary.
    RadiusViolation { index: usize },
    /// Successive normalized coordinate vectors never agreed to the
    /// requested precision within the available budget.
    NonConvergence {
        requested: i64,
        achieved: i64,
        n_max: usize,
    },
    /// The input precision cannot support the requested output precision.
    PrecisionBudget { needed: i64, available: i64 },
    /// All coordinates vanished at precision; no projective point.
    NotAPoint,
    Arith(ArithError),
}

impl From<ArithError> for PeriodError {
    fn from(e: ArithError) -> Self {
        PeriodError::Arith(e)
    }
}

impl fmt::Display for PeriodError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodError::RadiusViolation { index } => write!(
                f,
                "deformation parameter u_{} is not inside the open unit polydisc",
                index + 1
            ),
            PeriodError::NonConvergence {
                requested,
                achieved,
                n_max,
            } => write!(
                f,
                "no convergence to precision {requested} (achieved {achieved}) within n_max = {n_max}"
            ),
            PeriodError::PrecisionBudget { needed, available } => write!(
                f,
                "input precision budget too small: needed {needed}, available {available}"
            ),
            PeriodError::NotAPoint => write!(f, "all coordinates vanish at the stated precision"),
            PeriodError::Arith(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PeriodError {}

/// Valuation tag of a deformation parameter: exact rational, `Inf` for the
/// zero value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusVal {
    Fin(Rat),
    Inf,
}

impl RadiusVal {
    pub fn is_positive(&self) -> bool {
        match self {
            RadiusVal::Inf => true,
            RadiusVal::Fin(r) => *r > Rat::from_integer(0),
        }
    }
}

/// A point of the rigid generic fiber of deformation space: `h - 1`
/// exactly-represented parameters with their valuation tags, plus a unit
/// of the coefficient ring fixing the working precision.
#[derive(Clone, Debug)]
pub struct RigidPoint<C: Coeff> {
    h: u32,
    u: Vec<C>,
    radii: Vec<RadiusVal>,
    one: C,
}

impl<C: Coeff> RigidPoint<C> {
    /// Valuation tags are derived from the stored values, so they are
    /// consistent by construction.
    pub fn new(h: u32, u: Vec<C>, one: C) -> Result<Self, ArithError> {
        if h < 1 || u.len() != (h - 1) as usize {
            return Err(ArithError::Invalid(alloc::format!(
                "height {h} needs {} deformation parameters, got {}",
                h.saturating_sub(1),
                u.len()
            )));
        }
        if !one.is_unit() {
            return Err(ArithError::NonUnit {
                valuation: one.valuation().unwrap_or(i64::MAX),
            });
        }
        let radii = u
            .iter()
            .map(|c| match c.valuation() {
                None => RadiusVal::Inf,
                Some(v) => RadiusVal::Fin(Rat::from_integer(v as i128)),
            })
            .collect();
        Ok(RigidPoint { h, u, radii, one })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn u(&self) -> &[C] {
        &self.u
    }

    pub fn radii(&self) -> &[RadiusVal] {
        &self.radii
    }

    pub fn one(&self) -> &C {
        &self.one
    }

    /// Precision budget: the weakest absolute precision among the inputs.
    pub fn budget(&self) -> i64 {
        self.u
            .iter()
            .map(|c| c.abs_prec())
            .chain(core::iter::once(self.one.abs_prec()))
            .min()
            .unwrap_or(self.one.abs_prec())
    }
}

/// `true` exactly when every parameter has strictly positive valuation —
/// the domain on which period evaluation is defined.
pub fn radius_check<C: Coeff>(x: &RigidPoint<C>) -> bool {
    x.radii.iter().all(|r| r.is_positive())
}

/// A point of `P^(h-1)` in canonical form: the pivot coordinate (minimal
/// valuation, ties to the lowest index) is exactly 1, the rest are known
/// modulo the stated precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint<C: Coeff> {
    coords: Vec<C>,
    pivot: usize,
}

impl<C: Coeff> ProjPoint<C> {
    /// Canonicalize raw homogeneous coordinates.
    pub fn new(raw: Vec<C>) -> Result<Self, PeriodError> {
        if raw.is_empty() {
            return Err(PeriodError::NotAPoint);
        }
        let mut pivot: Option<(usize, i64)> = None;
        for (i, c) in raw.iter().enumerate() {
            if let Some(v) = c.valuation() {
                if pivot.is_none_or(|(_, pv)| v < pv) {
                    pivot = Some((i, v));
                }
            }
        }
        let (pi, _) = pivot.ok_or(PeriodError::NotAPoint)?;
        let inv = raw[pi].inv()?;
        let mut coords = Vec::with_capacity(raw.len());
        for (i, c) in raw.iter().enumerate() {
            if i == pi {
                coords.push(c.mul(&inv)?.one_like());
            } else {
                coords.push(c.mul(&inv)?);
            }
        }
        Ok(ProjPoint { coords, pivot: pi })
    }

    pub fn h(&self) -> u32 {
        self.coords.len() as u32
    }

    pub fn coords(&self) -> &[C] {
        &self.coords
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    /// Equality of canonical forms at a stated precision.
    pub fn congruent_at(&self, rhs: &Self, prec: i64) -> bool {
        self.coords.len() == rhs.coords.len()
            && self.pivot == rhs.pivot
            && self
                .coords
                .iter()
                .zip(&rhs.coords)
                .all(|(a, b)| a.reduce_abs_prec(prec).congruent(&b.reduce_abs_prec(prec)))
    }

    /// Equality at the common precision of the two canonical forms.
    pub fn congruent(&self, rhs: &Self) -> bool {
        self.coords.len() == rhs.coords.len()
            && self.pivot == rhs.pivot
            && self
                .coords
                .iter()
                .zip(&rhs.coords)
                .all(|(a, b)| a.congruent(b))
    }

    /// Weakest coordinate precision of the canonical form.
    pub fn min_prec(&self) -> i64 {
        self.coords.iter().map(|c| c.abs_prec()).min().unwrap_or(0)
    }

    /// Forget digits beyond `prec` on every coordinate.
    pub fn reduce_prec(&self, prec: i64) -> Self {
        ProjPoint {
            coords: self
                .coords
                .iter()
                .map(|c| c.reduce_abs_prec(prec))
                .collect(),
            pivot: self.pivot,
        }
    }
}

impl<C: Coeff> fmt::Display for ProjPoint<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, " : ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Result of a period evaluation, with the convergence data callers need
/// for reporting.
#[derive(Clone, Debug)]
pub struct PeriodOutput<C: Coeff> {
    pub point: ProjPoint<C>,
    pub n_max_used: usize,
    pub achieved_prec: i64,
}

/// Normalized coordinate vector at stage `n`: `(p^n b_{nh+i})_{i<h}`.
fn stage_point<C: Coeff>(x: &RigidPoint<C>, n: usize) -> Result<ProjPoint<C>, PeriodError> {
    let h = x.h() as usize;
    let top = n * h + h - 1;
    let b = gh_universal_coeffs(x.h(), x.u(), x.one(), top)?;
    let raw: Vec<C> = (0..h).map(|i| b[n * h + i].mul_p_pow(n as i64)).collect();
    ProjPoint::new(raw)
}

/// Evaluate the period map with a fixed stage cutoff `n`; used by the
/// adaptive driver and by stability checks.
pub fn period_point_at_stage<C: Coeff>(
    x: &RigidPoint<C>,
    n: usize,
) -> Result<ProjPoint<C>, PeriodError> {
    if let Some(i) = x.radii.iter().position(|r| !r.is_positive()) {
        return Err(PeriodError::RadiusViolation { index: i });
    }
    stage_point(x, n)
}

/// Evaluate the period map to `target_prec` certified digits.
///
/// The stage `n` grows until two successive canonical forms agree at the
/// target precision and the doubled stage confirms them; the result is
/// reduced to exactly `target_prec` so it does not depend on the stage at
/// which the loop stopped.
pub fn period_point<C: Coeff>(
    x: &RigidPoint<C>,
    target_prec: i64,
) -> Result<PeriodOutput<C>, PeriodError> {
    if let Some(i) = x.radii.iter().position(|r| !r.is_positive()) {
        return Err(PeriodError::RadiusViolation { index: i });
    }
    if target_prec < 1 {
        return Err(PeriodError::PrecisionBudget {
            needed: 1,
            available: target_prec,
        });
    }
    let budget = x.budget();
    let h = x.h() as i64;
    const N_CAP: usize = 16;
    let mut prev: Option<ProjPoint<C>> = None;
    let mut best_agree: i64 = 0;
    let mut n = 1usize;
    while n <= N_CAP {
        // stage n needs b-indices up to 2n*h + h - 1, each step losing one
        // digit of precision
        let needed = target_prec + (2 * n as i64 + 1) * h + 2;
        if needed > budget {
            return Err(PeriodError::PrecisionBudget {
                needed,
                available: budget,
            });
        }
        let cur = stage_point(x, n)?;
        if cur.min_prec() < target_prec {
            return Err(PeriodError::PrecisionBudget {
                needed: target_prec,
                available: cur.min_prec(),
            });
        }
        if let Some(p) = &prev {
            if p.congruent_at(&cur, target_prec) {
                // confirm against the doubled stage
                let confirm = stage_point(x, 2 * n)?;
                if cur.congruent_at(&confirm, target_prec) {
                    return Ok(PeriodOutput {
                        point: confirm.reduce_prec(target_prec),
                        n_max_used: 2 * n,
                        achieved_prec: target_prec,
                    });
                }
            } else {
                // record how far they do agree, for honest error reporting
                let mut a = target_prec - 1;
                while a > best_agree {
                    if p.congruent_at(&cur, a) {
                        break;
                    }
                    a -= 1;
                }
                best_agree = best_agree.max(a.max(0));
            }
        }
        prev = Some(cur);
        n += 1;
    }
    Err(PeriodError::NonConvergence {
        requested: target_prec,
        achieved: best_agree,
        n_max: N_CAP,
    })
}

/// The Hodge line of the deformation: the kernel line of the
/// Dieudonne-module surjection onto the Lie algebra, read in the constant
/// horizontal basis. Identical output to [`period_point`]; the name is the
/// geometric reading of the same coordinates.
pub fn hodge_line<C: Coeff>(
    x: &RigidPoint<C>,
    target_prec: i64,
) -> Result<PeriodOutput<C>, PeriodError> {
    period_point(x, target_prec)
}
