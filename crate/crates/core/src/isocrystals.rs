//! Frobenius-semilinear modules over `W(F_{p^m})[1/p]` and their slope
//! invariants.
//!
//! Slopes are read off the characteristic polynomial of the `m`-fold
//! linearization `A * sigma(A) * ... * sigma^(m-1)(A)` (an honest linear
//! map), divided by `m`. Only slope data is produced; no cyclic-vector
//! reduction is attempted.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::matrix::Mat;
use crate::parith::{ArithError, Coeff, WittElem, WittRing};
use crate::Rat;

#[derive(Debug, Clone, PartialEq)]
pub enum IsoError {
    Arith(ArithError),
    /// A characteristic-polynomial coefficient is indistinguishable from
    /// zero at a precision that could change the polygon.
    IndeterminateValuation { coefficient: usize, bound: i64 },
    /// The matrix is not invertible at the stated precision.
    Singular,
    InvalidSlopeData(alloc::string::String),
}

impl From<ArithError> for IsoError {
    fn from(e: ArithError) -> Self {
        IsoError::Arith(e)
    }
}

impl fmt::Display for IsoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoError::Arith(e) => write!(f, "{e}"),
            IsoError::IndeterminateValuation { coefficient, bound } => write!(
                f,
                "char-poly coefficient {coefficient} is zero at precision {bound}; polygon indeterminate"
            ),
            IsoError::Singular => write!(f, "matrix singular at the stated precision"),
            IsoError::InvalidSlopeData(m) => write!(f, "invalid slope data: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for IsoError {}

/// Canonical slope decomposition: ascending slopes in lowest terms, each
/// denominator dividing its multiplicity, multiplicities positive.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SlopeData {
    pairs: Vec<(Rat, u32)>,
}

impl SlopeData {
    pub fn new(mut pairs: Vec<(Rat, u32)>) -> Result<Self, IsoError> {
        pairs.retain(|&(_, m)| m > 0);
        pairs.sort_by_key(|a| a.0);
        // merge equal slopes
        let mut merged: Vec<(Rat, u32)> = Vec::with_capacity(pairs.len());
        for (s, m) in pairs {
            match merged.last_mut() {
                Some((ls, lm)) if *ls == s => *lm += m,
                _ => merged.push((s, m)),
            }
        }
        for &(s, m) in &merged {
            let den = *s.denom();
            if den <= 0 || (m as i128) % den != 0 {
                return Err(IsoError::InvalidSlopeData(alloc::format!(
                    "slope {}/{} with multiplicity {m} violates isoclinic integrality",
                    s.numer(),
                    s.denom()
                )));
            }
        }
        let total_deg: Rat = merged
            .iter()
            .map(|&(s, m)| s * Rat::from_integer(m as i128))
            .sum();
        if !total_deg.is_integer() {
            return Err(IsoError::InvalidSlopeData(
                "total degree is not an integer".into(),
            ));
        }
        Ok(SlopeData { pairs: merged })
    }

    pub fn isoclinic(slope: Rat, rank: u32) -> Result<Self, IsoError> {
        SlopeData::new(alloc::vec![(slope, rank)])
    }

    pub fn pairs(&self) -> &[(Rat, u32)] {
        &self.pairs
    }

    /// Total rank `sum(mult)`.
    pub fn rank(&self) -> u32 {
        self.pairs.iter().map(|&(_, m)| m).sum()
    }

    /// Total degree `sum(slope * mult)`, an integer.
    pub fn degree(&self) -> i64 {
        let d: Rat = self
            .pairs
            .iter()
            .map(|&(s, m)| s * Rat::from_integer(m as i128))
            .sum();
        debug_assert!(d.is_integer());
        d.to_integer() as i64
    }

    /// Multiplicity at an exact slope (0 when absent).
    pub fn multiplicity(&self, slope: Rat) -> u32 {
        self.pairs
            .iter()
            .find(|&&(s, _)| s == slope)
            .map_or(0, |&(_, m)| m)
    }

    /// All slopes lie in `[lo, hi]`.
    pub fn slopes_within(&self, lo: Rat, hi: Rat) -> bool {
        self.pairs.iter().all(|&(s, _)| lo <= s && s <= hi)
    }
}

impl fmt::Display for SlopeData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (s, m)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}/{}, {m})", s.numer(), s.denom())?;
        }
        write!(f, "}}")
    }
}

/// A sigma-conjugacy class in the Kottwitz set, recorded by its slope
/// decomposition and total rank.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KottwitzClass {
    slope_data: SlopeData,
    h: u32,
}

impl KottwitzClass {
    pub fn new(slope_data: SlopeData) -> Self {
        let h = slope_data.rank();
        KottwitzClass { slope_data, h }
    }

    pub fn slope_data(&self) -> &SlopeData {
        &self.slope_data
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    /// Membership in `B'(GL_h)`: every slope within `[0, 1]`.
    pub fn in_b_prime(&self) -> bool {
        self.slope_data
            .slopes_within(Rat::from_integer(0), Rat::from_integer(1))
    }
}

/// A semilinear Frobenius module: an invertible matrix of `phi` in a fixed
/// basis, `phi` twisting by the digit Frobenius.
#[derive(Clone, Debug)]
pub struct Isocrystal {
    ring: Arc<WittRing>,
    mat: Mat<WittElem>,
}

impl Isocrystal {
    pub fn new(ring: Arc<WittRing>, mat: Mat<WittElem>) -> Result<Self, IsoError> {
        for e in mat.entries() {
            if e.prime() != ring.p() || e.field_degree() != ring.m() {
                return Err(IsoError::Arith(ArithError::FieldMismatch {
                    left: (e.prime(), e.field_degree()),
                    right: (ring.p(), ring.m()),
                }));
            }
        }
        let det = mat.det()?;
        if det.is_zero() {
            return Err(IsoError::Singular);
        }
        Ok(Isocrystal { ring, mat })
    }

    pub fn ring(&self) -> &Arc<WittRing> {
        &self.ring
    }

    pub fn matrix(&self) -> &Mat<WittElem> {
        &self.mat
    }

    pub fn rank(&self) -> usize {
        self.mat.size()
    }

    /// Matrix of the honest linear map `phi^m`:
    /// `A * sigma(A) * sigma^2(A) * ... * sigma^(m-1)(A)`.
    pub fn linearize(&self) -> Result<Mat<WittElem>, ArithError> {
        let mut acc = self.mat.clone();
        let mut twisted = self.mat.clone();
        for _ in 1..self.ring.m() {
            twisted = twisted.frobenius();
            acc = acc.mul(&twisted)?;
        }
        Ok(acc)
    }

    /// Newton slope decomposition, invariant under sigma-conjugation.
    pub fn newton_polygon(&self) -> Result<SlopeData, IsoError> {
        let lin = self.linearize()?;
        let cp = lin.char_poly()?;
        newton_polygon_of_char_poly(&cp, self.ring.m())
    }

    /// Rank of the `phi^r = p^s` slope component: the multiplicity at
    /// slope `s/r` (0 when that slope is absent).
    pub fn slope_projection_rank(&self, r: u32, s: i64) -> Result<u32, IsoError> {
        if r < 1 {
            return Err(IsoError::Arith(ArithError::Invalid(
                "slope projection needs r >= 1".into(),
            )));
        }
        let polygon = self.newton_polygon()?;
        Ok(polygon.multiplicity(Rat::new(s as i128, r as i128)))
    }
}

/// Newton polygon of a monic polynomial given low-to-high coefficients,
/// slopes divided by `m`. Coefficient valuations that are unknown at a
/// level that could bend the hull are reported, never guessed.
pub fn newton_polygon_of_char_poly(cp: &[WittElem], m: u32) -> Result<SlopeData, IsoError> {
    // known points (i, v(c_i)); zero-at-precision coefficients recorded
    // with their lower bound
    let mut known: Vec<(i128, i128)> = Vec::with_capacity(cp.len());
    let mut unknown: Vec<(usize, i64)> = Vec::new();
    for (i, c) in cp.iter().enumerate() {
        match c.valuation() {
            Some(v) => known.push((i as i128, v as i128)),
            None => unknown.push((i, c.abs_prec())),
        }
    }
    if cp[0].is_zero() {
        return Err(IsoError::IndeterminateValuation {
            coefficient: 0,
            bound: cp[0].abs_prec(),
        });
    }
    // lower convex hull, monotone scan (points already sorted by i)
    let mut hull: Vec<(i128, i128)> = Vec::new();
    for &pt in &known {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b if it lies on or above the segment a -> pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (pt.0 - a.0) * (b.1 - a.1);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    // the hull is only trustworthy if no unknown coefficient could dip
    // below it
    for &(i, bound) in &unknown {
        let x = i as i128;
        let y = hull_height(&hull, x);
        if Rat::from_integer(bound as i128) < y {
            return Err(IsoError::IndeterminateValuation {
                coefficient: i,
                bound,
            });
        }
    }
    // segment slopes ascend left to right; root valuations are their
    // negatives
    let mut pairs: Vec<(Rat, u32)> = Vec::new();
    for w in hull.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let run = x1 - x0;
        let rise = y1 - y0;
        let root_val = Rat::new(-rise, run);
        pairs.push((root_val / Rat::from_integer(m as i128), run as u32));
    }
    SlopeData::new(pairs)
}

fn hull_height(hull: &[(i128, i128)], x: i128) -> Rat {
    for w in hull.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if x0 <= x && x <= x1 {
            return Rat::from_integer(y0) + Rat::new(y1 - y0, x1 - x0) * Rat::from_integer(x - x0);
        }
    }
    // degenerate single-point hull
    Rat::from_integer(hull[0].1)
}

/// All slope data with total rank `h`, total degree `d`, slopes within
/// `[lo, hi]`: the rank-`h` degree-`d` stratum of the Kottwitz set.
/// Deterministic order: lexicographic in the ascending `(slope, mult)`
/// sequence.
pub fn kottwitz_enumerate(h: u32, d: i64, lo: Rat, hi: Rat) -> Vec<KottwitzClass> {
    let mut out = Vec::new();
    let mut current: Vec<(Rat, u32)> = Vec::new();
    rec_enumerate(
        h,
        Rat::from_integer(d as i128),
        None,
        lo,
        hi,
        &mut current,
        &mut out,
    );
    out
}

fn rec_enumerate(
    remaining: u32,
    remaining_deg: Rat,
    last: Option<Rat>,
    lo: Rat,
    hi: Rat,
    current: &mut Vec<(Rat, u32)>,
    out: &mut Vec<KottwitzClass>,
) {
    if remaining == 0 {
        if remaining_deg == Rat::from_integer(0) {
            let sd = SlopeData {
                pairs: current.clone(),
            };
            out.push(KottwitzClass::new(sd));
        }
        return;
    }
    for slope in candidate_slopes(remaining, last, lo, hi) {
        let den = *slope.denom() as u32;
        let mut k = 1u32;
        while k * den <= remaining {
            let mult = k * den;
            let contrib = slope * Rat::from_integer(mult as i128);
            let rest = remaining - mult;
            let rest_deg = remaining_deg - contrib;
            // remaining slopes lie in (slope, hi]
            let min_rest = slope * Rat::from_integer(rest as i128);
            let max_rest = hi * Rat::from_integer(rest as i128);
            let feasible = if rest == 0 {
                rest_deg == Rat::from_integer(0)
            } else {
                rest_deg > min_rest && rest_deg <= max_rest
            };
            if feasible {
                current.push((slope, mult));
                rec_enumerate(rest, rest_deg, Some(slope), lo, hi, current, out);
                current.pop();
            }
            k += 1;
        }
    }
}

fn candidate_slopes(remaining: u32, last: Option<Rat>, lo: Rat, hi: Rat) -> Vec<Rat> {
    let mut cands = Vec::new();
    for den in 1..=remaining as i128 {
        let amin = (lo * Rat::from_integer(den)).ceil().to_integer();
        let amax = (hi * Rat::from_integer(den)).floor().to_integer();
        for a in amin..=amax {
            let r = Rat::new(a, den);
            if *r.denom() != den {
                continue; // not in lowest terms at this denominator
            }
            if let Some(l) = last {
                if r <= l {
                    continue;
                }
            }
            cands.push(r);
        }
    }
    cands.sort();
    cands.dedup();
    cands
}

/// The Dieudonne module of the connected one-dimensional height-`h`
/// group: a rank-`h` matrix over `W(F_{p^h})` sending `e_i` to `e_{i+1}`
/// and `e_h` to `p e_1`. Its polygon is isoclinic of slope `1/h`.
pub fn dieudonne_of_onedim(p: u64, h: u32, prec: i64) -> Result<Isocrystal, IsoError> {
    let ring = WittRing::new(p, h, prec)?;
    let n = h as usize;
    let zero = WittElem::zero(ring.clone(), prec);
    let mut mat = Mat::new(n, alloc::vec![zero; n * n])?;
    for j in 0..n.saturating_sub(1) {
        mat.set(j + 1, j, WittElem::one(ring.clone(), prec));
    }
    mat.set(0, n - 1, WittElem::one(ring.clone(), prec).mul_p_pow(1));
    Isocrystal::new(ring, mat)
}

/// Block-companion matrix model over `W(F_p)` realizing given slope data:
/// each `(a/b, mult)` contributes `mult/b` companion blocks with corner
/// entry `p^a`. Round-trips through `newton_polygon`.
pub fn companion_model(s: &SlopeData, p: u64, prec: i64) -> Result<Isocrystal, IsoError> {
    let ring = WittRing::new(p, 1, prec)?;
    let n = s.rank() as usize;
    if n == 0 {
        return Err(IsoError::InvalidSlopeData("empty slope data".into()));
    }
    let zero = WittElem::zero(ring.clone(), prec);
    let mut mat = Mat::new(n, alloc::vec![zero; n * n])?;
    let mut offset = 0usize;
    for &(slope, mult) in s.pairs() {
        let b = *slope.denom() as usize;
        let a = *slope.numer() as i64;
        for _ in 0..(mult as usize / b) {
            for j in 0..b - 1 {
                mat.set(offset + j + 1, offset + j, WittElem::one(ring.clone(), prec));
            }
            mat.set(
                offset,
                offset + b - 1,
                WittElem::one(ring.clone(), prec).mul_p_pow(a),
            );
            offset += b;
        }
    }
    Isocrystal::new(ring, mat)
}
