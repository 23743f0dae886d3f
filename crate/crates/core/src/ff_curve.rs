//! Discrete geometry of the Fargues-Fontaine curve at desk scale.
//!
//! Rank-1 adic points are stored as exact rational log-radii, the kappa
//! invariant is their quotient, and Frobenius acts on it by multiplication
//! by `p`. Vector bundles are canonical multisets of slopes `O(lambda)`
//! with the usual rank/degree calculus, and modifications are tracked by
//! their numeric invariants (rank equality, degree drop = length). No
//! floating point anywhere: kappa equivariance is exact.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::isocrystals::{kottwitz_enumerate, SlopeData};
use crate::parith::{ArithError, Coeff};
use crate::period_map::{period_point, PeriodError, ProjPoint, RigidPoint};
use crate::Rat;

#[derive(Debug, Clone, PartialEq)]
pub enum FfError {
    /// The non-analytic point `x_k` has no well-defined kappa.
    NonAnalyticPoint,
    /// Fundamental-domain reduction needs a point of `Y` (both radii
    /// finite).
    NotYPoint,
    /// Log-radii must be positive (or infinite).
    InvalidRadius(String),
    InvalidBundle(String),
    Arith(ArithError),
}

impl From<ArithError> for FfError {
    fn from(e: ArithError) -> Self {
        FfError::Arith(e)
    }
}

impl fmt::Display for FfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FfError::NonAnalyticPoint => {
                write!(f, "the non-analytic point has no well-defined kappa")
            }
            FfError::NotYPoint => write!(f, "fundamental domain is defined for Y-points only"),
            FfError::InvalidRadius(m) => write!(f, "invalid radius: {m}"),
            FfError::InvalidBundle(m) => write!(f, "invalid bundle: {m}"),
            FfError::Arith(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FfError {}

/// An element of `(0, inf]` in exact arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtRat {
    Fin(Rat),
    Inf,
}

impl ExtRat {
    pub fn finite(num: i128, den: i128) -> Self {
        ExtRat::Fin(Rat::new(num, den))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRat::Fin(_))
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Fin(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ExtRat::Inf => write!(f, "inf"),
        }
    }
}

/// Classification of rank-1 points of `Spa(W(O_{C-flat}))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointTag {
    /// Both radii finite: a point of `Y`.
    Y,
    /// `|p| = 0`: the `p = 0` axis, kappa 0.
    PAxis,
    /// `|pi| = 0`: the pseudo-uniformizer axis, kappa infinite.
    WAxis,
    /// Both vanish: the unique non-analytic point.
    Xk,
}

/// A rank-1 adic point recorded by its log-radii:
/// `|p(x)| = p^(-log_p)` and `|w(x)| = p^(-log_w)`, each positive or
/// infinite. The tag is always derived, never stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdicPoint {
    prime: u64,
    log_p: ExtRat,
    log_w: ExtRat,
}

impl AdicPoint {
    pub fn new(prime: u64, log_p: ExtRat, log_w: ExtRat) -> Result<Self, FfError> {
        for (name, r) in [("log_p", &log_p), ("log_w", &log_w)] {
            if let ExtRat::Fin(v) = r {
                if *v <= Rat::from_integer(0) {
                    return Err(FfError::InvalidRadius(alloc::format!(
                        "{name} must be positive, got {}/{}",
                        v.numer(),
                        v.denom()
                    )));
                }
            }
        }
        Ok(AdicPoint {
            prime,
            log_p,
            log_w,
        })
    }

    /// The untilt point coming from the standard surjection of p-adic
    /// Hodge theory; satisfies `kappa = 1`.
    pub fn untilt(prime: u64) -> Self {
        AdicPoint {
            prime,
            log_p: ExtRat::finite(1, 1),
            log_w: ExtRat::finite(1, 1),
        }
    }

    /// The unique non-analytic point.
    pub fn non_analytic(prime: u64) -> Self {
        AdicPoint {
            prime,
            log_p: ExtRat::Inf,
            log_w: ExtRat::Inf,
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn log_p(&self) -> ExtRat {
        self.log_p
    }

    pub fn log_w(&self) -> ExtRat {
        self.log_w
    }

    pub fn tag(&self) -> PointTag {
        match (self.log_p, self.log_w) {
            (ExtRat::Fin(_), ExtRat::Fin(_)) => PointTag::Y,
            (ExtRat::Inf, ExtRat::Fin(_)) => PointTag::PAxis,
            (ExtRat::Fin(_), ExtRat::Inf) => PointTag::WAxis,
            (ExtRat::Inf, ExtRat::Inf) => PointTag::Xk,
        }
    }
}

/// The kappa invariant `log|w| / log|p|` in `[0, inf]`; undefined at the
/// non-analytic point.
pub fn kappa(x: &AdicPoint) -> Result<ExtRat, FfError> {
    match x.tag() {
        PointTag::Xk => Err(FfError::NonAnalyticPoint),
        PointTag::PAxis => Ok(ExtRat::Fin(Rat::from_integer(0))),
        PointTag::WAxis => Ok(ExtRat::Inf),
        PointTag::Y => match (x.log_w, x.log_p) {
            (ExtRat::Fin(w), ExtRat::Fin(p)) => Ok(ExtRat::Fin(w / p)),
            _ => unreachable!("Y-points have finite radii"),
        },
    }
}

/// The `n`-th Frobenius move: `log_w` scales by `p^n`, so kappa scales by
/// `p^n`. Tags are preserved.
pub fn frobenius_move(x: &AdicPoint, n: i64) -> Result<AdicPoint, FfError> {
    let scale = p_power_rat(x.prime, n)?;
    let log_w = match x.log_w {
        ExtRat::Inf => ExtRat::Inf,
        ExtRat::Fin(r) => ExtRat::Fin(r * scale),
    };
    Ok(AdicPoint {
        prime: x.prime,
        log_p: x.log_p,
        log_w,
    })
}

fn p_power_rat(p: u64, n: i64) -> Result<Rat, FfError> {
    let e = n.unsigned_abs() as u32;
    let pw = (p as i128)
        .checked_pow(e)
        .ok_or(FfError::Arith(ArithError::ExponentOverflow))?;
    Ok(if n >= 0 {
        Rat::from_integer(pw)
    } else {
        Rat::new(1, pw)
    })
}

/// The canonical curve representative of a Y-point: the unique Frobenius
/// translate with `kappa in [1, p)`, together with the move that reaches
/// it.
pub fn fundamental_domain(x: &AdicPoint) -> Result<(AdicPoint, i64), FfError> {
    if x.tag() != PointTag::Y {
        return Err(FfError::NotYPoint);
    }
    let k = match kappa(x)? {
        ExtRat::Fin(r) => r,
        ExtRat::Inf => return Err(FfError::NotYPoint),
    };
    let p = Rat::from_integer(x.prime as i128);
    let one = Rat::from_integer(1);
    let mut r = k;
    let mut n = 0i64;
    while r < one {
        r *= p;
        n += 1;
    }
    while r >= p {
        r /= p;
        n -= 1;
    }
    Ok((frobenius_move(x, n)?, n))
}

/// A vector bundle on the curve: a canonical multiset of slopes, ordered
/// descending, `O(d/r)` of rank `r` and degree `d` per copy.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BundleFF {
    summands: Vec<(Rat, u32)>,
}

impl BundleFF {
    pub fn new(summands: Vec<(Rat, u32)>) -> Result<Self, FfError> {
        let mut s: Vec<(Rat, u32)> = summands.into_iter().filter(|&(_, m)| m > 0).collect();
        if s.is_empty() {
            return Err(FfError::InvalidBundle("a bundle has rank >= 1".into()));
        }
        s.sort_by_key(|&(slope, _)| core::cmp::Reverse(slope));
        let mut merged: Vec<(Rat, u32)> = Vec::with_capacity(s.len());
        for (sl, m) in s {
            match merged.last_mut() {
                Some((ls, lm)) if *ls == sl => *lm += m,
                _ => merged.push((sl, m)),
            }
        }
        Ok(BundleFF { summands: merged })
    }

    /// The stable bundle `O(lambda)`.
    pub fn line(slope: Rat) -> Self {
        BundleFF {
            summands: alloc::vec![(slope, 1)],
        }
    }

    /// The trivial bundle `O(0)^h`.
    pub fn trivial(h: u32) -> Self {
        BundleFF {
            summands: alloc::vec![(Rat::from_integer(0), h)],
        }
    }

    pub fn summands(&self) -> &[(Rat, u32)] {
        &self.summands
    }

    pub fn rank(&self) -> i64 {
        self.summands
            .iter()
            .map(|&(s, m)| (*s.denom() as i64) * m as i64)
            .sum()
    }

    pub fn degree(&self) -> i64 {
        self.summands
            .iter()
            .map(|&(s, m)| (*s.numer() as i64) * m as i64)
            .sum()
    }

    pub fn slope(&self) -> Rat {
        Rat::new(self.degree() as i128, self.rank() as i128)
    }

    /// `(rank, degree, slope)` in one call.
    pub fn rank_deg_slope(&self) -> (i64, i64, Rat) {
        (self.rank(), self.degree(), self.slope())
    }

    /// Slope negation on every summand.
    pub fn dual(&self) -> Self {
        BundleFF::new(self.summands.iter().map(|&(s, m)| (-s, m)).collect())
            .expect("dual preserves rank")
    }

    pub fn direct_sum(&self, rhs: &Self) -> Self {
        let mut s = self.summands.clone();
        s.extend_from_slice(&rhs.summands);
        BundleFF::new(s).expect("sum of bundles is nonempty")
    }

    /// Bilinear tensor: `O(a) tensor O(b)` contributes slope `a + b` with
    /// total rank `r_a * r_b` per pair of copies.
    pub fn tensor(&self, rhs: &Self) -> Result<Self, FfError> {
        let mut out: Vec<(Rat, u32)> = Vec::new();
        for &(sa, ma) in &self.summands {
            for &(sb, mb) in &rhs.summands {
                let s = sa + sb;
                let total_rank =
                    (*sa.denom() as i64) * (*sb.denom() as i64) * ma as i64 * mb as i64;
                let rs = *s.denom() as i64;
                if total_rank % rs != 0 {
                    return Err(FfError::InvalidBundle(alloc::format!(
                        "tensor rank {total_rank} not divisible by rank({s})"
                    )));
                }
                out.push((s, (total_rank / rs) as u32));
            }
        }
        BundleFF::new(out)
    }

    /// Harder-Narasimhan polygon: vertices of the concave path from
    /// `(0, 0)` to `(rank, degree)` walking summands by descending slope.
    pub fn hn_polygon(&self) -> Vec<(i64, i64)> {
        let mut verts = alloc::vec![(0i64, 0i64)];
        let mut x = 0i64;
        let mut y = 0i64;
        for &(s, m) in &self.summands {
            x += (*s.denom() as i64) * m as i64;
            y += (*s.numer() as i64) * m as i64;
            verts.push((x, y));
        }
        verts
    }

    /// Semistable bundles are the isoclinic ones: one HN segment.
    pub fn is_semistable(&self) -> bool {
        self.summands.len() == 1
    }
}

impl fmt::Display for BundleFF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, m)) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *s.denom() == 1 {
                write!(f, "O({})", s.numer())?;
            } else {
                write!(f, "O({}/{})", s.numer(), s.denom())?;
            }
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

/// Slope-preserving translation of isocrystal slope data into a bundle:
/// each `(lambda = s/r, mult)` becomes `O(lambda)^(mult/r)`. The sign
/// convention is centralized here.
pub fn bundle_from_isocrystal(s: &SlopeData) -> BundleFF {
    let summands = s
        .pairs()
        .iter()
        .map(|&(slope, mult)| (slope, mult / (*slope.denom() as u32)))
        .collect();
    BundleFF::new(summands).expect("slope data has positive rank")
}

/// Modification locus label; the standard choice is the point at infinity.
#[derive(Clone, PartialEq, Eq, Debug)]
#[derive(Default)]
pub enum Locus {
    #[default]
    Infinity,
    Labeled(String),
}


impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locus::Infinity => write!(f, "infinity"),
            Locus::Labeled(s) => write!(f, "{s}"),
        }
    }
}

/// A Hecke triple `(E, F, f)` tracked by its numeric invariants: the
/// actual isomorphism away from the locus is not represented.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModificationTriple {
    pub e: BundleFF,
    pub f: BundleFF,
    pub locus: Locus,
    pub length: u32,
}

impl ModificationTriple {
    pub fn new(e: BundleFF, f: BundleFF, length: u32) -> Self {
        ModificationTriple {
            e,
            f,
            locus: Locus::Infinity,
            length,
        }
    }

    /// First leg of the Hecke correspondence.
    pub fn leg_e(&self) -> &BundleFF {
        &self.e
    }

    /// Second (forgetting) leg of the Hecke correspondence.
    pub fn leg_f(&self) -> &BundleFF {
        &self.f
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeckeError {
    RankMismatch { e_rank: i64, f_rank: i64 },
    DegreeLengthMismatch { e_deg: i64, f_deg: i64, length: u32 },
}

impl fmt::Display for HeckeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeckeError::RankMismatch { e_rank, f_rank } => {
                write!(f, "rank mismatch: rank(E) = {e_rank}, rank(F) = {f_rank}")
            }
            HeckeError::DegreeLengthMismatch {
                e_deg,
                f_deg,
                length,
            } => write!(
                f,
                "degree/length mismatch: deg(E) - deg(F) = {} but length = {length}",
                e_deg - f_deg
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for HeckeError {}

/// A triple that passed validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedModification(ModificationTriple);

impl ValidatedModification {
    pub fn triple(&self) -> &ModificationTriple {
        &self.0
    }

    pub fn into_triple(self) -> ModificationTriple {
        self.0
    }
}

/// Accept exactly the triples with `rank(E) = rank(F)` and
/// `deg(E) - deg(F) = length`; each failure is a distinct error.
pub fn hecke_validate(t: &ModificationTriple) -> Result<ValidatedModification, HeckeError> {
    let (er, fr) = (t.e.rank(), t.f.rank());
    if er != fr {
        return Err(HeckeError::RankMismatch {
            e_rank: er,
            f_rank: fr,
        });
    }
    let (ed, fd) = (t.e.degree(), t.f.degree());
    if ed - fd != t.length as i64 {
        return Err(HeckeError::DegreeLengthMismatch {
            e_deg: ed,
            f_deg: fd,
            length: t.length,
        });
    }
    Ok(ValidatedModification(t.clone()))
}

/// All bundle classes of one-dimensional height-`h` p-divisible groups up
/// to isogeny: the image of the rank-`h` degree-1 Kottwitz stratum. There
/// are exactly `h` of them.
pub fn pdiv_bundle_classes(h: u32) -> Vec<BundleFF> {
    kottwitz_enumerate(h, 1, Rat::from_integer(0), Rat::from_integer(1))
        .iter()
        .map(|c| bundle_from_isocrystal(c.slope_data()))
        .collect()
}

/// The period-domain fiber over a bundle class: the projective space of
/// its fiber at the marked point, of dimension `rank - 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PerDomFiber {
    pub base: BundleFF,
    pub fiber_dim: u32,
}

pub fn perdom_fiber(e: &BundleFF) -> PerDomFiber {
    PerDomFiber {
        base: e.clone(),
        fiber_dim: (e.rank() - 1) as u32,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GlobalError {
    Period(PeriodError),
    Hecke(HeckeError),
}

impl From<PeriodError> for GlobalError {
    fn from(e: PeriodError) -> Self {
        GlobalError::Period(e)
    }
}

impl From<HeckeError> for GlobalError {
    fn from(e: HeckeError) -> Self {
        GlobalError::Hecke(e)
    }
}

impl fmt::Display for GlobalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalError::Period(e) => write!(f, "{e}"),
            GlobalError::Hecke(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GlobalError {}

/// The desk-scale global period point of a deformation: the validated
/// Hecke triple of its group, the base bundle class, the period-domain
/// fiber over it, and the local period point sitting in that fiber.
#[derive(Clone, Debug)]
pub struct GlobalPoint<C: Coeff> {
    pub triple: ModificationTriple,
    pub base: BundleFF,
    pub fiber: PerDomFiber,
    pub point: ProjPoint<C>,
    pub n_max_used: usize,
}

/// The standard modification shape of a one-dimensional height-`h` group:
/// `E = O(1/h)`, `F = O(0)^h`, length `1` at infinity.
pub fn pdiv_modification(h: u32) -> ModificationTriple {
    ModificationTriple::new(
        BundleFF::line(Rat::new(1, h as i128)),
        BundleFF::trivial(h),
        1,
    )
}

/// Evaluate the global period map on a rigid deformation point. The
/// output satisfies the commutation contract by construction: its fiber
/// descriptor is `perdom_fiber` of the base class, and its fiber point is
/// the local period point verbatim.
pub fn global_point<C: Coeff>(
    x: &RigidPoint<C>,
    target_prec: i64,
) -> Result<GlobalPoint<C>, GlobalError> {
    let h = x.h();
    let triple = pdiv_modification(h);
    let validated = hecke_validate(&triple)?;
    let base = validated.triple().leg_e().clone();
    let fiber = perdom_fiber(&base);
    let out = period_point(x, target_prec)?;
    debug_assert_eq!(fiber.fiber_dim + 1, h);
    Ok(GlobalPoint {
        triple: validated.into_triple(),
        base,
        fiber,
        point: out.point,
        n_max_used: out.n_max_used,
    })
}
