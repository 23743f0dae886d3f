//! The three group actions on Lubin-Tate tower points.
//!
//! `J` is realized as the unit group of the maximal order in the cyclic
//! division algebra with uniformizer `Pi`, `Pi^h = p` and
//! `Pi a = sigma(a) Pi`; its elements act on the quasi-isogeny matrix by
//! left multiplication through the regular representation. `GL_h(Q_p)`
//! acts on the level structure on the right, and Weil elements twist all
//! Witt coefficients by a Frobenius power while composing the
//! quasi-isogeny with the standard Frobenius matrix. The first two actions
//! touch disjoint fields of the tower point, so they commute.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::ff_curve::{frobenius_move, AdicPoint, FfError};
use crate::matrix::Mat;
use crate::parith::{ArithError, Coeff, FqElem, WittElem, WittRing};
use crate::period_map::{ProjPoint, RigidPoint};

#[derive(Debug, Clone, PartialEq)]
pub enum ActionError {
    /// A unit of the maximal order was required.
    NonUnit,
    /// A matrix operand is singular at the stated precision.
    Singular,
    Arith(ArithError),
    Ff(FfError),
}

impl From<ArithError> for ActionError {
    fn from(e: ArithError) -> Self {
        ActionError::Arith(e)
    }
}

impl From<FfError> for ActionError {
    fn from(e: FfError) -> Self {
        ActionError::Ff(e)
    }
}

impl fmt::Display for ActionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionError::NonUnit => write!(f, "a unit of the maximal order is required"),
            ActionError::Singular => write!(f, "matrix singular at the stated precision"),
            ActionError::Arith(e) => write!(f, "{e}"),
            ActionError::Ff(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ActionError {}

/// An element `sum a_i Pi^i` of the division algebra of invariant `1/h`,
/// coefficients in `W(F_{p^h})[1/p]`.
#[derive(Clone, Debug)]
pub struct ODElem {
    ring: Arc<WittRing>,
    coeffs: Vec<WittElem>,
}

impl PartialEq for ODElem {
    fn eq(&self, other: &Self) -> bool {
        self.ring.p() == other.ring.p()
            && self.ring.m() == other.ring.m()
            && self.coeffs == other.coeffs
    }
}

impl ODElem {
    pub fn new(ring: Arc<WittRing>, coeffs: Vec<WittElem>) -> Result<Self, ArithError> {
        let h = ring.m() as usize;
        if coeffs.len() != h {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "division-algebra element needs {h} coefficients, got {}",
                coeffs.len()
            )));
        }
        for c in &coeffs {
            if c.prime() != ring.p() || c.field_degree() != ring.m() {
                return Err(ArithError::FieldMismatch {
                    left: (c.prime(), c.field_degree()),
                    right: (ring.p(), ring.m()),
                });
            }
        }
        Ok(ODElem { ring, coeffs })
    }

    pub fn zero(ring: Arc<WittRing>, prec: i64) -> Self {
        let h = ring.m() as usize;
        let z = WittElem::zero(ring.clone(), prec);
        ODElem {
            ring,
            coeffs: alloc::vec![z; h],
        }
    }

    pub fn one(ring: Arc<WittRing>, prec: i64) -> Self {
        let mut e = ODElem::zero(ring.clone(), prec);
        e.coeffs[0] = WittElem::one(ring, prec);
        e
    }

    /// The uniformizer `Pi`.
    pub fn uniformizer(ring: Arc<WittRing>, prec: i64) -> Self {
        let mut e = ODElem::zero(ring.clone(), prec);
        if ring.m() >= 2 {
            e.coeffs[1] = WittElem::one(ring, prec);
        } else {
            // h = 1: D = Q_p and Pi = p
            e.coeffs[0] = WittElem::one(ring, prec).mul_p_pow(1);
        }
        e
    }

    /// The scalar `[a]` (Teichmuller coefficient in degree zero).
    pub fn teichmuller(ring: Arc<WittRing>, a: &FqElem, prec: i64) -> Self {
        let mut e = ODElem::zero(ring.clone(), prec);
        e.coeffs[0] = WittElem::teichmuller(ring, a, prec);
        e
    }

    pub fn h(&self) -> u32 {
        self.ring.m()
    }

    pub fn ring(&self) -> &Arc<WittRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[WittElem] {
        &self.coeffs
    }

    fn check_ring(&self, rhs: &ODElem) -> Result<(), ArithError> {
        if self.ring.p() != rhs.ring.p() || self.ring.m() != rhs.ring.m() {
            return Err(ArithError::FieldMismatch {
                left: (self.ring.p(), self.ring.m()),
                right: (rhs.ring.p(), rhs.ring.m()),
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &ODElem) -> Result<ODElem, ArithError> {
        self.check_ring(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ODElem {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> ODElem {
        ODElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Product under `Pi^h = p` and `Pi w = sigma(w) Pi`:
    /// `c_k = sum_{i+j = k mod h} a_i sigma^i(b_j) p^((i+j-k)/h)`.
    pub fn mul(&self, rhs: &ODElem) -> Result<ODElem, ArithError> {
        self.check_ring(rhs)?;
        let h = self.h() as usize;
        let mut out = alloc::vec![None::<WittElem>; h];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                // still contributes its precision bound through the sum;
                // zero coefficients at full precision can be skipped
                // safely only when exactly canonical, which they are
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let k = (i + j) % h;
                let pw = ((i + j) / h) as i64;
                let term = a.mul(&b.frobenius_iter(i as i64))?.mul_p_pow(pw);
                out[k] = Some(match out[k].take() {
                    None => term,
                    Some(acc) => acc.add(&term)?,
                });
            }
        }
        let coeffs = out
            .into_iter()
            .enumerate()
            .map(|(k, c)| c.unwrap_or_else(|| self.coeffs[k].zero_like()))
            .collect();
        Ok(ODElem {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    /// Unit of the maximal order: all coefficients integral and the
    /// constant coefficient a unit.
    pub fn is_unit(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integral()) && self.coeffs[0].is_unit()
    }

    /// Matrix of left multiplication on the right module with basis
    /// `{Pi^j}`: the regular representation. Multiplicative on the nose:
    /// `matrix_of(s t) = matrix_of(s) * matrix_of(t)`, because the basis
    /// coefficients act on the right.
    pub fn matrix_of(&self) -> Result<Mat<WittElem>, ArithError> {
        let h = self.h() as usize;
        let zero = self.coeffs[0].zero_like();
        let mut m = Mat::new(h, alloc::vec![zero; h * h])?;
        for (i, a) in self.coeffs.iter().enumerate() {
            for j in 0..h {
                let k = (i + j) % h;
                let pw = ((i + j) / h) as i64;
                let entry = a.frobenius_iter(-(k as i64)).mul_p_pow(pw);
                let cur = m.at(k, j).add(&entry)?;
                m.set(k, j, cur);
            }
        }
        Ok(m)
    }

    pub fn congruent(&self, rhs: &ODElem) -> bool {
        self.coeffs.len() == rhs.coeffs.len()
            && self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .all(|(a, b)| a.congruent(b))
    }
}

impl fmt::Display for ODElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*Pi^{i}")?;
        }
        Ok(())
    }
}

/// A Weil-group element at desk scale: its Frobenius image `n` and a
/// symbolic inertia tag (inertia acts trivially on unramified coefficient
/// models, but compositions stay faithful).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilElem {
    pub n: i64,
    pub inertia_tag: String,
}

impl WeilElem {
    pub fn frobenius_power(n: i64) -> Self {
        WeilElem {
            n,
            inertia_tag: String::new(),
        }
    }

    /// Composition adds Frobenius exponents and concatenates tags.
    pub fn compose(&self, rhs: &WeilElem) -> WeilElem {
        let mut tag = self.inertia_tag.clone();
        tag.push_str(&rhs.inertia_tag);
        WeilElem {
            n: self.n + rhs.n,
            inertia_tag: tag,
        }
    }
}

/// The deformation datum of a tower point: either an opaque label (with
/// its accumulated Frobenius twist) or an actual rigid point.
#[derive(Clone, Debug)]
pub enum Deformation {
    Symbolic { label: String, frob_twist: i64 },
    Rigid(RigidPoint<WittElem>),
}

impl Deformation {
    pub fn symbolic(label: &str) -> Self {
        Deformation::Symbolic {
            label: label.into(),
            frob_twist: 0,
        }
    }

    fn weil_twist(&self, n: i64) -> Self {
        match self {
            Deformation::Symbolic { label, frob_twist } => Deformation::Symbolic {
                label: label.clone(),
                frob_twist: frob_twist + n,
            },
            Deformation::Rigid(x) => {
                let u = x.u().iter().map(|c| c.frobenius_iter(n)).collect();
                Deformation::Rigid(
                    RigidPoint::new(x.h(), u, x.one().clone())
                        .expect("twisting preserves shape"),
                )
            }
        }
    }

    pub fn congruent(&self, rhs: &Deformation) -> bool {
        match (self, rhs) {
            (
                Deformation::Symbolic { label, frob_twist },
                Deformation::Symbolic {
                    label: l2,
                    frob_twist: t2,
                },
            ) => label == l2 && frob_twist == t2,
            (Deformation::Rigid(a), Deformation::Rigid(b)) => {
                a.h() == b.h()
                    && a.u()
                        .iter()
                        .zip(b.u())
                        .all(|(x, y)| x.congruent(y))
            }
            _ => false,
        }
    }
}

/// A point of the infinite-level tower: the deformation, the
/// quasi-isogeny matrix, and the rational level structure, plus an
/// optional adic shadow used by the kappa-compatibility checks.
#[derive(Clone, Debug)]
pub struct TowerPoint {
    ring: Arc<WittRing>,
    deformation: Deformation,
    iota: Mat<WittElem>,
    alpha: Mat<WittElem>,
    adic_shadow: Option<AdicPoint>,
}

impl TowerPoint {
    pub fn new(
        ring: Arc<WittRing>,
        deformation: Deformation,
        iota: Mat<WittElem>,
        alpha: Mat<WittElem>,
        adic_shadow: Option<AdicPoint>,
    ) -> Result<Self, ActionError> {
        let h = ring.m() as usize;
        if iota.size() != h || alpha.size() != h {
            return Err(ActionError::Arith(ArithError::ShapeMismatch(
                alloc::format!("tower matrices must be {h}x{h}"),
            )));
        }
        if iota.det()?.is_zero() || alpha.det()?.is_zero() {
            return Err(ActionError::Singular);
        }
        Ok(TowerPoint {
            ring,
            deformation,
            iota,
            alpha,
            adic_shadow,
        })
    }

    pub fn h(&self) -> u32 {
        self.ring.m()
    }

    pub fn ring(&self) -> &Arc<WittRing> {
        &self.ring
    }

    pub fn deformation(&self) -> &Deformation {
        &self.deformation
    }

    pub fn iota(&self) -> &Mat<WittElem> {
        &self.iota
    }

    pub fn alpha(&self) -> &Mat<WittElem> {
        &self.alpha
    }

    pub fn adic_shadow(&self) -> Option<&AdicPoint> {
        self.adic_shadow.as_ref()
    }

    /// Integral-level points: the level structure and its inverse are
    /// p-integral.
    pub fn is_integral_level(&self) -> Result<bool, ActionError> {
        let inv = self.alpha.inverse()?;
        let ok = self
            .alpha
            .entries()
            .iter()
            .chain(inv.entries())
            .all(|c| c.is_integral());
        Ok(ok)
    }

    pub fn congruent(&self, rhs: &TowerPoint) -> bool {
        self.h() == rhs.h()
            && self.deformation.congruent(&rhs.deformation)
            && self.iota.congruent(&rhs.iota)
            && self.alpha.congruent(&rhs.alpha)
            && self.adic_shadow == rhs.adic_shadow
    }
}

/// `s . (G, iota, alpha) = (G, s o iota, alpha)`: only the quasi-isogeny
/// moves, by left multiplication with the regular representation.
pub fn act_j(s: &ODElem, x: &TowerPoint) -> Result<TowerPoint, ActionError> {
    if !s.is_unit() {
        return Err(ActionError::NonUnit);
    }
    let m = s.matrix_of()?;
    Ok(TowerPoint {
        ring: x.ring.clone(),
        deformation: x.deformation.clone(),
        iota: m.mul(&x.iota)?,
        alpha: x.alpha.clone(),
        adic_shadow: x.adic_shadow,
    })
}

/// `g . (G, iota, alpha) = (G, iota, alpha o g)`: a right action on the
/// level structure. The tower transition map is this action with
/// `g = p * identity`.
pub fn act_gl(g: &Mat<WittElem>, x: &TowerPoint) -> Result<TowerPoint, ActionError> {
    if g.size() != x.h() as usize {
        return Err(ActionError::Arith(ArithError::ShapeMismatch(
            alloc::format!("expected a {0}x{0} matrix", x.h()),
        )));
    }
    if g.det()?.is_zero() {
        return Err(ActionError::Singular);
    }
    Ok(TowerPoint {
        ring: x.ring.clone(),
        deformation: x.deformation.clone(),
        iota: x.iota.clone(),
        alpha: x.alpha.mul(g)?,
        adic_shadow: x.adic_shadow,
    })
}

/// The standard Frobenius matrix of the height-`h` Dieudonne model over
/// the given ring, or its inverse.
fn frobenius_matrix(ring: &Arc<WittRing>, prec: i64, inverse: bool) -> Mat<WittElem> {
    let h = ring.m() as usize;
    let zero = WittElem::zero(ring.clone(), prec);
    let mut m = Mat::new(h, alloc::vec![zero; h * h]).expect("square by construction");
    if h == 1 {
        m.set(0, 0, WittElem::one(ring.clone(), prec).mul_p_pow(if inverse { -1 } else { 1 }));
        return m;
    }
    if inverse {
        for j in 1..h {
            m.set(j - 1, j, WittElem::one(ring.clone(), prec));
        }
        m.set(h - 1, 0, WittElem::one(ring.clone(), prec).mul_p_pow(-1));
    } else {
        for j in 0..h - 1 {
            m.set(j + 1, j, WittElem::one(ring.clone(), prec));
        }
        m.set(0, h - 1, WittElem::one(ring.clone(), prec).mul_p_pow(1));
    }
    m
}

/// `w . (G, iota, alpha) = (G^w, iota^w o Frob^n, alpha^w)`: the
/// coefficient Frobenius `sigma^n` twists every Witt coefficient (inertia
/// acts trivially on unramified coefficients; the tag rides along), and
/// the quasi-isogeny picks up the standard Frobenius matrix power.
pub fn act_weil(w: &WeilElem, x: &TowerPoint) -> Result<TowerPoint, ActionError> {
    let n = w.n;
    let twist = |m: &Mat<WittElem>| m.map(|c| c.frobenius_iter(n));
    let prec = x
        .iota
        .entries()
        .iter()
        .map(|c| c.abs_prec())
        .max()
        .unwrap_or(x.ring.max_rel());
    let mut iota = twist(&x.iota);
    let step = frobenius_matrix(&x.ring, prec, n < 0);
    for _ in 0..n.unsigned_abs() {
        iota = iota.mul(&step)?;
    }
    let shadow = match x.adic_shadow {
        None => None,
        Some(pt) => Some(frobenius_move(&pt, n)?),
    };
    Ok(TowerPoint {
        ring: x.ring.clone(),
        deformation: x.deformation.weil_twist(n),
        iota,
        alpha: twist(&x.alpha),
        adic_shadow: shadow,
    })
}

/// The linearized `J`-action on the period domain: projective action of
/// the regular representation on canonical coordinates.
pub fn act_j_on_period(
    s: &ODElem,
    y: &ProjPoint<WittElem>,
) -> Result<ProjPoint<WittElem>, ActionError> {
    if !s.is_unit() {
        return Err(ActionError::NonUnit);
    }
    if y.h() != s.h() {
        return Err(ActionError::Arith(ArithError::ShapeMismatch(
            alloc::format!("rank mismatch: element of D_{}, point in P^{}", s.h(), y.h() - 1),
        )));
    }
    let m = s.matrix_of()?;
    let raw = m.mul_vec(y.coords())?;
    ProjPoint::new(raw).map_err(|_| ActionError::Singular)
}

/// Embed a `Q_p` projective point into the `W(F_{p^h})` coordinates the
/// `J`-action lives on.
pub fn embed_proj_point(
    y: &ProjPoint<crate::parith::Padic>,
    ring: &Arc<WittRing>,
) -> Result<ProjPoint<WittElem>, ActionError> {
    let coords = y
        .coords()
        .iter()
        .map(|c| WittElem::from_padic(c, ring.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    ProjPoint::new(coords).map_err(|_| ActionError::Singular)
}

/// `act_j` after `act_gl` equals `act_gl` after `act_j`; the two actions
/// touch disjoint fields, so this always holds.
pub fn commute_check(
    s: &ODElem,
    g: &Mat<WittElem>,
    x: &TowerPoint,
) -> Result<bool, ActionError> {
    let a = act_j(s, &act_gl(g, x)?)?;
    let b = act_gl(g, &act_j(s, x)?)?;
    Ok(a.congruent(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_curve::{kappa, ExtRat};
    use crate::parith::Padic;

    const PREC: i64 = 12;

    fn ring(p: u64, h: u32) -> Arc<WittRing> {
        WittRing::new(p, h, 16).unwrap()
    }

    fn od(ringh: &Arc<WittRing>, ints: &[i64]) -> ODElem {
        let coeffs = ints
            .iter()
            .map(|&v| WittElem::from_integer(ringh.clone(), v, PREC))
            .collect();
        ODElem::new(ringh.clone(), coeffs).unwrap()
    }

    fn int_mat(r: &Arc<WittRing>, vals: &[i64]) -> Mat<WittElem> {
        let mut n = 1usize;
        while n * n < vals.len() {
            n += 1;
        }
        Mat::new(
            n,
            vals.iter()
                .map(|&v| WittElem::from_integer(r.clone(), v, PREC))
                .collect(),
        )
        .unwrap()
    }

    fn sample_point(r: &Arc<WittRing>) -> TowerPoint {
        let h = r.m() as usize;
        let mut iota_vals = alloc::vec![0i64; h * h];
        let mut alpha_vals = alloc::vec![0i64; h * h];
        for i in 0..h {
            iota_vals[i * h + i] = 1;
            alpha_vals[i * h + i] = 2;
        }
        iota_vals[1] = 3;
        alpha_vals[h] = 5;
        TowerPoint::new(
            r.clone(),
            Deformation::symbolic("G"),
            int_mat(r, &iota_vals),
            int_mat(r, &alpha_vals),
            Some(AdicPoint::untilt(r.p())),
        )
        .unwrap()
    }

    #[test]
    fn uniformizer_squares_to_p() {
        let r = ring(2, 2);
        let pi = ODElem::uniformizer(r.clone(), PREC);
        let sq = pi.mul(&pi).unwrap();
        let expect = {
            let mut e = ODElem::zero(r, PREC);
            e.coeffs[0] = e.coeffs[0].one_like().mul_p_pow(1);
            e
        };
        assert!(sq.congruent(&expect));
    }

    #[test]
    fn uniformizer_power_h_is_p() {
        for (p, h) in [(2u64, 2u32), (3, 3), (5, 2)] {
            let r = ring(p, h);
            let pi = ODElem::uniformizer(r.clone(), PREC);
            let mut acc = ODElem::one(r.clone(), PREC);
            for _ in 0..h {
                acc = acc.mul(&pi).unwrap();
            }
            let p_elem = {
                let mut e = ODElem::zero(r, PREC);
                e.coeffs[0] = e.coeffs[0].one_like().mul_p_pow(1);
                e
            };
            assert!(acc.congruent(&p_elem), "p={p} h={h}");
        }
    }

    #[test]
    fn one_is_multiplicative_identity() {
        let r = ring(3, 2);
        let one = ODElem::one(r.clone(), PREC);
        let b = od(&r, &[7, 4]);
        assert!(one.mul(&b).unwrap().congruent(&b));
        assert!(b.mul(&one).unwrap().congruent(&b));
    }

    #[test]
    fn commutation_relation_with_teichmuller() {
        // Pi * [a] = [a^p] * Pi
        let r = ring(2, 2);
        let a = FqElem::gen(r.fq().clone());
        let pi = ODElem::uniformizer(r.clone(), PREC);
        let ta = ODElem::teichmuller(r.clone(), &a, PREC);
        let left = pi.mul(&ta).unwrap();
        let tap = ODElem::teichmuller(r.clone(), &a.frobenius(), PREC);
        let right = tap.mul(&pi).unwrap();
        assert!(left.congruent(&right));
        assert!(left.coeffs()[0].is_zero());
        assert!(left.coeffs()[1]
            .congruent(&WittElem::teichmuller(r, &a.frobenius(), PREC)));
    }

    #[test]
    fn od_associativity_sample() {
        let r = ring(3, 3);
        let a = od(&r, &[2, 3, 1]);
        let b = od(&r, &[1, 0, 4]);
        let c = od(&r, &[5, 7, 2]);
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        assert!(left.congruent(&right));
    }

    #[test]
    fn matrix_of_identity_and_uniformizer() {
        let r = ring(5, 2);
        let one = ODElem::one(r.clone(), PREC);
        let m1 = one.matrix_of().unwrap();
        assert!(m1.congruent(&Mat::identity(2, &WittElem::one(r.clone(), PREC))));
        let pi = ODElem::uniformizer(r.clone(), PREC);
        let mp = pi.matrix_of().unwrap();
        // [[0, p], [1, 0]]
        assert!(mp.at(0, 0).is_zero());
        assert!(mp
            .at(0, 1)
            .congruent(&WittElem::one(r.clone(), PREC).mul_p_pow(1)));
        assert!(mp.at(1, 0).congruent(&WittElem::one(r, PREC)));
        assert!(mp.at(1, 1).is_zero());
    }

    #[test]
    fn matrix_of_is_multiplicative() {
        let r = ring(2, 2);
        let a = FqElem::gen(r.fq().clone());
        let s = ODElem::teichmuller(r.clone(), &a, PREC)
            .add(&ODElem::uniformizer(r.clone(), PREC))
            .unwrap();
        let t = od(&r, &[3, 1]);
        let left = s.mul(&t).unwrap().matrix_of().unwrap();
        let right = s.matrix_of().unwrap().mul(&t.matrix_of().unwrap()).unwrap();
        assert!(left.congruent(&right));
    }

    #[test]
    fn matrix_of_uniformizer_determinant() {
        // det(matrix_of(Pi)^h) has valuation h, matching Pi^h = p
        for (p, h) in [(2u64, 2u32), (3, 3)] {
            let r = ring(p, h);
            let mp = ODElem::uniformizer(r.clone(), PREC).matrix_of().unwrap();
            let mut acc = Mat::identity(h as usize, &WittElem::one(r, PREC));
            for _ in 0..h {
                acc = acc.mul(&mp).unwrap();
            }
            let det = acc.det().unwrap();
            assert_eq!(det.valuation(), Some(h as i64), "p={p} h={h}");
        }
    }

    #[test]
    fn act_j_moves_only_iota() {
        let r = ring(2, 2);
        let x = sample_point(&r);
        let s = od(&r, &[1, 2]);
        assert!(s.is_unit());
        let y = act_j(&s, &x).unwrap();
        assert!(y.alpha().congruent(x.alpha()));
        assert!(y.deformation().congruent(x.deformation()));
        assert!(!y.iota().congruent(x.iota()));
        // s = 1 is the identity
        let id = act_j(&ODElem::one(r, PREC), &x).unwrap();
        assert!(id.congruent(&x));
    }

    #[test]
    fn act_j_is_left_action() {
        let r = ring(3, 2);
        let x = sample_point(&r);
        let s = od(&r, &[1, 3]);
        let t = od(&r, &[2, 1]);
        let st = s.mul(&t).unwrap();
        let a = act_j(&st, &x).unwrap();
        let b = act_j(&s, &act_j(&t, &x).unwrap()).unwrap();
        assert!(a.congruent(&b));
    }

    #[test]
    fn act_j_rejects_non_units() {
        let r = ring(3, 2);
        let x = sample_point(&r);
        let pi = ODElem::uniformizer(r, PREC);
        assert!(matches!(act_j(&pi, &x), Err(ActionError::NonUnit)));
    }

    #[test]
    fn act_gl_moves_only_alpha() {
        let r = ring(2, 2);
        let x = sample_point(&r);
        let g = int_mat(&r, &[1, 1, 0, 1]);
        let y = act_gl(&g, &x).unwrap();
        assert!(y.iota().congruent(x.iota()));
        assert!(y.deformation().congruent(x.deformation()));
        let id = act_gl(&Mat::identity(2, &WittElem::one(r, PREC)), &x).unwrap();
        assert!(id.congruent(&x));
    }

    #[test]
    fn act_gl_is_right_action() {
        let r = ring(5, 2);
        let x = sample_point(&r);
        let g = int_mat(&r, &[1, 2, 3, 7]);
        let h = int_mat(&r, &[2, 1, 1, 1]);
        let gh = g.mul(&h).unwrap();
        let a = act_gl(&gh, &x).unwrap();
        let b = act_gl(&h, &act_gl(&g, &x).unwrap()).unwrap();
        assert!(a.congruent(&b));
    }

    #[test]
    fn tower_transition_is_p_scaling() {
        let r = ring(3, 2);
        let x = sample_point(&r);
        let p_id = Mat::identity(2, &WittElem::one(r.clone(), PREC)).map(|c| c.mul_p_pow(1));
        let y = act_gl(&p_id, &x).unwrap();
        let expect = x.alpha().map(|c| c.mul_p_pow(1));
        assert!(y.alpha().congruent(&expect));
    }

    #[test]
    fn act_weil_inverse_composition() {
        let r = ring(2, 2);
        let x = sample_point(&r);
        let w = WeilElem::frobenius_power(1);
        let wi = WeilElem::frobenius_power(-1);
        let y = act_weil(&wi, &act_weil(&w, &x).unwrap()).unwrap();
        assert!(y.congruent(&x));
        // n = 0 with trivial tag is the identity on unramified points
        let z = act_weil(&WeilElem::frobenius_power(0), &x).unwrap();
        assert!(z.congruent(&x));
    }

    #[test]
    fn act_weil_shadow_matches_frobenius_move() {
        let r = ring(3, 2);
        let x = sample_point(&r);
        let y = act_weil(&WeilElem::frobenius_power(2), &x).unwrap();
        let shadow = y.adic_shadow().unwrap();
        assert_eq!(
            kappa(shadow).unwrap(),
            ExtRat::Fin(crate::rat(9, 1)),
            "kappa scaled by p^2"
        );
        let direct = frobenius_move(x.adic_shadow().unwrap(), 2).unwrap();
        assert_eq!(*shadow, direct);
    }

    #[test]
    fn weil_composition_concatenates() {
        let a = WeilElem {
            n: 2,
            inertia_tag: "s".into(),
        };
        let b = WeilElem {
            n: -1,
            inertia_tag: "t".into(),
        };
        let c = a.compose(&b);
        assert_eq!(c.n, 1);
        assert_eq!(c.inertia_tag, "st");
    }

    #[test]
    fn commute_check_samples() {
        let r = ring(2, 2);
        let x = sample_point(&r);
        let s = od(&r, &[1, 1]);
        let g = int_mat(&r, &[1, 2, 1, 3]);
        assert!(commute_check(&s, &g, &x).unwrap());
        let id_s = ODElem::one(r.clone(), PREC);
        let id_g = Mat::identity(2, &WittElem::one(r, PREC));
        assert!(commute_check(&id_s, &id_g, &x).unwrap());
    }

    #[test]
    fn period_action_identity_and_scalars() {
        let r = ring(5, 2);
        let y = {
            let raw = alloc::vec![
                WittElem::from_integer(r.clone(), 1, PREC),
                WittElem::from_integer(r.clone(), 10, PREC),
            ];
            ProjPoint::new(raw).unwrap()
        };
        let one = ODElem::one(r.clone(), PREC);
        let moved = act_j_on_period(&one, &y).unwrap();
        assert!(moved.congruent(&y));
        // a Teichmuller scalar acts trivially on projective space
        let a = FqElem::new(r.fq().clone(), alloc::vec![2, 0]).unwrap();
        let scalar = ODElem::teichmuller(r, &a, PREC);
        let scaled = act_j_on_period(&scalar, &y).unwrap();
        assert!(scaled.congruent(&y));
    }

    #[test]
    fn period_action_composition() {
        let r = ring(2, 2);
        let y = {
            let raw = alloc::vec![
                WittElem::from_integer(r.clone(), 3, PREC),
                WittElem::from_integer(r.clone(), 1, PREC),
            ];
            ProjPoint::new(raw).unwrap()
        };
        let s = od(&r, &[1, 2]);
        let t = od(&r, &[3, 4]);
        let a = act_j_on_period(&s.mul(&t).unwrap(), &y).unwrap();
        let b = act_j_on_period(&s, &act_j_on_period(&t, &y).unwrap()).unwrap();
        assert!(a.congruent(&b));
    }

    #[test]
    fn embed_period_point_from_qp() {
        let r = ring(5, 2);
        let y = ProjPoint::new(alloc::vec![
            Padic::from_integer(5, 2, PREC),
            Padic::from_integer(5, 15, PREC),
        ])
        .unwrap();
        let w = embed_proj_point(&y, &r).unwrap();
        assert_eq!(w.h(), 2);
        assert_eq!(w.pivot(), y.pivot());
    }

    #[test]
    fn matrix_of_injectivity_sample() {
        let r = ring(2, 2);
        for coeffs in [[0i64, 1], [1, 0], [3, 2]] {
            let s = od(&r, &coeffs);
            let m = s.matrix_of().unwrap();
            assert!(
                m.entries().iter().any(|c| !c.is_zero()),
                "matrix_of killed a nonzero element"
            );
        }
    }
}
