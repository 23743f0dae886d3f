//! Capped-precision elements of `W(F_{p^m})[1/p]` with digit-level
//! Frobenius.
//!
//! The unramified ring `W(F_{p^m})` modulo `p^k` is realized as
//! `(Z/p^k)[x]/(F)` for the shipped monic lift `F` of the residue-field
//! modulus. The canonical user-facing view of an element is its
//! Teichmuller expansion `sum [a_i] p^i`; internally the unit part is a
//! polynomial, which makes multiplication cheap while digits stay exactly
//! recoverable. Frobenius is evaluated by substituting the precomputed
//! root of `F` lying over `x^p`, and agrees with the digit-wise `p`-th
//! power map.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::min;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::fq::{FqElem, FqParams};
use super::padic::Padic;
use super::{ArithError, Coeff, PREC_CAP};

/// Arithmetic context for one `W(F_{p^m})[1/p]`: the modulus lift and the
/// Frobenius root, precomputed once at a fixed maximal relative precision.
///
/// Rings are immutable and shared behind `Arc`; all element operations are
/// pure, so values can move freely between threads.
pub struct WittRing {
    fq: Arc<FqParams>,
    /// Maximal relative precision (unit-digit count) supported.
    max_rel: i64,
    /// `sigma(x)` as a polynomial of degree `< m`, coefficients modulo
    /// `p^max_rel`. Empty when `m = 1` (Frobenius is the identity).
    frob_root: Vec<BigUint>,
}

impl fmt::Debug for WittRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WittRing(p={}, m={}, max_rel={})",
            self.fq.p(),
            self.fq.m(),
            self.max_rel
        )
    }
}

impl WittRing {
    /// Build the ring for `W(F_{p^m})` with units tracked through
    /// `max_rel` digits.
    pub fn new(p: u64, m: u32, max_rel: i64) -> Result<Arc<WittRing>, ArithError> {
        let fq = FqParams::new(p, m)?;
        let max_rel = max_rel.max(1);
        let frob_root = if m == 1 {
            Vec::new()
        } else {
            compute_frob_root(&fq, max_rel)
        };
        Ok(Arc::new(WittRing {
            fq,
            max_rel,
            frob_root,
        }))
    }

    pub fn p(&self) -> u64 {
        self.fq.p()
    }

    pub fn m(&self) -> u32 {
        self.fq.m()
    }

    pub fn max_rel(&self) -> i64 {
        self.max_rel
    }

    pub fn fq(&self) -> &Arc<FqParams> {
        &self.fq
    }

    fn pk(&self, k: i64) -> BigUint {
        BigUint::from(self.p()).pow(k.max(0) as u32)
    }

    fn zero_poly(&self) -> Vec<BigUint> {
        alloc::vec![BigUint::zero(); self.m() as usize]
    }

    fn const_poly(&self, c: BigUint) -> Vec<BigUint> {
        let mut v = self.zero_poly();
        v[0] = c;
        v
    }

    /// Schoolbook product reduced by the monic modulus and `p^k`.
    fn pmul(&self, a: &[BigUint], b: &[BigUint], k: i64) -> Vec<BigUint> {
        let m = self.m() as usize;
        let modulus = self.pk(k);
        let mut prod = alloc::vec![BigUint::zero(); 2 * m - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                prod[i + j] += ai * bj;
            }
        }
        for c in prod.iter_mut() {
            *c %= &modulus;
        }
        // reduce degrees >= m using x^m = -(f_0 + f_1 x + ...)
        let f = self.fq.modulus();
        for d in (m..2 * m - 1).rev() {
            if prod[d].is_zero() {
                continue;
            }
            let c = core::mem::take(&mut prod[d]);
            for (j, &fj) in f.iter().take(m).enumerate() {
                if fj == 0 {
                    continue;
                }
                let neg = (&modulus - BigUint::from(fj) % &modulus) % &modulus;
                prod[d - m + j] = (&prod[d - m + j] + &c * neg) % &modulus;
            }
        }
        prod.truncate(m);
        prod
    }

    fn padd(&self, a: &[BigUint], b: &[BigUint], k: i64) -> Vec<BigUint> {
        let modulus = self.pk(k);
        a.iter().zip(b).map(|(x, y)| (x + y) % &modulus).collect()
    }

    fn pneg(&self, a: &[BigUint], k: i64) -> Vec<BigUint> {
        let modulus = self.pk(k);
        a.iter()
            .map(|x| (&modulus - x % &modulus) % &modulus)
            .collect()
    }

    fn ppow(&self, base: &[BigUint], mut e: u128, k: i64) -> Vec<BigUint> {
        let mut acc = self.const_poly(BigUint::one());
        let mut b = base.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.pmul(&acc, &b, k);
            }
            b = self.pmul(&b, &b, k);
            e >>= 1;
        }
        acc
    }

    /// Horner evaluation of an element polynomial at another element.
    fn peval(&self, f: &[BigUint], at: &[BigUint], k: i64) -> Vec<BigUint> {
        let modulus = self.pk(k);
        let mut acc = self.zero_poly();
        for c in f.iter().rev() {
            acc = self.pmul(&acc, at, k);
            acc[0] = (&acc[0] + c) % &modulus;
        }
        acc
    }

    /// Inverse of a unit polynomial modulo `(F, p^k)` by lifting the
    /// residue-field inverse.
    fn inv_unit_poly(&self, a: &[BigUint], k: i64) -> Result<Vec<BigUint>, ArithError> {
        let res = self.residue(a)?;
        let r_inv = res.inv()?;
        let mut x: Vec<BigUint> = r_inv.coeffs().iter().map(|&c| BigUint::from(c)).collect();
        x.resize(self.m() as usize, BigUint::zero());
        let mut cur = 1i64;
        while cur < k {
            cur = (2 * cur).min(k);
            let modulus = self.pk(cur);
            let ax = self.pmul(a, &x, cur);
            let mut t = self.pneg(&ax, cur);
            t[0] = (&t[0] + BigUint::from(2u32)) % &modulus;
            x = self.pmul(&x, &t, cur);
        }
        Ok(x)
    }

    /// Residue of a unit polynomial in `F_{p^m}`.
    fn residue(&self, a: &[BigUint]) -> Result<FqElem, ArithError> {
        let p = self.p();
        let coeffs: Vec<u64> = a
            .iter()
            .map(|c| (c % BigUint::from(p)).to_u64().unwrap())
            .collect();
        FqElem::new(self.fq.clone(), coeffs)
    }

    /// Teichmuller lift of a residue-field element, exact modulo `p^k`:
    /// the limit of iterated `q`-th powers.
    fn teich(&self, a: &FqElem, k: i64) -> Vec<BigUint> {
        let mut t: Vec<BigUint> = a.coeffs().iter().map(|&c| BigUint::from(c)).collect();
        t.resize(self.m() as usize, BigUint::zero());
        let q = self.fq.q();
        for _ in 1..k {
            t = self.ppow(&t, q, k);
        }
        t
    }
}

/// Newton-lift the root of the modulus lying over `x^p`.
fn compute_frob_root(fq: &Arc<FqParams>, max_rel: i64) -> Vec<BigUint> {
    let ring = WittRing {
        fq: fq.clone(),
        max_rel,
        frob_root: Vec::new(),
    };
    let m = fq.m() as usize;
    let f: Vec<BigUint> = fq.modulus().iter().map(|&c| BigUint::from(c)).collect();
    // derivative coefficients j * f_j, degree < m
    let mut df = alloc::vec![BigUint::zero(); m];
    for j in 1..=m {
        df[j - 1] = BigUint::from(j as u64) * &f[j];
    }
    // start from x^p in the residue field
    let x0 = FqElem::gen(fq.clone()).pow(fq.p() as u128);
    let mut r: Vec<BigUint> = x0.coeffs().iter().map(|&c| BigUint::from(c)).collect();
    r.resize(m, BigUint::zero());
    let mut k = 1i64;
    while k < max_rel {
        k = (2 * k).min(max_rel);
        let fr = ring.peval(&f, &r, k);
        let dfr = ring.peval(&df, &r, k);
        let dfr_inv = ring
            .inv_unit_poly(&dfr, k)
            .expect("separable modulus has unit derivative at the root");
        let step = ring.pmul(&fr, &dfr_inv, k);
        r = ring.padd(&r, &ring.pneg(&step, k), k);
    }
    r
}

/// An element of `W(F_{p^m})[1/p]` known modulo `p^N`.
#[derive(Clone)]
pub struct WittElem {
    ring: Arc<WittRing>,
    abs_prec: i64,
    /// `(valuation, unit polynomial)`; `None` is the canonical zero.
    repr: Option<(i64, Vec<BigUint>)>,
}

impl PartialEq for WittElem {
    fn eq(&self, other: &Self) -> bool {
        self.ring.p() == other.ring.p()
            && self.ring.m() == other.ring.m()
            && self.abs_prec == other.abs_prec
            && self.repr == other.repr
    }
}

impl WittElem {
    pub fn zero(ring: Arc<WittRing>, abs_prec: i64) -> Self {
        WittElem {
            ring,
            abs_prec,
            repr: None,
        }
    }

    pub fn one(ring: Arc<WittRing>, abs_prec: i64) -> Self {
        WittElem::from_integer(ring, 1, abs_prec)
    }

    pub fn from_integer(ring: Arc<WittRing>, n: i64, abs_prec: i64) -> Self {
        let p = Padic::from_integer(ring.p(), n, abs_prec);
        WittElem::from_padic(&p, ring).expect("prime matches by construction")
    }

    /// Embed a `Q_p` element as a constant polynomial.
    pub fn from_padic(x: &Padic, ring: Arc<WittRing>) -> Result<Self, ArithError> {
        if x.prime() != ring.p() {
            return Err(ArithError::PrimeMismatch {
                left: x.prime(),
                right: ring.p(),
            });
        }
        match x.to_bigint_scaled() {
            None => Ok(WittElem::zero(ring, x.abs_prec())),
            Some((n, v)) => {
                let unit = n.to_biguint().expect("units are stored nonnegative");
                let poly = ring.const_poly(unit);
                Ok(WittElem::normalize(ring, v, poly, x.abs_prec()))
            }
        }
    }

    /// Teichmuller representative `[a]`, a unit (or zero) at the given
    /// precision.
    pub fn teichmuller(ring: Arc<WittRing>, a: &FqElem, abs_prec: i64) -> Self {
        if a.is_zero() || abs_prec <= 0 {
            return WittElem::zero(ring, abs_prec);
        }
        let t = ring.teich(a, abs_prec);
        WittElem {
            ring,
            abs_prec,
            repr: Some((0, t)),
        }
    }

    /// Rebuild from a Teichmuller digit list:
    /// `p^valuation * sum [digits[i]] p^i` at absolute precision `abs_prec`.
    pub fn from_teich_digits(
        ring: Arc<WittRing>,
        valuation: i64,
        digits: &[FqElem],
        abs_prec: i64,
    ) -> Result<Self, ArithError> {
        let window = (abs_prec - valuation).min(ring.max_rel);
        if window <= 0 {
            return Ok(WittElem::zero(ring, abs_prec));
        }
        let abs_prec = valuation + window;
        let modulus = ring.pk(window);
        let mut acc = ring.zero_poly();
        for (i, d) in digits.iter().enumerate().take(window as usize) {
            if d.is_zero() {
                continue;
            }
            if d.params().p() != ring.p() || d.params().m() != ring.m() {
                return Err(ArithError::FieldMismatch {
                    left: (d.params().p(), d.params().m()),
                    right: (ring.p(), ring.m()),
                });
            }
            let t = ring.teich(d, window - i as i64);
            let shift = ring.pk(i as i64);
            for (a, b) in acc.iter_mut().zip(t) {
                *a = (&*a + b * &shift) % &modulus;
            }
        }
        Ok(WittElem::normalize(ring, valuation, acc, abs_prec))
    }

    fn normalize(ring: Arc<WittRing>, valuation: i64, mut poly: Vec<BigUint>, abs_prec: i64) -> Self {
        let mut abs_prec = abs_prec;
        if abs_prec - valuation > ring.max_rel {
            // the Frobenius root is precomputed to max_rel digits; longer
            // unit windows would overclaim
            abs_prec = valuation + ring.max_rel;
        }
        let window = abs_prec - valuation;
        if window <= 0 {
            return WittElem::zero(ring, abs_prec);
        }
        let modulus = ring.pk(window);
        for c in poly.iter_mut() {
            *c %= &modulus;
        }
        if poly.iter().all(|c| c.is_zero()) {
            return WittElem::zero(ring, abs_prec);
        }
        // strip common powers of p into the valuation
        let p = BigUint::from(ring.p());
        let mut t = 0i64;
        'outer: while t < window {
            for c in poly.iter() {
                if !c.is_zero() && !(c % &p).is_zero() {
                    break 'outer;
                }
            }
            for c in poly.iter_mut() {
                *c /= &p;
            }
            t += 1;
        }
        WittElem {
            ring,
            abs_prec,
            repr: Some((valuation + t, poly)),
        }
    }

    pub fn ring(&self) -> &Arc<WittRing> {
        &self.ring
    }

    /// Teichmuller digits of the unit part, length `abs_prec - valuation`.
    /// Empty for zero.
    pub fn teich_digits(&self) -> Vec<FqElem> {
        match &self.repr {
            None => Vec::new(),
            Some((v, unit)) => {
                let window = self.abs_prec - v;
                let mut out = Vec::with_capacity(window as usize);
                let mut rest = unit.clone();
                let p = BigUint::from(self.ring.p());
                for i in 0..window {
                    let digit = self.ring.residue(&rest).expect("same field");
                    if i + 1 < window {
                        let t = self.ring.teich(&digit, window - i);
                        let modulus = self.ring.pk(window - i);
                        for (c, tc) in rest.iter_mut().zip(t) {
                            *c = (&*c + (&modulus - tc)) % &modulus;
                            debug_assert!((&*c % &p).is_zero());
                            *c /= &p;
                        }
                    }
                    out.push(digit);
                }
                out
            }
        }
    }

    /// Reinterpret over `Q_p`; only the prime field embeds.
    pub fn to_padic(&self) -> Result<Padic, ArithError> {
        if self.ring.m() != 1 {
            return Err(ArithError::FieldMismatch {
                left: (self.ring.p(), self.ring.m()),
                right: (self.ring.p(), 1),
            });
        }
        match &self.repr {
            None => Ok(Padic::zero(self.ring.p(), self.abs_prec)),
            Some((v, unit)) => Ok(Padic::from_unit(
                self.ring.p(),
                *v,
                unit[0].clone(),
                self.abs_prec,
            )),
        }
    }

    /// Unit polynomial coordinates (degree `< m`), for serialization of
    /// internal state and tests.
    pub fn unit_poly(&self) -> Option<&[BigUint]> {
        self.repr.as_ref().map(|(_, u)| u.as_slice())
    }

    fn check_ring(&self, rhs: &WittElem) -> Result<(), ArithError> {
        if self.ring.p() != rhs.ring.p() || self.ring.m() != rhs.ring.m() {
            return Err(ArithError::FieldMismatch {
                left: (self.ring.p(), self.ring.m()),
                right: (rhs.ring.p(), rhs.ring.m()),
            });
        }
        Ok(())
    }

    /// Prefer the ring handle with more precomputed precision.
    fn join_ring(&self, rhs: &WittElem) -> Arc<WittRing> {
        if rhs.ring.max_rel > self.ring.max_rel {
            rhs.ring.clone()
        } else {
            self.ring.clone()
        }
    }

    fn val_bound(&self) -> i64 {
        self.repr.as_ref().map_or(self.abs_prec, |(v, _)| *v)
    }
}

impl Coeff for WittElem {
    fn prime(&self) -> u64 {
        self.ring.p()
    }

    fn field_degree(&self) -> u32 {
        self.ring.m()
    }

    fn abs_prec(&self) -> i64 {
        self.abs_prec
    }

    fn valuation(&self) -> Option<i64> {
        self.repr.as_ref().map(|(v, _)| *v)
    }

    fn zero_like(&self) -> Self {
        WittElem::zero(self.ring.clone(), self.abs_prec)
    }

    fn one_like(&self) -> Self {
        WittElem::one(self.ring.clone(), self.rel_prec().max(1))
    }

    fn one_at(&self, abs_prec: i64) -> Self {
        WittElem::one(self.ring.clone(), abs_prec.max(1))
    }

    fn add(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.check_ring(rhs)?;
        let ring = self.join_ring(rhs);
        let prec = min(self.abs_prec, rhs.abs_prec);
        match (&self.repr, &rhs.repr) {
            (None, None) => Ok(WittElem::zero(ring, prec)),
            (None, Some((v, u))) | (Some((v, u)), None) => {
                Ok(WittElem::normalize(ring, *v, u.clone(), prec))
            }
            (Some((va, ua)), Some((vb, ub))) => {
                let v = min(*va, *vb);
                let window = prec - v;
                if window <= 0 {
                    return Ok(WittElem::zero(ring, prec));
                }
                let sa = ring.pk(va - v);
                let sb = ring.pk(vb - v);
                let modulus = ring.pk(window);
                let sum: Vec<BigUint> = ua
                    .iter()
                    .zip(ub)
                    .map(|(a, b)| (a * &sa + b * &sb) % &modulus)
                    .collect();
                Ok(WittElem::normalize(ring, v, sum, prec))
            }
        }
    }

    fn neg(&self) -> Self {
        match &self.repr {
            None => self.clone(),
            Some((v, u)) => {
                let window = self.abs_prec - v;
                let neg = self.ring.pneg(u, window);
                WittElem::normalize(self.ring.clone(), *v, neg, self.abs_prec)
            }
        }
    }

    fn mul(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.check_ring(rhs)?;
        let ring = self.join_ring(rhs);
        let prec = min(
            self.val_bound().saturating_add(rhs.abs_prec),
            rhs.val_bound().saturating_add(self.abs_prec),
        )
        .min(PREC_CAP);
        match (&self.repr, &rhs.repr) {
            (Some((va, ua)), Some((vb, ub))) => {
                let val = va + vb;
                let window = prec - val;
                if window <= 0 {
                    return Ok(WittElem::zero(ring, prec));
                }
                let prod = ring.pmul(ua, ub, window);
                Ok(WittElem::normalize(ring, val, prod, prec))
            }
            _ => Ok(WittElem::zero(ring, prec)),
        }
    }

    fn inv(&self) -> Result<Self, ArithError> {
        let (v, u) = self.repr.as_ref().ok_or(ArithError::DivisionByZero)?;
        let window = self.abs_prec - v;
        let inv = self.ring.inv_unit_poly(u, window)?;
        Ok(WittElem {
            ring: self.ring.clone(),
            abs_prec: -v + window,
            repr: Some((-v, inv)),
        })
    }

    fn mul_p_pow(&self, k: i64) -> Self {
        WittElem {
            ring: self.ring.clone(),
            abs_prec: self.abs_prec + k,
            repr: self.repr.as_ref().map(|(v, u)| (v + k, u.clone())),
        }
    }

    fn mul_int(&self, n: i64) -> Self {
        if n == 0 {
            return self.zero_like();
        }
        let p = self.ring.p();
        let mut t = 0i64;
        let mut a = n.unsigned_abs();
        while a.is_multiple_of(p) {
            a /= p;
            t += 1;
        }
        match &self.repr {
            None => WittElem::zero(self.ring.clone(), self.abs_prec + t),
            Some((v, u)) => {
                let prec = self.abs_prec + t;
                let window = prec - (v + t);
                let modulus = self.ring.pk(window);
                let scalar = BigUint::from(a);
                let prod: Vec<BigUint> = u.iter().map(|c| c * &scalar % &modulus).collect();
                let r = WittElem::normalize(self.ring.clone(), v + t, prod, prec);
                if n < 0 {
                    r.neg()
                } else {
                    r
                }
            }
        }
    }

    fn pow_u(&self, e: u128) -> Result<Self, ArithError> {
        if e == 0 {
            return Ok(self.one_like());
        }
        match &self.repr {
            None => {
                let prec = (self.abs_prec.max(1) as i128)
                    .saturating_mul(e as i128)
                    .min(PREC_CAP as i128) as i64;
                Ok(WittElem::zero(self.ring.clone(), prec))
            }
            Some((v, u)) => {
                let window = self.abs_prec - v;
                let ev = (*v as i128).saturating_mul(e as i128);
                if *v > 0 && ev >= PREC_CAP as i128 {
                    return Ok(WittElem::zero(self.ring.clone(), PREC_CAP));
                }
                if ev.abs() >= PREC_CAP as i128 {
                    return Err(ArithError::ExponentOverflow);
                }
                let val = ev as i64;
                let powed = self.ring.ppow(u, e, window);
                Ok(WittElem::normalize(
                    self.ring.clone(),
                    val,
                    powed,
                    val + window,
                ))
            }
        }
    }

    fn frobenius(&self) -> Self {
        if self.ring.m() == 1 {
            return self.clone();
        }
        match &self.repr {
            None => self.clone(),
            Some((v, u)) => {
                let window = self.abs_prec - v;
                let modulus = self.ring.pk(window);
                let root: Vec<BigUint> = self
                    .ring
                    .frob_root
                    .iter()
                    .map(|c| c % &modulus)
                    .collect();
                let image = self.ring.peval(u, &root, window);
                WittElem::normalize(self.ring.clone(), *v, image, self.abs_prec)
            }
        }
    }

    fn reduce_abs_prec(&self, n: i64) -> Self {
        if n >= self.abs_prec {
            return self.clone();
        }
        match &self.repr {
            None => WittElem::zero(self.ring.clone(), n),
            Some((v, u)) => WittElem::normalize(self.ring.clone(), *v, u.clone(), n),
        }
    }
}

impl fmt::Debug for WittElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WittElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ring.p();
        let m = self.ring.m();
        match &self.repr {
            None => write!(f, "W({p}^{m}): O({p}^{})", self.abs_prec),
            Some((v, u)) => write!(
                f,
                "W({p}^{m}): {p}^{v}*{u:?} + O({p}^{})",
                self.abs_prec
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, m: u32) -> Arc<WittRing> {
        WittRing::new(p, m, 24).unwrap()
    }

    #[test]
    fn frobenius_on_generator_digit() {
        // p=2, m=2: [alpha] -> [alpha^2]
        let r = ring(2, 2);
        let alpha = FqElem::gen(r.fq().clone());
        let w = WittElem::teichmuller(r.clone(), &alpha, 8);
        let fw = w.frobenius();
        let expect = WittElem::teichmuller(r, &alpha.frobenius(), 8);
        assert!(fw.congruent(&expect));
        assert_eq!(fw.valuation(), Some(0));
        assert_eq!(fw.abs_prec(), 8);
    }

    #[test]
    fn frobenius_identity_when_m_is_one() {
        let r = ring(5, 1);
        let w = WittElem::from_integer(r, 12, 6);
        assert_eq!(w.frobenius(), w);
    }

    #[test]
    fn frobenius_order_m() {
        let r = ring(3, 3);
        let a = FqElem::new(r.fq().clone(), alloc::vec![1, 2, 1]).unwrap();
        let b = FqElem::new(r.fq().clone(), alloc::vec![0, 1, 2]).unwrap();
        let w = WittElem::teichmuller(r.clone(), &a, 10)
            .add(&WittElem::teichmuller(r, &b, 10).mul_p_pow(1))
            .unwrap();
        let mut f = w.clone();
        for _ in 0..3 {
            f = f.frobenius();
        }
        assert!(f.congruent(&w));
        assert_ne!(w.frobenius().teich_digits()[0], w.teich_digits()[0]);
    }

    #[test]
    fn frobenius_matches_digitwise_power() {
        // dual route: substitution-based sigma vs p-th powers on digits
        let r = ring(5, 2);
        let a = FqElem::new(r.fq().clone(), alloc::vec![2, 3]).unwrap();
        let b = FqElem::new(r.fq().clone(), alloc::vec![4, 1]).unwrap();
        let c = FqElem::new(r.fq().clone(), alloc::vec![0, 2]).unwrap();
        let w = WittElem::from_teich_digits(r.clone(), -1, &[a.clone(), b.clone(), c.clone()], 6)
            .unwrap();
        let via_subst = w.frobenius();
        let digit_images: Vec<FqElem> = [a, b, c].iter().map(|d| d.frobenius()).collect();
        let via_digits = WittElem::from_teich_digits(r, -1, &digit_images, 6).unwrap();
        assert!(via_subst.congruent(&via_digits));
    }

    #[test]
    fn teich_digit_roundtrip() {
        let r = ring(3, 2);
        let a = FqElem::new(r.fq().clone(), alloc::vec![2, 1]).unwrap();
        let b = FqElem::zero(r.fq().clone());
        let c = FqElem::new(r.fq().clone(), alloc::vec![1, 2]).unwrap();
        let w = WittElem::from_teich_digits(r.clone(), 2, &[a, b, c], 7).unwrap();
        let digits = w.teich_digits();
        let back = WittElem::from_teich_digits(r, 2, &digits, 7).unwrap();
        assert_eq!(w, back);
        assert_eq!(digits.len() as i64, w.abs_prec() - w.valuation().unwrap());
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        // [a]^(q-1) = 1 for nonzero a
        let r = ring(2, 3);
        let a = FqElem::new(r.fq().clone(), alloc::vec![1, 1, 0]).unwrap();
        let t = WittElem::teichmuller(r.clone(), &a, 12);
        let one = WittElem::one(r, 12);
        assert!(t.pow_u(7).unwrap().congruent(&one));
    }

    #[test]
    fn m1_matches_padic_arithmetic() {
        let r = ring(5, 1);
        let x = Padic::from_integer(5, 38, 8);
        let y = Padic::from_integer(5, -11, 8);
        let wx = WittElem::from_padic(&x, r.clone()).unwrap();
        let wy = WittElem::from_padic(&y, r).unwrap();
        assert_eq!(wx.mul(&wy).unwrap().to_padic().unwrap(), x.mul(&y).unwrap());
        assert_eq!(wx.add(&wy).unwrap().to_padic().unwrap(), x.add(&y).unwrap());
        assert_eq!(wx.inv().unwrap().to_padic().unwrap(), x.inv().unwrap());
    }

    #[test]
    fn inverse_roundtrip() {
        let r = ring(2, 2);
        let a = FqElem::gen(r.fq().clone());
        let one_d = FqElem::one(r.fq().clone());
        let w = WittElem::from_teich_digits(r.clone(), 0, &[a, one_d], 6).unwrap();
        let wi = w.inv().unwrap();
        assert!(w.mul(&wi).unwrap().congruent(&WittElem::one(r, 6)));
    }
}
