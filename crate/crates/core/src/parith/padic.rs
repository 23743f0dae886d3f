//! Capped-precision elements of `Q_p`.

use alloc::vec::Vec;
use core::cmp::min;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{ArithError, Coeff, PREC_CAP};

/// An element of `Q_p` known modulo `p^N`.
///
/// A nonzero element is `p^v * u` with `u` a unit stored modulo
/// `p^(N - v)`; its base-`p` digit list has length exactly `N - v` and a
/// nonzero leading digit. The canonical zero stores no unit and has
/// valuation `+inf`, retaining only the precision at which it is
/// indistinguishable from zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Padic {
    prime: u64,
    abs_prec: i64,
    /// `(valuation, unit)` for nonzero elements, `None` for zero.
    repr: Option<(i64, BigUint)>,
}

fn p_pow(p: u64, k: i64) -> BigUint {
    debug_assert!(k >= 0);
    BigUint::from(p).pow(k as u32)
}

impl Padic {
    /// Canonical zero at absolute precision `abs_prec`.
    pub fn zero(prime: u64, abs_prec: i64) -> Self {
        Padic {
            prime,
            abs_prec,
            repr: None,
        }
    }

    /// One, known modulo `p^abs_prec`.
    pub fn one(prime: u64, abs_prec: i64) -> Self {
        Padic::from_integer(prime, 1, abs_prec)
    }

    /// The value `n mod p^abs_prec`.
    pub fn from_integer(prime: u64, n: i64, abs_prec: i64) -> Self {
        Padic::from_bigint(prime, &BigInt::from(n), abs_prec)
    }

    /// The value of an exact big integer modulo `p^abs_prec`.
    pub fn from_bigint(prime: u64, n: &BigInt, abs_prec: i64) -> Self {
        if abs_prec <= 0 || n.is_zero() {
            return Padic::zero(prime, abs_prec);
        }
        let modulus = BigInt::from(p_pow(prime, abs_prec));
        let r = n.mod_floor(&modulus);
        Padic::normalize(prime, 0, r.to_biguint().unwrap(), abs_prec)
    }

    /// `num/den mod p^abs_prec`; `den` must be nonzero.
    pub fn from_ratio(prime: u64, num: i64, den: i64, abs_prec: i64) -> Result<Self, ArithError> {
        if den == 0 {
            return Err(ArithError::DivisionByZero);
        }
        let n = Padic::from_bigint(prime, &BigInt::from(num), abs_prec + 64);
        let d = Padic::from_bigint(prime, &BigInt::from(den), abs_prec + 64);
        Ok(n.div(&d)?.reduce_abs_prec(abs_prec))
    }

    /// `p^v * unit + O(p^abs_prec)`, normalizing the representation.
    pub fn from_unit(prime: u64, valuation: i64, unit: BigUint, abs_prec: i64) -> Self {
        Padic::normalize(prime, valuation, unit, abs_prec)
    }

    /// Rebuild from a digit list: `p^valuation * sum(digits[i] p^i)`, digits
    /// known through absolute precision `abs_prec`.
    pub fn from_digits(prime: u64, valuation: i64, digits: &[u64], abs_prec: i64) -> Self {
        let mut unit = BigUint::zero();
        for &d in digits.iter().rev() {
            unit = unit * prime + d;
        }
        Padic::normalize(prime, valuation, unit, abs_prec)
    }

    /// Invariant-restoring constructor: reduces the unit modulo
    /// `p^(abs_prec - val)`, strips powers of `p` into the valuation, and
    /// collapses to canonical zero when nothing survives.
    fn normalize(prime: u64, valuation: i64, mut unit: BigUint, abs_prec: i64) -> Self {
        let window = abs_prec - valuation;
        if window <= 0 {
            return Padic::zero(prime, abs_prec);
        }
        unit %= p_pow(prime, window);
        if unit.is_zero() {
            return Padic::zero(prime, abs_prec);
        }
        let p = BigUint::from(prime);
        let mut val = valuation;
        while (&unit % &p).is_zero() {
            unit /= &p;
            val += 1;
        }
        Padic {
            prime,
            abs_prec,
            repr: Some((val, unit)),
        }
    }

    /// Unit part of a nonzero element.
    pub fn unit(&self) -> Option<&BigUint> {
        self.repr.as_ref().map(|(_, u)| u)
    }

    /// Base-`p` digits of the unit part, padded to length
    /// `abs_prec - valuation`. Empty for zero.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            None => Vec::new(),
            Some((v, u)) => {
                let len = (self.abs_prec - v) as usize;
                let mut out = Vec::with_capacity(len);
                let p = BigUint::from(self.prime);
                let mut rest = u.clone();
                for _ in 0..len {
                    let (q, r) = rest.div_rem(&p);
                    out.push(r.to_u64().unwrap());
                    rest = q;
                }
                out
            }
        }
    }

    /// The value as an exact rational `unit * p^val` (valuation may be
    /// negative), or `None` for zero.
    pub fn to_bigint_scaled(&self) -> Option<(BigInt, i64)> {
        self.repr
            .as_ref()
            .map(|(v, u)| (BigInt::from_biguint(Sign::Plus, u.clone()), *v))
    }

    fn check_prime(&self, rhs: &Padic) -> Result<(), ArithError> {
        if self.prime != rhs.prime {
            return Err(ArithError::PrimeMismatch {
                left: self.prime,
                right: rhs.prime,
            });
        }
        Ok(())
    }

    /// Valuation, with zero reported as its precision bound (the valuation
    /// is known only to be `>= abs_prec`).
    fn val_bound(&self) -> i64 {
        self.repr.as_ref().map_or(self.abs_prec, |(v, _)| *v)
    }
}

impl Coeff for Padic {
    fn prime(&self) -> u64 {
        self.prime
    }

    fn field_degree(&self) -> u32 {
        1
    }

    fn abs_prec(&self) -> i64 {
        self.abs_prec
    }

    fn valuation(&self) -> Option<i64> {
        self.repr.as_ref().map(|(v, _)| *v)
    }

    fn zero_like(&self) -> Self {
        Padic::zero(self.prime, self.abs_prec)
    }

    fn one_like(&self) -> Self {
        Padic::one(self.prime, self.rel_prec().max(1))
    }

    fn one_at(&self, abs_prec: i64) -> Self {
        Padic::one(self.prime, abs_prec.max(1))
    }

    fn add(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.check_prime(rhs)?;
        let prec = min(self.abs_prec, rhs.abs_prec);
        match (&self.repr, &rhs.repr) {
            (None, None) => Ok(Padic::zero(self.prime, prec)),
            (None, Some((v, u))) | (Some((v, u)), None) => {
                Ok(Padic::normalize(self.prime, *v, u.clone(), prec))
            }
            (Some((va, ua)), Some((vb, ub))) => {
                let v = min(*va, *vb);
                let sum = ua * p_pow(self.prime, va - v) + ub * p_pow(self.prime, vb - v);
                Ok(Padic::normalize(self.prime, v, sum, prec))
            }
        }
    }

    fn neg(&self) -> Self {
        match &self.repr {
            None => self.clone(),
            Some((v, u)) => {
                let window = self.abs_prec - v;
                let m = p_pow(self.prime, window);
                Padic::normalize(self.prime, *v, &m - u % &m, self.abs_prec)
            }
        }
    }

    fn mul(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.check_prime(rhs)?;
        let prec = min(
            self.val_bound().saturating_add(rhs.abs_prec),
            rhs.val_bound().saturating_add(self.abs_prec),
        )
        .min(PREC_CAP);
        match (&self.repr, &rhs.repr) {
            (Some((va, ua)), Some((vb, ub))) => {
                Ok(Padic::normalize(self.prime, va + vb, ua * ub, prec))
            }
            _ => Ok(Padic::zero(self.prime, prec)),
        }
    }

    fn inv(&self) -> Result<Self, ArithError> {
        let (v, u) = self.repr.as_ref().ok_or(ArithError::DivisionByZero)?;
        let window = self.abs_prec - v;
        let inv = inv_unit_mod_p_pow(self.prime, u, window);
        Ok(Padic {
            prime: self.prime,
            abs_prec: -v + window,
            repr: Some((-v, inv)),
        })
    }

    fn mul_p_pow(&self, k: i64) -> Self {
        Padic {
            prime: self.prime,
            abs_prec: self.abs_prec + k,
            repr: self.repr.as_ref().map(|(v, u)| (v + k, u.clone())),
        }
    }

    fn mul_int(&self, n: i64) -> Self {
        if n == 0 {
            return self.zero_like();
        }
        match &self.repr {
            None => {
                // abs_prec improves by the p-valuation of n
                let mut t = 0i64;
                let mut a = n.unsigned_abs();
                while a.is_multiple_of(self.prime) {
                    a /= self.prime;
                    t += 1;
                }
                Padic::zero(self.prime, self.abs_prec + t)
            }
            Some((v, u)) => {
                let mut t = 0i64;
                let mut a = n.unsigned_abs();
                while a.is_multiple_of(self.prime) {
                    a /= self.prime;
                    t += 1;
                }
                let prod = u * BigUint::from(a);
                let r = Padic::normalize(self.prime, v + t, prod, self.abs_prec + t);
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
                Ok(Padic::zero(self.prime, prec))
            }
            Some((v, u)) => {
                let window = self.abs_prec - v;
                let ev = (*v as i128).saturating_mul(e as i128);
                if *v > 0 && ev >= PREC_CAP as i128 {
                    return Ok(Padic::zero(self.prime, PREC_CAP));
                }
                if ev.abs() >= PREC_CAP as i128 {
                    return Err(ArithError::ExponentOverflow);
                }
                let val = ev as i64;
                let m = p_pow(self.prime, window);
                let mut exp = BigUint::zero();
                let mut shift = 0u32;
                let mut ee = e;
                while ee > 0 {
                    exp |= BigUint::from((ee & 0xffff_ffff_ffff_ffff) as u64) << shift;
                    ee >>= 64;
                    shift += 64;
                }
                let powed = u.modpow(&exp, &m);
                Ok(Padic {
                    prime: self.prime,
                    abs_prec: val + window,
                    repr: Some((val, powed)),
                })
            }
        }
    }

    fn frobenius(&self) -> Self {
        self.clone()
    }

    fn reduce_abs_prec(&self, n: i64) -> Self {
        if n >= self.abs_prec {
            return self.clone();
        }
        match &self.repr {
            None => Padic::zero(self.prime, n),
            Some((v, u)) => Padic::normalize(self.prime, *v, u.clone(), n),
        }
    }
}

/// Inverse of a unit modulo `p^window` by Hensel lifting from the residue
/// inverse modulo `p`.
fn inv_unit_mod_p_pow(p: u64, u: &BigUint, window: i64) -> BigUint {
    debug_assert!(window >= 1);
    let u0 = (u % BigUint::from(p)).to_u64().unwrap();
    let r0 = mod_inverse_u64(u0, p);
    let mut x = BigUint::from(r0);
    let mut k = 1i64;
    let two = BigUint::from(2u32);
    while k < window {
        k = (2 * k).min(window);
        let m = p_pow(p, k);
        let t = (&two + &m - (u % &m) * &x % &m) % &m;
        x = &x * t % &m;
    }
    x
}

fn mod_inverse_u64(a: u64, p: u64) -> u64 {
    // extended Euclid on (a, p), p prime, a not divisible by p
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i128) as u64
}

impl fmt::Debug for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            None => write!(f, "O({}^{})", self.prime, self.abs_prec),
            Some((v, u)) => {
                if *v == 0 {
                    write!(f, "{} + O({}^{})", u, self.prime, self.abs_prec)
                } else {
                    write!(f, "{}^{}*{} + O({}^{})", self.prime, v, u, self.prime, self.abs_prec)
                }
            }
        }
    }
}
