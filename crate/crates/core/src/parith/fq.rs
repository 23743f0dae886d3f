//! Residue fields `F_{p^m}` with fixed, shipped moduli.
//!
//! Digit representations must be reproducible across runs, so every field
//! is realized as `F_p[x]/(f)` for a fixed primitive irreducible `f` from
//! the table below (Conway-compatible choices for small `(p, m)`). The
//! table is verified irreducible by the test suite.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::ArithError;

/// Shipped moduli, coefficients low-to-high including the leading 1.
/// `m = 1` entries are `x - c` for a primitive root `c`; arithmetic never
/// reduces by them, they only fix a convention.
const MODULI: &[(u64, u32, &[u64])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (3, 6, &[2, 2, 1, 0, 2, 0, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (5, 5, &[3, 4, 0, 0, 0, 1]),
    (5, 6, &[2, 0, 1, 4, 1, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (7, 4, &[3, 4, 5, 0, 1]),
    (7, 5, &[4, 1, 0, 0, 0, 1]),
    (7, 6, &[3, 0, 0, 0, 1, 1, 1]),
];

/// Parameters of a residue field `F_{p^m}`.
#[derive(Debug, PartialEq, Eq)]
pub struct FqParams {
    p: u64,
    m: u32,
    /// Monic modulus, coefficients low-to-high, length `m + 1`.
    modulus: Vec<u64>,
}

impl FqParams {
    /// Look up the shipped field. Any prime is accepted for `m = 1`;
    /// higher-degree fields must be in the table.
    pub fn new(p: u64, m: u32) -> Result<Arc<FqParams>, ArithError> {
        if let Some(&(_, _, coeffs)) = MODULI.iter().find(|&&(q, d, _)| q == p && d == m) {
            return Ok(Arc::new(FqParams {
                p,
                m,
                modulus: coeffs.to_vec(),
            }));
        }
        if m == 1 {
            // prime field over an arbitrary prime; the degree-1 modulus is
            // never used in reductions
            return Ok(Arc::new(FqParams {
                p,
                m,
                modulus: alloc::vec![0, 1],
            }));
        }
        Err(ArithError::UnsupportedField { p, m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field cardinality `p^m` (table-limited, never overflows).
    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.m)
    }
}

/// An element of `F_{p^m}`: a polynomial of degree `< m` over `F_p` in the
/// residue class of `x`.
#[derive(Clone, PartialEq, Eq)]
pub struct FqElem {
    params: Arc<FqParams>,
    /// length `m`, entries in `[0, p)`
    coeffs: Vec<u64>,
}

impl FqElem {
    pub fn new(params: Arc<FqParams>, mut coeffs: Vec<u64>) -> Result<Self, ArithError> {
        let m = params.m as usize;
        if coeffs.len() > m {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "field element needs at most {m} coordinates, got {}",
                coeffs.len()
            )));
        }
        coeffs.resize(m, 0);
        for c in coeffs.iter_mut() {
            *c %= params.p;
        }
        Ok(FqElem { params, coeffs })
    }

    pub fn zero(params: Arc<FqParams>) -> Self {
        let m = params.m as usize;
        FqElem {
            params,
            coeffs: alloc::vec![0; m],
        }
    }

    pub fn one(params: Arc<FqParams>) -> Self {
        let mut e = FqElem::zero(params);
        e.coeffs[0] = 1;
        e
    }

    /// The residue class of `x` (a multiplicative generator for the
    /// shipped moduli with `m > 1`).
    pub fn gen(params: Arc<FqParams>) -> Self {
        if params.m == 1 {
            return FqElem::one(params);
        }
        let mut e = FqElem::zero(params);
        e.coeffs[1] = 1;
        e
    }

    /// A scalar of the prime subfield.
    pub fn from_scalar(params: Arc<FqParams>, c: u64) -> Self {
        let p = params.p;
        let mut e = FqElem::zero(params);
        e.coeffs[0] = c % p;
        e
    }

    pub fn params(&self) -> &Arc<FqParams> {
        &self.params
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_field(&self, rhs: &FqElem) -> Result<(), ArithError> {
        if self.params.p != rhs.params.p || self.params.m != rhs.params.m {
            return Err(ArithError::FieldMismatch {
                left: (self.params.p, self.params.m),
                right: (rhs.params.p, rhs.params.m),
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &FqElem) -> Result<FqElem, ArithError> {
        self.check_field(rhs)?;
        let p = self.params.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| (a + b) % p)
            .collect();
        Ok(FqElem {
            params: self.params.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> FqElem {
        let p = self.params.p;
        FqElem {
            params: self.params.clone(),
            coeffs: self.coeffs.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn sub(&self, rhs: &FqElem) -> Result<FqElem, ArithError> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &FqElem) -> Result<FqElem, ArithError> {
        self.check_field(rhs)?;
        let p = self.params.p;
        let m = self.params.m as usize;
        let mut prod = alloc::vec![0u64; 2 * m];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        // reduce by the monic modulus
        let f = &self.params.modulus;
        for d in (m..2 * m).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (k, &fc) in f.iter().take(m).enumerate() {
                let idx = d - m + k;
                prod[idx] = (prod[idx] + c * (p - fc)) % p;
            }
        }
        prod.truncate(m);
        Ok(FqElem {
            params: self.params.clone(),
            coeffs: prod,
        })
    }

    pub fn pow(&self, mut e: u128) -> FqElem {
        let mut acc = FqElem::one(self.params.clone());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            e >>= 1;
        }
        acc
    }

    /// `a -> a^p`, the arithmetic Frobenius; has order dividing `m`.
    pub fn frobenius(&self) -> FqElem {
        self.pow(self.params.p as u128)
    }

    pub fn inv(&self) -> Result<FqElem, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self.pow(self.params.q() - 2))
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq{:?}", self.coeffs)
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq{:?}", self.coeffs)
    }
}
