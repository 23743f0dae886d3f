//! One-dimensional formal group laws of finite height.
//!
//! Characteristic-zero laws are handled through their logarithms:
//! `F(x, y) = exp(log x + log y)` with `exp` the compositional inverse.
//! The deformation-space laws come from the functional-equation recursion
//! `p * b_n = sum_{i=1}^{h} b_{n-i} * u_i^(p^(n-i))` with `u_h = 1`, whose
//! specialization at `u = 0` is the Honda logarithm
//! `l_0(x) = sum_k x^((p^h)^k) / p^k`.

use alloc::vec::Vec;

use crate::parith::{ArithError, Coeff, PSeries, Padic};

/// A bivariate formal group law, optionally with its logarithm.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw<C: Coeff> {
    law: PSeries<C>,
    log: Option<PSeries<C>>,
}

/// Result of height detection on the special fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Height {
    Finite(u32),
    /// `[p]` vanishes mod `p` through the truncation order.
    Infinite,
    /// No unit coefficient at or below degree `p^h_max`; taller heights
    /// are not distinguishable at this truncation.
    UndeterminedBeyond(u32),
}

/// Deformation parameters `(u_1, ..., u_{h-1})` for a height-`h` law.
#[derive(Clone, Debug)]
pub struct DeformationParams<C: Coeff> {
    h: u32,
    u: Vec<C>,
}

impl<C: Coeff> DeformationParams<C> {
    pub fn new(h: u32, u: Vec<C>) -> Result<Self, ArithError> {
        if h < 1 || u.len() != (h - 1) as usize {
            return Err(ArithError::Invalid(alloc::format!(
                "height {h} needs {} deformation parameters, got {}",
                h.saturating_sub(1),
                u.len()
            )));
        }
        Ok(DeformationParams { h, u })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn u(&self) -> &[C] {
        &self.u
    }

    /// All parameters have valuation `>= 1` (an integral point of
    /// deformation space).
    pub fn is_integral(&self) -> bool {
        self.u.iter().all(|c| c.valuation().is_none_or(|v| v >= 1))
    }
}

impl<C: Coeff> FormalGroupLaw<C> {
    pub fn law(&self) -> &PSeries<C> {
        &self.law
    }

    pub fn log(&self) -> Option<&PSeries<C>> {
        self.log.as_ref()
    }

    pub fn trunc_order(&self) -> usize {
        self.law.trunc_order()
    }

    /// Construct from an arbitrary bivariate series (no logarithm data);
    /// the law axioms are checked on demand, not here.
    pub fn from_series(law: PSeries<C>) -> Result<Self, ArithError> {
        if law.num_vars() != 2 {
            return Err(ArithError::ShapeMismatch(
                "a formal group law is a bivariate series".into(),
            ));
        }
        Ok(FormalGroupLaw { law, log: None })
    }

    /// `F(x, 0) = x` and `F(0, y) = y` through the truncation order.
    pub fn check_unit(&self) -> Result<bool, ArithError> {
        for axis in 0..2 {
            // terms supported on one axis must form exactly that variable
            let mut ok_linear = false;
            for (e, c) in self.law.terms() {
                if e[1 - axis] != 0 {
                    continue;
                }
                if e[axis] == 1 {
                    if !c.congruent(&c.one_like()) {
                        return Ok(false);
                    }
                    ok_linear = true;
                } else {
                    return Ok(false);
                }
            }
            if !ok_linear {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `F(x, y) = F(y, x)` through the truncation order.
    pub fn check_comm(&self) -> Result<bool, ArithError> {
        let swapped = self.law.lift_vars(2, &[1, 0])?;
        Ok(self.law.congruent(&swapped))
    }

    /// Full associativity `F(F(x, y), z) = F(x, F(y, z))` through the
    /// truncation order; cubic in the term count.
    pub fn check_assoc(&self) -> Result<bool, ArithError> {
        let one = match self.law.terms().next() {
            Some((_, c)) => c.one_like(),
            None => return Ok(false),
        };
        let trunc = self.law.trunc_order();
        let f_xy = self.law.lift_vars(3, &[0, 1])?;
        let f_yz = self.law.lift_vars(3, &[1, 2])?;
        let x3 = PSeries::var(3, trunc, 0, one.clone())?;
        let z3 = PSeries::var(3, trunc, 2, one)?;
        let left = self.law.subst(&[f_xy, z3])?;
        let right = self.law.subst(&[x3, f_yz])?;
        Ok(left.congruent(&right))
    }

    /// Sampled associativity: evaluate both bracketings at supplied
    /// coefficient triples (each of positive valuation, so truncation
    /// error is controlled) and compare. Cheaper than [`check_assoc`] for
    /// large truncation orders; the caller chooses the sample.
    pub fn check_assoc_at(&self, samples: &[(C, C, C)]) -> Result<bool, ArithError> {
        for (a, b, c) in samples {
            for v in [a, b, c] {
                if !v.valuation().is_none_or(|v| v >= 1) {
                    return Err(ArithError::Invalid(
                        "associativity samples need valuation >= 1".into(),
                    ));
                }
            }
            // truncation discards degree >= M; with val >= 1 samples both
            // sides agree at least modulo p^M
            let guard = self.law.trunc_order() as i64;
            let fab = self.law.eval_at(&[a.clone(), b.clone()])?;
            let left = self.law.eval_at(&[fab, c.clone()])?;
            let fbc = self.law.eval_at(&[b.clone(), c.clone()])?;
            let right = self.law.eval_at(&[a.clone(), fbc])?;
            if !left
                .reduce_abs_prec(guard)
                .congruent(&right.reduce_abs_prec(guard))
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `log(F(x, y)) = log(x) + log(y)` through the truncation order, when
    /// a logarithm is attached.
    pub fn check_log_additivity(&self) -> Result<bool, ArithError> {
        let log = match &self.log {
            Some(l) => l,
            None => return Ok(true),
        };
        let lx = log.lift_vars(2, &[0])?;
        let ly = log.lift_vars(2, &[1])?;
        let sum = lx.add(&ly)?;
        let lf = log.subst(core::slice::from_ref(&self.law))?;
        Ok(lf.congruent(&sum))
    }

    /// `[p]`-series by the logarithm route when available, otherwise by
    /// `p`-fold formal addition.
    pub fn p_series(&self) -> Result<PSeries<C>, ArithError> {
        match &self.log {
            Some(_) => self.p_series_via_log(),
            None => self.p_series_via_addition(),
        }
    }

    /// `[p](x) = exp(p * log(x))`; works at the logarithm's truncation
    /// order, independent of the bivariate law's order.
    pub fn p_series_via_log(&self) -> Result<PSeries<C>, ArithError> {
        let log = self.log.as_ref().ok_or_else(|| {
            ArithError::Invalid("no logarithm attached to this law".into())
        })?;
        let p = prime_of(log)?;
        let exp = log.reverse()?;
        exp.compose(&log.mul_int(p as i64)?)
    }

    /// `[p](x)` by iterated formal addition `[k+1](x) = F([k](x), x)`.
    pub fn p_series_via_addition(&self) -> Result<PSeries<C>, ArithError> {
        let p = prime_of(&self.law)?;
        let one = self
            .law
            .terms()
            .next()
            .map(|(_, c)| c.one_like())
            .ok_or_else(|| ArithError::Invalid("zero law".into()))?;
        let trunc = self.law.trunc_order();
        let x = PSeries::var(1, trunc, 0, one)?;
        let mut cur = x.clone();
        for _ in 1..p {
            cur = self.law.subst(&[cur, x.clone()])?;
        }
        Ok(cur)
    }

    /// Height of the reduction mod `p`: the smallest `h` with
    /// `[p](x) = c x^(p^h) + ... (mod p)`, `c` a unit.
    ///
    /// Requires the `[p]`-series to be integral at its stated precision
    /// and visible past degree `p^h_max`.
    pub fn height_mod_p(&self, h_max: u32) -> Result<Height, ArithError> {
        let ps = self.p_series()?;
        let p = prime_of(&ps)?;
        let bound = (p as u128).checked_pow(h_max).ok_or(ArithError::ExponentOverflow)?;
        if (ps.trunc_order() as u128) <= bound {
            return Err(ArithError::PrecisionExhausted {
                needed: bound as i64 + 1,
                available: ps.trunc_order() as i64,
            });
        }
        let mut min_unit_deg: Option<u128> = None;
        for (e, c) in ps.terms() {
            match c.valuation() {
                None => {
                    if c.abs_prec() < 1 {
                        return Err(ArithError::PrecisionExhausted {
                            needed: 1,
                            available: c.abs_prec(),
                        });
                    }
                }
                Some(v) if v < 0 => {
                    return Err(ArithError::Invalid(
                        "[p]-series is not integral; the law does not reduce mod p".into(),
                    ))
                }
                Some(0) => {
                    let d = e[0] as u128;
                    if min_unit_deg.is_none_or(|m| d < m) {
                        min_unit_deg = Some(d);
                    }
                }
                Some(_) => {}
            }
        }
        match min_unit_deg {
            None => Ok(Height::Infinite),
            Some(d) if d > bound => Ok(Height::UndeterminedBeyond(h_max)),
            Some(d) => {
                let mut h = 0u32;
                let mut t = 1u128;
                while t < d {
                    t *= p as u128;
                    h += 1;
                }
                if t == d {
                    Ok(Height::Finite(h))
                } else {
                    Err(ArithError::Invalid(alloc::format!(
                        "lowest unit term of [p] mod p sits at degree {d}, not a power of {p}"
                    )))
                }
            }
        }
    }
}

fn prime_of<C: Coeff>(s: &PSeries<C>) -> Result<u64, ArithError> {
    s.terms()
        .next()
        .map(|(_, c)| c.prime())
        .ok_or_else(|| ArithError::Invalid("cannot read the prime off a zero series".into()))
}

/// `F = exp(log x + log y)` for a logarithm `x + O(x^2)` over a ring where
/// `p` is invertible.
pub fn fgl_from_log<C: Coeff>(
    log: &PSeries<C>,
    f_trunc: usize,
) -> Result<FormalGroupLaw<C>, ArithError> {
    if log.num_vars() != 1 {
        return Err(ArithError::ShapeMismatch("logarithm must be univariate".into()));
    }
    let c1 = log.get1(1).ok_or_else(|| {
        ArithError::Invalid("logarithm does not start with x".into())
    })?;
    if log.get1(0).is_some() || !c1.congruent(&c1.one_like()) {
        return Err(ArithError::Invalid("logarithm does not start with x".into()));
    }
    let exp = log.reverse()?;
    let log2 = log.truncate_to(f_trunc);
    let lx = log2.lift_vars(2, &[0])?;
    let ly = log2.lift_vars(2, &[1])?;
    let sum = lx.add(&ly)?;
    let law = exp.truncate_to(f_trunc).subst(core::slice::from_ref(&sum))?;
    Ok(FormalGroupLaw {
        law,
        log: Some(log.clone()),
    })
}

/// Honda logarithm of height `h`: coefficient of `x^((p^h)^k)` is `p^-k`,
/// truncated at total degree `trunc`. Coefficients carry `prec` digits of
/// relative precision.
pub fn honda_log(p: u64, h: u32, trunc: usize, prec: i64) -> Result<PSeries<Padic>, ArithError> {
    if h < 1 || trunc < 2 {
        return Err(ArithError::Invalid(
            "honda_log needs h >= 1 and truncation order >= 2".into(),
        ));
    }
    let mut terms = Vec::new();
    let step = (p as u128).checked_pow(h).ok_or(ArithError::ExponentOverflow)?;
    let mut e: u128 = 1;
    let mut k: i64 = 0;
    while e < trunc as u128 {
        if e > u32::MAX as u128 {
            break;
        }
        terms.push((
            alloc::vec![e as u32],
            Padic::one(p, prec).mul_p_pow(-k),
        ));
        e = e.saturating_mul(step);
        k += 1;
    }
    PSeries::from_terms(1, trunc, terms)
}

/// The quasi-logarithms `[l_0, l_1, ..., l_{h-1}]` with
/// `l_i(x) = l_0(x^(p^i)) / p` for `i >= 1`.
pub fn quasi_logs(
    p: u64,
    h: u32,
    trunc: usize,
    prec: i64,
) -> Result<Vec<PSeries<Padic>>, ArithError> {
    let l0 = honda_log(p, h, trunc, prec)?;
    let mut out = Vec::with_capacity(h as usize);
    out.push(l0.clone());
    for i in 1..h {
        let t = (p as u128).checked_pow(i).ok_or(ArithError::ExponentOverflow)?;
        if t > u32::MAX as u128 {
            return Err(ArithError::ExponentOverflow);
        }
        out.push(l0.dilate(0, t as u32)?.mul_p_pow(-1));
    }
    Ok(out)
}

/// Specialized universal-deformation logarithm coefficients:
/// `b_0 = 1` and `p * b_n = sum_{i=1}^{h} b_{n-i} * u_i^(p^(n-i))` with
/// `u_h = 1`. Each step divides by `p`, so input precision bounds `n_max`.
pub fn gh_universal_coeffs<C: Coeff>(
    h: u32,
    u: &[C],
    one: &C,
    n_max: usize,
) -> Result<Vec<C>, ArithError> {
    if h < 1 || u.len() != (h - 1) as usize {
        return Err(ArithError::Invalid(alloc::format!(
            "height {h} needs {} deformation parameters, got {}",
            h.saturating_sub(1),
            u.len()
        )));
    }
    let p = one.prime();
    let mut b: Vec<C> = alloc::vec![one.clone()];
    for n in 1..=n_max {
        let mut acc = one.zero_like();
        for i in 1..=h as usize {
            if n < i {
                break;
            }
            let term = if i == h as usize {
                b[n - i].clone()
            } else {
                let tw = pow_p_exp(&u[i - 1], p, (n - i) as u32)?;
                b[n - i].mul(&tw)?
            };
            acc = acc.add(&term)?;
        }
        b.push(acc.mul_p_pow(-1));
    }
    Ok(b)
}

/// `c^(p^k)`, resolving astronomically large exponents by valuation:
/// positive-valuation bases collapse to zero at the precision cap.
fn pow_p_exp<C: Coeff>(c: &C, p: u64, k: u32) -> Result<C, ArithError> {
    if k == 0 {
        return Ok(c.clone());
    }
    if let Some(e) = (p as u128).checked_pow(k) {
        return c.pow_u(e);
    }
    match c.valuation() {
        None => c.pow_u(1u128 << 120), // zero stays zero, precision saturates
        Some(v) if v > 0 => c.pow_u(1u128 << 120),
        _ => Err(ArithError::ExponentOverflow),
    }
}

/// Assemble the logarithm `sum_n b_n x^(p^n)` from deformation
/// coefficients.
pub fn gh_log<C: Coeff>(b: &[C], p: u64, trunc: usize) -> Result<PSeries<C>, ArithError> {
    let mut terms = Vec::new();
    let mut e: u128 = 1;
    for coeff in b {
        if e >= trunc as u128 || e > u32::MAX as u128 {
            break;
        }
        terms.push((alloc::vec![e as u32], coeff.clone()));
        e = e.saturating_mul(p as u128);
    }
    PSeries::from_terms(1, trunc, terms)
}

/// The specialized universal-deformation law: logarithm through
/// `log_trunc`, bivariate law through `f_trunc`.
pub fn gh_deformation_law<C: Coeff>(
    params: &DeformationParams<C>,
    one: &C,
    f_trunc: usize,
    log_trunc: usize,
) -> Result<FormalGroupLaw<C>, ArithError> {
    let p = one.prime();
    let mut n_log = 0usize;
    let mut e: u128 = p as u128;
    while e < log_trunc as u128 {
        n_log += 1;
        e = e.saturating_mul(p as u128);
    }
    let b = gh_universal_coeffs(params.h(), params.u(), one, n_log)?;
    let log = gh_log(&b, p, log_trunc)?;
    fgl_from_log(&log, f_trunc)
}

/// Symbolic-in-`u` deformation coefficients for `h = 2`: each `b_n` is a
/// truncated series in the single variable `u_1`. Cross-check mode for
/// small orders only.
pub fn gh_universal_coeffs_symbolic_h2(
    p: u64,
    prec: i64,
    u_trunc: usize,
    n_max: usize,
) -> Result<Vec<PSeries<Padic>>, ArithError> {
    let one = PSeries::constant(1, u_trunc, Padic::one(p, prec))?;
    let mut b: Vec<PSeries<Padic>> = alloc::vec![one];
    for n in 1..=n_max {
        let mut acc = PSeries::zero(1, u_trunc);
        // i = 1 term: b_{n-1} * u^(p^(n-1))
        let e = (p as u128).saturating_pow((n - 1) as u32);
        if e < u_trunc as u128 {
            let mono = PSeries::monomial(1, u_trunc, alloc::vec![e as u32], Padic::one(p, prec))?;
            acc = acc.add(&b[n - 1].mul(&mono)?)?;
        }
        // i = 2 term: b_{n-2}
        if n >= 2 {
            acc = acc.add(&b[n - 2])?;
        }
        b.push(acc.mul_p_pow(-1));
    }
    Ok(b)
}
