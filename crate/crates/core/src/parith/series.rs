//! Sparse truncated (multi)power series over a capped-precision
//! coefficient ring.
//!
//! Truncation is by total degree: monomials of total degree `>= trunc` are
//! discarded everywhere. Stored coefficients are never zero at their
//! precision; monomial exponent vectors always have length `num_vars`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use super::{ArithError, Coeff};

/// Truncated power series with sparse coefficient storage.
#[derive(Clone, PartialEq)]
pub struct PSeries<C: Coeff> {
    num_vars: usize,
    trunc: usize,
    coeffs: BTreeMap<Vec<u32>, C>,
}

fn total_deg(exps: &[u32]) -> usize {
    exps.iter().map(|&e| e as usize).sum()
}

impl<C: Coeff> PSeries<C> {
    pub fn zero(num_vars: usize, trunc: usize) -> Self {
        PSeries {
            num_vars,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    /// Build from `(exponents, coefficient)` terms, merging duplicates and
    /// dropping anything past the truncation order.
    pub fn from_terms<I>(num_vars: usize, trunc: usize, terms: I) -> Result<Self, ArithError>
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let mut s = PSeries::zero(num_vars, trunc);
        for (exps, c) in terms {
            s.insert_add(exps, c)?;
        }
        Ok(s)
    }

    /// The single monomial `c * x^exps`.
    pub fn monomial(
        num_vars: usize,
        trunc: usize,
        exps: Vec<u32>,
        c: C,
    ) -> Result<Self, ArithError> {
        PSeries::from_terms(num_vars, trunc, [(exps, c)])
    }

    /// The variable `x_i` with unit coefficient `one`.
    pub fn var(num_vars: usize, trunc: usize, i: usize, one: C) -> Result<Self, ArithError> {
        if i >= num_vars {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "variable index {i} out of range for {num_vars} variables"
            )));
        }
        let mut exps = alloc::vec![0u32; num_vars];
        exps[i] = 1;
        PSeries::monomial(num_vars, trunc, exps, one)
    }

    /// The constant series `c`.
    pub fn constant(num_vars: usize, trunc: usize, c: C) -> Result<Self, ArithError> {
        PSeries::monomial(num_vars, trunc, alloc::vec![0u32; num_vars], c)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn trunc_order(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.coeffs.iter()
    }

    pub fn get(&self, exps: &[u32]) -> Option<&C> {
        self.coeffs.get(exps)
    }

    /// Coefficient of the given monomial in a univariate series.
    pub fn get1(&self, e: u32) -> Option<&C> {
        self.coeffs.get(core::slice::from_ref(&e))
    }

    fn insert_add(&mut self, exps: Vec<u32>, c: C) -> Result<(), ArithError> {
        if exps.len() != self.num_vars {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "exponent vector length {} vs {} variables",
                exps.len(),
                self.num_vars
            )));
        }
        if total_deg(&exps) >= self.trunc || c.is_zero() {
            return Ok(());
        }
        if let Some((_, c0)) = self.coeffs.iter().next() {
            if c0.prime() != c.prime() {
                return Err(ArithError::PrimeMismatch {
                    left: c0.prime(),
                    right: c.prime(),
                });
            }
        }
        match self.coeffs.remove(&exps) {
            None => {
                self.coeffs.insert(exps, c);
            }
            Some(old) => {
                let sum = old.add(&c)?;
                if !sum.is_zero() {
                    self.coeffs.insert(exps, sum);
                }
            }
        }
        Ok(())
    }

    fn check_shape(&self, rhs: &Self) -> Result<(), ArithError> {
        if self.num_vars != rhs.num_vars {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "{} vs {} variables",
                self.num_vars,
                rhs.num_vars
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.check_shape(rhs)?;
        let mut out = PSeries::zero(self.num_vars, self.trunc.min(rhs.trunc));
        for (e, c) in self.coeffs.iter().chain(rhs.coeffs.iter()) {
            out.insert_add(e.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        PSeries {
            num_vars: self.num_vars,
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.check_shape(rhs)?;
        let trunc = self.trunc.min(rhs.trunc);
        let mut out = PSeries::zero(self.num_vars, trunc);
        for (ea, ca) in &self.coeffs {
            let da = total_deg(ea);
            if da >= trunc {
                continue;
            }
            for (eb, cb) in &rhs.coeffs {
                if da + total_deg(eb) >= trunc {
                    continue;
                }
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_add(exps, ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn mul_coeff(&self, c: &C) -> Result<Self, ArithError> {
        let mut out = PSeries::zero(self.num_vars, self.trunc);
        for (e, v) in &self.coeffs {
            out.insert_add(e.clone(), v.mul(c)?)?;
        }
        Ok(out)
    }

    pub fn mul_p_pow(&self, k: i64) -> Self {
        PSeries {
            num_vars: self.num_vars,
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e.clone(), c.mul_p_pow(k)))
                .collect(),
        }
    }

    pub fn mul_int(&self, n: i64) -> Result<Self, ArithError> {
        let mut out = PSeries::zero(self.num_vars, self.trunc);
        for (e, v) in &self.coeffs {
            out.insert_add(e.clone(), v.mul_int(n))?;
        }
        Ok(out)
    }

    /// Every coefficient has nonnegative valuation (an integral model).
    /// Division by `p` is always legal; this is the opt-in check for
    /// callers who need integrality.
    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integral())
    }

    /// Apply a coefficient map, dropping resulting zeros.
    pub fn map_coeffs<F: Fn(&C) -> C>(&self, f: F) -> Self {
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let v = f(c);
            if !v.is_zero() {
                coeffs.insert(e.clone(), v);
            }
        }
        PSeries {
            num_vars: self.num_vars,
            trunc: self.trunc,
            coeffs,
        }
    }

    /// Lower the truncation order.
    pub fn truncate_to(&self, trunc: usize) -> Self {
        let trunc = trunc.min(self.trunc);
        PSeries {
            num_vars: self.num_vars,
            trunc,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| total_deg(e) < trunc)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-index variables into a wider polynomial ring: variable `i`
    /// becomes variable `map[i]`.
    pub fn lift_vars(&self, num_vars: usize, map: &[usize]) -> Result<Self, ArithError> {
        if map.len() != self.num_vars || map.iter().any(|&j| j >= num_vars) {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "variable map {map:?} invalid for {num_vars} target variables"
            )));
        }
        let mut out = PSeries::zero(num_vars, self.trunc);
        for (e, c) in &self.coeffs {
            let mut exps = alloc::vec![0u32; num_vars];
            for (i, &ei) in e.iter().enumerate() {
                exps[map[i]] += ei;
            }
            out.insert_add(exps, c.clone())?;
        }
        Ok(out)
    }

    /// Substitute `x_var -> x_var^t` (exponent dilation); terms pushed past
    /// the truncation order vanish.
    pub fn dilate(&self, var: usize, t: u32) -> Result<Self, ArithError> {
        if var >= self.num_vars {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "variable index {var} out of range"
            )));
        }
        let mut out = PSeries::zero(self.num_vars, self.trunc);
        for (e, c) in &self.coeffs {
            let scaled = (e[var] as u64) * (t as u64);
            let rest: usize = total_deg(e) - e[var] as usize;
            if scaled as usize + rest >= self.trunc {
                continue;
            }
            let mut exps = e.clone();
            exps[var] = scaled as u32;
            out.insert_add(exps, c.clone())?;
        }
        Ok(out)
    }

    /// Total substitution: evaluate at one series per variable. Arguments
    /// must share shape and have zero constant term.
    pub fn subst(&self, args: &[PSeries<C>]) -> Result<Self, ArithError> {
        if args.len() != self.num_vars {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "{} substitution arguments for {} variables",
                args.len(),
                self.num_vars
            )));
        }
        let nv = args[0].num_vars;
        let mut trunc = self.trunc;
        for g in args {
            if g.num_vars != nv {
                return Err(ArithError::ShapeMismatch(
                    "substitution arguments disagree on variable count".into(),
                ));
            }
            if g.get(&alloc::vec![0u32; nv]).is_some() {
                return Err(ArithError::ConstantTerm);
            }
            trunc = trunc.min(g.trunc);
        }
        // per-variable power tables
        let mut tables: Vec<BTreeMap<u32, PSeries<C>>> = alloc::vec![BTreeMap::new(); args.len()];
        for (i, table) in tables.iter_mut().enumerate() {
            let mut needed: Vec<u32> = self
                .coeffs
                .keys()
                .map(|e| e[i])
                .filter(|&e| e > 0)
                .collect();
            needed.sort_unstable();
            needed.dedup();
            if needed.is_empty() {
                continue;
            }
            let arg = args[i].truncate_to(trunc);
            let max = *needed.last().unwrap();
            if (max as usize) <= 2 * needed.len() + 8 {
                // dense band: incremental powers
                let mut pow = arg.clone();
                let mut k = 1u32;
                for &e in &needed {
                    while k < e {
                        pow = pow.mul(&arg)?;
                        k += 1;
                    }
                    table.insert(e, pow.clone());
                }
            } else {
                // sparse exponents: binary powering with a square cache
                let mut squares: Vec<PSeries<C>> = alloc::vec![arg.clone()];
                let mut top = 1u32;
                while top < max {
                    let last = squares.last().unwrap();
                    squares.push(last.mul(last)?);
                    top <<= 1;
                }
                for &e in &needed {
                    let mut acc: Option<PSeries<C>> = None;
                    for (bit, sq) in squares.iter().enumerate() {
                        if (e >> bit) & 1 == 1 {
                            acc = Some(match acc {
                                None => sq.clone(),
                                Some(a) => a.mul(sq)?,
                            });
                        }
                    }
                    table.insert(e, acc.expect("e > 0"));
                }
            }
        }
        let mut out = PSeries::zero(nv, trunc);
        for (e, c) in &self.coeffs {
            let mut prod: Option<PSeries<C>> = None;
            for (i, &ei) in e.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                let pw = &tables[i][&ei];
                prod = Some(match prod {
                    None => pw.clone(),
                    Some(p) => p.mul(pw)?,
                });
            }
            match prod {
                None => out.insert_add(alloc::vec![0u32; nv], c.clone())?,
                Some(p) => {
                    let scaled = p.mul_coeff(c)?;
                    out = out.add(&scaled)?;
                }
            }
        }
        Ok(out)
    }

    /// Evaluate at a point, one coefficient value per variable.
    pub fn eval_at(&self, point: &[C]) -> Result<C, ArithError> {
        if point.len() != self.num_vars || point.is_empty() {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "{} evaluation values for {} variables",
                point.len(),
                self.num_vars
            )));
        }
        let mut acc = point[0].zero_like();
        for (e, c) in &self.coeffs {
            let mut term = c.clone();
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    term = term.mul(&point[i].pow_u(ei as u128)?)?;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Univariate composition `self(g)`.
    pub fn compose(&self, g: &PSeries<C>) -> Result<Self, ArithError> {
        if self.num_vars != 1 {
            return Err(ArithError::ShapeMismatch(
                "compose expects a univariate series".into(),
            ));
        }
        self.subst(core::slice::from_ref(g))
    }

    /// Formal derivative with respect to `x_var`, on the stored truncation.
    pub fn derivative(&self, var: usize) -> Result<Self, ArithError> {
        if var >= self.num_vars {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "variable index {var} out of range"
            )));
        }
        let mut out = PSeries::zero(self.num_vars, self.trunc);
        for (e, c) in &self.coeffs {
            if e[var] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[var] -= 1;
            out.insert_add(exps, c.mul_int(e[var] as i64))?;
        }
        Ok(out)
    }

    /// Multiplicative inverse of a series with unit constant term.
    pub fn inverse(&self) -> Result<Self, ArithError> {
        let c0 = self
            .get(&alloc::vec![0u32; self.num_vars])
            .ok_or(ArithError::DivisionByZero)?;
        if !c0.is_unit() {
            return Err(ArithError::NonUnit {
                valuation: c0.valuation().unwrap_or(i64::MAX),
            });
        }
        let mut y = PSeries::constant(self.num_vars, self.trunc, c0.inv()?)?;
        let mut steps = 0usize;
        let mut k = 1usize;
        while k < self.trunc {
            k *= 2;
            steps += 1;
        }
        for _ in 0..=steps {
            // y <- y(2 - self*y)
            let t = self.mul(&y)?.neg().add(&PSeries::constant(
                self.num_vars,
                self.trunc,
                c0.one_like().mul_int(2),
            )?)?;
            y = y.mul(&t)?;
        }
        Ok(y)
    }

    /// Compositional inverse of a univariate series `c*x + O(x^2)` with
    /// `c` a unit: returns `g` with `self(g) = x` through the truncation
    /// order.
    pub fn reverse(&self) -> Result<Self, ArithError> {
        if self.num_vars != 1 {
            return Err(ArithError::ShapeMismatch(
                "reverse expects a univariate series".into(),
            ));
        }
        if self.get1(0).is_some() {
            return Err(ArithError::ConstantTerm);
        }
        let c1 = self.get1(1).ok_or(ArithError::NonUnit {
            valuation: i64::MAX,
        })?;
        if !c1.is_unit() {
            return Err(ArithError::NonUnit {
                valuation: c1.valuation().unwrap_or(i64::MAX),
            });
        }
        let x = PSeries::var(1, self.trunc, 0, c1.one_like())?;
        let mut g = PSeries::monomial(1, self.trunc, alloc::vec![1], c1.inv()?)?;
        let deriv = self.derivative(0)?;
        let mut steps = 0usize;
        let mut k = 2usize;
        while k < self.trunc + 2 {
            k *= 2;
            steps += 1;
        }
        for _ in 0..=steps {
            let err = self.compose(&g)?.sub(&x)?;
            if err.is_zero() {
                break;
            }
            let slope = deriv.compose(&g)?.inverse()?;
            g = g.sub(&err.mul(&slope)?)?;
        }
        Ok(g)
    }

    /// Coefficient-wise equality at the common precision, through the
    /// common truncation order. Absent monomials are treated as exact zero.
    pub fn congruent(&self, rhs: &Self) -> bool {
        if self.num_vars != rhs.num_vars {
            return false;
        }
        let trunc = self.trunc.min(rhs.trunc);
        for (e, c) in &self.coeffs {
            if total_deg(e) >= trunc {
                continue;
            }
            match rhs.coeffs.get(e) {
                Some(d) => {
                    if !c.congruent(d) {
                        return false;
                    }
                }
                None => return false,
            }
        }
        for e in rhs.coeffs.keys() {
            if total_deg(e) < trunc && !self.coeffs.contains_key(e) {
                return false;
            }
        }
        true
    }
}

impl<C: Coeff> fmt::Debug for PSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PSeries[{} vars, O(deg {})](", self.num_vars, self.trunc)?;
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*x^{e:?}")?;
            if i > 8 {
                write!(f, " + ... [{} terms]", self.coeffs.len())?;
                break;
            }
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::super::Padic;
    use super::*;

    fn c(p: u64, n: i64, prec: i64) -> Padic {
        Padic::from_integer(p, n, prec)
    }

    fn univar(p: u64, trunc: usize, terms: &[(u32, i64)], prec: i64) -> PSeries<Padic> {
        PSeries::from_terms(
            1,
            trunc,
            terms
                .iter()
                .map(|&(e, v)| (alloc::vec![e], c(p, v, prec))),
        )
        .unwrap()
    }

    #[test]
    fn compose_linear_substitution() {
        // f = x + x^2, g = 2x -> 2x + 4x^2
        let f = univar(5, 8, &[(1, 1), (2, 1)], 10);
        let g = univar(5, 8, &[(1, 2)], 10);
        let fg = f.compose(&g).unwrap();
        assert!(fg.congruent(&univar(5, 8, &[(1, 2), (2, 4)], 10)));
    }

    #[test]
    fn compose_with_identity() {
        let f = univar(3, 10, &[(1, 2), (3, 1), (7, 2)], 8);
        let x = univar(3, 10, &[(1, 1)], 8);
        assert!(f.compose(&x).unwrap().congruent(&f));
    }

    #[test]
    fn compose_rejects_constant_term() {
        let f = univar(3, 6, &[(1, 1)], 8);
        let g = univar(3, 6, &[(0, 1), (1, 1)], 8);
        assert!(matches!(f.compose(&g), Err(ArithError::ConstantTerm)));
    }

    #[test]
    fn exponential_identity() {
        // f = sum x^k/k!: f(x) * f(-x) = 1 through the truncation order
        let p = 5u64;
        let m = 10usize;
        let prec = 30i64;
        let mut terms = alloc::vec![];
        let mut fact = 1i64;
        for k in 0..m as i64 {
            if k > 0 {
                fact *= k;
            }
            terms.push((
                alloc::vec![k as u32],
                Padic::from_ratio(p, 1, fact, prec).unwrap(),
            ));
        }
        let f = PSeries::from_terms(1, m, terms).unwrap();
        let neg_x = univar(p, m, &[(1, -1)], prec);
        let fneg = f.compose(&neg_x).unwrap();
        let prod = f.mul(&fneg).unwrap();
        let one = univar(p, m, &[(0, 1)], prec - 5);
        assert!(prod.congruent(&one));
    }

    /// Independent Lagrange-inversion oracle: the coefficient of `x^n` in
    /// the reverse of `f` is `(1/n) [x^(n-1)] (x/f)^n`.
    fn lagrange_reverse(f: &PSeries<Padic>, p: u64) -> PSeries<Padic> {
        let trunc = f.trunc_order();
        // f/x: shift exponents down
        let shifted = PSeries::from_terms(
            1,
            trunc,
            f.terms().map(|(e, c)| (alloc::vec![e[0] - 1], c.clone())),
        )
        .unwrap();
        let base = shifted.inverse().unwrap(); // (x/f)
        let mut out = PSeries::zero(1, trunc);
        let mut pw = PSeries::constant(1, trunc, Padic::one(p, 40)).unwrap();
        for n in 1..trunc as u32 {
            pw = pw.mul(&base).unwrap(); // (x/f)^n
            if let Some(cn) = pw.get1(n - 1) {
                let inv_n = Padic::from_integer(p, n as i64, 40).inv().unwrap();
                out.insert_add(alloc::vec![n], cn.mul(&inv_n).unwrap())
                    .unwrap();
            }
        }
        out
    }

    #[test]
    fn reverse_matches_lagrange_inversion() {
        // f = x + x^2 reverses to x - x^2 + 2x^3 - 5x^4 + ...
        let f = univar(7, 8, &[(1, 1), (2, 1)], 20);
        let g = f.reverse().unwrap();
        let expect = lagrange_reverse(&f, 7);
        assert!(g.congruent(&expect));
        assert!(g.get1(2).unwrap().congruent(&c(7, -1, 15)));
        assert!(g.get1(3).unwrap().congruent(&c(7, 2, 15)));
        assert!(g.get1(4).unwrap().congruent(&c(7, -5, 15)));
        // and f(g) = x
        let x = univar(7, 8, &[(1, 1)], 15);
        assert!(f.compose(&g).unwrap().congruent(&x));
    }

    #[test]
    fn reverse_identity() {
        let x = univar(3, 9, &[(1, 1)], 10);
        assert!(x.reverse().unwrap().congruent(&x));
    }

    #[test]
    fn reverse_requires_unit_slope() {
        let f = univar(3, 6, &[(1, 3), (2, 1)], 8);
        assert!(matches!(f.reverse(), Err(ArithError::NonUnit { .. })));
    }

    #[test]
    fn double_reverse_roundtrip() {
        let f = univar(5, 12, &[(1, 2), (2, 3), (3, -1), (5, 4), (9, 1)], 24);
        let g = f.reverse().unwrap().reverse().unwrap();
        assert!(g.congruent(&f));
    }

    #[test]
    fn dilate_scales_exponents() {
        let f = univar(2, 20, &[(1, 1), (4, 1)], 10);
        let d = f.dilate(0, 4).unwrap();
        assert!(d.get1(4).is_some());
        assert!(d.get1(16).is_some());
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn truncation_drops_high_degrees() {
        let f = univar(3, 4, &[(1, 1), (3, 1), (5, 1)], 8);
        assert_eq!(f.len(), 2);
        let sq = f.mul(&f).unwrap();
        assert!(sq.terms().all(|(e, _)| total_deg(e) < 4));
    }
}
