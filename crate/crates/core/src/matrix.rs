//! Dense matrices over a capped-precision coefficient ring.
//!
//! Only what the slope theory and the group actions need: products,
//! division-free determinants and characteristic polynomials (Laplace
//! expansion with a column-mask cache — ranks here are tiny), and Gaussian
//! inversion with minimal-valuation pivoting.

use alloc::vec::Vec;

use crate::parith::{ArithError, Coeff};

#[derive(Clone, PartialEq, Debug)]
pub struct Mat<C: Coeff> {
    n: usize,
    data: Vec<C>, // row-major, square
}

impl<C: Coeff> Mat<C> {
    pub fn new(n: usize, data: Vec<C>) -> Result<Self, ArithError> {
        if data.len() != n * n {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(Mat { n, data })
    }

    pub fn identity(n: usize, one: &C) -> Self {
        let mut data = alloc::vec![one.zero_like(); n * n];
        for i in 0..n {
            data[i * n + i] = one.clone();
        }
        Mat { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[C] {
        &self.data
    }

    pub fn map<F: Fn(&C) -> C>(&self, f: F) -> Self {
        Mat {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entry-wise Frobenius.
    pub fn frobenius(&self) -> Self {
        self.map(|c| c.frobenius())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, ArithError> {
        if self.n != rhs.n {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "matrix sizes {} vs {}",
                self.n,
                rhs.n
            )));
        }
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.at(i, 0).mul(rhs.at(0, j))?;
                for k in 1..n {
                    acc = acc.add(&self.at(i, k).mul(rhs.at(k, j))?)?;
                }
                data.push(acc);
            }
        }
        Ok(Mat { n, data })
    }

    pub fn mul_vec(&self, v: &[C]) -> Result<Vec<C>, ArithError> {
        if v.len() != self.n {
            return Err(ArithError::ShapeMismatch(alloc::format!(
                "vector length {} for size-{} matrix",
                v.len(),
                self.n
            )));
        }
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut acc = self.at(i, 0).mul(&v[0])?;
            for (k, vk) in v.iter().enumerate().skip(1) {
                acc = acc.add(&self.at(i, k).mul(vk)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &C) -> Result<Self, ArithError> {
        let data = self
            .data
            .iter()
            .map(|v| v.mul(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Mat { n: self.n, data })
    }

    pub fn congruent(&self, rhs: &Self) -> bool {
        self.n == rhs.n
            && self
                .data
                .iter()
                .zip(&rhs.data)
                .all(|(a, b)| a.congruent(b))
    }

    /// A stand-in for exact constants: one at a precision generous enough
    /// never to be the binding constraint in minor expansions.
    fn proto_one(&self) -> C {
        let max_abs = self.data.iter().map(|c| c.abs_prec()).max().unwrap_or(2);
        let max_val = self
            .data
            .iter()
            .filter_map(|c| c.valuation())
            .max()
            .unwrap_or(0)
            .max(0);
        self.data[0].one_at(max_abs + (self.n as i64 + 1) * (max_val + 1) + 8)
    }

    /// Division-free determinant: Laplace expansion over column masks.
    /// Absent contributions are exact zeros, so they never cap the
    /// precision of the result.
    pub fn det(&self) -> Result<C, ArithError> {
        let n = self.n;
        if n == 0 {
            return Err(ArithError::ShapeMismatch("empty matrix".into()));
        }
        let one = self.proto_one();
        let mut memo: alloc::collections::BTreeMap<u64, Option<C>> =
            alloc::collections::BTreeMap::new();
        let d = self.det_rec((1u64 << n) - 1, 0, &one, &mut memo)?;
        Ok(d.unwrap_or_else(|| one.zero_like()))
    }

    fn det_rec(
        &self,
        mask: u64,
        row: usize,
        one: &C,
        memo: &mut alloc::collections::BTreeMap<u64, Option<C>>,
    ) -> Result<Option<C>, ArithError> {
        if mask == 0 {
            return Ok(Some(one.clone()));
        }
        if let Some(v) = memo.get(&mask) {
            return Ok(v.clone());
        }
        let mut acc: Option<C> = None;
        let mut sign = 1i64;
        for j in 0..self.n {
            if mask & (1 << j) == 0 {
                continue;
            }
            // zero-at-precision entries participate too: their precision
            // bound must flow into the sum
            let entry = self.at(row, j);
            if let Some(minor) = self.det_rec(mask & !(1 << j), row + 1, one, memo)? {
                let term = entry.mul(&minor)?.mul_int(sign);
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term)?,
                });
            }
            sign = -sign;
        }
        memo.insert(mask, acc.clone());
        Ok(acc)
    }

    /// Characteristic polynomial `det(T*I - A)`, coefficients low-to-high
    /// (length `n + 1`, monic). Division-free Laplace expansion on
    /// degree-one polynomial entries; slots without contributions are
    /// exact zeros (`None`) so padding never degrades precision.
    pub fn char_poly(&self) -> Result<Vec<C>, ArithError> {
        let n = self.n;
        let one = self.proto_one();
        // `None` marks a slot untouched by the expansion (an exact zero);
        // stored entries always contribute, carrying their precision
        let entry = |i: usize, j: usize| -> Vec<Option<C>> {
            let c0 = Some(self.at(i, j).neg());
            if i == j {
                alloc::vec![c0, Some(one.clone())]
            } else {
                alloc::vec![c0]
            }
        };
        fn tp_add<C: Coeff>(a: &[Option<C>], b: &[Option<C>]) -> Result<TP<C>, ArithError> {
            let len = a.len().max(b.len());
            let mut out = Vec::with_capacity(len);
            for k in 0..len {
                let slot = match (a.get(k).and_then(|x| x.as_ref()), b.get(k).and_then(|y| y.as_ref())) {
                    (None, None) => None,
                    (Some(x), None) => Some(x.clone()),
                    (None, Some(y)) => Some(y.clone()),
                    (Some(x), Some(y)) => Some(x.add(y)?),
                };
                out.push(slot);
            }
            Ok(out)
        }
        type TP<C> = Vec<Option<C>>;
        fn tp_mul<C: Coeff>(a: &[Option<C>], b: &[Option<C>]) -> Result<TP<C>, ArithError> {
            let mut out: TP<C> = alloc::vec![None; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                let x = match x {
                    Some(x) => x,
                    None => continue,
                };
                for (j, y) in b.iter().enumerate() {
                    let y = match y {
                        Some(y) => y,
                        None => continue,
                    };
                    let prod = x.mul(y)?;
                    out[i + j] = Some(match out[i + j].take() {
                        None => prod,
                        Some(acc) => acc.add(&prod)?,
                    });
                }
            }
            Ok(out)
        }
        fn rec<C: Coeff>(
            m: &Mat<C>,
            mask: u64,
            row: usize,
            one: &C,
            entry: &dyn Fn(usize, usize) -> TP<C>,
            memo: &mut alloc::collections::BTreeMap<u64, TP<C>>,
        ) -> Result<TP<C>, ArithError> {
            if mask == 0 {
                return Ok(alloc::vec![Some(one.clone())]);
            }
            if let Some(v) = memo.get(&mask) {
                return Ok(v.clone());
            }
            let mut acc: TP<C> = Vec::new();
            let mut sign = 1i64;
            for j in 0..m.n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let e = entry(row, j);
                let minor = rec(m, mask & !(1 << j), row + 1, one, entry, memo)?;
                let term = tp_mul(&e, &minor)?;
                let term: TP<C> = term
                    .into_iter()
                    .map(|c| c.map(|c| c.mul_int(sign)))
                    .collect();
                acc = tp_add(&acc, &term)?;
                sign = -sign;
            }
            memo.insert(mask, acc.clone());
            Ok(acc)
        }
        let mut memo = alloc::collections::BTreeMap::new();
        let mut out = rec(self, (1u64 << n) - 1, 0, &one, &entry, &mut memo)?;
        out.resize(n + 1, None);
        Ok(out
            .into_iter()
            .map(|c| c.unwrap_or_else(|| one.zero_like()))
            .collect())
    }

    /// Inverse by Gaussian elimination with minimal-valuation pivoting;
    /// fails when the matrix is singular at the stated precision.
    pub fn inverse(&self) -> Result<Self, ArithError> {
        let n = self.n;
        let one = self.data[0].one_like();
        let mut a = self.clone();
        let mut inv = Mat::identity(n, &one);
        for col in 0..n {
            // pivot: minimal valuation in this column at or below `col`
            let mut pivot: Option<(usize, i64)> = None;
            for row in col..n {
                if let Some(v) = a.at(row, col).valuation() {
                    if pivot.is_none_or(|(_, pv)| v < pv) {
                        pivot = Some((row, v));
                    }
                }
            }
            let (prow, _) = pivot.ok_or(ArithError::DivisionByZero)?;
            if prow != col {
                for j in 0..n {
                    let x = a.at(prow, j).clone();
                    let y = a.at(col, j).clone();
                    a.set(prow, j, y);
                    a.set(col, j, x);
                    let x = inv.at(prow, j).clone();
                    let y = inv.at(col, j).clone();
                    inv.set(prow, j, y);
                    inv.set(col, j, x);
                }
            }
            let scale = a.at(col, col).inv()?;
            for j in 0..n {
                a.set(col, j, a.at(col, j).mul(&scale)?);
                inv.set(col, j, inv.at(col, j).mul(&scale)?);
            }
            for row in 0..n {
                if row == col || a.at(row, col).is_zero() {
                    continue;
                }
                let factor = a.at(row, col).clone();
                for j in 0..n {
                    let t = a.at(row, j).sub(&factor.mul(a.at(col, j))?)?;
                    a.set(row, j, t);
                    let t = inv.at(row, j).sub(&factor.mul(inv.at(col, j))?)?;
                    inv.set(row, j, t);
                }
            }
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parith::Padic;

    fn m2(p: u64, vals: [i64; 4], prec: i64) -> Mat<Padic> {
        Mat::new(
            2,
            vals.iter()
                .map(|&v| Padic::from_integer(p, v, prec))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn det_and_charpoly_agree() {
        let a = m2(5, [1, 2, 3, 4], 8);
        let d = a.det().unwrap();
        assert!(d.congruent(&Padic::from_integer(5, -2, 8)));
        let cp = a.char_poly().unwrap();
        // char poly T^2 - 5T - 2
        assert!(cp[0].congruent(&Padic::from_integer(5, -2, 8)));
        assert!(cp[1].congruent(&Padic::from_integer(5, -5, 8)));
        assert!(cp[2].congruent(&Padic::one(5, 8)));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m2(5, [1, 2, 3, 4], 12);
        let inv = a.inverse().unwrap();
        let prod = a.mul(&inv).unwrap();
        let id = Mat::identity(2, &Padic::one(5, 8));
        assert!(prod.congruent(&id));
    }

    #[test]
    fn inverse_with_p_power_pivots() {
        // valuation pivoting handles entries of mixed valuation
        let a = m2(3, [3, 1, 9, 3], 10); // det = 9 - 9 = 0: singular
        assert!(a.inverse().is_err());
        let b = m2(3, [3, 1, 9, 4], 10); // det = 3
        let inv = b.inverse().unwrap();
        assert!(b
            .mul(&inv)
            .unwrap()
            .congruent(&Mat::identity(2, &Padic::one(3, 6))));
    }
}
