use std::fmt;

use super::element::{FieldElement, LocalField};
use super::expr::parse_matrix;
use crate::error::{Error, Result};

/// Square matrix over a local field.
#[derive(Clone)]
pub struct FMatrix {
    n: usize,
    data: Vec<FieldElement>,
}

impl FMatrix {
    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("matrix must be square and non-empty".into()));
        }
        Ok(FMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn parse(text: &str, field: &LocalField) -> Result<Self> {
        Self::from_rows(parse_matrix(text, field)?)
    }

    pub fn new2(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Self {
        FMatrix { n: 2, data: vec![a, b, c, d] }
    }

    pub fn identity(field: &LocalField, n: usize) -> Self {
        Self::diag(&vec![field.one(); n])
    }

    pub fn diag(entries: &[FieldElement]) -> Self {
        let n = entries.len();
        let zero = entries[0].field().zero();
        let mut data = vec![zero; n * n];
        for (i, e) in entries.iter().enumerate() {
            data[i * n + i] = e.clone();
        }
        FMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &LocalField {
        self.data[0].field()
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        self.data[i * self.n + j] = x;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn mul(&self, o: &FMatrix) -> FMatrix {
        assert_eq!(self.n, o.n, "size mismatch");
        let n = self.n;
        let zero = self.field().zero();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = zero.clone();
                for k in 0..n {
                    acc = &acc + &(self.get(i, k) * o.get(k, j));
                }
                data.push(acc);
            }
        }
        FMatrix { n, data }
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        (0..self.n)
            .map(|i| (0..self.n).fold(self.field().zero(), |acc, k| &acc + &(self.get(i, k) * &v[k])))
            .collect()
    }

    pub fn scale(&self, c: &FieldElement) -> FMatrix {
        FMatrix { n: self.n, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn sub(&self, o: &FMatrix) -> FMatrix {
        FMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(x, y)| x - y).collect() }
    }

    pub fn pow_u(&self, mut e: u64) -> FMatrix {
        let mut acc = FMatrix::identity(self.field(), self.n);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    pub fn trace(&self) -> FieldElement {
        (0..self.n).fold(self.field().zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn det(&self) -> FieldElement {
        if self.n == 2 {
            return &(self.get(0, 0) * self.get(1, 1)) - &(self.get(0, 1) * self.get(1, 0));
        }
        match self.eliminate() {
            Ok((_, det)) => det,
            Err(_) => self.field().zero(),
        }
    }

    pub fn inverse(&self) -> Result<FMatrix> {
        if self.n == 2 {
            let d = self.det().inv()?;
            return Ok(FMatrix::new2(
                self.get(1, 1) * &d,
                -&(self.get(0, 1) * &d),
                -&(self.get(1, 0) * &d),
                self.get(0, 0) * &d,
            ));
        }
        Ok(self.eliminate()?.0)
    }

    /// Gauss–Jordan with pivots of least valuation; returns `(inverse, det)`.
    fn eliminate(&self) -> Result<(FMatrix, FieldElement)> {
        let n = self.n;
        let field = self.field().clone();
        let mut a = self.clone();
        let mut inv = FMatrix::identity(&field, n);
        let mut det = field.one();
        for col in 0..n {
            let pivot = (col..n)
                .filter_map(|r| a.get(r, col).valuation().map(|v| (v, r)))
                .min()
                .map(|(_, r)| r)
                .ok_or(Error::DivisionByZero)?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let pv = a.get(col, col).clone();
            det = &det * &pv;
            let pinv = pv.inv()?;
            for j in 0..n {
                a.data[col * n + j] = a.get(col, j) * &pinv;
                inv.data[col * n + j] = inv.get(col, j) * &pinv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    a.data[r * n + j] = a.get(r, j) - &(&factor * a.get(col, j));
                    inv.data[r * n + j] = inv.get(r, j) - &(&factor * inv.get(col, j));
                }
            }
        }
        Ok((inv, det))
    }

    pub fn same_at_precision(&self, o: &FMatrix) -> bool {
        self.n == o.n && self.data.iter().zip(&o.data).all(|(x, y)| x.same_at_precision(y))
    }

    /// Entrywise `≡ mod ϖ^k`.
    pub fn agrees_with(&self, o: &FMatrix, k: i64) -> Result<bool> {
        for (x, y) in self.data.iter().zip(&o.data) {
            if !x.agrees_with(y, k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_integral(&self) -> Result<bool> {
        for x in &self.data {
            if !x.is_integral()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_three_by_three() {
        let f = LocalField::mixed(5, 20).unwrap();
        let m = FMatrix::parse("[[p,1,0],[1,p,2],[3,0,1+p]]", &f).unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).same_at_precision(&FMatrix::identity(&f, 3)));
        let two = FMatrix::parse("[[1+p,1],[2*p+p^2,1+p]]", &f).unwrap();
        assert!(two.det().same_at_precision(&f.one()));
        assert!(two.mul(&two.inverse().unwrap()).same_at_precision(&FMatrix::identity(&f, 2)));
    }
}
