//! Small exact linear algebra over the integers and the rationals.
//!
//! Everything here works on dense matrices of modest size (rank ≤ 4 root data,
//! Galois lattices of rank ≤ 3 or so). Integer routines use checked `i64`
//! arithmetic and report [`Error::Overflow`] instead of wrapping.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Input("ragged matrix rows".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.concat() })
    }

    /// Matrix whose columns are the given vectors (all of length `n`).
    pub fn from_columns(n: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[i64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == i64::from(i == j)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> i64 {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> =
            self.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]) as i64
    }

    /// Inverse of a matrix with determinant ±1.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let d = self.det();
        if d != 1 && d != -1 {
            return Err(Error::NotUnimodular);
        }
        let inv = rational_inverse(&to_rational(self)).ok_or(Error::NotUnimodular)?;
        from_rational(&inv).ok_or(Error::NotUnimodular)
    }

    /// `(self^{-1})^T`, the induced action on the dual lattice.
    pub fn inverse_transpose(&self) -> Result<IntMatrix> {
        Ok(self.inverse_unimodular()?.transpose())
    }

    /// Smallest `k ≥ 1` with `self^k = 1`, searching up to `bound`.
    pub fn order(&self, bound: usize) -> Option<usize> {
        let id = IntMatrix::identity(self.rows);
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc == id {
                return Some(k);
            }
            acc = acc.mul(self);
            if acc.data.iter().any(|x| x.abs() > 1 << 40) {
                return None;
            }
        }
        None
    }

    pub fn pow(&self, e: usize) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Smith normal form

/// `p · a · q = diag(d_1, …, d_r, 0, …)` with `d_i | d_{i+1}`, `d_i > 0`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diag: Vec<i64>,
    pub p: IntMatrix,
    pub q: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|&&d| d != 0).count()
    }
}

fn ck(x: Option<i64>) -> Result<i64> {
    x.ok_or(Error::Overflow)
}

fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, c: i64) -> Result<()> {
    for j in 0..m.cols {
        let v = ck(m.get(dst, j).checked_add(ck(c.checked_mul(m.get(src, j)))?))?;
        m.set(dst, j, v);
    }
    Ok(())
}

fn col_axpy(m: &mut IntMatrix, dst: usize, src: usize, c: i64) -> Result<()> {
    for i in 0..m.rows {
        let v = ck(m.get(i, dst).checked_add(ck(c.checked_mul(m.get(i, src)))?))?;
        m.set(i, dst, v);
    }
    Ok(())
}

fn swap_rows(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for j in 0..m.cols {
            m.data.swap(a * m.cols + j, b * m.cols + j);
        }
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for i in 0..m.rows {
            m.data.swap(i * m.cols + a, i * m.cols + b);
        }
    }
}

pub fn smith(a: &IntMatrix) -> Result<Smith> {
    let (rows, cols) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut p = IntMatrix::identity(rows);
    let mut q = IntMatrix::identity(cols);
    let n = rows.min(cols);

    for t in 0..n {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = m.get(i, j);
                    if v != 0 && best.is_none_or(|(bi, bj)| v.abs() < m.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Ok(finish_smith(m, p, q, n));
            };
            swap_rows(&mut m, t, pi);
            swap_rows(&mut p, t, pi);
            swap_cols(&mut m, t, pj);
            swap_cols(&mut q, t, pj);

            let piv = m.get(t, t);
            let mut dirty = false;
            for i in t + 1..rows {
                let c = m.get(i, t).div_euclid(piv);
                if c != 0 {
                    row_axpy(&mut m, i, t, -c)?;
                    row_axpy(&mut p, i, t, -c)?;
                }
                dirty |= m.get(i, t) != 0;
            }
            for j in t + 1..cols {
                let c = m.get(t, j).div_euclid(piv);
                if c != 0 {
                    col_axpy(&mut m, j, t, -c)?;
                    col_axpy(&mut q, j, t, -c)?;
                }
                dirty |= m.get(t, j) != 0;
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| m.get(i, j) % piv != 0);
            match bad {
                Some((i, _)) => {
                    row_axpy(&mut m, t, i, 1)?;
                    row_axpy(&mut p, t, i, 1)?;
                }
                None => break,
            }
        }
        if m.get(t, t) < 0 {
            for j in 0..cols {
                m.set(t, j, -m.get(t, j));
            }
            for j in 0..rows {
                p.set(t, j, -p.get(t, j));
            }
        }
    }
    Ok(finish_smith(m, p, q, n))
}

fn finish_smith(m: IntMatrix, p: IntMatrix, q: IntMatrix, n: usize) -> Smith {
    let diag = (0..n).map(|i| m.get(i, i).abs()).collect();
    Smith { diag, p, q }
}

/// Saturated integer basis of `{x : a x = 0}`, as columns.
pub fn integer_kernel(a: &IntMatrix) -> Result<IntMatrix> {
    let s = smith(a)?;
    let r = s.rank();
    let cols: Vec<Vec<i64>> = (r..a.cols).map(|j| s.q.column(j)).collect();
    Ok(IntMatrix::from_columns(a.cols, &cols))
}

/// Integer solution `c` of `basis · c = target` for a basis of full column rank.
pub fn solve_integer(basis: &IntMatrix, target: &[i64]) -> Result<Option<Vec<i64>>> {
    let s = smith(basis)?;
    let pu = s.p.mul_vec(target);
    let r = s.rank();
    if pu[r..].iter().any(|&x| x != 0) {
        return Ok(None);
    }
    let mut y = vec![0i64; basis.cols];
    for i in 0..r {
        if pu[i] % s.diag[i] != 0 {
            return Ok(None);
        }
        y[i] = pu[i] / s.diag[i];
    }
    if r < basis.cols {
        return Err(Error::Input("basis does not have full column rank".into()));
    }
    Ok(Some(s.q.mul_vec(&y)))
}

// ---------------------------------------------------------------------------
// Rational linear algebra

pub type QMatrix = Vec<Vec<BigRational>>;

pub fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn to_rational(a: &IntMatrix) -> QMatrix {
    a.to_rows().into_iter().map(|r| r.into_iter().map(q).collect()).collect()
}

fn from_rational(a: &QMatrix) -> Option<IntMatrix> {
    let rows: Option<Vec<Vec<i64>>> = a
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| if x.is_integer() { i64::try_from(x.to_integer()).ok() } else { None })
                .collect()
        })
        .collect();
    IntMatrix::from_rows(&rows?).ok()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the rational null space `{x : m x = 0}`.
pub fn nullspace(m: &QMatrix, cols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

pub fn rank_of(vectors: &[Vec<i64>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut m: QMatrix = vectors.iter().map(|v| v.iter().map(|&x| q(x)).collect()).collect();
    rref(&mut m).len()
}

/// Coefficients of `target` over linearly independent `basis` vectors, if in their span.
pub fn solve_rational(basis: &[Vec<i64>], target: &[i64]) -> Option<Vec<BigRational>> {
    let n = target.len();
    let k = basis.len();
    // augmented system: columns = basis vectors, last column = target
    let mut m: QMatrix = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| q(b[i])).collect();
            row.push(q(target[i]));
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&k) || pivots.len() < k {
        return None;
    }
    let mut coeffs = vec![BigRational::zero(); k];
    for (row, &pc) in pivots.iter().enumerate() {
        coeffs[pc] = m[row][k].clone();
    }
    Some(coeffs)
}

fn rational_inverse(a: &QMatrix) -> Option<QMatrix> {
    let n = a.len();
    let mut m: QMatrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn is_nonnegative(v: &[BigRational]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

pub fn is_nonpositive(v: &[BigRational]) -> bool {
    v.iter().all(|x| !x.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_of_small_matrix() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
        let s = smith(&a).unwrap();
        assert_eq!(s.diag, vec![2, 6, 12]);
        let d = s.p.mul(&a).mul(&s.q);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d.get(i, j), if i == j { s.diag[i] } else { 0 });
            }
        }
        assert!(s.p.det().abs() == 1 && s.q.det().abs() == 1);
    }

    #[test]
    fn kernel_is_saturated() {
        // x + y + z = 0 over Z has the saturated basis of rank 2
        let a = IntMatrix::from_rows(&[vec![2, 2, 2]]).unwrap();
        let k = integer_kernel(&a).unwrap();
        assert_eq!(k.n_cols(), 2);
        for j in 0..2 {
            assert_eq!(a.mul_vec(&k.column(j)), vec![0]);
        }
        // (1,-1,0) must be an integral combination
        assert!(solve_integer(&k, &[1, -1, 0]).unwrap().is_some());
    }

    #[test]
    fn det_and_inverse() {
        let a = IntMatrix::from_rows(&[vec![0, -1, 0], vec![-1, 0, 0], vec![0, 0, -1]]).unwrap();
        assert_eq!(a.det(), 1);
        let inv = a.inverse_unimodular().unwrap();
        assert!(a.mul(&inv).is_identity());
        let b = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(b.inverse_unimodular(), Err(Error::NotUnimodular));
    }

    #[test]
    fn nullspace_dimension() {
        let m = to_rational(&IntMatrix::from_rows(&[vec![1, 1, 0], vec![0, 0, 1]]).unwrap());
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 1);
    }
}
