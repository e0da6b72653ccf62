//! Vertices of the Bruhat–Tits tree of `SL(2)` as `O`-lattices in `F²`.

use std::fmt;

use crate::error::{Error, Result};
use crate::local_field::{FMatrix, FieldElement, LocalField};

/// The lattice spanned by the columns `(ϖ^a, 0)` and `(x, ϖ^c)`, with `x`
/// reduced modulo `ϖ^a`. Homothety classes are represented with
/// `a + c ∈ {0, 1}`; the even ones (`a + c = 0`) are the points of
/// `SL(2, F)/SL(2, O)`.
#[derive(Clone)]
pub struct Lattice {
    a: i64,
    c: i64,
    x: FieldElement,
}

/// Digit-exact identity of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeKey {
    pub a: i64,
    pub c: i64,
    pub x_val: Option<i64>,
    pub x_digits: Vec<u32>,
}

impl Lattice {
    /// `O ⊕ O`.
    pub fn standard(field: &LocalField) -> Self {
        Lattice { a: 0, c: 0, x: field.zero() }
    }

    /// `ϖ^n O ⊕ O` up to homothety: the vertex at coordinate `n` on the
    /// standard apartment.
    pub fn apartment(field: &LocalField, n: i64) -> Self {
        Lattice::raw(n, 0, field.zero()).expect("apartment vertex").normalized()
    }

    /// Hermite form from `(a, c, x)`; `x` is reduced here.
    pub fn raw(a: i64, c: i64, x: FieldElement) -> Result<Self> {
        let x = x.truncate(a)?;
        Ok(Lattice { a, c, x })
    }

    /// The lattice spanned by the columns of `basis`, normalized.
    pub fn from_basis(basis: &FMatrix) -> Result<Self> {
        if basis.size() != 2 {
            return Err(Error::Input("lattices live in F²".into()));
        }
        let (c1, c2) = (
            [basis.get(0, 0).clone(), basis.get(1, 0).clone()],
            [basis.get(0, 1).clone(), basis.get(1, 1).clone()],
        );
        let v1 = c1[1].valuation();
        let v2 = c2[1].valuation();
        let (mut p, mut r) = match (v1, v2) {
            (None, None) => return Err(Error::Input("basis is degenerate".into())),
            (Some(_), None) => (c2, c1),
            (None, Some(_)) => (c1, c2),
            (Some(x), Some(y)) if x < y => (c2, c1),
            _ => (c1, c2),
        };
        // r carries the second coordinate of least valuation; clear it from p.
        if !p[1].is_exact_zero() {
            let t = p[1].div(&r[1])?;
            p = [&p[0] - &(&t * &r[0]), &p[1] - &(&t * &r[1])];
        }
        let c = r[1].valuation().ok_or(Error::Input("basis is degenerate".into()))?;
        let scale_r = r[1].unit_part()?.inv()?;
        r = [&r[0] * &scale_r, r[1].clone()];
        let a = p[0].valuation().ok_or(Error::Input("basis is degenerate".into()))?;
        Ok(Lattice::raw(a, c, r[0].clone())?.normalized())
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn x(&self) -> &FieldElement {
        &self.x
    }

    pub fn field(&self) -> &LocalField {
        self.x.field()
    }

    pub fn det_valuation(&self) -> i64 {
        self.a + self.c
    }

    /// `0` for the vertices of `G(F)/K`, `1` for the other type.
    pub fn parity(&self) -> i64 {
        self.det_valuation().rem_euclid(2)
    }

    /// `ϖ^k L`.
    pub fn scale(&self, k: i64) -> Self {
        Lattice { a: self.a + k, c: self.c + k, x: self.x.shift(k) }
    }

    /// Representative with `a + c ∈ {0, 1}`.
    pub fn normalized(&self) -> Self {
        let k = self.det_valuation().div_euclid(2);
        if k == 0 {
            self.clone()
        } else {
            self.scale(-k)
        }
    }

    pub fn key(&self) -> LatticeKey {
        let x_val = self.x.valuation();
        let x_digits = match x_val {
            Some(v) => self.x.digits_range(v, self.a).expect("reduced x is exact"),
            None => Vec::new(),
        };
        LatticeKey { a: self.a, c: self.c, x_val, x_digits }
    }

    pub fn basis(&self) -> FMatrix {
        let f = self.field();
        FMatrix::new2(f.pi_pow(self.a), self.x.clone(), f.zero(), f.pi_pow(self.c))
    }

    /// `B⁻¹ g B` for the basis `B` of this lattice.
    pub fn conjugate_into(&self, g: &FMatrix) -> FMatrix {
        let (al, be, ga, de) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
        let (a, c, x) = (self.a, self.c, &self.x);
        let xg = x * ga;
        let m11 = al - &xg.shift(-c);
        let m21 = ga.shift(a - c);
        let m22 = &xg.shift(-c) + de;
        let m12 = (&(&(&(al - de) * x) + &be.shift(c)) - &(&xg * x).shift(-c)).shift(-a);
        FMatrix::new2(m11, m12, m21, m22)
    }

    /// `gL = L`, for `g` with unit determinant.
    pub fn is_fixed_by(&self, g: &FMatrix) -> Result<bool> {
        self.conjugate_into(g).is_integral()
    }

    /// Tree distance between `L` and `gL` (`det g` a unit).
    pub fn displacement(&self, g: &FMatrix) -> Result<i64> {
        let m = self.conjugate_into(g);
        let det_v = m.det().valuation().ok_or(Error::Precision("determinant lost".into()))?;
        Ok(det_v - 2 * min_valuation(&m)?)
    }

    /// Tree distance between the homothety classes.
    pub fn distance(&self, other: &Lattice) -> Result<i64> {
        let m = self.basis().inverse()?.mul(&other.basis());
        let det_v = other.det_valuation() - self.det_valuation();
        Ok(det_v - 2 * min_valuation(&m)?)
    }

    /// `gL`, normalized.
    pub fn transform(&self, g: &FMatrix) -> Result<Lattice> {
        Lattice::from_basis(&g.mul(&self.basis()))
    }

    /// The `q + 1` neighbouring vertices, normalized, in a fixed order:
    /// `span(b2 + [t]·b1, ϖ·b1)` for `t = 0..q`, then `span(b1, ϖ·b2)`.
    pub fn neighbors(&self) -> Result<Vec<Lattice>> {
        let f = self.field();
        let q = f.q() as u32;
        let mut out = Vec::with_capacity(q as usize + 1);
        for t in 0..q {
            let shift = f.from_digits(self.a, &[t])?;
            out.push(Lattice::raw(self.a + 1, self.c, &self.x + &shift)?.normalized());
        }
        out.push(Lattice::raw(self.a, self.c + 1, self.x.shift(1))?.normalized());
        Ok(out)
    }
}

fn min_valuation(m: &FMatrix) -> Result<i64> {
    let mut best: Option<i64> = None;
    for e in m.entries() {
        if let Some(v) = e.valuation() {
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    let best = best.ok_or(Error::Precision("matrix is zero at precision".into()))?;
    for e in m.entries() {
        if e.is_zero() && e.absolute_precision() < best {
            return Err(Error::Precision("entry valuation undetermined".into()));
        }
    }
    Ok(best)
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Lattice {}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(a={}, c={}, x={})", self.a, self.c, self.x)
    }
}
