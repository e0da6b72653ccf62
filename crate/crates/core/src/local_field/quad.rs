use std::fmt;

use super::element::{FieldElement, LocalField};
use crate::error::{Error, Result};

/// `a + b√u` in the unramified quadratic extension `E = F(√u)`.
#[derive(Clone, Debug)]
pub struct QuadExtElement {
    pub a: FieldElement,
    pub b: FieldElement,
}

impl QuadExtElement {
    pub fn new(a: FieldElement, b: FieldElement) -> Self {
        QuadExtElement { a, b }
    }

    pub fn from_base(a: FieldElement) -> Self {
        let zero = a.field().zero();
        QuadExtElement { a, b: zero }
    }

    pub fn field(&self) -> &LocalField {
        self.a.field()
    }

    pub fn conj(&self) -> Self {
        QuadExtElement { a: self.a.clone(), b: -&self.b }
    }

    /// `a² − u b²`.
    pub fn norm(&self) -> FieldElement {
        let u = self.field().u();
        &(&self.a * &self.a) - &(&u * &(&self.b * &self.b))
    }

    pub fn trace(&self) -> FieldElement {
        &self.a + &self.a
    }

    pub fn mul(&self, o: &Self) -> Self {
        let u = self.field().u();
        QuadExtElement {
            a: &(&self.a * &o.a) + &(&u * &(&self.b * &o.b)),
            b: &(&self.a * &o.b) + &(&self.b * &o.a),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadExtElement { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadExtElement { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        QuadExtElement { a: &self.a * c, b: &self.b * c }
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm().inv()?;
        Ok(self.conj().scale(&n))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QuadExtElement::from_base(self.field().one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Valuation in `E`, which is unramified over `F`: `min(v(a), v(b))`.
    pub fn valuation(&self) -> Option<i64> {
        match (self.a.valuation(), self.b.valuation()) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn same_at_precision(&self, o: &Self) -> bool {
        self.a.same_at_precision(&o.a) && self.b.same_at_precision(&o.b)
    }
}

impl fmt::Display for QuadExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})·√u", self.a, self.b)
    }
}

pub fn is_square_unit(x: &FieldElement) -> Result<bool> {
    let v = x.valuation().ok_or(Error::ZeroAtPrecision)?;
    if v != 0 {
        return Err(Error::NotUnit(v));
    }
    Ok(x.field().residue_field().is_square(x.residue()?))
}

/// Whether `x` is a square in `F`.
pub fn is_square(x: &FieldElement) -> Result<bool> {
    let v = x.valuation().ok_or(Error::ZeroAtPrecision)?;
    Ok(v % 2 == 0 && is_square_unit(&x.unit_part()?)?)
}

/// `x ∈ N_{E/F}(E^×)` for the unramified `E = F(√u)`.
pub fn is_norm(x: &FieldElement) -> Result<bool> {
    let v = x.valuation().ok_or(Error::ZeroAtPrecision)?;
    Ok(v % 2 == 0)
}

/// The quadratic Hilbert symbol `(a, b)` for odd residue characteristic.
pub fn hilbert_symbol(a: &FieldElement, b: &FieldElement) -> Result<i32> {
    let alpha = a.valuation().ok_or(Error::ZeroAtPrecision)?;
    let beta = b.valuation().ok_or(Error::ZeroAtPrecision)?;
    let k = a.field().residue_field();
    let (ra, rb) = (a.residue()?, b.residue()?);
    let mut chi = 1;
    if (alpha * beta) % 2 != 0 {
        chi *= k.chi(k.neg(1));
    }
    if beta % 2 != 0 {
        chi *= k.chi(ra);
    }
    if alpha % 2 != 0 {
        chi *= k.chi(rb);
    }
    Ok(chi)
}

/// `x ∈ N(F(√d)^×)`; every `x` is a norm when `d` is a square.
pub fn is_norm_from(x: &FieldElement, d: &FieldElement) -> Result<bool> {
    Ok(hilbert_symbol(x, d)? == 1)
}

/// A square root, with residue `√(residue)` taken canonically in `F_q`.
pub fn sqrt(x: &FieldElement) -> Result<FieldElement> {
    let field = x.field().clone();
    let v = x.valuation().ok_or(Error::ZeroAtPrecision)?;
    if v % 2 != 0 {
        return Err(Error::Input(format!("odd valuation {v} has no square root")));
    }
    let unit = x.unit_part()?;
    let r0 = field
        .residue_field()
        .sqrt(unit.residue()?)
        .ok_or_else(|| Error::Input("unit part is not a square".into()))?;
    let half = field.from_int(2).inv()?;
    let mut y = field.teichmuller(r0);
    for _ in 0..=usize::BITS - field.precision().leading_zeros() + 1 {
        y = &(&y + &unit.div(&y)?) * &half;
    }
    let root = &y * &field.pi_pow(v / 2);
    debug_assert!((&root * &root).same_at_precision(x));
    Ok(root)
}
