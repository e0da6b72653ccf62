//! Exact numbers `m · q^{e/2}` with `m` rational.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// `mantissa · q^{half_exponent / 2}`, kept in a canonical form in which
/// neither the numerator nor the denominator of the mantissa is divisible by
/// `q`, and zero has exponent 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QValue {
    q: u64,
    mantissa: BigRational,
    half_exponent: i64,
}

impl QValue {
    pub fn new(q: u64, mantissa: BigRational, half_exponent: i64) -> Self {
        assert!(q >= 2, "q must be at least 2");
        let mut v = QValue { q, mantissa, half_exponent };
        v.normalize();
        v
    }

    pub fn zero(q: u64) -> Self {
        Self::new(q, BigRational::zero(), 0)
    }

    pub fn one(q: u64) -> Self {
        Self::from_int(q, 1)
    }

    pub fn from_int(q: u64, n: i64) -> Self {
        Self::new(q, BigRational::from_integer(BigInt::from(n)), 0)
    }

    /// `n · q^{e/2}`.
    pub fn scaled(q: u64, n: i64, half_exponent: i64) -> Self {
        Self::new(q, BigRational::from_integer(BigInt::from(n)), half_exponent)
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.half_exponent = 0;
            return;
        }
        let q = BigInt::from(self.q);
        let (mut num, mut den) = (self.mantissa.numer().clone(), self.mantissa.denom().clone());
        while num.is_multiple_of(&q) {
            num /= &q;
            self.half_exponent += 2;
        }
        while den.is_multiple_of(&q) {
            den /= &q;
            self.half_exponent -= 2;
        }
        self.mantissa = BigRational::new(num, den);
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn mantissa(&self) -> &BigRational {
        &self.mantissa
    }

    pub fn half_exponent(&self) -> i64 {
        self.half_exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_one(&self) -> bool {
        self.half_exponent == 0 && self.mantissa.is_one()
    }

    pub fn mul(&self, o: &QValue) -> QValue {
        assert_eq!(self.q, o.q);
        QValue::new(self.q, &self.mantissa * &o.mantissa, self.half_exponent + o.half_exponent)
    }

    pub fn neg(&self) -> QValue {
        QValue::new(self.q, -self.mantissa.clone(), self.half_exponent)
    }

    /// Sum, defined when both exponents have the same parity.
    pub fn add(&self, o: &QValue) -> Option<QValue> {
        assert_eq!(self.q, o.q);
        if self.is_zero() {
            return Some(o.clone());
        }
        if o.is_zero() {
            return Some(self.clone());
        }
        if (self.half_exponent - o.half_exponent) % 2 != 0 {
            return None;
        }
        let e = self.half_exponent.min(o.half_exponent);
        let lift = |v: &QValue| {
            let k = ((v.half_exponent - e) / 2) as u32;
            &v.mantissa * BigRational::from_integer(BigInt::from(v.q).pow(k))
        };
        Some(QValue::new(self.q, lift(self) + lift(o), e))
    }

    pub fn mantissa_string(&self) -> String {
        format!("{}/{}", self.mantissa.numer(), self.mantissa.denom())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("value serializes")
    }
}

impl Serialize for QValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QValue", 2)?;
        st.serialize_field("mantissa", &self.mantissa_string())?;
        st.serialize_field("q_half_exponent", &self.half_exponent)?;
        st.end()
    }
}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = if self.mantissa.denom().is_one() {
            self.mantissa.numer().to_string()
        } else {
            self.mantissa_string()
        };
        match self.half_exponent {
            0 => write!(f, "{m}"),
            e if e % 2 == 0 => write!(f, "{m}·{}^{}", self.q, e / 2),
            e => write!(f, "{m}·{}^({e}/2)", self.q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let a = QValue::scaled(3, 9, -4);
        assert!(a.is_one());
        let b = QValue::new(3, BigRational::new(BigInt::from(2), BigInt::from(27)), 0);
        assert_eq!(b.half_exponent(), -6);
        assert_eq!(b.mantissa_string(), "2/1");
        assert_eq!(QValue::scaled(5, 0, 7).half_exponent(), 0);
        assert_eq!(
            serde_json::to_string(&QValue::scaled(3, 3, -2)).unwrap(),
            r#"{"mantissa":"1/1","q_half_exponent":0}"#
        );
    }

    #[test]
    fn arithmetic() {
        let x = QValue::scaled(3, 1, 1);
        assert_eq!(x.mul(&x), QValue::from_int(3, 3));
        assert!(x.add(&QValue::one(3)).is_none());
        let s = QValue::scaled(5, 1, -2).add(&QValue::scaled(5, 4, -2)).unwrap();
        assert!(s.is_one());
        assert!(QValue::one(3).add(&QValue::one(3).neg()).unwrap().is_zero());
    }
}
