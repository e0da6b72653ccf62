use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::fq::Fq;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: usize = 24;

/// Absolute precision carried by an exact zero.
pub(crate) const EXACT: i64 = i64::MAX / 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// `Q_p`, uniformizer `p`.
    Mixed,
    /// `F_q((t))`, uniformizer `t`.
    EqualChar,
}

impl std::str::FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mixed" => Ok(FieldKind::Mixed),
            "equal" | "equal_char" => Ok(FieldKind::EqualChar),
            other => Err(Error::InvalidField(format!("unknown field kind `{other}`"))),
        }
    }
}

#[derive(Debug)]
struct FieldData {
    kind: FieldKind,
    precision: usize,
    fq: Fq,
    /// `p^k` for `k ≤ precision`, mixed kind only.
    powers: Vec<BigUint>,
    u: Digits,
    u_residue: u32,
}

/// A local field with its designated non-square unit `u`. Cloning is cheap.
#[derive(Clone, Debug)]
pub struct LocalField(Arc<FieldData>);

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.kind == other.0.kind
                && self.0.precision == other.0.precision
                && self.p() == other.p()
                && self.q() == other.q()
                && self.0.u == other.0.u)
    }
}

impl Eq for LocalField {}

/// Unit digits modulo `ϖ^len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Digits {
    Int(BigUint),
    Poly(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    /// Known to be `≡ 0 mod ϖ^abs`.
    Zero { abs: i64 },
    /// `ϖ^val · unit` with the unit known modulo `ϖ^rel`.
    Unit { val: i64, rel: usize, digits: Digits },
}

#[derive(Clone)]
pub struct FieldElement {
    field: LocalField,
    repr: Repr,
}

impl LocalField {
    pub fn new(p: u64, f: u32, kind: FieldKind, precision: usize) -> Result<Self> {
        let fq = Fq::new(p, f)?;
        if kind == FieldKind::Mixed && f != 1 {
            return Err(Error::InvalidField("mixed characteristic supports only Q_p (f = 1)".into()));
        }
        if precision == 0 {
            return Err(Error::InvalidField("precision must be positive".into()));
        }
        let n = fq.smallest_nonsquare();
        let mut data = FieldData { kind, precision, fq, powers: Vec::new(), u: Digits::Poly(Vec::new()), u_residue: n };
        if kind == FieldKind::Mixed {
            let pb = BigUint::from(p);
            let mut acc = BigUint::one();
            for _ in 0..=precision {
                data.powers.push(acc.clone());
                acc *= &pb;
            }
        }
        let field = LocalField(Arc::new(data));
        let (digits, residue) = field.check_u(&field.teichmuller(n))?;
        let mut data = Arc::try_unwrap(field.0).expect("field not yet shared");
        data.u = digits;
        data.u_residue = residue;
        Ok(LocalField(Arc::new(data)))
    }

    /// `F_q((t))` for `q` a prime power.
    pub fn equal_char(q: u64, precision: usize) -> Result<Self> {
        let (p, f) = prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Self::new(p, f, FieldKind::EqualChar, precision)
    }

    pub fn mixed(p: u64, precision: usize) -> Result<Self> {
        Self::new(p, 1, FieldKind::Mixed, precision)
    }

    /// The same field with a different designated non-square unit.
    pub fn with_u(&self, u: &FieldElement) -> Result<Self> {
        if u.field != *self {
            return Err(Error::InvalidField("u must be an element of this field".into()));
        }
        let (digits, residue) = self.check_u(u)?;
        Ok(LocalField(Arc::new(FieldData {
            kind: self.0.kind,
            precision: self.0.precision,
            fq: self.0.fq.clone(),
            powers: self.0.powers.clone(),
            u: digits,
            u_residue: residue,
        })))
    }

    fn check_u(&self, u: &FieldElement) -> Result<(Digits, u32)> {
        let v = u.valuation().ok_or(Error::ZeroAtPrecision)?;
        if v != 0 {
            return Err(Error::NotUnit(v));
        }
        let Repr::Unit { digits, rel, .. } = &u.repr else { unreachable!() };
        if *rel < self.0.precision {
            return Err(Error::Precision("u must be given to full precision".into()));
        }
        let residue = u.residue()?;
        if self.0.fq.is_square(residue) {
            return Err(Error::InvalidField("u must be a non-square unit".into()));
        }
        Ok((digits.clone(), residue))
    }

    pub fn p(&self) -> u64 {
        self.0.fq.p() as u64
    }

    pub fn f(&self) -> u32 {
        self.0.fq.degree()
    }

    pub fn q(&self) -> u64 {
        self.0.fq.order() as u64
    }

    pub fn kind(&self) -> FieldKind {
        self.0.kind
    }

    pub fn precision(&self) -> usize {
        self.0.precision
    }

    pub fn residue_field(&self) -> &Fq {
        &self.0.fq
    }

    pub fn describe(&self) -> String {
        match self.kind() {
            FieldKind::Mixed => format!("Q_{} (N = {})", self.p(), self.precision()),
            FieldKind::EqualChar => format!("F_{}((t)) (N = {})", self.q(), self.precision()),
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.elt(Repr::Zero { abs: EXACT })
    }

    pub fn one(&self) -> FieldElement {
        self.from_residue_const(1)
    }

    pub fn uniformizer(&self) -> FieldElement {
        self.elt(Repr::Unit { val: 1, rel: self.precision(), digits: self.d_one(self.precision()) })
    }

    /// `ϖ^k`.
    pub fn pi_pow(&self, k: i64) -> FieldElement {
        self.elt(Repr::Unit { val: k, rel: self.precision(), digits: self.d_one(self.precision()) })
    }

    /// The designated non-square unit.
    pub fn u(&self) -> FieldElement {
        self.elt(Repr::Unit { val: 0, rel: self.precision(), digits: self.0.u.clone() })
    }

    pub fn u_residue(&self) -> u32 {
        self.0.u_residue
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        let mag = BigUint::from(n.unsigned_abs());
        let x = self.from_biguint(&mag);
        if n < 0 {
            -&x
        } else {
            x
        }
    }

    pub fn from_biguint(&self, n: &BigUint) -> FieldElement {
        match self.kind() {
            FieldKind::EqualChar => {
                let r = (n % BigUint::from(self.p())).to_u32().expect("small");
                self.from_residue_const(r)
            }
            FieldKind::Mixed => {
                if n.is_zero() {
                    return self.zero();
                }
                let pb = BigUint::from(self.p());
                let mut m = n.clone();
                let mut val = 0;
                while (&m % &pb).is_zero() {
                    m /= &pb;
                    val += 1;
                }
                let n = self.precision();
                self.elt(Repr::Unit { val, rel: n, digits: Digits::Int(m % &self.0.powers[n]) })
            }
        }
    }

    /// A constant: the element of `F_q ⊂ F_q((t))` (equal characteristic) or the
    /// integer `r` (mixed).
    fn from_residue_const(&self, r: u32) -> FieldElement {
        if r == 0 {
            return self.zero();
        }
        let n = self.precision();
        let digits = match self.kind() {
            FieldKind::Mixed => Digits::Int(BigUint::from(r) % &self.0.powers[n]),
            FieldKind::EqualChar => {
                let mut v = vec![0; n];
                v[0] = r;
                Digits::Poly(v)
            }
        };
        self.elt(Repr::Unit { val: 0, rel: n, digits })
    }

    /// The Teichmüller representative of a residue.
    pub fn teichmuller(&self, r: u32) -> FieldElement {
        match self.kind() {
            FieldKind::EqualChar => self.from_residue_const(r),
            FieldKind::Mixed => {
                if r == 0 {
                    return self.zero();
                }
                let n = self.precision();
                let m = &self.0.powers[n];
                let pb = BigUint::from(self.p());
                let mut x = BigUint::from(r);
                for _ in 0..n {
                    x = x.modpow(&pb, m);
                }
                self.elt(Repr::Unit { val: 0, rel: n, digits: Digits::Int(x) })
            }
        }
    }

    /// `Σ d_i ϖ^{start+i}`, exact up to the field precision.
    pub fn from_digits(&self, start: i64, digits: &[u32]) -> Result<FieldElement> {
        let q = self.q() as u32;
        let bound = match self.kind() {
            FieldKind::Mixed => self.p() as u32,
            FieldKind::EqualChar => q,
        };
        if let Some(bad) = digits.iter().find(|&&d| d >= bound) {
            return Err(Error::Input(format!("digit {bad} out of range")));
        }
        let Some(lead) = digits.iter().position(|&d| d != 0) else {
            return Ok(self.zero());
        };
        let n = self.precision();
        let tail = &digits[lead..];
        let d = match self.kind() {
            FieldKind::Mixed => {
                let mut acc = BigUint::zero();
                for &x in tail.iter().take(n).rev() {
                    acc = acc * self.p() + x;
                }
                Digits::Int(acc)
            }
            FieldKind::EqualChar => {
                let mut v: Vec<u32> = tail.iter().take(n).copied().collect();
                v.resize(n, 0);
                Digits::Poly(v)
            }
        };
        Ok(self.elt(Repr::Unit { val: start + lead as i64, rel: n, digits: d }))
    }

    fn elt(&self, repr: Repr) -> FieldElement {
        FieldElement { field: self.clone(), repr }
    }

    // ---- digit arithmetic modulo ϖ^n ----

    fn d_one(&self, n: usize) -> Digits {
        match self.kind() {
            FieldKind::Mixed => Digits::Int(BigUint::one() % &self.0.powers[n]),
            FieldKind::EqualChar => {
                let mut v = vec![0; n];
                if n > 0 {
                    v[0] = 1;
                }
                Digits::Poly(v)
            }
        }
    }

    fn d_trunc(&self, a: &Digits, n: usize) -> Digits {
        match a {
            Digits::Int(x) => Digits::Int(x % &self.0.powers[n]),
            Digits::Poly(v) => {
                let mut w: Vec<u32> = v.iter().take(n).copied().collect();
                w.resize(n, 0);
                Digits::Poly(w)
            }
        }
    }

    /// `a · ϖ^k mod ϖ^n`.
    fn d_shift(&self, a: &Digits, k: usize, n: usize) -> Digits {
        match a {
            Digits::Int(x) => {
                if k >= n {
                    Digits::Int(BigUint::zero())
                } else {
                    Digits::Int((x * &self.0.powers[k]) % &self.0.powers[n])
                }
            }
            Digits::Poly(v) => {
                let mut w = vec![0; n];
                for (i, &c) in v.iter().enumerate() {
                    if i + k < n {
                        w[i + k] = c;
                    }
                }
                Digits::Poly(w)
            }
        }
    }

    /// `a / ϖ^k`, `a` divisible by `ϖ^k`, as digits modulo `ϖ^{n-k}`.
    fn d_unshift(&self, a: &Digits, k: usize, n: usize) -> Digits {
        match a {
            Digits::Int(x) => Digits::Int((x / &self.0.powers[k]) % &self.0.powers[n - k]),
            Digits::Poly(v) => Digits::Poly(v[k..n].to_vec()),
        }
    }

    /// Valuation of `a` modulo `ϖ^n`, `None` if `a ≡ 0`.
    fn d_val(&self, a: &Digits, n: usize) -> Option<usize> {
        match a {
            Digits::Int(x) => {
                if x.is_zero() {
                    return None;
                }
                let pb = BigUint::from(self.p());
                let mut x = x.clone();
                let mut k = 0;
                while k < n {
                    let (quo, rem) = x.div_rem(&pb);
                    if !rem.is_zero() {
                        return Some(k);
                    }
                    x = quo;
                    k += 1;
                }
                None
            }
            Digits::Poly(v) => v.iter().take(n).position(|&c| c != 0),
        }
    }

    fn d_add(&self, a: &Digits, b: &Digits, n: usize) -> Digits {
        match (a, b) {
            (Digits::Int(x), Digits::Int(y)) => Digits::Int((x + y) % &self.0.powers[n]),
            (Digits::Poly(x), Digits::Poly(y)) => {
                let k = &self.0.fq;
                Digits::Poly((0..n).map(|i| k.add(x[i], y[i])).collect())
            }
            _ => unreachable!("mixed digit kinds"),
        }
    }

    fn d_neg(&self, a: &Digits, n: usize) -> Digits {
        match a {
            Digits::Int(x) => {
                let m = &self.0.powers[n];
                let x = x % m;
                Digits::Int(if x.is_zero() { x } else { m - x })
            }
            Digits::Poly(v) => Digits::Poly(v.iter().take(n).map(|&c| self.0.fq.neg(c)).collect()),
        }
    }

    fn d_mul(&self, a: &Digits, b: &Digits, n: usize) -> Digits {
        match (a, b) {
            (Digits::Int(x), Digits::Int(y)) => Digits::Int((x * y) % &self.0.powers[n]),
            (Digits::Poly(x), Digits::Poly(y)) => {
                let k = &self.0.fq;
                let mut w = vec![0u32; n];
                for (i, &xi) in x.iter().enumerate().take(n) {
                    if xi == 0 {
                        continue;
                    }
                    for (j, &yj) in y.iter().enumerate().take(n - i) {
                        if yj != 0 {
                            w[i + j] = k.add(w[i + j], k.mul(xi, yj));
                        }
                    }
                }
                Digits::Poly(w)
            }
            _ => unreachable!("mixed digit kinds"),
        }
    }

    /// Inverse of a unit modulo `ϖ^n`.
    fn d_inv(&self, a: &Digits, n: usize) -> Digits {
        match a {
            Digits::Int(x) => {
                let m = &self.0.powers[n];
                let xi = num_bigint::BigInt::from(x.clone());
                let mi = num_bigint::BigInt::from(m.clone());
                let e = xi.extended_gcd(&mi);
                debug_assert!(e.gcd.is_one());
                Digits::Int(e.x.mod_floor(&mi).to_biguint().expect("nonnegative"))
            }
            Digits::Poly(v) => {
                let k = &self.0.fq;
                let c0 = k.inv(v[0]).expect("unit");
                let mut w = vec![0u32; n];
                w[0] = c0;
                for i in 1..n {
                    let mut s = 0;
                    for j in 1..=i {
                        s = k.add(s, k.mul(v[j], w[i - j]));
                    }
                    w[i] = k.mul(k.neg(s), c0);
                }
                Digits::Poly(w)
            }
        }
    }

    /// Digit at position `i` of a unit given modulo `ϖ^n`, `i < n`.
    fn d_digit(&self, a: &Digits, i: usize) -> u32 {
        match a {
            Digits::Int(x) => ((x / &self.0.powers[i]) % self.p()).to_u32().expect("digit"),
            Digits::Poly(v) => v[i],
        }
    }
}

/// `q = p^f` → `(p, f)`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut m, mut f) = (q, 0);
    while m % p == 0 {
        m /= p;
        f += 1;
    }
    (m == 1).then_some((p, f))
}

/// JSON form: `{"val": v, "digits": [...]}`, least significant digit first.
/// Zero at precision has `"val": null` and `"digits": []` plus its absolute
/// precision.
#[derive(Serialize, Deserialize)]
pub struct ElementJson {
    pub val: Option<i64>,
    pub digits: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zero_mod: Option<i64>,
}

impl FieldElement {
    pub fn field(&self) -> &LocalField {
        &self.field
    }

    /// `None` for zero at precision.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { val, .. } => Some(val),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs } if abs >= EXACT)
    }

    /// The element is known modulo `ϖ^abs`.
    pub fn absolute_precision(&self) -> i64 {
        match self.repr {
            Repr::Zero { abs } => abs,
            Repr::Unit { val, rel, .. } => val + rel as i64,
        }
    }

    pub fn relative_precision(&self) -> Option<usize> {
        match self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { rel, .. } => Some(rel),
        }
    }

    /// `v(x) ≥ 0`; zero at precision counts when known to non-negative depth.
    pub fn is_integral(&self) -> Result<bool> {
        match self.repr {
            Repr::Unit { val, .. } => Ok(val >= 0),
            Repr::Zero { abs } if abs >= 0 => Ok(true),
            Repr::Zero { abs } => Err(Error::Precision(format!("element only known modulo ϖ^{abs}"))),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// Leading residue of the unit part.
    pub fn residue(&self) -> Result<u32> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::ZeroAtPrecision),
            Repr::Unit { digits, .. } => Ok(self.field.d_digit(digits, 0)),
        }
    }

    /// Unit part `x / ϖ^{v(x)}`.
    pub fn unit_part(&self) -> Result<FieldElement> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::ZeroAtPrecision),
            Repr::Unit { rel, digits, .. } => {
                Ok(self.field.elt(Repr::Unit { val: 0, rel: *rel, digits: digits.clone() }))
            }
        }
    }

    /// Digit at absolute position `i` (coefficient of `ϖ^i`).
    pub fn digit(&self, i: i64) -> Result<u32> {
        if i >= self.absolute_precision() {
            return Err(Error::Precision(format!("digit {i} is beyond the known precision")));
        }
        match &self.repr {
            Repr::Zero { .. } => Ok(0),
            Repr::Unit { val, .. } if i < *val => Ok(0),
            Repr::Unit { val, digits, .. } => Ok(self.field.d_digit(digits, (i - val) as usize)),
        }
    }

    /// Digits at positions `from..to`.
    pub fn digits_range(&self, from: i64, to: i64) -> Result<Vec<u32>> {
        (from..to).map(|i| self.digit(i)).collect()
    }

    /// `x mod ϖ^k`, i.e. the digits below position `k` as an exact element.
    pub fn truncate(&self, k: i64) -> Result<FieldElement> {
        match &self.repr {
            Repr::Zero { abs } if *abs >= k => Ok(self.field.zero()),
            Repr::Unit { val, .. } if *val >= k => {
                if self.absolute_precision() >= k {
                    Ok(self.field.zero())
                } else {
                    Err(Error::Precision(format!("cannot reduce modulo ϖ^{k}")))
                }
            }
            Repr::Zero { .. } => Err(Error::Precision(format!("cannot reduce modulo ϖ^{k}"))),
            Repr::Unit { val, .. } => {
                let d = self.digits_range(*val, k)?;
                self.field.from_digits(*val, &d)
            }
        }
    }

    /// `x ≡ y mod ϖ^k`.
    pub fn agrees_with(&self, other: &FieldElement, k: i64) -> Result<bool> {
        let d = self - other;
        match d.repr {
            Repr::Unit { val, .. } => Ok(val >= k),
            Repr::Zero { abs } if abs >= k => Ok(true),
            Repr::Zero { abs } => Err(Error::Precision(format!("difference only known modulo ϖ^{abs}"))),
        }
    }

    /// Equal to all known digits.
    pub fn same_at_precision(&self, other: &FieldElement) -> bool {
        (self - other).is_zero()
    }

    pub fn inv(&self) -> Result<FieldElement> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::DivisionByZero),
            Repr::Unit { val, rel, digits } => {
                let f = &self.field;
                Ok(f.elt(Repr::Unit { val: -val, rel: *rel, digits: f.d_inv(digits, *rel) }))
            }
        }
    }

    /// `x · ϖ^k`.
    pub fn shift(&self, k: i64) -> FieldElement {
        let repr = match &self.repr {
            Repr::Zero { abs } if *abs >= EXACT => Repr::Zero { abs: EXACT },
            Repr::Zero { abs } => Repr::Zero { abs: abs + k },
            Repr::Unit { val, rel, digits } => Repr::Unit { val: val + k, rel: *rel, digits: digits.clone() },
        };
        self.field.elt(repr)
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Ok(base.pow_u(e.unsigned_abs()))
    }

    pub fn pow_u(&self, mut e: u64) -> FieldElement {
        let mut result = self.field.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        result
    }

    /// `x^(q^k)` by repeated `q`-th powers.
    pub fn frobenius_power(&self, k: u32) -> FieldElement {
        let q = self.field.q();
        (0..k).fold(self.clone(), |x, _| x.pow_u(q))
    }

    pub fn to_json(&self) -> ElementJson {
        match &self.repr {
            Repr::Zero { abs } => ElementJson {
                val: None,
                digits: Vec::new(),
                zero_mod: if *abs >= EXACT { None } else { Some(*abs) },
            },
            Repr::Unit { val, rel, digits } => ElementJson {
                val: Some(*val),
                digits: (0..*rel).map(|i| self.field.d_digit(digits, i)).collect(),
                zero_mod: None,
            },
        }
    }

    pub fn from_json(field: &LocalField, j: &ElementJson) -> Result<FieldElement> {
        match j.val {
            None => Ok(match j.zero_mod {
                Some(abs) => field.elt(Repr::Zero { abs }),
                None => field.zero(),
            }),
            Some(v) => {
                let x = field.from_digits(v, &j.digits)?;
                if x.valuation() != Some(v) {
                    return Err(Error::Input("leading digit must be nonzero".into()));
                }
                let rel = j.digits.len().min(field.precision());
                let Repr::Unit { digits, .. } = &x.repr else { unreachable!() };
                Ok(field.elt(Repr::Unit { val: v, rel, digits: field.d_trunc(digits, rel) }))
            }
        }
    }
}

fn add_impl(x: &FieldElement, y: &FieldElement) -> FieldElement {
    assert!(x.field == y.field, "elements of different fields");
    let f = &x.field;
    match (&x.repr, &y.repr) {
        (Repr::Zero { abs: a1 }, Repr::Zero { abs: a2 }) => f.elt(Repr::Zero { abs: *a1.min(a2) }),
        (Repr::Zero { abs }, Repr::Unit { val, rel, digits }) | (Repr::Unit { val, rel, digits }, Repr::Zero { abs }) => {
            if val < abs {
                let r = (*rel as i64).min(abs - val) as usize;
                f.elt(Repr::Unit { val: *val, rel: r, digits: f.d_trunc(digits, r) })
            } else {
                f.elt(Repr::Zero { abs: *abs })
            }
        }
        (Repr::Unit { val: v1, rel: r1, digits: d1 }, Repr::Unit { val: v2, rel: r2, digits: d2 }) => {
            let v = *v1.min(v2);
            let abs = (v1 + *r1 as i64).min(v2 + *r2 as i64);
            let n = (abs - v) as usize;
            let s = f.d_add(&f.d_shift(d1, (v1 - v) as usize, n), &f.d_shift(d2, (v2 - v) as usize, n), n);
            match f.d_val(&s, n) {
                None => f.elt(Repr::Zero { abs }),
                Some(k) => f.elt(Repr::Unit { val: v + k as i64, rel: n - k, digits: f.d_unshift(&s, k, n) }),
            }
        }
    }
}

fn mul_impl(x: &FieldElement, y: &FieldElement) -> FieldElement {
    assert!(x.field == y.field, "elements of different fields");
    let f = &x.field;
    let sat = |a: i64, b: i64| a.saturating_add(b).min(EXACT);
    match (&x.repr, &y.repr) {
        (Repr::Zero { abs: a1 }, Repr::Zero { abs: a2 }) => f.elt(Repr::Zero { abs: sat(*a1, *a2) }),
        (Repr::Zero { abs }, Repr::Unit { val, .. }) | (Repr::Unit { val, .. }, Repr::Zero { abs }) => {
            let abs = if *abs >= EXACT { EXACT } else { sat(*abs, *val) };
            f.elt(Repr::Zero { abs })
        }
        (Repr::Unit { val: v1, rel: r1, digits: d1 }, Repr::Unit { val: v2, rel: r2, digits: d2 }) => {
            let n = *r1.min(r2);
            f.elt(Repr::Unit { val: v1 + v2, rel: n, digits: f.d_mul(&f.d_trunc(d1, n), &f.d_trunc(d2, n), n) })
        }
    }
}

fn neg_impl(x: &FieldElement) -> FieldElement {
    match &x.repr {
        Repr::Zero { .. } => x.clone(),
        Repr::Unit { val, rel, digits } => {
            x.field.elt(Repr::Unit { val: *val, rel: *rel, digits: x.field.d_neg(digits, *rel) })
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                $body(self, rhs)
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                $body(&self, &rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                $body(&self, rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Mul, mul, mul_impl);
binop!(Sub, sub, |a: &FieldElement, b: &FieldElement| add_impl(a, &neg_impl(b)));

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        neg_impl(self)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        neg_impl(&self)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    /// Digit expansion, e.g. `2 + 1·ϖ + O(ϖ^24)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero { abs } if *abs >= EXACT => write!(f, "0"),
            Repr::Zero { abs } => write!(f, "O(ϖ^{abs})"),
            Repr::Unit { val, rel, digits } => {
                let mut terms = Vec::new();
                for i in 0..*rel {
                    let d = self.field.d_digit(digits, i);
                    if d == 0 {
                        continue;
                    }
                    let e = val + i as i64;
                    terms.push(match e {
                        0 => format!("{d}"),
                        1 => format!("{d}·ϖ"),
                        _ => format!("{d}·ϖ^{e}"),
                    });
                }
                write!(f, "{} + O(ϖ^{})", terms.join(" + "), val + *rel as i64)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields() -> Vec<LocalField> {
        vec![
            LocalField::mixed(3, 24).unwrap(),
            LocalField::mixed(5, 24).unwrap(),
            LocalField::equal_char(3, 24).unwrap(),
            LocalField::equal_char(9, 24).unwrap(),
        ]
    }

    #[test]
    fn default_u() {
        let f = LocalField::mixed(3, 24).unwrap();
        assert!(f.u().same_at_precision(&f.from_int(-1)));
        let f5 = LocalField::mixed(5, 24).unwrap();
        assert_eq!(f5.u().residue().unwrap(), 2);
        assert!(f5.u().pow_u(4).same_at_precision(&f5.one()));
        let e = LocalField::equal_char(3, 24).unwrap();
        assert_eq!(e.u().residue().unwrap(), 2);
    }

    #[test]
    fn cancellation_tracks_precision() {
        for f in fields() {
            let p = f.uniformizer();
            let x = &(&f.one() + &p) - &f.one();
            assert_eq!(x.valuation(), Some(1));
            assert_eq!(x.relative_precision(), Some(23));
            let z = &x - &p;
            assert!(z.is_zero());
            assert_eq!(z.absolute_precision(), 24);
            assert!(!z.is_exact_zero());
        }
    }

    #[test]
    fn inverse_and_powers() {
        for f in fields() {
            let x = &f.from_int(2) + &f.pi_pow(3);
            let y = x.inv().unwrap();
            assert!((&x * &y).same_at_precision(&f.one()));
            let p = f.uniformizer();
            assert_eq!(p.pow(-3).unwrap().valuation(), Some(-3));
            assert_eq!(f.zero().inv().unwrap_err(), Error::DivisionByZero);
        }
    }

    #[test]
    fn equal_char_kills_p() {
        let f = LocalField::equal_char(3, 10).unwrap();
        assert!(f.from_int(3).is_exact_zero());
        assert_eq!(f.from_int(4).residue().unwrap(), 1);
        let g = LocalField::mixed(3, 10).unwrap();
        assert_eq!(g.from_int(3).valuation(), Some(1));
        assert_eq!(g.from_int(-9).valuation(), Some(2));
    }

    #[test]
    fn json_round_trip() {
        for f in fields() {
            let x = &f.from_int(7) * &f.pi_pow(-2);
            let j = x.to_json();
            let y = FieldElement::from_json(&f, &j).unwrap();
            assert!(x.same_at_precision(&y));
            assert_eq!(y.absolute_precision(), x.absolute_precision());
        }
        let f = LocalField::mixed(3, 4).unwrap();
        let j = serde_json::to_string(&f.from_int(4).to_json()).unwrap();
        assert_eq!(j, r#"{"val":0,"digits":[1,1,0,0]}"#);
    }

    #[test]
    fn truncate_and_digits() {
        let f = LocalField::mixed(3, 24).unwrap();
        let x = f.from_int(1 + 2 * 3 + 9 * 2);
        assert_eq!(x.digits_range(0, 4).unwrap(), vec![1, 2, 2, 0]);
        let t = x.truncate(2).unwrap();
        assert!(t.same_at_precision(&f.from_int(7)));
        assert!(x.truncate(0).unwrap().is_exact_zero());
        let e = LocalField::equal_char(5, 24).unwrap();
        let y = &e.pi_pow(-1) + &e.from_int(3);
        assert_eq!(y.digits_range(-1, 1).unwrap(), vec![1, 3]);
    }
}
