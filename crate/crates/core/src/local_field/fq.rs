//! The residue field `F_q`, `q = p^f`, with log/exp tables.
//!
//! An element is a `u32` in `0..q` whose base-`p` digits are the coefficients
//! of a polynomial in the class of `X` modulo a primitive polynomial.

use crate::error::{Error, Result};

/// Largest residue field we are willing to tabulate.
pub const MAX_Q: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct Fq {
    p: u32,
    f: u32,
    q: u32,
    /// Coefficients `m_0..m_{f-1}` of the monic modulus `X^f + Σ m_i X^i`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Fq {
    pub fn new(p: u64, f: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p == 2 {
            return Err(Error::InvalidField("residue characteristic 2 is not supported".into()));
        }
        if f == 0 {
            return Err(Error::InvalidField("residue degree must be positive".into()));
        }
        let q = p.checked_pow(f).filter(|&q| q <= MAX_Q).ok_or_else(|| {
            Error::InvalidField(format!("q = {p}^{f} is larger than {MAX_Q}"))
        })?;
        let (p, q) = (p as u32, q as u32);
        for code in 0..q {
            let modulus = digits(code, p, f);
            let mut field = Fq { p, f, q, modulus, exp: Vec::with_capacity(q as usize - 1), log: vec![0; q as usize] };
            if field.tabulate() {
                return Ok(field);
            }
        }
        unreachable!("a primitive polynomial of every degree exists")
    }

    /// Fills exp/log from powers of `X`; false if `X` is not primitive.
    fn tabulate(&mut self) -> bool {
        let one = 1u32;
        let x = if self.f == 1 { self.neg(self.modulus[0]) } else { self.p };
        let mut cur = one;
        let mut seen = vec![false; self.q as usize];
        for k in 0..self.q - 1 {
            if cur == 0 || seen[cur as usize] {
                return false;
            }
            seen[cur as usize] = true;
            self.exp.push(cur);
            self.log[cur as usize] = k;
            cur = self.mul_by_x(cur, x);
        }
        cur == one
    }

    fn mul_by_x(&self, a: u32, x: u32) -> u32 {
        if self.f == 1 {
            return ((a as u64 * x as u64) % self.p as u64) as u32;
        }
        let mut d = digits(a, self.p, self.f);
        let top = d[self.f as usize - 1];
        for i in (1..self.f as usize).rev() {
            d[i] = d[i - 1];
        }
        d[0] = 0;
        for (i, m) in self.modulus.iter().enumerate() {
            d[i] = (d[i] + (self.p - top) * m) % self.p;
        }
        undigits(&d, self.p)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// The prime-field element `n mod p`.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.f == 1 {
            return (self.p - a) % self.p;
        }
        let (mut a, mut out, mut place) = (a, 0, 1);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q as u64 - 1);
        self.exp[e as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let e = (self.q - 1 - self.log[a as usize]) % (self.q - 1);
        Some(self.exp[e as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let k = (self.log[a as usize] as u128 * e as u128) % (self.q as u128 - 1);
        self.exp[k as usize]
    }

    pub fn is_square(&self, a: u32) -> bool {
        a == 0 || self.log[a as usize].is_multiple_of(2)
    }

    /// `+1`, `−1`, or `0` for `a = 0`.
    pub fn chi(&self, a: u32) -> i32 {
        match a {
            0 => 0,
            _ if self.is_square(a) => 1,
            _ => -1,
        }
    }

    pub fn sqrt(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return Some(0);
        }
        let l = self.log[a as usize];
        l.is_multiple_of(2).then(|| self.exp[(l / 2) as usize])
    }

    /// Smallest element (in the integer encoding) that is not a square.
    pub fn smallest_nonsquare(&self) -> u32 {
        (1..self.q).find(|&a| !self.is_square(a)).expect("q is odd")
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

fn digits(mut a: u32, p: u32, f: u32) -> Vec<u32> {
    (0..f)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}
