//! Unramified endoscopic data `(s, w)` of a root datum.
//!
//! `s` is a finite-order character of `X_*`, stored as a vector of rotation
//! numbers in `[0, 1)`: `s(u) = exp(2πi · values·u)`. The coroots of `H` are
//! the coroots of `G` killed by `s`, and `σ_H = w ∘ σ_G`.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix, QMatrix};
use crate::root_datum::{
    self, reflection_matrix, simple_roots_of, validate_root_datum, weyl_group, RootDatum, WeylGroup,
};

pub const DEFAULT_ORDER_BOUND: u32 = 4;
/// Cap on `order_bound^rank · |W|` candidates.
pub const CANDIDATE_BOUND: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionCharacter {
    values: Vec<Rational64>,
}

fn frac_part(x: Rational64) -> Rational64 {
    x - Rational64::from_integer(x.floor().to_integer())
}

impl TorsionCharacter {
    pub fn new(values: Vec<Rational64>) -> Self {
        TorsionCharacter { values: values.into_iter().map(frac_part).collect() }
    }

    pub fn trivial(rank: usize) -> Self {
        Self::new(vec![Rational64::zero(); rank])
    }

    /// `s = (num_1/den, …, num_n/den)`.
    pub fn from_numerators(nums: &[i64], den: i64) -> Self {
        Self::new(nums.iter().map(|&k| Rational64::new(k, den)).collect())
    }

    /// Parses `"1/2,0,3/4"`.
    pub fn parse(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                let (n, d) = t.split_once('/').unwrap_or((t, "1"));
                let n: i64 = n.trim().parse().map_err(|_| Error::Input(format!("bad rational `{t}`")))?;
                let d: i64 = d.trim().parse().map_err(|_| Error::Input(format!("bad rational `{t}`")))?;
                if d == 0 {
                    return Err(Error::Input(format!("zero denominator in `{t}`")));
                }
                Ok(Rational64::new(n, d))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(values))
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational64] {
        &self.values
    }

    /// Rotation number of `s(u)` in `[0, 1)`.
    pub fn rotation(&self, u: &[i64]) -> Rational64 {
        frac_part(self.values.iter().zip(u).map(|(v, &x)| v * x).sum())
    }

    pub fn is_one_on(&self, u: &[i64]) -> bool {
        self.rotation(u).is_zero()
    }

    pub fn order(&self) -> i64 {
        self.values.iter().fold(1, |acc, v| acc.lcm(v.denom()))
    }

    /// `s ∘ m` where `m` acts on `X_*`.
    pub fn compose(&self, m: &IntMatrix) -> TorsionCharacter {
        let n = self.rank();
        let values = (0..n)
            .map(|j| (0..n).map(|i| self.values[i] * m.get(i, j)).sum())
            .collect();
        TorsionCharacter::new(values)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.values.iter().map(|v| format!("{}/{}", v.numer(), v.denom())).collect()
    }
}

impl fmt::Display for TorsionCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl Serialize for TorsionCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorsionCharacter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        TorsionCharacter::parse(&v.join(",")).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EndoscopicDatum {
    pub s: TorsionCharacter,
    pub w: IntMatrix,
    pub coroots_h: Vec<Vec<i64>>,
    pub roots_h: Vec<Vec<i64>>,
    /// `σ_H = w · σ_G` on `X*`.
    pub twist_h: IntMatrix,
    /// Root datum of `H`; its twist is `σ_H` conjugated by the element of
    /// `W(Φ_H)` that carries the canonical base to one fixed by `σ_H`.
    pub datum_h: RootDatum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    NotInvariant,
    NoSimpleSystem,
    InvalidH(Vec<String>),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NotInvariant => write!(f, "σ_H(s) ≠ s"),
            Rejection::NoSimpleSystem => write!(f, "σ_H fixes no simple system"),
            Rejection::InvalidH(v) => write!(f, "derived datum of H is invalid: {}", v.join("; ")),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Accepted(EndoscopicDatum),
    Rejected(Rejection),
}

impl Verdict {
    pub fn accepted(self) -> Option<EndoscopicDatum> {
        match self {
            Verdict::Accepted(e) => Some(e),
            Verdict::Rejected(_) => None,
        }
    }
}

/// Coroots `α∨` with `s(α∨) = 1`, in the order of `Φ∨`.
pub fn coroot_kernel(s: &TorsionCharacter, datum: &RootDatum) -> Result<Vec<Vec<i64>>> {
    if s.rank() != datum.rank {
        return Err(Error::RankMismatch { expected: datum.rank, got: s.rank() });
    }
    Ok(datum.coroots.iter().filter(|c| s.is_one_on(c)).cloned().collect())
}

pub fn check_endoscopic(s: &TorsionCharacter, w: &IntMatrix, datum: &RootDatum) -> Result<Verdict> {
    let weyl = weyl_group(datum)?;
    check_with_weyl(s, w, datum, &weyl)
}

fn set_of(vs: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    vs.iter().cloned().collect()
}

fn image_set(m: &IntMatrix, vs: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    vs.iter().map(|v| m.mul_vec(v)).collect()
}

fn check_with_weyl(s: &TorsionCharacter, w: &IntMatrix, datum: &RootDatum, weyl: &WeylGroup) -> Result<Verdict> {
    if s.rank() != datum.rank {
        return Err(Error::RankMismatch { expected: datum.rank, got: s.rank() });
    }
    if !weyl.contains(w) {
        return Err(Error::NotInWeylGroup);
    }
    let mut roots_h = Vec::new();
    let mut coroots_h = Vec::new();
    for (r, c) in datum.roots.iter().zip(&datum.coroots) {
        if s.is_one_on(c) {
            roots_h.push(r.clone());
            coroots_h.push(c.clone());
        }
    }
    let twist_h = w.mul(&datum.twist);
    if s.compose(&twist_h.inverse_transpose()?) != *s {
        return Ok(Verdict::Rejected(Rejection::NotInvariant));
    }

    let base_h = RootDatum::new(roots_h.clone(), coroots_h.clone(), IntMatrix::identity(datum.rank));
    let delta = simple_roots_of(&roots_h)?;
    let normalizer = if image_set(&twist_h, &delta) == set_of(&delta) {
        Some(IntMatrix::identity(datum.rank))
    } else {
        let weyl_h = weyl_group(&base_h)?;
        weyl_h.elements.iter().find_map(|wh| {
            let translate: Vec<Vec<i64>> = delta.iter().map(|a| wh.mul_vec(a)).collect();
            (image_set(&twist_h, &translate) == set_of(&translate)).then(|| wh.clone())
        })
    };
    let Some(wh) = normalizer else {
        return Ok(Verdict::Rejected(Rejection::NoSimpleSystem));
    };
    let twist = wh.inverse_unimodular()?.mul(&twist_h).mul(&wh);
    let datum_h = RootDatum { twist, ..base_h };
    let violations = validate_root_datum(&datum_h);
    if !violations.is_empty() {
        return Ok(Verdict::Rejected(Rejection::InvalidH(violations)));
    }
    Ok(Verdict::Accepted(EndoscopicDatum { s: s.clone(), w: w.clone(), coroots_h, roots_h, twist_h, datum_h }))
}

/// All characters of order dividing `order_bound`, smallest order first.
pub fn characters(rank: usize, order_bound: u32) -> Vec<TorsionCharacter> {
    let b = i64::from(order_bound.max(1));
    let total = (b as usize).pow(rank as u32);
    let mut out: Vec<TorsionCharacter> = (0..total)
        .map(|mut idx| {
            let nums: Vec<i64> = (0..rank)
                .map(|_| {
                    let k = (idx % b as usize) as i64;
                    idx /= b as usize;
                    k
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect();
            TorsionCharacter::from_numerators(&nums, b)
        })
        .collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
    out.dedup();
    out
}

/// Every accepted `(s, w)` with `s` of order dividing `order_bound`, without deduplication.
pub fn enumerate_candidates(datum: &RootDatum, order_bound: u32) -> Result<Vec<EndoscopicDatum>> {
    if order_bound == 0 {
        return Err(Error::Input("order bound must be positive".into()));
    }
    let weyl = weyl_group(datum)?;
    let grid = (order_bound as usize)
        .checked_pow(datum.rank as u32)
        .and_then(|g| g.checked_mul(weyl.order()))
        .unwrap_or(usize::MAX);
    if grid > CANDIDATE_BOUND {
        return Err(Error::BoundExceeded(format!("{grid} candidate pairs (s, w)")));
    }
    let mut out = Vec::new();
    for s in characters(datum.rank, order_bound) {
        for w in &weyl.elements {
            if let Verdict::Accepted(e) = check_with_weyl(&s, w, datum, &weyl)? {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// Keeps the first datum of each isomorphism class of `H`, then sorts by
/// `(|Φ_H|` descending, `σ_H` lexicographic).
pub fn dedup_by_isomorphism(candidates: Vec<EndoscopicDatum>) -> Result<Vec<EndoscopicDatum>> {
    let mut reps: Vec<(EndoscopicDatum, Signature)> = Vec::new();
    for e in candidates {
        let sig = Signature::of(&e.datum_h)?;
        let mut dup = false;
        for (r, rsig) in &reps {
            if *rsig == sig && isomorphic(&r.datum_h, &e.datum_h)? {
                dup = true;
                break;
            }
        }
        if !dup {
            reps.push((e, sig));
        }
    }
    let mut out: Vec<EndoscopicDatum> = reps.into_iter().map(|(e, _)| e).collect();
    out.sort_by(|a, b| {
        Reverse(a.roots_h.len())
            .cmp(&Reverse(b.roots_h.len()))
            .then_with(|| a.datum_h.twist.cmp(&b.datum_h.twist))
    });
    Ok(out)
}

pub fn enumerate_endoscopic(datum: &RootDatum, order_bound: u32) -> Result<Vec<EndoscopicDatum>> {
    dedup_by_isomorphism(enumerate_candidates(datum, order_bound)?)
}

/// Cheap isomorphism invariants checked before the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Signature {
    rank: usize,
    roots: usize,
    span: usize,
    coset_charpolys: Vec<Vec<i64>>,
}

impl Signature {
    fn of(d: &RootDatum) -> Result<Self> {
        let coset = twisted_coset(d)?;
        let mut coset_charpolys: Vec<Vec<i64>> = coset.iter().map(charpoly_values).collect();
        coset_charpolys.sort();
        Ok(Signature { rank: d.rank, roots: d.roots.len(), span: linalg::rank_of(&d.roots), coset_charpolys })
    }
}

fn twisted_coset(d: &RootDatum) -> Result<Vec<IntMatrix>> {
    Ok(weyl_group(d)?.elements.iter().map(|w| w.mul(&d.twist)).collect())
}

/// `det(x − m)` at `x = 0..=n`, which pins down the characteristic polynomial.
fn charpoly_values(m: &IntMatrix) -> Vec<i64> {
    let n = m.n_rows();
    (0..=n as i64).map(|x| IntMatrix::scalar(n, x).sub(m).det()).collect()
}

/// Searches lattice automorphisms with entries in `{−1, 0, 1}` carrying roots,
/// coroots and the twist coset `W(Φ)·σ` of `a` onto those of `b`.
pub fn isomorphic(a: &RootDatum, b: &RootDatum) -> Result<bool> {
    if a.rank != b.rank || a.roots.len() != b.roots.len() {
        return Ok(false);
    }
    let n = a.rank;
    if n == 0 {
        return Ok(true);
    }
    let coset_b = twisted_coset(b)?;
    let roots_b = set_of(&b.roots);
    let candidates: Vec<Vec<i64>> = {
        let mut c: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
            .map(|mut idx| {
                (0..n)
                    .map(|_| {
                        let d = (idx % 3) as i64 - 1;
                        idx /= 3;
                        d
                    })
                    .collect()
            })
            .filter(|v: &Vec<i64>| v.iter().any(|&x| x != 0))
            .collect();
        // signed unit vectors first
        c.sort_by_key(|v| v.iter().filter(|&&x| x != 0).count());
        c
    };
    for tau in &coset_b {
        let mut cols: Vec<Vec<i64>> = Vec::with_capacity(n);
        if search_iso(a, b, tau, &roots_b, &candidates, &mut cols) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn search_iso(
    a: &RootDatum,
    b: &RootDatum,
    tau: &IntMatrix,
    roots_b: &BTreeSet<Vec<i64>>,
    candidates: &[Vec<i64>],
    cols: &mut Vec<Vec<i64>>,
) -> bool {
    let n = a.rank;
    let j = cols.len();
    if j == n {
        let phi = IntMatrix::from_columns(n, cols);
        let d = phi.det();
        if d != 1 && d != -1 {
            return false;
        }
        let Ok(co) = phi.inverse_transpose() else { return false };
        return a.roots.iter().zip(&a.coroots).all(|(r, c)| {
            let img = phi.mul_vec(r);
            b.coroot_of(&img).is_some_and(|bc| bc == co.mul_vec(c).as_slice())
        });
    }
    let apply = |cols: &[Vec<i64>], v: &[i64]| -> Vec<i64> {
        let mut out = vec![0; n];
        for (k, col) in cols.iter().enumerate() {
            for i in 0..n {
                out[i] += v[k] * col[i];
            }
        }
        out
    };
    for cand in candidates {
        cols.push(cand.clone());
        let assigned = j + 1;
        let roots_ok = a
            .roots
            .iter()
            .filter(|r| r[assigned..].iter().all(|&x| x == 0))
            .all(|r| roots_b.contains(&apply(cols, r)));
        // φ σ_a = τ φ, column by column once the needed columns exist
        let twist_ok = (0..assigned).all(|k| {
            let sk = a.twist.column(k);
            if sk[assigned..].iter().any(|&x| x != 0) {
                return true;
            }
            apply(cols, &sk) == tau.mul_vec(&cols[k])
        });
        if roots_ok && twist_ok && search_iso(a, b, tau, roots_b, candidates, cols) {
            return true;
        }
        cols.pop();
    }
    false
}

/// True iff `span_Q(Φ_G)` has no nonzero vector fixed by `W(Φ_H)` and `σ_H`.
pub fn is_elliptic(e: &EndoscopicDatum, datum: &RootDatum) -> Result<bool> {
    let n = datum.rank;
    let basis: Vec<Vec<i64>> = {
        let mut b: Vec<Vec<i64>> = Vec::new();
        for r in &datum.roots {
            let mut trial = b.clone();
            trial.push(r.clone());
            if linalg::rank_of(&trial) > b.len() {
                b = trial;
            }
        }
        b
    };
    if basis.is_empty() {
        return Ok(true);
    }
    let mut gens: Vec<IntMatrix> = Vec::new();
    if !e.roots_h.is_empty() {
        for a in simple_roots_of(&e.roots_h)? {
            let i = e.roots_h.iter().position(|r| *r == a).expect("simple root of Φ_H");
            gens.push(reflection_matrix(&e.roots_h[i], &e.coroots_h[i]));
        }
    }
    gens.push(e.twist_h.clone());

    let b = IntMatrix::from_columns(n, &basis);
    let mut system: QMatrix = Vec::new();
    for g in &gens {
        let m = g.sub(&IntMatrix::identity(n)).mul(&b);
        system.extend(linalg::to_rational(&m));
    }
    Ok(linalg::nullspace(&system, basis.len()).is_empty())
}

/// Unordered partition `(n1, n2)` with `n1 ≥ n2` read off an `s ∈ {±1}^n`.
pub fn sign_partition(s: &TorsionCharacter) -> Option<(usize, usize)> {
    let half = Rational64::new(1, 2);
    let mut plus = 0;
    let mut minus = 0;
    for v in s.values() {
        if v.is_zero() {
            plus += 1;
        } else if *v == half {
            minus += 1;
        } else {
            return None;
        }
    }
    Some((plus.max(minus), plus.min(minus)))
}

/// Elliptic endoscopic classes of `U(n)`, as partitions `n = n1 + n2`.
pub fn unitary_elliptic(n: usize) -> Result<Vec<(usize, usize)>> {
    if !(1..=4).contains(&n) {
        return Err(Error::Input(format!("unitary_elliptic needs 1 ≤ n ≤ 4, got {n}")));
    }
    let datum = root_datum::builtin(root_datum::Family::U(n))?;
    let mut elliptic = Vec::new();
    for e in enumerate_candidates(&datum, 2)? {
        if is_elliptic(&e, &datum)? {
            elliptic.push(e);
        }
    }
    let mut parts = BTreeSet::new();
    for e in dedup_by_isomorphism(elliptic)? {
        let p = sign_partition(&e.s)
            .ok_or_else(|| Error::Unsupported(format!("elliptic datum with s = {} outside {{±1}}^n", e.s)))?;
        parts.insert(Reverse(p));
    }
    Ok(parts.into_iter().map(|Reverse(p)| p).collect())
}

/// Display name for the data the paper's examples single out.
pub fn describe(e: &EndoscopicDatum) -> String {
    let d = &e.datum_h;
    if d.roots.is_empty() {
        if d.twist.is_identity() {
            return format!("split torus G_m^{}", d.rank);
        }
        if d.rank == 1 && d.twist == IntMatrix::scalar(1, -1) {
            return "U_E(1)".to_string();
        }
        return format!("torus with σ = {:?}", d.twist);
    }
    format!("|Φ_H| = {}, σ_H = {:?}", d.roots.len(), d.twist)
}

impl EndoscopicDatum {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("endoscopic datum serializes")
    }
}
