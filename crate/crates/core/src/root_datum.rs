//! Root data `(X*, X_*, Φ, Φ∨, σ)` of unramified reductive groups.
//!
//! Both lattices are the standard `Z^rank` and the pairing is the dot product,
//! so a twist `σ` acting on characters acts on cocharacters by its
//! inverse-transpose.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, IntMatrix};

/// Default cap on `|W|` for [`weyl_group`].
pub const WEYL_BOUND: usize = 10_000;
/// Largest order accepted for a twist.
pub const TWIST_ORDER_BOUND: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub rank: usize,
    pub roots: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<i64>>,
    pub twist: IntMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    SL2,
    PGL2,
    GL(usize),
    U(usize),
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts `SL2`, `PGL2`, `GL3`, `U3` (any case); a bare `GL`/`U`/`GLn`/`Un`
    /// parses with `n = 0` and must be completed by [`builtin_datum`].
    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        let num = |rest: &str| -> Result<usize> {
            match rest {
                "" | "N" => Ok(0),
                r => r.parse().map_err(|_| Error::UnknownFamily(s.to_string())),
            }
        };
        match up.as_str() {
            "SL2" | "SL(2)" => Ok(Family::SL2),
            "PGL2" | "PGL(2)" => Ok(Family::PGL2),
            _ if up.starts_with("GL") => Ok(Family::GL(num(&up[2..])?)),
            _ if up.starts_with('U') => Ok(Family::U(num(&up[1..])?)),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

impl RootDatum {
    pub fn new(roots: Vec<Vec<i64>>, coroots: Vec<Vec<i64>>, twist: IntMatrix) -> Self {
        RootDatum { rank: twist.n_rows(), roots, coroots, twist, name: None }
    }

    /// Torus datum `(Z^n, Z^n, ∅, ∅, σ)`.
    pub fn torus(twist: IntMatrix) -> Self {
        Self::new(Vec::new(), Vec::new(), twist)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Equality of the mathematical data, ignoring the label.
    pub fn same_data(&self, other: &RootDatum) -> bool {
        self.rank == other.rank
            && self.roots == other.roots
            && self.coroots == other.coroots
            && self.twist == other.twist
    }

    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.roots.iter().position(|r| r == v)
    }

    /// Coroot aligned with the given root.
    pub fn coroot_of(&self, root: &[i64]) -> Option<&[i64]> {
        self.root_index(root).map(|i| self.coroots[i].as_slice())
    }

    /// Matrix of `s_α(x) = x − ⟨x, α∨⟩ α` on `X*`.
    pub fn reflection(&self, i: usize) -> IntMatrix {
        reflection_matrix(&self.roots[i], &self.coroots[i])
    }

    /// Twist as it acts on `X_*`.
    pub fn cotwist(&self) -> Result<IntMatrix> {
        self.twist.inverse_transpose()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("root datum serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: RootDatum = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        if d.twist.n_rows() != d.rank || d.twist.n_cols() != d.rank {
            return Err(Error::RankMismatch { expected: d.rank, got: d.twist.n_rows() });
        }
        Ok(d)
    }
}

impl fmt::Display for RootDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name.as_deref().unwrap_or("datum"))?;
        write!(f, " (rank {}, |Φ| = {}, σ = {:?})", self.rank, self.roots.len(), self.twist)
    }
}

pub fn reflection_matrix(root: &[i64], coroot: &[i64]) -> IntMatrix {
    let n = root.len();
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, m.get(i, j) - root[i] * coroot[j]);
        }
    }
    m
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn gl_roots(n: usize) -> Vec<Vec<i64>> {
    let mut roots = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut v = unit(n, i);
                v[j] = -1;
                roots.push(v);
            }
        }
    }
    roots
}

/// `σ(k_1, …, k_n) = (−k_n, …, −k_1)`.
pub fn unitary_twist(n: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, n - 1 - i, -1);
    }
    m
}

pub fn builtin(family: Family) -> Result<RootDatum> {
    Ok(match family {
        Family::SL2 => RootDatum::new(vec![vec![2], vec![-2]], vec![vec![1], vec![-1]], IntMatrix::identity(1))
            .with_name("SL2"),
        Family::PGL2 => RootDatum::new(vec![vec![1], vec![-1]], vec![vec![2], vec![-2]], IntMatrix::identity(1))
            .with_name("PGL2"),
        Family::GL(n) if n >= 1 => {
            let r = gl_roots(n);
            RootDatum::new(r.clone(), r, IntMatrix::identity(n)).with_name(format!("GL{n}"))
        }
        Family::U(n) if n >= 1 => {
            let r = gl_roots(n);
            RootDatum::new(r.clone(), r, unitary_twist(n)).with_name(format!("U{n}"))
        }
        _ => return Err(Error::UnknownFamily(format!("{family:?} needs n ≥ 1"))),
    })
}

/// Built-in data by family name; `n` completes `GL`/`U` and is ignored for SL2/PGL2.
pub fn builtin_datum(family: &str, n: usize) -> Result<RootDatum> {
    let fam = match family.parse::<Family>()? {
        Family::GL(0) => Family::GL(n),
        Family::U(0) => Family::U(n),
        f => f,
    };
    builtin(fam)
}

fn permutes(m: &IntMatrix, set: &[Vec<i64>]) -> bool {
    let members: HashSet<&[i64]> = set.iter().map(Vec::as_slice).collect();
    set.iter().all(|v| members.contains(m.mul_vec(v).as_slice()))
}

fn maps_onto(m: &IntMatrix, set: &[Vec<i64>]) -> bool {
    let orig: BTreeSet<Vec<i64>> = set.iter().cloned().collect();
    let img: BTreeSet<Vec<i64>> = set.iter().map(|v| m.mul_vec(v)).collect();
    orig == img
}

/// Every violated root-datum axiom, each naming the offending vector or matrix.
pub fn validate_root_datum(d: &RootDatum) -> Vec<String> {
    let mut out = Vec::new();
    let n = d.rank;
    if d.roots.len() != d.coroots.len() {
        out.push(format!("{} roots but {} coroots", d.roots.len(), d.coroots.len()));
        return out;
    }
    if !d.twist.is_square() || d.twist.n_rows() != n {
        out.push(format!("twist {:?} is not {n}×{n}", d.twist));
        return out;
    }
    for v in d.roots.iter().chain(&d.coroots) {
        if v.len() != n {
            out.push(format!("vector {v:?} does not have length {n}"));
        }
    }
    if !out.is_empty() {
        return out;
    }

    for (name, set) in [("root", &d.roots), ("coroot", &d.coroots)] {
        let mut seen = HashSet::new();
        for v in set.iter() {
            if !seen.insert(v.clone()) {
                out.push(format!("duplicate {name} {v:?}"));
            }
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            if !set.contains(&neg) {
                out.push(format!("{name} {v:?} has no negative {neg:?} in the set"));
            }
            if v.iter().all(|&x| x == 0) {
                out.push(format!("{name} {v:?} is zero"));
            }
        }
    }

    for (a, c) in d.roots.iter().zip(&d.coroots) {
        if dot(a, c) != 2 {
            out.push(format!("pairing of aligned pair ≠ 2: root {a:?}, coroot {c:?}"));
        }
    }
    for (i, (a, c)) in d.roots.iter().zip(&d.coroots).enumerate() {
        if !permutes(&d.reflection(i), &d.roots) {
            out.push(format!("reflection in root {a:?} does not permute Φ"));
        }
        if !permutes(&reflection_matrix(c, a), &d.coroots) {
            out.push(format!("reflection in coroot {c:?} does not permute Φ∨"));
        }
    }

    let det = d.twist.det();
    if det != 1 && det != -1 {
        out.push(format!("twist {:?} is not invertible over Z", d.twist));
        return out;
    }
    if d.twist.order(TWIST_ORDER_BOUND).is_none() {
        out.push(format!("twist {:?} has no finite order ≤ {TWIST_ORDER_BOUND}", d.twist));
    }
    if !permutes(&d.twist, &d.roots) {
        out.push(format!("twist {:?} does not permute Φ", d.twist));
    }
    if let Ok(co) = d.cotwist() {
        if !permutes(&co, &d.coroots) {
            out.push(format!("inverse-transpose of twist {:?} does not permute Φ∨", d.twist));
        }
    }
    if out.is_empty() {
        match simple_system(d) {
            Ok(delta) => {
                if !maps_onto(&d.twist, &delta) {
                    out.push(format!("twist {:?} does not map the simple system {delta:?} to itself", d.twist));
                }
            }
            Err(e) => out.push(e.to_string()),
        }
    }
    out
}

/// Positivity: a generic functional with weights `2^(rank-1), …, 2, 1`,
/// ties broken by the sign of the first nonzero coordinate.
pub fn is_positive(v: &[i64]) -> bool {
    let n = v.len();
    let f: i64 = v.iter().enumerate().map(|(i, &x)| x << (n - 1 - i)).sum();
    match f.cmp(&0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0),
    }
}

/// Canonical base of `Φ`, as a subsequence of `roots` (in their order).
pub fn simple_roots_of(roots: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let positive: Vec<&Vec<i64>> = roots.iter().filter(|r| is_positive(r)).collect();
    let pos_set: HashSet<&[i64]> = positive.iter().map(|v| v.as_slice()).collect();
    let delta: Vec<Vec<i64>> = positive
        .iter()
        .filter(|&&r| {
            !positive.iter().any(|&a| {
                let rest: Vec<i64> = r.iter().zip(a).map(|(x, y)| x - y).collect();
                pos_set.contains(rest.as_slice())
            })
        })
        .map(|&r| r.clone())
        .collect();

    if delta.len() != linalg::rank_of(roots) {
        return Err(Error::NotCrystallographic(format!(
            "{} simple roots for a span of rank {}",
            delta.len(),
            linalg::rank_of(roots)
        )));
    }
    for r in roots {
        let coeffs = linalg::solve_rational(&delta, r)
            .ok_or_else(|| Error::NotCrystallographic(format!("root {r:?} is not in the span of Δ")))?;
        let integral = coeffs.iter().all(|c| c.is_integer());
        if !integral || !(linalg::is_nonnegative(&coeffs) || linalg::is_nonpositive(&coeffs)) {
            return Err(Error::NotCrystallographic(format!("root {r:?} does not decompose over Δ = {delta:?}")));
        }
    }
    Ok(delta)
}

pub fn simple_system(d: &RootDatum) -> Result<Vec<Vec<i64>>> {
    simple_roots_of(&d.roots)
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    /// Breadth-first from the identity; lexicographic order within each length.
    pub elements: Vec<IntMatrix>,
    /// Positions of the simple reflections inside `elements`.
    pub generators: Vec<usize>,
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &IntMatrix) -> bool {
        self.elements.iter().any(|e| e == m)
    }

    pub fn simple_reflections(&self) -> impl Iterator<Item = &IntMatrix> {
        self.generators.iter().map(|&i| &self.elements[i])
    }
}

pub fn weyl_group(d: &RootDatum) -> Result<WeylGroup> {
    weyl_group_bounded(d, WEYL_BOUND)
}

pub fn weyl_group_bounded(d: &RootDatum, bound: usize) -> Result<WeylGroup> {
    let delta = simple_system(d)?;
    let gens: Vec<IntMatrix> = delta
        .iter()
        .map(|a| {
            let i = d.root_index(a).expect("simple root is a root");
            d.reflection(i)
        })
        .collect();

    let id = IntMatrix::identity(d.rank);
    let mut elements = vec![id.clone()];
    let mut seen: HashSet<IntMatrix> = HashSet::from([id]);
    let mut level_start = 0;
    while level_start < elements.len() {
        let level_end = elements.len();
        let mut next = BTreeSet::new();
        for e in &elements[level_start..level_end] {
            for g in &gens {
                let m = g.mul(e);
                if !seen.contains(&m) {
                    next.insert(m);
                }
            }
        }
        for m in next {
            seen.insert(m.clone());
            elements.push(m);
            if elements.len() > bound {
                return Err(Error::BoundExceeded(format!("Weyl group larger than {bound}")));
            }
        }
        level_start = level_end;
    }
    let generators = gens
        .iter()
        .map(|g| elements.iter().position(|e| e == g).expect("generator enumerated"))
        .collect();
    Ok(WeylGroup { elements, generators })
}

/// Swap roots and coroots; the twist becomes its inverse-transpose.
pub fn dual_datum(d: &RootDatum) -> Result<RootDatum> {
    let name = d.name.as_deref().map(|n| match n {
        "SL2" => "PGL2".to_string(),
        "PGL2" => "SL2".to_string(),
        n if n.starts_with("GL") || n.starts_with('U') => n.to_string(),
        n => match n.strip_prefix("dual(").and_then(|r| r.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => format!("dual({n})"),
        },
    });
    Ok(RootDatum {
        rank: d.rank,
        roots: d.coroots.clone(),
        coroots: d.roots.clone(),
        twist: d.cotwist()?,
        name,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_builtins() -> Vec<RootDatum> {
        let mut v = vec![builtin(Family::SL2).unwrap(), builtin(Family::PGL2).unwrap()];
        for n in 1..=4 {
            v.push(builtin(Family::GL(n)).unwrap());
            v.push(builtin(Family::U(n)).unwrap());
        }
        v
    }

    #[test]
    fn builtins_are_valid() {
        for d in all_builtins() {
            assert_eq!(validate_root_datum(&d), Vec::<String>::new(), "{d}");
        }
    }

    #[test]
    fn sl2_and_pgl2_shapes() {
        let sl2 = builtin_datum("SL2", 0).unwrap();
        assert_eq!(sl2.roots, vec![vec![2], vec![-2]]);
        assert_eq!(sl2.coroots, vec![vec![1], vec![-1]]);
        let pgl2 = builtin_datum("pgl2", 7).unwrap();
        assert_eq!(pgl2.roots, vec![vec![1], vec![-1]]);
        assert_eq!(pgl2.coroots, vec![vec![2], vec![-2]]);
    }

    #[test]
    fn unitary_datum() {
        let u3 = builtin_datum("U", 3).unwrap();
        assert_eq!(u3.roots.len(), 6);
        assert_eq!(u3.twist.mul_vec(&[1, 2, 3]), vec![-3, -2, -1]);
        let delta = simple_system(&u3).unwrap();
        assert_eq!(delta, vec![vec![1, -1, 0], vec![0, 1, -1]]);
        assert!(maps_onto(&u3.twist, &delta));
    }

    #[test]
    fn unknown_family() {
        assert!(matches!(builtin_datum("E8", 0), Err(Error::UnknownFamily(_))));
        assert!(builtin_datum("U", 0).is_err());
    }

    #[test]
    fn bad_pairing_is_reported() {
        let d = RootDatum::new(vec![vec![1], vec![-1]], vec![vec![1], vec![-1]], IntMatrix::identity(1));
        let v = validate_root_datum(&d);
        assert!(v.iter().any(|m| m.starts_with("pairing of aligned pair ≠ 2")), "{v:?}");
    }

    #[test]
    fn twist_not_fixing_base_is_reported() {
        let mut d = builtin(Family::SL2).unwrap();
        d.twist = IntMatrix::scalar(1, -1);
        let v = validate_root_datum(&d);
        assert!(v.iter().any(|m| m.contains("simple system")), "{v:?}");
    }

    #[test]
    fn simple_systems() {
        assert_eq!(simple_system(&builtin(Family::SL2).unwrap()).unwrap(), vec![vec![2]]);
        let gl3 = builtin(Family::GL(3)).unwrap();
        assert_eq!(simple_system(&gl3).unwrap(), vec![vec![1, -1, 0], vec![0, 1, -1]]);
        for d in all_builtins() {
            assert_eq!(simple_system(&d).unwrap().len(), linalg::rank_of(&d.roots));
        }
    }

    #[test]
    fn non_crystallographic_is_rejected() {
        // A2-like roots without the sum e1 - e3
        let roots = vec![vec![1, -1, 0], vec![-1, 1, 0], vec![0, 1, -1], vec![0, -1, 1], vec![1, 1, -2], vec![-1, -1, 2]];
        assert!(simple_roots_of(&roots).is_err());
    }

    #[test]
    fn weyl_groups() {
        let sl2 = weyl_group(&builtin(Family::SL2).unwrap()).unwrap();
        assert_eq!(sl2.elements, vec![IntMatrix::identity(1), IntMatrix::scalar(1, -1)]);
        let gl3 = weyl_group(&builtin(Family::GL(3)).unwrap()).unwrap();
        assert_eq!(gl3.order(), 6);
        for w in &gl3.elements {
            // permutation matrices
            assert!(w.to_rows().iter().all(|r| r.iter().filter(|&&x| x == 1).count() == 1));
        }
        let torus = RootDatum::torus(IntMatrix::identity(2));
        assert_eq!(weyl_group(&torus).unwrap().order(), 1);
        assert_eq!(weyl_group(&builtin(Family::GL(4)).unwrap()).unwrap().order(), 24);
        assert!(matches!(
            weyl_group_bounded(&builtin(Family::GL(4)).unwrap(), 10),
            Err(Error::BoundExceeded(_))
        ));
    }

    #[test]
    fn weyl_elements_permute_roots_and_coroots() {
        for d in all_builtins() {
            let w = weyl_group(&d).unwrap();
            for e in &w.elements {
                assert!(permutes(e, &d.roots));
                assert!(permutes(&e.inverse_transpose().unwrap(), &d.coroots));
            }
        }
    }

    #[test]
    fn duality() {
        let sl2 = builtin(Family::SL2).unwrap();
        let pgl2 = builtin(Family::PGL2).unwrap();
        assert_eq!(dual_datum(&sl2).unwrap(), pgl2);
        let u3 = builtin(Family::U(3)).unwrap();
        assert_eq!(dual_datum(&dual_datum(&u3).unwrap()).unwrap(), u3);
        let gl2 = builtin(Family::GL(2)).unwrap();
        assert_eq!(dual_datum(&gl2).unwrap(), gl2);
        for d in all_builtins() {
            assert_eq!(dual_datum(&dual_datum(&d).unwrap()).unwrap(), d);
        }
    }

    #[test]
    fn json_round_trip() {
        let sl2 = builtin(Family::SL2).unwrap();
        let s = sl2.to_json();
        assert_eq!(s, r#"{"rank":1,"roots":[[2],[-2]],"coroots":[[1],[-1]],"twist":[[1]],"name":"SL2"}"#);
        assert_eq!(RootDatum::from_json(&s).unwrap(), sl2);
    }
}
