//! Tori as Galois lattices, `H¹` through the Tate–Nakayama presentation, and
//! the character `κ` induced by an endoscopic `s`.
//!
//! The Galois group is modelled as the finite matrix group generated by the
//! given action on `X_*`; nothing here assumes it is cyclic.

use std::collections::{BTreeSet, HashSet};

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::endoscopy::TorsionCharacter;
use crate::error::{Error, Result};
use crate::linalg::{integer_kernel, smith, solve_integer, IntMatrix};
use crate::root_datum::{weyl_group, RootDatum, TWIST_ORDER_BOUND};

/// Default cap on `|Γ|`.
pub const GROUP_BOUND: usize = 48;

#[derive(Clone, Debug)]
pub struct GaloisLattice {
    rank: usize,
    generators: Vec<IntMatrix>,
    group_elements: Vec<IntMatrix>,
}

#[derive(Serialize, Deserialize)]
struct LatticeFile {
    rank: usize,
    generators: Vec<IntMatrix>,
}

impl GaloisLattice {
    pub fn new(rank: usize, generators: Vec<IntMatrix>) -> Result<Self> {
        Self::with_bound(rank, generators, GROUP_BOUND)
    }

    pub fn with_bound(rank: usize, generators: Vec<IntMatrix>, bound: usize) -> Result<Self> {
        for g in &generators {
            if !g.is_square() || g.n_rows() != rank {
                return Err(Error::RankMismatch { expected: rank, got: g.n_rows() });
            }
            let d = g.det();
            if d != 1 && d != -1 {
                return Err(Error::NotUnimodular);
            }
        }
        let id = IntMatrix::identity(rank);
        let mut elements = vec![id.clone()];
        let mut seen: HashSet<IntMatrix> = HashSet::from([id]);
        let mut i = 0;
        while i < elements.len() {
            for g in &generators {
                let m = g.mul(&elements[i]);
                if seen.insert(m.clone()) {
                    elements.push(m);
                    if elements.len() > bound {
                        return Err(Error::BoundExceeded(format!("Galois image larger than {bound}")));
                    }
                }
            }
            i += 1;
        }
        Ok(GaloisLattice { rank, generators, group_elements: elements })
    }

    /// Unramified torus: `Γ` cyclic, generated by the Frobenius action.
    pub fn cyclic(frobenius: IntMatrix) -> Result<Self> {
        Self::new(frobenius.n_rows(), vec![frobenius])
    }

    /// `U_E(1)`: rank one with `τ(u) = −u`.
    pub fn unitary_one() -> Self {
        Self::cyclic(IntMatrix::scalar(1, -1)).expect("U_E(1) lattice")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    pub fn group_elements(&self) -> &[IntMatrix] {
        &self.group_elements
    }

    /// `u ↦ Σ_τ τu`.
    pub fn norm_map(&self) -> IntMatrix {
        let mut n = IntMatrix::zeros(self.rank, self.rank);
        for g in &self.group_elements {
            for i in 0..self.rank {
                for j in 0..self.rank {
                    n.set(i, j, n.get(i, j) + g.get(i, j));
                }
            }
        }
        n
    }

    /// Nonzero generators `τ e_j − e_j` of the boundary sublattice.
    pub fn boundary_generators(&self) -> Vec<Vec<i64>> {
        let id = IntMatrix::identity(self.rank);
        let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
        for g in &self.group_elements {
            let d = g.sub(&id);
            for j in 0..self.rank {
                let col = d.column(j);
                if col.iter().any(|&x| x != 0) {
                    out.insert(col);
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: LatticeFile = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        Self::new(f.rank, f.generators)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&LatticeFile { rank: self.rank, generators: self.generators.clone() })
            .expect("lattice serializes")
    }
}

/// `⊕ Z/d_i` with `d_1 | d_2 | …`, each `d_i ≥ 2`.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<i64>,
    /// Norm-zero cocharacters representing the cyclic factors.
    pub generators: Vec<Vec<i64>>,
    #[serde(skip)]
    kernel_basis: IntMatrix,
    #[serde(skip)]
    projection: IntMatrix,
    #[serde(skip)]
    factor_rows: Vec<usize>,
}

impl FiniteAbelianGroup {
    pub fn order(&self) -> i64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("group serializes")
    }
}

pub fn h1(lattice: &GaloisLattice) -> Result<FiniteAbelianGroup> {
    let n = lattice.rank;
    let kernel = integer_kernel(&lattice.norm_map())?;
    let m = kernel.n_cols();
    let boundary = lattice.boundary_generators();
    let coords: Vec<Vec<i64>> = boundary
        .iter()
        .map(|w| {
            solve_integer(&kernel, w)?
                .ok_or_else(|| Error::Input(format!("boundary vector {w:?} is not norm-zero")))
        })
        .collect::<Result<_>>()?;
    let relations = IntMatrix::from_columns(m, &coords);
    let s = smith(&relations)?;
    let mut diag = s.diag.clone();
    diag.resize(m, 0);
    if diag.contains(&0) {
        return Err(Error::Input("H¹ has a free part; the action is not of finite order".into()));
    }
    let pinv = if m == 0 { IntMatrix::identity(0) } else { s.p.inverse_unimodular()? };
    let mut invariant_factors = Vec::new();
    let mut generators = Vec::new();
    let mut factor_rows = Vec::new();
    for (i, &d) in diag.iter().enumerate() {
        if d >= 2 {
            invariant_factors.push(d);
            generators.push(kernel.mul_vec(&pinv.column(i)));
            factor_rows.push(i);
        }
    }
    debug_assert!(generators.iter().all(|g| g.len() == n));
    Ok(FiniteAbelianGroup { invariant_factors, generators, kernel_basis: kernel, projection: s.p, factor_rows })
}

/// Coordinates of the class of a norm-zero `u` in the invariant-factor presentation.
pub fn class_of(u: &[i64], lattice: &GaloisLattice, h: &FiniteAbelianGroup) -> Result<Vec<i64>> {
    if u.len() != lattice.rank {
        return Err(Error::RankMismatch { expected: lattice.rank, got: u.len() });
    }
    if lattice.norm_map().mul_vec(u).iter().any(|&x| x != 0) {
        return Err(Error::NotNormZero);
    }
    if h.kernel_basis.n_cols() == 0 {
        return Ok(Vec::new());
    }
    let c = solve_integer(&h.kernel_basis, u)?.ok_or(Error::NotNormZero)?;
    let y = h.projection.mul_vec(&c);
    Ok(h.factor_rows
        .iter()
        .zip(&h.invariant_factors)
        .map(|(&row, &d)| y[row].rem_euclid(d))
        .collect())
}

/// `κ` on the generators of `H¹`, as rotation numbers.
#[derive(Clone, Debug, Serialize)]
pub struct KappaCharacter {
    pub group: FiniteAbelianGroup,
    #[serde(serialize_with = "ser_rotations")]
    pub values: Vec<Rational64>,
}

fn ser_rotations<S: serde::Serializer>(v: &[Rational64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect::<Vec<_>>().serialize(s)
}

impl KappaCharacter {
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Rotation number of `κ` at a class given by coordinates.
    pub fn evaluate(&self, coords: &[i64]) -> Rational64 {
        let r: Rational64 = self.values.iter().zip(coords).map(|(v, &c)| v * c).sum();
        r - Rational64::from_integer(r.floor().to_integer())
    }

    /// `κ` at a class of order two, as a sign.
    pub fn sign(&self, coords: &[i64]) -> Result<i32> {
        let r = self.evaluate(coords);
        if r.is_zero() {
            Ok(1)
        } else if r == Rational64::new(1, 2) {
            Ok(-1)
        } else {
            Err(Error::Unsupported(format!("κ takes the non-real value exp(2πi·{r})")))
        }
    }
}

pub fn kappa_character(s: &TorsionCharacter, lattice: &GaloisLattice) -> Result<KappaCharacter> {
    if s.rank() != lattice.rank {
        return Err(Error::RankMismatch { expected: lattice.rank, got: s.rank() });
    }
    for b in lattice.boundary_generators() {
        if !s.is_one_on(&b) {
            return Err(Error::KappaUndefined(format!("s({b:?}) ≠ 1")));
        }
    }
    let group = h1(lattice)?;
    let values = group.generators.iter().map(|g| s.rotation(g)).collect();
    Ok(KappaCharacter { group, values })
}

/// Whether the unramified torus with Frobenius `theta` on `X*` embeds as a
/// Cartan subgroup under the identity identification, i.e. `theta ∈ W·σ_G`.
/// With `exhaustive`, every identification with entries in `{−1, 0, 1}` is
/// tried (rank ≤ 3).
pub fn embeds_as_cartan(theta: &IntMatrix, datum: &RootDatum, exhaustive: bool) -> Result<bool> {
    if !theta.is_square() || theta.n_rows() != datum.rank {
        return Err(Error::RankMismatch { expected: datum.rank, got: theta.n_rows() });
    }
    let d = theta.det();
    if d != 1 && d != -1 {
        return Err(Error::NotUnimodular);
    }
    if theta.order(TWIST_ORDER_BOUND).is_none() {
        return Err(Error::InfiniteOrder);
    }
    let weyl = weyl_group(datum)?;
    let sigma_inv = datum.twist.inverse_unimodular()?;
    let in_coset = |t: &IntMatrix| weyl.contains(&t.mul(&sigma_inv));
    if in_coset(theta) {
        return Ok(true);
    }
    if !exhaustive {
        return Ok(false);
    }
    let n = datum.rank;
    if n > 3 {
        return Err(Error::BoundExceeded("exhaustive identification search needs rank ≤ 3".into()));
    }
    for idx in 0..3usize.pow((n * n) as u32) {
        let mut k = idx;
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let v = (k % 3) as i64 - 1;
                        k /= 3;
                        v
                    })
                    .collect()
            })
            .collect();
        let phi = IntMatrix::from_rows(&rows)?;
        let Ok(phi_inv) = phi.inverse_unimodular() else { continue };
        if in_coset(&phi.mul(theta).mul(&phi_inv)) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_datum::{builtin, Family};

    fn swap2() -> GaloisLattice {
        GaloisLattice::cyclic(IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap()).unwrap()
    }

    /// |ker N / B| by reducing modulo M = |Γ| (M·ker N ⊂ B): the quotient equals
    /// |image of ker N in (Z/M)^n| / |image of B|. Kernel vectors are found by
    /// brute force in a box, so nothing here goes through Smith forms.
    fn coset_count(l: &GaloisLattice) -> usize {
        let n = l.rank();
        let m = l.group_elements().len() as i64;
        let norm = l.norm_map();
        let r = m + 1;
        let side = (2 * r + 1) as usize;
        let mut kernel_pts = Vec::new();
        for idx in 0..side.pow(n as u32) {
            let mut k = idx;
            let v: Vec<i64> = (0..n)
                .map(|_| {
                    let x = (k % side) as i64 - r;
                    k /= side;
                    x
                })
                .collect();
            if norm.mul_vec(&v).iter().all(|&x| x == 0) {
                kernel_pts.push(v);
            }
        }
        let span = |gens: &[Vec<i64>]| -> usize {
            let red = |v: &[i64]| v.iter().map(|x| x.rem_euclid(m)).collect::<Vec<_>>();
            let mut set: HashSet<Vec<i64>> = HashSet::from([vec![0; n]]);
            let mut frontier = vec![vec![0; n]];
            while let Some(x) = frontier.pop() {
                for g in gens {
                    let y: Vec<i64> = red(&x.iter().zip(g).map(|(a, b)| a + b).collect::<Vec<_>>());
                    if set.insert(y.clone()) {
                        frontier.push(y);
                    }
                }
            }
            set.len()
        };
        span(&kernel_pts) / span(&l.boundary_generators())
    }

    #[test]
    fn h1_examples() {
        let ue1 = GaloisLattice::unitary_one();
        let h = h1(&ue1).unwrap();
        assert_eq!(h.invariant_factors, vec![2]);
        assert_eq!(h.order() as usize, coset_count(&ue1));

        let split = GaloisLattice::new(1, vec![]).unwrap();
        assert!(h1(&split).unwrap().is_trivial());
        assert_eq!(coset_count(&split), 1);

        let sw = swap2();
        assert!(h1(&sw).unwrap().is_trivial());
        assert_eq!(coset_count(&sw), 1);
    }

    #[test]
    fn h1_matches_coset_enumeration_rank_three() {
        let lattices = vec![
            GaloisLattice::cyclic(IntMatrix::scalar(2, -1)).unwrap(),
            GaloisLattice::cyclic(IntMatrix::scalar(3, -1)).unwrap(),
            // cyclic permutation of three coordinates
            GaloisLattice::cyclic(IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]).unwrap())
                .unwrap(),
            // U(3) twist
            GaloisLattice::cyclic(crate::root_datum::unitary_twist(3)).unwrap(),
            // -1 times a 3-cycle: order 6
            GaloisLattice::cyclic(IntMatrix::from_rows(&[vec![0, 0, -1], vec![-1, 0, 0], vec![0, -1, 0]]).unwrap())
                .unwrap(),
            // Klein four-group acting diagonally by signs
            GaloisLattice::new(
                2,
                vec![
                    IntMatrix::from_rows(&[vec![-1, 0], vec![0, 1]]).unwrap(),
                    IntMatrix::from_rows(&[vec![1, 0], vec![0, -1]]).unwrap(),
                ],
            )
            .unwrap(),
        ];
        for l in &lattices {
            let h = h1(l).unwrap();
            assert_eq!(h.order() as usize, coset_count(l), "{:?}", l.generators());
        }
        assert_eq!(h1(&lattices[0]).unwrap().invariant_factors, vec![2, 2]);
        assert!(h1(&lattices[2]).unwrap().is_trivial());
    }

    #[test]
    fn class_of_ue1() {
        let ue1 = GaloisLattice::unitary_one();
        let h = h1(&ue1).unwrap();
        assert_eq!(class_of(&[1], &ue1, &h).unwrap(), vec![1]);
        assert_eq!(class_of(&[2], &ue1, &h).unwrap(), vec![0]);
        for u in -10..=10i64 {
            assert_eq!(class_of(&[u], &ue1, &h).unwrap(), vec![u.rem_euclid(2)]);
        }
        let sw = swap2();
        let hs = h1(&sw).unwrap();
        assert!(class_of(&[1, -1], &sw, &hs).unwrap().is_empty());
        assert_eq!(class_of(&[1, 0], &sw, &hs), Err(Error::NotNormZero));
    }

    #[test]
    fn kappa_examples() {
        let ue1 = GaloisLattice::unitary_one();
        let k = kappa_character(&TorsionCharacter::parse("1/2").unwrap(), &ue1).unwrap();
        assert_eq!(k.values, vec![Rational64::new(1, 2)]);
        assert!(!k.is_trivial());
        assert_eq!(k.sign(&[1]).unwrap(), -1);

        let triv = kappa_character(&TorsionCharacter::trivial(1), &ue1).unwrap();
        assert!(triv.is_trivial());

        let sw = swap2();
        let ks = kappa_character(&TorsionCharacter::parse("1/2,1/2").unwrap(), &sw).unwrap();
        assert!(ks.values.is_empty());

        // s = 1/4 is not trivial on the boundary 2Z of U_E(1)
        assert!(matches!(
            kappa_character(&TorsionCharacter::parse("1/4").unwrap(), &ue1),
            Err(Error::KappaUndefined(_))
        ));
    }

    #[test]
    fn kappa_constant_on_boundary_shifts() {
        let l = GaloisLattice::cyclic(IntMatrix::scalar(2, -1)).unwrap();
        let s = TorsionCharacter::parse("1/2,0").unwrap();
        let k = kappa_character(&s, &l).unwrap();
        let h = &k.group;
        for u in [[1, 0], [0, 1], [3, -5], [2, 2]] {
            let base = k.evaluate(&class_of(&u, &l, h).unwrap());
            for b in l.boundary_generators() {
                for t in -2..=2 {
                    let shifted: Vec<i64> = u.iter().zip(&b).map(|(x, y)| x + t * y).collect();
                    assert_eq!(k.evaluate(&class_of(&shifted, &l, h).unwrap()), base);
                }
            }
        }
    }

    #[test]
    fn cartan_embedding() {
        let sl2 = builtin(Family::SL2).unwrap();
        assert!(embeds_as_cartan(&IntMatrix::scalar(1, -1), &sl2, false).unwrap());
        assert!(embeds_as_cartan(&IntMatrix::identity(1), &sl2, false).unwrap());
        let gl2 = builtin(Family::GL(2)).unwrap();
        let rot = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        assert!(!embeds_as_cartan(&rot, &gl2, false).unwrap());
        assert!(!embeds_as_cartan(&rot, &gl2, true).unwrap());
        // the anti-diagonal swap twisted by -1 is not in W for GL(2) ...
        let m = IntMatrix::from_rows(&[vec![0, -1], vec![-1, 0]]).unwrap();
        assert!(!embeds_as_cartan(&m, &gl2, false).unwrap());
        // ... but it is W·σ for U(2)
        let u2 = builtin(Family::U(2)).unwrap();
        assert!(embeds_as_cartan(&m, &u2, false).unwrap());
        assert!(matches!(
            embeds_as_cartan(&IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap(), &gl2, false),
            Err(Error::InfiniteOrder)
        ));
        assert!(matches!(embeds_as_cartan(&IntMatrix::identity(2), &sl2, false), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn coset_elements_always_embed() {
        for fam in [Family::SL2, Family::GL(2), Family::GL(3), Family::U(2), Family::U(3)] {
            let d = builtin(fam).unwrap();
            for w in weyl_group(&d).unwrap().elements {
                assert!(embeds_as_cartan(&w.mul(&d.twist), &d, false).unwrap());
            }
        }
    }
}
