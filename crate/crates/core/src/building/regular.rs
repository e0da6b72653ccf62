use std::fmt;

use serde::Serialize;

use crate::endoscopy::TorsionCharacter;
use crate::error::{Error, Result};
use crate::local_field::{
    is_norm_from, is_square_unit, sqrt, ElementJson, FMatrix, FieldElement, LocalField, QuadExtElement,
};
use crate::tori_cohomology::{class_of, kappa_character, GaloisLattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralizerKind {
    Split,
    UnramifiedElliptic,
    RamifiedElliptic,
}

impl fmt::Display for CentralizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CentralizerKind::Split => "split",
            CentralizerKind::UnramifiedElliptic => "unramified_elliptic",
            CentralizerKind::RamifiedElliptic => "ramified_elliptic",
        })
    }
}

/// A strongly regular semisimple element of `SL(2, F)`.
#[derive(Clone, Debug)]
pub struct RegularElement {
    matrix: FMatrix,
    trace: FieldElement,
    disc: FieldElement,
}

impl RegularElement {
    pub fn new(matrix: FMatrix) -> Result<Self> {
        if matrix.size() != 2 {
            return Err(Error::Input("expected a 2×2 matrix".into()));
        }
        let field = matrix.field().clone();
        let det = matrix.det();
        if !det.same_at_precision(&field.one()) {
            return Err(Error::DetNotOne);
        }
        let trace = matrix.trace();
        let disc = &(&trace * &trace) - &field.from_int(4);
        if disc.is_zero() {
            return Err(Error::NotStronglyRegular);
        }
        Ok(RegularElement { matrix, trace, disc })
    }

    pub fn parse(text: &str, field: &LocalField) -> Result<Self> {
        Self::new(FMatrix::parse(text, field)?)
    }

    pub fn matrix(&self) -> &FMatrix {
        &self.matrix
    }

    pub fn field(&self) -> &LocalField {
        self.matrix.field()
    }

    pub fn trace(&self) -> &FieldElement {
        &self.trace
    }

    /// `trace² − 4`.
    pub fn disc(&self) -> &FieldElement {
        &self.disc
    }

    /// `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &FMatrix) -> Result<RegularElement> {
        RegularElement::new(h.mul(&self.matrix).mul(&h.inverse()?))
    }

    pub fn to_json(&self) -> Vec<Vec<ElementJson>> {
        self.matrix.to_rows().iter().map(|r| r.iter().map(FieldElement::to_json).collect()).collect()
    }
}

/// `D = diag(ϖ, 1)`.
pub fn d_matrix(field: &LocalField) -> FMatrix {
    FMatrix::diag(&[field.uniformizer(), field.one()])
}

/// `γ = a + b√u ∈ E¹ ↦ [[a, u·b], [b, a]]`, the action of `γ` on `O_E` in
/// the basis `{1, √u}`.
pub fn match_element(gamma: &QuadExtElement) -> Result<RegularElement> {
    let field = gamma.field().clone();
    if !gamma.norm().same_at_precision(&field.one()) {
        return Err(Error::NormNotOne);
    }
    if gamma.b.is_zero() {
        return Err(Error::NotGRegular("γ = ±1 is central".into()));
    }
    let m = FMatrix::new2(gamma.a.clone(), &field.u() * &gamma.b, gamma.b.clone(), gamma.a.clone());
    RegularElement::new(m)
}

/// The representative of the stable class of `match_element(γ)` at which the
/// transfer factor is 1: `match_element(γ)` when `v(b)` is even, its
/// conjugate by `diag(ϖ, 1)` when `v(b)` is odd. The sign that separates the
/// two is `η((γ − γ̄)/√u) = (−1)^{v(b)}`, `η` the character of `F^×/N(E^×)`.
pub fn transfer_base_point(gamma: &QuadExtElement) -> Result<RegularElement> {
    let g0 = match_element(gamma)?;
    let vb = gamma.b.valuation().ok_or(Error::NotGRegular("γ = ±1 is central".into()))?;
    if vb.rem_euclid(2) == 0 {
        Ok(g0)
    } else {
        g0.conjugate_by(&d_matrix(gamma.field()))
    }
}

/// `γ ∈ F^× ↦ diag(γ, γ⁻¹)`.
pub fn match_split(gamma: &FieldElement) -> Result<RegularElement> {
    let field = gamma.field();
    let g2 = gamma * gamma;
    if g2.same_at_precision(&field.one()) {
        return Err(Error::NotGRegular("γ = ±1 is central".into()));
    }
    RegularElement::new(FMatrix::diag(&[gamma.clone(), gamma.inv()?]))
}

pub fn classify_centralizer(g: &RegularElement) -> Result<CentralizerKind> {
    let d = g.disc();
    let v = d.valuation().ok_or(Error::NotStronglyRegular)?;
    if v.rem_euclid(2) == 1 {
        return Ok(CentralizerKind::RamifiedElliptic);
    }
    if is_square_unit(&d.unit_part()?)? {
        Ok(CentralizerKind::Split)
    } else {
        Ok(CentralizerKind::UnramifiedElliptic)
    }
}

/// Equal characteristic polynomials, i.e. equal traces.
pub fn are_stably_conjugate(g1: &RegularElement, g2: &RegularElement) -> Result<bool> {
    let diff = g1.trace() - g2.trace();
    if !diff.is_zero() {
        return Ok(false);
    }
    if diff.absolute_precision() < 1 {
        return Err(Error::Precision("traces cannot be separated at this precision".into()));
    }
    Ok(true)
}

/// `C = [v | g v]` for a cyclic vector `v`; `C⁻¹ g C` is the companion matrix.
fn cyclic_basis(g: &RegularElement) -> FMatrix {
    let f = g.field();
    let m = g.matrix();
    let v = if !m.get(1, 0).is_zero() {
        vec![f.one(), f.zero()]
    } else if !m.get(0, 1).is_zero() {
        vec![f.zero(), f.one()]
    } else {
        vec![f.one(), f.one()]
    };
    let gv = m.mul_vec(&v);
    FMatrix::new2(v[0].clone(), gv[0].clone(), v[1].clone(), gv[1].clone())
}

/// `det h` for an `h ∈ GL(2, F)` with `h g1 h⁻¹ = g2`, well defined modulo
/// the norms from the centralizer; `g1`, `g2` stably conjugate.
pub fn conjugacy_invariant(g1: &RegularElement, g2: &RegularElement) -> Result<FieldElement> {
    let c1 = cyclic_basis(g1);
    let c2 = cyclic_basis(g2);
    c2.det().div(&c1.det())
}

pub fn are_conjugate(g1: &RegularElement, g2: &RegularElement) -> Result<bool> {
    if !are_stably_conjugate(g1, g2)? {
        return Ok(false);
    }
    match classify_centralizer(g1)? {
        CentralizerKind::Split => Ok(true),
        _ => is_norm_from(&conjugacy_invariant(g1, g2)?, g1.disc()),
    }
}

/// A rational class inside a stable class, with `κ` of its cocycle relative
/// to the base point.
#[derive(Clone, Debug)]
pub struct StableClassRep {
    pub element: RegularElement,
    pub kappa: i32,
    /// Coordinates of the class in `H¹(F, T) ≅ Z/2` (empty when split).
    pub class: Vec<i64>,
}

/// Representatives of the rational classes in the stable class of `g0`,
/// `g0` first. `κ` comes from `s = −1` on `U_E(1)`: the invariant
/// `det h ∈ F^×/N(E^×)` is sent to its valuation, a norm-zero cocharacter of
/// `U_E(1)`, and evaluated through the Tate–Nakayama presentation.
pub fn stable_class_reps(g0: &RegularElement) -> Result<Vec<StableClassRep>> {
    match classify_centralizer(g0)? {
        CentralizerKind::Split => Ok(vec![StableClassRep { element: g0.clone(), kappa: 1, class: Vec::new() }]),
        CentralizerKind::RamifiedElliptic => {
            Err(Error::Ramified("the centralizer splits over a ramified extension".into()))
        }
        CentralizerKind::UnramifiedElliptic => {
            let lattice = GaloisLattice::unitary_one();
            let kappa = kappa_character(&TorsionCharacter::parse("1/2")?, &lattice)?;
            let other = g0.conjugate_by(&d_matrix(g0.field()))?;
            let mut out = Vec::new();
            for g in [g0.clone(), other] {
                let inv = conjugacy_invariant(g0, &g)?;
                let v = inv.valuation().ok_or(Error::ZeroAtPrecision)?;
                let class = class_of(&[v], &lattice, &kappa.group)?;
                out.push(StableClassRep { kappa: kappa.sign(&class)?, element: g, class });
            }
            Ok(out)
        }
    }
}

/// Eigenvalue `λ` of a split element (the root `(tr + √disc)/2`) and an
/// eigenvector matrix `P` with `P⁻¹ g P = diag(λ, λ⁻¹)`.
pub fn diagonalize(g: &RegularElement) -> Result<(FieldElement, FMatrix)> {
    if classify_centralizer(g)? != CentralizerKind::Split {
        return Err(Error::Input("element is not split".into()));
    }
    let f = g.field();
    let half = f.from_int(2).inv()?;
    let root = sqrt(g.disc())?;
    let l1 = &(g.trace() + &root) * &half;
    let l2 = &(g.trace() - &root) * &half;
    let m = g.matrix();
    let eigvec = |l: &FieldElement| -> Vec<FieldElement> {
        let v = vec![m.get(0, 1).clone(), l - m.get(0, 0)];
        if v.iter().any(|e| !e.is_zero()) {
            v
        } else {
            vec![l - m.get(1, 1), m.get(1, 0).clone()]
        }
    };
    let (v1, v2) = (eigvec(&l1), eigvec(&l2));
    let p = FMatrix::new2(v1[0].clone(), v2[0].clone(), v1[1].clone(), v2[1].clone());
    Ok((l1, p))
}

/// Root values `α(γ₀) = λ/λ̄` and the normalization exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RootNormalization {
    /// `v(α − 1)`.
    pub d: i64,
    /// `−(v(α − 1) + v(α⁻¹ − 1))`: the product over both roots of
    /// `|α − 1|^{1/2}` is `q^{half_exponent/2}`.
    pub half_exponent: i64,
}

pub fn root_normalization(g: &RegularElement) -> Result<RootNormalization> {
    let f = g.field().clone();
    let (va, vb) = match classify_centralizer(g)? {
        CentralizerKind::Split => {
            let (l, _) = diagonalize(g)?;
            let alpha = &l * &l;
            let one = f.one();
            (val(&(&alpha - &one))?, val(&(&alpha.inv()? - &one))?)
        }
        CentralizerKind::UnramifiedElliptic => {
            // disc = u · s²
            let s = sqrt(&g.disc().div(&f.u())?)?;
            let half = f.from_int(2).inv()?;
            let lambda = QuadExtElement::new(g.trace() * &half, &s * &half);
            let alpha = lambda.mul(&lambda.conj().inv()?);
            let one = QuadExtElement::from_base(f.one());
            let v1 = alpha.sub(&one).valuation().ok_or(Error::NotStronglyRegular)?;
            let v2 = alpha.inv()?.sub(&one).valuation().ok_or(Error::NotStronglyRegular)?;
            (v1, v2)
        }
        CentralizerKind::RamifiedElliptic => {
            return Err(Error::Ramified("the centralizer splits over a ramified extension".into()))
        }
    };
    Ok(RootNormalization { d: va, half_exponent: -(va + vb) })
}

fn val(x: &FieldElement) -> Result<i64> {
    x.valuation().ok_or(Error::NotStronglyRegular)
}

/// `γ = (1 + y√u)/(1 − y√u) ∈ E¹`, with `v(b) = v(y)`.
pub fn cayley(y: &FieldElement) -> Result<QuadExtElement> {
    let f = y.field();
    let one = f.one();
    let uy2 = &(&f.u() * y) * y;
    let den = (&one - &uy2).inv()?;
    Ok(QuadExtElement::new(&(&one + &uy2) * &den, &(&f.from_int(2) * y) * &den))
}
