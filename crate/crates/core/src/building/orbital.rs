//! Orbital integrals of `SL(2)` as fixed-vertex counts, `κ`-orbital and
//! stable orbital integrals, and the identity `Λ_{G,H}(γ) = Λ^st_H(γ)`.

use std::collections::{HashSet, VecDeque};
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use super::lattice::{Lattice, LatticeKey};
use super::regular::{
    classify_centralizer, diagonalize, match_element, match_split, root_normalization, stable_class_reps,
    transfer_base_point, CentralizerKind, RegularElement, RootNormalization,
};
use crate::error::{Error, Result};
use crate::local_field::{FMatrix, FieldElement, LocalField, QuadExtElement};
use crate::value::QValue;

/// Safety cap on the search depth. The search stops when its frontier
/// empties; if the tree work outruns the field precision the lattice tests
/// fail with a precision error long before this cap.
pub fn default_radius(field: &LocalField) -> i64 {
    2 * field.precision() as i64 + 4
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountResult {
    /// Fixed vertices of `G(F)/K` (windowed for split elements).
    pub count: u64,
    /// The search frontier emptied before the radius bound.
    pub certified: bool,
    /// Largest distance from the seed of a fixed vertex; rerunning with
    /// this bound reproduces the count.
    pub depth: i64,
    /// Fixed vertices of both types visited.
    pub visited: u64,
}

impl CountResult {
    fn empty() -> Self {
        CountResult { count: 0, certified: true, depth: 0, visited: 0 }
    }
}

pub fn fixed_vertex_count(g: &RegularElement) -> Result<CountResult> {
    fixed_vertex_count_bounded(g, default_radius(g.field()))
}

pub fn fixed_vertex_count_bounded(g: &RegularElement, radius: i64) -> Result<CountResult> {
    match classify_centralizer(g)? {
        CentralizerKind::Split => split_window_count(g, radius),
        _ => elliptic_count(g, radius),
    }
}

/// A fixed vertex reached by steepest descent of the displacement from
/// `O ⊕ O`, or `None` when the descent stalls above zero.
pub fn find_fixed_vertex(g: &FMatrix, max_steps: i64) -> Result<Option<Lattice>> {
    let mut cur = Lattice::standard(g.field());
    let mut disp = cur.displacement(g)?;
    for _ in 0..=max_steps {
        if disp == 0 {
            return Ok(Some(cur));
        }
        let mut best: Option<(i64, Lattice)> = None;
        for n in cur.neighbors()? {
            let d = n.displacement(g)?;
            if best.as_ref().is_none_or(|(b, _)| d < *b) {
                best = Some((d, n));
            }
        }
        let (d, n) = best.expect("q + 1 neighbours");
        if d >= disp {
            return Ok(None);
        }
        cur = n;
        disp = d;
    }
    Ok(None)
}

/// Breadth-first search over the fixed subtree of `g` from `seeds`, never
/// entering `blocked`. Returns the visited fixed vertices and the result
/// skeleton (count left at zero).
fn fixed_subtree(
    g: &FMatrix,
    seeds: &[Lattice],
    blocked: &HashSet<LatticeKey>,
    radius: i64,
) -> Result<(Vec<Lattice>, CountResult)> {
    let mut seen: HashSet<LatticeKey> = seeds.iter().map(Lattice::key).collect();
    let mut queue: VecDeque<(Lattice, i64)> = seeds.iter().map(|l| (l.clone(), 0)).collect();
    let mut out = Vec::new();
    let mut res = CountResult { count: 0, certified: true, depth: 0, visited: 0 };
    while let Some((v, depth)) = queue.pop_front() {
        res.depth = res.depth.max(depth);
        out.push(v.clone());
        for n in v.neighbors()? {
            let key = n.key();
            if blocked.contains(&key) || seen.contains(&key) {
                continue;
            }
            if !n.is_fixed_by(g)? {
                continue;
            }
            if depth + 1 > radius {
                res.certified = false;
                continue;
            }
            seen.insert(key);
            queue.push_back((n, depth + 1));
        }
    }
    res.visited = out.len() as u64;
    Ok((out, res))
}

fn elliptic_count(g: &RegularElement, radius: i64) -> Result<CountResult> {
    if !g.trace().is_integral()? {
        return Ok(CountResult::empty());
    }
    let m = g.matrix();
    let Some(seed) = find_fixed_vertex(m, default_radius(g.field()))? else {
        return Ok(CountResult::empty());
    };
    let (verts, mut res) = fixed_subtree(m, &[seed], &HashSet::new(), radius)?;
    res.count = verts.iter().filter(|l| l.parity() == 0).count() as u64;
    Ok(res)
}

/// Split `g = P·diag(λ, λ⁻¹)·P⁻¹`: fixed vertices of the diagonal element
/// whose apartment projection lies in the window `{0, 1}`, counted when their
/// image under `P` is a vertex of `G(F)/K`.
fn split_window_count(g: &RegularElement, radius: i64) -> Result<CountResult> {
    let (lambda, p) = diagonalize(g)?;
    let field = g.field();
    if !lambda.is_unit() {
        return Ok(CountResult::empty());
    }
    let dmat = FMatrix::diag(&[lambda.clone(), lambda.inv()?]);
    let shift = p.det().valuation().ok_or(Error::ZeroAtPrecision)?;
    let seeds = [Lattice::apartment(field, 0), Lattice::apartment(field, 1)];
    let blocked: HashSet<LatticeKey> =
        [Lattice::apartment(field, -1).key(), Lattice::apartment(field, 2).key()].into_iter().collect();
    let (verts, mut res) = fixed_subtree(&dmat, &seeds, &blocked, radius)?;
    res.count = verts.iter().filter(|l| (l.parity() + shift).rem_euclid(2) == 0).count() as u64;
    Ok(res)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaMode {
    /// Weight each rational class by `κ`.
    Endoscopic,
    /// `κ ≡ 1`.
    Stable,
}

#[derive(Clone, Debug)]
pub struct ClassCount {
    pub element: RegularElement,
    pub kappa: i32,
    pub count: CountResult,
}

#[derive(Clone, Debug)]
pub struct OrbitalReport {
    pub kind: CentralizerKind,
    pub mode: KappaMode,
    pub classes: Vec<ClassCount>,
    pub normalization: RootNormalization,
    pub value: QValue,
}

impl OrbitalReport {
    pub fn weighted_sum(&self) -> i64 {
        self.classes.iter().map(|c| c.kappa as i64 * c.count.count as i64).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind,
            "mode": self.mode,
            "d": self.normalization.d,
            "half_exponent": self.normalization.half_exponent,
            "classes": self.classes.iter().map(|c| json!({
                "representative": c.element.to_json(),
                "kappa": c.kappa,
                "fixed_count": c.count.count,
                "certified": c.count.certified,
                "depth": c.count.depth,
            })).collect::<Vec<_>>(),
            "value": self.value,
        })
    }
}

pub fn kappa_orbital(g0: &RegularElement, mode: KappaMode) -> Result<OrbitalReport> {
    kappa_orbital_bounded(g0, mode, default_radius(g0.field()))
}

/// `Λ = (∏_α |α(γ₀) − 1|^{1/2}) · Σ_{γ'} κ(γ')·#{fixed vertices of γ'}` with
/// `vol(K) = vol(K_T) = 1`.
pub fn kappa_orbital_bounded(g0: &RegularElement, mode: KappaMode, radius: i64) -> Result<OrbitalReport> {
    let kind = classify_centralizer(g0)?;
    let reps = stable_class_reps(g0)?;
    let normalization = root_normalization(g0)?;
    let mut classes = Vec::new();
    for r in reps {
        let count = fixed_vertex_count_bounded(&r.element, radius)?;
        let kappa = match mode {
            KappaMode::Endoscopic => r.kappa,
            KappaMode::Stable => 1,
        };
        classes.push(ClassCount { element: r.element, kappa, count });
    }
    let q = g0.field().q();
    let sum: i64 = classes.iter().map(|c| c.kappa as i64 * c.count.count as i64).sum();
    let value = QValue::scaled(q, sum, normalization.half_exponent);
    Ok(OrbitalReport { kind, mode, classes, normalization, value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HKind {
    /// The elliptic endoscopic torus `U_E(1)`.
    #[serde(rename = "UE1")]
    UE1,
    /// The split torus `G_m`.
    #[serde(rename = "Gm")]
    Gm,
    /// `H = G = SL(2)`, `κ` trivial.
    #[serde(rename = "G")]
    G,
}

impl FromStr for HKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "UE1" | "ue1" | "U_E(1)" => Ok(HKind::UE1),
            "Gm" | "gm" | "G_m" => Ok(HKind::Gm),
            "G" | "g" | "SL2" => Ok(HKind::G),
            other => Err(Error::Unsupported(format!("endoscopic group `{other}`"))),
        }
    }
}

/// An element of `T_H(F)`: `a + b√u ∈ E^×` or `γ ∈ F^×`.
#[derive(Clone, Debug)]
pub enum HElement {
    Elliptic(QuadExtElement),
    Split(FieldElement),
}

impl HElement {
    pub fn field(&self) -> &LocalField {
        match self {
            HElement::Elliptic(x) => x.field(),
            HElement::Split(x) => x.field(),
        }
    }

    fn is_unit(&self) -> bool {
        match self {
            HElement::Elliptic(x) => x.valuation() == Some(0),
            HElement::Split(x) => x.is_unit(),
        }
    }
}

/// The element of `G` that `γ` is matched to in the pipeline for `h`.
pub fn matched_element(gamma: &HElement, h: HKind) -> Result<RegularElement> {
    match (gamma, h) {
        (HElement::Elliptic(x), HKind::UE1) => transfer_base_point(x),
        (HElement::Elliptic(x), HKind::G) => match_element(x),
        (HElement::Split(x), HKind::Gm | HKind::G) => match_split(x),
        (HElement::Split(_), HKind::UE1) => Err(Error::Input("U_E(1) needs γ = a + b√u".into())),
        (HElement::Elliptic(_), HKind::Gm) => Err(Error::Input("G_m needs γ ∈ F^×".into())),
    }
}

/// `Λ^st_H(γ)`. For the tori `U_E(1)` and `G_m` there are no roots, the
/// stable class collapses to a point and the integral is the characteristic
/// function of the maximal compact subgroup.
pub fn stable_orbital_h(gamma: &HElement, h: HKind) -> Result<QValue> {
    let q = gamma.field().q();
    match h {
        HKind::G => Ok(kappa_orbital(&matched_element(gamma, h)?, KappaMode::Stable)?.value),
        HKind::UE1 | HKind::Gm => {
            matched_element(gamma, h)?;
            Ok(if gamma.is_unit() { QValue::one(q) } else { QValue::zero(q) })
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlReport {
    pub h: HKind,
    pub lhs: OrbitalReport,
    pub rhs: QValue,
    pub equal: bool,
}

impl FlReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "H": self.h,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs,
            "equal": self.equal,
        })
    }
}

pub fn fl_check(gamma: &HElement, h: HKind) -> Result<FlReport> {
    fl_check_bounded(gamma, h, default_radius(gamma.field()))
}

pub fn fl_check_bounded(gamma: &HElement, h: HKind, radius: i64) -> Result<FlReport> {
    let g0 = matched_element(gamma, h)?;
    let mode = if h == HKind::G { KappaMode::Stable } else { KappaMode::Endoscopic };
    let lhs = kappa_orbital_bounded(&g0, mode, radius)?;
    let rhs = match h {
        HKind::G => kappa_orbital_bounded(&g0, KappaMode::Stable, radius)?.value,
        _ => stable_orbital_h(gamma, h)?,
    };
    let equal = lhs.value == rhs;
    Ok(FlReport { h, lhs, rhs, equal })
}
