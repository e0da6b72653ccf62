//! Topological Jordan decomposition `x = x_s · x_u`, `x_s = lim x^{q^n}`.

use num_integer::Integer;

use super::element::FieldElement;
use super::matrix::FMatrix;
use crate::error::{Error, Result};

pub fn jordan_decompose(x: &FieldElement) -> Result<(FieldElement, FieldElement)> {
    let v = x.valuation().ok_or(Error::ZeroAtPrecision)?;
    if v != 0 {
        return Err(Error::NotUnit(v));
    }
    let field = x.field();
    let limit = field.precision() + 5;
    let q = field.q();
    let mut y = x.clone();
    for _ in 0..limit {
        let next = y.pow_u(q);
        if next.same_at_precision(&y) {
            let xu = x * &y.inv()?;
            return Ok((y, xu));
        }
        y = next;
    }
    Err(Error::NoConvergence(limit))
}

/// Matrix version: iterates `M ↦ M^{q^L}`, `L = lcm(1..n)`, so that the
/// semisimple part of the reduction is fixed at every step.
pub fn jordan_decompose_matrix(m: &FMatrix) -> Result<(FMatrix, FMatrix)> {
    if !m.is_integral()? {
        return Err(Error::Input("matrix entries must be integral".into()));
    }
    let det = m.det();
    let v = det.valuation().ok_or(Error::ZeroAtPrecision)?;
    if v != 0 {
        return Err(Error::NotUnit(v));
    }
    let field = m.field();
    let n = m.size() as u64;
    let l = (1..=n).fold(1u64, |acc, k| acc.lcm(&k));
    let limit = field.precision() + 5;
    let q = field.q();
    let mut y = m.clone();
    for _ in 0..limit {
        let next = (0..l).fold(y.clone(), |acc, _| acc.pow_u(q));
        if next.same_at_precision(&y) {
            let xu = y.inverse()?.mul(m);
            return Ok((y, xu));
        }
        y = next;
    }
    Err(Error::NoConvergence(limit))
}
