//! Brute-force fixed-point counts over a ball of the tree, used to
//! cross-check the search in `orbital`. Fixedness here is decided by
//! recomputing the Hermite form of `gL`, not by conjugating into `L`.

use super::lattice::Lattice;
use super::regular::{classify_centralizer, diagonalize, CentralizerKind, RegularElement};
use crate::error::{Error, Result};
use crate::local_field::{FMatrix, LocalField};

/// All vertices at tree distance at most `radius` from `O ⊕ O`, both types.
pub fn ball(field: &LocalField, radius: i64) -> Result<Vec<Lattice>> {
    let l0 = Lattice::standard(field);
    let q = field.q() as u32;
    let mut out = Vec::new();
    let amax = (radius + 1) / 2;
    for a in -amax..=amax + 1 {
        for c in [-a, 1 - a] {
            let lo = (a + c - radius).div_euclid(2) + i64::from((a + c - radius).rem_euclid(2) != 0);
            let width = (a - lo).max(0) as u32;
            let total = (q as u64).pow(width);
            for idx in 0..total {
                let mut digits = Vec::with_capacity(width as usize);
                let mut r = idx;
                for _ in 0..width {
                    digits.push((r % q as u64) as u32);
                    r /= q as u64;
                }
                let x = if width == 0 { field.zero() } else { field.from_digits(lo, &digits)? };
                let l = Lattice::raw(a, c, x)?;
                if l0.distance(&l)? <= radius {
                    out.push(l);
                }
            }
        }
    }
    Ok(out)
}

fn fixed_by(l: &Lattice, g: &FMatrix) -> Result<bool> {
    Ok(l.transform(g)? == *l)
}

/// Even vertices within `radius` of `O ⊕ O` fixed by an elliptic `g`.
pub fn oracle_elliptic_count(g: &RegularElement, radius: i64) -> Result<u64> {
    if classify_centralizer(g)? == CentralizerKind::Split {
        return Err(Error::Unsupported("oracle_elliptic_count needs an elliptic element".into()));
    }
    let mut n = 0;
    for l in ball(g.field(), radius)? {
        if l.parity() == 0 && fixed_by(&l, g.matrix())? {
            n += 1;
        }
    }
    Ok(n)
}

/// Windowed count for a split `g = P·D·P⁻¹`: vertices of the ball fixed by
/// `D` whose nearest apartment vertex is `ϖ^0` or `ϖ^1`, of even type after
/// applying `P`.
pub fn oracle_split_window(g: &RegularElement, radius: i64) -> Result<u64> {
    let (lambda, p) = diagonalize(g)?;
    let field = g.field();
    let dmat = FMatrix::diag(&[lambda.clone(), lambda.inv()?]);
    let shift = p.det().valuation().ok_or(Error::ZeroAtPrecision)?;
    let apartment: Vec<(i64, Lattice)> =
        (-radius - 2..=radius + 2).map(|n| (n, Lattice::apartment(field, n))).collect();
    let mut count = 0;
    for l in ball(field, radius)? {
        if (l.parity() + shift).rem_euclid(2) != 0 || !fixed_by(&l, &dmat)? {
            continue;
        }
        let mut best = (i64::MAX, 0);
        for (n, a) in &apartment {
            let d = l.distance(a)?;
            if d < best.0 {
                best = (d, *n);
            }
        }
        if best.1 == 0 || best.1 == 1 {
            count += 1;
        }
    }
    Ok(count)
}
