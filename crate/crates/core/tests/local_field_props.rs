use endoscopy::local_field::{
    hilbert_symbol, is_norm, jordan_decompose, jordan_decompose_matrix, FMatrix, FieldElement, FieldKind, LocalField,
    QuadExtElement,
};
use proptest::prelude::*;

const N: usize = 16;

fn field(idx: usize) -> LocalField {
    match idx {
        0 => LocalField::mixed(3, N).unwrap(),
        1 => LocalField::mixed(5, N).unwrap(),
        2 => LocalField::equal_char(5, N).unwrap(),
        _ => LocalField::equal_char(9, N).unwrap(),
    }
}

fn digit_bound(f: &LocalField) -> u32 {
    match f.kind() {
        FieldKind::Mixed => f.p() as u32,
        FieldKind::EqualChar => f.q() as u32,
    }
}

fn elt(f: &LocalField, v: i64, raw: &[u32]) -> FieldElement {
    let b = digit_bound(f);
    let mut d: Vec<u32> = raw.iter().map(|x| x % b).collect();
    d[0] = 1 + d[0] % (b - 1);
    f.from_digits(v, &d).unwrap()
}

fn digits() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(any::<u32>(), N)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(fi in 0usize..4, va in 0i64..3, vb in 0i64..3, vc in 0i64..3, a in digits(), b in digits(), c in digits()) {
        let f = field(fi);
        let (x, y, z) = (elt(&f, va, &a), elt(&f, vb, &b), elt(&f, vc, &c));
        prop_assert!((&x + &y).same_at_precision(&(&y + &x)));
        prop_assert!((&x * &y).same_at_precision(&(&y * &x)));
        prop_assert!((&(&x + &y) + &z).same_at_precision(&(&x + &(&y + &z))));
        prop_assert!((&(&x * &y) * &z).same_at_precision(&(&x * &(&y * &z))));
        prop_assert!((&x * &(&y + &z)).same_at_precision(&(&(&x * &y) + &(&x * &z))));
    }

    #[test]
    fn inverses_and_valuations(fi in 0usize..4, va in -3i64..4, vb in -3i64..4, a in digits(), b in digits()) {
        let f = field(fi);
        let (x, y) = (elt(&f, va, &a), elt(&f, vb, &b));
        prop_assert!((&x * &x.inv().unwrap()).same_at_precision(&f.one()));
        prop_assert_eq!((&x * &y).valuation(), Some(va + vb));
    }

    #[test]
    fn norm_is_multiplicative(fi in 0usize..4, a in digits(), b in digits(), c in digits(), d in digits(), v in 0i64..3) {
        let f = field(fi);
        let xi = QuadExtElement::new(elt(&f, 0, &a), elt(&f, v, &b));
        let eta = QuadExtElement::new(elt(&f, v, &c), elt(&f, 0, &d));
        prop_assert!(xi.mul(&eta).norm().same_at_precision(&(&xi.norm() * &eta.norm())));
    }

    #[test]
    fn jordan_scalar(fi in 0usize..4, a in digits()) {
        let f = field(fi);
        let x = elt(&f, 0, &a);
        let (s, u) = jordan_decompose(&x).unwrap();
        prop_assert!((&s * &u).same_at_precision(&x));
        prop_assert!((&s * &u).same_at_precision(&(&u * &s)));
        prop_assert!(s.pow_u(f.q()).same_at_precision(&s));
        prop_assert!(u.agrees_with(&f.one(), 1).unwrap());
    }

    #[test]
    fn jordan_matrix(fi in 0usize..4, a in digits(), x in digits(), y in digits()) {
        let f = field(fi);
        // k = [[1, s], [0, 1]]·diag(e, e⁻¹)·[[1, 0], [t, 1]] with units e and integral s, t
        let e = elt(&f, 0, &a);
        let s = elt(&f, 0, &x);
        let t = elt(&f, 1, &y);
        let upper = FMatrix::new2(f.one(), s, f.zero(), f.one());
        let lower = FMatrix::new2(f.one(), f.zero(), t, f.one());
        let m = upper.mul(&FMatrix::diag(&[e.clone(), e.inv().unwrap()])).mul(&lower);
        let (ms, mu) = jordan_decompose_matrix(&m).unwrap();
        prop_assert!(ms.mul(&mu).same_at_precision(&m));
        prop_assert!(ms.mul(&mu).same_at_precision(&mu.mul(&ms)));
    }
}

/// `x` is a norm from `E` iff `x ≡ a² − u b²` to one digit past `v(x)` for
/// some `a, b ∈ ϖ^{⌊v/2⌋}·{residues}` (Hensel); searched exhaustively.
fn brute_is_norm(x: &FieldElement) -> bool {
    let f = x.field();
    let v = x.valuation().unwrap();
    let k = v.div_euclid(2);
    let b = digit_bound(f);
    let u = f.u();
    for a0 in 0..b {
        for b0 in 0..b {
            if a0 == 0 && b0 == 0 {
                continue;
            }
            let a = f.from_digits(k, &[a0]).unwrap();
            let bb = f.from_digits(k, &[b0]).unwrap();
            let n = &(&a * &a) - &(&(&u * &bb) * &bb);
            if n.valuation() == Some(v) && n.agrees_with(x, v + 1).unwrap() {
                return true;
            }
        }
    }
    false
}

#[test]
fn is_norm_matches_brute_force() {
    for f in [LocalField::mixed(3, N).unwrap(), LocalField::mixed(5, N).unwrap(), LocalField::equal_char(3, N).unwrap(), LocalField::equal_char(5, N).unwrap()] {
        let b = f.q() as u32;
        for v in -3..=3 {
            for r0 in 1..b {
                for r1 in 0..b {
                    let x = f.from_digits(v, &[r0, r1]).unwrap();
                    assert_eq!(is_norm(&x).unwrap(), brute_is_norm(&x), "{x}");
                }
            }
        }
    }
}

#[test]
fn hilbert_symbol_is_symmetric_and_bimultiplicative() {
    let f = LocalField::mixed(5, N).unwrap();
    let samples: Vec<FieldElement> = (0..3)
        .flat_map(|v| (1..5u32).map(move |r| (v, r)))
        .map(|(v, r)| f.from_digits(v, &[r, 1]).unwrap())
        .collect();
    for a in &samples {
        for b in &samples {
            let ab = hilbert_symbol(a, b).unwrap();
            assert_eq!(ab, hilbert_symbol(b, a).unwrap());
            for c in &samples {
                assert_eq!(hilbert_symbol(&(a * c), b).unwrap(), ab * hilbert_symbol(c, b).unwrap());
            }
        }
    }
}
