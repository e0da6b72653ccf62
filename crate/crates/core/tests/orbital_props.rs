use endoscopy::building::{
    cayley, d_matrix, fixed_vertex_count, kappa_orbital, match_element, match_split, stable_class_reps,
    transfer_base_point, KappaMode,
};
use endoscopy::local_field::{FMatrix, FieldElement, LocalField};
use proptest::prelude::*;

fn elt(f: &LocalField, v: i64, raw: &[u32]) -> FieldElement {
    let b = f.p() as u32;
    let mut d: Vec<u32> = raw.iter().map(|x| x % b).collect();
    d[0] = 1 + d[0] % (b - 1);
    f.from_digits(v, &d).unwrap()
}

fn digits(n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(any::<u32>(), n)
}

/// An element of `SL(2, O)`.
fn random_k(f: &LocalField, a: &[u32], s: &[u32], t: &[u32], tv: i64) -> FMatrix {
    let e = elt(f, 0, a);
    let upper = FMatrix::new2(f.one(), elt(f, 0, s), f.zero(), f.one());
    let lower = FMatrix::new2(f.one(), f.zero(), elt(f, tv, t), f.one());
    upper.mul(&FMatrix::diag(&[e.clone(), e.inv().unwrap()])).mul(&lower)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn counts_are_conjugation_invariant(
        q in prop::sample::select(vec![3u64, 5]),
        d in 1i64..3,
        y in digits(6), a in digits(6), s in digits(6), t in digits(6), tv in 0i64..2,
        split in any::<bool>(),
    ) {
        let f = LocalField::equal_char(q, 24).unwrap();
        let g = if split {
            match_split(&(&f.one() + &elt(&f, d, &y))).unwrap()
        } else {
            transfer_base_point(&cayley(&elt(&f, d, &y)).unwrap()).unwrap()
        };
        let k = random_k(&f, &a, &s, &t, tv);
        let gk = g.conjugate_by(&k).unwrap();
        prop_assert_eq!(fixed_vertex_count(&g).unwrap().count, fixed_vertex_count(&gk).unwrap().count);
    }

    #[test]
    fn value_is_independent_of_precision(q in prop::sample::select(vec![3u64, 5]), d in 1i64..4, y in digits(8)) {
        let values: Vec<_> = [d as usize + 8, 24]
            .iter()
            .map(|&n| {
                let f = LocalField::equal_char(q, n).unwrap();
                let g0 = transfer_base_point(&cayley(&elt(&f, d, &y)).unwrap()).unwrap();
                kappa_orbital(&g0, KappaMode::Endoscopic).unwrap().value
            })
            .collect();
        prop_assert_eq!(&values[0], &values[1]);
    }

    #[test]
    fn mixed_and_equal_counts_agree(d in 1i64..3, y in digits(10)) {
        let counts: Vec<Vec<u64>> = [LocalField::mixed(3, 24).unwrap(), LocalField::equal_char(3, 24).unwrap()]
            .iter()
            .map(|f| {
                let g0 = transfer_base_point(&cayley(&elt(f, d, &y)).unwrap()).unwrap();
                stable_class_reps(&g0).unwrap().iter().map(|r| fixed_vertex_count(&r.element).unwrap().count).collect()
            })
            .collect();
        prop_assert_eq!(&counts[0], &counts[1]);
    }

    #[test]
    fn swapping_base_point_negates_the_sum(q in prop::sample::select(vec![3u64, 5]), d in 1i64..4, y in digits(6)) {
        let f = LocalField::equal_char(q, 24).unwrap();
        let g0 = match_element(&cayley(&elt(&f, d, &y)).unwrap()).unwrap();
        let g1 = g0.conjugate_by(&d_matrix(&f)).unwrap();
        let a = kappa_orbital(&g0, KappaMode::Endoscopic).unwrap();
        let b = kappa_orbital(&g1, KappaMode::Endoscopic).unwrap();
        prop_assert_eq!(a.weighted_sum(), -b.weighted_sum());
        prop_assert_eq!(a.weighted_sum().abs(), q.pow(d as u32) as i64);
    }
}
