//! Acceptance criteria 1–13, one line each.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use endoscopy::building::{
    cayley, fixed_vertex_count_bounded, default_radius, fl_check, match_split, oracle_elliptic_count,
    oracle_split_window, root_normalization, stable_class_reps, transfer_base_point, are_conjugate,
    are_stably_conjugate, HElement, HKind, RegularElement,
};
use endoscopy::cli::jordan_samples;
use endoscopy::endoscopy::{
    characters, check_endoscopic, enumerate_endoscopic, is_elliptic, unitary_elliptic, Rejection, TorsionCharacter,
    Verdict, DEFAULT_ORDER_BOUND,
};
use endoscopy::linalg::IntMatrix;
use endoscopy::local_field::{FieldElement, LocalField};
use endoscopy::root_datum::{builtin, weyl_group, Family, RootDatum};
use endoscopy::tori_cohomology::{h1, kappa_character, GaloisLattice};
use endoscopy::value::QValue;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn within(t: Instant, limit: Duration) -> Result<String, String> {
    let el = t.elapsed();
    ensure(el < limit, format!("took {el:.2?}, limit {limit:?}"))?;
    Ok(format!("{el:.2?}"))
}

fn torus(twist: i64) -> RootDatum {
    RootDatum::new(vec![], vec![], IntMatrix::scalar(1, twist))
}

fn c1() -> Check {
    let t = Instant::now();
    let sl2 = builtin(Family::SL2).map_err(e)?;
    let list = enumerate_endoscopic(&sl2, DEFAULT_ORDER_BOUND).map_err(e)?;
    let time = within(t, Duration::from_secs(1))?;
    let got: Vec<RootDatum> = list.iter().map(|d| RootDatum { name: None, ..d.datum_h.clone() }).collect();
    let want = vec![
        RootDatum::new(vec![vec![2], vec![-2]], vec![vec![1], vec![-1]], IntMatrix::identity(1)),
        torus(1),
        torus(-1),
    ];
    for w in &want {
        ensure(got.iter().any(|g| g.same_data(w)), format!("missing {w:?}"))?;
    }
    ensure(got.len() == 3, format!("{} classes", got.len()))?;
    Ok(format!("3 classes in {time}"))
}

fn c2() -> Check {
    let pgl2 = builtin(Family::PGL2).map_err(e)?;
    let list = enumerate_endoscopic(&pgl2, DEFAULT_ORDER_BOUND).map_err(e)?;
    ensure(list.len() == 2, format!("{} classes", list.len()))?;
    let weyl = weyl_group(&pgl2).map_err(e)?;
    let mut rejected = 0;
    for w in weyl.elements.iter().filter(|w| !w.is_identity()) {
        for s in characters(1, 2) {
            match check_endoscopic(&s, w, &pgl2).map_err(e)? {
                Verdict::Rejected(Rejection::NoSimpleSystem) => rejected += 1,
                Verdict::Rejected(r) => return Err(format!("s = {s}: rejected with `{r}`")),
                Verdict::Accepted(_) => return Err(format!("s = {s}, w = {w:?} accepted")),
            }
        }
    }
    let reason = Rejection::NoSimpleSystem.to_string();
    ensure(reason == "σ_H fixes no simple system", reason)?;
    Ok(format!("2 classes; {rejected} nontrivial-w candidates rejected: σ_H fixes no simple system"))
}

fn c3() -> Check {
    let sl2 = builtin(Family::SL2).map_err(e)?;
    let mut flags = Vec::new();
    for d in enumerate_endoscopic(&sl2, DEFAULT_ORDER_BOUND).map_err(e)? {
        let name = if !d.datum_h.roots.is_empty() {
            "SL(2)"
        } else if d.datum_h.twist.is_identity() {
            "G_m"
        } else {
            "U_E(1)"
        };
        flags.push((name, is_elliptic(&d, &sl2).map_err(e)?));
    }
    flags.sort();
    let want = vec![("G_m", false), ("SL(2)", true), ("U_E(1)", true)];
    ensure(flags == want, format!("{flags:?}"))?;
    Ok("SL(2): true, U_E(1): true, G_m: false".into())
}

/// Independent enumeration for `U(n)`: `X* = Zⁿ`, `σ(e_i) = −e_{n+1−i}`,
/// `W = S_n`. For `s ∈ {0, ½}ⁿ` and a permutation `w`, `σ_H = w∘σ` is `−1`
/// times the permutation `π(i) = w(n+1−i)`.
fn brute_unitary(n: usize) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for perm in permutations(n) {
        let pi: Vec<usize> = (0..n).map(|i| perm[n - 1 - i]).collect();
        for mask in 0..(1u32 << n) {
            let s: Vec<u32> = (0..n).map(|i| (mask >> i) & 1).collect();
            // σ_H-invariance of s (signs vanish mod 1 on {0, ½})
            if (0..n).any(|i| s[pi[i]] != s[i]) {
                continue;
            }
            // a positive system on each block reversed by π
            let blocks: Vec<Vec<usize>> = [0, 1].iter().map(|&b| (0..n).filter(|&i| s[i] == b).collect()).collect();
            let reversible = blocks.iter().all(|blk| {
                permutations(blk.len()).into_iter().any(|ord| {
                    let rank: Vec<usize> = {
                        let mut r = vec![0; n];
                        for (pos, &k) in ord.iter().enumerate() {
                            r[blk[k]] = pos;
                        }
                        r
                    };
                    blk.iter().all(|&i| blk.iter().all(|&j| rank[i] >= rank[j] || rank[pi[j]] < rank[pi[i]]))
                })
            });
            if !reversible {
                continue;
            }
            // ellipticity: W_H-fixed vectors of the sum-zero hyperplane are
            // constant on blocks; none may be fixed by σ_H
            let (a, b) = (blocks[0].len() as i64, blocks[1].len() as i64);
            let candidate: Option<Vec<i64>> = if a > 0 && b > 0 {
                Some((0..n).map(|i| if s[i] == 0 { b } else { -a }).collect())
            } else {
                None
            };
            if let Some(v) = candidate {
                let mut sv = vec![0; n];
                for i in 0..n {
                    sv[pi[i]] = -v[i];
                }
                if sv == v {
                    continue;
                }
            }
            out.insert((a.max(b) as usize, a.min(b) as usize));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn c4() -> Check {
    let t = Instant::now();
    let u2 = unitary_elliptic(2).map_err(e)?;
    let u3 = unitary_elliptic(3).map_err(e)?;
    let time = within(t, Duration::from_secs(10))?;
    ensure(u2 == vec![(2, 0), (1, 1)], format!("U(2): {u2:?}"))?;
    ensure(u3 == vec![(3, 0), (2, 1)], format!("U(3): {u3:?}"))?;
    for (n, got) in [(2, &u2), (3, &u3)] {
        let brute = brute_unitary(n);
        let got: BTreeSet<_> = got.iter().copied().collect();
        ensure(brute == got, format!("U({n}) brute force {brute:?}"))?;
    }
    Ok(format!("U(2) = {u2:?}, U(3) = {u3:?}, brute force agrees, {time}"))
}

/// `|ker N / B|` by reduction modulo `|Γ|`, with kernel vectors found in a box.
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
                let y = red(&x.iter().zip(g).map(|(a, b)| a + b).collect::<Vec<_>>());
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set.len()
    };
    span(&kernel_pts) / span(&l.boundary_generators())
}

fn c5() -> Check {
    let ue1 = GaloisLattice::unitary_one();
    let trivial = GaloisLattice::new(1, vec![]).map_err(e)?;
    let swap = GaloisLattice::cyclic(IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).map_err(e)?).map_err(e)?;
    let mut orders = Vec::new();
    for (name, l, want) in [("U_E(1)", &ue1, vec![2]), ("trivial", &trivial, vec![]), ("swap", &swap, vec![])] {
        let g = h1(l).map_err(e)?;
        ensure(g.invariant_factors == want, format!("{name}: {:?}", g.invariant_factors))?;
        let oracle = coset_count(l);
        ensure(g.order() as usize == oracle, format!("{name}: oracle {oracle}"))?;
        orders.push(format!("{name} {oracle}"));
    }
    Ok(format!("Z/2, 0, 0; coset oracle orders {}", orders.join(", ")))
}

fn c6() -> Check {
    let ue1 = GaloisLattice::unitary_one();
    let k = kappa_character(&TorsionCharacter::parse("1/2").map_err(e)?, &ue1).map_err(e)?;
    ensure(k.group.invariant_factors == vec![2], "H¹ is not Z/2")?;
    ensure(!k.is_trivial(), "κ is trivial")?;
    ensure(k.sign(&[1]).map_err(e)? == -1 && k.sign(&[0]).map_err(e)? == 1, "κ is not ±1")?;
    Ok("κ(1) = −1 on Z/2".into())
}

fn c7() -> Check {
    for p in [3, 5] {
        let f = LocalField::mixed(p, 24).map_err(e)?;
        let g1 = RegularElement::parse("[[1+p,1],[2*p+p^2,1+p]]", &f).map_err(e)?;
        let g2 = RegularElement::parse("[[1+p,u^-1],[(2*p+p^2)*u,1+p]]", &f).map_err(e)?;
        ensure(are_stably_conjugate(&g1, &g2).map_err(e)?, format!("p = {p}: not stably conjugate"))?;
        ensure(!are_conjugate(&g1, &g2).map_err(e)?, format!("p = {p}: conjugate"))?;
    }
    Ok("p = 3, 5: stable = true, rational = false".into())
}

fn c8() -> Check {
    let mut lines = Vec::new();
    for f in [LocalField::mixed(3, 24).map_err(e)?, LocalField::equal_char(9, 24).map_err(e)?] {
        let (passed, failures) = jordan_samples(&f, 50, 8).map_err(e)?;
        ensure(failures.is_empty(), failures.join("; "))?;
        lines.push(format!("{} {passed}/50", f.describe()));
    }
    Ok(lines.join(", "))
}

/// `γ = cayley(y)` for the elliptic family at depth `d`.
fn elliptic_family(f: &LocalField, d: i64) -> Vec<FieldElement> {
    vec![f.pi_pow(d), &f.pi_pow(d) + &f.pi_pow(d + 1), &f.pi_pow(d) * &f.from_int(-1)]
}

fn split_family(f: &LocalField, d: i64) -> Vec<FieldElement> {
    let one = f.one();
    if d == 0 {
        // residue outside {±1}
        return if f.q() > 3 { vec![f.teichmuller(2), &f.teichmuller(2) + &f.uniformizer()] } else { vec![] };
    }
    vec![&one + &f.pi_pow(d), &(&one + &f.pi_pow(d)) * &f.from_int(-1), &one - &f.pi_pow(d + 1).shift(-1)]
}

/// Elements whose counts criterion 12 re-checks.
struct Counted {
    g: RegularElement,
    count: u64,
}

fn c9(counted: &mut Vec<Counted>) -> Check {
    let t = Instant::now();
    let mut n = 0;
    for q in [3u64, 5] {
        let f = LocalField::equal_char(q, 24).map_err(e)?;
        for d in 1..=3i64 {
            for y in elliptic_family(&f, d) {
                let gamma = cayley(&y).map_err(e)?;
                let r = fl_check(&HElement::Elliptic(gamma.clone()), HKind::UE1).map_err(e)?;
                let one = QValue::one(q);
                ensure(r.equal && r.rhs == one && r.lhs.value == one, format!("q={q} d={d}: {} vs {}", r.lhs.value, r.rhs))?;
                ensure(r.lhs.normalization.d == d, format!("q={q}: d = {}", r.lhs.normalization.d))?;
                for c in &r.lhs.classes {
                    let oracle = oracle_elliptic_count(&c.element, d + 3).map_err(e)?;
                    ensure(c.count.certified, format!("q={q} d={d}: search not certified"))?;
                    ensure(oracle == c.count.count, format!("q={q} d={d}: oracle {oracle} vs {}", c.count.count))?;
                    counted.push(Counted { g: c.element.clone(), count: c.count.count });
                    n += 1;
                }
            }
        }
    }
    let time = within(t, Duration::from_secs(60))?;
    Ok(format!("both sides 1; {n} class counts match the oracle; {time}"))
}

fn c10(counted: &mut Vec<Counted>) -> Check {
    let mut n = 0;
    for q in [3u64, 5] {
        let f = LocalField::equal_char(q, 24).map_err(e)?;
        for d in 0..=3i64 {
            for gamma in split_family(&f, d) {
                let r = fl_check(&HElement::Split(gamma.clone()), HKind::Gm).map_err(e)?;
                let one = QValue::one(q);
                ensure(r.equal && r.rhs == one && r.lhs.value == one, format!("q={q} d={d}: {}", r.lhs.value))?;
                let g = match_split(&gamma).map_err(e)?;
                let c = &r.lhs.classes[0];
                let oracle = oracle_split_window(&g, d + 3).map_err(e)?;
                ensure(oracle == c.count.count, format!("q={q} d={d}: oracle {oracle} vs {}", c.count.count))?;
                ensure(c.count.count == q.pow(d as u32), format!("q={q} d={d}: count {}", c.count.count))?;
                counted.push(Counted { g, count: c.count.count });
                n += 1;
            }
        }
    }
    Ok(format!("both sides 1; {n} windowed counts match the oracle"))
}

fn c11() -> Check {
    let mut n = 0;
    for f in [LocalField::equal_char(3, 24).map_err(e)?, LocalField::mixed(5, 24).map_err(e)?] {
        for k in [-3i64, -1, 1, 2] {
            for unit in [f.one(), f.from_int(2), &f.one() + &f.uniformizer()] {
                let gamma = &f.pi_pow(k) * &unit;
                for h in [HKind::Gm, HKind::G] {
                    let r = fl_check(&HElement::Split(gamma.clone()), h).map_err(e)?;
                    ensure(r.lhs.value.is_zero() && r.rhs.is_zero(), format!("v = {k}, H = {h:?}: {}", r.lhs.value))?;
                    n += 1;
                }
            }
        }
    }
    Ok(format!("{n} non-unit γ give 0 = 0"))
}

fn c12(counted: &[Counted]) -> Check {
    for c in counted {
        let first = fixed_vertex_count_bounded(&c.g, default_radius(c.g.field())).map_err(e)?;
        for bound in [first.depth, first.depth + 2] {
            let again = fixed_vertex_count_bounded(&c.g, bound).map_err(e)?;
            ensure(
                again.count == c.count && again.certified,
                format!("{:?} at bound {bound}: {} → {}", c.g.matrix().to_rows(), c.count, again.count),
            )?;
        }
    }
    Ok(format!("{} counts unchanged at bound and bound + 2", counted.len()))
}

fn c13() -> Check {
    let mixed = LocalField::mixed(3, 24).map_err(e)?;
    let equal = LocalField::equal_char(3, 24).map_err(e)?;
    let mut n = 0;
    for d in 1..=2i64 {
        for (ym, ye) in elliptic_family(&mixed, d).into_iter().zip(elliptic_family(&equal, d)) {
            let counts = |y: &FieldElement| -> Result<Vec<u64>, String> {
                let g0 = transfer_base_point(&cayley(y).map_err(e)?).map_err(e)?;
                ensure(root_normalization(&g0).map_err(e)?.d == d, "depth mismatch")?;
                stable_class_reps(&g0)
                    .map_err(e)?
                    .iter()
                    .map(|r| fixed_vertex_count_bounded(&r.element, default_radius(y.field())).map(|c| c.count))
                    .collect::<Result<_, _>>()
                    .map_err(e)
            };
            let (a, b) = (counts(&ym)?, counts(&ye)?);
            ensure(a == b, format!("d={d}: Q_3 {a:?} vs F_3((t)) {b:?}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} digit patterns agree between Q_3 and F_3((t))"))
}

fn main() {
    let mut counted = Vec::new();
    let results: Vec<(usize, Check)> = vec![
        (1, c1()),
        (2, c2()),
        (3, c3()),
        (4, c4()),
        (5, c5()),
        (6, c6()),
        (7, c7()),
        (8, c8()),
        (9, c9(&mut counted)),
        (10, c10(&mut counted)),
        (11, c11()),
        (12, c12(&counted)),
        (13, c13()),
    ];
    let mut failed = 0;
    for (i, r) in &results {
        match r {
            Ok(msg) => println!("criterion {i:>2}: PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {i:>2}: FAIL  {msg}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
