use std::collections::HashSet;

use proptest::prelude::*;
use torus_split::signedperm::gf::Gf;
use torus_split::signedperm::ortho::{det, identity, mat_mul, FMatrix};
use torus_split::signedperm::{
    centralizer_generators, centralizer_order, cycle_type, generated_group, spinor_norm,
    BlockModel, CycleEntry, CycleType, Factorization, MonomialOrtho, QuadSpace, SignedPerm,
    SpinorClass,
};
use torus_split::{torus, IntMatrix};

/// Euler's criterion on a prime field, written out independently.
fn is_square_mod_p(a: u64, p: u64) -> bool {
    let mut acc = 1u64;
    let mut b = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc == 1
}

fn perm_from_seed(n: usize, seed: &[u32]) -> SignedPerm {
    let mut pool: Vec<i32> = (1..=n as i32).collect();
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let pick = pool.remove(seed[2 * i] as usize % pool.len());
        images.push(if seed[2 * i + 1].is_multiple_of(2) {
            pick
        } else {
            -pick
        });
    }
    SignedPerm::new(images).unwrap()
}

fn monomial(field: &Gf, n: usize, seed: &[u32]) -> MonomialOrtho {
    let phi = perm_from_seed(n, seed);
    let scalars: Vec<u64> = (0..n)
        .map(|i| 1 + seed[2 * n + i] as u64 % (field.size() - 1))
        .collect();
    let eps = if seed[3 * n].is_multiple_of(2) { 1 } else { -1 };
    MonomialOrtho::from_signed(field, &phi, &scalars, eps).unwrap()
}

fn reflection(space: &QuadSpace, v: &[u64]) -> FMatrix {
    let f = space.field();
    let d = space.dim();
    let qv = space.quad(v);
    let mut m = identity(d);
    for j in 0..d {
        let mut e = vec![0; d];
        e[j] = 1;
        let c = f.div(space.bilinear(&e, v), qv);
        for i in 0..d {
            m[i][j] = f.sub(m[i][j], f.mul(c, v[i]));
        }
    }
    m
}

fn seed_strategy() -> impl Strategy<Value = (usize, u64, Vec<u32>)> {
    (
        1usize..=4,
        prop::sample::select(vec![3u64, 5, 7, 9, 25]),
        prop::collection::vec(any::<u32>(), 32),
    )
}

#[test]
fn cycle_type_examples() {
    assert_eq!(
        cycle_type(&SignedPerm::identity(3)).to_string(),
        "(1)(1)(1)"
    );
    let tau1 = SignedPerm::new(vec![-1]).unwrap();
    assert_eq!(cycle_type(&tau1).to_string(), "(-1)");
    let omega1 = SignedPerm::new(vec![2, 3, 1]).unwrap();
    assert_eq!(cycle_type(&omega1).to_string(), "(3)");
}

#[test]
fn centralizer_orders_match_wreath_formula_and_brute_force() {
    for n in 1..=5 {
        let all = SignedPerm::all(n);
        for ct in CycleType::all(n) {
            let w = ct.standard_element();
            assert_eq!(cycle_type(&w), ct.canonical());
            let brute = all.iter().filter(|x| x.compose(&w) == w.compose(x)).count();
            let gens: Vec<SignedPerm> = centralizer_generators(&ct)
                .into_iter()
                .map(|g| g.perm)
                .collect();
            for g in &gens {
                assert_eq!(g.compose(&w), w.compose(g), "{ct}");
            }
            let group = generated_group(&gens, n);
            assert_eq!(group.len(), brute, "{ct}");
            assert_eq!(centralizer_order(&ct), brute as u128, "{ct}");
        }
    }
}

#[test]
fn wreath_examples() {
    // all-negative equal parts: (2n1)^k k!
    let ct = CycleType::from_signed(&[-2, -2, -2]).unwrap();
    let gens: Vec<SignedPerm> = centralizer_generators(&ct)
        .into_iter()
        .map(|g| g.perm)
        .collect();
    assert_eq!(generated_group(&gens, 6).len(), 4usize.pow(3) * 6);
    let ct = CycleType::from_signed(&[3, 3]).unwrap();
    let gens: Vec<SignedPerm> = centralizer_generators(&ct)
        .into_iter()
        .map(|g| g.perm)
        .collect();
    assert_eq!(generated_group(&gens, 6).len(), 36 * 2);
    let ct = CycleType::from_signed(&[4]).unwrap();
    let gens: Vec<SignedPerm> = centralizer_generators(&ct)
        .into_iter()
        .map(|g| g.perm)
        .collect();
    assert_eq!(generated_group(&gens, 4).len(), 8);
}

/// Number of diagonal matrices `d` over the algebraic closure with
/// `d_{|φ(i)|} = d_i^{±q}`, counted in exponent form inside a cyclic group
/// `F_{q^L}^*` large enough to hold all of them.
fn brute_fixed_count(phi: &SignedPerm, q: u64) -> u128 {
    let n = phi.n();
    let ct = cycle_type(phi);
    let l = ct
        .entries
        .iter()
        .map(|e| 2 * e.len)
        .fold(1, |a, b| a / gcd(a, b) * b);
    let m = q.pow(l as u32) - 1;
    let ok = |x: &[u64]| {
        (0..n).all(|i| {
            let t = phi.images()[i];
            let j = t.unsigned_abs() as usize - 1;
            let img = (x[i] as u128 * q as u128 % m as u128) as u64;
            let img = if t < 0 { (m - img) % m } else { img };
            x[j] == img
        })
    };
    if (m as u128).pow(n as u32) <= 2_000_000 {
        let mut x = vec![0u64; n];
        let mut count = 0;
        loop {
            if ok(&x) {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return count;
                }
                x[i] += 1;
                if x[i] < m {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
        }
    }
    // orbit-wise: x_1 determines the cycle, so scan x_1 alone
    let mut total = 1u128;
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut count = 0u128;
        for x0 in 0..m {
            let mut x = vec![None; n];
            x[s] = Some(x0);
            let mut i = s;
            let good;
            loop {
                let t = phi.images()[i];
                let j = t.unsigned_abs() as usize - 1;
                let img = (x[i].unwrap() as u128 * q as u128 % m as u128) as u64;
                let img = if t < 0 { (m - img) % m } else { img };
                match x[j] {
                    Some(v) => {
                        good = v == img;
                        break;
                    }
                    None => x[j] = Some(img),
                }
                i = j;
            }
            if good {
                count += 1;
            }
        }
        let mut i = s;
        loop {
            seen[i] = true;
            i = phi.images()[i].unsigned_abs() as usize - 1;
            if i == s {
                break;
            }
        }
        total *= count;
    }
    total
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn torus_order_matches_fixed_point_count() {
    for n in 1..=4 {
        for ct in CycleType::all(n) {
            let w = ct.standard_element();
            for q in [3u64, 5] {
                let formula = ct.torus_order(q);
                assert_eq!(brute_fixed_count(&w, q), formula, "{ct} q={q}");
                // cokernel of q·P - I
                let p = w.matrix().to_rows();
                let rows: Vec<Vec<i64>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| q as i64 * p[i][j] - i64::from(i == j))
                            .collect()
                    })
                    .collect();
                let diag = torus::smith_diagonal(&IntMatrix::from_rows(&rows));
                let order: i128 = diag.iter().map(|d| d.abs()).product();
                assert_eq!(order as u128, formula, "{ct} q={q}");
            }
        }
    }
}

#[test]
fn spinor_norm_examples() {
    for q in [3u64, 5, 7, 9, 25] {
        let f = Gf::of_order(q).unwrap();
        assert_eq!(
            spinor_norm(&MonomialOrtho::identity(&f, 3).unwrap()).unwrap(),
            SpinorClass::Square
        );
        for alpha in 1..f.size() {
            let g = MonomialOrtho::swap_scaled(&f, 3, 2, alpha).unwrap();
            let expect = SpinorClass::of(&f, f.neg(alpha));
            assert_eq!(spinor_norm(&g).unwrap(), expect, "q={q} alpha={alpha}");
        }
        for k in 0..=3 {
            let g = MonomialOrtho::tau(&f, 3, k).unwrap();
            let expect = SpinorClass::of(&f, f.from_int(if k % 2 == 0 { 1 } else { -1 }));
            assert_eq!(spinor_norm(&g).unwrap(), expect, "q={q} k={k}");
        }
    }
}

#[test]
fn spinor_norm_rejects_bad_input() {
    let f = Gf::of_order(5).unwrap();
    let bad = vec![(0, 1), (1, 2), (2, 1), (3, 1), (4, 1)];
    assert!(MonomialOrtho::new(&f, 2, bad).is_err());
    let f2 = Gf::of_order(4).unwrap();
    assert!(MonomialOrtho::identity(&f2, 2)
        .and_then(|g| g.spinor_norm())
        .is_err());
}

/// `θ(-I)` is the discriminant: the class of `det(Gram) / 2^d`.
#[test]
fn minus_identity_has_discriminant_norm() {
    let mut spaces: Vec<QuadSpace> = Vec::new();
    for q in [3u64, 5, 7] {
        let f = Gf::of_order(q).unwrap();
        for n in 1..=3 {
            spaces.push(MonomialOrtho::standard_space(&f, n).unwrap());
        }
        for parts in [
            &[-1i64][..],
            &[-2],
            &[-1, 1],
            &[-2, 2],
            &[-3],
            &[-1, -1, -1],
            &[-1, 2],
        ] {
            let ct = CycleType::from_signed(parts).unwrap();
            let model = BlockModel::new(&ct.entries, q).unwrap();
            spaces.push(model.space().clone());
        }
    }
    for space in &spaces {
        let f = space.field();
        let p = f.p();
        let d = space.dim();
        let mut minus = identity(d);
        for (i, row) in minus.iter_mut().enumerate() {
            row[i] = f.from_int(-1);
        }
        let gram_det = det(f, space.polar());
        let disc = f.mul(gram_det, f.inv(f.pow(2, d as u128)));
        let expect = is_square_mod_p(disc, p);
        let (cls, sign) = space.spinor_norm(&minus).unwrap();
        assert_eq!(cls == SpinorClass::Square, expect, "p={p} d={d}");
        assert_eq!(sign, if d % 2 == 0 { 1 } else { -1 });
    }
}

#[test]
fn euler_criterion_agrees_with_enumeration() {
    for q in [3u64, 5, 7, 9, 25, 27] {
        let f = Gf::of_order(q).unwrap();
        let squares: HashSet<u64> = (1..f.size()).map(|a| f.mul(a, a)).collect();
        for a in 1..f.size() {
            assert_eq!(f.is_square(a), squares.contains(&a), "q={q} a={a}");
        }
    }
}

#[test]
fn block_model_rejects_bad_parameters() {
    let ct = CycleType::from_signed(&[-1, -1, 2]).unwrap();
    assert!(BlockModel::new(&ct.entries, 3).is_err());
    let ct = CycleType::from_signed(&[-1, 2]).unwrap();
    assert!(BlockModel::new(&ct.entries, 9).is_err());
    assert!(BlockModel::new(&[CycleEntry::neg(1)], 3).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cycle_type_is_conjugacy_invariant(n in 1usize..=7, seed in prop::collection::vec(any::<u32>(), 28)) {
        let phi = perm_from_seed(n, &seed[..2 * n]);
        let psi = perm_from_seed(n, &seed[14..14 + 2 * n]);
        prop_assert_eq!(cycle_type(&phi.conjugate_by(&psi)), cycle_type(&phi));
    }

    #[test]
    fn spinor_norm_is_multiplicative((n, q, seed) in seed_strategy()) {
        let f = Gf::of_order(q).unwrap();
        let g = monomial(&f, n, &seed[..16]);
        let h = monomial(&f, n, &seed[16..]);
        let gh = g.compose(&h);
        prop_assert_eq!(gh.spinor_norm().unwrap(), g.spinor_norm().unwrap() * h.spinor_norm().unwrap());
    }

    #[test]
    fn spinor_norm_is_independent_of_factorization((n, q, seed) in seed_strategy()) {
        let f = Gf::of_order(q).unwrap();
        let g = monomial(&f, n, &seed);
        prop_assert_eq!(
            g.spinor_norm_with(Factorization::Forward).unwrap(),
            g.spinor_norm_with(Factorization::Reversed).unwrap()
        );
    }

    #[test]
    fn reflections_multiply_back_to_g((n, q, seed) in seed_strategy()) {
        let f = Gf::of_order(q).unwrap();
        let g = monomial(&f, n, &seed);
        let m = g.matrix();
        for strategy in [Factorization::Forward, Factorization::Reversed] {
            let factors = g.space().reflection_factors(&m, strategy).unwrap();
            let prod = factors
                .iter()
                .fold(identity(m.len()), |acc, v| mat_mul(&f, &acc, &reflection(g.space(), v)));
            prop_assert_eq!(&prod, &m);
        }
    }

    #[test]
    fn monomial_lifts_have_unit_determinant((n, q, seed) in seed_strategy()) {
        let f = Gf::of_order(q).unwrap();
        let g = monomial(&f, n, &seed);
        let d = g.determinant();
        prop_assert!(d == f.one() || d == f.from_int(-1));
    }
}
