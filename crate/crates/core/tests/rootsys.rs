use proptest::prelude::*;
use torus_split::rootsys::{LengthClass, RootSystem, RootSystemType};

/// Gram matrices of the simple roots, written out independently.
fn gram(kind: RootSystemType) -> Vec<Vec<i64>> {
    match kind {
        // r1 short with (r1,r1) = 2, r2 long with (r2,r2) = 6
        RootSystemType::G2 => vec![vec![2, -3], vec![-3, 6]],
        // r2 is the branch node
        RootSystemType::D4 => vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, -1],
            vec![0, -1, 2, 0],
            vec![0, -1, 0, 2],
        ],
    }
}

fn inner(g: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    (0..a.len())
        .flat_map(|i| (0..b.len()).map(move |j| (i, j)))
        .map(|(i, j)| a[i] * g[i][j] * b[j])
        .sum()
}

/// `w_s(r) = r - 2(r,s)/(s,s) s`.
fn reflect_coeffs(g: &[Vec<i64>], s: &[i64], r: &[i64]) -> Vec<i64> {
    let k = 2 * inner(g, r, s) / inner(g, s, s);
    r.iter().zip(s).map(|(x, y)| x - k * y).collect()
}

/// Closes the simple roots under reflections.
fn closure(g: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let l = g.len();
    let simple: Vec<Vec<i64>> = (0..l)
        .map(|i| (0..l).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut roots = simple.clone();
    let mut i = 0;
    while i < roots.len() {
        for s in &simple {
            let r = reflect_coeffs(g, s, &roots[i]);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        i += 1;
    }
    roots
}

fn coeffs(sys: &RootSystem, index: i32) -> Vec<i64> {
    sys.root(index).coeffs.clone()
}

fn both() -> [RootSystem; 2] {
    [
        RootSystem::build(RootSystemType::G2),
        RootSystem::build(RootSystemType::D4),
    ]
}

#[test]
fn build_examples() {
    let g2 = RootSystem::build(RootSystemType::G2);
    assert_eq!(g2.num_positive(), 6);
    assert_eq!(coeffs(&g2, 6), vec![3, 2]);
    assert_eq!(coeffs(&g2, 5), vec![3, 1]);
    let d4 = RootSystem::build(RootSystemType::D4);
    assert_eq!(d4.num_positive(), 12);
    assert_eq!(coeffs(&d4, 12), vec![1, 2, 1, 1]);
    assert_eq!(coeffs(&d4, 5), vec![1, 1, 0, 0]);
    assert!("B3".parse::<RootSystemType>().is_err());
}

#[test]
fn closure_oracle_matches_root_lists() {
    for sys in both() {
        let g = gram(sys.kind());
        let mut ours = closure(&g);
        ours.sort();
        let mut theirs: Vec<Vec<i64>> = sys.roots().iter().map(|r| r.coeffs.clone()).collect();
        theirs.sort();
        assert_eq!(ours, theirs, "{}", sys.kind());
        let expected = if sys.kind() == RootSystemType::G2 {
            12
        } else {
            24
        };
        assert_eq!(sys.num_roots(), expected);
    }
}

#[test]
fn g2_length_classes_from_squared_length() {
    let sys = RootSystem::build(RootSystemType::G2);
    let g = gram(RootSystemType::G2);
    let mut short = 0;
    for r in sys.roots() {
        let n = inner(&g, &r.coeffs, &r.coeffs);
        let class = if n == 2 {
            LengthClass::Short
        } else {
            LengthClass::Long
        };
        assert_eq!(r.length_class, class, "r{}", r.index);
        short += usize::from(n == 2);
    }
    assert_eq!(short, 6);
}

#[test]
fn positive_roots_and_negatives() {
    for sys in both() {
        for r in sys.roots() {
            let neg: Vec<i64> = r.coeffs.iter().map(|x| -x).collect();
            assert_eq!(coeffs(&sys, -r.index), neg);
            if r.index > 0 {
                assert!(r.coeffs.iter().all(|&x| x >= 0));
            }
        }
    }
}

#[test]
fn reflection_examples() {
    let g2 = RootSystem::build(RootSystemType::G2);
    assert_eq!(g2.reflect(1, 1), -1);
    let gg = gram(RootSystemType::G2);
    let want = reflect_coeffs(&gg, &coeffs(&g2, 1), &coeffs(&g2, 2));
    assert_eq!(want, vec![3, 1]);
    assert_eq!(g2.reflect(1, 2), 5);
    let d4 = RootSystem::build(RootSystemType::D4);
    let want = reflect_coeffs(&gram(RootSystemType::D4), &coeffs(&d4, 2), &coeffs(&d4, 1));
    assert_eq!(coeffs(&d4, d4.reflect(2, 1)), want);
    assert_eq!(d4.reflect(2, 1), 5);
}

#[test]
fn reflections_close_and_are_involutions() {
    for sys in both() {
        let g = gram(sys.kind());
        for s in sys.roots() {
            for r in sys.roots() {
                let x = sys.reflect(s.index, r.index);
                assert_eq!(coeffs(&sys, x), reflect_coeffs(&g, &s.coeffs, &r.coeffs));
                assert_eq!(sys.reflect(s.index, x), r.index);
            }
        }
    }
}

#[test]
fn coroot_examples() {
    let g2 = RootSystem::build(RootSystemType::G2);
    assert_eq!(g2.coroot_coeffs(1), vec![1, 0]);
    assert_eq!(g2.coroot_coeffs(2), vec![0, 1]);
    assert_eq!(g2.coroot_coeffs(6), vec![1, 2]);
    let d4 = RootSystem::build(RootSystemType::D4);
    assert_eq!(d4.coroot_coeffs(12), vec![1, 2, 1, 1]);
}

#[test]
fn coroot_coefficients_by_linear_solve() {
    // r^vee = 2r/(r,r) and r_i^vee = 2r_i/(r_i,r_i) give c_i = a_i (r_i,r_i)/(r,r)
    for sys in both() {
        let g = gram(sys.kind());
        for r in sys.roots() {
            let nr = inner(&g, &r.coeffs, &r.coeffs);
            let want: Vec<i64> = r
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    assert_eq!(a * g[i][i] % nr, 0);
                    a * g[i][i] / nr
                })
                .collect();
            assert_eq!(sys.coroot_coeffs(r.index), want, "r{}", r.index);
            let neg: Vec<i64> = want.iter().map(|x| -x).collect();
            assert_eq!(sys.coroot_coeffs(-r.index), neg);
        }
    }
}

#[test]
fn triality_examples() {
    let d4 = RootSystem::build(RootSystemType::D4);
    assert_eq!(d4.apply_symmetry(1).unwrap(), 3);
    assert_eq!(d4.apply_symmetry(2).unwrap(), 2);
    assert_eq!(d4.apply_symmetry(3).unwrap(), 4);
    assert_eq!(d4.apply_symmetry(5).unwrap(), 6);
    // G2 carries the graph symmetry of the Ree twist, exchanging short and long
    let g2 = RootSystem::build(RootSystemType::G2);
    assert_eq!(g2.apply_symmetry(1).unwrap(), 2);
    assert_eq!(g2.apply_symmetry(2).unwrap(), 1);
    for r in g2.roots() {
        let img = g2.apply_symmetry(r.index).unwrap();
        assert_ne!(g2.root(img).length_class, r.length_class);
    }
}

#[test]
fn triality_has_order_three_and_preserves_the_form() {
    let d4 = RootSystem::build(RootSystemType::D4);
    let g = gram(RootSystemType::D4);
    for r in d4.roots() {
        let once = d4.apply_symmetry(r.index).unwrap();
        let thrice = d4.apply_symmetry(d4.apply_symmetry(once).unwrap()).unwrap();
        assert_eq!(thrice, r.index);
        for s in d4.roots() {
            let s1 = d4.apply_symmetry(s.index).unwrap();
            assert_eq!(
                inner(&g, &coeffs(&d4, once), &coeffs(&d4, s1)),
                inner(&g, &r.coeffs, &s.coeffs)
            );
        }
    }
    assert!((1..=12).any(|i| d4.apply_symmetry(i).unwrap() != i));
}

proptest! {
    #[test]
    fn reflection_preserves_inner_products(d4 in any::<bool>(), s in 0usize..24, a in 0usize..24, b in 0usize..24) {
        let kind = if d4 { RootSystemType::D4 } else { RootSystemType::G2 };
        let sys = RootSystem::build(kind);
        let n = sys.num_roots();
        let (s, a, b) = (sys.index_at(s % n), sys.index_at(a % n), sys.index_at(b % n));
        let g = gram(kind);
        let wa = coeffs(&sys, sys.reflect(s, a));
        let wb = coeffs(&sys, sys.reflect(s, b));
        prop_assert_eq!(inner(&g, &wa, &wb), inner(&g, &coeffs(&sys, a), &coeffs(&sys, b)));
    }
}
