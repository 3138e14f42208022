use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use proptest::prelude::*;
use torus_split::rootsys::{RootSystem, RootSystemType};
use torus_split::torus::Family;
use torus_split::weyl::{WeylElement, WeylGroup, WeylTwist};
use torus_split::IntMatrix;

type Perm = Vec<usize>;

/// `(a b)(r) = a(b(r))`.
fn compose(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&p| a[p]).collect()
}

fn inverse(a: &Perm) -> Perm {
    let mut inv = vec![0; a.len()];
    for (i, &p) in a.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// The Weyl group as permutations of root positions, closed from the
/// simple reflections without going through `WeylGroup`.
fn perm_group(sys: &RootSystem) -> Vec<Perm> {
    let n = sys.num_roots();
    let gens: Vec<Perm> = (0..sys.rank())
        .map(|i| {
            let s = sys.position(i as i32 + 1);
            (0..n).map(|r| sys.reflect_position(s, r)).collect()
        })
        .collect();
    let id: Perm = (0..n).collect();
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        for g in &gens {
            let y = compose(&out[i], g);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

fn twist_perm(sys: &RootSystem, twist: WeylTwist, w: &Perm) -> Perm {
    match twist {
        WeylTwist::Identity => w.clone(),
        _ => {
            let rho = sys.symmetry_positions().unwrap().to_vec();
            compose(&compose(&rho, w), &inverse(&rho))
        }
    }
}

/// Orbits of `u ↦ x⁻¹ u x^σ` on permutations.
fn oracle_classes(sys: &RootSystem, twist: WeylTwist) -> BTreeSet<BTreeSet<Perm>> {
    let group = perm_group(sys);
    let mut done: HashSet<Perm> = HashSet::new();
    let mut classes = BTreeSet::new();
    for u in &group {
        if done.contains(u) {
            continue;
        }
        let class: BTreeSet<Perm> = group
            .iter()
            .map(|x| compose(&compose(&inverse(x), u), &twist_perm(sys, twist, x)))
            .collect();
        done.extend(class.iter().cloned());
        classes.insert(class);
    }
    classes
}

fn library_classes(w: &WeylGroup, twist: WeylTwist) -> BTreeSet<BTreeSet<Perm>> {
    w.sigma_classes(twist)
        .into_iter()
        .map(|c| c.into_iter().map(|id| w.element(id).perm.clone()).collect())
        .collect()
}

fn group(kind: RootSystemType) -> &'static WeylGroup {
    static G2: OnceLock<WeylGroup> = OnceLock::new();
    static D4: OnceLock<WeylGroup> = OnceLock::new();
    let cell = if kind == RootSystemType::G2 { &G2 } else { &D4 };
    cell.get_or_init(|| WeylGroup::new(&RootSystem::build(kind)))
}

#[test]
fn enumeration_examples() {
    let g2 = group(RootSystemType::G2);
    assert_eq!(g2.order(), 12);
    assert_eq!(perm_group(g2.root_system()).len(), 12);
    let w0 = g2.from_reflections(&[1, 6]);
    assert!(g2.is_central(w0));
    assert_eq!(w0, g2.longest());
    let d4 = group(RootSystemType::D4);
    assert_eq!(d4.order(), 192);
    assert_eq!(perm_group(d4.root_system()).len(), 192);
}

#[test]
fn elements_commute_with_negation_and_close() {
    for kind in [RootSystemType::G2, RootSystemType::D4] {
        let w = group(kind);
        let sys = w.root_system();
        let all: HashSet<&Perm> = w.elements().iter().map(|e| &e.perm).collect();
        for (a, ea) in w.elements().iter().enumerate() {
            for p in 0..sys.num_roots() {
                assert_eq!(ea.apply(sys.neg_position(p)), sys.neg_position(ea.apply(p)));
            }
            assert_eq!(ea.coroot_matrix(sys).det().abs(), 1);
            for b in [0, 1, a / 2] {
                let prod = ea.compose(w.element(b));
                assert!(all.contains(&prod.perm));
                assert_eq!(w.id_of(&prod), Some(w.mul(a, b)));
            }
        }
    }
}

#[test]
fn class_counts() {
    let g2 = group(RootSystemType::G2);
    assert_eq!(g2.sigma_classes(WeylTwist::Identity).len(), 6);
    let mut sizes: Vec<usize> = g2
        .sigma_classes(WeylTwist::Ree)
        .iter()
        .map(Vec::len)
        .collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![2, 2, 2, 6]);
    let d4 = group(RootSystemType::D4);
    assert_eq!(d4.sigma_classes(WeylTwist::Triality).len(), 7);
}

#[test]
fn ree_classes_match_the_listed_members() {
    let g2 = group(RootSystemType::G2);
    let classes = g2.sigma_classes(WeylTwist::Ree);
    let class_of = |x: usize| classes.iter().position(|c| c.contains(&x)).unwrap();
    let w = |r: i32| g2.reflection(r);
    assert_eq!(class_of(w(1)), class_of(w(2)));
    assert_eq!(class_of(w(3)), class_of(w(5)));
    assert_eq!(class_of(w(4)), class_of(w(6)));
    let w12 = g2.mul(w(1), w(2));
    for k in 0..6 {
        assert_eq!(class_of(g2.power(w12, k)), class_of(0));
    }
}

#[test]
fn classes_match_brute_force_orbits() {
    for (kind, twists) in [
        (
            RootSystemType::G2,
            vec![WeylTwist::Identity, WeylTwist::Ree],
        ),
        (
            RootSystemType::D4,
            vec![WeylTwist::Identity, WeylTwist::Triality],
        ),
    ] {
        let w = group(kind);
        for t in twists {
            let ours = library_classes(w, t);
            assert_eq!(ours, oracle_classes(w.root_system(), t), "{kind} {t}");
            assert_eq!(ours.iter().map(BTreeSet::len).sum::<usize>(), w.order());
        }
    }
}

#[test]
fn centralizer_examples() {
    let g2 = group(RootSystemType::G2);
    assert_eq!(g2.centralizer_sigma(WeylTwist::Identity, 0).len(), 12);
    let w1 = g2.reflection(1);
    let c = g2.centralizer_sigma(WeylTwist::Ree, w1);
    let w12 = g2.mul(w1, g2.reflection(2));
    assert_eq!(c, g2.generated(&[w12]));
    assert_eq!(c.len(), 6);
    let d4 = group(RootSystemType::D4);
    let w = d4.from_reflections(&[1, 2]);
    let c = d4.centralizer_sigma(WeylTwist::Triality, w);
    assert_eq!(c.len(), 4);
    assert!(
        c.iter().any(|&x| d4.element_order(x) == 4),
        "cyclic of order 4"
    );
}

/// `|C_{W,σ}(w)|` per class as printed in the torus tables.
fn printed_centralizer_orders(family: Family) -> &'static [usize] {
    match family {
        Family::G2 => &[12, 4, 4, 12, 6, 6],
        Family::Ree => &[2, 6, 6, 6],
        Family::Triality => &[12, 4, 4, 24, 24, 4, 12],
    }
}

#[test]
fn orbit_stabilizer_and_table_centralizers() {
    for family in Family::ALL {
        let sys = RootSystem::build(family.root_system_type());
        let w = WeylGroup::new(&sys);
        let t = family.twist();
        for class in w.sigma_classes(t) {
            for &x in &class {
                let c = w.centralizer_sigma(t, x);
                assert!(w.is_subgroup(&c));
                assert_eq!(c.len() * class.len(), w.order());
            }
        }
        for id in 1..=family.num_classes() {
            let rep = w.from_reflections(family.representative_reflections(id).unwrap());
            assert_eq!(
                w.centralizer_sigma(t, rep).len(),
                printed_centralizer_orders(family)[id - 1],
                "{family} class {id}"
            );
        }
    }
}

#[test]
fn coroot_action_examples() {
    let g2 = group(RootSystemType::G2);
    let sys = g2.root_system();
    assert_eq!(g2.coroot_action(0), IntMatrix::identity(2));
    assert_eq!(g2.coroot_action(g2.longest()), IntMatrix::scalar(2, -1));
    let w1 = g2.reflection(1);
    let cols: Vec<Vec<i64>> = (1..=2)
        .map(|i| sys.coroot_coeffs(sys.reflect(1, i)))
        .collect();
    assert_eq!(g2.coroot_action(w1), IntMatrix::from_columns(&cols));
}

#[test]
fn identity_element_and_inverse() {
    let g2 = group(RootSystemType::G2);
    assert_eq!(*g2.element(0), WeylElement::identity(12));
    for a in 0..g2.order() {
        assert_eq!(g2.mul(a, g2.inv(a)), 0);
    }
}

proptest! {
    #[test]
    fn coroot_action_is_multiplicative(a in 0usize..192, b in 0usize..192, d4 in any::<bool>()) {
        let w = group(if d4 { RootSystemType::D4 } else { RootSystemType::G2 });
        let (a, b) = (a % w.order(), b % w.order());
        let lhs = w.coroot_action(w.mul(a, b));
        let rhs = &w.coroot_action(a) * &w.coroot_action(b);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn twist_is_an_automorphism(a in 0usize..192, b in 0usize..192) {
        let w = group(RootSystemType::D4);
        let t = WeylTwist::Triality;
        prop_assert_eq!(w.twist(t, w.mul(a, b)), w.mul(w.twist(t, a), w.twist(t, b)));
        prop_assert_eq!(w.twist(t, w.twist(t, w.twist(t, a))), a);
    }
}
