use std::sync::OnceLock;

use proptest::prelude::*;
use torus_split::chevtits::{AdjointRep, TitsElement, TitsGroup};
use torus_split::normlift::FamilyTits;
use torus_split::rootsys::{RootSystem, RootSystemType};
use torus_split::torus::Family;

struct Fixture {
    tits: TitsGroup,
    adj: AdjointRep,
}

fn fixture(kind: RootSystemType) -> &'static Fixture {
    static G2: OnceLock<Fixture> = OnceLock::new();
    static D4: OnceLock<Fixture> = OnceLock::new();
    let cell = if kind == RootSystemType::G2 { &G2 } else { &D4 };
    cell.get_or_init(|| {
        let tits = TitsGroup::new(&RootSystem::build(kind));
        let adj = tits.adjoint();
        Fixture { tits, adj }
    })
}

fn element(t: &TitsGroup, h: u8, w: usize) -> TitsElement {
    TitsElement {
        h: h % (1 << t.rank()),
        w: (w % t.weyl().order()) as u16,
    }
}

#[test]
fn structure_constant_examples() {
    let d4 = &fixture(RootSystemType::D4).tits;
    let sys = d4.root_system();
    assert_eq!(d4.constants().n(sys, 1, 2).abs(), 1);
    assert_eq!(
        sys.sum(sys.position(1), sys.position(2)),
        Some(sys.position(5))
    );
    let g2 = &fixture(RootSystemType::G2).tits;
    let sys = g2.root_system();
    for s in [2, 3, 4] {
        assert_ne!(g2.constants().n(sys, 1, s), 0, "N(r1, r{s})");
    }
}

#[test]
fn structure_constants_are_antisymmetric_and_bounded() {
    for kind in [RootSystemType::G2, RootSystemType::D4] {
        let t = &fixture(kind).tits;
        let sys = t.root_system();
        let sc = t.constants();
        for r in sys.roots() {
            for s in sys.roots() {
                let n = sc.n(sys, r.index, s.index);
                assert_eq!(n, -sc.n(sys, s.index, r.index));
                let is_root = sys
                    .sum(sys.position(r.index), sys.position(s.index))
                    .is_some();
                if is_root {
                    let max = if kind == RootSystemType::G2 { 3 } else { 1 };
                    assert!(
                        (1..=max).contains(&n.abs()),
                        "N(r{}, r{}) = {n}",
                        r.index,
                        s.index
                    );
                } else {
                    assert_eq!(n, 0);
                }
            }
        }
    }
}

#[test]
fn eta_is_read_off_the_adjoint_matrices() {
    for kind in [RootSystemType::G2, RootSystemType::D4] {
        let Fixture { tits, adj } = fixture(kind);
        let sys = tits.root_system();
        for s in 1..=sys.rank() {
            let sp = sys.position(s as i32);
            for r in sys.roots() {
                let eta = tits.constants().eta(sys, s, r.index);
                assert!(eta == 1 || eta == -1);
                let conj = &(&adj.n(sp) * &adj.n(sys.position(r.index))) * &adj.n_inv(sp);
                let target = sys.position(sys.reflect(s as i32, r.index));
                let want = if eta == 1 {
                    adj.n(target)
                } else {
                    adj.n_inv(target)
                };
                assert_eq!(conj, want, "s={s} r={}", r.index);
            }
        }
    }
}

#[test]
fn squares_of_lifts() {
    let Fixture { tits, adj } = fixture(RootSystemType::G2);
    let n1 = tits.n(1);
    assert_eq!(tits.mul(n1, n1), tits.h(1));
    let m = adj.n(tits.root_system().position(1));
    assert_eq!(&m * &m, adj.h(1));
    for kind in [RootSystemType::G2, RootSystemType::D4] {
        let t = &fixture(kind).tits;
        for i in 1..=t.rank() {
            let n = t.n(i as i32);
            assert_eq!(t.mul(n, n), t.h(i));
        }
    }
}

#[test]
fn h_part_is_elementary_abelian() {
    let t = &fixture(RootSystemType::D4).tits;
    for a in 0..16u8 {
        for b in 0..16u8 {
            assert_eq!(t.mul(t.from_h(a), t.from_h(b)), t.from_h(a ^ b));
        }
    }
}

#[test]
fn closure_orders() {
    let g2 = &fixture(RootSystemType::G2).tits;
    let gens: Vec<TitsElement> = (1..=2).map(|i| g2.n(i)).collect();
    assert_eq!(g2.closure(&gens, 1_000).unwrap().len(), 4 * 12);
    assert_eq!(
        g2.closure(&[g2.h(1)], 10).unwrap(),
        vec![TitsElement::IDENTITY, g2.h(1)]
    );
    assert!(g2.closure(&gens, 10).is_err());
    let d4 = &fixture(RootSystemType::D4).tits;
    let gens: Vec<TitsElement> = (1..=4).map(|i| d4.n(i)).collect();
    assert_eq!(d4.closure(&gens, 10_000).unwrap().len(), 16 * 192);
}

#[test]
fn pi_examples_and_kernel() {
    let g2 = &fixture(RootSystemType::G2).tits;
    let w = g2.weyl();
    assert_eq!(g2.pi(g2.h(1)), 0);
    let n12 = g2.mul(g2.n(1), g2.n(2));
    assert_eq!(g2.pi(n12), w.mul(w.simple(0), w.simple(1)));
    let n0 = g2.parse_word("h1n1n6").unwrap();
    assert_eq!(g2.pi(n0), w.longest());
    for kind in [RootSystemType::G2, RootSystemType::D4] {
        let t = &fixture(kind).tits;
        let all = t
            .closure(
                &(1..=t.rank()).map(|i| t.n(i as i32)).collect::<Vec<_>>(),
                10_000,
            )
            .unwrap();
        assert_eq!(all.iter().filter(|a| t.pi(**a) == 0).count(), 1 << t.rank());
    }
}

#[test]
fn braid_relations() {
    let g2 = &fixture(RootSystemType::G2).tits;
    let (a, b) = (g2.n(1), g2.n(2));
    assert_eq!(
        g2.product(&[a, b, a, b, a, b]),
        g2.product(&[b, a, b, a, b, a])
    );
    let d4 = &fixture(RootSystemType::D4).tits;
    for i in 1..=4i32 {
        for j in 1..=4i32 {
            if i == j {
                continue;
            }
            let (x, y) = (d4.n(i), d4.n(j));
            if i == 2 || j == 2 {
                assert_eq!(d4.product(&[x, y, x]), d4.product(&[y, x, y]));
            } else {
                assert_eq!(d4.mul(x, y), d4.mul(y, x));
            }
        }
    }
}

#[test]
fn central_lifts_of_w0() {
    let g2 = &fixture(RootSystemType::G2).tits;
    let n0 = g2.parse_word("h1n1n6").unwrap();
    assert!(g2.is_central(n0));
    assert!(g2.commutes(n0, g2.n(1)) && g2.commutes(n0, g2.n(2)));
    let ft = FamilyTits::new(Family::Triality).unwrap();
    assert!(ft.tits.is_central(ft.n0));
    let literal = ft.tits.parse_word("n1n3n4n12").unwrap();
    assert_eq!(ft.tits.pi(literal), ft.tits.pi(ft.n0));
    assert_eq!(ft.n0_correction.is_some(), !ft.tits.is_central(literal));
    assert_eq!(
        ft.tits.mul(ft.n0, ft.tits.inv(literal)).w,
        0,
        "correction lies in the h-part"
    );
}

#[test]
fn refuses_characteristic_two() {
    let sys = RootSystem::build(RootSystemType::G2);
    assert!(TitsGroup::for_field(&sys, 4).is_err());
    assert!(TitsGroup::for_field(&sys, 5).is_ok());
}

#[test]
fn dump_is_stable() {
    let t = &fixture(RootSystemType::G2).tits;
    let a = t.constants().dump(t.root_system());
    let b = TitsGroup::new(&RootSystem::build(RootSystemType::G2))
        .constants()
        .dump(t.root_system());
    assert_eq!(a, b);
    assert!(!a.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn multiplication_matches_adjoint_matrices(d4 in any::<bool>(), ha in any::<u8>(), wa in 0usize..192, hb in any::<u8>(), wb in 0usize..192) {
        let Fixture { tits, adj } = fixture(if d4 { RootSystemType::D4 } else { RootSystemType::G2 });
        let a = element(tits, ha, wa);
        let b = element(tits, hb, wb);
        let lhs = tits.adjoint_matrix(adj, tits.mul(a, b));
        let rhs = &tits.adjoint_matrix(adj, a) * &tits.adjoint_matrix(adj, b);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pi_is_a_homomorphism(ha in any::<u8>(), wa in 0usize..192, hb in any::<u8>(), wb in 0usize..192) {
        let t = &fixture(RootSystemType::D4).tits;
        let a = element(t, ha, wa);
        let b = element(t, hb, wb);
        prop_assert_eq!(t.pi(t.mul(a, b)), t.weyl().mul(t.pi(a), t.pi(b)));
        prop_assert_eq!(t.mul(a, t.inv(a)), TitsElement::IDENTITY);
    }
}
