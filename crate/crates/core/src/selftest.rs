//! Oracle suites behind the `selftest` command.
//!
//! Each suite checks library results against an independent computation:
//! torus structures against an explicit enumeration of the cokernel, Tits
//! group orders and relations, σ-class partitions against brute-force
//! orbits, and spinor norms under two different reflection factorizations.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chevtits::{TitsElement, TitsGroup, DEFAULT_CLOSURE_CAP};
use crate::matrix::IntMatrix;
use crate::par::Exec;
use crate::rootsys::{RootSystem, RootSystemType};
use crate::signedperm::gf::Gf;
use crate::signedperm::{Factorization, MonomialOrtho, SignedPerm};
use crate::torus::fixed_structure;
use crate::weyl::{WeylGroup, WeylTwist};

/// At most this many failure messages are kept per suite.
const MAX_REPORTED_FAILURES: usize = 10;

/// Largest `|det(A - I)|` drawn by the torus-structure suite.
pub const MAX_SNF_DET: i128 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.into(),
            passed: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures.push(what());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub passed: usize,
    pub failed: usize,
}

impl SelftestReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Deliberate corruption used to check that the suites notice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip the diagonal signs `η_{s,s}`, so that `n_s² = 1` instead of `h_s`.
    CorruptEta,
}

/// Run every suite with `count` random cases where a suite is randomized.
pub fn run(seed: u64, count: usize, fault: Option<Fault>, exec: Exec) -> SelftestReport {
    let suites = vec![
        snf_suite(seed, count, exec),
        tits_suite(fault),
        sigma_class_suite(),
        spinor_suite(seed, count, exec),
    ];
    let passed = suites.iter().map(|s| s.passed).sum();
    let failed = suites.iter().map(|s| s.failed).sum();
    SelftestReport {
        seed,
        suites,
        passed,
        failed,
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A random square matrix of rank at most 4 with `1 <= |det(A - I)| <= MAX_SNF_DET`.
pub fn random_twist_matrix<R: Rng>(rng: &mut R) -> IntMatrix {
    loop {
        let l = rng.gen_range(1..=4usize);
        let bound = if l <= 2 { 9 } else { 3 };
        let rows: Vec<Vec<i64>> = (0..l)
            .map(|_| (0..l).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
        let a = IntMatrix::from_rows(&rows);
        let d = (&a - &IntMatrix::identity(l)).det().abs();
        if (1..=MAX_SNF_DET).contains(&d) {
            return a;
        }
    }
}

/// Lower-triangular basis `H` of the column lattice of a nonsingular `B`,
/// with positive diagonal.
fn hermite_lower(b: &IntMatrix) -> Vec<Vec<i128>> {
    let l = b.rows();
    let mut h: Vec<Vec<i128>> = (0..l)
        .map(|i| b.row(i).iter().map(|&x| x as i128).collect())
        .collect();
    let col_op = |h: &mut Vec<Vec<i128>>, dst: usize, src: usize, f: i128| {
        for row in h.iter_mut() {
            row[dst] -= f * row[src];
        }
    };
    for i in 0..l {
        // Euclid on the entries of row i in columns i.., keeping the gcd at column i
        loop {
            let pivot = (i..l)
                .filter(|&j| h[i][j] != 0)
                .min_by_key(|&j| h[i][j].abs());
            let Some(j) = pivot else { break };
            for row in h.iter_mut() {
                row.swap(i, j);
            }
            let mut done = true;
            for j in i + 1..l {
                if h[i][j] != 0 {
                    let f = h[i][j].div_euclid(h[i][i]);
                    col_op(&mut h, j, i, f);
                    done &= h[i][j] == 0;
                }
            }
            if done {
                break;
            }
        }
        if h[i][i] < 0 {
            for row in h.iter_mut() {
                row[i] = -row[i];
            }
        }
    }
    h
}

/// Reduce `x` to the coset representative with `0 <= x_i < H_ii`.
fn reduce(h: &[Vec<i128>], x: &mut [i128]) {
    for i in 0..x.len() {
        let k = x[i].div_euclid(h[i][i]);
        if k != 0 {
            for (r, xr) in x.iter_mut().enumerate() {
                *xr -= k * h[r][i];
            }
        }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Invariant factors of `Z^l / (A - I) Z^l`, found by listing every coset
/// and counting the elements killed by each prime power.
pub fn cokernel_invariants_by_enumeration(a: &IntMatrix) -> Vec<u64> {
    let l = a.rows();
    let h = hermite_lower(&(a - &IntMatrix::identity(l)));
    let sizes: Vec<i128> = (0..l).map(|i| h[i][i]).collect();
    let order: i128 = sizes.iter().product();
    let mut elems: Vec<Vec<i128>> = vec![Vec::new()];
    for &s in &sizes {
        elems = elems
            .into_iter()
            .flat_map(|e| {
                (0..s).map(move |v| {
                    let mut e = e.clone();
                    e.push(v);
                    e
                })
            })
            .collect();
    }
    debug_assert_eq!(elems.len() as i128, order);
    let killed = |k: i128| {
        elems
            .iter()
            .filter(|x| {
                let mut y: Vec<i128> = x.iter().map(|v| v * k).collect();
                reduce(&h, &mut y);
                y.iter().all(|&v| v == 0)
            })
            .count() as u64
    };
    let mut per_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    for p in prime_factors(order as u64) {
        // s[j] = log_p #{x : p^j x = 0}
        let mut s = vec![0u32];
        let mut pj = 1i128;
        loop {
            pj *= p as i128;
            let mut c = killed(pj);
            let mut sj = 0;
            while c > 1 {
                c /= p;
                sj += 1;
            }
            if sj == *s.last().expect("nonempty") {
                break;
            }
            s.push(sj);
        }
        // s[j] - s[j-1] cyclic factors have order at least p^j
        let mut exps = Vec::new();
        for j in (1..s.len()).rev() {
            let here = s[j] - s[j - 1];
            let above = if j + 1 < s.len() { s[j + 1] - s[j] } else { 0 };
            exps.extend(std::iter::repeat_n(j as u32, (here - above) as usize));
        }
        per_prime.push((p, exps));
    }
    let r = per_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..r)
        .map(|i| {
            per_prime
                .iter()
                .map(|(p, e)| e.get(i).map_or(1, |&k| p.pow(k)))
                .product()
        })
        .collect();
    factors.reverse();
    factors
}

/// `fixed_structure` against cokernel enumeration on `count` random matrices.
pub fn snf_suite(seed: u64, count: usize, exec: Exec) -> SuiteResult {
    let mut rng = rng_for(seed, 1);
    let mats: Vec<IntMatrix> = (0..count).map(|_| random_twist_matrix(&mut rng)).collect();
    let outcomes = exec.map(&mats, |a| {
        let st = fixed_structure(a);
        let want = cokernel_invariants_by_enumeration(a);
        match st {
            Ok(s) if s.invariant_factors == want => Ok(()),
            Ok(s) => Err(format!(
                "{:?}: got {:?}, enumeration {:?}",
                a.to_rows(),
                s.invariant_factors,
                want
            )),
            Err(e) => Err(format!("{:?}: {e}", a.to_rows())),
        }
    });
    let mut suite = SuiteResult::new("snf-vs-enumeration");
    for o in outcomes {
        let msg = o.as_ref().err().cloned();
        suite.record(o.is_ok(), || msg.unwrap_or_default());
    }
    suite
}

fn tits_group(kind: RootSystemType, fault: Option<Fault>) -> TitsGroup {
    let sys = RootSystem::build(kind);
    match fault {
        Some(Fault::CorruptEta) => TitsGroup::with_squares(&sys, vec![0; sys.rank()]),
        None => TitsGroup::new(&sys),
    }
}

/// Orders of the Tits groups, squares of the simple lifts, central lifts
/// of `w0` and the braid relations.
pub fn tits_suite(fault: Option<Fault>) -> SuiteResult {
    let mut suite = SuiteResult::new("tits-group");
    for (kind, expected) in [(RootSystemType::G2, 48usize), (RootSystemType::D4, 3072)] {
        let t = tits_group(kind, fault);
        let gens: Vec<TitsElement> = (1..=t.rank()).map(|i| t.n(i as i32)).collect();
        let order = t.closure(&gens, DEFAULT_CLOSURE_CAP).map(|c| c.len());
        suite.record(order == Ok(expected), || {
            format!("|T({kind})| = {order:?}, expected {expected}")
        });
        for i in 1..=t.rank() {
            let n = t.n(i as i32);
            suite.record(t.mul(n, n) == t.h(i), || format!("{kind}: n{i}^2 != h{i}"));
        }
        let w0 = t.weyl().longest();
        suite.record(!t.central_lifts(w0).is_empty(), || {
            format!("{kind}: no central lift over w0")
        });
        let simple: Vec<TitsElement> = (1..=t.rank() as i32).map(|i| t.n(i)).collect();
        let sys = t.root_system();
        for i in 0..t.rank() {
            for j in i + 1..t.rank() {
                let m = t
                    .weyl()
                    .element_order(t.weyl().mul(t.weyl().simple(i), t.weyl().simple(j)));
                let (a, b) = (simple[i], simple[j]);
                let lhs: Vec<TitsElement> =
                    (0..m).map(|k| if k % 2 == 0 { a } else { b }).collect();
                let rhs: Vec<TitsElement> =
                    (0..m).map(|k| if k % 2 == 0 { b } else { a }).collect();
                suite.record(t.product(&lhs) == t.product(&rhs), || {
                    format!(
                        "{}: braid relation of length {m} fails for n{} n{}",
                        sys.kind(),
                        i + 1,
                        j + 1
                    )
                });
            }
        }
    }
    let g2 = tits_group(RootSystemType::G2, fault);
    let n0 = g2.parse_word("h1n1n6");
    suite.record(n0.is_ok_and(|x| g2.is_central(x)), || {
        "G2: h1n1n6 is not central".into()
    });
    suite
}

/// Orbits of `u ↦ x⁻¹ u x^σ` computed directly, as sorted class sizes.
fn orbit_sizes(w: &WeylGroup, twist: WeylTwist) -> Vec<usize> {
    let mut seen: HashSet<usize> = HashSet::new();
    let mut sizes = Vec::new();
    for u in 0..w.order() {
        if seen.contains(&u) {
            continue;
        }
        let orbit: HashSet<usize> = (0..w.order())
            .map(|x| w.mul(w.mul(w.inv(x), u), w.twist(twist, x)))
            .collect();
        sizes.push(orbit.len());
        seen.extend(orbit);
    }
    sizes.sort_unstable();
    sizes
}

/// Class counts and sizes under each twist, against orbit enumeration.
pub fn sigma_class_suite() -> SuiteResult {
    let mut suite = SuiteResult::new("sigma-classes");
    let g2 = WeylGroup::new(&RootSystem::build(RootSystemType::G2));
    let d4 = WeylGroup::new(&RootSystem::build(RootSystemType::D4));
    let cases: [(&WeylGroup, WeylTwist, Option<Vec<usize>>, usize); 4] = [
        (&g2, WeylTwist::Identity, None, 6),
        (&g2, WeylTwist::Ree, Some(vec![2, 2, 2, 6]), 4),
        (&d4, WeylTwist::Identity, None, 13),
        (&d4, WeylTwist::Triality, None, 7),
    ];
    for (w, twist, sizes, count) in cases {
        let classes = w.sigma_classes(twist);
        let mut ours: Vec<usize> = classes.iter().map(Vec::len).collect();
        ours.sort_unstable();
        let name = w.root_system().kind();
        suite.record(classes.len() == count, || {
            format!(
                "{name}/{twist}: {} classes, expected {count}",
                classes.len()
            )
        });
        if let Some(s) = sizes {
            suite.record(ours == s, || {
                format!("{name}/{twist}: sizes {ours:?}, expected {s:?}")
            });
        }
        let oracle = orbit_sizes(w, twist);
        suite.record(ours == oracle, || {
            format!("{name}/{twist}: sizes {ours:?}, orbits {oracle:?}")
        });
        let covered: usize = ours.iter().sum();
        suite.record(covered == w.order(), || {
            format!("{name}/{twist}: classes cover {covered} elements")
        });
    }
    suite
}

fn random_monomial<R: Rng>(rng: &mut R) -> MonomialOrtho {
    let n = rng.gen_range(1..=4usize);
    let q = [3u64, 5, 7, 9, 25][rng.gen_range(0..5)];
    let field = Gf::of_order(q).expect("prime power");
    let mut pool: Vec<i32> = (1..=n as i32).collect();
    let images: Vec<i32> = (0..n)
        .map(|_| {
            let pick = pool.remove(rng.gen_range(0..pool.len()));
            if rng.gen_bool(0.5) {
                pick
            } else {
                -pick
            }
        })
        .collect();
    let phi = SignedPerm::new(images).expect("valid signed permutation");
    let scalars: Vec<u64> = (0..n).map(|_| rng.gen_range(1..field.size())).collect();
    let eps = if rng.gen_bool(0.5) { 1 } else { -1 };
    MonomialOrtho::from_signed(&field, &phi, &scalars, eps).expect("monomial isometry")
}

/// Spinor norms computed from two different reflection factorizations.
pub fn spinor_suite(seed: u64, count: usize, exec: Exec) -> SuiteResult {
    let mut rng = rng_for(seed, 2);
    let mats: Vec<MonomialOrtho> = (0..count).map(|_| random_monomial(&mut rng)).collect();
    let outcomes = exec.map(&mats, |g| {
        let a = g.spinor_norm_with(Factorization::Forward);
        let b = g.spinor_norm_with(Factorization::Reversed);
        match (a, b) {
            (Ok(x), Ok(y)) if x == y => Ok(()),
            (a, b) => Err(format!("{:?}: forward {a:?}, reversed {b:?}", g.matrix())),
        }
    });
    let mut suite = SuiteResult::new("spinor-factorization");
    for o in outcomes {
        let msg = o.as_ref().err().cloned();
        suite.record(o.is_ok(), || msg.unwrap_or_default());
    }
    suite
}
