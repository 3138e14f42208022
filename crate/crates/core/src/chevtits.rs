//! Chevalley structure constants, the integral adjoint representation, the
//! sign table `η`, and exact arithmetic in the Tits extended Weyl group.
//!
//! A Tits element is stored in normal form `h · ṅ_w`, where `h` is a bitmask
//! over `h_1..h_l` (`h_i = h_{r_i}(-1)`) and `ṅ_w` is the product of the simple
//! lifts `n_s` along the stored reduced word of `w`. Multiplication only needs
//! `n_s² = h_s`, the braid relations and the action of `W` on `ℋ`; the adjoint
//! representation is an independent oracle and the source of `η`.

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::rootsys::RootSystem;
use crate::weyl::{WeylGroup, WeylTwist};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

/// Structure constants `N_{r,s}` and signs `η_{s,r}` (simple `s`).
#[derive(Clone, Debug)]
pub struct StructureConstants {
    nr: usize,
    rank: usize,
    n: Vec<i64>,
    eta: Vec<i8>,
    extraspecial: Vec<(usize, usize)>,
}

/// Position of `x + k y`, if it is a root.
fn combo(sys: &RootSystem, x: usize, y: usize, k: i64) -> Option<usize> {
    let c: Vec<i64> = sys.roots()[x]
        .coeffs
        .iter()
        .zip(&sys.roots()[y].coeffs)
        .map(|(a, b)| a + k * b)
        .collect();
    sys.find(&c)
}

fn compute_n_table(sys: &RootSystem) -> (Vec<i64>, Vec<(usize, usize)>) {
    let np = sys.num_positive();
    let nr = sys.num_roots();
    let mut table = vec![0i64; nr * nr];
    let mut known = vec![false; nr * nr];
    let mut extraspecial = Vec::new();

    // N for an arbitrary pair, from positive pairs whose sums are lower.
    fn value(sys: &RootSystem, table: &[i64], known: &[bool], x: usize, y: usize) -> i64 {
        let nr = sys.num_roots();
        let Some(sum) = sys.sum(x, y) else { return 0 };
        let (px, py) = (sys.is_positive_position(x), sys.is_positive_position(y));
        if px && py {
            assert!(
                known[x * nr + y],
                "structure constant used before it was fixed"
            );
            return table[x * nr + y];
        }
        if !px && !py {
            return -value(sys, table, known, sys.neg_position(x), sys.neg_position(y));
        }
        let z = sys.neg_position(sum);
        let pz = sys.is_positive_position(z);
        if py == pz {
            // N_{x,y} (x,x) = N_{y,z} (z,z)
            let v = value(sys, table, known, y, z) * sys.norm(z);
            debug_assert_eq!(v % sys.norm(x), 0);
            v / sys.norm(x)
        } else {
            // N_{x,y} (y,y) = N_{z,x} (z,z)
            let v = value(sys, table, known, z, x) * sys.norm(z);
            debug_assert_eq!(v % sys.norm(y), 0);
            v / sys.norm(y)
        }
    }

    let mut order: Vec<usize> = (0..np).filter(|&p| sys.height(p) > 1).collect();
    order.sort_by_key(|&p| (sys.height(p), p));
    let lcm_norms: i64 = 6;
    for xi in order {
        let a = (0..np)
            .find(|&a| combo(sys, xi, a, -1).is_some_and(|b| b < np))
            .expect("non-simple positive root has a decomposition");
        let b = combo(sys, xi, a, -1).unwrap();
        let mut p = 0;
        while combo(sys, b, a, -(p + 1)).is_some() {
            p += 1;
        }
        let nab = p + 1;
        table[a * nr + b] = nab;
        table[b * nr + a] = -nab;
        known[a * nr + b] = true;
        known[b * nr + a] = true;
        extraspecial.push((a, b));
        let (na, nb) = (sys.neg_position(a), sys.neg_position(b));
        for r in 0..np {
            let Some(s) = combo(sys, xi, r, -1) else {
                continue;
            };
            if s >= np || r > s || r == a || r == b {
                continue;
            }
            let mut num = 0i64;
            if let Some(sa) = sys.sum(s, na) {
                let t = value(sys, &table, &known, s, na) * value(sys, &table, &known, r, nb);
                num += t * (lcm_norms / sys.norm(sa));
            }
            if let Some(ra) = sys.sum(r, na) {
                let t = value(sys, &table, &known, na, r) * value(sys, &table, &known, s, nb);
                num += t * (lcm_norms / sys.norm(ra));
            }
            num *= sys.norm(xi);
            let den = lcm_norms * nab;
            assert_eq!(num % den, 0, "inexact structure constant");
            let v = num / den;
            table[r * nr + s] = v;
            table[s * nr + r] = -v;
            known[r * nr + s] = true;
            known[s * nr + r] = true;
        }
    }
    let mut full = vec![0i64; nr * nr];
    for x in 0..nr {
        for y in 0..nr {
            full[x * nr + y] = value(sys, &table, &known, x, y);
        }
    }
    (full, extraspecial)
}

impl StructureConstants {
    pub fn compute(sys: &RootSystem) -> Self {
        let (n, extraspecial) = compute_n_table(sys);
        let nr = sys.num_roots();
        let rank = sys.rank();
        let mut sc = StructureConstants {
            nr,
            rank,
            n,
            eta: vec![0; rank * nr],
            extraspecial,
        };
        let adj = AdjointRep::new(sys, &sc);
        for s in 0..rank {
            let ns = adj.n(s);
            let ns_inv = adj.n_inv(s);
            for r in 0..nr {
                let conj = &(&ns * &adj.n(r)) * &ns_inv;
                let img = sys.reflect_position(s, r);
                sc.eta[s * nr + r] = if conj == adj.n(img) {
                    1
                } else if conj == adj.n_inv(img) {
                    -1
                } else {
                    panic!("conjugate of n_r is not a lift of n_(w_s r)")
                };
            }
        }
        sc
    }

    /// `N_{x,y}` by positions; zero when `x + y` is not a root.
    pub fn n_pos(&self, x: usize, y: usize) -> i64 {
        self.n[x * self.nr + y]
    }

    /// `N_{r,s}` by signed root numbers.
    pub fn n(&self, sys: &RootSystem, r: i32, s: i32) -> i64 {
        self.n_pos(sys.position(r), sys.position(s))
    }

    /// `η_{s,r}` for simple `s` (0-based) and root position `r`.
    pub fn eta_pos(&self, s: usize, r: usize) -> i8 {
        self.eta[s * self.nr + r]
    }

    pub fn eta(&self, sys: &RootSystem, s: usize, r: i32) -> i8 {
        self.eta_pos(s - 1, sys.position(r))
    }

    /// The chosen extraspecial pairs by position, one per non-simple positive root.
    pub fn extraspecial_pairs(&self) -> &[(usize, usize)] {
        &self.extraspecial
    }

    /// Deterministic text dump: one line per nonzero `N` and per `η`.
    pub fn dump(&self, sys: &RootSystem) -> String {
        let mut out = String::new();
        let mut idx: Vec<i32> = (0..self.nr).map(|p| sys.index_at(p)).collect();
        idx.sort_by_key(|&i| (i.abs(), i < 0));
        for &r in &idx {
            for &s in &idx {
                let v = self.n(sys, r, s);
                if v != 0 {
                    writeln!(out, "N {r} {s} {v}").unwrap();
                }
            }
        }
        for s in 1..=self.rank {
            for &r in &idx {
                writeln!(out, "eta {s} {r} {}", self.eta(sys, s, r)).unwrap();
            }
        }
        out
    }
}

/// The adjoint representation on the Chevalley basis `e_r` (by position),
/// followed by `h_1..h_l`.
#[derive(Clone, Debug)]
pub struct AdjointRep {
    dim: usize,
    rank: usize,
    nr: usize,
    /// `<r, r_i^vee>` for each root position and simple index.
    pairings: Vec<Vec<i64>>,
    n: Vec<IntMatrix>,
    n_inv: Vec<IntMatrix>,
    ad: Vec<IntMatrix>,
}

impl AdjointRep {
    pub fn new(sys: &RootSystem, sc: &StructureConstants) -> Self {
        let nr = sys.num_roots();
        let rank = sys.rank();
        let dim = nr + rank;
        let ad: Vec<IntMatrix> = (0..nr)
            .map(|x| {
                let mut m = IntMatrix::zeros(dim, dim);
                for y in 0..nr {
                    if y == sys.neg_position(x) {
                        for (i, c) in sys.coroot_coeffs_at(x).into_iter().enumerate() {
                            m[(nr + i, y)] = c;
                        }
                    } else if let Some(z) = sys.sum(x, y) {
                        m[(z, y)] = sc.n_pos(x, y);
                    }
                }
                for i in 0..rank {
                    m[(x, nr + i)] = -sys.pairing(x, i);
                }
                m
            })
            .collect();
        let pairings = (0..nr)
            .map(|x| (0..rank).map(|i| sys.pairing(x, i)).collect())
            .collect();
        let mut rep = AdjointRep {
            dim,
            rank,
            nr,
            pairings,
            n: Vec::new(),
            n_inv: Vec::new(),
            ad,
        };
        for x in 0..nr {
            let y = sys.neg_position(x);
            let a = &(&rep.x(x, 1) * &rep.x(y, -1)) * &rep.x(x, 1);
            let b = &(&rep.x(x, -1) * &rep.x(y, 1)) * &rep.x(x, -1);
            rep.n.push(a);
            rep.n_inv.push(b);
        }
        rep
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ad(&self, x: usize) -> &IntMatrix {
        &self.ad[x]
    }

    /// `x_r(t) = exp(t ad e_r)`, exact since `ad e_r` is nilpotent.
    pub fn x(&self, r: usize, t: i64) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.dim);
        let mut term = IntMatrix::identity(self.dim);
        let mut k = 1i64;
        loop {
            term = &term * &self.ad[r];
            if term == IntMatrix::zeros(self.dim, self.dim) {
                break;
            }
            let mut scaled = term.clone();
            let fact: i64 = (1..=k).product();
            let tk = t.pow(k as u32);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let v = scaled[(i, j)] * tk;
                    assert_eq!(v % fact, 0);
                    scaled[(i, j)] = v / fact;
                }
            }
            for i in 0..self.dim {
                for j in 0..self.dim {
                    acc[(i, j)] += scaled[(i, j)];
                }
            }
            k += 1;
        }
        acc
    }

    /// `n_r = x_r(1) x_{-r}(-1) x_r(1)`.
    pub fn n(&self, r: usize) -> IntMatrix {
        self.n[r].clone()
    }

    pub fn n_inv(&self, r: usize) -> IntMatrix {
        self.n_inv[r].clone()
    }

    /// Matrix of the `ℋ` element with bitmask `h`.
    pub fn h(&self, h: u8) -> IntMatrix {
        let mut m = IntMatrix::identity(self.dim);
        for x in 0..self.nr {
            let e: i64 = (0..self.rank)
                .filter(|i| h >> i & 1 == 1)
                .map(|i| self.pairings[x][i])
                .sum();
            if e.rem_euclid(2) == 1 {
                m[(x, x)] = -1;
            }
        }
        m
    }
}

/// Normal form `h · ṅ_w` with `w` a Weyl group id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TitsElement {
    pub h: u8,
    pub w: u16,
}

impl TitsElement {
    pub const IDENTITY: TitsElement = TitsElement { h: 0, w: 0 };

    pub fn weyl(&self) -> usize {
        self.w as usize
    }

    /// The `ℋ` coordinates as a 0/1 vector of length `rank`.
    pub fn h_vector(&self, rank: usize) -> Vec<u8> {
        (0..rank).map(|i| self.h >> i & 1).collect()
    }
}

pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// The Tits group of a root system, with precomputed tables.
#[derive(Clone, Debug)]
pub struct TitsGroup {
    weyl: WeylGroup,
    consts: StructureConstants,
    rank: usize,
    squares: Vec<u8>,
    /// `act[w * 2^l + h] = w ▷ h`.
    act: Vec<u8>,
    cocycle: Vec<u8>,
    lifts: Vec<TitsElement>,
}

fn bits_from_vec(v: &[i64]) -> u8 {
    v.iter()
        .enumerate()
        .filter(|(_, c)| c.rem_euclid(2) == 1)
        .fold(0u8, |acc, (i, _)| acc | 1 << i)
}

impl TitsGroup {
    pub fn new(sys: &RootSystem) -> Self {
        let squares = (0..sys.rank())
            .map(|i| bits_from_vec(&sys.coroot_coeffs_at(i)))
            .collect();
        Self::with_squares(sys, squares)
    }

    /// Refuses characteristic two, where `ℋ` is trivial and the model does not apply.
    pub fn for_field(sys: &RootSystem, q: u64) -> Result<Self> {
        if q.is_multiple_of(2) {
            return Err(Error::CharacteristicTwo(q));
        }
        Ok(Self::new(sys))
    }

    /// Build with explicit values for `n_s²`; anything other than `h_s`
    /// gives a wrong group and exists for fault-injection tests.
    pub fn with_squares(sys: &RootSystem, squares: Vec<u8>) -> Self {
        let weyl = WeylGroup::new(sys);
        let consts = StructureConstants::compute(sys);
        let rank = sys.rank();
        let nw = weyl.order();
        let nh = 1usize << rank;
        let mut act = vec![0u8; nw * nh];
        for w in 0..nw {
            let m = weyl.coroot_action(w);
            for h in 0..nh {
                let v: Vec<i64> = (0..rank).map(|i| (h >> i & 1) as i64).collect();
                act[w * nh + h] = bits_from_vec(&m.mul_vec(&v));
            }
        }
        let mut g = TitsGroup {
            weyl,
            consts,
            rank,
            squares,
            act,
            cocycle: Vec::new(),
            lifts: Vec::new(),
        };
        g.cocycle = (0..nw * nw)
            .map(|k| g.walk_cocycle(k / nw, k % nw))
            .collect();
        g.lifts = g.build_root_lifts(sys);
        g
    }

    /// `c` with `ṅ_u ṅ_v = c · ṅ_{uv}`.
    fn walk_cocycle(&self, u: usize, v: usize) -> u8 {
        let nh = 1usize << self.rank;
        let mut acc = 0u8;
        let mut cur = u;
        for &s in self.weyl.reduced_word(v) {
            let next = self.weyl.mul(cur, self.weyl.simple(s));
            if self.weyl.length(next) < self.weyl.length(cur) {
                acc ^= self.act[next * nh + self.squares[s] as usize];
            }
            cur = next;
        }
        acc
    }

    fn build_root_lifts(&self, sys: &RootSystem) -> Vec<TitsElement> {
        let nr = sys.num_roots();
        let np = sys.num_positive();
        let mut lifts = vec![None; nr];
        for s in 0..self.rank {
            lifts[s] = Some(TitsElement {
                h: 0,
                w: self.weyl.simple(s) as u16,
            });
        }
        let mut order: Vec<usize> = (self.rank..np).collect();
        order.sort_by_key(|&p| (sys.height(p), p));
        for r in order {
            let (s, prev) = (0..self.rank)
                .map(|s| (s, sys.reflect_position(s, r)))
                .find(|&(_, p)| p < np && sys.height(p) < sys.height(r))
                .expect("a simple reflection lowers every non-simple positive root");
            let ns = lifts[s].unwrap();
            let conj = self.mul(self.mul(ns, lifts[prev].unwrap()), self.inv(ns));
            lifts[r] = Some(if self.consts.eta_pos(s, prev) == 1 {
                conj
            } else {
                self.inv(conj)
            });
        }
        for r in 0..np {
            lifts[r + np] = Some(self.inv(lifts[r].unwrap()));
        }
        lifts.into_iter().map(Option::unwrap).collect()
    }

    pub fn weyl(&self) -> &WeylGroup {
        &self.weyl
    }

    pub fn root_system(&self) -> &RootSystem {
        self.weyl.root_system()
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.consts
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `2^l · |W|`.
    pub fn order(&self) -> usize {
        (1 << self.rank) * self.weyl.order()
    }

    pub fn identity(&self) -> TitsElement {
        TitsElement::IDENTITY
    }

    /// `w ▷ h`: the action of `W` on `ℋ`.
    pub fn act(&self, w: usize, h: u8) -> u8 {
        self.act[(w << self.rank) + h as usize]
    }

    pub fn cocycle(&self, u: usize, v: usize) -> u8 {
        self.cocycle[u * self.weyl.order() + v]
    }

    pub fn mul(&self, a: TitsElement, b: TitsElement) -> TitsElement {
        let (u, v) = (a.weyl(), b.weyl());
        TitsElement {
            h: a.h ^ self.act(u, b.h) ^ self.cocycle(u, v),
            w: self.weyl.mul(u, v) as u16,
        }
    }

    pub fn inv(&self, a: TitsElement) -> TitsElement {
        let u = a.weyl();
        let ui = self.weyl.inv(u);
        TitsElement {
            h: self.act(ui, a.h ^ self.cocycle(u, ui)),
            w: ui as u16,
        }
    }

    pub fn pow(&self, a: TitsElement, k: usize) -> TitsElement {
        (0..k).fold(TitsElement::IDENTITY, |acc, _| self.mul(acc, a))
    }

    pub fn product(&self, xs: &[TitsElement]) -> TitsElement {
        xs.iter()
            .fold(TitsElement::IDENTITY, |acc, &x| self.mul(acc, x))
    }

    pub fn element_order(&self, a: TitsElement) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != TitsElement::IDENTITY {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// The canonical lift `n_r` for a signed root number.
    pub fn n(&self, root: i32) -> TitsElement {
        self.lifts[self.root_system().position(root)]
    }

    /// `h_i = h_{r_i}(-1)` for a simple index `i` (1-based).
    pub fn h(&self, i: usize) -> TitsElement {
        TitsElement {
            h: 1 << (i - 1),
            w: 0,
        }
    }

    /// `h_r(-1)` for any root, through the coroot expansion.
    pub fn h_root(&self, root: i32) -> TitsElement {
        TitsElement {
            h: bits_from_vec(&self.root_system().coroot_coeffs(root)),
            w: 0,
        }
    }

    pub fn from_h(&self, h: u8) -> TitsElement {
        TitsElement { h, w: 0 }
    }

    pub fn pi(&self, a: TitsElement) -> usize {
        a.weyl()
    }

    pub fn commutes(&self, a: TitsElement, b: TitsElement) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn commutator(&self, a: TitsElement, b: TitsElement) -> TitsElement {
        self.product(&[self.inv(a), self.inv(b), a, b])
    }

    /// Central iff it commutes with every simple lift.
    pub fn is_central(&self, a: TitsElement) -> bool {
        (0..self.rank).all(|s| self.commutes(a, self.lifts[s]))
    }

    /// All central elements lying over `w`.
    pub fn central_lifts(&self, w: usize) -> Vec<TitsElement> {
        (0..1u8 << self.rank)
            .map(|h| TitsElement { h, w: w as u16 })
            .filter(|&a| self.is_central(a))
            .collect()
    }

    /// The Frobenius twist on `𝒯`: trivial when split, otherwise the
    /// diagram symmetry permutes the simple lifts and the `h_i`.
    pub fn sigma(&self, twist: WeylTwist, a: TitsElement) -> TitsElement {
        match twist {
            WeylTwist::Identity => a,
            WeylTwist::Triality | WeylTwist::Ree => {
                let sys = self.root_system();
                let mut h = 0u8;
                for i in 0..self.rank {
                    if a.h >> i & 1 == 1 {
                        h |= 1 << sys.symmetry_on_simple(i).expect("twisted type");
                    }
                }
                let word = self.weyl.reduced_word(a.weyl());
                let lift = word.iter().fold(TitsElement::IDENTITY, |acc, &s| {
                    let t = sys.symmetry_on_simple(s).expect("twisted type");
                    self.mul(acc, self.lifts[t])
                });
                self.mul(self.from_h(h), lift)
            }
        }
    }

    /// Breadth-first closure of `gens` under multiplication.
    pub fn closure(&self, gens: &[TitsElement], cap: usize) -> Result<Vec<TitsElement>> {
        let mut seen: HashSet<TitsElement> = HashSet::from([TitsElement::IDENTITY]);
        let mut out = vec![TitsElement::IDENTITY];
        let mut queue = VecDeque::from([TitsElement::IDENTITY]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    if out.len() >= cap {
                        return Err(Error::ClosureCap { cap });
                    }
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Parse a word such as `h1n1n6`, `n12^-1` or `1`.
    pub fn parse_word(&self, word: &str) -> Result<TitsElement> {
        let sys = self.root_system();
        let bad = || Error::Parse(format!("bad Tits word `{word}`"));
        let s = word.replace([' ', '*', '·'], "");
        if s == "1" || s.is_empty() {
            return Ok(TitsElement::IDENTITY);
        }
        let bytes = s.as_bytes();
        let mut i = 0;
        let mut acc = TitsElement::IDENTITY;
        while i < bytes.len() {
            let kind = bytes[i];
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let k: i32 = s[start..i].parse().map_err(|_| bad())?;
            let mut inverse = false;
            if s[i..].starts_with("^-1") {
                inverse = true;
                i += 3;
            }
            let factor = match kind {
                b'n' if k >= 1 && k as usize <= sys.num_positive() => self.n(k),
                b'h' if k >= 1 && k as usize <= self.rank => self.h(k as usize),
                _ => return Err(bad()),
            };
            acc = self.mul(acc, if inverse { self.inv(factor) } else { factor });
        }
        Ok(acc)
    }

    /// Human-readable normal form, e.g. `h1·n1n2`.
    pub fn format(&self, a: TitsElement) -> String {
        let hs: String = (0..self.rank)
            .filter(|i| a.h >> i & 1 == 1)
            .map(|i| format!("h{}", i + 1))
            .collect();
        let ns: String = self
            .weyl
            .reduced_word(a.weyl())
            .iter()
            .map(|s| format!("n{}", s + 1))
            .collect();
        match (hs.is_empty(), ns.is_empty()) {
            (true, true) => "1".into(),
            (false, true) => hs,
            (true, false) => ns,
            (false, false) => format!("{hs}·{ns}"),
        }
    }

    pub fn adjoint(&self) -> AdjointRep {
        AdjointRep::new(self.root_system(), &self.consts)
    }

    /// Image in the adjoint representation.
    pub fn adjoint_matrix(&self, adj: &AdjointRep, a: TitsElement) -> IntMatrix {
        self.weyl
            .reduced_word(a.weyl())
            .iter()
            .fold(adj.h(a.h), |acc, &s| &acc * &adj.n(s))
    }

    /// Lookup table from element to its adjoint matrix, for oracle tests.
    pub fn adjoint_table(&self, adj: &AdjointRep) -> HashMap<TitsElement, IntMatrix> {
        (0..self.weyl.order())
            .flat_map(|w| (0..1u8 << self.rank).map(move |h| TitsElement { h, w: w as u16 }))
            .map(|a| (a, self.adjoint_matrix(adj, a)))
            .collect()
    }
}
