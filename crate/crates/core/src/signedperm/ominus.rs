//! A concrete model of the torus normalizer in `Ω⁻_{2n}(q)`, `q` an odd
//! prime, and an exhaustive search for lifts of small centralizer subgroups.
//!
//! The space is an orthogonal sum of one block per cycle:
//! * a positive `n_i`-cycle gives `F_{q^{n_i}}²` with `Q(a,b) = Tr(ab)`,
//!   torus `λ ↦ (λa, λ⁻¹b)` of order `q^{n_i} - 1`;
//! * a negative `n_i`-cycle gives `F_{q^{2n_i}}` with
//!   `Q(a) = Tr_{q^{n_i}/q}(a^{q^{n_i}+1})`, torus `λa` with
//!   `λ^{q^{n_i}+1} = 1`.
//!
//! Field automorphisms, the swap `(a,b) ↦ (b,a)` and transport between
//! identical blocks normalize the torus and form a complement `Γ` to it in
//! the full orthogonal normalizer. Elements are pairs `(t, γ)` with `t` an
//! exponent vector over the cyclic torus factors, and spinor norms and
//! determinants are homomorphisms read off from their values on generators,
//! each computed once from an explicit matrix by reflection factorization.
//!
//! A complement to `T̃` in `Ñ` restricts to any subgroup `S` of the Weyl
//! centralizer as a map `s ↦ (f(s), s)` into `N ∩ Ω` that is multiplicative
//! modulo `Z = Ω ∩ {±1}`; `f` is then a crossed homomorphism into `T/Z` with
//! square spinor norm on each lift. No such `f` means no complement.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::gf::{Elem, Gf};
use super::ortho::{FMatrix, QuadSpace};
use super::{CycleEntry, CycleType};
use crate::arith;
use crate::error::{Error, Result};
use crate::linmod;
use crate::par::Exec;

/// Which non-splitting configuration is being tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LemmaCase {
    /// Four cycles `(n̄1)(n2)(n3)(n4)` or `(n̄1)(n̄2)(n̄3)(n4)`, `n1, n4` even,
    /// `n2 = n3` odd; subgroup `⟨χ2, τ1, τ4⟩`.
    M4,
    /// Three cycles `(n1)(n2)(n̄3)` or `(n̄1)(n̄2)(n̄3)`, `n1 = n2` odd, `n3`
    /// even; subgroup `⟨χ1, ϖ3τ1⟩`.
    M3,
    /// Two cycles `(n̄1)(n2)`, `n1 = n2` even; subgroup `⟨ω2, τ1, τ2⟩`.
    M2,
}

impl LemmaCase {
    pub const ALL: [LemmaCase; 3] = [LemmaCase::M4, LemmaCase::M3, LemmaCase::M2];

    /// Reorders `ct` into the case's template, if it fits.
    pub fn arrange(self, ct: &CycleType) -> Option<Vec<CycleEntry>> {
        let e = &ct.entries;
        let want = match self {
            LemmaCase::M4 => 4,
            LemmaCase::M3 => 3,
            LemmaCase::M2 => 2,
        };
        if e.len() != want {
            return None;
        }
        permutations(e.len())
            .into_iter()
            .map(|p| p.iter().map(|&i| e[i]).collect::<Vec<_>>())
            .find(|a| self.fits(a))
    }

    fn fits(self, a: &[CycleEntry]) -> bool {
        let even = |x: &CycleEntry| x.len.is_multiple_of(2);
        match self {
            LemmaCase::M4 => {
                a[0].negative
                    && even(&a[0])
                    && a[1] == a[2]
                    && a[1].len % 2 == 1
                    && !a[3].negative
                    && even(&a[3])
            }
            LemmaCase::M3 => a[0] == a[1] && a[0].len % 2 == 1 && a[2].negative && even(&a[2]),
            LemmaCase::M2 => a[0].negative && !a[1].negative && a[0].len == a[1].len && even(&a[0]),
        }
    }

    /// The first case whose template `ct` fits.
    pub fn detect(ct: &CycleType) -> Option<LemmaCase> {
        Self::ALL.into_iter().find(|c| c.arrange(ct).is_some())
    }

    fn generators(self, blocks: &[CycleEntry]) -> Vec<(String, Sym)> {
        let nb = blocks.len();
        let tau = |j: usize| {
            let mut g = Sym::identity(nb);
            if blocks[j].negative {
                g.frob[j] = blocks[j].len as u32;
            } else {
                g.swap[j] = 1;
            }
            g
        };
        let chi = |j: usize| {
            let mut g = Sym::identity(nb);
            g.perm.swap(j, j + 1);
            g
        };
        match self {
            LemmaCase::M4 => vec![
                ("chi2".into(), chi(1)),
                ("tau1".into(), tau(0)),
                ("tau4".into(), tau(3)),
            ],
            LemmaCase::M3 => {
                let mut g = tau(0);
                g.frob[2] = 1;
                vec![("chi1".into(), chi(0)), ("varpi3tau1".into(), g)]
            }
            LemmaCase::M2 => {
                let mut omega = Sym::identity(nb);
                omega.frob[1] = 1;
                vec![
                    ("omega2".into(), omega),
                    ("tau1".into(), tau(0)),
                    ("tau2".into(), tau(1)),
                ]
            }
        }
    }
}

impl fmt::Display for LemmaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaCase::M4 => "m4",
            LemmaCase::M3 => "m3",
            LemmaCase::M2 => "m2",
        })
    }
}

impl FromStr for LemmaCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m4" | "4" | "m=4" => Ok(LemmaCase::M4),
            "m3" | "3" | "m=3" => Ok(LemmaCase::M3),
            "m2" | "2" | "m=2" => Ok(LemmaCase::M2),
            _ => Err(Error::Parse(format!("unknown lemma case `{s}`"))),
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

/// An element of `Γ`: block `j` is carried to block `perm[j]` after the local
/// map `x ↦ x^{q^frob[j]}` (and, on positive blocks, the swap if `swap[j]`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym {
    perm: Vec<usize>,
    frob: Vec<u32>,
    swap: Vec<u8>,
}

impl Sym {
    pub fn identity(nb: usize) -> Self {
        Sym {
            perm: (0..nb).collect(),
            frob: vec![0; nb],
            swap: vec![0; nb],
        }
    }
}

#[derive(Clone, Debug)]
struct Block {
    entry: CycleEntry,
    field: Gf,
    /// Order of the cyclic torus factor.
    order: u64,
    /// Generator of the torus factor.
    gen: Elem,
    /// Order of the local Frobenius.
    frob_order: u32,
}

/// The block model for one cycle arrangement.
#[derive(Clone, Debug)]
pub struct BlockModel {
    q: u64,
    base: Gf,
    blocks: Vec<Block>,
    offsets: Vec<usize>,
    space: QuadSpace,
    theta_torus: Vec<u8>,
    theta_frob: Vec<u8>,
    theta_swap: Vec<u8>,
    det_frob: Vec<u8>,
    det_swap: Vec<u8>,
    theta_transpose: BTreeMap<CycleEntry, u8>,
    det_transpose: BTreeMap<CycleEntry, u8>,
}

type BlockVec = Vec<(Elem, Elem)>;

impl BlockModel {
    pub fn new(entries: &[CycleEntry], q: u64) -> Result<Self> {
        if arith::prime_power(q).map(|(_, e)| e) != Some(1) || q == 2 {
            return Err(Error::HypothesesNotMet(format!(
                "q = {q} must be an odd prime"
            )));
        }
        let k = entries.iter().filter(|e| e.negative).count();
        if k % 2 == 0 {
            return Err(Error::HypothesesNotMet(format!(
                "{k} negative cycles; a minus-type space needs an odd number"
            )));
        }
        let base = Gf::new(q, 1)?;
        let mut blocks = Vec::new();
        let mut offsets = Vec::new();
        let mut off = 0;
        for &entry in entries {
            let n = entry.len;
            let (field, order) = if entry.negative {
                (Gf::new(q, 2 * n)?, q.pow(n as u32) + 1)
            } else {
                (Gf::new(q, n)?, q.pow(n as u32) - 1)
            };
            let prim = field.primitive_element();
            let gen = field.pow(prim, ((field.size() - 1) / order) as u128);
            let frob_order = if entry.negative { 2 * n } else { n } as u32;
            blocks.push(Block {
                entry,
                field,
                order,
                gen,
                frob_order,
            });
            offsets.push(off);
            off += 2 * n;
        }
        let mut model = BlockModel {
            q,
            base: base.clone(),
            blocks,
            offsets,
            space: QuadSpace::new(base.clone(), vec![vec![0; off]; off])?,
            theta_torus: vec![],
            theta_frob: vec![],
            theta_swap: vec![],
            det_frob: vec![],
            det_swap: vec![],
            theta_transpose: BTreeMap::new(),
            det_transpose: BTreeMap::new(),
        };
        model.space = QuadSpace::new(base, model.polar_matrix())?;
        model.calibrate()?;
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.offsets.last().map_or(0, |&o| o) + self.blocks.last().map_or(0, |b| 2 * b.entry.len)
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn torus_orders(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.order).collect()
    }

    pub fn torus_order(&self) -> u128 {
        self.blocks.iter().map(|b| b.order as u128).product()
    }

    /// `q^d`-th power for the block's field.
    fn frob_pow(&self, b: &Block, x: Elem, k: u32) -> Elem {
        if k == 0 || x == 0 {
            return x;
        }
        b.field.pow(x, (self.q as u128).pow(k))
    }

    fn quad_block(&self, b: &Block, (x, y): (Elem, Elem)) -> Elem {
        let f = &b.field;
        let n = b.entry.len;
        let val = if b.entry.negative {
            let nx = f.mul(x, self.frob_pow(b, x, n as u32));
            // Tr from F_{q^n} to F_q of an element of the subfield
            let mut acc = 0;
            let mut c = nx;
            for _ in 0..n {
                acc = f.add(acc, c);
                c = self.frob_pow(b, c, 1);
            }
            acc
        } else {
            f.trace_to(f.mul(x, y), 1)
        };
        debug_assert!(val < self.q);
        val
    }

    fn quad(&self, v: &BlockVec) -> Elem {
        let f = &self.base;
        self.blocks
            .iter()
            .zip(v)
            .fold(0, |acc, (b, &x)| f.add(acc, self.quad_block(b, x)))
    }

    fn basis_vector(&self, c: usize) -> BlockVec {
        let mut v: BlockVec = vec![(0, 0); self.blocks.len()];
        let j = self.offsets.iter().rposition(|&o| o <= c).unwrap();
        let b = &self.blocks[j];
        let local = c - self.offsets[j];
        let width = if b.entry.negative {
            2 * b.entry.len
        } else {
            b.entry.len
        };
        let mut coords = vec![0u64; width];
        coords[local % width] = 1;
        let x = b.field.from_coords(&coords);
        v[j] = if local < width { (x, 0) } else { (0, x) };
        v
    }

    fn flatten(&self, v: &BlockVec) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.dim());
        for (b, &(x, y)) in self.blocks.iter().zip(v) {
            out.extend(b.field.coords(x));
            if !b.entry.negative {
                out.extend(b.field.coords(y));
            }
        }
        out
    }

    fn polar_matrix(&self) -> FMatrix {
        let f = &self.base;
        let d = self.dim();
        let basis: Vec<BlockVec> = (0..d).map(|c| self.basis_vector(c)).collect();
        let qs: Vec<Elem> = basis.iter().map(|v| self.quad(v)).collect();
        let mut m = vec![vec![0; d]; d];
        for i in 0..d {
            for j in 0..d {
                let s = self.add_vec(&basis[i], &basis[j]);
                m[i][j] = f.sub(f.sub(self.quad(&s), qs[i]), qs[j]);
            }
        }
        m
    }

    fn add_vec(&self, u: &BlockVec, v: &BlockVec) -> BlockVec {
        self.blocks
            .iter()
            .zip(u.iter().zip(v))
            .map(|(b, (&(a, c), &(x, y)))| (b.field.add(a, x), b.field.add(c, y)))
            .collect()
    }

    /// The isometry `(t, γ)` applied to a vector.
    fn apply(&self, t: &[u64], g: &Sym, v: &BlockVec) -> BlockVec {
        let mut out: BlockVec = vec![(0, 0); self.blocks.len()];
        for (j, b) in self.blocks.iter().enumerate() {
            let (x, y) = v[j];
            let mut img = (
                self.frob_pow(b, x, g.frob[j]),
                self.frob_pow(b, y, g.frob[j]),
            );
            if g.swap[j] == 1 {
                img = (img.1, img.0);
            }
            out[g.perm[j]] = img;
        }
        for (j, b) in self.blocks.iter().enumerate() {
            let f = &b.field;
            let lam = f.pow(b.gen, t[j] as u128);
            let (x, y) = out[j];
            out[j] = (
                f.mul(lam, x),
                if b.entry.negative {
                    0
                } else {
                    f.mul(f.inv(lam), y)
                },
            );
        }
        out
    }

    /// Matrix over `GF(q)` of `(t, γ)`.
    pub fn matrix(&self, t: &[u64], g: &Sym) -> FMatrix {
        let d = self.dim();
        let cols: Vec<Vec<Elem>> = (0..d)
            .map(|c| self.flatten(&self.apply(t, g, &self.basis_vector(c))))
            .collect();
        (0..d)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect()
    }

    fn measure(&self, t: &[u64], g: &Sym) -> Result<(u8, u8)> {
        let (cls, det) = self.space.spinor_norm(&self.matrix(t, g))?;
        Ok((cls.bit(), u8::from(det < 0)))
    }

    fn calibrate(&mut self) -> Result<()> {
        let nb = self.blocks.len();
        let zero = vec![0u64; nb];
        for j in 0..nb {
            let mut t = zero.clone();
            t[j] = 1;
            let (th, det) = self.measure(&t, &Sym::identity(nb))?;
            if det != 0 {
                return Err(Error::NotOrthogonal);
            }
            self.theta_torus.push(th);
            let mut g = Sym::identity(nb);
            g.frob[j] = 1;
            let (th, det) = self.measure(&zero, &g)?;
            self.theta_frob.push(th);
            self.det_frob.push(det);
            let mut g = Sym::identity(nb);
            let (th, det) = if self.blocks[j].entry.negative {
                (0, 0)
            } else {
                g.swap[j] = 1;
                self.measure(&zero, &g)?
            };
            self.theta_swap.push(th);
            self.det_swap.push(det);
        }
        for j in 0..nb {
            for i in 0..j {
                let e = self.blocks[j].entry;
                if self.blocks[i].entry == e && !self.theta_transpose.contains_key(&e) {
                    let mut g = Sym::identity(nb);
                    g.perm.swap(i, j);
                    let (th, det) = self.measure(&zero, &g)?;
                    self.theta_transpose.insert(e, th);
                    self.det_transpose.insert(e, det);
                }
            }
        }
        Ok(())
    }

    fn transposition_parity(&self, g: &Sym, entry: CycleEntry) -> u8 {
        let idx: Vec<usize> = (0..self.blocks.len())
            .filter(|&j| self.blocks[j].entry == entry)
            .collect();
        let mut seen = vec![false; self.blocks.len()];
        let mut parity = 0;
        for &j in &idx {
            let mut len = 0;
            let mut x = j;
            while !seen[x] {
                seen[x] = true;
                x = g.perm[x];
                len += 1;
            }
            if len > 0 {
                parity ^= ((len - 1) % 2) as u8;
            }
        }
        parity
    }

    /// Spinor norm bit and determinant bit of `(t, γ)` from the calibrated
    /// homomorphisms.
    pub fn theta_det(&self, t: &[u64], g: &Sym) -> (u8, u8) {
        let mut th = 0u8;
        let mut det = 0u8;
        for j in 0..self.blocks.len() {
            th ^= (t[j] as u8 & 1) & self.theta_torus[j];
            th ^= (g.frob[j] as u8 & 1) & self.theta_frob[j];
            det ^= (g.frob[j] as u8 & 1) & self.det_frob[j];
            th ^= g.swap[j] & self.theta_swap[j];
            det ^= g.swap[j] & self.det_swap[j];
        }
        for (e, &bit) in &self.theta_transpose {
            let par = self.transposition_parity(g, *e);
            th ^= par & bit;
            det ^= par & self.det_transpose[e];
        }
        (th, det)
    }

    /// Spinor norm and determinant straight from the matrix.
    pub fn theta_det_direct(&self, t: &[u64], g: &Sym) -> Result<(u8, u8)> {
        self.measure(t, g)
    }

    /// `γ t γ⁻¹` on exponent vectors.
    pub fn act(&self, g: &Sym, t: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; t.len()];
        for (j, b) in self.blocks.iter().enumerate() {
            let o = b.order as u128;
            let mut e = t[j] as u128
                * arith::pow_mod(self.q as i128, g.frob[j] as u64, o as i128) as u128
                % o;
            if g.swap[j] == 1 {
                e = (o - e) % o;
            }
            out[g.perm[j]] = e as u64;
        }
        out
    }

    /// `a ∘ b`.
    pub fn compose(&self, a: &Sym, b: &Sym) -> Sym {
        let nb = self.blocks.len();
        let mut out = Sym::identity(nb);
        for j in 0..nb {
            let mid = b.perm[j];
            out.perm[j] = a.perm[mid];
            out.frob[j] = (b.frob[j] + a.frob[mid]) % self.blocks[j].frob_order;
            out.swap[j] = b.swap[j] ^ a.swap[mid];
        }
        out
    }

    pub fn add_torus(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.blocks)
            .map(|((&x, &y), blk)| (x + y) % blk.order)
            .collect()
    }

    /// Exponents of `-1`.
    pub fn minus_one(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.order / 2).collect()
    }

    pub fn minus_one_in_omega(&self) -> bool {
        self.theta_det(&self.minus_one(), &Sym::identity(self.blocks.len()))
            .0
            == 0
    }

    /// Product `(t1, g1)(t2, g2)`.
    pub fn mul(&self, (t1, g1): (&[u64], &Sym), (t2, g2): (&[u64], &Sym)) -> (Vec<u64>, Sym) {
        (self.add_torus(t1, &self.act(g1, t2)), self.compose(g1, g2))
    }

    fn all_torus(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for b in &self.blocks {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..b.order).map(move |e| {
                        let mut t = t.clone();
                        t.push(e);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

/// Cayley data of a finite subgroup of `Γ` given by generators.
struct Cayley {
    elems: Vec<Sym>,
    /// `(parent, generator)` for every element but the identity.
    tree: Vec<(usize, usize)>,
    /// `edges[x][g] = index of x·s_g`.
    edges: Vec<Vec<usize>>,
}

impl Cayley {
    fn build(model: &BlockModel, gens: &[Sym], cap: usize) -> Result<Self> {
        let id = Sym::identity(model.num_blocks());
        let mut index: HashMap<Sym, usize> = HashMap::from([(id.clone(), 0)]);
        let mut elems = vec![id];
        let mut tree = vec![(0, 0)];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (gi, g) in gens.iter().enumerate() {
                let y = model.compose(&elems[x], g);
                if !index.contains_key(&y) {
                    if elems.len() >= cap {
                        return Err(Error::ClosureCap { cap });
                    }
                    index.insert(y.clone(), elems.len());
                    elems.push(y);
                    tree.push((x, gi));
                    queue.push_back(elems.len() - 1);
                }
            }
        }
        let edges = elems
            .iter()
            .map(|x| gens.iter().map(|g| index[&model.compose(x, g)]).collect())
            .collect();
        Ok(Cayley { elems, tree, edges })
    }

    /// Does `s_g ↦ (ts[g], s_g)` extend to a map multiplicative modulo `z`?
    fn consistent(&self, model: &BlockModel, ts: &[Vec<u64>], z: Option<&[u64]>) -> bool {
        let nb = model.num_blocks();
        let mut f: Vec<Vec<u64>> = vec![vec![0; nb]; self.elems.len()];
        for x in 1..self.elems.len() {
            let (p, g) = self.tree[x];
            f[x] = model.add_torus(&f[p], &model.act(&self.elems[p], &ts[g]));
        }
        let eq = |a: &[u64], b: &[u64]| a == b || z.is_some_and(|z| model.add_torus(a, z) == b);
        (0..self.elems.len()).all(|x| {
            ts.iter().enumerate().all(|(g, t)| {
                let lhs = model.add_torus(&f[x], &model.act(&self.elems[x], t));
                eq(&lhs, &f[self.edges[x][g]])
            })
        })
    }
}

/// Outcome of an obstruction search.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub cycle_type: String,
    pub q: u64,
    pub lemma_case: LemmaCase,
    pub arrangement: String,
    pub generators: Vec<String>,
    pub subgroup_order: usize,
    pub torus_order: u128,
    pub minus_one_in_omega: bool,
    /// Lifts into the full normalizer (spinor norms ignored) exist.
    pub relations_solvable: bool,
    /// Lifts inside `Ω` exist.
    pub omega_solvable: bool,
    /// Torus exponents of an `Ω` lift system, when one exists.
    pub witness: Option<Vec<Vec<u64>>>,
    /// No lift system inside `Ω`: the torus has no complement.
    pub obstruction: bool,
}

const SUBGROUP_CAP: usize = 100_000;

fn search(
    model: &BlockModel,
    gens: &[Sym],
    require_omega: bool,
    z: Option<&[u64]>,
    exec: Exec,
) -> Result<Option<Vec<Vec<u64>>>> {
    let nb = model.num_blocks();
    let levels: Vec<Cayley> = (1..=gens.len())
        .map(|j| Cayley::build(model, &gens[..j], SUBGROUP_CAP))
        .collect::<Result<_>>()?;
    let torus = model.all_torus();
    let canonical = |t: &Vec<u64>| match z {
        Some(z) => {
            let s = model.add_torus(t, z);
            *t <= s
        }
        None => true,
    };
    let candidates: Vec<Vec<Vec<u64>>> = gens
        .iter()
        .map(|g| {
            let (tg, _) = model.theta_det(&vec![0; nb], g);
            torus
                .iter()
                .filter(|t| canonical(t))
                .filter(|t| !require_omega || model.theta_det(t, &Sym::identity(nb)).0 == tg)
                .cloned()
                .collect()
        })
        .collect();

    fn dfs(
        model: &BlockModel,
        levels: &[Cayley],
        candidates: &[Vec<Vec<u64>>],
        z: Option<&[u64]>,
        ts: &mut Vec<Vec<u64>>,
    ) -> bool {
        let j = ts.len();
        if j == candidates.len() {
            return true;
        }
        for t in &candidates[j] {
            ts.push(t.clone());
            if levels[j].consistent(model, ts, z) && dfs(model, levels, candidates, z, ts) {
                return true;
            }
            ts.pop();
        }
        false
    }

    if gens.is_empty() {
        return Ok(Some(vec![]));
    }
    Ok(exec.find_map_first(candidates[0].len(), |i| {
        let mut ts = vec![candidates[0][i].clone()];
        if !levels[0].consistent(model, &ts, z) {
            return None;
        }
        dfs(model, &levels, &candidates, z, &mut ts).then_some(ts)
    }))
}

/// Exact solution of the lift problem as a linear system.
///
/// With `A = T/Z ≅ ⊕ Z/d_i` in Smith coordinates, `f` is determined by its
/// values `y_g ∈ A` on the generators; propagating along a spanning tree of
/// the Cayley graph expresses `f(x)` linearly in the `y_g`, every remaining
/// edge gives congruences, and the spinor norm condition adds one parity row
/// per generator.
fn solve_linear(
    model: &BlockModel,
    gens: &[Sym],
    require_omega: bool,
    z: Option<&[u64]>,
    exec: Exec,
) -> Result<Option<Vec<Vec<u64>>>> {
    let nb = model.num_blocks();
    let r = gens.len();
    if r == 0 {
        return Ok(Some(vec![]));
    }
    let orders = model.torus_orders();
    let mut lattice: Vec<Vec<i128>> = (0..nb)
        .map(|i| {
            (0..nb)
                .map(|j| if i == j { orders[i] as i128 } else { 0 })
                .collect()
        })
        .collect();
    if let Some(z) = z {
        for (row, &zi) in lattice.iter_mut().zip(z) {
            row.push(zi as i128);
        }
    }
    let (u, uinv, d) = linmod::smith_left(&lattice);
    let mat_mul = |a: &[Vec<i128>], b: &[Vec<i128>]| -> Vec<Vec<i128>> {
        (0..nb)
            .map(|i| {
                (0..nb)
                    .map(|j| (0..nb).map(|k| a[i][k] * b[k][j]).sum())
                    .collect()
            })
            .collect()
    };
    // γ on y-coordinates: U G U⁻¹, rows reduced mod d_i
    let action = |g: &Sym| -> Vec<Vec<i128>> {
        let mut m = vec![vec![0i128; nb]; nb];
        for j in 0..nb {
            let o = orders[j] as i128;
            let mut c = arith::pow_mod(model.q as i128, g.frob[j] as u64, o);
            if g.swap[j] == 1 {
                c = -c;
            }
            m[g.perm[j]][j] = c;
        }
        let mut out = mat_mul(&mat_mul(&u, &m), &uinv);
        for (row, &di) in out.iter_mut().zip(&d) {
            for x in row.iter_mut() {
                *x = arith::rem(*x, di);
            }
        }
        out
    };
    let cayley = Cayley::build(model, gens, SUBGROUP_CAP)?;
    let size = cayley.elems.len();
    let ncols = r * nb;
    let actions: Vec<Vec<Vec<i128>>> = exec.map(&cayley.elems, action);
    // f[x] as an nb × ncols matrix
    let step = |fx: &[Vec<i128>], x: usize, g: usize| -> Vec<Vec<i128>> {
        let mut out = fx.to_vec();
        for i in 0..nb {
            for k in 0..nb {
                let c = &mut out[i][g * nb + k];
                *c = arith::rem(*c + actions[x][i][k], d[i]);
            }
        }
        out
    };
    let mut f: Vec<Vec<Vec<i128>>> = vec![vec![vec![0; ncols]; nb]; size];
    for x in 1..size {
        let (p, g) = cayley.tree[x];
        f[x] = step(&f[p], p, g);
    }
    let mut rows: Vec<linmod::Congruence> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for x in 0..size {
        for g in 0..r {
            let lhs = step(&f[x], x, g);
            let target = &f[cayley.edges[x][g]];
            for i in 0..nb {
                if d[i] <= 1 {
                    continue;
                }
                let coeffs: Vec<i64> = (0..ncols)
                    .map(|c| arith::rem(lhs[i][c] - target[i][c], d[i]) as i64)
                    .collect();
                if coeffs.iter().any(|&c| c != 0) && seen.insert((coeffs.clone(), i)) {
                    rows.push(linmod::Congruence {
                        coeffs,
                        rhs: 0,
                        modulus: d[i] as u64,
                    });
                }
            }
        }
    }
    if require_omega {
        let theta_y: Vec<i64> = (0..nb)
            .map(|k| {
                let s: i128 = (0..nb)
                    .map(|i| model.theta_torus[i] as i128 * uinv[i][k])
                    .sum();
                arith::rem(s, 2) as i64
            })
            .collect();
        for (g, s) in gens.iter().enumerate() {
            let mut coeffs = vec![0i64; ncols];
            coeffs[g * nb..(g + 1) * nb].copy_from_slice(&theta_y);
            rows.push(linmod::Congruence {
                coeffs,
                rhs: model.theta_det(&vec![0; nb], s).0 as i64,
                modulus: 2,
            });
        }
    }
    let Some(y) = linmod::solve_congruences(ncols, &rows) else {
        return Ok(None);
    };
    let ts: Vec<Vec<u64>> = (0..r)
        .map(|g| {
            (0..nb)
                .map(|i| {
                    let s: i128 = (0..nb).map(|k| uinv[i][k] * y[g * nb + k] as i128).sum();
                    arith::rem(s, orders[i] as i128) as u64
                })
                .collect()
        })
        .collect();
    let theta_ok = !require_omega
        || ts.iter().zip(gens).all(|(t, s)| {
            model.theta_det(t, &Sym::identity(nb)).0 == model.theta_det(&vec![0; nb], s).0
        });
    if !theta_ok || !cayley.consistent(model, &ts, z) {
        return Err(Error::NoSolution(
            "linear lift solution failed verification".into(),
        ));
    }
    Ok(Some(ts))
}

/// Full search with a report.
pub fn obstruction_report(
    ct: &CycleType,
    q: u64,
    case: LemmaCase,
    exec: Exec,
) -> Result<ObstructionReport> {
    let arranged = case.arrange(ct).ok_or_else(|| {
        Error::HypothesesNotMet(format!("{ct} does not fit the {case} configuration"))
    })?;
    if q > 7 || arranged.iter().any(|e| e.len > 3) {
        return Err(Error::HypothesesNotMet(format!(
            "{ct} at q = {q} is beyond the enumeration bounds (parts ≤ 3, q ≤ 7)"
        )));
    }
    let model = BlockModel::new(&arranged, q)?;
    let named = case.generators(&arranged);
    let gens: Vec<Sym> = named.iter().map(|(_, g)| g.clone()).collect();
    let nb = model.num_blocks();
    for (name, g) in &named {
        if model.theta_det(&vec![0; nb], g).1 != 0 {
            return Err(Error::HypothesesNotMet(format!(
                "{name} has no lift of determinant 1"
            )));
        }
    }
    let z_vec = model.minus_one();
    let z = model.minus_one_in_omega().then_some(z_vec.as_slice());
    let relations_solvable = search(&model, &gens, false, z, exec)?.is_some();
    let witness = search(&model, &gens, true, z, exec)?;
    let subgroup_order = Cayley::build(&model, &gens, SUBGROUP_CAP)?.elems.len();
    Ok(ObstructionReport {
        cycle_type: ct.to_string(),
        q,
        lemma_case: case,
        arrangement: CycleType {
            entries: arranged.clone(),
        }
        .to_string(),
        generators: named.into_iter().map(|(n, _)| n).collect(),
        subgroup_order,
        torus_order: model.torus_order(),
        minus_one_in_omega: z.is_some(),
        relations_solvable,
        omega_solvable: witness.is_some(),
        obstruction: witness.is_none(),
        witness,
    })
}

/// `true` iff no lift of the case's centralizer subgroup into `Ω` is
/// multiplicative modulo the centre, so `T̃` has no complement in `Ñ`.
pub fn obstruction_check(ct: &CycleType, q: u64, case: LemmaCase) -> Result<bool> {
    Ok(obstruction_report(ct, q, case, Exec::default())?.obstruction)
}

/// Outcome of a search for a complement to the whole torus.
#[derive(Clone, Debug, Serialize)]
pub struct ComplementSearch {
    pub cycle_type: String,
    pub q: u64,
    pub torus_order: u128,
    /// `|N ∩ Ω : T ∩ Ω|`.
    pub weyl_order: usize,
    pub generators: usize,
    pub minus_one_in_omega: bool,
    pub complement_found: bool,
    pub witness: Option<Vec<Vec<u64>>>,
}

impl BlockModel {
    /// The whole of `Γ` for the model's blocks.
    fn gamma(&self) -> Result<Vec<Sym>> {
        let nb = self.num_blocks();
        let mut gens = Vec::new();
        for (j, b) in self.blocks.iter().enumerate() {
            let mut g = Sym::identity(nb);
            g.frob[j] = 1 % b.frob_order;
            gens.push(g);
            if !b.entry.negative {
                let mut g = Sym::identity(nb);
                g.swap[j] = 1;
                gens.push(g);
            }
            for i in 0..j {
                if self.blocks[i].entry == b.entry {
                    let mut g = Sym::identity(nb);
                    g.perm.swap(i, j);
                    gens.push(g);
                }
            }
        }
        Ok(Cayley::build(self, &gens, SUBGROUP_CAP)?.elems)
    }

    /// Elements of `Γ` with a lift into `Ω`: determinant one, and a spinor
    /// norm the torus can cancel.
    fn gamma_omega(&self) -> Result<Vec<Sym>> {
        let nb = self.num_blocks();
        let zero = vec![0; nb];
        let torus_hits_nonsquares = self.theta_torus.contains(&1);
        Ok(self
            .gamma()?
            .into_iter()
            .filter(|g| {
                let (th, det) = self.theta_det(&zero, g);
                det == 0 && (th == 0 || torus_hits_nonsquares)
            })
            .collect())
    }

    /// A small generating set, greedily taken in enumeration order.
    fn generating_set(&self, group: &[Sym]) -> Result<Vec<Sym>> {
        let mut gens: Vec<Sym> = Vec::new();
        let mut span: std::collections::HashSet<Sym> =
            std::collections::HashSet::from([Sym::identity(self.num_blocks())]);
        let mut sorted = group.to_vec();
        sorted.sort_by_key(|g| {
            let moved = g.perm.iter().enumerate().filter(|(i, &p)| *i != p).count();
            let local = g.frob.iter().filter(|&&f| f != 0).count()
                + g.swap.iter().filter(|&&s| s != 0).count();
            (moved + local, g.clone())
        });
        for g in sorted {
            if span.len() == group.len() {
                break;
            }
            if !span.contains(&g) {
                gens.push(g);
                span = Cayley::build(self, &gens, SUBGROUP_CAP)?
                    .elems
                    .into_iter()
                    .collect();
            }
        }
        Ok(gens)
    }
}

struct ComplementSystem {
    model: BlockModel,
    weyl_order: usize,
    gens: Vec<Sym>,
    minus_one_in_omega: bool,
    witness: Option<Vec<Vec<u64>>>,
}

fn complement_system(ct: &CycleType, q: u64, exec: Exec) -> Result<ComplementSystem> {
    let canon = ct.canonical();
    if q > 7 || canon.n() > 6 {
        return Err(Error::HypothesesNotMet(format!(
            "{ct} at q = {q} is beyond the enumeration bounds (n ≤ 6, q ≤ 7)"
        )));
    }
    let model = BlockModel::new(&canon.entries, q)?;
    let group = model.gamma_omega()?;
    let gens = model.generating_set(&group)?;
    let z_vec = model.minus_one();
    let z = model.minus_one_in_omega().then_some(z_vec.as_slice());
    let witness = solve_linear(&model, &gens, true, z, exec)?;
    Ok(ComplementSystem {
        weyl_order: group.len(),
        minus_one_in_omega: z.is_some(),
        model,
        gens,
        witness,
    })
}

/// Searches for a complement to `T̃` in `Ñ` for the whole Weyl quotient.
pub fn complement_search(ct: &CycleType, q: u64, exec: Exec) -> Result<ComplementSearch> {
    let sys = complement_system(ct, q, exec)?;
    Ok(ComplementSearch {
        cycle_type: ct.canonical().to_string(),
        q,
        torus_order: sys.model.torus_order(),
        weyl_order: sys.weyl_order,
        generators: sys.gens.len(),
        minus_one_in_omega: sys.minus_one_in_omega,
        complement_found: sys.witness.is_some(),
        witness: sys.witness,
    })
}

/// Explicit matrices of a lift system, for checking outside the model.
#[derive(Clone, Debug)]
pub struct LiftMatrices {
    pub space: QuadSpace,
    pub matrices: Vec<FMatrix>,
    /// Order of the subgroup of `Γ` the lifts should generate modulo `Z`.
    pub subgroup_order: usize,
}

/// Matrices of the `Ω` lift system found by the obstruction search, if any.
pub fn obstruction_lifts(
    ct: &CycleType,
    q: u64,
    case: LemmaCase,
    exec: Exec,
) -> Result<Option<LiftMatrices>> {
    let report = obstruction_report(ct, q, case, exec)?;
    let Some(witness) = report.witness else {
        return Ok(None);
    };
    let arranged = case.arrange(ct).expect("checked by the report");
    let model = BlockModel::new(&arranged, q)?;
    let matrices = case
        .generators(&arranged)
        .iter()
        .zip(&witness)
        .map(|((_, g), t)| model.matrix(t, g))
        .collect();
    Ok(Some(LiftMatrices {
        space: model.space.clone(),
        matrices,
        subgroup_order: report.subgroup_order,
    }))
}

/// Matrices generating the complement found by [`complement_search`], if any.
pub fn complement_lifts(ct: &CycleType, q: u64, exec: Exec) -> Result<Option<LiftMatrices>> {
    let sys = complement_system(ct, q, exec)?;
    Ok(sys.witness.as_ref().map(|witness| LiftMatrices {
        space: sys.model.space.clone(),
        matrices: sys
            .gens
            .iter()
            .zip(witness)
            .map(|(g, t)| sys.model.matrix(t, g))
            .collect(),
        subgroup_order: sys.weyl_order,
    }))
}
