//! Signed permutations of `{±1,…,±n}`, their cycle types and centralizers,
//! and the orthogonal-group side of the twisted `D_n` case: spinor norms of
//! monomial isometries and a block model of `Ω⁻_{2n}(q)` used to confirm
//! obstructions to splitting.

pub mod gf;
pub mod ominus;
pub mod ortho;

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

pub use gf::Gf;
pub use ominus::{
    complement_lifts, complement_search, obstruction_check, obstruction_lifts, obstruction_report,
    BlockModel, ComplementSearch, LemmaCase, LiftMatrices, ObstructionReport,
};
pub use ortho::{spinor_norm, Factorization, MonomialOrtho, QuadSpace, SpinorClass};

/// A permutation `φ` of `{±1,…,±n}` with `φ(-i) = -φ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPerm {
    /// `images[i-1] = φ(i)`.
    images: Vec<i32>,
}

impl SignedPerm {
    pub fn new(images: Vec<i32>) -> Result<Self> {
        let n = images.len() as i32;
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x == 0
                || x.abs() > n
                || std::mem::replace(&mut seen[x.unsigned_abs() as usize - 1], true)
            {
                return Err(Error::MalformedPartition(format!(
                    "{images:?} is not a signed permutation"
                )));
            }
        }
        Ok(SignedPerm { images })
    }

    pub fn identity(n: usize) -> Self {
        SignedPerm {
            images: (1..=n as i32).collect(),
        }
    }

    /// The longest element `-1` of the hyperoctahedral group.
    pub fn w0(n: usize) -> Self {
        SignedPerm {
            images: (1..=n as i32).map(|i| -i).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[i32] {
        &self.images
    }

    pub fn apply(&self, i: i32) -> i32 {
        let v = self.images[i.unsigned_abs() as usize - 1];
        if i < 0 {
            -v
        } else {
            v
        }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        SignedPerm {
            images: other.images.iter().map(|&x| self.apply(x)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.n()];
        for (i, &x) in self.images.iter().enumerate() {
            let s = if x < 0 { -1 } else { 1 };
            images[x.unsigned_abs() as usize - 1] = s * (i as i32 + 1);
        }
        SignedPerm { images }
    }

    pub fn conjugate_by(&self, psi: &Self) -> Self {
        psi.compose(self).compose(&psi.inverse())
    }

    /// Number of `i > 0` sent to a negative value.
    pub fn sign_changes(&self) -> usize {
        self.images.iter().filter(|&&x| x < 0).count()
    }

    /// Membership in the index-two subgroup of even sign changes (type `D_n`).
    pub fn is_even(&self) -> bool {
        self.sign_changes().is_multiple_of(2)
    }

    pub fn order(&self) -> usize {
        let ct = cycle_type(self);
        ct.entries
            .iter()
            .map(|e| if e.negative { 2 * e.len } else { e.len })
            .fold(1, |a, b| (a * b) / gcd(a, b))
    }

    /// Signed permutation matrix: column `i` is `±e_{|φ(i)|}`.
    pub fn matrix(&self) -> IntMatrix {
        let n = self.n();
        let mut rows = vec![vec![0i64; n]; n];
        for (i, &x) in self.images.iter().enumerate() {
            rows[x.unsigned_abs() as usize - 1][i] = x.signum() as i64;
        }
        IntMatrix::from_rows(&rows)
    }

    /// All `2^n n!` signed permutations of rank `n`.
    pub fn all(n: usize) -> Vec<Self> {
        let mut perms: Vec<Vec<i32>> = vec![vec![]];
        for k in 1..=n as i32 {
            let mut next = Vec::new();
            for p in &perms {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    next.push(q);
                }
            }
            perms = next;
        }
        let mut out = Vec::with_capacity(perms.len() << n);
        for p in perms {
            for mask in 0u32..1 << n {
                let images = p
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| if mask >> i & 1 == 1 { -x } else { x })
                    .collect();
                out.push(SignedPerm { images });
            }
        }
        out
    }
}

impl fmt::Display for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(i32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CycleEntry {
    pub len: usize,
    pub negative: bool,
}

impl CycleEntry {
    pub fn pos(len: usize) -> Self {
        CycleEntry {
            len,
            negative: false,
        }
    }

    pub fn neg(len: usize) -> Self {
        CycleEntry {
            len,
            negative: true,
        }
    }

    /// `+1` for positive cycles, `-1` for negative ones.
    pub fn epsilon(self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }
}

/// Signed cycle type; `entries` keep the order they were given in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CycleType {
    pub entries: Vec<CycleEntry>,
}

impl CycleType {
    pub fn new(entries: Vec<CycleEntry>) -> Result<Self> {
        if entries.is_empty() || entries.iter().any(|e| e.len == 0) {
            return Err(Error::MalformedPartition(
                "cycle lengths must be positive".into(),
            ));
        }
        Ok(CycleType { entries })
    }

    /// From signed lengths, negative numbers marking negative cycles.
    pub fn from_signed(parts: &[i64]) -> Result<Self> {
        Self::new(
            parts
                .iter()
                .map(|&x| CycleEntry {
                    len: x.unsigned_abs() as usize,
                    negative: x < 0,
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.entries.iter().map(|e| e.len).sum()
    }

    /// Number of cycles.
    pub fn m(&self) -> usize {
        self.entries.len()
    }

    /// Number of negative cycles.
    pub fn k(&self) -> usize {
        self.entries.iter().filter(|e| e.negative).count()
    }

    /// Negative cycles first, then positive; longer before shorter.
    pub fn canonical(&self) -> Self {
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| b.negative.cmp(&a.negative).then(b.len.cmp(&a.len)));
        CycleType { entries }
    }

    pub fn signed_lengths(&self) -> Vec<i64> {
        self.entries
            .iter()
            .map(|e| e.epsilon() * e.len as i64)
            .collect()
    }

    /// `∏ (q^{n_i} - ε_i)`, the order of the corresponding torus.
    pub fn torus_order(&self, q: u64) -> u128 {
        self.entries
            .iter()
            .map(|e| {
                let qn = (q as u128).pow(e.len as u32);
                if e.negative {
                    qn + 1
                } else {
                    qn - 1
                }
            })
            .product()
    }

    /// Every signed cycle type of rank `n`, in canonical form.
    pub fn all(n: usize) -> Vec<Self> {
        fn rec(rem: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rem == 0 {
                out.push(acc.clone());
                return;
            }
            for part in (1..=rem.min(max)).rev() {
                acc.push(part);
                rec(rem - part, part, acc, out);
                acc.pop();
            }
        }
        let mut partitions = Vec::new();
        rec(n, n, &mut Vec::new(), &mut partitions);
        let mut out = HashSet::new();
        for p in partitions {
            for mask in 0u32..1 << p.len() {
                let entries = p
                    .iter()
                    .enumerate()
                    .map(|(i, &len)| CycleEntry {
                        len,
                        negative: mask >> i & 1 == 1,
                    })
                    .collect();
                out.insert(CycleType { entries }.canonical());
            }
        }
        let mut out: Vec<Self> = out.into_iter().collect();
        out.sort_by_key(|c| (c.k(), c.signed_lengths()));
        out
    }

    /// Windows `start..start+len` of the entries, in order.
    fn windows(&self) -> Vec<(usize, CycleEntry)> {
        let mut start = 0;
        self.entries
            .iter()
            .map(|&e| {
                let w = (start, e);
                start += e.len;
                w
            })
            .collect()
    }

    /// A signed permutation of this type: each window carries the cycle
    /// `start+1 → … → start+len → ±(start+1)`.
    pub fn standard_element(&self) -> SignedPerm {
        let mut images = vec![0; self.n()];
        for (start, e) in self.windows() {
            for j in 0..e.len {
                let src = start + j;
                images[src] = if j + 1 < e.len {
                    (src + 2) as i32
                } else {
                    e.epsilon() as i32 * (start + 1) as i32
                };
            }
        }
        SignedPerm { images }
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            if e.negative {
                write!(f, "(-{})", e.len)?;
            } else {
                write!(f, "({})", e.len)?;
            }
        }
        Ok(())
    }
}

impl FromStr for CycleType {
    type Err = Error;

    /// Accepts `-2,1,1` or `(-2)(1)(1)`.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s
            .chars()
            .map(|c| {
                if c == '(' || c == ')' || c == ' ' {
                    ','
                } else {
                    c
                }
            })
            .collect();
        let parts: Vec<i64> = cleaned
            .split(',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad cycle length `{t}`")))
            })
            .collect::<Result<_>>()?;
        if parts.contains(&0) {
            return Err(Error::MalformedPartition("zero-length cycle".into()));
        }
        CycleType::from_signed(&parts)
    }
}

/// Signed cycle decomposition. Cycles are located on absolute values; a
/// cycle through `i` is negative when the walk returns to `-i`.
pub fn cycle_type(phi: &SignedPerm) -> CycleType {
    let n = phi.n();
    let mut seen = vec![false; n];
    let mut entries = Vec::new();
    for i in 1..=n {
        if seen[i - 1] {
            continue;
        }
        let mut x = i as i32;
        let mut len = 0;
        loop {
            seen[x.unsigned_abs() as usize - 1] = true;
            x = phi.apply(x);
            len += 1;
            if x.unsigned_abs() as usize == i {
                break;
            }
        }
        entries.push(CycleEntry {
            len,
            negative: x < 0,
        });
    }
    CycleType { entries }.canonical()
}

/// Named generator of a centralizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedPerm {
    pub name: String,
    pub perm: SignedPerm,
}

/// Generators of the centralizer in the hyperoctahedral group of
/// `ct.canonical().standard_element()`.
///
/// On the window of a positive cycle: `ω_i` (the cycle itself) and `τ_i`
/// (negate the window). On a negative cycle: `ϖ_i` (the cycle itself, whose
/// `n_i`-th power negates the window). Between consecutive equal windows:
/// `χ_j`, the window swap.
pub fn centralizer_generators(ct: &CycleType) -> Vec<NamedPerm> {
    let ct = ct.canonical();
    let n = ct.n();
    let windows = ct.windows();
    let mut out = Vec::new();
    for (i, &(start, e)) in windows.iter().enumerate() {
        let idx = i + 1;
        let mut cyc: Vec<i32> = (1..=n as i32).collect();
        for j in 0..e.len {
            cyc[start + j] = if j + 1 < e.len {
                (start + j + 2) as i32
            } else {
                e.epsilon() as i32 * (start + 1) as i32
            };
        }
        let cyc = SignedPerm { images: cyc };
        if e.negative {
            out.push(NamedPerm {
                name: format!("varpi{idx}"),
                perm: cyc,
            });
        } else {
            out.push(NamedPerm {
                name: format!("omega{idx}"),
                perm: cyc,
            });
            let mut tau: Vec<i32> = (1..=n as i32).collect();
            for j in 0..e.len {
                tau[start + j] = -tau[start + j];
            }
            out.push(NamedPerm {
                name: format!("tau{idx}"),
                perm: SignedPerm { images: tau },
            });
        }
    }
    for i in 0..windows.len().saturating_sub(1) {
        let (s1, e1) = windows[i];
        let (s2, e2) = windows[i + 1];
        if e1 != e2 {
            continue;
        }
        let mut chi: Vec<i32> = (1..=n as i32).collect();
        for j in 0..e1.len {
            chi[s1 + j] = (s2 + j + 1) as i32;
            chi[s2 + j] = (s1 + j + 1) as i32;
        }
        out.push(NamedPerm {
            name: format!("chi{}", i + 1),
            perm: SignedPerm { images: chi },
        });
    }
    out
}

/// `∏ (2 n_i)^{k_i} k_i!` over the groups of equal cycles.
pub fn centralizer_order(ct: &CycleType) -> u128 {
    let mut counts: std::collections::BTreeMap<CycleEntry, u32> = Default::default();
    for &e in &ct.entries {
        *counts.entry(e).or_default() += 1;
    }
    counts
        .iter()
        .map(|(e, &k)| {
            let fact: u128 = (1..=k as u128).product();
            (2 * e.len as u128).pow(k) * fact
        })
        .product()
}

/// Closure of a set of signed permutations under composition.
pub fn generated_group(gens: &[SignedPerm], n: usize) -> Vec<SignedPerm> {
    let id = SignedPerm::identity(n);
    let mut seen: HashSet<SignedPerm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose(g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_type_examples() {
        assert_eq!(
            cycle_type(&SignedPerm::identity(3)).to_string(),
            "(1)(1)(1)"
        );
        let tau = SignedPerm::new(vec![-1]).unwrap();
        assert_eq!(cycle_type(&tau).to_string(), "(-1)");
        let omega = SignedPerm::new(vec![2, 3, 1]).unwrap();
        assert_eq!(cycle_type(&omega).to_string(), "(3)");
        let varpi = SignedPerm::new(vec![2, -1]).unwrap();
        assert_eq!(cycle_type(&varpi).to_string(), "(-2)");
    }

    #[test]
    fn standard_element_has_its_type() {
        for n in 1..=6 {
            for ct in CycleType::all(n) {
                assert_eq!(cycle_type(&ct.standard_element()), ct);
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let ct: CycleType = "-2,1,1".parse().unwrap();
        assert_eq!(ct.to_string(), "(-2)(1)(1)");
        assert_eq!(ct.to_string().parse::<CycleType>().unwrap(), ct);
        assert!("0,1".parse::<CycleType>().is_err());
        assert!("x".parse::<CycleType>().is_err());
    }

    #[test]
    fn group_sizes() {
        assert_eq!(SignedPerm::all(3).len(), 48);
        assert_eq!(CycleType::all(4).len(), 20);
    }

    #[test]
    fn inverse_and_matrix() {
        let p = SignedPerm::new(vec![-3, 1, 2]).unwrap();
        assert_eq!(p.compose(&p.inverse()), SignedPerm::identity(3));
        let m = p.matrix();
        assert_eq!(m.mul_vec(&[1, 0, 0]), vec![0, 0, -1]);
    }
}
