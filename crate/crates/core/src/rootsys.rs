//! Root systems of types G2 and D4 with a fixed root numbering.
//!
//! Positive roots are numbered `1..=N` in the order used throughout the crate
//! (the complement recipes refer to these numbers), negative roots are `-1..=-N`.
//! Internally a root is addressed by its *position*: positives occupy
//! `0..N`, negatives `N..2N`, so `position(-i) = position(i) + N`.
//!
//! Inner products use the short-root normalization `(r, r) = 2`, which makes
//! every coroot expansion integral in the simple-coroot basis.

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootSystemType {
    G2,
    D4,
}

impl FromStr for RootSystemType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "G2" => Ok(RootSystemType::G2),
            "D4" => Ok(RootSystemType::D4),
            other => Err(Error::UnsupportedType(other.to_string())),
        }
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSystemType::G2 => write!(f, "G2"),
            RootSystemType::D4 => write!(f, "D4"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LengthClass {
    Long,
    Short,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Root {
    /// Signed 1-based number; `-i` is the negative of root `i`.
    pub index: i32,
    /// Coefficients over the simple roots.
    pub coeffs: Vec<i64>,
    pub length_class: LengthClass,
}

/// Positive roots of G2, simple root `r1` short: `r3 = r1+r2`, `r4 = 2r1+r2`,
/// `r5 = 3r1+r2`, `r6 = 3r1+2r2`.
const G2_POSITIVE: [[i64; 2]; 6] = [[1, 0], [0, 1], [1, 1], [2, 1], [3, 1], [3, 2]];

/// Positive roots of D4 with `r2` the branch node.
const D4_POSITIVE: [[i64; 4]; 12] = [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [1, 1, 0, 0],
    [0, 1, 1, 0],
    [0, 1, 0, 1],
    [1, 1, 1, 0],
    [1, 1, 0, 1],
    [0, 1, 1, 1],
    [1, 1, 1, 1],
    [1, 2, 1, 1],
];

#[derive(Clone, Debug)]
pub struct RootSystem {
    kind: RootSystemType,
    rank: usize,
    /// Inner products `(r_i, r_j)` of the simple roots.
    gram: IntMatrix,
    /// `cartan[(i, j)] = <r_i, r_j^vee> = 2 (r_i, r_j) / (r_j, r_j)`.
    cartan: IntMatrix,
    roots: Vec<Root>,
    lookup: HashMap<Vec<i64>, usize>,
    /// Diagram symmetry as a permutation of positions.
    symmetry: Option<Vec<usize>>,
}

impl RootSystem {
    pub fn build(kind: RootSystemType) -> Self {
        let (gram, positives): (IntMatrix, Vec<Vec<i64>>) = match kind {
            RootSystemType::G2 => (
                IntMatrix::from_rows(&[vec![2, -3], vec![-3, 6]]),
                G2_POSITIVE.iter().map(|r| r.to_vec()).collect(),
            ),
            RootSystemType::D4 => (
                IntMatrix::from_rows(&[
                    vec![2, -1, 0, 0],
                    vec![-1, 2, -1, -1],
                    vec![0, -1, 2, 0],
                    vec![0, -1, 0, 2],
                ]),
                D4_POSITIVE.iter().map(|r| r.to_vec()).collect(),
            ),
        };
        let rank = gram.rows();
        let mut cartan = IntMatrix::zeros(rank, rank);
        for i in 0..rank {
            for j in 0..rank {
                cartan[(i, j)] = 2 * gram[(i, j)] / gram[(j, j)];
            }
        }
        let n = positives.len();
        let mut roots = Vec::with_capacity(2 * n);
        for sign in [1i64, -1] {
            for (k, c) in positives.iter().enumerate() {
                let coeffs: Vec<i64> = c.iter().map(|x| sign * x).collect();
                let norm = quad(&gram, &coeffs, &coeffs);
                roots.push(Root {
                    index: sign as i32 * (k as i32 + 1),
                    coeffs,
                    length_class: if norm == 2 {
                        LengthClass::Short
                    } else {
                        LengthClass::Long
                    },
                });
            }
        }
        // D4 is simply laced; call every root long there.
        if kind == RootSystemType::D4 {
            for r in &mut roots {
                r.length_class = LengthClass::Long;
            }
        }
        let lookup = roots
            .iter()
            .enumerate()
            .map(|(p, r)| (r.coeffs.clone(), p))
            .collect();
        let mut sys = RootSystem {
            kind,
            rank,
            gram,
            cartan,
            roots,
            lookup,
            symmetry: None,
        };
        sys.symmetry = Some(sys.build_symmetry());
        sys
    }

    fn build_symmetry(&self) -> Vec<usize> {
        match self.kind {
            RootSystemType::D4 => {
                // rho: r1 -> r3 -> r4 -> r1, r2 fixed; extended linearly.
                let image = [2usize, 1, 3, 0];
                self.roots
                    .iter()
                    .map(|r| {
                        let mut c = vec![0; 4];
                        for (i, &a) in r.coeffs.iter().enumerate() {
                            c[image[i]] += a;
                        }
                        self.lookup[&c]
                    })
                    .collect()
            }
            RootSystemType::G2 => {
                // The graph symmetry exchanging short and long roots sends
                // a r1 + b r2 to the root proportional to 3b r1 + a r2.
                self.roots
                    .iter()
                    .map(|r| {
                        let (a, b) = (r.coeffs[0], r.coeffs[1]);
                        let (x, y) = (3 * b, a);
                        let g = crate::arith::gcd(x as i128, y as i128) as i64;
                        self.lookup[&vec![x / g, y / g]]
                    })
                    .collect()
            }
        }
    }

    pub fn kind(&self) -> RootSystemType {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn cartan(&self) -> &IntMatrix {
        &self.cartan
    }

    pub fn position(&self, index: i32) -> usize {
        let n = self.num_positive() as i32;
        assert!(
            index != 0 && index.abs() <= n,
            "root index {index} out of range"
        );
        if index > 0 {
            (index - 1) as usize
        } else {
            (-index - 1 + n) as usize
        }
    }

    pub fn index_at(&self, pos: usize) -> i32 {
        self.roots[pos].index
    }

    pub fn root(&self, index: i32) -> &Root {
        &self.roots[self.position(index)]
    }

    pub fn neg_position(&self, pos: usize) -> usize {
        let n = self.num_positive();
        if pos < n {
            pos + n
        } else {
            pos - n
        }
    }

    pub fn is_positive_position(&self, pos: usize) -> bool {
        pos < self.num_positive()
    }

    pub fn find(&self, coeffs: &[i64]) -> Option<usize> {
        self.lookup.get(coeffs).copied()
    }

    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        quad(&self.gram, a, b)
    }

    /// Squared length of the root at `pos`.
    pub fn norm(&self, pos: usize) -> i64 {
        let c = &self.roots[pos].coeffs;
        self.inner(c, c)
    }

    /// `<r, s^vee> = 2 (r, s) / (s, s)` for roots at positions `r`, `s`.
    pub fn pairing(&self, r: usize, s: usize) -> i64 {
        let ip = self.inner(&self.roots[r].coeffs, &self.roots[s].coeffs);
        2 * ip / self.norm(s)
    }

    /// Position of `r + s`, if it is a root.
    pub fn sum(&self, r: usize, s: usize) -> Option<usize> {
        let c: Vec<i64> = self.roots[r]
            .coeffs
            .iter()
            .zip(&self.roots[s].coeffs)
            .map(|(a, b)| a + b)
            .collect();
        self.find(&c)
    }

    pub fn height(&self, pos: usize) -> i64 {
        self.roots[pos].coeffs.iter().sum()
    }

    /// `w_s(r) = r - <r, s^vee> s`, by position.
    pub fn reflect_position(&self, s: usize, r: usize) -> usize {
        let k = self.pairing(r, s);
        let c: Vec<i64> = self.roots[r]
            .coeffs
            .iter()
            .zip(&self.roots[s].coeffs)
            .map(|(a, b)| a - k * b)
            .collect();
        self.find(&c)
            .expect("root system is closed under reflections")
    }

    /// `w_s(r)` by signed root number.
    pub fn reflect(&self, s: i32, r: i32) -> i32 {
        let p = self.reflect_position(self.position(s), self.position(r));
        self.index_at(p)
    }

    /// Coefficients `c` with `r^vee = sum c_i r_i^vee`.
    pub fn coroot_coeffs_at(&self, pos: usize) -> Vec<i64> {
        let norm = self.norm(pos);
        self.roots[pos]
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let num = a * self.gram[(i, i)];
                debug_assert_eq!(num % norm, 0);
                num / norm
            })
            .collect()
    }

    pub fn coroot_coeffs(&self, index: i32) -> Vec<i64> {
        self.coroot_coeffs_at(self.position(index))
    }

    pub fn has_symmetry(&self) -> bool {
        self.symmetry.is_some()
    }

    /// The diagram symmetry as a permutation of positions.
    pub fn symmetry_positions(&self) -> Result<&[usize]> {
        self.symmetry
            .as_deref()
            .ok_or_else(|| Error::SymmetryUndefined(self.kind.to_string()))
    }

    /// `r^rho` by signed root number.
    pub fn apply_symmetry(&self, index: i32) -> Result<i32> {
        let perm = self.symmetry_positions()?;
        Ok(self.index_at(perm[self.position(index)]))
    }

    /// Image of simple root `i` (0-based) under the diagram symmetry, 0-based.
    pub fn symmetry_on_simple(&self, i: usize) -> Result<usize> {
        let perm = self.symmetry_positions()?;
        let p = perm[i];
        assert!(p < self.rank, "diagram symmetry preserves simple roots");
        Ok(p)
    }
}

fn quad(g: &IntMatrix, a: &[i64], b: &[i64]) -> i64 {
    let gb = g.mul_vec(b);
    a.iter().zip(&gb).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Close the simple roots under simple reflections using only the Cartan
    /// matrix, independent of the stored table.
    fn close_from_cartan(sys: &RootSystem) -> BTreeSet<Vec<i64>> {
        let l = sys.rank();
        let c = sys.cartan();
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut stack: Vec<Vec<i64>> = (0..l)
            .map(|i| (0..l).map(|j| (i == j) as i64).collect())
            .collect();
        while let Some(v) = stack.pop() {
            if !seen.insert(v.clone()) {
                continue;
            }
            for s in 0..l {
                // <v, r_s^vee> = sum_i v_i <r_i, r_s^vee>
                let k: i64 = (0..l).map(|i| v[i] * c[(i, s)]).sum();
                let mut w = v.clone();
                w[s] -= k;
                stack.push(w);
            }
        }
        seen
    }

    #[test]
    fn g2_table_matches_closure() {
        let sys = RootSystem::build(RootSystemType::G2);
        assert_eq!(sys.num_roots(), 12);
        assert_eq!(sys.root(6).coeffs, vec![3, 2]);
        let closed = close_from_cartan(&sys);
        let stored: BTreeSet<Vec<i64>> = sys.roots().iter().map(|r| r.coeffs.clone()).collect();
        assert_eq!(closed, stored);
        let short = sys
            .roots()
            .iter()
            .filter(|r| r.length_class == LengthClass::Short)
            .count();
        assert_eq!(short, 6);
        assert_eq!(sys.root(1).length_class, LengthClass::Short);
        assert_eq!(sys.root(2).length_class, LengthClass::Long);
    }

    #[test]
    fn d4_table_matches_closure() {
        let sys = RootSystem::build(RootSystemType::D4);
        assert_eq!(sys.num_roots(), 24);
        assert_eq!(sys.root(12).coeffs, vec![1, 2, 1, 1]);
        let closed = close_from_cartan(&sys);
        let stored: BTreeSet<Vec<i64>> = sys.roots().iter().map(|r| r.coeffs.clone()).collect();
        assert_eq!(closed, stored);
    }

    #[test]
    fn reflections() {
        let g2 = RootSystem::build(RootSystemType::G2);
        assert_eq!(g2.reflect(1, 1), -1);
        assert_eq!(g2.reflect(1, 2), 5);
        let d4 = RootSystem::build(RootSystemType::D4);
        assert_eq!(d4.reflect(2, 1), 5);
    }

    #[test]
    fn coroots() {
        let g2 = RootSystem::build(RootSystemType::G2);
        assert_eq!(g2.coroot_coeffs(1), vec![1, 0]);
        assert_eq!(g2.coroot_coeffs(2), vec![0, 1]);
        assert_eq!(g2.coroot_coeffs(6), vec![1, 2]);
        assert_eq!(g2.coroot_coeffs(-6), vec![-1, -2]);
        let d4 = RootSystem::build(RootSystemType::D4);
        assert_eq!(d4.coroot_coeffs(12), vec![1, 2, 1, 1]);
    }

    #[test]
    fn symmetries() {
        let d4 = RootSystem::build(RootSystemType::D4);
        assert_eq!(d4.apply_symmetry(1).unwrap(), 3);
        assert_eq!(d4.apply_symmetry(2).unwrap(), 2);
        assert_eq!(d4.apply_symmetry(5).unwrap(), 6);
        let g2 = RootSystem::build(RootSystemType::G2);
        let images: Vec<i32> = (1..=6).map(|i| g2.apply_symmetry(i).unwrap()).collect();
        assert_eq!(images, vec![2, 1, 5, 6, 3, 4]);
    }

    #[test]
    fn unsupported_label() {
        assert!(matches!(
            "E8".parse::<RootSystemType>(),
            Err(Error::UnsupportedType(_))
        ));
    }
}
