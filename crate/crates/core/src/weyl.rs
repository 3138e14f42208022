//! Weyl groups as permutation groups on the root list, with twisted
//! (σ-)conjugacy classes and twisted centralizers.

use crate::matrix::IntMatrix;
use crate::rootsys::{RootSystem, RootSystemType};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

/// A Weyl group element as a permutation of root positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylElement {
    pub perm: Vec<usize>,
}

impl WeylElement {
    pub fn identity(num_roots: usize) -> Self {
        WeylElement {
            perm: (0..num_roots).collect(),
        }
    }

    /// `(self * other)(r) = self(other(r))`.
    pub fn compose(&self, other: &Self) -> Self {
        WeylElement {
            perm: other.perm.iter().map(|&p| self.perm[p]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        WeylElement { perm: inv }
    }

    pub fn apply(&self, pos: usize) -> usize {
        self.perm[pos]
    }

    /// Matrix of the action on the coroot lattice in the simple-coroot basis.
    pub fn coroot_matrix(&self, sys: &RootSystem) -> IntMatrix {
        let cols: Vec<Vec<i64>> = (0..sys.rank())
            .map(|i| sys.coroot_coeffs_at(self.perm[i]))
            .collect();
        IntMatrix::from_columns(&cols)
    }
}

/// The automorphism of `W` induced by the Frobenius twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeylTwist {
    Identity,
    Triality,
    Ree,
}

impl FromStr for WeylTwist {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "split" => Ok(WeylTwist::Identity),
            "triality" => Ok(WeylTwist::Triality),
            "ree" => Ok(WeylTwist::Ree),
            _ => Err(crate::error::Error::Parse(format!("unknown twist `{s}`"))),
        }
    }
}

impl fmt::Display for WeylTwist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WeylTwist::Identity => "identity",
            WeylTwist::Triality => "triality",
            WeylTwist::Ree => "ree",
        };
        f.write_str(s)
    }
}

/// The full Weyl group with a multiplication table over element ids.
///
/// Id 0 is the identity. Ids follow breadth-first order from the identity
/// over simple reflections, so reduced words and lengths come for free.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    sys: RootSystem,
    elements: Vec<WeylElement>,
    index: HashMap<Vec<usize>, usize>,
    mult: Vec<u32>,
    inv: Vec<usize>,
    words: Vec<Vec<usize>>,
    simple: Vec<usize>,
}

impl WeylGroup {
    pub fn new(sys: &RootSystem) -> Self {
        let n_roots = sys.num_roots();
        let simple_elems: Vec<WeylElement> = (0..sys.rank())
            .map(|i| WeylElement {
                perm: (0..n_roots).map(|p| sys.reflect_position(i, p)).collect(),
            })
            .collect();
        let id = WeylElement::identity(n_roots);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id.perm.clone(), 0usize)]);
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for (i, s) in simple_elems.iter().enumerate() {
                let next = elements[k].compose(s);
                if !index.contains_key(&next.perm) {
                    let j = elements.len();
                    index.insert(next.perm.clone(), j);
                    let mut w = words[k].clone();
                    w.push(i);
                    words.push(w);
                    elements.push(next);
                    queue.push_back(j);
                }
            }
        }
        let n = elements.len();
        let mut mult = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let c = elements[a].compose(&elements[b]);
                mult[a * n + b] = index[&c.perm] as u32;
            }
        }
        let inv = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| mult[a * n + b] == 0)
                    .expect("group inverse")
            })
            .collect();
        let simple = simple_elems.iter().map(|s| index[&s.perm]).collect();
        WeylGroup {
            sys: sys.clone(),
            elements,
            index,
            mult,
            inv,
            words,
            simple,
        }
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.sys
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, id: usize) -> &WeylElement {
        &self.elements[id]
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn id_of(&self, w: &WeylElement) -> Option<usize> {
        self.index.get(&w.perm).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn length(&self, a: usize) -> usize {
        self.words[a].len()
    }

    /// A reduced word in 0-based simple reflection indices.
    pub fn reduced_word(&self, a: usize) -> &[usize] {
        &self.words[a]
    }

    pub fn simple(&self, i: usize) -> usize {
        self.simple[i]
    }

    /// The reflection `w_r` for a signed root number.
    pub fn reflection(&self, root: i32) -> usize {
        let s = self.sys.position(root);
        let perm: Vec<usize> = (0..self.sys.num_roots())
            .map(|p| self.sys.reflect_position(s, p))
            .collect();
        self.index[&perm]
    }

    /// Product `w_{r_1} w_{r_2} ...` of reflections by root number.
    pub fn from_reflections(&self, roots: &[i32]) -> usize {
        roots
            .iter()
            .fold(0, |acc, &r| self.mul(acc, self.reflection(r)))
    }

    pub fn power(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// The longest element (equal to `-1` on roots for G2 and D4).
    pub fn longest(&self) -> usize {
        (0..self.order())
            .max_by_key(|&a| self.length(a))
            .expect("nonempty group")
    }

    pub fn coroot_action(&self, a: usize) -> IntMatrix {
        self.elements[a].coroot_matrix(&self.sys)
    }

    pub fn is_central(&self, a: usize) -> bool {
        (0..self.order()).all(|x| self.mul(a, x) == self.mul(x, a))
    }

    /// `w^σ` for the given twist.
    pub fn twist(&self, twist: WeylTwist, a: usize) -> usize {
        match twist {
            WeylTwist::Identity => a,
            WeylTwist::Triality | WeylTwist::Ree => {
                let rho = self
                    .sys
                    .symmetry_positions()
                    .expect("twisted types carry a diagram symmetry");
                let w = &self.elements[a];
                let mut perm = vec![0; w.perm.len()];
                // rho w rho^-1
                for (p, &img) in w.perm.iter().enumerate() {
                    perm[rho[p]] = rho[img];
                }
                self.index[&perm]
            }
        }
    }

    /// Partition of `W` into classes of `w ~ x^-1 w x^σ`.
    ///
    /// Classes are ordered by their least member (in permutation order),
    /// and members within a class are sorted the same way.
    pub fn sigma_classes(&self, twist: WeylTwist) -> Vec<Vec<usize>> {
        let n = self.order();
        let twisted: Vec<usize> = (0..n).map(|x| self.twist(twist, x)).collect();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for w in 0..n {
            if class_of[w] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = Vec::new();
            for x in 0..n {
                let y = self.mul(self.mul(self.inv(x), w), twisted[x]);
                if class_of[y] == usize::MAX {
                    class_of[y] = c;
                    members.push(y);
                }
            }
            members.sort_by(|&a, &b| self.elements[a].cmp(&self.elements[b]));
            classes.push(members);
        }
        classes.sort_by(|a, b| self.elements[a[0]].cmp(&self.elements[b[0]]));
        classes
    }

    /// `{x : x^-1 w x^σ = w}`, sorted by id.
    pub fn centralizer_sigma(&self, twist: WeylTwist, w: usize) -> Vec<usize> {
        (0..self.order())
            .filter(|&x| self.mul(self.mul(self.inv(x), w), self.twist(twist, x)) == w)
            .collect()
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.order()];
        for &x in set {
            member[x] = true;
        }
        member[0]
            && set
                .iter()
                .all(|&a| set.iter().all(|&b| member[self.mul(a, b)]))
    }

    /// The subgroup generated by `gens`, sorted by id.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            let a = out[i];
            for &g in gens {
                let b = self.mul(a, g);
                if !seen[b] {
                    seen[b] = true;
                    out.push(b);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Render an element as a product of simple reflections, e.g. `w1w2`.
    pub fn word_string(&self, a: usize) -> String {
        if a == 0 {
            return "1".into();
        }
        self.words[a]
            .iter()
            .map(|i| format!("w{}", i + 1))
            .collect()
    }
}

/// The natural twist for a root system type and family.
pub fn default_twist(kind: RootSystemType, twisted: bool) -> WeylTwist {
    match (kind, twisted) {
        (_, false) => WeylTwist::Identity,
        (RootSystemType::D4, true) => WeylTwist::Triality,
        (RootSystemType::G2, true) => WeylTwist::Ree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> WeylGroup {
        WeylGroup::new(&RootSystem::build(RootSystemType::G2))
    }

    #[test]
    fn orders() {
        let w = g2();
        assert_eq!(w.order(), 12);
        let d4 = WeylGroup::new(&RootSystem::build(RootSystemType::D4));
        assert_eq!(d4.order(), 192);
    }

    #[test]
    fn longest_is_central_minus_one() {
        let w = g2();
        let w0 = w.from_reflections(&[1, 6]);
        assert_eq!(w0, w.longest());
        assert!(w.is_central(w0));
        assert_eq!(w.from_reflections(&[3, 5]), w0);
        assert_eq!(w.coroot_action(w0), IntMatrix::scalar(2, -1));
        assert_eq!(w.coroot_action(0), IntMatrix::identity(2));
    }

    #[test]
    fn coroot_action_of_w1() {
        let w = g2();
        let sys = w.root_system();
        let w1 = w.simple(0);
        let m = w.coroot_action(w1);
        for i in 0..2 {
            let img = sys.reflect(1, i as i32 + 1);
            assert_eq!(m.column(i), sys.coroot_coeffs(img));
        }
    }

    #[test]
    fn class_counts() {
        let w = g2();
        assert_eq!(w.sigma_classes(WeylTwist::Identity).len(), 6);
        let mut sizes: Vec<usize> = w
            .sigma_classes(WeylTwist::Ree)
            .iter()
            .map(Vec::len)
            .collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 6]);
        let d4 = WeylGroup::new(&RootSystem::build(RootSystemType::D4));
        assert_eq!(d4.sigma_classes(WeylTwist::Triality).len(), 7);
    }

    #[test]
    fn ree_twist_swaps_simple_reflections() {
        let w = g2();
        assert_eq!(w.twist(WeylTwist::Ree, w.simple(0)), w.simple(1));
        let w1w2 = w.mul(w.simple(0), w.simple(1));
        assert_eq!(
            w.twist(WeylTwist::Ree, w1w2),
            w.mul(w.simple(1), w.simple(0))
        );
    }

    #[test]
    fn twisted_centralizers() {
        let w = g2();
        let c = w.centralizer_sigma(WeylTwist::Ree, w.simple(0));
        assert_eq!(c.len(), 6);
        assert_eq!(c, w.generated(&[w.mul(w.simple(0), w.simple(1))]));
        let d4 = WeylGroup::new(&RootSystem::build(RootSystemType::D4));
        let w1w2 = d4.mul(d4.simple(0), d4.simple(1));
        let c = d4.centralizer_sigma(WeylTwist::Triality, w1w2);
        assert_eq!(c.len(), 4);
        assert!(c.iter().any(|&x| d4.element_order(x) == 4));
    }
}
