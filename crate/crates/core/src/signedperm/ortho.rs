//! Quadratic spaces over `GF(q)`, `q` odd, and the spinor norm.
//!
//! The spinor norm is computed by writing an isometry as a product of
//! reflections `r_v(x) = x - B(x,v)/Q(v) v` and multiplying the values
//! `Q(v)`, read modulo squares.

use serde::Serialize;

use super::gf::{Elem, Gf};
use crate::error::{Error, Result};

/// Square class of an element of `GF(q)^*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinorClass {
    Square,
    Nonsquare,
}

impl std::ops::Mul for SpinorClass {
    type Output = SpinorClass;

    fn mul(self, other: Self) -> Self {
        if self == other {
            SpinorClass::Square
        } else {
            SpinorClass::Nonsquare
        }
    }
}

impl SpinorClass {
    pub fn of(field: &Gf, a: Elem) -> Self {
        if field.is_square(a) {
            SpinorClass::Square
        } else {
            SpinorClass::Nonsquare
        }
    }

    /// `0` for squares, `1` otherwise; the additive picture of `F^*/F^*2`.
    pub fn bit(self) -> u8 {
        match self {
            SpinorClass::Square => 0,
            SpinorClass::Nonsquare => 1,
        }
    }

    pub fn from_bit(b: u8) -> Self {
        if b & 1 == 0 {
            SpinorClass::Square
        } else {
            SpinorClass::Nonsquare
        }
    }
}

/// Column convention: `m[i][j]` is the `e_i` coordinate of the image of `e_j`.
pub type FMatrix = Vec<Vec<Elem>>;

/// Basis order used when factoring into reflections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factorization {
    /// Orthogonal basis from the standard basis in order; prefers the single
    /// reflection through `g(b) - b`.
    Forward,
    /// Orthogonal basis from the reversed standard basis; always uses the
    /// pair of reflections through `g(b) + b` and `b` when `g(b) != b`.
    Reversed,
}

#[derive(Clone, Debug)]
pub struct QuadSpace {
    field: Gf,
    /// Polar form `B(u,v) = Q(u+v) - Q(u) - Q(v)`, so `B(v,v) = 2Q(v)`.
    polar: FMatrix,
}

impl QuadSpace {
    pub fn new(field: Gf, polar: FMatrix) -> Result<Self> {
        if field.p() == 2 {
            return Err(Error::CharacteristicTwo(field.size()));
        }
        let d = polar.len();
        for i in 0..d {
            if polar[i].len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: polar[i].len(),
                });
            }
            for j in 0..d {
                if polar[i][j] != polar[j][i] {
                    return Err(Error::NotOrthogonal);
                }
            }
        }
        Ok(QuadSpace { field, polar })
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.polar.len()
    }

    pub fn polar(&self) -> &FMatrix {
        &self.polar
    }

    pub fn bilinear(&self, u: &[Elem], v: &[Elem]) -> Elem {
        let f = &self.field;
        let mut acc = 0;
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj != 0 && self.polar[i][j] != 0 {
                    acc = f.add(acc, f.mul(ui, f.mul(self.polar[i][j], vj)));
                }
            }
        }
        acc
    }

    pub fn quad(&self, v: &[Elem]) -> Elem {
        let f = &self.field;
        f.div(self.bilinear(v, v), f.from_int(2))
    }

    /// `det(B)`, the discriminant before reduction mod squares.
    pub fn determinant(&self) -> Elem {
        det(&self.field, &self.polar)
    }

    /// An even-dimensional space is of plus type iff `(-1)^{d/2} det(B)` is
    /// a square (for the polar form with `B(v,v) = 2Q(v)` the factor `2^d`
    /// is a square).
    pub fn is_plus_type(&self) -> bool {
        let f = &self.field;
        let d = self.dim();
        assert!(d.is_multiple_of(2));
        let sign = if (d / 2).is_multiple_of(2) { 1 } else { -1 };
        f.is_square(f.mul(f.from_int(sign), self.determinant()))
    }

    pub fn preserves(&self, g: &FMatrix) -> bool {
        let d = self.dim();
        if g.len() != d || g.iter().any(|r| r.len() != d) {
            return false;
        }
        let cols: Vec<Vec<Elem>> = (0..d).map(|j| column(g, j)).collect();
        (0..d).all(|i| (i..d).all(|j| self.bilinear(&cols[i], &cols[j]) == self.polar[i][j]))
    }

    fn reflect(&self, v: &[Elem], qv: Elem, x: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let c = f.div(self.bilinear(x, v), qv);
        x.iter()
            .zip(v)
            .map(|(&a, &b)| f.sub(a, f.mul(c, b)))
            .collect()
    }

    /// Orthogonal basis obtained from the standard basis taken in `order`.
    pub fn orthogonal_basis(&self, order: &[usize]) -> Vec<Vec<Elem>> {
        let f = &self.field;
        let d = self.dim();
        let mut pool: Vec<Vec<Elem>> = order
            .iter()
            .map(|&i| {
                let mut e = vec![0; d];
                e[i] = 1;
                e
            })
            .collect();
        let mut basis = Vec::with_capacity(d);
        while !pool.is_empty() {
            let pick = match pool.iter().position(|v| self.quad(v) != 0) {
                Some(i) => pool.remove(i),
                None => {
                    let (i, j) = (0..pool.len())
                        .flat_map(|i| (i + 1..pool.len()).map(move |j| (i, j)))
                        .find(|&(i, j)| self.bilinear(&pool[i], &pool[j]) != 0)
                        .expect("nondegenerate form");
                    let w = pool.remove(i);
                    w.iter()
                        .zip(&pool[j - 1])
                        .map(|(&a, &b)| f.add(a, b))
                        .collect()
                }
            };
            let bb = self.bilinear(&pick, &pick);
            for w in pool.iter_mut() {
                let c = f.div(self.bilinear(w, &pick), bb);
                for (x, &y) in w.iter_mut().zip(&pick) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
            pool.retain(|w| w.iter().any(|&x| x != 0));
            basis.push(pick);
        }
        basis
    }

    /// Reflection vectors whose product (first vector applied last) is `g`.
    pub fn reflection_factors(
        &self,
        g: &FMatrix,
        strategy: Factorization,
    ) -> Result<Vec<Vec<Elem>>> {
        if !self.preserves(g) {
            return Err(Error::NotOrthogonal);
        }
        let f = &self.field;
        let d = self.dim();
        let order: Vec<usize> = match strategy {
            Factorization::Forward => (0..d).collect(),
            Factorization::Reversed => (0..d).rev().collect(),
        };
        let basis = self.orthogonal_basis(&order);
        // images of the orthogonal basis under the running product h
        let mut images: Vec<Vec<Elem>> = basis.iter().map(|b| mat_vec(f, g, b)).collect();
        let mut factors = Vec::new();
        for i in 0..d {
            let b = &basis[i];
            let x = images[i].clone();
            if &x == b {
                continue;
            }
            let diff: Vec<Elem> = x.iter().zip(b).map(|(&u, &v)| f.sub(u, v)).collect();
            let qd = self.quad(&diff);
            let mut step = Vec::new();
            if strategy == Factorization::Forward && qd != 0 {
                step.push((diff, qd));
            } else {
                let sum: Vec<Elem> = x.iter().zip(b).map(|(&u, &v)| f.add(u, v)).collect();
                let qs = self.quad(&sum);
                if qs == 0 {
                    // Q(x+b) + Q(x-b) = 4Q(b) != 0, so diff is anisotropic here
                    step.push((diff, qd));
                } else {
                    step.push((sum, qs));
                    let qb = self.quad(b);
                    step.push((b.clone(), qb));
                }
            }
            for (v, qv) in step {
                for img in images.iter_mut() {
                    *img = self.reflect(&v, qv, img);
                }
                factors.push(v);
            }
            debug_assert_eq!(&images[i], b);
        }
        Ok(factors)
    }

    pub fn spinor_norm_with(
        &self,
        g: &FMatrix,
        strategy: Factorization,
    ) -> Result<(SpinorClass, i8)> {
        let factors = self.reflection_factors(g, strategy)?;
        let f = &self.field;
        let mut prod = f.one();
        for v in &factors {
            prod = f.mul(prod, self.quad(v));
        }
        let det = if factors.len() % 2 == 0 { 1 } else { -1 };
        Ok((SpinorClass::of(f, prod), det))
    }

    /// Spinor norm class and determinant of an isometry.
    pub fn spinor_norm(&self, g: &FMatrix) -> Result<(SpinorClass, i8)> {
        self.spinor_norm_with(g, Factorization::Forward)
    }
}

pub fn identity(d: usize) -> FMatrix {
    (0..d)
        .map(|i| (0..d).map(|j| u64::from(i == j)).collect())
        .collect()
}

pub fn column(m: &FMatrix, j: usize) -> Vec<Elem> {
    m.iter().map(|r| r[j]).collect()
}

pub fn mat_vec(f: &Gf, m: &FMatrix, v: &[Elem]) -> Vec<Elem> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).fold(0, |acc, (&a, &b)| {
                if a == 0 || b == 0 {
                    acc
                } else {
                    f.add(acc, f.mul(a, b))
                }
            })
        })
        .collect()
}

pub fn mat_mul(f: &Gf, a: &FMatrix, b: &FMatrix) -> FMatrix {
    let n = b.first().map_or(0, Vec::len);
    let cols: Vec<Vec<Elem>> = (0..n).map(|j| mat_vec(f, a, &column(b, j))).collect();
    (0..a.len())
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect()
}

pub fn det(f: &Gf, m: &FMatrix) -> Elem {
    let mut a = m.clone();
    let d = a.len();
    let mut acc = f.one();
    for c in 0..d {
        let Some(p) = (c..d).find(|&r| a[r][c] != 0) else {
            return 0;
        };
        if p != c {
            a.swap(p, c);
            acc = f.neg(acc);
        }
        let piv = a[c][c];
        acc = f.mul(acc, piv);
        let inv = f.inv(piv);
        for r in c + 1..d {
            let factor = f.mul(a[r][c], inv);
            if factor == 0 {
                continue;
            }
            for k in c..d {
                a[r][k] = f.sub(a[r][k], f.mul(factor, a[c][k]));
            }
        }
    }
    acc
}

/// Block-diagonal sum of matrices.
pub fn direct_sum(blocks: &[FMatrix]) -> FMatrix {
    let d: usize = blocks.iter().map(Vec::len).sum();
    let mut out = vec![vec![0; d]; d];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                out[off + i][off + j] = x;
            }
        }
        off += b.len();
    }
    out
}

/// Monomial isometries of `Q(v) = x_0^2 + x_1 x_{-1} + ... + x_n x_{-n}` on
/// `GF(q)^{2n+1}`, basis ordered `e_0, e_1..e_n, e_{-1}..e_{-n}`.
#[derive(Clone, Debug)]
pub struct MonomialOrtho {
    n: usize,
    /// `images[j] = (i, c)`: basis vector `j` goes to `c` times basis vector `i`.
    images: Vec<(usize, Elem)>,
    space: QuadSpace,
}

impl MonomialOrtho {
    pub fn standard_space(field: &Gf, n: usize) -> Result<QuadSpace> {
        let d = 2 * n + 1;
        let mut b = vec![vec![0; d]; d];
        b[0][0] = field.from_int(2);
        for i in 1..=n {
            b[i][n + i] = 1;
            b[n + i][i] = 1;
        }
        QuadSpace::new(field.clone(), b)
    }

    /// Index of the basis vector labelled `i` in `-n..=n`.
    pub fn slot(n: usize, i: i32) -> usize {
        match i {
            0 => 0,
            i if i > 0 => i as usize,
            i => n + (-i) as usize,
        }
    }

    pub fn new(field: &Gf, n: usize, images: Vec<(usize, Elem)>) -> Result<Self> {
        let space = Self::standard_space(field, n)?;
        let d = 2 * n + 1;
        if images.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: images.len(),
            });
        }
        let g = MonomialOrtho { n, images, space };
        let mut seen = vec![false; d];
        for &(i, c) in &g.images {
            if i >= d || c == 0 || std::mem::replace(&mut seen[i], true) {
                return Err(Error::NotOrthogonal);
            }
        }
        if !g.space.preserves(&g.matrix()) {
            return Err(Error::NotOrthogonal);
        }
        Ok(g)
    }

    pub fn identity(field: &Gf, n: usize) -> Result<Self> {
        Self::new(field, n, (0..2 * n + 1).map(|j| (j, 1)).collect())
    }

    /// `e_j -> alpha f_j`, `f_j -> alpha^{-1} e_j`, `x -> -x`, other basis
    /// vectors fixed.
    pub fn swap_scaled(field: &Gf, n: usize, j: usize, alpha: Elem) -> Result<Self> {
        let mut im: Vec<(usize, Elem)> = (0..2 * n + 1).map(|k| (k, 1)).collect();
        im[0] = (0, field.from_int(-1));
        im[j] = (n + j, alpha);
        im[n + j] = (j, field.inv(alpha));
        Self::new(field, n, im)
    }

    /// The signed permutation `(1,-1)...(k,-k)` with `x -> (-1)^k x`.
    pub fn tau(field: &Gf, n: usize, k: usize) -> Result<Self> {
        let mut im: Vec<(usize, Elem)> = (0..2 * n + 1).map(|j| (j, 1)).collect();
        for j in 1..=k {
            im[j] = (n + j, 1);
            im[n + j] = (j, 1);
        }
        im[0] = (0, field.from_int(if k.is_multiple_of(2) { 1 } else { -1 }));
        Self::new(field, n, im)
    }

    /// Monomial lift of a signed permutation: `e_i -> c_i e_{phi(i)}`,
    /// `e_{-i} -> c_i^{-1} e_{-phi(i)}`, `x -> eps x`.
    pub fn from_signed(
        field: &Gf,
        phi: &super::SignedPerm,
        scalars: &[Elem],
        eps: i64,
    ) -> Result<Self> {
        let n = phi.n();
        let mut im = vec![(0usize, field.from_int(eps)); 2 * n + 1];
        for i in 1..=n {
            let c = scalars.get(i - 1).copied().unwrap_or(1);
            let t = phi.apply(i as i32);
            im[i] = (Self::slot(n, t), c);
            im[n + i] = (Self::slot(n, -t), field.inv(c));
        }
        Self::new(field, n, im)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn matrix(&self) -> FMatrix {
        let d = self.images.len();
        let mut m = vec![vec![0; d]; d];
        for (j, &(i, c)) in self.images.iter().enumerate() {
            m[i][j] = c;
        }
        m
    }

    pub fn compose(&self, other: &Self) -> Self {
        let f = self.space.field();
        let images = other
            .images
            .iter()
            .map(|&(i, c)| {
                let (k, d) = self.images[i];
                (k, f.mul(c, d))
            })
            .collect();
        MonomialOrtho {
            n: self.n,
            images,
            space: self.space.clone(),
        }
    }

    pub fn determinant(&self) -> Elem {
        det(self.space.field(), &self.matrix())
    }

    pub fn spinor_norm(&self) -> Result<SpinorClass> {
        Ok(self.space.spinor_norm(&self.matrix())?.0)
    }

    pub fn spinor_norm_with(&self, strategy: Factorization) -> Result<SpinorClass> {
        Ok(self.space.spinor_norm_with(&self.matrix(), strategy)?.0)
    }
}

/// Spinor norm class of a monomial isometry.
pub fn spinor_norm(g: &MonomialOrtho) -> Result<SpinorClass> {
    g.spinor_norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_square() {
        let f = Gf::new(7, 1).unwrap();
        let g = MonomialOrtho::identity(&f, 3).unwrap();
        assert_eq!(spinor_norm(&g).unwrap(), SpinorClass::Square);
    }

    #[test]
    fn swap_scaled_has_class_of_minus_alpha() {
        for q in [3u64, 5, 7, 9, 25] {
            let f = Gf::of_order(q).unwrap();
            for alpha in 1..q {
                let g = MonomialOrtho::swap_scaled(&f, 3, 2, alpha).unwrap();
                let expect = SpinorClass::of(&f, f.neg(alpha));
                for s in [Factorization::Forward, Factorization::Reversed] {
                    assert_eq!(
                        g.spinor_norm_with(s).unwrap(),
                        expect,
                        "q={q} alpha={alpha}"
                    );
                }
            }
        }
    }

    #[test]
    fn tau_has_class_of_minus_one_power() {
        for q in [3u64, 5, 7, 11] {
            let f = Gf::of_order(q).unwrap();
            for k in 0..=4 {
                let g = MonomialOrtho::tau(&f, 4, k).unwrap();
                let expect = SpinorClass::of(&f, f.from_int(if k % 2 == 0 { 1 } else { -1 }));
                assert_eq!(spinor_norm(&g).unwrap(), expect);
            }
        }
    }

    #[test]
    fn rejects_non_isometry_and_even_q() {
        let f = Gf::new(5, 1).unwrap();
        let mut im: Vec<(usize, Elem)> = (0..5).map(|j| (j, 1)).collect();
        im[1] = (1, 2);
        assert!(matches!(
            MonomialOrtho::new(&f, 2, im),
            Err(Error::NotOrthogonal)
        ));
        let g = Gf::new(2, 2).unwrap();
        assert!(MonomialOrtho::identity(&g, 2).is_err());
    }
}
