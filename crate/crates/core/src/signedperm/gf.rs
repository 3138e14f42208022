//! Finite fields `GF(p^k)` in a polynomial basis.
//!
//! Elements are packed into a `u64` as base-`p` digits, digit `i` being the
//! coefficient of `x^i`; the digits are also the coordinates over `GF(p)`.
//! The defining polynomial is the least monic irreducible of degree `k`,
//! ordering candidates by their packed lower coefficients.

use crate::arith;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf {
    p: u64,
    k: usize,
    /// Lower coefficients of the monic modulus, constant term first.
    modulus: Vec<u64>,
    size: u64,
}

pub type Elem = u64;

impl Gf {
    pub fn new(p: u64, k: usize) -> Result<Self> {
        if arith::prime_power(p) != Some((p, 1)) {
            return Err(Error::InvalidQ {
                family: "GF".into(),
                q: p,
                reason: "characteristic must be prime".into(),
            });
        }
        let size = p
            .checked_pow(k as u32)
            .filter(|&s| s < 1 << 40)
            .ok_or_else(|| Error::InvalidQ {
                family: "GF".into(),
                q: p,
                reason: format!("p^{k} is too large"),
            })?;
        let modulus = if k == 1 {
            vec![0]
        } else {
            (0..size)
                .map(|c| digits(c, p, k))
                .find(|low| is_irreducible(low, p))
                .expect("irreducible polynomials exist in every degree")
        };
        Ok(Gf {
            p,
            k,
            modulus,
            size,
        })
    }

    /// `GF(q)` for a prime power `q`.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, e) = arith::prime_power(q).ok_or_else(|| Error::InvalidQ {
            family: "GF".into(),
            q,
            reason: "not a prime power".into(),
        })?;
        Gf::new(p, e as usize)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn zero(&self) -> Elem {
        0
    }

    pub fn one(&self) -> Elem {
        1
    }

    pub fn coords(&self, a: Elem) -> Vec<u64> {
        digits(a, self.p, self.k)
    }

    pub fn from_coords(&self, c: &[u64]) -> Elem {
        c.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (x, y) = (self.coords(a), self.coords(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.from_coords(&s)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let s: Vec<u64> = self
            .coords(a)
            .iter()
            .map(|u| (self.p - u) % self.p)
            .collect();
        self.from_coords(&s)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p;
        if self.k == 1 {
            return a * b % p;
        }
        let (x, y) = (self.coords(a), self.coords(b));
        let mut prod = vec![0u64; 2 * self.k - 1];
        for (i, &u) in x.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u * v) % p;
            }
        }
        // x^k = -(modulus lower part)
        for d in (self.k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &m) in self.modulus.iter().enumerate() {
                let t = d - self.k + i;
                prod[t] = (prod[t] + (p - c) * m) % p;
            }
        }
        self.from_coords(&prod[..self.k])
    }

    pub fn pow(&self, a: Elem, mut e: u128) -> Elem {
        let mut acc = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        self.pow(a, (self.size - 2) as u128)
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    /// Quadratic residue test by Euler's criterion (`q` odd, `a ≠ 0`).
    pub fn is_square(&self, a: Elem) -> bool {
        assert!(self.p != 2, "Euler's criterion needs odd characteristic");
        assert!(a != 0, "zero has no square class");
        self.pow(a, ((self.size - 1) / 2) as u128) == self.one()
    }

    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p as u128)
    }

    pub fn multiplicative_order(&self, a: Elem) -> u64 {
        let n = self.size - 1;
        let mut order = n;
        for r in prime_factors(n) {
            while order.is_multiple_of(r) && self.pow(a, (order / r) as u128) == self.one() {
                order /= r;
            }
        }
        order
    }

    /// Least packed element generating the multiplicative group.
    pub fn primitive_element(&self) -> Elem {
        (1..self.size)
            .find(|&a| self.multiplicative_order(a) == self.size - 1)
            .expect("the multiplicative group is cyclic")
    }

    /// Is `a` in the subfield of order `p^d`?
    pub fn in_subfield(&self, a: Elem, d: usize) -> bool {
        self.pow(a, (self.p as u128).pow(d as u32)) == a
    }

    /// Relative trace down to the subfield of order `p^d` (`d | k`).
    pub fn trace_to(&self, a: Elem, d: usize) -> Elem {
        assert_eq!(self.k % d, 0);
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.k / d {
            acc = self.add(acc, x);
            x = self.pow(x, (self.p as u128).pow(d as u32));
        }
        acc
    }

    /// Relative norm down to the subfield of order `p^d`.
    pub fn norm_to(&self, a: Elem, d: usize) -> Elem {
        assert_eq!(self.k % d, 0);
        let mut acc = self.one();
        let mut x = a;
        for _ in 0..self.k / d {
            acc = self.mul(acc, x);
            x = self.pow(x, (self.p as u128).pow(d as u32));
        }
        acc
    }
}

fn digits(mut a: u64, p: u64, k: usize) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `f` modulo the monic polynomial `g` (coefficients low first).
fn poly_rem(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if c != 0 {
            for (i, &gi) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * gi % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=k/2`.
fn is_irreducible(low: &[u64], p: u64) -> bool {
    let k = low.len();
    let mut f = low.to_vec();
    f.push(1);
    for d in 1..=k / 2 {
        for c in 0..p.pow(d as u32) {
            let mut g = digits(c, p, d);
            g.push(1);
            if poly_rem(&f, &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}
