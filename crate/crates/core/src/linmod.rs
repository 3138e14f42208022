//! Linear congruence systems over the integers.
//!
//! A system of rows `Σ a_i x_i ≡ b (mod m)` with mixed moduli is split by
//! prime; over each `Z/p^E` the matrix is brought to Smith form with row and
//! column operations, pivoting on an entry of least `p`-adic valuation.
//! Solutions are glued by the Chinese remainder theorem.

use std::collections::HashSet;

use crate::arith;
use crate::signedperm::gf::prime_factors;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Congruence {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
    pub modulus: u64,
}

fn valuation(mut x: i128, p: i128) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn inverse_mod(a: i128, m: i128) -> i128 {
    let (g, x, _) = arith::ext_gcd(arith::rem(a, m), m);
    debug_assert_eq!(g.abs(), 1);
    arith::rem(x, m)
}

/// Solves over `Z/p^e`; `rows` are already reduced to that modulus.
fn solve_prime_power(
    ncols: usize,
    rows: Vec<(Vec<i128>, i128)>,
    p: i128,
    e: u32,
) -> Option<Vec<i128>> {
    let pe = p.pow(e);
    let mut a: Vec<Vec<i128>> = Vec::with_capacity(rows.len());
    let mut b: Vec<i128> = Vec::with_capacity(rows.len());
    for (r, rhs) in rows {
        a.push(r);
        b.push(rhs);
    }
    let nrows = a.len();
    // column transform, x = V y
    let mut v: Vec<Vec<i128>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut pivots: Vec<(i128, u32)> = Vec::new();
    for t in 0..ncols.min(nrows) {
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let val = valuation(x, p);
                    if best.is_none_or(|(bv, _, _)| val < bv) {
                        best = Some((val, i, j));
                        if val == 0 {
                            break 'scan;
                        }
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else { break };
        a.swap(t, pi);
        b.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        let pv = p.pow(val);
        let unit = a[t][t] / pv;
        let uinv = inverse_mod(unit, pe);
        for i in t + 1..nrows {
            if a[i][t] == 0 {
                continue;
            }
            let f = arith::rem(a[i][t] / pv * uinv, pe);
            for j in t..ncols {
                a[i][j] = arith::rem(a[i][j] - f * a[t][j], pe);
            }
            b[i] = arith::rem(b[i] - f * b[t], pe);
        }
        for j in t + 1..ncols {
            if a[t][j] == 0 {
                continue;
            }
            let f = arith::rem(a[t][j] / pv * uinv, pe);
            a[t][j] = 0;
            for row in v.iter_mut() {
                row[j] = arith::rem(row[j] - f * row[t], pe);
            }
        }
        pivots.push((unit, val));
    }
    let rank = pivots.len();
    if b[rank..].iter().any(|&x| x != 0) {
        return None;
    }
    let mut y = vec![0i128; ncols];
    for (t, &(unit, val)) in pivots.iter().enumerate() {
        let pv = p.pow(val);
        if b[t] % pv != 0 {
            return None;
        }
        y[t] = arith::rem(b[t] / pv * inverse_mod(unit, pe), pe);
    }
    Some(
        (0..ncols)
            .map(|i| (0..ncols).fold(0, |acc, j| arith::rem(acc + v[i][j] * y[j], pe)))
            .collect(),
    )
}

/// An integer solution of all rows, if one exists, reduced modulo the lcm of
/// the moduli.
pub fn solve_congruences(ncols: usize, rows: &[Congruence]) -> Option<Vec<i64>> {
    let lcm = rows
        .iter()
        .fold(1i128, |acc, r| arith::lcm(acc, r.modulus.max(1) as i128));
    let mut x = vec![0i128; ncols];
    let mut modulus = 1i128;
    for p in prime_factors(lcm as u64) {
        let p = p as i128;
        let e = valuation(lcm, p);
        let pe = p.pow(e);
        let mut seen: HashSet<(Vec<i128>, i128)> = HashSet::new();
        for r in rows {
            let m = r.modulus as i128;
            if m <= 1 || m % p != 0 {
                continue;
            }
            let vm = valuation(m, p);
            let scale = p.pow(e - vm);
            let coeffs: Vec<i128> = r
                .coeffs
                .iter()
                .map(|&c| arith::rem(c as i128 * scale, pe))
                .collect();
            let rhs = arith::rem(r.rhs as i128 * scale, pe);
            if coeffs.iter().all(|&c| c == 0) {
                if rhs != 0 {
                    return None;
                }
                continue;
            }
            seen.insert((coeffs, rhs));
        }
        let mut local_rows: Vec<(Vec<i128>, i128)> = seen.into_iter().collect();
        local_rows.sort();
        let sol = solve_prime_power(ncols, local_rows, p, e)?;
        // glue x mod `modulus` with sol mod pe
        let inv = inverse_mod(modulus, pe);
        for (xi, si) in x.iter_mut().zip(sol) {
            let k = arith::rem((si - *xi) * inv, pe);
            *xi += modulus * k;
        }
        modulus *= pe;
    }
    Some(x.into_iter().map(|v| v as i64).collect())
}

/// Does `x` satisfy every row?
pub fn satisfies(x: &[i64], rows: &[Congruence]) -> bool {
    rows.iter().all(|r| {
        let m = r.modulus as i128;
        let lhs: i128 = r
            .coeffs
            .iter()
            .zip(x)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        m <= 1 || arith::rem(lhs - r.rhs as i128, m) == 0
    })
}

/// Smith form `U M V = D` of an integer matrix with unimodular `U`, `V`;
/// returns `(U, U⁻¹, diagonal)` with the diagonal of length `rows`.
pub fn smith_left(m: &[Vec<i128>]) -> (Vec<Vec<i128>>, Vec<Vec<i128>>, Vec<i128>) {
    let r = m.len();
    let c = m.first().map_or(0, Vec::len);
    let mut a = m.to_vec();
    let id = |n: usize| -> Vec<Vec<i128>> {
        (0..n)
            .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
            .collect()
    };
    let mut u = id(r);
    let mut uinv = id(r);
    // row_i -= f row_k on a and u; col_k += f col_i on uinv
    let row_op = |a: &mut Vec<Vec<i128>>,
                  u: &mut Vec<Vec<i128>>,
                  uinv: &mut Vec<Vec<i128>>,
                  i: usize,
                  k: usize,
                  f: i128| {
        if f == 0 {
            return;
        }
        for j in 0..a[i].len() {
            a[i][j] -= f * a[k][j];
        }
        for j in 0..u[i].len() {
            u[i][j] -= f * u[k][j];
        }
        for row in uinv.iter_mut() {
            row[k] += f * row[i];
        }
    };
    let swap_rows = |a: &mut Vec<Vec<i128>>,
                     u: &mut Vec<Vec<i128>>,
                     uinv: &mut Vec<Vec<i128>>,
                     i: usize,
                     k: usize| {
        a.swap(i, k);
        u.swap(i, k);
        for row in uinv.iter_mut() {
            row.swap(i, k);
        }
    };
    for t in 0..r.min(c) {
        loop {
            let pivot = (t..r)
                .flat_map(|i| (t..c).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| (a[i][j].abs(), i, j));
            let Some((pi, pj)) = pivot else { break };
            swap_rows(&mut a, &mut u, &mut uinv, t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..r {
                let f = a[i][t].div_euclid(a[t][t]);
                row_op(&mut a, &mut u, &mut uinv, i, t, f);
                clean &= a[i][t] == 0;
            }
            for j in t + 1..c {
                let f = a[t][j].div_euclid(a[t][t]);
                if f != 0 {
                    for row in a.iter_mut() {
                        row[j] -= f * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let d = a[t][t];
            match (t + 1..r).find(|&i| (t + 1..c).any(|j| a[i][j] % d != 0)) {
                Some(i) => row_op(&mut a, &mut u, &mut uinv, t, i, -1),
                None => break,
            }
        }
    }
    let diag = (0..r)
        .map(|i| if i < c { a[i][i].abs() } else { 0 })
        .collect();
    (u, uinv, diag)
}
