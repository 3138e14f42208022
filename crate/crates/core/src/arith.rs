//! Small integer helpers shared by the lattice, field and classifier code.

/// Greatest common divisor, always non-negative.
pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

pub fn rem(a: i128, m: i128) -> i128 {
    a.rem_euclid(m)
}

pub fn mul_mod(a: i128, b: i128, m: i128) -> i128 {
    (rem(a, m) * rem(b, m)).rem_euclid(m)
}

pub fn pow_mod(base: i128, mut exp: u64, m: i128) -> i128 {
    let mut acc = 1 % m;
    let mut b = rem(base, m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Exact integer power; panics on overflow.
pub fn ipow(base: i128, exp: u32) -> i128 {
    base.checked_pow(exp).expect("integer power overflow")
}

/// Smallest solution `x` in `[0, m)` of `a*x ≡ b (mod m)`, if any.
pub fn solve_linear_congruence(a: i128, b: i128, m: i128) -> Option<i128> {
    let (g, x, _) = ext_gcd(rem(a, m), m);
    if rem(b, g) != 0 {
        return None;
    }
    let m_g = m / g;
    Some(rem(x * (rem(b, m) / g) % m_g, m_g))
}

/// The 2-part of `n`: the largest power of two dividing `n` (`n != 0`).
pub fn two_part(n: i128) -> i128 {
    assert!(n != 0, "2-part of zero is undefined");
    let n = n.abs();
    1 << n.trailing_zeros()
}

/// Multiplicative order of `a` modulo `m` (requires `gcd(a, m) = 1`).
pub fn multiplicative_order(a: i128, m: i128) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd(a, m) != 1 {
        return None;
    }
    let mut x = rem(a, m);
    let mut k = 1u64;
    while x != 1 {
        x = mul_mod(x, a, m);
        k += 1;
    }
    Some(k)
}

/// If `q` is a prime power `p^e`, returns `(p, e)`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Some((q, 1));
    }
    let mut r = q;
    let mut e = 0;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}
