//! Elementary integer arithmetic shared by every module: primality, factoring,
//! modular inverses and primitive roots. Everything here works on `u64`.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd on signed integers: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd((a % m) as i64, m as i64);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i64) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    // Deterministic Miller-Rabin for all 64-bit inputs.
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing order. Only used on numbers of desk-scale size.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Exponent of the exact power of `p` dividing `n` (`n > 0`).
pub fn p_adic_order(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut k = 0;
    while n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

/// Multiplicative order of `a` modulo the prime `n`, using the factorization of `n - 1`.
pub fn multiplicative_order(a: u64, n: u64, factors_of_n_minus_1: &[(u64, u32)]) -> u64 {
    let mut order = n - 1;
    for &(q, _) in factors_of_n_minus_1 {
        while order.is_multiple_of(q) && pow_mod(a, order / q, n) == 1 {
            order /= q;
        }
    }
    order
}

/// Smallest primitive root modulo the prime `n`.
pub fn smallest_primitive_root(n: u64) -> u64 {
    if n == 2 {
        return 1;
    }
    let factors = factorize(n - 1);
    (2..n)
        .find(|&g| {
            factors
                .iter()
                .all(|&(q, _)| pow_mod(g, (n - 1) / q, n) != 1)
        })
        .expect("a prime modulus has a primitive root")
}

/// All primitive roots modulo the prime `n`, in increasing order.
pub fn primitive_roots(n: u64) -> Vec<u64> {
    let factors = factorize(n - 1);
    (1..n)
        .filter(|&g| multiplicative_order(g, n, &factors) == n - 1)
        .collect()
}

/// Primes in the closed interval `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Kronecker-style symbol `(d / q)` for an odd prime or `q = 2`, `d ∈ {-1, -3}`.
/// Returns -1, 0 or 1.
pub fn legendre_neg(d: i64, q: u64) -> i64 {
    let m = q as i64;
    let r = d.rem_euclid(m) as u64;
    if q == 2 {
        // (-1/2) and (-3/2) in the sense needed for elliptic point counts.
        return if d == -1 { 0 } else { -1 };
    }
    if r == 0 {
        return 0;
    }
    let e = pow_mod(r, (q - 1) / 2, q);
    if e == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert!(is_prime(181));
        assert!(is_prime(4229));
        assert!(is_prime(3671));
        assert!(!is_prime(1));
        assert!(!is_prime(32761));
        assert_eq!(factorize(180), vec![(2, 2), (3, 2), (5, 1)]);
        assert_eq!(p_adic_order(4228, 7), 1);
        assert_eq!(p_adic_order(3670, 5), 1);
    }

    #[test]
    fn primitive_roots_small() {
        assert_eq!(smallest_primitive_root(7), 3);
        assert_eq!(smallest_primitive_root(11), 2);
        assert_eq!(smallest_primitive_root(181), 2);
        assert_eq!(primitive_roots(7), vec![3, 5]);
        // phi(phi(11)) = 4
        assert_eq!(primitive_roots(11).len(), 4);
    }

    #[test]
    fn order_of_two_mod_181_brute_force() {
        let mut x = 1u64;
        let mut order = 0;
        loop {
            x = x * 2 % 181;
            order += 1;
            if x == 1 {
                break;
            }
        }
        assert_eq!(order, 180);
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(5, 25), None);
        let (g, x, y) = ext_gcd(240, 46);
        assert_eq!(g, 2);
        assert_eq!(240 * x + 46 * y, 2);
    }
}
