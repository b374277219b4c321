//! Closed-form invariants of `X₀(M)`.

use crate::arith::{factorize, gcd, legendre_neg};

use super::p1::p1_size;

fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(q, _)| acc / q * (q - 1))
}

/// Number of cusps `Σ_{d|M} φ(gcd(d, M/d))`.
pub fn num_cusps(m: u64) -> u64 {
    (1..=m)
        .filter(|d| m.is_multiple_of(*d))
        .map(|d| euler_phi(gcd(d, m / d)))
        .sum()
}

/// Elliptic points of order 2.
pub fn nu2(m: u64) -> u64 {
    if m.is_multiple_of(4) {
        return 0;
    }
    factorize(m)
        .iter()
        .map(|&(q, _)| (1 + legendre_neg(-1, q)) as u64)
        .product()
}

/// Elliptic points of order 3.
pub fn nu3(m: u64) -> u64 {
    if m.is_multiple_of(9) {
        return 0;
    }
    factorize(m)
        .iter()
        .map(|&(q, _)| (1 + legendre_neg(-3, q)) as u64)
        .product()
}

/// Genus of `X₀(M)`: `12g = 12 + μ - 3ν₂ - 4ν₃ - 6c`.
pub fn genus(m: u64) -> u64 {
    let twelve_g =
        12 + p1_size(m) as i64 - 3 * nu2(m) as i64 - 4 * nu3(m) as i64 - 6 * num_cusps(m) as i64;
    debug_assert!(twelve_g >= 0 && twelve_g % 12 == 0);
    (twelve_g / 12) as u64
}

/// Dimension `2g + c - 1` of weight-2 modular symbols of level `M`.
pub fn modsym_dim(m: u64) -> u64 {
    2 * genus(m) + num_cusps(m) - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_genera() {
        assert_eq!(genus(11), 1);
        assert_eq!(genus(31), 2);
        assert_eq!(genus(181), 14);
        assert_eq!(genus(181 * 181), 2654);
        assert_eq!(num_cusps(181 * 181), 182);
        assert_eq!(num_cusps(11), 2);
        assert_eq!(modsym_dim(11), 3);
    }
}
