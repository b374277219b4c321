//! The projective line `P¹(Z/M)` with canonical representatives.

use std::collections::HashMap;

use crate::arith::{ext_gcd, factorize, gcd, inv_mod};

/// Canonical representative of `(u : v)` in `P¹(Z/M)`, or `None` when
/// `gcd(u, v, M) != 1`. The first coordinate is `gcd(u, M)` (or `0` for the
/// point `(0 : 1)`), the second the least value reachable by units fixing it.
pub fn normalize(m: u64, u: i64, v: i64) -> Option<(u64, u64)> {
    let mi = m as i64;
    let u = u.rem_euclid(mi) as u64;
    let v = v.rem_euclid(mi) as u64;
    if u == 0 {
        return (gcd(v, m) == 1).then_some((0, 1));
    }
    let (g, s, _) = ext_gcd(u as i64, mi);
    let g = g as u64;
    if gcd(g, v) != 1 {
        return None;
    }
    if g == 1 {
        let inv = inv_mod(u, m).expect("unit");
        return Some((1, (inv as u128 * v as u128 % m as u128) as u64));
    }
    // s·u ≡ g; shift s along m/g until it is a unit
    let step = m / g;
    let mut s = s.rem_euclid(mi) as u64;
    while gcd(s, m) != 1 {
        s = (s + step) % m;
    }
    let v0 = (s as u128 * v as u128 % m as u128) as u64;
    let mut best = v0;
    let mut t = 1u64;
    for _ in 1..g {
        t = (t + step) % m;
        if gcd(t, m) == 1 {
            let cand = (t as u128 * v0 as u128 % m as u128) as u64;
            best = best.min(cand);
        }
    }
    Some((g, best))
}

/// `|P¹(Z/M)| = M·Π_{q|M}(1 + 1/q)`.
pub fn p1_size(m: u64) -> u64 {
    factorize(m)
        .iter()
        .fold(m, |acc, &(q, _)| acc / q * (q + 1))
}

/// Enumeration of `P¹(Z/M)`: `(1 : d)` sits at index `d`, `(0 : 1)` at index
/// `M`, the remaining points follow in increasing order.
#[derive(Clone, Debug)]
pub struct P1List {
    m: u64,
    points: Vec<(u32, u32)>,
    others: HashMap<(u32, u32), u32>,
}

impl P1List {
    pub fn new(m: u64) -> Self {
        assert!((2..(1 << 31)).contains(&m), "level {m} out of range");
        let mut points: Vec<(u32, u32)> = (0..m).map(|d| (1, d as u32)).collect();
        points.push((0, 1));
        let mut others = HashMap::new();
        let mut divisors: Vec<u64> = (2..m).filter(|g| m.is_multiple_of(*g)).collect();
        divisors.sort_unstable();
        for g in divisors {
            for d in 0..m {
                if gcd(g, d) != 1 {
                    continue;
                }
                if normalize(m, g as i64, d as i64) == Some((g, d)) {
                    others.insert((g as u32, d as u32), points.len() as u32);
                    points.push((g as u32, d as u32));
                }
            }
        }
        Self { m, points, others }
    }

    pub fn level(&self) -> u64 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> (u64, u64) {
        let (c, d) = self.points[i];
        (c as u64, d as u64)
    }

    /// Index of the class of `(u : v)`, or `None` if it is not a point.
    pub fn index(&self, u: i64, v: i64) -> Option<usize> {
        let m = self.m as i64;
        let ur = u.rem_euclid(m) as u64;
        if ur != 0 && gcd(ur, self.m) == 1 {
            let inv = inv_mod(ur, self.m).expect("unit");
            let vr = v.rem_euclid(m) as u64;
            return Some((inv as u128 * vr as u128 % self.m as u128) as usize);
        }
        let (c, d) = normalize(self.m, u, v)?;
        if c == 0 {
            return Some(self.m as usize);
        }
        self.others.get(&(c as u32, d as u32)).map(|&i| i as usize)
    }

    /// Right action of an integer matrix `[[a, b], [c, d]]` on the row `(u, v)`.
    pub fn act(&self, i: usize, h: &[i64; 4]) -> Option<usize> {
        let (u, v) = self.point(i);
        let (u, v) = (u as i64, v as i64);
        self.index(u * h[0] + v * h[2], u * h[1] + v * h[3])
    }
}
