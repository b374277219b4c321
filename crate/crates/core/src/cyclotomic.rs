//! Truncated arithmetic in `Z[ζ]/(p^K)` for `ζ` a primitive `p^t`-th root of unity.
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{e-1}` with
//! `e = (p-1)p^{t-1}`. The ring is totally ramified over `Z_p` with uniformizer
//! `π = ζ - 1`, so valuations are read off the `π`-adic expansion. `t = 0`
//! is accepted as the degenerate case `Z/p^K` (`e = 1`, `ζ = 1`).

use crate::error::{Error, Result};
use crate::padic::{residue_valuation, PadicRing, PiValuation, TruncatedPadic};

/// Ramification index `(p-1)p^{t-1}` of `Q_p(ζ_{p^t})`; 1 for `t = 0`.
pub fn ramification_index(p: u64, t: u32) -> usize {
    if t == 0 {
        1
    } else {
        ((p - 1) * p.pow(t - 1)) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    ring: PadicRing,
    t: u32,
    coeffs: Vec<u64>,
}

impl CyclotomicInt {
    pub fn zero(ring: PadicRing, t: u32) -> Self {
        Self {
            ring,
            t,
            coeffs: vec![0; ramification_index(ring.p, t)],
        }
    }

    pub fn one(ring: PadicRing, t: u32) -> Self {
        Self::from_scalar(ring, t, 1)
    }

    pub fn from_scalar(ring: PadicRing, t: u32, c: u64) -> Self {
        let mut z = Self::zero(ring, t);
        z.coeffs[0] = c % ring.modulus;
        z
    }

    /// Builds `Σ coeffs[j] ζ^j` for a power-basis vector of length exactly `e`.
    pub fn from_power_basis(ring: PadicRing, t: u32, coeffs: Vec<u64>) -> Result<Self> {
        let e = ramification_index(ring.p, t);
        if coeffs.len() != e {
            return Err(Error::InvalidArgument(format!(
                "power basis vector has length {}, expected {e}",
                coeffs.len()
            )));
        }
        let coeffs = coeffs.into_iter().map(|c| c % ring.modulus).collect();
        Ok(Self { ring, t, coeffs })
    }

    /// Builds `Σ_m c_m ζ^m` from coefficients indexed by exponents mod `p^t`.
    pub fn from_exponent_coeffs(ring: PadicRing, t: u32, by_exponent: &[u64]) -> Self {
        let order = ring.p.pow(t) as usize;
        let mut folded = vec![0u64; order];
        for (m, &c) in by_exponent.iter().enumerate() {
            let slot = &mut folded[m % order];
            *slot = ring.add(*slot, c % ring.modulus);
        }
        Self::reduce_cyclic(ring, t, folded)
    }

    /// `ζ^j` for any integer exponent.
    pub fn zeta_power(ring: PadicRing, t: u32, j: i64) -> Self {
        let order = ring.p.pow(t) as i64;
        let mut v = vec![0u64; order as usize];
        v[j.rem_euclid(order) as usize] = 1;
        Self::reduce_cyclic(ring, t, v)
    }

    /// The uniformizer `ζ - 1`.
    pub fn uniformizer(ring: PadicRing, t: u32) -> Self {
        Self::zeta_power(ring, t, 1)
            .sub(&Self::one(ring, t))
            .expect("same ring")
    }

    /// Reduces a vector indexed by exponents in `[0, p^t)` modulo `Φ_{p^t}`.
    fn reduce_cyclic(ring: PadicRing, t: u32, mut v: Vec<u64>) -> Self {
        let e = ramification_index(ring.p, t);
        if t > 0 {
            let step = ring.p.pow(t - 1) as usize;
            // ζ^{e+j} = -Σ_{i<p-1} ζ^{i·step + j}
            for m in e..v.len() {
                let c = v[m];
                if c == 0 {
                    continue;
                }
                let j = m - e;
                for i in 0..(ring.p as usize - 1) {
                    let idx = i * step + j;
                    v[idx] = ring.sub(v[idx], c);
                }
            }
        }
        v.truncate(e);
        Self { ring, t, coeffs: v }
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring || self.t != other.t {
            return Err(Error::MismatchedRing(format!(
                "Z[ζ_{}^{}]/{}^{} vs Z[ζ_{}^{}]/{}^{}",
                self.ring.p,
                self.t,
                self.ring.p,
                self.ring.k,
                other.ring.p,
                other.t,
                other.ring.p,
                other.ring.k
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| self.ring.add(a, b))
            .collect();
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| self.ring.sub(a, b))
            .collect();
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.ring.modulus;
        let coeffs = self.coeffs.iter().map(|&a| self.ring.mul(a, c)).collect();
        Self {
            coeffs,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        cyclo_mul(self, other)
    }

    /// Coordinates `(a_0, …, a_{e-1})` with `self = Σ a_j (ζ-1)^j`.
    pub fn to_pi_basis(&self) -> Vec<TruncatedPadic> {
        power_to_pi_basis(self)
    }

    /// Inverse of [`power_to_pi_basis`].
    pub fn from_pi_basis(ring: PadicRing, t: u32, pi_coeffs: &[u64]) -> Result<Self> {
        let mut c: Vec<u64> = pi_coeffs.iter().map(|&x| x % ring.modulus).collect();
        let n = c.len();
        if n != ramification_index(ring.p, t) {
            return Err(Error::InvalidArgument(
                "π-basis vector has wrong length".into(),
            ));
        }
        // Taylor shift by -1: P(π) -> P(ζ - 1).
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] = ring.sub(c[j], c[j + 1]);
            }
        }
        Ok(Self { ring, t, coeffs: c })
    }

    pub fn pi_valuation(&self) -> PiValuation {
        pi_valuation(self)
    }
}

/// Product reduced modulo `Φ_{p^t}` and `p^K`.
pub fn cyclo_mul(a: &CyclotomicInt, b: &CyclotomicInt) -> Result<CyclotomicInt> {
    a.check(b)?;
    let ring = a.ring;
    let order = ring.p.pow(a.t) as usize;
    let mut acc = vec![0u64; order];
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            if y == 0 {
                continue;
            }
            let slot = &mut acc[(i + j) % order];
            *slot = ring.add(*slot, ring.mul(x, y));
        }
    }
    Ok(CyclotomicInt::reduce_cyclic(ring, a.t, acc))
}

/// Rewrites an element in the basis `(ζ-1)^j`. The transform is the binomial
/// Taylor shift, integral and unimodular, so no precision is lost.
pub fn power_to_pi_basis(a: &CyclotomicInt) -> Vec<TruncatedPadic> {
    let ring = a.ring;
    let mut c = a.coeffs.clone();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            c[j] = ring.add(c[j], c[j + 1]);
        }
    }
    c.into_iter().map(|x| ring.element(x)).collect()
}

/// `v(a)` normalized by `v(ζ-1) = 1`, so `v(p) = e`.
///
/// The candidate valuations `j + e·v_p(a_j)` are pairwise distinct modulo `e`,
/// hence the minimum is attained once and is the valuation. Any nonzero
/// `π`-coordinate pins the answer below `e·K`; an element vanishing at
/// precision `K` only gets the bound `e·K`.
pub fn pi_valuation(a: &CyclotomicInt) -> PiValuation {
    let e = a.coeffs.len() as u64;
    let coords = power_to_pi_basis(a);
    coords
        .iter()
        .enumerate()
        .filter_map(|(j, c)| residue_valuation(c.value(), c.p()).map(|v| j as u64 + e * v as u64))
        .min()
        .map(PiValuation::Exact)
        .unwrap_or(PiValuation::AtLeast(e * a.ring.k as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, k: u32) -> PadicRing {
        PadicRing::new(p, k).unwrap()
    }

    #[test]
    fn zeta_times_inverse_is_one() {
        for (p, t) in [(5, 1), (5, 2), (7, 1), (3, 2)] {
            let r = ring(p, 4);
            let order = p.pow(t) as i64;
            let z = CyclotomicInt::zeta_power(r, t, 1);
            let zi = CyclotomicInt::zeta_power(r, t, order - 1);
            assert_eq!(cyclo_mul(&z, &zi).unwrap(), CyclotomicInt::one(r, t));
        }
    }

    #[test]
    fn cyclotomic_polynomial_vanishes() {
        let r = ring(5, 4);
        let phi = CyclotomicInt::from_exponent_coeffs(r, 1, &[1, 1, 1, 1, 1]);
        assert!(phi.is_zero());
        let x = CyclotomicInt::from_power_basis(r, 1, vec![3, 1, 4, 1]).unwrap();
        assert!(cyclo_mul(&phi, &x).unwrap().is_zero());
    }

    #[test]
    fn pi_basis_examples() {
        let r = ring(5, 4);
        let vals = |a: &CyclotomicInt| {
            a.to_pi_basis()
                .iter()
                .map(|c| c.value())
                .collect::<Vec<_>>()
        };
        assert_eq!(vals(&CyclotomicInt::zeta_power(r, 1, 1)), vec![1, 1, 0, 0]);
        assert_eq!(vals(&CyclotomicInt::one(r, 1)), vec![1, 0, 0, 0]);
        assert_eq!(vals(&CyclotomicInt::zeta_power(r, 1, 2)), vec![1, 2, 1, 0]);
    }

    #[test]
    fn valuation_examples() {
        let r = ring(5, 4);
        let p = CyclotomicInt::from_scalar(r, 1, 5);
        assert_eq!(pi_valuation(&p), PiValuation::Exact(4));
        let z = CyclotomicInt::zeta_power(r, 1, 1);
        let zi = CyclotomicInt::zeta_power(r, 1, -1);
        let two = CyclotomicInt::from_scalar(r, 1, 2);
        let y = z.add(&zi).unwrap().sub(&two).unwrap();
        assert_eq!(pi_valuation(&y), PiValuation::Exact(2));
        assert_eq!(
            pi_valuation(&CyclotomicInt::uniformizer(r, 1)),
            PiValuation::Exact(1)
        );
        assert_eq!(
            pi_valuation(&CyclotomicInt::zero(r, 1)),
            PiValuation::AtLeast(16)
        );
    }

    #[test]
    fn uniformizer_power_e_has_valuation_e() {
        for (p, t) in [(5u64, 1u32), (5, 2), (7, 1), (11, 1)] {
            let r = ring(p, 3);
            let e = ramification_index(p, t);
            let pi = CyclotomicInt::uniformizer(r, t);
            let mut acc = CyclotomicInt::one(r, t);
            for _ in 0..e {
                acc = cyclo_mul(&acc, &pi).unwrap();
            }
            assert_eq!(pi_valuation(&acc), PiValuation::Exact(e as u64));
            // v(p) = e as well
            let pv = CyclotomicInt::from_scalar(r, t, p);
            assert_eq!(pi_valuation(&pv), PiValuation::Exact(e as u64));
        }
    }

    #[test]
    fn trivial_level_is_padic() {
        let r = ring(5, 4);
        let x = CyclotomicInt::from_exponent_coeffs(r, 0, &[3, 4, 18]);
        assert_eq!(x.coeffs(), &[25]);
        assert_eq!(pi_valuation(&x), PiValuation::Exact(2));
    }

    #[test]
    fn mismatched_rings_rejected() {
        let a = CyclotomicInt::one(ring(5, 4), 1);
        let b = CyclotomicInt::one(ring(5, 3), 1);
        assert!(matches!(cyclo_mul(&a, &b), Err(Error::MismatchedRing(_))));
        let c = CyclotomicInt::one(ring(5, 4), 2);
        assert!(a.add(&c).is_err());
    }
}
