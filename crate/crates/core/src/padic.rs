//! Integers modulo `p^K` with explicit precision, and valuations that know
//! whether they are exact or only a lower bound.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, mul_mod};
use crate::error::{Error, Result};

/// Default working precision exponent.
pub const DEFAULT_PRECISION: u32 = 4;
/// Largest precision the adaptive retry loop will try.
pub const MAX_PRECISION: u32 = 64;

/// `p^k`, or an error when it does not fit in a `u64` with headroom for `u128` products.
pub fn checked_prime_power(p: u64, k: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc
            .checked_mul(p)
            .filter(|&v| v < (1u64 << 63))
            .ok_or(Error::PrecisionTooLarge { p, k })?;
    }
    Ok(acc)
}

/// Largest `K` with `p^K` representable; the retry loop never goes past it.
pub fn max_precision_for(p: u64) -> u32 {
    let mut k = 1;
    while k < MAX_PRECISION && checked_prime_power(p, k + 1).is_ok() {
        k += 1;
    }
    k
}

/// A valuation that is either known exactly or only bounded below because the
/// element vanished at the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "amount", rename_all = "kebab-case")]
pub enum PiValuation {
    Exact(u64),
    AtLeast(u64),
}

impl PiValuation {
    pub fn is_exact(&self) -> bool {
        matches!(self, PiValuation::Exact(_))
    }

    pub fn amount(&self) -> u64 {
        match *self {
            PiValuation::Exact(v) | PiValuation::AtLeast(v) => v,
        }
    }

    pub fn exact(&self) -> Option<u64> {
        match *self {
            PiValuation::Exact(v) => Some(v),
            PiValuation::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for PiValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiValuation::Exact(v) => write!(f, "{v}"),
            PiValuation::AtLeast(v) => write!(f, "≥{v}"),
        }
    }
}

/// Residue modulo `p^K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedPadic {
    p: u64,
    k: u32,
    modulus: u64,
    value: u64,
}

impl TruncatedPadic {
    pub fn new(p: u64, k: u32, value: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("precision K must be >= 1".into()));
        }
        let modulus = checked_prime_power(p, k)?;
        Ok(Self {
            p,
            k,
            modulus,
            value: value % modulus,
        })
    }

    /// Reduction of a signed integer.
    pub fn from_i64(p: u64, k: u32, value: i64) -> Result<Self> {
        let modulus = checked_prime_power(p, k)?;
        Self::new(p, k, value.rem_euclid(modulus as i64) as u64)
    }

    pub(crate) fn from_parts(p: u64, k: u32, modulus: u64, value: u64) -> Self {
        debug_assert!(value < modulus);
        Self {
            p,
            k,
            modulus,
            value,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.k != other.k {
            return Err(Error::MismatchedRing(format!(
                "Z/{}^{} vs Z/{}^{}",
                self.p, self.k, other.p, other.k
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            value: (self.value + other.value) % self.modulus,
            ..*self
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            value: (self.value + self.modulus - other.value) % self.modulus,
            ..*self
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            value: mul_mod(self.value, other.value, self.modulus),
            ..*self
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            value: (self.modulus - self.value) % self.modulus,
            ..*self
        }
    }

    /// Inverse, defined exactly when the residue is a unit.
    pub fn inv(&self) -> Option<Self> {
        inv_mod(self.value, self.modulus).map(|value| Self { value, ..*self })
    }

    /// Valuation in units of `v_p`.
    pub fn valuation(&self) -> PiValuation {
        padic_valuation(self)
    }
}

/// `v_p` of a truncated p-adic integer: exact when the residue is nonzero,
/// otherwise only `>= K`.
pub fn padic_valuation(x: &TruncatedPadic) -> PiValuation {
    match residue_valuation(x.value, x.p) {
        Some(v) => PiValuation::Exact(v as u64),
        None => PiValuation::AtLeast(x.k as u64),
    }
}

/// `v_p(value)` for a nonzero residue, `None` for zero.
pub(crate) fn residue_valuation(mut value: u64, p: u64) -> Option<u32> {
    if value == 0 {
        return None;
    }
    let mut v = 0;
    while value.is_multiple_of(p) {
        value /= p;
        v += 1;
    }
    Some(v)
}

/// Arithmetic context for `Z/p^K`, used by the vectorized code paths that
/// work on raw residues instead of `TruncatedPadic` values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicRing {
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
}

impl PadicRing {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("precision K must be >= 1".into()));
        }
        Ok(Self {
            p,
            k,
            modulus: checked_prime_power(p, k)?,
        })
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.modulus)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.modulus as i64) as u64
    }

    /// Inverse of an integer coprime to `p`.
    pub fn inv(&self, a: u64) -> Option<u64> {
        inv_mod(a % self.modulus, self.modulus)
    }

    pub fn element(&self, value: u64) -> TruncatedPadic {
        TruncatedPadic::from_parts(self.p, self.k, self.modulus, value % self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        let v = |x| padic_valuation(&TruncatedPadic::new(5, 4, x).unwrap());
        assert_eq!(v(25), PiValuation::Exact(2));
        assert_eq!(v(0), PiValuation::AtLeast(4));
        assert_eq!(v(7), PiValuation::Exact(0));
        assert_eq!(v(625), PiValuation::AtLeast(4));
    }

    #[test]
    fn ring_ops() {
        let a = TruncatedPadic::new(5, 2, 7).unwrap();
        let b = TruncatedPadic::new(5, 2, 20).unwrap();
        assert_eq!(a.add(&b).unwrap().value(), 2);
        assert_eq!(a.sub(&b).unwrap().value(), 12);
        assert_eq!(a.mul(&b).unwrap().value(), 15);
        assert_eq!(a.mul(&a.inv().unwrap()).unwrap().value(), 1);
        assert!(b.inv().is_none());
        let c = TruncatedPadic::new(5, 3, 1).unwrap();
        assert!(matches!(a.add(&c), Err(Error::MismatchedRing(_))));
    }

    #[test]
    fn precision_limits() {
        assert!(checked_prime_power(5, 27).is_ok());
        assert!(checked_prime_power(5, 28).is_err());
        assert_eq!(max_precision_for(5), 27);
        assert!(max_precision_for(10007) >= 4);
        assert!(TruncatedPadic::new(5, 0, 1).is_err());
    }
}
