//! Group rings of the two cyclic groups in play: `(Z/N)^×` and its maximal
//! `p`-power quotient `Δ`. Elements are dense coefficient vectors indexed by
//! the exponent of a fixed generator, so multiplication is cyclic convolution.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, is_prime, p_adic_order, pow_mod};
use crate::cyclotomic::CyclotomicInt;
use crate::error::{Error, Result};
use crate::padic::{
    checked_prime_power, max_precision_for, padic_valuation, PadicRing, PiValuation,
};

/// Discrete-log tables for `(Z/N)^×` with respect to a chosen primitive root.
#[derive(Clone, Debug)]
pub struct UnitGroupStructure {
    n: u64,
    generator: u64,
    /// `ind[i] = ind_g(i)` for `1 <= i < N`; `ind[0]` is unused.
    ind: Vec<u32>,
    /// `pow[m] = g^m mod N` for `0 <= m < N-1`.
    pow: Vec<u32>,
}

/// Builds the unit group of `Z/N` with its smallest primitive root.
pub fn build_unit_group(n: u64) -> Result<UnitGroupStructure> {
    if n < 7 {
        return Err(Error::TooSmall {
            name: "N",
            value: n,
            min: 7,
        });
    }
    if !is_prime(n) {
        return Err(Error::NotPrime {
            name: "N",
            value: n,
        });
    }
    UnitGroupStructure::with_generator(n, arith::smallest_primitive_root(n))
}

impl UnitGroupStructure {
    /// Same as [`build_unit_group`] but with a caller-chosen primitive root.
    pub fn with_generator(n: u64, g: u64) -> Result<Self> {
        if !is_prime(n) {
            return Err(Error::NotPrime {
                name: "N",
                value: n,
            });
        }
        let order = (n - 1) as usize;
        let mut ind = vec![u32::MAX; n as usize];
        let mut pow = Vec::with_capacity(order);
        let mut x = 1u64;
        for m in 0..order {
            if ind[x as usize] != u32::MAX {
                return Err(Error::InvalidArgument(format!(
                    "{g} is not a primitive root modulo {n}"
                )));
            }
            ind[x as usize] = m as u32;
            pow.push(x as u32);
            x = x * g % n;
        }
        Ok(Self {
            n,
            generator: g,
            ind,
            pow,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn order(&self) -> usize {
        self.pow.len()
    }

    /// `ind_g(i)` for `i` coprime to `N`.
    pub fn ind(&self, i: u64) -> usize {
        let i = i % self.n;
        debug_assert!(i != 0);
        self.ind[i as usize] as usize
    }

    pub fn power(&self, m: usize) -> u64 {
        self.pow[m % self.pow.len()] as u64
    }
}

/// The cyclic group a [`GroupRingElem`] lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupBase {
    /// `(Z/N)^×`, of order `N - 1`.
    Units { n: u64 },
    /// `Δ`, cyclic of order `p^s`.
    Delta { p: u64, s: u32 },
}

impl GroupBase {
    pub fn order(&self) -> usize {
        match *self {
            GroupBase::Units { n } => (n - 1) as usize,
            GroupBase::Delta { p, s } => p.pow(s) as usize,
        }
    }
}

/// `Σ coeffs[m] [gen^m]` with coefficients in `Z/p^K` (`K = 1` is `F_p`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElem {
    base: GroupBase,
    ring: PadicRing,
    coeffs: Vec<u64>,
}

impl GroupRingElem {
    pub fn zero(base: GroupBase, ring: PadicRing) -> Self {
        Self {
            base,
            ring,
            coeffs: vec![0; base.order()],
        }
    }

    pub fn one(base: GroupBase, ring: PadicRing) -> Self {
        Self::basis(base, ring, 0)
    }

    /// The group element `[gen^m]`.
    pub fn basis(base: GroupBase, ring: PadicRing, m: usize) -> Self {
        let mut x = Self::zero(base, ring);
        let len = x.coeffs.len();
        x.coeffs[m % len] = 1;
        x
    }

    pub fn from_coeffs(base: GroupBase, ring: PadicRing, coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.len() != base.order() {
            return Err(Error::InvalidArgument(format!(
                "group ring vector has length {}, group order is {}",
                coeffs.len(),
                base.order()
            )));
        }
        let coeffs = coeffs.into_iter().map(|c| c % ring.modulus).collect();
        Ok(Self { base, ring, coeffs })
    }

    pub fn base(&self) -> GroupBase {
        self.base
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.base != other.base || self.ring != other.ring {
            return Err(Error::MismatchedRing(format!(
                "{:?} over Z/{} vs {:?} over Z/{}",
                self.base, self.ring.modulus, other.base, other.ring.modulus
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.ring;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| r.add(a, b))
            .collect();
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.ring;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| r.sub(a, b))
            .collect();
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: u64) -> Self {
        let r = self.ring;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| r.mul(a, c % r.modulus))
            .collect();
        Self {
            coeffs,
            ..self.clone()
        }
    }

    /// Cyclic convolution in exponent space.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.ring;
        let n = self.coeffs.len();
        let mut out = vec![0u64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b != 0 {
                    let k = (i + j) % n;
                    out[k] = r.add(out[k], r.mul(a, b));
                }
            }
        }
        Ok(Self {
            coeffs: out,
            ..self.clone()
        })
    }

    /// The involution `[x] ↦ [x^{-1}]`.
    pub fn invert_group_elements(&self) -> Self {
        let n = self.coeffs.len();
        let coeffs = (0..n).map(|m| self.coeffs[(n - m) % n]).collect();
        Self {
            coeffs,
            ..self.clone()
        }
    }

    /// Reduction to a lower precision `Z/p^k` (same `p`).
    pub fn reduce_precision(&self, k: u32) -> Result<Self> {
        if k > self.ring.k {
            return Err(Error::InvalidArgument(format!(
                "cannot raise precision from {} to {k}",
                self.ring.k
            )));
        }
        let ring = PadicRing::new(self.ring.p, k)?;
        let coeffs = self.coeffs.iter().map(|&c| c % ring.modulus).collect();
        Ok(Self {
            base: self.base,
            ring,
            coeffs,
        })
    }

    pub fn augmentation(&self) -> u64 {
        augmentation(self)
    }
}

/// Sum of the coefficients.
pub fn augmentation(x: &GroupRingElem) -> u64 {
    x.coeffs.iter().fold(0, |acc, &c| x.ring.add(acc, c))
}

/// Coordinates `b_0, …, b_{n-1}` of an element in the basis `(g-1)^i`, where
/// `g` is the fixed generator and `n` the group order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugExpansion {
    pub ring: PadicRing,
    pub b: Vec<u64>,
}

impl AugExpansion {
    /// Rebuilds `Σ b_i (g-1)^i` in the group basis.
    pub fn to_group_ring(&self, base: GroupBase) -> Result<GroupRingElem> {
        let r = self.ring;
        let mut c = self.b.clone();
        let n = c.len();
        // Taylor shift by -1 turns a polynomial in (g-1) back into one in g.
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] = r.sub(c[j], c[j + 1]);
            }
        }
        GroupRingElem::from_coeffs(base, r, c)
    }
}

/// Expands `x` in powers of `g - 1`. Because `(1+y)^n - 1` is monic of degree
/// `n` in `y = g - 1`, the `(g-1)^i` for `i < n` are a basis over any
/// coefficient ring and the change of basis is the binomial Taylor shift.
pub fn aug_power_expansion(x: &GroupRingElem) -> AugExpansion {
    let r = x.ring;
    let mut c = x.coeffs.clone();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            c[j] = r.add(c[j], c[j + 1]);
        }
    }
    AugExpansion { ring: r, b: c }
}

/// Order of vanishing in the augmentation filtration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderOfVanishing {
    Exact(usize),
    /// Every `b_i` with `1 <= i < n` vanished; the value is `n`, the group order.
    AtLeast(usize),
}

impl OrderOfVanishing {
    pub fn exact(&self) -> Option<usize> {
        match *self {
            OrderOfVanishing::Exact(v) => Some(v),
            OrderOfVanishing::AtLeast(_) => None,
        }
    }

    pub fn is(&self, v: usize) -> bool {
        self.exact() == Some(v)
    }
}

impl fmt::Display for OrderOfVanishing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderOfVanishing::Exact(v) => write!(f, "{v}"),
            OrderOfVanishing::AtLeast(v) => write!(f, "≥{v}"),
        }
    }
}

impl Serialize for OrderOfVanishing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            OrderOfVanishing::Exact(v) => s.serialize_u64(*v as u64),
            OrderOfVanishing::AtLeast(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for OrderOfVanishing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(OrderOfVanishing::Exact(v)),
            Raw::Text(s) => s
                .strip_prefix('≥')
                .and_then(|v| v.parse().ok())
                .map(OrderOfVanishing::AtLeast)
                .ok_or_else(|| serde::de::Error::custom(format!("bad order marker {s:?}"))),
        }
    }
}

/// `min{ i >= 1 : b_i ≠ 0 }` for an element of the augmentation ideal over `F_p`.
pub fn order_of_vanishing(xbar: &GroupRingElem) -> Result<OrderOfVanishing> {
    let aug = augmentation(xbar) % xbar.ring.p;
    if aug != 0 {
        return Err(Error::NotInAugmentationIdeal { augmentation: aug });
    }
    let exp = aug_power_expansion(xbar);
    let p = xbar.ring.p;
    let n = exp.b.len();
    Ok(exp
        .b
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, &b)| b % p != 0)
        .map(|(i, _)| OrderOfVanishing::Exact(i))
        .unwrap_or(OrderOfVanishing::AtLeast(n)))
}

/// Pushes an element of `R[(Z/N)^×]` forward to `R[Δ]` along `g^m ↦ δ^{m mod p^s}`.
pub fn project_to_delta(x: &GroupRingElem, p: u64, s: u32) -> Result<GroupRingElem> {
    let n = match x.base {
        GroupBase::Units { n } => n,
        GroupBase::Delta { .. } => {
            return Err(Error::InvalidArgument(
                "element already lives over Δ".into(),
            ))
        }
    };
    let order = p.pow(s) as usize;
    if !((n - 1) as usize).is_multiple_of(order) {
        return Err(Error::InvalidArgument(format!(
            "{p}^{s} does not divide N-1 = {}",
            n - 1
        )));
    }
    let base = GroupBase::Delta { p, s };
    let r = x.ring;
    let mut out = vec![0u64; order];
    for (m, &c) in x.coeffs.iter().enumerate() {
        out[m % order] = r.add(out[m % order], c);
    }
    GroupRingElem::from_coeffs(base, r, out)
}

/// A character of `Δ` of order `p^t` sending the fixed generator to the
/// power-basis root `ζ_{p^t}`; `t = 0` is the trivial character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeltaCharacter {
    pub p: u64,
    pub s: u32,
    pub t: u32,
}

impl DeltaCharacter {
    pub fn new(p: u64, s: u32, t: u32) -> Result<Self> {
        if t > s {
            return Err(Error::InvalidArgument(format!(
                "character order p^{t} exceeds |Δ| = p^{s}"
            )));
        }
        Ok(Self { p, s, t })
    }

    pub fn trivial(p: u64, s: u32) -> Self {
        Self { p, s, t: 0 }
    }

    pub fn is_trivial(&self) -> bool {
        self.t == 0
    }

    /// `χ([i])` for `i` coprime to `N`, through the discrete log.
    pub fn value_at(&self, units: &UnitGroupStructure, i: u64, ring: PadicRing) -> CyclotomicInt {
        CyclotomicInt::zeta_power(ring, self.t, units.ind(i) as i64)
    }
}

/// `Σ coeffs[k] ζ_{p^t}^{k mod p^t}`.
pub fn apply_character(x: &GroupRingElem, chi: &DeltaCharacter) -> Result<CyclotomicInt> {
    match x.base {
        GroupBase::Delta { p, s } if p == chi.p && s == chi.s => {}
        other => {
            return Err(Error::MismatchedRing(format!(
                "character of Δ(p={}, s={}) applied to element over {other:?}",
                chi.p, chi.s
            )))
        }
    }
    if x.ring.p != chi.p {
        return Err(Error::MismatchedRing(
            "coefficient prime differs from p".into(),
        ));
    }
    Ok(CyclotomicInt::from_exponent_coeffs(
        x.ring, chi.t, &x.coeffs,
    ))
}

/// Outcome of checking the monogenic presentation of `Z_p[Δ]^+` by
/// `y = [δ] + [δ^{-1}] - 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlusPresentation {
    pub p: u64,
    pub s: u32,
    pub precision: u32,
    /// Degree of the minimal polynomial of `y`.
    pub degree: usize,
    /// `v_p(Ψ(0))` where the minimal polynomial is `y·Ψ(y)`.
    pub v_p_of_constant: PiValuation,
    /// Non-leading coefficients of `Ψ` all divisible by `p`.
    pub distinguished: bool,
    /// Coefficients of the minimal polynomial, lowest degree first, mod `p^K`.
    pub minpoly: Vec<u64>,
}

impl PlusPresentation {
    pub fn holds(&self) -> bool {
        let expected_degree = (self.p.pow(self.s) as usize).div_ceil(2);
        self.degree == expected_degree
            && self.minpoly.first() == Some(&0)
            && self.v_p_of_constant == PiValuation::Exact(self.s as u64)
            && self.distinguished
    }
}

/// Computes the minimal polynomial of `y` on the inversion-fixed subring of
/// `Z/p^K[Δ]` and reports its degree and the valuation of `Ψ(0)`. Doubles `K`
/// while the constant is invisible at the current precision.
pub fn verify_plus_presentation(p: u64, s: u32, k: u32) -> Result<PlusPresentation> {
    if s == 0 {
        return Err(Error::InvalidArgument("need s >= 1".into()));
    }
    if !is_prime(p) || p < 3 {
        return Err(Error::NotPrime {
            name: "p",
            value: p,
        });
    }
    let cap = max_precision_for(p);
    let mut k = k.max(1).min(cap);
    loop {
        let res = plus_presentation_at(p, s, k)?;
        if res.v_p_of_constant.is_exact() {
            return Ok(res);
        }
        if k >= cap {
            return Err(Error::PrecisionExhausted {
                k,
                what: format!("v_p(Ψ(0)) for p={p}, s={s}"),
            });
        }
        k = (2 * k).min(cap);
    }
}

fn plus_presentation_at(p: u64, s: u32, k: u32) -> Result<PlusPresentation> {
    let ring = PadicRing::new(p, k)?;
    let base = GroupBase::Delta { p, s };
    let n = base.order();
    let d = n.div_ceil(2);
    let delta = GroupRingElem::basis(base, ring, 1);
    let y = delta
        .add(&delta.invert_group_elements())?
        .sub(&GroupRingElem::one(base, ring).scale(2))?;

    let mut powers = vec![GroupRingElem::one(base, ring)];
    for j in 1..=d {
        let next = powers[j - 1].mul(&y)?;
        powers.push(next);
    }
    // Coordinates on [δ^k] + [δ^{-k}] (k = 0 is [1]); y^j is unitriangular there.
    let coord = |x: &GroupRingElem, kk: usize| x.coeffs()[kk];
    let target = &powers[d];
    let mut m = vec![0u64; d];
    for kk in (0..d).rev() {
        let mut acc = coord(target, kk);
        for (j, mj) in m.iter().enumerate().skip(kk + 1) {
            acc = ring.sub(acc, ring.mul(*mj, coord(&powers[j], kk)));
        }
        debug_assert_eq!(coord(&powers[kk], kk), 1);
        m[kk] = acc;
    }
    let mut residual = target.clone();
    for (j, &mj) in m.iter().enumerate() {
        residual = residual.sub(&powers[j].scale(mj))?;
    }
    if !residual.is_zero() {
        return Err(Error::InvariantViolation(
            "y^d is not in the span of lower powers".into(),
        ));
    }
    // minpoly(Y) = Y^d - Σ m_j Y^j
    let mut minpoly: Vec<u64> = m.iter().map(|&c| ring.neg(c)).collect();
    minpoly.push(1);
    let psi0 = ring.element(minpoly[1]);
    let distinguished = minpoly[1..d].iter().all(|&c| c % p == 0);
    checked_prime_power(p, k)?;
    Ok(PlusPresentation {
        p,
        s,
        precision: k,
        degree: d,
        v_p_of_constant: padic_valuation(&psi0),
        distinguished,
        minpoly,
    })
}

/// `v_p(N - 1)`, the exponent with `|Δ| = p^s`.
pub fn delta_exponent(n: u64, p: u64) -> u32 {
    p_adic_order(n - 1, p)
}

/// Checks `g^{ind[i]} = i` for every unit, used by the invariant suites.
pub fn discrete_log_table_is_consistent(u: &UnitGroupStructure) -> bool {
    let n = u.modulus();
    let mut seen = vec![false; u.order()];
    (1..n).all(|i| {
        let m = u.ind(i);
        let fresh = !seen[m];
        seen[m] = true;
        fresh && pow_mod(u.generator(), m as u64, n) == i
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> PadicRing {
        PadicRing::new(p, 1).unwrap()
    }

    #[test]
    fn unit_group_examples() {
        let u = build_unit_group(7).unwrap();
        assert_eq!(u.generator(), 3);
        assert_eq!(u.ind(3), 1);
        assert_eq!(u.ind(2), 2);
        let u = build_unit_group(11).unwrap();
        assert_eq!(u.generator(), 2);
        assert_eq!(u.ind(2), 1);
        let u = build_unit_group(181).unwrap();
        assert_eq!(u.generator(), 2);
        assert!(discrete_log_table_is_consistent(&u));
        assert!(matches!(build_unit_group(21), Err(Error::NotPrime { .. })));
        assert!(UnitGroupStructure::with_generator(11, 3).is_err());
    }

    #[test]
    fn augmentation_examples() {
        let base = GroupBase::Units { n: 11 };
        let r = fp(5);
        let g = GroupRingElem::basis(base, r, 1);
        let one = GroupRingElem::one(base, r);
        assert_eq!(augmentation(&g.sub(&one).unwrap()), 0);
        assert_eq!(augmentation(&one), 1);
    }

    #[test]
    fn expansion_examples() {
        let base = GroupBase::Units { n: 11 };
        let r = PadicRing::new(5, 3).unwrap();
        let one = GroupRingElem::one(base, r);
        let g1 = GroupRingElem::basis(base, r, 1).sub(&one).unwrap();
        let e = aug_power_expansion(&g1);
        assert_eq!(&e.b[..4], &[0, 1, 0, 0]);
        let g2 = GroupRingElem::basis(base, r, 2).sub(&one).unwrap();
        let e = aug_power_expansion(&g2);
        assert_eq!(&e.b[..4], &[0, 2, 1, 0]);
        assert_eq!(e.to_group_ring(base).unwrap(), g2);
        assert_eq!(
            order_of_vanishing(&g1.reduce_precision(1).unwrap()).unwrap(),
            OrderOfVanishing::Exact(1)
        );
    }

    #[test]
    fn order_of_vanishing_rejects_units() {
        let base = GroupBase::Units { n: 11 };
        let one = GroupRingElem::one(base, fp(5));
        assert!(matches!(
            order_of_vanishing(&one),
            Err(Error::NotInAugmentationIdeal { augmentation: 1 })
        ));
        let zero = GroupRingElem::zero(base, fp(5));
        assert_eq!(
            order_of_vanishing(&zero).unwrap(),
            OrderOfVanishing::AtLeast(10)
        );
    }

    #[test]
    fn projection_examples() {
        let base = GroupBase::Units { n: 11 };
        let r = PadicRing::new(5, 2).unwrap();
        let g = GroupRingElem::basis(base, r, 1);
        let pg = project_to_delta(&g, 5, 1).unwrap();
        assert_eq!(
            pg,
            GroupRingElem::basis(GroupBase::Delta { p: 5, s: 1 }, r, 1)
        );
        let eta = GroupRingElem::from_coeffs(base, r, vec![1; 10]).unwrap();
        let pe = project_to_delta(&eta, 5, 1).unwrap();
        assert_eq!(pe.coeffs(), &[2, 2, 2, 2, 2]);
    }

    #[test]
    fn character_examples() {
        let r = PadicRing::new(5, 3).unwrap();
        let base = GroupBase::Delta { p: 5, s: 1 };
        let chi = DeltaCharacter::new(5, 1, 1).unwrap();
        let eta = GroupRingElem::from_coeffs(base, r, vec![2; 5]).unwrap();
        assert!(apply_character(&eta, &chi).unwrap().is_zero());
        let d = GroupRingElem::basis(base, r, 1);
        let x = d.add(&d.invert_group_elements()).unwrap();
        let expect = CyclotomicInt::zeta_power(r, 1, 1)
            .add(&CyclotomicInt::zeta_power(r, 1, -1))
            .unwrap();
        assert_eq!(apply_character(&x, &chi).unwrap(), expect);
        let one = GroupRingElem::one(base, r);
        assert_eq!(
            apply_character(&one, &chi).unwrap(),
            CyclotomicInt::one(r, 1)
        );
        assert!(DeltaCharacter::new(5, 1, 2).is_err());
    }

    #[test]
    fn plus_presentation_small_cases() {
        for (p, s, deg) in [(5u64, 1u32, 3usize), (7, 1, 4), (11, 1, 6)] {
            let res = verify_plus_presentation(p, s, 4).unwrap();
            assert_eq!(res.degree, deg);
            assert_eq!(res.v_p_of_constant, PiValuation::Exact(1));
            assert!(res.holds(), "{res:?}");
        }
    }
}
