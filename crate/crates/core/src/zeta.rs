//! The zeta element `ζ = -(N/2) Σ B₂(i/N)[i]`, its image `ζ_Δ` in the
//! `Δ`-group ring, the congruence generator `Θ = ζ_Δ + (N/12)·η`, and the
//! comparison between `ord(ζ̄)` and `v(χ(Θ))`.

use serde::Serialize;

use crate::cyclotomic::{ramification_index, CyclotomicInt};
use crate::error::{check_level_and_prime, Error, Result};
use crate::group_ring::{
    apply_character, aug_power_expansion, build_unit_group, delta_exponent, order_of_vanishing,
    project_to_delta, DeltaCharacter, GroupBase, GroupRingElem, OrderOfVanishing,
    UnitGroupStructure,
};
use crate::padic::{max_precision_for, PadicRing, PiValuation, DEFAULT_PRECISION};

/// Coefficient of `[i]` in `ζ`: `-(2N)^{-1} i² + 2^{-1} i - 12^{-1} N` in `Z/p^K`.
pub fn zeta_coefficient(ring: &PadicRing, n: u64, i: u64) -> u64 {
    let inv2n = ring.inv(2 * n % ring.modulus).expect("p ∤ 2N");
    let inv2 = ring.inv(2).expect("p odd");
    let inv12 = ring.inv(12).expect("p >= 5");
    let i = i % ring.modulus;
    let sq = ring.mul(i, i);
    let a = ring.neg(ring.mul(sq, inv2n));
    let b = ring.mul(i, inv2);
    let c = ring.mul(n % ring.modulus, inv12);
    ring.sub(ring.add(a, b), c)
}

/// `(N-1)/12` in `Z/p^K`.
pub fn constant_term(ring: &PadicRing, n: u64) -> u64 {
    ring.mul((n - 1) % ring.modulus, ring.inv(12).expect("p >= 5"))
}

#[derive(Clone, Debug)]
pub struct ZetaElement {
    pub n: u64,
    pub p: u64,
    pub k: u32,
    /// `ζ` over `Z/p^K`, indexed by `ind_g`.
    pub elem: GroupRingElem,
    /// `ζ̄` over `F_p`.
    pub elem_bar: GroupRingElem,
}

pub fn build_zeta(n: u64, p: u64, k: u32) -> Result<ZetaElement> {
    check_level_and_prime(n, p)?;
    let units = build_unit_group(n)?;
    build_zeta_with(&units, p, k)
}

/// `ζ` with respect to the generator fixed in `units`.
pub fn build_zeta_with(units: &UnitGroupStructure, p: u64, k: u32) -> Result<ZetaElement> {
    let n = units.modulus();
    check_level_and_prime(n, p)?;
    let ring = PadicRing::new(p, k)?;
    let mut coeffs = vec![0u64; units.order()];
    for i in 1..n {
        coeffs[units.ind(i)] = zeta_coefficient(&ring, n, i);
    }
    let elem = GroupRingElem::from_coeffs(GroupBase::Units { n }, ring, coeffs)?;
    let elem_bar = elem.reduce_precision(1)?;
    Ok(ZetaElement {
        n,
        p,
        k,
        elem,
        elem_bar,
    })
}

/// `ord(ζ̄)`: the first `i >= 1` whose coefficient `b_i` in the `(g-1)`-expansion is a unit.
pub fn ord_zeta_bar(n: u64, p: u64) -> Result<OrderOfVanishing> {
    let z = build_zeta(n, p, 1)?;
    order_of_vanishing(&z.elem_bar)
}

/// The `b_i` of `ζ` modulo `p^K`.
pub fn zeta_expansion(z: &ZetaElement) -> Vec<u64> {
    aug_power_expansion(&z.elem).b
}

#[derive(Clone, Debug)]
pub struct ThetaElement {
    pub n: u64,
    pub p: u64,
    pub s: u32,
    pub k: u32,
    pub theta: GroupRingElem,
    pub eta: GroupRingElem,
    pub zeta_delta: GroupRingElem,
}

impl ThetaElement {
    /// `χ(diff)`: `1` for nontrivial characters, `1 + N` for the trivial one.
    pub fn chi_of_diff(&self, chi: &DeltaCharacter) -> CyclotomicInt {
        let ring = self.theta.ring();
        let v = if chi.is_trivial() { 1 + self.n } else { 1 };
        CyclotomicInt::from_scalar(ring, chi.t, v % ring.modulus)
    }

    pub fn character(&self, t: u32) -> Result<DeltaCharacter> {
        DeltaCharacter::new(self.p, self.s, t)
    }
}

/// `Θ = ζ_Δ - N·L(-1,1)·η_Δ` with `L(-1,1) = -1/12`, all in `Z/p^K[Δ]`.
pub fn build_theta(n: u64, p: u64, k: u32) -> Result<ThetaElement> {
    let z = build_zeta(n, p, k)?;
    theta_from_zeta(&z)
}

pub fn theta_from_zeta(z: &ZetaElement) -> Result<ThetaElement> {
    let s = delta_exponent(z.n, z.p);
    let ring = z.elem.ring();
    let zeta_delta = project_to_delta(&z.elem, z.p, s)?;
    let eta_units = GroupRingElem::from_coeffs(
        GroupBase::Units { n: z.n },
        ring,
        vec![1; (z.n - 1) as usize],
    )?;
    let eta = project_to_delta(&eta_units, z.p, s)?;
    let n_over_12 = ring.mul(z.n % ring.modulus, ring.inv(12).expect("p >= 5"));
    let theta = zeta_delta.add(&eta.scale(n_over_12))?;
    Ok(ThetaElement {
        n: z.n,
        p: z.p,
        s,
        k: z.k,
        theta,
        eta,
        zeta_delta,
    })
}

/// `χ_t(ζ_Δ)`, which is `L(-1, χ_t)` for `t >= 1` and `(1-N)L(-1,1) = (N-1)/12` for `t = 0`.
pub fn l_value_minus1(n: u64, p: u64, t: u32, k: u32) -> Result<CyclotomicInt> {
    let theta = build_theta(n, p, k)?;
    let chi = theta.character(t)?;
    apply_character(&theta.zeta_delta, &chi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrdResult {
    pub ord: OrderOfVanishing,
    /// Ramification index `(p-1)p^{s-1}`, i.e. `v(p)`.
    pub e: usize,
    /// `(t, v(χ_t(Θ)))` for `1 <= t <= s`.
    pub val_chi_theta: Vec<(u32, PiValuation)>,
    pub consistent: bool,
    pub precision: u32,
}

impl OrdResult {
    /// The valuation at the top character `t = s`.
    pub fn top_valuation(&self) -> PiValuation {
        self.val_chi_theta.last().map(|&(_, v)| v).expect("s >= 1")
    }
}

/// Compares `ord(ζ̄)` with `v(χ_s(Θ))`: equality when `ord < v(p)`, and
/// `v(χ_s(Θ)) >= v(p)` otherwise. Retries with doubled precision while any
/// valuation is only a lower bound.
pub fn ord_vs_theta_check(n: u64, p: u64) -> Result<OrdResult> {
    ord_vs_theta_check_at(n, p, DEFAULT_PRECISION)
}

pub fn ord_vs_theta_check_at(n: u64, p: u64, start_k: u32) -> Result<OrdResult> {
    check_level_and_prime(n, p)?;
    let units = build_unit_group(n)?;
    let ord = {
        let z = build_zeta_with(&units, p, 1)?;
        order_of_vanishing(&z.elem_bar)?
    };
    let s = delta_exponent(n, p);
    let e = ramification_index(p, s);
    let cap = max_precision_for(p);
    let mut k = start_k.clamp(1, cap);
    loop {
        let z = build_zeta_with(&units, p, k)?;
        let theta = theta_from_zeta(&z)?;
        let mut vals = Vec::with_capacity(s as usize);
        for t in 1..=s {
            let chi = theta.character(t)?;
            vals.push((t, apply_character(&theta.theta, &chi)?.pi_valuation()));
        }
        let all_exact = vals.iter().all(|(_, v)| v.is_exact());
        if all_exact || k >= cap {
            let top = vals.last().expect("s >= 1").1;
            let consistent = match ord {
                OrderOfVanishing::Exact(o) if o < e => {
                    if !top.is_exact() {
                        return Err(Error::PrecisionExhausted {
                            k,
                            what: format!("v(χ_s(Θ)) for N={n}, p={p}"),
                        });
                    }
                    top == PiValuation::Exact(o as u64)
                }
                _ => top.amount() >= e as u64,
            };
            return Ok(OrdResult {
                ord,
                e,
                val_chi_theta: vals,
                consistent,
                precision: k,
            });
        }
        k = (2 * k).min(cap);
    }
}
