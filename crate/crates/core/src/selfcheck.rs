//! Invariant suites run by the `selfcheck` command.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{is_prime, primitive_roots};
use crate::cyclotomic::{ramification_index, CyclotomicInt};
use crate::error::Result;
use crate::group_ring::{
    apply_character, order_of_vanishing, verify_plus_presentation, DeltaCharacter,
    UnitGroupStructure,
};
use crate::linalg::DenseMatrix;
use crate::modsym::{build_space, eisenstein_rank, genus, hecke_matrix, num_cusps, Sign};
use crate::padic::{PadicRing, PiValuation};
use crate::report::scan_levels;
use crate::zeta::{build_theta, build_zeta_with, zeta_coefficient};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfcheckReport {
    pub checks: Vec<CheckResult>,
}

impl SelfcheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug)]
pub struct SelfcheckOptions {
    pub seed: u64,
    /// Random pairs per ring in the valuation suite.
    pub valuation_pairs: usize,
    /// Levels `N ≡ 1 (mod 5)` up to this bound form the scanned set.
    pub scan_max: u64,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            valuation_pairs: 1000,
            scan_max: 200,
        }
    }
}

/// Outcome of one suite: `(cases, first failure)`.
type Suite = Result<(usize, Option<String>)>;

fn run(name: &str, f: impl FnOnce() -> Suite) -> CheckResult {
    let t = Instant::now();
    let (passed, cases, detail) = match f() {
        Ok((cases, None)) => (true, cases, String::new()),
        Ok((cases, Some(msg))) => (false, cases, msg),
        Err(e) => (false, 0, e.to_string()),
    };
    CheckResult {
        name: name.to_string(),
        passed,
        cases,
        detail,
        elapsed_ms: t.elapsed().as_millis(),
    }
}

pub fn run_selfcheck(opts: &SelfcheckOptions) -> SelfcheckReport {
    let scanned = scan_levels(5, 7, opts.scan_max);
    let checks = vec![
        run("valuation multiplicativity", || {
            valuation_multiplicativity(opts)
        }),
        run("ord independent of generator", ord_generator_independence),
        run("character interpolation of zeta", || {
            interpolation(&scanned)
        }),
        run("theta is zeta times diff", || theta_factorization(&scanned)),
        run("zeta symmetry under i -> N-i", || {
            negation_symmetry(&scanned)
        }),
        run("hecke commutativity and star", hecke_commutation),
        run("modular symbol dimensions", dimension_formula),
        run("plus and minus Eisenstein dimensions", || {
            plus_minus(&scanned)
        }),
        run("plus presentation", plus_presentation),
    ];
    SelfcheckReport { checks }
}

fn valuation_multiplicativity(opts: &SelfcheckOptions) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cases = 0;
    for (p, t, k) in [(5u64, 1u32, 4u32), (5, 2, 4), (7, 1, 3), (11, 1, 3)] {
        let ring = PadicRing::new(p, k)?;
        let e = ramification_index(p, t) as u64;
        let pi = CyclotomicInt::uniformizer(ring, t);
        let random = |rng: &mut ChaCha8Rng| -> Result<CyclotomicInt> {
            let coeffs = (0..e).map(|_| rng.gen_range(0..ring.modulus)).collect();
            let mut x = CyclotomicInt::from_power_basis(ring, t, coeffs)?;
            for _ in 0..rng.gen_range(0..2 * e) {
                x = x.mul(&pi)?;
            }
            Ok(x)
        };
        for _ in 0..opts.valuation_pairs {
            let a = random(&mut rng)?;
            let b = random(&mut rng)?;
            let vab = a.mul(&b)?.pi_valuation();
            cases += 1;
            if let (PiValuation::Exact(va), PiValuation::Exact(vb)) =
                (a.pi_valuation(), b.pi_valuation())
            {
                let ok = if va + vb < e * k as u64 {
                    vab == PiValuation::Exact(va + vb)
                } else {
                    vab == PiValuation::AtLeast(e * k as u64)
                };
                if !ok {
                    return Ok((
                        cases,
                        Some(format!("p={p} t={t}: v(a)={va}, v(b)={vb}, v(ab)={vab}")),
                    ));
                }
            }
        }
    }
    Ok((cases, None))
}

fn ord_generator_independence() -> Suite {
    let mut cases = 0;
    for p in [5u64, 7, 11, 13] {
        for n in (p + 1..100).filter(|&n| n % p == 1 && is_prime(n)) {
            let mut seen = None;
            for g in primitive_roots(n) {
                let units = UnitGroupStructure::with_generator(n, g)?;
                let z = build_zeta_with(&units, p, 1)?;
                let ord = order_of_vanishing(&z.elem_bar)?;
                cases += 1;
                match seen {
                    None => seen = Some(ord),
                    Some(o) if o != ord => {
                        return Ok((cases, Some(format!("N={n} p={p}: {o} vs {ord} for g={g}"))))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok((cases, None))
}

/// `χ(ζ_Δ)` through the projection equals the direct character sum over `(Z/N)^×`.
fn interpolation(levels: &[u64]) -> Suite {
    let p = 5;
    let mut cases = 0;
    for &n in levels {
        let th = build_theta(n, p, 4)?;
        let ring = th.zeta_delta.ring();
        let units = crate::group_ring::build_unit_group(n)?;
        for t in 0..=th.s {
            let chi = DeltaCharacter::new(p, th.s, t)?;
            let via_delta = apply_character(&th.zeta_delta, &chi)?;
            let mut direct = CyclotomicInt::zero(ring, t);
            for i in 1..n {
                let term = chi
                    .value_at(&units, i, ring)
                    .scale(zeta_coefficient(&ring, n, i));
                direct = direct.add(&term)?;
            }
            cases += 1;
            if via_delta != direct {
                return Ok((cases, Some(format!("N={n} t={t}"))));
            }
            if t == 0 {
                let expect = crate::zeta::constant_term(&ring, n);
                if direct.coeffs() != [expect] {
                    return Ok((
                        cases,
                        Some(format!("N={n}: trivial value {:?}", direct.coeffs())),
                    ));
                }
            }
        }
    }
    Ok((cases, None))
}

fn theta_factorization(levels: &[u64]) -> Suite {
    let p = 5;
    let mut cases = 0;
    for &n in levels {
        let th = build_theta(n, p, 4)?;
        for t in 0..=th.s {
            let chi = th.character(t)?;
            let lhs = apply_character(&th.theta, &chi)?;
            let rhs = apply_character(&th.zeta_delta, &chi)?.mul(&th.chi_of_diff(&chi))?;
            cases += 1;
            if lhs != rhs {
                return Ok((cases, Some(format!("N={n} t={t}"))));
            }
        }
    }
    Ok((cases, None))
}

/// `B₂(x) = B₂(1-x)` makes the coefficients of `[i]` and `[N-i]` agree.
fn negation_symmetry(levels: &[u64]) -> Suite {
    let mut cases = 0;
    for &n in levels {
        let units = crate::group_ring::build_unit_group(n)?;
        let z = build_zeta_with(&units, 5, 4)?;
        let c = z.elem.coeffs();
        cases += 1;
        if let Some(i) = (1..n).find(|&i| c[units.ind(i)] != c[units.ind(n - i)]) {
            return Ok((cases, Some(format!("N={n}: [{i}] and [{}] differ", n - i))));
        }
    }
    Ok((cases, None))
}

fn hecke_commutation() -> Suite {
    let mut cases = 0;
    for (m, p) in [(11u64, 5u64), (31, 5), (49, 5), (121, 5), (61, 7)] {
        let s = build_space(m, p, Sign::Zero)?;
        let f = s.field();
        let primes: Vec<u64> = [2u64, 3, 5, 7].into_iter().filter(|l| m % l != 0).collect();
        let mats: Vec<DenseMatrix> = primes
            .iter()
            .map(|&l| hecke_matrix(&s, l).map(|t| t.mat.to_dense()))
            .collect::<Result<_>>()?;
        let star = s.star_matrix().to_dense();
        for (i, a) in mats.iter().enumerate() {
            cases += 1;
            if a.mul(&star, f) != star.mul(a, f) {
                return Ok((cases, Some(format!("M={m}: T_{} and star", primes[i]))));
            }
            for (j, b) in mats.iter().enumerate().skip(i + 1) {
                cases += 1;
                if a.mul(b, f) != b.mul(a, f) {
                    return Ok((
                        cases,
                        Some(format!("M={m}: T_{} T_{}", primes[i], primes[j])),
                    ));
                }
            }
        }
    }
    Ok((cases, None))
}

fn dimension_formula() -> Suite {
    let mut cases = 0;
    for m in [11u64, 31, 41, 61, 71, 101, 121, 181, 961, 1681] {
        let s = build_space(m, 5, Sign::Zero)?;
        let expect = 2 * genus(m) + num_cusps(m) - 1;
        cases += 1;
        if s.dim() as u64 != expect || s.cusp_count() as u64 != num_cusps(m) {
            return Ok((cases, Some(format!("M={m}: dim {} vs {expect}", s.dim()))));
        }
    }
    Ok((cases, None))
}

fn plus_minus(levels: &[u64]) -> Suite {
    let mut cases = 0;
    for &n in levels {
        // a plus/minus mismatch surfaces as an invariant error
        let r = eisenstein_rank(n, 5)?;
        cases += 1;
        if r.plus_dim != r.minus_dim {
            return Ok((cases, Some(format!("N={n}"))));
        }
    }
    Ok((cases, None))
}

fn plus_presentation() -> Suite {
    let mut cases = 0;
    for (p, s) in [(5u64, 1u32), (5, 2), (7, 1), (11, 1)] {
        let pres = verify_plus_presentation(p, s, 4)?;
        cases += 1;
        let degree = (p.pow(s) as usize).div_ceil(2);
        if pres.degree != degree || pres.v_p_of_constant != PiValuation::Exact(s as u64) {
            return Ok((
                cases,
                Some(format!(
                    "(p,s)=({p},{s}): degree {} valuation {}",
                    pres.degree, pres.v_p_of_constant
                )),
            ));
        }
    }
    Ok((cases, None))
}
