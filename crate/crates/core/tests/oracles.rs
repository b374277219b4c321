//! Library results checked against independent reference computations.

use eisrank_core::arith::is_prime;
use eisrank_core::group_ring::build_unit_group;
use eisrank_core::linalg::Fp;
use eisrank_core::modsym::{
    build_space, genus, hecke_matrix, level_square_dims, num_cusps, restricted_hecke, ModSymSpace,
    Sign,
};
use eisrank_core::zeta::l_value_minus1;
use eisrank_core::{
    eisenstein_rank, ord_zeta_bar, verify_plus_presentation, CyclotomicInt, OrderOfVanishing,
    PadicRing, PiValuation,
};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn inv(a: i128, m: i128) -> i128 {
    let (g, x, _) = egcd(a.rem_euclid(m), m);
    assert_eq!(g, 1);
    x.rem_euclid(m)
}

fn brute_generator(n: u64) -> u64 {
    (2..n)
        .find(|&g| {
            let mut x = 1u64;
            (1..n - 1).all(|_| {
                x = x * g % n;
                x != 1
            })
        })
        .unwrap()
}

/// `-(N/2)·B₂(a/N) = (-6a² + 6aN - N²) / (12N)` reduced mod `m`.
fn zeta_coeff(n: u64, a: u64, m: i128) -> i128 {
    let (n, a) = (n as i128, a as i128);
    (-6 * a * a + 6 * a * n - n * n).rem_euclid(m) * inv(12 * n, m) % m
}

fn binom_mod(mut n: u64, mut k: u64, p: u64) -> u64 {
    // Lucas
    let small = |n: u64, k: u64| -> u64 {
        if k > n {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..k {
            c = c * (n - i) / (i + 1);
        }
        c % p
    };
    let mut out = 1;
    while k > 0 || n > 0 {
        out = out * small(n % p, k % p) % p;
        n /= p;
        k /= p;
    }
    out
}

/// First `j >= 1` with `Σ_i a_i C(i, j) ≢ 0 (mod p)`, where `a_i` is the
/// coefficient of `[g^i]`.
fn ord_by_binomials(n: u64, p: u64) -> Option<usize> {
    let g = brute_generator(n);
    let mut coeffs = Vec::with_capacity((n - 1) as usize);
    let mut x = 1u64;
    for _ in 0..n - 1 {
        coeffs.push(zeta_coeff(n, x, p as i128) as u64);
        x = x * g % n;
    }
    let b = |j: u64| -> u64 {
        coeffs
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &a)| (acc + a * binom_mod(i as u64, j, p)) % p)
    };
    assert_eq!(b(0), 0, "augmentation of ζ̄ vanishes at N={n}");
    (1..n - 1).find(|&j| b(j) != 0).map(|j| j as usize)
}

#[test]
fn ord_matches_binomial_expansion() {
    for p in [5u64, 7, 11] {
        for n in (p + 1..700).filter(|&n| n % p == 1 && is_prime(n)) {
            let ours = ord_zeta_bar(n, p).unwrap();
            let oracle = ord_by_binomials(n, p);
            match oracle {
                Some(j) => assert_eq!(ours, OrderOfVanishing::Exact(j), "N={n} p={p}"),
                None => assert!(ours.exact().is_none(), "N={n} p={p}"),
            }
        }
    }
}

#[test]
fn ord_reference_levels() {
    for (n, p, expect) in [
        (11u64, 5u64, 1usize),
        (31, 5, 2),
        (181, 5, 3),
        (3671, 5, 3),
        (4229, 7, 4),
    ] {
        assert_eq!(ord_by_binomials(n, p), Some(expect));
        assert_eq!(ord_zeta_bar(n, p).unwrap(), OrderOfVanishing::Exact(expect));
    }
}

/// `L(-1, χ) = -B_{2,χ}/2` summed over `(Z/N)^×` with discrete logs found by
/// repeated multiplication.
#[test]
fn l_values_match_character_sums() {
    let k = 4;
    for (n, p) in [
        (11u64, 5u64),
        (31, 5),
        (61, 5),
        (101, 5),
        (29, 7),
        (43, 7),
        (181, 5),
        (23, 11),
    ] {
        let ring = PadicRing::new(p, k).unwrap();
        let m = ring.modulus as i128;
        let g = build_unit_group(n).unwrap().generator();
        let s = {
            let mut s = 0;
            while (n - 1) % p.pow(s + 1) == 0 {
                s += 1;
            }
            s
        };
        for t in 0..=s {
            let order = p.pow(t) as usize;
            let mut by_exp = vec![0u64; order];
            let mut x = 1u64;
            for e in 0..(n - 1) as usize {
                let slot = &mut by_exp[e % order];
                *slot = ((*slot as i128 + zeta_coeff(n, x, m)) % m) as u64;
                x = x * g % n;
            }
            let oracle = CyclotomicInt::from_exponent_coeffs(ring, t, &by_exp);
            assert_eq!(
                l_value_minus1(n, p, t, k).unwrap(),
                oracle,
                "N={n} p={p} t={t}"
            );
            if t == 0 {
                let expect = ((n as i128 - 1) * inv(12, m)).rem_euclid(m) as u64;
                assert_eq!(oracle.coeffs(), [expect]);
            }
        }
    }
}

/// `Ψ(Y) = Q(Y + 2)` with `Q(z) = 1 + Σ_{k=1}^{m} V_k(z)`, `V_0 = 2`,
/// `V_1 = z`, `V_{k+1} = z V_k - V_{k-1}`, `m = (p^s - 1)/2`.
fn psi_by_chebyshev(p: u64, s: u32) -> Vec<i128> {
    let m = ((p.pow(s) - 1) / 2) as usize;
    let mut prev = vec![2i128];
    let mut cur = vec![0i128, 1];
    let mut q = vec![0i128; m + 1];
    q[0] = 1;
    for k in 1..=m {
        for (i, c) in cur.iter().enumerate() {
            q[i] += c;
        }
        if k == m {
            break;
        }
        let mut next = vec![0i128; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    // Taylor shift z = y + 2
    let mut psi = q;
    let n = psi.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            psi[j] += 2 * psi[j + 1];
        }
    }
    psi
}

#[test]
fn plus_presentation_matches_chebyshev() {
    for (p, s) in [(5u64, 1u32), (5, 2), (7, 1), (11, 1), (13, 1)] {
        let psi = psi_by_chebyshev(p, s);
        assert_eq!(psi[0], p.pow(s) as i128);
        assert_eq!(*psi.last().unwrap(), 1);
        let pres = verify_plus_presentation(p, s, 4).unwrap();
        assert!(pres.holds(), "(p,s)=({p},{s})");
        let modulus = p.pow(pres.precision) as i128;
        assert_eq!(pres.degree, psi.len());
        assert_eq!(pres.minpoly[0], 0);
        let expect: Vec<u64> = psi.iter().map(|c| c.rem_euclid(modulus) as u64).collect();
        assert_eq!(&pres.minpoly[1..], &expect[..], "(p,s)=({p},{s})");
    }
    let pres = verify_plus_presentation(5, 2, 4).unwrap();
    assert_eq!(pres.degree, 13);
    assert_eq!(pres.v_p_of_constant, PiValuation::Exact(2));
}

fn phi(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k as i64, n as i64) == 1).count() as u64
}

/// `12g = 12 + μ - 3ν₂ - 4ν₃ - 6c` from brute-force counts.
fn genus_by_counting(m: u64) -> (u64, u64) {
    let mi = m as i64;
    let pairs = (0..mi)
        .flat_map(|c| (0..mi).map(move |d| (c, d)))
        .filter(|&(c, d)| gcd(gcd(c, d), mi) == 1)
        .count() as u64;
    let mu = pairs / phi(m);
    let nu2 = (0..m).filter(|x| (x * x + 1) % m == 0).count() as u64;
    let nu3 = (0..m).filter(|x| (x * x + x + 1) % m == 0).count() as u64;
    let cusps: u64 = (1..=m)
        .filter(|d| m.is_multiple_of(*d))
        .map(|d| phi(gcd(d as i64, (m / d) as i64) as u64))
        .sum();
    let twelve_g = 12 + mu as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * cusps as i64;
    assert_eq!(twelve_g % 12, 0, "M={m}");
    ((twelve_g / 12) as u64, cusps)
}

#[test]
fn genus_and_cusps_match_counting() {
    for m in 1..=160u64 {
        assert_eq!((genus(m), num_cusps(m)), genus_by_counting(m), "M={m}");
    }
    for m in [11u64, 25, 36, 49, 60, 97, 121, 143, 169] {
        let (g, c) = genus_by_counting(m);
        let space = build_space(m, 5, Sign::Zero).unwrap();
        assert_eq!(space.dim() as u64, 2 * g + c - 1, "M={m}");
        assert_eq!(space.cuspidal_subspace().dim() as u64, 2 * g, "M={m}");
        let plus = build_space(m, 5, Sign::Plus).unwrap();
        assert_eq!(plus.cuspidal_subspace().dim() as u64, g, "M={m}");
    }
}

/// Reduced projective pair for `x/y` with `y >= 0`; `(1, 0)` is `∞`.
fn cusp(x: i64, y: i64) -> (i64, i64) {
    let g = gcd(x, y);
    let (x, y) = (x / g, y / g);
    if y < 0 || (y == 0 && x < 0) {
        (-x, -y)
    } else {
        (x, y)
    }
}

fn act(m: &[i64; 4], (x, y): (i64, i64)) -> (i64, i64) {
    cusp(m[0] * x + m[1] * y, m[2] * x + m[3] * y)
}

/// Manin symbols `(c : d)` with signs summing to the path `{∞, x/y}`, from the
/// continued fraction convergents of `x/y`.
fn path_from_infinity(q: (i64, i64), out: &mut Vec<(i64, (i64, i64))>) {
    let (mut num, mut den) = q;
    if den == 0 {
        return;
    }
    let (mut q_prev, mut q_prev2) = (0i64, 1i64);
    let mut k = 0;
    while den != 0 {
        let a = num.div_euclid(den);
        let qk = a * q_prev + q_prev2;
        let c = if k % 2 == 0 { -qk } else { qk };
        out.push((1, (c, q_prev)));
        q_prev2 = q_prev;
        q_prev = qk;
        (num, den) = (den, num - a * den);
        k += 1;
    }
}

fn path(from: (i64, i64), to: (i64, i64)) -> Vec<(i64, (i64, i64))> {
    let mut out = Vec::new();
    path_from_infinity(to, &mut out);
    let mut back = Vec::new();
    path_from_infinity(from, &mut back);
    out.extend(back.into_iter().map(|(s, x)| (-s, x)));
    out
}

/// An `SL₂(Z)` matrix with bottom row congruent to `(c, d)` mod `M`.
fn lift(m: u64, c: u64, d: u64) -> [i64; 4] {
    let (c, mut d) = (c as i64, d as i64);
    while gcd(c, d) != 1 {
        d += m as i64;
    }
    let (_, x, y) = egcd(c as i128, d as i128);
    [y as i64, -(x as i64), c, d]
}

/// Coset representatives of `T_ℓ` acting on the upper half plane.
fn hecke_cosets(l: i64) -> Vec<[i64; 4]> {
    let mut out: Vec<[i64; 4]> = (0..l).map(|j| [1, j, 0, l]).collect();
    out.push([l, 0, 0, 1]);
    out
}

fn add_symbol(space: &ModSymSpace, f: Fp, acc: &mut [u32], sign: i64, (c, d): (i64, i64)) {
    let v = space.symbol(c, d);
    for (a, x) in acc.iter_mut().zip(v) {
        *a = if sign > 0 { f.add(*a, x) } else { f.sub(*a, x) };
    }
}

/// `T_ℓ` on every basis symbol via coset matrices acting on paths.
fn hecke_by_paths(space: &ModSymSpace, l: u64) -> Vec<Vec<u32>> {
    let f = space.field();
    let m = space.level();
    (0..space.dim())
        .map(|b| {
            let (c, d) = space.basis_symbol(b);
            let g = lift(m, c, d);
            let (zero, inf) = (cusp(g[1], g[3]), cusp(g[0], g[2]));
            let mut acc = vec![0u32; space.dim()];
            for h in hecke_cosets(l as i64) {
                for (s, x) in path(act(&h, zero), act(&h, inf)) {
                    add_symbol(space, f, &mut acc, s, x);
                }
            }
            acc
        })
        .collect()
}

#[test]
fn manin_trick_reproduces_identity_paths() {
    let space = build_space(37, 7, Sign::Zero).unwrap();
    let f = space.field();
    for b in 0..space.dim() {
        let (c, d) = space.basis_symbol(b);
        let g = lift(37, c, d);
        let mut acc = vec![0u32; space.dim()];
        for (s, x) in path(cusp(g[1], g[3]), cusp(g[0], g[2])) {
            add_symbol(&space, f, &mut acc, s, x);
        }
        let mut unit = vec![0u32; space.dim()];
        unit[b] = 1;
        assert_eq!(acc, unit, "basis symbol {b}");
    }
}

#[test]
fn heilbronn_hecke_matches_coset_action() {
    for (m, sign) in [
        (11u64, Sign::Zero),
        (37, Sign::Zero),
        (49, Sign::Zero),
        (121, Sign::Plus),
        (60, Sign::Zero),
    ] {
        let space = build_space(m, 10007, sign).unwrap();
        for l in [2u64, 3, 5, 7].into_iter().filter(|l| m % l != 0) {
            let ours = hecke_matrix(&space, l).unwrap().mat.to_dense();
            assert_eq!(ours.row_vecs(), hecke_by_paths(&space, l), "M={m} ℓ={l}");
        }
    }
}

#[test]
fn boundary_commutes_with_hecke_on_cusps() {
    for m in [49u64, 121] {
        let space = build_space(m, 10007, Sign::Zero).unwrap();
        let f = space.field();
        for l in [2u64, 3] {
            let t = hecke_matrix(&space, l).unwrap();
            for b in 0..space.dim() {
                let tx = t
                    .mat
                    .row(b)
                    .iter()
                    .fold(vec![0u32; space.dim()], |mut v, &(j, c)| {
                        v[j as usize] = c;
                        v
                    });
                let lhs = space.boundary(&tx);
                let (c, d) = space.basis_symbol(b);
                let g = lift(m, c, d);
                let mut rhs = vec![0u32; space.cusp_class_count()];
                for h in hecke_cosets(l as i64) {
                    for (pt, sign) in [(cusp(g[0], g[2]), 1i64), (cusp(g[1], g[3]), -1)] {
                        let (x, y) = act(&h, pt);
                        let Some((cl, e)) = space.cusp_class(space.cusp_of_rational(x, y)) else {
                            continue;
                        };
                        let e = if sign > 0 { e } else { f.neg(e) };
                        rhs[cl] = f.add(rhs[cl], e);
                    }
                }
                assert_eq!(lhs, rhs, "M={m} ℓ={l} b={b}");
            }
        }
    }
}

/// Coefficients of `q Π (1 - q^n)² (1 - q^{11n})²` up to `q^{len-1}`.
fn level_11_newform(len: usize) -> Vec<i64> {
    let mut f = vec![0i64; len];
    f[1] = 1;
    let mut times = |step: usize| {
        for _ in 0..2 {
            for i in (step..len).rev() {
                f[i] -= f[i - step];
            }
        }
    };
    for n in 1..len {
        times(n);
        if 11 * n < len {
            times(11 * n);
        }
    }
    f
}

#[test]
fn level_11_hecke_eigenvalues_match_q_expansion() {
    let a = level_11_newform(30);
    assert_eq!(&a[1..6], &[1, -2, -1, 2, 1]);
    let p = 10007u64;
    let space = build_space(11, p, Sign::Plus).unwrap();
    let cusp = space.cuspidal_subspace();
    assert_eq!(cusp.dim(), 1);
    for l in [2u64, 3, 5, 7, 13, 17, 19, 23, 29] {
        let t = restricted_hecke(&space, &cusp, l).unwrap();
        assert_eq!(
            t.get(0, 0) as i64,
            a[l as usize].rem_euclid(p as i64),
            "ℓ={l}"
        );
    }
    // the Eisenstein congruence mod 5
    let space = build_space(11, 5, Sign::Plus).unwrap();
    let t2 = restricted_hecke(&space, &space.cuspidal_subspace(), 2).unwrap();
    assert_eq!(t2.get(0, 0), 3);
}

#[test]
fn ranks_at_reference_levels() {
    for (n, p, r) in [(11u64, 5u64, 2usize), (31, 5, 3), (181, 5, 4)] {
        let res = eisenstein_rank(n, p).unwrap();
        assert_eq!(res.r, r, "N={n}");
        assert_eq!(res.plus_dim, res.minus_dim);
        assert_eq!(res.genus as u64, genus_by_counting(n).0);
    }
}

#[test]
fn level_121_eisenstein_part_is_old() {
    let d = level_square_dims(11, 5).unwrap();
    assert_eq!(
        (d.dim_e, d.old_part, d.new_count, d.predicted_new_count),
        (2, 2, 0, 0)
    );
    assert!(d.stabilized);
}
