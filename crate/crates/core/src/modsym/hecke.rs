//! Hecke operators `T_ℓ` via Heilbronn matrices.

use rayon::prelude::*;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

use super::space::ModSymSpace;

/// Heilbronn matrices `[[a, b], [c, d]]` with `ad - bc = ℓ`, `a > b >= 0`,
/// `d > c >= 0`, whose sum acts as `T_ℓ` on weight-2 Manin symbols.
pub fn heilbronn_merel(l: u64) -> Vec<[i64; 4]> {
    let l = l as i64;
    let mut out = Vec::new();
    for a in 1..=l {
        for d in 1..=l {
            let bc = a * d - l;
            if bc < 0 {
                continue;
            }
            for b in 0..a {
                if bc == 0 {
                    if b == 0 {
                        // b = 0 allows every c < d
                        out.extend((0..d).map(|c| [a, 0, c, d]));
                    } else {
                        out.push([a, b, 0, d]);
                    }
                    continue;
                }
                if b == 0 || bc % b != 0 {
                    continue;
                }
                let c = bc / b;
                if c < d {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// A Hecke operator on a space, as a sparse matrix acting on row vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub l: u64,
    pub mat: SparseMatrix,
}

/// Matrix of `T_ℓ` on the quotient basis; requires `ℓ` prime and `ℓ ∤ M`.
pub fn hecke_matrix(space: &ModSymSpace, l: u64) -> Result<HeckeMatrix> {
    if !is_prime(l) {
        return Err(Error::NotPrime {
            name: "ℓ",
            value: l,
        });
    }
    if space.level().is_multiple_of(l) {
        return Err(Error::InvalidArgument(format!(
            "Hecke prime {l} divides the level {}",
            space.level()
        )));
    }
    let heil = heilbronn_merel(l);
    let f = space.field();
    let p = f.p() as u64;
    let dim = space.dim();
    let rows: Vec<Vec<(u32, u32)>> = (0..dim)
        .into_par_iter()
        .map(|b| {
            let x = space.basis_reps()[b] as usize;
            let mut acc = vec![0u64; dim];
            let mut touched = Vec::new();
            for h in &heil {
                let Some(y) = space.p1().act(x, h) else {
                    continue;
                };
                for &(j, c) in space.to_basis(y) {
                    let slot = &mut acc[j as usize];
                    if *slot == 0 {
                        touched.push(j);
                    }
                    *slot += c as u64;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            touched
                .into_iter()
                .filter_map(|j| {
                    let c = (acc[j as usize] % p) as u32;
                    (c != 0).then_some((j, c))
                })
                .collect()
        })
        .collect();
    Ok(HeckeMatrix {
        l,
        mat: SparseMatrix::new(dim, rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, Fp};
    use crate::modsym::space::{build_space, Sign};

    #[test]
    fn heilbronn_counts() {
        assert_eq!(heilbronn_merel(2).len(), 4);
        for l in [2u64, 3, 5, 7, 11, 13] {
            for h in heilbronn_merel(l) {
                assert_eq!(h[0] * h[3] - h[1] * h[2], l as i64);
                assert!(h[0] > h[1] && h[1] >= 0 && h[3] > h[2] && h[2] >= 0);
            }
        }
    }

    fn char_poly_roots_brute(m: &DenseMatrix, f: Fp) -> Vec<u32> {
        (0..f.p())
            .filter(|&lam| m.sub_scalar(lam, f).rank(f) < m.rows())
            .collect()
    }

    #[test]
    fn level_11_eigenvalues() {
        let p = 10007;
        let s = build_space(11, p, Sign::Zero).unwrap();
        let f = s.field();
        let t2 = hecke_matrix(&s, 2).unwrap().mat.to_dense();
        // Eisenstein 3 and the newform's a₂ = -2
        assert_eq!(char_poly_roots_brute(&t2, f), vec![3, (p - 2) as u32]);
        assert_eq!(t2.sub_scalar(3, f).rank(f), 2);
        assert_eq!(t2.sub_scalar((p - 2) as u32, f).rank(f), 1);
    }

    #[test]
    fn commutation() {
        for (m, sign) in [(49u64, Sign::Zero), (121, Sign::Plus), (37, Sign::Zero)] {
            let s = build_space(m, 5, sign).unwrap();
            let f = s.field();
            let t2 = hecke_matrix(&s, 2).unwrap().mat.to_dense();
            let t3 = hecke_matrix(&s, 3).unwrap().mat.to_dense();
            assert_eq!(t2.mul(&t3, f), t3.mul(&t2, f));
            if sign == Sign::Zero {
                let st = s.star_matrix().to_dense();
                assert_eq!(t2.mul(&st, f), st.mul(&t2, f));
            }
        }
    }
}
