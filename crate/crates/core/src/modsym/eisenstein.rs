//! Eisenstein generalized eigenspaces `∩_ℓ ker(T_ℓ - ℓ - 1)^∞`, the rank `r`
//! at level `N`, and the Eisenstein dimension at level `N²`.

use serde::Serialize;

use crate::error::{check_level_and_prime, Error, Result};
use crate::linalg::{generalized_kernel, left_kernel_subspace, DenseMatrix, Subspace};

use super::hecke::{hecke_matrix, HeckeMatrix};
use super::levels::genus;
use super::space::{build_space, ModSymSpace, Sign};

/// Hecke primes tried in order when none are given.
pub const DEFAULT_HECKE_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
/// Largest cuspidal dimension the dense linear algebra will attempt.
pub const DEFAULT_DIM_CAP: usize = 12_000;

/// Supplies Hecke matrices; lets callers interpose a persistent cache.
pub trait HeckeSource: Sync {
    fn hecke(&self, space: &ModSymSpace, l: u64) -> Result<HeckeMatrix>;
}

/// Computes every matrix from scratch.
#[derive(Clone, Copy, Debug, Default)]
pub struct Direct;

impl HeckeSource for Direct {
    fn hecke(&self, space: &ModSymSpace, l: u64) -> Result<HeckeMatrix> {
        hecke_matrix(space, l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisensteinOptions {
    /// Explicit primes, all of which are used; `None` means the default budget
    /// with early stopping once stable.
    pub hecke_primes: Option<Vec<u64>>,
    /// Drops `ℓ = p` from the default budget.
    pub exclude_p: bool,
    pub dim_cap: usize,
}

impl Default for EisensteinOptions {
    fn default() -> Self {
        Self {
            hecke_primes: None,
            exclude_p: false,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

impl EisensteinOptions {
    fn budget(&self, n: u64, p: u64) -> (Vec<u64>, bool) {
        match &self.hecke_primes {
            Some(list) => (list.clone(), false),
            None => (
                DEFAULT_HECKE_PRIMES
                    .iter()
                    .copied()
                    .filter(|&l| l != n && !(self.exclude_p && l == p))
                    .collect(),
                true,
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EisensteinSlice {
    pub subspace: Subspace,
    pub gen_eigen_dim: usize,
    pub primes_used: Vec<u64>,
    /// Dimension after each prime in `primes_used`.
    pub dims: Vec<usize>,
    /// Two primes after the last drop left the dimension unchanged.
    pub stabilized: bool,
}

fn is_stable(dims: &[usize]) -> bool {
    match dims {
        [.., 0] => true,
        [.., a, b, c] => a == b && b == c,
        _ => false,
    }
}

/// Intersects the generalized `ℓ + 1` eigenspaces of `T_ℓ` on a Hecke-stable
/// subspace, prime by prime. With `stop_when_stable` the loop ends as soon as
/// the dimension has survived two further primes unchanged.
pub fn eisenstein_generalized_eigenspace(
    space: &ModSymSpace,
    subspace: &Subspace,
    primes: &[u64],
    stop_when_stable: bool,
    source: &dyn HeckeSource,
) -> Result<EisensteinSlice> {
    let f = space.field();
    let mut w = subspace.clone();
    let mut used = Vec::new();
    let mut dims = Vec::new();
    for &l in primes {
        if stop_when_stable && is_stable(&dims) {
            break;
        }
        if w.dim() > 0 {
            let t = source.hecke(space, l)?;
            let a = w
                .restrict(&t.mat, f)
                .sub_scalar(((l + 1) % f.p() as u64) as u32, f);
            let g = generalized_kernel(&a, f);
            w = w.sub_from_coordinates(&g, f);
        }
        used.push(l);
        dims.push(w.dim());
    }
    let stabilized = is_stable(&dims);
    Ok(EisensteinSlice {
        gen_eigen_dim: w.dim(),
        subspace: w,
        primes_used: used,
        dims,
        stabilized,
    })
}

/// The star `+1` part of the cuspidal subspace.
pub fn cuspidal_plus_subspace(space: &ModSymSpace) -> Result<Subspace> {
    match space.sign() {
        Sign::Plus => Ok(space.cuspidal_subspace()),
        Sign::Minus => Err(Error::InvalidArgument(
            "the minus quotient has no plus part".into(),
        )),
        Sign::Zero => {
            // v·B = 0 and v·(S - 1) = 0
            let f = space.field();
            let b = space.boundary_matrix();
            let s = space.star_matrix().to_dense().sub_scalar(1, f);
            Ok(left_kernel_subspace(&b.hcat(&s), f))
        }
    }
}

fn check_cap(level: u64, cap: usize) -> Result<usize> {
    let g = genus(level) as usize;
    if g > cap {
        return Err(Error::DimensionCap { level, dim: g, cap });
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankResult {
    pub n: u64,
    pub p: u64,
    pub r: usize,
    pub genus: usize,
    pub plus_dim: usize,
    pub minus_dim: usize,
    pub primes_used: Vec<u64>,
}

/// `r = 1 + dim` of the Eisenstein generalized eigenspace in the plus
/// cuspidal symbols of level `N`, checked against the minus part.
pub fn eisenstein_rank(n: u64, p: u64) -> Result<RankResult> {
    eisenstein_rank_with(n, p, &EisensteinOptions::default(), &Direct)
}

pub fn eisenstein_rank_with(
    n: u64,
    p: u64,
    opts: &EisensteinOptions,
    source: &dyn HeckeSource,
) -> Result<RankResult> {
    check_level_and_prime(n, p)?;
    let g = check_cap(n, opts.dim_cap)?;
    let (primes, early) = opts.budget(n, p);
    let part = |sign: Sign| -> Result<EisensteinSlice> {
        let space = build_space(n, p, sign)?;
        let cusp = space.cuspidal_subspace();
        if cusp.dim() != g {
            return Err(Error::InvariantViolation(format!(
                "cuspidal {} part at level {n} has dimension {} instead of the genus {g}",
                sign.tag(),
                cusp.dim()
            )));
        }
        let slice = eisenstein_generalized_eigenspace(&space, &cusp, &primes, early, source)?;
        if early && !slice.stabilized {
            return Err(Error::NotStabilized {
                primes: slice.primes_used,
                dims: slice.dims,
            });
        }
        Ok(slice)
    };
    let (plus, minus) = rayon::join(|| part(Sign::Plus), || part(Sign::Minus));
    let (plus, minus) = (plus?, minus?);
    if plus.gen_eigen_dim != minus.gen_eigen_dim {
        return Err(Error::InvariantViolation(format!(
            "plus and minus Eisenstein dimensions differ at N={n}, p={p}: {} vs {}",
            plus.gen_eigen_dim, minus.gen_eigen_dim
        )));
    }
    let r = 1 + plus.gen_eigen_dim;
    if r < 2 {
        return Err(Error::InvariantViolation(format!(
            "Eisenstein rank {r} < 2 at N={n}, p={p}"
        )));
    }
    Ok(RankResult {
        n,
        p,
        r,
        genus: g,
        plus_dim: plus.gen_eigen_dim,
        minus_dim: minus.gen_eigen_dim,
        primes_used: plus.primes_used,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSquareDims {
    #[serde(rename = "N")]
    pub n: u64,
    pub p: u64,
    pub level: u64,
    pub r: usize,
    pub cuspidal_dim: usize,
    pub dim_e: usize,
    pub old_part: usize,
    pub new_count: i64,
    pub predicted_new_count: i64,
    pub primes_used: Vec<u64>,
    pub dims: Vec<usize>,
    pub stabilized: bool,
}

impl LevelSquareDims {
    pub fn matches_prediction(&self) -> bool {
        self.new_count == self.predicted_new_count
    }
}

/// Predicted count `½(p^s - 1)(r - 2)` of new Eisenstein-congruent forms.
pub fn predicted_new_count(p: u64, s: u32, r: usize) -> i64 {
    (p.pow(s) as i64 - 1) * (r as i64 - 2) / 2
}

pub fn level_square_dims(n: u64, p: u64) -> Result<LevelSquareDims> {
    level_square_dims_with(n, p, &EisensteinOptions::default(), &Direct)
}

/// Eisenstein dimension of plus cuspidal symbols at level `N²`, split into
/// the old part `2(r - 1)` and the new remainder.
pub fn level_square_dims_with(
    n: u64,
    p: u64,
    opts: &EisensteinOptions,
    source: &dyn HeckeSource,
) -> Result<LevelSquareDims> {
    check_level_and_prime(n, p)?;
    let level = n * n;
    let g = check_cap(level, opts.dim_cap)?;
    let rank = eisenstein_rank_with(
        n,
        p,
        &EisensteinOptions {
            hecke_primes: None,
            ..opts.clone()
        },
        source,
    )?;
    let (primes, early) = opts.budget(n, p);
    let space = build_space(level, p, Sign::Plus)?;
    let cusp = space.cuspidal_subspace();
    if cusp.dim() != g {
        return Err(Error::InvariantViolation(format!(
            "plus cuspidal part at level {level} has dimension {} instead of the genus {g}",
            cusp.dim()
        )));
    }
    let slice = eisenstein_generalized_eigenspace(&space, &cusp, &primes, early, source)?;
    if early && !slice.stabilized {
        return Err(Error::NotStabilized {
            primes: slice.primes_used,
            dims: slice.dims,
        });
    }
    let s = crate::arith::p_adic_order(n - 1, p);
    let old_part = 2 * (rank.r - 1);
    Ok(LevelSquareDims {
        n,
        p,
        level,
        r: rank.r,
        cuspidal_dim: cusp.dim(),
        dim_e: slice.gen_eigen_dim,
        old_part,
        new_count: slice.gen_eigen_dim as i64 - old_part as i64,
        predicted_new_count: predicted_new_count(p, s, rank.r),
        primes_used: slice.primes_used,
        dims: slice.dims,
        stabilized: slice.stabilized,
    })
}

/// Dense matrix of `T_ℓ` restricted to a subspace, for diagnostics.
pub fn restricted_hecke(space: &ModSymSpace, w: &Subspace, l: u64) -> Result<DenseMatrix> {
    Ok(w.restrict(&hecke_matrix(space, l)?.mat, space.field()))
}
