//! Weight-2 modular symbols for `Γ₀(M)` over `F_p`.

pub mod eisenstein;
pub mod hecke;
pub mod levels;
pub mod p1;
pub mod space;

pub use eisenstein::{
    cuspidal_plus_subspace, eisenstein_generalized_eigenspace, eisenstein_rank,
    eisenstein_rank_with, level_square_dims, level_square_dims_with, predicted_new_count,
    restricted_hecke, Direct, EisensteinOptions, EisensteinSlice, HeckeSource, LevelSquareDims,
    RankResult, DEFAULT_DIM_CAP, DEFAULT_HECKE_PRIMES,
};
pub use hecke::{hecke_matrix, heilbronn_merel, HeckeMatrix};
pub use levels::{genus, modsym_dim, num_cusps};
pub use p1::{p1_size, P1List};
pub use space::{build_space, ModSymSpace, Sign};
