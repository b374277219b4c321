//! Eisenstein ideal ranks at prime level: zeta elements in group rings,
//! orders of vanishing, modular symbols over `F_p`, and the reports that
//! compare them.

pub mod arith;
pub mod cache;
pub mod cyclotomic;
pub mod error;
pub mod group_ring;
pub mod linalg;
pub mod modsym;
pub mod padic;
pub mod report;
pub mod selfcheck;
pub mod zeta;

pub use cache::MatrixCache;
pub use cyclotomic::CyclotomicInt;
pub use error::{Error, ErrorKind, Result};
pub use group_ring::{
    verify_plus_presentation, DeltaCharacter, GroupRingElem, OrderOfVanishing, PlusPresentation,
    UnitGroupStructure,
};
pub use modsym::{
    build_space, cuspidal_plus_subspace, eisenstein_generalized_eigenspace, eisenstein_rank,
    eisenstein_rank_with, hecke_matrix, level_square_dims, level_square_dims_with, Direct,
    EisensteinOptions, EisensteinSlice, HeckeMatrix, HeckeSource, LevelSquareDims, ModSymSpace,
    RankResult, Sign,
};
pub use padic::{PadicRing, PiValuation, TruncatedPadic};
pub use report::{
    analyze, analyze_with, classify_regime, render, render_entries, scan, scan_each,
    AnalysisReport, AnalyzeOptions, Format, OrbitForecast, Regime, ScanEntry,
};
pub use selfcheck::{run_selfcheck, SelfcheckOptions, SelfcheckReport};
pub use zeta::{build_theta, build_zeta, ord_vs_theta_check, ord_zeta_bar, OrdResult};
