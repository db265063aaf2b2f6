//! Magnitude homology of finite graphs.
//!
//! Computes the bigraded groups MH_{k,l}(G) over the integers, decides
//! whether a graph is diagonal with theorem-backed certificates, and runs
//! Monte Carlo experiments on Erdős–Rényi random graphs.

pub mod chain;
pub mod enumerate;
pub mod graph;
pub mod homology;
pub mod linalg;
pub mod morse;
pub mod random;

pub use chain::{BoundarySpec, ChainBasis, ChainError, Restriction, Tuple};
pub use graph::{
    ComponentDecomposition, ComponentInfo, Dist, DistanceMatrix, GirthReport, Graph, GraphError,
    PawfulVerdict,
};
pub use homology::{
    compute_homology, compute_homology_at, decide_diagonality, magnitude_from_chain_counts,
    magnitude_from_homology, magnitude_from_metric, rank_upper_bound, verify_theorems,
    Certificate, ComponentVerdict, ComputeOptions, DiagonalityVerdict, HomologyEntry,
    HomologyTable, MagnitudeSeries, TheoremCheck, TheoremKind, TheoremReport, UseMorse, Verdict,
};
pub use linalg::{homology_of_pair, LinalgError, SmithForm, SparseIntMatrix};
pub use random::{
    binomial_ci, limiting_nondiag_prob, records_to_csv, run_cycle_experiment,
    run_diagonality_experiment, run_pawful_experiment, run_wlln_experiment, sample_er, trial_rng,
    u_of_c, CycleOutcome, DiagonalityOutcome, ErConfig, PawfulOutcome, RandomError, SummaryStats,
    TrialRecord, WllnOutcome,
};
pub use morse::{
    build_f_matching, build_h_matching, classify_unmatched, reduce, validate_matching, Complex,
    MatchedPair, MatchingReport, MorseError, MorseMatching, UnmatchedClass,
};
