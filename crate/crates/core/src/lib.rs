//! Classification of mixed multipartite quantum states of arbitrary local
//! dimensions with respect to k-separability and k-positivity of partial
//! transpose.
//!
//! The core quantity is the expectation of a rank-2 witness built from the
//! two extreme GHZ vectors of an embedded two-level subspace. For any state
//! that is k-PPT (and in particular k-separable) with respect to some
//! k-partite split, that expectation stays at or below 2^(1-k) for every
//! choice of two basis vectors per site; a single selection exceeding the
//! bound excludes the state from the k'-PPT and k'-separable classes for
//! all k' >= k. Everything is cross-checkable against brute-force
//! partial-transpose eigensolves.
//!
//! Modules:
//! - [`linalg`]: dense complex matrices, Kronecker products, a Jacobi
//!   eigensolver on the real-symmetric embedding.
//! - [`hilbert`]: product-space indexing, two-level selections, subspace
//!   embedding, partial transposition.
//! - [`ghz`]: the GHZ basis and the subset maps l, j, g.
//! - [`partitions`]: k-partite splits, block unions, the tau index set.
//! - [`criteria`]: coefficient extraction, the analytic PPT criterion for
//!   GHZ-diagonal operators, the k-PPT oracle, witness search and
//!   classification.
//! - [`states`]: seeded generators for test and probe states.
//! - [`dmx`]: the DMX state-file format.
//!
//! ```
//! use ghzw_core::*;
//!
//! // A noisy three-qubit GHZ state, 70% pure.
//! let dims = SiteDims::qubits(3)?;
//! let state = ghz_noisy(&dims, None, 0.7)?;
//!
//! // Witness search at every level k = 2..n.
//! let report = classify(&state, &ClassifyOptions::default())?;
//! assert_eq!(report.min_violated_k, Some(2));
//!
//! // Cross-check one split with the brute-force eigenvalue oracle.
//! let split = Partition::parse("1|2,3", 3)?;
//! assert!(!is_k_ppt(&state, &split, 1e-8)?.all_ppt);
//! # Ok::<(), ghzw_core::Error>(())
//! ```

pub mod criteria;
pub mod dmx;
pub mod error;
pub mod ghz;
pub mod hilbert;
pub mod linalg;
pub mod partitions;
pub mod states;

pub use criteria::{
    classify, extract_coefficients, ghz_fidelity, is_k_ppt, npt_by_fidelity, search_selections,
    witness_bound, witness_expectation, witness_operator, witness_value, AnalyticPptVerdict,
    ClassificationReport, ClassifyOptions, FidelityReport, GhzDiagonalCoeffs, KPptReport,
    SearchStrategy, SubsetVerdict, WitnessReport,
};
pub use error::{Error, Result};
pub use ghz::{g_of, ghz_vector, j_of, l_of, GhzLabel, Sign, SiteSubset};
pub use hilbert::{
    embed_basis_vector, embed_operator, partial_transpose, DensityOperator, SiteDims,
    TwoLevelSelection,
};
pub use linalg::{expectation, kron, Complex64, ComplexMatrix, HermitianMatrix};
pub use partitions::{enumerate_partitions, necessary_subsets, tau_of, union_family, Partition, TauSet};
pub use states::{
    boundary_state, ghz_diagonal_state, ghz_noisy, ghz_state, random_density, random_k_separable,
    GeneratorSpec,
};
