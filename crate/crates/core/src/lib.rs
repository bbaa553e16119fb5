//! Distances between finite metric measure spaces and between distance
//! matrices.
//!
//! The crate covers:
//!
//! - [`space`]: distance matrices, finite metric measure spaces, the map
//!   sending a distance matrix to its uniform-mass space, zero-distance
//!   quotients.
//! - [`matmetric`]: the row-exclusion matrix pseudo-metric `d_M` and its
//!   permutation quotient `d_pi`, with certified witnesses.
//! - [`coupling`]: the coupling functional `Delta`, the Lévy-Prokhorov
//!   distance over an explicit ground distance (max-flow per breakpoint),
//!   Birkhoff decomposition and epsilon-matchings.
//! - [`ghp`]: explicit gluing metrics and certified Gromov-Hausdorff-Prokhorov
//!   bounds.
//! - [`sampling`]: model spaces, empirical spaces, exact matrix ensembles,
//!   epsilon-nets and hat spaces.
//! - [`entropy`]: Kullback-Leibler divergence and relative entropy of finite
//!   spaces via isometric-embedding search.
//! - [`experiments`]: reproducible checks of the inequalities relating the
//!   above quantities, emitting JSON/CSV reports.

// `!(x >= 0.0)` rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod ghp;
pub mod io;
pub mod matmetric;
pub mod sampling;
pub mod space;

pub use coupling::{
    birkhoff_decompose, delta_of_coupling, epsilon_matching, overlap_coupling_bound,
    prokhorov_distance, BirkhoffDecomposition, Coupling, EpsMatching, ProkhorovResult,
};
pub use entropy::{find_isometric_embeddings, kl_divergence, relative_entropy, EmbeddingSet};
pub use error::{Error, Result};
pub use experiments::{ExperimentReport, Status};
pub use ghp::{ghp_bounds_uniform, ghp_upper_bound, glue_by_relation, GhpBound, GluedSpace, Strategy};
pub use matmetric::{dm_distance, dpi_distance, DmWitness, DpiMode, PiWitness};
pub use sampling::{
    empirical_space, enumerate_matrix_ensemble, epsilon_net_partition, hat_space, ModelSpace,
    NetPartition,
};
pub use space::{
    quotient_zero_distances, theta_map, validate_distance_matrix, DistanceMatrix, FiniteMMS,
    MatrixEnsemble, SquareMatrix, Violation, TAU,
};
