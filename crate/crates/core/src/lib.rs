//! Exact Shannon-invariant summaries of multivariate information decomposition.
//!
//! Given a discrete joint distribution over sources `X = (X1, .., Xn)` and a
//! target `Y`, this crate computes four quantities that every partial
//! information decomposition agrees on, because they are fixed by Shannon
//! entropies alone:
//!
//! - `r_bar`, the average degree of redundancy, `sum_i I(Xi;Y) / I(X;Y)`
//! - `v_bar`, the average degree of vulnerability, `sum_j I(Xj;Y|X-j) / I(X;Y)`
//! - `RSI = sum_i I(Xi;Y) - I(X;Y)`
//! - `DRSI = I(X;Y) - sum_j I(Xj;Y|X-j)`
//!
//! All of them need only `O(n)` entropy evaluations, so they scale to wide
//! layers where a full decomposition is out of reach.
//!
//! For small `n` the crate also carries the machinery to check these claims
//! against an explicit decomposition: the antichain lattice ([`lattice`]), a
//! brute-force minimum-specific-information decomposition ([`pid`]), and a
//! certification harness ([`certify`]) running the atom-level identities and
//! bounds over seeded random distributions ([`ensemble`]).
//!
//! [`quantize`] turns continuous activations into discrete sample tables by
//! stochastic rounding onto a uniform grid.

pub mod certify;
pub mod dist;
pub mod ensemble;
mod error;
pub mod format;
pub mod infomeasures;
pub mod invariants;
pub mod lattice;
pub mod pid;
pub mod quantize;

pub use dist::{JointDistribution, SampleTable};
pub use error::{Error, Result};
pub use infomeasures::{conditional_mi, entropy, mutual_information, DEFAULT_CLAMP_TOLERANCE};
pub use invariants::{
    analyze, interpret_bounds, BoundsReport, InvariantConfig, InvariantReport,
    DEFAULT_ILL_DEFINED_THRESHOLD,
};
pub use lattice::{enumerate_antichains, Antichain, SourceSet};
pub use pid::{atoms_moebius, AtomTable};
pub use quantize::{Matrix, QuantizerConfig, Rounding};
