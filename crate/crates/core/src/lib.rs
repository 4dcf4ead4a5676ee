//! Simulation and verification toolkit for six exactly solvable models of
//! last-passage percolation (LPP) in the KPZ universality class:
//!
//! * **Hammersley** (Poisson LPP): longest chains among planar Poisson points;
//! * **Poisson lines**: semi-discrete LPP over independent rate-1 Poisson
//!   processes, one per integer level;
//! * **Seppäläinen–Johansson (SJ)**: maximal Bernoulli horizontal-edge count
//!   over up-right lattice paths;
//! * **exponential** and **geometric** corner-growth (lattice LPP with i.i.d.
//!   vertex weights);
//! * **Brownian LPP** at a configurable discretization step.
//!
//! Each model ships with its stationary boundary data (Busemann-type laws
//! along a line), the queueing maps `Q`/`D`/`R` that evolve that data line by
//! line, closed-form Rains-style moment-generating-function statistics
//! (`M`, `R`, `ζ`, `γ`), rightmost exit points, and the diffusive `2/3–1/3`
//! rescaling toward stationary-horizon profiles.
//!
//! Everything that is an exact finite-size identity (queue conservation,
//! Pitman's `2M − X` identity, fluid-trajectory height counting, iterated
//! queue maps vs direct dynamic programming) is checked in *exact integer
//! arithmetic*; everything distributional (Burke's theorem, MGF identities,
//! space-time stationarity, Brownian marginals, exit-point tails) is checked
//! by seeded Monte Carlo with explicit statistical tests.
//!
//! # Reproducibility
//!
//! All randomness flows through [`rng::RngStream`], a `(seed, stream)` pair
//! mapped onto independent ChaCha streams. Replica `r` of any experiment uses
//! a stream id derived deterministically from its domain and `r`, so adding
//! replicas never perturbs existing ones and every report is replayable from
//! its manifest.
//!
//! # Parallelism
//!
//! Replica loops go through [`replicas::run_replicas`], which uses a rayon
//! thread pool when the `parallel` feature (default) is enabled and an
//! equivalent sequential loop otherwise. Results are indexed by replica, so
//! both paths produce byte-identical output.

pub mod ejs;
pub mod error;
pub mod lpp;
pub mod processes;
pub mod queues;
pub mod replicas;
pub mod report;
pub mod rng;
pub mod scaling;
pub mod stationary;
pub mod stats;

pub use error::Error;

/// Convenience result type used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
