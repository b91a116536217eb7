//! Numerical laboratory for the persistence of one-dimensional AR(1) chains.
//!
//! The object of study is the recursion `X_n = a X_{n-1} + xi_n` with
//! `a` in (0,1), killed the first time it drops to zero or below. Three
//! quantities describe its long-time behaviour:
//!
//! * the persistence exponent `lambda_a`, the exponential decay rate of
//!   `P_x(T_0 > n)`,
//! * the quasi-stationary distribution `nu`, the law of `X_n` conditioned
//!   on survival, in its large-`n` limit,
//! * the harmonic function `V`, the positive solution of
//!   `e^{lambda_a} Q V = V` for the killed kernel `Q`.
//!
//! Three independent pipelines compute them and cross-validate each other:
//!
//! 1. [`spectral`]: discretize the killed kernel on a grid ([`grid`],
//!    [`kernel`]) and extract the leading eigentriple by power iteration.
//! 2. [`renewal`]: split the state space at a level `r`, assemble the
//!    excursion operators `F` and `K`, and locate `lambda_a` as the root
//!    of `spectral_radius(K_lambda) = 1`.
//! 3. Monte Carlo ([`chain`], [`estimators`]): simulate killed paths,
//!    fit the survival-curve slope, and run a Fleming-Viot particle
//!    system for the quasi-stationary law.
//!
//! Closed-form anchors live in [`oracles`]: the q-Pochhammer generating
//! function for Laplace innovations, the Ornstein-Uhlenbeck parameter
//! correspondence for Gaussian ones, the heavy-tail exponent
//! `-r log a`, and an exactly solvable two-state fixture.
//!
//! All stochastic routines draw from counter-derived substreams
//! ([`streams`]) so results are reproducible and independent of worker
//! count; the `parallel` feature (on by default) runs the embarrassingly
//! parallel inner loops on rayon.

pub mod chain;
pub mod estimators;
pub mod exec;
pub mod grid;
pub mod innovations;
pub mod kernel;
pub mod linalg;
pub mod oracles;
pub mod renewal;
pub mod spectral;
pub mod stats;
pub mod streams;
