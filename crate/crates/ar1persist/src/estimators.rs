//! Statistical estimators of the decay rate and the conditioned law,
//! built on the Monte Carlo machinery in [`crate::chain`].
//!
//! * [`slope_estimate`] fits the decay rate from a survival curve by
//!   weighted least squares on the log-survival *increments*
//!   `d_n = ln(S_n / S_{n+1})`. Increments decorrelate the nested-path
//!   dependence a direct fit on `ln S_n` suffers from: each increment
//!   is (conditionally on the past) a fresh thinning of the surviving
//!   population, so inverse-variance weights give both an efficient
//!   point estimate and an honest standard error.
//! * [`fleming_viot`] estimates the rate from an interacting particle
//!   system: killed particles are re-seeded on uniformly chosen
//!   survivors, and the rate is read off the per-step survival
//!   fractions after burn-in.
//! * [`empirical_cell_masses`] / [`tv_against`] compare simulated
//!   surviving states against a reference cell distribution in total
//!   variation, accounting explicitly for mass outside the grid.
//! * [`conditional_cell_law`] pushes a point mass through the
//!   discretized kernel and renormalizes, giving the exact conditioned
//!   law of the grid chain for TV comparisons free of sampling noise.

use crate::chain::{Ar1, ChainError, SurvivalCurve};
use crate::exec;
use crate::grid::Grid;
use crate::kernel::KilledKernel;
use crate::streams::{substream, AUX_STREAM};
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("invalid window [{n0}, {n1}] for a curve with horizon {horizon}")]
    InvalidWindow { n0: usize, n1: usize, horizon: usize },
    #[error("survival curve exhausted inside the window: no survivors at step {n}")]
    WindowExhausted { n: usize },
    #[error("all {n_particles} particles died at step {step}; the system cannot recover")]
    AllParticlesDied { step: usize, n_particles: usize },
    #[error("need at least 2 particles, got {n_particles}")]
    TooFewParticles { n_particles: usize },
    #[error("start point {x0} is outside the grid domain (0, {cap}]")]
    OutOfDomain { x0: f64, cap: f64 },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Decay-rate estimate from a survival curve window.
#[derive(Debug, Clone, Copy)]
pub struct SlopeEstimate {
    pub lambda: f64,
    pub stderr: f64,
    /// Number of log-survival increments used.
    pub n_increments: usize,
}

/// Weighted least-squares fit of the decay rate on the increments
/// `d_n = ln(counts[n] / counts[n+1])` for `n` in `[n0, n1)`.
///
/// The variance model is the delta-method binomial variance of a
/// survival ratio, `(S_n - S_{n+1} + 1/2) / (S_n S_{n+1})`, with a
/// half-count continuity correction so that a window with no observed
/// deaths keeps a finite weight.
pub fn slope_estimate(
    curve: &SurvivalCurve,
    n0: usize,
    n1: usize,
) -> Result<SlopeEstimate, EstimatorError> {
    let horizon = curve.horizon();
    if n0 >= n1 || n1 > horizon {
        return Err(EstimatorError::InvalidWindow { n0, n1, horizon });
    }
    let mut weight_sum = 0.0;
    let mut weighted = 0.0;
    for n in n0..n1 {
        let s0 = curve.counts[n];
        let s1 = curve.counts[n + 1];
        if s1 == 0 {
            return Err(EstimatorError::WindowExhausted { n: n + 1 });
        }
        let (s0, s1) = (s0 as f64, s1 as f64);
        let d = (s0 / s1).ln();
        let var = (s0 - s1 + 0.5) / (s0 * s1);
        let w = 1.0 / var;
        weight_sum += w;
        weighted += w * d;
    }
    Ok(SlopeEstimate {
        lambda: weighted / weight_sum,
        stderr: weight_sum.sqrt().recip(),
        n_increments: n1 - n0,
    })
}

/// Options for the interacting particle estimator.
#[derive(Debug, Clone, Copy)]
pub struct FvOptions {
    pub n_particles: usize,
    pub steps: usize,
    pub burn_in: usize,
}

/// Result of a Fleming-Viot run.
#[derive(Debug, Clone)]
pub struct FvEstimate {
    pub lambda: f64,
    /// Survival fraction per step, in step order.
    pub fractions: Vec<f64>,
    pub n_particles: usize,
    pub burn_in: usize,
}

struct Particle {
    x: f64,
    rng: ChaCha8Rng,
}

/// Estimates the decay rate by evolving `n_particles` copies of the
/// chain and re-seeding every killed particle on a uniformly chosen
/// survivor. The per-step survival fractions estimate `e^{-lambda}`,
/// and after `burn_in` steps (to let the particle cloud settle near
/// the quasi-stationary law) the rate is
/// `-mean(ln fraction)` over the remaining steps.
///
/// Each particle owns an RNG substream and advances exactly one draw
/// per step; re-seeding choices come from a dedicated auxiliary stream.
/// The run is reproducible and independent of the worker count.
pub fn fleming_viot(
    chain: &Ar1,
    x0: f64,
    opts: FvOptions,
    seed: u64,
) -> Result<FvEstimate, EstimatorError> {
    if opts.n_particles < 2 {
        return Err(EstimatorError::TooFewParticles {
            n_particles: opts.n_particles,
        });
    }
    if !x0.is_finite() || x0 <= 0.0 {
        return Err(EstimatorError::Chain(ChainError::InvalidStart {
            x0,
            barrier: 0.0,
        }));
    }
    assert!(opts.burn_in < opts.steps, "burn-in must leave steps to average");
    let mut particles: Vec<Particle> = (0..opts.n_particles)
        .map(|i| Particle {
            x: x0,
            rng: substream(seed, i as u64),
        })
        .collect();
    let mut aux = substream(seed, AUX_STREAM);
    let mut fractions = Vec::with_capacity(opts.steps);
    let mut log_sum = 0.0;
    for step in 1..=opts.steps {
        exec::for_each_mut(&mut particles, |p| {
            p.x = chain.sample_step(p.x, &mut p.rng);
        });
        let survivors: Vec<usize> = (0..particles.len())
            .filter(|&i| particles[i].x > 0.0)
            .collect();
        if survivors.is_empty() {
            return Err(EstimatorError::AllParticlesDied {
                step,
                n_particles: opts.n_particles,
            });
        }
        // Re-seed the dead on uniformly chosen survivors, in index
        // order, from the auxiliary stream.
        for i in 0..particles.len() {
            if particles[i].x <= 0.0 {
                let donor = survivors[aux.gen_range(0..survivors.len())];
                particles[i].x = particles[donor].x;
            }
        }
        let fraction = survivors.len() as f64 / opts.n_particles as f64;
        fractions.push(fraction);
        if step > opts.burn_in {
            log_sum += fraction.ln();
        }
    }
    let averaged = (opts.steps - opts.burn_in) as f64;
    Ok(FvEstimate {
        lambda: -log_sum / averaged,
        fractions,
        n_particles: opts.n_particles,
        burn_in: opts.burn_in,
    })
}

/// Bins states into the grid's cells. Returns the per-cell fractions
/// and the fraction of states falling outside `(0, cap]`.
pub fn empirical_cell_masses(grid: &Grid, states: &[f64]) -> (Vec<f64>, f64) {
    let mut masses = vec![0.0; grid.n()];
    let mut outside = 0u64;
    for &x in states {
        match grid.cell_of(x) {
            Some(i) => masses[i] += 1.0,
            None => outside += 1,
        }
    }
    let total = states.len().max(1) as f64;
    for m in &mut masses {
        *m /= total;
    }
    (masses, outside as f64 / total)
}

/// Total variation distance between the empirical distribution of
/// `states` and reference cell masses on the grid; mass outside the
/// grid counts in full.
pub fn tv_against(grid: &Grid, states: &[f64], reference: &DVector<f64>) -> f64 {
    let (masses, outside) = empirical_cell_masses(grid, states);
    let cells: f64 = masses
        .iter()
        .zip(reference.iter())
        .map(|(p, q)| (p - q).abs())
        .sum();
    0.5 * (cells + outside)
}

/// Exact conditioned law of the discretized chain: pushes the cell
/// containing `x0` through `n` steps of the killed kernel and
/// renormalizes after each step. Free of sampling noise; the reference
/// for "how fast does the conditioned law forget its start".
pub fn conditional_cell_law(
    kernel: &KilledKernel,
    x0: f64,
    n: usize,
) -> Result<DVector<f64>, EstimatorError> {
    let grid = kernel.grid();
    let start = grid.cell_of(x0).ok_or(EstimatorError::OutOfDomain {
        x0,
        cap: grid.cap(),
    })?;
    let mut law = DVector::zeros(grid.n());
    law[start] = 1.0;
    for _ in 0..n {
        law = kernel.apply_transpose(&law);
        let total = law.sum();
        debug_assert!(total > 0.0, "conditional law lost all mass");
        law /= total;
    }
    Ok(law)
}
