//! Renewal pipeline: the decay rate as the root of an excursion
//! fixed-point equation, independent of any eigen solve.
//!
//! Split the grid nodes into a core block `A` (below the split point)
//! and a tail block `B`. For a path started in `A`, weight every step
//! by `z` and decompose its life into excursions away from `A`:
//!
//! * `F(z)` (vector on `A`): weight of dying — either inside `A`, or
//!   after one sojourn through `B` that never returns;
//! * `K(z)` (matrix on `A`): weight of completing one `B`-excursion and
//!   re-entering `A`.
//!
//! Both use only the Neumann series of the block resolvents
//! `(I - z Q_AA)^{-1}` and `(I - z Q_BB)^{-1}`. Mass conservation gives
//! `F(1) + K(1) 1 = 1`, and block elimination gives the exact identity
//! `(I - K(z))^{-1} F(z) = [z (I - zQ)^{-1} kill]_A`, the death-time
//! generating function restricted to `A`. The decay rate solves
//! `spectral_radius(K(e^lambda)) = 1`, located by bisection.
//!
//! The tail resolvent is the truncation-sensitive piece: for heavy
//! right tails, `rho(Q_BB)` climbs toward `e^{-lambda}` as the cap
//! grows, and the series evaluation stops being meaningful before it
//! stops being finite. A policing margin (default 0.9) therefore
//! refuses any evaluation with `z * rho(Q_BB)` at or past the margin,
//! surfacing divergence instead of returning a cap artifact.

use crate::kernel::{KernelBlocks, KilledKernel};
use crate::linalg::{self, LinalgError};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Default policing margin for `z * rho(Q_BB)`.
pub const DEFAULT_MARGIN: f64 = 0.9;

/// One-step past-cap mass above which a truncation visibly distorts
/// whatever the finite system reports.
pub const OVERFLOW_SUSPECT_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum RenewalError {
    #[error(
        "excursion series diverges: z * rho(Q_BB) = {policed:.6} >= {margin} at z = {z:.6}; \
         the tail block sustains the candidate growth rate, as heavy-tailed input does \
         on every truncation"
    )]
    SeriesDiverges { z: f64, policed: f64, margin: f64 },
    #[error(
        "no root in the admissible domain: rho(K) = {rho_k:.6} < 1 at the largest \
         admissible z = {z_max:.6}"
    )]
    DomainExceeded { z_max: f64, rho_k: f64 },
    #[error("no root bracket: rho(K(1)) = {rho_k:.6} >= 1 violates mass conservation")]
    BracketFailed { rho_k: f64 },
    #[error("core resolvent (I - z Q_AA) is singular or past its radius at z = {z}")]
    CoreSingular { z: f64 },
    #[error("linear solve failed: factorization is singular")]
    SolveFailed,
    #[error("spectral radius evaluation failed: {0}")]
    Linalg(#[from] LinalgError),
}

/// Excursion operators evaluated at a fixed step weight `z`.
#[derive(Debug, Clone)]
pub struct Excursion {
    pub z: f64,
    /// Death weight per core node.
    pub f: DVector<f64>,
    /// Return operator on the core block.
    pub k: DMatrix<f64>,
}

impl Excursion {
    /// Spectral radius of the return operator.
    pub fn return_radius(&self) -> Result<f64, RenewalError> {
        Ok(linalg::power_radius(&self.k, 1e-12, 100_000)?)
    }
}

/// Root of the excursion fixed-point equation.
#[derive(Debug, Clone, Copy)]
pub struct RenewalRoot {
    pub lambda: f64,
    pub z: f64,
    /// `rho(K)` at the returned point; 1 up to the bisection width.
    pub rho_k: f64,
    /// Number of excursion evaluations spent.
    pub evaluations: usize,
    /// Carried over from the system: when set, the root is a property
    /// of the truncation, not of the chain.
    pub truncation_suspect: bool,
}

/// The block data and radii needed to evaluate excursions at any
/// admissible `z`.
#[derive(Debug, Clone)]
pub struct RenewalSystem {
    blocks: KernelBlocks,
    rho_aa: f64,
    rho_bb: f64,
    margin: f64,
    truncation_suspect: bool,
}

impl RenewalSystem {
    /// Builds the system from an assembled kernel with the default
    /// policing margin. The truncation flag is set when any row leaks
    /// more than [`OVERFLOW_SUSPECT_TOL`] past the cap in one step.
    pub fn from_kernel(kernel: &KilledKernel) -> Result<Self, RenewalError> {
        let mut sys = Self::from_blocks(kernel.split_blocks(), DEFAULT_MARGIN)?;
        sys.truncation_suspect = kernel.overflow().amax() > OVERFLOW_SUSPECT_TOL;
        Ok(sys)
    }

    /// Builds the system from explicit blocks; useful for closed-form
    /// fixtures and for tuning the policing margin. Explicit blocks
    /// carry no overflow information, so the truncation flag stays
    /// clear.
    pub fn from_blocks(blocks: KernelBlocks, margin: f64) -> Result<Self, RenewalError> {
        assert!(margin > 0.0 && margin <= 1.0, "margin must be in (0, 1]");
        let rho_aa = linalg::power_radius(&blocks.q_aa, 1e-12, 200_000)?;
        let rho_bb = linalg::power_radius(&blocks.q_bb, 1e-12, 200_000)?;
        Ok(Self {
            blocks,
            rho_aa,
            rho_bb,
            margin,
            truncation_suspect: false,
        })
    }

    /// Whether the kernel this system was built from leaks suspect
    /// mass past its cap; see [`OVERFLOW_SUSPECT_TOL`].
    pub fn truncation_suspect(&self) -> bool {
        self.truncation_suspect
    }

    /// Spectral radius of the core block.
    pub fn rho_aa(&self) -> f64 {
        self.rho_aa
    }

    /// Spectral radius of the tail block; the truncation-sensitivity
    /// indicator.
    pub fn rho_bb(&self) -> f64 {
        self.rho_bb
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Largest step weight the system will evaluate.
    pub fn z_max(&self) -> f64 {
        let b_limit = if self.rho_bb > 0.0 {
            self.margin / self.rho_bb
        } else {
            f64::INFINITY
        };
        let a_limit = if self.rho_aa > 0.0 {
            (1.0 - 1e-9) / self.rho_aa
        } else {
            f64::INFINITY
        };
        b_limit.min(a_limit)
    }

    /// Evaluates the excursion operators at step weight `z`.
    pub fn excursion_at(&self, z: f64) -> Result<Excursion, RenewalError> {
        assert!(z > 0.0 && z.is_finite());
        let policed = z * self.rho_bb;
        if policed >= self.margin {
            return Err(RenewalError::SeriesDiverges {
                z,
                policed,
                margin: self.margin,
            });
        }
        if z * self.rho_aa >= 1.0 - 1e-12 {
            return Err(RenewalError::CoreSingular { z });
        }
        let b = &self.blocks;
        let s = b.q_aa.nrows();
        let t = b.q_bb.nrows();
        let lu_aa = (DMatrix::identity(s, s) - &b.q_aa * z).lu();
        let lu_bb = (DMatrix::identity(t, t) - &b.q_bb * z).lu();

        // Tail sojourn outcomes: die in B, or re-enter A.
        let tail_death = lu_bb.solve(&b.kill_b).ok_or(RenewalError::SolveFailed)?;
        let tail_return = lu_bb.solve(&b.q_ba).ok_or(RenewalError::SolveFailed)?;

        let f_raw = &b.kill_a * z + (&b.q_ab * tail_death) * (z * z);
        let f = lu_aa.solve(&f_raw).ok_or(RenewalError::SolveFailed)?;
        let k_raw = (&b.q_ab * tail_return) * (z * z);
        let k = lu_aa.solve(&k_raw).ok_or(RenewalError::SolveFailed)?;
        Ok(Excursion { z, f, k })
    }

    /// Sup-norm defect of the conservation law `F(1) + K(1) 1 = 1`.
    pub fn conservation_defect(&self) -> Result<f64, RenewalError> {
        let exc = self.excursion_at(1.0)?;
        let ones = DVector::from_element(exc.k.nrows(), 1.0);
        let total = &exc.f + &exc.k * ones;
        Ok(total.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max))
    }

    /// Sup-norm defect of the block-elimination identity
    /// `(I - K(z))^{-1} F(z) = [z (I - z Q)^{-1} kill]_A` against the
    /// full-grid resolvent of `kernel`.
    pub fn resolvent_identity_defect(
        &self,
        kernel: &KilledKernel,
        z: f64,
    ) -> Result<f64, RenewalError> {
        let exc = self.excursion_at(z)?;
        let s = exc.k.nrows();
        let via_excursions = (DMatrix::identity(s, s) - &exc.k)
            .lu()
            .solve(&exc.f)
            .ok_or(RenewalError::SolveFailed)?;

        let n = kernel.grid().n();
        let full = (DMatrix::identity(n, n) - kernel.q() * z)
            .lu()
            .solve(&(kernel.kill_effective() * z))
            .ok_or(RenewalError::SolveFailed)?;

        let defect = (0..s)
            .map(|i| (via_excursions[i] - full[i]).abs())
            .fold(0.0, f64::max);
        Ok(defect)
    }

    /// Locates the decay rate: the `lambda` with
    /// `rho(K(e^lambda)) = 1`, by bisection on `lambda` to absolute
    /// width `tol`. The radius is increasing in `z`, so the root is
    /// simple to bracket: at `z = 1` conservation forces the radius
    /// below one, and the upper end is the admissible-domain edge.
    pub fn find_rate(&self, tol: f64) -> Result<RenewalRoot, RenewalError> {
        assert!(tol > 0.0);
        let mut evaluations = 0;
        let mut radius_at = |lambda: f64| -> Result<f64, RenewalError> {
            evaluations += 1;
            self.excursion_at(lambda.exp())?.return_radius()
        };

        let rho0 = radius_at(0.0)?;
        if rho0 >= 1.0 {
            return Err(RenewalError::BracketFailed { rho_k: rho0 });
        }
        let z_max = self.z_max();
        // Shrink slightly inside the domain edge so the endpoint itself
        // is evaluable.
        let lambda_hi_limit = (z_max * (1.0 - 1e-12)).ln();
        if lambda_hi_limit <= 0.0 {
            // Even z = 1 is out of the policed domain.
            return Err(RenewalError::SeriesDiverges {
                z: 1.0,
                policed: self.rho_bb,
                margin: self.margin,
            });
        }
        let rho_hi = radius_at(lambda_hi_limit)?;
        if rho_hi < 1.0 {
            // No root before the domain edge. If the tail margin is the
            // binding constraint this is the heavy-tail signature.
            let b_limit = self.margin / self.rho_bb;
            if z_max >= b_limit * (1.0 - 1e-9) {
                return Err(RenewalError::SeriesDiverges {
                    z: z_max,
                    policed: z_max * self.rho_bb,
                    margin: self.margin,
                });
            }
            return Err(RenewalError::DomainExceeded {
                z_max,
                rho_k: rho_hi,
            });
        }

        let mut lo = 0.0f64;
        let mut hi = lambda_hi_limit;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if radius_at(mid)? < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        let rho_k = radius_at(lambda)?;
        Ok(RenewalRoot {
            lambda,
            z: lambda.exp(),
            rho_k,
            evaluations,
            truncation_suspect: self.truncation_suspect,
        })
    }
}

/// Drift-style weight certifying quasi-compactness above a level `m`:
/// the solution of `(I - e^{lt} P') W = e^{lt} p_m` on the nodes of
/// `(m, cap]`, where `P'` is the one-step kernel restricted above `m`
/// with past-cap mass reflected into the top cell, and `p_m` is the
/// one-step mass dropped into `(0, m]`. By construction
/// `(P' W)_i = e^{-lt} W_i - p_m_i`, so the unreflected tail operator
/// satisfies `sup_i (Q_BB W)_i / W_i <= e^{-lt}`: the weight is an
/// explicit certificate that mass above `m` contracts at least at rate
/// `lt` until it drops below `m` or dies.
#[derive(Debug, Clone)]
pub struct TailWeight {
    pub lambda_tilde: f64,
    /// Node coordinates in `(m, cap]`.
    pub nodes: Vec<f64>,
    /// Weight values at the nodes.
    pub weights: Vec<f64>,
    /// `sup_i (Q_BB W)_i / W_i` with the *unreflected* tail operator.
    pub sup_ratio: f64,
    /// The certified contraction bound `e^{-lambda_tilde}`.
    pub bound: f64,
    /// Whether the worst-case one-step overflow past the cap exceeds
    /// [`OVERFLOW_SUSPECT_TOL`], in which case the reflection
    /// meaningfully distorts the weight and the certificate should not
    /// be trusted at this cap.
    pub truncation_suspect: bool,
}

/// Computes the tail weight for `model` at contraction `a`, level `m`,
/// truncation `cap`, on `n` uniform cells, at test rate `lambda_tilde`.
pub fn tail_weight(
    model: &crate::innovations::InnovationModel,
    a: f64,
    m: f64,
    cap: f64,
    n: usize,
    lambda_tilde: f64,
) -> Result<TailWeight, RenewalError> {
    assert!(a > 0.0 && a < 1.0, "need 0 < a < 1, got {a}");
    assert!(m > 0.0 && cap > m, "need 0 < m < cap, got m={m}, cap={cap}");
    assert!(n >= 2 && lambda_tilde > 0.0);
    let h = (cap - m) / n as f64;
    let edge = |j: usize| m + h * j as f64;
    let nodes: Vec<f64> = (0..n).map(|i| m + h * (i as f64 + 0.5)).collect();

    let mut reflected = DMatrix::zeros(n, n);
    let mut unreflected = DMatrix::zeros(n, n);
    let mut drop_mass = DVector::zeros(n);
    let mut worst_overflow = 0.0f64;
    for i in 0..n {
        let shift = a * nodes[i];
        drop_mass[i] = model.cdf(m - shift) - model.cdf(-shift);
        let mut lo = model.cdf(edge(0) - shift);
        for j in 0..n {
            let hi = model.cdf(edge(j + 1) - shift);
            let mass = (hi - lo).max(0.0);
            reflected[(i, j)] = mass;
            unreflected[(i, j)] = mass;
            lo = hi;
        }
        let overflow = model.sf(cap - shift);
        reflected[(i, n - 1)] += overflow;
        worst_overflow = worst_overflow.max(overflow);
    }

    let z = lambda_tilde.exp();
    let policed = z * linalg::power_radius(&reflected, 1e-12, 200_000)?;
    if policed >= 1.0 - 1e-9 {
        return Err(RenewalError::SeriesDiverges {
            z,
            policed,
            margin: 1.0,
        });
    }
    let weights = (DMatrix::identity(n, n) - &reflected * z)
        .lu()
        .solve(&(&drop_mass * z))
        .ok_or(RenewalError::SolveFailed)?;

    let image = &unreflected * &weights;
    let sup_ratio = (0..n)
        .map(|i| image[i] / weights[i])
        .fold(0.0f64, f64::max);

    Ok(TailWeight {
        lambda_tilde,
        nodes,
        weights: weights.iter().copied().collect(),
        sup_ratio,
        bound: (-lambda_tilde).exp(),
        truncation_suspect: worst_overflow > OVERFLOW_SUSPECT_TOL,
    })
}
