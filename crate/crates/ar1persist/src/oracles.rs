//! Closed-form anchors used to validate the numerical pipelines.
//!
//! Three families admit independent formulas for the decay rate:
//!
//! * **Laplace innovations.** The survival generating function has a
//!   meromorphic continuation whose smallest positive singularity
//!   `s*` solves `D(s) = (a s; a^2)_inf + (s; a^2)_inf = 0` on
//!   `(1, 1/a)`, where `(u; q)_inf` is the infinite q-Pochhammer
//!   product. The decay rate is `ln s*`, independent of the Laplace
//!   scale (killing at zero is scale-invariant).
//! * **Gaussian innovations.** The chain is the unit-time skeleton of
//!   an Ornstein-Uhlenbeck process with relaxation `theta = ln(1/a)`
//!   and noise variance `sigma^2 = 2 theta / (1 - a^2)`. Continuous
//!   observation kills more often than the skeleton does, so the
//!   skeleton's rate must come out strictly between 0 and `theta`.
//! * **Regularly varying right tails.** With tail exponent `r`, each
//!   surviving step costs a factor `a^r`: the state must stay in the
//!   tail where only the top-order jump matters, giving
//!   `lambda = r ln(1/a)` whatever the left tail looks like.
//!
//! All roots here are found by bisection at runtime; nothing below
//! stores a precomputed eigenvalue.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("oracle needs 0 < a < 1, got {a}")]
    InvalidContraction { a: f64 },
    #[error("bisection failed: no sign change on ({lo}, {hi})")]
    NoBracket { lo: f64, hi: f64 },
}

/// Infinite q-Pochhammer product `(u; q)_inf = prod_{k>=0} (1 - u q^k)`
/// for `0 <= q < 1`. Factors are multiplied directly until the tail's
/// relative contribution `|u| q^K / (1 - q)` drops below 1e-16.
pub fn q_pochhammer(u: f64, q: f64) -> f64 {
    assert!((0.0..1.0).contains(&q), "need 0 <= q < 1, got {q}");
    assert!(u.is_finite());
    let mut product = 1.0;
    let mut uqk = u;
    // Worst relevant case (q -> 1) needs a few thousand factors; the
    // cap only guards against pathological inputs.
    for _ in 0..1_000_000 {
        product *= 1.0 - uqk;
        uqk *= q;
        if uqk.abs() / (1.0 - q) < 1e-16 {
            break;
        }
    }
    product
}

/// Decay-rate anchor for Laplace innovations at contraction `a`.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceAnchor {
    pub a: f64,
    /// Smallest root of `D` in `(1, 1/a)`.
    pub s_star: f64,
    /// `ln s_star`.
    pub lambda: f64,
}

/// `D(s) = (a s; a^2)_inf + (s; a^2)_inf`, whose first positive zero
/// beyond 1 marks the survival series' radius of convergence.
pub fn laplace_characteristic(a: f64, s: f64) -> f64 {
    let q = a * a;
    q_pochhammer(a * s, q) + q_pochhammer(s, q)
}

/// Solves for the Laplace decay rate by bisection on `(1, 1/a)`.
pub fn laplace_rate(a: f64) -> Result<LaplaceAnchor, OracleError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(OracleError::InvalidContraction { a });
    }
    // At s = 1 the second product telescopes to zero and the first is
    // positive; at s = 1/a the roles swap and the sign is negative.
    let mut lo = 1.0;
    let mut hi = 1.0 / a;
    let f_lo = laplace_characteristic(a, lo);
    let f_hi = laplace_characteristic(a, hi);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(OracleError::NoBracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if laplace_characteristic(a, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi {
            break;
        }
    }
    let s_star = 0.5 * (lo + hi);
    Ok(LaplaceAnchor {
        a,
        s_star,
        lambda: s_star.ln(),
    })
}

/// Parameters of the Ornstein-Uhlenbeck process whose unit-time
/// skeleton is the AR(1) chain with contraction `a` and unit-variance
/// innovations: `dZ = -theta Z dt + sigma dW`.
#[derive(Debug, Clone, Copy)]
pub struct OuEmbedding {
    pub theta: f64,
    pub sigma_sq: f64,
}

pub fn ou_embedding(a: f64) -> Result<OuEmbedding, OracleError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(OracleError::InvalidContraction { a });
    }
    let theta = -a.ln();
    Ok(OuEmbedding {
        theta,
        sigma_sq: 2.0 * theta / (1.0 - a * a),
    })
}

/// Decay rate for innovations with a regularly varying right tail of
/// exponent `tail_index`: `lambda = tail_index * ln(1/a)`.
pub fn regularly_varying_rate(tail_index: f64, a: f64) -> Result<f64, OracleError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(OracleError::InvalidContraction { a });
    }
    assert!(tail_index > 0.0);
    Ok(-tail_index * a.ln())
}
