//! Innovation distributions for the AR(1) recursion.
//!
//! Four families cover the tail regimes the rest of the crate cares
//! about:
//!
//! * `Gaussian(mean, std)`: all moments finite, unbounded support,
//! * `Laplace(scale)`: all moments finite, the family with a closed-form
//!   survival generating function (see [`crate::oracles`]),
//! * `Uniform(lo, hi)`: bounded support,
//! * `TwoSidedPareto(tail_index, scale, left_rate)`: exponential left
//!   tail, regularly varying right tail `P(xi > x) ~ x^{-tail_index}`,
//!   with mass split evenly between the half-lines.
//!
//! Sampling is inverse-CDF for every family except Gaussian, which uses
//! the Box-Muller transform. Each draw consumes a fixed number of
//! uniforms (two for Gaussian, one otherwise), so streams stay aligned
//! and reproducible across runs and worker counts.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InnovationError {
    #[error("invalid parameter for {family}: {message}")]
    InvalidParameter {
        family: &'static str,
        message: String,
    },
    /// The chain can only be killed if the innovation puts mass on both
    /// half-lines; spectral and renewal pipelines reject one-sided
    /// models (their killed kernel is stochastic and the decay rate is
    /// zero).
    #[error("innovation is one-sided: P(xi < 0) = 0 or P(xi > 0) = 0")]
    OneSided,
}

/// Tail regime of an innovation law, as seen from the right half-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TailClass {
    /// Essential supremum is finite.
    BoundedAbove,
    /// Unbounded support but every power moment is finite.
    AllMomentsFinite,
    /// `P(xi > x) = x^{-r} L(x)` with `L` slowly varying; carries `r`.
    RegularlyVarying(f64),
}

/// Classification of a model relative to a contraction factor `a`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailReport {
    pub class: TailClass,
    /// Right essential supremum of the innovation; `f64::INFINITY` for
    /// unbounded families.
    pub ess_sup: f64,
    /// Upper edge `ess_sup / (1 - a)` of the reachable state space when
    /// the innovation is bounded above; `None` otherwise.
    pub r_star: Option<f64>,
    /// Whether both `P(xi > 0) > 0` and `P(xi < 0) > 0`.
    pub two_sided: bool,
}

/// An innovation distribution. Construct through the checked
/// constructors; the serde representation uses a lowercase `kind` tag:
/// `{ kind = "gaussian", mean = 0.0, std = 1.0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InnovationModel {
    Gaussian { mean: f64, std: f64 },
    Laplace { scale: f64 },
    Uniform { lo: f64, hi: f64 },
    TwoSidedPareto { tail_index: f64, scale: f64, left_rate: f64 },
}

impl InnovationModel {
    pub fn gaussian(mean: f64, std: f64) -> Result<Self, InnovationError> {
        if !(std > 0.0) || !mean.is_finite() || !std.is_finite() {
            return Err(InnovationError::InvalidParameter {
                family: "gaussian",
                message: format!("need finite mean and std > 0, got mean={mean}, std={std}"),
            });
        }
        Ok(Self::Gaussian { mean, std })
    }

    pub fn laplace(scale: f64) -> Result<Self, InnovationError> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(InnovationError::InvalidParameter {
                family: "laplace",
                message: format!("need scale > 0, got {scale}"),
            });
        }
        Ok(Self::Laplace { scale })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, InnovationError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(InnovationError::InvalidParameter {
                family: "uniform",
                message: format!("need lo < hi, got lo={lo}, hi={hi}"),
            });
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn two_sided_pareto(
        tail_index: f64,
        scale: f64,
        left_rate: f64,
    ) -> Result<Self, InnovationError> {
        if !(tail_index > 0.0) || !(scale > 0.0) || !(left_rate > 0.0) {
            return Err(InnovationError::InvalidParameter {
                family: "two_sided_pareto",
                message: format!(
                    "need tail_index, scale, left_rate > 0, got {tail_index}, {scale}, {left_rate}"
                ),
            });
        }
        Ok(Self::TwoSidedPareto { tail_index, scale, left_rate })
    }

    /// Re-validates the parameter ranges; used after deserialization.
    pub fn validate(&self) -> Result<(), InnovationError> {
        match *self {
            Self::Gaussian { mean, std } => Self::gaussian(mean, std).map(drop),
            Self::Laplace { scale } => Self::laplace(scale).map(drop),
            Self::Uniform { lo, hi } => Self::uniform(lo, hi).map(drop),
            Self::TwoSidedPareto { tail_index, scale, left_rate } => {
                Self::two_sided_pareto(tail_index, scale, left_rate).map(drop)
            }
        }
    }

    /// Probability density at `x`.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, std } => {
                let z = (x - mean) / std;
                (-0.5 * z * z).exp() / (std * (2.0 * std::f64::consts::PI).sqrt())
            }
            Self::Laplace { scale } => (-x.abs() / scale).exp() / (2.0 * scale),
            Self::Uniform { lo, hi } => {
                if x >= lo && x <= hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Self::TwoSidedPareto { tail_index, scale, left_rate } => {
                if x < 0.0 {
                    0.5 * left_rate * (left_rate * x).exp()
                } else {
                    0.5 * tail_index * scale.powf(tail_index)
                        / (x + scale).powf(tail_index + 1.0)
                }
            }
        }
    }

    /// Cumulative distribution function at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, std } => {
                // unwrap: parameters were validated at construction
                Normal::new(mean, std).unwrap().cdf(x)
            }
            Self::Laplace { scale } => {
                if x < 0.0 {
                    0.5 * (x / scale).exp()
                } else {
                    1.0 - 0.5 * (-x / scale).exp()
                }
            }
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::TwoSidedPareto { tail_index, scale, left_rate } => {
                if x < 0.0 {
                    0.5 * (left_rate * x).exp()
                } else {
                    1.0 - 0.5 * (scale / (x + scale)).powf(tail_index)
                }
            }
        }
    }

    /// Right tail probability `P(xi > x)`, computed without the
    /// cancellation `1 - cdf(x)` suffers from far in the tail.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, std } => Normal::new(mean, std).unwrap().sf(x),
            Self::Laplace { scale } => {
                if x < 0.0 {
                    1.0 - 0.5 * (x / scale).exp()
                } else {
                    0.5 * (-x / scale).exp()
                }
            }
            Self::Uniform { lo, hi } => 1.0 - ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::TwoSidedPareto { tail_index, scale, left_rate } => {
                if x < 0.0 {
                    1.0 - 0.5 * (left_rate * x).exp()
                } else {
                    0.5 * (scale / (x + scale)).powf(tail_index)
                }
            }
        }
    }

    /// Quantile function on `(0, 1)`; inverse of [`Self::cdf`].
    pub fn quantile(&self, u: f64) -> f64 {
        assert!(u > 0.0 && u < 1.0, "quantile needs u in (0,1), got {u}");
        match *self {
            Self::Gaussian { mean, std } => Normal::new(mean, std).unwrap().inverse_cdf(u),
            Self::Laplace { scale } => {
                if u < 0.5 {
                    scale * (2.0 * u).ln()
                } else {
                    -scale * (2.0 * (1.0 - u)).ln()
                }
            }
            Self::Uniform { lo, hi } => lo + u * (hi - lo),
            Self::TwoSidedPareto { tail_index, scale, left_rate } => {
                if u < 0.5 {
                    (2.0 * u).ln() / left_rate
                } else {
                    scale * ((2.0 * (1.0 - u)).powf(-1.0 / tail_index) - 1.0)
                }
            }
        }
    }

    /// Draws one innovation. Consumes exactly two uniforms for Gaussian
    /// (Box-Muller, second variate discarded) and exactly one otherwise.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gaussian { mean, std } => {
                let u1 = unit_open(rng);
                let u2 = unit_open(rng);
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                mean + std * z
            }
            _ => self.quantile(unit_open(rng)),
        }
    }

    /// Mean, where it exists (`None` for Pareto tails with
    /// `tail_index <= 1`).
    pub fn mean(&self) -> Option<f64> {
        match *self {
            Self::Gaussian { mean, .. } => Some(mean),
            Self::Laplace { .. } => Some(0.0),
            Self::Uniform { lo, hi } => Some(0.5 * (lo + hi)),
            Self::TwoSidedPareto { tail_index, scale, left_rate } => {
                if tail_index > 1.0 {
                    Some(0.5 * scale / (tail_index - 1.0) - 0.5 / left_rate)
                } else {
                    None
                }
            }
        }
    }

    /// Variance, where it exists (`None` for Pareto tails with
    /// `tail_index <= 2`).
    pub fn variance(&self) -> Option<f64> {
        match *self {
            Self::Gaussian { std, .. } => Some(std * std),
            Self::Laplace { scale } => Some(2.0 * scale * scale),
            Self::Uniform { lo, hi } => Some((hi - lo) * (hi - lo) / 12.0),
            Self::TwoSidedPareto { tail_index, scale, left_rate } => {
                if tail_index > 2.0 {
                    let m = self.mean().unwrap();
                    let m2 = 1.0 / (left_rate * left_rate)
                        + scale * scale / ((tail_index - 1.0) * (tail_index - 2.0));
                    Some(m2 - m * m)
                } else {
                    None
                }
            }
        }
    }

    /// Interquartile range; finite for every family and used as the
    /// scale in truncation bounds.
    pub fn iqr(&self) -> f64 {
        self.quantile(0.75) - self.quantile(0.25)
    }

    /// Right essential supremum.
    pub fn ess_sup(&self) -> f64 {
        match *self {
            Self::Uniform { hi, .. } => hi,
            _ => f64::INFINITY,
        }
    }

    /// Tail regime of the right tail.
    pub fn tail_class(&self) -> TailClass {
        match *self {
            Self::Gaussian { .. } | Self::Laplace { .. } => TailClass::AllMomentsFinite,
            Self::Uniform { .. } => TailClass::BoundedAbove,
            Self::TwoSidedPareto { tail_index, .. } => TailClass::RegularlyVarying(tail_index),
        }
    }

    /// True when the law charges both half-lines.
    pub fn is_two_sided(&self) -> bool {
        match *self {
            Self::Uniform { lo, hi } => lo < 0.0 && hi > 0.0,
            _ => true,
        }
    }

    /// Errors unless the law charges both half-lines. The operator
    /// pipelines call this up front: a one-sided law makes the killed
    /// kernel stochastic and the decay rate degenerate.
    pub fn validate_two_sided(&self) -> Result<(), InnovationError> {
        if self.is_two_sided() {
            Ok(())
        } else {
            Err(InnovationError::OneSided)
        }
    }

    /// Classifies the model relative to the contraction factor `a`.
    pub fn classify_tail(&self, a: f64) -> TailReport {
        let ess_sup = self.ess_sup();
        TailReport {
            class: self.tail_class(),
            ess_sup,
            r_star: ess_sup.is_finite().then(|| ess_sup / (1.0 - a)),
            two_sided: self.is_two_sided(),
        }
    }
}

/// Uniform draw in the open interval (0, 1): 53-bit mantissa with the
/// low bit forced, so neither endpoint can occur and every draw costs
/// exactly one `u64`.
fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (((rng.next_u64() >> 11) | 1) as f64) * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::substream;
    use proptest::prelude::*;
    use rand::RngCore;

    fn models() -> Vec<InnovationModel> {
        vec![
            InnovationModel::gaussian(0.0, 1.0).unwrap(),
            InnovationModel::gaussian(-0.3, 2.5).unwrap(),
            InnovationModel::laplace(1.0).unwrap(),
            InnovationModel::laplace(2.0).unwrap(),
            InnovationModel::uniform(-1.0, 1.0).unwrap(),
            InnovationModel::uniform(-0.5, 3.0).unwrap(),
            InnovationModel::two_sided_pareto(1.0, 1.0, 1.0).unwrap(),
            InnovationModel::two_sided_pareto(5.0, 2.0, 0.7).unwrap(),
        ]
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(InnovationModel::gaussian(0.0, 0.0).is_err());
        assert!(InnovationModel::gaussian(f64::NAN, 1.0).is_err());
        assert!(InnovationModel::laplace(-1.0).is_err());
        assert!(InnovationModel::uniform(1.0, 1.0).is_err());
        assert!(InnovationModel::uniform(2.0, -2.0).is_err());
        assert!(InnovationModel::two_sided_pareto(0.0, 1.0, 1.0).is_err());
        assert!(InnovationModel::two_sided_pareto(1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn density_point_values() {
        let g = InnovationModel::gaussian(0.0, 1.0).unwrap();
        assert!((g.density(0.0) - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        let l = InnovationModel::laplace(1.0).unwrap();
        assert!((l.density(0.0) - 0.5).abs() < 1e-15);
        let u = InnovationModel::uniform(-1.0, 1.0).unwrap();
        assert_eq!(u.density(0.3), 0.5);
        assert_eq!(u.density(1.5), 0.0);
        let p = InnovationModel::two_sided_pareto(1.0, 1.0, 1.0).unwrap();
        assert!((p.density(0.0) - 0.5).abs() < 1e-15);
        assert!((p.density(-f64::MIN_POSITIVE) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cdf_matches_sf() {
        for m in models() {
            for &x in &[-7.3, -1.0, -0.1, 0.0, 0.2, 1.0, 4.5, 30.0] {
                assert!(
                    (m.cdf(x) + m.sf(x) - 1.0).abs() < 1e-12,
                    "{m:?} at {x}: cdf+sf != 1"
                );
            }
        }
    }

    fn simpson(m: &InnovationModel, a: f64, b: f64) -> f64 {
        let n = 256;
        let h = (b - a) / n as f64;
        let mut acc = m.density(a) + m.density(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * m.density(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    /// Integrates the density over `[0, len]` (`sign = 1`) or
    /// `[-len, 0]` (`sign = -1`) on dyadic segments accumulating from
    /// the origin, so ranges spanning many orders of magnitude (power
    /// tails) still resolve the near-origin mass.
    fn half_integral(m: &InnovationModel, len: f64, sign: f64) -> f64 {
        let splits = 48;
        let mut total = 0.0;
        let mut hi = len;
        for _ in 0..splits {
            let lo = hi * 0.5;
            total += if sign > 0.0 {
                simpson(m, lo, hi)
            } else {
                simpson(m, -hi, -lo)
            };
            hi = lo;
        }
        total
            + if sign > 0.0 {
                simpson(m, 0.0, hi)
            } else {
                simpson(m, -hi, 0.0)
            }
    }

    #[test]
    fn density_integrates_to_one() {
        for m in models() {
            // Split at zero: Laplace and Pareto densities have a kink
            // or jump there. Tail remainders beyond the finite range
            // are added analytically.
            let (neg_len, pos_len, tail) = match m {
                InnovationModel::Gaussian { mean, std } => {
                    (-(mean - 12.0 * std), mean + 12.0 * std, 0.0)
                }
                InnovationModel::Laplace { scale } => {
                    (45.0 * scale, 45.0 * scale, (-45.0f64).exp())
                }
                InnovationModel::Uniform { lo, hi } => (-lo, hi, 0.0),
                InnovationModel::TwoSidedPareto { tail_index, scale, left_rate } => {
                    let hi = scale * 10f64.powf(12.0 / tail_index);
                    (
                        45.0 / left_rate,
                        hi,
                        0.5 * (scale / (hi + scale)).powf(tail_index),
                    )
                }
            };
            let total = half_integral(&m, neg_len, -1.0) + half_integral(&m, pos_len, 1.0);
            assert!(
                (total + tail - 1.0).abs() < 1e-8,
                "{m:?}: integral {total} + tail {tail}"
            );
        }
    }

    #[test]
    fn quantile_inverts_cdf_at_fixed_points() {
        for m in models() {
            for &u in &[1e-6, 0.01, 0.25, 0.5, 0.75, 0.99, 1.0 - 1e-6] {
                let x = m.quantile(u);
                assert!((m.cdf(x) - u).abs() < 1e-9, "{m:?} u={u} x={x}");
            }
        }
    }

    proptest! {
        #[test]
        fn quantile_cdf_identity(idx in 0usize..8, u in 1e-9f64..1.0) {
            prop_assume!(u < 1.0 - 1e-9);
            let m = models()[idx];
            let x = m.quantile(u);
            let back = m.quantile(m.cdf(x).clamp(1e-15, 1.0 - 1e-15));
            prop_assert!((back - x).abs() <= 1e-9 * x.abs().max(1.0),
                "{:?}: u={} x={} back={}", m, u, x, back);
        }

        #[test]
        fn cdf_is_monotone(idx in 0usize..8, x in -50.0f64..50.0, dx in 0.0f64..5.0) {
            let m = models()[idx];
            prop_assert!(m.cdf(x + dx) >= m.cdf(x));
        }
    }

    #[test]
    fn sample_moments_match(){
        let n = 1_000_000usize;
        for m in [
            InnovationModel::gaussian(0.0, 1.0).unwrap(),
            InnovationModel::laplace(2.0).unwrap(),
            InnovationModel::uniform(-1.0, 1.0).unwrap(),
            InnovationModel::two_sided_pareto(5.0, 2.0, 0.7).unwrap(),
        ] {
            let mut rng = substream(2024, 1);
            let xs: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
            let (mean, var) = crate::stats::mean_var(&xs);
            let se_mean = (m.variance().unwrap() / n as f64).sqrt();
            assert!(
                (mean - m.mean().unwrap()).abs() < 4.0 * se_mean,
                "{m:?}: mean {mean} vs {:?}",
                m.mean()
            );
            // SE of the sample variance from the plug-in fourth moment.
            let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
            let se_var = ((m4 - var * var).max(0.0) / n as f64).sqrt();
            assert!(
                (var - m.variance().unwrap()).abs() < 4.0 * se_var,
                "{m:?}: var {var} vs {:?}",
                m.variance()
            );
        }
    }

    #[test]
    fn gaussian_mean_within_three_sigma_band() {
        let m = InnovationModel::gaussian(0.0, 1.0).unwrap();
        let mut rng = substream(7, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| m.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.004, "mean {mean}");
    }

    #[test]
    fn laplace_positive_mass_is_half() {
        let m = InnovationModel::laplace(2.0).unwrap();
        let mut rng = substream(8, 0);
        let n = 1_000_000;
        let pos = (0..n).filter(|_| m.sample(&mut rng) > 0.0).count();
        let p = pos as f64 / n as f64;
        assert!((p - 0.5).abs() < 0.0015, "P(xi>0) = {p}");
    }

    #[test]
    fn uniform_ks_against_cdf() {
        let m = InnovationModel::uniform(-1.0, 1.0).unwrap();
        let mut rng = substream(9, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| m.sample(&mut rng)).collect();
        let d = crate::stats::ks_statistic(&xs, |x| m.cdf(x));
        assert!(d < 0.0065, "KS statistic {d}");
    }

    #[test]
    fn pareto_halves_split_evenly() {
        let m = InnovationModel::two_sided_pareto(1.0, 1.0, 1.0).unwrap();
        assert!((m.cdf(0.0) - 0.5).abs() < 1e-15);
        let mut rng = substream(10, 0);
        let n = 1_000_000;
        let neg = (0..n).filter(|_| m.sample(&mut rng) < 0.0).count();
        assert!((neg as f64 / n as f64 - 0.5).abs() < 0.0015);
    }

    #[test]
    fn sampling_consumes_counted_uniforms() {
        // Gaussian burns two u64 per draw, the others one; verify by
        // advancing a twin stream manually.
        let g = InnovationModel::gaussian(0.0, 1.0).unwrap();
        let mut a = substream(11, 3);
        let x0 = g.sample(&mut a);
        let x1 = g.sample(&mut a);
        let mut b = substream(11, 3);
        for _ in 0..2 {
            b.next_u64();
        }
        assert_eq!(g.sample(&mut b), x1);
        assert_ne!(x0, x1);

        let l = InnovationModel::laplace(1.0).unwrap();
        let mut a = substream(11, 4);
        let _ = l.sample(&mut a);
        let second = l.sample(&mut a);
        let mut b = substream(11, 4);
        b.next_u64();
        assert_eq!(l.sample(&mut b), second);
    }

    #[test]
    fn tail_classification() {
        let u = InnovationModel::uniform(-1.0, 1.0).unwrap();
        let rep = u.classify_tail(0.5);
        assert_eq!(rep.class, TailClass::BoundedAbove);
        assert_eq!(rep.ess_sup, 1.0);
        assert_eq!(rep.r_star, Some(2.0));
        assert!(rep.two_sided);

        let g = InnovationModel::gaussian(0.0, 1.0).unwrap();
        assert_eq!(g.classify_tail(0.5).class, TailClass::AllMomentsFinite);
        assert_eq!(g.classify_tail(0.5).r_star, None);

        let p = InnovationModel::two_sided_pareto(1.5, 1.0, 1.0).unwrap();
        assert_eq!(p.tail_class(), TailClass::RegularlyVarying(1.5));
    }

    #[test]
    fn one_sided_models_are_flagged() {
        let pos = InnovationModel::uniform(0.0, 1.0).unwrap();
        assert!(!pos.is_two_sided());
        assert_eq!(pos.validate_two_sided(), Err(InnovationError::OneSided));
        let ok = InnovationModel::uniform(-0.1, 1.0).unwrap();
        assert!(ok.validate_two_sided().is_ok());
    }

    #[test]
    fn serde_roundtrip_with_kind_tag() {
        let m = InnovationModel::gaussian(0.0, 1.0).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"kind\":\"gaussian\""), "{json}");
        let back: InnovationModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let p: InnovationModel = serde_json::from_str(
            r#"{"kind":"two_sided_pareto","tail_index":1.0,"scale":1.0,"left_rate":1.0}"#,
        )
        .unwrap();
        assert_eq!(p, InnovationModel::two_sided_pareto(1.0, 1.0, 1.0).unwrap());
        assert!(serde_json::from_str::<InnovationModel>(
            r#"{"kind":"gaussian","mean":0.0,"std":1.0,"extra":3}"#
        )
        .is_err());
    }

    #[test]
    fn iqr_values() {
        let u = InnovationModel::uniform(-1.0, 1.0).unwrap();
        assert!((u.iqr() - 1.0).abs() < 1e-12);
        let l = InnovationModel::laplace(1.0).unwrap();
        assert!((l.iqr() - 2.0 * 0.5f64.ln().abs()).abs() < 1e-12);
    }
}
