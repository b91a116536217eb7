//! Acceptance gate: ten end-to-end criteria, one test (and one
//! pass/fail line) per criterion, at the stated tolerances.
//!
//! The criteria cross-validate the three independent rate pipelines
//! (eigen solve, excursion root, Monte Carlo) against closed-form
//! anchors and against each other, exercise the quasi-stationary and
//! harmonic outputs, and pin the behavior required on heavy-tailed
//! input: honest refusal instead of truncation artifacts.
//!
//! Run with `--nocapture` to see the per-criterion detail lines.

use ar1persist::chain::{self, Ar1, SurvivalCurve};
use ar1persist::estimators::{self, FvOptions};
use ar1persist::grid::{self, Grid};
use ar1persist::innovations::{InnovationModel, TailClass};
use ar1persist::kernel::{KernelBlocks, KernelError, KilledKernel, Scheme};
use ar1persist::linalg;
use ar1persist::oracles;
use ar1persist::renewal::{RenewalError, RenewalSystem};
use ar1persist::spectral::{self, SpectralOptions, SpectralSolution};
use ar1persist::stats::{self, Z_95};
use ar1persist::streams::substream;
use nalgebra::{DMatrix, DVector};
use once_cell::sync::Lazy;
use std::time::Instant;

const SEED_CURVE: u64 = 9_118_215_001;
const SEED_QSD: u64 = 7_602_114_003;
const SEED_FKG_KILLED: u64 = 5_541_007_011;
const SEED_FKG_FREE: u64 = 5_541_007_012;
const SEED_COUPLE: u64 = 31_415_926;
const SEED_HEAVY: u64 = 2_718_281_828;
const SEED_FV: u64 = 1_414_213_562;
const SEED_DEGENERATE: u64 = 1_732_050_808;

/// A model, its assembled kernel, and the eigen solution, bundled so
/// criteria can share the expensive parts.
struct Benchmark {
    model: InnovationModel,
    a: f64,
    kernel: KilledKernel,
    sol: SpectralSolution,
}

fn benchmark(model: InnovationModel, a: f64, cap: f64, n: usize, r: f64) -> Benchmark {
    let grid = Grid::uniform(cap, n, r).expect("benchmark grid");
    let kernel =
        KilledKernel::assemble(&model, a, &grid, Scheme::MidpointExactMass).expect("assemble");
    let sol = spectral::solve(
        &kernel,
        SpectralOptions {
            estimate_gap: false,
            ..SpectralOptions::default()
        },
    )
    .expect("eigen solve");
    Benchmark { model, a, kernel, sol }
}

static GAUSS: Lazy<Benchmark> = Lazy::new(|| {
    benchmark(
        InnovationModel::gaussian(0.0, 1.0).unwrap(),
        0.5,
        16.0,
        400,
        2.0,
    )
});

static UNIFORM: Lazy<Benchmark> = Lazy::new(|| {
    benchmark(
        InnovationModel::uniform(-1.0, 1.0).unwrap(),
        0.5,
        2.0,
        800,
        1.0,
    )
});

/// The contraction factors with closed-form rate anchors, each on a
/// grid whose cap keeps the one-step overflow below 1e-10.
static LAPLACE: Lazy<Vec<Benchmark>> = Lazy::new(|| {
    let lap = || InnovationModel::laplace(1.0).unwrap();
    vec![
        benchmark(lap(), 0.3, 32.0, 800, 2.0),
        benchmark(lap(), 0.5, 48.0, 800, 3.0),
        benchmark(lap(), 0.7, 80.0, 800, 5.0),
    ]
});

static GAUSS_CURVE: Lazy<SurvivalCurve> = Lazy::new(|| {
    let chain = Ar1::new(0.5, InnovationModel::gaussian(0.0, 1.0).unwrap()).unwrap();
    chain::survival_curve(&chain, 1.0, 32, 1_000_000, SEED_CURVE).unwrap()
});

/// Criterion 1 — the eigen rate agrees with the closed-form root of
/// the infinite-product equation for two-sided exponential input, at
/// a ∈ {0.3, 0.5, 0.7}, within 1e-3, on grids with overflow < 1e-10.
#[test]
fn c01_closed_form_rate_agreement() {
    let t = Instant::now();
    for b in LAPLACE.iter() {
        let anchor = oracles::laplace_rate(b.a).expect("anchor root");
        let err = (b.sol.lambda() - anchor.lambda).abs();
        let overflow = grid::overflow_mass(&b.model, b.a, b.kernel.grid().cap());
        assert!(
            overflow < 1e-10,
            "a={}: overflow {overflow:.2e} breaches 1e-10",
            b.a
        );
        assert!(
            err <= 1e-3,
            "a={}: |lambda - anchor| = {err:.3e} > 1e-3",
            b.a
        );
        println!(
            "[C1] a={}: eigen rate {:.9} vs product-root anchor {:.9} (err {:.2e}, overflow {:.1e})",
            b.a,
            b.sol.lambda(),
            anchor.lambda,
            err,
            overflow
        );
    }
    let elapsed = t.elapsed().as_secs_f64();
    assert!(
        elapsed < 90.0,
        "three anchor comparisons took {elapsed:.1}s, over the 3 x 30s budget"
    );
    println!("[C1] PASS in {elapsed:.1}s (budget 90s for the three factors)");
}

/// Criterion 2 — on one discretization the excursion root equals the
/// eigen rate to 1e-6, and the block-elimination identity matches the
/// full-grid resolvent to 1e-10 at half the rate.
#[test]
fn c02_excursion_root_matches_eigen_rate() {
    let b = &*GAUSS;
    let sys = RenewalSystem::from_kernel(&b.kernel).expect("renewal system");
    let root = sys.find_rate(1e-11).expect("root search");
    let diff = (root.lambda - b.sol.lambda()).abs();
    assert!(diff <= 1e-6, "|root - eigen| = {diff:.3e} > 1e-6");
    let z_half = (0.5 * b.sol.lambda()).exp();
    let defect = sys
        .resolvent_identity_defect(&b.kernel, z_half)
        .expect("resolvent identity");
    assert!(defect <= 1e-10, "resolvent defect {defect:.3e} > 1e-10");
    println!(
        "[C2] PASS: excursion root {:.12} vs eigen {:.12} (diff {:.2e}); resolvent defect {:.2e} at z = e^(lambda/2)",
        root.lambda,
        b.sol.lambda(),
        diff,
        defect
    );
}

/// Criterion 3 — total probability: the death and return weights at
/// unit step weight sum to one within 1e-8 on all three light-tailed
/// benchmarks.
#[test]
fn c03_total_probability_conservation() {
    let cases = [
        ("gaussian", &*GAUSS),
        ("laplace", &LAPLACE[1]),
        ("uniform", &*UNIFORM),
    ];
    for (name, b) in cases {
        let sys = RenewalSystem::from_kernel(&b.kernel).expect("renewal system");
        let defect = sys.conservation_defect().expect("conservation");
        assert!(defect <= 1e-8, "{name}: conservation defect {defect:.3e} > 1e-8");
        println!("[C3] {name}: |F(1) + K(1)1 - 1| = {defect:.2e}");
    }
    println!("[C3] PASS: all three benchmarks conserve within 1e-8");
}

/// Criterion 4 — the harmonic output satisfies its eigen equation:
/// relative sup-norm residual of e^lambda * Q V = V below 1e-8, with
/// the solver run tighter than 1e-10.
#[test]
fn c04_harmonic_eigen_residual() {
    let mut cases: Vec<(String, &Benchmark)> = vec![
        ("gaussian".into(), &*GAUSS),
        ("uniform".into(), &*UNIFORM),
    ];
    for b in LAPLACE.iter() {
        cases.push((format!("laplace a={}", b.a), b));
    }
    for (name, b) in cases {
        let v = b.sol.harmonic();
        let image = b.kernel.apply(v);
        let el = b.sol.lambda().exp();
        let sup_v = v.amax();
        let residual = (0..v.len())
            .map(|i| (el * image[i] - v[i]).abs())
            .fold(0.0, f64::max)
            / sup_v;
        assert!(
            residual <= 1e-8,
            "{name}: harmonic residual {residual:.3e} > 1e-8"
        );
        println!("[C4] {name}: |e^lambda Q V - V| / |V| = {residual:.2e}");
    }
    println!("[C4] PASS: harmonic residual below 1e-8 on all five solutions");
}

/// Criterion 5 — the eigen prediction V(x) e^(-lambda n) sits inside
/// the Monte Carlo Wilson 95% interval for at least 18 of the 21
/// horizons n in [10, 30], with 1e6 paths from x0 = 1.
#[test]
fn c05_survival_curve_tracks_prediction() {
    let t = Instant::now();
    let curve = &*GAUSS_CURVE;
    let sol = &GAUSS.sol;
    let mut hits = 0;
    for n in 10..=30usize {
        let (lo, hi) = stats::wilson_interval(curve.counts[n], curve.n_paths, Z_95);
        let predicted = sol.survival_prediction(1.0, n as u32);
        if (lo..=hi).contains(&predicted) {
            hits += 1;
        }
    }
    let elapsed = t.elapsed().as_secs_f64();
    assert!(
        hits >= 18,
        "prediction inside the Wilson interval at only {hits}/21 horizons"
    );
    assert!(elapsed < 120.0, "curve + screening took {elapsed:.1}s > 120s");
    println!(
        "[C5] PASS: prediction inside Wilson 95% at {hits}/21 horizons in [10,30] ({:.0} paths, {elapsed:.1}s)",
        curve.n_paths as f64
    );
}

/// Criterion 6 — cross-pipeline triangle on the Gaussian benchmark:
/// the survival-slope estimate is within 3 standard errors of the
/// eigen rate, and the particle estimate is within 5% relative.
#[test]
fn c06_cross_pipeline_triangle() {
    let sol = &GAUSS.sol;
    let est = estimators::slope_estimate(&GAUSS_CURVE, 10, 30).expect("slope fit");
    let gap = (est.lambda - sol.lambda()).abs();
    assert!(
        gap <= 3.0 * est.stderr,
        "slope {:.6} vs eigen {:.6}: gap {gap:.2e} > 3 x stderr {:.2e}",
        est.lambda,
        sol.lambda(),
        est.stderr
    );

    let chain = Ar1::new(0.5, InnovationModel::gaussian(0.0, 1.0).unwrap()).unwrap();
    let fv = estimators::fleming_viot(
        &chain,
        1.0,
        FvOptions {
            n_particles: 10_000,
            steps: 500,
            burn_in: 100,
        },
        SEED_FV,
    )
    .expect("particle estimate");
    let rel = (fv.lambda - sol.lambda()).abs() / sol.lambda();
    assert!(rel <= 0.05, "particle rate off by {:.2}% > 5%", 100.0 * rel);
    println!(
        "[C6] PASS: slope {:.5} +- {:.5} ({:.1} se from eigen); particle {:.5} ({:+.2}% relative)",
        est.lambda,
        est.stderr,
        gap / est.stderr,
        fv.lambda,
        100.0 * (fv.lambda - sol.lambda()) / sol.lambda()
    );
}

/// Criterion 7 — bounded-support quasi-stationarity: the Monte Carlo
/// conditional law at n = 30 is within total-variation 0.05 of the
/// eigen quasi-stationary law on 20 bins, and the exact conditioned
/// cell law (free of sampling noise) moves closer to it from n = 10
/// to n = 30.
#[test]
fn c07_conditioned_law_converges_to_qsd() {
    let b = &*UNIFORM;
    let chain = Ar1::new(0.5, InnovationModel::uniform(-1.0, 1.0).unwrap()).unwrap();
    let t = Instant::now();
    let states = chain::surviving_states(&chain, 1.9, 30, 1_200_000_000, SEED_QSD).unwrap();
    let elapsed = t.elapsed().as_secs_f64();

    let grid20 = Grid::uniform(2.0, 20, 1.0).unwrap();
    let nu = b.sol.qsd_masses();
    let per_bin = b.kernel.grid().n() / 20;
    let mut nu20 = DVector::zeros(20);
    for (i, m) in nu.iter().enumerate() {
        nu20[i / per_bin] += m;
    }
    let tv30 = estimators::tv_against(&grid20, &states, &nu20);
    assert!(
        tv30 <= 0.05,
        "conditional law vs QSD: TV {tv30:.4} > 0.05 over 20 bins"
    );

    let law10 = estimators::conditional_cell_law(&b.kernel, 1.9, 10).expect("law at 10");
    let law30 = estimators::conditional_cell_law(&b.kernel, 1.9, 30).expect("law at 30");
    let d10 = stats::tv_distance(law10.as_slice(), nu.as_slice());
    let d30 = stats::tv_distance(law30.as_slice(), nu.as_slice());
    assert!(
        d30 < d10,
        "exact conditioned law: TV(30) = {d30:.3e} not below TV(10) = {d10:.3e}"
    );
    println!(
        "[C7] PASS: MC conditional law ({} survivors of 1.2e9 paths, {elapsed:.0}s) TV = {tv30:.4} <= 0.05; \
         exact law TV {d10:.1e} (n=10) -> {d30:.1e} (n=30)",
        states.len()
    );
}

/// Criterion 8 — power-tail input (tail index 1, a = 0.8): the Monte
/// Carlo slope over n in [15, 40] lands within [0.8, 1.2] of the
/// slow-variation rate -ln(a), while the excursion pipeline refuses
/// the reference rate with a divergence error and flags every
/// truncation as suspect instead of reporting a cap artifact.
#[test]
fn c08_heavy_tail_rate_and_refusal() {
    let t = Instant::now();
    let model = InnovationModel::two_sided_pareto(1.0, 1.0, 1.0).unwrap();
    let lambda_ref = oracles::regularly_varying_rate(1.0, 0.8).expect("reference rate");

    let chain = Ar1::new(0.8, model.clone()).unwrap();
    let curve =
        chain::survival_curve_at_barrier(&chain, 60.0, 30.0, 40, 10_000_000, SEED_HEAVY).unwrap();
    let est = estimators::slope_estimate(&curve, 15, 40).expect("slope fit");
    let ratio = est.lambda / lambda_ref;
    assert!(
        (0.8..=1.2).contains(&ratio),
        "slope/reference ratio {ratio:.3} outside [0.8, 1.2]"
    );

    for &(cap, n) in &[(256.0, 64usize), (512.0, 128)] {
        let grid = Grid::uniform(cap, n, 8.0).unwrap();
        let kernel = KilledKernel::assemble(&model, 0.8, &grid, Scheme::MidpointExactMass).unwrap();
        let sys = RenewalSystem::from_kernel(&kernel).expect("renewal system");
        assert!(
            sys.truncation_suspect(),
            "cap {cap}: overflow past the cap not flagged"
        );
        let err = sys.excursion_at(lambda_ref.exp()).unwrap_err();
        assert!(
            matches!(err, RenewalError::SeriesDiverges { .. }),
            "cap {cap}: expected a divergence refusal, got {err:?}"
        );
    }
    let elapsed = t.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "heavy-tail criterion took {elapsed:.1}s > 600s");
    println!(
        "[C8] PASS: slope {:.4} = {ratio:.3} x reference {lambda_ref:.4} (1e7 paths, {elapsed:.1}s); \
         excursion series refused at the reference rate and truncation flagged at caps 256 and 512",
        est.lambda
    );
}

/// Criterion 9 — structural property suites: pathwise monotone
/// coupling with zero violations over 1e5 shared-innovation pairs;
/// survival conditioning stochastically raises the state (checked on
/// 20 thresholds within 3 standard errors); a positive rate on every
/// light-tailed benchmark; and survival identically one when the
/// innovations cannot go negative, with the kernel refusing such
/// input.
#[test]
fn c09_property_suites() {
    // (a) Shared-innovation coupling keeps paths ordered, so survival
    // is monotone in the start point, pair by pair.
    let mut violations = 0u64;
    for (model, a) in [
        (InnovationModel::gaussian(0.0, 1.0).unwrap(), 0.5),
        (InnovationModel::two_sided_pareto(1.0, 1.0, 1.0).unwrap(), 0.8),
    ] {
        let chain = Ar1::new(a, model).unwrap();
        for i in 0..50_000u64 {
            let mut rng = substream(SEED_COUPLE, i);
            let mut x = 0.125 * (1 + i % 16) as f64;
            let mut y = x + 0.75;
            for _ in 0..200 {
                let xi = chain.model().sample(&mut rng);
                x = chain.step(x, xi);
                y = chain.step(y, xi);
                if x > y {
                    violations += 1;
                }
                if x <= 0.0 {
                    break;
                }
            }
        }
    }
    assert_eq!(violations, 0, "{violations} ordering violations in coupled pairs");
    println!("[C9] coupling: 0 violations over 100000 shared-innovation pairs");

    // (b) Conditioning on survival raises every upper tail
    // probability: P(X_n > y | T > n) >= P(X_n > y) on a threshold
    // grid, up to three combined standard errors.
    let chain = Ar1::new(0.5, InnovationModel::gaussian(0.0, 1.0).unwrap()).unwrap();
    let conditioned =
        chain::surviving_states(&chain, 1.0, 10, 2_000_000, SEED_FKG_KILLED).unwrap();
    let mut free = Vec::with_capacity(2_000_000);
    let mut rng = substream(SEED_FKG_FREE, 0);
    for _ in 0..2_000_000 {
        let mut x = 1.0;
        for _ in 0..10 {
            x = chain.sample_step(x, &mut rng);
        }
        free.push(x);
    }
    let m = conditioned.len() as f64;
    let nf = free.len() as f64;
    let mut worst: f64 = 0.0;
    for j in 1..=20 {
        let y = 0.2 * j as f64;
        let p_cond = conditioned.iter().filter(|&&s| s > y).count() as f64 / m;
        let p_free = free.iter().filter(|&&s| s > y).count() as f64 / nf;
        let se = (p_cond * (1.0 - p_cond) / m + p_free * (1.0 - p_free) / nf).sqrt();
        let violation = p_free - p_cond;
        assert!(
            violation <= 3.0 * se,
            "at y = {y}: P(X>y) = {p_free:.4} exceeds conditioned {p_cond:.4} by more than 3 se"
        );
        worst = worst.max(violation / se.max(f64::MIN_POSITIVE));
    }
    println!(
        "[C9] conditioning raises all 20 upper tails (worst violation {worst:.2} se, {} survivors)",
        conditioned.len()
    );

    // (c) Every light-tailed benchmark decays at a strictly positive
    // rate.
    let mut light: Vec<(String, &Benchmark)> = vec![
        ("gaussian".into(), &*GAUSS),
        ("uniform".into(), &*UNIFORM),
    ];
    for b in LAPLACE.iter() {
        light.push((format!("laplace a={}", b.a), b));
    }
    for (name, b) in &light {
        let report = b.model.classify_tail(b.a);
        assert!(
            !matches!(report.class, TailClass::RegularlyVarying(_)),
            "{name} unexpectedly classified as power-tailed"
        );
        assert!(b.sol.lambda() > 0.0, "{name}: rate not positive");
    }
    println!("[C9] positive rate on all 5 light-tailed benchmarks");

    // (d) Innovations that cannot go negative never cross zero: the
    // sampled curve is identically one and the kernel refuses the
    // model as one-sided.
    let one_sided = InnovationModel::uniform(0.5, 1.5).unwrap();
    let chain = Ar1::new(0.5, one_sided.clone()).unwrap();
    let curve = chain::survival_curve(&chain, 1.0, 25, 40_000, SEED_DEGENERATE).unwrap();
    assert!(
        curve.counts.iter().all(|&c| c == curve.n_paths),
        "a path died although the innovations are nonnegative"
    );
    let grid = Grid::uniform(4.0, 64, 1.0).unwrap();
    let err = KilledKernel::assemble(&one_sided, 0.5, &grid, Scheme::MidpointExactMass)
        .expect_err("kernel must refuse one-sided input");
    assert!(
        matches!(err, KernelError::Innovation(_)),
        "unexpected refusal {err:?}"
    );
    println!("[C9] PASS: one-sided input keeps survival at 1 and the kernel refuses it");
}

/// Criterion 10 — closed-form finite fixture: the two-state killed
/// chain has leading eigenvalue 0.6 (to 1e-12), excursion root
/// ln(5/3) (to 1e-10), and harmonic residual below 1e-12.
#[test]
fn c10_finite_chain_fixture() {
    let q = DMatrix::from_row_slice(2, 2, &[0.4, 0.2, 0.1, 0.5]);
    let pair = linalg::power_pair(&q, 1e-13, 100_000).expect("eigen pair");
    assert!(
        (pair.rho - 0.6).abs() <= 1e-12,
        "fixture eigenvalue {} vs 0.6",
        pair.rho
    );
    let residual = {
        let image = &q * &pair.right;
        (0..2)
            .map(|i| (image[i] - pair.rho * pair.right[i]).abs())
            .fold(0.0, f64::max)
    };
    assert!(residual < 1e-12, "harmonic residual {residual:.3e}");

    let blocks = KernelBlocks {
        q_aa: DMatrix::from_row_slice(1, 1, &[0.4]),
        q_ab: DMatrix::from_row_slice(1, 1, &[0.2]),
        q_ba: DMatrix::from_row_slice(1, 1, &[0.1]),
        q_bb: DMatrix::from_row_slice(1, 1, &[0.5]),
        kill_a: DVector::from_row_slice(&[0.4]),
        kill_b: DVector::from_row_slice(&[0.4]),
    };
    let sys = RenewalSystem::from_blocks(blocks, 0.9).expect("fixture system");
    let root = sys.find_rate(1e-12).expect("fixture root");
    let expect = (5.0f64 / 3.0).ln();
    assert!(
        (root.lambda - expect).abs() <= 1e-10,
        "fixture root {} vs ln(5/3) = {expect}",
        root.lambda
    );
    println!(
        "[C10] PASS: eigenvalue {:.14}, excursion root {:.14} vs ln(5/3) {:.14}, residual {residual:.1e}",
        pair.rho,
        root.lambda,
        expect
    );
}
