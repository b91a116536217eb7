//! Cross-validation command: run the eigen solve, the excursion root,
//! the survival-slope fit and the particle system on one
//! configuration, then judge every pairwise check against its budget.
//! `comparison.json` records all estimates and verdicts; the process
//! exits nonzero (code 1) if any budget is exceeded, after writing
//! the artifact.

use crate::config;
use crate::errors::{self, CliError};
use crate::report;
use crate::Context;
use ar1persist::chain::{self, Ar1};
use ar1persist::estimators::{self, FvOptions};
use ar1persist::grid::Grid;
use ar1persist::kernel::KilledKernel;
use ar1persist::renewal::RenewalSystem;
use ar1persist::spectral::{self, SpectralOptions};
use serde_json::json;

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    config::require_zero_barrier(cfg)?;
    let g = config::require_grid(cfg)?;
    let mc = cfg
        .mc
        .as_ref()
        .ok_or_else(|| CliError::Config("compare needs an [mc] section".into()))?;
    let fv = cfg
        .fv
        .as_ref()
        .ok_or_else(|| CliError::Config("compare needs an [fv] section".into()))?;
    let x0 = config::require_x0(cfg)?;
    let budgets = cfg.compare.clone().unwrap_or_default();
    let spec = cfg.spectral.clone().unwrap_or_default();
    let ren = cfg.renewal.clone().unwrap_or_default();

    // Eigen pipeline.
    let grid = Grid::uniform(g.cap, g.n, g.r).map_err(|e| CliError::Config(e.to_string()))?;
    let kernel =
        KilledKernel::assemble_with_policy(&cfg.chain.model, cfg.chain.a, &grid, g.scheme, g.policy)
            .map_err(errors::from_kernel)?;
    let opts = SpectralOptions {
        tol: spec.tol,
        max_iter: spec.max_iter,
        estimate_gap: spec.estimate_gap,
    };
    let sol = spectral::solve(&kernel, opts).map_err(errors::from_spectral)?;
    let lambda_s = sol.lambda();

    // Excursion root on the same kernel.
    let sys = RenewalSystem::from_kernel(&kernel).map_err(errors::from_renewal)?;
    let root = sys.find_rate(ren.tol).map_err(errors::from_renewal)?;

    // Sampling pipelines.
    let chain = Ar1::new(cfg.chain.a, cfg.chain.model).map_err(errors::from_chain)?;
    let curve = chain::survival_curve(&chain, x0, mc.n_max, mc.n_paths, ctx.seed)
        .map_err(errors::from_chain)?;
    let slope = estimators::slope_estimate(&curve, mc.window.0, mc.window.1)
        .map_err(errors::from_estimator)?;
    let fv_est = estimators::fleming_viot(
        &chain,
        x0,
        FvOptions {
            n_particles: fv.n_particles,
            steps: fv.steps,
            burn_in: fv.burn_in,
        },
        ctx.seed,
    )
    .map_err(errors::from_estimator)?;

    let delta_renewal = (root.lambda - lambda_s).abs();
    let pass_renewal = delta_renewal <= budgets.budget_renewal;
    let delta_slope = (slope.lambda - lambda_s).abs();
    let slope_limit = budgets.budget_slope_sigmas * slope.stderr;
    let pass_slope = delta_slope <= slope_limit;
    let rel_fv = (fv_est.lambda - lambda_s).abs() / lambda_s;
    let pass_fv = rel_fv <= budgets.budget_fv_rel;
    let pass = pass_renewal && pass_slope && pass_fv;

    let body = json!({
        "estimates": {
            "spectral": lambda_s,
            "renewal": root.lambda,
            "slope": { "lambda": slope.lambda, "stderr": slope.stderr },
            "fv": fv_est.lambda,
        },
        "checks": [
            {
                "name": "renewal_vs_spectral",
                "delta": delta_renewal,
                "budget": budgets.budget_renewal,
                "pass": pass_renewal,
            },
            {
                "name": "slope_vs_spectral",
                "delta": delta_slope,
                "limit": slope_limit,
                "budget_sigmas": budgets.budget_slope_sigmas,
                "pass": pass_slope,
            },
            {
                "name": "fv_vs_spectral",
                "relative": rel_fv,
                "budget_relative": budgets.budget_fv_rel,
                "pass": pass_fv,
            },
        ],
        "pass": pass,
        "truncation_suspect": root.truncation_suspect,
    });
    report::write_json(&ctx.out.join("comparison.json"), body, &ctx.repro)?;

    if pass {
        Ok(())
    } else {
        let failed = [pass_renewal, pass_slope, pass_fv]
            .iter()
            .filter(|ok| !**ok)
            .count();
        Err(CliError::Comparison(format!(
            "{failed} of 3 cross-checks exceeded their budgets; see comparison.json"
        )))
    }
}
