//! Particle command: run the Fleming-Viot system (killed particles
//! restart on a surviving one) and report the decay-rate estimate
//! (`fv.json`) plus the per-step surviving fraction (`fv_trace.csv`).

use crate::config;
use crate::errors::{self, CliError};
use crate::report;
use crate::Context;
use ar1persist::chain::Ar1;
use ar1persist::estimators::{self, FvOptions};
use serde_json::json;

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let fv = cfg
        .fv
        .as_ref()
        .ok_or_else(|| CliError::Config("an [fv] section is required for this command".into()))?;
    let x0 = config::require_x0(cfg)?;
    let chain = Ar1::new(cfg.chain.a, cfg.chain.model).map_err(errors::from_chain)?;
    // A nonzero barrier is folded into the innovations when the family
    // is closed under shifts; the particle system then runs at zero.
    let (chain, x0) = if cfg.chain.barrier != 0.0 {
        let shifted = chain.shifted_to_zero_barrier(cfg.chain.barrier).ok_or_else(|| {
            CliError::Domain(format!(
                "this innovation family cannot absorb a barrier shift of {}; \
                 run mc, which kills at the barrier directly",
                cfg.chain.barrier
            ))
        })?;
        (shifted, x0 - cfg.chain.barrier)
    } else {
        (chain, x0)
    };

    let opts = FvOptions {
        n_particles: fv.n_particles,
        steps: fv.steps,
        burn_in: fv.burn_in,
    };
    let est = estimators::fleming_viot(&chain, x0, opts, ctx.seed).map_err(errors::from_estimator)?;

    let mut csv = ctx.repro.csv_preamble();
    csv.push_str("step,survive_fraction\n");
    for (i, f) in est.fractions.iter().enumerate() {
        csv.push_str(&format!("{},{f}\n", i + 1));
    }
    report::write_text(&ctx.out.join("fv_trace.csv"), &csv)?;

    let body = json!({
        "lambda": est.lambda,
        "n_particles": est.n_particles,
        "steps": fv.steps,
        "burn_in": est.burn_in,
    });
    report::write_json(&ctx.out.join("fv.json"), body, &ctx.repro)
}
