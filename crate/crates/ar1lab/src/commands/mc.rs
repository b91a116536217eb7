//! Monte Carlo command: simulate killed paths from the configured
//! start point, write the survival curve with Wilson 95% bands
//! (`survival.csv`), and fit the decay rate on the configured window
//! (`slope.json`). A chain whose innovations never go negative is
//! reported as such: the curve sits at one and no slope is fitted.

use crate::config;
use crate::errors::{self, CliError};
use crate::report;
use crate::Context;
use ar1persist::chain::{self, Ar1};
use ar1persist::estimators;
use ar1persist::stats::{wilson_interval, Z_95};
use serde_json::json;

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let mc = cfg
        .mc
        .as_ref()
        .ok_or_else(|| CliError::Config("an [mc] section is required for this command".into()))?;
    let x0 = config::require_x0(cfg)?;
    let chain = Ar1::new(cfg.chain.a, cfg.chain.model).map_err(errors::from_chain)?;
    let curve = chain::survival_curve_at_barrier(
        &chain,
        x0,
        cfg.chain.barrier,
        mc.n_max,
        mc.n_paths,
        ctx.seed,
    )
    .map_err(errors::from_chain)?;

    let mut csv = ctx.repro.csv_preamble();
    csv.push_str("n,survivors,p_hat,wilson_lo,wilson_hi\n");
    for (n, &c) in curve.counts.iter().enumerate() {
        let (lo, hi) = wilson_interval(c, curve.n_paths, Z_95);
        csv.push_str(&format!(
            "{n},{c},{},{lo},{hi}\n",
            c as f64 / curve.n_paths as f64
        ));
    }
    report::write_text(&ctx.out.join("survival.csv"), &csv)?;

    let flat = curve.counts.iter().all(|&c| c == curve.n_paths);
    let body = if flat {
        json!({
            "survival_identically_one": true,
            "slope": null,
            "window": [mc.window.0, mc.window.1],
            "n_paths": mc.n_paths,
            "note": "no path died over the horizon; if the innovations cannot go below zero \
                     the decay rate is exactly 0 and there is no slope to fit",
        })
    } else {
        let est = estimators::slope_estimate(&curve, mc.window.0, mc.window.1)
            .map_err(errors::from_estimator)?;
        json!({
            "survival_identically_one": false,
            "slope": {
                "lambda": est.lambda,
                "stderr": est.stderr,
                "n_increments": est.n_increments,
            },
            "window": [mc.window.0, mc.window.1],
            "n_paths": mc.n_paths,
        })
    };
    report::write_json(&ctx.out.join("slope.json"), body, &ctx.repro)
}
