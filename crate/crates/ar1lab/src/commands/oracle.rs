//! Oracle command: print the closed-form reference values that apply
//! to the configured model, for scripting cross-checks. Two-sided
//! exponential innovations have an exact rate through the infinite
//! product; Gaussian ones embed into an Ornstein-Uhlenbeck process;
//! power tails have the slow-variation rate. The exactly solvable
//! two-state fixture is always included.

use crate::errors::{self, CliError};
use crate::report;
use crate::Context;
use ar1persist::innovations::InnovationModel;
use ar1persist::oracles;
use serde_json::{json, Value};

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let a = cfg.chain.a;
    let mut anchors: Vec<Value> = Vec::new();
    match cfg.chain.model {
        InnovationModel::Laplace { .. } => {
            let anchor = oracles::laplace_rate(a).map_err(errors::from_oracle)?;
            anchors.push(json!({
                "kind": "laplace_product_root",
                "s_star": anchor.s_star,
                "lambda": anchor.lambda,
                "note": "the decay rate does not depend on the innovation scale",
            }));
        }
        InnovationModel::Gaussian { .. } => {
            let ou = oracles::ou_embedding(a).map_err(errors::from_oracle)?;
            anchors.push(json!({
                "kind": "ou_embedding",
                "theta": ou.theta,
                "sigma_sq": ou.sigma_sq,
                "note": "continuous process whose unit-time skeleton is the chain, \
                         for unit-variance innovations",
            }));
        }
        InnovationModel::TwoSidedPareto { tail_index, .. } => {
            let lambda =
                oracles::regularly_varying_rate(tail_index, a).map_err(errors::from_oracle)?;
            anchors.push(json!({
                "kind": "regularly_varying_rate",
                "tail_index": tail_index,
                "lambda": lambda,
                "note": "limit rate for a regularly varying right tail; grid pipelines \
                         refuse this family because every truncation lies",
            }));
        }
        InnovationModel::Uniform { .. } => {}
    }

    let body = json!({
        "anchors": anchors,
        "fixture_two_state": {
            "rho": 0.6,
            "lambda": (5.0f64 / 3.0).ln(),
            "note": "two-state killed chain used as the exactly solvable end-to-end fixture",
        },
    });
    report::write_json(&ctx.out.join("oracle.json"), body, &ctx.repro)
}
