//! Eigen pipeline command: assemble the killed kernel from the
//! config, extract the leading eigentriple, and emit
//! `eigentriple.csv` (node, quasi-stationary mass and density,
//! harmonic value), `scalars.json`, a coarsening `trace.csv`, and
//! optionally the reusable kernel container `blocks.bin`.

use crate::config;
use crate::errors::{self, CliError};
use crate::report;
use crate::Context;
use ar1persist::grid::Grid;
use ar1persist::kernel::KilledKernel;
use ar1persist::spectral::{self, SpectralOptions};
use serde_json::json;

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    config::require_zero_barrier(cfg)?;
    let g = config::require_grid(cfg)?;
    let spec = cfg.spectral.clone().unwrap_or_default();
    let opts = SpectralOptions {
        tol: spec.tol,
        max_iter: spec.max_iter,
        estimate_gap: spec.estimate_gap,
    };

    let grid = Grid::uniform(g.cap, g.n, g.r).map_err(|e| CliError::Config(e.to_string()))?;
    let kernel =
        KilledKernel::assemble_with_policy(&cfg.chain.model, cfg.chain.a, &grid, g.scheme, g.policy)
            .map_err(errors::from_kernel)?;
    let sol = spectral::solve(&kernel, opts).map_err(errors::from_spectral)?;

    let mut csv = ctx.repro.csv_preamble();
    csv.push_str("node,qsd_mass,qsd_density,harmonic\n");
    for (i, &x) in sol.nodes().iter().enumerate() {
        csv.push_str(&format!(
            "{x},{},{},{}\n",
            sol.qsd_masses()[i],
            sol.qsd_density(i),
            sol.harmonic()[i]
        ));
    }
    report::write_text(&ctx.out.join("eigentriple.csv"), &csv)?;

    if spec.trace {
        // Eigenvalue under grid coarsening: halve and quarter the
        // resolution where the split level stays on a cell edge, so
        // refinement convergence is visible from one run.
        let mut rows = Vec::new();
        for k in [2u32, 1] {
            let m = g.n >> k;
            if m < 16 {
                continue;
            }
            let Ok(coarse) = Grid::uniform(g.cap, m, g.r) else {
                continue;
            };
            let Ok(ck) = KilledKernel::assemble_with_policy(
                &cfg.chain.model,
                cfg.chain.a,
                &coarse,
                g.scheme,
                g.policy,
            ) else {
                continue;
            };
            let Ok(cs) = spectral::solve(&ck, SpectralOptions { estimate_gap: false, ..opts })
            else {
                continue;
            };
            rows.push((m, cs.rho(), cs.lambda()));
        }
        rows.push((g.n, sol.rho(), sol.lambda()));
        let mut csv = ctx.repro.csv_preamble();
        csv.push_str("n,cap,rho,lambda\n");
        for (m, rho, lambda) in rows {
            csv.push_str(&format!("{m},{},{rho},{lambda}\n", g.cap));
        }
        report::write_text(&ctx.out.join("trace.csv"), &csv)?;
    }

    if spec.emit_blocks {
        kernel
            .export_blocks(ctx.out.join("blocks.bin"))
            .map_err(errors::from_block_io)?;
    }

    let scalars = json!({
        "rho": sol.rho(),
        "lambda": sol.lambda(),
        "residual": sol.residual(),
        "iterations": sol.iterations(),
        "gap_ratio": sol.gap_ratio(),
        "mass_defect": kernel.mass_defect(),
        "overflow_max": kernel.overflow().amax(),
        "grid": { "cap": g.cap, "n": g.n, "r": g.r, "scheme": g.scheme, "policy": g.policy },
    });
    report::write_json(&ctx.out.join("scalars.json"), scalars, &ctx.repro)
}
