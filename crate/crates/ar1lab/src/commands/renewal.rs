//! Excursion pipeline command: build the split-level system (from
//! the config, or from a kernel container exported earlier), emit a
//! diagnostic sweep of the return-operator radius across candidate
//! rates (`trace.csv`: `lambda,rho_K,valid_A,valid_B`), then locate
//! the rate root and write it to `root.json`. The sweep is written
//! before the root search, so a refusal still leaves the diagnostics
//! behind.

use crate::config;
use crate::errors::{self, CliError};
use crate::report;
use crate::Context;
use ar1persist::grid::Grid;
use ar1persist::kernel::KilledKernel;
use ar1persist::linalg;
use ar1persist::renewal::RenewalSystem;
use serde_json::json;

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let ren = cfg.renewal.clone().unwrap_or_default();

    let (kernel, source) = match &ren.blocks_path {
        Some(path) => (
            KilledKernel::import_blocks(path).map_err(errors::from_block_io)?,
            "container",
        ),
        None => {
            config::require_zero_barrier(cfg)?;
            let g = config::require_grid(cfg)?;
            let grid =
                Grid::uniform(g.cap, g.n, g.r).map_err(|e| CliError::Config(e.to_string()))?;
            let kernel = KilledKernel::assemble_with_policy(
                &cfg.chain.model,
                cfg.chain.a,
                &grid,
                g.scheme,
                g.policy,
            )
            .map_err(errors::from_kernel)?;
            (kernel, "assembled")
        }
    };

    let sys = RenewalSystem::from_kernel(&kernel).map_err(errors::from_renewal)?;
    let conservation = sys.conservation_defect().map_err(errors::from_renewal)?;

    // Diagnostic sweep: how the return-operator radius moves with the
    // candidate rate, and where the two validity domains end.
    let lambda_hi = sys.z_max().ln() * (1.0 - 1e-9);
    let points = ren.sweep_points;
    let mut csv = ctx.repro.csv_preamble();
    csv.push_str("lambda,rho_K,valid_A,valid_B\n");
    for i in 0..points {
        let lambda = lambda_hi * i as f64 / (points - 1) as f64;
        let z = lambda.exp();
        let valid_a = z * sys.rho_aa() < 1.0;
        let valid_b = z * sys.rho_bb() < sys.margin();
        let rho_k = if valid_a && valid_b {
            sys.excursion_at(z)
                .ok()
                .and_then(|exc| linalg::power_radius(&exc.k, 1e-10, 50_000).ok())
        } else {
            None
        };
        let rho_txt = match rho_k {
            Some(r) => format!("{r}"),
            None => "nan".into(),
        };
        csv.push_str(&format!(
            "{lambda},{rho_txt},{},{}\n",
            valid_a as u8, valid_b as u8
        ));
    }
    report::write_text(&ctx.out.join("trace.csv"), &csv)?;

    let root = sys.find_rate(ren.tol).map_err(errors::from_renewal)?;
    let body = json!({
        "lambda": root.lambda,
        "z": root.z,
        "rho_k": root.rho_k,
        "evaluations": root.evaluations,
        "truncation_suspect": root.truncation_suspect,
        "conservation_defect": conservation,
        "rho_aa": sys.rho_aa(),
        "rho_bb": sys.rho_bb(),
        "z_max": sys.z_max(),
        "margin": sys.margin(),
        "kernel_source": source,
        "grid": {
            "cap": kernel.grid().cap(),
            "n": kernel.grid().n(),
            "r": kernel.grid().r(),
            "scheme": kernel.scheme(),
            "policy": kernel.policy(),
        },
    });
    report::write_json(&ctx.out.join("root.json"), body, &ctx.repro)
}
