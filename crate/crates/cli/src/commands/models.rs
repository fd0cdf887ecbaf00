use biharmonic_core::axioms;
use biharmonic_core::models::{ModelDescriptor, SpaceFormModel};
use serde::Serialize;

use crate::cli::{ModelArgs, ModelKindArg, ValidateArgs};
use crate::error::CliError;
use crate::output;

#[derive(Serialize)]
struct ValidateConfig<'a> {
    command: &'static str,
    model: &'a ModelDescriptor,
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct ValidateEnvelope<'a> {
    config: ValidateConfig<'a>,
    report: &'a axioms::AxiomReport,
}

/// Resolves `--model` JSON or `--kind/--a`; any failure is a usage error.
pub fn resolve_model(args: &ModelArgs, n: usize) -> Result<SpaceFormModel, CliError> {
    let usage = |e: biharmonic_core::Error| CliError::Usage(e.to_string());
    if let Some(json) = &args.model {
        let d: ModelDescriptor =
            serde_json::from_str(json).map_err(|e| CliError::Usage(format!("model descriptor: {e}")))?;
        return SpaceFormModel::from_descriptor(&d).map_err(usage);
    }
    match (args.kind.unwrap_or(ModelKindArg::UnitSphere), args.a) {
        (ModelKindArg::DeformedSphere, Some(a)) => SpaceFormModel::deformed_sphere(a, n).map_err(usage),
        (ModelKindArg::DeformedSphere, None) => Err(CliError::Usage("deformed-sphere needs --a".into())),
        (_, Some(_)) => Err(CliError::Usage("--a only applies to deformed-sphere".into())),
        (ModelKindArg::UnitSphere, None) => SpaceFormModel::unit_sphere(n).map_err(usage),
        (ModelKindArg::Flat, None) => SpaceFormModel::flat(n).map_err(usage),
    }
}

pub fn validate(args: &ValidateArgs) -> Result<bool, CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let m = resolve_model(&args.model, args.n)?;
    let report = axioms::validate_model(&m, args.samples, args.seed);
    if !output::json_on_stdout(args.json.as_deref()) {
        println!("{} (c = {}): {}", m.name(), m.c(), if report.passed { "pass" } else { "FAIL" });
        for c in &report.checks {
            println!(
                "  {:<28} max {:.3e}  tol {:.0e}  {}",
                c.name,
                c.max_residual,
                c.tolerance,
                if c.passed { "ok" } else { "FAIL" }
            );
        }
    }
    if let Some(path) = &args.json {
        let d = m.descriptor();
        let env = ValidateEnvelope {
            config: ValidateConfig { command: "models validate", model: &d, samples: args.samples, seed: args.seed },
            report: &report,
        };
        output::write_json(path, &env)?;
    }
    Ok(report.passed)
}
