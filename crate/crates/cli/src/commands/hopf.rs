use biharmonic_core::hopf::{self, Hopf3Verdict, OtherTakagiType, TakagiShape, TakagiType};
use serde::Serialize;

use crate::cli::{Hopf3Args, Hopf3Expect, HopfExpect, HopfScanArgs, HopfShapeArgs, HopfSolveArgs, TypeArg};
use crate::error::CliError;
use crate::output;

fn usage(e: biharmonic_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// `Ok(shape)` for A1/A2, `Err(kind)` for the informational types.
fn resolve(args: &HopfShapeArgs) -> Result<Result<TakagiShape, OtherTakagiType>, CliError> {
    let kind = match args.kind {
        TypeArg::A1 => TakagiType::A1,
        TypeArg::A2 => TakagiType::A2,
        TypeArg::B => return Ok(Err(OtherTakagiType::B)),
        TypeArg::C => return Ok(Err(OtherTakagiType::C)),
        TypeArg::D => return Ok(Err(OtherTakagiType::D)),
        TypeArg::E => return Ok(Err(OtherTakagiType::E)),
    };
    Ok(Ok(TakagiShape::from_parts(kind, args.n, args.p, args.q).map_err(usage)?))
}

/// Parses `A1:n` or `A2:p:q`.
pub fn parse_shape(s: &str) -> Result<TakagiShape, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.parse::<usize>().map_err(|_| CliError::Usage(format!("bad shape {s:?}")));
    match parts.as_slice() {
        [k, n] if k.eq_ignore_ascii_case("a1") => TakagiShape::a1(num(n)?).map_err(usage),
        [k, p, q] if k.eq_ignore_ascii_case("a2") => TakagiShape::a2(num(p)?, num(q)?).map_err(usage),
        _ => Err(CliError::Usage(format!("bad shape {s:?}: expected A1:n or A2:p:q"))),
    }
}

#[derive(Serialize)]
struct Informational {
    kind: String,
    status: &'static str,
}

fn informational(kind: OtherTakagiType, json: Option<&std::path::Path>) -> Result<bool, CliError> {
    let info = Informational { kind: format!("{kind:?}"), status: hopf::other_type_status(kind) };
    if !output::json_on_stdout(json) {
        println!("type {}: {}", info.kind, info.status);
    }
    if let Some(p) = json {
        output::write_json(p, &info)?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct SolveEnvelope<'a> {
    command: &'static str,
    solution: &'a hopf::HopfSolution,
    #[serde(skip_serializing_if = "Option::is_none")]
    expectation_met: Option<bool>,
}

pub fn solve(args: &HopfSolveArgs) -> Result<bool, CliError> {
    let shape = match resolve(&args.shape)? {
        Ok(s) => s,
        Err(other) => return informational(other, args.shape.json.as_deref()),
    };
    if !(args.c > -3.0) {
        return Err(CliError::Usage(format!("--c must exceed -3, got {}", args.c)));
    }
    let sol = hopf::solve_biharmonic_u(&shape, args.c)?;
    let proper = sol.proper_roots().count();
    let met = args.expect.map(|e| match e {
        HopfExpect::ProperBiharmonic => proper > 0,
        HopfExpect::None => proper == 0,
    });
    if !output::json_on_stdout(args.shape.json.as_deref()) {
        println!("{shape}, c = {}: discriminant {:.6e}, threshold {:.10}", args.c, sol.discriminant, sol.threshold);
        for r in &sol.roots {
            println!(
                "  root {}: tan^2 u = {:.12}  u = {:.12}  |B|^2 = {:.12}  H = {:.3e}  {}{}",
                r.index,
                r.tan2u,
                r.u,
                r.norm_b_sq,
                r.mean_curvature,
                r.verdict,
                r.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
            );
        }
        for n in &sol.notes {
            println!("  note: {n}");
        }
        if let Some(m) = met {
            println!("  expectation {}", if m { "met" } else { "NOT met" });
        }
    }
    if let Some(p) = &args.shape.json {
        output::write_json(p, &SolveEnvelope { command: "hopf solve", solution: &sol, expectation_met: met })?;
    }
    Ok(met.unwrap_or(true))
}

#[derive(Serialize)]
struct ThresholdReport {
    shape: TakagiShape,
    threshold: f64,
    discriminant_at_threshold: f64,
    non_existence_bound: f64,
}

pub fn threshold(args: &HopfShapeArgs) -> Result<bool, CliError> {
    let shape = match resolve(args)? {
        Ok(s) => s,
        Err(other) => return informational(other, args.json.as_deref()),
    };
    let c = hopf::existence_threshold(&shape);
    let rep = ThresholdReport {
        shape,
        threshold: c,
        discriminant_at_threshold: shape.discriminant(c),
        non_existence_bound: hopf::non_existence_bound(shape.n),
    };
    if !output::json_on_stdout(args.json.as_deref()) {
        println!("{shape}: c_min = {c:.12} (discriminant there {:.1e})", rep.discriminant_at_threshold);
    }
    if let Some(p) = &args.json {
        output::write_json(p, &rep)?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct ScanEnvelope<'a> {
    command: &'static str,
    c_steps: usize,
    summary: &'a hopf::ScanSummary,
}

pub fn scan(args: &HopfScanArgs) -> Result<bool, CliError> {
    let shapes: Vec<TakagiShape> = args.shapes.iter().map(|s| parse_shape(s)).collect::<Result<_, _>>()?;
    if args.c_steps < 2 || !(args.c_max > args.c_min) || !(args.c_min > -3.0) {
        return Err(CliError::Usage("need -3 < c-min < c-max and c-steps >= 2".into()));
    }
    let cs: Vec<f64> = (0..args.c_steps)
        .map(|k| args.c_min + (args.c_max - args.c_min) * k as f64 / (args.c_steps - 1) as f64)
        .collect();
    let (rows, summary) = hopf::scan(&shapes, &cs)?;
    if !output::json_on_stdout(args.json.as_deref()) {
        println!(
            "{} grid points, {} with roots: {} proper-biharmonic, {} minimal; max CMC residual {:.1e}",
            summary.points, summary.points_with_roots, summary.proper_roots, summary.minimal_roots, summary.max_cmc_residual
        );
    }
    if let Some(p) = &args.csv {
        let mut buf = Vec::new();
        hopf::write_scan_csv(&rows, &mut buf)?;
        output::write_bytes(p, &buf)?;
    }
    if let Some(p) = &args.json {
        output::write_json(p, &ScanEnvelope { command: "hopf scan", c_steps: args.c_steps, summary: &summary })?;
    }
    Ok(true)
}

pub fn hopf3(args: &Hopf3Args) -> Result<bool, CliError> {
    let r = hopf::hopf3_criterion(args.c, args.kappa_bar);
    println!("c = {}, kappa_bar = {}: {:?} (|kappa_bar^2 - (c-1)| = {:.3e})", args.c, args.kappa_bar, r.verdict, r.residual);
    Ok(match args.expect {
        None => true,
        Some(Hopf3Expect::ProperBiharmonic) => r.verdict == Hopf3Verdict::ProperBiharmonic,
        Some(Hopf3Expect::MinimalOnly) => r.verdict == Hopf3Verdict::MinimalOnly,
        Some(Hopf3Expect::NotProperBiharmonic) => r.verdict == Hopf3Verdict::NotProperBiharmonic,
    })
}
