use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use biharmonic_core::bitension::{self, BiharmonicReport, BiharmonicVerdict};
use biharmonic_core::classify::{self, ClassificationVerdict, Verdict};
use biharmonic_core::constructors::{self, RandomLegendreParams, DEFAULT_CURVE_LENGTH};
use biharmonic_core::curves::{self, ParamCurve};
use biharmonic_core::models::{ModelDescriptor, SpaceFormModel};
use biharmonic_core::tolerances::Tolerances;
use clap::ValueEnum;
use nalgebra::DVector;
use serde::Serialize;

use crate::cli::{CurveArgs, Expect, Family};
use crate::error::CliError;
use crate::output;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Generate,
    Verify,
    Classify,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Generate => "curve generate",
            Mode::Verify => "curve verify",
            Mode::Classify => "curve classify",
        }
    }
}

#[derive(Serialize)]
struct CurveConfig {
    command: &'static str,
    family: Option<String>,
    input: Option<String>,
    model: ModelDescriptor,
    n: usize,
    c: Option<f64>,
    kappa1: Option<f64>,
    sign: i8,
    sigma: i8,
    length: f64,
    seed: u64,
    tolerances: Tolerances,
    expect: Option<String>,
}

#[derive(Serialize)]
struct CurveInfo {
    domain: (f64, f64),
    samples: usize,
    spacing: f64,
    legendre_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    random_params: Option<RandomLegendreParams>,
}

#[derive(Serialize)]
struct Expectation {
    expected: String,
    observed: String,
    met: bool,
}

#[derive(Serialize)]
struct CurveEnvelope {
    config: CurveConfig,
    curve: CurveInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<BiharmonicReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<ClassificationVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expectation: Option<Expectation>,
}

fn kebab<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn need(v: Option<f64>, flag: &str, family: Family) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("family {} needs --{flag}", kebab(&family))))
}

fn unit_sign(v: i8, flag: &str) -> Result<i8, CliError> {
    if v == 1 || v == -1 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{flag} must be 1 or -1, got {v}")))
    }
}

fn build_family(args: &CurveArgs, family: Family, length: f64) -> Result<(ParamCurve, Option<RandomLegendreParams>), CliError> {
    let n = args.n;
    let c = || need(args.c, "c", family);
    let k1 = || need(args.kappa1, "kappa1", family);
    let curve = match family {
        Family::Theorem6Circle => constructors::circle_curve(n)?,
        Family::Theorem6Helix => match args.length {
            Some(l) => constructors::helix_curve_with_length(n, k1()?, l)?,
            None => constructors::helix_curve(n, k1()?)?,
        },
        Family::SmallCircle => constructors::small_circle_curve(n, k1()?)?,
        Family::Geodesic => constructors::legendre_geodesic(n)?,
        Family::Case2Circle => constructors::case2_circle_curve(c()?, n, length)?,
        Family::Case2Helix => constructors::case2_helix_curve(c()?, n, k1()?, length)?,
        Family::Case3 => {
            let c = c()?;
            let k = match args.kappa1 {
                Some(k) => k,
                None if c > 1.0 => (c - 1.0).sqrt(),
                None => return Err(CliError::Usage("case3 needs --kappa1 when c <= 1".into())),
            };
            constructors::case3_curve(c, n, k, unit_sign(args.sigma, "sigma")?, length)?
        }
        Family::Order4 => constructors::order4_curve(c()?, n, unit_sign(args.sign, "sign")?, length)?,
        Family::Random => {
            let m = SpaceFormModel::for_c(args.c.unwrap_or(1.0), n)?;
            let (curve, params) = constructors::random_legendre_curve(&m, args.seed, length)?;
            return Ok((curve, Some(params)));
        }
        Family::XiOrbit => constructors::xi_orbit(&SpaceFormModel::for_c(args.c.unwrap_or(1.0), n)?, length)?,
    };
    Ok((curve, None))
}

/// Loads `s,x0,x1,...` rows on a uniform grid.
fn load_curve(path: &Path, args: &CurveArgs) -> Result<ParamCurve, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut s = Vec::new();
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.starts_with('s') {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Usage(format!("{} line {}: {e}", path.display(), i + 1)))?;
        if vals.len() < 2 {
            return Err(CliError::Usage(format!("{} line {}: too few columns", path.display(), i + 1)));
        }
        s.push(vals[0]);
        points.push(DVector::from_vec(vals[1..].to_vec()));
    }
    if s.len() < 2 {
        return Err(CliError::Usage(format!("{}: need at least two samples", path.display())));
    }
    let h = (s[s.len() - 1] - s[0]) / (s.len() - 1) as f64;
    if !(h > 0.0) || s.iter().enumerate().any(|(k, v)| (v - (s[0] + k as f64 * h)).abs() > 1e-9 * (1.0 + v.abs())) {
        return Err(CliError::Usage(format!("{}: samples are not uniformly spaced", path.display())));
    }
    let coords = points[0].len();
    let model = match (&args.model, args.c) {
        (Some(json), _) => {
            let d: ModelDescriptor =
                serde_json::from_str(json).map_err(|e| CliError::Usage(format!("model descriptor: {e}")))?;
            SpaceFormModel::from_descriptor(&d).map_err(|e| CliError::Usage(e.to_string()))?
        }
        // Sphere carriers have 2n+2 coordinates, the flat model 2n+1.
        (None, Some(c)) if coords % 2 == 0 && (c + 3.0).abs() > 1e-14 => SpaceFormModel::for_c(c, coords / 2 - 1)?,
        (None, Some(c)) if coords % 2 == 1 && (c + 3.0).abs() < 1e-14 => SpaceFormModel::flat((coords - 1) / 2)?,
        (None, Some(c)) => {
            return Err(CliError::Usage(format!("{coords} coordinates do not fit a model with c = {c}")))
        }
        (None, None) => return Err(CliError::Usage("--input needs --model or --c".into())),
    };
    if coords != model.ambient_dim() {
        return Err(CliError::Usage(format!("{coords} coordinates but {} expects {}", model.name(), model.ambient_dim())));
    }
    Ok(ParamCurve::from_samples(model, s[0], h, points)?)
}

fn write_curve_csv(path: &Path, curve: &ParamCurve) -> Result<(), CliError> {
    let samples = curve.samples();
    let mut out = String::from("s");
    for i in 0..curve.model().ambient_dim() {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for (k, p) in samples.points.iter().enumerate() {
        let _ = write!(out, "{}", samples.s(k));
        for v in p.iter() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    output::write_bytes(path, out.as_bytes())
}

fn bitension_matches(e: Expect, v: BiharmonicVerdict) -> Result<bool, CliError> {
    Ok(match e {
        Expect::ProperBiharmonic => v == BiharmonicVerdict::ProperBiharmonic,
        Expect::NotProperBiharmonic => v != BiharmonicVerdict::ProperBiharmonic,
        Expect::NotBiharmonic => v == BiharmonicVerdict::NotBiharmonic,
        Expect::Harmonic | Expect::GeodesicOnly => v == BiharmonicVerdict::Harmonic,
        Expect::Indeterminate => v == BiharmonicVerdict::Indeterminate,
    })
}

fn classification_matches(e: Expect, v: Verdict) -> Result<bool, CliError> {
    Ok(match e {
        Expect::ProperBiharmonic => v == Verdict::ProperBiharmonic,
        Expect::NotProperBiharmonic | Expect::NotBiharmonic => v != Verdict::ProperBiharmonic,
        Expect::GeodesicOnly => v == Verdict::GeodesicOnly,
        Expect::Harmonic | Expect::Indeterminate => {
            return Err(CliError::Usage(format!("--expect {} is not a classification verdict", kebab(&e))))
        }
    })
}

pub fn run(mode: Mode, args: &CurveArgs, tol: Tolerances) -> Result<bool, CliError> {
    if mode == Mode::Generate && args.family.is_none() {
        return Err(CliError::Usage("curve generate needs --family".into()));
    }
    let length = args.length.unwrap_or(DEFAULT_CURVE_LENGTH);
    if !(length > 0.0) {
        return Err(CliError::Usage("--length must be positive".into()));
    }
    let (curve, random_params) = match (args.family, &args.input) {
        (Some(f), _) => build_family(args, f, length)?,
        (None, Some(path)) => (load_curve(path, args)?, None),
        (None, None) => return Err(CliError::Usage("need --family or --input".into())),
    };
    let m = *curve.model();
    let legendre = curves::legendre_residual(&curve)?;

    let mut report = None;
    let mut classification = None;
    let observed;
    let mut met = true;
    if mode != Mode::Classify {
        let a = bitension::analyze(&curve, tol)?;
        if mode == Mode::Generate {
            classification = Some(classify::classify_frenet(m.c(), &a.frenet, tol.bitension_for(&m)));
        }
        if let Some(e) = args.expect {
            met = bitension_matches(e, a.report.verdict)?;
        }
        observed = format!("{:?}", a.report.verdict);
        report = Some(a.report);
    } else {
        if legendre > tol.legendre_gate {
            return Err(biharmonic_core::Error::NonLegendre { residual: legendre }.into());
        }
        let fd = curves::frenet(&curve, tol.tol_order)?;
        let cls = classify::classify_frenet(m.c(), &fd, tol.bitension_for(&m));
        if let Some(e) = args.expect {
            met = classification_matches(e, cls.verdict)?;
        }
        observed = format!("{:?}", cls.verdict);
        classification = Some(cls);
    }

    if !output::json_on_stdout(args.json.as_deref()) {
        println!("{} on {} (c = {}), {} samples, legendre residual {:.2e}", mode.name(), m.name(), m.c(), curve.sample_count(), legendre);
        if let Some(r) = &report {
            println!(
                "  order {}  tension {:.3e}  bitension direct {:.3e}  frenet {:.3e}  gap {:.3e}  tol {:.0e}",
                r.order, r.tension_norm_max, r.bitension_direct_max, r.bitension_frenet_max, r.evaluator_gap_max, r.tolerance
            );
            println!("  verdict: {:?}", r.verdict);
            for w in &r.warnings {
                println!("  warning: {w}");
            }
        }
        if let Some(cls) = &classification {
            for line in cls.to_string().lines() {
                println!("  {line}");
            }
        }
        if let Some(e) = args.expect {
            println!("  expect {}: {}", kebab(&e), if met { "met" } else { "NOT met" });
        }
    }

    if let Some(path) = &args.curve_csv {
        write_curve_csv(path, &curve)?;
    }
    if let (Some(path), Some(r)) = (&args.csv, &report) {
        let mut buf = Vec::new();
        r.write_csv(&mut buf)?;
        output::write_bytes(path, &buf)?;
    }
    if let Some(path) = &args.json {
        let env = CurveEnvelope {
            config: CurveConfig {
                command: mode.name(),
                family: args.family.as_ref().map(kebab),
                input: args.input.as_ref().map(|p| p.display().to_string()),
                model: m.descriptor(),
                n: args.n,
                c: args.c,
                kappa1: args.kappa1,
                sign: args.sign,
                sigma: args.sigma,
                length,
                seed: args.seed,
                tolerances: tol,
                expect: args.expect.as_ref().map(kebab),
            },
            curve: CurveInfo {
                domain: curve.domain(),
                samples: curve.sample_count(),
                spacing: curve.spacing(),
                legendre_residual: legendre,
                random_params,
            },
            report,
            classification,
            expectation: args.expect.map(|e| Expectation { expected: kebab(&e), observed, met }),
        };
        output::write_json(path, &env)?;
    }
    Ok(met)
}
