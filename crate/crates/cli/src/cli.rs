use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "biharm", version, about = "Construct and verify proper-biharmonic Legendre curves and Hopf cylinders")]
pub struct Cli {
    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(flatten)]
    pub tolerances: TolArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Tolerance overrides; each also reads an environment variable.
#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    /// Verdict threshold for the unit sphere and the flat model.
    #[arg(long, global = true, env = "BIHARM_TOL_CLOSED_FORM")]
    pub tol_closed_form: Option<f64>,
    /// Verdict threshold for deformed spheres.
    #[arg(long, global = true, env = "BIHARM_TOL_DEFORMED")]
    pub tol_deformed: Option<f64>,
    /// Osculating-order detection threshold.
    #[arg(long, global = true, env = "BIHARM_TOL_ORDER")]
    pub tol_order: Option<f64>,
    /// Maximum |eta(T)| accepted as Legendre.
    #[arg(long, global = true, env = "BIHARM_LEGENDRE_GATE")]
    pub legendre_gate: Option<f64>,
    /// Standard deviation below which a torsion counts as constant.
    #[arg(long, global = true, env = "BIHARM_TOL_CONSTANT_TORSION")]
    pub tol_constant_torsion: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sasakian space-form models.
    #[command(subcommand)]
    Models(ModelsCommand),
    /// Legendre curves: build, verify, classify.
    #[command(subcommand)]
    Curve(CurveCommand),
    /// Hopf cylinders over Takagi hypersurfaces.
    #[command(subcommand)]
    Hopf(HopfCommand),
}

#[derive(Debug, Subcommand)]
pub enum ModelsCommand {
    /// Run the structure-axiom suite on random samples.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model descriptor as JSON, e.g. '{"kind":"DeformedSphere","a":2,"n":2}'.
    #[arg(long, conflicts_with_all = ["kind", "a"])]
    pub model: Option<String>,
    #[arg(long, value_enum)]
    pub kind: Option<ModelKindArg>,
    /// Deformation parameter of a deformed sphere.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKindArg {
    UnitSphere,
    DeformedSphere,
    Flat,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here (`-` for stdout).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CurveCommand {
    /// Build a catalog curve, write its samples and verify it.
    Generate(CurveArgs),
    /// Bitension report for a catalog curve or a curve CSV.
    Verify(CurveArgs),
    /// Frenet invariants and case classification.
    Classify(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Great circle of the unit sphere with kappa1 = 1.
    Theorem6Circle,
    /// Helix of the unit sphere with kappa1^2 + kappa2^2 = 1.
    Theorem6Helix,
    /// Totally real small circle of curvature kappa1 in the unit sphere.
    SmallCircle,
    Geodesic,
    /// Circle with kappa1^2 = (c+3)/4 and E2 orthogonal to phi T.
    Case2Circle,
    /// Helix with kappa1^2 + kappa2^2 = (c+3)/4 (n >= 3).
    Case2Helix,
    /// Helix with frame {T, sigma phi T, sigma xi}.
    Case3,
    /// Osculating order 4, c in (7/3, 5).
    Order4,
    /// Random Legendre curve from the seeded ODE generator.
    Random,
    /// Integral curve of xi (not Legendre).
    XiOrbit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    ProperBiharmonic,
    NotProperBiharmonic,
    NotBiharmonic,
    Harmonic,
    Indeterminate,
    GeodesicOnly,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum, required_unless_present = "input")]
    pub family: Option<Family>,
    /// Curve samples CSV (`s,x0,x1,...`) to load instead of a family.
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Constant phi-sectional curvature of the ambient model.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Model descriptor JSON, used with --input.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub kappa1: Option<f64>,
    /// Branch of the order-4 profile (+1 or -1).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sign: i8,
    /// Orientation of the case III frame (+1 or -1).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma: i8,
    /// Arc length of ODE-generated curves.
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
    /// Full JSON envelope (`-` for stdout).
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Per-sample tension and bitension table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Curve samples (`s,x0,x1,...`).
    #[arg(long)]
    pub curve_csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum HopfCommand {
    /// Roots of the biharmonic condition in tan^2 u.
    Solve(HopfSolveArgs),
    /// Roots over a grid of c values for one or more shapes.
    Scan(HopfScanArgs),
    /// Smallest c with real roots.
    Threshold(HopfShapeArgs),
    /// Three-dimensional criterion kappa_bar^2 = c - 1.
    Hopf3(Hopf3Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TypeArg {
    A1,
    A2,
    B,
    C,
    D,
    E,
}

#[derive(Debug, Clone, Args)]
pub struct HopfShapeArgs {
    #[arg(long = "type", value_enum, ignore_case = true)]
    pub kind: TypeArg,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HopfExpect {
    /// At least one proper-biharmonic root.
    ProperBiharmonic,
    /// No proper-biharmonic root.
    None,
}

#[derive(Debug, Args)]
pub struct HopfSolveArgs {
    #[command(flatten)]
    pub shape: HopfShapeArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, value_enum)]
    pub expect: Option<HopfExpect>,
}

#[derive(Debug, Args)]
pub struct HopfScanArgs {
    /// Shapes as `A1:n` or `A2:p:q`; repeatable.
    #[arg(long = "shape", required = true)]
    pub shapes: Vec<String>,
    #[arg(long, allow_hyphen_values = true, default_value_t = -2.9)]
    pub c_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 8.0)]
    pub c_max: f64,
    #[arg(long, default_value_t = 100)]
    pub c_steps: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Hopf3Args {
    #[arg(long, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long)]
    pub kappa_bar: f64,
    #[arg(long)]
    pub expect: Option<Hopf3Expect>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Hopf3Expect {
    ProperBiharmonic,
    MinimalOnly,
    NotProperBiharmonic,
}
