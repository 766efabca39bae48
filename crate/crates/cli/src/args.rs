use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use minklab::grid::DEFAULT_CELL_CAP;
use minklab::rational::{self, Rational};

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).ok_or_else(|| format!("not a rational: {s:?} (use \"n\" or \"n/d\")"))
}

fn parse_positive_rational(s: &str) -> Result<Rational, String> {
    let q = parse_rational(s)?;
    if q <= Rational::from_integer(0.into()) {
        return Err(format!("{s} must be positive"));
    }
    Ok(q)
}

#[derive(Debug, Parser)]
#[command(name = "minklab", version, about = "Certified bounds for volumes of k-fold Minkowski sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Audit the monotonicity of vol(A[k]/k) for a set spec.
    Audit(AuditArgs),
    /// Exact vol(B[k]/k) = binom(k,d)/k^d for the axis spider, with C(d,k).
    SimplexExact(SimplexArgs),
    /// Grid check of the layer inequality on random sandwiched sets.
    Lemma2(Lemma2Args),
    /// Check A+A = A+dA = dA+dA on a raster.
    Boundary(BoundaryArgs),
    /// Audit a planar set with convex bites, with the per-bite inequality.
    Holes(AuditArgs),
    /// Hausdorff distance of A[k]/k to conv A along a list of k.
    Hausdorff(HausdorffArgs),
    /// Exact counterexamples.
    #[command(subcommand)]
    Counterexample(Counterexample),
    /// Sweep the three-set family over parameter lists.
    Sweep(SweepArgs),
    /// Re-check a saved audit report against an expectation.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Report document path; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Set-spec JSON file.
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub kmax: u64,
    /// First grid spacing; 1/64 in the plane and 1/16 in space by default.
    #[arg(long, value_parser = parse_positive_rational)]
    pub res: Option<Rational>,
    /// Number of halvings after the first spacing.
    #[arg(long, default_value_t = 4)]
    pub refine: u32,
    /// Tolerance of the floating support tests.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Largest grid, in cells.
    #[arg(long, default_value_t = DEFAULT_CELL_CAP)]
    pub cap: u64,
    /// Flat CSV of the entries.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Exit with status 2 if any step is a certified violation.
    #[arg(long)]
    pub expect_monotone: bool,
    /// Skip the Hausdorff measurements.
    #[arg(long)]
    pub no_hausdorff: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimplexArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub kmax: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Lemma2Args {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub k: u64,
    /// Cells per unit length.
    #[arg(long, default_value_t = 8)]
    pub cells: u64,
    /// Random sandwiches besides the two extreme ones.
    #[arg(long, default_value_t = 10)]
    pub trials: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Shape {
    Disc,
    Square,
    Annulus,
    /// A disc and one far cell: a disconnected boundary.
    DiscPoint,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long, value_enum)]
    pub shape: Shape,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, value_parser = parse_positive_rational, default_value = "1/128")]
    pub res: Rational,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct HausdorffArgs {
    #[arg(long)]
    pub set: PathBuf,
    /// Comma-separated k values.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    pub ks: Vec<u64>,
    #[arg(long, value_parser = parse_positive_rational)]
    pub res: Option<Rational>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_CELL_CAP)]
    pub cap: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum Counterexample {
    /// The gap of the three-set inequality; negative refutes it.
    Gap(GapArgs),
    /// Measure vol(K n C) with C = [-1/d, 1/d]^d on the axis spider.
    MeasureCube(CubeArgs),
    /// Measure vol(K n E) for the ellipse through the staircase corners.
    MeasureEllipse(EllipseArgs),
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long, value_parser = parse_rational)]
    pub a: Rational,
    #[arg(long, value_parser = parse_rational)]
    pub b: Rational,
    #[arg(long, default_value_t = 4)]
    pub d1: usize,
    #[arg(long, default_value_t = 3)]
    pub d2: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CubeArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EllipseArgs {
    #[arg(long, default_value_t = 2)]
    pub k: u64,
    /// Columns of the grid evaluation.
    #[arg(long, default_value_t = 2048)]
    pub resolution: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_rational, default_value = "1,2,3,4")]
    pub a: Vec<Rational>,
    #[arg(long, value_delimiter = ',', value_parser = parse_rational, default_value = "1,2,4,6")]
    pub b: Vec<Rational>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub d1: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub d2: Vec<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// A report written by `audit` or `holes`.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub expect_monotone: bool,
}
