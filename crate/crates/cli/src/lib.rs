//! Command-line front end. [`run`] parses arguments, does the work and
//! returns the process exit code: 0 on success, 1 when a check or
//! verification fails, 2 on bad input or flags.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hermite_core::experiments::polylines_svg;
use hermite_core::io::{points_from_csv, read_sequence, sequence_to_json, write_sequence};
use hermite_core::lemma::{write_grid_dump, SearchParams};
use hermite_core::{
    apply_transform, average, check_admissible, estimate_tangents, order_experiment, refine,
    sample_curve, segment, verify_nonnegativity_threaded, AlphaVariant, Boundary, CurveKind,
    CurveSpec, HMeasure, HermiteError, HermitePair, HermiteSequence, RefineConfig, Scheme,
    SimilarityTransform, Topology,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub mod checks;

#[derive(Parser, Debug)]
#[command(
    name = "hermite",
    version,
    about = "Geometric Hermite refinement toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bézier average of two point–tangent pairs, printed as JSON.
    Average(AverageArgs),
    /// Refine Hermite data read from JSON or CSV.
    Refine(RefineArgs),
    /// Attach estimated tangents to a points CSV.
    EstimateTangents(EstimateArgs),
    /// Verify that D ≥ 0 on its angle domain and write a certificate.
    ValidateLemma(LemmaArgs),
    /// Fit the approximation order of a scheme on a functional curve.
    Order(OrderArgs),
    /// Sample points and tangents from a test curve.
    Sample(SampleArgs),
    /// Run the line, circle and similarity reconstruction checks.
    ReconstructCheck(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Ihb,
    HbLr,
    LinearLr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    EndAngles,
    Lv,
}

impl From<VariantArg> for AlphaVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::EndAngles => AlphaVariant::EndAngles,
            VariantArg::Lv => AlphaVariant::Lv,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Clamp,
    Wrap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TopologyArg {
    Open,
    Closed,
}

impl From<TopologyArg> for Topology {
    fn from(t: TopologyArg) -> Self {
        match t {
            TopologyArg::Open => Topology::Open,
            TopologyArg::Closed => Topology::Closed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Parametric,
    Chordal,
}

#[derive(Args, Debug, Clone)]
pub struct SchemeFlags {
    #[arg(long, value_enum, default_value = "ihb")]
    pub scheme: SchemeArg,
    /// Order of the Lane–Riesenfeld schemes.
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "end-angles")]
    pub variant: VariantArg,
}

impl SchemeFlags {
    fn config(&self, levels: usize) -> RefineConfig {
        let scheme = match self.scheme {
            SchemeArg::Ihb => Scheme::Ihb,
            SchemeArg::HbLr => Scheme::HbLr(self.m),
            SchemeArg::LinearLr => Scheme::LinearLr(self.m),
        };
        RefineConfig {
            variant: self.variant.into(),
            ..RefineConfig::new(scheme, levels)
        }
    }
}

#[derive(Args, Debug)]
pub struct AverageArgs {
    /// First pair as `x0,x1,..;v0,v1,..`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Second pair, same layout as `--a`.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Hermite file whose first two samples are averaged instead.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub w: f64,
    #[arg(long, value_enum, default_value = "end-angles")]
    pub variant: VariantArg,
}

#[derive(Args, Debug)]
pub struct RefineArgs {
    /// Hermite data, JSON or `.csv`.
    pub input: PathBuf,
    #[command(flatten)]
    pub scheme: SchemeFlags,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Defaults to clamp for open data and wrap for closed data.
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
    /// Topology of CSV input; JSON carries its own.
    #[arg(long, value_enum, default_value = "open")]
    pub topology: TopologyArg,
    /// Output file, JSON or `.csv`. Prints JSON when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Per-level convergence trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Points CSV with a header row.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "open")]
    pub topology: TopologyArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    /// Lipschitz bound used for the step rule.
    #[arg(long = "M", default_value_t = 10.0)]
    pub m: f64,
    /// Radius of the inner ball handled by boundary sampling.
    #[arg(long, default_value_t = 0.1)]
    pub r: f64,
    #[arg(long, default_value_t = f64::EPSILON)]
    pub eps: f64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Coarse CSV dump of D and Q over the domain.
    #[arg(long)]
    pub grid_dump: Option<PathBuf>,
    /// Grid steps per axis for `--grid-dump`.
    #[arg(long, default_value_t = 24)]
    pub grid_n: usize,
}

#[derive(Args, Debug)]
pub struct CurveFlags {
    /// `sine`, `spiral2d`, `spiral3d`, `circle[:R]` or `poly:c0,c1,..`.
    #[arg(long)]
    pub curve: String,
    /// Parameter range `t_min,t_max`; each curve has a default.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
}

impl CurveFlags {
    fn spec(&self, h: f64) -> Result<CurveSpec, CliError> {
        let kind: CurveKind = self.curve.parse()?;
        let spec = CurveSpec::new(kind, h);
        Ok(match &self.range {
            Some(r) => {
                let v = parse_floats(r)?;
                if v.len() != 2 {
                    return Err(CliError::input(format!(
                        "--range needs two values, got {r:?}"
                    )));
                }
                spec.with_range(v[0], v[1])
            }
            None => spec,
        })
    }
}

#[derive(Args, Debug)]
pub struct OrderArgs {
    #[command(flatten)]
    pub curve: CurveFlags,
    #[command(flatten)]
    pub scheme: SchemeFlags,
    /// Decreasing step sizes, comma separated.
    #[arg(long, default_value = "1,0.5,0.25,0.125,0.0625")]
    pub h_list: String,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    #[arg(long, value_enum, default_value = "parametric")]
    pub h_measure: MeasureArg,
    /// Per-row CSV report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub curve: CurveFlags,
    #[arg(long)]
    pub h: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Random datasets for the similarity check. Seeded by HERMITE_SEED.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable files or data the algorithms reject.
    Input(String),
    /// The work ran but a check did not hold.
    Failed(String),
}

impl CliError {
    fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<HermiteError> for CliError {
    fn from(e: HermiteError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Parses `argv` (program name first) and runs the command, writing results to
/// `out` and diagnostics to `err`.
pub fn run_with<O: Write, E: Write>(argv: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch<O: Write>(command: Command, out: &mut O) -> Result<(), CliError> {
    match command {
        Command::Average(a) => cmd_average(a, out),
        Command::Refine(a) => cmd_refine(a, out),
        Command::EstimateTangents(a) => cmd_estimate(a, out),
        Command::ValidateLemma(a) => cmd_lemma(a, out),
        Command::Order(a) => cmd_order(a, out),
        Command::Sample(a) => cmd_sample(a, out),
        Command::ReconstructCheck(a) => cmd_check(a, out),
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::input(format!("not a number: {x:?}")))
        })
        .collect()
}

fn parse_pair(s: &str) -> Result<HermitePair, CliError> {
    let (p, v) = s
        .split_once(';')
        .ok_or_else(|| CliError::input(format!("pair {s:?} must look like x0,x1;v0,v1")))?;
    Ok(HermitePair::from_slices(
        &parse_floats(p)?,
        &parse_floats(v)?,
    )?)
}

fn emit_sequence<O: Write>(
    s: &HermiteSequence,
    path: Option<&Path>,
    out: &mut O,
) -> Result<(), CliError> {
    match path {
        Some(p) => write_sequence(p, s)?,
        None => out.write_all(sequence_to_json(s)?.as_bytes())?,
    }
    Ok(())
}

fn write_json<O: Write, T: Serialize>(value: &T, out: &mut O) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct AverageOutput {
    w: f64,
    variant: AlphaVariant,
    point: Vec<f64>,
    tangent: Vec<f64>,
    alpha: f64,
    control: Vec<Vec<f64>>,
}

fn cmd_average<O: Write>(args: AverageArgs, out: &mut O) -> Result<(), CliError> {
    let (a, b) = match (&args.input, &args.a, &args.b) {
        (Some(path), _, _) => {
            let s = read_sequence(path, Topology::Open)?;
            (s.pairs()[0].clone(), s.pairs()[1].clone())
        }
        (None, Some(a), Some(b)) => (parse_pair(a)?, parse_pair(b)?),
        _ => return Err(CliError::input("give either --input or both --a and --b")),
    };
    let report = check_admissible(&a, &b)?;
    if !report.is_admissible() {
        return Err(CliError::input(format!(
            "pair is not admissible: {}",
            report.reason()
        )));
    }
    let variant = args.variant.into();
    let m = average(&a, &b, args.w, variant)?;
    let seg = segment(&a, &b, variant)?;
    write_json(
        &AverageOutput {
            w: args.w,
            variant,
            point: m.point.as_slice().to_vec(),
            tangent: m.tangent.as_slice().to_vec(),
            alpha: seg.alpha,
            control: seg.control.iter().map(|c| c.as_slice().to_vec()).collect(),
        },
        out,
    )
}

fn cmd_refine<O: Write>(args: RefineArgs, out: &mut O) -> Result<(), CliError> {
    let data = read_sequence(&args.input, args.topology.into())?;
    if args.svg.is_some() && data.dim() != 2 {
        return Err(CliError::input(format!(
            "SVG output needs 2D data, input has dimension {}; use --out with a .csv file",
            data.dim()
        )));
    }
    let mut cfg = args.scheme.config(args.levels);
    cfg.boundary = match args.boundary {
        Some(BoundaryArg::Clamp) => Boundary::Clamp,
        Some(BoundaryArg::Wrap) => Boundary::Wrap,
        None => Boundary::for_topology(data.topology()),
    };
    let (refined, trace) = refine(&data, &cfg)?;
    if let Some(path) = &args.trace {
        trace.write_csv(std::fs::File::create(path)?)?;
    }
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &args.svg {
        let input = data.points();
        let output = refined.points();
        let svg = polylines_svg(&[
            (input.as_slice(), data.topology()),
            (output.as_slice(), refined.topology()),
        ])?;
        std::fs::write(path, svg)?;
    }
    emit_sequence(&refined, args.out.as_deref(), out)
}

fn cmd_estimate<O: Write>(args: EstimateArgs, out: &mut O) -> Result<(), CliError> {
    let points = points_from_csv(std::fs::File::open(&args.input)?)?;
    let s = estimate_tangents(&points, args.topology.into())?;
    emit_sequence(&s, args.out.as_deref(), out)
}

fn cmd_lemma<O: Write>(args: LemmaArgs, out: &mut O) -> Result<(), CliError> {
    let params = SearchParams {
        m: args.m,
        r: args.r,
        eps: args.eps,
    };
    params.validate()?;
    let threads = match args.threads {
        Some(0) => return Err(CliError::input("--threads must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    if let Some(path) = &args.grid_dump {
        write_grid_dump(std::fs::File::create(path)?, args.grid_n)?;
    }
    let cert = verify_nonnegativity_threaded(&params, threads)?;
    let text = serde_json::to_string_pretty(&cert)? + "\n";
    if let Some(path) = &args.certificate {
        std::fs::write(path, &text)?;
    }
    out.write_all(text.as_bytes())?;
    if cert.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "verification failed: {}",
            cert.failure.as_deref().unwrap_or("no reason recorded")
        )))
    }
}

fn cmd_order<O: Write>(args: OrderArgs, out: &mut O) -> Result<(), CliError> {
    let h_list = parse_floats(&args.h_list)?;
    let spec = args.curve.spec(h_list[0])?;
    let measure = match args.h_measure {
        MeasureArg::Parametric => HMeasure::Parametric,
        MeasureArg::Chordal => HMeasure::Chordal,
    };
    let report = order_experiment(
        &spec,
        &args.scheme.config(args.depth),
        &h_list,
        args.depth,
        measure,
    )?;
    if let Some(path) = &args.report {
        report.write_csv(std::fs::File::create(path)?)?;
    }
    out.write_all(report.summary_json()?.as_bytes())?;
    writeln!(out)?;
    Ok(())
}

fn cmd_sample<O: Write>(args: SampleArgs, out: &mut O) -> Result<(), CliError> {
    let s = sample_curve(&args.curve.spec(args.h)?)?;
    emit_sequence(&s, args.out.as_deref(), out)
}

/// Seed for randomized commands: `HERMITE_SEED` when set, else 0.
pub fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var("HERMITE_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::input(format!(
                "HERMITE_SEED must be an unsigned integer, got {s:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn cmd_check<O: Write>(args: CheckArgs, out: &mut O) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from_env()?);
    let results = checks::run_all(args.trials, &mut rng);
    writeln!(out, "{:<22} {:<6} detail", "check", "result")?;
    for r in &results {
        writeln!(
            out,
            "{:<22} {:<6} {}",
            r.name,
            if r.passed { "pass" } else { "FAIL" },
            r.detail
        )?;
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

/// Smooth random data in `dim` dimensions: samples of a quadratic curve
/// with a dominant linear part, which keeps consecutive angles moderate.
pub fn random_smooth_data<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> HermiteSequence {
    loop {
        let a: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.15..0.15)).collect();
        let norm_a = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm_a < 0.3 {
            continue;
        }
        let pairs: Result<Vec<HermitePair>, _> = (0..n)
            .map(|k| {
                let t = k as f64;
                let p: Vec<f64> = (0..dim).map(|i| a[i] * t + b[i] * t * t).collect();
                let v: Vec<f64> = (0..dim).map(|i| a[i] + 2.0 * b[i] * t).collect();
                HermitePair::from_slices(&p, &v)
            })
            .collect();
        if let Ok(s) = pairs.and_then(HermiteSequence::open) {
            return s;
        }
    }
}

/// Largest coordinate difference between two sequences of equal shape.
pub fn sequence_distance(a: &HermiteSequence, b: &HermiteSequence) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.pairs()
        .iter()
        .zip(b.pairs())
        .map(|(x, y)| {
            x.point
                .max_abs_diff(&y.point)
                .max(x.tangent.as_vector().max_abs_diff(y.tangent.as_vector()))
        })
        .fold(0.0, f64::max)
}

/// `T(refine(s))` against `refine(T(s))`.
pub fn equivariance_defect(
    s: &HermiteSequence,
    t: &SimilarityTransform,
    cfg: &RefineConfig,
) -> Result<f64, HermiteError> {
    let left = apply_transform(&refine(s, cfg)?.0, t)?;
    let right = refine(&apply_transform(s, t)?, cfg)?.0;
    Ok(sequence_distance(&left, &right))
}
