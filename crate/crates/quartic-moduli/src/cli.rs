//! Command-line front end. [`run`] parses arguments, dispatches a subcommand and
//! returns the process exit code; all output goes through the supplied writers.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classification::{self, ClassTag};
use crate::moduli_plane::ModuliPoint;
use crate::quartic_form::{Point2, QuarticForm};
use crate::report::{self, Layer, PortraitConfig, ReportDocument};
use crate::selfcheck;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NON_HYPERBOLIC: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;

#[derive(Debug, Parser)]
#[command(name = "quartic-moduli", version, about = "Classify hyperbolic binary quartics up to linear equivalence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a quartic and print the JSON report.
    Classify(ClassifyArgs),
    /// Classify and print the slice and metric profile as CSV.
    Analyze(AnalyzeArgs),
    /// Integrate the moduli vector field from a point and print the trajectory as CSV.
    Flow(FlowArgs),
    /// Draw the moduli plane as SVG.
    Portrait(PortraitArgs),
    /// Bring h_{1,K} to the factor form xy(x² + c xy + y²).
    Reduce(ReduceArgs),
    /// Run the built-in acceptance checks.
    Verify,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// Coefficients of x⁴, x³y, x²y², xy³, y⁴ (decimals or p/q).
    #[arg(long, num_args = 5, value_names = ["C40", "C31", "C22", "C13", "C04"], allow_hyphen_values = true)]
    pub coeffs: Option<Vec<String>>,
    /// A standard form x⁴ − x²y² + L xy³ + K y⁴.
    #[arg(long, num_args = 2, value_names = ["L", "K"], allow_hyphen_values = true)]
    pub lk: Option<Vec<String>>,
    /// File with one form per line: five coefficients, or `L K`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// A point of the form at which to standardise.
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_hyphen_values = true)]
    pub hint: Option<Vec<String>>,
    /// Region tolerance (overrides QUARTIC_MODULI_TOL).
    #[arg(long)]
    pub tol: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Worker threads for batch input.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of interior samples of dom.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long, num_args = 2, value_names = ["L", "K"], allow_hyphen_values = true, required = true)]
    pub lk: Vec<String>,
    /// Arc length to integrate in each direction.
    #[arg(long, default_value = "4")]
    pub arc: String,
    /// Stop when |L| or |K| exceeds this.
    #[arg(long, default_value = "10")]
    pub bound: String,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PortraitArgs {
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_hyphen_values = true)]
    pub l_range: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_hyphen_values = true)]
    pub k_range: Option<Vec<String>>,
    #[arg(long, default_value_t = 720)]
    pub width: u32,
    #[arg(long, default_value_t = 640)]
    pub height: u32,
    /// Comma-separated subset of regions,curves,boundaries,fixed_points (empty for axes only).
    #[arg(long)]
    pub layers: Option<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// K in [−25/72, U), decimal or p/q.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Also extrapolate c to K = U.
    #[arg(long)]
    pub extrapolate: bool,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }

    fn numerical(e: Error) -> Self {
        Self { code: EXIT_NUMERICAL, message: e.to_string() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: EXIT_NUMERICAL, message: format!("{}: {e}", path.display()) }
    }
}

/// Parses a decimal number or an exact fraction `p/q`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            p / q
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not a finite number: {s:?}"))
    }
}

fn numbers(v: &[String]) -> Result<Vec<f64>, Failure> {
    v.iter().map(|s| parse_number(s).map_err(Failure::parse)).collect()
}

fn form_from_numbers(v: &[f64]) -> Option<QuarticForm> {
    match *v {
        [a, b, c, d, e] => Some(QuarticForm::new(a, b, c, d, e)),
        [l, k] => Some(QuarticForm::standard(l, k)),
        _ => None,
    }
}

fn read_forms(input: &InputArgs) -> Result<(Vec<QuarticForm>, bool), Failure> {
    if let Some(c) = &input.coeffs {
        return Ok((vec![form_from_numbers(&numbers(c)?).unwrap()], false));
    }
    if let Some(lk) = &input.lk {
        return Ok((vec![form_from_numbers(&numbers(lk)?).unwrap()], false));
    }
    let path = input.input.as_ref().expect("clap enforces one input source");
    let text = std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let mut forms = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).map(String::from).collect();
        let form = form_from_numbers(&numbers(&fields)?).ok_or_else(|| {
            Failure::parse(format!("{}:{}: expected 5 coefficients or `L K`, found {} fields", path.display(), i + 1, fields.len()))
        })?;
        forms.push(form);
    }
    if forms.is_empty() {
        return Err(Failure::parse(format!("{}: no forms found", path.display())));
    }
    Ok((forms, true))
}

fn tolerance(arg: &Option<String>) -> Result<f64, Failure> {
    match arg {
        Some(s) => match parse_number(s) {
            Ok(v) if v > 0.0 => Ok(v),
            _ => Err(Failure::usage(format!("--tol must be a positive number, got {s:?}"))),
        },
        None => report::region_tolerance_from_env().map_err(Failure::usage),
    }
}

fn hint(arg: &Option<Vec<String>>) -> Result<Option<Point2>, Failure> {
    Ok(match arg {
        Some(v) => {
            let n = numbers(v)?;
            Some(Point2::new(n[0], n[1]))
        }
        None => None,
    })
}

fn emit(out: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn report_code(doc: &ReportDocument) -> i32 {
    if doc.classification.numerical_failure() {
        EXIT_NUMERICAL
    } else if doc.classification.class_tag == ClassTag::NonHyperbolic {
        EXIT_NON_HYPERBOLIC
    } else {
        EXIT_OK
    }
}

fn classify_batch(forms: &[QuarticForm], hint: Option<Point2>, tol: f64, jobs: usize) -> Vec<ReportDocument> {
    let jobs = jobs.max(1).min(forms.len().max(1));
    if jobs == 1 {
        return forms.iter().map(|h| report::build_report(h, hint, tol)).collect();
    }
    let chunk = forms.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = forms
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|h| report::build_report(h, hint, tol)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let tol = tolerance(&a.common.tol)?;
    let hint = hint(&a.common.hint)?;
    let (forms, batch) = read_forms(&a.common.input)?;
    let docs = classify_batch(&forms, hint, tol, a.jobs);
    let text = if batch {
        serde_json::to_string_pretty(&docs).expect("report serialisation cannot fail")
    } else {
        docs[0].to_json()
    };
    emit(out, &a.output, &(text + "\n"))?;
    Ok(docs.iter().map(report_code).max_by_key(|&c| match c {
        EXIT_NUMERICAL => 2,
        EXIT_NON_HYPERBOLIC => 1,
        _ => 0,
    }).unwrap_or(EXIT_OK))
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let tol = tolerance(&a.common.tol)?;
    let hint = hint(&a.common.hint)?;
    let (forms, batch) = read_forms(&a.common.input)?;
    if batch && forms.len() != 1 {
        return Err(Failure::usage("analyze takes a single form"));
    }
    let doc = report::build_report(&forms[0], hint, tol);
    if let Some(p) = &a.report {
        std::fs::write(p, doc.to_json() + "\n").map_err(|e| Failure::io(p, e))?;
    }
    let code = report_code(&doc);
    match &doc.slice_profile {
        Some(profile) => emit(out, &a.output, &report::slice_csv(profile, a.samples))?,
        None if code == EXIT_OK => return Err(Failure { code: EXIT_NUMERICAL, message: "no slice profile".into() }),
        None => {}
    }
    Ok(code)
}

fn cmd_flow(a: &FlowArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let lk = numbers(&a.lk)?;
    let arc = parse_number(&a.arc).map_err(Failure::parse)?;
    let bound = parse_number(&a.bound).map_err(Failure::parse)?;
    if !(arc > 0.0 && bound > 0.0) {
        return Err(Failure::usage("--arc and --bound must be positive"));
    }
    let path = report::integral_curve(ModuliPoint::new(lk[0], lk[1]), arc, bound).map_err(Failure::numerical)?;
    emit(out, &a.output, &report::trajectory_csv(&path))?;
    Ok(EXIT_OK)
}

fn range(v: &Option<Vec<String>>, default: (f64, f64)) -> Result<(f64, f64), Failure> {
    Ok(match v {
        Some(v) => {
            let n = numbers(v)?;
            (n[0], n[1])
        }
        None => default,
    })
}

fn cmd_portrait(a: &PortraitArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let defaults = PortraitConfig::default();
    let layers = match &a.layers {
        None => defaults.layers.clone(),
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Layer::parse(s).ok_or_else(|| Failure::usage(format!("unknown layer {s:?}"))))
            .collect::<Result<_, _>>()?,
    };
    let cfg = PortraitConfig {
        l_range: range(&a.l_range, defaults.l_range)?,
        k_range: range(&a.k_range, defaults.k_range)?,
        width: a.width,
        height: a.height,
        layers,
    };
    let svg = report::emit_portrait(&cfg).map_err(|e| match e {
        Error::Precondition(m) => Failure::usage(m),
        e => Failure::numerical(e),
    })?;
    emit(out, &a.output, &svg)?;
    Ok(EXIT_OK)
}

fn cmd_reduce(a: &ReduceArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.k.is_none() && !a.extrapolate {
        return Err(Failure::usage("reduce needs --k and/or --extrapolate"));
    }
    let mut doc = serde_json::Map::new();
    if let Some(k) = &a.k {
        let k = parse_number(k).map_err(Failure::parse)?;
        let red = classification::reduce_factor_form(k).map_err(|e| match e {
            Error::DomainError { .. } => Failure::usage(e.to_string()),
            e => Failure::numerical(e),
        })?;
        doc.insert("reduction".into(), serde_json::to_value(red).unwrap());
    }
    if a.extrapolate {
        let c = classification::extrapolate_c_at_u().map_err(Failure::numerical)?;
        doc.insert("c_at_U".into(), serde_json::Value::from(c));
    }
    emit(out, &None, &(serde_json::to_string_pretty(&doc).unwrap() + "\n"))?;
    Ok(EXIT_OK)
}

fn cmd_verify(out: &mut dyn Write) -> Result<i32, Failure> {
    let results = selfcheck::run_all();
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.line());
        text.push('\n');
    }
    let passed = results.iter().filter(|r| r.passed).count();
    text.push_str(&format!("{passed}/{} criteria passed\n", results.len()));
    emit(out, &None, &text)?;
    Ok(if passed == results.len() { EXIT_OK } else { EXIT_NUMERICAL })
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a, out),
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Flow(a) => cmd_flow(a, out),
        Command::Portrait(a) => cmd_portrait(a, out),
        Command::Reduce(a) => cmd_reduce(a, out),
        Command::Verify => cmd_verify(out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
