//! Batch command-line front end.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 input-data error,
//! 3 numeric failure. Diagnostics go to the error stream, one line each.

mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::chaos::{bifurcation_scan, build_histogram, lyapunov_exponents, shannon_entropy};
use crate::dynamics::{iterate, MapParams};
use crate::error::{Error, Result};
use crate::reference::{load_reference, ReferenceCase};
use crate::spectral::{build_operator, eigenvalues, max_deviation_from_gue, unfold_spectrum, wigner_surmise_gue};
use crate::zeta::{
    compare_model, error_table, load_zeros, normalized_spacings, pair_correlation_empirical,
    read_values, zero_density, Convention,
};
use output::{render_csv, render_json, Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Starting point of the tiny-initial-condition error table.
pub const CASE3_X0: f64 = 5e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Paper,
    Standard,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Paper => Convention::Paper,
            ConventionArg::Standard => Convention::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseArg {
    Case1,
    Case2,
}

impl From<CaseArg> for ReferenceCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Case1 => ReferenceCase::Case1,
            CaseArg::Case2 => ReferenceCase::Case2,
        }
    }
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "montgomery-lab", version, about = "Deterministic batch analyses of the Montgomery-kernel map")]
pub struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write output to this file (atomically) instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat key=value file supplying default flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Iterate the map from x0.
    Iterate(IterateArgs),
    /// Running Lyapunov exponent estimates.
    Lyapunov(LyapunovArgs),
    /// Post-transient orbit samples over a grid of eps.
    Bifurcate(BifurcateArgs),
    /// Shannon entropy of a trajectory histogram, or of a uniform self-test histogram.
    Entropy(EntropyArgs),
    /// Empirical pair correlation of a zero table against the kernel.
    Paircorr(PaircorrArgs),
    /// Normalized nearest-neighbour spacings of a zero table.
    Spacings(SpacingsArgs),
    /// Zero density ln(E)/2pi on a grid.
    Density(DensityArgs),
    /// Row-wise error table between two sequences.
    Errtable(ErrtableArgs),
    /// Spectrum of the tridiagonal discretization.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IterateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LyapunovArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub eps: f64,
    /// Join the published table for this reference orbit.
    #[arg(long, value_enum)]
    pub compare_paper: Option<CaseArg>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BifurcateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub eps_from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub eps_to: f64,
    #[arg(long)]
    pub eps_steps: usize,
    #[arg(long)]
    pub transient: usize,
    #[arg(long)]
    pub sample: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EntropyArgs {
    /// Histogram the orbit of x0.
    #[arg(long, requires_all = ["x0", "steps", "bins", "lo", "hi"], conflicts_with = "uniform_bins")]
    pub from_trajectory: bool,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// Self-test: one value in each of B bins.
    #[arg(long)]
    pub uniform_bins: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PaircorrArgs {
    #[arg(long)]
    pub zeros: PathBuf,
    #[arg(long)]
    pub max_u: f64,
    #[arg(long)]
    pub bins: usize,
    #[arg(long, value_enum, default_value_t = ConventionArg::Paper)]
    pub convention: ConventionArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpacingsArgs {
    #[arg(long)]
    pub zeros: PathBuf,
    #[arg(long, value_enum, default_value_t = ConventionArg::Paper)]
    pub convention: ConventionArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub e_from: f64,
    #[arg(long)]
    pub e_to: f64,
    #[arg(long)]
    pub points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ErrtableArgs {
    #[arg(long, requires = "b", conflicts_with = "case3")]
    pub a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    /// Regenerate the alternating table from x0 = 5e-13.
    #[arg(long, requires = "steps")]
    pub case3: bool,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub n: usize,
    /// Grid step; defaults to 1/n.
    #[arg(long)]
    pub h: Option<f64>,
    /// Add the mirrored subdiagonal (extension beyond the printed operator).
    #[arg(long)]
    pub symmetrized: bool,
    /// Emit the unfolded spacing histogram instead of the eigenvalues.
    #[arg(long)]
    pub unfold: bool,
}

/// Maps an error to the exit-code taxonomy.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain { .. }
        | Error::InvalidArgument(_)
        | Error::EmptyInput
        | Error::Dimension(_) => EXIT_USAGE,
        Error::Parse { .. }
        | Error::Monotonicity { .. }
        | Error::EmptyTable
        | Error::TooFewZeros { .. }
        | Error::InvalidData(_)
        | Error::LengthMismatch { .. }
        | Error::NonUniformGrid { .. }
        | Error::Io(_) => EXIT_INPUT,
        Error::Overflow { .. }
        | Error::DegenerateOrbit { .. }
        | Error::Convergence { .. }
        | Error::DegenerateSpectrum { .. } => EXIT_NUMERIC,
    }
}

/// Output of one command: the table plus warnings for the error stream.
struct Outcome {
    table: Table,
    warnings: Vec<String>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, warnings: Vec::new() }
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("--{name} must be finite, got {v}")))
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::InvalidData(format!("cannot read {}: {e}", path.display())))
}

fn run_iterate(a: &IterateArgs) -> Result<Outcome> {
    let params = MapParams::with_eps(finite("eps", a.eps)?)?;
    let traj = iterate(finite("x0", a.x0)?, a.steps, &params)?;
    let mut table = Table::new(vec!["n", "x"]);
    for (n, &x) in traj.values.iter().enumerate() {
        table.push(vec![n.into(), x.into()]);
    }
    let mut warnings = Vec::new();
    table.summarize("steps_taken", traj.steps());
    if let Some(t) = &traj.terminated_early {
        warnings.push(format!("trajectory terminated early at n={}: {}", t.index, t.reason));
        table.summarize("terminated_at", t.index);
    }
    if let Some(i) = traj.first_negative() {
        warnings.push(format!("trajectory entered x<0 at n={i}"));
        table.summarize("first_negative", i);
    }
    Ok(Outcome { table, warnings })
}

fn run_lyapunov(a: &LyapunovArgs) -> Result<Outcome> {
    let params = MapParams::with_eps(finite("eps", a.eps)?)?;
    let series = lyapunov_exponents(finite("x0", a.x0)?, a.steps, &params)?;
    let mut warnings = Vec::new();
    if let Some(t) = &series.truncated {
        warnings.push(format!("orbit terminated early at n={}: {}", t.index, t.reason));
    }
    let mut table = match a.compare_paper {
        None => {
            let mut t = Table::new(vec!["iteration", "lambda"]);
            for (k, &l) in series.lambdas.iter().enumerate() {
                t.push(vec![(k + 1).into(), l.into()]);
            }
            t
        }
        Some(case) => {
            let case = ReferenceCase::from(case);
            if case.x0() != a.x0 {
                warnings.push(format!("reference {case} was computed from x0={}, not {}", case.x0(), a.x0));
            }
            let reference = load_reference(case);
            let mut t =
                Table::new(vec!["iteration", "lambda", "reference_raw", "reference_lambda", "difference"]);
            for (k, &l) in series.lambdas.iter().enumerate() {
                let entry = reference.iter().find(|e| e.iteration == k + 1);
                let raw = entry.map_or(Cell::Empty, |e| Cell::Text(e.raw.clone()));
                let value = entry.and_then(|e| e.value);
                t.push(vec![(k + 1).into(), l.into(), raw, value.into(), value.map(|v| l - v).into()]);
            }
            t
        }
    };
    if let Some(&last) = series.lambdas.last() {
        table.summarize("final_lambda", last);
    }
    Ok(Outcome { table, warnings })
}

fn run_bifurcate(a: &BifurcateArgs) -> Result<Outcome> {
    let d = bifurcation_scan(
        finite("x0", a.x0)?,
        finite("eps-from", a.eps_from)?,
        finite("eps-to", a.eps_to)?,
        a.eps_steps,
        a.transient,
        a.sample,
    )?;
    let mut table = Table::new(vec!["eps", "sample", "x", "truncated"]);
    let mut warnings = Vec::new();
    for ((&eps, samples), &truncated) in d.param_values.iter().zip(&d.samples).zip(&d.truncated) {
        if truncated {
            warnings.push(format!("orbit at eps={eps} terminated early ({} samples)", samples.len()));
        }
        for (i, &x) in samples.iter().enumerate() {
            table.push(vec![eps.into(), i.into(), x.into(), truncated.into()]);
        }
    }
    Ok(Outcome { table, warnings })
}

fn run_entropy(a: &EntropyArgs) -> Result<Outcome> {
    let hist = if a.from_trajectory {
        let (Some(x0), Some(steps), Some(bins), Some(lo), Some(hi)) = (a.x0, a.steps, a.bins, a.lo, a.hi) else {
            return Err(Error::InvalidArgument("--from-trajectory needs --x0 --steps --bins --lo --hi".into()));
        };
        let traj = iterate(finite("x0", x0)?, steps, &MapParams::default())?;
        build_histogram(&traj.values, bins, finite("lo", lo)?, finite("hi", hi)?)?
    } else if let Some(bins) = a.uniform_bins {
        if bins == 0 {
            return Err(Error::InvalidArgument("--uniform-bins must be at least 1".into()));
        }
        let centers: Vec<f64> = (0..bins).map(|i| (i as f64 + 0.5) / bins as f64).collect();
        build_histogram(&centers, bins, 0.0, 1.0)?
    } else {
        return Err(Error::InvalidArgument("entropy needs --from-trajectory or --uniform-bins".into()));
    };
    let h = shannon_entropy(&hist)?;
    let mut table = Table::new(vec!["bins", "in_range", "dropped", "entropy_bits", "max_entropy_bits"]);
    table.push(vec![
        hist.bins().into(),
        hist.in_range().into(),
        hist.dropped.into(),
        h.into(),
        (hist.bins() as f64).log2().into(),
    ]);
    let mut warnings = Vec::new();
    if hist.dropped > 0 {
        warnings.push(format!("{} values fell outside [lo, hi) and were dropped", hist.dropped));
    }
    Ok(Outcome { table, warnings })
}

fn run_paircorr(a: &PaircorrArgs) -> Result<Outcome> {
    let z = load_zeros(open(&a.zeros)?, &a.zeros.display().to_string())?;
    let pc = pair_correlation_empirical(&z, a.max_u, a.bins, a.convention.into())?;
    let dev = compare_model(&pc)?;
    let mut table = Table::new(vec!["bin_center", "empirical", "model"]);
    for i in 0..pc.bin_centers.len() {
        table.push(vec![pc.bin_centers[i].into(), pc.empirical[i].into(), pc.model[i].into()]);
    }
    table.summarize("zeros", z.len());
    table.summarize("pairs", pc.pair_count());
    table.summarize("max_abs_dev", dev.max_abs_dev);
    table.summarize("mean_sq_dev", dev.mean_sq_dev);
    Ok(table.into())
}

fn run_spacings(a: &SpacingsArgs) -> Result<Outcome> {
    let z = load_zeros(open(&a.zeros)?, &a.zeros.display().to_string())?;
    let s = normalized_spacings(&z, a.convention.into())?;
    let mut table = Table::new(vec!["n", "u"]);
    for (i, &u) in s.spacings.iter().enumerate() {
        table.push(vec![(i + 1).into(), u.into()]);
    }
    table.summarize("mean", s.mean());
    Ok(table.into())
}

fn run_density(a: &DensityArgs) -> Result<Outcome> {
    let (lo, hi) = (finite("e-from", a.e_from)?, finite("e-to", a.e_to)?);
    if a.points == 0 || (a.points == 1 && lo != hi) || hi < lo {
        return Err(Error::InvalidArgument(format!(
            "need e-from <= e-to and points >= 2 (got {lo}, {hi}, {})",
            a.points
        )));
    }
    let mut table = Table::new(vec!["E", "rho"]);
    for i in 0..a.points {
        let e = if i + 1 == a.points {
            hi
        } else {
            lo + i as f64 * (hi - lo) / (a.points - 1) as f64
        };
        table.push(vec![e.into(), zero_density(e)?.into()]);
    }
    Ok(table.into())
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    Ok(read_values(open(path)?)?.into_iter().map(|(_, v)| v).collect())
}

fn run_errtable(a: &ErrtableArgs) -> Result<Outcome> {
    let (xs, ys, warnings) = if a.case3 {
        let steps = a.steps.unwrap_or(0);
        if steps == 0 {
            return Err(Error::InvalidArgument("--case3 needs --steps >= 1".into()));
        }
        let traj = iterate(CASE3_X0, steps, &MapParams::default())?;
        let mut warnings = Vec::new();
        if let Some(t) = &traj.terminated_early {
            warnings.push(format!("trajectory terminated early at n={}: {}", t.index, t.reason));
        }
        let v = &traj.values;
        (v[..v.len() - 1].to_vec(), v[1..].to_vec(), warnings)
    } else {
        match (&a.a, &a.b) {
            (Some(pa), Some(pb)) => (read_column(pa)?, read_column(pb)?, Vec::new()),
            _ => return Err(Error::InvalidArgument("errtable needs --a and --b, or --case3 --steps".into())),
        }
    };
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidData("error table inputs contain no values".into()));
    }
    let t = error_table(&xs, &ys)?;
    let mut table = Table::new(vec!["n", "a", "b", "signed_error", "abs_error"]);
    for r in &t.rows {
        table.push(vec![r.index.into(), r.a.into(), r.b.into(), r.signed_error.into(), r.abs_error.into()]);
    }
    table.summarize("max_abs_error", t.max_abs_error);
    Ok(Outcome { table, warnings })
}

fn run_spectrum(a: &SpectrumArgs) -> Result<Outcome> {
    let op = build_operator(a.n, a.h, a.symmetrized)?;
    let spectrum = eigenvalues(&op)?;
    if !a.unfold {
        let mut table = Table::new(vec!["index", "eigenvalue"]);
        for (i, &e) in spectrum.eigenvalues.iter().enumerate() {
            table.push(vec![(i + 1).into(), e.into()]);
        }
        table.summarize("trace", op.trace());
        return Ok(table.into());
    }
    let stats = unfold_spectrum(&spectrum)?;
    let hist = &stats.spacing_hist;
    let mut table = Table::new(vec!["bin_center", "density", "gue_model"]);
    for (c, d) in hist.centers().into_iter().zip(hist.densities()) {
        table.push(vec![c.into(), d.into(), wigner_surmise_gue(c)?.into()]);
    }
    table.summarize("mean_spacing", stats.mean_spacing);
    table.summarize("dropped_spacings", hist.dropped);
    table.summarize("max_gue_deviation", max_deviation_from_gue(&stats));
    Ok(table.into())
}

fn execute(config: &RunConfig) -> Result<Outcome> {
    match &config.command {
        Command::Iterate(a) => run_iterate(a),
        Command::Lyapunov(a) => run_lyapunov(a),
        Command::Bifurcate(a) => run_bifurcate(a),
        Command::Entropy(a) => run_entropy(a),
        Command::Paircorr(a) => run_paircorr(a),
        Command::Spacings(a) => run_spacings(a),
        Command::Density(a) => run_density(a),
        Command::Errtable(a) => run_errtable(a),
        Command::Spectrum(a) => run_spectrum(a),
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Runs one analysis for an already-parsed config.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = match execute(config) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    for w in &outcome.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let rendered = match config.format {
        Format::Csv => render_csv(&outcome.table),
        Format::Json => {
            let meta = serde_json::to_value(config).expect("config serializes");
            render_json(&outcome.table, &meta)
        }
    };
    let written = match &config.out {
        Some(path) => write_atomically(path, rendered.as_bytes()),
        None => stdout.write_all(rendered.as_bytes()).and_then(|_| stdout.flush()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    EXIT_OK
}

/// Parses `args` (including the program name), applies `--config`, and runs.
pub fn run_with_args<I>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = OsString>,
{
    let prepared = config::to_strings(args).and_then(|mut args| {
        if let Some(path) = config::take_config_path(&mut args)? {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::InvalidArgument(format!("cannot read config {path}: {e}")))?;
            config::merge(&mut args, &config::parse_config(&text)?);
        }
        Ok(args)
    });
    let args = match prepared {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match RunConfig::try_parse_from(&args) {
        Ok(config) => run(&config, stdout, stderr),
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let first: Vec<&str> = rendered
                    .lines()
                    .take_while(|l| !l.trim().is_empty())
                    .map(str::trim)
                    .collect();
                let _ = writeln!(stderr, "{}", first.join(" "));
            }
            code
        }
    }
}
