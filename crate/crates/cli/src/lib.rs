//! Command implementations behind the `shinv` binary.
//!
//! Each command writes its output to a caller-supplied writer and returns an
//! exit code: 0 on success, 1 on input errors, 2 when the invariants are
//! ill-defined (the partial report is still written).

pub mod report;

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use shannon_invariants::certify::{run_ensemble, EnsembleSummary};
use shannon_invariants::ensemble::EnsembleConfig;
use shannon_invariants::lattice::{degree_histograms, enumerate_antichains};
use shannon_invariants::pid::MAX_ORACLE_SOURCES;
use shannon_invariants::quantize::quantize_table;
use shannon_invariants::{
    analyze, InvariantConfig, JointDistribution, Matrix, QuantizerConfig, Rounding, SampleTable,
};
use thiserror::Error;

pub use report::{Format, Unit};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ILL_DEFINED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Input {
        path: String,
        source: shannon_invariants::Error,
    },
    #[error(transparent)]
    Core(#[from] shannon_invariants::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "shinv", version, about = "Shannon-invariant summaries of information decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute r_bar, v_bar, RSI and DRSI for a CSV sample table.
    Invariants(InvariantsArgs),
    /// List the antichains for n sources with their degrees.
    Lattice {
        #[arg(long)]
        n: usize,
    },
    /// Check the atom-level identities and bounds on random distributions.
    OracleCheck(OracleArgs),
    /// Stochastically quantize an activation matrix into a sample table.
    Quantize(QuantizeArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct InvariantsArgs {
    /// Header-first, comma-separated sample table.
    pub csv: PathBuf,
    /// Target column name (default: last column).
    #[arg(long)]
    pub target: Option<String>,
    /// Unit for information values; r_bar and v_bar are unitless.
    #[arg(long, value_enum, default_value = "bits")]
    pub unit: Unit,
    /// r_bar and v_bar are reported only when I(X;Y) exceeds this many bits.
    #[arg(long, default_value_t = shannon_invariants::DEFAULT_ILL_DEFINED_THRESHOLD)]
    pub threshold: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Report format: pretty JSON or flattened `key<TAB>value` lines.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, clap::Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoundingArg {
    Unbiased,
    AsPrinted,
}

#[derive(Debug, Clone, clap::Args)]
pub struct QuantizeArgs {
    /// Matrix file: `rows cols` header, then row-major values.
    #[arg(long)]
    pub matrix: PathBuf,
    /// One target label per line, one line per matrix row.
    #[arg(long)]
    pub targets: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub max: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `as-printed` reverses the draw comparison and is biased; it exists to
    /// reproduce runs that used it.
    #[arg(long, value_enum, default_value = "unbiased")]
    pub rounding: RoundingArg,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            code
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Invariants(args) => cmd_invariants(&args, out, err),
        Command::Lattice { n } => cmd_lattice(n, out),
        Command::OracleCheck(args) => cmd_oracle_check(&args, out),
        Command::Quantize(args) => cmd_quantize(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn input_err(path: &Path) -> impl Fn(shannon_invariants::Error) -> CliError + '_ {
    move |source| CliError::Input {
        path: path.display().to_string(),
        source,
    }
}

/// Writes to `--output` when given, otherwise to `out`.
fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Reads the table, computes the report and returns it with the exit code.
pub fn invariants_document(
    args: &InvariantsArgs,
) -> Result<(serde_json::Value, i32), CliError> {
    if args.threshold.is_nan() || args.threshold < 0.0 {
        return Err(shannon_invariants::Error::OutOfRangeInput(format!(
            "threshold {} must be non-negative",
            args.threshold
        ))
        .into());
    }
    let table = SampleTable::from_csv_path(&args.csv, args.target.as_deref())
        .map_err(input_err(&args.csv))?;
    let dist = JointDistribution::from_samples(&table).map_err(input_err(&args.csv))?;
    let cfg = InvariantConfig {
        ill_defined_threshold: args.threshold,
        ..InvariantConfig::default()
    };
    let inv = analyze(&dist, &cfg)?;
    let meta = report::ReportMeta {
        input: args.csv.display().to_string(),
        n_rows: table.n_rows(),
        target: table.column_names()[table.target_index()].clone(),
        unit: args.unit,
        threshold_bits: args.threshold,
    };
    let code = if inv.is_well_defined() {
        EXIT_OK
    } else {
        EXIT_ILL_DEFINED
    };
    Ok((report::document(&inv, &dist, &meta), code))
}

pub fn cmd_invariants(
    args: &InvariantsArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let (doc, code) = invariants_document(args)?;
    emit(args.output.as_deref(), &report::render(&doc, args.format), out)?;
    if code == EXIT_ILL_DEFINED {
        writeln!(
            err,
            "warning: I(X;Y) is not above {:e} bits; r_bar and v_bar are undefined",
            args.threshold
        )?;
    }
    Ok(code)
}

/// Text listing of all antichains for `n` sources.
pub fn lattice_listing(n: usize) -> Result<String, CliError> {
    let antichains = enumerate_antichains(n)?;
    let (r_hist, v_hist) = degree_histograms(n)?;
    let hist = |h: &[usize]| {
        h.iter()
            .enumerate()
            .map(|(k, c)| format!("{k}:{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = format!("# n={n} antichains={}\n# antichain\tr\tv\n", antichains.len());
    for a in &antichains {
        s.push_str(&format!(
            "{a}\t{}\t{}\n",
            a.degree_redundancy(),
            a.degree_vulnerability()
        ));
    }
    s.push_str(&format!("# r-degree histogram: {}\n", hist(&r_hist)));
    s.push_str(&format!("# v-degree histogram: {}\n", hist(&v_hist)));
    Ok(s)
}

pub fn cmd_lattice(n: usize, out: &mut dyn Write) -> Result<i32, CliError> {
    out.write_all(lattice_listing(n)?.as_bytes())?;
    Ok(EXIT_OK)
}

pub fn oracle_summary(args: &OracleArgs) -> Result<EnsembleSummary, CliError> {
    if args.n == 0 || args.n > MAX_ORACLE_SOURCES {
        return Err(shannon_invariants::Error::UnsupportedSize {
            n: args.n,
            max: MAX_ORACLE_SOURCES,
        }
        .into());
    }
    Ok(run_ensemble(EnsembleConfig::new(args.n, args.seed), args.trials)?)
}

pub fn cmd_oracle_check(args: &OracleArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let summary = oracle_summary(args)?;
    writeln!(
        out,
        "# oracle-check n={} trials={} seed={} tolerance={:e}",
        args.n, args.trials, args.seed, args.tolerance
    )?;
    writeln!(out, "# certificate\tmax_residual\tstatus")?;
    for (c, r) in &summary.max_residual {
        let status = if *r < args.tolerance { "pass" } else { "FAIL" };
        writeln!(out, "{c}\t{:.3e}\t{status}", r)?;
    }
    writeln!(out, "# ratio checks skipped: {}", summary.ratio_skipped)?;
    let ok = summary.passes(args.tolerance);
    writeln!(out, "# result: {}", if ok { "pass" } else { "FAIL" })?;
    Ok(if ok { EXIT_OK } else { EXIT_INPUT })
}

fn read_targets(path: &Path) -> Result<Vec<String>, CliError> {
    let file = File::open(path)?;
    let mut labels = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let label = line.trim_end_matches('\r');
        if !label.is_empty() {
            labels.push(label.to_string());
        }
    }
    Ok(labels)
}

pub fn quantized_table(args: &QuantizeArgs) -> Result<SampleTable, CliError> {
    let rounding = match args.rounding {
        RoundingArg::Unbiased => Rounding::Unbiased,
        RoundingArg::AsPrinted => Rounding::AsPrinted,
    };
    let cfg = QuantizerConfig::new(args.min, args.max, args.levels, args.seed)?.with_rounding(rounding);
    let matrix =
        Matrix::from_reader(File::open(&args.matrix)?).map_err(input_err(&args.matrix))?;
    let targets = read_targets(&args.targets)?;
    Ok(quantize_table(&matrix, &cfg, &targets)?)
}

pub fn cmd_quantize(args: &QuantizeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let table = quantized_table(args)?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    emit(
        args.output.as_deref(),
        std::str::from_utf8(&buf).expect("csv output is utf-8"),
        out,
    )?;
    Ok(EXIT_OK)
}
