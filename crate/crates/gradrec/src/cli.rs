use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gradrec_core::nonuniform::{reconstruct_nonuniform, NonuniformSample};
use gradrec_core::recon::{reconstruct, ReconConfig, ReconResult};
use gradrec_core::spectral::{srr, SampleSet};
use gradrec_core::uniqueness::{check_uniqueness, oracle_unique, UniquenessReport};
use serde::Serialize;
use serde_json::Value;

use crate::error::{AppError, FlagContext};
use crate::harness::{
    aggregate, run_grid, trial_instance, GridSpec, Mode, Observation, TrialInstance,
};
use crate::io;

#[derive(Debug, Parser)]
#[command(
    name = "gradrec",
    version,
    about = "Recover missing samples of signals that are sparse in the DFT domain"
)]
pub struct Cli {
    /// Seed for generated signals, masks, jitter and noise
    #[arg(
        long,
        global = true,
        help_heading = "Global options",
        default_value_t = 0
    )]
    pub seed: u64,

    /// Write the main result to this file instead of stdout
    #[arg(
        long,
        short,
        global = true,
        help_heading = "Global options",
        value_name = "PATH"
    )]
    pub output: Option<PathBuf>,

    /// Output format; the default depends on the command
    #[arg(long, global = true, help_heading = "Global options", value_enum)]
    pub format: Option<Format>,

    /// JSON object overriding reconstruction settings
    #[arg(
        long,
        global = true,
        help_heading = "Global options",
        value_name = "PATH"
    )]
    pub config: Option<PathBuf>,

    /// Worker threads for `grid` (default: all cores)
    #[arg(long, global = true, help_heading = "Global options")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Uniform,
    Nonuniform,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Uniform => Mode::Uniform,
            ModeArg::Nonuniform => Mode::Nonuniform,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fill the empty rows of an `n,value` file
    Reconstruct(ReconstructArgs),
    /// Reconstruct a uniform grid from `t,value` samples at arbitrary instants
    Nonuniform(NonuniformArgs),
    /// Check whether a recovered support is the unique sparse solution
    Uniqueness(UniquenessArgs),
    /// Write a multitone signal with randomly missing samples
    Gen(GenArgs),
    /// Write jittered `t,value` samples of a multitone signal
    GenNonuniform(GenNonuniformArgs),
    /// Run a Monte Carlo sweep over sparsity and available-sample count
    Grid(GridArgs),
    /// Signal-to-reconstruction-error ratio of two `n,value` files
    Srr(SrrArgs),
}

#[derive(Debug, Args)]
pub struct Tuning {
    /// Stop once the per-loop change of the missing samples falls below this
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    pub tmax_db: Option<f64>,

    /// Stopping level that takes precedence over --tmax-db
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    pub target_db: Option<f64>,

    /// Gradient angle that triggers a step reduction
    #[arg(long, value_name = "DEG")]
    pub angle_deg: Option<f64>,

    /// Initial step (default: largest available magnitude)
    #[arg(long)]
    pub delta_init: Option<f64>,

    /// Iteration cap per step size
    #[arg(long)]
    pub inner_cap: Option<usize>,

    /// Cap on step reductions
    #[arg(long)]
    pub outer_cap: Option<usize>,
}

impl Tuning {
    fn apply(&self, cfg: &mut ReconConfig) {
        if let Some(v) = self.tmax_db {
            cfg.t_max_db = v;
        }
        if self.target_db.is_some() {
            cfg.target_precision_db = self.target_db;
        }
        if let Some(v) = self.angle_deg {
            cfg.angle_threshold_deg = v;
        }
        if self.delta_init.is_some() {
            cfg.delta_init = self.delta_init;
        }
        if let Some(v) = self.inner_cap {
            cfg.inner_iter_cap = v;
        }
        if let Some(v) = self.outer_cap {
            cfg.outer_iter_cap = v;
        }
    }
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// `n,value` file; rows with an empty value are missing
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    #[command(flatten)]
    pub tuning: Tuning,

    /// Write the iteration trace to this CSV
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,

    /// Complete `n,value` file to report the SRR against
    #[arg(long, value_name = "PATH")]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NonuniformArgs {
    /// `t,value` file of the available samples
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    /// Samples per period on the uniform grid (even)
    #[arg(long)]
    pub n: usize,

    /// Uniform grid spacing
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,

    #[command(flatten)]
    pub tuning: Tuning,

    /// Write the iteration trace to this CSV
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,

    /// Complete `n,value` file to report the SRR against
    #[arg(long, value_name = "PATH")]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UniquenessArgs {
    /// Signal length, a power of two
    #[arg(long)]
    pub n: usize,

    /// Missing positions, comma separated
    #[arg(
        long,
        value_delimiter = ',',
        required_unless_present = "available",
        conflicts_with = "available"
    )]
    pub missing: Vec<usize>,

    /// Available positions, comma separated (instead of --missing)
    #[arg(long, value_delimiter = ',')]
    pub available: Vec<usize>,

    /// Nonzero DFT positions of the recovered signal, comma separated
    #[arg(long, value_delimiter = ',')]
    pub support: Vec<usize>,

    /// Also run the exhaustive rank check (N <= 16)
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Signal length
    #[arg(long)]
    pub n: usize,

    /// Number of nonzero DFT coefficients (even)
    #[arg(long)]
    pub s: usize,

    /// Number of available samples
    #[arg(long)]
    pub m: usize,

    /// Trial index; matches trial `t` of `grid` with the same seed
    #[arg(long, default_value_t = 0)]
    pub trial: usize,

    /// Add white Gaussian noise at this SNR to the available samples
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    pub snr_db: Option<f64>,

    /// Also write the complete noise-free signal here
    #[arg(long, value_name = "PATH")]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenNonuniformArgs {
    #[command(flatten)]
    pub base: GenArgs,

    /// Uniform grid spacing
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,

    /// Largest jitter as a fraction of dt
    #[arg(long, default_value_t = 0.5)]
    pub max_jitter: f64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Signal length
    #[arg(long, default_value_t = 64)]
    pub n: usize,

    /// Even sparsities, comma separated (default: 2,4,8,.. up to N/4)
    #[arg(long, value_delimiter = ',')]
    pub s_values: Vec<usize>,

    /// Available-sample counts, comma separated (default: N/8 steps)
    #[arg(long, value_delimiter = ',')]
    pub m_values: Vec<usize>,

    /// Trials per (s, M) cell
    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    /// Input SNR of added noise
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    pub noise_snr_db: Option<f64>,

    /// Sampling of the available values
    #[arg(long, value_enum, default_value = "uniform")]
    pub mode: ModeArg,

    /// SRR above which a trial counts as a full recovery
    #[arg(
        long,
        value_name = "DB",
        default_value_t = 100.0,
        allow_hyphen_values = true
    )]
    pub full_recovery_db: f64,

    /// Sparse-recovery detection level as a fraction of N
    #[arg(long, default_value_t = 0.5)]
    pub detection_fraction: f64,

    /// Largest jitter as a fraction of the grid spacing (nonuniform mode)
    #[arg(long, default_value_t = 0.5)]
    pub max_jitter: f64,

    #[command(flatten)]
    pub tuning: Tuning,

    /// Also write per-cell means to this CSV
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SrrArgs {
    /// Complete original `n,value` file
    #[arg(long, value_name = "PATH")]
    pub reference: PathBuf,

    /// Complete reconstructed `n,value` file
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
}

const STDOUT: &str = "<stdout>";

struct Sink {
    path: PathBuf,
    writer: Box<dyn Write>,
}

impl Sink {
    fn open(output: Option<&Path>) -> Result<Self, AppError> {
        Ok(match output {
            Some(p) => Self {
                path: p.to_path_buf(),
                writer: Box::new(io::create(p)?),
            },
            None => Self {
                path: PathBuf::from(STDOUT),
                writer: Box::new(std::io::stdout().lock()),
            },
        })
    }

    fn text(&mut self, text: &str) -> Result<(), AppError> {
        self.writer
            .write_all(text.as_bytes())
            .and_then(|_| self.writer.flush())
            .map_err(|e| AppError::io(&self.path, e))
    }

    fn json<T: Serialize>(&mut self, value: &T) -> Result<(), AppError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|source| AppError::Json {
            context: self.path.display().to_string(),
            source,
        })?;
        text.push('\n');
        self.text(&text)
    }
}

/// Overlays the keys of the `--config` object onto `base`.
fn merge_config<T: Serialize + serde::de::DeserializeOwned>(
    base: T,
    path: Option<&Path>,
) -> Result<T, AppError> {
    let Some(path) = path else {
        return Ok(base);
    };
    let json_err = |source| AppError::Json {
        context: path.display().to_string(),
        source,
    };
    let file: Value = serde_json::from_reader(io::open(path)?).map_err(json_err)?;
    let Value::Object(overrides) = file else {
        return Err(AppError::format(path, "expected a JSON object"));
    };
    let mut merged = serde_json::to_value(base).map_err(json_err)?;
    let target = merged
        .as_object_mut()
        .expect("settings serialize to an object");
    for (key, value) in overrides {
        if !target.contains_key(&key) {
            return Err(AppError::format(path, format!("unknown setting `{key}`")));
        }
        target.insert(key, value);
    }
    serde_json::from_value(merged).map_err(json_err)
}

fn recon_config(cli: &Cli, base: ReconConfig, tuning: &Tuning) -> Result<ReconConfig, AppError> {
    let mut cfg = merge_config(base, cli.config.as_deref())?;
    tuning.apply(&mut cfg);
    cfg.validate().flag("--config/--tmax-db/--angle-deg")?;
    Ok(cfg)
}

#[derive(Serialize)]
struct ReconReport<'a> {
    values: &'a [f64],
    iterations: usize,
    outer_iterations: usize,
    converged: bool,
    inner_cap_hits: usize,
    final_tr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    srr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    imag_residue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition_estimate: Option<f64>,
}

fn emit_reconstruction(
    cli: &Cli,
    result: &ReconResult,
    trace: Option<&Path>,
    reference: Option<&Path>,
    extra: Option<(f64, f64)>,
) -> Result<(), AppError> {
    if let Some(path) = trace {
        io::write_trace(io::create(path)?, path, &result.trace)?;
    }
    let srr_db = match reference {
        Some(path) => {
            Some(srr(&io::read_signal(path)?, &result.reconstructed).flag("--reference")?)
        }
        None => None,
    };
    let report = ReconReport {
        values: &result.reconstructed,
        iterations: result.iterations,
        outer_iterations: result.outer_iterations,
        converged: result.converged,
        inner_cap_hits: result.inner_cap_hits,
        final_tr_db: result.final_tr_db(),
        srr_db,
        imag_residue: extra.map(|e| e.0),
        condition_estimate: extra.map(|e| e.1),
    };
    if !result.converged {
        eprintln!(
            "warning: stopping level not reached ({} iterations, {} inner-cap hits)",
            result.iterations, result.inner_cap_hits
        );
    }
    let mut sink = Sink::open(cli.output.as_deref())?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => io::write_signal(sink.writer, &sink.path, &result.reconstructed),
        Format::Json => sink.json(&report),
        Format::Text => {
            let mut text = format!(
                "iterations: {}\nstep reductions: {}\nconverged: {}\ninner-cap hits: {}\n",
                report.iterations, report.outer_iterations, report.converged, report.inner_cap_hits
            );
            if let Some(tr) = report.final_tr_db {
                text += &format!("final T_r: {tr:.2} dB\n");
            }
            if let Some(v) = srr_db {
                text += &format!("SRR: {v:.2} dB\n");
            }
            if let Some((im, cond)) = extra {
                text +=
                    &format!("condition estimate: {cond:.3e}\ndropped imaginary part: {im:.3e}\n");
            }
            sink.text(&text)
        }
    }
}

fn cmd_reconstruct(cli: &Cli, args: &ReconstructArgs) -> Result<(), AppError> {
    let cfg = recon_config(cli, ReconConfig::default(), &args.tuning)?;
    let partial = io::read_partial_signal(&args.input)?;
    let result = reconstruct(&partial, &cfg)?;
    emit_reconstruction(
        cli,
        &result,
        args.trace.as_deref(),
        args.reference.as_deref(),
        None,
    )
}

fn cmd_nonuniform(cli: &Cli, args: &NonuniformArgs) -> Result<(), AppError> {
    let cfg = recon_config(cli, ReconConfig::default(), &args.tuning)?;
    if !(args.dt > 0.0 && args.dt.is_finite()) {
        return Err(AppError::usage("--dt", "must be positive"));
    }
    let points = io::read_points(io::open(&args.input)?, &args.input)?;
    let samples = NonuniformSample::from_instants(args.n, args.dt, &points)
        .map_err(|e| AppError::format(&args.input, e.to_string()))?;
    let out = reconstruct_nonuniform(&samples, args.n, args.dt, &cfg).map_err(|e| match e {
        e if e.is_numerical() => AppError::Core(e),
        e => AppError::format(&args.input, e.to_string()),
    })?;
    emit_reconstruction(
        cli,
        &out.result,
        args.trace.as_deref(),
        args.reference.as_deref(),
        Some((out.imag_residue, out.condition_estimate)),
    )
}

#[derive(Serialize)]
struct UniquenessOutput<'a> {
    #[serde(flatten)]
    report: &'a UniquenessReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_unique: Option<bool>,
}

pub fn uniqueness_table(report: &UniquenessReport) -> String {
    let mut out = format!(
        "N = {}, s = {}, missing = {}\n{:>3} {:>8} {:>10} {:>8}\n",
        report.len,
        report.sparsity,
        report.rows.first().map_or(0, |r| r.q_stride),
        "h",
        "Q(2^h)",
        "S(2^(r-h))",
        "margin"
    );
    for row in &report.rows {
        out += &format!(
            "{:>3} {:>8} {:>10} {:>8}\n",
            row.h, row.q_stride, row.s_term, row.margin
        );
    }
    out += &format!(
        "verdict: {}\n",
        if report.unique {
            "unique"
        } else {
            "not certified"
        }
    );
    match report.worst_case_max_s {
        Some(s) => out += &format!("any signal with s <= {s} is unique for this mask\n"),
        None => out += "no sparsity is certified for every signal on this mask\n",
    }
    out
}

fn cmd_uniqueness(cli: &Cli, args: &UniquenessArgs) -> Result<(), AppError> {
    let set = if args.available.is_empty() {
        SampleSet::from_missing(args.n, args.missing.iter().copied()).flag("--missing")?
    } else {
        SampleSet::from_available(args.n, args.available.iter().copied()).flag("--available")?
    };
    let report = check_uniqueness(&args.support, &set).map_err(|e| match e {
        gradrec_core::Error::NotPowerOfTwo(_) => AppError::Flag {
            flag: "--n",
            source: e,
        },
        e => AppError::Flag {
            flag: "--support",
            source: e,
        },
    })?;
    let oracle = if args.oracle {
        Some(oracle_unique(&args.support, &set, args.support.len()).flag("--oracle")?)
    } else {
        None
    };
    let mut sink = Sink::open(cli.output.as_deref())?;
    match cli.format.unwrap_or(Format::Text) {
        Format::Json => sink.json(&UniquenessOutput {
            report: &report,
            oracle_unique: oracle,
        }),
        Format::Csv => {
            let mut text = String::from("h,Q,S,margin\n");
            for r in &report.rows {
                text += &format!("{},{},{},{}\n", r.h, r.q_stride, r.s_term, r.margin);
            }
            sink.text(&text)
        }
        Format::Text => {
            let mut text = uniqueness_table(&report);
            if let Some(o) = oracle {
                text += &format!("rank check: {}\n", if o { "unique" } else { "not unique" });
            }
            sink.text(&text)
        }
    }
}

fn gen_spec(cli: &Cli, args: &GenArgs, mode: Mode, max_jitter: f64) -> GridSpec {
    GridSpec {
        n: args.n,
        seed: cli.seed,
        noise_snr_db: args.snr_db,
        mode,
        max_jitter,
        ..GridSpec::for_len(args.n)
    }
}

fn gen_instance(spec: &GridSpec, args: &GenArgs) -> Result<TrialInstance, AppError> {
    if !args.s.is_multiple_of(2) || args.s == 0 {
        return Err(AppError::usage("--s", "must be a positive even number"));
    }
    if args.m == 0 || args.m >= args.n {
        return Err(AppError::usage("--m", "must satisfy 0 < M < N"));
    }
    trial_instance(spec, args.s, args.m, args.trial).flag("--n/--s/--m")
}

#[derive(Serialize)]
struct GenOutput<'a> {
    truth: &'a [f64],
    support: &'a [usize],
    available: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    observed: Option<Vec<Option<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<&'a [NonuniformSample]>,
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<(), AppError> {
    let spec = gen_spec(cli, args, Mode::Uniform, 0.5);
    let inst = gen_instance(&spec, args)?;
    let Observation::Uniform(partial) = &inst.observation else {
        unreachable!("uniform spec yields uniform observations")
    };
    if let Some(path) = &args.truth {
        io::write_signal(io::create(path)?, path, &inst.truth.signal)?;
    }
    let mut sink = Sink::open(cli.output.as_deref())?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let mut observed = vec![None; args.n];
            for (&n, &v) in partial
                .sample_set()
                .available()
                .iter()
                .zip(partial.values())
            {
                observed[n] = Some(v);
            }
            sink.json(&GenOutput {
                truth: &inst.truth.signal,
                support: &inst.truth.support,
                available: inst.sample_set.available(),
                observed: Some(observed),
                samples: None,
            })
        }
        _ => io::write_partial_signal(sink.writer, &sink.path, partial),
    }
}

fn cmd_gen_nonuniform(cli: &Cli, args: &GenNonuniformArgs) -> Result<(), AppError> {
    if !(args.dt > 0.0 && args.dt.is_finite()) {
        return Err(AppError::usage("--dt", "must be positive"));
    }
    if !(0.0..=0.5).contains(&args.max_jitter) {
        return Err(AppError::usage("--max-jitter", "must lie in [0, 0.5]"));
    }
    if !args.base.n.is_multiple_of(2) {
        return Err(AppError::usage("--n", "must be even"));
    }
    let spec = gen_spec(cli, &args.base, Mode::Nonuniform, args.max_jitter);
    let inst = gen_instance(&spec, &args.base)?;
    let Observation::Nonuniform(unit) = &inst.observation else {
        unreachable!("nonuniform spec yields nonuniform observations")
    };
    let samples: Vec<NonuniformSample> = unit
        .iter()
        .map(|p| NonuniformSample {
            t: p.t * args.dt,
            ..*p
        })
        .collect();
    if let Some(path) = &args.base.truth {
        io::write_signal(io::create(path)?, path, &inst.truth.signal)?;
    }
    let mut sink = Sink::open(cli.output.as_deref())?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Json => sink.json(&GenOutput {
            truth: &inst.truth.signal,
            support: &inst.truth.support,
            available: inst.sample_set.available(),
            observed: None,
            samples: Some(&samples),
        }),
        _ => io::write_points(sink.writer, &sink.path, &samples),
    }
}

fn cmd_grid(cli: &Cli, args: &GridArgs) -> Result<(), AppError> {
    let mut spec = GridSpec::for_len(args.n);
    spec.seed = cli.seed;
    if !args.s_values.is_empty() {
        spec.s_values = args.s_values.clone();
    }
    if !args.m_values.is_empty() {
        spec.m_values = args.m_values.clone();
    }
    spec.trials = args.trials;
    spec.noise_snr_db = args.noise_snr_db;
    spec.mode = args.mode.into();
    spec.full_recovery_threshold_db = args.full_recovery_db;
    spec.detection_fraction = args.detection_fraction;
    spec.max_jitter = args.max_jitter;
    spec.recon = recon_config(cli, spec.recon.clone(), &args.tuning)?;
    spec.validate().map_err(|e| match &e {
        gradrec_core::Error::InvalidParameter { name, .. } => AppError::Flag {
            flag: match *name {
                "n" => "--n",
                "s_values" => "--s-values",
                "m_values" => "--m-values",
                "trials" => "--trials",
                "noise_snr_db" => "--noise-snr-db",
                "full_recovery_threshold_db" => "--full-recovery-db",
                "detection_fraction" => "--detection-fraction",
                "max_jitter" => "--max-jitter",
                _ => "--config",
            },
            source: e,
        },
        _ => AppError::Core(e),
    })?;
    if cli.jobs == Some(0) {
        return Err(AppError::usage("--jobs", "must be at least 1"));
    }
    let records = run_grid(&spec, cli.jobs).flag("--jobs")?;
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: s={} M={} trial={}: {}",
            r.s,
            r.m,
            r.trial,
            r.error.as_deref().unwrap_or_default()
        );
    }
    let cells = aggregate(&records);
    if let Some(path) = &args.summary {
        io::write_summaries(io::create(path)?, path, &cells)?;
    }
    let mut sink = Sink::open(cli.output.as_deref())?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => io::write_records(sink.writer, &sink.path, &records),
        Format::Json => {
            #[derive(Serialize)]
            struct GridOutput<'a> {
                spec: &'a GridSpec,
                records: &'a [crate::harness::TrialRecord],
                cells: &'a [crate::harness::CellSummary],
            }
            sink.json(&GridOutput {
                spec: &spec,
                records: &records,
                cells: &cells,
            })
        }
        Format::Text => {
            let mut text = format!(
                "{:>4} {:>4} {:>12} {:>10} {:>10} {:>12}\n",
                "s", "M", "mean SRR dB", "recovery %", "mean iter", "mean time s"
            );
            for c in &cells {
                text += &format!(
                    "{:>4} {:>4} {:>12.2} {:>10.1} {:>10.1} {:>12.5}\n",
                    c.s, c.m, c.mean_srr_db, c.recovery_pct, c.mean_iter, c.mean_elapsed_s
                );
            }
            sink.text(&text)
        }
    }
}

fn cmd_srr(cli: &Cli, args: &SrrArgs) -> Result<(), AppError> {
    let reference = io::read_signal(&args.reference)?;
    let input = io::read_signal(&args.input)?;
    let value = srr(&reference, &input).flag("--input")?;
    let mut sink = Sink::open(cli.output.as_deref())?;
    match cli.format.unwrap_or(Format::Text) {
        Format::Text => sink.text(&format!("{value}\n")),
        Format::Csv => sink.text(&format!("srr_db\n{value}\n")),
        Format::Json => sink.json(&serde_json::json!({ "srr_db": value })),
    }
}

pub fn run(cli: &Cli) -> Result<(), AppError> {
    match &cli.command {
        Command::Reconstruct(a) => cmd_reconstruct(cli, a),
        Command::Nonuniform(a) => cmd_nonuniform(cli, a),
        Command::Uniqueness(a) => cmd_uniqueness(cli, a),
        Command::Gen(a) => cmd_gen(cli, a),
        Command::GenNonuniform(a) => cmd_gen_nonuniform(cli, a),
        Command::Grid(a) => cmd_grid(cli, a),
        Command::Srr(a) => cmd_srr(cli, a),
    }
}
