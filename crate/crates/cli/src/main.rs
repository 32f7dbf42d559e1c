//! `evoldpc` command-line tool.
//!
//! Exit codes: 0 on success, 2 for invalid configuration or input files,
//! 3 for I/O failures. Progress goes to standard error; standard output only
//! carries machine-readable results.

mod dense;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use evoldpc::analysis::{self, EdgeDistribution, JFunction};
use evoldpc::codes::alist::{parse_alist, to_alist, AlistError};
use evoldpc::eval::{self, StoppingRule};
use evoldpc::genalg::{self, GaConfig, GaError, RunOptions};
use evoldpc::{ChannelKind, DecoderConfig, OperatingPoint, ParityCheckMatrix, TemplateKind};

#[derive(Parser)]
#[command(name = "evoldpc", version, about = "Genetic design and analysis of short LDPC codes")]
struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = "EVOLDPC_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the genetic optimizer.
    Design(DesignArgs),
    /// Simulate BLER/BER over an Eb/N0 grid.
    Evaluate(EvaluateArgs),
    /// Offline code analysis.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Convert between alist and dense 0/1 text.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct ChannelFlags {
    #[arg(long, value_parser = parse_channel)]
    channel: Option<ChannelKind>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DesignArgs {
    /// JSON optimizer configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for checkpoints, log and best matrix.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: ChannelFlags,
    /// Design Eb/N0 in dB.
    #[arg(long)]
    ebno: Option<f64>,
    #[arg(long, value_parser = parse_template)]
    template: Option<TemplateKind>,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// Continue from the snapshot in the output directory.
    #[arg(long)]
    resume: bool,
    /// Suppress per-epoch progress lines.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Parity-check matrix in alist format.
    alist: PathBuf,
    /// JSON evaluation configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated Eb/N0 grid in dB.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ebno: Option<Vec<f64>>,
    #[command(flatten)]
    common: ChannelFlags,
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    /// Output directory; CSV goes to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Minimum distance.
    Dmin(DminArgs),
    /// EXIT curves and decoding threshold.
    Exit(ExitArgs),
    /// Degree and cycle diagnostics.
    Structure(StructureArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DminMethod {
    /// Exhaustive when k is within the limit, bounded search otherwise.
    Auto,
    Exact,
    Bound,
}

#[derive(Args)]
struct DminArgs {
    alist: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    method: DminMethod,
    /// Largest dimension for exhaustive enumeration.
    #[arg(long, default_value_t = analysis::DEFAULT_EXACT_LIMIT)]
    limit: usize,
    /// Codeword budget of the bounded search.
    #[arg(long, default_value_t = 1_000_000_000)]
    effort: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExitArgs {
    /// Take the degree distributions from this matrix instead of a regular ensemble.
    alist: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    vn_degree: usize,
    #[arg(long, default_value_t = 6)]
    cn_degree: usize,
    /// Eb/N0 of the variable-node curve; defaults to the computed threshold.
    #[arg(long, allow_negative_numbers = true)]
    ebno: Option<f64>,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct StructureArgs {
    alist: PathBuf,
    /// Cycles up to this length count as short for degree-2 nodes.
    #[arg(long, default_value_t = analysis::DEFAULT_SHORT_CYCLE_BOUND)]
    short_cycle: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixFormat {
    Alist,
    Dense,
}

#[derive(Args)]
struct ConvertArgs {
    input: PathBuf,
    output: PathBuf,
    /// Input format; inferred from the extension when absent.
    #[arg(long, value_enum)]
    from: Option<MatrixFormat>,
    /// Output format; inferred from the extension when absent.
    #[arg(long, value_enum)]
    to: Option<MatrixFormat>,
}

/// Parameters of `evaluate`, as read from `--config` and echoed to the
/// output directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluateConfig {
    #[serde(default = "default_channel")]
    channel: ChannelKind,
    #[serde(default)]
    ebno_db: Vec<f64>,
    #[serde(default)]
    decoder: DecoderConfig,
    #[serde(default)]
    budget: StoppingRule,
    #[serde(default)]
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    code: Option<PathBuf>,
}

fn default_channel() -> ChannelKind {
    ChannelKind::BiAwgn
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    s.parse()
}

fn parse_template(s: &str) -> Result<TemplateKind, String> {
    s.parse()
}

/// A failure mapped to an exit code.
enum Failure {
    Invalid(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Invalid(e.into())
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(anyhow!("{}: {e}", path.display()))
}

impl From<GaError> for Failure {
    fn from(e: GaError) -> Self {
        match e {
            GaError::Io(_) => Failure::Io(e.into()),
            GaError::Alist(AlistError::Io(_)) => Failure::Io(e.into()),
            other => Failure::Invalid(other.into()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(io_err(path))
}

fn create_dir(path: &Path) -> CmdResult {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn read_matrix(path: &Path) -> Result<ParityCheckMatrix, Failure> {
    let text = read_text(path)?;
    parse_alist(&text).map_err(|e| invalid(anyhow!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| invalid(anyhow!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Writes the resolved parameters next to the results.
fn echo_config<T: Serialize>(dir: &Path, cfg: &T) -> CmdResult {
    write_text(&dir.join("config.json"), &to_json(cfg))
}

fn emit(text: &str) -> CmdResult {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Io(e.into()))
}

fn cmd_design(a: DesignArgs) -> CmdResult {
    let mut cfg: GaConfig = read_json(&a.config)?;
    if let Some(s) = a.common.seed {
        cfg.master_seed = s;
    }
    if let Some(k) = a.common.channel {
        cfg.design.kind = k;
    }
    if let Some(e) = a.ebno {
        cfg.design.ebno_db = e;
    }
    if let Some(it) = a.common.max_iter {
        cfg.decoder.max_iterations = it;
    }
    if let Some(t) = a.template {
        cfg.template = t;
    }
    if let Some(e) = a.max_epochs {
        cfg.max_epochs = e;
    }
    cfg.validate()?;
    create_dir(&a.out)?;
    echo_config(&a.out, &cfg)?;
    let opts = RunOptions { checkpoint_dir: Some(a.out.clone()), keep_history: false, progress: !a.quiet };
    let result = if a.resume {
        genalg::resume(&cfg, &a.out, &opts)?
    } else {
        genalg::run(&cfg, &opts)?
    };
    let best = result.best.fitness.expect("evaluated");
    let summary = serde_json::json!({
        "epochs": result.log.len(),
        "best_id": result.best.id,
        "best_bler": best.bler,
        "best_edges": best.edges,
        "best_n_it_avg": best.n_it_avg,
        "best_alist": a.out.join("best.alist"),
    });
    emit(&to_json(&summary))
}

fn cmd_evaluate(a: EvaluateArgs) -> CmdResult {
    let mut cfg = match &a.config {
        Some(p) => read_json::<EvaluateConfig>(p)?,
        None => EvaluateConfig {
            channel: ChannelKind::BiAwgn,
            ebno_db: Vec::new(),
            decoder: DecoderConfig::default(),
            budget: StoppingRule::default(),
            seed: 0,
            code: None,
        },
    };
    if let Some(grid) = a.ebno {
        cfg.ebno_db = grid;
    }
    if let Some(k) = a.common.channel {
        cfg.channel = k;
    }
    if let Some(it) = a.common.max_iter {
        cfg.decoder.max_iterations = it;
    }
    if let Some(s) = a.common.seed {
        cfg.seed = s;
    }
    if let Some(e) = a.min_errors {
        cfg.budget.min_block_errors = e;
    }
    if let Some(f) = a.max_frames {
        cfg.budget.max_frames = f;
    }
    cfg.code = Some(a.alist.clone());
    if cfg.ebno_db.is_empty() {
        return Err(invalid(anyhow!("no Eb/N0 points given (use --ebno)")));
    }
    cfg.decoder.validate().map_err(invalid)?;
    cfg.budget.validate().map_err(invalid)?;
    let h = read_matrix(&a.alist)?;
    let points: Vec<OperatingPoint> = cfg.ebno_db.iter().map(|&e| OperatingPoint::new(cfg.channel, e)).collect();
    let mut reports = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let seed = evoldpc::seed::derive(cfg.seed, &[i as u64]);
        let r = eval::evaluate(&h, p, &cfg.decoder, &cfg.budget, seed).map_err(invalid)?;
        eprintln!(
            "Eb/N0 {:>6.2} dB  BLER {:.3e}  BER {:.3e}  N_it {:.2}  frames {}",
            r.ebno_db, r.bler, r.ber, r.n_it_avg, r.frames_sent
        );
        reports.push(r);
    }
    let mut csv = Vec::new();
    eval::write_csv(&reports, &mut csv).map_err(invalid)?;
    let csv = String::from_utf8(csv).expect("CSV is UTF-8");
    match &a.out {
        Some(dir) => {
            create_dir(dir)?;
            echo_config(dir, &cfg)?;
            write_text(&dir.join("eval.csv"), &csv)
        }
        None => emit(&csv),
    }
}

fn cmd_dmin(a: DminArgs) -> CmdResult {
    let h = read_matrix(&a.alist)?;
    let k = h.n() - h.rank();
    let exact = match a.method {
        DminMethod::Exact => true,
        DminMethod::Bound => false,
        DminMethod::Auto => k <= a.limit,
    };
    eprintln!("n = {}, k = {k}, {} search", h.n(), if exact { "exhaustive" } else { "bounded" });
    let d = if exact {
        analysis::dmin_exact_with_limit(&h, a.limit)
    } else {
        analysis::dmin_bound(&h, a.effort)
    }
    .map_err(invalid)?;
    let json = to_json(&d);
    match &a.out {
        Some(dir) => {
            create_dir(dir)?;
            let echo = serde_json::json!({
                "code": a.alist, "method": a.method, "limit": a.limit, "effort": a.effort,
            });
            echo_config(dir, &echo)?;
            write_text(&dir.join("dmin.json"), &json)
        }
        None => emit(&json),
    }
}

fn cmd_exit(a: ExitArgs) -> CmdResult {
    let (vn, cn) = match &a.alist {
        Some(p) => EdgeDistribution::of_code(&read_matrix(p)?.profile()).map_err(invalid)?,
        None => {
            if a.vn_degree < 2 || a.cn_degree < 2 {
                return Err(invalid(anyhow!("degrees must be at least 2")));
            }
            (EdgeDistribution::regular(a.vn_degree), EdgeDistribution::regular(a.cn_degree))
        }
    };
    if a.points < 2 {
        return Err(invalid(anyhow!("need at least 2 grid points")));
    }
    let rate = EdgeDistribution::design_rate(&vn, &cn);
    if rate.is_nan() || rate <= 0.0 {
        return Err(invalid(anyhow!("degree distributions give a non-positive design rate {rate}")));
    }
    let jf = JFunction::default();
    let threshold = analysis::decoding_threshold(&jf, &vn, &cn, -5.0, 20.0, 1e-4);
    match threshold {
        Some(t) => eprintln!("decoding threshold {t:.4} dB (design rate {rate:.4})"),
        None => eprintln!("no open tunnel below 20 dB"),
    }
    let ebno = a.ebno.or(threshold).unwrap_or(20.0);
    let grid: Vec<f64> = (0..a.points).map(|i| i as f64 / (a.points - 1) as f64).collect();
    let curves = [
        analysis::exit_vnd(&jf, &vn, analysis::sigma_ch(ebno, rate), &grid),
        analysis::exit_cnd(&jf, &cn, &grid),
    ];
    let mut csv = Vec::new();
    analysis::write_exit_csv(&curves, &mut csv).map_err(invalid)?;
    let csv = String::from_utf8(csv).expect("CSV is UTF-8");
    match &a.out {
        Some(dir) => {
            create_dir(dir)?;
            let echo = serde_json::json!({
                "code": a.alist, "vn": vn, "cn": cn, "ebno_db": ebno, "points": a.points,
            });
            echo_config(dir, &echo)?;
            write_text(&dir.join("exit.csv"), &csv)?;
            let summary = serde_json::json!({ "threshold_db": threshold, "design_rate": rate, "ebno_db": ebno });
            emit(&to_json(&summary))
        }
        None => emit(&csv),
    }
}

fn cmd_structure(a: StructureArgs) -> CmdResult {
    let h = read_matrix(&a.alist)?;
    let r = analysis::structure_report(&h, a.short_cycle);
    if !r.degree1_spread() {
        eprintln!("check nodes with several degree-1 neighbours: {:?}", r.flagged_cns);
    }
    let mut csv = Vec::new();
    r.write_csv(&mut csv).map_err(invalid)?;
    let csv = String::from_utf8(csv).expect("CSV is UTF-8");
    let json = to_json(&r);
    match &a.out {
        Some(dir) => {
            create_dir(dir)?;
            let echo = serde_json::json!({ "code": a.alist, "short_cycle_bound": a.short_cycle });
            echo_config(dir, &echo)?;
            write_text(&dir.join("structure.json"), &json)?;
            write_text(&dir.join("structure.csv"), &csv)
        }
        None => emit(match a.format {
            ReportFormat::Json => &json,
            ReportFormat::Csv => &csv,
        }),
    }
}

fn infer_format(path: &Path) -> MatrixFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("alist") => MatrixFormat::Alist,
        _ => MatrixFormat::Dense,
    }
}

fn cmd_convert(a: ConvertArgs) -> CmdResult {
    let from = a.from.unwrap_or_else(|| infer_format(&a.input));
    let to = a.to.unwrap_or_else(|| infer_format(&a.output));
    let text = read_text(&a.input)?;
    let h = match from {
        MatrixFormat::Alist => parse_alist(&text).map_err(|e| invalid(anyhow!("{}: {e}", a.input.display())))?,
        MatrixFormat::Dense => {
            dense::parse_dense(&text).map_err(|e| invalid(anyhow!("{}: {e}", a.input.display())))?
        }
    };
    let out = match to {
        MatrixFormat::Alist => to_alist(&h),
        MatrixFormat::Dense => dense::to_dense_text(&h),
    };
    write_text(&a.output, &out)
}

fn run(cli: Cli) -> CmdResult {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(invalid(anyhow!("--workers must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().map_err(invalid)?;
    }
    match cli.command {
        Command::Design(a) => cmd_design(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Analyze(AnalyzeCommand::Dmin(a)) => cmd_dmin(a),
        Command::Analyze(AnalyzeCommand::Exit(a)) => cmd_exit(a),
        Command::Analyze(AnalyzeCommand::Structure(a)) => cmd_structure(a),
        Command::Convert(a) => cmd_convert(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = f.code();
            let (Failure::Invalid(e) | Failure::Io(e)) = f;
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
