//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime or numerical failure, 2 on usage
//! errors. A `--config FILE` of `key = value` lines (keys are long flag
//! names) is spliced in before the explicit flags, which therefore win.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel::Normalization;
use crate::code::CodeSpec;
use crate::construct::{Construction, MonteCarlo};
use crate::encoder::encode;
use crate::error::{Error, Result};
use crate::scd::{Decoder, Domain};
use crate::sim::{self, Criterion, SimOptions, StoppingRule};

#[derive(Debug, Parser)]
#[command(
    name = "polarcc",
    version,
    about = "Polar code construction, coding and BI-AWGN simulation"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a frozen set and write it as a .pcf file.
    Construct(ConstructArgs),
    /// Encode a message bit file into a codeword bit file.
    Encode(EncodeArgs),
    /// Decode a file of channel LLRs into message bits.
    Decode(DecodeArgs),
    /// Simulate BER/BLER of one code over an Eb/N0 grid.
    Simulate(SimulateArgs),
    /// Build codes over a design-SNR grid, simulate each, and pick the best.
    Sweep(SweepArgs),
    /// Simulate several constructions, each at its own design SNR.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// `key = value` defaults; explicit flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master random seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=1024))]
    pub threads: u32,
    /// Use amplitude √S instead of √(2S) in simulated channels.
    #[arg(long)]
    pub legacy_sqrt_s: bool,
}

#[derive(Debug, Args)]
pub struct MethodArgs {
    /// Alphabet size of the transition-matrix construction (PCC-2).
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(2..))]
    pub mu: u32,
    /// Monte-Carlo trials of the genie construction (PCC-1).
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub mc_size: u64,
}

#[derive(Debug, Args)]
pub struct CodeShape {
    /// Block length N.
    #[arg(long)]
    pub n: usize,
    /// Information bits K.
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct StopArgs {
    /// Stop a point after this many block errors.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_block_errors: u64,
    /// Stop a point after this many trials regardless.
    #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_trials: u64,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Construction: 0 Bhattacharyya, 1 Monte-Carlo, 2 transition matrix, 3 Gaussian approximation.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
    pub pcc: u8,
    #[command(flatten)]
    pub shape: CodeShape,
    /// Design SNR in dB (R·Eb/N0).
    #[arg(long, allow_negative_numbers = true)]
    pub design_snr_db: f64,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the per-index metrics as CSV.
    #[arg(long, value_name = "FILE")]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Code file (.pcf).
    #[arg(long, value_name = "PCF")]
    pub code: PathBuf,
    /// Message bits: ASCII 0/1 or hex with a 0x prefix.
    #[arg(long)]
    pub input: PathBuf,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
    /// `key = value` defaults; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Code file (.pcf).
    #[arg(long, value_name = "PCF")]
    pub code: PathBuf,
    /// Channel LLRs, one per line; positive favours 0.
    #[arg(long)]
    pub llr: PathBuf,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
    /// `key = value` defaults; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Code to simulate; alternatively give --pcc, --n, --k and --design-snr-db.
    #[arg(long, value_name = "PCF", conflicts_with_all = ["pcc", "n", "k", "design_snr_db"])]
    pub code: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3), requires_all = ["n", "k", "design_snr_db"])]
    pub pcc: Option<u8>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub design_snr_db: Option<f64>,
    /// Eb/N0 grid in dB: `a:step:b` or a comma list.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub snr: Grid,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub stop: StopArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    /// Least BLER at --select-snr-db.
    BlerAt,
    /// Least area under log10 BLER across the grid.
    LogArea,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Construction: 0 Bhattacharyya, 1 Monte-Carlo, 2 transition matrix, 3 Gaussian approximation.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
    pub pcc: u8,
    #[command(flatten)]
    pub shape: CodeShape,
    /// Design-SNR grid in dB: `a:step:b` or a comma list.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub design_snrs: Grid,
    /// Evaluation Eb/N0 grid in dB.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub snr: Grid,
    #[arg(long, value_enum, default_value_t = CriterionArg::BlerAt)]
    pub criterion: CriterionArg,
    /// Evaluation point of the bler-at criterion; defaults to the middle of the grid.
    #[arg(long, allow_negative_numbers = true)]
    pub select_snr_db: Option<f64>,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub stop: StopArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub shape: CodeShape,
    /// Constructions with their design SNRs, e.g. `0=1.0,1=0.5,2=1,3=2`.
    #[arg(long, value_parser = parse_designs, allow_hyphen_values = true)]
    pub designs: Designs,
    /// Eb/N0 grid in dB.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub snr: Grid,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub stop: StopArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct Designs(pub Vec<(u8, f64)>);

/// Rounds away the drift of repeated step addition.
fn snap(x: f64) -> f64 {
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("not finite: {s:?}"));
    }
    Ok(v)
}

/// Parses `a:step:b` (inclusive) or `x,y,z`; the result must be strictly ascending.
pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let v: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range must be a:step:b, got {s:?}"));
        }
        let (a, step, b) = (
            parse_number(parts[0])?,
            parse_number(parts[1])?,
            parse_number(parts[2])?,
        );
        if step <= 0.0 || b < a {
            return Err(format!("range {s:?} needs step > 0 and a <= b"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        if count > 10_000 {
            return Err(format!("range {s:?} has too many points"));
        }
        (0..count).map(|i| snap(a + i as f64 * step)).collect()
    } else {
        s.split(',')
            .map(parse_number)
            .collect::<std::result::Result<_, _>>()?
    };
    if v.is_empty() {
        return Err("grid is empty".into());
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("grid {s:?} is not strictly ascending"));
    }
    Ok(Grid(v))
}

pub fn parse_designs(s: &str) -> std::result::Result<Designs, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let (m, snr) = item
            .split_once('=')
            .ok_or_else(|| format!("expected METHOD=SNR, got {item:?}"))?;
        let m = m.trim();
        let m = m
            .strip_prefix("PCC")
            .or_else(|| m.strip_prefix("pcc"))
            .unwrap_or(m);
        let id: u8 = m
            .parse()
            .ok()
            .filter(|&i| i <= 3)
            .ok_or_else(|| format!("unknown construction {m:?}"))?;
        out.push((id, parse_number(snr)?));
    }
    Ok(Designs(out))
}

fn construction(pcc: u8, method: &MethodArgs, common: &CommonArgs) -> Construction {
    match pcc {
        0 => Construction::Pcc0,
        1 => Construction::Pcc1(MonteCarlo {
            trials: method.mc_size,
            seed: common.seed,
            threads: common.threads as usize,
            normalization: normalization(common),
            domain: Domain::Log,
        }),
        2 => Construction::Pcc2 {
            mu: method.mu as usize,
        },
        _ => Construction::Pcc3,
    }
}

fn normalization(common: &CommonArgs) -> Normalization {
    if common.legacy_sqrt_s {
        Normalization::LegacySqrtS
    } else {
        Normalization::Standard
    }
}

fn sim_options(stop: &StopArgs, common: &CommonArgs) -> SimOptions {
    SimOptions {
        rule: StoppingRule {
            min_block_errors: stop.min_block_errors,
            max_trials: stop.max_trials,
        },
        threads: common.threads as usize,
        normalization: normalization(common),
        domain: Domain::Log,
        noiseless: false,
    }
}

fn method_params(pcc: u8, m: &MethodArgs) -> String {
    match pcc {
        1 => format!(" mc_size={}", m.mc_size),
        2 => format!(" mu={}", m.mu),
        _ => String::new(),
    }
}

// threads is left out: it never changes results, and outputs of runs that
// differ only in it stay byte-identical
fn common_params(c: &CommonArgs) -> String {
    format!("seed={} legacy_sqrt_s={}", c.seed, c.legacy_sqrt_s)
}

fn stop_params(s: &StopArgs) -> String {
    format!(
        "min_block_errors={} max_trials={}",
        s.min_block_errors, s.max_trials
    )
}

fn grid_str(g: &[f64]) -> String {
    g.iter()
        .map(|&x| sim::fmt_g(x))
        .collect::<Vec<_>>()
        .join(",")
}

fn provenance(command: &str, resolved: String) -> Vec<String> {
    vec![
        format!("polarcc {}", env!("CARGO_PKG_VERSION")),
        format!("{command} {resolved}"),
    ]
}

fn read_code(path: &Path) -> Result<CodeSpec> {
    let f = fs::File::open(path).map_err(|e| io_context(e, path))?;
    CodeSpec::read_pcf(BufReader::new(f))
}

fn io_context(e: io::Error, path: &Path) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_context(e, path))
}

/// Parses a bit file: `0`/`1` characters (whitespace ignored) or `0x` hex,
/// most significant bit first. Hex may carry up to three leading zero pad
/// bits above `expected`.
pub fn parse_bits(text: &str, expected: usize) -> Result<Vec<u8>> {
    let compact: String = text.split_whitespace().collect();
    let bits: Vec<u8> = if let Some(hex) = compact
        .strip_prefix("0x")
        .or_else(|| compact.strip_prefix("0X"))
    {
        let mut v = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let d = c
                .to_digit(16)
                .ok_or_else(|| Error::Domain(format!("bad hex digit {c:?}")))?;
            v.extend((0..4).rev().map(|s| ((d >> s) & 1) as u8));
        }
        let pad = v.len().saturating_sub(expected);
        if pad < 4 && v[..pad].iter().all(|&b| b == 0) {
            v.drain(..pad);
        }
        v
    } else {
        compact
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Domain(format!("bad bit character {c:?}"))),
            })
            .collect::<Result<_>>()?
    };
    if bits.len() != expected {
        return Err(Error::Domain(format!(
            "expected {expected} bits, found {}",
            bits.len()
        )));
    }
    Ok(bits)
}

pub fn format_bits(bits: &[u8]) -> String {
    let mut s: String = bits
        .iter()
        .map(|&b| if b == 0 { '0' } else { '1' })
        .collect();
    s.push('\n');
    s
}

/// Parses one LLR per line; blank lines and `#` comments are skipped.
pub fn parse_llrs(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let v: f64 = content
            .parse()
            .ok()
            .filter(|v: &f64| !v.is_nan())
            .ok_or_else(|| Error::Parse {
                line: no + 1,
                msg: format!("bad LLR {content:?}"),
            })?;
        out.push(v);
    }
    Ok(out)
}

/// Inserts the `--key value` pairs of any `--config` file right after the
/// subcommand name so that explicit flags, which come later, override them.
pub fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("config {}: {e}", Path::new(&path).display()))?;
    let mut extra = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", no + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(format!(
                "config line {}: nested config files are not supported",
                no + 1
            ));
        }
        match value {
            "true" => extra.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => extra.push(OsString::from(format!("--{key}={value}"))),
        }
    }
    let at = args.len().min(2);
    let mut out: Vec<OsString> = args[..at].to_vec();
    out.extend(extra);
    out.extend(args[at..].iter().cloned());
    Ok(out)
}

/// Runs a parsed command, writing human-readable output to `stdout`.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Construct(a) => {
            let c = construction(a.pcc, &a.method, &a.common);
            let built = c.build(a.shape.n, a.shape.k, a.design_snr_db)?;
            let prov = provenance(
                "construct",
                format!(
                    "pcc={} n={} k={} design_snr_db={}{} {}",
                    a.pcc,
                    a.shape.n,
                    a.shape.k,
                    a.design_snr_db,
                    method_params(a.pcc, &a.method),
                    common_params(&a.common)
                ),
            );
            let mut buf = Vec::new();
            built.code.write_pcf_with_comments(&mut buf, &prov)?;
            write_file(&a.out, &buf)?;
            if let Some(path) = &a.metrics {
                let mut buf = Vec::new();
                built.metrics.write_dump(&mut buf)?;
                write_file(path, &buf)?;
            }
            writeln!(
                stdout,
                "wrote {} (N={} K={})",
                a.out.display(),
                a.shape.n,
                a.shape.k
            )?;
        }
        Command::Encode(a) => {
            let spec = read_code(&a.code)?;
            let text = fs::read_to_string(&a.input).map_err(|e| io_context(e, &a.input))?;
            let u = parse_bits(&text, spec.k()).map_err(|e| with_what("message", e))?;
            write_file(&a.out, format_bits(&encode(&spec, &u)?).as_bytes())?;
        }
        Command::Decode(a) => {
            let spec = read_code(&a.code)?;
            let text = fs::read_to_string(&a.llr).map_err(|e| io_context(e, &a.llr))?;
            let llr = parse_llrs(&text)?;
            if llr.len() != spec.n() {
                return Err(Error::Domain(format!(
                    "expected {} LLRs, found {}",
                    spec.n(),
                    llr.len()
                )));
            }
            let (u, _) = Decoder::new(spec.n(), Domain::Log)?.decode(&spec, &llr)?;
            write_file(&a.out, format_bits(&u).as_bytes())?;
        }
        Command::Simulate(a) => {
            let (spec, source) = match (&a.code, a.pcc) {
                (Some(path), _) => (read_code(path)?, format!("code={}", path.display())),
                (None, Some(pcc)) => {
                    let (n, k, d) = (
                        a.n.unwrap_or(0),
                        a.k.unwrap_or(0),
                        a.design_snr_db.unwrap_or(0.0),
                    );
                    let code = construction(pcc, &a.method, &a.common).build(n, k, d)?.code;
                    (
                        code,
                        format!(
                            "pcc={pcc} n={n} k={k} design_snr_db={d}{}",
                            method_params(pcc, &a.method)
                        ),
                    )
                }
                (None, None) => {
                    return Err(Error::Domain(
                        "give --code or --pcc with --n, --k, --design-snr-db".into(),
                    ))
                }
            };
            let opts = sim_options(&a.stop, &a.common);
            let curve =
                sim::run_curve(&spec, &a.snr.0, sim::evaluation_seed(a.common.seed), &opts)?;
            let prov = provenance(
                "simulate",
                format!(
                    "{source} snr={} {} {}",
                    grid_str(&a.snr.0),
                    stop_params(&a.stop),
                    common_params(&a.common)
                ),
            );
            let mut buf = Vec::new();
            let meta = spec.meta();
            sim::write_csv(
                &mut buf,
                &prov,
                [(meta.method, meta.design_snr_db, curve.as_slice())],
            )?;
            write_file(&a.out, &buf)?;
        }
        Command::Sweep(a) => {
            let grid = &a.snr.0;
            let criterion = match a.criterion {
                CriterionArg::LogArea => Criterion::LogBlerArea,
                CriterionArg::BlerAt => {
                    let target = a.select_snr_db.unwrap_or(grid[grid.len() / 2]);
                    let on_grid = grid
                        .iter()
                        .copied()
                        .find(|g| (g - target).abs() <= 1e-9)
                        .ok_or_else(|| {
                            Error::Domain(format!(
                                "--select-snr-db {target} is not on the --snr grid"
                            ))
                        })?;
                    Criterion::BlerAt(on_grid)
                }
            };
            let c = construction(a.pcc, &a.method, &a.common);
            let opts = sim_options(&a.stop, &a.common);
            let sweep = sim::design_snr_sweep(
                &c,
                a.shape.n,
                a.shape.k,
                &a.design_snrs.0,
                grid,
                criterion,
                a.common.seed,
                &opts,
            )?;
            let prov = provenance(
                "sweep",
                format!(
                    "pcc={} n={} k={} design_snrs={} snr={} criterion=\"{}\"{} {} {}",
                    a.pcc,
                    a.shape.n,
                    a.shape.k,
                    grid_str(&a.design_snrs.0),
                    grid_str(grid),
                    criterion.describe(),
                    method_params(a.pcc, &a.method),
                    stop_params(&a.stop),
                    common_params(&a.common)
                ),
            );
            let mut buf = Vec::new();
            sim::write_sweep_csv(&mut buf, &prov, &sweep)?;
            write_file(&a.out, &buf)?;
            writeln!(
                stdout,
                "chosen_design_snr_db={}",
                sim::fmt_g(sweep.chosen_entry().design_snr_db)
            )?;
        }
        Command::Compare(a) => {
            let designs: Vec<(Construction, f64)> = a
                .designs
                .0
                .iter()
                .map(|&(id, snr)| (construction(id, &a.method, &a.common), snr))
                .collect();
            let opts = sim_options(&a.stop, &a.common);
            let rows = sim::compare_constructions(
                a.shape.n,
                a.shape.k,
                &designs,
                &a.snr.0,
                a.common.seed,
                &opts,
            )?;
            let spec_list = a
                .designs
                .0
                .iter()
                .map(|(id, s)| format!("{id}={}", sim::fmt_g(*s)))
                .collect::<Vec<_>>()
                .join(",");
            let prov = provenance(
                "compare",
                format!(
                    "n={} k={} designs={spec_list} snr={} mu={} mc_size={} {} {}",
                    a.shape.n,
                    a.shape.k,
                    grid_str(&a.snr.0),
                    a.method.mu,
                    a.method.mc_size,
                    stop_params(&a.stop),
                    common_params(&a.common)
                ),
            );
            let mut buf = Vec::new();
            sim::write_csv(
                &mut buf,
                &prov,
                rows.iter()
                    .map(|e| (e.code.meta().method, e.design_snr_db, e.curve.as_slice())),
            )?;
            write_file(&a.out, &buf)?;
        }
    }
    Ok(())
}

fn with_what(what: &str, e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("{what}: {m}")),
        other => other,
    }
}

/// Full entry point: parses `args` and returns the process exit code.
pub fn run(args: impl IntoIterator<Item = OsString>) -> i32 {
    let args = match expand_config(args.into_iter().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let mut out = io::stdout().lock();
    match execute(cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(
            parse_grid("0:0.5:2").unwrap().0,
            vec![0.0, 0.5, 1.0, 1.5, 2.0]
        );
        assert_eq!(
            parse_grid("-1:0.1:-0.7").unwrap().0,
            vec![-1.0, -0.9, -0.8, -0.7]
        );
        assert_eq!(parse_grid("-1.59,0,1").unwrap().0, vec![-1.59, 0.0, 1.0]);
        assert_eq!(parse_grid("3").unwrap().0, vec![3.0]);
        for bad in ["", "1,0", "0:0:1", "a", "0:1", "1:1:0", "0,,1", "nan"] {
            assert!(parse_grid(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn design_lists() {
        assert_eq!(
            parse_designs("0=1.5,PCC3=-1").unwrap().0,
            vec![(0, 1.5), (3, -1.0)]
        );
        assert!(parse_designs("4=1").is_err());
        assert!(parse_designs("0:1").is_err());
    }

    #[test]
    fn bit_files() {
        assert_eq!(parse_bits("1 0 1\n1 0\n", 5).unwrap(), vec![1, 0, 1, 1, 0]);
        assert_eq!(parse_bits("0xA5", 8).unwrap(), vec![1, 0, 1, 0, 0, 1, 0, 1]);
        assert_eq!(parse_bits("0x15", 5).unwrap(), vec![1, 0, 1, 0, 1]);
        assert!(parse_bits("0x35", 5).is_err());
        assert!(parse_bits("0102", 4).is_err());
        assert!(parse_bits("0101", 5).is_err());
        assert_eq!(format_bits(&[0, 1, 1]), "011\n");
    }

    #[test]
    fn llr_files() {
        assert_eq!(
            parse_llrs("1.5\n\n-2e1 # note\ninf\n").unwrap(),
            vec![1.5, -20.0, f64::INFINITY]
        );
        assert!(matches!(
            parse_llrs("1\nx\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn config_is_spliced_before_explicit_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(
            &cfg,
            "# defaults\nn = 16\nk=8\nseed = 5\nlegacy_sqrt_s = true\nthreads = false\n",
        )
        .unwrap();
        let args: Vec<OsString> = [
            "polarcc",
            "construct",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "9",
        ]
        .iter()
        .map(OsString::from)
        .collect();
        let out = expand_config(args).unwrap();
        let s: Vec<String> = out
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            &s[..6],
            &[
                "polarcc",
                "construct",
                "--n=16",
                "--k=8",
                "--seed=5",
                "--legacy-sqrt-s"
            ]
        );
        assert_eq!(s.last().unwrap(), "9");
    }
}
