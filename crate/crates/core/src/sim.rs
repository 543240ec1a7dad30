//! Monte-Carlo BER/BLER evaluation, design-SNR sweeps, and construction
//! comparison.
//!
//! Trial `t` of a point seeded with `s` draws its message and noise from a
//! generator seeded by `derive(s, SIM_TRIAL, t)`. Trials are evaluated in
//! fixed-size blocks (in parallel if asked) and then scanned in order, so the
//! stopping point and every count match a sequential run exactly.

use std::fmt::Write as _;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::{AwgnParams, Normalization};
use crate::code::{CodeSpec, Method};
use crate::construct::Construction;
use crate::encoder::encode;
use crate::error::{domain, Error, Result};
use crate::scd::{Decoder, Domain};
use crate::seed::{self, tag};

const BLOCK: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingRule {
    pub min_block_errors: u64,
    pub max_trials: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_block_errors: 100,
            max_trials: 10_000_000,
        }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.min_block_errors == 0 || self.max_trials == 0 {
            return domain("stopping rule bounds must be positive");
        }
        Ok(())
    }
}

/// Everything about a simulation run other than the code and the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub rule: StoppingRule,
    pub threads: usize,
    pub normalization: Normalization,
    pub domain: Domain,
    /// Transmit without noise; for testing the pipeline.
    pub noiseless: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            rule: StoppingRule::default(),
            threads: 1,
            normalization: Normalization::Standard,
            domain: Domain::Log,
            noiseless: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimRecord {
    /// Eb/N0 in dB, bit-exact as requested.
    pub snr_db: f64,
    pub k: usize,
    pub trials: u64,
    pub bit_errors: u64,
    pub block_errors: u64,
}

impl SimRecord {
    pub fn ber(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.bit_errors as f64 / (self.trials as f64 * self.k as f64)
        }
    }

    pub fn bler(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.block_errors as f64 / self.trials as f64
        }
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::State(format!("thread pool: {e}")))
}

struct Worker {
    dec: Decoder,
    u: Vec<u8>,
    llr: Vec<f64>,
}

impl Worker {
    fn new(spec: &CodeSpec, domain: Domain) -> Result<Self> {
        Ok(Self {
            dec: Decoder::new(spec.n(), domain)?,
            u: vec![0; spec.k()],
            llr: vec![0.0; spec.n()],
        })
    }

    /// Bit errors of one trial.
    fn trial(
        &mut self,
        spec: &CodeSpec,
        params: &AwgnParams,
        seed: u64,
        t: u64,
        noiseless: bool,
    ) -> Result<u32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(&[seed, tag::SIM_TRIAL, t]));
        for b in self.u.iter_mut() {
            *b = rng.random::<bool>() as u8;
        }
        let x = encode(spec, &self.u)?;
        let a = params.amplitude;
        for (l, &bit) in self.llr.iter_mut().zip(&x) {
            let tx = if bit == 0 { -a } else { a };
            let n: f64 = if noiseless {
                0.0
            } else {
                rng.sample(StandardNormal)
            };
            *l = -2.0 * a * (tx + n);
        }
        let d = self.dec.decode_data(spec, &self.llr)?;
        Ok(spec
            .info()
            .iter()
            .zip(&self.u)
            .filter(|(&i, &b)| d[i] != b)
            .count() as u32)
    }
}

/// Simulates one Eb/N0 point until the stopping rule fires.
pub fn run_point(spec: &CodeSpec, snr_db: f64, seed: u64, opts: &SimOptions) -> Result<SimRecord> {
    opts.rule.validate()?;
    if spec.k() == 0 {
        return domain("cannot simulate a code without information bits");
    }
    let params = AwgnParams::from_ebn0(snr_db, spec.rate(), opts.normalization)?;
    let mut rec = SimRecord {
        snr_db,
        k: spec.k(),
        trials: 0,
        bit_errors: 0,
        block_errors: 0,
    };
    let batch = BLOCK * opts.threads.max(1) as u64;
    let pool = if opts.threads > 1 {
        Some(pool(opts.threads)?)
    } else {
        None
    };
    let mut worker = Worker::new(spec, opts.domain)?;
    let rule = opts.rule;
    while rec.trials < rule.max_trials && rec.block_errors < rule.min_block_errors {
        let start = rec.trials;
        let end = (start + batch).min(rule.max_trials);
        let errs: Vec<u32> = match &pool {
            None => (start..end)
                .map(|t| worker.trial(spec, &params, seed, t, opts.noiseless))
                .collect::<Result<_>>()?,
            Some(p) => p.install(|| {
                (0..(end - start) as usize)
                    .into_par_iter()
                    .with_min_len(BLOCK as usize)
                    .map_init(
                        // the sequential worker above already validated the length
                        || Worker::new(spec, opts.domain).expect("valid code length"),
                        |w, i| w.trial(spec, &params, seed, start + i as u64, opts.noiseless),
                    )
                    .collect::<Result<_>>()
            })?,
        };
        for e in errs {
            rec.trials += 1;
            rec.bit_errors += e as u64;
            rec.block_errors += (e > 0) as u64;
            if rec.block_errors >= rule.min_block_errors {
                break;
            }
        }
    }
    Ok(rec)
}

pub fn run_curve(
    spec: &CodeSpec,
    snr_grid: &[f64],
    seed: u64,
    opts: &SimOptions,
) -> Result<Vec<SimRecord>> {
    if snr_grid.is_empty() {
        return domain("SNR grid is empty");
    }
    if snr_grid.iter().any(|s| !s.is_finite()) || snr_grid.windows(2).any(|w| w[0] >= w[1]) {
        return domain("SNR grid must be finite and strictly ascending");
    }
    snr_grid
        .iter()
        .enumerate()
        .map(|(g, &snr)| run_point(spec, snr, seed::derive(&[seed, g as u64]), opts))
        .collect()
}

/// How a sweep picks its design SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// Least BLER at the named evaluation SNR.
    BlerAt(f64),
    /// Least area under the log-BLER curve (trapezoid rule over the grid).
    LogBlerArea,
}

impl Criterion {
    pub fn describe(&self) -> String {
        match self {
            Criterion::BlerAt(s) => format!("min BLER at {} dB", fmt_g(*s)),
            Criterion::LogBlerArea => "min area under log10 BLER".to_string(),
        }
    }

    fn score(&self, curve: &[SimRecord]) -> Result<f64> {
        match *self {
            Criterion::BlerAt(snr) => curve
                .iter()
                .find(|r| r.snr_db == snr)
                .map(SimRecord::bler)
                .ok_or_else(|| {
                    Error::Domain(format!("selection SNR {snr} is not on the evaluation grid"))
                }),
            Criterion::LogBlerArea => {
                // zero-error points count as half an error
                let y: Vec<f64> = curve
                    .iter()
                    .map(|r| r.bler().max(0.5 / r.trials as f64).log10())
                    .collect();
                Ok(curve
                    .windows(2)
                    .zip(y.windows(2))
                    .map(|(r, y)| 0.5 * (y[0] + y[1]) * (r[1].snr_db - r[0].snr_db))
                    .sum())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub design_snr_db: f64,
    pub code: CodeSpec,
    pub curve: Vec<SimRecord>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub method: Method,
    pub entries: Vec<SweepEntry>,
    pub chosen: usize,
    pub criterion: Criterion,
}

impl SweepResult {
    pub fn chosen_entry(&self) -> &SweepEntry {
        &self.entries[self.chosen]
    }
}

/// Seed shared by every code evaluated under one master seed, so that all
/// curves of a sweep or comparison see the same messages and noise.
pub fn evaluation_seed(seed: u64) -> u64 {
    seed::derive(&[seed, tag::SWEEP_EVAL])
}

/// Builds one code per design SNR, evaluates each on `eval_grid`, and picks
/// the best under `criterion`; ties go to the lower design SNR.
#[allow(clippy::too_many_arguments)]
pub fn design_snr_sweep(
    construction: &Construction,
    n: usize,
    k: usize,
    design_grid: &[f64],
    eval_grid: &[f64],
    criterion: Criterion,
    seed: u64,
    opts: &SimOptions,
) -> Result<SweepResult> {
    if design_grid.is_empty() {
        return domain("design-SNR grid is empty");
    }
    if let Criterion::BlerAt(s) = criterion {
        if !eval_grid.contains(&s) {
            return domain(format!("selection SNR {s} is not on the evaluation grid"));
        }
    }
    let eval_seed = evaluation_seed(seed);
    let mut entries = Vec::with_capacity(design_grid.len());
    for &design in design_grid {
        let code = construction.build(n, k, design)?.code;
        let curve = run_curve(&code, eval_grid, eval_seed, opts)?;
        entries.push(SweepEntry {
            design_snr_db: design,
            code,
            curve,
        });
    }
    let mut chosen = 0;
    let mut best = f64::INFINITY;
    for (i, e) in entries.iter().enumerate() {
        let score = criterion.score(&e.curve)?;
        let better =
            score < best || (score == best && e.design_snr_db < entries[chosen].design_snr_db);
        if better {
            best = score;
            chosen = i;
        }
    }
    Ok(SweepResult {
        method: construction.method(),
        entries,
        chosen,
        criterion,
    })
}

/// One curve per (construction, design SNR) pair, all on the same noise.
pub fn compare_constructions(
    n: usize,
    k: usize,
    designs: &[(Construction, f64)],
    eval_grid: &[f64],
    seed: u64,
    opts: &SimOptions,
) -> Result<Vec<SweepEntry>> {
    let eval_seed = evaluation_seed(seed);
    designs
        .iter()
        .map(|(c, design)| {
            let code = c.build(n, k, *design)?.code;
            let curve = run_curve(&code, eval_grid, eval_seed, opts)?;
            Ok(SweepEntry {
                design_snr_db: *design,
                code,
                curve,
            })
        })
        .collect()
}

/// Eb/N0 where a curve crosses `target` BLER, by linear interpolation of
/// log10 BLER between the bracketing grid points.
pub fn snr_at_bler(curve: &[SimRecord], target: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let (a, b) = (w[0].bler(), w[1].bler());
        if a >= target && b <= target && a > 0.0 {
            if b <= 0.0 || a == b {
                return Some(w[1].snr_db);
            }
            let (la, lb, lt) = (a.log10(), b.log10(), target.log10());
            Some(w[0].snr_db + (la - lt) / (la - lb) * (w[1].snr_db - w[0].snr_db))
        } else {
            None
        }
    })
}

pub const CSV_HEADER: &str = "method,design_snr_db,snr_db,trials,bit_errors,block_errors,ber,bler";

/// Formats with six significant digits in the style of C's `%g`.
pub fn fmt_g(x: f64) -> String {
    const P: i32 = 6;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..P).contains(&exp) {
        trim(&format!("{:.*}", (P - 1 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

/// One results row.
pub fn csv_row(method: Method, design_snr_db: f64, r: &SimRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        method,
        fmt_g(design_snr_db),
        fmt_g(r.snr_db),
        r.trials,
        r.bit_errors,
        r.block_errors,
        fmt_g(r.ber()),
        fmt_g(r.bler())
    )
}

/// Writes `#` provenance lines, the header, and rows of `(method, design, curve)`.
pub fn write_csv<'a, W: Write>(
    mut sink: W,
    provenance: &[String],
    rows: impl IntoIterator<Item = (Method, f64, &'a [SimRecord])>,
) -> Result<()> {
    let mut out = String::new();
    for line in provenance {
        writeln!(out, "# {line}").expect("write to string");
    }
    writeln!(out, "{CSV_HEADER}").expect("write to string");
    for (method, design, curve) in rows {
        for r in curve {
            writeln!(out, "{}", csv_row(method, design, r)).expect("write to string");
        }
    }
    sink.write_all(out.as_bytes())?;
    Ok(())
}

/// Writes every entry of a sweep.
pub fn write_sweep_csv<W: Write>(
    sink: W,
    provenance: &[String],
    sweep: &SweepResult,
) -> Result<()> {
    write_csv(
        sink,
        provenance,
        sweep
            .entries
            .iter()
            .map(|e| (sweep.method, e.design_snr_db, e.curve.as_slice())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeMeta;
    use crate::construct::pcc0;

    fn fig1() -> CodeSpec {
        pcc0(8, 5, -1.5917).unwrap().code
    }

    fn rule(min_block_errors: u64, max_trials: u64) -> SimOptions {
        SimOptions {
            rule: StoppingRule {
                min_block_errors,
                max_trials,
            },
            ..SimOptions::default()
        }
    }

    #[test]
    fn noiseless_runs_to_max_trials() {
        let opts = SimOptions {
            noiseless: true,
            ..rule(10, 1000)
        };
        let r = run_point(&fig1(), -3.0, 1, &opts).unwrap();
        assert_eq!((r.trials, r.bit_errors, r.block_errors), (1000, 0, 0));
        assert_eq!((r.ber(), r.bler()), (0.0, 0.0));
    }

    #[test]
    fn deterministic_and_thread_invariant() {
        let spec = pcc0(64, 32, 1.0).unwrap().code;
        let opts = rule(37, 100_000);
        let a = run_point(&spec, 1.0, 9, &opts).unwrap();
        assert_eq!(a, run_point(&spec, 1.0, 9, &opts).unwrap());
        assert_eq!(a.block_errors, 37);
        let par = SimOptions { threads: 4, ..opts };
        assert_eq!(a, run_point(&spec, 1.0, 9, &par).unwrap());
        assert_ne!(a, run_point(&spec, 1.0, 10, &opts).unwrap());
    }

    #[test]
    fn high_snr_fig1_code_is_reliable() {
        let r = run_point(&fig1(), 12.0, 3, &rule(1000, 10_000)).unwrap();
        assert_eq!(r.trials, 10_000);
        assert!(r.bler() < 1e-2, "{}", r.bler());
    }

    #[test]
    fn counts_are_consistent() {
        let spec = pcc0(32, 16, 0.0).unwrap().code;
        for snr in [-2.0, 0.0, 2.0, 4.0] {
            let r = run_point(&spec, snr, 5, &rule(50, 5000)).unwrap();
            assert_eq!(r.bit_errors == 0, r.block_errors == 0);
            assert!(r.block_errors <= r.trials && r.bit_errors <= r.trials * r.k as u64);
            assert!(r.trials <= 5000);
        }
    }

    #[test]
    fn single_information_bit_at_high_snr() {
        let spec = CodeSpec::with_k(16, 1, 0..15, CodeMeta::external()).unwrap();
        let r = run_point(&spec, 20.0, 1, &rule(100, 10_000)).unwrap();
        assert!(r.bler() < 1e-3);
        let empty = CodeSpec::with_k(16, 0, 0..16, CodeMeta::external()).unwrap();
        assert!(run_point(&empty, 20.0, 1, &rule(100, 10)).is_err());
    }

    #[test]
    fn invalid_rules_and_grids() {
        assert!(run_point(&fig1(), 0.0, 1, &rule(0, 10)).is_err());
        assert!(run_point(&fig1(), 0.0, 1, &rule(10, 0)).is_err());
        assert!(run_curve(&fig1(), &[], 1, &rule(10, 10)).is_err());
        assert!(run_curve(&fig1(), &[1.0, 0.0], 1, &rule(10, 10)).is_err());
        assert_eq!(
            run_curve(&fig1(), &[1.0], 1, &rule(10, 10)).unwrap().len(),
            1
        );
    }

    #[test]
    fn curve_improves_with_snr() {
        let spec = pcc0(256, 128, 0.0).unwrap().code;
        let c = run_curve(&spec, &[0.0, 1.0, 2.0], 2, &rule(100, 1_000_000)).unwrap();
        assert!(c.iter().all(|r| r.block_errors >= 100));
        assert!(c[2].ber() < c[0].ber());
    }

    #[test]
    fn sweep_tie_rules() {
        let opts = rule(20, 2000);
        let one = design_snr_sweep(
            &Construction::Pcc0,
            16,
            8,
            &[2.0],
            &[1.0],
            Criterion::BlerAt(1.0),
            1,
            &opts,
        )
        .unwrap();
        assert_eq!(one.chosen, 0);
        let twin = design_snr_sweep(
            &Construction::Pcc0,
            16,
            8,
            &[2.0, 2.0],
            &[1.0],
            Criterion::BlerAt(1.0),
            1,
            &opts,
        )
        .unwrap();
        assert_eq!(twin.chosen, 0);
        assert_eq!(twin.entries[0].curve, twin.entries[1].curve);
        let area = design_snr_sweep(
            &Construction::Pcc0,
            16,
            8,
            &[2.0],
            &[0.0, 1.0],
            Criterion::LogBlerArea,
            1,
            &opts,
        );
        assert_eq!(area.unwrap().chosen, 0);
        assert!(design_snr_sweep(
            &Construction::Pcc0,
            16,
            8,
            &[2.0],
            &[1.0],
            Criterion::BlerAt(3.0),
            1,
            &opts
        )
        .is_err());
        assert!(design_snr_sweep(
            &Construction::Pcc0,
            16,
            8,
            &[],
            &[1.0],
            Criterion::BlerAt(1.0),
            1,
            &opts
        )
        .is_err());
    }

    #[test]
    fn identical_codes_give_identical_curves() {
        let opts = rule(30, 5000);
        let designs = [
            (Construction::Pcc0, 1.0),
            (Construction::Pcc0, 1.0),
            (Construction::Pcc3, 1.0),
        ];
        let rows = compare_constructions(64, 32, &designs, &[0.0, 1.0], 4, &opts).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].curve, rows[1].curve);
        if rows[2].code.frozen() == rows[0].code.frozen() {
            assert_eq!(rows[2].curve, rows[0].curve);
        }
        let mut buf = Vec::new();
        write_csv(
            &mut buf,
            &["seed=4".into()],
            rows.iter()
                .map(|e| (e.code.meta().method, e.design_snr_db, e.curve.as_slice())),
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2 + 3 * 2);
        assert!(text.starts_with("# seed=4\nmethod,design_snr_db"));
    }

    #[test]
    fn interpolated_crossing() {
        let rec = |snr_db, block_errors| SimRecord {
            snr_db,
            k: 1,
            trials: 1000,
            bit_errors: block_errors,
            block_errors,
        };
        let curve = [rec(1.0, 100), rec(2.0, 1)];
        assert!((snr_at_bler(&curve, 1e-2).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(snr_at_bler(&curve, 0.5), None);
    }

    #[test]
    fn general_format() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-1.5917, "-1.5917"),
            (0.1, "0.1"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (0.000123456789, "0.000123457"),
            (0.0000123, "1.23e-05"),
            (2.5, "2.5"),
            (1.0 / 3.0, "0.333333"),
            (999999.5, "1e+06"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g(x), s, "{x}");
        }
    }
}
