//! BI-AWGN channel with BPSK and unit noise variance, channel LLRs, and the
//! finite-alphabet discretization of the AWGN output used by the
//! transition-matrix construction.
//!
//! A bit `0` is sent as `-amplitude` and `1` as `+amplitude`. With SNR
//! `S = R·Eb/N0` (linear) the amplitude is `√(2S)`, so the LLR of an output
//! `y` is `-2·amplitude·y` and the Bhattacharyya parameter is `exp(-S)`.

use std::f64::consts::{LN_2, SQRT_2};
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};

/// How the signal amplitude is derived from the SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `amplitude = √(2S)`.
    #[default]
    Standard,
    /// `amplitude = √S`, as written in the Monte-Carlo construction listing.
    LegacySqrtS,
}

/// Channel parameters at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnParams {
    /// `R·Eb/N0` in dB.
    pub design_snr_db: f64,
    pub s_linear: f64,
    pub amplitude: f64,
}

impl AwgnParams {
    pub fn from_db(snr_db: f64) -> Result<Self> {
        Self::with_normalization(snr_db, Normalization::Standard)
    }

    pub fn with_normalization(snr_db: f64, norm: Normalization) -> Result<Self> {
        if !snr_db.is_finite() {
            return domain(format!("SNR {snr_db} dB is not finite"));
        }
        let s_linear = 10f64.powf(snr_db / 10.0);
        let amplitude = match norm {
            Normalization::Standard => (2.0 * s_linear).sqrt(),
            Normalization::LegacySqrtS => s_linear.sqrt(),
        };
        if !(s_linear > 0.0 && amplitude > 0.0 && amplitude.is_finite()) {
            return domain(format!("SNR {snr_db} dB gives a degenerate amplitude"));
        }
        Ok(Self {
            design_snr_db: snr_db,
            s_linear,
            amplitude,
        })
    }

    /// Parameters for an operating point given as `Eb/N0` at code rate `rate`.
    pub fn from_ebn0(ebn0_db: f64, rate: f64, norm: Normalization) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return domain(format!("rate {rate} outside (0, 1]"));
        }
        Self::with_normalization(ebn0_db + 10.0 * rate.log10(), norm)
    }
}

/// Maps bits to `∓amplitude`.
pub fn bpsk_modulate(x: &[u8], params: &AwgnParams) -> Vec<f64> {
    x.iter()
        .map(|&b| {
            if b == 0 {
                -params.amplitude
            } else {
                params.amplitude
            }
        })
        .collect()
}

/// A stream of i.i.d. standard normal samples.
pub trait NoiseSource {
    fn next_normal(&mut self) -> f64;
}

/// Standard normal samples drawn from a seeded generator.
#[derive(Debug, Clone)]
pub struct GaussianNoise<R>(pub R);

impl<R: Rng> NoiseSource for GaussianNoise<R> {
    #[inline]
    fn next_normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }
}

/// Zero-variance source; the channel output equals its input.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoNoise;

impl NoiseSource for NoNoise {
    #[inline]
    fn next_normal(&mut self) -> f64 {
        0.0
    }
}

/// `y = x̃ + n` with unit-variance noise.
pub fn awgn_transmit(modulated: &[f64], noise: &mut impl NoiseSource) -> Vec<f64> {
    modulated.iter().map(|&s| s + noise.next_normal()).collect()
}

/// `ln Pr(y|0)/Pr(y|1) = -2·amplitude·y`.
pub fn channel_llr(y: &[f64], params: &AwgnParams) -> Vec<f64> {
    let scale = -2.0 * params.amplitude;
    y.iter().map(|&v| scale * v).collect()
}

/// Gaussian upper tail `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// `Pr(lo < Z < hi)` for standard normal `Z`, evaluated on whichever tail
/// keeps the difference well conditioned. `hi` may be `+∞`.
fn normal_interval(lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        q_function(lo) - q_function(hi)
    } else if hi <= 0.0 {
        q_function(-hi) - q_function(-lo)
    } else {
        1.0 - q_function(hi) - q_function(-lo)
    }
}

/// Capacity contribution `1 - log2(1+λ) + λ/(1+λ)·log2 λ` of an output with
/// likelihood ratio `λ`.
pub fn instantaneous_capacity(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return domain(format!("likelihood ratio {lambda} must be positive"));
    }
    if lambda == 1.0 {
        return Ok(0.0);
    }
    Ok(capacity_of_llr(lambda.ln().abs()))
}

/// The same function written in terms of `|ln λ|`, stable for large ratios.
pub(crate) fn capacity_of_llr(l: f64) -> f64 {
    if l == f64::INFINITY {
        return 1.0;
    }
    let e = (-l).exp();
    1.0 - e.ln_1p() / LN_2 - (l / LN_2) * e / (1.0 + e)
}

/// One column of a symmetric half transition matrix: `p0 = Pr(y|0)`,
/// `p1 = Pr(y|1)` for a representative `y` of a conjugate output pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Column {
    pub p0: f64,
    pub p1: f64,
}

impl Column {
    pub const fn new(p0: f64, p1: f64) -> Self {
        Self { p0, p1 }
    }

    /// Swaps the entries if needed so that `p0 >= p1`.
    pub fn oriented(self) -> Self {
        if self.p0 < self.p1 {
            Self {
                p0: self.p1,
                p1: self.p0,
            }
        } else {
            self
        }
    }

    pub fn mass(&self) -> f64 {
        self.p0 + self.p1
    }

    /// `ln(p0/p1)`; `+∞` when `p1 == 0`.
    pub fn llr(&self) -> f64 {
        if self.p1 == 0.0 {
            f64::INFINITY
        } else {
            self.p0.ln() - self.p1.ln()
        }
    }

    /// `a·log2(2a/(a+b)) + b·log2(2b/(a+b))` with `0·log 0 = 0`.
    pub fn capacity(&self) -> f64 {
        let s = self.p0 + self.p1;
        if s == 0.0 {
            return 0.0;
        }
        let term = |p: f64| {
            if p > 0.0 {
                p * (2.0 * p / s).log2()
            } else {
                0.0
            }
        };
        term(self.p0) + term(self.p1)
    }

    pub fn bhattacharyya(&self) -> f64 {
        2.0 * (self.p0 * self.p1).sqrt()
    }

    pub(crate) fn add(self, other: Self) -> Self {
        Self {
            p0: self.p0 + other.p0,
            p1: self.p1 + other.p1,
        }
    }

    pub(crate) fn scale(self, k: f64) -> Self {
        Self {
            p0: self.p0 * k,
            p1: self.p1 * k,
        }
    }
}

/// Whether two log-likelihood ratios count as the same output symbol.
pub(crate) fn same_llr(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

/// How the channel's error probability treats outputs with likelihood ratio 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// Ties decided by a fair coin: the row-1 sum `Σ p1`.
    #[default]
    Split,
    /// Ties decided as 0 under all-zero transmission; tie columns never err.
    TowardZero,
}

/// Transition matrix of a symmetric binary-input channel, stored as its
/// half: one column per conjugate output pair.
///
/// Canonical form: every column has `p0 >= p1`, columns are sorted by
/// ascending likelihood ratio, no two columns share a ratio, and zero-mass
/// columns are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Tpm {
    cols: Vec<Column>,
}

impl Tpm {
    /// Canonicalizes arbitrary non-negative columns.
    pub fn from_columns(cols: impl IntoIterator<Item = Column>) -> Result<Self> {
        let mut v = Vec::new();
        for (j, c) in cols.into_iter().enumerate() {
            if !(c.p0 >= 0.0 && c.p1 >= 0.0 && c.p0.is_finite() && c.p1.is_finite()) {
                return domain(format!(
                    "column {j} = ({}, {}) has an invalid entry",
                    c.p0, c.p1
                ));
            }
            v.push(c);
        }
        Ok(Self::canonicalize(v))
    }

    /// Orients, sorts by likelihood ratio, and merges equal-ratio columns.
    pub(crate) fn canonicalize(cols: Vec<Column>) -> Self {
        let mut keyed: Vec<(f64, Column)> = cols
            .into_iter()
            .filter(|c| c.mass() > 0.0)
            .map(|c| {
                let c = c.oriented();
                (c.llr(), c)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<Column> = Vec::with_capacity(keyed.len());
        let mut last_llr = f64::NAN;
        for (llr, c) in keyed {
            match out.last_mut() {
                Some(prev) if same_llr(last_llr, llr) => {
                    *prev = prev.add(c);
                    last_llr = prev.llr();
                }
                _ => {
                    out.push(c);
                    last_llr = llr;
                }
            }
        }
        Self { cols: out }
    }

    /// Wraps columns already known to be canonical.
    pub(crate) fn from_canonical(cols: Vec<Column>) -> Self {
        debug_assert!(Self { cols: cols.clone() }.is_canonical());
        Self { cols }
    }

    #[cfg(test)]
    pub(crate) fn unchecked(cols: Vec<Column>) -> Self {
        Self { cols }
    }

    pub fn columns(&self) -> &[Column] {
        &self.cols
    }

    pub fn width(&self) -> usize {
        self.cols.len()
    }

    pub fn is_canonical(&self) -> bool {
        self.cols
            .iter()
            .all(|c| c.p0 >= c.p1 && c.p1 >= 0.0 && c.mass() > 0.0)
            && self.cols.windows(2).all(|w| {
                let (a, b) = (w[0].llr(), w[1].llr());
                a < b && !same_llr(a, b)
            })
    }

    /// `Σ (p0 + p1)`; 1 for a stochastic channel.
    pub fn mass(&self) -> f64 {
        self.cols.iter().map(Column::mass).sum()
    }

    /// Error probability of the ML decision, `Σ p1` with ties split.
    pub fn ber(&self) -> f64 {
        self.ber_with(TieRule::Split)
    }

    pub fn ber_with(&self, rule: TieRule) -> f64 {
        self.cols
            .iter()
            .map(|c| {
                if c.p0 == c.p1 {
                    match rule {
                        TieRule::Split => 0.5 * (c.p0 + c.p1),
                        TieRule::TowardZero => 0.0,
                    }
                } else {
                    c.p1
                }
            })
            .sum()
    }

    /// Symmetric capacity in bits.
    pub fn capacity(&self) -> f64 {
        self.cols.iter().map(Column::capacity).sum()
    }

    /// `Σ 2√(p0·p1)`.
    pub fn bhattacharyya(&self) -> f64 {
        self.cols.iter().map(Column::bhattacharyya).sum()
    }

    /// Diagnostic `p0,p1` dump.
    pub fn write_csv<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "p0,p1")?;
        for c in &self.cols {
            writeln!(sink, "{:e},{:e}", c.p0, c.p1)?;
        }
        Ok(())
    }
}

/// Bisection for the output magnitude `L = |LLR|` with `C(L) = target`.
fn solve_capacity_level(target: f64) -> Result<f64> {
    let mut hi = 1.0f64;
    while capacity_of_llr(hi) <= target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical(format!(
                "no bracket for capacity level {target}"
            )));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if capacity_of_llr(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let l = 0.5 * (lo + hi);
    let residual = (capacity_of_llr(l) - target).abs();
    if residual > 1e-10 {
        return Err(Error::Numerical(format!(
            "capacity level {target}: bisection stopped at L={l} with residual {residual:e}"
        )));
    }
    Ok(l)
}

/// Thresholds `0 = a_0 < a_1 < … < a_{μ-1}` on the positive output axis with
/// `C(λ(a_j)) = j/μ`.
pub fn awgn_thresholds(mu: usize, params: &AwgnParams) -> Result<Vec<f64>> {
    if mu < 1 {
        return domain("alphabet size must be at least 1");
    }
    let mut a = Vec::with_capacity(mu);
    a.push(0.0);
    for j in 1..mu {
        let l = solve_capacity_level(j as f64 / mu as f64)?;
        a.push(l / (2.0 * params.amplitude));
    }
    Ok(a)
}

/// Quantizes the AWGN output to `μ` conjugate pairs of equal capacity share.
pub fn discretize_awgn(mu: usize, params: &AwgnParams) -> Result<Tpm> {
    let a = awgn_thresholds(mu, params)?;
    let s = params.amplitude;
    let cols = (0..mu).map(|j| {
        let lo = a[j];
        let hi = a.get(j + 1).copied().unwrap_or(f64::INFINITY);
        // bit 0 ~ N(-s,1), bit 1 ~ N(+s,1); y in [lo, hi) favours bit 1
        let p0 = normal_interval(s + lo, s + hi);
        let p1 = normal_interval(lo - s, hi - s);
        Column::new(p0, p1)
    });
    Tpm::from_columns(cols)
}
