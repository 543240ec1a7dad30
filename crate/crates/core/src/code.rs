//! Code description `(N, K, F)`, per-index channel metrics, and the `.pcf` text format.
//!
//! A `.pcf` file looks like
//!
//! ```text
//! PCF1
//! 8 5 -1.5917 PCC0
//! param mu=64
//! 0
//! 2
//! 4
//! ```
//!
//! Lines starting with `#` are comments. The `param` line is optional.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{domain, Error, Result};

const MAGIC: &str = "PCF1";

/// Construction algorithm that produced a frozen set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Bhattacharyya-bound evolution.
    Pcc0,
    /// Monte-Carlo genie decoding.
    Pcc1,
    /// Quantized transition-matrix evolution.
    Pcc2,
    /// Gaussian approximation.
    Pcc3,
    /// Frozen set supplied from outside the toolkit.
    External,
}

impl Method {
    pub const ALL_PCC: [Method; 4] = [Method::Pcc0, Method::Pcc1, Method::Pcc2, Method::Pcc3];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pcc0 => "PCC0",
            Method::Pcc1 => "PCC1",
            Method::Pcc2 => "PCC2",
            Method::Pcc3 => "PCC3",
            Method::External => "EXTERNAL",
        }
    }

    /// Small integer used in seed derivation.
    pub fn id(self) -> u64 {
        match self {
            Method::Pcc0 => 0,
            Method::Pcc1 => 1,
            Method::Pcc2 => 2,
            Method::Pcc3 => 3,
            Method::External => 4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PCC0" => Ok(Method::Pcc0),
            "PCC1" => Ok(Method::Pcc1),
            "PCC2" => Ok(Method::Pcc2),
            "PCC3" => Ok(Method::Pcc3),
            "EXTERNAL" => Ok(Method::External),
            _ => domain(format!("unknown construction method {s:?}")),
        }
    }
}

/// Provenance recorded alongside a frozen set.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeMeta {
    pub method: Method,
    pub design_snr_db: f64,
    /// Quantizer alphabet size (PCC2).
    pub mu: Option<usize>,
    /// Monte-Carlo trial count (PCC1).
    pub mc_size: Option<u64>,
    pub seed: Option<u64>,
}

impl CodeMeta {
    pub fn new(method: Method, design_snr_db: f64) -> Self {
        Self {
            method,
            design_snr_db,
            mu: None,
            mc_size: None,
            seed: None,
        }
    }

    pub fn external() -> Self {
        Self::new(Method::External, 0.0)
    }
}

/// A polar code `(N, K, F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    n_bits: usize,
    k_info: usize,
    frozen: Vec<usize>,
    info: Vec<usize>,
    frozen_mask: Vec<bool>,
    meta: CodeMeta,
}

impl CodeSpec {
    /// Builds a code from its frozen index set, any order. Fails on a
    /// non-power-of-two length, out-of-range or duplicate indices.
    pub fn new(
        n_bits: usize,
        frozen: impl IntoIterator<Item = usize>,
        meta: CodeMeta,
    ) -> Result<Self> {
        if n_bits < 2 || !n_bits.is_power_of_two() {
            return domain(format!("block length {n_bits} is not a power of two >= 2"));
        }
        let mut mask = vec![false; n_bits];
        let mut sorted = Vec::new();
        for i in frozen {
            if i >= n_bits {
                return domain(format!("frozen index {i} out of range for N={n_bits}"));
            }
            if mask[i] {
                return domain(format!("duplicate frozen index {i}"));
            }
            mask[i] = true;
            sorted.push(i);
        }
        sorted.sort_unstable();
        let info = (0..n_bits).filter(|&i| !mask[i]).collect::<Vec<_>>();
        Ok(Self {
            n_bits,
            k_info: info.len(),
            frozen: sorted,
            info,
            frozen_mask: mask,
            meta,
        })
    }

    /// Builds a code and checks that it carries exactly `k_info` information bits.
    pub fn with_k(
        n_bits: usize,
        k_info: usize,
        frozen: impl IntoIterator<Item = usize>,
        meta: CodeMeta,
    ) -> Result<Self> {
        let spec = Self::new(n_bits, frozen, meta)?;
        if spec.k_info != k_info {
            return domain(format!(
                "frozen set has {} indices, expected N-K = {}",
                spec.frozen.len(),
                n_bits.saturating_sub(k_info)
            ));
        }
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.n_bits
    }

    pub fn k(&self) -> usize {
        self.k_info
    }

    /// log2(N).
    pub fn stages(&self) -> u32 {
        self.n_bits.trailing_zeros()
    }

    pub fn rate(&self) -> f64 {
        self.k_info as f64 / self.n_bits as f64
    }

    /// Frozen indices, ascending.
    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    /// Information (non-frozen) indices, ascending.
    pub fn info(&self) -> &[usize] {
        &self.info
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen_mask[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    pub fn meta(&self) -> &CodeMeta {
        &self.meta
    }

    pub fn with_meta(mut self, meta: CodeMeta) -> Self {
        self.meta = meta;
        self
    }

    /// Writes the canonical `.pcf` form.
    pub fn write_pcf<W: Write>(&self, mut sink: W) -> Result<()> {
        self.write_pcf_with_comments(&mut sink, &[])
    }

    /// Writes the `.pcf` form with `#` comment lines placed after the magic line.
    pub fn write_pcf_with_comments<W: Write>(
        &self,
        mut sink: W,
        comments: &[String],
    ) -> Result<()> {
        writeln!(sink, "{MAGIC}")?;
        for c in comments {
            writeln!(sink, "# {c}")?;
        }
        let m = &self.meta;
        writeln!(
            sink,
            "{} {} {} {}",
            self.n_bits, self.k_info, m.design_snr_db, m.method
        )?;
        let mut params = Vec::new();
        if let Some(mu) = m.mu {
            params.push(format!("mu={mu}"));
        }
        if let Some(mc) = m.mc_size {
            params.push(format!("mc_size={mc}"));
        }
        if let Some(seed) = m.seed {
            params.push(format!("seed={seed}"));
        }
        if !params.is_empty() {
            writeln!(sink, "param {}", params.join(" "))?;
        }
        for i in &self.frozen {
            writeln!(sink, "{i}")?;
        }
        Ok(())
    }

    pub fn to_pcf_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_pcf(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("pcf output is ASCII")
    }

    pub fn read_pcf<R: BufRead>(source: R) -> Result<Self> {
        let mut lines = Vec::new();
        for (no, line) in source.lines().enumerate() {
            let line = line?;
            let content = match line.find('#') {
                Some(p) => &line[..p],
                None => &line[..],
            };
            let content = content.trim();
            if !content.is_empty() {
                lines.push((no + 1, content.to_string()));
            }
        }
        let mut it = lines.into_iter().peekable();
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

        let (no, magic) = it.next().ok_or_else(|| parse_err(1, "empty file".into()))?;
        if magic != MAGIC {
            return Err(parse_err(
                no,
                format!("expected {MAGIC:?}, found {magic:?}"),
            ));
        }
        let (hno, header) = it
            .next()
            .ok_or_else(|| parse_err(no + 1, "missing header line".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(
                hno,
                "header must be `N K design_snr_db method`".into(),
            ));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(hno, format!("bad N {:?}", fields[0])))?;
        let k: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(hno, format!("bad K {:?}", fields[1])))?;
        let snr: f64 = fields[2]
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| parse_err(hno, format!("bad design SNR {:?}", fields[2])))?;
        let method: Method = fields[3]
            .parse()
            .map_err(|e: Error| parse_err(hno, e.to_string()))?;
        if n < 2 || !n.is_power_of_two() {
            return Err(parse_err(hno, format!("N={n} is not a power of two >= 2")));
        }
        if k > n {
            return Err(parse_err(hno, format!("K={k} exceeds N={n}")));
        }
        let mut meta = CodeMeta::new(method, snr);

        if let Some((pno, p)) = it.peek().cloned() {
            if let Some(rest) = p.strip_prefix("param") {
                it.next();
                for kv in rest.split_whitespace() {
                    let (key, value) = kv
                        .split_once('=')
                        .ok_or_else(|| parse_err(pno, format!("bad param {kv:?}")))?;
                    let bad = || parse_err(pno, format!("bad value for {key}: {value:?}"));
                    match key {
                        "mu" => meta.mu = Some(value.parse().map_err(|_| bad())?),
                        "mc_size" => meta.mc_size = Some(value.parse().map_err(|_| bad())?),
                        "seed" => meta.seed = Some(value.parse().map_err(|_| bad())?),
                        _ => return Err(parse_err(pno, format!("unknown param {key:?}"))),
                    }
                }
            }
        }

        let mut seen = vec![false; n];
        let mut frozen = Vec::with_capacity(n - k);
        let mut last_line = hno;
        for (lno, l) in it {
            last_line = lno;
            let i: usize = l
                .parse()
                .map_err(|_| parse_err(lno, format!("bad index {l:?}")))?;
            if i >= n {
                return Err(parse_err(lno, format!("index {i} >= N={n}")));
            }
            if seen[i] {
                return Err(parse_err(lno, format!("duplicate index {i}")));
            }
            seen[i] = true;
            frozen.push(i);
        }
        if frozen.len() != n - k {
            return Err(parse_err(
                last_line,
                format!(
                    "found {} frozen indices, expected N-K = {}",
                    frozen.len(),
                    n - k
                ),
            ));
        }
        Self::new(n, frozen, meta)
    }
}

/// Which direction of a metric means a less reliable bit-channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Error-probability-like metrics (PCC0, PCC1, PCC2).
    WorseIsLarger,
    /// Reliability-like metrics (PCC3).
    BetterIsLarger,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::WorseIsLarger => "worse_is_larger",
            Orientation::BetterIsLarger => "better_is_larger",
        }
    }
}

/// Per-index reliability metrics produced by a construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BitChannelMetrics {
    pub values: Vec<f64>,
    pub orientation: Orientation,
}

impl BitChannelMetrics {
    pub fn new(values: Vec<f64>, orientation: Orientation) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return domain(format!(
                "metric length {} is not a power of two",
                values.len()
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("metric {i} is not finite"));
        }
        Ok(Self {
            values,
            orientation,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of the `count` least reliable channels, ascending.
    pub fn worst(&self, count: usize) -> Result<Vec<usize>> {
        match self.orientation {
            Orientation::WorseIsLarger => {
                crate::index::indices_of_greatest_elements(&self.values, count)
            }
            Orientation::BetterIsLarger => {
                crate::index::indices_of_least_elements(&self.values, count)
            }
        }
    }

    /// Writes `index,metric` rows under a header naming the orientation.
    pub fn write_dump<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "# orientation={}", self.orientation.as_str())?;
        writeln!(sink, "index,metric")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(sink, "{i},{v:e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> CodeSpec {
        CodeSpec::with_k(8, 5, [4, 0, 2], CodeMeta::new(Method::Pcc0, -1.5917)).unwrap()
    }

    #[test]
    fn fig1_layout() {
        let c = fig1();
        assert_eq!(c.frozen(), &[0, 2, 4]);
        assert_eq!(c.info(), &[1, 3, 5, 6, 7]);
        assert_eq!(c.stages(), 3);
        let text = c.to_pcf_string();
        assert_eq!(text, "PCF1\n8 5 -1.5917 PCC0\n0\n2\n4\n");
    }

    #[test]
    fn canonical_file_round_trips_byte_identical() {
        let text = "PCF1\n16 12 2.5 PCC2\nparam mu=64 seed=9\n0\n1\n2\n4\n";
        let c = CodeSpec::read_pcf(text.as_bytes()).unwrap();
        assert_eq!(c.meta().mu, Some(64));
        assert_eq!(c.to_pcf_string(), text);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# hello\nPCF1\n# provenance\n4 2 0 EXTERNAL\n\n3 # worst\n0\n";
        let c = CodeSpec::read_pcf(text.as_bytes()).unwrap();
        assert_eq!(c.frozen(), &[0, 3]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = [
            ("PCF2\n", 1),
            ("PCF1\n8 5 0 PCC0\n0\n2\n2\n", 5),
            ("PCF1\n8 5 0 PCC0\n0\n2\n9\n", 5),
            ("PCF1\n8 5 0 PCC0\n0\n2\n", 4),
            ("PCF1\n6 5 0 PCC0\n0\n", 2),
            ("PCF1\n8 5 0 PCC9\n0\n1\n2\n", 2),
            ("PCF1\n8 7 0 PCC0\nparam foo=1\n0\n", 3),
        ];
        for (text, line) in cases {
            match CodeSpec::read_pcf(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn construction_rejects_bad_sets() {
        let m = CodeMeta::external;
        assert!(CodeSpec::new(6, [0], m()).is_err());
        assert!(CodeSpec::new(1, [], m()).is_err());
        assert!(CodeSpec::new(4, [0, 0], m()).is_err());
        assert!(CodeSpec::new(4, [4], m()).is_err());
        assert!(CodeSpec::with_k(4, 2, [0], m()).is_err());
        let all = CodeSpec::new(4, 0..4, m()).unwrap();
        assert_eq!(all.k(), 0);
    }

    #[test]
    fn metric_dump_and_worst() {
        let m =
            BitChannelMetrics::new(vec![0.5, 0.1, 0.7, 0.0], Orientation::WorseIsLarger).unwrap();
        assert_eq!(m.worst(2).unwrap(), vec![0, 2]);
        let mut out = Vec::new();
        m.write_dump(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("# orientation=worse_is_larger\nindex,metric\n0,5e-1\n"));
        assert!(
            BitChannelMetrics::new(vec![1.0, f64::INFINITY], Orientation::BetterIsLarger).is_err()
        );
        assert!(BitChannelMetrics::new(vec![1.0, 2.0, 3.0], Orientation::BetterIsLarger).is_err());
    }
}
