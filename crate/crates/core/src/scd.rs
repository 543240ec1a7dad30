//! Successive-cancellation decoding over the butterfly circuit of the
//! encoder.
//!
//! The state holds an `N × (n+1)` matrix of soft values `L` and of partial
//! sums `B`. Column `n` carries the channel values and column 0 the decision
//! values. Between columns `j+1` and `j` the butterflies pair rows `i` and
//! `i + 2^{n-j-1}`, so data indices are decided in bit-reversed order.

use crate::code::CodeSpec;
use crate::error::{domain, Result};
use crate::index::reverse_bits;

/// Arithmetic used for the soft values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Domain {
    /// Log-likelihood ratios with the exact tanh rule.
    #[default]
    Log,
    /// Log-likelihood ratios with the min-sum approximation of the check combine.
    MinSum,
    /// Likelihood ratios with the product/quotient formulas.
    Linear,
}

/// Check-node combine `2·atanh(tanh(a/2)·tanh(b/2))`.
///
/// For `min(|a|,|b|) > 1` it is evaluated as
/// `sign·min(|a|,|b|) + ln(1+e^{-|a+b|}) - ln(1+e^{-|a-b|})`, which cannot
/// overflow. Below that the two log terms nearly cancel and the result could
/// round to an exact tie, so the tanh form is used; it keeps full relative
/// precision down to the smallest representable outputs.
#[inline]
pub fn check_combine(a: f64, b: f64) -> f64 {
    if a.is_infinite() {
        return a.signum() * b;
    }
    if b.is_infinite() {
        return b.signum() * a;
    }
    let m = a.abs().min(b.abs());
    if m <= 1.0 {
        return 2.0 * ((0.5 * a).tanh() * (0.5 * b).tanh()).atanh();
    }
    let s = if (a < 0.0) != (b < 0.0) { -m } else { m };
    s + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

#[inline]
pub fn check_combine_min_sum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Variable-node combine `l2 + (1-2b)·l1` for the lower branch, where `l1`
/// is the upper partner's value and `b` the upper partner's decided bit.
#[inline]
pub fn variable_combine(l1: f64, l2: f64, b: u8) -> f64 {
    if b == 0 {
        l2 + l1
    } else {
        l2 - l1
    }
}

/// Working storage for one decode.
#[derive(Debug, Clone)]
pub struct DecoderState {
    stages: u32,
    size: usize,
    domain: Domain,
    l: Vec<f64>,
    b: Vec<u8>,
    valid: Vec<bool>,
    stack: Vec<(usize, usize)>,
}

impl DecoderState {
    pub fn new(n_bits: usize, domain: Domain) -> Result<Self> {
        if n_bits < 2 || !n_bits.is_power_of_two() {
            return domain_err(n_bits);
        }
        let stages = n_bits.trailing_zeros();
        let cells = n_bits * (stages as usize + 1);
        Ok(Self {
            stages,
            size: n_bits,
            domain,
            l: vec![0.0; cells],
            b: vec![0; cells],
            valid: vec![false; cells],
            stack: Vec::with_capacity(2 * stages as usize + 2),
        })
    }

    pub fn n(&self) -> usize {
        self.size
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        j * self.size + i
    }

    /// Resets the state and writes the channel column from LLRs.
    pub fn load_llr(&mut self, llr: &[f64]) -> Result<()> {
        if llr.len() != self.size {
            return domain(format!("{} channel values for N={}", llr.len(), self.size));
        }
        let cut = self.stages as usize * self.size;
        self.valid[..cut].fill(false);
        self.valid[cut..].fill(true);
        self.b.fill(0);
        let col = &mut self.l[cut..];
        match self.domain {
            Domain::Log | Domain::MinSum => col.copy_from_slice(llr),
            Domain::Linear => {
                for (dst, &v) in col.iter_mut().zip(llr) {
                    *dst = v.exp();
                }
            }
        }
        Ok(())
    }

    /// Soft value at row `i`, column `j`, if it has been computed.
    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        let k = self.at(i, j);
        self.valid[k].then(|| self.l[k])
    }

    /// Computes `L[i][j]` and everything it depends on.
    pub fn update_l(&mut self, i: usize, j: usize) -> Result<()> {
        if i >= self.size || j > self.stages as usize {
            return domain(format!(
                "cell ({i}, {j}) outside {}×{}",
                self.size,
                self.stages + 1
            ));
        }
        self.update_l_unchecked(i, j);
        Ok(())
    }

    fn update_l_unchecked(&mut self, i: usize, j: usize) {
        let n = self.stages as usize;
        self.stack.clear();
        self.stack.push((i, j));
        while let Some(&(i, j)) = self.stack.last() {
            if self.valid[self.at(i, j)] {
                self.stack.pop();
                continue;
            }
            debug_assert!(j < n);
            let u = 1usize << (n - j);
            let half = u >> 1;
            let upper = i % u < half;
            let (top, bottom) = if upper { (i, i + half) } else { (i - half, i) };
            let kt = self.at(top, j + 1);
            let kb = self.at(bottom, j + 1);
            let mut pending = false;
            if !self.valid[kt] {
                self.stack.push((top, j + 1));
                pending = true;
            }
            if !self.valid[kb] {
                self.stack.push((bottom, j + 1));
                pending = true;
            }
            if pending {
                continue;
            }
            let (lt, lb) = (self.l[kt], self.l[kb]);
            let v = if upper {
                match self.domain {
                    Domain::Log => check_combine(lt, lb),
                    Domain::MinSum => check_combine_min_sum(lt, lb),
                    Domain::Linear => (lt * lb + 1.0) / (lt + lb),
                }
            } else {
                let bit = self.b[self.at(top, j)];
                match self.domain {
                    Domain::Log | Domain::MinSum => variable_combine(lt, lb, bit),
                    Domain::Linear => {
                        if bit == 0 {
                            lb * lt
                        } else {
                            lb / lt
                        }
                    }
                }
            };
            let k = self.at(i, j);
            self.l[k] = v;
            self.valid[k] = true;
            self.stack.pop();
        }
    }

    #[inline]
    fn tie_value(&self) -> f64 {
        if self.domain == Domain::Linear {
            1.0
        } else {
            0.0
        }
    }

    /// Hard decision on a decision-column value; ties go to 0.
    #[inline]
    fn decide(&self, v: f64) -> u8 {
        u8::from(!(v >= self.tie_value()))
    }

    /// Records the decision for data index `i` and pushes it through every
    /// butterfly whose inputs are now both known.
    fn update_b(&mut self, i: usize, bit: u8) {
        let n = self.stages as usize;
        let k = self.at(i, 0);
        self.b[k] = bit;
        self.stack.clear();
        self.stack.push((i, 0));
        while let Some((i, j)) = self.stack.pop() {
            if j + 1 >= n {
                continue;
            }
            let u = 1usize << (n - j);
            let half = u >> 1;
            if i % u < half {
                continue;
            }
            let top = i - half;
            let bt = self.b[self.at(top, j)];
            let bb = self.b[self.at(i, j)];
            let kt = self.at(top, j + 1);
            let kb = self.at(i, j + 1);
            self.b[kt] = bt ^ bb;
            self.b[kb] = bb;
            self.stack.push((top, j + 1));
            self.stack.push((i, j + 1));
        }
    }

    fn run(&mut self, frozen: Option<&[bool]>, d_hat: &mut [u8]) {
        let n = self.stages;
        for step in 0..self.size {
            let l = reverse_bits(step, n);
            self.update_l_unchecked(l, 0);
            let decision = self.decide(self.l[self.at(l, 0)]);
            match frozen {
                Some(mask) => {
                    let bit = if mask[l] { 0 } else { decision };
                    d_hat[l] = bit;
                    self.update_b(l, bit);
                }
                // an exact tie carries no evidence for 0, so the genie reports it as an error
                None => d_hat[l] = decision | u8::from(self.l[self.at(l, 0)] == self.tie_value()),
            }
        }
    }
}

fn domain_err<T>(n: usize) -> Result<T> {
    domain(format!("block length {n} is not a power of two >= 2"))
}

/// Reusable successive-cancellation decoder.
#[derive(Debug, Clone)]
pub struct Decoder {
    state: DecoderState,
    d_hat: Vec<u8>,
}

impl Decoder {
    pub fn new(n_bits: usize, domain: Domain) -> Result<Self> {
        Ok(Self {
            state: DecoderState::new(n_bits, domain)?,
            d_hat: vec![0; n_bits],
        })
    }

    pub fn state(&self) -> &DecoderState {
        &self.state
    }

    /// Decodes channel LLRs; returns the message estimate and the data word estimate.
    pub fn decode(&mut self, spec: &CodeSpec, llr: &[f64]) -> Result<(Vec<u8>, Vec<u8>)> {
        let d = self.decode_data(spec, llr)?.to_vec();
        let u = spec.info().iter().map(|&i| d[i]).collect();
        Ok((u, d))
    }

    /// Like [`Decoder::decode`] but returns a borrowed data-word estimate.
    pub fn decode_data(&mut self, spec: &CodeSpec, llr: &[f64]) -> Result<&[u8]> {
        if spec.n() != self.state.size {
            return domain(format!(
                "code length {} but decoder built for {}",
                spec.n(),
                self.state.size
            ));
        }
        self.state.load_llr(llr)?;
        self.state.run(Some(spec.frozen_mask()), &mut self.d_hat);
        Ok(&self.d_hat)
    }

    /// Runs the decoding schedule with every index treated as frozen: partial
    /// sums stay zero and the raw per-index hard decisions are returned.
    /// Unlike normal decoding, an exact tie is returned as 1 (an error under
    /// all-zero transmission).
    pub fn decode_all_frozen(&mut self, llr: &[f64]) -> Result<&[u8]> {
        self.state.load_llr(llr)?;
        self.state.run(None, &mut self.d_hat);
        Ok(&self.d_hat)
    }
}

/// One-shot log-domain decode.
pub fn decode(spec: &CodeSpec, llr: &[f64]) -> Result<(Vec<u8>, Vec<u8>)> {
    Decoder::new(spec.n(), Domain::Log)?.decode(spec, llr)
}

/// One-shot log-domain genie decode.
pub fn decode_all_frozen(llr: &[f64]) -> Result<Vec<u8>> {
    if !llr.len().is_power_of_two() || llr.len() < 2 {
        return domain_err(llr.len());
    }
    Ok(Decoder::new(llr.len(), Domain::Log)?
        .decode_all_frozen(llr)?
        .to_vec())
}
