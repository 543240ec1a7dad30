//! Monte-Carlo estimate of bit-channel error rates: all-zero transmission,
//! genie decoding with every index frozen, and per-index error counting.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_nk, finish, Constructed};
use crate::channel::{AwgnParams, GaussianNoise, NoiseSource, Normalization};
use crate::code::{BitChannelMetrics, CodeMeta, Method, Orientation};
use crate::error::{domain, Error, Result};
use crate::index::indices_of_greatest_elements;
use crate::scd::{Decoder, Domain};
use crate::seed;

/// Trials per work unit. Each trial draws from its own generator seeded by
/// `derive(seed, PCC1_TRIAL, trial)`, so the split is only a scheduling
/// detail and never affects the counts.
const BLOCK: u64 = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarlo {
    pub trials: u64,
    pub seed: u64,
    pub threads: usize,
    pub normalization: Normalization,
    pub domain: Domain,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 1,
            threads: 1,
            normalization: Normalization::Standard,
            domain: Domain::Log,
        }
    }
}

/// Per-index error counts of the genie decoder over `mc.trials` noisy
/// all-zero words.
pub fn genie_error_counts(n: usize, design_snr_db: f64, mc: &MonteCarlo) -> Result<Vec<u64>> {
    check_nk(n, 0)?;
    if mc.trials == 0 {
        return domain("Monte-Carlo size must be at least 1");
    }
    let params = AwgnParams::with_normalization(design_snr_db, mc.normalization)?;
    let blocks = mc.trials.div_ceil(BLOCK);
    let work = |b: u64| -> Result<Vec<u64>> {
        let mut dec = Decoder::new(n, mc.domain)?;
        let mut counts = vec![0u64; n];
        let mut llr = vec![0.0; n];
        let scale = -2.0 * params.amplitude;
        for t in b * BLOCK..((b + 1) * BLOCK).min(mc.trials) {
            let mut noise = GaussianNoise(ChaCha8Rng::seed_from_u64(seed::derive(&[
                mc.seed,
                seed::tag::PCC1_TRIAL,
                t,
            ])));
            for v in llr.iter_mut() {
                *v = scale * (-params.amplitude + noise.next_normal());
            }
            for (c, &d) in counts.iter_mut().zip(dec.decode_all_frozen(&llr)?) {
                *c += d as u64;
            }
        }
        Ok(counts)
    };
    let add = |mut a: Vec<u64>, b: Vec<u64>| {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        a
    };
    if mc.threads <= 1 {
        (0..blocks).try_fold(vec![0u64; n], |acc, b| Ok(add(acc, work(b)?)))
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(mc.threads)
            .build()
            .map_err(|e| Error::State(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(work)
                .try_reduce(|| vec![0u64; n], |a, b| Ok(add(a, b)))
        })
    }
}

pub fn pcc1(n: usize, k: usize, design_snr_db: f64, mc: &MonteCarlo) -> Result<Constructed> {
    check_nk(n, k)?;
    let counts = genie_error_counts(n, design_snr_db, mc)?;
    // ranking on the integer counts; the division only produces reported rates
    let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let frozen = indices_of_greatest_elements(&as_f64, n - k)?;
    let z = counts
        .iter()
        .map(|&c| c as f64 / mc.trials as f64)
        .collect();
    let metrics = BitChannelMetrics::new(z, Orientation::WorseIsLarger)?;
    let mut meta = CodeMeta::new(Method::Pcc1, design_snr_db);
    meta.mc_size = Some(mc.trials);
    meta.seed = Some(mc.seed);
    finish(n, k, metrics, frozen, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::pcc0;

    #[test]
    fn deterministic_for_a_seed() {
        let mc = MonteCarlo {
            trials: 2000,
            seed: 7,
            ..Default::default()
        };
        let a = pcc1(32, 16, 1.0, &mc).unwrap();
        let b = pcc1(32, 16, 1.0, &mc).unwrap();
        assert_eq!(a.code, b.code);
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.code.meta().mc_size, Some(2000));
    }

    #[test]
    fn threads_do_not_change_counts() {
        let mc = MonteCarlo {
            trials: 1000,
            seed: 3,
            ..Default::default()
        };
        let seq = genie_error_counts(16, 0.0, &mc).unwrap();
        let par = genie_error_counts(16, 0.0, &MonteCarlo { threads: 4, ..mc }).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn high_snr_counts_vanish() {
        let mc = MonteCarlo {
            trials: 10_000,
            seed: 1,
            ..Default::default()
        };
        let c = genie_error_counts(2, 20.0, &mc).unwrap();
        assert!(c.iter().all(|&v| v < 5), "{c:?}");
    }

    #[test]
    fn ranking_follows_bhattacharyya_ranking() {
        let mc = MonteCarlo {
            trials: 100_000,
            seed: 1,
            ..Default::default()
        };
        let z1 = pcc1(8, 5, 0.0, &mc).unwrap().metrics.values;
        let z0 = pcc0(8, 5, 0.0).unwrap().metrics.values;
        let worst0 = (0..8).max_by(|&a, &b| z0[a].total_cmp(&z0[b])).unwrap();
        assert_eq!(worst0, 0);
        let top3 = indices_of_greatest_elements(&z1, 3).unwrap();
        assert!(top3.contains(&worst0), "{z1:?}");
    }

    #[test]
    fn rejects_empty_simulation() {
        let mc = MonteCarlo {
            trials: 0,
            ..Default::default()
        };
        assert!(pcc1(8, 4, 0.0, &mc).is_err());
    }
}
