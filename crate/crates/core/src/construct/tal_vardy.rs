//! Construction by tracking quantized transition matrices of every
//! bit-channel, with greedy capacity-preserving column merging.

use super::{bhattacharyya_bounds_log, check_nk, finish, polarize, Constructed, HeapList};
use crate::channel::{discretize_awgn, AwgnParams, Column, Tpm};
use crate::code::{BitChannelMetrics, CodeMeta, Method, Orientation};
use crate::error::{domain, Result};
use crate::index::indices_of_greatest_elements;

fn require_canonical(p: &Tpm) -> Result<()> {
    if p.width() == 0 || !p.is_canonical() {
        return domain("transition matrix is not canonical");
    }
    Ok(())
}

/// Rescales to unit mass. The unordered-pair enumeration of the half
/// channel covers each output pair exactly half a time, so one constant
/// restores a stochastic matrix.
fn normalize(cols: Vec<Column>) -> Tpm {
    let mass: f64 = cols.iter().map(Column::mass).sum();
    Tpm::canonicalize(cols.into_iter().map(|c| c.scale(1.0 / mass)).collect())
}

/// Half channel of `W ⊞ W`.
pub fn upper_convolve(p: &Tpm) -> Result<Tpm> {
    require_canonical(p)?;
    let c = p.columns();
    let mut out = Vec::with_capacity(c.len() * (c.len() + 1) / 2);
    for (i, a) in c.iter().enumerate() {
        out.push(Column::new(0.5 * (a.p0 * a.p0 + a.p1 * a.p1), a.p0 * a.p1));
        for b in &c[i + 1..] {
            out.push(Column::new(
                a.p0 * b.p0 + a.p1 * b.p1,
                a.p0 * b.p1 + a.p1 * b.p0,
            ));
        }
    }
    Ok(normalize(out))
}

/// Half channel of `W ⊠ W`.
pub fn lower_convolve(p: &Tpm) -> Result<Tpm> {
    require_canonical(p)?;
    let c = p.columns();
    let mut out = Vec::with_capacity(c.len() * (c.len() + 1));
    for (i, a) in c.iter().enumerate() {
        out.push(Column::new(0.5 * a.p0 * a.p0, 0.5 * a.p1 * a.p1));
        // the (y, ȳ) diagonal: a tie column, weighted like the other diagonal
        let tie = 0.5 * a.p0 * a.p1;
        out.push(Column::new(tie, tie));
        for b in &c[i + 1..] {
            out.push(Column::new(a.p0 * b.p0, a.p1 * b.p1));
            out.push(Column::new(a.p0 * b.p1, a.p1 * b.p0));
        }
    }
    Ok(normalize(out))
}

/// Capacity lost by merging two columns into their sum.
pub fn capacity_loss(c1: Column, c2: Column) -> Result<f64> {
    for c in [c1, c2] {
        if !(c.p1 >= 0.0 && c.p0 >= c.p1) {
            return domain(format!(
                "column ({}, {}) is not oriented with p0 >= p1 >= 0",
                c.p0, c.p1
            ));
        }
    }
    if c1.mass() == 0.0 && c2.mass() == 0.0 {
        return domain("both columns are empty");
    }
    Ok(super::heaplist::merge_loss(&c1, &c2).max(0.0))
}

/// Greedily merges adjacent columns of least capacity loss until at most
/// `mu` remain.
pub fn quantize_to_size(p: &Tpm, mu: usize) -> Result<Tpm> {
    if mu < 1 {
        return domain("alphabet size must be at least 1");
    }
    if p.width() <= mu && p.is_canonical() {
        return Ok(p.clone());
    }
    let mut h = HeapList::initialize(p)?;
    h.reduce_to(mu);
    h.tpm()
}

pub fn tpm_ber(p: &Tpm) -> f64 {
    p.ber()
}

pub fn tpm_capacity(p: &Tpm) -> f64 {
    p.capacity()
}

pub fn tpm_bhattacharyya(p: &Tpm) -> f64 {
    p.bhattacharyya()
}

/// Element-wise minimum of two metric vectors.
pub fn hybrid_min(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return domain(format!("metric lengths differ: {} vs {}", a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.min(*y)).collect())
}

/// Quantized transition matrices of all `2^stages` bit-channels.
pub fn polarize_tpm(initial: &Tpm, stages: u32, mu: usize) -> Result<Vec<Tpm>> {
    let root = quantize_to_size(initial, mu)?;
    polarize(root, stages, |_, _, w| {
        let upper = quantize_to_size(&upper_convolve(w)?, mu)?;
        let lower = quantize_to_size(&lower_convolve(w)?, mu)?;
        debug_assert!(upper.width() <= mu && lower.width() <= mu);
        Ok((upper, lower))
    })
}

pub fn pcc2(n: usize, k: usize, design_snr_db: f64, mu: usize) -> Result<Constructed> {
    let stages = check_nk(n, k)?;
    if mu < 2 {
        return domain(format!("alphabet size {mu} must be at least 2"));
    }
    let params = AwgnParams::from_db(design_snr_db)?;
    let channels = polarize_tpm(&discretize_awgn(mu, &params)?, stages, mu)?;
    let log_z0 = bhattacharyya_bounds_log(stages, params.s_linear);
    // rank in logs so that tiny bounds keep their order
    let keys: Vec<f64> = channels
        .iter()
        .zip(&log_z0)
        .map(|(w, &z)| w.ber().ln().min(z))
        .collect();
    let frozen = indices_of_greatest_elements(&keys, n - k)?;
    let ber: Vec<f64> = channels.iter().map(Tpm::ber).collect();
    let z0: Vec<f64> = log_z0.iter().map(|v| v.exp()).collect();
    let metrics = BitChannelMetrics::new(hybrid_min(&ber, &z0)?, Orientation::WorseIsLarger)?;
    let mut meta = CodeMeta::new(Method::Pcc2, design_snr_db);
    meta.mu = Some(mu);
    finish(n, k, metrics, frozen, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::TieRule;
    use crate::encoder::polar_transform;
    use crate::index::reverse_bits;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn bsc(p: f64) -> Tpm {
        Tpm::from_columns([Column::new(1.0 - p, p)]).unwrap()
    }

    /// Exact bit-channel error probabilities of a BSC by enumeration of all
    /// messages and outputs, in the decoder's bit order.
    fn bsc_bit_channels(p: f64, n: usize, rule: TieRule) -> Vec<f64> {
        let stages = n.trailing_zeros();
        let mut joint = vec![vec![0.0; 1 << n]; 1 << n]; // [u][y]
        for u in 0..1usize << n {
            let bits: Vec<u8> = (0..n).map(|i| (u >> i & 1) as u8).collect();
            let x = polar_transform(&bits).unwrap();
            for y in 0..1usize << n {
                joint[u][y] = (0..n)
                    .map(|i| {
                        if x[i] == (y >> i & 1) as u8 {
                            1.0 - p
                        } else {
                            p
                        }
                    })
                    .product();
            }
        }
        let order: Vec<usize> = (0..n).map(|s| reverse_bits(s, stages)).collect();
        let mut pe = vec![0.0; n];
        for (step, &i) in order.iter().enumerate() {
            let past = &order[..step];
            // condition on all-zero past bits, average over future ones
            for y in 0..1usize << n {
                let mut w = [0.0; 2];
                for u in 0..1usize << n {
                    if past.iter().any(|&j| u >> j & 1 == 1) {
                        continue;
                    }
                    w[u >> i & 1] += joint[u][y];
                }
                let scale = 0.5f64.powi((n - step - 1) as i32);
                let (w0, w1) = (w[0] * scale, w[1] * scale);
                pe[i] += match rule {
                    TieRule::Split if w0 == w1 => 0.5 * w0,
                    _ if w1 > w0 => w0,
                    _ => 0.0,
                };
            }
        }
        pe
    }

    #[test]
    fn bsc_oracle_values() {
        let split = bsc_bit_channels(0.1, 2, TieRule::Split);
        assert_abs_diff_eq!(split[0], 0.18, epsilon = 1e-12);
        assert_abs_diff_eq!(split[1], 0.10, epsilon = 1e-12);
        let zero = bsc_bit_channels(0.1, 2, TieRule::TowardZero);
        assert_abs_diff_eq!(zero[1], 0.01, epsilon = 1e-12);
    }

    #[test]
    fn bsc_convolutions() {
        let w = bsc(0.1);
        let up = upper_convolve(&w).unwrap();
        assert_eq!(up.width(), 1);
        assert_abs_diff_eq!(up.columns()[0].p0, 0.82, epsilon = 1e-15);
        assert_abs_diff_eq!(up.mass(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(up.ber(), 0.18, epsilon = 1e-12);
        let lo = lower_convolve(&w).unwrap();
        assert_abs_diff_eq!(lo.mass(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lo.ber_with(TieRule::TowardZero), 0.01, epsilon = 1e-12);
        assert_abs_diff_eq!(lo.ber_with(TieRule::Split), 0.10, epsilon = 1e-12);
    }

    #[test]
    fn perfect_channel_stays_perfect() {
        let w = Tpm::from_columns([Column::new(1.0, 0.0)]).unwrap();
        for out in [upper_convolve(&w).unwrap(), lower_convolve(&w).unwrap()] {
            assert_eq!(out.columns(), &[Column::new(1.0, 0.0)]);
            assert_eq!(out.ber(), 0.0);
        }
    }

    #[test]
    fn non_canonical_input_rejected() {
        let raw = Tpm::unchecked(vec![Column::new(0.5, 0.0), Column::new(0.3, 0.2)]);
        assert!(upper_convolve(&raw).is_err());
        assert!(lower_convolve(&raw).is_err());
    }

    #[test]
    fn full_alphabet_polarization_matches_enumeration() {
        for p in [0.1, 0.23] {
            for n in [2usize, 4] {
                let oracle = bsc_bit_channels(p, n, TieRule::Split);
                let got = polarize_tpm(&bsc(p), n.trailing_zeros(), 1 << 12).unwrap();
                for (w, e) in got.iter().zip(&oracle) {
                    assert_abs_diff_eq!(w.ber(), *e, epsilon = 1e-12);
                }
                // μ = 64 is ample for the few outputs a BSC produces
                let quantized = polarize_tpm(&bsc(p), n.trailing_zeros(), 64).unwrap();
                for (w, e) in quantized.iter().zip(&oracle) {
                    assert_abs_diff_eq!(w.ber(), *e, epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn bhattacharyya_transforms() {
        let w = discretize_awgn(16, &AwgnParams::from_db(0.0).unwrap()).unwrap();
        let z = w.bhattacharyya();
        let lower = lower_convolve(&w).unwrap();
        assert_abs_diff_eq!(lower.bhattacharyya(), z * z, epsilon = 1e-9);
        let upper = upper_convolve(&w).unwrap();
        assert!(upper.bhattacharyya() <= 2.0 * z - z * z + 1e-9);
    }

    #[test]
    fn capacity_loss_cases() {
        assert_abs_diff_eq!(
            capacity_loss(Column::new(0.4, 0.1), Column::new(0.2, 0.05)).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert!(capacity_loss(Column::new(0.4, 0.1), Column::new(0.1, 0.4)).is_err());
        assert!(capacity_loss(Column::new(0.0, 0.0), Column::new(0.0, 0.0)).is_err());
        let i = |a: f64, b: f64| {
            let s = a + b;
            a * (2.0 * a / s).log2() + b * (2.0 * b / s).log2()
        };
        let expected = i(0.5, 0.02) + i(0.3, 0.05) - i(0.8, 0.07);
        let got = capacity_loss(Column::new(0.5, 0.02), Column::new(0.3, 0.05)).unwrap();
        assert!(got > 0.0);
        assert_abs_diff_eq!(got, expected, epsilon = 1e-15);
    }

    #[test]
    fn tpm_measure_examples() {
        let w = bsc(0.1);
        assert_abs_diff_eq!(tpm_ber(&w), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(tpm_bhattacharyya(&w), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(tpm_capacity(&w), 0.531004406410719, epsilon = 1e-12);
        let perfect = Tpm::from_columns([Column::new(1.0, 0.0)]).unwrap();
        assert_eq!(
            (
                tpm_ber(&perfect),
                tpm_capacity(&perfect),
                tpm_bhattacharyya(&perfect)
            ),
            (0.0, 1.0, 0.0)
        );
    }

    #[test]
    fn quantizer_examples() {
        let params = AwgnParams::from_db(0.0).unwrap();
        let small = discretize_awgn(8, &params).unwrap();
        assert_eq!(quantize_to_size(&small, 8).unwrap(), small);
        let fine = discretize_awgn(256, &params).unwrap();
        let q = quantize_to_size(&fine, 16).unwrap();
        assert_eq!(q.width(), 16);
        assert!(q.is_canonical());
        assert_abs_diff_eq!(q.ber(), fine.ber(), epsilon = 1e-12);
        assert!(q.capacity() <= fine.capacity());
        assert_eq!(quantize_to_size(&q, 16).unwrap(), q);
        assert!(quantize_to_size(&fine, 0).is_err());
    }

    #[test]
    fn two_channels_against_fine_grid() {
        let params = AwgnParams::from_db(0.0).unwrap();
        let fine = discretize_awgn(2048, &params).unwrap();
        let oracle = [
            upper_convolve(&fine).unwrap().ber(),
            lower_convolve(&fine).unwrap().ber(),
        ];
        let c = pcc2(2, 1, 0.0, 64).unwrap();
        let z0 = bhattacharyya_bounds_log(1, params.s_linear);
        for i in 0..2 {
            let expected = oracle[i].min(z0[i].exp());
            assert_abs_diff_eq!(c.metrics.values[i], expected, epsilon = 1e-3);
        }
        assert_eq!(c.code.meta().mu, Some(64));
        assert!(pcc2(2, 1, 0.0, 1).is_err());
    }

    #[test]
    fn hybrid_takes_the_bound_when_smaller() {
        assert_eq!(
            hybrid_min(&[0.3, 0.01], &[0.2, 0.05]).unwrap(),
            vec![0.2, 0.01]
        );
        assert!(hybrid_min(&[0.1], &[]).is_err());
        let c = pcc2(64, 32, 1.0, 16).unwrap();
        let z0: Vec<f64> = bhattacharyya_bounds_log(6, AwgnParams::from_db(1.0).unwrap().s_linear)
            .iter()
            .map(|v| v.exp())
            .collect();
        assert!(c.metrics.values.iter().zip(&z0).all(|(a, b)| a <= b));
    }

    #[test]
    fn quantization_inside_construction_is_safe() {
        let params = AwgnParams::from_db(2.0).unwrap();
        let w = discretize_awgn(16, &params).unwrap();
        polarize(w, 5, |_, _, w| {
            let mut kids = Vec::new();
            for raw in [upper_convolve(w)?, lower_convolve(w)?] {
                let q = quantize_to_size(&raw, 16)?;
                assert!(q.width() <= 16);
                assert_abs_diff_eq!(q.mass(), 1.0, epsilon = 1e-9);
                assert_abs_diff_eq!(q.ber(), raw.ber(), epsilon = 1e-12);
                kids.push(q);
            }
            let lower = kids.pop().unwrap();
            Ok((kids.pop().unwrap(), lower))
        })
        .unwrap();
    }

    fn random_tpm() -> impl Strategy<Value = Tpm> {
        prop::collection::vec((0.01f64..1.0, 0.0f64..1.0), 1..200).prop_map(|v| {
            let cols: Vec<Column> = v
                .iter()
                .map(|&(m, f)| Column::new(m * (1.0 - 0.5 * f), m * 0.5 * f))
                .collect();
            let total: f64 = cols.iter().map(Column::mass).sum();
            Tpm::from_columns(cols.into_iter().map(|c| c.scale(1.0 / total))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn quantizer_invariants(p in random_tpm(), mu in 4usize..=64) {
            let q = quantize_to_size(&p, mu).unwrap();
            prop_assert!(q.width() <= mu);
            prop_assert!(q.is_canonical());
            prop_assert!((q.mass() - 1.0).abs() <= 1e-9);
            prop_assert!((q.ber() - p.ber()).abs() <= 1e-12);
            prop_assert!(q.capacity() <= p.capacity() + 1e-12);
        }

        #[test]
        fn convolutions_keep_unit_mass(p in random_tpm()) {
            let p = quantize_to_size(&p, 16).unwrap();
            for out in [upper_convolve(&p).unwrap(), lower_convolve(&p).unwrap()] {
                prop_assert!((out.mass() - 1.0).abs() <= 1e-12);
                prop_assert!(out.is_canonical());
            }
        }
    }
}
