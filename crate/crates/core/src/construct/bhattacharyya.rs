//! Construction from the evolution of Bhattacharyya-parameter bounds,
//! `z → (2z - z², z²)`, initialized with the AWGN value `exp(-S)`.

use super::{check_nk, finish, polarize, Constructed};
use crate::channel::AwgnParams;
use crate::code::{BitChannelMetrics, CodeMeta, Method, Orientation};
use crate::error::Result;
use crate::index::indices_of_greatest_elements;

/// Natural logarithms of the bounds for all `2^stages` bit-channels.
///
/// In log form the upper transform is `ζ + ln(2 - e^ζ)` and the lower one `2ζ`.
pub fn bhattacharyya_bounds_log(stages: u32, s_linear: f64) -> Vec<f64> {
    polarize(-s_linear, stages, |_, _, &z| {
        Ok((z + upper_log_term(z), 2.0 * z))
    })
    .expect("transform is infallible")
}

#[inline]
fn upper_log_term(z: f64) -> f64 {
    // ln(2 - e^z) = ln 2 + ln(1 - e^z / 2)
    std::f64::consts::LN_2 + (-0.5 * z.exp()).ln_1p()
}

pub fn pcc0(n: usize, k: usize, design_snr_db: f64) -> Result<Constructed> {
    let stages = check_nk(n, k)?;
    let params = AwgnParams::from_db(design_snr_db)?;
    let log_z = bhattacharyya_bounds_log(stages, params.s_linear);
    let frozen = indices_of_greatest_elements(&log_z, n - k)?;
    let metrics = BitChannelMetrics::new(
        log_z.iter().map(|v| v.exp()).collect(),
        Orientation::WorseIsLarger,
    )?;
    finish(
        n,
        k,
        metrics,
        frozen,
        CodeMeta::new(Method::Pcc0, design_snr_db),
    )
}
