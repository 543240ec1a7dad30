//! Bit-channel reliability estimation and frozen-set selection.
//!
//! All four algorithms share the same index schedule: starting from the
//! channel at index 0, stage `j = 1..=n` replaces each of the `2^{j-1}`
//! existing estimates at `t` by its upper transform and writes the lower
//! transform to `t + 2^{j-1}`.

mod bhattacharyya;
mod gaussian;
mod heaplist;
mod monte_carlo;
mod tal_vardy;

pub use bhattacharyya::{bhattacharyya_bounds_log, pcc0};
pub use gaussian::{gaussian_metrics, ln_phi, pcc3, phi, phi_inv, phi_inv_ln};
pub use heaplist::HeapList;
pub use monte_carlo::{genie_error_counts, pcc1, MonteCarlo};
pub use tal_vardy::{
    capacity_loss, hybrid_min, lower_convolve, pcc2, polarize_tpm, quantize_to_size, tpm_ber,
    tpm_bhattacharyya, tpm_capacity, upper_convolve,
};

use crate::code::{BitChannelMetrics, CodeMeta, CodeSpec, Method};
use crate::error::{domain, Result};

/// Outcome of a construction: the metrics and the code they select.
#[derive(Debug, Clone)]
pub struct Constructed {
    pub metrics: BitChannelMetrics,
    pub code: CodeSpec,
}

/// A construction algorithm with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    Pcc0,
    Pcc1(MonteCarlo),
    Pcc2 { mu: usize },
    Pcc3,
}

impl Construction {
    pub fn method(&self) -> Method {
        match self {
            Construction::Pcc0 => Method::Pcc0,
            Construction::Pcc1(_) => Method::Pcc1,
            Construction::Pcc2 { .. } => Method::Pcc2,
            Construction::Pcc3 => Method::Pcc3,
        }
    }

    pub fn build(&self, n: usize, k: usize, design_snr_db: f64) -> Result<Constructed> {
        match self {
            Construction::Pcc0 => pcc0(n, k, design_snr_db),
            Construction::Pcc1(mc) => pcc1(n, k, design_snr_db, mc),
            Construction::Pcc2 { mu } => pcc2(n, k, design_snr_db, *mu),
            Construction::Pcc3 => pcc3(n, k, design_snr_db),
        }
    }
}

/// Validates `(N, K)` and returns `n = log2 N`.
pub(crate) fn check_nk(n: usize, k: usize) -> Result<u32> {
    if n < 2 || !n.is_power_of_two() {
        return domain(format!("block length {n} is not a power of two >= 2"));
    }
    if k > n {
        return domain(format!("K={k} exceeds N={n}"));
    }
    Ok(n.trailing_zeros())
}

/// Runs the polarization schedule from `root`. `step(stage, t, parent)`
/// returns the (upper, lower) children; the upper one stays at `t` and the
/// lower one lands at `t + 2^{stage-1}`.
pub fn polarize<T>(
    root: T,
    stages: u32,
    mut step: impl FnMut(u32, usize, &T) -> Result<(T, T)>,
) -> Result<Vec<T>> {
    let mut v = Vec::with_capacity(1 << stages);
    v.push(root);
    for j in 1..=stages {
        let half = v.len();
        for t in 0..half {
            let (upper, lower) = step(j, t, &v[t])?;
            v[t] = upper;
            v.push(lower);
        }
    }
    Ok(v)
}

pub(crate) fn finish(
    n: usize,
    k: usize,
    metrics: BitChannelMetrics,
    frozen: Vec<usize>,
    meta: CodeMeta,
) -> Result<Constructed> {
    let code = CodeSpec::with_k(n, k, frozen, meta)?;
    Ok(Constructed { metrics, code })
}
