//! Construction by the Gaussian approximation: each bit-channel LLR is
//! modelled as `N(m, 2m)` and tracked by its mean `m`.
//!
//! Means grow to `4S·N`, where `φ` underflows, so the recursion is carried
//! out on `ln φ`.

use std::f64::consts::{LN_2, PI};

use super::{check_nk, finish, polarize, Constructed};
use crate::channel::AwgnParams;
use crate::code::{BitChannelMetrics, CodeMeta, Method, Orientation};
use crate::error::{domain, Error, Result};
use crate::index::indices_of_least_elements;

const BRANCH: f64 = 10.0;

fn check_arg(x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("phi is defined for finite x > 0, got {x}"));
    }
    Ok(())
}

fn ln_phi_unchecked(x: f64) -> f64 {
    if x <= BRANCH {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        // asymptotic form √(π/x)·(1 − 10/(7x))·e^{−x/4}
        0.5 * (PI / x).ln() + (-10.0 / (7.0 * x)).ln_1p() - 0.25 * x
    }
}

pub fn ln_phi(x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(ln_phi_unchecked(x))
}

pub fn phi(x: f64) -> Result<f64> {
    ln_phi(x).map(f64::exp)
}

/// `ln φ(0+)`: the interpolation slightly exceeds 1 near the origin, so
/// the inverse accepts `y` up to `e^{0.0218}`.
const LN_PHI_MAX: f64 = 0.0218;

/// Inverse of `φ` given `ln y`, by bisection.
pub fn phi_inv_ln(ln_y: f64) -> Result<f64> {
    if !(ln_y < LN_PHI_MAX && ln_y > f64::NEG_INFINITY) {
        return domain(format!(
            "phi_inv needs y in (0, e^{LN_PHI_MAX}), got ln y = {ln_y}"
        ));
    }
    let mut lo = 1e-12;
    let mut hi = 1e4;
    while ln_phi_unchecked(hi) > ln_y {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Numerical(format!(
                "no bracket for phi_inv at ln y = {ln_y}"
            )));
        }
    }
    if ln_phi_unchecked(lo) < ln_y {
        return Err(Error::Numerical(format!(
            "ln y = {ln_y} lies above phi's range"
        )));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ln_phi_unchecked(mid) > ln_y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn phi_inv(y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return domain(format!("phi_inv needs y > 0, got {y}"));
    }
    phi_inv_ln(y.ln())
}

/// LLR means of all bit-channels, starting from `4S`.
pub fn gaussian_metrics(stages: u32, s_linear: f64) -> Result<Vec<f64>> {
    polarize(4.0 * s_linear, stages, |_, _, &t| {
        // 1 − (1 − φ)², as ln φ + ln(2 − φ) when φ is small and through
        // 1 − φ when it is close to 1
        let lp = ln_phi(t)?;
        let ln_y = if lp < -1.0 {
            lp + LN_2 + (-0.5 * lp.exp()).ln_1p()
        } else {
            let d = -lp.exp_m1();
            (-d * d).ln_1p()
        };
        Ok((phi_inv_ln(ln_y)?, 2.0 * t))
    })
}

pub fn pcc3(n: usize, k: usize, design_snr_db: f64) -> Result<Constructed> {
    let stages = check_nk(n, k)?;
    let params = AwgnParams::from_db(design_snr_db)?;
    let t = gaussian_metrics(stages, params.s_linear)?;
    let frozen = indices_of_least_elements(&t, n - k)?;
    let metrics = BitChannelMetrics::new(t, Orientation::BetterIsLarger)?;
    finish(
        n,
        k,
        metrics,
        frozen,
        CodeMeta::new(Method::Pcc3, design_snr_db),
    )
}
