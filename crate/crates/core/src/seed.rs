//! Stable derivation of sub-seeds from a master seed.
//!
//! `derive(&[a, b, c, …])` folds each part into a SplitMix64 state:
//! `h ← mix(h ⊕ part)`, starting from `h = mix(0x5EED)`. The mixing constants
//! are those of SplitMix64, so results never change across releases or
//! platforms.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(parts: &[u64]) -> u64 {
    parts.iter().fold(mix(0x5EED), |h, &p| mix(h ^ p))
}

/// Domain tags separating the seed streams of different consumers.
pub mod tag {
    pub const PCC1_TRIAL: u64 = 0x5043_4331;
    pub const SIM_TRIAL: u64 = 0x5349_4d54;
    pub const SWEEP_CODE: u64 = 0x5357_4350;
    pub const SWEEP_EVAL: u64 = 0x5357_4556;
    pub const COMPARE: u64 = 0x434d_5052;
}
