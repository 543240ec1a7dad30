//! Polar transform `x = F^{⊗n} d` and message embedding.
//!
//! Bits are stored one per byte with values 0 or 1. Index `i` of `d` is the
//! row index of the transform input; no bit-reversal is applied.

use crate::code::CodeSpec;
use crate::error::{domain, Result};

/// Places the message bits at the information indices (ascending) and zeros elsewhere.
pub fn embed(spec: &CodeSpec, u: &[u8]) -> Result<Vec<u8>> {
    if u.len() != spec.k() {
        return domain(format!(
            "message has {} bits, code expects K={}",
            u.len(),
            spec.k()
        ));
    }
    check_bits(u)?;
    let mut d = vec![0u8; spec.n()];
    for (&pos, &bit) in spec.info().iter().zip(u) {
        d[pos] = bit;
    }
    Ok(d)
}

/// Reads the message back out of a data word.
pub fn extract(spec: &CodeSpec, d: &[u8]) -> Vec<u8> {
    spec.info().iter().map(|&i| d[i]).collect()
}

/// Butterfly evaluation of `F^{⊗n} d` over GF(2): `n` stages of `N/2` XORs.
pub fn polar_transform(d: &[u8]) -> Result<Vec<u8>> {
    let mut x = d.to_vec();
    polar_transform_in_place(&mut x)?;
    Ok(x)
}

/// In-place variant of [`polar_transform`].
pub fn polar_transform_in_place(x: &mut [u8]) -> Result<()> {
    let n = x.len();
    if n == 0 || !n.is_power_of_two() {
        return domain(format!("length {n} is not a power of two"));
    }
    check_bits(x)?;
    let mut half = 1;
    while half < n {
        // group size 2*half: upper half ^= lower half
        for group in x.chunks_exact_mut(2 * half) {
            let (upper, lower) = group.split_at_mut(half);
            for (a, b) in upper.iter_mut().zip(lower.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
    Ok(())
}

/// Explicit matrix-vector product with `F^{⊗n}` built by Kronecker products.
/// Test oracle; limited to `N <= 1024`.
pub fn polar_transform_naive(d: &[u8]) -> Result<Vec<u8>> {
    let n = d.len();
    if n == 0 || !n.is_power_of_two() {
        return domain(format!("length {n} is not a power of two"));
    }
    if n > 1024 {
        return domain("naive transform limited to N <= 1024");
    }
    check_bits(d)?;
    let g = kronecker_power(n.trailing_zeros());
    Ok((0..n)
        .map(|r| (0..n).fold(0u8, |acc, c| acc ^ (g[r * n + c] & d[c])))
        .collect())
}

/// `F^{⊗n}` as a row-major `2^n × 2^n` 0/1 matrix, with `F = [[1,1],[0,1]]`.
pub fn kronecker_power(n: u32) -> Vec<u8> {
    const KERNEL: [u8; 4] = [1, 1, 0, 1];
    let mut m = vec![1u8];
    let mut size = 1usize;
    for _ in 0..n {
        let next_size = size * 2;
        let mut next = vec![0u8; next_size * next_size];
        for r in 0..next_size {
            for c in 0..next_size {
                let k = KERNEL[(r / size) * 2 + c / size];
                next[r * next_size + c] = k & m[(r % size) * size + c % size];
            }
        }
        m = next;
        size = next_size;
    }
    m
}

/// `x = G u` with `G` the columns of `F^{⊗n}` at the information indices.
pub fn encode(spec: &CodeSpec, u: &[u8]) -> Result<Vec<u8>> {
    let mut d = embed(spec, u)?;
    polar_transform_in_place(&mut d)?;
    Ok(d)
}

fn check_bits(b: &[u8]) -> Result<()> {
    match b.iter().position(|&v| v > 1) {
        Some(i) => domain(format!("entry {i} is {} (bits must be 0 or 1)", b[i])),
        None => Ok(()),
    }
}
