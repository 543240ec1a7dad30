//! Index arithmetic and metric selection.

use std::cmp::Ordering;

use crate::error::{domain, Result};

/// Reverses the low `width` bits of `i`.
pub fn bit_reversal(i: usize, width: u32) -> Result<usize> {
    if width as usize >= usize::BITS as usize || i >> width != 0 {
        return domain(format!("index {i} does not fit in {width} bits"));
    }
    Ok(reverse_bits(i, width))
}

#[inline]
pub(crate) fn reverse_bits(i: usize, width: u32) -> usize {
    if width == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - width)
    }
}

/// Indices of the `l` largest entries of `v`, returned in ascending index order.
///
/// Equal values are ranked by index, so among ties the smaller index is
/// selected first.
pub fn indices_of_greatest_elements(v: &[f64], l: usize) -> Result<Vec<usize>> {
    select_by(v, l, |a, b| b.total_cmp(a))
}

/// Indices of the `l` smallest entries of `v`, ascending; ties go to the smaller index.
pub fn indices_of_least_elements(v: &[f64], l: usize) -> Result<Vec<usize>> {
    select_by(v, l, |a, b| a.total_cmp(b))
}

fn select_by(v: &[f64], l: usize, cmp: impl Fn(&f64, &f64) -> Ordering) -> Result<Vec<usize>> {
    if l > v.len() {
        return domain(format!("cannot select {l} of {} elements", v.len()));
    }
    if let Some(i) = v.iter().position(|x| x.is_nan()) {
        return domain(format!("metric {i} is NaN"));
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    // stable: equal keys keep ascending index order
    order.sort_by(|&a, &b| cmp(&v[a], &v[b]));
    order.truncate(l);
    order.sort_unstable();
    Ok(order)
}
