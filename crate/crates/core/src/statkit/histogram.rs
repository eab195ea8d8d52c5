use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::StatError;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram<T> {
    pub bin_edges: Vec<T>,
    pub counts: Vec<usize>,
    pub total: usize,
    /// Share of observations at or above 0.8.
    pub proportion_at_least_0_8: T,
}

impl<T: Real> Histogram<T> {
    /// `lower,upper,count` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lower,upper,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            writeln!(out, "{},{},{}", self.bin_edges[i], self.bin_edges[i + 1], c).expect("write to string");
        }
        out
    }

    /// One `[lo, hi) count ####` line per bin, bars scaled to `width`.
    pub fn render_bars(&self, width: usize) -> String {
        let max = self.counts.iter().copied().max().unwrap_or(0).max(1);
        let mut out = String::new();
        for (i, &c) in self.counts.iter().enumerate() {
            let close = if i + 1 == self.counts.len() { ']' } else { ')' };
            let bar = "#".repeat(c * width / max);
            writeln!(
                out,
                "[{:>5.2}, {:>5.2}{close} {c:>6} {bar}",
                self.bin_edges[i].to_f64().unwrap_or(f64::NAN),
                self.bin_edges[i + 1].to_f64().unwrap_or(f64::NAN)
            )
            .expect("write to string");
        }
        out
    }
}

/// Equal-width histogram over `[lo, hi]` with a right-closed final bin.
/// Values are clamped to [-1, 1] first and must then lie in the range.
pub fn similarity_histogram<T: Real>(values: &[T], bins: usize, range: (T, T)) -> Result<Histogram<T>, StatError> {
    if values.is_empty() {
        return Err(StatError::Empty);
    }
    if bins == 0 {
        return Err(StatError::BadBins);
    }
    let (lo, hi) = range;
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(StatError::BadBins);
    }
    let width = (hi - lo) / T::from_count(bins);
    let bin_edges: Vec<T> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * T::from_count(i) })
        .collect();
    let mut counts = vec![0usize; bins];
    let mut high = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(StatError::NonFinite(i));
        }
        let v = v.max(-T::one()).min(T::one());
        if v < lo || v > hi {
            return Err(StatError::OutOfRange(v.to_f64().unwrap_or(f64::NAN)));
        }
        let k = ((v - lo) / width).floor().to_usize().unwrap_or(0).min(bins - 1);
        counts[k] += 1;
        if v >= T::lit(0.8) {
            high += 1;
        }
    }
    Ok(Histogram {
        bin_edges,
        counts,
        total: values.len(),
        proportion_at_least_0_8: T::from_count(high) / T::from_count(values.len()),
    })
}
