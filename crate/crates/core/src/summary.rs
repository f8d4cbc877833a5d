//! Five-number summaries using the median-of-halves quartile rule.
//!
//! The sorted sample is split at the median. With an odd count the middle
//! value belongs to neither half. Q1 and Q3 are the medians of the lower and
//! upper halves. A single value is its own Q1, median and Q3.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Summarizes `values`; `None` when empty. NaNs sort last.
pub fn five_number(values: &[f64]) -> Option<FiveNumber> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = median_sorted(&sorted);
    let (q1, q3) = if n == 1 {
        (median, median)
    } else {
        let half = n / 2;
        (
            median_sorted(&sorted[..half]),
            median_sorted(&sorted[n - half..]),
        )
    };
    let min = sorted[0];
    // offsetting from the minimum keeps a constant sample's mean exact
    let mean = min + sorted.iter().map(|v| v - min).sum::<f64>() / n as f64;
    Some(FiveNumber {
        min,
        q1,
        median,
        q3,
        max: sorted[n - 1],
        mean,
    })
}
