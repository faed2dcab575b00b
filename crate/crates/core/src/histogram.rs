use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{check_finite, max, min};

pub const DEFAULT_BINS: usize = 50;

/// Width of the single bin used when all values coincide.
pub const DEGENERATE_WIDTH: f64 = 1e-9;

/// Equal-width histogram. Bins are left-closed and right-open except the
/// last, which also includes its right edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }
}

pub fn histogram(values: &[f64], bin_count: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::Empty("histogram input"));
    }
    if bin_count == 0 {
        return Err(Error::InvalidParameter {
            name: "bin_count",
            reason: "must be positive".into(),
        });
    }
    check_finite("histogram input", values)?;
    let (lo, hi) = (min(values), max(values));

    if !(hi > lo) {
        let half = DEGENERATE_WIDTH / 2.0;
        return Ok(Histogram {
            bin_edges: vec![lo - half, lo + half],
            counts: vec![values.len() as u64],
        });
    }

    let width = (hi - lo) / bin_count as f64;
    let mut bin_edges: Vec<f64> = (0..bin_count).map(|i| lo + i as f64 * width).collect();
    bin_edges.push(hi);

    let mut counts = vec![0u64; bin_count];
    for &v in values {
        let mut idx = (((v - lo) / width) as usize).min(bin_count - 1);
        // settle rounding at the edges against the stored edge values
        while idx > 0 && v < bin_edges[idx] {
            idx -= 1;
        }
        while idx + 1 < bin_count && v >= bin_edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }
    Ok(Histogram { bin_edges, counts })
}
