use serde::{Deserialize, Serialize};

use super::density::ReferenceDensity;
use crate::pipeline::SpacingHistogram;

/// Distances between a histogram and a reference law over the histogram range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub reference: String,
    /// `Σ_k |count_k/total − ∫_bin_k ref|`.
    pub l1: f64,
    /// Largest per-bin density deviation.
    pub sup: f64,
    /// Largest CDF deviation at the bin edges.
    pub ks: f64,
    pub range: (f64, f64),
    pub total: u64,
}

pub fn compare(h: &SpacingHistogram, reference: &dyn ReferenceDensity) -> Comparison {
    let total = h.total.max(1) as f64;
    let (mut l1, mut sup, mut ks) = (0.0f64, 0.0f64, 0.0f64);
    let mut cum = 0u64;
    ks = ks.max((reference.cdf(h.bin_left(0))).abs());
    for (k, &c) in h.counts.iter().enumerate() {
        let (lo, hi) = (h.bin_left(k), h.bin_right(k));
        let observed = c as f64 / total;
        let expected = reference.mass(lo, hi);
        let d = (observed - expected).abs();
        l1 += d;
        sup = sup.max(d / (hi - lo));
        cum += c;
        ks = ks.max((cum as f64 / total - reference.cdf(hi)).abs());
    }
    Comparison {
        reference: reference.name().to_string(),
        l1,
        sup,
        ks,
        range: (h.t_min, h.t_max),
        total: h.total,
    }
}

/// Kolmogorov–Smirnov distance between raw samples and a reference CDF.
pub fn ks_distance(samples: &[f64], reference: &dyn ReferenceDensity) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let f = reference.cdf(x);
        d = d.max((f - i as f64 / n).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    d
}
