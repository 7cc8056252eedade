use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::GapList;

/// Minimum number of tail gaps a fit accepts.
pub const MIN_TAIL_SAMPLES: usize = 100;

/// One tail bin: its range, the number of gaps in it and the density
/// estimate `count / (N·width)` with `N` the total number of gaps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    pub density: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFitOptions {
    /// Gaps per equal-count bin.
    pub min_bin_count: usize,
    /// Number of higher-order terms `t⁵, t⁶, …` fitted alongside `t³, t⁴`.
    pub extra_terms: usize,
    /// Reweighting passes using the fitted model for the bin variances.
    pub reweight: usize,
}

impl Default for TailFitOptions {
    fn default() -> Self {
        TailFitOptions {
            min_bin_count: 50,
            extra_terms: 0,
            reweight: 2,
        }
    }
}

/// Power-law fit `ĝ(1/t) ≈ c₃t³ + c₄t⁴ (+ …)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub c3: f64,
    pub c4: f64,
    /// Coefficients of the extra terms, if any were requested.
    pub extra: Vec<f64>,
    /// Count-weighted sum of squared relative residuals.
    pub residual: f64,
    pub fit_range: (f64, f64),
    pub sample_count: u64,
    pub bins: usize,
    pub options: TailFitOptions,
}

/// Smallest normalised gap.
pub fn gap_size(gl: &GapList) -> Result<f64> {
    gl.gaps
        .iter()
        .copied()
        .reduce(f64::min)
        .ok_or_else(|| Error::usage("gap size of an empty gap list"))
}

/// Groups the gaps in `[d_lo, d_hi)` into bins of `min_count` consecutive
/// values (the last bin absorbs the remainder). Bin edges sit halfway
/// between neighbouring gaps; the outer edges are `d_lo` and `d_hi`.
pub fn equal_count_bins(gaps: &[f64], d_lo: f64, d_hi: f64, min_count: usize) -> Result<Vec<TailBin>> {
    if !(d_lo > 0.0 && d_hi > d_lo) {
        return Err(Error::usage(format!("invalid fit range [{d_lo}, {d_hi}]")));
    }
    if min_count == 0 {
        return Err(Error::usage("bins need at least one gap"));
    }
    let total = gaps.len() as f64;
    let mut tail: Vec<f64> = gaps.iter().copied().filter(|&g| g >= d_lo && g < d_hi).collect();
    if tail.len() < MIN_TAIL_SAMPLES.max(min_count) {
        return Err(Error::usage(format!(
            "only {} gaps in [{d_lo}, {d_hi}), need at least {}",
            tail.len(),
            MIN_TAIL_SAMPLES.max(min_count)
        )));
    }
    tail.sort_unstable_by(f64::total_cmp);
    let nbins = tail.len() / min_count;
    let mut bins = Vec::with_capacity(nbins);
    let mut lo = d_lo;
    for b in 0..nbins {
        let start = b * min_count;
        let end = if b + 1 == nbins { tail.len() } else { start + min_count };
        let hi = if end == tail.len() {
            d_hi
        } else {
            0.5 * (tail[end - 1] + tail[end])
        };
        let count = (end - start) as u64;
        bins.push(TailBin {
            lo,
            hi,
            count,
            density: count as f64 / (total * (hi - lo)),
        });
        lo = hi;
    }
    Ok(bins)
}

/// Fits with the default options on the gaps of `gl`.
pub fn tail_fit(gl: &GapList, d_lo: f64, d_hi: f64) -> Result<TailFit> {
    tail_fit_with(&gl.gaps, d_lo, d_hi, &TailFitOptions::default())
}

pub fn tail_fit_with(gaps: &[f64], d_lo: f64, d_hi: f64, opts: &TailFitOptions) -> Result<TailFit> {
    let bins = equal_count_bins(gaps, d_lo, d_hi, opts.min_bin_count)?;
    tail_fit_bins(&bins, opts)
}

/// Weighted least squares on binned densities. The model is integrated
/// exactly over each bin, so wide bins deep in the tail are not biased by
/// the curvature of the power law.
pub fn tail_fit_bins(bins: &[TailBin], opts: &TailFitOptions) -> Result<TailFit> {
    let terms = 2 + opts.extra_terms;
    if bins.len() < terms {
        return Err(Error::usage(format!(
            "{} bins cannot determine {terms} coefficients",
            bins.len()
        )));
    }
    if bins.iter().any(|b| !(b.hi > b.lo && b.lo > 0.0 && b.density > 0.0)) {
        return Err(Error::usage("tail bins need positive ranges and densities"));
    }
    // mean of d^(-k) over [lo, hi]
    let avg = |b: &TailBin, k: i32| -> f64 {
        let kk = (k - 1) as f64;
        (b.lo.powi(1 - k) - b.hi.powi(1 - k)) / (kk * (b.hi - b.lo))
    };
    let n = bins.len();
    let design = |b: &TailBin| -> Vec<f64> { (0..terms).map(|k| avg(b, 3 + k as i32)).collect() };
    // Pearson weights: Var(ĝ) = m/(N·width) with m the model bin mean, N·width = count/ĝ.
    // Start from m = ĝ and refit with the model prediction.
    let mut model: Vec<f64> = bins.iter().map(|b| b.density).collect();
    let solve = |model: &[f64]| -> Result<(DMatrix<f64>, DVector<f64>, DVector<f64>)> {
        let mut a = DMatrix::<f64>::zeros(n, terms);
        let mut y = DVector::<f64>::zeros(n);
        for (j, b) in bins.iter().enumerate() {
            let w = (b.count.max(1) as f64 / (b.density * model[j])).sqrt();
            for (k, x) in design(b).into_iter().enumerate() {
                a[(j, k)] = w * x;
            }
            y[j] = w * b.density;
        }
        let c = a
            .clone()
            .svd(true, true)
            .solve(&y, 1e-14)
            .map_err(|e| Error::usage(format!("tail fit failed: {e}")))?;
        Ok((a, y, c))
    };
    let (mut a, mut y, mut c) = solve(&model)?;
    for _ in 0..opts.reweight {
        let next: Vec<f64> = bins
            .iter()
            .map(|b| design(b).iter().zip(c.iter()).map(|(x, ck)| x * ck).sum::<f64>())
            .collect();
        if next.iter().any(|&m| !(m > 0.0)) {
            break;
        }
        model = next;
        (a, y, c) = solve(&model)?;
    }
    let r = &a * &c - &y;
    Ok(TailFit {
        c3: c[0],
        c4: c[1],
        extra: c.iter().skip(2).copied().collect(),
        residual: r.norm_squared(),
        fit_range: (bins[0].lo, bins[n - 1].hi),
        sample_count: bins.iter().map(|b| b.count).sum(),
        bins: n,
        options: *opts,
    })
}
