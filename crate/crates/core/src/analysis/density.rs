use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::pipeline::SpacingHistogram;

const PI2: f64 = PI * PI;
/// Lower edge of the support of `g`, `3/π²`.
pub const Z2_GAP: f64 = 3.0 / PI2;
/// Second branch point of `g`, `12/π²`.
pub const Z2_KINK: f64 = 12.0 / PI2;
/// Tail coefficients: `g(1/t) = C3·t³ + C4·t⁴ + C5·t⁵ + O(t⁶)`.
pub const Z2_C3: f64 = 36.0 / (PI2 * PI2);
pub const Z2_C4: f64 = 162.0 / (PI2 * PI2 * PI2);
pub const Z2_C5: f64 = 1080.0 / (PI2 * PI2 * PI2 * PI2);

/// Limiting spacing density of the visible points of ℤ².
pub fn density_z2(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::usage(format!("density_z2 needs t > 0, got {t}")));
    }
    Ok(g_unchecked(t))
}

fn g_unchecked(t: f64) -> f64 {
    if t <= Z2_GAP {
        0.0
    } else if t <= Z2_KINK {
        6.0 / (PI2 * t * t) * ((t - Z2_GAP) / Z2_GAP).ln_1p()
    } else {
        // log(2/(1+s)) with s = √(1 - x), written to avoid cancellation near x = 1 and x = 0
        let x = Z2_KINK / t;
        let s = ((t - Z2_KINK) / t).sqrt();
        12.0 / (PI2 * t * t) * -(-x / (2.0 * (1.0 + s))).ln_1p()
    }
}

/// Two-term tail expansion of `g(1/t)`.
pub fn density_z2_tail(t: f64) -> f64 {
    Z2_C3 * t.powi(3) + Z2_C4 * t.powi(4)
}

/// `λ·exp(-λx)` for `x ≥ 0`, zero otherwise.
pub fn density_exp(lambda: f64, x: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::usage(format!("exponential rate must be positive, got {lambda}")));
    }
    Ok(if x < 0.0 { 0.0 } else { lambda * (-lambda * x).exp() })
}

/// Closed-form distribution function of `g`.
pub fn cdf_z2(t: f64) -> f64 {
    if t <= Z2_GAP {
        0.0
    } else if t <= Z2_KINK {
        2.0 - 6.0 / PI2 * (((t - Z2_GAP) / Z2_GAP).ln_1p() + 1.0) / t
    } else {
        1.0 - tail_z2(t)
    }
}

/// `∫_t^∞ g` for `t ≥ 12/π²`.
fn tail_z2(t: f64) -> f64 {
    let u = 1.0 / t;
    if Z2_KINK * u < 1e-3 {
        // ∫₀ᵘ g(1/v)/v² dv from the tail expansion
        return Z2_C3 * u * u / 2.0 + Z2_C4 * u.powi(3) / 3.0 + Z2_C5 * u.powi(4) / 4.0;
    }
    let s = ((t - Z2_KINK) / t).sqrt();
    let f = (s * s - 1.0) / 2.0 * s.ln_1p() - s * s / 4.0 + s / 2.0;
    Z2_KINK * u * LN_2 - 0.5 + 2.0 * f
}

/// A reference distribution on `[0, ∞)`.
pub trait ReferenceDensity: Sync {
    fn name(&self) -> &str;
    fn pdf(&self, t: f64) -> f64;
    fn cdf(&self, t: f64) -> f64;
    /// Probability mass of `[a, b)`.
    fn mass(&self, a: f64, b: f64) -> f64 {
        self.cdf(b) - self.cdf(a)
    }
}

/// The ℤ² spacing law `g`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Z2Density;

impl ReferenceDensity for Z2Density {
    fn name(&self) -> &str {
        "z2"
    }
    fn pdf(&self, t: f64) -> f64 {
        if t > 0.0 {
            g_unchecked(t)
        } else {
            0.0
        }
    }
    fn cdf(&self, t: f64) -> f64 {
        cdf_z2(t)
    }
    fn mass(&self, a: f64, b: f64) -> f64 {
        // difference of tails is more accurate far out
        if a >= Z2_KINK {
            tail_z2(a) - tail_z2(b)
        } else {
            cdf_z2(b) - cdf_z2(a)
        }
    }
}

/// Exponential law with rate `lambda`.
#[derive(Clone, Copy, Debug)]
pub struct ExpDensity {
    pub lambda: f64,
}

impl ExpDensity {
    pub fn new(lambda: f64) -> Result<Self> {
        density_exp(lambda, 0.0).map(|_| ExpDensity { lambda })
    }
}

impl ReferenceDensity for ExpDensity {
    fn name(&self) -> &str {
        "exp"
    }
    fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.lambda * (-self.lambda * t).exp()
        }
    }
    fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -(-self.lambda * t).exp_m1()
        }
    }
}

/// Piecewise-constant density read off a histogram (in-range mass only).
#[derive(Clone, Debug)]
pub struct HistogramDensity {
    width: f64,
    t_max: f64,
    cumulative: Vec<f64>,
}

impl HistogramDensity {
    pub fn new(h: &SpacingHistogram) -> Self {
        let total = h.total.max(1) as f64;
        let mut cumulative = Vec::with_capacity(h.counts.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0u64;
        for &c in &h.counts {
            acc += c;
            cumulative.push(acc as f64 / total);
        }
        HistogramDensity {
            width: h.bin_width,
            t_max: h.t_max,
            cumulative,
        }
    }
}

impl ReferenceDensity for HistogramDensity {
    fn name(&self) -> &str {
        "histogram"
    }
    fn pdf(&self, t: f64) -> f64 {
        if !(0.0..self.t_max).contains(&t) {
            return 0.0;
        }
        let k = ((t / self.width) as usize).min(self.cumulative.len() - 2);
        (self.cumulative[k + 1] - self.cumulative[k]) / self.width
    }
    fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let n = self.cumulative.len() - 1;
        let x = (t / self.width).min(n as f64);
        let k = (x.floor() as usize).min(n);
        if k == n {
            return self.cumulative[n];
        }
        let frac = x - k as f64;
        self.cumulative[k] + frac * (self.cumulative[k + 1] - self.cumulative[k])
    }
}
