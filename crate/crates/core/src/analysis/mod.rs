//! Reference spacing laws, tail fitting and histogram comparison.

pub mod compare;
pub mod density;
pub mod fit;
pub mod quad;

pub use compare::{compare, ks_distance, Comparison};
pub use density::{
    cdf_z2, density_exp, density_z2, density_z2_tail, ExpDensity, HistogramDensity, ReferenceDensity, Z2Density,
    Z2_C3, Z2_C4, Z2_C5, Z2_GAP, Z2_KINK,
};
pub use fit::{
    equal_count_bins, gap_size, tail_fit, tail_fit_bins, tail_fit_with, TailBin, TailFit, TailFitOptions,
    MIN_TAIL_SAMPLES,
};
