use radproj::analysis::quad::{integrate, integrate_to_infinity};
use radproj::analysis::*;
use radproj::pipeline::{GapList, SpacingHistogram};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn g(t: f64) -> f64 {
    Z2Density.pdf(t)
}

/// `∫_a^b` split at the branch points of `g`.
fn integrate_g(f: impl Fn(f64) -> f64 + Copy, b: f64, tol: f64) -> f64 {
    let knots = [Z2_GAP, Z2_KINK];
    let mut acc = 0.0;
    let mut lo = Z2_GAP;
    for &k in knots.iter().skip(1).chain(std::iter::once(&b)) {
        let hi = k.min(b);
        if hi > lo {
            acc += integrate(f, lo, hi, tol);
            lo = hi;
        }
    }
    acc
}

#[test]
fn z2_density_has_unit_mass_and_unit_mean() {
    let head = integrate_g(g, 2.0, 1e-12);
    let mass = head + integrate_to_infinity(g, 2.0, 1e-12);
    assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
    let mean = integrate_g(|t| t * g(t), 2.0, 1e-12) + integrate_to_infinity(|t| t * g(t), 2.0, 1e-12);
    assert!((mean - 1.0).abs() < 1e-6, "mean {mean}");
    // the closed-form distribution function agrees with the quadrature
    for t in [0.5, 1.0, Z2_KINK, 2.0, 10.0] {
        let q = integrate_g(g, t, 1e-13);
        assert!((q - cdf_z2(t)).abs() < 1e-9, "{t}: {q} vs {}", cdf_z2(t));
    }
}

#[test]
fn exponential_density_has_unit_mass() {
    let f = |t: f64| density_exp(1.0, t).unwrap();
    assert!((integrate_to_infinity(f, 0.0, 1e-12) - 1.0).abs() < 1e-8);
    let f3 = |t: f64| density_exp(3.0, t).unwrap();
    assert!((integrate_to_infinity(f3, 0.0, 1e-12) - 1.0).abs() < 1e-8);
}

#[test]
fn z2_density_is_nonnegative() {
    for k in 0..200_000 {
        let t = 1e-4 + k as f64 * 1e-3;
        assert!(g(t) >= 0.0, "{t}");
    }
}

/// `∫₀^T t²·g(t) dt`.
fn second_moment_to(t_max: f64) -> f64 {
    integrate_g(|t| t * t * g(t), t_max.min(10.0), 1e-12)
        + if t_max > 10.0 {
            // log-spaced pieces keep the integrand well resolved
            let mut acc = 0.0;
            let mut lo = 10.0;
            while lo < t_max {
                let hi = (lo * 10.0).min(t_max);
                acc += integrate(|t| t * t * g(t), lo, hi, 1e-12);
                lo = hi;
            }
            acc
        } else {
            0.0
        }
}

#[test]
fn second_moment_grows_without_bound() {
    let m: Vec<f64> = [1e2, 1e4, 1e6, 1e8, 1e12].iter().map(|&t| second_moment_to(t)).collect();
    assert!(m.windows(2).all(|w| w[1] > w[0]));
    // each decade adds C3·ln 10 in the limit
    let per_decade = (m[4] - m[3]) / 4.0;
    assert!((per_decade / (Z2_C3 * 10f64.ln()) - 1.0).abs() < 1e-3, "{per_decade}");
    // the growth is logarithmic: about 5.73 at T = 1e6, past 10 only near T = 1e11
    assert!(m[2] < 10.0 && m[4] > 10.0, "{m:?}");
}

fn equal_mass_bins(lo: f64, hi: f64, k: usize) -> Vec<TailBin> {
    let total = Z2Density.mass(lo, hi);
    let mut edges = vec![lo];
    for i in 1..k {
        let target = total * i as f64 / k as f64;
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if Z2Density.mass(lo, m) < target {
                a = m
            } else {
                b = m
            }
        }
        edges.push(0.5 * (a + b));
    }
    edges.push(hi);
    edges
        .windows(2)
        .map(|e| TailBin {
            lo: e[0],
            hi: e[1],
            count: 50,
            density: Z2Density.mass(e[0], e[1]) / (e[1] - e[0]),
        })
        .collect()
}

#[test]
fn noiseless_tail_fit_recovers_taylor_coefficients() {
    let bins = equal_mass_bins(10.0, 100.0, 40);
    let opts = TailFitOptions {
        extra_terms: 1,
        ..TailFitOptions::default()
    };
    let f = tail_fit_bins(&bins, &opts).unwrap();
    assert!((f.c3 / Z2_C3 - 1.0).abs() < 0.01, "{f:?}");
    assert!((f.c4 / Z2_C4 - 1.0).abs() < 0.01, "{f:?}");
    assert!((f.extra[0] / Z2_C5 - 1.0).abs() < 0.2, "{f:?}");
    // the two-term model absorbs the t⁵ term into c4
    let two = tail_fit_bins(&bins, &TailFitOptions::default()).unwrap();
    assert!((two.c3 / Z2_C3 - 1.0).abs() < 0.01);
    assert!(two.c4 > Z2_C4 * 1.05);
}

fn sample_z2(n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let u: f64 = rng.random();
            let (mut lo, mut hi) = (Z2_GAP, Z2_GAP * 2.0);
            while cdf_z2(hi) < u {
                hi *= 2.0;
            }
            while hi - lo > 1e-12 * hi {
                let m = 0.5 * (lo + hi);
                if cdf_z2(m) < u {
                    lo = m
                } else {
                    hi = m
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

#[test]
fn tail_fit_on_samples_of_g() {
    let xs = sample_z2(10_000_000, 2024);
    let gl = GapList {
        gaps: xs,
        normalization: 1.0,
        include_wraparound: false,
    };
    let f = tail_fit(&gl, 5.0, 50.0).unwrap();
    assert!((f.c3 - 0.369).abs() < 0.02, "{f:?}");
    assert!(f.sample_count > 50_000);
    assert_eq!(f.fit_range, (5.0, 50.0));
    // the samples follow g
    assert!(ks_distance(&gl.gaps[..200_000], &Z2Density) < 0.01);
}

#[test]
fn tail_fit_needs_tail_mass() {
    let gl = GapList {
        gaps: vec![1.0; 10_000],
        normalization: 1.0,
        include_wraparound: false,
    };
    match tail_fit(&gl, 5.0, 50.0) {
        Err(radproj::Error::Usage(msg)) => assert!(msg.contains("only 0 gaps"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn comparison_of_exponential_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut h = SpacingHistogram::empty(0.01, 4.0).unwrap();
    let xs: Vec<f64> = (0..200_000).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    for &x in &xs {
        h.add(x);
    }
    let e = ExpDensity::new(1.0).unwrap();
    let c = compare(&h, &e);
    assert!(c.ks < 0.005 && c.l1 < 0.05, "{c:?}");
    assert!(ks_distance(&xs, &e) < 0.005);
    let z = compare(&h, &Z2Density);
    assert!(z.l1 > 0.3 && z.ks > 0.1, "{z:?}");
}
