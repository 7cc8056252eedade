use proptest::prelude::*;
use radproj::generators::*;
use radproj::pipeline::*;
use radproj::visibility::visible_z2;
use radproj::PlanarPoint;

fn visible_lattice(r: f64) -> Vec<(i64, i64)> {
    match visible_z2(&gen_lattice(r).unwrap()).unwrap().points {
        Points::Lattice(p) => p,
        _ => unreachable!(),
    }
}

fn gaps_of(points: Points, wrap: bool) -> Vec<f64> {
    let ps = PointSet::new(points, Provenance::new("test", 0.0));
    normalized_gaps(&project_angles(&ps).unwrap(), wrap).unwrap().gaps
}

#[test]
fn lattice_scaling_is_bit_exact() {
    let base = visible_lattice(60.0);
    let g0 = gaps_of(Points::Lattice(base.clone()), false);
    for c in [2i64, 3, 7, 1000] {
        let scaled = base.iter().map(|&(a, b)| (c * a, c * b)).collect();
        assert_eq!(gaps_of(Points::Lattice(scaled), false), g0, "c = {c}");
    }
}

fn as_float(p: &[(i64, i64)], s: f64) -> Points {
    Points::Float(p.iter().map(|&(a, b)| PlanarPoint::new(a as f64 * s, b as f64 * s)).collect())
}

#[test]
fn float_scaling() {
    let base = visible_lattice(60.0);
    let g0 = gaps_of(as_float(&base, 1.0), false);
    // the unreduced float directions match the reduced lattice ones to rounding
    let gl = gaps_of(Points::Lattice(base.clone()), false);
    assert!(g0.iter().zip(&gl).all(|(a, b)| (a - b).abs() < 1e-9));
    for s in [0.25, 2.0, 1024.0] {
        assert_eq!(gaps_of(as_float(&base, s), false), g0, "s = {s}");
    }
    for s in [0.3, 1.7, 123.456] {
        let g = gaps_of(as_float(&base, s), false);
        assert_eq!(g.len(), g0.len());
        let worst = g.iter().zip(&g0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "s = {s}: {worst}");
    }
}

#[test]
fn rotation_permutes_the_closed_gap_sequence() {
    let base = visible_lattice(50.0);
    let mut g0 = gaps_of(as_float(&base, 1.0), true);
    g0.sort_unstable_by(f64::total_cmp);
    for theta in [0.1, 1.0, 2.5, -0.7] {
        let rotated: Vec<PlanarPoint> = base
            .iter()
            .map(|&(a, b)| PlanarPoint::new(a as f64, b as f64).rotate(theta))
            .collect();
        let mut g = gaps_of(Points::Float(rotated), true);
        g.sort_unstable_by(f64::total_cmp);
        assert_eq!(g.len(), g0.len());
        let worst = g.iter().zip(&g0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "theta = {theta}: {worst}");
    }
}

#[test]
fn pipeline_is_scale_invariant_on_poisson_points() {
    // scaling the process by s with intensity 1/s² is the same configuration
    let cfg = PipelineConfig::new(GeneratorConfig::Poisson { intensity: 1.0, seed: 3 }, 40.0);
    let out = run_pipeline(&cfg).unwrap();
    let Points::Float(p) = &out.visible.points else { unreachable!() };
    let scaled: Vec<PlanarPoint> = p.iter().map(|q| q.scale(4.0)).collect();
    assert_eq!(gaps_of(Points::Float(scaled), false), out.gaps.gaps);
}

fn hist(gaps: &[f64]) -> SpacingHistogram {
    histogram(
        &GapList {
            gaps: gaps.to_vec(),
            normalization: 1.0,
            include_wraparound: false,
        },
        0.05,
        3.0,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn histogram_merge_is_associative(
        gaps in prop::collection::vec(0.0f64..5.0, 0..300),
        cut1 in 0usize..300,
        cut2 in 0usize..300,
    ) {
        let (i, j) = (cut1.min(cut2).min(gaps.len()), cut1.max(cut2).min(gaps.len()));
        let (a, b, c) = (hist(&gaps[..i]), hist(&gaps[i..j]), hist(&gaps[j..]));
        let left = a.merge(&b).unwrap().merge(&c).unwrap();
        let right = a.merge(&b.merge(&c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&left, &hist(&gaps));
        prop_assert_eq!(&a.merge(&b).unwrap(), &b.merge(&a).unwrap());
    }
}

#[test]
fn merge_rejects_incompatible_bins() {
    let a = hist(&[0.1, 0.2]);
    let b = SpacingHistogram::empty(0.1, 3.0).unwrap();
    assert!(a.merge(&b).is_err());
}
