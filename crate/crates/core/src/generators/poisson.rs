use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::cyclo::PlanarPoint;
use crate::error::{Error, Result};

use super::{check_budget, check_radius, PointSet, Points, Provenance};

/// Stream reserved for drawing the point count.
const COUNT_STREAM: u64 = u64::MAX;

/// Homogeneous Poisson sample in the disc of radius `r`.
///
/// The count is drawn from a dedicated stream; point `i` uses its own
/// ChaCha stream `i` under the same key, so the result does not depend on
/// how the index range is split across threads. The origin is prepended as
/// the reference point.
pub fn gen_poisson(r: f64, intensity: f64, seed: u64) -> Result<PointSet> {
    check_radius(r)?;
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(Error::usage(format!("intensity must be positive, got {intensity}")));
    }
    let mean = intensity * std::f64::consts::PI * r * r;
    check_budget("Poisson sample", mean + 10.0 * mean.sqrt())?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(COUNT_STREAM);
    let n = Poisson::new(mean)
        .map_err(|e| Error::usage(format!("Poisson mean {mean}: {e}")))?
        .sample(&mut rng) as u64;

    let r2 = r * r;
    let mut pts: Vec<PlanarPoint> = Vec::with_capacity(n as usize + 1);
    pts.push(PlanarPoint::ORIGIN);
    pts.par_extend((0..n).into_par_iter().map(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        loop {
            let x = rng.random_range(-r..r);
            let y = rng.random_range(-r..r);
            if x * x + y * y <= r2 {
                return PlanarPoint::new(x, y);
            }
        }
    }));

    let mut prov = Provenance::new("poisson", r).with_param("intensity", intensity);
    prov.seed = Some(seed);
    Ok(PointSet::new(Points::Float(pts), prov))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = gen_poisson(20.0, 1.0, 42).unwrap();
        let b = gen_poisson(20.0, 1.0, 42).unwrap();
        assert_eq!(a, b);
        let c = gen_poisson(20.0, 1.0, 43).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn independent_of_thread_count() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = pool.install(|| gen_poisson(30.0, 2.0, 9).unwrap());
        let many = gen_poisson(30.0, 2.0, 9).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_poisson(10.0, 0.0, 1).is_err());
        assert!(gen_poisson(10.0, -1.0, 1).is_err());
        assert!(gen_poisson(-1.0, 1.0, 1).is_err());
    }

    #[test]
    fn points_lie_in_disc() {
        let ps = gen_poisson(15.0, 1.0, 3).unwrap();
        assert!(ps.points.positions().iter().all(|p| p.norm() <= 15.0));
        assert_eq!(ps.points.position(0), PlanarPoint::ORIGIN);
    }
}
