use crate::error::Result;

use super::{check_budget, check_radius, PointSet, Points, Provenance};

/// All integer pairs in the closed disc of radius `r`, sorted.
pub fn gen_lattice(r: f64) -> Result<PointSet> {
    check_radius(r)?;
    check_budget("lattice patch", std::f64::consts::PI * (r + 1.0) * (r + 1.0))?;
    let m = r.floor() as i64;
    let r2 = r * r;
    let mut pts = Vec::new();
    for a in -m..=m {
        let mut h = (r2 - (a * a) as f64).max(0.0).sqrt().floor() as i64;
        while ((a * a + h * h) as f64) > r2 {
            h -= 1;
        }
        while (((a * a) + (h + 1) * (h + 1)) as f64) <= r2 {
            h += 1;
        }
        pts.extend((-h..=h).map(|b| (a, b)));
    }
    Ok(PointSet::new(Points::Lattice(pts), Provenance::new("z2", r)))
}
